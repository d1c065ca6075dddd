//! Small numeric helpers: big-integer logarithms, Wilson intervals and
//! seed derivation.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Natural logarithm of an arbitrary-precision integer; `-inf` for zero.
pub fn big_ln(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map(f64::ln).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::MAX);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `floor(base^exponent)` with a guard against representation error when the
/// power is within rounding distance of an integer.
pub fn floor_pow(base: f64, exponent: f64) -> f64 {
    let value = (exponent * base.ln()).exp();
    let nearest = value.round();
    if (value - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        value.floor()
    }
}

/// Two-sided z value for a 95% interval.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials` Bernoulli draws.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// SplitMix64 finaliser used to derive independent per-task seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn big_ln_matches_float_for_small_values() {
        let x = BigUint::from(12345u32);
        assert!((big_ln(&x) - 12345f64.ln()).abs() < 1e-12);
        assert_eq!(big_ln(&BigUint::zero()), f64::NEG_INFINITY);
    }

    #[test]
    fn big_ln_of_large_power() {
        let x = num_traits::pow(BigUint::from(3u32), 2000);
        let expected = 2000.0 * 3f64.ln();
        assert!(((big_ln(&x) - expected) / expected).abs() < 1e-12);
        let y = (BigUint::one() << 5000usize) + BigUint::one();
        assert!((big_ln(&y) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn floor_pow_snaps_exact_powers() {
        assert_eq!(floor_pow(3.0, 5.0), 243.0);
        assert_eq!(floor_pow(3.0, 0.5 * 10.0), 243.0);
        assert_eq!(floor_pow(3.0, 0.01), 1.0);
    }

    #[test]
    fn wilson_is_inside_unit_interval() {
        let (lo, hi) = wilson_interval(0, 100, Z_95);
        assert!(lo == 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(50, 100, Z_95);
        assert!(lo < 0.5 && hi > 0.5);
    }
}
