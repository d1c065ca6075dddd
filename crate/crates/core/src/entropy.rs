//! Genericity entropy of word predicates: complement counts (exact or Monte
//! Carlo), finite-window entropy profiles, tuple fractions in the density
//! model and the closed-form entropy bounds.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cancellation::{is_c_prime, Presentation};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numeric::{big_ln, floor_pow, mix_seed, wilson_interval, Z_95};
use crate::readability::{is_good, is_mu_l_readable, is_mu_readable, Mode, ReadabilityParams};
use crate::words::{
    count_cyclic, count_with_prefix_constraint, for_each_cyclic, freely_reduced_prefixes,
    sample_cyclic_with, Alphabet, CyclicWord, Letter, LetterAutomaton,
};

pub type Evaluator = Arc<dyn Fn(&CyclicWord) -> Result<bool> + Send + Sync>;
/// Exact size of the complement at a given length.
pub type ComplementCounter = Arc<dyn Fn(usize) -> BigUint + Send + Sync>;

/// A named, parameterised membership test on cyclically reduced words.
#[derive(Clone)]
pub struct PredicateHandle {
    name: String,
    params: BTreeMap<String, String>,
    alphabet: Alphabet,
    evaluator: Evaluator,
    complement_counter: Option<ComplementCounter>,
}

impl fmt::Debug for PredicateHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PredicateHandle")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("rank", &self.alphabet.rank())
            .field("exact_count", &self.complement_counter.is_some())
            .finish()
    }
}

impl PredicateHandle {
    pub fn new<F>(name: &str, alphabet: Alphabet, evaluator: F) -> Self
    where
        F: Fn(&CyclicWord) -> Result<bool> + Send + Sync + 'static,
    {
        PredicateHandle {
            name: name.to_string(),
            params: BTreeMap::new(),
            alphabet,
            evaluator: Arc::new(evaluator),
            complement_counter: None,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_exact_complement<F>(mut self, counter: F) -> Self
    where
        F: Fn(usize) -> BigUint + Send + Sync + 'static,
    {
        self.complement_counter = Some(Arc::new(counter));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, String> {
        &self.params
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn has_exact_count(&self) -> bool {
        self.complement_counter.is_some()
    }

    pub fn holds(&self, w: &CyclicWord) -> Result<bool> {
        (self.evaluator)(w)
    }

    pub fn always_true(alphabet: Alphabet) -> Self {
        PredicateHandle::new("true", alphabet, |_| Ok(true))
            .with_exact_complement(|_| BigUint::zero())
    }

    pub fn always_false(alphabet: Alphabet) -> Self {
        let k = alphabet.rank();
        PredicateHandle::new("false", alphabet, |_| Ok(false))
            .with_exact_complement(move |n| count_cyclic(n, k))
    }

    /// Calibration predicate with complement entropy 1/2: the complement is
    /// the words whose first `ceil(n/2)` letters are all `a_1` or all `a_1⁻¹`.
    pub fn a_head(alphabet: Alphabet) -> Self {
        PredicateHandle::new("a-head", alphabet, |w| Ok(!in_a_head_complement(w.letters())))
            .with_exact_complement(move |n| {
                count_with_prefix_constraint(n, alphabet, AHead::new(n.div_ceil(2)))
            })
    }

    pub fn non_mu_readable(alphabet: Alphabet, mu: f64) -> Result<Self> {
        let params = ReadabilityParams::mu(alphabet, mu)?;
        Ok(PredicateHandle::new("non-mu-readable", alphabet, move |w| {
            Ok(!is_mu_readable(w.word(), &params, Mode::QuotientSearch)?.readable)
        })
        .with_param("mu", mu))
    }

    pub fn non_mu_l_readable(alphabet: Alphabet, mu: f64, l: usize) -> Result<Self> {
        let params = ReadabilityParams::mu_l(alphabet, mu, l)?;
        Ok(PredicateHandle::new("non-muL-readable", alphabet, move |w| {
            Ok(!is_mu_l_readable(w.word(), &params, Mode::QuotientSearch)?.readable)
        })
        .with_param("mu", mu)
        .with_param("L", l))
    }

    pub fn good(alphabet: Alphabet, mu: f64, l: usize) -> Result<Self> {
        let params = ReadabilityParams::mu_l(alphabet, mu, l)?;
        Ok(PredicateHandle::new("good", alphabet, move |w| is_good(w, &params))
            .with_param("mu", mu)
            .with_param("L", l))
    }

    /// Words whose one-relator presentation satisfies C'(λ).
    pub fn c_prime(alphabet: Alphabet, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::InvalidInput(format!("lambda must lie in (0,1], got {lambda}")));
        }
        Ok(PredicateHandle::new("c-prime", alphabet, move |w| {
            let p = Presentation::new(w.alphabet(), vec![w.clone()])?;
            Ok(is_c_prime(&p, lambda)?.satisfied)
        })
        .with_param("lambda", lambda))
    }
}

fn in_a_head_complement(w: &[Letter]) -> bool {
    let h = w.len().div_ceil(2);
    h > 0 && (w[..h].iter().all(|&l| l == 1) || w[..h].iter().all(|&l| l == -1))
}

/// Accepts words starting with `a^h` or `A^h`.
struct AHead {
    head: usize,
}

impl AHead {
    fn new(head: usize) -> Self {
        AHead { head }
    }
    // 0 = start, 1..head = a-run, head..2head-1 = A-run, 2head-1 = matched
    fn matched(&self) -> usize {
        2 * self.head - 1
    }
}

impl LetterAutomaton for AHead {
    fn num_states(&self) -> usize {
        2 * self.head
    }
    fn start(&self) -> usize {
        0
    }
    fn step(&self, state: usize, letter: Letter) -> Option<usize> {
        let h = self.head;
        if h == 0 || state == self.matched() {
            return Some(self.matched());
        }
        let (sign, run) = match state {
            0 => (letter, 0),
            s if s < h => (1, s),
            s => (-1, s - h + 1),
        };
        if letter != sign || letter.abs() != 1 {
            return None;
        }
        if run + 1 == h {
            Some(self.matched())
        } else if sign > 0 {
            Some(run + 1)
        } else {
            Some(h + run)
        }
    }
    fn accepts(&self, state: usize) -> bool {
        self.head == 0 || state == self.matched()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// Size of the complement of a predicate among cyclically reduced words of
/// one length.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplementCount {
    pub n: usize,
    pub total: BigUint,
    pub exact: Option<BigUint>,
    /// Point estimate (equal to `exact` when available).
    pub estimate: f64,
    /// 95% Wilson interval in count units; degenerate when exact.
    pub ci: (f64, f64),
}

const MC_CHUNK: u64 = 4096;

pub fn count_complement(
    pred: &PredicateHandle,
    n: usize,
    mode: CountMode,
    limits: &Limits,
) -> Result<ComplementCount> {
    if n == 0 {
        return Err(Error::InvalidInput("complement counts need n >= 1".into()));
    }
    let alphabet = pred.alphabet;
    let total = count_cyclic(n, alphabet.rank());
    let total_f = total.to_f64().unwrap_or(f64::INFINITY);
    match mode {
        CountMode::Exact => {
            let exact = match &pred.complement_counter {
                Some(counter) => counter(n),
                None => enumerate_complement(pred, n, &total, limits)?,
            };
            let estimate = exact.to_f64().unwrap_or(f64::INFINITY);
            Ok(ComplementCount {
                n,
                total,
                exact: Some(exact),
                estimate,
                ci: (estimate, estimate),
            })
        }
        CountMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidInput("Monte Carlo needs at least one sample".into()));
            }
            let chunks = samples.div_ceil(MC_CHUNK);
            let failing: Result<Vec<u64>> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, c));
                    let size = MC_CHUNK.min(samples - c * MC_CHUNK);
                    let mut fails = 0;
                    for _ in 0..size {
                        let w = sample_cyclic_with(n, alphabet, &mut rng);
                        if !pred.holds(&w)? {
                            fails += 1;
                        }
                    }
                    Ok(fails)
                })
                .collect();
            let failing: u64 = failing?.into_iter().sum();
            let (lo, hi) = wilson_interval(failing, samples, Z_95);
            let p = failing as f64 / samples as f64;
            Ok(ComplementCount {
                n,
                total,
                exact: None,
                estimate: p * total_f,
                ci: (lo * total_f, hi * total_f),
            })
        }
    }
}

fn enumerate_complement(
    pred: &PredicateHandle,
    n: usize,
    total: &BigUint,
    limits: &Limits,
) -> Result<BigUint> {
    if total > &BigUint::from(limits.enumeration_cap) {
        return Err(Error::CapExceeded {
            what: "exact complement enumeration",
            requested: total.to_string(),
            cap: limits.enumeration_cap,
        });
    }
    let alphabet = pred.alphabet;
    let shards = freely_reduced_prefixes(n.min(3), alphabet);
    let first_error: Mutex<Option<Error>> = Mutex::new(None);
    let count: u64 = shards
        .par_iter()
        .map(|prefix| {
            let mut fails = 0u64;
            let mut failed = false;
            for_each_cyclic(n, alphabet, prefix, |w| {
                if failed {
                    return;
                }
                let word = CyclicWord::from_letters(w.to_vec(), alphabet).expect("enumerated word");
                match pred.holds(&word) {
                    Ok(true) => {}
                    Ok(false) => fails += 1,
                    Err(e) => {
                        failed = true;
                        first_error.lock().expect("error lock").get_or_insert(e);
                    }
                }
            });
            fails
        })
        .sum();
    if let Some(e) = first_error.into_inner().expect("error lock") {
        return Err(e);
    }
    Ok(BigUint::from(count))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropySample {
    pub n: usize,
    /// Complement count (exact or estimated).
    pub gamma_bar: f64,
    #[serde(skip)]
    pub gamma_bar_exact: Option<BigUint>,
    /// `ln γ̄ / (n ln(2k-1))`; `None` when the complement is empty.
    pub t_hat: Option<f64>,
    pub ci: (f64, f64),
}

/// Finite-length entropy samples. `sup` and `inf` summarise the window only;
/// they are not limits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyProfile {
    pub rank: usize,
    pub window: (usize, usize),
    pub samples: Vec<EntropySample>,
    pub sup: Option<f64>,
    pub inf: Option<f64>,
}

impl EntropyProfile {
    pub fn from_counts(rank: usize, counts: Vec<ComplementCount>) -> Self {
        let log_base = (2.0 * rank as f64 - 1.0).ln();
        let samples: Vec<EntropySample> = counts
            .into_iter()
            .map(|c| {
                let ln = match &c.exact {
                    Some(e) => big_ln(e),
                    None => c.estimate.ln(),
                };
                EntropySample {
                    n: c.n,
                    gamma_bar: c.estimate,
                    gamma_bar_exact: c.exact,
                    t_hat: ln.is_finite().then(|| ln / (c.n as f64 * log_base)),
                    ci: c.ci,
                }
            })
            .collect();
        let values = samples.iter().filter_map(|s| s.t_hat);
        let sup = values.clone().reduce(f64::max);
        let inf = values.reduce(f64::min);
        let window = (
            samples.first().map_or(0, |s| s.n),
            samples.last().map_or(0, |s| s.n),
        );
        EntropyProfile {
            rank,
            window,
            samples,
            sup,
            inf,
        }
    }

    /// True when every sample has an empty complement.
    pub fn all_sentinel(&self) -> bool {
        self.samples.iter().all(|s| s.t_hat.is_none())
    }
}

pub fn entropy_profile(
    pred: &PredicateHandle,
    lengths: RangeInclusive<usize>,
    mode: CountMode,
    limits: &Limits,
) -> Result<EntropyProfile> {
    let counts = lengths
        .map(|n| {
            let mode = match mode {
                CountMode::MonteCarlo { samples, seed } => CountMode::MonteCarlo {
                    samples,
                    seed: mix_seed(seed, n as u64),
                },
                exact => exact,
            };
            count_complement(pred, n, mode, limits)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyProfile::from_counts(pred.alphabet.rank(), counts))
}

/// Number of relators `m_n = max(1, floor((2k-1)^{dn}))`, as a float since it
/// overflows 64 bits at moderate `dn`.
pub fn tuple_size(k: usize, n: usize, d: f64) -> f64 {
    floor_pow(2.0 * k as f64 - 1.0, d * n as f64).max(1.0)
}

/// `(γ_P/γ_C)^m` with `m = tuple_size(k, n, d)`, evaluated in log domain.
pub fn tuple_fraction(k: usize, n: usize, d: f64, gamma_p: &BigUint, gamma_c: &BigUint) -> Result<f64> {
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::InvalidInput(format!("density must lie in (0,1), got {d}")));
    }
    tuple_fraction_for_size(tuple_size(k, n, d), gamma_p, gamma_c)
}

/// `(γ_P/γ_C)^m` as `exp(m · ln(1 - γ̄/γ_C))`.
pub fn tuple_fraction_for_size(m: f64, gamma_p: &BigUint, gamma_c: &BigUint) -> Result<f64> {
    if gamma_c.is_zero() {
        return Err(Error::InvalidInput("gamma_C must be positive".into()));
    }
    if gamma_p > gamma_c {
        return Err(Error::InvalidInput("gamma_P exceeds gamma_C".into()));
    }
    let deficit = gamma_c - gamma_p;
    if deficit.is_zero() {
        return Ok(1.0);
    }
    let ratio = (big_ln(&deficit) - big_ln(gamma_c)).exp();
    Ok((m * (-ratio).ln_1p()).exp())
}

#[derive(Clone, Debug, PartialEq)]
pub struct AoFraction {
    pub fraction: f64,
    /// m-tuples whose entries all satisfy the predicate.
    pub favourable: BigUint,
    pub total: BigUint,
    /// Cumulative single-word fraction over lengths `1..=n`.
    pub single_word_fraction: f64,
    /// Whether `favourable / total` equals the single-word fraction to the
    /// m-th power exactly.
    pub factorizes: bool,
}

/// Exact fraction of m-tuples of nonempty cyclically reduced words of length
/// at most `n` whose entries all satisfy `pred`, by walking every tuple.
pub fn ao_fraction(pred: &PredicateHandle, m: usize, n: usize, limits: &Limits) -> Result<AoFraction> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput("m and n must be positive".into()));
    }
    let k = pred.alphabet.rank();
    let words_total: BigUint = (1..=n).map(|l| count_cyclic(l, k)).sum();
    let total = num_traits::pow(words_total.clone(), m);
    let cap = BigUint::from(limits.enumeration_cap);
    if total > cap {
        return Err(Error::CapExceeded {
            what: "tuple enumeration",
            requested: total.to_string(),
            cap: limits.enumeration_cap,
        });
    }
    let mut passes = Vec::new();
    for l in 1..=n {
        let mut err = None;
        for_each_cyclic(l, pred.alphabet, &[], |w| {
            if err.is_some() {
                return;
            }
            let word = CyclicWord::from_letters(w.to_vec(), pred.alphabet).expect("enumerated word");
            match pred.holds(&word) {
                Ok(p) => passes.push(p),
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    let w = passes.len();
    let mut odometer = vec![0usize; m];
    let mut favourable: u64 = 0;
    loop {
        if odometer.iter().all(|&i| passes[i]) {
            favourable += 1;
        }
        let mut pos = m;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < w {
                break;
            }
            odometer[pos] = 0;
            if pos == 0 {
                pos = usize::MAX;
                break;
            }
        }
        if pos == usize::MAX {
            break;
        }
    }
    let single = passes.iter().filter(|&&p| p).count();
    let favourable = BigUint::from(favourable);
    let factorizes = favourable == num_traits::pow(BigUint::from(single), m);
    let fraction = if favourable.is_zero() {
        0.0
    } else {
        (big_ln(&favourable) - big_ln(&total)).exp()
    };
    Ok(AoFraction {
        fraction,
        favourable,
        total,
        single_word_fraction: single as f64 / w as f64,
        factorizes,
    })
}

/// Lower bound `ln(2k-3)/ln(2k-1)` on the entropy of non-μ-readable words.
pub fn bound_prop_read(k: usize) -> f64 {
    let k = k as f64;
    (2.0 * k - 3.0).ln() / (2.0 * k - 1.0).ln()
}

/// `ln((2k-1)^{3L} - 1/2) / (3L ln(2k-1))`.
pub fn remark_h_bound(k: usize, l: usize) -> f64 {
    let log_base = (2.0 * k as f64 - 1.0).ln();
    let three_l = 3.0 * l as f64;
    let ln_power = three_l * log_base;
    // ln(P - 1/2) = ln P + ln(1 - 1/(2P))
    let correction = (-0.5 * (-ln_power).exp()).ln_1p();
    (ln_power + correction) / (three_l * log_base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn brute_complement(pred: &PredicateHandle, n: usize) -> BigUint {
        let mut c = 0u64;
        for_each_cyclic(n, pred.alphabet(), &[], |w| {
            let w = CyclicWord::from_letters(w.to_vec(), pred.alphabet()).unwrap();
            if !pred.holds(&w).unwrap() {
                c += 1;
            }
        });
        BigUint::from(c)
    }

    #[test]
    fn trivial_predicates() {
        let limits = Limits::default();
        let t = PredicateHandle::always_true(f2());
        let f = PredicateHandle::always_false(f2());
        for n in 1..=6 {
            assert_eq!(count_complement(&t, n, CountMode::Exact, &limits).unwrap().exact, Some(BigUint::zero()));
            assert_eq!(count_complement(&f, n, CountMode::Exact, &limits).unwrap().exact, Some(count_cyclic(n, 2)));
        }
    }

    #[test]
    fn a_head_transfer_matrix_matches_brute_force() {
        for k in 2..=3 {
            let pred = PredicateHandle::a_head(Alphabet::new(k).unwrap());
            for n in 1..=if k == 2 { 10 } else { 7 } {
                let exact = count_complement(&pred, n, CountMode::Exact, &Limits::default()).unwrap();
                assert_eq!(exact.exact.unwrap(), brute_complement(&pred, n), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn a_head_closed_form() {
        // a^h then n-h free letters avoiding A and, at the end, A: for n >= 2
        // the count is 2 * (number of reduced tails of length n-h after a
        // that do not end in A).
        let pred = PredicateHandle::a_head(f2());
        for n in 2usize..=30 {
            let h = n.div_ceil(2);
            let tail = n - h;
            // tails: sequences x_1..x_tail, x_1 != A, consecutive non-cancelling,
            // last != A (tail >= 1); all-a tail included.
            let mut end_a = 1u128; // current last letter = a (the head)
            let mut end_other = 0u128; // last letter in {b, B}
            let mut end_inv = 0u128; // last letter A
            for _ in 0..tail {
                let (a, o, i) = (end_a, end_other, end_inv);
                end_a = a + o;
                end_other = 2 * (a + o + i) - o;
                end_inv = o + i;
            }
            let expected = 2 * (end_a + end_other);
            let got = count_complement(&pred, n, CountMode::Exact, &Limits::default()).unwrap();
            assert_eq!(got.exact.unwrap(), BigUint::from(expected), "n={n}");
        }
    }

    #[test]
    fn enumeration_fallback_matches_brute_force() {
        let counterless = PredicateHandle::new("a-head-enum", f2(), |w| Ok(!in_a_head_complement(w.letters())));
        for n in 1..=8 {
            let got = count_complement(&counterless, n, CountMode::Exact, &Limits::default()).unwrap();
            assert_eq!(got.exact.unwrap(), brute_complement(&counterless, n));
        }
        let small = Limits::default().with_enumeration_cap(10);
        assert!(matches!(
            count_complement(&counterless, 3, CountMode::Exact, &small),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn a_head_entropy_near_half() {
        let pred = PredicateHandle::a_head(f2());
        let profile = entropy_profile(&pred, 40..=40, CountMode::Exact, &Limits::default()).unwrap();
        let t = profile.samples[0].t_hat.unwrap();
        assert!((0.45..=0.55).contains(&t), "{t}");
    }

    #[test]
    fn full_complement_entropy_approaches_one() {
        let pred = PredicateHandle::always_false(f2());
        let profile = entropy_profile(&pred, 1..=60, CountMode::Exact, &Limits::default()).unwrap();
        let c1 = 4f64; // count_cyclic(n,2) <= 4 * 3^n
        for s in &profile.samples {
            let t = s.t_hat.unwrap();
            assert!(t >= 1.0 - c1.ln() / (s.n as f64 * 3f64.ln()));
        }
        let last = profile.samples.last().unwrap().t_hat.unwrap();
        assert!((last - 1.0).abs() < 1e-3);
        assert!(profile.sup.unwrap() >= profile.inf.unwrap());
    }

    #[test]
    fn empty_complement_is_all_sentinel() {
        let pred = PredicateHandle::always_true(f2());
        let profile = entropy_profile(&pred, 1..=10, CountMode::Exact, &Limits::default()).unwrap();
        assert!(profile.all_sentinel());
        assert_eq!(profile.sup, None);
    }

    #[test]
    fn tuple_fraction_examples() {
        let c = BigUint::from(12u32);
        assert_eq!(tuple_fraction_for_size(9.0, &c, &c).unwrap(), 1.0);
        assert_eq!(tuple_fraction_for_size(9.0, &BigUint::zero(), &c).unwrap(), 0.0);
        let v = tuple_fraction_for_size(9.0, &BigUint::from(11u32), &c).unwrap();
        assert!((v - (11f64 / 12.0).powi(9)).abs() < 1e-12);
        assert!((v - 0.4575).abs() < 1e-3);
        assert!(tuple_fraction_for_size(1.0, &c, &BigUint::zero()).is_err());
    }

    #[test]
    fn tuple_size_rounding() {
        assert_eq!(tuple_size(2, 10, 0.5), 243.0);
        assert_eq!(tuple_size(2, 10, 1e-9), 1.0);
    }

    #[test]
    fn ao_fraction_factorizes() {
        let limits = Limits::default();
        let pred = PredicateHandle::a_head(f2());
        let r = ao_fraction(&pred, 2, 6, &limits).unwrap();
        assert!(r.factorizes);
        assert!((r.fraction - r.single_word_fraction.powi(2)).abs() < 1e-12);
        let one = ao_fraction(&pred, 1, 6, &limits).unwrap();
        assert!((one.fraction - one.single_word_fraction).abs() < 1e-15);
        let t = ao_fraction(&PredicateHandle::always_true(f2()), 3, 3, &limits).unwrap();
        assert_eq!(t.fraction, 1.0);
    }

    #[test]
    fn closed_form_bounds() {
        assert_eq!(bound_prop_read(2), 0.0);
        assert!((bound_prop_read(3) - 0.6826).abs() < 1e-3);
        let direct = (3f64.powi(6) - 0.5).ln() / (6.0 * 3f64.ln());
        assert!((remark_h_bound(2, 2) - direct).abs() < 1e-12);
        assert!((remark_h_bound(2, 2) - 0.99990).abs() < 1e-4);
        let mut prev = 0.0;
        for k in [3usize, 10, 100, 1000, 10_000, 1_000_000] {
            let b = bound_prop_read(k);
            assert!(b > prev && b < 1.0);
            prev = b;
        }
        assert!(1.0 - prev < 1e-5);
        assert!(remark_h_bound(1_000_000, 2) > 0.999_999);
    }
}
