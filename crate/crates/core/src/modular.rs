//! Words in the modular group `⟨a, b | a², b³⟩` over the alphabet
//! `{a, b, B}` (`B = b⁻¹`), the relabelling automorphism `η`, orbit counts
//! of relator tuples and the associated bound arithmetic.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::words::EMPTY_WORD;

/// Letters ordered `a < b < B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModLetter {
    A,
    B,
    BInv,
}

impl ModLetter {
    pub const ALL: [ModLetter; 3] = [ModLetter::A, ModLetter::B, ModLetter::BInv];

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a' => Some(ModLetter::A),
            'b' => Some(ModLetter::B),
            'B' => Some(ModLetter::BInv),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            ModLetter::A => 'a',
            ModLetter::B => 'b',
            ModLetter::BInv => 'B',
        }
    }

    pub fn inverse(self) -> Self {
        self.eta()
    }

    pub fn eta(self) -> Self {
        match self {
            ModLetter::A => ModLetter::A,
            ModLetter::B => ModLetter::BInv,
            ModLetter::BInv => ModLetter::B,
        }
    }
}

/// Result of rewriting the pair `xy`: `None` if already reduced.
fn combine(x: ModLetter, y: ModLetter) -> Option<Option<ModLetter>> {
    use ModLetter::*;
    match (x, y) {
        (A, A) | (B, BInv) | (BInv, B) => Some(None),
        (B, B) => Some(Some(BInv)),
        (BInv, BInv) => Some(Some(B)),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ModularWord {
    letters: Vec<ModLetter>,
}

impl ModularWord {
    pub fn letters(&self) -> &[ModLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Reduced, with no forbidden factor across the wrap either.
    pub fn is_cyclically_reduced(&self) -> bool {
        let l = &self.letters;
        l.len() < 2 || combine(l[l.len() - 1], l[0]).is_none()
    }

    pub fn rotation(&self, shift: usize) -> ModularWord {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            letters.rotate_left(shift % self.letters.len());
        }
        ModularWord { letters }
    }
}

impl fmt::Display for ModularWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str(EMPTY_WORD);
        }
        self.letters.iter().try_for_each(|l| write!(f, "{}", l.as_char()))
    }
}

impl FromStr for ModularWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(reduce_modular(parse_letters(s)?))
    }
}

pub fn parse_letters(s: &str) -> Result<Vec<ModLetter>> {
    let s = s.trim();
    if s == EMPTY_WORD {
        return Ok(Vec::new());
    }
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| {
            ModLetter::from_char(c).ok_or_else(|| Error::Parse {
                text: s.to_string(),
                reason: format!("'{c}' is not one of a, b, B"),
            })
        })
        .collect()
}

/// Rewrites `aa → ε`, `bB, Bb → ε`, `bb → B`, `BB → b` to a fixed point.
pub fn reduce_modular<I: IntoIterator<Item = ModLetter>>(letters: I) -> ModularWord {
    let mut stack: Vec<ModLetter> = Vec::new();
    for x in letters {
        let mut cur = Some(x);
        while let Some(c) = cur {
            match stack.last().and_then(|&top| combine(top, c)) {
                Some(result) => {
                    stack.pop();
                    cur = result;
                }
                None => {
                    stack.push(c);
                    cur = None;
                }
            }
        }
    }
    ModularWord { letters: stack }
}

/// Shortest cyclically reduced conjugate.
pub fn cyclic_reduce_modular(w: &ModularWord) -> ModularWord {
    let mut cur = reduce_modular(w.letters.iter().copied());
    while !cur.is_cyclically_reduced() {
        let last = cur.letters.pop().expect("nonempty");
        cur = reduce_modular(std::iter::once(last).chain(cur.letters));
    }
    cur
}

pub fn inverse_modular(w: &ModularWord) -> ModularWord {
    ModularWord {
        letters: w.letters.iter().rev().map(|l| l.inverse()).collect(),
    }
}

/// The automorphism fixing `a` and sending `b` to `b⁻¹`.
pub fn eta(w: &ModularWord) -> ModularWord {
    ModularWord {
        letters: w.letters.iter().map(|l| l.eta()).collect(),
    }
}

/// Cyclically reduced words of length `n`: 1, 3, 0 for odd `n > 1`, and
/// `2·2^{n/2}` for even `n ≥ 2`.
pub fn count_cyclic_modular(n: usize) -> BigUint {
    match n {
        0 => BigUint::from(1u32),
        1 => BigUint::from(3u32),
        n if n % 2 == 1 => BigUint::from(0u32),
        n => BigUint::from(2u32) << (n / 2),
    }
}

/// All cyclically reduced words of length `n`, in lexicographic order.
pub fn enumerate_cyclic_modular(n: usize) -> Vec<ModularWord> {
    fn extend(buf: &mut Vec<ModLetter>, n: usize, out: &mut Vec<ModularWord>) {
        if buf.len() == n {
            let w = ModularWord { letters: buf.clone() };
            if w.is_cyclically_reduced() {
                out.push(w);
            }
            return;
        }
        for l in ModLetter::ALL {
            if buf.last().is_some_and(|&p| combine(p, l).is_some()) {
                continue;
            }
            buf.push(l);
            extend(buf, n, out);
            buf.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(n), n, &mut out);
    out
}

/// Least rotation of `w` or of `w⁻¹`.
pub fn canonical_word(w: &ModularWord) -> ModularWord {
    let inv = inverse_modular(w);
    (0..w.len().max(1))
        .flat_map(|s| [w.rotation(s), inv.rotation(s)])
        .min()
        .expect("at least one rotation")
}

/// Canonical tuple: sorted per-word canonical forms, minimised over applying
/// `η` to every entry.
pub fn canonical_tuple(tuple: &[ModularWord]) -> Vec<ModularWord> {
    let sorted = |f: &dyn Fn(&ModularWord) -> ModularWord| {
        let mut v: Vec<ModularWord> = tuple.iter().map(|w| canonical_word(&f(w))).collect();
        v.sort();
        v
    };
    sorted(&|w| w.clone()).min(sorted(&eta))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitMode {
    Canonical,
    Burnside,
}

impl FromStr for OrbitMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(OrbitMode::Canonical),
            "burnside" => Ok(OrbitMode::Burnside),
            _ => Err(Error::Parse {
                text: s.to_string(),
                reason: "expected canonical or burnside".into(),
            }),
        }
    }
}

/// Number of classes of m-tuples of cyclically reduced words of length `2t`
/// under reordering, per-word rotation and inversion, and a global `η`.
pub fn tuple_orbits(m: usize, t: usize, mode: OrbitMode, limits: &Limits) -> Result<BigUint> {
    if m == 0 || t == 0 {
        return Err(Error::InvalidInput("m and t must be positive".into()));
    }
    let bits = m as u64 * (t as u64 + 1);
    if bits >= 64 || (1u64 << bits) > limits.enumeration_cap {
        return Err(Error::CapExceeded {
            what: "tuple orbit enumeration",
            requested: format!("2^{bits}"),
            cap: limits.enumeration_cap,
        });
    }
    let words = enumerate_cyclic_modular(2 * t);
    match mode {
        OrbitMode::Canonical => Ok(BigUint::from(canonical_orbits(&words, m))),
        OrbitMode::Burnside if m == 1 => Ok(burnside_single(&words, t)),
        OrbitMode::Burnside => Err(Error::Capability(
            "Burnside counting is implemented for single words (m = 1) only".into(),
        )),
    }
}

fn canonical_orbits(words: &[ModularWord], m: usize) -> usize {
    // per-word classes first; tuples up to reordering are multisets of them
    let mut classes: Vec<ModularWord> = words
        .iter()
        .map(canonical_word)
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    classes.sort();
    let eta_class: Vec<usize> = classes
        .iter()
        .map(|c| classes.binary_search(&canonical_word(&eta(c))).expect("closed under eta"))
        .collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut multiset = vec![0usize; m];
    loop {
        let mut flipped: Vec<usize> = multiset.iter().map(|&i| eta_class[i]).collect();
        flipped.sort_unstable();
        seen.insert(multiset.clone().min(flipped));
        // next non-decreasing sequence
        let Some(pos) = (0..m).rev().find(|&i| multiset[i] + 1 < classes.len()) else {
            break;
        };
        let v = multiset[pos] + 1;
        multiset[pos..].iter_mut().for_each(|x| *x = v);
    }
    seen.len()
}

/// Burnside over rotation × inversion × η, a group of order `8t`.
fn burnside_single(words: &[ModularWord], t: usize) -> BigUint {
    let n = 2 * t;
    let fixed: usize = (0..n)
        .into_par_iter()
        .map(|shift| {
            let mut count = 0;
            for inv in [false, true] {
                for flip in [false, true] {
                    for w in words {
                        let mut g = w.rotation(shift);
                        if inv {
                            g = inverse_modular(&g);
                        }
                        if flip {
                            g = eta(&g);
                        }
                        if g == *w {
                            count += 1;
                        }
                    }
                }
            }
            count
        })
        .sum();
    debug_assert_eq!(fixed % (8 * t), 0);
    BigUint::from(fixed / (8 * t))
}

/// `K_m(t) ≈ 2^{m(t+1)} / (2 m! (4t)^m)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KFormula {
    pub ln_value: f64,
    pub value: f64,
}

pub fn k_formula(m: usize, t: usize) -> KFormula {
    let ln2 = std::f64::consts::LN_2;
    let ln_factorial: f64 = (2..=m).map(|i| (i as f64).ln()).sum();
    let ln_value = (m * (t + 1)) as f64 * ln2 - ln2 - ln_factorial - m as f64 * (4.0 * t as f64).ln();
    KFormula {
        ln_value,
        value: ln_value.exp(),
    }
}

/// Dominant term of the lower bound on `log₂ J_ε(t)`; the additive constant
/// `log C` is left symbolic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JBound {
    /// `2^{tε} · log₂(2^{t+1} / (16 · 2^{tε} · t))`.
    pub log2_dominant: f64,
    /// Whether the ratio inside the logarithm exceeds 1.
    pub valid: bool,
    pub constant: &'static str,
}

pub fn j_lower_bound(epsilon: f64, t: usize) -> Result<JBound> {
    if !(epsilon > 0.0 && epsilon < 1.0) || t == 0 {
        return Err(Error::InvalidInput("need 0 < epsilon < 1 and t >= 1".into()));
    }
    let te = t as f64 * epsilon;
    let inner = (t as f64 + 1.0) - 4.0 - te - (t as f64).log2();
    Ok(JBound {
        log2_dominant: te.exp2() * inner,
        valid: inner > 0.0,
        constant: "log C",
    })
}

/// `log₂ log₂` of `2^{(2k-1)^n}`, the number of subsets of the radius-n ball.
pub fn i_upper_bound(k: usize, n: usize) -> f64 {
    n as f64 * (2.0 * k as f64 - 1.0).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ModularWord {
        ModularWord { letters: parse_letters(s).unwrap() }
    }

    #[test]
    fn rewriting_examples() {
        assert_eq!(reduce_modular(parse_letters("aab").unwrap()).to_string(), "b");
        assert_eq!(reduce_modular(parse_letters("bbb").unwrap()).to_string(), EMPTY_WORD);
        assert_eq!(reduce_modular(parse_letters("abbBa").unwrap()).to_string(), "aba");
        assert_eq!(reduce_modular(parse_letters("bBab").unwrap()).to_string(), "ab");
        assert_eq!(inverse_modular(&w("ab")).to_string(), "Ba");
        assert_eq!(eta(&w("abaB")).to_string(), "aBab");
        assert!(parse_letters("abc").is_err());
        assert_eq!(cyclic_reduce_modular(&w("bab")).to_string(), "Ba");
        assert_eq!(cyclic_reduce_modular(&w("abaa")).to_string(), "ab");
    }

    #[test]
    fn reduction_matches_group_action() {
        // faithful action of the modular group on the projective line over Z/7
        fn act(l: ModLetter, x: [i64; 2]) -> [i64; 2] {
            let m = match l {
                ModLetter::A => [[0, -1], [1, 0]],
                ModLetter::B => [[0, -1], [1, 1]],
                ModLetter::BInv => [[1, 1], [-1, 0]],
            };
            [
                (m[0][0] * x[0] + m[0][1] * x[1]).rem_euclid(7),
                (m[1][0] * x[0] + m[1][1] * x[1]).rem_euclid(7),
            ]
        }
        fn image(letters: &[ModLetter]) -> Vec<(i64, i64)> {
            let pts: Vec<[i64; 2]> = (0..7).map(|x| [x, 1]).chain([[1, 0]]).collect();
            pts.into_iter()
                .map(|p| {
                    let q = letters.iter().rev().fold(p, |acc, &l| act(l, acc));
                    // normalise projectively
                    if q[1] != 0 {
                        let inv = (1..7).find(|i| (q[1] * i) % 7 == 1).unwrap();
                        ((q[0] * inv) % 7, 1)
                    } else {
                        (1, 0)
                    }
                })
                .collect()
        }
        for n in 0..=7u32 {
            for code in 0..3usize.pow(n) {
                let letters: Vec<ModLetter> =
                    (0..n).map(|i| ModLetter::ALL[code / 3usize.pow(i) % 3]).collect();
                let r = reduce_modular(letters.iter().copied());
                assert_eq!(image(&letters), image(r.letters()));
                assert_eq!(reduce_modular(r.letters().iter().copied()), r);
            }
        }
    }

    #[test]
    fn counts_match_enumeration() {
        for n in 0..=24 {
            assert_eq!(
                BigUint::from(enumerate_cyclic_modular(n).len()),
                count_cyclic_modular(n),
                "n={n}"
            );
        }
        assert_eq!(count_cyclic_modular(2), BigUint::from(4u32));
        assert_eq!(count_cyclic_modular(4), BigUint::from(8u32));
    }

    #[test]
    fn small_orbits() {
        let l = Limits::default();
        assert_eq!(tuple_orbits(1, 1, OrbitMode::Canonical, &l).unwrap(), BigUint::from(1u32));
        assert_eq!(tuple_orbits(1, 2, OrbitMode::Canonical, &l).unwrap(), BigUint::from(2u32));
        assert_eq!(tuple_orbits(1, 2, OrbitMode::Burnside, &l).unwrap(), BigUint::from(2u32));
        assert!(matches!(
            tuple_orbits(2, 3, OrbitMode::Burnside, &l),
            Err(Error::Capability(_))
        ));
        assert!(matches!(
            tuple_orbits(4, 10, OrbitMode::Canonical, &l),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn canonical_equals_burnside() {
        let l = Limits::default();
        for t in 1..=10 {
            assert_eq!(
                tuple_orbits(1, t, OrbitMode::Canonical, &l).unwrap(),
                tuple_orbits(1, t, OrbitMode::Burnside, &l).unwrap(),
                "t={t}"
            );
        }
    }

    #[test]
    fn multiset_orbits_match_tuple_enumeration() {
        for t in 1..=3 {
            let words = enumerate_cyclic_modular(2 * t);
            let mut seen = HashSet::new();
            for x in &words {
                for y in &words {
                    seen.insert(canonical_tuple(&[x.clone(), y.clone()]));
                }
            }
            assert_eq!(canonical_orbits(&words, 2), seen.len(), "t={t}");
        }
    }

    #[test]
    fn canonical_tuple_invariance() {
        let words = enumerate_cyclic_modular(6);
        for (i, x) in words.iter().enumerate() {
            let y = &words[(i * 7 + 3) % words.len()];
            let base = canonical_tuple(&[x.clone(), y.clone()]);
            assert_eq!(canonical_tuple(&[y.clone(), x.clone()]), base);
            assert_eq!(canonical_tuple(&[x.rotation(2), inverse_modular(y)]), base);
            assert_eq!(canonical_tuple(&[eta(x), eta(y)]), base);
        }
    }

    #[test]
    fn involutions_commute_with_rotation() {
        let cyclic_class = |w: &ModularWord| (0..w.len()).map(|s| w.rotation(s)).min().unwrap();
        for t in 1..=5 {
            for x in enumerate_cyclic_modular(2 * t) {
                assert_eq!(eta(&eta(&x)), x);
                assert_eq!(inverse_modular(&inverse_modular(&x)), x);
                for s in 0..2 * t {
                    let r = x.rotation(s);
                    assert_eq!(eta(&r), eta(&x).rotation(s));
                    assert_eq!(cyclic_class(&inverse_modular(&r)), cyclic_class(&inverse_modular(&x)));
                }
            }
        }
    }

    #[test]
    fn orbit_counts_and_ratio() {
        // values from an independent string-rotation implementation
        let l = Limits::default();
        let known = [(6, 8u32), (7, 9), (8, 18), (9, 23), (10, 44), (11, 63), (12, 122)];
        for (t, expected) in known {
            let k = tuple_orbits(1, t, OrbitMode::Burnside, &l).unwrap();
            assert_eq!(k, BigUint::from(expected), "t={t}");
            let ratio = expected as f64 * 4.0 * t as f64 / 2f64.powi(t as i32);
            assert!(ratio >= 1.0, "t={t} ratio={ratio}");
        }
    }

    #[test]
    fn bound_arithmetic() {
        assert!((k_formula(1, 10).value - 25.6).abs() < 1e-9);
        assert!((k_formula(2, 3).value - 2f64.powi(8) / (2.0 * 2.0 * 144.0)).abs() < 1e-9);
        let j = j_lower_bound(0.1, 100).unwrap();
        assert!(j.valid);
        assert!((j.log2_dominant - 1024.0 * (97.0 - 10.0 - 100f64.log2())).abs() < 1e-6);
        assert!((j.log2_dominant - 8.23e4).abs() < 100.0);
        assert!(!j_lower_bound(0.9, 10).unwrap().valid);
        assert!(j_lower_bound(1.0, 10).is_err());
        assert!((i_upper_bound(2, 5) - 5.0 * 3f64.log2()).abs() < 1e-12);
    }
}
