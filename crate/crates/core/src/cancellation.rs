//! Symmetrized relator sets, pieces and the metric small-cancellation
//! condition C'(λ), together with the per-relator predicates used by the
//! density experiments: proper powers, generator coverage and primitivity.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::words::{Alphabet, CyclicWord, Letter, Word};

/// `⟨a_1, ..., a_k | r_1, ..., r_m⟩`; relators form an ordered tuple and may
/// repeat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<CyclicWord>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<CyclicWord>) -> Result<Self> {
        for r in &relators {
            if r.is_empty() {
                return Err(Error::InvalidInput("relators must be nonempty".into()));
            }
            if r.alphabet() != alphabet {
                return Err(Error::InvalidInput(format!(
                    "relator {r} is over a different alphabet"
                )));
            }
        }
        Ok(Presentation { alphabet, relators })
    }

    /// Parses relators given in the word text format.
    pub fn parse<'a, I: IntoIterator<Item = &'a str>>(alphabet: Alphabet, relators: I) -> Result<Self> {
        let relators = relators
            .into_iter()
            .map(|s| alphabet.parse_cyclic(s))
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(alphabet, relators)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn relators(&self) -> &[CyclicWord] {
        &self.relators
    }

    pub fn len(&self) -> usize {
        self.relators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relators.is_empty()
    }
}

fn rotations_of(letters: &[Letter]) -> impl Iterator<Item = Vec<Letter>> + '_ {
    let n = letters.len();
    (0..n).map(move |s| letters[s..].iter().chain(&letters[..s]).copied().collect())
}

fn inverse_letters(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|&l| -l).collect()
}

/// Symmetrized elements keyed by word, each mapped to the relators it came
/// from.
fn symmetrized_owners(p: &Presentation) -> BTreeMap<Vec<Letter>, Vec<usize>> {
    let mut owners: BTreeMap<Vec<Letter>, Vec<usize>> = BTreeMap::new();
    for (i, r) in p.relators.iter().enumerate() {
        let inv = inverse_letters(r.letters());
        for s in rotations_of(r.letters()).chain(rotations_of(&inv)) {
            let entry = owners.entry(s).or_default();
            if entry.last() != Some(&i) {
                entry.push(i);
            }
        }
    }
    owners
}

/// All cyclic permutations of every relator and its inverse, deduplicated and
/// sorted.
pub fn symmetrize(p: &Presentation) -> Vec<Word> {
    symmetrized_owners(p)
        .into_keys()
        .map(|s| Word::from_reduced(s, p.alphabet))
        .collect()
}

/// Whether a piece of length `piece` respects `|p| < λ|r|` in a relator of
/// length `relator_len`.
pub fn piece_allowed(piece: usize, relator_len: usize, lambda: f64) -> bool {
    (piece as f64) < lambda * relator_len as f64 - 1e-9
}

fn common_prefix(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PieceReport {
    pub lambda: f64,
    /// Longest piece anywhere in the symmetrized set.
    pub max_piece_length: usize,
    /// For each relator, the longest piece it contains divided by its length.
    pub relator_ratios: Vec<f64>,
    pub satisfied: bool,
}

/// Checks C'(λ): every piece `p` inside a relator `r` has `|p| < λ|r|`.
///
/// After sorting the symmetrized set, the longest common prefix an element
/// shares with any other element is attained at one of its sorted neighbours.
pub fn is_c_prime(p: &Presentation, lambda: f64) -> Result<PieceReport> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidInput(format!("lambda must lie in (0,1], got {lambda}")));
    }
    let owners = symmetrized_owners(p);
    let elements: Vec<(&Vec<Letter>, &Vec<usize>)> = owners.iter().collect();
    let mut longest = vec![0usize; p.relators.len()];
    let mut max_piece_length = 0;
    for (i, (word, rels)) in elements.iter().enumerate() {
        let before = i.checked_sub(1).map_or(0, |j| common_prefix(word, elements[j].0));
        let after = elements.get(i + 1).map_or(0, |e| common_prefix(word, e.0));
        let piece = before.max(after);
        max_piece_length = max_piece_length.max(piece);
        for &r in rels.iter() {
            longest[r] = longest[r].max(piece);
        }
    }
    let relator_ratios: Vec<f64> = p
        .relators
        .iter()
        .zip(&longest)
        .map(|(r, &piece)| piece as f64 / r.len() as f64)
        .collect();
    let satisfied = p
        .relators
        .iter()
        .zip(&longest)
        .all(|(r, &piece)| piece_allowed(piece, r.len(), lambda));
    Ok(PieceReport {
        lambda,
        max_piece_length,
        relator_ratios,
        satisfied,
    })
}

/// Streaming C'(λ) check for relators of one common length, as produced by
/// the density model. Stops being satisfied at the first violating piece.
#[derive(Clone, Debug)]
pub struct IncrementalCPrime {
    length: usize,
    // smallest violating piece length; None when no piece can violate
    threshold: Option<usize>,
    prefixes: HashMap<Vec<Letter>, Vec<Letter>>,
    satisfied: bool,
}

impl IncrementalCPrime {
    pub fn new(length: usize, lambda: f64) -> Self {
        let threshold = (0..=length).find(|&l| !piece_allowed(l, length, lambda));
        IncrementalCPrime {
            length,
            threshold,
            prefixes: HashMap::new(),
            satisfied: true,
        }
    }

    pub fn satisfied(&self) -> bool {
        self.satisfied
    }

    /// Adds a relator; returns whether the condition still holds.
    pub fn push(&mut self, r: &CyclicWord) -> Result<bool> {
        if r.len() != self.length {
            return Err(Error::InvalidInput(format!(
                "relator of length {} in a stream of length {}",
                r.len(),
                self.length
            )));
        }
        let Some(t) = self.threshold else {
            return Ok(self.satisfied);
        };
        if !self.satisfied {
            return Ok(false);
        }
        let inv = inverse_letters(r.letters());
        for s in rotations_of(r.letters()).chain(rotations_of(&inv)) {
            let key = s[..t].to_vec();
            match self.prefixes.get(&key) {
                Some(existing) if *existing != s => {
                    self.satisfied = false;
                    return Ok(false);
                }
                Some(_) => {}
                None => {
                    self.prefixes.insert(key, s);
                }
            }
        }
        Ok(true)
    }
}

/// True iff `w = u^d` as a word for some `d ≥ 2`.
pub fn is_proper_power(w: &CyclicWord) -> bool {
    let letters = w.letters();
    let n = letters.len();
    (1..n)
        .filter(|&p| n.is_multiple_of(p))
        .any(|p| (p..n).all(|i| letters[i] == letters[i - p]))
}

/// Window length `max(1, ceil(|r|/6))` used by [`covers_all_generators`].
pub fn coverage_window(len: usize) -> usize {
    len.div_ceil(6).max(1)
}

/// True iff every cyclic window of length `max(1, ceil(|r|/6))` involves every
/// generator, up to sign.
pub fn covers_all_generators(r: &CyclicWord) -> bool {
    let letters = r.letters();
    let n = letters.len();
    let k = r.alphabet().rank();
    if n == 0 {
        return false;
    }
    let window = coverage_window(n);
    if window < k {
        return false;
    }
    // sliding counts of each generator in the window
    let mut counts = vec![0usize; k + 1];
    let mut present = 0;
    let gen = |i: usize| letters[i % n].unsigned_abs() as usize;
    for i in 0..window {
        let g = gen(i);
        if counts[g] == 0 {
            present += 1;
        }
        counts[g] += 1;
    }
    for start in 0..n {
        if present < k {
            return false;
        }
        let out = gen(start);
        counts[out] -= 1;
        if counts[out] == 0 {
            present -= 1;
        }
        let inn = gen(start + window);
        if counts[inn] == 0 {
            present += 1;
        }
        counts[inn] += 1;
    }
    true
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exponent sums of each generator.
pub fn abelianization(w: &Word) -> Vec<i64> {
    let mut sums = vec![0i64; w.alphabet().rank()];
    for &l in w.letters() {
        sums[l.unsigned_abs() as usize - 1] += l.signum() as i64;
    }
    sums
}

/// A Whitehead automorphism of the second kind: `multiplier` is fixed, and
/// each other generator `x` becomes `x·m`, `m⁻¹·x` or `m⁻¹·x·m` according to
/// whether `x`, `x⁻¹` or both lie in `set`.
#[derive(Clone, Copy, Debug)]
struct Whitehead {
    multiplier: Letter,
    // bit per alphabet index
    set: u64,
}

impl Whitehead {
    fn image(&self, alphabet: Alphabet, x: Letter, out: &mut Vec<Letter>) {
        let m = self.multiplier;
        if x.abs() == m.abs() {
            out.push(x);
            return;
        }
        let in_set = |l: Letter| self.set >> alphabet.index(l) & 1 == 1;
        let g = x.abs();
        let (pre, post) = (in_set(-g), in_set(g));
        let mut img = Vec::with_capacity(3);
        if pre {
            img.push(-m);
        }
        img.push(g);
        if post {
            img.push(m);
        }
        if x > 0 {
            out.extend(img);
        } else {
            out.extend(img.iter().rev().map(|&l| -l));
        }
    }

    fn apply(&self, w: &[Letter], alphabet: Alphabet) -> Vec<Letter> {
        let mut raw = Vec::with_capacity(w.len() * 3);
        for &x in w {
            self.image(alphabet, x, &mut raw);
        }
        let reduced = Word::free_reduce(raw, alphabet).expect("letters stay in the alphabet");
        reduced.cyclic_reduce().letters().to_vec()
    }
}

fn whitehead_automorphisms(alphabet: Alphabet) -> Vec<Whitehead> {
    let size = alphabet.size();
    let mut out = Vec::new();
    for m in alphabet.letters() {
        let free: Vec<usize> = alphabet
            .letters()
            .filter(|&l| l.abs() != m.abs())
            .map(|l| alphabet.index(l))
            .collect();
        for mask in 0u64..(1 << free.len()) {
            let mut set = 1u64 << alphabet.index(m);
            for (bit, &idx) in free.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    set |= 1 << idx;
                }
            }
            debug_assert!(size <= 64);
            out.push(Whitehead { multiplier: m, set });
        }
    }
    out
}

/// Whether `w` belongs to some free basis, with the default rank limit.
pub fn is_primitive(w: &Word) -> Result<bool> {
    is_primitive_with_limits(w, &Limits::default())
}

/// Gcd filter on the abelianization, then Whitehead peak reduction on the
/// cyclic word: apply the length-minimizing automorphism while it shortens
/// the word; primitive iff cyclic length 1 is reached.
pub fn is_primitive_with_limits(w: &Word, limits: &Limits) -> Result<bool> {
    let alphabet = w.alphabet();
    if alphabet.rank() > limits.whitehead_max_rank {
        return Err(Error::Capability(format!(
            "Whitehead enumeration is limited to rank {}, got {}",
            limits.whitehead_max_rank,
            alphabet.rank()
        )));
    }
    let g = abelianization(w)
        .iter()
        .fold(0u64, |acc, &x| gcd(acc, x.unsigned_abs()));
    if g != 1 {
        return Ok(false);
    }
    Ok(whitehead_reduces_to_letter(w))
}

/// Peak reduction alone, without the abelianization filter.
pub(crate) fn whitehead_reduces_to_letter(w: &Word) -> bool {
    let alphabet = w.alphabet();
    let autos = whitehead_automorphisms(alphabet);
    let mut current = w.cyclic_reduce().letters().to_vec();
    while current.len() > 1 {
        let best = autos
            .iter()
            .map(|a| a.apply(&current, alphabet))
            .min_by_key(|img| img.len())
            .expect("at least one automorphism");
        if best.len() >= current.len() {
            return false;
        }
        current = best;
    }
    current.len() == 1
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LambdaBound {
    pub value: f64,
    pub at_most_one_sixth: bool,
}

/// Largest admissible small-cancellation constant `μ/(15L + 3μ)`.
pub fn lambda_bound(mu: f64, l: usize) -> LambdaBound {
    let value = mu / (15.0 * l as f64 + 3.0 * mu);
    LambdaBound {
        value,
        at_most_one_sixth: value <= 1.0 / 6.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{enumerate_cyclic, freely_reduced_prefixes};

    fn f2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn pres(rels: &[&str]) -> Presentation {
        Presentation::parse(f2(), rels.iter().copied()).unwrap()
    }

    /// Oracle: longest common prefix over every pair of distinct symmetrized
    /// elements, charged to both owners.
    fn brute_pieces(p: &Presentation) -> (usize, Vec<usize>) {
        let mut elems: Vec<(Vec<Letter>, usize)> = Vec::new();
        for (i, r) in p.relators().iter().enumerate() {
            let inv = inverse_letters(r.letters());
            for s in rotations_of(r.letters()).chain(rotations_of(&inv)) {
                elems.push((s, i));
            }
        }
        let mut longest = vec![0; p.len()];
        let mut max = 0;
        for (a, ra) in &elems {
            for (b, rb) in &elems {
                if a == b {
                    continue;
                }
                let mut l = 0;
                while l < a.len() && l < b.len() && a[l] == b[l] {
                    l += 1;
                }
                max = max.max(l);
                longest[*ra] = longest[*ra].max(l);
                longest[*rb] = longest[*rb].max(l);
            }
        }
        (max, longest)
    }

    #[test]
    fn symmetrize_examples() {
        let s: Vec<String> = symmetrize(&pres(&["abAB"])).iter().map(|w| w.to_string()).collect();
        assert_eq!(s.len(), 8);
        let s: Vec<String> = symmetrize(&pres(&["a"])).iter().map(|w| w.to_string()).collect();
        assert_eq!(s, vec!["A", "a"]);
        let mut s: Vec<String> = symmetrize(&pres(&["ab"])).iter().map(|w| w.to_string()).collect();
        s.sort();
        assert_eq!(s, vec!["AB", "BA", "ab", "ba"]);
    }

    #[test]
    fn commutator_pieces() {
        let p = pres(&["abAB"]);
        assert_eq!(brute_pieces(&p).0, 1);
        let r = is_c_prime(&p, 1.0 / 3.0).unwrap();
        assert_eq!(r.max_piece_length, 1);
        assert!(r.satisfied);
        assert!(!is_c_prime(&p, 0.25).unwrap().satisfied);
        let r = is_c_prime(&pres(&["aabb"]), 1.0 / 3.0).unwrap();
        assert_eq!(r.max_piece_length, 1);
        assert!(r.satisfied);
    }

    #[test]
    fn sorted_neighbours_match_brute_force() {
        let words: Vec<CyclicWord> = (3..=6).flat_map(|n| enumerate_cyclic(n, f2())).collect();
        for (i, a) in words.iter().enumerate().step_by(7) {
            for b in words.iter().skip(i % 13).step_by(29).take(8) {
                let p = Presentation::new(f2(), vec![a.clone(), b.clone()]).unwrap();
                let (max, longest) = brute_pieces(&p);
                let report = is_c_prime(&p, 0.5).unwrap();
                assert_eq!(report.max_piece_length, max, "{a} {b}");
                for (j, r) in p.relators().iter().enumerate() {
                    assert_eq!(report.relator_ratios[j], longest[j] as f64 / r.len() as f64);
                }
            }
        }
    }

    #[test]
    fn c_prime_is_monotone_in_lambda() {
        for w in enumerate_cyclic(6, f2()).step_by(5) {
            let p = Presentation::new(f2(), vec![w]).unwrap();
            let lambdas = [0.1, 0.2, 1.0 / 6.0 + 0.01, 0.3, 0.5, 0.8, 1.0];
            let mut was = false;
            for l in lambdas {
                let now = is_c_prime(&p, l).unwrap().satisfied;
                assert!(!was || now);
                was = now;
            }
        }
    }

    #[test]
    fn incremental_matches_batch() {
        let words: Vec<CyclicWord> = enumerate_cyclic(8, f2()).step_by(37).collect();
        for lambda in [0.2, 0.3, 0.5] {
            for chunk in words.chunks(5) {
                let mut inc = IncrementalCPrime::new(8, lambda);
                for w in chunk {
                    inc.push(w).unwrap();
                }
                let p = Presentation::new(f2(), chunk.to_vec()).unwrap();
                assert_eq!(inc.satisfied(), is_c_prime(&p, lambda).unwrap().satisfied);
            }
        }
    }

    #[test]
    fn proper_powers() {
        let c = |s: &str| f2().parse_cyclic(s).unwrap();
        assert!(is_proper_power(&c("abab")));
        assert!(!is_proper_power(&c("ab")));
        assert!(!is_proper_power(&c("aabab")));
        assert!(is_proper_power(&c("aaa")));
        assert!(!is_proper_power(&c("a")));
    }

    #[test]
    fn coverage() {
        let c = |s: &str| f2().parse_cyclic(s).unwrap();
        assert!(covers_all_generators(&c(&"ab".repeat(6))));
        assert!(!covers_all_generators(&c("aaabbb")));
        assert!(!covers_all_generators(&c("ab")));
        // window 3 over a 13-letter word; the wrap window "aab" covers both
        assert!(covers_all_generators(&c("abaabaabaabab")));
    }

    #[test]
    fn coverage_matches_direct_windows() {
        for n in 1..=12 {
            for w in enumerate_cyclic(n, f2()).step_by(11) {
                let l = w.letters();
                let win = coverage_window(n);
                let direct = (0..n).all(|s| {
                    (1..=2).all(|g| (0..win).any(|j| l[(s + j) % n].abs() == g))
                });
                assert_eq!(covers_all_generators(&w), direct, "{w}");
            }
        }
    }

    #[test]
    fn primitive_examples() {
        let w = |s: &str| f2().parse(s).unwrap();
        assert!(is_primitive(&w("a")).unwrap());
        assert!(!is_primitive(&w("aa")).unwrap());
        assert!(is_primitive(&w("ab")).unwrap());
        assert!(!is_primitive(&w("abAB")).unwrap());
        assert!(is_primitive(&w("aab")).unwrap());
        assert!(is_primitive(&w("abaab")).unwrap());
        // abelianizes to (2, 3) but is not primitive
        assert!(!is_primitive(&w("aabbb")).unwrap());
    }

    #[test]
    fn primitive_rank_limit() {
        let alpha = Alphabet::new(5).unwrap();
        let w = alpha.parse("abcde").unwrap();
        assert!(matches!(is_primitive(&w), Err(Error::Capability(_))));
    }

    #[test]
    fn primitivity_is_invariant_under_inversion_and_rotation() {
        for n in 1..=7 {
            for w in enumerate_cyclic(n, f2()) {
                let p = is_primitive(w.word()).unwrap();
                assert_eq!(is_primitive(&w.inverse().into_word()).unwrap(), p, "{w}");
                for r in w.rotations() {
                    assert_eq!(is_primitive(r.word()).unwrap(), p, "{w}");
                }
            }
        }
    }

    #[test]
    fn gcd_filter_is_necessary() {
        for n in 1..=8 {
            for w in freely_reduced_prefixes(n, f2()) {
                let w = Word::free_reduce(w, f2()).unwrap();
                let g = abelianization(&w)
                    .iter()
                    .fold(0u64, |acc, &x| gcd(acc, x.unsigned_abs()));
                if g != 1 {
                    assert!(!whitehead_reduces_to_letter(&w), "{w}");
                }
            }
        }
    }

    #[test]
    fn lambda_bound_values() {
        assert!((lambda_bound(0.3, 2).value - 0.009709).abs() < 1e-5);
        assert!((lambda_bound(0.2, 2).value - 0.006536).abs() < 1e-5);
        assert!(lambda_bound(1e-12, 2).value < 1e-12);
        assert!(lambda_bound(0.9, 2).at_most_one_sixth);
    }
}
