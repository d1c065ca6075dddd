use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{Alphabet, Letter};

/// A deterministic, letter-consuming state machine over the `2k` letters.
pub trait LetterAutomaton {
    fn num_states(&self) -> usize;
    fn start(&self) -> usize;
    /// Next state, or `None` when the word is rejected outright.
    fn step(&self, state: usize, letter: Letter) -> Option<usize>;
    fn accepts(&self, state: usize) -> bool;
}

impl<T: LetterAutomaton + ?Sized> LetterAutomaton for &T {
    fn num_states(&self) -> usize {
        (**self).num_states()
    }
    fn start(&self) -> usize {
        (**self).start()
    }
    fn step(&self, state: usize, letter: Letter) -> Option<usize> {
        (**self).step(state, letter)
    }
    fn accepts(&self, state: usize) -> bool {
        (**self).accepts(state)
    }
}

/// Single-state machine accepting every word.
#[derive(Clone, Copy, Debug, Default)]
pub struct AcceptAll;

impl LetterAutomaton for AcceptAll {
    fn num_states(&self) -> usize {
        1
    }
    fn start(&self) -> usize {
        0
    }
    fn step(&self, _: usize, _: Letter) -> Option<usize> {
        Some(0)
    }
    fn accepts(&self, _: usize) -> bool {
        true
    }
}

/// Rejects words containing any of the given factors as a contiguous
/// (non-cyclic) subword.
///
/// States are the distinct proper prefixes of the factors; the state after a
/// letter is the longest suffix of the text read so far that is such a prefix.
#[derive(Clone, Debug)]
pub struct FactorAvoider {
    alphabet: Alphabet,
    // transitions[state * 2k + letter index]
    transitions: Vec<Option<usize>>,
    num_states: usize,
}

impl FactorAvoider {
    pub fn new(alphabet: Alphabet, factors: &[Vec<Letter>]) -> Self {
        let mut prefixes: Vec<Vec<Letter>> = vec![Vec::new()];
        for f in factors.iter().filter(|f| !f.is_empty()) {
            for len in 1..f.len() {
                let p = f[..len].to_vec();
                if !prefixes.contains(&p) {
                    prefixes.push(p);
                }
            }
        }
        let contains_factor = |text: &[Letter]| {
            factors
                .iter()
                .any(|f| f.is_empty() || text.ends_with(f))
        };
        let size = alphabet.size();
        let mut transitions = vec![None; prefixes.len() * size];
        for (s, p) in prefixes.iter().enumerate() {
            for (li, letter) in alphabet.letters().enumerate() {
                let mut text = p.clone();
                text.push(letter);
                if contains_factor(&text) {
                    continue;
                }
                let next = (0..=text.len())
                    .filter_map(|start| prefixes.iter().position(|q| q[..] == text[start..]))
                    .next()
                    .expect("empty prefix always matches");
                transitions[s * size + li] = Some(next);
            }
        }
        FactorAvoider {
            alphabet,
            num_states: prefixes.len(),
            transitions,
        }
    }
}

impl LetterAutomaton for FactorAvoider {
    fn num_states(&self) -> usize {
        self.num_states
    }
    fn start(&self) -> usize {
        0
    }
    fn step(&self, state: usize, letter: Letter) -> Option<usize> {
        self.transitions[state * self.alphabet.size() + self.alphabet.index(letter)]
    }
    fn accepts(&self, _: usize) -> bool {
        true
    }
}

/// Exact number of cyclically reduced words of length `n` accepted by
/// `machine`, by dynamic programming over (first letter, state, last letter).
pub fn count_with_prefix_constraint<M: LetterAutomaton>(
    n: usize,
    alphabet: Alphabet,
    machine: M,
) -> BigUint {
    let start = machine.start();
    if n == 0 {
        return if machine.accepts(start) {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    let size = alphabet.size();
    let states = machine.num_states();
    let letters: Vec<Letter> = alphabet.letters().collect();
    let mut total = BigUint::zero();
    let mut table = vec![BigUint::zero(); states * size];
    let mut next = vec![BigUint::zero(); states * size];
    for (fi, &first) in letters.iter().enumerate() {
        table.iter_mut().for_each(|c| c.set_zero());
        match machine.step(start, first) {
            Some(s) => table[s * size + fi] = BigUint::one(),
            None => continue,
        }
        for _ in 1..n {
            next.iter_mut().for_each(|c| c.set_zero());
            for s in 0..states {
                for li in 0..size {
                    let count = &table[s * size + li];
                    if count.is_zero() {
                        continue;
                    }
                    let last = letters[li];
                    for (xi, &x) in letters.iter().enumerate() {
                        if x == -last {
                            continue;
                        }
                        if let Some(t) = machine.step(s, x) {
                            next[t * size + xi] += count;
                        }
                    }
                }
            }
            std::mem::swap(&mut table, &mut next);
        }
        for s in (0..states).filter(|&s| machine.accepts(s)) {
            for (li, &last) in letters.iter().enumerate() {
                if n == 1 || last != -first {
                    total += &table[s * size + li];
                }
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{count_cyclic, for_each_cyclic};

    fn brute_count(n: usize, alphabet: Alphabet, keep: impl Fn(&[Letter]) -> bool) -> BigUint {
        let mut c = 0u64;
        for_each_cyclic(n, alphabet, &[], |w| {
            if keep(w) {
                c += 1;
            }
        });
        BigUint::from(c)
    }

    #[test]
    fn accept_all_reproduces_formula() {
        for k in 2..=4 {
            let alpha = Alphabet::new(k).unwrap();
            for n in 0..=12 {
                assert_eq!(
                    count_with_prefix_constraint(n, alpha, AcceptAll),
                    count_cyclic(n, k),
                    "k={k} n={n}"
                );
            }
        }
    }

    #[test]
    fn avoiding_aa() {
        let alpha = Alphabet::new(2).unwrap();
        let machine = FactorAvoider::new(alpha, &[vec![1, 1]]);
        assert_eq!(count_with_prefix_constraint(2, alpha, &machine), BigUint::from(11u32));
        assert_eq!(count_with_prefix_constraint(1, alpha, &machine), BigUint::from(4u32));
    }

    #[test]
    fn factor_avoidance_matches_enumeration() {
        let alpha = Alphabet::new(2).unwrap();
        let factors = vec![vec![1, 2, 1], vec![-2, -2]];
        let machine = FactorAvoider::new(alpha, &factors);
        for n in 0..=10 {
            let expected = brute_count(n, alpha, |w| {
                !factors
                    .iter()
                    .any(|f| w.windows(f.len()).any(|win| win == &f[..]))
            });
            assert_eq!(count_with_prefix_constraint(n, alpha, &machine), expected, "n={n}");
        }
    }
}
