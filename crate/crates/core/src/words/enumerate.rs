use super::{Alphabet, CyclicWord, Letter};

/// Lexicographic stream (ascending signed letters) of the cyclically reduced
/// words of length `n`.
///
/// [`CyclicWords::advance`] lends the current word without allocating; the
/// `Iterator` impl clones it into a [`CyclicWord`].
#[derive(Clone, Debug)]
pub struct CyclicWords {
    alphabet: Alphabet,
    n: usize,
    // letter indices into the alphabet order
    current: Vec<usize>,
    letters: Vec<Letter>,
    state: State,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Fresh,
    Running,
    Done,
}

pub fn enumerate_cyclic(n: usize, alphabet: Alphabet) -> CyclicWords {
    CyclicWords {
        alphabet,
        n,
        current: Vec::with_capacity(n),
        letters: Vec::with_capacity(n),
        state: State::Fresh,
    }
}

impl CyclicWords {
    /// Smallest valid index at position `pos` that is at least `from`.
    fn next_valid(&self, pos: usize, from: usize) -> Option<usize> {
        let size = self.alphabet.size();
        let forbidden = (pos > 0).then(|| {
            let prev = self.alphabet.letter_at(self.current[pos - 1]);
            self.alphabet.index(-prev)
        });
        (from..size).find(|&i| Some(i) != forbidden)
    }

    fn fill_from(&mut self, pos: usize) {
        self.current.truncate(pos);
        for p in pos..self.n {
            let i = self.next_valid(p, 0).expect("rank >= 2 leaves a letter");
            self.current.push(i);
        }
    }

    /// Steps to the next freely reduced word; false when exhausted.
    fn step(&mut self) -> bool {
        let mut pos = self.n;
        while pos > 0 {
            pos -= 1;
            if let Some(i) = self.next_valid(pos, self.current[pos] + 1) {
                self.current[pos] = i;
                self.fill_from(pos + 1);
                return true;
            }
        }
        false
    }

    fn current_is_cyclic(&self) -> bool {
        if self.n < 2 {
            return true;
        }
        let first = self.alphabet.letter_at(self.current[0]);
        let last = self.alphabet.letter_at(self.current[self.n - 1]);
        last != -first
    }

    pub fn advance(&mut self) -> Option<&[Letter]> {
        match self.state {
            State::Done => return None,
            State::Fresh => {
                self.state = State::Running;
                self.fill_from(0);
                if self.n == 0 {
                    self.letters.clear();
                    return Some(&self.letters);
                }
            }
            State::Running => {
                if self.n == 0 || !self.step() {
                    self.state = State::Done;
                    return None;
                }
            }
        }
        loop {
            if self.current_is_cyclic() {
                let alphabet = self.alphabet;
                self.letters.clear();
                self.letters
                    .extend(self.current.iter().map(|&i| alphabet.letter_at(i)));
                return Some(&self.letters);
            }
            if !self.step() {
                self.state = State::Done;
                return None;
            }
        }
    }
}

impl Iterator for CyclicWords {
    type Item = CyclicWord;

    fn next(&mut self) -> Option<CyclicWord> {
        let alphabet = self.alphabet;
        self.advance()
            .map(|w| CyclicWord::from_cyclic_letters(w.to_vec(), alphabet))
    }
}

/// Calls `f` on every cyclically reduced word of length `n` that starts with
/// `prefix`, in lexicographic order. Faster than [`CyclicWords`] for counting.
pub fn for_each_cyclic<F>(n: usize, alphabet: Alphabet, prefix: &[Letter], mut f: F)
where
    F: FnMut(&[Letter]),
{
    if prefix.len() > n || !super::is_freely_reduced(prefix) {
        return;
    }
    if prefix.iter().any(|&l| !alphabet.contains(l)) {
        return;
    }
    let mut buf = Vec::with_capacity(n);
    buf.extend_from_slice(prefix);
    if buf.len() == n {
        if super::is_cyclically_reduced(&buf) {
            f(&buf);
        }
        return;
    }
    let letters: Vec<Letter> = alphabet.letters().collect();
    fill(&mut buf, n, &letters, &mut f);
}

fn fill<F: FnMut(&[Letter])>(buf: &mut Vec<Letter>, n: usize, letters: &[Letter], f: &mut F) {
    let depth = buf.len();
    let prev = if depth > 0 { -buf[depth - 1] } else { 0 };
    if depth + 1 == n {
        let first = if depth > 0 { -buf[0] } else { 0 };
        for &x in letters {
            if x != prev && x != first {
                buf.push(x);
                f(buf);
                buf.pop();
            }
        }
        return;
    }
    for &x in letters {
        if x != prev {
            buf.push(x);
            fill(buf, n, letters, f);
            buf.pop();
        }
    }
}

/// All freely reduced words of length exactly `len`, in lexicographic order.
/// Used to shard enumerations across threads.
pub fn freely_reduced_prefixes(len: usize, alphabet: Alphabet) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p| {
                alphabet
                    .letters()
                    .filter(|&x| p.last() != Some(&-x))
                    .map(|x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{count_cyclic, is_cyclically_reduced};
    use num_bigint::BigUint;

    /// Oracle: every word over the 2k letters, filtered by the definition.
    fn brute_force(n: usize, k: usize) -> Vec<Vec<Letter>> {
        let alpha = Alphabet::new(k).unwrap();
        let letters: Vec<Letter> = alpha.letters().collect();
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|p: Vec<Letter>| {
                    letters.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out.retain(|w| is_cyclically_reduced(w));
        out
    }

    #[test]
    fn single_letters() {
        let alpha = Alphabet::new(2).unwrap();
        let words: Vec<String> = enumerate_cyclic(1, alpha).map(|w| w.to_string()).collect();
        assert_eq!(words, vec!["B", "A", "a", "b"]);
    }

    #[test]
    fn empty_length_yields_empty_word_once() {
        let alpha = Alphabet::new(2).unwrap();
        let words: Vec<_> = enumerate_cyclic(0, alpha).collect();
        assert_eq!(words.len(), 1);
        assert!(words[0].is_empty());
        let mut calls = 0;
        for_each_cyclic(0, alpha, &[], |_| calls += 1);
        assert_eq!(calls, 1);
    }

    #[test]
    fn matches_brute_force_in_order() {
        for k in 2..=3 {
            let alpha = Alphabet::new(k).unwrap();
            for n in 0..=5 {
                let expected = brute_force(n, k);
                let got: Vec<Vec<Letter>> =
                    enumerate_cyclic(n, alpha).map(|w| w.letters().to_vec()).collect();
                assert_eq!(got, expected, "k={k} n={n}");
                let mut via_callback = Vec::new();
                for_each_cyclic(n, alpha, &[], |w| via_callback.push(w.to_vec()));
                assert_eq!(via_callback, expected);
            }
        }
    }

    #[test]
    fn iterator_count_matches_formula() {
        for k in 2..=3 {
            let alpha = Alphabet::new(k).unwrap();
            for n in 0..=8 {
                let count = enumerate_cyclic(n, alpha).count();
                assert_eq!(BigUint::from(count), count_cyclic(n, k), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn sharded_enumeration_partitions_the_set() {
        let alpha = Alphabet::new(2).unwrap();
        let n = 7;
        let mut total = 0usize;
        for prefix in freely_reduced_prefixes(2, alpha) {
            for_each_cyclic(n, alpha, &prefix, |w| {
                assert_eq!(&w[..2], &prefix[..]);
                total += 1;
            });
        }
        assert_eq!(BigUint::from(total), count_cyclic(n, 2));
    }

    #[test]
    fn every_rotation_of_enumerated_word_is_reduced() {
        for k in 2..=3 {
            let alpha = Alphabet::new(k).unwrap();
            for n in 1..=if k == 2 { 8 } else { 6 } {
                for w in enumerate_cyclic(n, alpha) {
                    for r in w.rotations() {
                        assert!(crate::words::is_freely_reduced(r.letters()));
                    }
                }
            }
        }
    }
}
