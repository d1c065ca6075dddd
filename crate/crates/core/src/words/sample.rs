use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Alphabet, CyclicWord, Letter, Word};

/// Uniform freely reduced word of length `n`: the first letter is uniform over
/// all `2k` letters and each later one over the `2k-1` letters that do not
/// cancel its predecessor.
pub fn sample_freely_reduced_with<R: Rng + ?Sized>(
    n: usize,
    alphabet: Alphabet,
    rng: &mut R,
) -> Word {
    let size = alphabet.size();
    let mut letters: Vec<Letter> = Vec::with_capacity(n);
    for _ in 0..n {
        let next = match letters.last() {
            None => alphabet.letter_at(rng.gen_range(0..size)),
            Some(&prev) => {
                let banned = alphabet.index(-prev);
                let mut i = rng.gen_range(0..size - 1);
                if i >= banned {
                    i += 1;
                }
                alphabet.letter_at(i)
            }
        };
        letters.push(next);
    }
    Word::from_reduced(letters, alphabet)
}

/// Uniform cyclically reduced word of length `n`, by rejection from the
/// uniform freely reduced distribution.
pub fn sample_cyclic_with<R: Rng + ?Sized>(n: usize, alphabet: Alphabet, rng: &mut R) -> CyclicWord {
    loop {
        let w = sample_freely_reduced_with(n, alphabet, rng);
        if w.is_cyclically_reduced() {
            return CyclicWord(w);
        }
    }
}

/// Deterministic in `seed`.
pub fn sample_cyclic(n: usize, alphabet: Alphabet, seed: u64) -> CyclicWord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_cyclic_with(n, alphabet, &mut rng)
}
