use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::numeric::big_ln;

/// Number of cyclically reduced words of length `n` in a free group of rank
/// `k`: `(2k-1)^n + 1 + (k-1)(1 + (-1)^n)` for `n ≥ 1`, and 1 for the empty
/// word.
pub fn count_cyclic(n: usize, k: usize) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    let base = BigUint::from(2 * k - 1);
    let mut total = num_traits::pow(base, n) + BigUint::one();
    if n.is_multiple_of(2) {
        total += BigUint::from(2 * (k - 1));
    }
    total
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountEntry {
    pub count: BigUint,
    /// Natural log of `count`, `-inf` when the count is zero.
    pub ln: f64,
}

/// Exact counts indexed by word length.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CountTable {
    entries: BTreeMap<usize, CountEntry>,
}

impl CountTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, n: usize, count: BigUint) {
        let ln = big_ln(&count);
        self.entries.insert(n, CountEntry { count, ln });
    }

    pub fn get(&self, n: usize) -> Option<&CountEntry> {
        self.entries.get(&n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &CountEntry)> {
        self.entries.iter().map(|(&n, e)| (n, e))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> BigUint {
        self.entries
            .values()
            .fold(BigUint::zero(), |acc, e| acc + &e.count)
    }
}

impl FromIterator<(usize, BigUint)> for CountTable {
    fn from_iter<I: IntoIterator<Item = (usize, BigUint)>>(iter: I) -> Self {
        let mut table = CountTable::new();
        for (n, c) in iter {
            table.insert(n, c);
        }
        table
    }
}
