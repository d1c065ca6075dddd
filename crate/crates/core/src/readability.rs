//! Deciders for μ-readability, (μ,L)-readability and (μ,L)-goodness, plus
//! the closed-form thresholds and counting bounds attached to them.
//!
//! A word `w` is μ-readable when some connected folded graph of volume at
//! most `floor(μ|w|)`, rank at most `k-1` and with no degree-1 vertex other
//! than a base vertex carries an immersed path labelled `w`. The (μ,L)
//! variant allows rank up to `L`, up to two degree-1 vertices, and asks for
//! some vertex of degree below `2k`.
//!
//! Two deciders are provided. [`Mode::ExactEnumeration`] walks a catalog of
//! every connected folded graph within the budgets. [`Mode::QuotientSearch`]
//! reads the word letter by letter into a partial graph, branching over which
//! vertex each new edge lands on. The graph traced out by the path has at
//! most two degree-1 vertices (its endpoints). For μ-readability a trace with
//! two such endpoints is repaired by one extra edge; a loop at an endpoint
//! with a generator not incident there always fits foldedness, and any
//! witness containing the trace has strictly larger rank and volume, so one
//! edge is all a repair can ever need.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{FoldedTable, LabeledGraph};
use crate::limits::Limits;
use crate::words::{Alphabet, CyclicWord, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ExactEnumeration,
    QuotientSearch,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-enumeration" => Ok(Mode::ExactEnumeration),
            "quotient" | "quotient-search" => Ok(Mode::QuotientSearch),
            other => Err(Error::InvalidInput(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReadabilityParams {
    pub alphabet: Alphabet,
    pub mu: f64,
    /// `L`; absent for plain μ-readability.
    pub rank_bound: Option<usize>,
}

impl ReadabilityParams {
    pub fn mu(alphabet: Alphabet, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        Ok(ReadabilityParams {
            alphabet,
            mu,
            rank_bound: None,
        })
    }

    pub fn mu_l(alphabet: Alphabet, mu: f64, l: usize) -> Result<Self> {
        check_mu(mu)?;
        if l < 2 {
            return Err(Error::InvalidInput(format!("L must be at least 2, got {l}")));
        }
        Ok(ReadabilityParams {
            alphabet,
            mu,
            rank_bound: Some(l),
        })
    }

    pub fn with_mu(self, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        Ok(ReadabilityParams { mu, ..self })
    }

    /// Volume budget `floor(μ·len)`.
    pub fn budget(&self, len: usize) -> usize {
        (self.mu * len as f64 + 1e-9).floor() as usize
    }

    fn rules(&self) -> Rules {
        let k = self.alphabet.rank();
        match self.rank_bound {
            None => Rules {
                max_rank: k - 1,
                max_leaves: 1,
                needs_low_degree: false,
            },
            Some(l) => Rules {
                max_rank: l,
                max_leaves: 2,
                needs_low_degree: true,
            },
        }
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("mu must lie in (0,1), got {mu}")))
    }
}

#[derive(Clone, Copy, Debug)]
struct Rules {
    max_rank: usize,
    max_leaves: usize,
    needs_low_degree: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReadabilityVerdict {
    pub readable: bool,
    pub witness: Option<LabeledGraph>,
    pub mode: Mode,
}

impl ReadabilityVerdict {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "readable": self.readable,
            "mode": self.mode,
            "witness": self.witness.as_ref().map(LabeledGraph::to_json),
        })
    }
}

/// Decides μ-readability of a nonempty freely reduced word.
pub fn is_mu_readable(w: &Word, params: &ReadabilityParams, mode: Mode) -> Result<ReadabilityVerdict> {
    let params = ReadabilityParams {
        rank_bound: None,
        ..*params
    };
    decide(w, &params, mode)
}

/// Decides (μ,L)-readability. Quotient search is exact when `L < k`; for
/// `L ≥ k` the exact enumerator is used regardless of `mode`.
pub fn is_mu_l_readable(w: &Word, params: &ReadabilityParams, mode: Mode) -> Result<ReadabilityVerdict> {
    let l = params
        .rank_bound
        .ok_or_else(|| Error::InvalidInput("(mu,L)-readability needs L".into()))?;
    let mode = if l >= params.alphabet.rank() {
        Mode::ExactEnumeration
    } else {
        mode
    };
    decide(w, params, mode)
}

fn decide(w: &Word, params: &ReadabilityParams, mode: Mode) -> Result<ReadabilityVerdict> {
    if w.is_empty() {
        return Err(Error::InvalidInput("readability of the empty word".into()));
    }
    if w.alphabet() != params.alphabet {
        return Err(Error::InvalidInput("word and parameters use different alphabets".into()));
    }
    let budget = params.budget(w.len());
    let witness = if budget == 0 {
        None
    } else {
        match mode {
            Mode::QuotientSearch => quotient_search(w.letters(), params.alphabet, budget, params.rules()),
            Mode::ExactEnumeration => exact_search(w.letters(), params.alphabet, budget, params.rules())?,
        }
    };
    Ok(ReadabilityVerdict {
        readable: witness.is_some(),
        witness,
        mode,
    })
}

/// Re-checks every clause of the relevant definition against a candidate
/// witness graph, independently of either decider.
pub fn verify_witness(w: &Word, params: &ReadabilityParams, g: &LabeledGraph) -> bool {
    let rules = params.rules();
    let k = params.alphabet.rank();
    if !g.is_folded() || !g.is_connected() || g.volume() > params.budget(w.len()) {
        return false;
    }
    if g.rank().map_or(true, |r| r > rules.max_rank) {
        return false;
    }
    let degrees = g.degrees();
    let leaves: Vec<usize> = (0..degrees.len()).filter(|&v| degrees[v] == 1).collect();
    let leaves_ok = match params.rank_bound {
        None => leaves.iter().all(|&v| Some(v) == g.base()),
        Some(_) => leaves.len() <= 2,
    };
    if !leaves_ok {
        return false;
    }
    if rules.needs_low_degree && !degrees.iter().any(|&d| d < 2 * k) {
        return false;
    }
    g.read_word(w.letters()).is_some()
}

struct QuotientSearch<'a> {
    word: &'a [Letter],
    letters: Vec<Letter>,
    table: FoldedTable,
    budget: usize,
    rules: Rules,
}

fn quotient_search(word: &[Letter], alphabet: Alphabet, budget: usize, rules: Rules) -> Option<LabeledGraph> {
    let mut search = QuotientSearch {
        word,
        letters: alphabet.letters().collect(),
        table: FoldedTable::new(alphabet, 1),
        budget,
        rules,
    };
    search.extend(0, 0)
}

impl QuotientSearch<'_> {
    fn extend(&mut self, pos: usize, cur: usize) -> Option<LabeledGraph> {
        let mut pos = pos;
        let mut cur = cur;
        // follow forced edges
        while pos < self.word.len() {
            match self.table.target(cur, self.word[pos]) {
                Some(t) => {
                    cur = t;
                    pos += 1;
                }
                None => break,
            }
        }
        if pos == self.word.len() {
            return self.accept();
        }
        if self.table.volume + 1 > self.budget {
            return None;
        }
        let letter = self.word[pos];
        // land on an existing vertex: rank goes up by one
        if self.table.rank() < self.rules.max_rank {
            for v in 0..self.table.vertices {
                if self.table.add_edge(cur, letter, v) {
                    let found = self.extend(pos + 1, v);
                    self.table.remove_edge(cur, letter, v);
                    if found.is_some() {
                        return found;
                    }
                }
            }
        }
        // or on a fresh vertex
        let v = self.table.add_vertex();
        self.table.add_edge(cur, letter, v);
        let found = self.extend(pos + 1, v);
        self.table.remove_edge(cur, letter, v);
        self.table.pop_vertex();
        found
    }

    fn accept(&mut self) -> Option<LabeledGraph> {
        let k = self.table.alphabet.rank();
        let degrees: Vec<usize> = (0..self.table.vertices).map(|v| self.table.degree(v)).collect();
        let leaves: Vec<usize> = (0..degrees.len()).filter(|&v| degrees[v] == 1).collect();
        if self.rules.needs_low_degree && !degrees.iter().any(|&d| d < 2 * k) {
            return None;
        }
        if leaves.len() <= self.rules.max_leaves {
            let base = leaves.first().copied().unwrap_or(0);
            return Some(self.table.to_graph(Some(base)));
        }
        // two endpoints of degree 1 where only one is allowed: one augmenting edge
        if self.table.volume + 1 > self.budget || self.table.rank() + 1 > self.rules.max_rank {
            return None;
        }
        for &u in &leaves {
            for v in 0..self.table.vertices {
                for li in 0..self.letters.len() {
                    let l = self.letters[li];
                    if self.table.add_edge(u, l, v) {
                        let remaining: Vec<usize> = (0..self.table.vertices)
                            .filter(|&x| self.table.degree(x) == 1)
                            .collect();
                        let graph = (remaining.len() <= self.rules.max_leaves).then(|| {
                            self.table.to_graph(Some(remaining.first().copied().unwrap_or(u)))
                        });
                        self.table.remove_edge(u, l, v);
                        if graph.is_some() {
                            return graph;
                        }
                    }
                }
            }
        }
        None
    }
}

struct CatalogEntry {
    table: FoldedTable,
    leaves: Vec<usize>,
    min_degree: usize,
}

type CatalogKey = (usize, usize, usize);

fn catalog_cache() -> &'static Mutex<HashMap<CatalogKey, Arc<Vec<CatalogEntry>>>> {
    static CACHE: OnceLock<Mutex<HashMap<CatalogKey, Arc<Vec<CatalogEntry>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Every connected folded graph with volume ≤ `max_volume` and rank ≤
/// `max_rank`, one per isomorphism class, ordered by volume.
fn catalog(alphabet: Alphabet, max_volume: usize, max_rank: usize) -> Result<Arc<Vec<CatalogEntry>>> {
    let key = (alphabet.rank(), max_volume, max_rank);
    if let Some(c) = catalog_cache().lock().expect("cache lock").get(&key) {
        return Ok(c.clone());
    }
    let cap = Limits::default().graph_catalog_cap;
    let letters: Vec<Letter> = alphabet.letters().collect();
    let mut level = vec![FoldedTable::new(alphabet, 1)];
    let mut all = level.clone();
    for _ in 0..max_volume {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        let mut push = |t: FoldedTable, next: &mut Vec<FoldedTable>| {
            if t.rank() <= max_rank && seen.insert(t.canonical_code()) {
                next.push(t);
            }
        };
        for g in &level {
            for u in 0..g.vertices {
                for &l in &letters {
                    if !g.slot_free(u, l) {
                        continue;
                    }
                    for v in 0..g.vertices {
                        let mut h = g.clone();
                        if h.add_edge(u, l, v) {
                            push(h, &mut next);
                        }
                    }
                    let mut h = g.clone();
                    let v = h.add_vertex();
                    h.add_edge(u, l, v);
                    push(h, &mut next);
                }
            }
        }
        if (all.len() + next.len()) as u64 > cap {
            return Err(Error::CapExceeded {
                what: "exact readability catalog",
                requested: format!(">{}", all.len() + next.len()),
                cap,
            });
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    let entries: Vec<CatalogEntry> = all
        .into_iter()
        .map(|table| {
            let degrees: Vec<usize> = (0..table.vertices).map(|v| table.degree(v)).collect();
            CatalogEntry {
                leaves: (0..degrees.len()).filter(|&v| degrees[v] == 1).collect(),
                min_degree: degrees.iter().copied().min().unwrap_or(0),
                table,
            }
        })
        .collect();
    let entries = Arc::new(entries);
    catalog_cache()
        .lock()
        .expect("cache lock")
        .insert(key, entries.clone());
    Ok(entries)
}

fn exact_search(word: &[Letter], alphabet: Alphabet, budget: usize, rules: Rules) -> Result<Option<LabeledGraph>> {
    let k = alphabet.rank();
    let graphs = catalog(alphabet, budget, rules.max_rank)?;
    for entry in graphs.iter() {
        if entry.leaves.len() > rules.max_leaves {
            continue;
        }
        if rules.needs_low_degree && entry.min_degree >= 2 * k {
            continue;
        }
        if entry.table.read(word).is_some() {
            let base = entry.leaves.first().copied().unwrap_or(0);
            return Ok(Some(entry.table.to_graph(Some(base))));
        }
    }
    Ok(None)
}

/// Distinct subwords of length ≥ ⌈|w|/2⌉ of the cyclic permutations of `w`
/// and `w⁻¹`.
pub fn long_cyclic_subwords(w: &CyclicWord) -> Vec<Word> {
    let n = w.len();
    let min_len = n.div_ceil(2);
    let mut seen: HashSet<Vec<Letter>> = HashSet::new();
    let mut out = Vec::new();
    for base in [w.clone(), w.inverse()] {
        let letters = base.letters();
        for start in 0..n {
            for len in min_len.max(1)..=n {
                let v: Vec<Letter> = (0..len).map(|i| letters[(start + i) % n]).collect();
                if seen.insert(v.clone()) {
                    out.push(Word::from_reduced(v, w.alphabet()));
                }
            }
        }
    }
    out
}

/// A (μ,L)-readable subword of length ≥ ⌈|w|/2⌉ of some cyclic permutation of
/// `w^{±1}`, if one exists.
pub fn readable_long_subword(w: &CyclicWord, params: &ReadabilityParams) -> Result<Option<Word>> {
    if params.rank_bound.is_none() {
        return Err(Error::InvalidInput("goodness needs L".into()));
    }
    let candidates: Vec<Word> = long_cyclic_subwords(w)
        .into_iter()
        .filter(|v| params.budget(v.len()) > 0)
        .collect();
    let hits: Result<Vec<Option<Word>>> = candidates
        .par_iter()
        .map(|v| {
            let verdict = is_mu_l_readable(v, params, Mode::QuotientSearch)?;
            Ok(verdict.readable.then(|| v.clone()))
        })
        .collect();
    Ok(hits?.into_iter().flatten().min_by_key(|v| (v.len(), v.letters().to_vec())))
}

/// (μ,L)-goodness of a nonempty cyclically reduced word.
pub fn is_good(w: &CyclicWord, params: &ReadabilityParams) -> Result<bool> {
    if w.is_empty() {
        return Err(Error::InvalidInput("goodness of the empty word".into()));
    }
    Ok(readable_long_subword(w, params)?.is_none())
}

/// Largest μ for which non-μ-readable words are known to be exponentially
/// generic: `log_{2k}(1 + 1/(4k-4))`.
pub fn mu_max_ao(k: usize) -> f64 {
    let k = k as f64;
    (1.0 / (4.0 * k - 4.0)).ln_1p() / (2.0 * k).ln()
}

/// `(1/3L) log_{2k}(1 + 1/(2(2k-1)^{3L} - 2))`.
pub fn mu_max_a1(k: usize, l: usize) -> f64 {
    let kf = k as f64;
    let three_l = 3.0 * l as f64;
    let power = (three_l * (2.0 * kf - 1.0).ln()).exp();
    (1.0 / (2.0 * power - 2.0)).ln_1p() / (2.0 * kf).ln() / three_l
}

/// Upper bound on the genericity entropy of (μ,L)-good words:
/// `(((μ+1)/2) ln(2k-1) + (1/2) ln(6L)) / ln(2k-1)`.
pub fn bound_lemma_ml(k: usize, mu: f64, l: usize) -> f64 {
    let log_base = (2.0 * k as f64 - 1.0).ln();
    (0.5 * (mu + 1.0) * log_base + 0.5 * (6.0 * l as f64).ln()) / log_base
}

/// Natural log of `C (μn)^{3L+1} (6L)^n (2k-1)^{μn}`, the bound on the number
/// of (μ,L)-readable words of length `n`.
pub fn readable_count_bound_ln(n: usize, k: usize, mu: f64, l: usize, constant: f64) -> f64 {
    let n = n as f64;
    let l = l as f64;
    constant.ln()
        + (3.0 * l + 1.0) * (mu * n).ln()
        + n * (6.0 * l).ln()
        + mu * n * (2.0 * k as f64 - 1.0).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::enumerate_cyclic;

    fn alpha(k: usize) -> Alphabet {
        Alphabet::new(k).unwrap()
    }

    fn word(k: usize, s: &str) -> Word {
        alpha(k).parse(s).unwrap()
    }

    #[test]
    fn zero_budget_is_never_readable() {
        let p = ReadabilityParams::mu(alpha(2), 0.3).unwrap();
        for mode in [Mode::QuotientSearch, Mode::ExactEnumeration] {
            let v = is_mu_readable(&word(2, "ab"), &p, mode).unwrap();
            assert!(!v.readable);
            assert!(v.witness.is_none());
        }
    }

    #[test]
    fn power_of_a_reads_in_a_loop() {
        let p = ReadabilityParams::mu(alpha(2), 0.2).unwrap();
        let w = word(2, "aaaaaaaaaa");
        for mode in [Mode::QuotientSearch, Mode::ExactEnumeration] {
            let v = is_mu_readable(&w, &p, mode).unwrap();
            assert!(v.readable);
            let g = v.witness.unwrap();
            assert!(verify_witness(&w, &p, &g));
            assert_eq!(g.volume(), 1);
        }
    }

    #[test]
    fn alternating_word_reads_in_two_cycle() {
        let p = ReadabilityParams::mu(alpha(2), 0.3).unwrap();
        let w = word(2, &"ab".repeat(5));
        for mode in [Mode::QuotientSearch, Mode::ExactEnumeration] {
            let v = is_mu_readable(&w, &p, mode).unwrap();
            assert!(v.readable, "{mode:?}");
            assert!(verify_witness(&w, &p, v.witness.as_ref().unwrap()));
        }
    }

    #[test]
    fn empty_word_is_an_input_error() {
        let p = ReadabilityParams::mu(alpha(2), 0.5).unwrap();
        assert!(is_mu_readable(&Word::empty(alpha(2)), &p, Mode::QuotientSearch).is_err());
    }

    #[test]
    fn mu_l_examples() {
        let p = ReadabilityParams::mu_l(alpha(3), 0.5, 2).unwrap();
        let v = is_mu_l_readable(&word(3, "ababab"), &p, Mode::QuotientSearch).unwrap();
        assert!(v.readable);
        assert!(verify_witness(&word(3, "ababab"), &p, v.witness.as_ref().unwrap()));
        assert!(!is_mu_l_readable(&word(3, "a"), &p, Mode::QuotientSearch).unwrap().readable);
        let p = ReadabilityParams::mu_l(alpha(3), 0.1, 2).unwrap();
        assert!(!is_mu_l_readable(&word(3, "abcabcab"), &p, Mode::QuotientSearch).unwrap().readable);
    }

    #[test]
    fn large_rank_bound_falls_back_to_exact() {
        let p = ReadabilityParams::mu_l(alpha(2), 0.5, 2).unwrap();
        let v = is_mu_l_readable(&word(2, "abab"), &p, Mode::QuotientSearch).unwrap();
        assert_eq!(v.mode, Mode::ExactEnumeration);
        assert!(v.readable);
    }

    #[test]
    fn augmenting_edge_repairs_open_path() {
        // The trace of baaac is b, an a-loop, then c: two leaves, volume 3,
        // rank 1. A loop at one end fits the budget of 4 and rank bound 2.
        let p = ReadabilityParams::mu(alpha(3), 0.99).unwrap();
        let w = word(3, "baaac");
        let v = is_mu_readable(&w, &p, Mode::QuotientSearch).unwrap();
        assert!(v.readable);
        assert!(verify_witness(&w, &p, v.witness.as_ref().unwrap()));
        let exact = is_mu_readable(&w, &p, Mode::ExactEnumeration).unwrap();
        assert!(exact.readable);
    }

    #[test]
    fn goodness_examples() {
        let p = ReadabilityParams::mu_l(alpha(3), 0.3, 2).unwrap();
        assert!(is_good(&alpha(3).parse_cyclic("ab").unwrap(), &p).unwrap());
        let p = ReadabilityParams::mu_l(alpha(3), 0.5, 2).unwrap();
        let w = alpha(3).parse_cyclic(&"ab".repeat(6)).unwrap();
        assert!(!is_good(&w, &p).unwrap());
        let p = ReadabilityParams::mu_l(alpha(3), 0.05, 2).unwrap();
        let w = crate::words::sample_cyclic(12, alpha(3), 1);
        assert!(is_good(&w, &p).unwrap());
    }

    #[test]
    fn subword_set_covers_both_orientations() {
        let w = alpha(2).parse_cyclic("aab").unwrap();
        let subs: HashSet<String> = long_cyclic_subwords(&w).iter().map(|v| v.to_string()).collect();
        for s in ["aa", "ab", "ba", "aab", "aba", "baa", "BA", "AA", "AB", "BAA", "ABA", "AAB"] {
            assert!(subs.contains(s), "{s}");
        }
        assert_eq!(subs.len(), 12);
    }

    #[test]
    fn quotient_and_exact_agree_on_short_words() {
        for mu in [0.3, 0.5] {
            let p = ReadabilityParams::mu(alpha(2), mu).unwrap();
            for n in 1..=7 {
                for w in enumerate_cyclic(n, alpha(2)) {
                    let w = w.into_word();
                    let q = is_mu_readable(&w, &p, Mode::QuotientSearch).unwrap();
                    let e = is_mu_readable(&w, &p, Mode::ExactEnumeration).unwrap();
                    assert_eq!(q.readable, e.readable, "{w} at mu={mu}");
                    if let Some(g) = &q.witness {
                        assert!(verify_witness(&w, &p, g));
                    }
                }
            }
        }
    }

    #[test]
    fn closed_forms() {
        assert!((mu_max_ao(2) - 1.25f64.ln() / 4f64.ln()).abs() < 1e-12);
        assert!((mu_max_ao(2) - 0.16096).abs() < 1e-4);
        assert!((bound_lemma_ml(50, 0.2, 2) - 0.8704).abs() < 1e-3);
        assert!((bound_lemma_ml(2, 0.2, 2) - 1.7309).abs() < 1e-3);
        let direct = (1.0 + 1.0 / (2.0 * 3f64.powi(6) - 2.0)).ln() / 4f64.ln() / 6.0;
        assert!((mu_max_a1(2, 2) - direct).abs() < 1e-15);
        let ln_bound = readable_count_bound_ln(10, 3, 0.5, 2, 1.0);
        let direct = 7.0 * 5f64.ln() + 10.0 * 12f64.ln() + 5.0 * 5f64.ln();
        assert!((ln_bound - direct).abs() < 1e-9);
    }
}
