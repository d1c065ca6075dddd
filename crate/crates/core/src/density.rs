//! Random presentations in the density model, hypothesis suites over them and
//! the numeric pipeline choosing `k₀` and `d₀`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cancellation::{
    covers_all_generators, is_c_prime, is_primitive_with_limits, is_proper_power, IncrementalCPrime,
    Presentation,
};
use crate::entropy::tuple_size;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numeric::{mix_seed, wilson_interval, Z_95};
use crate::readability::{bound_lemma_ml, is_good, ReadabilityParams};
use crate::words::{sample_cyclic_with, Alphabet, CyclicWord};

/// Either one density for every rank or a sequence `d(k)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Density {
    Fixed(f64),
    PerRank(BTreeMap<usize, f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityParams {
    pub alphabet: Alphabet,
    pub n: usize,
    pub density: Density,
    pub seed: u64,
}

fn check_density(d: f64) -> Result<f64> {
    if d > 0.0 && d < 1.0 {
        Ok(d)
    } else {
        Err(Error::InvalidInput(format!("density must lie in (0,1), got {d}")))
    }
}

impl DensityParams {
    pub fn new(alphabet: Alphabet, n: usize, d: f64, seed: u64) -> Result<Self> {
        check_density(d)?;
        if n == 0 {
            return Err(Error::InvalidInput("relator length must be positive".into()));
        }
        Ok(DensityParams {
            alphabet,
            n,
            density: Density::Fixed(d),
            seed,
        })
    }

    pub fn with_sequence(alphabet: Alphabet, n: usize, d: BTreeMap<usize, f64>, seed: u64) -> Result<Self> {
        for &v in d.values() {
            check_density(v)?;
        }
        if n == 0 {
            return Err(Error::InvalidInput("relator length must be positive".into()));
        }
        let params = DensityParams {
            alphabet,
            n,
            density: Density::PerRank(d),
            seed,
        };
        params.d()?;
        Ok(params)
    }

    /// Density in force at this rank.
    pub fn d(&self) -> Result<f64> {
        match &self.density {
            Density::Fixed(d) => Ok(*d),
            Density::PerRank(map) => map.get(&self.alphabet.rank()).copied().ok_or_else(|| {
                Error::InvalidInput(format!("no density given for rank {}", self.alphabet.rank()))
            }),
        }
    }

    /// `m_n = max(1, floor((2k-1)^{dn}))`.
    pub fn relator_count(&self) -> Result<f64> {
        Ok(tuple_size(self.alphabet.rank(), self.n, self.d()?))
    }
}

/// Endless stream of independent uniform cyclically reduced relators.
pub struct RelatorStream {
    alphabet: Alphabet,
    n: usize,
    rng: ChaCha8Rng,
}

impl RelatorStream {
    pub fn new(alphabet: Alphabet, n: usize, seed: u64) -> Self {
        RelatorStream {
            alphabet,
            n,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Iterator for RelatorStream {
    type Item = CyclicWord;
    fn next(&mut self) -> Option<CyclicWord> {
        Some(sample_cyclic_with(self.n, self.alphabet, &mut self.rng))
    }
}

fn relator_cap_error(m: f64, limits: &Limits) -> Error {
    Error::CapExceeded {
        what: "relators per presentation",
        requested: format!("{m:.0}"),
        cap: limits.relator_cap,
    }
}

/// A tuple of `m_n` relators (repetition allowed), the first `m_n` terms of
/// [`RelatorStream`] for the seed.
pub fn sample_presentation(params: &DensityParams, limits: &Limits) -> Result<Presentation> {
    let m = params.relator_count()?;
    if m > limits.relator_cap as f64 {
        return Err(relator_cap_error(m, limits));
    }
    let relators = RelatorStream::new(params.alphabet, params.n, params.seed)
        .take(m as usize)
        .collect();
    Presentation::new(params.alphabet, relators)
}

/// Enabled checks and their parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub c_prime: Option<f64>,
    /// `(μ, L)` for goodness of every relator.
    pub goodness: Option<(f64, usize)>,
    pub coverage: bool,
    pub no_proper_power: bool,
    pub no_primitive: bool,
}

impl SuiteConfig {
    pub fn is_empty(&self) -> bool {
        *self == SuiteConfig::default()
    }
}

impl FromStr for SuiteConfig {
    type Err = Error;

    /// Comma-separated items: `cprime=λ`, `goodness:mu=μ:L=L`, `coverage`,
    /// `noproperpower`, `noprimitive`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |item: &str, reason: &str| Error::Parse {
            text: item.to_string(),
            reason: reason.to_string(),
        };
        let mut suite = SuiteConfig::default();
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let mut parts = item.split(':');
            let head = parts.next().unwrap_or_default();
            let (name, value) = match head.split_once('=') {
                Some((n, v)) => (n.trim(), Some(v.trim())),
                None => (head.trim(), None),
            };
            match name.to_ascii_lowercase().as_str() {
                "cprime" | "c-prime" => {
                    let v = value.ok_or_else(|| bad(item, "expected cprime=<lambda>"))?;
                    let lambda: f64 = v.parse().map_err(|_| bad(item, "lambda is not a number"))?;
                    if !(lambda > 0.0 && lambda <= 1.0) {
                        return Err(bad(item, "lambda must lie in (0,1]"));
                    }
                    suite.c_prime = Some(lambda);
                }
                "goodness" | "good" => {
                    let (mut mu, mut l) = (None, None);
                    for kv in parts.by_ref() {
                        let (key, v) = kv.split_once('=').ok_or_else(|| bad(item, "expected key=value"))?;
                        match key.trim() {
                            "mu" => mu = Some(v.parse::<f64>().map_err(|_| bad(item, "mu is not a number"))?),
                            "L" | "l" => l = Some(v.parse::<usize>().map_err(|_| bad(item, "L is not an integer"))?),
                            _ => return Err(bad(item, "unknown goodness parameter")),
                        }
                    }
                    match (mu, l) {
                        (Some(mu), Some(l)) => suite.goodness = Some((mu, l)),
                        _ => return Err(bad(item, "goodness needs mu and L")),
                    }
                }
                "coverage" => suite.coverage = true,
                "noproperpower" => suite.no_proper_power = true,
                "noprimitive" => suite.no_primitive = true,
                _ => return Err(bad(item, "unknown check")),
            }
            if parts.next().is_some() {
                return Err(bad(item, "unexpected parameters"));
            }
        }
        Ok(suite)
    }
}

impl fmt::Display for SuiteConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items = Vec::new();
        if let Some(l) = self.c_prime {
            items.push(format!("cprime={l}"));
        }
        if let Some((mu, l)) = self.goodness {
            items.push(format!("goodness:mu={mu}:L={l}"));
        }
        if self.coverage {
            items.push("coverage".into());
        }
        if self.no_proper_power {
            items.push("noproperpower".into());
        }
        if self.no_primitive {
            items.push("noprimitive".into());
        }
        write!(f, "{}", items.join(","))
    }
}

/// Outcome of each enabled check; disabled checks are `None`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PresentationReport {
    pub suite: SuiteConfig,
    pub c_prime: Option<bool>,
    pub no_proper_powers: Option<bool>,
    pub all_good: Option<bool>,
    pub coverage: Option<bool>,
    pub no_primitive_relator: Option<bool>,
}

impl PresentationReport {
    pub fn all_pass(&self) -> bool {
        [
            self.c_prime,
            self.no_proper_powers,
            self.all_good,
            self.coverage,
            self.no_primitive_relator,
        ]
        .iter()
        .all(|c| c.unwrap_or(true))
    }
}

fn all_relators<F>(p: &Presentation, mut check: F) -> Result<bool>
where
    F: FnMut(&CyclicWord) -> Result<bool>,
{
    for r in p.relators() {
        if !check(r)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn run_suite(p: &Presentation, suite: &SuiteConfig, limits: &Limits) -> Result<PresentationReport> {
    let alphabet = p.alphabet();
    let c_prime = suite.c_prime.map(|l| is_c_prime(p, l).map(|r| r.satisfied)).transpose()?;
    let no_proper_powers = suite
        .no_proper_power
        .then(|| all_relators(p, |r| Ok(!is_proper_power(r))))
        .transpose()?;
    let all_good = suite
        .goodness
        .map(|(mu, l)| {
            let params = ReadabilityParams::mu_l(alphabet, mu, l)?;
            all_relators(p, |r| is_good(r, &params))
        })
        .transpose()?;
    let coverage = suite
        .coverage
        .then(|| all_relators(p, |r| Ok(covers_all_generators(r))))
        .transpose()?;
    let no_primitive_relator = suite
        .no_primitive
        .then(|| all_relators(p, |r| Ok(!is_primitive_with_limits(r.word(), limits)?)))
        .transpose()?;
    Ok(PresentationReport {
        suite: suite.clone(),
        c_prime,
        no_proper_powers,
        all_good,
        coverage,
        no_primitive_relator,
    })
}

/// Whether the presentation sampled from `seed` with `m` relators passes
/// every check, reading relators one at a time and stopping at the first
/// failure. Agrees with `run_suite(..).all_pass()`; the relator cap only
/// matters when no failure occurs before it.
pub fn passes_streaming(
    alphabet: Alphabet,
    n: usize,
    m: f64,
    seed: u64,
    suite: &SuiteConfig,
    limits: &Limits,
) -> Result<bool> {
    if suite.is_empty() {
        return Ok(true);
    }
    let good_params = suite
        .goodness
        .map(|(mu, l)| ReadabilityParams::mu_l(alphabet, mu, l))
        .transpose()?;
    let mut c_prime = suite.c_prime.map(|l| IncrementalCPrime::new(n, l));
    let m_int = m.min(u64::MAX as f64) as u64;
    for (i, r) in RelatorStream::new(alphabet, n, seed).enumerate() {
        if i as u64 >= m_int {
            return Ok(true);
        }
        if i as u64 >= limits.relator_cap {
            return Err(relator_cap_error(m, limits));
        }
        if suite.no_proper_power && is_proper_power(&r) {
            return Ok(false);
        }
        if suite.coverage && !covers_all_generators(&r) {
            return Ok(false);
        }
        if let Some(c) = c_prime.as_mut() {
            if !c.push(&r)? {
                return Ok(false);
            }
        }
        if suite.no_primitive && is_primitive_with_limits(r.word(), limits)? {
            return Ok(false);
        }
        if let Some(params) = &good_params {
            if !is_good(&r, params)? {
                return Ok(false);
            }
        }
    }
    unreachable!("relator stream is endless")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub d: f64,
    pub pass_fraction: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub trials: u64,
    pub passes: u64,
}

/// Seed of trial `t`. The same seeds are used at every density, so a trial at
/// a larger density sees a superset of the relators it saw at a smaller one.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    mix_seed(seed, trial)
}

/// All-pass fraction with a 95% Wilson interval for each density, in grid
/// order.
pub fn density_sweep(
    alphabet: Alphabet,
    n: usize,
    grid: &[f64],
    trials: u64,
    suite: &SuiteConfig,
    seed: u64,
    limits: &Limits,
) -> Result<Vec<SweepRow>> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    grid.iter()
        .map(|&d| {
            check_density(d)?;
            let m = tuple_size(alphabet.rank(), n, d);
            let outcomes: Result<Vec<bool>> = (0..trials)
                .into_par_iter()
                .map(|t| passes_streaming(alphabet, n, m, trial_seed(seed, t), suite, limits))
                .collect();
            let passes = outcomes?.into_iter().filter(|&p| p).count() as u64;
            let (ci_lo, ci_hi) = wilson_interval(passes, trials, Z_95);
            Ok(SweepRow {
                d,
                pass_fraction: passes as f64 / trials as f64,
                ci_lo,
                ci_hi,
                trials,
                passes,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineResult {
    pub k0: usize,
    pub d0: f64,
    /// `(μ, L)`-good relators under C'(λ) with this λ.
    pub lambda: f64,
}

/// Least rank `k > L` with `bound_lemma_ml(k, μ, L) ≤ ν`.
pub fn thm_ml_k0(l: usize, mu: f64, nu: f64) -> Result<usize> {
    if l == 0 {
        return Err(Error::InvalidInput("L must be positive".into()));
    }
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::InvalidInput(format!("mu must lie in (0,1), got {mu}")));
    }
    if !((mu + 1.0) / 2.0 < nu && nu < 1.0) {
        return Err(Error::InvalidInput(format!(
            "nu must lie in ((mu+1)/2, 1) = ({}, 1), got {nu}",
            (mu + 1.0) / 2.0
        )));
    }
    // ln(2k-1) >= ln(6L)/(2ν-μ-1)
    let x = (6.0 * l as f64).ln() / (2.0 * nu - mu - 1.0);
    if x > 700.0 {
        return Err(Error::InvalidInput(format!("k0 overflows: ln(2k-1) >= {x}")));
    }
    let mut k = (((x.exp() + 1.0) / 2.0).ceil() as usize).max(2);
    while k > 2 && bound_lemma_ml(k - 1, mu, l) <= nu {
        k -= 1;
    }
    while bound_lemma_ml(k, mu, l) > nu {
        k += 1;
    }
    Ok(k.max(l + 1))
}

/// `k₀` from [`thm_ml_k0`] and `d₀ = min{d(2), …, d(k₀-1), 1-ν}`.
pub fn thm_ml_pipeline(l: usize, mu: f64, nu: f64, d_small: &BTreeMap<usize, f64>) -> Result<PipelineResult> {
    let k0 = thm_ml_k0(l, mu, nu)?;
    let mut d0 = 1.0 - nu;
    for k in 2..k0 {
        let d = *d_small
            .get(&k)
            .ok_or_else(|| Error::InvalidInput(format!("missing d({k}) for k < k0 = {k0}")))?;
        check_density(d)?;
        d0 = d0.min(d);
    }
    Ok(PipelineResult {
        k0,
        d0,
        lambda: crate::cancellation::lambda_bound(mu, l).value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::count_cyclic;

    fn f2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    #[test]
    fn relator_counts() {
        let p = DensityParams::new(f2(), 10, 0.5, 1).unwrap();
        assert_eq!(p.relator_count().unwrap(), 243.0);
        assert_eq!(sample_presentation(&p, &Limits::default()).unwrap().len(), 243);
        let tiny = DensityParams::new(f2(), 50, 1e-6, 1).unwrap();
        assert_eq!(sample_presentation(&tiny, &Limits::default()).unwrap().len(), 1);
        assert!(DensityParams::new(f2(), 10, 1.0, 1).is_err());
        assert!(DensityParams::new(f2(), 10, 0.0, 1).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_capped() {
        let p = DensityParams::new(f2(), 12, 0.3, 99).unwrap();
        let a = sample_presentation(&p, &Limits::default()).unwrap();
        let b = sample_presentation(&p, &Limits::default()).unwrap();
        assert_eq!(a, b);
        let big = DensityParams::new(f2(), 100, 0.4, 1).unwrap();
        match sample_presentation(&big, &Limits::default()) {
            Err(Error::CapExceeded { cap, .. }) => assert_eq!(cap, Limits::default().relator_cap),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn per_rank_density() {
        let seq: BTreeMap<usize, f64> = [(2, 0.5), (3, 0.25)].into_iter().collect();
        let p = DensityParams::with_sequence(Alphabet::new(3).unwrap(), 8, seq.clone(), 0).unwrap();
        assert_eq!(p.relator_count().unwrap(), 25.0);
        assert!(DensityParams::with_sequence(Alphabet::new(4).unwrap(), 8, seq, 0).is_err());
    }

    #[test]
    fn suite_parsing() {
        let s: SuiteConfig = "cprime=0.1666,goodness:mu=0.2:L=2,coverage,noproperpower,noprimitive"
            .parse()
            .unwrap();
        assert_eq!(s.c_prime, Some(0.1666));
        assert_eq!(s.goodness, Some((0.2, 2)));
        assert!(s.coverage && s.no_proper_power && s.no_primitive);
        assert_eq!(s.to_string().parse::<SuiteConfig>().unwrap(), s);
        assert!("".parse::<SuiteConfig>().unwrap().is_empty());
        for bad in ["cprime", "cprime=x", "goodness:mu=0.2", "bogus", "coverage:x=1"] {
            assert!(bad.parse::<SuiteConfig>().is_err(), "{bad}");
        }
    }

    #[test]
    fn suite_examples() {
        let limits = Limits::default();
        let p = Presentation::parse(f2(), ["abAB"]).unwrap();
        let r = run_suite(&p, &"cprime=0.3333334".parse().unwrap(), &limits).unwrap();
        assert_eq!(r.c_prime, Some(true));
        let p = Presentation::parse(f2(), ["abab"]).unwrap();
        let r = run_suite(&p, &"noproperpower".parse().unwrap(), &limits).unwrap();
        assert_eq!(r.no_proper_powers, Some(false));
        let r = run_suite(&p, &SuiteConfig::default(), &limits).unwrap();
        assert!(r.all_pass());
        assert_eq!(r.c_prime, None);
    }

    #[test]
    fn streaming_agrees_with_batch() {
        let limits = Limits::default();
        let suites = [
            "cprime=0.25",
            "cprime=0.1666,noproperpower",
            "coverage,noprimitive",
            "goodness:mu=0.3:L=2",
        ];
        for text in suites {
            let suite: SuiteConfig = text.parse().unwrap();
            for n in [6usize, 9, 12] {
                for d in [0.1, 0.3] {
                    for seed in 0..15 {
                        let params = DensityParams::new(f2(), n, d, seed).unwrap();
                        let p = sample_presentation(&params, &limits).unwrap();
                        let batch = run_suite(&p, &suite, &limits).unwrap().all_pass();
                        let m = params.relator_count().unwrap();
                        let stream = passes_streaming(f2(), n, m, seed, &suite, &limits).unwrap();
                        assert_eq!(batch, stream, "{text} n={n} d={d} seed={seed}");
                    }
                }
            }
        }
    }

    #[test]
    fn sweep_trivial_suites() {
        let limits = Limits::default();
        let always = density_sweep(f2(), 100, &[0.1, 0.5, 0.9], 20, &SuiteConfig::default(), 7, &limits).unwrap();
        assert!(always.iter().all(|r| r.pass_fraction == 1.0));
        // a window of one letter cannot involve both generators
        let never: SuiteConfig = "coverage".parse().unwrap();
        let rows = density_sweep(f2(), 6, &[0.1, 0.5], 20, &never, 7, &limits).unwrap();
        assert!(rows.iter().all(|r| r.pass_fraction == 0.0));
    }

    #[test]
    fn sweep_is_monotone_in_density() {
        let suite: SuiteConfig = "cprime=0.5".parse().unwrap();
        let grid = [0.05, 0.15, 0.25, 0.35, 0.45];
        let rows = density_sweep(f2(), 16, &grid, 60, &suite, 3, &Limits::default()).unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].passes <= pair[0].passes);
        }
        assert!(rows[0].pass_fraction > rows[4].pass_fraction);
    }

    #[test]
    fn pipeline_examples() {
        assert_eq!(thm_ml_k0(2, 0.2, 0.9).unwrap(), 32);
        let half: BTreeMap<usize, f64> = (2..40).map(|k| (k, 0.5)).collect();
        let r = thm_ml_pipeline(2, 0.2, 0.9, &half).unwrap();
        assert_eq!(r.k0, 32);
        assert!((r.d0 - 0.1).abs() < 1e-12);
        assert!(thm_ml_pipeline(2, 0.2, 0.9, &BTreeMap::new()).is_err());
        assert!(thm_ml_k0(2, 0.2, 0.6).is_err());
        assert!(thm_ml_k0(2, 0.2, 1.0).is_err());
        let mut prev = usize::MAX;
        for nu in [0.7, 0.8, 0.9, 0.95, 0.99, 0.999] {
            let k = thm_ml_k0(2, 0.2, nu).unwrap();
            assert!(k <= prev);
            assert!(bound_lemma_ml(k, 0.2, 2) <= nu);
            if k > 3 {
                assert!(bound_lemma_ml(k - 1, 0.2, 2) > nu);
            }
            prev = k;
        }
    }

    #[test]
    fn marginals_are_uniform() {
        // coordinates of sampled tuples at n = 3, k = 2 over 28 classes
        let alphabet = f2();
        let mut counts = std::collections::HashMap::new();
        let mut total = 0u64;
        for seed in 0..2000 {
            let params = DensityParams::new(alphabet, 3, 0.9, seed).unwrap();
            for r in sample_presentation(&params, &Limits::default()).unwrap().relators() {
                *counts.entry(r.letters().to_vec()).or_insert(0u64) += 1;
                total += 1;
            }
        }
        let classes = 28u64;
        assert_eq!(count_cyclic(3, 2), classes.into());
        assert_eq!(counts.len() as u64, classes);
        let expected = total as f64 / classes as f64;
        let chi2: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 27 degrees of freedom, 0.999 quantile about 55.5
        assert!(chi2 < 55.5, "chi2 = {chi2}");
    }
}
