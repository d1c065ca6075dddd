//! `ggl`: command-line front end for counting, readability, small
//! cancellation, entropy, density and modular-group experiments.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ggl_core::cancellation::{is_c_prime, Presentation};
use ggl_core::density::{density_sweep, run_suite, thm_ml_pipeline, SuiteConfig};
use ggl_core::entropy::{entropy_profile, CountMode, PredicateHandle};
use ggl_core::modular::{
    count_cyclic_modular, i_upper_bound, j_lower_bound, k_formula, tuple_orbits, OrbitMode,
};
use ggl_core::readability::{is_good, is_mu_l_readable, is_mu_readable, Mode, ReadabilityParams};
use ggl_core::words::{count_cyclic, enumerate_cyclic, sample_cyclic_with};
use ggl_core::{Alphabet, Error, Limits};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Parser, Debug)]
#[command(name = "ggl", version, about = "Random presentations, readability and genericity experiments")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output format; `text` prints bare values and CSV tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of cyclically reduced words of length n.
    Count {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Tabulate lengths n..=to.
        #[arg(long)]
        to: Option<usize>,
    },
    /// List every cyclically reduced word of length n.
    Enumerate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Draw uniform cyclically reduced words.
    Sample {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Decide μ- or (μ,L)-readability of a word.
    Readable {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        word: String,
        #[arg(long)]
        mu: f64,
        #[arg(long = "L")]
        l: Option<usize>,
        #[arg(long, value_enum, default_value_t = ModeArg::Quotient)]
        mode: ModeArg,
    },
    /// Decide (μ,L)-goodness of a cyclic word.
    Good {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        word: String,
        #[arg(long)]
        mu: f64,
        #[arg(long = "L")]
        l: usize,
    },
    /// Small-cancellation and hypothesis checks on a presentation.
    Check {
        #[arg(long)]
        k: usize,
        /// Comma-separated relators.
        #[arg(long)]
        relators: String,
        #[arg(long, default_value_t = 1.0 / 6.0)]
        lambda: f64,
        /// Additional checks, e.g. `goodness:mu=0.2:L=2,coverage`.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Finite-length entropy profile of a predicate's complement.
    Entropy(EntropyArgs),
    /// Density-model sweeps, or the k0/d0 pipeline when --nu is given.
    Density(DensityArgs),
    /// Modular-group counts, orbits and bounds.
    Modular {
        #[command(subcommand)]
        command: ModularCommand,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Quotient,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::ExactEnumeration,
            ModeArg::Quotient => Mode::QuotientSearch,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PredicateArg {
    True,
    False,
    AHead,
    NonMuReadable,
    NonMulReadable,
    Good,
    #[value(name = "c-prime-complement", alias = "c-prime")]
    CPrime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CountModeArg {
    Exact,
    Mc,
}

#[derive(Args, Debug)]
struct EntropyArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum)]
    predicate: PredicateArg,
    #[arg(long)]
    n_min: usize,
    #[arg(long)]
    n_max: usize,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_enum, default_value_t = CountModeArg::Exact)]
    mode: CountModeArg,
    /// Monte Carlo samples per length.
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[arg(long, required_unless_present = "nu")]
    k: Option<usize>,
    #[arg(long, required_unless_present = "nu")]
    n: Option<usize>,
    #[arg(long, conflicts_with = "d_grid")]
    d: Option<f64>,
    /// Comma-separated densities.
    #[arg(long, value_delimiter = ',')]
    d_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value = "")]
    suite: String,
    /// Run the k0/d0 pipeline with this ν instead of a sweep.
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long = "L", requires = "nu")]
    l: Option<usize>,
    #[arg(long, requires = "nu")]
    mu: Option<f64>,
    /// Densities d(k) for small ranks, e.g. `2=0.4,3=0.3`.
    #[arg(long, requires = "nu")]
    d_small: Option<String>,
}

#[derive(Subcommand, Debug)]
enum ModularCommand {
    /// Cyclically reduced modular words of length n.
    Count {
        #[arg(long)]
        n: usize,
    },
    /// Orbits of m-tuples of words of length 2t.
    Orbits {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, value_enum, default_value_t = OrbitModeArg::Canonical)]
        mode: OrbitModeArg,
    },
    /// Closed-form bounds: J with --epsilon --t, I with --k --n.
    Bounds {
        #[arg(long, requires = "t")]
        epsilon: Option<f64>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, requires = "n")]
        k: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OrbitModeArg {
    Canonical,
    Burnside,
}

enum Failure {
    Usage(String),
    Capability(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } | Error::Capability(_) | Error::Disconnected => {
                Failure::Capability(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(io::Error::other(e))
    }
}

type Outcome = Result<(), Failure>;

fn usage(flag: &str, reason: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("{flag}: {reason}"))
}

fn alphabet(k: usize) -> Result<Alphabet, Failure> {
    Alphabet::new(k).map_err(|e| usage("--k", e))
}

struct Sink {
    format: Format,
    out: Box<dyn Write>,
}

impl Sink {
    fn scalar(&mut self, text: &str, value: serde_json::Value) -> Outcome {
        match self.format {
            Format::Json => writeln!(self.out, "{}", serde_json::to_string_pretty(&value).expect("json"))?,
            _ => writeln!(self.out, "{text}")?,
        }
        Ok(())
    }

    fn json(&mut self, value: serde_json::Value) -> Outcome {
        writeln!(self.out, "{}", serde_json::to_string_pretty(&value).expect("json"))?;
        Ok(())
    }

    fn table(&mut self, header: &[&str], rows: Vec<Vec<String>>) -> Outcome {
        if self.format == Format::Json {
            let objects: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    header
                        .iter()
                        .zip(row)
                        .map(|(h, v)| (h.to_string(), json_cell(v)))
                        .collect::<serde_json::Map<_, _>>()
                        .into()
                })
                .collect();
            return self.json(objects.into());
        }
        let mut w = csv::Writer::from_writer(&mut self.out);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn json_cell(v: &str) -> serde_json::Value {
    if v.is_empty() {
        return serde_json::Value::Null;
    }
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() && v.len() < 16 => json!(x),
        _ => json!(v),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let out: Box<dyn Write> = match &cli.output {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: --output {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut sink = Sink { format: cli.format, out };
    let limits = Limits::from_env();
    let result = dispatch(&cli, &mut sink, &limits).and_then(|()| sink.out.flush().map_err(Failure::Io));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Capability(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: &Cli, sink: &mut Sink, limits: &Limits) -> Outcome {
    match &cli.command {
        Command::Count { k, n, to } => {
            alphabet(*k)?;
            match to {
                None => {
                    let c = count_cyclic(*n, *k);
                    sink.scalar(&c.to_string(), json!({"k": k, "n": n, "count": c.to_string()}))
                }
                Some(to) => {
                    if to < n {
                        return Err(usage("--to", "must be at least --n"));
                    }
                    let rows = (*n..=*to)
                        .map(|m| vec![m.to_string(), count_cyclic(m, *k).to_string()])
                        .collect();
                    sink.table(&["n", "count"], rows)
                }
            }
        }
        Command::Enumerate { k, n } => {
            let a = alphabet(*k)?;
            let total = count_cyclic(*n, *k);
            if total > limits.enumeration_cap.into() {
                return Err(Error::CapExceeded {
                    what: "word enumeration",
                    requested: total.to_string(),
                    cap: limits.enumeration_cap,
                }
                .into());
            }
            let words = enumerate_cyclic(*n, a).map(|w| w.to_string());
            word_list(sink, words.collect())
        }
        Command::Sample { k, n, count } => {
            let a = alphabet(*k)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let words = (0..*count)
                .map(|_| sample_cyclic_with(*n, a, &mut rng).to_string())
                .collect();
            word_list(sink, words)
        }
        Command::Readable { k, word, mu, l, mode } => {
            let a = alphabet(*k)?;
            let w = a.parse(word).map_err(|e| usage("--word", e))?;
            let verdict = match l {
                None => {
                    let p = ReadabilityParams::mu(a, *mu).map_err(|e| usage("--mu", e))?;
                    is_mu_readable(&w, &p, (*mode).into())?
                }
                Some(l) => {
                    let p = ReadabilityParams::mu_l(a, *mu, *l).map_err(|e| usage("--mu/--L", e))?;
                    is_mu_l_readable(&w, &p, (*mode).into())?
                }
            };
            sink.scalar(&verdict.readable.to_string(), verdict.to_json())
        }
        Command::Good { k, word, mu, l } => {
            let a = alphabet(*k)?;
            let w = a.parse_cyclic(word).map_err(|e| usage("--word", e))?;
            let p = ReadabilityParams::mu_l(a, *mu, *l).map_err(|e| usage("--mu/--L", e))?;
            let good = is_good(&w, &p)?;
            sink.scalar(&good.to_string(), json!({"word": w.to_string(), "mu": mu, "L": l, "good": good}))
        }
        Command::Check { k, relators, lambda, suite } => {
            let a = alphabet(*k)?;
            let rels: Vec<&str> = relators.split(',').map(str::trim).filter(|r| !r.is_empty()).collect();
            let p = Presentation::parse(a, rels).map_err(|e| usage("--relators", e))?;
            let pieces = is_c_prime(&p, *lambda).map_err(|e| usage("--lambda", e))?;
            let suite: SuiteConfig = suite
                .as_deref()
                .unwrap_or("")
                .parse()
                .map_err(|e| usage("--suite", e))?;
            let report = run_suite(&p, &suite, limits)?;
            let value = json!({
                "relators": p.relators().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                "c_prime": pieces,
                "suite": report,
                "all_pass": pieces.satisfied && report.all_pass(),
            });
            if sink.format == Format::Csv {
                let rows = p
                    .relators()
                    .iter()
                    .zip(&pieces.relator_ratios)
                    .map(|(r, ratio)| vec![r.to_string(), format!("{ratio}"), (*ratio < *lambda).to_string()])
                    .collect();
                sink.table(&["relator", "piece_ratio", "below_lambda"], rows)
            } else {
                sink.json(value)
            }
        }
        Command::Entropy(args) => entropy(cli, sink, limits, args),
        Command::Density(args) => density(cli, sink, limits, args),
        Command::Modular { command } => modular(sink, limits, command),
    }
}

fn word_list(sink: &mut Sink, words: Vec<String>) -> Outcome {
    match sink.format {
        Format::Json => sink.json(json!(words)),
        Format::Csv => sink.table(&["word"], words.into_iter().map(|w| vec![w]).collect()),
        Format::Text => {
            for w in words {
                writeln!(sink.out, "{w}")?;
            }
            Ok(())
        }
    }
}

fn entropy(cli: &Cli, sink: &mut Sink, limits: &Limits, args: &EntropyArgs) -> Outcome {
    let a = alphabet(args.k)?;
    if args.n_min == 0 || args.n_min > args.n_max {
        return Err(usage("--n-min/--n-max", "need 1 <= n-min <= n-max"));
    }
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| usage(flag, "required by this predicate"));
    let need_l = || args.l.ok_or_else(|| usage("--L", "required by this predicate"));
    let pred = match args.predicate {
        PredicateArg::True => PredicateHandle::always_true(a),
        PredicateArg::False => PredicateHandle::always_false(a),
        PredicateArg::AHead => PredicateHandle::a_head(a),
        PredicateArg::NonMuReadable => {
            PredicateHandle::non_mu_readable(a, need(args.mu, "--mu")?).map_err(|e| usage("--mu", e))?
        }
        PredicateArg::NonMulReadable => PredicateHandle::non_mu_l_readable(a, need(args.mu, "--mu")?, need_l()?)
            .map_err(|e| usage("--mu/--L", e))?,
        PredicateArg::Good => {
            PredicateHandle::good(a, need(args.mu, "--mu")?, need_l()?).map_err(|e| usage("--mu/--L", e))?
        }
        PredicateArg::CPrime => {
            PredicateHandle::c_prime(a, need(args.lambda, "--lambda")?).map_err(|e| usage("--lambda", e))?
        }
    };
    let mode = match args.mode {
        CountModeArg::Mc if args.samples == 0 => return Err(usage("--samples", "must be positive")),
        CountModeArg::Mc => CountMode::MonteCarlo {
            samples: args.samples,
            seed: cli.seed,
        },
        CountModeArg::Exact => CountMode::Exact,
    };
    let profile = entropy_profile(&pred, args.n_min..=args.n_max, mode, limits)?;
    let rows = profile
        .samples
        .iter()
        .map(|s| {
            vec![
                s.n.to_string(),
                s.gamma_bar_exact
                    .as_ref()
                    .map_or_else(|| format!("{}", s.gamma_bar), |g| g.to_string()),
                s.t_hat.map_or_else(String::new, |t| format!("{t}")),
                format!("{}", s.ci.0),
                format!("{}", s.ci.1),
            ]
        })
        .collect();
    sink.table(&["n", "gamma_bar", "t_hat", "ci_lo", "ci_hi"], rows)
}

fn density(cli: &Cli, sink: &mut Sink, limits: &Limits, args: &DensityArgs) -> Outcome {
    if let Some(nu) = args.nu {
        let l = args.l.ok_or_else(|| usage("--L", "required with --nu"))?;
        let mu = args.mu.ok_or_else(|| usage("--mu", "required with --nu"))?;
        let d_small = parse_d_small(args.d_small.as_deref().unwrap_or(""))?;
        let k0 = ggl_core::density::thm_ml_k0(l, mu, nu).map_err(|e| usage("--nu", e))?;
        let value = if (2..k0).all(|k| d_small.contains_key(&k)) {
            let r = thm_ml_pipeline(l, mu, nu, &d_small).map_err(|e| usage("--d-small", e))?;
            json!({"k0": r.k0, "d0": r.d0, "lambda": r.lambda})
        } else {
            json!({"k0": k0, "d0": null, "missing_d_small": (2..k0).filter(|k| !d_small.contains_key(k)).collect::<Vec<_>>()})
        };
        return sink.json(value);
    }
    let k = args.k.ok_or_else(|| usage("--k", "required"))?;
    let n = args.n.ok_or_else(|| usage("--n", "required"))?;
    let a = alphabet(k)?;
    let grid = match (&args.d, &args.d_grid) {
        (Some(d), None) => vec![*d],
        (None, Some(g)) if !g.is_empty() => g.clone(),
        _ => return Err(usage("--d/--d-grid", "give one density or a grid")),
    };
    if let Some(bad) = grid.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
        return Err(usage("--d", format!("density {bad} outside (0,1)")));
    }
    if args.trials == 0 {
        return Err(usage("--trials", "must be positive"));
    }
    let suite: SuiteConfig = args.suite.parse().map_err(|e| usage("--suite", e))?;
    let mut rows = Vec::new();
    for d in &grid {
        eprintln!("density d={d}: {} trials", args.trials);
        let row = density_sweep(a, n, &[*d], args.trials, &suite, cli.seed, limits)?.remove(0);
        rows.push(vec![
            format!("{}", row.d),
            format!("{}", row.pass_fraction),
            format!("{}", row.ci_lo),
            format!("{}", row.ci_hi),
            row.trials.to_string(),
        ]);
    }
    sink.table(&["d", "pass_fraction", "ci_lo", "ci_hi", "trials"], rows)
}

fn parse_d_small(text: &str) -> Result<BTreeMap<usize, f64>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (k, d) = item
                .split_once('=')
                .ok_or_else(|| usage("--d-small", format!("expected k=d, got {item:?}")))?;
            let k = k.trim().parse().map_err(|_| usage("--d-small", format!("bad rank in {item:?}")))?;
            let d = d.trim().parse().map_err(|_| usage("--d-small", format!("bad density in {item:?}")))?;
            Ok((k, d))
        })
        .collect()
}

fn modular(sink: &mut Sink, limits: &Limits, command: &ModularCommand) -> Outcome {
    match command {
        ModularCommand::Count { n } => {
            let c = count_cyclic_modular(*n);
            sink.scalar(&c.to_string(), json!({"n": n, "count": c.to_string()}))
        }
        ModularCommand::Orbits { m, t, mode } => {
            let mode = match mode {
                OrbitModeArg::Canonical => OrbitMode::Canonical,
                OrbitModeArg::Burnside => OrbitMode::Burnside,
            };
            let count = tuple_orbits(*m, *t, mode, limits)?;
            let formula = k_formula(*m, *t);
            sink.scalar(
                &count.to_string(),
                json!({"m": m, "t": t, "mode": mode, "orbits": count.to_string(), "k_formula": formula.value}),
            )
        }
        ModularCommand::Bounds { epsilon, t, k, n } => {
            let mut rows = Vec::new();
            if let (Some(eps), Some(t)) = (epsilon, t) {
                let j = j_lower_bound(*eps, *t).map_err(|e| usage("--epsilon", e))?;
                rows.push(vec![
                    "log2_J_lower".to_string(),
                    format!("{}", j.log2_dominant),
                    j.valid.to_string(),
                    j.constant.to_string(),
                ]);
            }
            if let (Some(k), Some(n)) = (k, n) {
                alphabet(*k)?;
                rows.push(vec![
                    "log2log2_I_upper".to_string(),
                    format!("{}", i_upper_bound(*k, *n)),
                    "true".to_string(),
                    String::new(),
                ]);
            }
            if rows.is_empty() {
                return Err(usage("--epsilon/--t or --k/--n", "give at least one bound's parameters"));
            }
            sink.table(&["bound", "value", "valid", "additive_constant"], rows)
        }
    }
}

