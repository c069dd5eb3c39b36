//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use signed_iwasawa_core::chern::{
    local_length_vertical, pushforward_c2, fudge_c2, theorem_ledger, CohomologicalInputs, FrobeniusTable, LeftSide,
    PrimeDescriptor,
};
use signed_iwasawa_core::coprimality::{coprime_certificate, coprime_certificate_series, conjecture_b_report, ExternalFacts};
use signed_iwasawa_core::iwasawa::{newton_invariants, pi_cyc, Sign};

use crate::config::{FieldSpec, RunConfig};
use crate::error::{input, Result, WorkbenchError};
use crate::formats::{
    builtin_examples, read_json_arg, resolve_curve, write_atomic, Element2File, ExamplesFile, FrobeniusFile, PrimeFile,
    SeriesFile, SigmaFile, SCHEMA_VERSION,
};
use crate::pipeline::{theta_pair, SeriesSummary, SymbolStore};
use crate::table::run_table;

#[derive(Debug, Parser)]
#[command(name = "workbench", version, about = "Signed Iwasawa invariants of supersingular elliptic curves")]
pub struct Cli {
    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    #[arg(long, global = true, default_value_t = 3)]
    pub p: u64,
    #[arg(long, global = true, default_value_t = 8)]
    pub n_max: u32,
    /// p-adic precision N.
    #[arg(long, global = true, default_value_t = 20)]
    pub precision: i64,
    /// Truncation degree D; defaults to the full interpolation modulus degree.
    #[arg(long, global = true)]
    pub trunc_degree: Option<usize>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Require p to split in the imaginary quadratic field.
    #[arg(long, global = true)]
    pub strict_paper_hypotheses: bool,
}

impl ConfigArgs {
    /// Validation is left to the subcommands that build signed series.
    pub fn to_config(&self) -> Result<RunConfig> {
        let trunc_degree = self.trunc_degree.unwrap_or_else(|| crate::config::modulus_degree(self.p, self.n_max));
        let cfg = RunConfig {
            p: self.p,
            n_max: self.n_max,
            precision: self.precision,
            trunc_degree,
            cache_dir: None,
            jobs: self.jobs,
            strict_paper_hypotheses: self.strict_paper_hypotheses,
        }
        .with_cache_from_env();
        Ok(cfg)
    }
}

fn parse_sign(s: &str) -> std::result::Result<Sign, String> {
    match s {
        "+" | "plus" | "Plus" => Ok(Sign::Plus),
        "-" | "minus" | "Minus" => Ok(Sign::Minus),
        _ => Err(format!("sign must be + or -, got {s}")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigensymbol of a curve, from the cache when available.
    Symbols {
        /// Built-in label, curve file or inline JSON.
        #[arg(long)]
        curve: String,
        /// Must equal the conductor.
        #[arg(long)]
        level: Option<u64>,
        #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
        sign: Sign,
        /// Also report the normalization of the twist by this discriminant.
        #[arg(long, allow_negative_numbers = true)]
        twist: Option<i64>,
    },
    /// Signed series of a curve or of its quadratic twist.
    Theta {
        #[arg(long)]
        curve: String,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        twist: i64,
        /// Only this sign; both by default.
        #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
        sign: Option<Sign>,
        /// Include the representative and the level history.
        #[arg(long)]
        full: bool,
    },
    /// mu, lambda and slope profile of a series file.
    Invariants {
        #[arg(long)]
        series: String,
    },
    /// Reproduce the table of examples and diff it against the embedded fixture.
    Table {
        /// Examples file; the built-in six rows by default.
        #[arg(long)]
        examples: Option<String>,
        /// Restrict to rows named like `32a1/-43`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        rows: Vec<String>,
    },
    /// Coprimality certificate for two series files, or for the signed pair of a twist.
    Coprime {
        #[arg(long, requires = "g", conflicts_with_all = ["curve", "twist"])]
        f: Option<String>,
        #[arg(long, requires = "f")]
        g: Option<String>,
        #[arg(long, requires = "twist")]
        curve: Option<String>,
        #[arg(long, allow_negative_numbers = true, requires = "curve")]
        twist: Option<i64>,
        #[arg(long)]
        complex_multiplication: bool,
        #[arg(long)]
        galois_surjective: bool,
    },
    /// Local fudge-factor ledger at the places of Sigma.
    Fudge {
        #[arg(long)]
        curve: String,
        /// Discriminant of the imaginary quadratic field.
        #[arg(long, allow_negative_numbers = true)]
        field: i64,
        /// Comma-separated primes of Sigma.
        #[arg(long, value_delimiter = ',', conflicts_with = "sigma_file")]
        sigma: Vec<u64>,
        #[arg(long)]
        sigma_file: Option<String>,
        #[arg(long)]
        frobenius: Option<String>,
    },
    /// Local length at a vertical prime, or the pushforward to the cyclotomic line.
    C2 {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        prime: Option<String>,
    },
    /// Cyclotomic specialization of a two-variable element.
    Specialize {
        #[arg(long)]
        element: String,
    },
}

/// Parses `args` and runs; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(cli: &Cli, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_vec_pretty(value).map_err(|e| WorkbenchError::Compute(e.to_string()))?;
    text.push(b'\n');
    match &cli.output {
        Some(path) => write_atomic(path, &text)
            .map_err(|e| WorkbenchError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&text).and_then(|_| out.flush()).map_err(|e| WorkbenchError::Compute(e.to_string()))
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    let cfg = cli.config.to_config()?;
    if cfg.jobs > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| WorkbenchError::Compute(e.to_string()))?;
        pool.install(|| dispatch(cli, &cfg))
    } else {
        dispatch(cli, &cfg)
    }
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<i32> {
    let store = SymbolStore::from_config(cfg);
    match &cli.command {
        Command::Symbols { curve, level, sign, twist } => {
            let curve = resolve_curve(curve)?;
            if let Some(l) = level {
                if *l != curve.conductor {
                    return input(format!("level {l} differs from the conductor {} of {}", curve.conductor, curve.label));
                }
            }
            let (symbol, _) = store.get(&curve, *sign)?;
            let twist = match twist {
                Some(d) => {
                    let t = store.twisted(&curve, *d)?;
                    Some(json!({ "discriminant": d, "sign": t.sign, "content": t.content().to_string() }))
                }
                None => None,
            };
            emit(cli, &json!({ "schema_version": SCHEMA_VERSION, "kind": "eigensymbol", "symbol": symbol, "twist": twist }))?;
        }
        Command::Theta { curve, twist, sign, full } => {
            cfg.validate()?;
            let curve = resolve_curve(curve)?;
            if *twist < 0 {
                FieldSpec::new(*twist, cfg.p, cfg.strict_paper_hypotheses)?;
            }
            let (plus, minus) = theta_pair(&store, &curve, *twist, cfg)?;
            let series: Vec<SeriesSummary> = [(Sign::Plus, &plus), (Sign::Minus, &minus)]
                .into_iter()
                .filter(|(s, _)| sign.map_or(true, |want| want == *s))
                .map(|(_, t)| SeriesSummary::new(t, *full))
                .collect();
            emit(cli, &json!({ "schema_version": SCHEMA_VERSION, "kind": "theta", "config": cfg, "series": series }))?;
        }
        Command::Invariants { series } => {
            let f = read_json_arg::<SeriesFile>(series)?.to_element()?;
            let profile = newton_invariants(&f)?;
            emit(cli, &json!({ "schema_version": SCHEMA_VERSION, "kind": "invariants", "profile": profile }))?;
        }
        Command::Table { examples, rows } => {
            let ex = match examples {
                Some(path) => read_json_arg::<ExamplesFile>(path)?,
                None => builtin_examples(),
            };
            ex.validate()?;
            cfg.validate()?;
            let report = run_table(&ex, rows, cfg, &store);
            emit(cli, &report)?;
            if !report.comparison.matches {
                eprintln!("table does not match the expected invariants");
                return Ok(1);
            }
        }
        Command::Coprime { f, g, curve, twist, complex_multiplication, galois_surjective } => match (f, g, curve, twist) {
            (Some(f), Some(g), _, _) => {
                let f = read_json_arg::<SeriesFile>(f)?.to_element()?;
                let g = read_json_arg::<SeriesFile>(g)?.to_element()?;
                let cert = coprime_certificate(&f, &g)?;
                emit(cli, &json!({ "schema_version": SCHEMA_VERSION, "kind": "coprimality", "certificate": cert }))?;
            }
            (_, _, Some(curve), Some(d)) => {
                cfg.validate()?;
                let curve = resolve_curve(curve)?;
                FieldSpec::new(*d, cfg.p, cfg.strict_paper_hypotheses)?;
                let (ek, e) = rayon::join(|| theta_pair(&store, &curve, *d, cfg), || theta_pair(&store, &curve, 1, cfg));
                let (ek, e) = (ek?, e?);
                let cert = coprime_certificate_series(&ek.0.series, &ek.1.series);
                let facts =
                    ExternalFacts { complex_multiplication: *complex_multiplication, galois_surjective: *galois_surjective };
                let report = conjecture_b_report((&e.0.series, &e.1.series), (&ek.0.series, &ek.1.series), facts)?;
                emit(
                    cli,
                    &json!({ "schema_version": SCHEMA_VERSION, "kind": "coprimality", "certificate": cert, "conjecture_b": report }),
                )?;
            }
            _ => return input("give either --f and --g, or --curve and --twist"),
        },
        Command::Fudge { curve, field, sigma, sigma_file, frobenius } => {
            let curve = resolve_curve(curve)?;
            FieldSpec::new(*field, cfg.p, cfg.strict_paper_hypotheses)?;
            let sigma = match sigma_file {
                Some(path) => read_json_arg::<SigmaFile>(path)?.primes,
                None => sigma.clone(),
            };
            let table = match frobenius {
                Some(path) => read_json_arg::<FrobeniusFile>(path)?.to_table()?,
                None => FrobeniusTable::new(),
            };
            let ledger = fudge_c2(&curve, *field, cfg.p, &sigma, &table)?;
            let theorem = theorem_ledger(None, &CohomologicalInputs::default(), Some(&ledger));
            emit(cli, &json!({ "schema_version": SCHEMA_VERSION, "kind": "fudge", "ledger": ledger, "theorem_ledger": theorem }))?;
        }
        Command::C2 { f, g, prime } => {
            let f = read_json_arg::<Element2File>(f)?.to_element()?;
            let g = read_json_arg::<Element2File>(g)?.to_element()?;
            match prime {
                Some(path) => {
                    let pf = read_json_arg::<PrimeFile>(path)?;
                    let q = PrimeDescriptor::Vertical { p: pf.p, generator: pf.to_generator()? };
                    let length = local_length_vertical(&f, &g, &q)?;
                    emit(cli, &json!({ "schema_version": SCHEMA_VERSION, "kind": "local_length", "prime": q, "length": length }))?;
                }
                None => {
                    let push = pushforward_c2(&f, &g)?;
                    let theorem = theorem_ledger(Some(&LeftSide::Pushforward(push.clone())), &CohomologicalInputs::default(), None);
                    emit(
                        cli,
                        &json!({ "schema_version": SCHEMA_VERSION, "kind": "pushforward", "pushforward": push, "theorem_ledger": theorem }),
                    )?;
                }
            }
        }
        Command::Specialize { element } => {
            let f = read_json_arg::<Element2File>(element)?.to_element()?;
            let image = pi_cyc(&f);
            let profile = match newton_invariants(&image) {
                Ok(p) => Some(p),
                Err(signed_iwasawa_core::Error::PrecisionInsufficient(_)) => None,
                Err(e) => return Err(e.into()),
            };
            emit(
                cli,
                &json!({
                    "schema_version": SCHEMA_VERSION,
                    "kind": "specialization",
                    "image": SeriesFile::from_element(&image),
                    "profile": profile,
                }),
            )?;
        }
    }
    Ok(0)
}
