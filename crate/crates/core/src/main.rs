use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

use equibench::config::{parse_config, DEFAULT_CONFIG};
use equibench::measures::{self, apply_override, parse_measure_list};
use equibench::noise::{
    noisy_relation, standard_normal, NoiseTarget, DEFAULT_SSNR_MAX_STEPS, DEFAULT_SSNR_TOLERANCE,
};
use equibench::relations::{list_relations, sample_x, Relation};
use equibench::report::{self, RunManifest};
use equibench::seed::SeedKey;
use equibench::suite::{equitability_spread, run_equitability, run_power_equitability};
use equibench::Error;

const EXIT_BAD_ID: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_PARSE: u8 = 4;
const EXIT_PARTIAL: u8 = 5;

#[derive(Parser)]
#[command(
    name = "equibench",
    version,
    about = "Dependence measures and equitability benchmarks"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "EQUIBENCH_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the relation catalog.
    Relations {
        #[arg(long)]
        json: bool,
    },
    /// Generate a noisy dataset from one relation.
    #[command(group(ArgGroup::new("noise").required(true).args(["msnr", "ssnr"])))]
    Gen {
        #[arg(long)]
        relation: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        msnr: Option<f64>,
        #[arg(long)]
        ssnr: Option<f64>,
        /// SSNR heuristic tolerance.
        #[arg(long, default_value_t = DEFAULT_SSNR_TOLERANCE)]
        tolerance: f64,
        /// SSNR heuristic step limit.
        #[arg(long, default_value_t = DEFAULT_SSNR_MAX_STEPS)]
        max_steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path (standard output when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a CSV with `x` and `y` columns.
    Score {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated measure ids.
        #[arg(long, default_value = "pcor,scor,kcor,dcor,hsic,mi,mic,rdc,ace,hhg")]
        measures: String,
        /// Parameter override such as `mi.k=8`; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score-equitability experiment.
    Equitability {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Power-equitability experiment.
    Power {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a commented configuration template.
    PrintDefaultConfig,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnknownId(_) | Error::Unimplemented(_) => EXIT_BAD_ID,
            Error::Io(_) => EXIT_IO,
            Error::Parse { .. } | Error::InvalidArgument(_) | Error::OutOfRange { .. } => {
                EXIT_PARSE
            }
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<u8, Failure>;

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> std::result::Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| io_failure(p, e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| io_failure(Path::new("<stdout>"), e)),
    }
}

fn read_config(path: &Path) -> std::result::Result<equibench::suite::ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    parse_config(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn cmd_relations(json: bool) -> CmdResult {
    let rels = list_relations();
    let text = if json {
        let items: Vec<serde_json::Value> = rels
            .iter()
            .map(|r| {
                serde_json::json!({
                    "id": r.id(),
                    "name": r.display_name(),
                    "formula": r.formula(),
                })
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&items).expect("json");
        s.push('\n');
        s
    } else {
        rels.iter()
            .map(|r| format!("{:<26}{:<34}{}\n", r.id(), r.display_name(), r.formula()))
            .collect()
    };
    emit(None, text.as_bytes())?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    relation: &str,
    n: usize,
    msnr: Option<f64>,
    ssnr: Option<f64>,
    tolerance: f64,
    max_steps: usize,
    seed: u64,
    out: Option<&Path>,
) -> CmdResult {
    let relation: Relation = relation.parse()?;
    let target = match (msnr, ssnr) {
        (Some(r), None) => NoiseTarget::msnr(r),
        (None, Some(r)) => NoiseTarget::Ssnr {
            ratio: r,
            tolerance,
            max_steps,
        },
        _ => unreachable!("clap enforces exactly one noise target"),
    };
    let x = sample_x(n, SeedKey::new(seed).str("x").finish())?;
    let z = standard_normal(n, SeedKey::new(seed).str("z").finish());
    let noisy = noisy_relation(
        relation,
        &x,
        &z,
        &target,
        SeedKey::new(seed).str("ssnr").finish(),
    )?;
    let bytes = report::dataset_csv(&x, &noisy.y, relation, &target, noisy.achieved_ratio, seed)?;
    emit(out, &bytes)?;
    Ok(0)
}

fn read_xy(path: &Path) -> std::result::Result<(Vec<f64>, Vec<f64>), Failure> {
    let parse = |line: Option<u64>, message: String| Failure {
        code: EXIT_PARSE,
        message: match line {
            Some(l) => format!("{}: line {l}: {message}", path.display()),
            None => format!("{}: {message}", path.display()),
        },
    };
    let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => io_failure(path, &e),
        _ => parse(e.position().map(|p| p.line()), e.to_string()),
    })?;
    let headers = rdr
        .headers()
        .map_err(|e| parse(Some(1), e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| parse(Some(1), format!("missing `{name}` column")))
    };
    let (xi, yi) = (col("x")?, col("y")?);
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => io_failure(path, &e),
            _ => parse(e.position().map(|p| p.line()), e.to_string()),
        })?;
        let line = rec.position().map(|p| p.line());
        let field = |i: usize, name: &str| -> std::result::Result<f64, Failure> {
            let raw = rec.get(i).unwrap_or("");
            raw.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse(line, format!("bad `{name}` value `{raw}`")))
        };
        x.push(field(xi, "x")?);
        y.push(field(yi, "y")?);
    }
    Ok((x, y))
}

fn cmd_score(input: &Path, list: &str, params: &[String], out: Option<&Path>) -> CmdResult {
    let mut selected = parse_measure_list(list)?;
    for p in params {
        apply_override(&mut selected, p)?;
    }
    let (x, y) = read_xy(input)?;
    let mut scores = Vec::with_capacity(selected.len());
    for m in &selected {
        scores.push(measures::score(m, &x, &y)?);
    }
    emit(out, &report::measure_scores_csv(&scores)?)?;
    Ok(0)
}

fn write_run(out: &Path, files: &[(&str, Vec<u8>)], mut manifest: RunManifest) -> CmdResult {
    for (name, bytes) in files {
        manifest.add_output(name, bytes);
    }
    manifest.finished_at = report::unix_now();
    let partial = !manifest.failures.is_empty();
    let json = manifest.to_json()?;
    let mut all: Vec<(&str, &[u8])> = files.iter().map(|(n, b)| (*n, b.as_slice())).collect();
    all.push(("manifest.json", &json));
    report::write_outputs(out, &all).map_err(|e| io_failure(out, e))?;
    if partial {
        eprintln!(
            "{} cell(s) failed; see manifest.json",
            manifest.failures.len()
        );
        Ok(EXIT_PARTIAL)
    } else {
        Ok(0)
    }
}

fn cmd_equitability(config: &Path, out: &Path) -> CmdResult {
    let cfg = read_config(config)?;
    let mut manifest = RunManifest::new("equitability", &cfg, report::unix_now())?;
    let run = run_equitability(&cfg)?;
    let spread = equitability_spread(&run.scores, cfg.subset.as_deref());
    manifest.failures = run.failures;
    let files = [
        ("scores.csv", report::scores_csv(&run.scores)?),
        ("snr.csv", report::snr_csv(&run.snr)?),
        ("spread.csv", report::spread_csv(&spread)?),
    ];
    write_run(out, &files, manifest)
}

fn cmd_power(config: &Path, out: &Path) -> CmdResult {
    let cfg = read_config(config)?;
    let mut manifest = RunManifest::new("power", &cfg, report::unix_now())?;
    let run = run_power_equitability(&cfg)?;
    manifest.failures = run.failures;
    let files = [("power.csv", report::power_csv(&run.estimates)?)];
    write_run(out, &files, manifest)
}

fn run(cli: Cli) -> CmdResult {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure {
                code: 1,
                message: e.to_string(),
            })?;
    }
    match cli.command {
        Command::Relations { json } => cmd_relations(json),
        Command::Gen {
            relation,
            n,
            msnr,
            ssnr,
            tolerance,
            max_steps,
            seed,
            out,
        } => cmd_gen(
            &relation,
            n,
            msnr,
            ssnr,
            tolerance,
            max_steps,
            seed,
            out.as_deref(),
        ),
        Command::Score {
            input,
            measures,
            params,
            out,
        } => cmd_score(&input, &measures, &params, out.as_deref()),
        Command::Equitability { config, out } => cmd_equitability(&config, &out),
        Command::Power { config, out } => cmd_power(&config, &out),
        Command::PrintDefaultConfig => {
            emit(None, DEFAULT_CONFIG.as_bytes())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
