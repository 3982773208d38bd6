//! `ntlab` — run one experiment point from flags, or a cached sweep from a
//! config file.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ntlab::config::parse_config;
use ntlab::experiments::{self, RunContext};
use ntlab::record::{
    cache_key, code_version, csv_sibling, ExperimentRecord, ParamValue, Params, RecordStore,
};
use ntlab::sweep::run_sweep;
use ntlab::{LabError, EXIT_CONFIG, EXIT_INVARIANT, EXIT_OK};

#[derive(Parser, Debug)]
#[command(
    name = "ntlab",
    version,
    about = "Experiments on averages of power-residue prime counts",
    after_help = "COMMANDS:\n  \
        mean            average of P_(a,d)(x) over 2 <= a <= y with its S1 + S2 split\n  \
        smooth-mean     window-weighted average of P_(8a,2)(x) over odd squarefree a near Y\n  \
        jutila          mean square of real character sums (report-only)\n  \
        large-sieve     order-k character mean square over prime moduli (report-only)\n  \
        polya-verify    exhaustive partial-sum maxima vs 6*sqrt(p)*log p (exit 3 on violation)\n  \
        gauss-verify    Gauss-sum definition vs prime-power table (exit 3 on mismatch)\n  \
        poisson-verify  window sum vs its Gauss-sum dual (exit 3 above 1e-6)\n  \
        prime-char-sum  sums of chi(p) over p <= X (report-only)\n\n\
        Single point: ntlab mean --d 2 --x 1e4 --y 1e3\n\
        Sweep:        ntlab mean --config sweeps.cfg --out records.jsonl\n\
        Exit codes:   0 success, 2 config error, 3 invariant violation"
)]
struct Cli {
    /// Experiment name (see COMMANDS below).
    command: String,

    #[arg(long)]
    d: Option<u64>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    /// Alias for --y at the smoothed-window scale.
    #[arg(long = "Y")]
    big_y: Option<f64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    z: Option<f64>,
    #[arg(long = "U")]
    u: Option<f64>,
    /// all | nonsquare (mean command).
    #[arg(long = "a-mode")]
    a_mode: Option<String>,
    /// character | direct (mean command).
    #[arg(long)]
    mode: Option<String>,
    /// fundamental | all-nonsquare (jutila command).
    #[arg(long)]
    convention: Option<String>,
    /// Modulus range parameter Q (large-sieve).
    #[arg(long)]
    q: Option<u64>,
    /// Coefficient range parameter M (large-sieve) or |m| cap (gauss-verify).
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Frequency cutoff override (poisson-verify).
    #[arg(long = "m-cap")]
    m_cap: Option<u64>,
    /// Sweep configuration file; runs the [command] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Record store (JSONL); a CSV summary is written alongside.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra record file whose cache keys are honoured without rewriting it.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Epsilon in the reported (xy)^eps factors.
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("ntlab: --threads: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("ntlab: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<i32, LabError> {
    let Some(experiment) = experiments::find(&cli.command) else {
        let names: Vec<&str> = experiments::registry().iter().map(|e| e.name()).collect();
        return Err(LabError::Config {
            context: "command".into(),
            message: format!(
                "unknown command {:?}; expected one of {}",
                cli.command,
                names.join(", ")
            ),
        });
    };
    let ctx = RunContext { eps: cli.eps };

    if let Some(config_path) = &cli.config {
        let text =
            std::fs::read_to_string(config_path).map_err(|e| LabError::io(config_path, e))?;
        let sections: Vec<_> = parse_config(&text)?
            .into_iter()
            .filter(|s| s.command == experiment.name())
            .collect();
        if sections.is_empty() {
            return Err(LabError::Config {
                context: config_path.display().to_string(),
                message: format!("no [{}] section found", experiment.name()),
            });
        }
        let out_path = cli
            .out
            .unwrap_or_else(|| PathBuf::from("ntlab_records.jsonl"));
        let mut store = RecordStore::open(&out_path)?;
        if let Some(cache_path) = &cli.cache {
            store.absorb_keys(&RecordStore::open(cache_path)?);
        }
        let mut violation = false;
        for section in sections {
            let outcome = run_sweep(experiment, section.grid(), &mut store, &ctx)?;
            for rec in &outcome.new_records {
                if rec.error.is_none() && experiment.invariant_violated(rec) {
                    violation = true;
                }
                print_record(rec);
            }
            println!(
                "[{}] executed {} point(s), {} cached, {} failed -> {}",
                experiment.name(),
                outcome.executed,
                outcome.skipped_cached,
                outcome.failed,
                out_path.display()
            );
        }
        println!("summary: {}", csv_sibling(&out_path).display());
        return Ok(if violation { EXIT_INVARIANT } else { EXIT_OK });
    }

    // Single point assembled from the flags that were actually given.
    let params = flag_params(&cli);
    let record = experiment.run(&params, &ctx)?;
    print_record(&record);
    if let Some(out_path) = &cli.out {
        let mut store = RecordStore::open(out_path)?;
        if let Some(cache_path) = &cli.cache {
            store.absorb_keys(&RecordStore::open(cache_path)?);
        }
        if store.contains(&cache_key(experiment.name(), &params, code_version())) {
            println!("(already recorded; store unchanged)");
        } else {
            store.append(record.clone())?;
        }
        ntlab::record::write_csv(&csv_sibling(out_path), store.records())?;
    }
    if experiment.invariant_violated(&record) {
        eprintln!("ntlab: invariant violated (see values above)");
        return Ok(EXIT_INVARIANT);
    }
    Ok(EXIT_OK)
}

fn flag_params(cli: &Cli) -> Params {
    let mut p = Params::new();
    let mut num = |key: &str, v: Option<f64>| {
        if let Some(v) = v {
            p.insert(key.to_string(), ParamValue::Num(v));
        }
    };
    num("d", cli.d.map(|v| v as f64));
    num("x", cli.x);
    num("y", cli.big_y.or(cli.y));
    num("k", cli.k.map(|v| v as f64));
    num("z", cli.z);
    num("U", cli.u);
    num("q", cli.q.map(|v| v as f64));
    num("m", cli.m);
    num("seed", cli.seed.map(|v| v as f64));
    num("m_cap", cli.m_cap.map(|v| v as f64));
    for (key, v) in [
        ("a_mode", &cli.a_mode),
        ("mode", &cli.mode),
        ("convention", &cli.convention),
    ] {
        if let Some(v) = v {
            p.insert(key.to_string(), ParamValue::Text(v.clone()));
        }
    }
    p
}

fn print_record(rec: &ExperimentRecord) {
    let params: Vec<String> = rec
        .params
        .iter()
        .map(|(k, v)| match v {
            ParamValue::Num(x) => format!("{k}={x}"),
            ParamValue::Text(s) => format!("{k}={s}"),
        })
        .collect();
    println!("{} {}", rec.command, params.join(" "));
    if let Some(err) = &rec.error {
        println!("  error: {err}");
        return;
    }
    for (k, v) in &rec.values {
        println!("  {k} = {v}");
    }
    if let Some(e) = rec.envelope {
        println!("  envelope = {e}");
    }
    if let Some(r) = rec.ratio {
        println!("  ratio = {r}");
    }
}
