//! `mxpbf` command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use mxpbf::harness::{parse_methods, run_experiment_with, ExperimentConfig, ExperimentReport};
use mxpbf::io::{ext_real_value as ext, format_real, read_csv_file, to_json_string, CsvOptions};
use mxpbf::roc::{roc_from_samples, RocCurve};
use mxpbf::scenarios::{preset, ScenarioSpec};
use mxpbf::{decide_cov, decide_mean, mxpbf_cov, mxpbf_mean, CovTestConfig, Decision, MeanTestConfig};

#[derive(Parser)]
#[command(name = "mxpbf", version, about = "Maximum pairwise Bayes factor two-sample tests")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "MXPBF_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test equality of mean vectors.
    Mean(MeanArgs),
    /// Test equality of covariance matrices.
    Cov(CovArgs),
    /// Run a Monte Carlo experiment and write its report as JSON.
    Simulate(SimulateArgs),
    /// Print ROC point tables from a report or from two statistic files.
    Roc(RocArgs),
}

#[derive(Args)]
struct DataArgs {
    /// CSV of the first sample: rows are observations, columns variables.
    #[arg(long)]
    x: PathBuf,
    /// CSV of the second sample.
    #[arg(long)]
    y: PathBuf,
    /// Skip the first line of each CSV.
    #[arg(long)]
    header: bool,
    /// Bayes-factor decision threshold.
    #[arg(long = "c-th", default_value_t = mxpbf::DEFAULT_C_TH)]
    c_th: f64,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct MeanArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = mxpbf::DEFAULT_ALPHA)]
    alpha: f64,
}

#[derive(Args)]
struct CovArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = mxpbf::DEFAULT_ALPHA)]
    alpha: f64,
    /// Inverse-gamma shape.
    #[arg(long, default_value_t = mxpbf::DEFAULT_IG_CONST)]
    a0: f64,
    /// Inverse-gamma rate, used under both hypotheses.
    #[arg(long, default_value_t = mxpbf::DEFAULT_IG_CONST)]
    b0: f64,
    /// Subtract per-sample column means first (the default).
    #[arg(long, overrides_with = "no_center")]
    center: bool,
    /// Test the data as given, assuming zero population means.
    #[arg(long = "no-center", overrides_with = "center")]
    no_center: bool,
    /// Number of top pairs to report.
    #[arg(long = "top-k", default_value_t = 10)]
    top_k: usize,
}

#[derive(Args)]
struct SimulateArgs {
    /// Named design, e.g. cov-h1r-sparse.
    #[arg(long)]
    preset: Option<String>,
    /// key = value scenario file; flags override its values.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
    /// Observations per population.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    signal: Option<f64>,
    #[arg(long, default_value_t = 50)]
    reps: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated: mxpbf, bs, sd, sch, lc, clx.
    #[arg(long, default_value = "mxpbf")]
    methods: String,
    #[arg(long, default_value_t = mxpbf::DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = mxpbf::DEFAULT_IG_CONST)]
    a0: f64,
    #[arg(long, default_value_t = mxpbf::DEFAULT_IG_CONST)]
    b0: f64,
    #[arg(long = "c-th", default_value_t = mxpbf::DEFAULT_C_TH)]
    c_th: f64,
    /// Significance level for the frequentist tests.
    #[arg(long, default_value_t = mxpbf::DEFAULT_LEVEL)]
    level: f64,
    /// Include wall time in the report (makes the output non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Output path; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RocArgs {
    /// Report written by `simulate`.
    #[arg(long, conflicts_with_all = ["h0", "h1"])]
    report: Option<PathBuf>,
    /// One statistic per line, H0 replicates.
    #[arg(long, requires = "h1")]
    h0: Option<PathBuf>,
    /// One statistic per line, H1 replicates.
    #[arg(long, requires = "h0")]
    h1: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

type CliResult<T> = Result<T, String>;

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match cli.command {
        Command::Mean(a) => run_mean(a),
        Command::Cov(a) => run_cov(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Roc(a) => run_roc(a),
    };
    match outcome {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn load(data: &DataArgs) -> CliResult<(mxpbf::SampleMatrixF64, mxpbf::SampleMatrixF64)> {
    let opts = CsvOptions { header: data.header };
    let read = |p: &Path| read_csv_file(p, opts).map_err(|e| format!("{}: {e}", p.display()));
    Ok((read(&data.x)?, read(&data.y)?))
}

fn decision_label(d: Decision) -> &'static str {
    match d {
        Decision::RejectH0 => "reject_h0",
        Decision::RetainH0 => "retain_h0",
    }
}

fn check_c_th(c_th: f64) -> CliResult<()> {
    if c_th > 0.0 && c_th.is_finite() {
        Ok(())
    } else {
        Err(format!("--c-th must be positive, got {c_th}"))
    }
}


fn run_mean(a: MeanArgs) -> CliResult<String> {
    check_c_th(a.data.c_th)?;
    let (x, y) = load(&a.data)?;
    let cfg = MeanTestConfig::new(a.alpha).map_err(|e| e.to_string())?;
    let r = mxpbf_mean(&x, &y, &cfg).map_err(|e| e.to_string())?;
    let decision = decide_mean(&r, a.data.c_th);
    eprintln!("note: the mean test assumes both populations share a covariance matrix; this is not checked");
    let one_based = |v: &[usize]| v.iter().map(|i| i + 1).collect::<Vec<_>>();
    if a.data.json {
        let v = json!({
            "test": "mean",
            "n1": x.n(), "n2": y.n(), "p": x.p(),
            "alpha": a.alpha,
            "gamma": r.gamma,
            "log_mxpbf": ext(r.log_mxpbf),
            "argmax": r.argmax_index + 1,
            "c_th": a.data.c_th,
            "decision": decision_label(decision),
            "degenerate_columns": one_based(&r.degenerate_columns),
            "infinite_columns": one_based(&r.infinite_columns),
        });
        return to_json_string(&v).map_err(|e| e.to_string());
    }
    let mut s = format!(
        "log_mxpbf\t{}\nargmax\t{}\ndecision\t{}\n",
        format_real(r.log_mxpbf),
        r.argmax_index + 1,
        decision_label(decision)
    );
    if !r.degenerate_columns.is_empty() {
        s.push_str(&format!("skipped_columns\t{:?}\n", one_based(&r.degenerate_columns)));
    }
    Ok(s)
}

fn run_cov(a: CovArgs) -> CliResult<String> {
    check_c_th(a.data.c_th)?;
    let (x, y) = load(&a.data)?;
    let cfg = CovTestConfig {
        alpha: a.alpha,
        a0: a.a0,
        b0: a.b0,
        b01: a.b0,
        b02: a.b0,
        center: !a.no_center,
        top_k: a.top_k,
        keep_matrix: false,
    };
    let r = mxpbf_cov(&x, &y, &cfg).map_err(|e| e.to_string())?;
    let decision = decide_cov(&r, a.data.c_th);
    let (i, j) = r.argmax_pair;
    if a.data.json {
        let top: Vec<_> = r
            .top_k
            .iter()
            .map(|s| json!({"i": s.i + 1, "j": s.j + 1, "log_pbf": ext(s.log_pbf)}))
            .collect();
        let v = json!({
            "test": "cov",
            "n1": x.n(), "n2": y.n(), "p": x.p(),
            "alpha": a.alpha, "a0": a.a0, "b0": a.b0,
            "centered": !a.no_center,
            "gamma": r.gamma,
            "log_mxpbf": ext(r.log_mxpbf),
            "argmax": [i + 1, j + 1],
            "c_th": a.data.c_th,
            "decision": decision_label(decision),
            "evaluated_pairs": r.evaluated_pairs,
            "skipped_pairs": r.skipped_pairs,
            "top_pairs": top,
        });
        return to_json_string(&v).map_err(|e| e.to_string());
    }
    Ok(format!(
        "log_mxpbf\t{}\nargmax\t{},{}\ndecision\t{}\nevaluated_pairs\t{}\nskipped_pairs\t{}\n",
        format_real(r.log_mxpbf),
        i + 1,
        j + 1,
        decision_label(decision),
        r.evaluated_pairs,
        r.skipped_pairs
    ))
}

fn scenario(a: &SimulateArgs) -> CliResult<ScenarioSpec> {
    let mut spec = match (&a.spec, &a.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let mut s = ScenarioSpec::parse_config(&text).map_err(|e| e.to_string())?;
            if let Some(name) = &a.preset {
                let p = preset(name).map_err(|e| e.to_string())?;
                s.kind = p.kind;
                s.structure = p.structure;
            }
            s
        }
        (None, Some(name)) => preset(name).map_err(|e| e.to_string())?,
        (None, None) => return Err("simulate needs --preset or --spec".into()),
    };
    if let Some(p) = a.p {
        spec.p = p;
    }
    if let Some(n) = a.n {
        spec.n = n;
    }
    if let Some(s) = a.signal {
        spec.signal = s;
    }
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn run_simulate(a: SimulateArgs) -> CliResult<String> {
    let spec = scenario(&a)?;
    let methods = parse_methods(&a.methods).map_err(|e| e.to_string())?;
    let mut cfg = ExperimentConfig { c_th: a.c_th, level: a.level, ..ExperimentConfig::default() };
    cfg.mean.alpha = a.alpha;
    cfg.cov.alpha = a.alpha;
    cfg.cov.a0 = a.a0;
    cfg.cov.b0 = a.b0;
    cfg.cov.b01 = a.b0;
    cfg.cov.b02 = a.b0;
    let mut report = run_experiment_with(&spec, &methods, a.reps, &cfg).map_err(|e| e.to_string())?;
    for m in &report.methods {
        eprintln!("{:<6} auc {:.4}  size {:.3}  power {:.3}", m.method.name(), m.roc.auc, m.size, m.power);
    }
    if !a.timing {
        report.wall_time = None;
    }
    let text = to_json_string(&report).map_err(|e| e.to_string())?;
    match &a.out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn read_statistics(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v = match t {
            "inf" | "+inf" => f64::INFINITY,
            "-inf" => f64::NEG_INFINITY,
            _ => t.parse().map_err(|_| format!("{}: line {}: not a number: '{t}'", path.display(), k + 1))?,
        };
        out.push(v);
    }
    if out.is_empty() {
        return Err(format!("{}: no statistics", path.display()));
    }
    Ok(out)
}

fn roc_table(label: &str, roc: &RocCurve, out: &mut String) {
    for pt in &roc.points {
        let t = if pt.threshold.is_finite() {
            format_real(pt.threshold)
        } else if pt.threshold > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
        out.push_str(&format!("{label},{t},{},{}\n", pt.fpr, pt.tpr));
    }
}

fn run_roc(a: RocArgs) -> CliResult<String> {
    let curves: Vec<(String, RocCurve)> = if let Some(path) = &a.report {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let report: ExperimentReport = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        report.methods.into_iter().map(|m| (m.method.name().to_string(), m.roc)).collect()
    } else if let (Some(h0), Some(h1)) = (&a.h0, &a.h1) {
        vec![("samples".into(), roc_from_samples(&read_statistics(h0)?, &read_statistics(h1)?))]
    } else {
        return Err("roc needs --report or both --h0 and --h1".into());
    };
    let text = if a.json {
        let v: Vec<_> = curves.iter().map(|(m, c)| json!({"method": m, "roc": c})).collect();
        to_json_string(&v).map_err(|e| e.to_string())?
    } else {
        let mut s = String::from("method,threshold,fpr,tpr\n");
        for (m, c) in &curves {
            roc_table(m, c, &mut s);
        }
        for (m, c) in &curves {
            eprintln!("{m:<8} auc {:.6}", c.auc);
        }
        s
    };
    match &a.out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}
