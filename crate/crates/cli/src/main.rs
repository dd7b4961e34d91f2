//! `corruptscm` command-line interface.
//!
//! Exit codes: 0 success, 1 domain error (bad spec, data or predictions),
//! 2 usage error.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

/// `println!` that exits quietly when the reader has closed the pipe.
macro_rules! say {
    ($($arg:tt)*) => {{
        if let Err(e) = writeln!(std::io::stdout(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
        }
    }};
}

use clap::{Parser, Subcommand, ValueEnum};
use corruptscm::dataset::{
    generate_dataset, trace_to_json_line, verify_dataset, write_scenes, Regime, RegimeConfig,
    SceneSource,
};
use corruptscm::dsl::{parse_distribution, shipped, Level};
use corruptscm::eval::{
    evaluate, write_predictions, EvalOptions, EvalReport, FragileConfig, MseScale, Predictor,
};
use corruptscm::plot::{curves_csv, curves_svg};
use corruptscm::scene::SceneConfig;
use corruptscm::scm::{sample_traces, Intervention};
use corruptscm::{
    apply_intervention, parse_spec, serialize_spec, validate_spec, SpecDocument, Workers,
};

#[derive(Parser)]
#[command(
    name = "corruptscm",
    version,
    about = "Causal-model driven image corruption benchmarks"
)]
struct Cli {
    /// Worker threads (0 = all cores, 1 = sequential). Defaults to $CORRUPTSCM_WORKERS.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a model; print its topological order.
    Validate {
        /// Model file, or `builtin:<name>` for a shipped model.
        #[arg(long)]
        scm: String,
    },
    /// Sample parameter traces as JSON lines.
    Sample {
        #[arg(long)]
        scm: String,
        /// Number of traces.
        #[arg(long)]
        n: usize,
        /// Global seed; drawn from the clock when omitted.
        #[arg(long)]
        seed: Option<u64>,
        /// Output file (`-` for stdout).
        #[arg(long, default_value = "-")]
        out: PathBuf,
        /// Intervention `node.param=value` or `node.param~distribution`. Repeatable.
        #[arg(long = "do", value_name = "INTERVENTION")]
        interventions: Vec<String>,
    },
    /// Synthesize clean scenes (`<out>/<id>/clean.png`, `masks.png`, `scene.json`).
    Synth {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Scene configuration JSON; missing fields take defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample traces and render a corrupted dataset.
    Corrupt {
        #[arg(long)]
        scm: String,
        /// Directory of clean scenes; synthesized from --config when omitted.
        #[arg(long)]
        scenes: Option<PathBuf>,
        /// Scene configuration JSON used when --scenes is omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Number of scenes (default: all scenes in --scenes).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum)]
        regime: RegimeArg,
        /// Long-tail selection probability: `p` for every corruption or `node=p`. Repeatable.
        #[arg(long = "p-corr", value_name = "P")]
        p_corr: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "do", value_name = "INTERVENTION")]
        interventions: Vec<String>,
    },
    /// Run a reference predictor over a dataset.
    Predict {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum)]
        predictor: PredictorArg,
        /// Fragile predictor configuration JSON.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score predictions; writes `<out>.json` and `<out>.csv`.
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        /// Prediction directory. Repeatable; the set with the best clean mIoU is reported.
        #[arg(long = "pred", required = true)]
        preds: Vec<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Severity bins of the report curves.
        #[arg(long, default_value_t = 10)]
        bins: usize,
        /// Bootstrap resamples.
        #[arg(long = "n-boot", default_value_t = 1000)]
        n_boot: usize,
        #[arg(long = "mse-scale", value_enum, default_value = "8bit")]
        mse_scale: MseScaleArg,
    },
    /// Severity curves from a report; writes `<out>.csv` and `<out>.svg`.
    Curves {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check dataset hashes, and optionally re-render every corrupted image.
    Verify {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        rerender: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    OodIid,
    OodChain,
    Longtail,
}

#[derive(Clone, Copy, ValueEnum)]
enum PredictorArg {
    Oracle,
    Fragile,
}

#[derive(Clone, Copy, ValueEnum)]
enum MseScaleArg {
    #[value(name = "8bit")]
    EightBit,
    Unit,
}

/// A failed run: message and exit code.
struct Failure {
    code: u8,
    msg: String,
}

fn domain(msg: impl std::fmt::Display) -> Failure {
    Failure {
        code: 1,
        msg: msg.to_string(),
    }
}

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        msg: msg.to_string(),
    }
}

/// Removes an output path on drop unless disarmed. Paths that already existed
/// are left alone.
struct Cleanup {
    path: PathBuf,
    armed: bool,
}

impl Cleanup {
    fn new(path: &Path) -> Self {
        Cleanup {
            path: path.to_path_buf(),
            armed: !path.exists(),
        }
    }

    fn disarm(mut self) {
        self.armed = false;
    }
}

impl Drop for Cleanup {
    fn drop(&mut self) {
        if self.armed {
            let _ = if self.path.is_dir() {
                fs::remove_dir_all(&self.path)
            } else {
                fs::remove_file(&self.path)
            };
        }
    }
}

/// Resolve the seed and report it. `quiet_stdout` routes the line to stderr
/// when stdout carries data.
fn effective_seed(seed: Option<u64>, quiet_stdout: bool) -> u64 {
    let s = seed.unwrap_or_else(|| {
        let t = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0);
        corruptscm::rng::avalanche(t as u64)
    });
    if quiet_stdout {
        eprintln!("seed: {s}");
    } else {
        say!("seed: {s}");
    }
    s
}

fn load_spec(arg: &str) -> Result<SpecDocument, Failure> {
    let text = match arg.strip_prefix("builtin:") {
        Some(name) => shipped::by_name(name)
            .ok_or_else(|| {
                let names: Vec<&str> = shipped::ALL.iter().map(|(n, _)| *n).collect();
                usage(format!(
                    "unknown builtin model `{name}`; available: {}",
                    names.join(", ")
                ))
            })?
            .to_string(),
        None => fs::read_to_string(arg).map_err(|e| domain(format!("{arg}: {e}")))?,
    };
    parse_spec(&text).map_err(|e| domain(format!("{arg}:{e}")))
}

fn parse_intervention(s: &str) -> Result<Intervention, Failure> {
    let (target, hard, rhs) = match (s.find('='), s.find('~')) {
        (Some(i), t) if t.is_none_or(|t| i < t) => (&s[..i], true, &s[i + 1..]),
        (_, Some(t)) => (&s[..t], false, &s[t + 1..]),
        _ => {
            return Err(usage(format!(
                "--do `{s}`: expected node.param=value or node.param~distribution"
            )))
        }
    };
    let (node, param) = target
        .trim()
        .split_once('.')
        .ok_or_else(|| usage(format!("--do `{s}`: target must be node.param")))?;
    if hard {
        let v: f64 = rhs
            .trim()
            .parse()
            .map_err(|_| usage(format!("--do `{s}`: `{rhs}` is not a number")))?;
        Ok(Intervention::hard(node, param, v))
    } else {
        let d = parse_distribution(rhs).map_err(|e| usage(format!("--do `{s}`: {e}")))?;
        Ok(Intervention::soft(node, param, d))
    }
}

/// Apply interventions and re-serialize so the stored model text matches the graph.
fn intervene(doc: SpecDocument, ivs: &[String]) -> Result<SpecDocument, Failure> {
    if ivs.is_empty() {
        return Ok(doc);
    }
    let mut graph = doc.graph;
    for s in ivs {
        let iv = parse_intervention(s)?;
        graph = apply_intervention(&graph, &iv).map_err(|e| domain(format!("--do `{s}`: {e}")))?;
    }
    parse_spec(&serialize_spec(&graph)).map_err(|e| domain(format!("intervened model: {e}")))
}

fn read_json<T: serde::de::DeserializeOwned + Default>(
    path: Option<&PathBuf>,
) -> Result<T, Failure> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| domain(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| domain(format!("{}: {e}", p.display())))
        }
    }
}

fn cmd_validate(scm: &str) -> Result<(), Failure> {
    let doc = load_spec(scm)?;
    let diags = validate_spec(&doc);
    for d in &diags {
        eprintln!("{scm}:{d}");
    }
    say!("nodes: {}", doc.graph.nodes().len());
    say!("order: {}", doc.graph.topological_order().join(" -> "));
    say!("fingerprint: {}", doc.fingerprint());
    let errors = diags.iter().filter(|d| d.level == Level::Error).count();
    if errors > 0 {
        return Err(domain(format!("{errors} error(s)")));
    }
    Ok(())
}

fn cmd_sample(
    scm: &str,
    n: usize,
    seed: Option<u64>,
    out: &Path,
    ivs: &[String],
    workers: Workers,
) -> Result<(), Failure> {
    let doc = intervene(load_spec(scm)?, ivs)?;
    let seed = effective_seed(seed, out == Path::new("-"));
    let traces = sample_traces(&doc.graph, n, seed, workers).map_err(domain)?;
    let mut text = String::new();
    for t in &traces {
        text.push_str(&trace_to_json_line(t));
        text.push('\n');
    }
    if out == Path::new("-") {
        match std::io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            r => r.map_err(domain)?,
        }
    } else {
        let guard = Cleanup::new(out);
        fs::write(out, text).map_err(|e| domain(format!("{}: {e}", out.display())))?;
        guard.disarm();
    }
    Ok(())
}

fn cmd_synth(
    n: usize,
    seed: Option<u64>,
    config: Option<&PathBuf>,
    out: &Path,
    workers: Workers,
) -> Result<(), Failure> {
    let cfg: SceneConfig = read_json(config)?;
    cfg.validate().map_err(domain)?;
    let seed = effective_seed(seed, false);
    let guard = Cleanup::new(out);
    write_scenes(&cfg, n, seed, out, workers).map_err(domain)?;
    guard.disarm();
    say!("wrote {n} scenes to {}", out.display());
    Ok(())
}

fn parse_p_corr(args: &[String], doc: &SpecDocument) -> Result<RegimeConfig, Failure> {
    let args: Vec<String> = if args.is_empty() {
        vec!["0.01".into()]
    } else {
        args.to_vec()
    };
    let mut cfg = RegimeConfig::new(Regime::Longtail);
    for a in &args {
        match a.split_once('=') {
            Some((node, p)) => {
                let p: f64 = p
                    .parse()
                    .map_err(|_| usage(format!("--p-corr `{a}`: not a probability")))?;
                cfg.p_corr.insert(node.to_string(), p);
            }
            None => {
                let p: f64 = a
                    .parse()
                    .map_err(|_| usage(format!("--p-corr `{a}`: not a probability")))?;
                let uniform = RegimeConfig::longtail_uniform(&doc.graph, p);
                cfg.p_corr.extend(uniform.p_corr);
            }
        }
    }
    if let Some(k) = cfg.p_corr.keys().find(|k| doc.graph.node(k).is_none()) {
        return Err(domain(format!("--p-corr: unknown node `{k}`")));
    }
    Ok(cfg)
}

#[allow(clippy::too_many_arguments)]
fn cmd_corrupt(
    scm: &str,
    scenes: Option<&PathBuf>,
    config: Option<&PathBuf>,
    n: Option<usize>,
    regime: RegimeArg,
    p_corr: &[String],
    seed: Option<u64>,
    out: &Path,
    ivs: &[String],
    workers: Workers,
) -> Result<(), Failure> {
    let doc = intervene(load_spec(scm)?, ivs)?;
    if let Some(d) = validate_spec(&doc).iter().find(|d| d.level == Level::Error) {
        return Err(domain(format!("{scm}:{d}")));
    }
    let regime_cfg = match regime {
        RegimeArg::OodIid => RegimeConfig::new(Regime::OodIid),
        RegimeArg::OodChain => RegimeConfig::new(Regime::OodChain),
        RegimeArg::Longtail => parse_p_corr(p_corr, &doc)?,
    };
    let (source, n) = match scenes {
        Some(dir) => {
            let available = corruptscm::dataset::list_scene_ids(dir)
                .map_err(domain)?
                .len();
            (SceneSource::Directory(dir.clone()), n.unwrap_or(available))
        }
        None => {
            let n = n.ok_or_else(|| usage("--n is required when --scenes is omitted"))?;
            (SceneSource::Synth(read_json(config)?), n)
        }
    };
    let seed = effective_seed(seed, false);
    if out.join(corruptscm::dataset::MANIFEST_FILE).exists() {
        return Err(domain(format!("{} already holds a dataset", out.display())));
    }
    let guard = Cleanup::new(out);
    let m = generate_dataset(&doc, &source, n, seed, &regime_cfg, out, workers).map_err(domain)?;
    guard.disarm();
    say!(
        "wrote {} scenes, {} corrupted images to {}",
        m.scene_count,
        m.corrupted_count(),
        out.display()
    );
    Ok(())
}

fn cmd_predict(
    dataset: &Path,
    predictor: PredictorArg,
    config: Option<&PathBuf>,
    out: &Path,
    workers: Workers,
) -> Result<(), Failure> {
    let p = match predictor {
        PredictorArg::Oracle => Predictor::Oracle,
        PredictorArg::Fragile => Predictor::Fragile(read_json::<FragileConfig>(config)?),
    };
    let guard = Cleanup::new(out);
    let n = write_predictions(dataset, &p, out, workers).map_err(domain)?;
    guard.disarm();
    say!("wrote {n} {} predictions to {}", p.name(), out.display());
    Ok(())
}

fn fmt_ci(ci: Option<&corruptscm::eval::BootstrapCi>, prec: usize) -> String {
    match ci {
        Some(c) => format!("{:.prec$} ± {:.prec$}", c.mean, c.half_width),
        None => "-".into(),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    dataset: &Path,
    preds: &[PathBuf],
    seed: Option<u64>,
    out: &Path,
    bins: usize,
    n_boot: usize,
    scale: MseScaleArg,
    workers: Workers,
) -> Result<(), Failure> {
    if bins == 0 {
        return Err(usage("--bins must be at least 1"));
    }
    let seed = effective_seed(seed, false);
    let mse_scale = match scale {
        MseScaleArg::EightBit => MseScale::EightBit,
        MseScaleArg::Unit => MseScale::Unit,
    };
    let opts = EvalOptions {
        seed,
        n_boot,
        bins,
        mse_scale,
        workers,
    };
    let report = evaluate(dataset, preds, &opts).map_err(domain)?;
    for d in &report.diagnostics {
        eprintln!("note: {d}");
    }
    let (json, csv) = report.write(out).map_err(domain)?;
    say!("selected: {}", report.candidates[report.selected].path);
    say!("{:<12} {:>20} {:>24} {:>6}", "variant", "mIoU", "MSE", "n");
    for g in &report.groups {
        say!(
            "{:<12} {:>20} {:>24} {:>6}",
            g.variant,
            fmt_ci(g.miou.as_ref(), 4),
            fmt_ci(g.mse.as_ref(), 2),
            g.count
        );
    }
    say!("wrote {} and {}", json.display(), csv.display());
    Ok(())
}

fn cmd_curves(report: &Path, bins: usize, out: &Path) -> Result<(), Failure> {
    if bins == 0 {
        return Err(usage("--bins must be at least 1"));
    }
    let path = corruptscm::eval::with_suffix(report, "json");
    let report = EvalReport::load(&path).map_err(domain)?;
    let curves = report.curves(bins);
    let csv_path = corruptscm::eval::with_suffix(out, "csv");
    let svg_path = corruptscm::eval::with_suffix(out, "svg");
    fs::write(&csv_path, curves_csv(&curves))
        .map_err(|e| domain(format!("{}: {e}", csv_path.display())))?;
    fs::write(
        &svg_path,
        curves_svg(&curves, "mIoU vs normalized severity"),
    )
    .map_err(|e| domain(format!("{}: {e}", svg_path.display())))?;
    say!("wrote {} and {}", csv_path.display(), svg_path.display());
    Ok(())
}

fn cmd_verify(dataset: &Path, rerender: bool, workers: Workers) -> Result<(), Failure> {
    let r = verify_dataset(dataset, rerender, workers).map_err(domain)?;
    for p in &r.problems {
        eprintln!("{p}");
    }
    say!(
        "checked {} files, {} re-renders",
        r.files_checked,
        r.renders_checked
    );
    if !r.ok() {
        return Err(domain(format!("{} problem(s)", r.problems.len())));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let workers = cli
        .workers
        .map(Workers::from_count)
        .unwrap_or_else(Workers::from_env);
    match cli.command {
        Command::Validate { scm } => cmd_validate(&scm),
        Command::Sample {
            scm,
            n,
            seed,
            out,
            interventions,
        } => cmd_sample(&scm, n, seed, &out, &interventions, workers),
        Command::Synth {
            n,
            seed,
            config,
            out,
        } => cmd_synth(n, seed, config.as_ref(), &out, workers),
        Command::Corrupt {
            scm,
            scenes,
            config,
            n,
            regime,
            p_corr,
            seed,
            out,
            interventions,
        } => cmd_corrupt(
            &scm,
            scenes.as_ref(),
            config.as_ref(),
            n,
            regime,
            &p_corr,
            seed,
            &out,
            &interventions,
            workers,
        ),
        Command::Predict {
            dataset,
            predictor,
            config,
            out,
        } => cmd_predict(&dataset, predictor, config.as_ref(), &out, workers),
        Command::Eval {
            dataset,
            preds,
            seed,
            out,
            bins,
            n_boot,
            mse_scale,
        } => cmd_eval(
            &dataset, &preds, seed, &out, bins, n_boot, mse_scale, workers,
        ),
        Command::Curves { report, bins, out } => cmd_curves(&report, bins, &out),
        Command::Verify { dataset, rerender } => cmd_verify(&dataset, rerender, workers),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
