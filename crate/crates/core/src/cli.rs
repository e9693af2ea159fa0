//! The `addnet` command line.
//!
//! Exit codes: 0 success, 1 parse or precondition failure, 2 infeasible
//! kernel, 3 tolerance failure in `compare`.
//!
//! Every output file embeds the tool version and the resolved configuration
//! as one JSON line. Output paths and `--workers` are left out of that
//! configuration because they cannot change the file's contents.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analytic::AnalyticPrediction;
use crate::degseq::{sample_poisson, sample_power_law, sample_power_law_until, DegreeSequence, PowerLawParams};
use crate::ensemble::{fit_linear, fit_power_slope, run_ensemble, DegreeSpectrum, EnsembleSummary, LineFit};
use crate::error::{Error, Result};
use crate::generator::generate;
use crate::io::{
    format_degrees, format_edge_list, format_prediction, format_spectrum, parse_prediction,
    parse_spectrum, read_degree_file, read_text, Metadata,
};
use crate::kernel::{validate_feasibility, ClampPolicy, Kernel, KernelKind};

pub const VERSION: &str = concat!("addnet ", env!("CARGO_PKG_VERSION"));

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "addnet", version, about = "Random graph ensembles with an additive degree kernel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample or load a desired degree sequence and write it one degree per line.
    Genseq(GenseqArgs),
    /// Count vertex pairs whose kernel value leaves [0, 1].
    Validate(ValidateArgs),
    /// Draw one realization and write its edge list.
    Generate(GenerateArgs),
    /// Run many realizations and write spectra and a summary.
    Ensemble(EnsembleArgs),
    /// Write the closed-form predictions for a sequence.
    Predict(PredictArgs),
    /// Check an ensemble against predictions.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dist {
    Powerlaw,
    Poisson,
    Regular,
    File,
}

#[derive(Debug, Args)]
pub struct GenseqArgs {
    #[arg(long, value_enum)]
    pub dist: Dist,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub kmin: Option<u32>,
    #[arg(long)]
    pub kmax: Option<u32>,
    #[arg(long)]
    pub mean: Option<f64>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Source file for `--dist file`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Redraw power-law sequences until the additive kernel needs no clamping.
    #[arg(long)]
    pub require_feasible: bool,
    #[arg(long, default_value_t = 100_000)]
    pub max_attempts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelName {
    Additive,
    ChungLu,
    Constant,
}

impl From<KernelName> for KernelKind {
    fn from(k: KernelName) -> Self {
        match k {
            KernelName::Additive => KernelKind::Additive,
            KernelName::ChungLu => KernelKind::ChungLu,
            KernelName::Constant => KernelKind::Constant,
        }
    }
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long, value_enum, default_value = "additive")]
    pub kernel: KernelName,
    /// Connection probability for `--kernel constant`; defaults to z/N.
    #[arg(long)]
    pub p: Option<f64>,
    /// Clamp out-of-range kernel values instead of refusing the sequence.
    #[arg(long)]
    pub clamp: bool,
}

impl KernelArgs {
    fn build(&self, seq: &DegreeSequence) -> Result<Kernel> {
        let policy = if self.clamp { ClampPolicy::Clamp } else { ClampPolicy::Strict };
        match (self.kernel, self.p) {
            (KernelName::Constant, Some(p)) => Kernel::constant(p, policy),
            (_, Some(_)) => Err(Error::InvalidParams("--p only applies to --kernel constant".into())),
            (kind, None) => Ok(Kernel::for_sequence(kind.into(), seq, policy)),
        }
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub seq: PathBuf,
    #[command(flatten)]
    pub kernel: KernelArgs,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub seq: PathBuf,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[arg(long)]
    pub seq: PathBuf,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long)]
    pub realizations: u64,
    /// Master seed; realization t uses a seed derived from (seed, t).
    #[arg(long)]
    pub seed: u64,
    /// Worker threads; results do not depend on it. Defaults to all cores.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub seq: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Smallest degree row; defaults to 1.
    #[arg(long)]
    pub kmin: Option<u32>,
    /// Largest degree row; defaults to min(N − 1, 2·max degree).
    #[arg(long)]
    pub kmax: Option<u32>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Directory written by `ensemble`.
    #[arg(long)]
    pub ensemble: PathBuf,
    /// File written by `predict`.
    #[arg(long)]
    pub predict: PathBuf,
    /// Bins with fewer samples are left out of the fits.
    #[arg(long, default_value_t = 30)]
    pub min_count: u64,
    /// Allowed |slope + 1| for the neighbour-degree spectrum.
    #[arg(long, default_value_t = 0.15)]
    pub knn_slope_tol: f64,
    /// Allowed |slope + 1| for the clustering spectrum.
    #[arg(long, default_value_t = 0.2)]
    pub c_slope_tol: f64,
    /// Allowed relative error of the C–k_nn slope against 2/N.
    #[arg(long, default_value_t = 0.15)]
    pub linear_slope_tol: f64,
    /// Allowed relative error of the C–k_nn intercept against −p.
    #[arg(long, default_value_t = 0.25)]
    pub linear_intercept_tol: f64,
}

/// Parses `args` (program name first) and runs the command, writing reports
/// to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Genseq(a) => cmd_genseq(a, out),
        Command::Validate(a) => cmd_validate(a, out),
        Command::Generate(a) => cmd_generate(a, out, err),
        Command::Ensemble(a) => cmd_ensemble(a, out, err),
        Command::Predict(a) => cmd_predict(a, out),
        Command::Compare(a) => cmd_compare(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::InfeasiblePair { .. } => EXIT_INFEASIBLE,
                _ => EXIT_INPUT,
            }
        }
    }
}

fn load_seq(path: &Path) -> Result<DegreeSequence> {
    read_degree_file(path).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse { line, message: format!("{}: {message}", path.display()) },
        other => other,
    })
}

fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    writeln!(out, "{text}")?;
    Ok(())
}

fn require<T>(value: Option<T>, flag: &str, dist: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidParams(format!("--dist {dist} needs {flag}")))
}

#[derive(Serialize)]
struct SequenceStats {
    n: usize,
    z: f64,
    p: f64,
    q: f64,
    k_min: u32,
    k_max: u32,
}

impl SequenceStats {
    fn of(seq: &DegreeSequence) -> Self {
        Self {
            n: seq.n(),
            z: seq.avg_degree(),
            p: seq.avg_connect_prob(),
            q: seq.variance(),
            k_min: seq.min_degree(),
            k_max: seq.max_degree(),
        }
    }
}

fn cmd_genseq(a: &GenseqArgs, out: &mut dyn Write) -> Result<i32> {
    let mut attempts = None;
    let seq = match a.dist {
        Dist::Powerlaw => {
            let n = require(a.n, "--n", "powerlaw")?;
            let params = PowerLawParams {
                gamma: require(a.gamma, "--gamma", "powerlaw")?,
                k_min: require(a.kmin, "--kmin", "powerlaw")?,
                k_max: require(a.kmax, "--kmax", "powerlaw")?,
            };
            if a.require_feasible {
                let (seq, tries) = sample_power_law_until(n, params, a.seed, a.max_attempts, |s| {
                    let k = Kernel::for_sequence(KernelKind::Additive, s, ClampPolicy::Clamp);
                    validate_feasibility(&k, s).map(|r| r.is_clean()).unwrap_or(false)
                })?;
                attempts = Some(tries);
                seq
            } else {
                sample_power_law(n, params, a.seed)?
            }
        }
        Dist::Poisson => sample_poisson(
            require(a.n, "--n", "poisson")?,
            require(a.mean, "--mean", "poisson")?,
            a.seed,
        )?,
        Dist::Regular => DegreeSequence::regular(require(a.n, "--n", "regular")?, require(a.k, "--k", "regular")?)?,
        Dist::File => load_seq(&require(a.input.clone(), "--input", "file")?)?,
    };
    fs::write(&a.out, format_degrees(&seq))?;

    #[derive(Serialize)]
    struct Config<'a> {
        command: &'static str,
        dist: Dist,
        n: Option<usize>,
        gamma: Option<f64>,
        kmin: Option<u32>,
        kmax: Option<u32>,
        mean: Option<f64>,
        k: Option<u32>,
        seed: u64,
        input: Option<&'a Path>,
        require_feasible: bool,
        max_attempts: usize,
    }
    #[derive(Serialize)]
    struct Report<'a> {
        version: &'static str,
        config: Config<'a>,
        #[serde(flatten)]
        stats: SequenceStats,
        attempts: Option<usize>,
    }
    print_json(
        out,
        &Report {
            version: VERSION,
            config: Config {
                command: "genseq",
                dist: a.dist,
                n: a.n,
                gamma: a.gamma,
                kmin: a.kmin,
                kmax: a.kmax,
                mean: a.mean,
                k: a.k,
                seed: a.seed,
                input: a.input.as_deref(),
                require_feasible: a.require_feasible,
                max_attempts: a.max_attempts,
            },
            stats: SequenceStats::of(&seq),
            attempts,
        },
    )?;
    Ok(EXIT_OK)
}

fn cmd_validate(a: &ValidateArgs, out: &mut dyn Write) -> Result<i32> {
    let seq = load_seq(&a.seq)?;
    let kernel = a.kernel.build(&seq)?;
    let report = validate_feasibility(&kernel, &seq)?;

    #[derive(Serialize)]
    struct Report<'a> {
        version: &'static str,
        kernel: &'a Kernel,
        #[serde(flatten)]
        stats: SequenceStats,
        clamped_low: u64,
        clamped_high: u64,
        total_pairs: u64,
        feasible: bool,
    }
    print_json(
        out,
        &Report {
            version: VERSION,
            kernel: &kernel,
            stats: SequenceStats::of(&seq),
            clamped_low: report.clamped_low,
            clamped_high: report.clamped_high,
            total_pairs: report.total_pairs,
            feasible: report.is_clean(),
        },
    )?;
    Ok(if report.is_clean() { EXIT_OK } else { EXIT_INFEASIBLE })
}

#[derive(Serialize)]
struct RunConfig<'a> {
    command: &'static str,
    seq: &'a Path,
    sequence_fingerprint: String,
    kernel: &'a Kernel,
    realizations: Option<u64>,
    seed: u64,
    #[serde(flatten)]
    stats: SequenceStats,
}

fn clamp_warning(err: &mut dyn Write, kernel: &Kernel, low: u64, high: u64) {
    if kernel.clamp_policy == ClampPolicy::Clamp && low + high > 0 {
        let _ = writeln!(
            err,
            "warning: {low} pair draws clamped low and {high} clamped high; closed-form predictions do not apply"
        );
    }
}

fn cmd_generate(a: &GenerateArgs, _out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let seq = load_seq(&a.seq)?;
    let kernel = a.kernel.build(&seq)?;
    let (g, report) = generate(&seq, &kernel, a.seed)?;
    clamp_warning(err, &kernel, report.clamped_low, report.clamped_high);
    let config = RunConfig {
        command: "generate",
        seq: &a.seq,
        sequence_fingerprint: format!("{:016x}", seq.fingerprint()),
        kernel: &kernel,
        realizations: None,
        seed: a.seed,
        stats: SequenceStats::of(&seq),
    };
    let mut text = format!("# version: {VERSION}\n# config: {}\n", json_line(&config));
    text.push_str(&format_edge_list(&g));
    fs::write(&a.out, text)?;
    Ok(EXIT_OK)
}

/// Keys of `summary.json`, in file order.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SummaryFile {
    pub n: usize,
    pub z: f64,
    pub p: f64,
    pub q: f64,
    pub realizations: u64,
    pub master_seed: u64,
    pub mean_r: Option<f64>,
    pub mean_r_stderr: Option<f64>,
    pub r_undefined: u64,
    pub mean_clustering: Option<f64>,
    pub mean_clustering_stderr: Option<f64>,
    pub mean_edge_count: f64,
    pub mean_edge_count_stderr: f64,
    pub clamped_low: u64,
    pub clamped_high: u64,
    pub kernel: String,
    pub clamp_policy: String,
    pub clamp_warning: bool,
    pub pooling: String,
    pub version: String,
    pub config: serde_json::Value,
}

const POOLING: &str = "vertex values pooled across realizations, grouped by realized degree";

fn cmd_ensemble(a: &EnsembleArgs, _out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let seq = load_seq(&a.seq)?;
    let kernel = a.kernel.build(&seq)?;
    let workers = a
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let summary = run_ensemble(&seq, &kernel, a.realizations, a.seed, workers)?;
    let clamps = summary.clamp_totals();
    clamp_warning(err, &kernel, clamps.clamped_low, clamps.clamped_high);

    let config = RunConfig {
        command: "ensemble",
        seq: &a.seq,
        sequence_fingerprint: format!("{:016x}", seq.fingerprint()),
        kernel: &kernel,
        realizations: Some(a.realizations),
        seed: a.seed,
        stats: SequenceStats::of(&seq),
    };
    let config_json = json_line(&config);
    fs::create_dir_all(&a.out_dir)?;
    let spectra: [(&str, &str, DegreeSpectrum); 3] = [
        ("knn.csv", "mean realized degree of neighbours", summary.knn_spectrum()),
        ("knn_expected.csv", "mean desired degree of neighbours", summary.knn_expected_spectrum()),
        ("clustering.csv", "local clustering coefficient", summary.clustering_spectrum()),
    ];
    for (file, quantity, spectrum) in spectra {
        let meta: Metadata = vec![
            ("version".into(), VERSION.into()),
            ("quantity".into(), quantity.into()),
            ("pooling".into(), POOLING.into()),
            ("config".into(), config_json.clone()),
        ];
        fs::write(a.out_dir.join(file), format_spectrum(&meta, &spectrum))?;
    }

    let mut hist = format!("# version: {VERSION}\n# config: {config_json}\ndegree,count\n");
    for (d, c) in summary.degree_histogram() {
        let _ = writeln!(hist, "{d},{c}");
    }
    fs::write(a.out_dir.join("degree_histogram.csv"), hist)?;

    let file = summary_file(&summary, &seq, &kernel, serde_json::from_str(&config_json).expect("valid json"));
    let text = serde_json::to_string_pretty(&file).expect("serializable") + "\n";
    fs::write(a.out_dir.join("summary.json"), text)?;
    Ok(EXIT_OK)
}

fn summary_file(
    summary: &EnsembleSummary,
    seq: &DegreeSequence,
    kernel: &Kernel,
    config: serde_json::Value,
) -> SummaryFile {
    let r = summary.mean_r();
    let c = summary.mean_clustering();
    let e = summary.mean_edge_count();
    let clamps = summary.clamp_totals();
    SummaryFile {
        n: seq.n(),
        z: seq.avg_degree(),
        p: seq.avg_connect_prob(),
        q: seq.variance(),
        realizations: summary.realizations(),
        master_seed: summary.master_seed(),
        mean_r: r.map(|r| r.mean),
        mean_r_stderr: r.map(|r| r.stderr),
        r_undefined: summary.r_undefined_count(),
        mean_clustering: c.map(|c| c.mean),
        mean_clustering_stderr: c.map(|c| c.stderr),
        mean_edge_count: e.mean,
        mean_edge_count_stderr: e.stderr,
        clamped_low: clamps.clamped_low,
        clamped_high: clamps.clamped_high,
        kernel: kernel.kind().to_string(),
        clamp_policy: match kernel.clamp_policy {
            ClampPolicy::Strict => "strict".into(),
            ClampPolicy::Clamp => "clamp".into(),
        },
        clamp_warning: kernel.clamp_policy == ClampPolicy::Clamp,
        pooling: POOLING.into(),
        version: VERSION.into(),
        config,
    }
}

fn cmd_predict(a: &PredictArgs, _out: &mut dyn Write) -> Result<i32> {
    let seq = load_seq(&a.seq)?;
    let pred = AnalyticPrediction::new(&seq);
    let k_min = a.kmin.unwrap_or(1);
    let default_max = (seq.n() - 1).min(2 * seq.max_degree() as usize) as u32;
    let k_max = a.kmax.unwrap_or(default_max);
    if k_min == 0 || k_max < k_min {
        return Err(Error::InvalidParams(format!("degree range {k_min}..={k_max} is empty or includes 0")));
    }

    #[derive(Serialize)]
    struct Config<'a> {
        command: &'static str,
        seq: &'a Path,
        sequence_fingerprint: String,
        kmin: u32,
        kmax: u32,
    }
    let config = Config {
        command: "predict",
        seq: &a.seq,
        sequence_fingerprint: format!("{:016x}", seq.fingerprint()),
        kmin: k_min,
        kmax: k_max,
    };
    let meta: Metadata = vec![("version".into(), VERSION.into()), ("config".into(), json_line(&config))];
    fs::write(&a.out, format_prediction(&meta, &pred, k_min, k_max))?;
    Ok(EXIT_OK)
}

/// One tolerance check of `compare`.
#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    target: f64,
    measured: Option<f64>,
    tolerance: f64,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, target: f64, tolerance: f64, fit: Result<LineFit>, pick: impl Fn(&LineFit) -> f64) -> Check {
    match fit {
        Ok(f) => {
            let m = pick(&f);
            Check {
                name,
                target,
                measured: Some(m),
                tolerance,
                pass: (m - target).abs() <= tolerance,
                detail: format!("r2={} points={}", f.r_squared, f.points),
            }
        }
        Err(e) => Check { name, target, measured: None, tolerance, pass: false, detail: e.to_string() },
    }
}

fn deviation(sim: f64, pred: f64, stderr: f64) -> f64 {
    let diff = sim - pred;
    if diff == 0.0 {
        0.0
    } else {
        diff / stderr
    }
}

fn cmd_compare(a: &CompareArgs, out: &mut dyn Write) -> Result<i32> {
    let summary: SummaryFile = serde_json::from_str(&read_text(&a.ensemble.join("summary.json"))?)
        .map_err(|e| Error::Parse { line: e.line(), message: format!("summary.json: {e}") })?;
    let (_, knn) = parse_spectrum(&read_text(&a.ensemble.join("knn_expected.csv"))?)?;
    let (_, clustering) = parse_spectrum(&read_text(&a.ensemble.join("clustering.csv"))?)?;
    let pred = parse_prediction(&read_text(&a.predict)?)?;

    let n = pred.number("n")?.unwrap_or(f64::NAN);
    let z = pred.number("z")?.unwrap_or(f64::NAN);
    let p = pred.number("p")?.unwrap_or(f64::NAN);
    if n != summary.n as f64 || (z - summary.z).abs() > 1e-9 * z.abs().max(1.0) {
        return Err(Error::IncompatibleSummaries(format!(
            "ensemble has N={} z={}, predictions have N={n} z={z}",
            summary.n, summary.z
        )));
    }
    let slope = pred.number("slope")?.unwrap_or(f64::NAN);
    let intercept = pred.number("intercept")?.unwrap_or(f64::NAN);

    writeln!(out, "degree,knn_sim,knn_stderr,knn_pred,knn_dev,c_sim,c_stderr,c_pred,c_dev")?;
    for row in &pred.rows {
        let (Some(k), Some(c)) = (knn.get(row.degree), clustering.get(row.degree)) else { continue };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.degree,
            k.mean,
            k.stderr,
            row.knn,
            deviation(k.mean, row.knn, k.stderr),
            c.mean,
            c.stderr,
            row.clustering,
            deviation(c.mean, row.clustering, c.stderr),
        )?;
    }

    let checks = [
        check("knn_slope", -1.0, a.knn_slope_tol, fit_power_slope(&knn, z, a.min_count), |f| f.slope),
        check("clustering_slope", -1.0, a.c_slope_tol, fit_power_slope(&clustering, p, a.min_count), |f| f.slope),
        check(
            "linear_slope",
            slope,
            a.linear_slope_tol * slope.abs(),
            fit_linear(&knn, &clustering, a.min_count),
            |f| f.slope,
        ),
        check(
            "linear_intercept",
            intercept,
            a.linear_intercept_tol * intercept.abs(),
            fit_linear(&knn, &clustering, a.min_count),
            |f| f.intercept,
        ),
    ];
    let mut ok = true;
    for c in &checks {
        ok &= c.pass;
        let measured = c.measured.map_or("n/a".to_string(), |m| m.to_string());
        writeln!(
            out,
            "# {} {}: measured {measured}, target {} ± {} ({})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.target,
            c.tolerance,
            c.detail
        )?;
    }
    if let (Some(r), Ok(Some(r_pred))) = (summary.mean_r, pred.number("r")) {
        writeln!(out, "# info mean_r: measured {r}, predicted {r_pred}")?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_TOLERANCE })
}
