//! Command-line front end. Machine-readable JSON goes to stdout (or `--out`),
//! a one-line human summary goes to stderr.
//!
//! Exit codes: 0 success, 1 invalid input or failed validation, 2 solver
//! failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::continuity::{sweep, Baseline, DEFAULT_EPS_GRID, DEFAULT_K};
use crate::error::{Result, SpongeError};
use crate::io::{self, Plane};
use crate::measures::{dim_formula, lambda_k, t_of_p, ProbVector};
use crate::model::{fit_base, validate, BaseTriple, SpongeSpec};
use crate::symbolic::{box_count_estimate, enumerate_approximation, pointwise_dim_estimate, sample_word, CoverInput};
use crate::variational::{family_p, vp, vp_grid_oracle, witness_params, FamilyParams, VpOptions};

const DEFAULT_CAP: usize = 1 << 20;

#[derive(Debug, Parser)]
#[command(name = "sponge", version, about = "Dimension of self-affine sponges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct VpFlags {
    #[arg(long, default_value_t = 16)]
    starts: usize,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl VpFlags {
    fn options(&self) -> VpOptions {
        VpOptions { starts: self.starts, max_iter: self.max_iter, tol: self.tol, seed: self.seed }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check every ratio and offset constraint of a spec.
    Validate { spec: PathBuf },
    /// λ_k(p), t(p) and their sum; p defaults to uniform.
    Dim {
        spec: PathBuf,
        #[arg(long)]
        p: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximize the dimension functional over the simplex.
    Vp {
        spec: PathBuf,
        #[command(flatten)]
        flags: VpFlags,
        /// Also run the grid oracle at this resolution.
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the cascade for p(t, ρ); comma lists give a table.
    Family {
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        rho: Vec<f64>,
        /// Writes CSV when the path ends in `.csv`, JSON otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ρ* = log c / log b and t* with α(t*, ρ*) = log b / log a.
    Witness {
        spec: PathBuf,
        /// `a,b,c`; defaults to the fitted base.
        #[arg(long, value_delimiter = ',')]
        base: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a word from the Bernoulli measure of p.
    Sample {
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        p: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo estimate of the local dimension on approximate cubes.
    Estimate {
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        p: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All basic boxes of order n.
    Approx {
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Writes CSV when the path ends in `.csv`, JSON otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Box-counting slope of the order-n approximation (a sanity check).
    Boxcount {
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        scales: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// VP over perturbations of a Sierpinski spec and the Lipschitz fit.
    Sweep {
        base: PathBuf,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        starts: usize,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        /// Row table as CSV; the JSON summary still goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Two-column `eps,max_deviation` CSV.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// SVG of the order-n boxes projected to a coordinate plane.
    Render {
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "xy")]
        plane: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Input(Value),
    Solver(Value),
}

impl From<SpongeError> for Failure {
    fn from(e: SpongeError) -> Self {
        let message = e.to_string();
        match e {
            SpongeError::Structure { path, constraint } => {
                Failure::Input(json!({"path": path, "constraint": constraint, "values": [], "message": message}))
            }
            SpongeError::Packing { path, count, ratio } => Failure::Input(
                json!({"path": path, "constraint": "packing", "values": [count as f64, ratio], "message": message}),
            ),
            SpongeError::NoBracket { stage, .. } => Failure::Solver(json!({"error": "no_bracket", "stage": stage, "message": message})),
            SpongeError::NoRoot { h_lo, h_hi, .. } => {
                Failure::Solver(json!({"error": "no_root", "stage": "lambda2", "values": [h_lo, h_hi], "message": message}))
            }
            SpongeError::DegenerateRange { .. }
            | SpongeError::DegenerateDenominator { .. }
            | SpongeError::InfeasiblePerturbation { .. }
            | SpongeError::ZeroMass { .. } => Failure::Solver(json!({"error": "solver", "message": message})),
            _ => Failure::Input(json!({"path": [], "constraint": "input", "values": [], "message": message})),
        }
    }
}

struct Output {
    body: String,
    summary: String,
}

fn load_checked(path: &PathBuf) -> std::result::Result<SpongeSpec, Failure> {
    let spec = io::load_spec(path)?;
    let report = validate(&spec);
    if let Some(v) = report.violations.first() {
        return Err(Failure::Input(json!({
            "path": v.path, "constraint": v.constraint, "values": v.values, "message": v.message
        })));
    }
    Ok(spec)
}

fn prob_or_uniform(spec: &SpongeSpec, p: &Option<PathBuf>) -> Result<ProbVector> {
    match p {
        Some(path) => io::load_prob(spec, path),
        None => Ok(ProbVector::uniform(spec)),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes") + "\n"
}

fn family_json(spec: &SpongeSpec, f: &FamilyParams) -> Value {
    let mut v = serde_json::to_value(f).expect("family serializes");
    v["p"] = io::prob_json(spec, &f.p);
    v
}

fn is_csv(path: &Option<PathBuf>) -> bool {
    path.as_ref().and_then(|p| p.extension()).is_some_and(|e| e == "csv")
}

fn execute(cmd: Command) -> std::result::Result<(Output, Option<PathBuf>), Failure> {
    let done = |body: String, summary: String, out: Option<PathBuf>| Ok((Output { body, summary }, out));
    match cmd {
        Command::Validate { spec } => {
            let spec = io::load_spec(&spec)?;
            let report = validate(&spec);
            let body = pretty(&serde_json::to_value(&report).expect("report serializes"));
            if !report.ok {
                return Err(Failure::Input(serde_json::from_str(&body).expect("round trip")));
            }
            done(body, "valid".into(), None)
        }
        Command::Dim { spec, p, out } => {
            let spec = load_checked(&spec)?;
            let p = prob_or_uniform(&spec, &p)?;
            let lambdas: Vec<f64> = (1..spec.d()).map(|k| lambda_k(&spec, &p, k)).collect::<Result<_>>()?;
            let t = t_of_p(&spec, &p);
            let dim = dim_formula(&spec, &p)?;
            let body = pretty(&json!({"lambda": lambdas, "t": t, "dim": dim, "p": io::prob_json(&spec, &p)}));
            done(body, format!("dim = {dim}"), out)
        }
        Command::Vp { spec, flags, resolution, out } => {
            let spec = load_checked(&spec)?;
            let r = vp(&spec, &flags.options())?;
            let mut v = serde_json::to_value(&r).expect("vp serializes");
            v["argmax"] = io::prob_json(&spec, &r.argmax);
            if let Some(res) = resolution {
                v["grid_oracle"] = vp_grid_oracle(&spec, res)?.into();
            }
            let summary = format!("VP = {} (spread {}, converged {})", r.value, r.spread, r.converged);
            done(pretty(&v), summary, out)
        }
        Command::Family { spec, t, rho, out } => {
            let spec = load_checked(&spec)?;
            let mut rows = Vec::new();
            for &r in &rho {
                for &tt in &t {
                    rows.push(family_p(&spec, tt, r)?);
                }
            }
            let worst = rows.iter().map(|f| f.max_residual()).fold(0.0, f64::max);
            let summary = format!("{} points, max residual {worst}", rows.len());
            if is_csv(&out) {
                let mut buf = Vec::new();
                io::write_family_csv(&rows, &mut buf)?;
                return done(String::from_utf8(buf).expect("csv is utf-8"), summary, out);
            }
            let v: Value = if rows.len() == 1 {
                family_json(&spec, &rows[0])
            } else {
                rows.iter().map(|f| family_json(&spec, f)).collect()
            };
            done(pretty(&v), summary, out)
        }
        Command::Witness { spec, base, out } => {
            let spec = load_checked(&spec)?;
            let base = match base.as_deref() {
                Some([a, b, c]) => BaseTriple::sierpinski(*a, *b, *c)?,
                Some(_) => return Err(SpongeError::OutOfRange("--base takes a,b,c".into()).into()),
                None => fit_base(&spec)?.base,
            };
            let w = witness_params(&spec, &base)?;
            let dim = dim_formula(&spec, &w.params.p)?;
            let body = pretty(&json!({
                "rho": w.rho, "t": w.t, "target_alpha": w.target_alpha, "dim": dim,
                "params": family_json(&spec, &w.params)
            }));
            done(body, format!("rho* = {}, t* = {}, dim = {dim}", w.rho, w.t), out)
        }
        Command::Sample { spec, n, seed, p, out } => {
            let spec = load_checked(&spec)?;
            let p = prob_or_uniform(&spec, &p)?;
            let w = sample_word(&spec, &p, n, seed)?;
            let words: Vec<String> = w.symbols().iter().map(|&s| spec.leaves()[s].word()).collect();
            done(pretty(&json!({"n": n, "seed": seed, "word": words})), format!("{n} symbols"), out)
        }
        Command::Estimate { spec, n, trials, seed, p, out } => {
            let spec = load_checked(&spec)?;
            let p = prob_or_uniform(&spec, &p)?;
            let est = pointwise_dim_estimate(&spec, &p, n, trials, seed)?;
            let dim = dim_formula(&spec, &p)?;
            let mut v = serde_json::to_value(&est).expect("estimate serializes");
            v["dim_formula"] = dim.into();
            let summary = format!("estimate {} ± {} vs formula {dim}", est.mean, est.stderr);
            done(pretty(&v), summary, out)
        }
        Command::Approx { spec, n, cap, out } => {
            let spec = load_checked(&spec)?;
            let boxes = enumerate_approximation(&spec, n, cap)?;
            let summary = format!("{} boxes", boxes.len());
            if is_csv(&out) {
                let mut buf = Vec::new();
                io::write_boxes_csv(&boxes, &mut buf)?;
                return done(String::from_utf8(buf).expect("csv is utf-8"), summary, out);
            }
            let list: Vec<Value> = boxes.iter().map(|b| json!({"corner": b.corner, "edges": b.edges()})).collect();
            done(pretty(&json!({"n": n, "count": boxes.len(), "boxes": list})), summary, out)
        }
        Command::Boxcount { spec, n, scales, cap, out } => {
            let spec = load_checked(&spec)?;
            let boxes = enumerate_approximation(&spec, n, cap)?;
            let est = box_count_estimate(CoverInput::Boxes(&boxes), &scales)?;
            let summary = format!("box-counting slope {} (sanity check only)", est.slope);
            done(pretty(&serde_json::to_value(&est).expect("estimate serializes")), summary, out)
        }
        Command::Sweep { base, eps, k, seed, starts, tol, out, plot } => {
            let spec = load_checked(&base)?;
            let opts = VpOptions { starts, tol, seed, ..Default::default() };
            let baseline = Baseline::new(&spec, &opts)?;
            let grid = eps.unwrap_or_else(|| DEFAULT_EPS_GRID.to_vec());
            let report = sweep(&baseline, &grid, k, seed, &opts)?;
            if let Some(path) = &out {
                io::write_sweep_csv(&report, std::fs::File::create(path).map_err(SpongeError::from)?)?;
            }
            if let Some(path) = &plot {
                io::write_plot_csv(&report, std::fs::File::create(path).map_err(SpongeError::from)?)?;
            }
            let mut v = json!({
                "base": report.base, "vp0": report.vp0, "c_hat": report.c_hat, "c_fit": report.c_fit,
                "linearity_r2": report.linearity_r2, "max_ratio": report.max_ratio,
                "median_ratio": report.median_ratio, "excluded": report.excluded,
                "rows": report.rows.len(), "max_deviation": report.max_deviation
            });
            if out.is_none() {
                v["table"] = serde_json::to_value(&report.rows).expect("rows serialize");
            }
            let summary = format!("C_hat = {}, r2 = {}, {} rows", report.c_hat, report.linearity_r2, report.rows.len());
            done(pretty(&v), summary, None)
        }
        Command::Render { spec, n, plane, cap, out } => {
            let spec = load_checked(&spec)?;
            let plane: Plane = plane.parse()?;
            let boxes = enumerate_approximation(&spec, n, cap)?;
            let svg = io::render_svg(&boxes, plane)?;
            let summary = format!("{} rectangles from {} boxes", svg.matches("<rect").count(), boxes.len());
            done(svg, summary, out)
        }
    }
}

/// Caps the global worker pool at `SPONGE_THREADS` when set.
pub fn configure_threads() {
    if let Some(n) = std::env::var("SPONGE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // an already-initialized pool keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Runs one command and returns its exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    match execute(cli.command) {
        Ok((output, out)) => {
            let written = match &out {
                Some(path) => std::fs::write(path, &output.body),
                None => stdout.write_all(output.body.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "cannot write output: {e}");
                return 1;
            }
            let _ = writeln!(stderr, "{}", output.summary);
            0
        }
        Err(Failure::Input(v)) => {
            let _ = stdout.write_all(pretty(&v).as_bytes());
            let _ = writeln!(stderr, "invalid input: {}", v["message"].as_str().unwrap_or("validation failed"));
            1
        }
        Err(Failure::Solver(v)) => {
            let _ = stdout.write_all(pretty(&v).as_bytes());
            let _ = writeln!(stderr, "solver failure: {}", v["message"].as_str().unwrap_or(""));
            2
        }
    }
}

/// Entry point over the process arguments and standard streams.
pub fn run() -> i32 {
    configure_threads();
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    run_with(std::env::args_os(), &mut out, &mut err)
}
