//! Command-line front-end: compute quantities, verify the inequalities, sweep
//! over n with rate fits, and run the brute-force oracles.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use widthslab::classes::fit_rate;
use widthslab::config::ClassConfig;
use widthslab::entropy::{exact_small_entropy, EntropyEstimate, EntropyParams, DEFAULT_MESH, DEFAULT_REFINE_ITERS, NET_BUDGET};
use widthslab::geometry::{FunctionClass, SampleDesign};
use widthslab::lp::LpOptions;
use widthslab::recovery::{diameter_interval, sampling_from_diameter, DEFAULT_BUDGET};
use widthslab::report::{write_csv, CertifiedInterval, Quantity, QuantityResult};
use widthslab::theorem::{entropy_with_construction, verify_main_inequality, VerifyParams};
use widthslab::widths::{kolmogorov_upper, verify_width_inequalities, DEFAULT_WIDTH_ITERS};
use widthslab::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "widthslab", version, about = "Sampling numbers, entropy numbers and widths of discretized function classes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One CSV row per (quantity, n)
    Compute(RunArgs),
    /// Check g_n <= (n+1)^{1/p} eps_n and the constructive certificate per n
    Verify(VerifyArgs),
    /// Compute across n, fit log-log rates, write plot data
    Sweep(RunArgs),
    /// Brute-force entropy search and exact-rational LP cross-checks
    Oracle(OracleArgs),
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Class description (JSON)
    #[arg(long)]
    pub class: PathBuf,
    /// n values: "3", "0-3", "1..6" (inclusive) or "0,2,4"
    #[arg(long, default_value = "0")]
    pub n: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// ℓ₁ mesh of the covering net
    #[arg(long, default_value_t = DEFAULT_MESH)]
    pub mesh: f64,
    /// Largest number of designs enumerated exhaustively
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Packing refinement iterations
    #[arg(long, default_value_t = DEFAULT_REFINE_ITERS)]
    pub refine_iters: usize,
    /// Worker threads
    #[arg(long, env = "WIDTHSLAB_THREADS")]
    pub threads: Option<usize>,
    /// Solve small LPs in exact rational arithmetic
    #[arg(long)]
    pub exact_rational: bool,
    /// JSON report path
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated quantities: g, g0, eps, phi, d_ub
    #[arg(long, default_value = "g")]
    pub quantity: String,
    /// CSV output path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fall back to the greedy design search when the budget is exceeded
    #[arg(long)]
    pub heuristic: bool,
    /// Fill the runtime_ms column (output is then no longer byte-stable)
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Extra packing witness points (JSON list of vectors, or {"points": [...]})
    #[arg(long)]
    pub packing: Option<PathBuf>,
    /// Numerical guard of the construction
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub heuristic: bool,
}

#[derive(Debug, Args, Clone)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: Common,
    /// Candidate centers (JSON list of vectors); defaults to vertices, their
    /// halves and the origin
    #[arg(long)]
    pub grid: Option<PathBuf>,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget(_) => EXIT_BUDGET,
        Error::Solver(_) => EXIT_SOLVER,
        _ => EXIT_CONFIG,
    }
}

pub fn parse_n_range(s: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::Parameter(format!("malformed n range {s:?}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let bounds = part.split_once("..").or_else(|| part.split_once('-'));
        match bounds {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() {
        return Err(Error::Parameter("n range is empty".into()));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn parse_quantities(s: &str) -> Result<Vec<Quantity>, Error> {
    let qs: Vec<Quantity> = s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect::<Result<_, _>>()?;
    if qs.is_empty() {
        return Err(Error::Parameter("no quantity requested".into()));
    }
    Ok(qs)
}

fn load_points(path: &Path) -> Result<Vec<Vec<f64>>, Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Points {
        Bare(Vec<Vec<f64>>),
        Wrapped { points: Vec<Vec<f64>> },
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parameter(format!("cannot read {}: {e}", path.display())))?;
    match serde_json::from_str(&text).map_err(|e| Error::Parameter(format!("malformed point list {}: {e}", path.display())))? {
        Points::Bare(p) | Points::Wrapped { points: p } => Ok(p),
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    match path {
        Some(p) => Ok(Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Parameter(format!("cannot create {}: {e}", p.display())))?,
        ))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn write_json(path: Option<&Path>, value: &serde_json::Value) -> Result<(), Error> {
    let mut out = open_out(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Parameter(format!("JSON write failed: {e}")))?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| Error::Parameter(format!("write failed: {e}")))
}

struct Setup {
    id: String,
    class: FunctionClass,
    ns: Vec<usize>,
    opts: LpOptions,
    entropy: EntropyParams,
}

fn setup(c: &Common) -> Result<Setup, Error> {
    if let Some(t) = c.threads {
        if t == 0 {
            return Err(Error::Parameter("--threads must be positive".into()));
        }
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    if !(c.mesh > 0.0) || c.budget == 0 {
        return Err(Error::Parameter("mesh and budget must be positive".into()));
    }
    let (id, class) = ClassConfig::load(&c.class)?.build()?;
    class.verify_bounded()?;
    let opts = if c.exact_rational { LpOptions::exact() } else { LpOptions::default() };
    let entropy = EntropyParams { mesh: Some(c.mesh), seed: c.seed, refine_iters: c.refine_iters, net_budget: NET_BUDGET, opts };
    Ok(Setup { id, class, ns: parse_n_range(&c.n)?, opts, entropy })
}

struct Computed {
    rows: Vec<(String, QuantityResult)>,
    certificates: Vec<serde_json::Value>,
}

fn compute_rows(s: &Setup, quantities: &[Quantity], heuristic: bool, budget: u64, seed: u64) -> Result<Computed, Error> {
    let mut rows = Vec::new();
    let mut certificates = Vec::new();
    let mut g0_cache: BTreeMap<usize, QuantityResult> = BTreeMap::new();
    let mut eps_cache: BTreeMap<usize, EntropyEstimate> = BTreeMap::new();
    for &q in quantities {
        for &n in &s.ns {
            let start = std::time::Instant::now();
            let mut result = match q {
                Quantity::G | Quantity::G0 => {
                    let g0 = match g0_cache.entry(n) {
                        Entry::Occupied(e) => e.get().clone(),
                        Entry::Vacant(v) => v.insert(diameter_interval(&s.class, n, budget, heuristic, s.opts)?).clone(),
                    };
                    if q == Quantity::G {
                        sampling_from_diameter(&g0)?
                    } else {
                        g0
                    }
                }
                Quantity::Eps | Quantity::Phi => {
                    if let Entry::Vacant(slot) = eps_cache.entry(n) {
                        let e = entropy_with_construction(&s.class, n, &s.entropy)?;
                        certificates.push(json!({
                            "n": n,
                            "interval": e.interval,
                            "sandwich_ratio": e.sandwich_ratio(),
                            "packing": e.packing.to_json(),
                            "covers": e.covers.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
                        }));
                        slot.insert(e);
                    }
                    let e = &eps_cache[&n];
                    let value = if q == Quantity::Eps {
                        e.interval.clone()
                    } else {
                        CertifiedInterval::new(e.interval.lo, e.interval.hi, e.interval.lo_method.clone(), "eps-upper")?
                    };
                    QuantityResult { quantity: q, n, method: value.method(), value, best_design: None, runtime_ms: 0, seed }
                }
                Quantity::DUb => {
                    let k = kolmogorov_upper(&s.class, n, DEFAULT_WIDTH_ITERS, seed, s.opts)?;
                    let value = CertifiedInterval::new(0.0, k.worst_error, "none", "subspace")?;
                    QuantityResult { quantity: q, n, method: format!("subspace:{}", k.origin), value, best_design: None, runtime_ms: 0, seed }
                }
            };
            result.seed = seed;
            result.runtime_ms = start.elapsed().as_millis();
            rows.push((s.id.clone(), result));
        }
    }
    Ok(Computed { rows, certificates })
}

fn cmd_compute(a: &RunArgs) -> Result<i32, Error> {
    let s = setup(&a.common)?;
    let quantities = parse_quantities(&a.quantity)?;
    let c = compute_rows(&s, &quantities, a.heuristic, a.common.budget, a.common.seed)?;
    write_csv(open_out(a.out.as_deref())?, &c.rows, a.timing)?;
    if let Some(path) = &a.common.report {
        write_json(Some(path), &json!({ "class_id": s.id, "entropy_certificates": c.certificates }))?;
    }
    Ok(EXIT_OK)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_sweep(a: &RunArgs) -> Result<i32, Error> {
    let s = setup(&a.common)?;
    let quantities = parse_quantities(&a.quantity)?;
    let out = a.out.as_deref().ok_or_else(|| Error::Parameter("sweep needs --out".into()))?;
    let c = compute_rows(&s, &quantities, true, a.common.budget, a.common.seed)?;
    write_csv(open_out(Some(out))?, &c.rows, a.timing)?;

    let io = |e: io::Error| Error::Parameter(format!("write failed: {e}"));
    let mut rates = open_out(Some(&with_suffix(out, ".rates.csv")))?;
    let mut plot = open_out(Some(&with_suffix(out, ".plot.txt")))?;
    writeln!(rates, "class_id,quantity,exponent,intercept,residual,n_used,note").map_err(io)?;
    let quoted = format!("\"{}\"", s.id.replace('"', "\"\""));
    for &q in &quantities {
        let points: Vec<(usize, f64)> = c
            .rows
            .iter()
            .filter(|(_, r)| r.quantity == q && r.n > 0)
            .map(|(_, r)| (r.n, if matches!(q, Quantity::Eps | Quantity::Phi) { r.value.midpoint() } else { r.value.hi }))
            .filter(|(_, v)| *v > 0.0)
            .collect();
        writeln!(plot, "# {} {}: log(n) log(value)", s.id, q).map_err(io)?;
        for (n, v) in &points {
            writeln!(plot, "{:.16e} {:.16e}", (*n as f64).ln(), v.ln()).map_err(io)?;
        }
        writeln!(plot).map_err(io)?;
        let ns: Vec<usize> = points.iter().map(|p| p.0).collect();
        let vs: Vec<f64> = points.iter().map(|p| p.1).collect();
        match fit_rate(&ns, &vs) {
            Ok(f) => writeln!(rates, "{},{},{:.16e},{:.16e},{:.16e},{},", quoted, q, f.exponent, f.intercept, f.residual, f.n_used),
            Err(e) => writeln!(rates, "{},{},,,,{},\"fit skipped: {}\"", quoted, q, points.len(), e.to_string().replace('"', "'")),
        }
        .map_err(io)?;
    }
    rates.flush().map_err(io)?;
    plot.flush().map_err(io)?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32, Error> {
    let s = setup(&a.common)?;
    let packing = a.packing.as_deref().map(load_points).transpose()?;
    let params = VerifyParams { delta: a.delta, budget: a.common.budget, heuristic: a.heuristic, entropy: s.entropy, packing };
    let mut reports = Vec::new();
    let mut widths = Vec::new();
    let mut all_passed = true;
    for &n in &s.ns {
        let r = verify_main_inequality(&s.class, n, &params)?;
        all_passed &= r.passed;
        if s.class.is_convex() && s.class.vertex_list().is_some() && r.g_exact {
            let w = verify_width_inequalities(&s.class, n, a.common.budget, Some(r.eps.hi), a.common.seed, s.opts)?;
            all_passed &= w.passed;
            widths.push(w);
        }
        let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        eprintln!(
            "{} n={n}: g={:.6} eps=[{:.6}, {:.6}] factor={:.4}{} {}",
            s.id,
            r.g.hi,
            r.eps.lo,
            r.eps.hi,
            r.factor,
            if r.vacuous { " (vacuous construction)" } else { "" },
            if failed.is_empty() { "PASS".to_string() } else { format!("FAIL [{}]", failed.join(", ")) }
        );
        reports.push(r);
    }
    let value = json!({ "class_id": s.id, "passed": all_passed, "results": reports, "widths": widths });
    write_json(a.common.report.as_deref(), &value)?;
    Ok(if all_passed { EXIT_OK } else { EXIT_FAILED })
}

fn default_grid(class: &FunctionClass) -> Result<Vec<Vec<f64>>, Error> {
    let verts = class.vertex_list().ok_or_else(|| Error::Unsupported("oracle needs a vertex list or --grid".into()))?;
    let mut grid = vec![vec![0.0; class.dim()]];
    for v in &verts {
        grid.push(v.iter().map(|x| x / 2.0).collect());
        grid.push(v.clone());
    }
    grid.dedup();
    grid.truncate(20);
    Ok(grid)
}

fn cmd_oracle(a: &OracleArgs) -> Result<i32, Error> {
    let s = setup(&a.common)?;
    let grid = match &a.grid {
        Some(p) => load_points(p)?,
        None => default_grid(&s.class)?,
    };
    let m = s.class.dim();
    let mut out = Vec::new();
    let mut agree = true;
    for &n in &s.ns {
        let small = exact_small_entropy(&s.class, n, &grid, a.common.mesh)?;
        // float and exact-rational pair diameters over all n-designs
        let mut worst_gap = 0.0f64;
        let exact_ok = s.class.effective_options(LpOptions::exact()).exact;
        if exact_ok && n <= m {
            for design in designs(m, n) {
                let f = s.class.pair_diameter(&design, LpOptions::default())?;
                let e = s.class.pair_diameter(&design, LpOptions::exact())?;
                worst_gap = worst_gap.max((f - e).abs());
            }
            agree &= worst_gap <= 1e-8;
        }
        out.push(json!({
            "n": n,
            "small_entropy_radius": small.radius,
            "net_slack": small.net_slack,
            "centers": small.centers,
            "exact_rational_checked": exact_ok,
            "float_vs_exact_max_gap": worst_gap,
        }));
    }
    write_json(a.common.report.as_deref(), &json!({ "class_id": s.id, "agree": agree, "results": out }))?;
    Ok(if agree { EXIT_OK } else { EXIT_FAILED })
}

fn designs(m: usize, n: usize) -> Vec<SampleDesign> {
    fn rec(start: usize, m: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<SampleDesign>) {
        if left == 0 {
            out.push(SampleDesign::new(cur.clone(), m).expect("increasing nodes"));
            return;
        }
        for i in start..=m - left {
            cur.push(i);
            rec(i + 1, m, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, n, &mut Vec::new(), &mut out);
    out
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_ranges() {
        assert_eq!(parse_n_range("3").unwrap(), vec![3]);
        assert_eq!(parse_n_range("1-3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_n_range("0..2").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_n_range("0..=2,5").unwrap(), vec![0, 1, 2, 5]);
        assert!(parse_n_range("").is_err());
        assert!(parse_n_range("3-1").is_err());
        assert!(parse_n_range("x").is_err());
    }

    #[test]
    fn quantities_and_codes() {
        assert_eq!(parse_quantities("g,eps").unwrap(), vec![Quantity::G, Quantity::Eps]);
        assert!(parse_quantities("g,zz").is_err());
        assert_eq!(exit_code(&Error::Budget("x".into())), EXIT_BUDGET);
        assert_eq!(exit_code(&Error::Solver("x".into())), EXIT_SOLVER);
        assert_eq!(exit_code(&Error::Parameter("x".into())), EXIT_CONFIG);
    }

    #[test]
    fn design_listing() {
        assert_eq!(designs(4, 2).len(), 6);
        assert_eq!(designs(3, 0).len(), 1);
    }
}
