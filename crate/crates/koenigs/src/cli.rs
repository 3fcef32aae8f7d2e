//! The `koenigs-lab` command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use koenigs_core::classifier::{affine_minorant, classify};
use koenigs_core::completeness::{decide, decide_topological, predicted_components};
use koenigs_core::exp_approx::{
    discretize_measure, half_plane_grid, least_squares_fit, log_domain_pipeline, phi_beta_r, strip_probe_points,
    ApproxError, Family, FitConfig,
};
use koenigs_core::features::analyze;
use koenigs_core::frequencies::{canonical_of, convexity_violations, frequency_grid, lambda_infty, CanonicalDomain, Membership};
use koenigs_core::geometry::{default_window, rasterize, topology, OracleError, Window};
use koenigs_core::{DefiningFunction, Tri};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::artifacts;
use crate::domain_file::{self, FileError};
use crate::report;

#[derive(Parser, Debug)]
#[command(name = "koenigs-lab", version, about = "Completeness of frequencies for starlike-at-infinity domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Exit with status 2 when a verdict is unknown.
    #[arg(long)]
    pub strict: bool,
    /// Output file (JSON), or base path for multi-file artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for randomized sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Semigroup class and the containing model set.
    Classify {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Boundary features read off the defining function.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Weak-star and p-completeness verdicts.
    Decide {
        file: PathBuf,
        #[arg(long)]
        p: Option<f64>,
        /// Also run the raster oracle and compare.
        #[arg(long)]
        cross_check: bool,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<Window>,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Frequency sets: sampled membership on a grid of complex frequencies.
    Freq {
        /// A canonical domain name (`half-plane-right`, `half-plane-upper`,
        /// `strip-width-pi`, `log-domain[:a,b]`, `eta-domain[:a]`) or a domain file.
        #[arg(long)]
        domain: String,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// `re0,re1,im0,im1,n`
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "-2,0.5,-1,1,11")]
        grid: Grid,
        /// Extra uniformly random frequencies inside the grid box.
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Raster oracle: image of the domain and topology of its closure.
    Oracle {
        file: PathBuf,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<Window>,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Exponential-sum approximation demos; CSV of (budget, error).
    Approx {
        #[arg(long, value_enum)]
        demo: Demo,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Demo {
    Halfplane,
    Strip,
    Logdomain,
    Eta,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub n: usize,
}

fn numbers(s: &str, k: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("{}: {}", t, e))).collect::<Result<_, _>>()?;
    if v.len() != k || v.iter().any(|x| !x.is_finite()) {
        return Err(format!("expected {} comma-separated finite numbers", k));
    }
    Ok(v)
}

pub fn parse_window(s: &str) -> Result<Window, String> {
    let v = numbers(s, 4)?;
    if !(v[0] < v[1] && v[2] < v[3]) {
        return Err("window needs x0 < x1 and y0 < y1".into());
    }
    Ok(Window { x_min: v[0], x_max: v[1], y_min: v[2], y_max: v[3] })
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let v = numbers(s, 5)?;
    let n = v[4] as usize;
    if v[4] != n as f64 || n == 0 || n > 401 || !(v[0] <= v[1] && v[2] <= v[3]) {
        return Err("grid needs re0 <= re1, im0 <= im1 and an integer 1 <= n <= 401".into());
    }
    Ok(Grid { re: (v[0], v[1]), im: (v[2], v[3]), n })
}

pub fn parse_canonical(s: &str) -> Option<CanonicalDomain> {
    let (name, args) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
    let params = |k: usize| args.map_or(Ok(None), |a| numbers(a, k).map(Some)).ok();
    let d = match name {
        "half-plane-right" | "halfplane" => CanonicalDomain::HalfPlaneRight,
        "half-plane-upper" => CanonicalDomain::HorizontalHalfPlaneUpper,
        "strip-width-pi" | "strip" => CanonicalDomain::StripWidthPi,
        "log-domain" => match params(2)? {
            Some(v) => CanonicalDomain::LogDomain { a: v[0], b: v[1] },
            None => CanonicalDomain::LogDomain { a: 0.5, b: 0.0 },
        },
        "eta-domain" => CanonicalDomain::EtaDomain { a: params(1)?.map_or(1.0, |v| v[0]) },
        _ => return None,
    };
    d.validate().ok().map(|_| d)
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}{source}")]
    Domain { path: String, source: FileError },
    #[error("{0}")]
    Oracle(String),
    #[error("{0}")]
    Approx(#[from] ApproxError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Domain { .. } => 65,
            CliError::Io { .. } => 74,
            CliError::Oracle(_) | CliError::Approx(_) => 1,
        }
    }
}

fn oracle_error(e: OracleError) -> CliError {
    let hint = match e {
        OracleError::WindowTooSmall(_) => {
            " (pass a larger --window x0,x1,y0,y1: finite ends of I must lie strictly inside, and the boundary must stay left of x1)"
        }
        OracleError::Disjoint => " (the window misses the domain; move it right or enlarge it)",
        _ => "",
    };
    CliError::Oracle(format!("{}{}", e, hint))
}

fn load(path: &Path) -> Result<DefiningFunction, CliError> {
    let s = fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
    domain_file::from_str(&s).map_err(|e| CliError::Domain { path: format!("{}#", path.display()), source: e })
}

/// Files written and the text for standard output.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub files: Vec<(PathBuf, Vec<u8>)>,
    pub unknown: bool,
}

impl Outcome {
    fn json(v: &Value, out: &Option<PathBuf>, unknown: bool) -> Outcome {
        let s = report::to_string(v);
        match out {
            Some(p) => Outcome { stdout: String::new(), files: vec![(p.clone(), s.into_bytes())], unknown },
            None => Outcome { stdout: s, files: Vec::new(), unknown },
        }
    }
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Runs a parsed command without touching the filesystem for output.
pub fn execute(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Classify { file, common } => {
            let psi = load(&file)?;
            let class = classify(&psi);
            let m = affine_minorant(&psi);
            let mut body = report::class(&class, Some(&m));
            if let Some((slope, c)) = m.minorant {
                body.insert("minorant_check".into(), minorant_check(&psi, slope, c, common.seed));
            }
            let unknown = m.status == Tri::Unknown && class.kind.name() == "parabolic-zero-step";
            Ok(Outcome::json(&report::envelope("classify", body), &common.out, unknown))
        }
        Command::Analyze { file, common } => {
            let psi = load(&file)?;
            let f = analyze(&psi);
            let unknown = !f.unknown_at.is_empty();
            Ok(Outcome::json(&report::envelope("analyze", report::features(&f)), &common.out, unknown))
        }
        Command::Decide { file, p, cross_check, window, resolution, common } => {
            if let Some(p) = p {
                if !(p >= 1.0 && p.is_finite()) {
                    return Err(CliError::Usage("--p must be a finite number >= 1".into()));
                }
            }
            let psi = load(&file)?;
            let v = decide(&psi, p);
            let mut body = report::verdict(&v);
            let mut unknown = v.weak_star.status == Tri::Unknown || v.p.as_ref().is_some_and(|d| d.1.status == Tri::Unknown);
            if cross_check {
                let w = window.unwrap_or_else(|| default_window(&psi));
                let t = decide_topological(&psi, w, resolution).map_err(oracle_error)?;
                let agrees = if t.verdict == Tri::Unknown || v.weak_star.status == Tri::Unknown {
                    Tri::Unknown
                } else {
                    Tri::from_bool(t.verdict == v.weak_star.status)
                };
                unknown |= t.verdict == Tri::Unknown;
                body.insert("cross_check".into(), report::topological(&t, predicted_components(&psi), agrees));
            }
            Ok(Outcome::json(&report::envelope("decide", body), &common.out, unknown))
        }
        Command::Freq { domain, p, grid, random, common } => freq(&domain, p, grid, random, common),
        Command::Oracle { file, window, resolution, common } => {
            let psi = load(&file)?;
            let w = window.unwrap_or_else(|| default_window(&psi));
            let t = topology(&psi, w, resolution).map_err(oracle_error)?;
            let g = rasterize(&psi, w, resolution).map_err(oracle_error)?;
            let mut body = Map::new();
            body.insert("window".into(), json!([w.x_min, w.x_max, w.y_min, w.y_max]));
            body.insert("resolution".into(), json!(resolution));
            body.insert("int_closure_ok".into(), report::tri(t.int_closure_ok));
            body.insert("components".into(), json!(t.components));
            body.insert("component_counts".into(), json!([t.component_counts.0, t.component_counts.1]));
            body.insert("violations".into(), json!([t.violations.0, t.violations.1]));
            body.insert("inside_cells".into(), json!(g.inside_count()));
            body.insert("predicted_components".into(), json!(predicted_components(&psi)));
            let summary = report::to_string(&report::envelope("oracle", body));
            let unknown = t.int_closure_ok == Tri::Unknown;
            match common.out {
                Some(base) => Ok(Outcome {
                    stdout: String::new(),
                    files: vec![(with_ext(&base, "json"), summary.into_bytes()), (with_ext(&base, "pgm"), artifacts::pgm(&g))],
                    unknown,
                }),
                None => Ok(Outcome { stdout: summary, files: Vec::new(), unknown }),
            }
        }
        Command::Approx { demo, budget, n, common } => approx(demo, budget, n, common),
    }
}

fn minorant_check(psi: &DefiningFunction, m: f64, c: f64, seed: u64) -> Value {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = psi.lo().to_f64().max(-1e4);
    let hi = psi.hi().to_f64().min(1e4);
    let mut checked = 0usize;
    let mut failures = 0usize;
    for _ in 0..10_000 {
        let y = rng.gen_range(lo..hi);
        if !psi.in_interval(y) {
            continue;
        }
        if let Ok(v) = psi.value(y) {
            checked += 1;
            if v.to_f64() < m * y + c {
                failures += 1;
            }
        }
    }
    json!({ "seed": seed, "samples": checked, "failures": failures })
}

fn freq(domain: &str, p: f64, grid: Grid, random: usize, common: Common) -> Result<Outcome, CliError> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(CliError::Usage("--p must be a finite number >= 1".into()));
    }
    let mut body = Map::new();
    body.insert("p".into(), json!(p));
    let canonical = match parse_canonical(domain) {
        Some(d) => Some(d),
        None => {
            let psi = load(Path::new(domain))?;
            body.insert("lambda_infinity".into(), report::lambda_infty(&lambda_infty(&psi)));
            canonical_of(&psi)
        }
    };
    body.insert("domain".into(), json!(canonical.map(|d| d.name())));
    let mut samples: Vec<(C64, Membership)> = Vec::new();
    if let Some(dom) = canonical {
        let mut pts = frequency_grid(grid.re, grid.im, grid.n);
        let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
        for _ in 0..random {
            let re = if grid.re.0 < grid.re.1 { rng.gen_range(grid.re.0..grid.re.1) } else { grid.re.0 };
            let im = if grid.im.0 < grid.im.1 { rng.gen_range(grid.im.0..grid.im.1) } else { grid.im.0 };
            pts.push(C64::new(re, im));
        }
        samples = pts.par_iter().map(|&l| (l, koenigs_core::frequencies::hardy_membership(l, dom, p))).collect();
        body.insert("grid".into(), json!({ "re": [grid.re.0, grid.re.1], "im": [grid.im.0, grid.im.1], "n": grid.n, "random": random, "seed": common.seed }));
        body.insert("counts".into(), report::membership_counts(&samples));
        body.insert("convexity_violations".into(), json!(convexity_violations(&samples).len()));
    }
    let rows: Vec<Vec<String>> =
        samples.iter().map(|(z, m)| vec![z.re.to_string(), z.im.to_string(), m.as_str().to_string()]).collect();
    let unknown = samples.iter().any(|s| s.1 == Membership::Inconclusive);
    Ok(match common.out {
        Some(base) => {
            let csv = artifacts::csv_table(&["re", "im", "status"], &rows);
            let summary = report::to_string(&report::envelope("freq", body));
            Outcome {
                stdout: String::new(),
                files: vec![(with_ext(&base, "json"), summary.into_bytes()), (with_ext(&base, "csv"), csv.into_bytes())],
                unknown,
            }
        }
        None => {
            // No artifact path: the samples go inline so stdout stays a single JSON document.
            body.insert(
                "samples".into(),
                Value::Array(samples.iter().map(|(z, m)| json!({ "lambda": report::complex(*z), "status": m.as_str() })).collect()),
            );
            Outcome { stdout: report::to_string(&report::envelope("freq", body)), files: Vec::new(), unknown }
        }
    })
}

/// `(budget, error)` rows for one demo.
pub fn demo_rows(demo: Demo, budget: Option<usize>, n: Option<usize>) -> Result<Vec<(usize, f64)>, CliError> {
    let doubling = |lo: usize, hi: usize| {
        let mut v = Vec::new();
        let mut k = lo;
        while k < hi {
            v.push(k);
            k *= 2;
        }
        v.push(hi);
        v
    };
    let cfg = FitConfig::default();
    Ok(match demo {
        Demo::Halfplane => {
            let m = budget.unwrap_or(64).clamp(1, 512);
            let target = |z: C64| (z + 1.0).powi(-2);
            doubling(8.min(m), m)
                .into_iter()
                .map(|k| {
                    least_squares_fit(&target, CanonicalDomain::HalfPlaneRight, &half_plane_grid(k), Family::HalfPlane, cfg)
                        .map(|f| (k, f.fit.error))
                })
                .collect::<Result<_, _>>()?
        }
        Demo::Strip => {
            let top = n.or(budget).unwrap_or(256).clamp(1, 1 << 16);
            let beta = C64::new(2.0, 0.0);
            doubling(16.min(top), top)
                .into_iter()
                .map(|k| {
                    let m = discretize_measure(&|t: f64| C64::new((-2.0 * t).exp(), 0.0), 5.0, k)?;
                    let s = m.to_strip_sum();
                    let e = strip_probe_points().iter().map(|&z| (s.eval(z) - phi_beta_r(beta, 5.0, z)).norm()).fold(0.0, f64::max);
                    Ok((k, e))
                })
                .collect::<Result<_, ApproxError>>()?
        }
        Demo::Logdomain => {
            let degree = budget.unwrap_or(8).clamp(1, 12);
            let atoms = n.unwrap_or(64).clamp(1, 4096);
            let dom = CanonicalDomain::LogDomain { a: 0.5, b: 0.0 };
            (1..=degree)
                .map(|d| {
                    log_domain_pipeline(&|z: C64| (z + 3.0).powi(-2), dom, 3.0, d, atoms, cfg).map(|r| (r.atoms, r.exp_error))
                })
                .collect::<Result<_, _>>()?
        }
        Demo::Eta => {
            // Frequencies stay inside (-1/2, 0], the L^2 frequency interval of this domain.
            let m = budget.unwrap_or(64).clamp(1, 512);
            let dom = CanonicalDomain::EtaDomain { a: 1.0 };
            doubling(8.min(m), m)
                .into_iter()
                .map(|k| {
                    let freqs: Vec<C64> = (1..=k).map(|j| C64::new(-0.49 * j as f64 / k as f64, 0.0)).collect();
                    least_squares_fit(&|z: C64| (z + 3.0).powi(-2), dom, &freqs, Family::HalfPlane, cfg).map(|f| (k, f.fit.error))
                })
                .collect::<Result<_, _>>()?
        }
    })
}

fn approx(demo: Demo, budget: Option<usize>, n: Option<usize>, common: Common) -> Result<Outcome, CliError> {
    let rows = demo_rows(demo, budget, n)?;
    let csv = artifacts::csv_table(&["budget", "error"], &rows.iter().map(|&(b, e)| vec![b.to_string(), e.to_string()]).collect::<Vec<_>>());
    let name = format!("{:?}", demo).to_lowercase();
    Ok(match common.out {
        Some(base) => {
            let pts: Vec<(f64, f64)> = rows.iter().map(|&(b, e)| (b as f64, e)).collect();
            let svg = artifacts::convergence_svg(&format!("approx {}", name), &pts);
            Outcome {
                stdout: String::new(),
                files: vec![(with_ext(&base, "csv"), csv.into_bytes()), (with_ext(&base, "svg"), svg.into_bytes())],
                unknown: false,
            }
        }
        None => Outcome { stdout: csv, files: Vec::new(), unknown: false },
    })
}

/// Parses arguments, runs, writes artifacts and returns the exit status.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let strict = match &cli.command {
        Command::Classify { common, .. }
        | Command::Analyze { common, .. }
        | Command::Decide { common, .. }
        | Command::Freq { common, .. }
        | Command::Oracle { common, .. }
        | Command::Approx { common, .. } => common.strict,
    };
    match execute(cli) {
        Ok(out) => {
            for (path, bytes) in &out.files {
                if let Err(e) = fs::write(path, bytes) {
                    let _ = writeln!(stderr, "error: {}: {}", path.display(), e);
                    return 74;
                }
            }
            let _ = stdout.write_all(out.stdout.as_bytes());
            if strict && out.unknown {
                let _ = writeln!(stderr, "strict: at least one verdict is unknown");
                return 2;
            }
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e);
            e.exit_code()
        }
    }
}
