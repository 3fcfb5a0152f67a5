//! The `extham` command-line front end.
//!
//! `main` only forwards to [`run`], which returns the process exit code:
//! 0 pass, 1 usage or parse error, 2 invalid seed, 3 verification failure,
//! 4 unsupported regime.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::catalog;
use crate::error::{Error, Result};
use crate::expr::{parse, rat, Chart, Expr, PhasePoint, Rational, Symbol};
use crate::geometry::Matrix;
use crate::extension::{build_extended, Extended, ExtensionSpec, FirstIntegral, SeedSystem};
use crate::quantum::{self, ChainMode, QuantumSystem, Stencil, WarpedConfig};
use crate::sampling::SamplerConfig;
use crate::tagged_trig::GammaSpec;
use crate::verification::{self, CheckResult, Dopri5, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SEED: i32 = 2;
pub const EXIT_FAIL: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;

/// Environment variable overriding the sampler seed.
pub const SEED_ENV: &str = "EXTHAM_SEED";

#[derive(Parser, Debug)]
#[command(name = "extham", version, about = "Extended Hamiltonians: integrals, ladders and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build H and its characteristic integral; write H.txt, K.txt, meta.json.
    Extend(ExtendArgs),
    /// Run the verification battery and write a JSON report.
    Verify(VerifyArgs),
    /// Integrate a trajectory and write it as CSV.
    Orbit(OrbitArgs),
    /// Warped-symmetry residuals of the quantum extension.
    Quantum(QuantumArgs),
    /// List the built-in systems.
    CatalogList,
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    /// Built-in system name (see `catalog-list`).
    #[arg(long, conflicts_with = "def", required_unless_present = "def")]
    pub catalog: Option<String>,
    /// Definition file with [chart], [metric], [potential], [G], [constants].
    #[arg(long)]
    pub def: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// `Ω`, any expression in the grammar.
    #[arg(long, default_value = "0")]
    pub omega: String,
    /// Sampler seed (decimal or 0x-hex); `EXTHAM_SEED` takes precedence.
    #[arg(long)]
    pub seed: Option<String>,
}

#[derive(Args, Debug)]
pub struct ExtendArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Comma-separated `k = m/n` values; one sub-report each.
    #[arg(long, value_delimiter = ',')]
    pub sweep_k: Vec<String>,
    /// Verify this integral (expression text) instead of the generated one.
    #[arg(long)]
    pub integral: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long, default_value_t = 20.0)]
    pub t_end: f64,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Initial point, `name=value` pairs separated by commas.
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long, default_value_t = 200.0)]
    pub t_end: f64,
    /// Scaled return distance counted as closure.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    /// CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary path (closure, truncation).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ChainArg {
    Exact,
    Grid,
}

#[derive(Args, Debug)]
pub struct QuantumArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value = "1")]
    pub hbar: String,
    /// Number of lowest (λ, E) pairs to check.
    #[arg(long, default_value_t = 2)]
    pub pairs: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [128usize, 256, 512])]
    pub grids: Vec<usize>,
    #[arg(long, value_enum, default_value = "exact")]
    pub chain: ChainArg,
    /// Skip the non-eigenfunction control.
    #[arg(long)]
    pub no_control: bool,
    /// Write `X̂f` of the first pair on the coarsest grid as CSV.
    #[arg(long)]
    pub grid_csv: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidSeed(_) => EXIT_SEED,
        Error::Unsupported(_) => EXIT_UNSUPPORTED,
        Error::Numerical(_) => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}

/// Parse `args` (program name first) and run; diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    match dispatch(cli.command, env_seed.as_deref(), out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, env_seed: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Extend(a) => cmd_extend(&a, env_seed, out, err),
        Command::Verify(a) => cmd_verify(&a, env_seed, out, err),
        Command::Orbit(a) => cmd_orbit(&a, env_seed, out, err),
        Command::Quantum(a) => cmd_quantum(&a, env_seed, out),
        Command::CatalogList => {
            for name in catalog::NAMES {
                writeln!(out, "{name}")?;
            }
            Ok(EXIT_OK)
        }
    }
}

/// `123` or `0x5EED`.
pub fn parse_seed(s: &str) -> Result<u64> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| Error::invalid(format!("`{s}` is not a sampler seed")))
}

/// A resolved system: the extension plus what the checks need.
#[derive(Clone, Debug)]
pub struct System {
    pub name: String,
    pub ext: Extended,
    pub angular: Option<Symbol>,
}

impl System {
    pub fn sampler(&self) -> SamplerConfig {
        self.ext.sampler()
    }
}

/// Build the system named by `args` for indices `(m, n)`.
pub fn resolve(args: &SystemArgs, m: u32, n: u32, env_seed: Option<&str>) -> Result<System> {
    let omega = parse(&args.omega, &Chart::standard(1))?.simplify();
    let mut sys = match (&args.catalog, &args.def) {
        (Some(name), None) => {
            let entry = catalog::lookup(name, m, n, omega)?;
            let ext = entry.extended()?;
            System {
                name: entry.name.clone(),
                ext,
                angular: entry.angular.clone(),
            }
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path)?;
            let def = Definition::parse(&text)?;
            let seed = def.seed(&path_name(path))?;
            let spec = ExtensionSpec::new(m, n, omega, def.gamma.clone())?;
            System {
                name: seed.name.clone(),
                ext: build_extended(&seed, &spec)?,
                angular: def.periodic.clone(),
            }
        }
        _ => return Err(Error::invalid("give exactly one of --catalog or --def")),
    };
    if let Some(s) = env_seed.or(args.seed.as_deref()) {
        sys.ext.seed.sampler.seed = parse_seed(s)?;
    }
    Ok(sys)
}

fn path_name(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "seed".into())
}

/// Contents of a definition file.
///
/// ```text
/// [chart]
/// phi, pphi, periodic
/// [metric]
/// 1
/// [potential]
/// (c1 + c2*cos(phi))/sin(phi)^2
/// [G]
/// sin(phi)*pphi
/// [constants]
/// c = 1
/// c0 = 0
/// C = 0
/// c1 = 3/5
/// ```
///
/// The metric is given row by row with entries separated by commas. In
/// `[constants]`, `c`, `c0`, `C` and `u0` set the seed and `γ`; every other
/// name is substituted into the potential and `G`.
#[derive(Clone, Debug)]
pub struct Definition {
    pub chart: Chart,
    pub periodic: Option<Symbol>,
    pub metric: Matrix,
    pub potential: Expr,
    pub g: Expr,
    pub c: Rational,
    pub c0: Rational,
    pub gamma: GammaSpec,
}

const SECTIONS: [&str; 5] = ["chart", "metric", "potential", "G", "constants"];

fn at_line(line: usize, e: Error) -> Error {
    Error::invalid(format!("line {line}: {e}"))
}

impl Definition {
    pub fn parse(text: &str) -> Result<Definition> {
        let mut sections: BTreeMap<&str, Vec<(usize, &str)>> = BTreeMap::new();
        let mut current: Option<&str> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                let known = SECTIONS
                    .iter()
                    .find(|s| **s == name)
                    .ok_or_else(|| Error::invalid(format!("line {}: unknown section [{name}]", i + 1)))?;
                if sections.contains_key(known) {
                    return Err(Error::invalid(format!("line {}: duplicate section [{name}]", i + 1)));
                }
                sections.insert(known, Vec::new());
                current = Some(known);
                continue;
            }
            let sec = current.ok_or_else(|| Error::invalid(format!("line {}: text before the first section", i + 1)))?;
            sections.get_mut(sec).unwrap().push((i + 1, line));
        }
        for s in ["chart", "metric", "G", "constants"] {
            if !sections.contains_key(s) {
                return Err(Error::invalid(format!("missing section [{s}]")));
            }
        }

        let mut pairs = Vec::new();
        let mut periodic = None;
        for &(ln, line) in &sections["chart"] {
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            match parts.as_slice() {
                [q, p] => pairs.push((q.to_string(), p.to_string())),
                [q, p, "periodic"] => {
                    periodic = Some(Symbol::new(q));
                    pairs.push((q.to_string(), p.to_string()));
                }
                _ => return Err(Error::invalid(format!("line {ln}: expected `coordinate, momentum[, periodic]`"))),
            }
        }
        let refs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let chart = Chart::named(&refs)?;

        let mut consts: BTreeMap<String, (usize, Expr)> = BTreeMap::new();
        let empty = Chart::standard(1);
        for &(ln, line) in &sections["constants"] {
            let (name, value) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("line {ln}: expected `name = value`")))?;
            let v = parse(value.trim(), &empty).map_err(|e| at_line(ln, e))?.simplify();
            consts.insert(name.trim().to_string(), (ln, v));
        }
        let number = |key: &str, default: i64| -> Result<Rational> {
            match consts.get(key) {
                None => Ok(rat(default)),
                Some((ln, e)) => e
                    .as_rational()
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("line {ln}: `{key}` must be a number"))),
            }
        };
        let c = number("c", 0)?;
        let c0 = number("c0", 0)?;
        let big_c = number("C", 0)?;
        let u0 = number("u0", 0)?;
        let subs: Vec<(Symbol, Expr)> = consts
            .iter()
            .filter(|(k, _)| !["c", "c0", "C", "u0"].contains(&k.as_str()))
            .map(|(k, (_, v))| (Symbol::new(k), v.clone()))
            .collect();

        let read = |sec: &str| -> Result<Expr> {
            let lines = sections.get(sec).map(Vec::as_slice).unwrap_or(&[]);
            if lines.is_empty() {
                return Ok(Expr::zero());
            }
            let text: Vec<&str> = lines.iter().map(|(_, l)| *l).collect();
            let e = parse(&text.join(" "), &chart).map_err(|e| at_line(lines[0].0, e))?;
            Ok(e.substitute(&subs).simplify())
        };
        let potential = read("potential")?;
        let g = read("G")?;
        if g.is_zero_symbolic() {
            return Err(Error::invalid("[G] is empty or zero"));
        }

        let dof = chart.dof();
        let rows = &sections["metric"];
        if rows.len() != dof {
            return Err(Error::invalid(format!("[metric] needs {dof} rows, found {}", rows.len())));
        }
        let mut metric = Vec::with_capacity(dof);
        for &(ln, line) in rows {
            let entries = line
                .split(',')
                .map(|t| parse(t.trim(), &chart).map(|e| e.substitute(&subs).simplify()))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| at_line(ln, e))?;
            if entries.len() != dof {
                return Err(Error::invalid(format!("line {ln}: metric row needs {dof} entries")));
            }
            metric.push(entries);
        }

        Ok(Definition {
            chart,
            periodic,
            metric,
            potential,
            g,
            c: c.clone(),
            c0,
            gamma: GammaSpec::new(c, big_c).shifted(u0),
        })
    }

    pub fn seed(&self, name: &str) -> Result<SeedSystem> {
        let mut seed = SeedSystem::natural(
            name,
            self.chart.clone(),
            self.metric.clone(),
            self.potential.clone(),
            self.g.clone(),
            self.c.clone(),
            self.c0.clone(),
        )?;
        if let Some(q) = &self.periodic {
            seed.sampler = SamplerConfig::default().guard_sin(q.as_str(), 1.0, 0.05);
        }
        Ok(seed)
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => Ok(writeln!(out, "{text}")?),
    }
}

/// Seed check with the residual report on failure.
fn check_seed(sys: &System, err: &mut dyn Write) -> Result<Option<i32>> {
    let check = sys.ext.seed.check_extension_condition();
    if check.holds() {
        return Ok(None);
    }
    let mut rep = VerificationReport::new(format!("{} seed", sys.name), sys.ext.seed.sampler.seed);
    rep.push(CheckResult::from_verdict("extension-condition", &check.verdict, 1e-9).with_detail(check.residual.to_string()));
    writeln!(err, "{}", rep.to_json())?;
    Ok(Some(EXIT_SEED))
}

fn cmd_extend(a: &ExtendArgs, env_seed: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let sys = resolve(&a.system, a.system.m, a.system.n, env_seed)?;
    if let Some(code) = check_seed(&sys, err)? {
        return Ok(code);
    }
    let k = sys.ext.characteristic_integral()?;
    let dir = &a.out;
    fs::create_dir_all(dir)?;
    write_file(&dir.join("H.txt"), &format!("{}\n", sys.ext.h))?;
    write_file(&dir.join("K.txt"), &format!("{}\n", k.expr))?;
    let meta = integral_meta(&sys, &k);
    write_file(&dir.join("meta.json"), &serde_json::to_string_pretty(&meta)?)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&meta)?)?;
    Ok(EXIT_OK)
}

fn integral_meta(sys: &System, k: &FirstIntegral) -> serde_json::Value {
    let spec = &sys.ext.spec;
    json!({
        "system": sys.name,
        "m": spec.m,
        "n": spec.n,
        "k": spec.k().to_string(),
        "omega": spec.omega.to_string(),
        "reduced": spec.is_reduced(),
        "route": k.route,
        "indices": [k.indices.0, k.indices.1],
        "momentum_degree": k.momentum_degree,
        "chart": sys.ext.chart.variables().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
    })
}

/// `m/n` or an integer, reduced.
pub fn parse_k(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::invalid(format!("`{s}` is not a positive ratio m/n"));
    let (m, n) = match s.trim().split_once('/') {
        Some((m, n)) => (m.trim().parse::<u32>(), n.trim().parse::<u32>()),
        None => (s.trim().parse::<u32>(), Ok(1)),
    };
    let (m, n) = (m.map_err(|_| bad())?, n.map_err(|_| bad())?);
    if m == 0 || n == 0 {
        return Err(bad());
    }
    let g = num_integer::gcd(m, n);
    Ok((m / g, n / g))
}

/// Default start: `u = 1`, `pu = 0.1`, coordinates 1, momenta 0.5.
pub fn default_start(chart: &Chart) -> PhasePoint {
    let mut pt = PhasePoint::new();
    for (q, p) in chart.pairs() {
        let (qv, pv) = if Some(q) == chart.u() { (1.0, 0.1) } else { (1.0, 0.5) };
        pt.set_symbol(q, qv);
        pt.set_symbol(p, pv);
    }
    pt
}

pub fn parse_point(s: &str, base: PhasePoint) -> Result<PhasePoint> {
    let mut pt = base;
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("`{item}` is not name=value")))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::invalid(format!("`{v}` is not a number")))?;
        pt.set(k.trim(), v);
    }
    Ok(pt)
}

/// The verification battery for one system: extension condition, `{H, L}`,
/// `{H, K}`, rank of `(H, L, K)`, drift along a trajectory, single-valuedness
/// on periodic charts, and the intrinsic conditions when they apply.
pub fn verify_system(sys: &System, integral: Option<&Expr>, points: usize, t_end: f64) -> Result<VerificationReport> {
    let ext = &sys.ext;
    let spec = &ext.spec;
    let sampler = sys.sampler();
    let mut rep = VerificationReport::new(format!("{} k={}", sys.name, spec.k()), sampler.seed);
    let cond = ext.seed.check_extension_condition();
    rep.push(CheckResult::from_verdict("extension-condition", &cond.verdict, 1e-9));

    let k = match integral {
        Some(e) => e.clone(),
        None => ext.characteristic_integral()?.expr,
    };
    let h = ext.with_params_expr(&ext.h);
    let k = ext.with_params_expr(&k);
    let l = ext.with_params_expr(&ext.seed.l);
    let mut hl = verification::bracket_residual(&h, &l, &ext.chart, &sampler, points, 1e-9);
    hl.name = "bracket:H,L".into();
    rep.push(hl);
    let mut hk = verification::bracket_residual(&h, &k, &ext.chart, &sampler, points, 1e-9);
    hk.name = "bracket:H,K".into();
    rep.push(hk);

    let rank = verification::independence_rank(&[h.clone(), l.clone(), k.clone()], &ext.chart, &sampler, 2 * points)?;
    let frac = rank.fraction(3);
    rep.push(
        CheckResult::outcome("rank:H,L,K", frac >= 0.95, format!("rank 3 at {:.1}% of {} points", 100.0 * frac, rank.points))
            .with_value(frac),
    );

    let start = default_start(&ext.chart);
    let traj = verification::integrate(&h, &ext.chart, &start, t_end, &Dopri5::default(), &[("H", &h), ("K", &k)])?;
    let mut drifts = verification::drift_checks(&traj, 1e-6);
    if let Some(why) = &traj.truncated {
        for d in &mut drifts {
            d.detail = format!("truncated at t={:.3}: {why}", traj.end_time());
        }
    }
    for d in drifts {
        rep.push(d);
    }

    if let Some(q) = &sys.angular {
        rep.push(verification::single_valuedness_2pi(&k, &ext.chart, q, &sampler));
    }
    match crate::intrinsic::check_extension(ext) {
        Ok(sub) => rep.push_report(sub),
        Err(Error::Unsupported(why)) => rep.push(CheckResult::outcome("intrinsic", true, format!("not applicable: {why}"))),
        Err(e) => return Err(e),
    }
    Ok(rep)
}

impl Extended {
    /// `e` with the sampler's fixed parameter values substituted.
    fn with_params_expr(&self, e: &Expr) -> Expr {
        let subs: Vec<(Symbol, Expr)> = self
            .seed
            .sampler
            .fixed
            .iter()
            .filter_map(|(s, v)| crate::expr::rational_from_f64(v).map(|r| (s.clone(), Expr::num(r))))
            .collect();
        if subs.is_empty() {
            e.clone()
        } else {
            e.substitute(&subs).simplify()
        }
    }
}

fn cmd_verify(a: &VerifyArgs, env_seed: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let ks = if a.sweep_k.is_empty() {
        vec![(a.system.m, a.system.n)]
    } else {
        a.sweep_k.iter().map(|s| parse_k(s)).collect::<Result<Vec<_>>>()?
    };
    let mut subs = Vec::new();
    for &(m, n) in &ks {
        let sys = resolve(&a.system, m, n, env_seed)?;
        if let Some(code) = check_seed(&sys, err)? {
            return Ok(code);
        }
        let integral = match &a.integral {
            Some(p) => Some(parse(fs::read_to_string(p)?.trim(), &sys.ext.chart)?),
            None => None,
        };
        subs.push(verify_system(&sys, integral.as_ref(), a.points, a.t_end)?);
    }
    let rep = if subs.len() == 1 {
        subs.pop().unwrap()
    } else {
        let mut top = VerificationReport::new("k sweep", subs[0].seed);
        for s in subs {
            top.push_report(s);
        }
        top
    };
    emit(a.out.as_deref(), &rep.to_json(), out)?;
    if !rep.passed {
        writeln!(err, "failed: {}", rep.failures().join(", "))?;
        return Ok(EXIT_FAIL);
    }
    Ok(EXIT_OK)
}

fn cmd_orbit(a: &OrbitArgs, env_seed: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let sys = resolve(&a.system, a.system.m, a.system.n, env_seed)?;
    let ext = &sys.ext;
    let h = ext.with_params_expr(&ext.h);
    let start = match &a.start {
        Some(s) => parse_point(s, default_start(&ext.chart))?,
        None => default_start(&ext.chart),
    };
    let traj = verification::integrate(&h, &ext.chart, &start, a.t_end, &Dopri5::default(), &[("H", &h)])?;
    let closure = verification::orbit_closure(&traj, a.eps);
    let mut csv = Vec::new();
    verification::write_trajectory_csv(&traj, &mut csv)?;
    match &a.out {
        Some(p) => write_file(p, &String::from_utf8_lossy(&csv))?,
        None => out.write_all(&csv)?,
    }
    let summary = json!({
        "system": sys.name,
        "k": ext.spec.k().to_string(),
        "t_end": traj.end_time(),
        "steps": traj.times.len(),
        "truncated": traj.truncated,
        "closure": closure,
    });
    let text = serde_json::to_string_pretty(&summary)?;
    match &a.report {
        Some(p) => write_file(p, &text)?,
        None => writeln!(err, "{text}")?,
    }
    Ok(EXIT_OK)
}

fn cmd_quantum(a: &QuantumArgs, env_seed: Option<&str>, out: &mut dyn Write) -> Result<i32> {
    let sys = resolve(&a.system, a.system.m, a.system.n, env_seed)?;
    let hbar = parse(&a.hbar, &Chart::standard(1))?
        .simplify()
        .as_rational()
        .cloned()
        .filter(|h| *h > rat(0))
        .ok_or_else(|| Error::invalid("--hbar must be a positive number"))?;
    let q = QuantumSystem::new(&sys.ext, hbar)?;
    let cfg = WarpedConfig {
        grids: a.grids.clone(),
        chain: match a.chain {
            ChainArg::Exact => ChainMode::Exact,
            ChainArg::Grid => ChainMode::Grid,
        },
        ..WarpedConfig::default()
    };
    let mut rep = VerificationReport::new(format!("{} quantum k={}", sys.name, sys.ext.spec.k()), sys.ext.seed.sampler.seed);
    let c_n = q.c_n();
    rep.push(CheckResult::outcome("c_N", true, format!("c_N = {c_n}")));
    for c in quantum::composition_identities(&q)? {
        rep.push(c);
    }
    let (kept, skipped) = q.lowest_pairs(a.pairs)?;
    for m in &skipped {
        rep.push(CheckResult::outcome(
            &format!("annihilated:l={},n_r={}", m.ell, m.n_r),
            true,
            format!("X̂ maps E={:.6} to zero", m.energy),
        ));
    }
    for m in &kept {
        let mut sub = q.warped_symmetry_residual(m, &cfg)?;
        sub.subject = format!("pair l={} n_r={} λ={:.6} E={:.6}", m.ell, m.n_r, m.lambda, m.energy);
        rep.push_report(sub);
    }
    if let Some(first) = kept.first() {
        if !a.no_control {
            rep.push(q.negative_control(first, &cfg)?);
        }
        if let Some(path) = &a.grid_csv {
            let g = q.apply_chain_exact(&q.mode_chain(first)?, &first.f)?;
            let grid = quantum::GridSpec::new(cfg.grids[0], cfg.grids[0], q.u_max(&cfg));
            let mut buf = Vec::new();
            quantum::GridFunction::from_separated(&grid, &g).write_csv(&mut buf)?;
            write_file(path, &String::from_utf8_lossy(&buf))?;
        }
    }
    let ell = kept.first().map_or(1, |m| m.ell.max(1));
    let leak = q.ghat_leakage(ell, 1024, Stencil::Spectral)?;
    rep.push(CheckResult::new("ghat-leakage", leak, quantum::LEAKAGE_TOL, 1024));
    emit(a.out.as_deref(), &rep.to_json(), out)?;
    Ok(if rep.passed { EXIT_OK } else { EXIT_FAIL })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TTW_DEF: &str = "\
[chart]
phi, pphi, periodic
[metric]
1
[potential]
(c1 + c2*cos(phi))/sin(phi)^2
[G]
sin(phi)*pphi
[constants]
c = 1
c0 = 0
c1 = 3/5
c2 = 1/5
";

    #[test]
    fn definition_round_trip() {
        let d = Definition::parse(TTW_DEF).unwrap();
        assert_eq!(d.chart.dof(), 1);
        assert_eq!(d.c, rat(1));
        assert!(d.periodic.is_some());
        let seed = d.seed("ttw").unwrap();
        assert!(seed.check_extension_condition().holds());
    }

    #[test]
    fn definition_errors_name_the_line() {
        let bad = TTW_DEF.replace("sin(phi)*pphi", "sin(phi)*");
        let e = Definition::parse(&bad).unwrap_err().to_string();
        assert!(e.contains("line 8"), "{e}");
        assert!(Definition::parse("[chart]\nphi\n").is_err());
        assert!(Definition::parse("[bogus]\n").is_err());
        assert!(Definition::parse("x = 1\n[chart]\n").is_err());
    }

    #[test]
    fn seeds_and_ratios() {
        assert_eq!(parse_seed("0x5EED").unwrap(), 0x5EED);
        assert_eq!(parse_seed("17").unwrap(), 17);
        assert!(parse_seed("seed").is_err());
        assert_eq!(parse_k("4/6").unwrap(), (2, 3));
        assert_eq!(parse_k("3").unwrap(), (3, 1));
        assert!(parse_k("0/1").is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&Error::InvalidSeed("x".into())), EXIT_SEED);
        assert_eq!(exit_code(&Error::unsupported("x")), EXIT_UNSUPPORTED);
        assert_eq!(exit_code(&Error::invalid("x")), EXIT_USAGE);
    }
}
