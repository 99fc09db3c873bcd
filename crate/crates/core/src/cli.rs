//! Command-line front end over system files.
//!
//! Exit status: 0 when the check passes, 1 on a verification failure, 2 on an
//! input error. Reports go to `out`, diagnostics to `err`.

use crate::dmz::{check_compatibility, construct_gdmz, is_involutive, lame_potentials, lame_residuals, DmzError, LamePotentials};
use crate::gauge::{
    gauge_invariants, gauge_transform, m3wri_constraint_residuals, to_m3wri_gauge, to_threewave_gauge, GaugeError,
    GaugeOperator,
};
use crate::geometry::{check_n_hyperbolic, derived_type, Distribution, DerivedType, HyperbolicReport};
use crate::hydro::{
    commuting_flow_residuals, hodograph_sweep, semihamiltonian_residuals, sweep_csv, Hodograph, HodographPoint, HydroSystem,
    Newton,
};
use crate::residual::{CheckReport, Residual};
use crate::symkernel::ZeroTest;
use crate::sysfile::{render_dmz, render_gdmz, FileError, SystemFile};
use crate::waves::{m3wri_residuals, nwave_residuals, wave_from_lame, WaveMatrix};
use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "dmz", version, about = "Checks, constructs and transforms DMZ systems and their wave and hydrodynamic relatives")]
pub struct Cli {
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Sampling {
    /// Seed for every random sample.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Sample points per probabilistic zero test.
    #[arg(long, global = true, default_value_t = 32)]
    pub samples: usize,
    /// Interval working precision in bits.
    #[arg(long, global = true, default_value_t = 256)]
    pub precision: u32,
}

impl Sampling {
    pub fn zero_test(&self) -> ZeroTest {
        ZeroTest {
            seed: self.seed,
            samples: self.samples,
            precision: self.precision,
            ..ZeroTest::default()
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrability conditions of a DMZ system.
    CheckInvolutive { file: PathBuf },
    /// Cross-derivative compatibility of a generalized system.
    Compat { file: PathBuf },
    /// Gauge transformation of the operator; writes a system file.
    Gauge {
        file: PathBuf,
        /// Apply T_lambda.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Conjugate by this solution, removing C.
        #[arg(long = "to-3wri", allow_hyphen_values = true, conflicts_with = "to_m3wri")]
        to_3wri: Option<String>,
        /// Gauge a C = 0 operator so that C_ij = Gamma_ij Gamma_ji.
        #[arg(long = "to-m3wri", allow_hyphen_values = true)]
        to_m3wri: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Table of the gauge invariants h_ij.
    Invariants { file: PathBuf },
    /// Lamé potentials of a C = 0 system, or verification of given ones.
    Lame {
        file: PathBuf,
        /// Comma-separated potentials h1,h2,...
        #[arg(long, allow_hyphen_values = true)]
        verify: Option<String>,
    },
    /// n-wave residuals of a wave matrix, or of the matrix built from the
    /// Lamé potentials of a DMZ system.
    Threewave { file: PathBuf },
    /// Modified wave residuals; for a DMZ system also the C_ij = Gamma_ij Gamma_ji constraint.
    M3wave { file: PathBuf },
    /// Builds the generalized system from adapted data of a hyperbolic distribution.
    Construct {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Derived types of a distribution or of pushed jet contact parts.
    Derived { file: PathBuf },
    /// Semi-Hamiltonian test of a diagonal hydrodynamic system.
    Semiham { file: PathBuf },
    /// Commutation of the flow in the second file with the first.
    Commute { file: PathBuf, other: PathBuf },
    /// Hodograph solutions w(u) = v(u) t + x on a grid, as CSV.
    Hodograph {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        /// Comma-separated starting values.
        #[arg(long, allow_hyphen_values = true)]
        guess: String,
        /// Grid half-width in nodes.
        #[arg(long, default_value_t = 2)]
        radius: i64,
        #[arg(long, default_value = "1/100")]
        spacing: String,
        /// Finite-difference step.
        #[arg(long, default_value = "1/10000")]
        step: String,
        /// Largest accepted finite-difference PDE residual.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Runs every golden file and prints the pass matrix.
    Corpus { dir: Option<PathBuf> },
}

/// Why a command stopped without a verdict.
#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error("{0}")]
    Message(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn input(m: impl std::fmt::Display) -> InputError {
    InputError::Message(m.to_string())
}

type Outcome = Result<bool, InputError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{}", text) } else { write!(err, "{}", text) };
            return code;
        }
    };
    execute(&cli, out, err)
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut report = String::new();
    let result = dispatch(cli, &mut report);
    let _ = out.write_all(report.as_bytes());
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            2
        }
    }
}

fn dispatch(cli: &Cli, out: &mut String) -> Outcome {
    let cfg = cli.sampling.zero_test();
    match &cli.command {
        Command::CheckInvolutive { file } => check_involutive(&load(file)?, &cfg, out),
        Command::Compat { file } => compat(&load(file)?, &cfg, out),
        Command::Gauge {
            file,
            lambda,
            to_3wri,
            to_m3wri,
            output,
        } => gauge(&load(file)?, lambda.as_deref(), to_3wri.as_deref(), to_m3wri.as_deref(), output.as_deref(), &cfg, out),
        Command::Invariants { file } => invariants(&load(file)?, &cfg, out),
        Command::Lame { file, verify } => lame(&load(file)?, verify.as_deref(), &cfg, out),
        Command::Threewave { file } => threewave(&load(file)?, &cfg, out),
        Command::M3wave { file } => m3wave(&load(file)?, &cfg, out),
        Command::Construct { file, output } => construct(&load(file)?, output.as_deref(), &cfg, out),
        Command::Derived { file } => derived(&load(file)?, out),
        Command::Semiham { file } => semiham(&load(file)?, &cfg, out),
        Command::Commute { file, other } => commute(&load(file)?, &load(other)?, &cfg, out),
        Command::Hodograph {
            file,
            x,
            t,
            guess,
            radius,
            spacing,
            step,
            tolerance,
            output,
        } => {
            let grid = Grid {
                x: rational(x)?,
                t: rational(t)?,
                guess: guess.split(',').map(rational).collect::<Result<_, _>>()?,
                radius: *radius,
                spacing: rational(spacing)?,
                step: rational(step)?,
                tolerance: *tolerance,
            };
            hodograph(&load(file)?, &grid, output.as_deref(), out)
        }
        Command::Corpus { dir } => {
            let dir = dir.clone().unwrap_or_else(default_corpus);
            corpus(&dir, &cli.sampling, out)
        }
    }
}

pub fn default_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn load(path: &Path) -> Result<SystemFile, InputError> {
    Ok(SystemFile::read(path)?)
}

/// `"3"`, `"-7/10"` or `"0.25"`.
pub fn rational(s: &str) -> Result<BigRational, InputError> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{}{}", int, frac);
        let num: num_bigint::BigInt = digits.parse().map_err(|_| input(format!("bad number `{}`", s)))?;
        let den = num_traits::pow(num_bigint::BigInt::from(10), frac.len());
        return Ok(BigRational::new(num, den));
    }
    s.parse().map_err(|_| input(format!("bad number `{}`", s)))
}

fn header(out: &mut String, what: &str, f: &SystemFile) {
    let _ = writeln!(out, "{} {}", what, f.path);
}

fn verdict(out: &mut String, ok: bool) -> Outcome {
    let _ = writeln!(out, "result: {}", if ok { "pass" } else { "fail" });
    Ok(ok)
}

fn section(out: &mut String, title: &str, r: &CheckReport) -> bool {
    let _ = writeln!(out, "{}:", title);
    let _ = writeln!(out, "{}", r);
    r.passed()
}

fn check_involutive(f: &SystemFile, cfg: &ZeroTest, out: &mut String) -> Outcome {
    let s = f.dmz()?;
    header(out, "involutivity", f);
    let r = is_involutive(&s, cfg);
    let _ = writeln!(out, "{}", r);
    verdict(out, r.passed())
}

fn compat(f: &SystemFile, cfg: &ZeroTest, out: &mut String) -> Outcome {
    let s = f.gdmz()?;
    header(out, "compatibility", f);
    let _ = writeln!(out, "{}", s);
    let r = check_compatibility(&s, cfg);
    let _ = writeln!(out, "{}", r);
    verdict(out, r.passed())
}

fn operator(f: &SystemFile) -> Result<GaugeOperator, InputError> {
    GaugeOperator::from_dmz(&f.dmz()?).map_err(input)
}

#[allow(clippy::too_many_arguments)]
fn gauge(
    f: &SystemFile,
    lambda: Option<&str>,
    to_3wri: Option<&str>,
    to_m3wri: Option<&str>,
    output: Option<&Path>,
    cfg: &ZeroTest,
    out: &mut String,
) -> Outcome {
    if lambda.is_none() && to_3wri.is_none() && to_m3wri.is_none() {
        return Err(input("gauge needs --lambda, --to-3wri or --to-m3wri"));
    }
    let mut d = operator(f)?;
    let mut notes = vec![format!("source {}", f.path)];
    if let Some(l) = lambda {
        d = gauge_transform(&d, &f.expr(l)?);
        notes.push(format!("T_lambda with lambda = {}", l));
    }
    let step = if let Some(u) = to_3wri {
        notes.push(format!("conjugated by the solution {}", u));
        to_threewave_gauge(&d, &f.expr(u)?, cfg)
    } else if let Some(l) = to_m3wri {
        notes.push(format!("m3wri gauge with lambda = {}", l));
        to_m3wri_gauge(&d, &f.expr(l)?, cfg)
    } else {
        Ok(d)
    };
    let d = match step {
        Ok(d) => d,
        Err(GaugeError::Dmz(e)) => return Err(input(e)),
        Err(e) => {
            let _ = writeln!(out, "gauge failed: {}", e);
            return verdict(out, false);
        }
    };
    let text = render_dmz(&d.to_dmz(), &notes.join("\n"));
    match output {
        Some(p) => {
            std::fs::write(p, &text)?;
            let _ = writeln!(out, "wrote {}", p.display());
        }
        None => out.push_str(&text),
    }
    Ok(true)
}

fn invariants(f: &SystemFile, cfg: &ZeroTest, out: &mut String) -> Outcome {
    let d = operator(f)?;
    header(out, "gauge invariants", f);
    let h = gauge_invariants(&d);
    for ((i, j), e) in &h {
        let _ = writeln!(out, "h[{}][{}] = {}", i + 1, j + 1, e);
    }
    let opts = f.options()?;
    let mut checks = Vec::new();
    for e in f.entries.iter().filter(|e| e.name == "inv") {
        let [i, j] = e.indices.as_slice() else {
            return Err(input(format!("{}:{}: inv takes two indices", f.path, e.line)));
        };
        let key: (usize, usize) = match (i.parse::<usize>(), j.parse::<usize>()) {
            (Ok(a), Ok(b)) if a >= 1 && b >= 1 && a != b && a <= d.dim() && b <= d.dim() => (a - 1, b - 1),
            _ => return Err(input(format!("{}:{}: bad inv indices", f.path, e.line))),
        };
        let expected = crate::symkernel::parse_with(e.value.as_str().unwrap_or_default(), &opts)
            .map_err(|err| input(format!("{}:{}:{}: {}", f.path, e.line, e.col, err)))?;
        checks.push(Residual::new(format!("h{}{}", i, j), h[&key].clone() - expected));
    }
    if checks.is_empty() {
        return Ok(true);
    }
    let r = CheckReport::run(checks, cfg);
    let ok = section(out, "against expected values", &r);
    verdict(out, ok)
}

fn potentials_arg(f: &SystemFile, verify: Option<&str>) -> Result<Option<LamePotentials>, InputError> {
    match verify {
        Some(list) => Ok(Some(LamePotentials(list.split(',').map(|h| f.expr(h)).collect::<Result<_, _>>()?))),
        None => Ok(f.potentials()?),
    }
}

fn lame(f: &SystemFile, verify: Option<&str>, cfg: &ZeroTest, out: &mut String) -> Outcome {
    let s = f.dmz()?;
    header(out, "Lamé potentials", f);
    let h = match potentials_arg(f, verify)? {
        Some(h) if h.0.len() != s.dim() => return Err(input(format!("{} potentials for {} coordinates", h.0.len(), s.dim()))),
        Some(h) => h,
        None => match lame_potentials(&s, cfg) {
            Ok(h) => h,
            Err(e @ (DmzError::Unsupported(_) | DmzError::Construction(_))) => {
                let _ = writeln!(out, "no potentials found: {}", e);
                return verdict(out, false);
            }
            Err(e) => return Err(input(e)),
        },
    };
    for (i, e) in h.0.iter().enumerate() {
        let _ = writeln!(out, "h[{}] = {}", i + 1, e);
    }
    let r = CheckReport::run(lame_residuals(&s, &h), cfg);
    let ok = section(out, "Gamma^j_ij = d_i ln h_j", &r);
    verdict(out, ok)
}

fn wave_matrix(f: &SystemFile, cfg: &ZeroTest, out: &mut String) -> Result<Option<WaveMatrix>, InputError> {
    if f.kind()? == "wave" {
        return Ok(Some(f.wave()?));
    }
    let s = f.dmz()?;
    if !s.has_zero_c() {
        return Err(input("the n-wave matrix needs C = 0; gauge with --to-3wri first"));
    }
    let h = match f.potentials()? {
        Some(h) => h,
        None => match lame_potentials(&s, cfg) {
            Ok(h) => h,
            Err(e) => {
                let _ = writeln!(out, "no Lamé potentials: {}", e);
                return Ok(None);
            }
        },
    };
    for (i, e) in h.0.iter().enumerate() {
        let _ = writeln!(out, "h[{}] = {}", i + 1, e);
    }
    let a = wave_from_lame(&s.coords, &h);
    let _ = writeln!(out, "{}", a);
    Ok(Some(a))
}

fn threewave(f: &SystemFile, cfg: &ZeroTest, out: &mut String) -> Outcome {
    header(out, "n-wave", f);
    let Some(a) = wave_matrix(f, cfg, out)? else {
        return verdict(out, false);
    };
    let r = CheckReport::run(nwave_residuals(&a), cfg);
    let ok = section(out, "d_i A_jk = A_ji A_ik", &r);
    verdict(out, ok)
}

fn m3wave(f: &SystemFile, cfg: &ZeroTest, out: &mut String) -> Outcome {
    header(out, "modified n-wave", f);
    if f.kind()? == "wave" {
        let a = f.wave()?;
        let r = CheckReport::run(m3wri_residuals(&a), cfg);
        let ok = section(out, "d_i G_jk = (G_ij - G_ik)(G_jk - G_ji)", &r);
        return verdict(out, ok);
    }
    let d = operator(f)?;
    let r = CheckReport::run(m3wri_residuals(&WaveMatrix::from_operator(&d)), cfg);
    let waves = section(out, "d_i G_jk = (G_ij - G_ik)(G_jk - G_ji)", &r);
    let c = CheckReport::run(m3wri_constraint_residuals(&d), cfg);
    let constraint = section(out, "C_ij = G_ij G_ji", &c);
    verdict(out, waves && constraint)
}

fn expected_type(f: &SystemFile) -> Result<Option<DerivedType>, InputError> {
    match f.string("expect_type")? {
        None => Ok(None),
        Some(s) => DerivedType::parse(&s).map(Some).ok_or_else(|| input(format!("bad expect_type `{}`", s))),
    }
}

fn print_hyperbolic(out: &mut String, r: &HyperbolicReport) {
    let _ = writeln!(out, "{}-hyperbolic check:", r.n);
    let _ = writeln!(out, "  cross brackets in H: {}", r.cross_brackets);
    let _ = writeln!(out, "  self brackets independent: {}", r.self_brackets);
    if let Some(t) = &r.derived_type {
        let _ = writeln!(out, "  derived type {}", t);
    }
    let _ = writeln!(out, "  ch H^(1) in H: {}", r.cauchy_in_h);
    let mut seen = std::collections::BTreeSet::new();
    for w in r.warnings.iter().filter(|w| seen.insert(w.as_str())) {
        let _ = writeln!(out, "  warning: {}", w);
    }
    for w in &r.failures {
        let _ = writeln!(out, "  failure: {}", w);
    }
}

fn sum(parts: &[Distribution]) -> Result<Distribution, InputError> {
    let chart = parts[0].chart().clone();
    let fields = parts.iter().flat_map(|d| d.fields().to_vec()).collect();
    Distribution::new(&chart, fields).map_err(input)
}

fn derived(f: &SystemFile, out: &mut String) -> Outcome {
    let parts = match f.kind()?.as_str() {
        "jetquotient" => f.jet_parts()?,
        "distribution" => f.parts()?,
        k => return Err(input(format!("derived works on distribution or jetquotient files, not {}", k))),
    };
    header(out, "derived flag", f);
    for (i, p) in parts.iter().enumerate() {
        let _ = writeln!(out, "part {}:", i + 1);
        for x in p.fields() {
            let _ = writeln!(out, "  {}", x);
        }
    }
    let h = sum(&parts)?;
    let t = derived_type(&h).map_err(input)?;
    let _ = writeln!(out, "derived type of H: {}", t);
    let mut ok = true;
    if let Some(want) = expected_type(f)? {
        let _ = writeln!(out, "expected {}", want);
        ok &= t == want;
    }
    if h.chart().dim() == 3 * parts.len() + 1 {
        let r = check_n_hyperbolic(&parts).map_err(input)?;
        print_hyperbolic(out, &r);
        ok &= r.passed();
    }
    verdict(out, ok)
}

fn construct(f: &SystemFile, output: Option<&Path>, cfg: &ZeroTest, out: &mut String) -> Outcome {
    let data = f.adapted()?;
    header(out, "construction", f);
    let r = check_n_hyperbolic(&data.parts).map_err(input)?;
    print_hyperbolic(out, &r);
    let mut ok = true;
    if let Some(want) = expected_type(f)? {
        let got = r.derived_type.clone();
        let _ = writeln!(out, "expected derived type {}", want);
        ok &= got.as_ref() == Some(&want);
    }
    let c = match construct_gdmz(&data, cfg) {
        Ok(c) => c,
        Err(DmzError::Construction(m)) => {
            let _ = writeln!(out, "construction failed: {}", m);
            return verdict(out, false);
        }
        Err(e) => return Err(input(e)),
    };
    let _ = writeln!(
        out,
        "inverse substitution ({}):",
        if c.inverse_solved { "solved" } else { "supplied" }
    );
    for (k, v) in &c.inverse {
        let _ = writeln!(out, "  {} = {}", k, v);
    }
    for (i, p) in c.first_derivatives.iter().enumerate() {
        let _ = writeln!(out, "p{} = {}", i + 1, p);
    }
    let _ = writeln!(out, "system:\n{}", c.system);
    let _ = writeln!(out, "compatibility:\n{}", c.compatibility);
    for w in c.warnings.iter().filter(|w| !r.warnings.contains(w)) {
        let _ = writeln!(out, "warning: {}", w);
    }
    if let Some(p) = output {
        std::fs::write(p, render_gdmz(&c.system))?;
        let _ = writeln!(out, "wrote {}", p.display());
    }
    verdict(out, ok && c.compatibility.passed())
}

fn semiham(f: &SystemFile, cfg: &ZeroTest, out: &mut String) -> Outcome {
    let s = f.hydro()?;
    header(out, "semi-Hamiltonian", f);
    for (i, v) in s.v.iter().enumerate() {
        let _ = writeln!(out, "v[{}] = {}", i + 1, v);
    }
    for w in &s.warnings {
        let _ = writeln!(out, "warning: {}", w);
    }
    let r = CheckReport::run(semihamiltonian_residuals(&s), cfg);
    let mut ok = section(out, "Tsarev conditions", &r);
    if let Some(w) = f.vector("w")? {
        let r = CheckReport::run(commuting_flow_residuals(&s, &w), cfg);
        ok &= section(out, "commuting flow w", &r);
    }
    verdict(out, ok)
}

fn commute(a: &SystemFile, b: &SystemFile, cfg: &ZeroTest, out: &mut String) -> Outcome {
    let s = a.hydro()?;
    let t = b.hydro()?;
    if s.vars != t.vars {
        return Err(input("the two systems use different Riemann invariants"));
    }
    let _ = writeln!(out, "commutation {} with {}", a.path, b.path);
    let r = CheckReport::run(commuting_flow_residuals(&s, &t.v), cfg);
    let ok = section(out, "d_j w^i = Gamma^i_ij (w^j - w^i)", &r);
    verdict(out, ok)
}

struct Grid {
    x: BigRational,
    t: BigRational,
    guess: Vec<BigRational>,
    radius: i64,
    spacing: BigRational,
    step: BigRational,
    tolerance: f64,
}

fn hodograph(f: &SystemFile, g: &Grid, output: Option<&Path>, out: &mut String) -> Outcome {
    let s: HydroSystem = f.hydro()?;
    let w = f.vector("w")?.ok_or_else(|| input("hodograph needs w[i]"))?;
    if g.guess.len() != s.dim() {
        return Err(input(format!("{} starting values for {} unknowns", g.guess.len(), s.dim())));
    }
    let solver = Hodograph::new(&s, &w).map_err(input)?;
    let center: HodographPoint = match solver.solve(&g.x, &g.t, &g.guess, &Newton::default()) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(out, "# no convergence at the centre: {}", e);
            return Ok(false);
        }
    };
    let rows = match hodograph_sweep(&s, &w, &center, g.radius, &g.spacing, &g.step) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(out, "# sweep failed: {}", e);
            return Ok(false);
        }
    };
    let ok = rows.iter().all(|r| r.point.residual < 1e-12 && r.pde_residual < g.tolerance);
    let csv = sweep_csv(&rows);
    match output {
        Some(p) => {
            std::fs::write(p, &csv)?;
            let worst = rows.iter().map(|r| r.pde_residual).fold(0.0, f64::max);
            let _ = writeln!(out, "wrote {} rows to {}; worst PDE residual {:.3e}", rows.len(), p.display(), worst);
            let _ = writeln!(out, "result: {}", if ok { "pass" } else { "fail" });
        }
        None => out.push_str(&csv),
    }
    Ok(ok)
}

/// Subcommand used for a golden file when it sets no `check`.
pub fn default_check(kind: &str) -> &'static str {
    match kind {
        "dmz" => "check-involutive",
        "gdmz" => "compat",
        "wave" => "threewave",
        "hydro" => "semiham",
        "distribution" => "construct",
        _ => "derived",
    }
}

pub const CORPUS_EXTENSIONS: [&str; 6] = ["dmz", "gdmz", "wave", "hydro", "dist", "jet"];

/// One corpus file's outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusRow {
    pub name: String,
    pub command: String,
    pub expected: Option<bool>,
    /// Exit status of the command.
    pub status: i32,
}

impl CorpusRow {
    pub fn ok(&self) -> bool {
        match self.expected {
            Some(true) => self.status == 0,
            Some(false) => self.status == 1,
            None => false,
        }
    }
}

/// Command line for one golden file: `check` (a string or list) followed by
/// the file, with later arguments naming sibling files resolved in `dir`.
fn corpus_args(f: &SystemFile, path: &Path, dir: &Path) -> Result<Vec<String>, InputError> {
    let mut words: Vec<String> = match f.global("check") {
        None => vec![default_check(&f.kind()?).to_string()],
        Some(e) => match &e.value {
            crate::sysfile::Value::Str(s) => s.split_whitespace().map(str::to_string).collect(),
            crate::sysfile::Value::List(xs) => xs.iter().map(|x| x.as_str().unwrap_or_default().to_string()).collect(),
            _ => return Err(input(format!("{}:{}: `check` must be a string or list", f.path, e.line))),
        },
    };
    if words.is_empty() {
        return Err(input(format!("{}: empty `check`", f.path)));
    }
    for w in words.iter_mut().skip(1) {
        let sibling = dir.join(&*w);
        if CORPUS_EXTENSIONS.iter().any(|ext| w.ends_with(&format!(".{}", ext))) && sibling.exists() {
            *w = sibling.display().to_string();
        }
    }
    words.insert(1, path.display().to_string());
    Ok(words)
}

pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, InputError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| input(format!("{}: {}", dir.display(), e)))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| CORPUS_EXTENSIONS.contains(&e))
        })
        .collect();
    files.sort();
    Ok(files)
}

pub fn run_corpus(dir: &Path, sampling: &Sampling) -> Result<Vec<CorpusRow>, InputError> {
    let mut rows = Vec::new();
    for path in corpus_files(dir)? {
        let f = SystemFile::read(&path)?;
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
        let expected = f.expectation()?;
        let words = corpus_args(&f, &path, dir)?;
        let mut argv = vec![
            "dmz".to_string(),
            format!("--seed={}", sampling.seed),
            format!("--samples={}", sampling.samples),
            format!("--precision={}", sampling.precision),
        ];
        argv.extend(words.iter().cloned());
        let (mut sink, mut errs) = (Vec::new(), Vec::new());
        let status = run(&argv, &mut sink, &mut errs);
        rows.push(CorpusRow {
            name,
            command: words[0].clone(),
            expected,
            status,
        });
    }
    Ok(rows)
}

fn corpus(dir: &Path, sampling: &Sampling, out: &mut String) -> Outcome {
    let rows = run_corpus(dir, sampling)?;
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let _ = writeln!(out, "{:<width$}  {:<16}  {:<8}  {:<8}  status", "file", "command", "expected", "got");
    let word = |s: i32| match s {
        0 => "pass",
        1 => "fail",
        _ => "error",
    };
    for r in &rows {
        let expected = match r.expected {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "-",
        };
        let _ = writeln!(
            out,
            "{:<width$}  {:<16}  {:<8}  {:<8}  {}",
            r.name,
            r.command,
            expected,
            word(r.status),
            if r.ok() { "ok" } else { "MISMATCH" }
        );
    }
    let good = rows.iter().filter(|r| r.ok()).count();
    let _ = writeln!(out, "{}/{} golden files match their expected verdict", good, rows.len());
    Ok(good == rows.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exec(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["dmz"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn temp(name: &str, text: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("dmz-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn rationals() {
        assert_eq!(rational("0.25").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(rational("-7/10").unwrap(), BigRational::new((-7).into(), 10.into()));
        assert!(rational("x").is_err());
    }

    #[test]
    fn exit_codes() {
        let good = temp("good.dmz", "kind = \"dmz\"\ncoords = [\"x\", \"y\"]\nGamma[1][2][1] = \"1/(x-y)\"\n");
        let (code, out, _) = exec(&["check-involutive", good.to_str().unwrap()]);
        assert_eq!(code, 0, "{}", out);
        let gdmz = temp("bad.gdmz", "kind = \"gdmz\"\ncoords = [\"x\", \"y\", \"z\"]\nf[1][2] = \"u\"\nf[1][3] = \"u_x\"\n");
        let (code, out, _) = exec(&["compat", gdmz.to_str().unwrap()]);
        assert_eq!(code, 1, "{}", out);
        assert!(out.contains("witness") || out.contains("obstruction"), "{}", out);
        let (code, _, err) = exec(&["check-involutive", "/nonexistent/file.dmz"]);
        assert_eq!(code, 2);
        assert!(err.contains("error"));
        let (code, _, _) = exec(&["no-such-command"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn gauge_writes_a_system_file() {
        let p = temp("g.dmz", "kind = \"dmz\"\ncoords = [\"x\", \"y\"]\n");
        let (code, out, _) = exec(&["gauge", p.to_str().unwrap(), "--lambda", "x*y"]);
        assert_eq!(code, 0);
        let back = SystemFile::parse("out", &out).unwrap().dmz().unwrap();
        assert_eq!(back.gamma(1, 0, 1).to_string(), "y");
        assert_eq!(back.c(0, 1).to_string(), "x*y - 1");
    }
}
