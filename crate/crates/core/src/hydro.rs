//! Diagonal hydrodynamic systems `u^i_t = v^i(u) u^i_x`: the Darboux
//! connection, the semi-Hamiltonian condition, commuting flows, conserved
//! densities and the generalized hodograph method.

use crate::dmz::DmzSystem;
use crate::linalg::solve_rational;
use crate::residual::{dedup, triples, Residual};
use crate::symkernel::{canonicalize, eval, eval_f64, formal_is_zero, is_zero, Assignment, EvalError, Expr, Value};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error)]
pub enum HydroError {
    #[error("{0} velocities for {1} Riemann invariants")]
    Arity(usize, usize),
    #[error("cannot evaluate at the iterate: {0}")]
    Eval(#[from] EvalError),
    #[error("singular Jacobian at u = {0:?}")]
    Singular(Vec<f64>),
    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    Divergence { iterations: usize, residual: f64 },
    #[error("unsupported coefficient family: {0}; supply the commuting flow directly")]
    Unsupported(String),
}

/// `u^i_t = v^i(u) u^i_x` in Riemann invariants `vars`.
#[derive(Clone, Debug, PartialEq)]
pub struct HydroSystem {
    pub vars: Vec<String>,
    pub v: Vec<Expr>,
    /// Pairs `(i, j)` where `v^i − v^j` could not be shown nonzero.
    pub warnings: Vec<String>,
}

impl HydroSystem {
    pub fn new<S: AsRef<str>>(vars: &[S], v: Vec<Expr>) -> Result<HydroSystem, HydroError> {
        if v.len() != vars.len() {
            return Err(HydroError::Arity(v.len(), vars.len()));
        }
        let v: Vec<Expr> = v.iter().map(canonicalize).collect();
        let mut warnings = Vec::new();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                let gap = canonicalize(&(v[i].clone() - v[j].clone()));
                if gap.is_zero_literal() || is_zero(&gap).is_zero() {
                    warnings.push(format!("v{} = v{}: not strongly hyperbolic", i + 1, j + 1));
                } else if !gap.free_symbols().is_empty() {
                    warnings.push(format!("strong hyperbolicity fails where {} = 0", gap));
                }
            }
        }
        Ok(HydroSystem {
            vars: vars.iter().map(|s| s.as_ref().to_string()).collect(),
            v,
            warnings,
        })
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }
}

/// `(i, j) ↦ Γ^i_ij = ∂_j v^i / (v^j − v^i)`, `i ≠ j`.
pub fn diagonal_connection(s: &HydroSystem) -> BTreeMap<(usize, usize), Expr> {
    let mut out = BTreeMap::new();
    for i in 0..s.dim() {
        for j in 0..s.dim() {
            if i != j {
                let g = s.v[i].diff(&s.vars[j]) / (s.v[j].clone() - s.v[i].clone());
                out.insert((i, j), canonicalize(&g));
            }
        }
    }
    out
}

/// `∂_k Γ^i_ij − ∂_j Γ^i_ik` over every triple of distinct indices.
pub fn semihamiltonian_residuals(s: &HydroSystem) -> Vec<Residual> {
    let g = diagonal_connection(s);
    let rs = triples(s.dim())
        .into_iter()
        .filter(|(_, j, k)| j < k)
        .map(|(i, j, k)| {
            let e = g[&(i, j)].diff(&s.vars[k]) - g[&(i, k)].diff(&s.vars[j]);
            Residual::new(format!("semiham({},{},{})", i + 1, j + 1, k + 1), e)
        })
        .collect();
    dedup(rs)
}

/// The C = 0 DMZ system on the Riemann invariants with `Γ^i_ij` as above.
pub fn induced_dmz(s: &HydroSystem) -> DmzSystem {
    let mut d = DmzSystem::new(&s.vars);
    for ((i, j), g) in diagonal_connection(s) {
        d.set_gamma(i, i, j, g).expect("indices in range");
    }
    d
}

/// `∂_j w^i − Γ^i_ij (w^j − w^i)`.
pub fn darboux_residuals(vars: &[String], gamma: &BTreeMap<(usize, usize), Expr>, w: &[Expr]) -> Vec<Residual> {
    let mut out = Vec::new();
    for ((i, j), g) in gamma {
        let e = w[*i].diff(&vars[*j]) - g.clone() * (w[*j].clone() - w[*i].clone());
        out.push(Residual::new(format!("commute({},{})", i + 1, j + 1), e));
    }
    out
}

pub fn commuting_flow_residuals(s: &HydroSystem, w: &[Expr]) -> Vec<Residual> {
    darboux_residuals(&s.vars, &diagonal_connection(s), w)
}

/// `P_ij − Γ^i_ij P_i − Γ^j_ji P_j`, `i < j`.
pub fn conserved_density_residuals(s: &HydroSystem, p: &Expr) -> Vec<Residual> {
    let g = diagonal_connection(s);
    let mut out = Vec::new();
    for i in 0..s.dim() {
        for j in i + 1..s.dim() {
            let (ui, uj) = (&s.vars[i], &s.vars[j]);
            let pi = p.diff(ui);
            let e = pi.diff(uj) - g[&(i, j)].clone() * pi - g[&(j, i)].clone() * p.diff(uj);
            out.push(Residual::new(format!("density({},{})", i + 1, j + 1), e));
        }
    }
    out
}

/// The flow `w(u)` built from three functions `f_i(s)` of one variable for the
/// connection `Γ^1_12 = (u1−u3)/((u1−u2)(u2−u3))`, `Γ^2_12 = (u3−u2)/((u1−u2)(u1−u3))`,
/// `Γ^1_13 = 1/(u3−u2)`, `Γ^2_23 = 1/(u3−u1)`.
pub fn three_component_flow<S: AsRef<str>>(vars: &[S], f: &[Expr; 3], s: &str) -> Vec<Expr> {
    let u: Vec<Expr> = vars.iter().map(|v| Expr::sym(v.as_ref())).collect();
    let at = |k: usize, e: &Expr| e.subs1(s, &u[k]);
    let fp: Vec<Expr> = f.iter().map(|e| e.diff(s)).collect();
    let common = at(0, &f[0]) - at(1, &f[1]) + at(2, &f[2]);
    let gap = u[1].clone() - u[0].clone();
    vec![
        canonicalize(&((gap.clone() * at(0, &fp[0]) + common.clone()) / (u[2].clone() - u[1].clone()))),
        canonicalize(&((gap * at(1, &fp[1]) + common) / (u[2].clone() - u[0].clone()))),
        canonicalize(&at(2, &fp[2])),
    ]
}

fn reference_connection(x: &[Expr]) -> BTreeMap<(usize, usize, usize), Expr> {
    let (a, b, c) = (&x[0], &x[1], &x[2]);
    let mut m = BTreeMap::new();
    m.insert(
        (0, 1, 0),
        (a.clone() - c.clone()) / ((a.clone() - b.clone()) * (b.clone() - c.clone())),
    );
    m.insert(
        (0, 1, 1),
        -(b.clone() - c.clone()) / ((a.clone() - b.clone()) * (a.clone() - c.clone())),
    );
    m.insert((0, 2, 0), -Expr::one() / (b.clone() - c.clone()));
    m.insert((1, 2, 1), -Expr::one() / (a.clone() - c.clone()));
    m
}

fn vanishes(e: &Expr) -> bool {
    if e.has_opaque() {
        formal_is_zero(e)
    } else {
        is_zero(e).is_zero()
    }
}

/// Velocities of a commuting flow for a C = 0 system in the registered
/// three-component family, possibly after reparametrizing each coordinate
/// by `phi[i](x_i)`; `f` are functions of the symbol `s`.
pub fn hydro_from_dmz(d: &DmzSystem, f: &[Expr; 3], s: &str, phi: Option<&[Expr; 3]>) -> Result<HydroSystem, HydroError> {
    if d.dim() != 3 {
        return Err(HydroError::Unsupported(format!("{} coordinates", d.dim())));
    }
    if !d.has_zero_c() {
        return Err(HydroError::Unsupported("C is nonzero".into()));
    }
    let x: Vec<Expr> = d.coords.iter().map(|c| Expr::sym(c)).collect();
    let maps: Vec<Expr> = match phi {
        Some(p) => p.to_vec(),
        None => x.clone(),
    };
    let reference = reference_connection(&maps);
    let keys: Vec<(usize, usize, usize)> = (0..3)
        .flat_map(|i| (i + 1..3).flat_map(move |j| [(i, j, i), (i, j, j)]))
        .collect();
    for (i, j, k) in keys {
        let other = if k == i { j } else { i };
        let expected = reference.get(&(i, j, k)).cloned().unwrap_or_else(Expr::zero) * maps[other].diff(&d.coords[other]);
        if !vanishes(&(d.gamma(k, i, j) - expected)) {
            return Err(HydroError::Unsupported(format!(
                "Gamma[{}][{}][{}] is outside the three-component family",
                i + 1,
                j + 1,
                k + 1
            )));
        }
    }
    if !d.off_index().is_empty() {
        return Err(HydroError::Unsupported("off-index coefficients".into()));
    }
    let placeholders = ["__u1", "__u2", "__u3"];
    let w = three_component_flow(&placeholders, f, s);
    let bind: BTreeMap<String, Expr> = placeholders.iter().map(|p| p.to_string()).zip(maps).collect();
    let w = w.iter().map(|e| canonicalize(&e.subs(&bind))).collect();
    HydroSystem::new(&d.coords, w)
}

/// Converged root of `w^i(u) = v^i(u) t + x`.
#[derive(Clone, Debug, PartialEq)]
pub struct HodographPoint {
    pub x: BigRational,
    pub t: BigRational,
    pub u: Vec<BigRational>,
    /// `max_i |w^i(u) − v^i(u) t − x|`.
    pub residual: f64,
    pub exact: bool,
    pub iterations: usize,
}

impl HodographPoint {
    pub fn u_f64(&self) -> Vec<f64> {
        self.u.iter().map(Expr::to_f64_lossy).collect()
    }
}

/// Newton settings for [`hodograph_solve`].
#[derive(Clone, Debug)]
pub struct Newton {
    pub max_iterations: usize,
    /// Target for `max_i |F_i|`.
    pub tolerance: f64,
    /// Working precision for transcendental velocities and iterate rounding.
    pub bits: u32,
}

impl Default for Newton {
    fn default() -> Self {
        Newton {
            max_iterations: 100,
            tolerance: 1e-40,
            bits: 160,
        }
    }
}

/// The residual system `F = w − v t − x` with its symbolic Jacobian.
pub struct Hodograph {
    vars: Vec<String>,
    f: Vec<Expr>,
    jac: Vec<Vec<Expr>>,
    v: Vec<Expr>,
}

fn value(e: &Expr, pt: &Assignment, bits: u32) -> Result<BigRational, EvalError> {
    Ok(match eval(e, pt, bits)? {
        Value::Exact(r) => r,
        Value::Interval(i) => i.mid(),
    })
}

fn round(r: &BigRational, bits: u32) -> BigRational {
    if r.denom().bits() <= u64::from(bits) {
        return r.clone();
    }
    let scale = BigInt::from(1) << bits as usize;
    BigRational::new((r * &scale).round().to_integer(), scale)
}

fn mag(r: &BigRational) -> f64 {
    r.abs().to_f64().unwrap_or(f64::INFINITY)
}

impl Hodograph {
    pub fn new(s: &HydroSystem, w: &[Expr]) -> Result<Hodograph, HydroError> {
        if w.len() != s.dim() {
            return Err(HydroError::Arity(w.len(), s.dim()));
        }
        let (x, t) = (Expr::sym("__x"), Expr::sym("__t"));
        let f: Vec<Expr> = w
            .iter()
            .zip(&s.v)
            .map(|(wi, vi)| canonicalize(&(wi.clone() - vi.clone() * t.clone() - x.clone())))
            .collect();
        let jac = f
            .iter()
            .map(|fi| s.vars.iter().map(|u| canonicalize(&fi.diff(u))).collect())
            .collect();
        Ok(Hodograph {
            vars: s.vars.clone(),
            f,
            jac,
            v: s.v.clone(),
        })
    }

    fn point(&self, u: &[BigRational], x: &BigRational, t: &BigRational) -> Assignment {
        let mut a: Assignment = self.vars.iter().cloned().zip(u.iter().cloned()).collect();
        a.insert("__x".into(), x.clone());
        a.insert("__t".into(), t.clone());
        a
    }

    fn residual(&self, u: &[BigRational], x: &BigRational, t: &BigRational, bits: u32) -> Result<Vec<BigRational>, EvalError> {
        let pt = self.point(u, x, t);
        self.f.iter().map(|e| value(e, &pt, bits)).collect()
    }

    fn point_f64(&self, u: &[f64], x: f64, t: f64) -> BTreeMap<String, f64> {
        let mut a: BTreeMap<String, f64> = self.vars.iter().cloned().zip(u.iter().copied()).collect();
        a.insert("__x".into(), x);
        a.insert("__t".into(), t);
        a
    }

    /// Damped Newton in double precision, returning the last iterate.
    fn float_phase(&self, x: f64, t: f64, guess: &[f64], cfg: &Newton) -> Result<(Vec<f64>, usize), HydroError> {
        let n = self.vars.len();
        let norm = |u: &[f64]| -> Result<f64, HydroError> {
            let pt = self.point_f64(u, x, t);
            let mut m: f64 = 0.0;
            for e in &self.f {
                let v = eval_f64(e, &pt)?;
                m = m.max(if v.is_finite() { v.abs() } else { f64::INFINITY });
            }
            Ok(m)
        };
        let mut u = guess.to_vec();
        let mut err = norm(&u)?;
        let mut iterations = 0;
        while err > 1e-14 && iterations < cfg.max_iterations {
            iterations += 1;
            let pt = self.point_f64(&u, x, t);
            let f: Vec<f64> = self.f.iter().map(|e| eval_f64(e, &pt)).collect::<Result<_, _>>()?;
            let jac: Vec<Vec<BigRational>> = self
                .jac
                .iter()
                .map(|row| row.iter().map(|e| eval_f64(e, &pt).map(|v| BigRational::from_float(v).unwrap_or_default())).collect::<Result<_, _>>())
                .collect::<Result<_, _>>()?;
            let rhs: Vec<BigRational> = f.iter().map(|v| BigRational::from_float(-v).unwrap_or_default()).collect();
            let step = solve_rational(&jac, &rhs).ok_or_else(|| HydroError::Singular(u.clone()))?;
            let step: Vec<f64> = step.iter().map(Expr::to_f64_lossy).collect();
            let mut scale = 1.0;
            let mut moved = false;
            for _ in 0..40 {
                let trial: Vec<f64> = (0..n).map(|k| u[k] + scale * step[k]).collect();
                let e = norm(&trial)?;
                if e < err {
                    u = trial;
                    err = e;
                    moved = true;
                    break;
                }
                scale /= 2.0;
            }
            if !moved {
                break;
            }
        }
        Ok((u, iterations))
    }

    /// Damped Newton iteration from `guess`: double precision first, then
    /// exact rational steps until the residual is below the tolerance.
    pub fn solve(&self, x: &BigRational, t: &BigRational, guess: &[BigRational], cfg: &Newton) -> Result<HodographPoint, HydroError> {
        let n = self.vars.len();
        let start: Vec<f64> = guess.iter().map(Expr::to_f64_lossy).collect();
        let (float_u, mut iterations) = self.float_phase(Expr::to_f64_lossy(x), Expr::to_f64_lossy(t), &start, cfg)?;
        let mut u: Vec<BigRational> = match float_u.iter().map(|v| BigRational::from_float(*v)).collect::<Option<Vec<_>>>() {
            Some(r) => r,
            None => guess.to_vec(),
        };
        let mut f = self.residual(&u, x, t, cfg.bits)?;
        let norm = |f: &[BigRational]| f.iter().map(mag).fold(0.0, f64::max);
        let mut err = norm(&f);
        while err > cfg.tolerance && !f.iter().all(Zero::is_zero) {
            if iterations >= cfg.max_iterations {
                return Err(HydroError::Divergence { iterations, residual: err });
            }
            iterations += 1;
            let pt = self.point(&u, x, t);
            let jac: Vec<Vec<BigRational>> = self
                .jac
                .iter()
                .map(|row| row.iter().map(|e| value(e, &pt, cfg.bits)).collect::<Result<_, _>>())
                .collect::<Result<_, _>>()?;
            let neg: Vec<BigRational> = f.iter().map(|v| -v.clone()).collect();
            let step = solve_rational(&jac, &neg)
                .ok_or_else(|| HydroError::Singular(u.iter().map(Expr::to_f64_lossy).collect()))?;
            let mut scale = BigRational::from_integer(1.into());
            let mut accepted = false;
            for _ in 0..40 {
                let trial: Vec<BigRational> = (0..n).map(|k| round(&(&u[k] + &step[k] * &scale), cfg.bits)).collect();
                if let Ok(ft) = self.residual(&trial, x, t, cfg.bits) {
                    let e = norm(&ft);
                    if e < err || ft.iter().all(Zero::is_zero) {
                        u = trial;
                        f = ft;
                        err = e;
                        accepted = true;
                        break;
                    }
                }
                scale = scale / BigRational::from_integer(2.into());
            }
            if !accepted {
                return Err(HydroError::Divergence { iterations, residual: err });
            }
        }
        let exact = f.iter().all(Zero::is_zero);
        Ok(HodographPoint {
            x: x.clone(),
            t: t.clone(),
            u,
            residual: err,
            exact,
            iterations,
        })
    }

    /// `max_i |u^i_t − v^i(u) u^i_x|` by central differences of step `h`.
    pub fn pde_residual(&self, p: &HodographPoint, h: &BigRational, cfg: &Newton) -> Result<f64, HydroError> {
        let two = BigRational::from_integer(2.into());
        let xp = self.solve(&(&p.x + h), &p.t, &p.u, cfg)?;
        let xm = self.solve(&(&p.x - h), &p.t, &p.u, cfg)?;
        let tp = self.solve(&p.x, &(&p.t + h), &p.u, cfg)?;
        let tm = self.solve(&p.x, &(&p.t - h), &p.u, cfg)?;
        let pt = self.point(&p.u, &p.x, &p.t);
        let mut worst: f64 = 0.0;
        for i in 0..self.vars.len() {
            let ux = (&xp.u[i] - &xm.u[i]) / (&two * h);
            let ut = (&tp.u[i] - &tm.u[i]) / (&two * h);
            let vi = value(&self.v[i], &pt, cfg.bits)?;
            worst = worst.max(mag(&(ut - vi * ux)));
        }
        Ok(worst)
    }
}

pub fn hodograph_solve(
    s: &HydroSystem,
    w: &[Expr],
    x: &BigRational,
    t: &BigRational,
    guess: &[BigRational],
) -> Result<HodographPoint, HydroError> {
    Hodograph::new(s, w)?.solve(x, t, guess, &Newton::default())
}

/// One grid point of a hodograph sweep.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub point: HodographPoint,
    pub pde_residual: f64,
}

/// Solves on the `(2r+1)²` grid `x + a·spacing`, `t + b·spacing` and checks
/// the PDE at each node by central differences of step `h`.
pub fn hodograph_sweep(
    s: &HydroSystem,
    w: &[Expr],
    center: &HodographPoint,
    radius: i64,
    spacing: &BigRational,
    h: &BigRational,
) -> Result<Vec<SweepRow>, HydroError> {
    let hg = Hodograph::new(s, w)?;
    let cfg = Newton::default();
    let offsets: Vec<(i64, i64)> = (-radius..=radius).flat_map(|a| (-radius..=radius).map(move |b| (a, b))).collect();
    offsets
        .par_iter()
        .map(|&(a, b)| {
            let x = &center.x + spacing * BigRational::from_integer(a.into());
            let t = &center.t + spacing * BigRational::from_integer(b.into());
            let point = hg.solve(&x, &t, &center.u, &cfg)?;
            let pde_residual = hg.pde_residual(&point, h, &cfg)?;
            Ok(SweepRow { point, pde_residual })
        })
        .collect()
}

/// CSV with header `x,t,u1,...,un,residual`; the residual column is the
/// finite-difference PDE residual.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let n = rows.first().map(|r| r.point.u.len()).unwrap_or(0);
    let mut out = String::from("x,t");
    for i in 1..=n {
        let _ = write!(out, ",u{}", i);
    }
    out.push_str(",residual\n");
    for r in rows {
        let _ = write!(out, "{},{}", Expr::to_f64_lossy(&r.point.x), Expr::to_f64_lossy(&r.point.t));
        for u in r.point.u_f64() {
            let _ = write!(out, ",{:.15e}", u);
        }
        let _ = writeln!(out, ",{:.3e}", r.pde_residual);
    }
    out
}
