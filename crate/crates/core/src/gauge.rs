//! Gauge transformations `T_λ D = e^λ ∘ D ∘ e^{−λ}` of involutive operators
//! `L_ij = ∂_i∂_j − Γ_ji ∂_i − Γ_ij ∂_j + C_ij`.

use crate::dmz::{DmzSystem, DmzError};
use crate::residual::{triples, CheckReport, Residual};
use crate::symkernel::{canonicalize, is_zero, Expr, ZeroTest};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum GaugeError {
    #[error("Gamma[{0}][{1}][{2}] has an index outside its pair; no operator form")]
    OffIndex(usize, usize, usize),
    #[error("u does not solve D u = 0:\n{0}")]
    NotASolution(String),
    #[error("lambda fails the gauge condition:\n{0}")]
    GaugeCondition(String),
    #[error("the operator must have C = 0")]
    NonzeroC,
    #[error("{0}")]
    Verification(String),
    #[error(transparent)]
    Dmz(#[from] DmzError),
}

/// `Γ_ij` multiplies `∂_j` in `L_ij`; `C_ij` is stored for `i < j`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeOperator {
    pub coords: Vec<String>,
    pub gamma: BTreeMap<(usize, usize), Expr>,
    pub c: BTreeMap<(usize, usize), Expr>,
}

impl GaugeOperator {
    pub fn new<S: AsRef<str>>(coords: &[S]) -> GaugeOperator {
        GaugeOperator {
            coords: coords.iter().map(|s| s.as_ref().to_string()).collect(),
            gamma: BTreeMap::new(),
            c: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn gamma(&self, i: usize, j: usize) -> Expr {
        self.gamma.get(&(i, j)).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn c(&self, i: usize, j: usize) -> Expr {
        let key = if i < j { (i, j) } else { (j, i) };
        self.c.get(&key).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn set_gamma(&mut self, i: usize, j: usize, e: Expr) {
        let e = canonicalize(&e);
        if e.is_zero_literal() {
            self.gamma.remove(&(i, j));
        } else {
            self.gamma.insert((i, j), e);
        }
    }

    pub fn set_c(&mut self, i: usize, j: usize, e: Expr) {
        let key = if i < j { (i, j) } else { (j, i) };
        let e = canonicalize(&e);
        if e.is_zero_literal() {
            self.c.remove(&key);
        } else {
            self.c.insert(key, e);
        }
    }

    pub fn from_dmz(s: &DmzSystem) -> Result<GaugeOperator, GaugeError> {
        if let Some(((i, j, k), _)) = s.off_index().into_iter().find(|(_, e)| !is_zero(e).is_zero()) {
            return Err(GaugeError::OffIndex(i + 1, j + 1, k + 1));
        }
        let mut d = GaugeOperator::new(&s.coords);
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                if i != j {
                    d.set_gamma(i, j, s.gamma(j, i, j));
                    if i < j {
                        d.set_c(i, j, s.c(i, j));
                    }
                }
            }
        }
        Ok(d)
    }

    pub fn to_dmz(&self) -> DmzSystem {
        let mut s = DmzSystem::new(&self.coords);
        for (&(i, j), e) in &self.gamma {
            s.set_gamma(j, i, j, e.clone()).expect("indices in range");
        }
        for (&(i, j), e) in &self.c {
            s.set_c(i, j, e.clone()).expect("indices in range");
        }
        s
    }

    pub fn has_zero_c(&self) -> bool {
        self.c.is_empty()
    }

    /// `L_ij u` for `i < j`.
    pub fn apply(&self, i: usize, j: usize, u: &Expr) -> Expr {
        let (xi, xj) = (&self.coords[i], &self.coords[j]);
        let ui = u.diff(xi);
        let e = ui.diff(xj) - self.gamma(j, i) * ui - self.gamma(i, j) * u.diff(xj) + self.c(i, j) * u.clone();
        canonicalize(&e)
    }
}

impl fmt::Display for GaugeOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((i, j), e) in &self.gamma {
            writeln!(f, "Gamma_{}{} = {}", i + 1, j + 1, e)?;
        }
        for ((i, j), e) in &self.c {
            writeln!(f, "C_{}{} = {}", i + 1, j + 1, e)?;
        }
        Ok(())
    }
}

/// `Γ̄_ij = Γ_ij + ∂_iλ`, `C̄_ij = C_ij − λ_ij + λ_iλ_j + Γ_jiλ_i + Γ_ijλ_j`.
pub fn gauge_transform(d: &GaugeOperator, lambda: &Expr) -> GaugeOperator {
    let n = d.dim();
    let grad: Vec<Expr> = d.coords.iter().map(|x| lambda.diff(x)).collect();
    let mut out = GaugeOperator::new(&d.coords);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            out.set_gamma(i, j, d.gamma(i, j) + grad[i].clone());
            if i < j {
                let c = d.c(i, j) - grad[i].diff(&d.coords[j]) + grad[i].clone() * grad[j].clone()
                    + d.gamma(j, i) * grad[i].clone()
                    + d.gamma(i, j) * grad[j].clone();
                out.set_c(i, j, c);
            }
        }
    }
    out
}

/// `h_ij = ∂_jΓ_ij − Γ_ijΓ_ji + C_ij` for every ordered pair.
pub fn gauge_invariants(d: &GaugeOperator) -> BTreeMap<(usize, usize), Expr> {
    let mut out = BTreeMap::new();
    for i in 0..d.dim() {
        for j in 0..d.dim() {
            if i != j {
                let h = d.gamma(i, j).diff(&d.coords[j]) - d.gamma(i, j) * d.gamma(j, i) + d.c(i, j);
                out.insert((i, j), canonicalize(&h));
            }
        }
    }
    out
}

/// The `n(n−1)/2` components `L_ij u`, labelled `L12`, `L13`, ….
pub fn residual_operator_apply(d: &GaugeOperator, u: &Expr) -> Vec<Residual> {
    let mut out = Vec::new();
    for i in 0..d.dim() {
        for j in i + 1..d.dim() {
            out.push(Residual::new(format!("L{}{}", i + 1, j + 1), d.apply(i, j, u)));
        }
    }
    out
}

/// Conjugation by a solution `u` of `D u = 0`, which removes `C`.
pub fn to_threewave_gauge(d: &GaugeOperator, u: &Expr, cfg: &ZeroTest) -> Result<GaugeOperator, GaugeError> {
    let check = CheckReport::run(residual_operator_apply(d, u), cfg);
    if !check.passed() {
        return Err(GaugeError::NotASolution(check.to_string()));
    }
    let out = gauge_transform(d, &-Expr::ln(u.clone()));
    if let Some((k, c)) = out.c.iter().find(|(_, c)| !is_zero(c).is_zero()) {
        return Err(GaugeError::Verification(format!("C_{}{} = {} after gauging", k.0 + 1, k.1 + 1, c)));
    }
    Ok(GaugeOperator {
        c: BTreeMap::new(),
        ..out
    })
}

/// `λ_ij − Γ_ijΓ_ji` for `i < j`.
pub fn m3wri_gauge_residuals(d: &GaugeOperator, lambda: &Expr) -> Vec<Residual> {
    let mut out = Vec::new();
    for i in 0..d.dim() {
        for j in i + 1..d.dim() {
            let e = lambda.diff(&d.coords[i]).diff(&d.coords[j]) - d.gamma(i, j) * d.gamma(j, i);
            out.push(Residual::new(format!("gauge({},{})", i + 1, j + 1), e));
        }
    }
    out
}

/// Solvability of `λ_ij = Γ_ijΓ_ji`: `∂_k(Γ_ijΓ_ji) − ∂_j(Γ_ikΓ_ki)`.
pub fn m3wri_solvability_residuals(d: &GaugeOperator) -> Vec<Residual> {
    let rs = triples(d.dim())
        .into_iter()
        .filter(|(_, j, k)| j < k)
        .map(|(i, j, k)| {
            let e = (d.gamma(i, j) * d.gamma(j, i)).diff(&d.coords[k]) - (d.gamma(i, k) * d.gamma(k, i)).diff(&d.coords[j]);
            Residual::new(format!("solvability({},{},{})", i + 1, j + 1, k + 1), e)
        })
        .collect();
    crate::residual::dedup(rs)
}

/// `C_ij − Γ_ijΓ_ji` for `i < j`.
pub fn m3wri_constraint_residuals(d: &GaugeOperator) -> Vec<Residual> {
    let mut out = Vec::new();
    for i in 0..d.dim() {
        for j in i + 1..d.dim() {
            out.push(Residual::new(
                format!("constraint({},{})", i + 1, j + 1),
                d.c(i, j) - d.gamma(i, j) * d.gamma(j, i),
            ));
        }
    }
    out
}

/// Gauges a `C = 0` operator by `T_{−λ}` where `λ_ij = Γ_ijΓ_ji`, producing
/// coefficients with `C̄_ij = Γ̄_ijΓ̄_ji`.
pub fn to_m3wri_gauge(d: &GaugeOperator, lambda: &Expr, cfg: &ZeroTest) -> Result<GaugeOperator, GaugeError> {
    if !d.c.values().all(|c| is_zero(c).is_zero()) {
        return Err(GaugeError::NonzeroC);
    }
    let solvable = CheckReport::run(m3wri_solvability_residuals(d), cfg);
    if !solvable.passed() {
        return Err(GaugeError::GaugeCondition(solvable.to_string()));
    }
    let cond = CheckReport::run(m3wri_gauge_residuals(d, lambda), cfg);
    if !cond.passed() {
        return Err(GaugeError::GaugeCondition(cond.to_string()));
    }
    let out = gauge_transform(d, &-lambda.clone());
    let constraint = CheckReport::run(m3wri_constraint_residuals(&out), cfg);
    if !constraint.passed() {
        return Err(GaugeError::Verification(constraint.to_string()));
    }
    Ok(out)
}
