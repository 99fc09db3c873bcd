//! n-wave and modified n-wave resonant interaction systems, their linear
//! problem, and the Lamé equations for potentials `h_i`.

use crate::dmz::LamePotentials;
use crate::gauge::GaugeOperator;
use crate::residual::{dedup, triples, Residual};
use crate::symkernel::{canonicalize, Expr};
use std::collections::BTreeMap;
use std::fmt;

/// Off-diagonal entries `A_ij`, `i ≠ j`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveMatrix {
    pub coords: Vec<String>,
    pub a: BTreeMap<(usize, usize), Expr>,
}

impl WaveMatrix {
    pub fn new<S: AsRef<str>>(coords: &[S]) -> WaveMatrix {
        WaveMatrix {
            coords: coords.iter().map(|s| s.as_ref().to_string()).collect(),
            a: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Expr {
        self.a.get(&(i, j)).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, e: Expr) {
        assert!(i != j, "wave matrices have no diagonal");
        let e = canonicalize(&e);
        if e.is_zero_literal() {
            self.a.remove(&(i, j));
        } else {
            self.a.insert((i, j), e);
        }
    }

    /// The operator coefficients `Γ_ij`.
    pub fn from_operator(d: &GaugeOperator) -> WaveMatrix {
        WaveMatrix {
            coords: d.coords.clone(),
            a: d.gamma.clone(),
        }
    }
}

impl fmt::Display for WaveMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((i, j), e) in &self.a {
            if !first {
                writeln!(f)?;
            }
            first = false;
            write!(f, "A[{}][{}] = {}", i + 1, j + 1, e)?;
        }
        Ok(())
    }
}

fn tag(i: usize, j: usize, k: usize) -> String {
    format!("({},{},{})", i + 1, j + 1, k + 1)
}

/// `∂_i A_jk − A_ji A_ik`.
pub fn nwave_residuals(a: &WaveMatrix) -> Vec<Residual> {
    let rs = triples(a.dim())
        .into_iter()
        .map(|(i, j, k)| {
            let e = a.get(j, k).diff(&a.coords[i]) - a.get(j, i) * a.get(i, k);
            Residual::new(format!("nwave{}", tag(i, j, k)), e)
        })
        .collect();
    dedup(rs)
}

/// `∂_i Γ_jk − (Γ_ij − Γ_ik)(Γ_jk − Γ_ji)`.
pub fn m3wri_residuals(g: &WaveMatrix) -> Vec<Residual> {
    let rs = triples(g.dim())
        .into_iter()
        .map(|(i, j, k)| {
            let e = g.get(j, k).diff(&g.coords[i]) - (g.get(i, j) - g.get(i, k)) * (g.get(j, k) - g.get(j, i));
            Residual::new(format!("m3wri{}", tag(i, j, k)), e)
        })
        .collect();
    dedup(rs)
}

/// `A_ij = ∂_i h_j / h_i`.
pub fn wave_from_lame<S: AsRef<str>>(coords: &[S], h: &LamePotentials) -> WaveMatrix {
    let mut a = WaveMatrix::new(coords);
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            if i != j {
                let e = h.0[j].diff(&a.coords[i]) / h.0[i].clone();
                a.set(i, j, e);
            }
        }
    }
    a
}

/// `∂_i ψ_j − A_ji ψ_i`, `i ≠ j`.
pub fn linear_problem_residuals(a: &WaveMatrix, psi: &[Expr]) -> Vec<Residual> {
    let mut out = Vec::new();
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            if i != j {
                let e = psi[j].diff(&a.coords[i]) - a.get(j, i) * psi[i].clone();
                out.push(Residual::new(format!("psi({},{})", i + 1, j + 1), e));
            }
        }
    }
    out
}

/// Which form of the Lamé equations to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LameForm {
    /// `∂_j∂_k h_i − ∂_k h_j ∂_j h_i/h_j − ∂_j h_k ∂_k h_i/h_k`.
    #[default]
    Classical,
    /// Last term written `∂_k h_k ∂_j h_i/h_k`.
    Verbatim,
}

fn rotation_term(h: &[Expr], x: &[String], i: usize, j: usize, k: usize, form: LameForm) -> Expr {
    let hi_j = h[i].diff(&x[j]);
    let first = h[i].diff(&x[j]).diff(&x[k]) - h[j].diff(&x[k]) * hi_j.clone() / h[j].clone();
    let last = match form {
        LameForm::Classical => h[k].diff(&x[j]) * h[i].diff(&x[k]) / h[k].clone(),
        LameForm::Verbatim => h[k].diff(&x[k]) * hi_j / h[k].clone(),
    };
    first - last
}

/// The rotation-coefficient equations over every ordered triple.
pub fn half_lame_residuals<S: AsRef<str>>(coords: &[S], h: &LamePotentials, form: LameForm) -> Vec<Residual> {
    let x: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
    let rs = triples(x.len())
        .into_iter()
        .map(|(i, j, k)| Residual::new(format!("half{}", tag(i, j, k)), rotation_term(&h.0, &x, i, j, k, form)))
        .collect();
    dedup(rs)
}

/// Both families of the flatness equations.
pub fn full_lame_residuals<S: AsRef<str>>(coords: &[S], h: &LamePotentials, form: LameForm) -> Vec<Residual> {
    let x: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
    let h = &h.0;
    let n = x.len();
    let mut rs: Vec<Residual> = triples(n)
        .into_iter()
        .map(|(i, l, m)| Residual::new(format!("first{}", tag(i, l, m)), rotation_term(h, &x, i, l, m, form)))
        .collect();
    for i in 0..n {
        for l in 0..n {
            if i == l {
                continue;
            }
            let mut terms = vec![
                (h[i].diff(&x[l]) / h[l].clone()).diff(&x[l]),
                (h[l].diff(&x[i]) / h[i].clone()).diff(&x[i]),
            ];
            for k in (0..n).filter(|&k| k != i && k != l) {
                terms.push(h[i].diff(&x[k]) * h[l].diff(&x[k]) / h[k].powi(2));
            }
            rs.push(Residual::new(format!("second({},{})", i + 1, l + 1), Expr::add_all(terms)));
        }
    }
    dedup(rs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::{is_zero, parse};

    fn all_zero(rs: &[Residual]) -> bool {
        rs.iter().all(|r| is_zero(&r.expr).is_zero())
    }

    fn pots(h: &[&str]) -> LamePotentials {
        LamePotentials(h.iter().map(|s| parse(s).unwrap()).collect())
    }

    const XYZ: [&str; 3] = ["x", "y", "z"];

    #[test]
    fn lame_chain() {
        let h = pots(&["(y*z^3-1)/(z*(z-x))", "1", "(-z^4*y-2*z+x+2*x*z^3*y)/(x-z)"]);
        let a = wave_from_lame(&XYZ, &h);
        assert!(all_zero(&nwave_residuals(&a)));
        assert!(all_zero(&half_lame_residuals(&XYZ, &h, LameForm::Classical)));
        assert!(!all_zero(&half_lame_residuals(&XYZ, &h, LameForm::Verbatim)));
        assert!(!all_zero(&full_lame_residuals(&XYZ, &h, LameForm::Classical)));
        let u = parse("(6-12*z^2-6*y*z^3+12*x*z)/(z*(x-z))").unwrap();
        let psi: Vec<Expr> = (0..3).map(|i| u.diff(XYZ[i]) / h.0[i].clone()).collect();
        assert!(all_zero(&linear_problem_residuals(&a, &psi)));
        let wrong = vec![parse("x").unwrap(), parse("y").unwrap(), parse("z").unwrap()];
        assert!(!all_zero(&linear_problem_residuals(&a, &wrong)));
    }

    #[test]
    fn oblate_metric_is_flat() {
        let h = pots(&["sqrt(cosh(x)^2-cos(y)^2)", "sqrt(cosh(x)^2-cos(y)^2)", "cosh(x)*cos(y)"]);
        assert!(all_zero(&full_lame_residuals(&XYZ, &h, LameForm::Classical)));
        assert!(!all_zero(&full_lame_residuals(&XYZ, &h, LameForm::Verbatim)));
    }

    #[test]
    fn constant_m3wri_fails() {
        let mut g = WaveMatrix::new(&XYZ);
        g.set(0, 1, Expr::int(1));
        g.set(1, 2, Expr::int(2));
        assert!(!all_zero(&m3wri_residuals(&g)));
        assert!(all_zero(&nwave_residuals(&WaveMatrix::new(&XYZ))));
    }

    #[test]
    fn m3wri_solution() {
        let s = crate::dmz::tests::m3wri_example();
        let d = GaugeOperator::from_dmz(&s).unwrap();
        assert!(all_zero(&m3wri_residuals(&WaveMatrix::from_operator(&d))));
    }
}
