//! Labelled residual lists and their zero-test reports.

use crate::symkernel::{canonicalize, is_zero_with, Expr, Verdict, ZeroTest};
use rayon::prelude::*;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub label: String,
    /// Canonical form.
    pub expr: Expr,
    /// The expression as generated, kept when it has transcendental atoms so
    /// that zero testing samples it even if rewriting reduced it to 0.
    pub raw: Option<Expr>,
}

impl Residual {
    pub fn new(label: impl Into<String>, expr: Expr) -> Residual {
        Residual {
            label: label.into(),
            raw: expr.has_transcendental().then(|| expr.clone()),
            expr: canonicalize(&expr),
        }
    }
}

/// Drops nonzero residuals equal to an earlier one up to sign; first labels
/// win. Residuals that canonicalize to 0 are all kept.
pub fn dedup(rs: Vec<Residual>) -> Vec<Residual> {
    let mut out: Vec<Residual> = Vec::with_capacity(rs.len());
    for r in rs {
        if r.expr.is_zero_literal() {
            out.push(r);
            continue;
        }
        let neg = canonicalize(&-r.expr.clone());
        if !out.iter().any(|o| o.expr == r.expr || o.expr == neg) {
            out.push(r);
        }
    }
    out
}

/// Every residual with its verdict.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub entries: Vec<(Residual, Verdict)>,
}

impl CheckReport {
    pub fn run(rs: Vec<Residual>, cfg: &ZeroTest) -> CheckReport {
        let entries = rs
            .into_par_iter()
            .map(|r| {
                let v = is_zero_with(r.raw.as_ref().unwrap_or(&r.expr), cfg);
                (r, v)
            })
            .collect();
        CheckReport { entries }
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|(_, v)| v.is_zero())
    }

    pub fn all_provable(&self) -> bool {
        self.entries.iter().all(|(_, v)| *v == Verdict::ProvablyZero)
    }

    pub fn first_failure(&self) -> Option<&(Residual, Verdict)> {
        self.entries.iter().find(|(_, v)| !v.is_zero())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Smallest sample count among probabilistic verdicts.
    pub fn min_samples(&self) -> Option<usize> {
        self.entries
            .iter()
            .filter_map(|(_, v)| match v {
                Verdict::ProbablyZero { samples } => Some(*samples),
                _ => None,
            })
            .min()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, v) in &self.entries {
            writeln!(f, "  {:<24} {}", r.label, v.label())?;
        }
        match self.first_failure() {
            None if self.entries.is_empty() => write!(f, "  no residuals"),
            None => write!(f, "  all {} residuals vanish", self.entries.len()),
            Some((r, v)) => {
                writeln!(f, "  first non-vanishing residual {}: {}", r.label, r.expr)?;
                match v.witness() {
                    Some(w) => write!(f, "  witness {}", w),
                    None => write!(f, "  no witness point found"),
                }
            }
        }
    }
}

/// All ordered triples of distinct indices below `n`.
pub fn triples(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i != j && j != k && i != k {
                    out.push((i, j, k));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::parse;

    #[test]
    fn dedup_up_to_sign() {
        let rs = vec![
            Residual::new("a", parse("x-y").unwrap()),
            Residual::new("b", parse("y-x").unwrap()),
            Residual::new("c", parse("x").unwrap()),
        ];
        let d = dedup(rs);
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].label, "a");
    }

    #[test]
    fn report_finds_first_failure() {
        let rs = vec![Residual::new("zero", Expr::zero()), Residual::new("bad", parse("x").unwrap())];
        let r = CheckReport::run(rs, &ZeroTest::default());
        assert!(!r.passed());
        assert_eq!(r.first_failure().unwrap().0.label, "bad");
        assert_eq!(triples(3).len(), 6);
    }
}
