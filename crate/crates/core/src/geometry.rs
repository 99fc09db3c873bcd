//! Vector fields on coordinate charts, distributions and their derived flags,
//! Cauchy characteristics, and the n-hyperbolic structure test.

use crate::linalg::RatMatrix;
use crate::symkernel::{canonicalize, formal_is_zero, is_zero, Expr};
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("coordinate names must be distinct and nonempty")]
    BadChart,
    #[error("vector fields live on different charts")]
    ChartMismatch,
    #[error("expected {expected} coefficients, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("ambient dimension {found} is not 3n+1 = {expected}")]
    WrongDimension { expected: usize, found: usize },
    #[error("a coefficient divides by zero")]
    DivisionByZero,
}

/// Ordered coordinate names.
#[derive(Clone, PartialEq, Eq)]
pub struct Chart(Arc<[String]>);

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart{:?}", &*self.0)
    }
}

impl Chart {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Chart, GeometryError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = std::collections::BTreeSet::new();
        if names.iter().any(|n| n.is_empty() || !seen.insert(n.clone())) {
            return Err(GeometryError::BadChart);
        }
        Ok(Chart(names.into()))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    fn name_refs(&self) -> Vec<&str> {
        self.0.iter().map(|s| s.as_str()).collect()
    }
}

/// A derivation `Σ a_k ∂_{x_k}` with canonical coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    chart: Chart,
    coeffs: Vec<Expr>,
}

impl VectorField {
    pub fn new(chart: &Chart, coeffs: Vec<Expr>) -> Result<VectorField, GeometryError> {
        if coeffs.len() != chart.dim() {
            return Err(GeometryError::WrongLength {
                expected: chart.dim(),
                found: coeffs.len(),
            });
        }
        let coeffs = coeffs
            .iter()
            .map(crate::symkernel::try_canonicalize)
            .collect::<Result<_, _>>()
            .map_err(|_| GeometryError::DivisionByZero)?;
        Ok(VectorField {
            chart: chart.clone(),
            coeffs,
        })
    }

    pub fn zero(chart: &Chart) -> VectorField {
        VectorField {
            chart: chart.clone(),
            coeffs: vec![Expr::zero(); chart.dim()],
        }
    }

    /// The coordinate field `∂_name`.
    pub fn coordinate(chart: &Chart, name: &str) -> Result<VectorField, GeometryError> {
        let i = chart
            .index(name)
            .ok_or_else(|| GeometryError::UnknownCoordinate(name.to_string()))?;
        let mut v = VectorField::zero(chart);
        v.coeffs[i] = Expr::one();
        Ok(v)
    }

    /// Field from `(coordinate, coefficient)` pairs; repeated names add up.
    pub fn from_pairs(chart: &Chart, pairs: &[(&str, Expr)]) -> Result<VectorField, GeometryError> {
        let mut coeffs = vec![Expr::zero(); chart.dim()];
        for (name, c) in pairs {
            let i = chart
                .index(name)
                .ok_or_else(|| GeometryError::UnknownCoordinate(name.to_string()))?;
            coeffs[i] = coeffs[i].clone() + c.clone();
        }
        VectorField::new(chart, coeffs)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn coeff(&self, name: &str) -> Option<&Expr> {
        self.chart.index(name).map(|i| &self.coeffs[i])
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let terms = self
            .chart
            .names()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero_literal())
            .map(|(n, c)| c.clone() * f.diff(n));
        canonicalize(&Expr::add_all(terms))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero_literal())
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| canonicalize(&(a.clone() + b.clone())))
                .collect(),
        }
    }

    pub fn scale(&self, f: &Expr) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            coeffs: self.coeffs.iter().map(|a| canonicalize(&(a.clone() * f.clone()))).collect(),
        }
    }

    /// The same field on a larger chart containing every coordinate of this one.
    pub fn extend_to(&self, chart: &Chart) -> Result<VectorField, GeometryError> {
        let mut coeffs = vec![Expr::zero(); chart.dim()];
        for (n, c) in self.chart.names().iter().zip(&self.coeffs) {
            let i = chart.index(n).ok_or_else(|| GeometryError::UnknownCoordinate(n.clone()))?;
            coeffs[i] = c.clone();
        }
        Ok(VectorField {
            chart: chart.clone(),
            coeffs,
        })
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (n, c) in self.chart.names().iter().zip(&self.coeffs) {
            if c.is_zero_literal() {
                continue;
            }
            if c.is_one_literal() {
                parts.push(format!("d_{}", n));
            } else {
                parts.push(format!("({})*d_{}", c, n));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, GeometryError> {
    if x.chart != y.chart {
        return Err(GeometryError::ChartMismatch);
    }
    let coeffs = x
        .coeffs
        .iter()
        .zip(&y.coeffs)
        .map(|(xk, yk)| canonicalize(&(x.apply(yk) - y.apply(xk))))
        .collect();
    Ok(VectorField {
        chart: x.chart.clone(),
        coeffs,
    })
}

/// A spanning set of vector fields with its generic rank.
#[derive(Clone, Debug)]
pub struct Distribution {
    chart: Chart,
    fields: Vec<VectorField>,
    rank: usize,
    basis: Vec<usize>,
    degenerate: Vec<Expr>,
}

impl Distribution {
    pub fn new(chart: &Chart, fields: Vec<VectorField>) -> Result<Distribution, GeometryError> {
        if fields.iter().any(|f| f.chart != *chart) {
            return Err(GeometryError::ChartMismatch);
        }
        let info = rank_of(chart, &fields)?;
        Ok(Distribution {
            chart: chart.clone(),
            fields,
            rank: info.rank,
            basis: info.pivot_rows,
            degenerate: info.degenerate,
        })
    }

    pub fn coordinate_span(chart: &Chart, names: &[&str]) -> Result<Distribution, GeometryError> {
        let fields = names
            .iter()
            .map(|n| VectorField::coordinate(chart, n))
            .collect::<Result<Vec<_>, _>>()?;
        Distribution::new(chart, fields)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// An independent subset of the spanning set, in input order.
    pub fn basis(&self) -> Vec<VectorField> {
        let mut idx = self.basis.clone();
        idx.sort_unstable();
        idx.into_iter().map(|i| self.fields[i].clone()).collect()
    }

    /// Non-constant pivots met during elimination; the rank drops on their zero sets.
    pub fn degenerate_locus(&self) -> &[Expr] {
        &self.degenerate
    }

    pub fn contains(&self, x: &VectorField) -> Result<bool, GeometryError> {
        let mut fields = self.basis();
        fields.push(x.clone());
        Ok(rank_of(&self.chart, &fields)?.rank == self.rank)
    }

    pub fn contains_all(&self, other: &Distribution) -> Result<bool, GeometryError> {
        let mut fields = self.basis();
        fields.extend(other.basis());
        Ok(rank_of(&self.chart, &fields)?.rank == self.rank)
    }

    /// Equal spans.
    pub fn same_span(&self, other: &Distribution) -> Result<bool, GeometryError> {
        Ok(self.rank == other.rank && self.contains_all(other)?)
    }

    pub fn with_fields(&self, extra: &[VectorField]) -> Result<Distribution, GeometryError> {
        let mut fields = self.basis();
        fields.extend_from_slice(extra);
        Distribution::new(&self.chart, fields)
    }

    /// Frobenius integrability.
    pub fn is_integrable(&self) -> Result<bool, GeometryError> {
        Ok(derived(self)?.rank == self.rank)
    }
}

fn rank_of(chart: &Chart, fields: &[VectorField]) -> Result<crate::linalg::RankInfo, GeometryError> {
    let rows: Vec<Vec<Expr>> = fields.iter().map(|f| f.coeffs.clone()).collect();
    let m = RatMatrix::from_exprs(&chart.name_refs(), &rows, chart.dim()).map_err(|_| GeometryError::DivisionByZero)?;
    Ok(m.rank_info())
}

/// `V + [V, V]`.
fn derived(d: &Distribution) -> Result<Distribution, GeometryError> {
    let basis = d.basis();
    let pairs: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|i| (i + 1..basis.len()).map(move |j| (i, j)))
        .collect();
    let brackets = pairs
        .par_iter()
        .map(|&(i, j)| lie_bracket(&basis[i], &basis[j]))
        .collect::<Result<Vec<_>, _>>()?;
    let nonzero: Vec<VectorField> = brackets.into_iter().filter(|b| !b.is_zero()).collect();
    d.with_fields(&nonzero)
}

/// `D, D^(1), D^(2), …` up to the first repeated rank.
pub fn derived_flag(d: &Distribution) -> Result<Vec<Distribution>, GeometryError> {
    let mut flag = vec![d.clone()];
    loop {
        let last = flag.last().unwrap();
        let next = derived(last)?;
        if next.rank == last.rank {
            return Ok(flag);
        }
        flag.push(next);
    }
}

/// `ch D = {X ∈ D : [X, D] ⊆ D}`.
pub fn cauchy_characteristic(d: &Distribution) -> Result<Distribution, GeometryError> {
    let chart = &d.chart;
    let basis = d.basis();
    let r = basis.len();
    if r == 0 {
        return Distribution::new(chart, vec![]);
    }
    let dim = chart.dim();
    let rows: Vec<Vec<Expr>> = basis.iter().map(|f| f.coeffs.clone()).collect();
    let m = RatMatrix::from_exprs(&chart.name_refs(), &rows, dim).map_err(|_| GeometryError::DivisionByZero)?;
    let (echelon, pivots) = m.rref();
    let echelon: Vec<Vec<Expr>> = echelon.iter().map(|row| row.iter().map(|e| m.to_expr(e)).collect()).collect();
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    if free.is_empty() {
        return Ok(d.clone());
    }
    // normal form of a vector modulo D, on the non-pivot columns
    let reduce = |v: &VectorField| -> Vec<Expr> {
        free.iter()
            .map(|&c| {
                let mut acc = v.coeffs[c].clone();
                for (row, &p) in echelon.iter().zip(&pivots) {
                    if !v.coeffs[p].is_zero_literal() {
                        acc = acc - v.coeffs[p].clone() * row[c].clone();
                    }
                }
                canonicalize(&acc)
            })
            .collect()
    };
    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).collect();
    let normal: Vec<Vec<Expr>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            if i == j {
                Ok(vec![Expr::zero(); free.len()])
            } else {
                lie_bracket(&basis[i], &basis[j]).map(|b| reduce(&b))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    // system rows: for each j and free column c, Σ_i a_i NF([X_i, X_j])_c = 0
    let mut sys: Vec<Vec<Expr>> = Vec::new();
    for j in 0..r {
        for c in 0..free.len() {
            let row: Vec<Expr> = (0..r).map(|i| normal[i * r + j][c].clone()).collect();
            if row.iter().any(|e| !e.is_zero_literal()) {
                sys.push(row);
            }
        }
    }
    if sys.is_empty() {
        return Distribution::new(chart, basis);
    }
    let sm = RatMatrix::from_exprs(&chart.name_refs(), &sys, r).map_err(|_| GeometryError::DivisionByZero)?;
    let fields: Vec<VectorField> = sm
        .nullspace()
        .iter()
        .map(|a| {
            let mut acc = VectorField::zero(chart);
            for (ai, xi) in a.iter().zip(&basis) {
                if !ai.is_zero() {
                    acc = acc.add(&xi.scale(&sm.to_expr(ai)));
                }
            }
            acc
        })
        .collect();
    Distribution::new(chart, fields)
}

/// `[[dim D^(j), dim ch D^(j)], …]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedType(pub Vec<[usize; 2]>);

impl fmt::Display for DerivedType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.0.iter().map(|[a, b]| format!("[{},{}]", a, b)).collect();
        write!(f, "[{}]", inner.join(","))
    }
}

impl DerivedType {
    pub fn parse(s: &str) -> Option<DerivedType> {
        let digits: Vec<usize> = s
            .split(|c: char| !c.is_ascii_digit())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().ok())
            .collect::<Option<_>>()?;
        if digits.len() % 2 != 0 {
            return None;
        }
        Some(DerivedType(digits.chunks(2).map(|c| [c[0], c[1]]).collect()))
    }

    /// `[[2n,0],[3n,n],[3n+1,3n+1]]`.
    pub fn hyperbolic(n: usize) -> DerivedType {
        DerivedType(vec![[2 * n, 0], [3 * n, n], [3 * n + 1, 3 * n + 1]])
    }
}

pub fn derived_type(d: &Distribution) -> Result<DerivedType, GeometryError> {
    let flag = derived_flag(d)?;
    let entries = flag
        .par_iter()
        .map(|x| cauchy_characteristic(x).map(|ch| [x.rank(), ch.rank()]))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DerivedType(entries))
}

/// Outcome of the n-hyperbolic structure test.
#[derive(Clone, Debug)]
pub struct HyperbolicReport {
    pub n: usize,
    pub cross_brackets: bool,
    pub self_brackets: bool,
    pub derived_type: Option<DerivedType>,
    pub cauchy_in_h: bool,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

impl HyperbolicReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `[H_i,H_j] ≡ 0`, `[H_i,H_i] ≡ Z_i` with independent `Z_i`, and the
/// derived type `[[2n,0],[3n,n],[3n+1,3n+1]]` for `H = ⊕ H_i`.
pub fn check_n_hyperbolic(parts: &[Distribution]) -> Result<HyperbolicReport, GeometryError> {
    let n = parts.len();
    let mut report = HyperbolicReport {
        n,
        cross_brackets: false,
        self_brackets: false,
        derived_type: None,
        cauchy_in_h: false,
        failures: Vec::new(),
        warnings: Vec::new(),
    };
    let Some(first) = parts.first() else {
        report.failures.push("no parts given".into());
        return Ok(report);
    };
    let chart = first.chart().clone();
    if parts.iter().any(|p| *p.chart() != chart) {
        return Err(GeometryError::ChartMismatch);
    }
    if chart.dim() != 3 * n + 1 {
        report.failures.push(format!(
            "wrong ambient dimension: {} instead of 3n+1 = {}",
            chart.dim(),
            3 * n + 1
        ));
        return Ok(report);
    }
    for (i, p) in parts.iter().enumerate() {
        if p.rank() != 2 {
            report.failures.push(format!("part {} has rank {} instead of 2", i + 1, p.rank()));
        }
    }
    if !report.failures.is_empty() {
        return Ok(report);
    }
    let all: Vec<VectorField> = parts.iter().flat_map(|p| p.basis()).collect();
    let h = Distribution::new(&chart, all)?;
    for d in h.degenerate_locus() {
        report.warnings.push(format!("rank of H drops where {} = 0", d));
    }
    if h.rank() != 2 * n {
        report.failures.push(format!("H has rank {} instead of {}", h.rank(), 2 * n));
        return Ok(report);
    }
    let mut cross_ok = true;
    for i in 0..n {
        for j in i + 1..n {
            for a in parts[i].basis() {
                for b in parts[j].basis() {
                    let br = lie_bracket(&a, &b)?;
                    if !br.is_zero() && !h.contains(&br)? {
                        cross_ok = false;
                        report.failures.push(format!("[H_{}, H_{}] is not contained in H: {}", i + 1, j + 1, br));
                    }
                }
            }
        }
    }
    report.cross_brackets = cross_ok;
    let mut zs = Vec::new();
    for p in parts {
        let b = p.basis();
        zs.push(lie_bracket(&b[0], &b[1])?);
    }
    let hz = h.with_fields(&zs)?;
    report.self_brackets = hz.rank() == 3 * n;
    if !report.self_brackets {
        report
            .failures
            .push(format!("Z_1 ∧ … ∧ Z_n vanishes modulo H (rank {} instead of {})", hz.rank(), 3 * n));
    }
    let dt = derived_type(&h)?;
    if dt != DerivedType::hyperbolic(n) {
        report
            .failures
            .push(format!("derived type {} differs from {}", dt, DerivedType::hyperbolic(n)));
    }
    report.derived_type = Some(dt);
    let flag = derived_flag(&h)?;
    if flag.len() > 1 {
        let ch = cauchy_characteristic(&flag[1])?;
        report.cauchy_in_h = h.contains_all(&ch)?;
        if !report.cauchy_in_h {
            report.failures.push("ch H^(1) is not contained in H".into());
        }
    }
    Ok(report)
}

/// Result of checking that functions are a complete set of invariants.
#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub annihilated: bool,
    pub expected_count: usize,
    pub independent: bool,
    pub failures: Vec<String>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_invariants(d: &Distribution, fns: &[Expr]) -> Result<InvariantReport, GeometryError> {
    let chart = d.chart();
    let mut failures = Vec::new();
    let mut annihilated = true;
    for (k, x) in d.fields().iter().enumerate() {
        for f in fns {
            let v = x.apply(f);
            let zero = if v.has_opaque() {
                formal_is_zero(&v)
            } else {
                is_zero(&v).is_zero()
            };
            if !zero {
                annihilated = false;
                failures.push(format!("field {} does not annihilate {}: {}", k + 1, f, v));
            }
        }
    }
    let expected_count = chart.dim() - d.rank();
    if fns.len() != expected_count {
        failures.push(format!("{} functions given, {} expected", fns.len(), expected_count));
    }
    let grads: Vec<Vec<Expr>> = fns
        .iter()
        .map(|f| chart.names().iter().map(|n| canonicalize(&f.diff(n))).collect())
        .collect();
    let m = RatMatrix::from_exprs(&chart.name_refs(), &grads, chart.dim()).map_err(|_| GeometryError::DivisionByZero)?;
    let independent = m.rank() == fns.len();
    if !independent {
        failures.push("the functions are functionally dependent".into());
    }
    Ok(InvariantReport {
        annihilated,
        expected_count,
        independent,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::parse;

    fn field(chart: &Chart, pairs: &[(&str, &str)]) -> VectorField {
        let p: Vec<(&str, Expr)> = pairs.iter().map(|(n, c)| (*n, parse(c).unwrap())).collect();
        VectorField::from_pairs(chart, &p).unwrap()
    }

    #[test]
    fn bracket_of_translation_and_shear() {
        let c = Chart::new(&["x", "y"]).unwrap();
        let dx = VectorField::coordinate(&c, "x").unwrap();
        let xdy = field(&c, &[("y", "x")]);
        assert_eq!(lie_bracket(&dx, &xdy).unwrap(), VectorField::coordinate(&c, "y").unwrap());
        assert!(lie_bracket(&xdy, &xdy).unwrap().is_zero());
    }

    #[test]
    fn frobenius_flag_is_stationary() {
        let c = Chart::new(&["x", "y", "z"]).unwrap();
        let d = Distribution::coordinate_span(&c, &["x", "y"]).unwrap();
        let flag = derived_flag(&d).unwrap();
        assert_eq!(flag.len(), 1);
        assert!(cauchy_characteristic(&d).unwrap().same_span(&d).unwrap());
        let c2 = Chart::new(&["x", "y"]).unwrap();
        let full = Distribution::coordinate_span(&c2, &["x", "y"]).unwrap();
        assert_eq!(derived_type(&full).unwrap(), DerivedType(vec![[2, 2]]));
    }

    #[test]
    fn second_order_contact_flag() {
        let c = Chart::new(&["x", "u", "u1", "u2"]).unwrap();
        let total = field(&c, &[("x", "1"), ("u", "u1"), ("u1", "u2")]);
        let vert = VectorField::coordinate(&c, "u2").unwrap();
        let d = Distribution::new(&c, vec![total, vert]).unwrap();
        let ranks: Vec<usize> = derived_flag(&d).unwrap().iter().map(|x| x.rank()).collect();
        assert_eq!(ranks, vec![2, 3, 4]);
        assert_eq!(cauchy_characteristic(&d).unwrap().rank(), 0);
        assert_eq!(derived_type(&d).unwrap(), DerivedType::hyperbolic(1));
    }

    #[test]
    fn invariants_of_vertical_field() {
        let c = Chart::new(&["x", "y", "u"]).unwrap();
        let d = Distribution::coordinate_span(&c, &["u"]).unwrap();
        let r = verify_invariants(&d, &[parse("x").unwrap(), parse("y").unwrap()]).unwrap();
        assert!(r.passed());
        let bad = verify_invariants(&d, &[parse("x").unwrap(), parse("x*u").unwrap()]).unwrap();
        assert!(!bad.passed());
    }

    #[test]
    fn wrong_dimension_is_reported() {
        let c = Chart::new(&["x", "y"]).unwrap();
        let d = Distribution::coordinate_span(&c, &["x", "y"]).unwrap();
        let r = check_n_hyperbolic(&[d]).unwrap();
        assert!(r.failures[0].contains("wrong ambient dimension"));
    }

    #[test]
    fn derived_type_parses() {
        let t = DerivedType::parse("[[6,0],[9,3],[10,10]]").unwrap();
        assert_eq!(t, DerivedType::hyperbolic(3));
        assert_eq!(t.to_string(), "[[6,0],[9,3],[10,10]]");
    }
}
