//! Contact distributions on products of jet spaces `J^k(R,R)`, prolongation
//! of point vector fields, and pushforward along invertible maps.

use crate::geometry::{lie_bracket, Chart, Distribution, GeometryError, VectorField};
use crate::symkernel::{canonicalize, is_zero, substitute, Expr};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum JetError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{expected} base names needed, {found} given")]
    BaseCount { expected: usize, found: usize },
    #[error("field has a component on `{0}`, which is not a point coordinate")]
    NotAPointField(String),
    #[error("prolonged field is not a contact symmetry: [{field}, {contact}] = {bracket}")]
    NotASymmetry {
        field: String,
        contact: String,
        bracket: String,
    },
    #[error("map has {found} components for {expected} target coordinates")]
    MapArity { expected: usize, found: usize },
    #[error("map has no inverse")]
    MissingInverse,
    #[error("inverse fails on coordinate `{coordinate}`: composite gives {value}")]
    InverseMismatch { coordinate: String, value: String },
}

const DEFAULT_BASES: [&str; 6] = ["x", "y", "z", "t", "r", "s"];

/// `J^{k_1}(R,R) × … × J^{k_r}(R,R)` with coordinates `b, b0, …, b{k}` per factor.
#[derive(Clone, Debug)]
pub struct JetProduct {
    orders: Vec<usize>,
    bases: Vec<String>,
    chart: Chart,
}

impl JetProduct {
    pub fn new(orders: &[usize]) -> Result<JetProduct, JetError> {
        let bases: Vec<String> = (0..orders.len())
            .map(|i| {
                DEFAULT_BASES
                    .get(i)
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| format!("a{}", i + 1))
            })
            .collect();
        JetProduct::with_bases(orders, &bases)
    }

    pub fn with_bases<S: AsRef<str>>(orders: &[usize], bases: &[S]) -> Result<JetProduct, JetError> {
        if bases.len() != orders.len() {
            return Err(JetError::BaseCount {
                expected: orders.len(),
                found: bases.len(),
            });
        }
        let bases: Vec<String> = bases.iter().map(|b| b.as_ref().to_string()).collect();
        let mut names = Vec::new();
        for (b, &k) in bases.iter().zip(orders) {
            names.push(b.clone());
            for j in 0..=k {
                names.push(format!("{}{}", b, j));
            }
        }
        Ok(JetProduct {
            orders: orders.to_vec(),
            chart: Chart::new(&names)?,
            bases,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn bases(&self) -> &[String] {
        &self.bases
    }

    fn jet_name(&self, factor: usize, j: usize) -> String {
        format!("{}{}", self.bases[factor], j)
    }

    /// Truncated total derivative `∂_b + Σ_{j<k} b{j+1} ∂_{b{j}}` of one factor.
    pub fn total_derivative(&self, factor: usize) -> VectorField {
        let b = &self.bases[factor];
        let mut pairs = vec![(b.clone(), Expr::one())];
        for j in 0..self.orders[factor] {
            pairs.push((self.jet_name(factor, j), Expr::sym(&self.jet_name(factor, j + 1))));
        }
        let refs: Vec<(&str, Expr)> = pairs.iter().map(|(n, e)| (n.as_str(), e.clone())).collect();
        VectorField::from_pairs(&self.chart, &refs).expect("jet chart contains its own names")
    }
}

/// For each factor, the pair {total derivative, top vertical field}.
pub fn contact_basis(j: &JetProduct) -> Vec<Distribution> {
    (0..j.orders.len())
        .map(|f| {
            let top = VectorField::coordinate(&j.chart, &j.jet_name(f, j.orders[f])).expect("top coordinate");
            Distribution::new(&j.chart, vec![j.total_derivative(f), top]).expect("contact fields share the chart")
        })
        .collect()
}

/// The sum of all factor contact distributions.
pub fn contact_distribution(j: &JetProduct) -> Distribution {
    let fields: Vec<VectorField> = contact_basis(j).iter().flat_map(|d| d.fields().to_vec()).collect();
    Distribution::new(&j.chart, fields).expect("contact fields share the chart")
}

/// Prolongs a point field `Σ ξ_i ∂_{b_i} + η_i ∂_{b_i0}` with
/// `η^{(j)} = D(η^{(j-1)}) − b_j D(ξ)`, then checks it preserves the contact
/// distribution.
pub fn prolong(x: &VectorField, j: &JetProduct) -> Result<VectorField, JetError> {
    let chart = &j.chart;
    let mut coeffs = vec![Expr::zero(); chart.dim()];
    for (name, c) in x.chart().names().iter().zip(x.coeffs()) {
        if c.is_zero_literal() {
            continue;
        }
        let i = chart
            .index(name)
            .ok_or_else(|| GeometryError::UnknownCoordinate(name.clone()))?;
        let is_point = j
            .bases
            .iter()
            .enumerate()
            .any(|(f, b)| name == b || *name == j.jet_name(f, 0));
        if !is_point {
            return Err(JetError::NotAPointField(name.clone()));
        }
        coeffs[i] = c.clone();
    }
    for f in 0..j.orders.len() {
        let d = j.total_derivative(f);
        let xi = coeffs[chart.index(&j.bases[f]).unwrap()].clone();
        let dxi = d.apply(&xi);
        let mut eta = coeffs[chart.index(&j.jet_name(f, 0)).unwrap()].clone();
        for k in 1..=j.orders[f] {
            let next = canonicalize(&(d.apply(&eta) - Expr::sym(&j.jet_name(f, k)) * dxi.clone()));
            coeffs[chart.index(&j.jet_name(f, k)).unwrap()] = next.clone();
            eta = next;
        }
    }
    let pr = VectorField::new(chart, coeffs)?;
    let contact = contact_distribution(j);
    for c in contact.fields() {
        let b = lie_bracket(&pr, c)?;
        if !b.is_zero() && !contact.contains(&b)? {
            return Err(JetError::NotASymmetry {
                field: pr.to_string(),
                contact: c.to_string(),
                bracket: b.to_string(),
            });
        }
    }
    Ok(pr)
}

/// A map given by one expression per target coordinate in the source
/// coordinates, with an optional inverse.
#[derive(Clone, Debug)]
pub struct SymbolicMap {
    pub source: Chart,
    pub target: Chart,
    pub forward: Vec<Expr>,
    pub inverse: Option<Vec<Expr>>,
}

impl SymbolicMap {
    pub fn new(source: Chart, target: Chart, forward: Vec<Expr>, inverse: Option<Vec<Expr>>) -> Result<SymbolicMap, JetError> {
        if forward.len() != target.dim() {
            return Err(JetError::MapArity {
                expected: target.dim(),
                found: forward.len(),
            });
        }
        if let Some(inv) = &inverse {
            if inv.len() != source.dim() {
                return Err(JetError::MapArity {
                    expected: source.dim(),
                    found: inv.len(),
                });
            }
        }
        Ok(SymbolicMap {
            source,
            target,
            forward,
            inverse,
        })
    }

    pub fn identity(chart: &Chart) -> SymbolicMap {
        let coords: Vec<Expr> = chart.names().iter().map(|n| Expr::sym(n)).collect();
        SymbolicMap {
            source: chart.clone(),
            target: chart.clone(),
            forward: coords.clone(),
            inverse: Some(coords),
        }
    }

    fn bindings(names: &[String], values: &[Expr]) -> BTreeMap<String, Expr> {
        names.iter().cloned().zip(values.iter().cloned()).collect()
    }

    /// Both composites reduce to the identity.
    pub fn verify_inverse(&self) -> Result<(), JetError> {
        let inv = self.inverse.as_ref().ok_or(JetError::MissingInverse)?;
        let to_source = Self::bindings(self.source.names(), inv);
        for (name, f) in self.target.names().iter().zip(&self.forward) {
            let back = substitute(f, &to_source);
            if !is_zero(&(back.clone() - Expr::sym(name))).is_zero() {
                return Err(JetError::InverseMismatch {
                    coordinate: name.clone(),
                    value: back.to_string(),
                });
            }
        }
        let to_target = Self::bindings(self.target.names(), &self.forward);
        for (name, g) in self.source.names().iter().zip(inv) {
            let back = substitute(g, &to_target);
            if !is_zero(&(back.clone() - Expr::sym(name))).is_zero() {
                return Err(JetError::InverseMismatch {
                    coordinate: name.clone(),
                    value: back.to_string(),
                });
            }
        }
        Ok(())
    }

    /// `φ_* X`, with components `X(φ^k) ∘ φ^{-1}`.
    pub fn push_field(&self, x: &VectorField) -> Result<VectorField, JetError> {
        let inv = self.inverse.as_ref().ok_or(JetError::MissingInverse)?;
        if *x.chart() != self.source {
            return Err(GeometryError::ChartMismatch.into());
        }
        let to_source = Self::bindings(self.source.names(), inv);
        let coeffs = self.forward.iter().map(|f| substitute(&x.apply(f), &to_source)).collect();
        Ok(VectorField::new(&self.target, coeffs)?)
    }
}

pub fn pushforward(phi: &SymbolicMap, d: &Distribution) -> Result<Distribution, JetError> {
    phi.verify_inverse()?;
    let fields = d
        .fields()
        .iter()
        .map(|x| phi.push_field(x))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Distribution::new(&phi.target, fields)?)
}

fn rename_field(x: &VectorField, chart: &Chart, renaming: &BTreeMap<String, String>) -> Result<VectorField, JetError> {
    let subs: BTreeMap<String, Expr> = renaming.iter().map(|(a, b)| (a.clone(), Expr::sym(b))).collect();
    let mut coeffs = vec![Expr::zero(); chart.dim()];
    for (name, c) in x.chart().names().iter().zip(x.coeffs()) {
        let target = renaming.get(name).unwrap_or(name);
        let i = chart
            .index(target)
            .ok_or_else(|| GeometryError::UnknownCoordinate(target.clone()))?;
        coeffs[i] = canonicalize(&(coeffs[i].clone() + c.subs(&subs)));
    }
    Ok(VectorField::new(chart, coeffs)?)
}

/// Merges pushed-forward pieces onto one chart after renaming the group
/// coordinates of each piece to the shared names. Coordinates keep their
/// first-seen order. Returns the rank-2 parts of `H`.
pub fn assemble_quotient_h(
    pushed: &[Vec<Distribution>],
    renaming: &BTreeMap<String, String>,
) -> Result<Vec<Distribution>, JetError> {
    let mut names: Vec<String> = Vec::new();
    for group in pushed {
        for d in group {
            for n in d.chart().names() {
                let r = renaming.get(n).unwrap_or(n).clone();
                if !names.contains(&r) {
                    names.push(r);
                }
            }
        }
    }
    let chart = Chart::new(&names)?;
    let mut parts = Vec::new();
    for group in pushed {
        for d in group {
            let fields = d
                .fields()
                .iter()
                .map(|x| rename_field(x, &chart, renaming))
                .collect::<Result<Vec<_>, _>>()?;
            parts.push(Distribution::new(&chart, fields)?);
        }
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{derived_type, DerivedType};
    use crate::symkernel::parse;

    #[test]
    fn second_order_contact_fields() {
        let j = JetProduct::with_bases(&[2], &["z"]).unwrap();
        let c = contact_basis(&j);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].fields()[0].to_string(), "d_z + (z1)*d_z0 + (z2)*d_z1");
        assert_eq!(c[0].fields()[1].to_string(), "d_z2");
        assert_eq!(derived_type(&c[0]).unwrap(), DerivedType(vec![[2, 0], [3, 1], [4, 4]]));
    }

    #[test]
    fn scaling_prolongs_to_all_orders() {
        let j = JetProduct::new(&[2]).unwrap();
        let x = VectorField::from_pairs(j.chart(), &[("x0", parse("x0").unwrap())]).unwrap();
        let pr = prolong(&x, &j).unwrap();
        let expect = VectorField::from_pairs(
            j.chart(),
            &[
                ("x0", parse("x0").unwrap()),
                ("x1", parse("x1").unwrap()),
                ("x2", parse("x2").unwrap()),
            ],
        )
        .unwrap();
        assert_eq!(pr, expect);
        let t = VectorField::coordinate(j.chart(), "x0").unwrap();
        assert_eq!(prolong(&t, &j).unwrap(), t);
    }

    #[test]
    fn identity_pushforward() {
        let j = JetProduct::new(&[2, 2]).unwrap();
        let d = contact_distribution(&j);
        let phi = SymbolicMap::identity(j.chart());
        let pushed = pushforward(&phi, &d).unwrap();
        assert!(pushed.same_span(&d).unwrap());
    }

    #[test]
    fn bad_inverse_is_rejected() {
        let c = Chart::new(&["a", "b"]).unwrap();
        let phi = SymbolicMap::new(
            c.clone(),
            c.clone(),
            vec![parse("a+b").unwrap(), parse("b").unwrap()],
            Some(vec![parse("a+b").unwrap(), parse("b").unwrap()]),
        )
        .unwrap();
        assert!(matches!(phi.verify_inverse(), Err(JetError::InverseMismatch { .. })));
    }
}
