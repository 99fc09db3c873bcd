//! Linear and semilinear DMZ systems.
//!
//! A [`DmzSystem`] stores `u_ij − Γ^i_ij u_i − Γ^j_ij u_j + C_ij u = 0`; indices
//! are zero-based in code and one-based in labels and files.

use crate::geometry::{check_n_hyperbolic, lie_bracket, verify_invariants, Distribution, GeometryError, VectorField};
use crate::linalg::{solve, solve_rational};
use crate::residual::{dedup, triples, CheckReport, Residual};
use crate::symkernel::{
    canonicalize, formal_is_zero, gcd, is_zero, try_canonicalize, AtomTable, Expr, Mono, Node, Poly, RatFun, ZeroTest,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum DmzError {
    #[error("index {0} out of range")]
    Index(usize),
    #[error("a DMZ system needs distinct indices, got ({0},{1})")]
    Diagonal(usize, usize),
    #[error("coefficient {0} is not a rational function of the coordinates")]
    NonRationalIntegrand(String),
    #[error("potential reconstruction unsupported: {0}")]
    Unsupported(String),
    #[error("f{0}{1} is not affine in u and its first derivatives: {2}")]
    Nonlinear(usize, usize, String),
    #[error("{0}")]
    Construction(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("division by zero")]
    DivisionByZero,
}

fn ordered(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

/// `u_ij = Σ_k Γ^k_ij u_k − C_ij u` for `i < j`.
#[derive(Clone, Debug, PartialEq)]
pub struct DmzSystem {
    pub coords: Vec<String>,
    /// `(i, j, k) ↦ Γ^k_ij`, `i < j`.
    pub gamma: BTreeMap<(usize, usize, usize), Expr>,
    /// `(i, j) ↦ C_ij`, `i < j`.
    pub c: BTreeMap<(usize, usize), Expr>,
}

impl DmzSystem {
    pub fn new<S: AsRef<str>>(coords: &[S]) -> DmzSystem {
        DmzSystem {
            coords: coords.iter().map(|s| s.as_ref().to_string()).collect(),
            gamma: BTreeMap::new(),
            c: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    fn check(&self, idx: &[usize]) -> Result<(), DmzError> {
        match idx.iter().find(|&&i| i >= self.dim()) {
            Some(&i) => Err(DmzError::Index(i)),
            None => Ok(()),
        }
    }

    /// Sets `Γ^k_ij` (symmetric in `i, j`).
    pub fn set_gamma(&mut self, k: usize, i: usize, j: usize, e: Expr) -> Result<(), DmzError> {
        self.check(&[i, j, k])?;
        if i == j {
            return Err(DmzError::Diagonal(i + 1, j + 1));
        }
        let (a, b) = ordered(i, j);
        let e = canonicalize(&e);
        if e.is_zero_literal() {
            self.gamma.remove(&(a, b, k));
        } else {
            self.gamma.insert((a, b, k), e);
        }
        Ok(())
    }

    pub fn set_c(&mut self, i: usize, j: usize, e: Expr) -> Result<(), DmzError> {
        self.check(&[i, j])?;
        if i == j {
            return Err(DmzError::Diagonal(i + 1, j + 1));
        }
        let e = canonicalize(&e);
        if e.is_zero_literal() {
            self.c.remove(&ordered(i, j));
        } else {
            self.c.insert(ordered(i, j), e);
        }
        Ok(())
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> Expr {
        if i == j {
            return Expr::zero();
        }
        let (a, b) = ordered(i, j);
        self.gamma.get(&(a, b, k)).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn c(&self, i: usize, j: usize) -> Expr {
        if i == j {
            return Expr::zero();
        }
        self.c.get(&ordered(i, j)).cloned().unwrap_or_else(Expr::zero)
    }

    /// Stored `Γ^k_ij` with `k ∉ {i, j}`.
    pub fn off_index(&self) -> Vec<((usize, usize, usize), Expr)> {
        self.gamma
            .iter()
            .filter(|((i, j, k), _)| k != i && k != j)
            .map(|(key, e)| (*key, e.clone()))
            .collect()
    }

    pub fn has_zero_c(&self) -> bool {
        self.c.is_empty()
    }

    pub fn to_gdmz(&self) -> GdmzSystem {
        let mut g = GdmzSystem::new(&self.coords);
        let u = Expr::sym(U);
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                let mut terms: Vec<Expr> = (0..self.dim())
                    .map(|k| self.gamma(k, i, j) * g.first(k))
                    .collect();
                terms.push(-(self.c(i, j) * u.clone()));
                g.f.insert((i, j), canonicalize(&Expr::add_all(terms)));
            }
        }
        g
    }
}

impl fmt::Display for DmzSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "coords = [{}]", self.coords.join(", "))?;
        for ((i, j, k), e) in &self.gamma {
            writeln!(f, "Gamma[{}][{}][{}] = {}", i + 1, j + 1, k + 1, e)?;
        }
        for ((i, j), e) in &self.c {
            writeln!(f, "C[{}][{}] = {}", i + 1, j + 1, e)?;
        }
        Ok(())
    }
}

fn d(e: &Expr, var: &str) -> Expr {
    e.diff(var)
}

/// The three families of integrability conditions over every ordered triple,
/// deduplicated up to sign. Empty for `n < 3`.
pub fn integrability_residuals(s: &DmzSystem) -> Vec<Residual> {
    let x = &s.coords;
    let g = |k, i, j| s.gamma(k, i, j);
    let mut out = Vec::new();
    for (i, j, k) in triples(s.dim()) {
        let tag = format!("({},{},{})", i + 1, j + 1, k + 1);
        let quad = d(&g(j, i, j), &x[k]) - g(k, i, k) * g(j, k, j) - g(i, k, i) * g(j, i, j)
            + g(j, i, j) * g(j, k, j)
            + s.c(i, k);
        out.push(Residual::new(format!("gamma{}", tag), quad));
        let curl = d(&g(j, i, j), &x[k]) - d(&g(j, k, j), &x[i]);
        out.push(Residual::new(format!("curl{}", tag), curl));
        let cc = d(&s.c(i, j), &x[k]) - d(&s.c(i, k), &x[j]) - s.c(k, j) * (g(k, i, k) - g(j, i, j))
            - s.c(i, j) * g(i, i, k)
            + s.c(i, k) * g(i, i, j);
        out.push(Residual::new(format!("c{}", tag), cc));
    }
    dedup(out)
}

#[derive(Clone, Debug)]
pub struct InvolutivityReport {
    pub residuals: CheckReport,
    /// Nonzero `Γ^k_ij` with `k ∉ {i, j}`, one-based.
    pub off_index: Vec<(usize, usize, usize)>,
    /// Number of arbitrary functions of one variable in the general solution.
    pub functions: usize,
}

impl InvolutivityReport {
    pub fn passed(&self) -> bool {
        self.off_index.is_empty() && self.residuals.passed()
    }
}

impl fmt::Display for InvolutivityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, j, k) in &self.off_index {
            writeln!(f, "  off-index coefficient Gamma[{}][{}][{}] is nonzero", i, j, k)?;
        }
        writeln!(f, "{}", self.residuals)?;
        if self.passed() {
            write!(f, "involutive: solutions depend on {} functions of one variable", self.functions)
        } else {
            write!(f, "not involutive")
        }
    }
}

pub fn is_involutive(s: &DmzSystem, cfg: &ZeroTest) -> InvolutivityReport {
    let off_index = s
        .off_index()
        .into_iter()
        .filter(|(_, e)| !is_zero(e).is_zero())
        .map(|((i, j, k), _)| (i + 1, j + 1, k + 1))
        .collect();
    InvolutivityReport {
        residuals: CheckReport::run(integrability_residuals(s), cfg),
        off_index,
        functions: s.dim(),
    }
}

pub(crate) const U: &str = "u";

/// `u_ij = f_ij(x, u, u_x)` for `i < j`, written in the symbols `u` and `u_<x>`.
#[derive(Clone, Debug, PartialEq)]
pub struct GdmzSystem {
    pub coords: Vec<String>,
    pub f: BTreeMap<(usize, usize), Expr>,
}

impl GdmzSystem {
    pub fn new<S: AsRef<str>>(coords: &[S]) -> GdmzSystem {
        GdmzSystem {
            coords: coords.iter().map(|s| s.as_ref().to_string()).collect(),
            f: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn first_name(&self, k: usize) -> String {
        format!("u_{}", self.coords[k])
    }

    pub fn second_name(&self, k: usize, l: usize) -> String {
        format!("u_{}{}", self.coords[k], self.coords[l])
    }

    pub fn first(&self, k: usize) -> Expr {
        Expr::sym(&self.first_name(k))
    }

    pub fn rhs(&self, i: usize, j: usize) -> Expr {
        self.f.get(&ordered(i, j)).cloned().unwrap_or_else(Expr::zero)
    }

    /// Jet symbols: `u` and the first derivatives.
    pub fn jet_names(&self) -> Vec<String> {
        std::iter::once(U.to_string())
            .chain((0..self.dim()).map(|k| self.first_name(k)))
            .collect()
    }

    /// Total derivative in `x_k` on the system, `u_kk` kept as a symbol.
    pub fn total_derivative(&self, k: usize, e: &Expr) -> Expr {
        let mut terms = vec![e.diff(&self.coords[k]), self.first(k) * e.diff(U)];
        for l in 0..self.dim() {
            let second = if l == k {
                Expr::sym(&self.second_name(k, k))
            } else {
                self.rhs(l, k)
            };
            terms.push(second * e.diff(&self.first_name(l)));
        }
        Expr::add_all(terms)
    }
}

impl fmt::Display for GdmzSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((i, j), e) in &self.f {
            if !first {
                writeln!(f)?;
            }
            first = false;
            write!(f, "{} = {}", self.second_name(*i, *j), e)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct CompatibilityReport {
    pub residuals: CheckReport,
    /// Residuals in which a pure second derivative `u_ll` survives.
    pub obstructions: Vec<String>,
}

impl CompatibilityReport {
    pub fn passed(&self) -> bool {
        self.obstructions.is_empty() && self.residuals.passed()
    }
}

impl fmt::Display for CompatibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.obstructions {
            writeln!(f, "  obstruction: {}", o)?;
        }
        write!(f, "{}", self.residuals)
    }
}

/// `D_k f_ij − D_j f_ik` over every ordered triple, deduplicated up to sign.
pub fn gdmz_compatibility_residuals(s: &GdmzSystem) -> Vec<Residual> {
    let rs: Vec<Residual> = triples(s.dim())
        .into_iter()
        .filter(|(_, j, k)| j < k)
        .map(|(i, j, k)| {
            let e = s.total_derivative(k, &s.rhs(i, j)) - s.total_derivative(j, &s.rhs(i, k));
            Residual::new(format!("compat({},{},{})", i + 1, j + 1, k + 1), e)
        })
        .collect();
    dedup(rs)
}

pub fn check_compatibility(s: &GdmzSystem, cfg: &ZeroTest) -> CompatibilityReport {
    let rs = gdmz_compatibility_residuals(s);
    let seconds: Vec<String> = (0..s.dim()).map(|l| s.second_name(l, l)).collect();
    let mut obstructions = Vec::new();
    for r in &rs {
        for name in &seconds {
            if r.expr.depends_on(name) {
                obstructions.push(format!("{} depends on {}", r.label, name));
            }
        }
    }
    CompatibilityReport {
        residuals: CheckReport::run(rs, cfg),
        obstructions,
    }
}

/// Reads off `Γ^k_ij = ∂f_ij/∂u_k` and `C_ij = −∂f_ij/∂u`.
pub fn gdmz_to_dmz(s: &GdmzSystem) -> Result<DmzSystem, DmzError> {
    let jets = s.jet_names();
    let mut out = DmzSystem::new(&s.coords);
    for (&(i, j), f) in &s.f {
        let coeffs: Vec<Expr> = jets.iter().map(|v| canonicalize(&f.diff(v))).collect();
        for c in &coeffs {
            if let Some(v) = jets.iter().find(|v| c.depends_on(v)) {
                return Err(DmzError::Nonlinear(i + 1, j + 1, format!("coefficient {} depends on {}", c, v)));
            }
        }
        let linear = Expr::add_all(jets.iter().zip(&coeffs).map(|(v, c)| c.clone() * Expr::sym(v)));
        let rest = canonicalize(&(f.clone() - linear));
        if !rest.is_zero_literal() {
            return Err(DmzError::Nonlinear(i + 1, j + 1, format!("inhomogeneous term {}", rest)));
        }
        out.set_c(i, j, -coeffs[0].clone())?;
        for (k, c) in coeffs[1..].iter().enumerate() {
            out.set_gamma(k, i, j, c.clone())?;
        }
    }
    Ok(out)
}

/// Functions `h_i` with `Γ^j_ij = ∂_i h_j / h_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LamePotentials(pub Vec<Expr>);

pub fn lame_residuals(s: &DmzSystem, h: &LamePotentials) -> Vec<Residual> {
    let mut out = Vec::new();
    for j in 0..s.dim() {
        for i in 0..s.dim() {
            if i != j {
                let e = h.0[j].clone() * s.gamma(j, i, j) - h.0[j].diff(&s.coords[i]);
                out.push(Residual::new(format!("lame({},{})", i + 1, j + 1), e));
            }
        }
    }
    out
}

pub fn verify_lame(s: &DmzSystem, h: &LamePotentials) -> bool {
    h.0.len() == s.dim() && lame_residuals(s, h).iter().all(|r| is_zero(&r.expr).is_zero())
}

fn positive(p: Poly) -> Poly {
    let p = p.primitive();
    if p.lc().is_negative() {
        p.neg()
    } else {
        p
    }
}

fn squarefree_parts(p: &Poly, out: &mut Vec<Poly>) {
    if p.is_constant() {
        return;
    }
    let n = p.nvars;
    let mut low: Mono = vec![0; n];
    for v in 0..n {
        low[v] = p.terms.iter().map(|(m, _)| m[v]).min().unwrap_or(0);
    }
    if low.iter().any(|&e| e > 0) {
        for (v, &e) in low.iter().enumerate() {
            if e > 0 {
                out.push(Poly::var(n, v));
            }
        }
        let mono = Poly::monomial(n, low, BigInt::one());
        squarefree_parts(&p.div_exact(&mono).expect("monomial divides"), out);
        return;
    }
    let used = p.used_vars();
    for v in (0..n).filter(|&v| used[v]) {
        let c = p.coeffs_in(v).iter().fold(Poly::zero(n), |acc, q| gcd(&acc, q));
        if !c.is_constant() {
            squarefree_parts(&c, out);
            squarefree_parts(&p.div_exact(&c).expect("content divides"), out);
            return;
        }
    }
    if let Some(v) = (0..n).find(|&v| used[v]) {
        let g = gcd(p, &p.derivative(v));
        if !g.is_constant() {
            squarefree_parts(&g, out);
            squarefree_parts(&p.div_exact(&g).expect("gcd divides"), out);
            return;
        }
    }
    out.push(positive(p.clone()));
}

/// Pairwise coprime, square-free polynomials generating the same factors.
fn coprime_base(polys: &[Poly]) -> Vec<Poly> {
    let mut base = Vec::new();
    for p in polys {
        squarefree_parts(p, &mut base);
    }
    loop {
        base.sort_by_key(|p| format!("{:?}", p.terms));
        base.dedup();
        let mut split = None;
        'search: for a in 0..base.len() {
            for b in a + 1..base.len() {
                let g = gcd(&base[a], &base[b]);
                if !g.is_constant() {
                    split = Some((a, b, g));
                    break 'search;
                }
            }
        }
        let Some((a, b, g)) = split else { return base };
        let pa = base[a].div_exact(&g).expect("gcd divides");
        let pb = base[b].div_exact(&g).expect("gcd divides");
        base.remove(b);
        base.remove(a);
        for q in [g, pa, pb] {
            if !q.is_constant() {
                base.push(positive(q));
            }
        }
    }
}

/// Reconstructs Lamé potentials as products of powers of the factors of the
/// denominators of Γ, fixing the exponents from random evaluations and
/// verifying the result exactly.
pub fn lame_potentials(s: &DmzSystem, cfg: &ZeroTest) -> Result<LamePotentials, DmzError> {
    let n = s.dim();
    let mut gam: BTreeMap<(usize, usize), Expr> = BTreeMap::new();
    for j in 0..n {
        for i in 0..n {
            if i != j {
                let g = s.gamma(j, i, j);
                if g.has_transcendental() || g.has_opaque() {
                    return Err(DmzError::NonRationalIntegrand(format!("Gamma[{}][{}][{}] = {}", i + 1, j + 1, j + 1, g)));
                }
                gam.insert((i, j), g);
            }
        }
    }
    let names: Vec<&str> = s.coords.iter().map(String::as_str).collect();
    let table = AtomTable::with_vars(&names, gam.values());
    if table.atoms().iter().any(|a| !matches!(a.node(), Node::Sym(_))) {
        return Err(DmzError::NonRationalIntegrand("non-polynomial atom".into()));
    }
    let rat: BTreeMap<(usize, usize), RatFun> = gam
        .iter()
        .map(|(k, e)| table.to_ratfun(e).map(|r| (*k, r)))
        .collect::<Result<_, _>>()
        .map_err(|_| DmzError::DivisionByZero)?;
    let dens: Vec<Poly> = rat.values().map(|r| r.den.clone()).collect();
    let base = coprime_base(&dens);
    let idx: Vec<usize> = names.iter().map(|v| table.var_index(v).expect("coordinate in table")).collect();
    let all_vars: Vec<String> = table.atoms().iter().map(|a| a.to_string()).collect();
    let mut rng = cfg.rng_for(&Expr::add_all(gam.values().cloned()));
    let mut h = Vec::with_capacity(n);
    for j in 0..n {
        let factors: Vec<&Poly> = base
            .iter()
            .filter(|p| (0..n).any(|i| i != j && p.uses_var(idx[i])))
            .collect();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut attempts = 0;
        while rows.len() < 4 * (n - 1) * (factors.len() + 1) && attempts < 1000 {
            attempts += 1;
            let pt: Vec<BigRational> = all_vars.iter().map(|_| cfg.random_rational(&mut rng)).collect();
            let vals: Vec<BigRational> = factors.iter().map(|f| f.eval_rational(&pt)).collect();
            if vals.iter().any(Zero::is_zero) {
                continue;
            }
            let mut new_rows = Vec::new();
            for i in (0..n).filter(|&i| i != j) {
                let Some(g) = rat[&(i, j)].eval_rational(&pt) else {
                    new_rows.clear();
                    break;
                };
                let row: Vec<BigRational> = factors
                    .iter()
                    .zip(&vals)
                    .map(|(f, v)| f.derivative(idx[i]).eval_rational(&pt) / v)
                    .collect();
                new_rows.push((row, g));
            }
            for (r, g) in new_rows {
                rows.push(r);
                rhs.push(g);
            }
        }
        let exps = if factors.is_empty() {
            if rhs.iter().all(Zero::is_zero) {
                Vec::new()
            } else {
                return Err(DmzError::Unsupported(format!("no factor base for h{}", j + 1)));
            }
        } else {
            solve_rational(&rows, &rhs)
                .ok_or_else(|| DmzError::Unsupported(format!("log-derivative ansatz has no solution for h{}", j + 1)))?
        };
        let mut prod = Vec::new();
        for (f, e) in factors.iter().zip(&exps) {
            if !e.is_integer() {
                return Err(DmzError::Unsupported(format!("non-integer exponent {} in h{}", e, j + 1)));
            }
            let k: i64 = e.to_integer().try_into().map_err(|_| DmzError::Unsupported("exponent too large".into()))?;
            if k != 0 {
                prod.push(Expr::pow(&table.poly_to_expr(f), k));
            }
        }
        h.push(canonicalize(&Expr::mul_all(prod)));
    }
    let h = LamePotentials(h);
    if verify_lame(s, &h) {
        Ok(h)
    } else {
        Err(DmzError::Unsupported("reconstructed potentials fail verification".into()))
    }
}

/// True when `a / b` is a nonzero constant.
pub fn proportional(a: &Expr, b: &Expr) -> bool {
    let Ok(r) = try_canonicalize(&(a.clone() / b.clone())) else {
        return false;
    };
    !r.is_zero_literal() && r.free_symbols().iter().all(|v| is_zero(&r.diff(v)).is_zero())
}

/// Adapted data of a Darboux integrable n-hyperbolic manifold.
#[derive(Clone, Debug)]
pub struct AdaptedData {
    /// `H_i = {X_i, ∂_{v_i}}` in that order.
    pub parts: Vec<Distribution>,
    /// Base coordinates `x_i`, with `X_i(x_j) = δ_ij`.
    pub coords: Vec<String>,
    /// Invariant of the dependent variable.
    pub p: Expr,
    /// Internal coordinates in terms of `x`, `u`, `u_<x>`.
    pub inverse: Option<BTreeMap<String, Expr>>,
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub system: GdmzSystem,
    /// `p_i = X_i p` before substitution.
    pub first_derivatives: Vec<Expr>,
    pub inverse: BTreeMap<String, Expr>,
    pub inverse_solved: bool,
    pub compatibility: CompatibilityReport,
    pub warnings: Vec<String>,
}

fn vertical_name(v: &VectorField) -> Option<String> {
    let mut found = None;
    for (name, c) in v.chart().names().iter().zip(v.coeffs()) {
        if c.is_zero_literal() {
            continue;
        }
        if !c.is_one_literal() || found.is_some() {
            return None;
        }
        found = Some(name.clone());
    }
    found
}

fn vanishes(e: &Expr) -> bool {
    if e.has_opaque() {
        formal_is_zero(e)
    } else {
        is_zero(e).is_zero()
    }
}

/// Builds `u_ij = f_ij` from `p_i = X_i p`, `f_ij = X_j p_i` and the inverse of
/// `(x, p, p_1, …, p_n)` on the internal coordinates.
pub fn construct_gdmz(data: &AdaptedData, cfg: &ZeroTest) -> Result<Construction, DmzError> {
    let n = data.parts.len();
    let fail = |m: String| Err(DmzError::Construction(m));
    if data.coords.len() != n {
        return fail(format!("{} base coordinates for {} parts", data.coords.len(), n));
    }
    let report = check_n_hyperbolic(&data.parts)?;
    if !report.passed() {
        return fail(format!("not {}-hyperbolic: {}", n, report.failures.join("; ")));
    }
    let mut warnings = report.warnings.clone();
    let chart = data.parts[0].chart().clone();
    let mut xs = Vec::new();
    let mut verticals = Vec::new();
    for (i, part) in data.parts.iter().enumerate() {
        let fields = part.fields();
        if fields.len() != 2 {
            return fail(format!("part {} must list X and a vertical field", i + 1));
        }
        let Some(v) = vertical_name(&fields[1]) else {
            return fail(format!("second field of part {} is not a coordinate field", i + 1));
        };
        xs.push(fields[0].clone());
        verticals.push(v);
    }
    for (i, x) in xs.iter().enumerate() {
        for (j, name) in data.coords.iter().enumerate() {
            let c = x.coeff(name).ok_or_else(|| GeometryError::UnknownCoordinate(name.clone()))?;
            let ok = if i == j { c.is_one_literal() } else { c.is_zero_literal() };
            if !ok {
                return fail(format!("X{}({}) should be {}", i + 1, name, u8::from(i == j)));
            }
        }
        for v in &verticals {
            if !x.coeff(v).map(Expr::is_zero_literal).unwrap_or(false) {
                return fail(format!("X{} has a component along {}", i + 1, v));
            }
        }
    }
    let mut a_fields = Vec::new();
    for (x, v) in xs.iter().zip(&verticals) {
        let dv = VectorField::coordinate(&chart, v)?;
        a_fields.push(dv.clone());
        a_fields.push(lie_bracket(&dv, x)?);
    }
    let a = Distribution::new(&chart, a_fields)?;
    let mut invariants: Vec<Expr> = data.coords.iter().map(|c| Expr::sym(c)).collect();
    invariants.push(data.p.clone());
    let inv = verify_invariants(&a, &invariants)?;
    if a.rank() != 2 * n || !a.is_integrable()? {
        return fail(format!("the fibre distribution has rank {} or is not integrable", a.rank()));
    }
    if !inv.passed() {
        return fail(format!("p is not a complete invariant: {}", inv.failures.join("; ")));
    }
    let ps: Vec<Expr> = xs.iter().map(|x| x.apply(&data.p)).collect();
    for (i, pi) in ps.iter().enumerate() {
        for v in &verticals {
            if !vanishes(&pi.diff(v)) {
                return fail(format!("p{} depends on the vertical coordinate {}", i + 1, v));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let sym = xs[j].apply(&ps[i]) - xs[i].apply(&ps[j]);
            if !vanishes(&sym) {
                return fail(format!("X{} p{} differs from X{} p{}", j + 1, i + 1, i + 1, j + 1));
            }
        }
    }
    let mut system = GdmzSystem::new(&data.coords);
    let internal: Vec<String> = chart
        .names()
        .iter()
        .filter(|c| !data.coords.contains(c) && !verticals.contains(c))
        .cloned()
        .collect();
    if internal.len() != n + 1 {
        return fail(format!("{} internal coordinates, expected {}", internal.len(), n + 1));
    }
    let mut targets = vec![Expr::sym(U)];
    targets.extend((0..n).map(|k| system.first(k)));
    let mut defining = vec![data.p.clone()];
    defining.extend(ps.iter().cloned());
    let (inverse, inverse_solved) = match &data.inverse {
        Some(m) => (m.clone(), false),
        None => (solve_inverse(&chart.names().to_vec(), &internal, &defining, &targets, &system)?, true),
    };
    for name in &internal {
        if !inverse.contains_key(name) {
            return fail(format!("inverse substitution lacks {}", name));
        }
    }
    for (e, t) in defining.iter().zip(&targets) {
        let back = e.subs(&inverse) - t.clone();
        if !vanishes(&back) {
            return fail(format!("inverse substitution does not invert {} = {}", t, e));
        }
    }
    let allowed: BTreeSet<String> = data.coords.iter().cloned().chain(system.jet_names()).collect();
    for i in 0..n {
        for j in i + 1..n {
            let f = canonicalize(&xs[j].apply(&ps[i]).subs(&inverse));
            if let Some(v) = f.free_symbols().into_iter().find(|v| !allowed.contains(v)) {
                return fail(format!("f{}{} still depends on {}", i + 1, j + 1, v));
            }
            system.f.insert((i, j), f);
        }
    }
    let compatibility = check_compatibility(&system, cfg);
    if !compatibility.passed() {
        warnings.push("constructed system fails the compatibility check".into());
    }
    Ok(Construction {
        system,
        first_derivatives: ps,
        inverse,
        inverse_solved,
        compatibility,
        warnings,
    })
}

fn solve_inverse(
    chart: &[String],
    internal: &[String],
    defining: &[Expr],
    targets: &[Expr],
    system: &GdmzSystem,
) -> Result<BTreeMap<String, Expr>, DmzError> {
    let zero: BTreeMap<String, Expr> = internal.iter().map(|w| (w.clone(), Expr::zero())).collect();
    let mut m = Vec::new();
    let mut b = Vec::new();
    for (e, t) in defining.iter().zip(targets) {
        let row: Vec<Expr> = internal.iter().map(|w| canonicalize(&e.diff(w))).collect();
        for c in &row {
            if internal.iter().any(|w| c.depends_on(w)) {
                return Err(DmzError::Construction(format!(
                    "{} is not linear in the internal coordinates; supply the inverse substitution",
                    e
                )));
            }
        }
        m.push(row);
        b.push(t.clone() - e.subs(&zero));
    }
    let mut vars: Vec<String> = chart.to_vec();
    vars.extend(system.jet_names());
    let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
    let sol = solve(&refs, &m, &b)
        .map_err(|_| DmzError::DivisionByZero)?
        .ok_or_else(|| DmzError::Construction("defining relations are singular in the internal coordinates".into()))?;
    Ok(internal.iter().cloned().zip(sol).collect())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::symkernel::parse;

    pub(crate) fn m3wri_example() -> DmzSystem {
        let d1 = "(2*x*y*z^3+x-2*z-y*z^4)";
        let mut s = DmzSystem::new(&["x", "y", "z"]);
        let set = |s: &mut DmzSystem, k, i, j, e: &str| s.set_gamma(k, i, j, parse(e).unwrap()).unwrap();
        set(&mut s, 0, 0, 1, "-z^3/(1-z^3*y)");
        set(&mut s, 1, 0, 1, "1/(x-z)");
        set(&mut s, 0, 0, 2, "-3*y*z^2/(1-z^3*y)");
        set(&mut s, 2, 0, 2, &format!("(1+2*y*z^3)/{}", d1));
        set(&mut s, 1, 1, 2, "(x-2*z)/(z*(x-z))");
        set(&mut s, 2, 1, 2, &format!("z^3*(2*x-z)/{}", d1));
        s.set_c(0, 1, parse("-z^3/((x-z)*(1-z^3*y))").unwrap()).unwrap();
        s.set_c(0, 2, parse(&format!("-3*y*z^2*(1+2*y*z^3)/((1-z^3*y)*{})", d1)).unwrap())
            .unwrap();
        s.set_c(1, 2, parse(&format!("(x-2*z)*(2*x-z)*z^2/((x-z)*{})", d1)).unwrap())
            .unwrap();
        s
    }

    fn abelian_example() -> DmzSystem {
        let mut s = DmzSystem::new(&["x", "y", "z"]);
        s.set_gamma(0, 0, 1, parse("(x-z)/((x-y)*(y-z))").unwrap()).unwrap();
        s.set_gamma(1, 0, 1, parse("-(y-z)/((x-y)*(x-z))").unwrap()).unwrap();
        s.set_gamma(0, 0, 2, parse("-1/(y-z)").unwrap()).unwrap();
        s.set_gamma(1, 1, 2, parse("-1/(x-z)").unwrap()).unwrap();
        s
    }

    #[test]
    fn involutive_examples() {
        let cfg = ZeroTest::default();
        let r = is_involutive(&m3wri_example(), &cfg);
        assert!(r.passed(), "{}", r);
        assert!(r.residuals.all_provable());
        assert!(is_involutive(&abelian_example(), &cfg).passed());
        assert!(integrability_residuals(&DmzSystem::new(&["x", "y"])).is_empty());
    }

    #[test]
    fn perturbed_system_fails() {
        let mut s = abelian_example();
        let g = s.gamma(1, 1, 2) + Expr::one();
        s.set_gamma(1, 1, 2, g).unwrap();
        let r = is_involutive(&s, &ZeroTest::default());
        assert!(!r.passed());
        assert!(r.residuals.first_failure().unwrap().1.witness().is_some());
    }

    #[test]
    fn sign_flipped_c_condition_fails_on_m3wri() {
        let s = m3wri_example();
        let x = &s.coords;
        let g = |k, i, j| s.gamma(k, i, j);
        let flipped = triples(3).into_iter().any(|(i, j, k)| {
            let e = d(&s.c(i, j), &x[k]) - d(&s.c(i, k), &x[j]) + s.c(k, j) * (g(k, i, k) - g(j, i, j))
                + s.c(i, j) * g(i, i, k)
                - s.c(i, k) * g(i, i, j);
            !is_zero(&e).is_zero()
        });
        assert!(flipped);
    }

    #[test]
    fn gdmz_round_trip() {
        let s = m3wri_example();
        let g = s.to_gdmz();
        assert_eq!(gdmz_to_dmz(&g).unwrap(), s);
        assert!(check_compatibility(&g, &ZeroTest::default()).passed());
        let mut bad = g.clone();
        bad.f.insert((0, 1), parse("u_x*u_y").unwrap());
        assert!(matches!(gdmz_to_dmz(&bad), Err(DmzError::Nonlinear(1, 2, _))));
    }

    #[test]
    fn lame_reconstruction() {
        let d1 = "(x+2*x*y*z^3-y*z^4-2*z)";
        let mut s = DmzSystem::new(&["x", "y", "z"]);
        s.set_gamma(0, 0, 1, parse("z^3/(y*z^3-1)").unwrap()).unwrap();
        s.set_gamma(0, 0, 2, parse(&format!("{}/(z*(x-z)*(y*z^3-1))", d1)).unwrap()).unwrap();
        s.set_gamma(2, 0, 2, parse(&format!("z*(1-y*z^3)/({}*(x-z))", d1)).unwrap()).unwrap();
        s.set_gamma(2, 1, 2, parse(&format!("z^3*(2*x-z)/{}", d1)).unwrap()).unwrap();
        let h = lame_potentials(&s, &ZeroTest::default()).unwrap();
        let printed = ["(y*z^3-1)/(z*(z-x))", "1", "(-z^4*y-2*z+x+2*x*z^3*y)/(x-z)"];
        for (a, b) in h.0.iter().zip(printed) {
            assert!(proportional(a, &parse(b).unwrap()), "{} vs {}", a, b);
        }
        let flat = DmzSystem::new(&["x", "y", "z"]);
        assert_eq!(lame_potentials(&flat, &ZeroTest::default()).unwrap().0, vec![Expr::one(); 3]);
    }
}
