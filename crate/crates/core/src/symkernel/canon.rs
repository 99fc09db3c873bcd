use super::expr::{Expr, Func, Node};
use super::poly::Poly;
use super::ratfun::RatFun;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("division by zero")]
pub struct DivisionByZero;

const CACHE_LIMIT: usize = 20_000;

thread_local! {
    static CACHE: RefCell<HashMap<Expr, Expr>> = RefCell::new(HashMap::new());
}

/// Canonical form; panics if the expression divides by an identically zero
/// quantity.
pub fn canonicalize(e: &Expr) -> Expr {
    try_canonicalize(e).expect("division by zero in canonicalize")
}

pub fn try_canonicalize(e: &Expr) -> Result<Expr, DivisionByZero> {
    if matches!(e.node(), Node::Num(_) | Node::Sym(_)) {
        return Ok(e.clone());
    }
    if let Some(hit) = CACHE.with(|c| c.borrow().get(e).cloned()) {
        return Ok(hit);
    }
    let prepared = prepare(e)?;
    let table = AtomTable::from_exprs([&prepared]);
    let r = table.to_ratfun(&prepared)?;
    let out = table.to_expr(&r);
    CACHE.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() > CACHE_LIMIT {
            c.clear();
        }
        c.insert(e.clone(), out.clone());
        c.insert(out.clone(), out.clone());
    });
    Ok(out)
}

/// The rewrite pass: tan and tanh become quotients, and every function
/// argument is put into canonical form. Constructor-level rules handle
/// exp(a)exp(b), ln∘exp and sqrt(a)².
pub fn prepare(e: &Expr) -> Result<Expr, DivisionByZero> {
    let mut err = None;
    let out = prepare_inner(e, &mut err);
    match err {
        Some(x) => Err(x),
        None => Ok(out),
    }
}

fn prepare_inner(e: &Expr, err: &mut Option<DivisionByZero>) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Sym(_) => e.clone(),
        Node::Add(xs) => Expr::add_all(xs.iter().map(|x| prepare_inner(x, err))),
        Node::Mul(xs) => Expr::mul_all(xs.iter().map(|x| prepare_inner(x, err))),
        Node::Pow(b, k) => Expr::pow(&prepare_inner(b, err), *k),
        Node::Fn(f, a) => {
            let a = match try_canonicalize(a) {
                Ok(a) => a,
                Err(x) => {
                    *err = Some(x);
                    return e.clone();
                }
            };
            match f {
                Func::Tan => Expr::sin(a.clone()) / Expr::cos(a),
                Func::Tanh => Expr::sinh(a.clone()) / Expr::cosh(a),
                _ => Expr::func(f.clone(), a),
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Rule {
    /// atom² → 1 − other²
    Pythagoras(usize),
    /// atom² → 1 + other²
    Hyperbolic(usize),
    /// atom² → argument
    Root,
}

/// Ordered set of generators (variables and function applications) used to
/// convert expressions to polynomial form.
#[derive(Clone)]
pub struct AtomTable {
    atoms: Vec<Expr>,
    index: HashMap<Expr, usize>,
    rules: Vec<Option<Rule>>,
    root_args: Vec<Option<RatFun>>,
}

impl fmt::Debug for AtomTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.atoms.iter()).finish()
    }
}

fn atom_key(e: &Expr) -> (u8, String) {
    match e.node() {
        Node::Sym(s) => (0, s.to_string()),
        _ => (1, e.to_string()),
    }
}

fn collect_atoms(e: &Expr, out: &mut BTreeMap<(u8, String), Expr>) {
    match e.node() {
        Node::Num(_) => {}
        Node::Sym(_) => {
            out.entry(atom_key(e)).or_insert_with(|| e.clone());
        }
        Node::Add(xs) | Node::Mul(xs) => xs.iter().for_each(|x| collect_atoms(x, out)),
        Node::Pow(b, _) => collect_atoms(b, out),
        Node::Fn(f, a) => {
            out.entry(atom_key(e)).or_insert_with(|| e.clone());
            match f {
                Func::Sin => {
                    let c = Expr::cos(a.clone());
                    out.entry(atom_key(&c)).or_insert(c);
                }
                Func::Cosh => {
                    let s = Expr::sinh(a.clone());
                    out.entry(atom_key(&s)).or_insert(s);
                }
                Func::Sqrt => collect_atoms(a, out),
                _ => {}
            }
        }
    }
}

impl AtomTable {
    /// Table over the atoms of already prepared expressions.
    pub fn from_exprs<'a>(es: impl IntoIterator<Item = &'a Expr>) -> AtomTable {
        let mut found = BTreeMap::new();
        for e in es {
            collect_atoms(e, &mut found);
        }
        AtomTable::from_atoms(found.into_values().collect())
    }

    /// Table over the given variable names plus the atoms of `es`.
    pub fn with_vars<'a>(vars: &[&str], es: impl IntoIterator<Item = &'a Expr>) -> AtomTable {
        let mut found = BTreeMap::new();
        for v in vars {
            let s = Expr::sym(v);
            found.insert(atom_key(&s), s);
        }
        for e in es {
            collect_atoms(e, &mut found);
        }
        AtomTable::from_atoms(found.into_values().collect())
    }

    fn from_atoms(atoms: Vec<Expr>) -> AtomTable {
        let index: HashMap<Expr, usize> = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let mut rules = vec![None; atoms.len()];
        for (i, a) in atoms.iter().enumerate() {
            if let Node::Fn(f, arg) = a.node() {
                rules[i] = match f {
                    Func::Sin => index.get(&Expr::cos(arg.clone())).map(|&j| Rule::Pythagoras(j)),
                    Func::Cosh => index.get(&Expr::sinh(arg.clone())).map(|&j| Rule::Hyperbolic(j)),
                    Func::Sqrt => Some(Rule::Root),
                    _ => None,
                };
            }
        }
        let mut table = AtomTable {
            atoms,
            index,
            rules,
            root_args: Vec::new(),
        };
        let mut root_args = vec![None; table.atoms.len()];
        for i in 0..table.atoms.len() {
            if let Some(Rule::Root) = table.rules[i] {
                if let Node::Fn(_, arg) = table.atoms[i].node() {
                    root_args[i] = table.raw_ratfun(arg).ok();
                }
            }
        }
        table.root_args = root_args;
        table
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Expr] {
        &self.atoms
    }

    pub fn position(&self, atom: &Expr) -> Option<usize> {
        self.index.get(atom).copied()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.position(&Expr::sym(name))
    }

    fn atom_poly(&self, e: &Expr) -> Poly {
        let i = *self
            .index
            .get(e)
            .unwrap_or_else(|| panic!("atom {} missing from table", e));
        Poly::var(self.atoms.len(), i)
    }

    fn raw_ratfun(&self, e: &Expr) -> Result<RatFun, DivisionByZero> {
        let n = self.atoms.len();
        Ok(match e.node() {
            Node::Num(r) => RatFun::from_rational(n, r),
            Node::Sym(_) | Node::Fn(..) => RatFun::from_poly(self.atom_poly(e)),
            Node::Add(xs) => {
                let mut polys = Poly::zero(n);
                let mut acc = RatFun::zero(n);
                for x in xs {
                    let r = self.raw_ratfun(x)?;
                    if r.den.is_one() {
                        polys = polys.add(&r.num);
                    } else {
                        acc = acc.add(&r);
                    }
                }
                acc.add(&RatFun::from_poly(polys))
            }
            Node::Mul(xs) => {
                let mut acc = RatFun::one(n);
                for x in xs {
                    acc = acc.mul(&self.raw_ratfun(x)?);
                }
                acc
            }
            Node::Pow(b, k) => self.raw_ratfun(b)?.pow(*k).ok_or(DivisionByZero)?,
        })
    }

    /// Converts a prepared expression whose atoms are all in the table.
    pub fn to_ratfun(&self, e: &Expr) -> Result<RatFun, DivisionByZero> {
        let r = self.raw_ratfun(e)?;
        self.reduce(r)
    }

    /// Prepares and converts an arbitrary expression; atoms must be present.
    pub fn convert(&self, e: &Expr) -> Result<RatFun, DivisionByZero> {
        self.to_ratfun(&prepare(e)?)
    }

    fn reduce(&self, r: RatFun) -> Result<RatFun, DivisionByZero> {
        if self.rules.iter().all(|x| x.is_none()) {
            return Ok(r);
        }
        let mut num = RatFun::from_poly(r.num.clone());
        let mut den = RatFun::from_poly(r.den.clone());
        loop {
            let mut changed = false;
            for i in 0..self.atoms.len() {
                let Some(rule) = self.rules[i] else { continue };
                for part in [&mut num, &mut den] {
                    if part.num.degree(i) >= 2 || part.den.degree(i) >= 2 {
                        let repl = self.replacement(i, rule);
                        let Some(repl) = repl else { continue };
                        let a = self.reduce_poly(&part.num, i, &repl);
                        let b = self.reduce_poly(&part.den, i, &repl);
                        *part = a.div(&b).ok_or(DivisionByZero)?;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        num.div(&den).ok_or(DivisionByZero)
    }

    fn replacement(&self, i: usize, rule: Rule) -> Option<RatFun> {
        let n = self.atoms.len();
        match rule {
            Rule::Pythagoras(j) => {
                let c = Poly::var(n, j);
                Some(RatFun::from_poly(Poly::one(n).sub(&c.mul(&c))))
            }
            Rule::Hyperbolic(j) => {
                let s = Poly::var(n, j);
                Some(RatFun::from_poly(Poly::one(n).add(&s.mul(&s))))
            }
            Rule::Root => self.root_args.get(i).cloned().flatten(),
        }
    }

    fn reduce_poly(&self, p: &Poly, i: usize, repl: &RatFun) -> RatFun {
        let n = self.atoms.len();
        if p.degree(i) < 2 {
            return RatFun::from_poly(p.clone());
        }
        let atom = Poly::var(n, i);
        let mut acc = RatFun::zero(n);
        for (k, c) in p.coeffs_in(i).into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = RatFun::from_poly(if k % 2 == 1 { c.mul(&atom) } else { c });
            if k >= 2 {
                term = term.mul(&repl.pow((k / 2) as i64).unwrap());
            }
            acc = acc.add(&term);
        }
        acc
    }

    pub fn poly_to_expr(&self, p: &Poly) -> Expr {
        let mut terms = Vec::with_capacity(p.terms.len());
        for (m, c) in &p.terms {
            let mut fs = vec![Expr::num(BigRational::from_integer(c.clone()))];
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    fs.push(Expr::pow(&self.atoms[i], e as i64));
                }
            }
            terms.push(Expr::mul_all(fs));
        }
        Expr::add_all(terms)
    }

    pub fn to_expr(&self, r: &RatFun) -> Expr {
        let num = self.poly_to_expr(&r.num);
        if r.den.is_one() {
            return num;
        }
        if let Some(c) = r.den.constant_value() {
            return num * Expr::num(BigRational::new(BigInt::one(), c));
        }
        let den = self.poly_to_expr(&r.den);
        Expr::mul_all([num, Expr::pow(&den, -1)])
    }

    /// Rational values of all atoms at a point given by variable values;
    /// `None` when an atom is not a plain variable.
    pub fn point(&self, values: &BTreeMap<String, BigRational>) -> Option<Vec<BigRational>> {
        self.atoms
            .iter()
            .map(|a| a.as_sym().and_then(|s| values.get(s).cloned()))
            .collect()
    }

    pub fn zero_vec(&self) -> Vec<BigRational> {
        vec![BigRational::zero(); self.atoms.len()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::parse;

    fn c(s: &str) -> Expr {
        canonicalize(&parse(s).unwrap())
    }

    #[test]
    fn factor_cancellation() {
        assert_eq!(c("(x^2-y^2)/(x-y)"), c("x+y"));
    }

    #[test]
    fn pythagorean_rewrite() {
        assert_eq!(c("sin(x)^2+cos(x)^2-1"), Expr::zero());
        assert_eq!(c("cosh(x)^2-sinh(x)^2"), Expr::one());
        assert_eq!(c("tan(x)*cos(x)-sin(x)"), Expr::zero());
    }

    #[test]
    fn root_rewrite() {
        assert_eq!(c("(sqrt(x)+1)*(sqrt(x)-1)"), c("x-1"));
    }

    #[test]
    fn normal_form_is_unique() {
        assert_eq!(c("1/(1-x)"), c("-1/(x-1)"));
        assert_eq!(c("(2*x+2)/(4*y)"), c("(x+1)/(2*y)"));
    }

    #[test]
    fn zero_denominator_detected() {
        assert!(try_canonicalize(&parse("1/(x-x+0)").unwrap_or(Expr::one())).is_ok());
        let e = Expr::one() / (Expr::sym("x") - Expr::sym("x"));
        assert!(try_canonicalize(&e).is_err());
    }
}
