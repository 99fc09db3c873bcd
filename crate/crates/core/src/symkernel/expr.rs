use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;
use std::sync::Arc;

/// Elementary functions known to the kernel, plus opaque unary functions
/// `f`, `f'`, `f''`, ... used for arbitrary-function families.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Sqrt,
    Opaque { name: Arc<str>, order: u32 },
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(&self) -> String {
        match self {
            Func::Sin => "sin".into(),
            Func::Cos => "cos".into(),
            Func::Tan => "tan".into(),
            Func::Sinh => "sinh".into(),
            Func::Cosh => "cosh".into(),
            Func::Tanh => "tanh".into(),
            Func::Exp => "exp".into(),
            Func::Ln => "ln".into(),
            Func::Sqrt => "sqrt".into(),
            Func::Opaque { name, order } => format!("{}{}", name, "'".repeat(*order as usize)),
        }
    }

    pub fn is_opaque(&self) -> bool {
        matches!(self, Func::Opaque { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Num(BigRational),
    Sym(Arc<str>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, i64),
    Fn(Func, Expr),
}

/// Immutable symbolic expression.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr(Arc<Node>);

impl Node {
    fn rank(&self) -> u8 {
        match self {
            Node::Num(_) => 0,
            Node::Sym(_) => 1,
            Node::Fn(..) => 2,
            Node::Pow(..) => 3,
            Node::Mul(_) => 4,
            Node::Add(_) => 5,
        }
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        let (a, b) = (self.node(), other.node());
        match a.rank().cmp(&b.rank()) {
            Ordering::Equal => {}
            o => return o,
        }
        match (a, b) {
            (Node::Num(x), Node::Num(y)) => x.cmp(y),
            (Node::Sym(x), Node::Sym(y)) => x.cmp(y),
            (Node::Fn(f, x), Node::Fn(g, y)) => f.cmp(g).then_with(|| x.cmp(y)),
            (Node::Pow(x, i), Node::Pow(y, j)) => x.cmp(y).then_with(|| i.cmp(j)),
            (Node::Mul(xs), Node::Mul(ys)) | (Node::Add(xs), Node::Add(ys)) => xs.cmp(ys),
            _ => unreachable!(),
        }
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Expr {
    fn wrap(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(r: BigRational) -> Expr {
        Expr::wrap(Node::Num(r))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(rat(n))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::num(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::wrap(Node::Sym(Arc::from(name)))
    }

    pub fn as_num(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self.node() {
            Node::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        self.as_num().is_some_and(|r| r.is_zero())
    }

    pub fn is_one_literal(&self) -> bool {
        self.as_num().is_some_and(|r| r.is_one())
    }

    /// Sum with flattening, constant folding and collection of like terms.
    pub fn add_all(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = rat(0);
        let mut collected: BTreeMap<Expr, BigRational> = BTreeMap::new();
        let mut stack: Vec<Expr> = terms.into_iter().collect();
        stack.reverse();
        while let Some(t) = stack.pop() {
            match t.node() {
                Node::Num(r) => constant += r,
                Node::Add(ts) => stack.extend(ts.iter().rev().cloned()),
                _ => {
                    let (c, rest) = t.split_coeff();
                    let entry = collected.entry(rest).or_insert_with(|| rat(0));
                    *entry += c;
                }
            }
        }
        let mut out: Vec<Expr> = Vec::new();
        for (rest, c) in collected {
            if c.is_zero() {
                continue;
            }
            out.push(Expr::scaled(c, rest));
        }
        if !constant.is_zero() {
            out.push(Expr::num(constant));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => {
                out.sort();
                Expr::wrap(Node::Add(out))
            }
        }
    }

    /// Splits `c * rest` with `c` rational.
    pub fn split_coeff(&self) -> (BigRational, Expr) {
        match self.node() {
            Node::Num(r) => (r.clone(), Expr::one()),
            Node::Mul(fs) => {
                if let Some(c) = fs[0].as_num() {
                    let rest: Vec<Expr> = fs[1..].to_vec();
                    let rest = if rest.len() == 1 {
                        rest.into_iter().next().unwrap()
                    } else {
                        Expr::wrap(Node::Mul(rest))
                    };
                    (c.clone(), rest)
                } else {
                    (rat(1), self.clone())
                }
            }
            _ => (rat(1), self.clone()),
        }
    }

    fn scaled(c: BigRational, rest: Expr) -> Expr {
        if c.is_one() {
            return rest;
        }
        if rest.is_one_literal() {
            return Expr::num(c);
        }
        let mut fs = vec![Expr::num(c)];
        match rest.node() {
            Node::Mul(rs) => fs.extend(rs.iter().cloned()),
            _ => fs.push(rest),
        }
        Expr::wrap(Node::Mul(fs))
    }

    /// Product with flattening, constant folding and collection of powers.
    pub fn mul_all(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = rat(1);
        let mut powers: BTreeMap<Expr, i64> = BTreeMap::new();
        let mut exp_args: Vec<Expr> = Vec::new();
        let mut stack: Vec<Expr> = factors.into_iter().collect();
        while let Some(f) = stack.pop() {
            match f.node() {
                Node::Num(r) => {
                    if r.is_zero() {
                        return Expr::zero();
                    }
                    constant *= r;
                }
                Node::Mul(fs) => stack.extend(fs.iter().cloned()),
                Node::Pow(b, k) => {
                    if let Node::Fn(Func::Exp, a) = b.node() {
                        exp_args.push(Expr::int(*k) * a.clone());
                    } else {
                        *powers.entry(b.clone()).or_insert(0) += *k;
                    }
                }
                Node::Fn(Func::Exp, a) => exp_args.push(a.clone()),
                _ => *powers.entry(f.clone()).or_insert(0) += 1,
            }
        }
        let mut out: Vec<Expr> = Vec::new();
        let mut redo = false;
        for (b, k) in powers {
            if k == 0 {
                continue;
            }
            let p = Expr::pow(&b, k);
            match p.node() {
                Node::Num(_) | Node::Mul(_) => redo = true,
                Node::Pow(pb, _) if pb != &b => redo = true,
                Node::Fn(Func::Exp, _) => redo = true,
                _ => {}
            }
            out.push(p);
        }
        if !exp_args.is_empty() {
            let arg = Expr::add_all(exp_args);
            let e = Expr::func(Func::Exp, arg);
            if !matches!(e.node(), Node::Fn(Func::Exp, _)) {
                redo = true;
            }
            out.push(e);
        }
        if redo {
            out.push(Expr::num(constant));
            return Expr::mul_all(out);
        }
        if constant.is_zero() {
            return Expr::zero();
        }
        out.sort();
        if out.is_empty() {
            return Expr::num(constant);
        }
        if !constant.is_one() {
            out.insert(0, Expr::num(constant));
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Expr::wrap(Node::Mul(out))
        }
    }

    /// Integer power.
    pub fn pow(b: &Expr, k: i64) -> Expr {
        if k == 0 {
            return Expr::one();
        }
        if k == 1 {
            return b.clone();
        }
        match b.node() {
            Node::Num(r) => {
                if r.is_zero() {
                    if k < 0 {
                        return Expr::wrap(Node::Pow(b.clone(), k));
                    }
                    return Expr::zero();
                }
                let e = k.unsigned_abs();
                let p = num_traits::pow(r.clone(), e as usize);
                Expr::num(if k < 0 { p.recip() } else { p })
            }
            Node::Pow(bb, j) => Expr::pow(bb, j * k),
            Node::Mul(fs) => Expr::mul_all(fs.iter().map(|f| Expr::pow(f, k))),
            Node::Fn(Func::Exp, a) => Expr::func(Func::Exp, Expr::int(k) * a.clone()),
            Node::Fn(Func::Sqrt, a) if k.abs() >= 2 => {
                let q = k.div_euclid(2);
                let r = k.rem_euclid(2);
                let whole = Expr::pow(a, q);
                if r == 0 {
                    whole
                } else {
                    Expr::mul_all([whole, b.clone()])
                }
            }
            _ => Expr::wrap(Node::Pow(b.clone(), k)),
        }
    }

    /// Function application with value-level simplifications.
    pub fn func(f: Func, a: Expr) -> Expr {
        if let Some(r) = a.as_num() {
            if r.is_zero() {
                match f {
                    Func::Sin | Func::Tan | Func::Sinh | Func::Tanh | Func::Sqrt => {
                        return Expr::zero()
                    }
                    Func::Cos | Func::Cosh | Func::Exp => return Expr::one(),
                    _ => {}
                }
            }
            if r.is_one() && f == Func::Ln {
                return Expr::zero();
            }
            if f == Func::Sqrt && r.is_positive() {
                if let (Some(n), Some(d)) = (exact_sqrt(r.numer()), exact_sqrt(r.denom())) {
                    return Expr::num(BigRational::new(n, d));
                }
            }
        }
        match (&f, a.node()) {
            (Func::Ln, Node::Fn(Func::Exp, inner)) => return inner.clone(),
            (Func::Exp, Node::Fn(Func::Ln, inner)) => return inner.clone(),
            _ => {}
        }
        Expr::wrap(Node::Fn(f, a))
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::func(Func::Sin, a)
    }
    pub fn cos(a: Expr) -> Expr {
        Expr::func(Func::Cos, a)
    }
    pub fn tan(a: Expr) -> Expr {
        Expr::func(Func::Tan, a)
    }
    pub fn sinh(a: Expr) -> Expr {
        Expr::func(Func::Sinh, a)
    }
    pub fn cosh(a: Expr) -> Expr {
        Expr::func(Func::Cosh, a)
    }
    pub fn tanh(a: Expr) -> Expr {
        Expr::func(Func::Tanh, a)
    }
    pub fn exp(a: Expr) -> Expr {
        Expr::func(Func::Exp, a)
    }
    pub fn ln(a: Expr) -> Expr {
        Expr::func(Func::Ln, a)
    }
    pub fn sqrt(a: Expr) -> Expr {
        Expr::func(Func::Sqrt, a)
    }

    pub fn opaque(name: &str, order: u32, a: Expr) -> Expr {
        Expr::func(
            Func::Opaque {
                name: Arc::from(name),
                order,
            },
            a,
        )
    }

    pub fn powi(&self, k: i64) -> Expr {
        Expr::pow(self, k)
    }

    pub fn recip(&self) -> Expr {
        Expr::pow(self, -1)
    }

    /// Structural partial derivative (not canonicalized).
    pub fn diff(&self, var: &str) -> Expr {
        if !self.depends_on(var) {
            return Expr::zero();
        }
        match self.node() {
            Node::Num(_) => Expr::zero(),
            Node::Sym(s) => {
                if &**s == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(ts) => Expr::add_all(ts.iter().map(|t| t.diff(var))),
            Node::Mul(fs) => {
                let mut terms = Vec::new();
                for i in 0..fs.len() {
                    let d = fs[i].diff(var);
                    if d.is_zero_literal() {
                        continue;
                    }
                    let mut prod: Vec<Expr> = Vec::with_capacity(fs.len());
                    for (j, f) in fs.iter().enumerate() {
                        prod.push(if i == j { d.clone() } else { f.clone() });
                    }
                    terms.push(Expr::mul_all(prod));
                }
                Expr::add_all(terms)
            }
            Node::Pow(b, k) => Expr::mul_all([Expr::int(*k), Expr::pow(b, k - 1), b.diff(var)]),
            Node::Fn(f, a) => {
                let da = a.diff(var);
                let outer = match f {
                    Func::Sin => Expr::cos(a.clone()),
                    Func::Cos => -Expr::sin(a.clone()),
                    Func::Tan => Expr::one() + Expr::pow(&Expr::tan(a.clone()), 2),
                    Func::Sinh => Expr::cosh(a.clone()),
                    Func::Cosh => Expr::sinh(a.clone()),
                    Func::Tanh => Expr::one() - Expr::pow(&Expr::tanh(a.clone()), 2),
                    Func::Exp => Expr::exp(a.clone()),
                    Func::Ln => a.recip(),
                    Func::Sqrt => Expr::frac(1, 2) * Expr::sqrt(a.clone()).recip(),
                    Func::Opaque { name, order } => Expr::func(
                        Func::Opaque {
                            name: name.clone(),
                            order: order + 1,
                        },
                        a.clone(),
                    ),
                };
                outer * da
            }
        }
    }

    pub fn depends_on(&self, var: &str) -> bool {
        match self.node() {
            Node::Num(_) => false,
            Node::Sym(s) => &**s == var,
            Node::Add(xs) | Node::Mul(xs) => xs.iter().any(|x| x.depends_on(var)),
            Node::Pow(b, _) => b.depends_on(var),
            Node::Fn(_, a) => a.depends_on(var),
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Num(_) => {}
            Node::Sym(s) => {
                out.insert(s.to_string());
            }
            Node::Add(xs) | Node::Mul(xs) => xs.iter().for_each(|x| x.collect_symbols(out)),
            Node::Pow(b, _) => b.collect_symbols(out),
            Node::Fn(_, a) => a.collect_symbols(out),
        }
    }

    /// True if any function application other than an opaque one occurs.
    pub fn has_transcendental(&self) -> bool {
        self.any_fn(&|f| !f.is_opaque())
    }

    pub fn has_opaque(&self) -> bool {
        self.any_fn(&|f| f.is_opaque())
    }

    fn any_fn(&self, pred: &dyn Fn(&Func) -> bool) -> bool {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => false,
            Node::Add(xs) | Node::Mul(xs) => xs.iter().any(|x| x.any_fn(pred)),
            Node::Pow(b, _) => b.any_fn(pred),
            Node::Fn(f, a) => pred(f) || a.any_fn(pred),
        }
    }

    /// Opaque function names with the highest derivative order seen.
    pub fn opaque_functions(&self) -> BTreeMap<String, u32> {
        let mut out = BTreeMap::new();
        self.visit(&mut |e| {
            if let Node::Fn(Func::Opaque { name, order }, _) = e.node() {
                let entry = out.entry(name.to_string()).or_insert(0);
                *entry = (*entry).max(*order);
            }
        });
        out
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self.node() {
            Node::Num(_) | Node::Sym(_) => {}
            Node::Add(xs) | Node::Mul(xs) => xs.iter().for_each(|x| x.visit(f)),
            Node::Pow(b, _) => b.visit(f),
            Node::Fn(_, a) => a.visit(f),
        }
    }

    /// Bottom-up rebuild through the simplifying constructors.
    pub fn map_bottom_up(&self, f: &dyn Fn(&Expr) -> Option<Expr>) -> Expr {
        let rebuilt = match self.node() {
            Node::Num(_) | Node::Sym(_) => self.clone(),
            Node::Add(xs) => Expr::add_all(xs.iter().map(|x| x.map_bottom_up(f))),
            Node::Mul(xs) => Expr::mul_all(xs.iter().map(|x| x.map_bottom_up(f))),
            Node::Pow(b, k) => Expr::pow(&b.map_bottom_up(f), *k),
            Node::Fn(g, a) => Expr::func(g.clone(), a.map_bottom_up(f)),
        };
        f(&rebuilt).unwrap_or(rebuilt)
    }

    /// Simultaneous substitution of variables (no canonicalization).
    pub fn subs(&self, bindings: &BTreeMap<String, Expr>) -> Expr {
        if bindings.is_empty() {
            return self.clone();
        }
        match self.node() {
            Node::Num(_) => self.clone(),
            Node::Sym(s) => bindings.get(&**s).cloned().unwrap_or_else(|| self.clone()),
            Node::Add(xs) => Expr::add_all(xs.iter().map(|x| x.subs(bindings))),
            Node::Mul(xs) => Expr::mul_all(xs.iter().map(|x| x.subs(bindings))),
            Node::Pow(b, k) => Expr::pow(&b.subs(bindings), *k),
            Node::Fn(g, a) => Expr::func(g.clone(), a.subs(bindings)),
        }
    }

    pub fn subs1(&self, var: &str, value: &Expr) -> Expr {
        let mut m = BTreeMap::new();
        m.insert(var.to_string(), value.clone());
        self.subs(&m)
    }

    /// Replaces opaque function applications using `f(name, order, arg)`.
    pub fn replace_opaque(&self, f: &dyn Fn(&str, u32, &Expr) -> Option<Expr>) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => self.clone(),
            Node::Add(xs) => Expr::add_all(xs.iter().map(|x| x.replace_opaque(f))),
            Node::Mul(xs) => Expr::mul_all(xs.iter().map(|x| x.replace_opaque(f))),
            Node::Pow(b, k) => Expr::pow(&b.replace_opaque(f), *k),
            Node::Fn(g, a) => {
                let a2 = a.replace_opaque(f);
                if let Func::Opaque { name, order } = g {
                    if let Some(r) = f(name, *order, &a2) {
                        return r;
                    }
                }
                Expr::func(g.clone(), a2)
            }
        }
    }

    /// Number of nodes, counting shared subtrees each time.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => 1,
            Node::Add(xs) | Node::Mul(xs) => 1 + xs.iter().map(|x| x.size()).sum::<usize>(),
            Node::Pow(b, _) => 1 + b.size(),
            Node::Fn(_, a) => 1 + a.size(),
        }
    }

    /// Degree of a polynomial-shaped expression in `var`, if it is one.
    pub fn poly_degree(&self, var: &str) -> Option<i64> {
        match self.node() {
            Node::Num(_) => Some(0),
            Node::Sym(s) => Some(if &**s == var { 1 } else { 0 }),
            Node::Add(xs) => xs.iter().map(|x| x.poly_degree(var)).try_fold(0, |m, d| d.map(|d| m.max(d))),
            Node::Mul(xs) => xs.iter().map(|x| x.poly_degree(var)).try_fold(0, |m, d| d.map(|d| m + d)),
            Node::Pow(b, k) => {
                let d = b.poly_degree(var)?;
                if d == 0 {
                    Some(0)
                } else if *k > 0 {
                    Some(d * k)
                } else {
                    None
                }
            }
            Node::Fn(_, a) => {
                if a.depends_on(var) {
                    None
                } else {
                    Some(0)
                }
            }
        }
    }

    pub fn to_f64_lossy(r: &BigRational) -> f64 {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    if &(&s * &s) == n {
        Some(s)
    } else {
        None
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add_all([self, rhs])
    }
}
impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::add_all([self, -rhs])
    }
}
impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul_all([self, rhs])
    }
}
impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::mul_all([self, rhs.recip()])
    }
}
impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul_all([Expr::int(-1), self])
    }
}

macro_rules! ref_ops {
    ($tr:ident, $m:ident) => {
        impl<'a> ops::$tr<&'a Expr> for &'a Expr {
            type Output = Expr;
            fn $m(self, rhs: &'a Expr) -> Expr {
                ops::$tr::$m(self.clone(), rhs.clone())
            }
        }
        impl<'a> ops::$tr<&'a Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &'a Expr) -> Expr {
                ops::$tr::$m(self, rhs.clone())
            }
        }
        impl<'a> ops::$tr<Expr> for &'a Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                ops::$tr::$m(self.clone(), rhs)
            }
        }
        impl ops::$tr<i64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                ops::$tr::$m(self, Expr::int(rhs))
            }
        }
        impl<'a> ops::$tr<i64> for &'a Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                ops::$tr::$m(self.clone(), Expr::int(rhs))
            }
        }
    };
}
ref_ops!(Add, add);
ref_ops!(Sub, sub);
ref_ops!(Mul, mul);
ref_ops!(Div, div);

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -(self.clone())
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<BigRational> for Expr {
    fn from(r: BigRational) -> Expr {
        Expr::num(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::sym("x")
    }
    fn y() -> Expr {
        Expr::sym("y")
    }

    #[test]
    fn like_terms_collect() {
        assert_eq!(x() + x(), Expr::int(2) * x());
        assert_eq!(x() - x(), Expr::zero());
        assert_eq!(x() * y() - y() * x(), Expr::zero());
    }

    #[test]
    fn powers_collect() {
        assert_eq!(x() * x(), x().powi(2));
        assert_eq!(x() / x(), Expr::one());
        assert_eq!(x().powi(2).powi(3), x().powi(6));
    }

    #[test]
    fn exp_and_log_fold() {
        let e = Expr::exp(x()) * Expr::exp(y());
        assert_eq!(e, Expr::exp(x() + y()));
        assert_eq!(Expr::ln(Expr::exp(x())), x());
        assert_eq!(Expr::sqrt(x()).powi(2), x());
        assert_eq!(Expr::sqrt(Expr::frac(9, 4)), Expr::frac(3, 2));
    }

    #[test]
    fn table_derivatives() {
        assert_eq!(Expr::cosh(x()).diff("x"), Expr::sinh(x()));
        assert_eq!(Expr::int(7).diff("x"), Expr::zero());
        assert_eq!(x().powi(3).diff("x"), Expr::int(3) * x().powi(2));
        let f = Expr::opaque("f", 0, x() * y());
        assert_eq!(f.diff("x"), Expr::opaque("f", 1, x() * y()) * y());
    }

    #[test]
    fn substitution_is_simultaneous() {
        let mut m = BTreeMap::new();
        m.insert("x".to_string(), y());
        m.insert("y".to_string(), x());
        let e = x() - Expr::int(2) * y();
        assert_eq!(e.subs(&m), y() - Expr::int(2) * x());
    }
}
