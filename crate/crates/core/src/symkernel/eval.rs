use super::expr::{Expr, Func, Node};
use super::interval::{Interval, IntervalError};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Exact rational values for variables.
pub type Assignment = BTreeMap<String, BigRational>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Exact(BigRational),
    Interval(Interval),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => Expr::to_f64_lossy(r),
            Value::Interval(i) => i.to_f64(),
        }
    }

    pub fn as_interval(&self) -> Interval {
        match self {
            Value::Exact(r) => Interval::point(r.clone()),
            Value::Interval(i) => i.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("pole at the assigned point")]
    Pole,
    #[error("argument outside the function domain")]
    Domain,
    #[error("variable `{0}` has no assigned value")]
    Unbound(String),
    #[error("opaque function `{0}` cannot be evaluated")]
    Opaque(String),
}

impl From<IntervalError> for EvalError {
    fn from(e: IntervalError) -> Self {
        match e {
            IntervalError::Pole => EvalError::Pole,
            IntervalError::Domain => EvalError::Domain,
        }
    }
}

/// Evaluates exactly on the rational fragment and as a validated interval
/// of roughly `precision` bits otherwise.
pub fn eval(e: &Expr, a: &Assignment, precision: u32) -> Result<Value, EvalError> {
    if e.has_opaque() {
        let name = e.opaque_functions().into_keys().next().unwrap_or_default();
        return Err(EvalError::Opaque(name));
    }
    if e.has_transcendental() {
        Ok(Value::Interval(eval_interval(e, a, precision)?))
    } else {
        Ok(Value::Exact(eval_exact(e, a)?))
    }
}

pub fn eval_exact(e: &Expr, a: &Assignment) -> Result<BigRational, EvalError> {
    Ok(match e.node() {
        Node::Num(r) => r.clone(),
        Node::Sym(s) => a.get(&**s).cloned().ok_or_else(|| EvalError::Unbound(s.to_string()))?,
        Node::Add(xs) => {
            let mut acc = BigRational::zero();
            for x in xs {
                acc += eval_exact(x, a)?;
            }
            acc
        }
        Node::Mul(xs) => {
            let mut acc = BigRational::one();
            for x in xs {
                acc *= eval_exact(x, a)?;
                if acc.is_zero() {
                    // remaining factors may still contain a pole
                    for y in xs {
                        eval_exact(y, a)?;
                    }
                    return Ok(acc);
                }
            }
            acc
        }
        Node::Pow(b, k) => {
            let v = eval_exact(b, a)?;
            if v.is_zero() && *k < 0 {
                return Err(EvalError::Pole);
            }
            let p = num_traits::pow(v, k.unsigned_abs() as usize);
            if *k < 0 {
                p.recip()
            } else {
                p
            }
        }
        Node::Fn(f, _) => return Err(EvalError::Opaque(f.name())),
    })
}

/// Plain floating-point evaluation; poles give non-finite values.
pub fn eval_f64(e: &Expr, a: &BTreeMap<String, f64>) -> Result<f64, EvalError> {
    Ok(match e.node() {
        Node::Num(r) => Expr::to_f64_lossy(r),
        Node::Sym(s) => *a.get(&**s).ok_or_else(|| EvalError::Unbound(s.to_string()))?,
        Node::Add(xs) => xs.iter().map(|x| eval_f64(x, a)).sum::<Result<f64, _>>()?,
        Node::Mul(xs) => xs.iter().map(|x| eval_f64(x, a)).product::<Result<f64, _>>()?,
        Node::Pow(b, k) => eval_f64(b, a)?.powi(*k as i32),
        Node::Fn(f, x) => {
            let v = eval_f64(x, a)?;
            match f {
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Tan => v.tan(),
                Func::Sinh => v.sinh(),
                Func::Cosh => v.cosh(),
                Func::Tanh => v.tanh(),
                Func::Exp => v.exp(),
                Func::Ln => v.ln(),
                Func::Sqrt => v.sqrt(),
                Func::Opaque { .. } => return Err(EvalError::Opaque(f.name())),
            }
        }
    })
}

pub fn eval_interval(e: &Expr, a: &Assignment, bits: u32) -> Result<Interval, EvalError> {
    Ok(match e.node() {
        Node::Num(r) => Interval::point(r.clone()),
        Node::Sym(s) => Interval::point(a.get(&**s).cloned().ok_or_else(|| EvalError::Unbound(s.to_string()))?),
        Node::Add(xs) => {
            let mut acc = Interval::from_int(0);
            for x in xs {
                acc = acc.add(&eval_interval(x, a, bits)?, bits);
            }
            acc
        }
        Node::Mul(xs) => {
            let mut acc = Interval::from_int(1);
            for x in xs {
                acc = acc.mul(&eval_interval(x, a, bits)?, bits);
            }
            acc
        }
        Node::Pow(b, k) => eval_interval(b, a, bits)?.powi(*k, bits)?,
        Node::Fn(f, arg) => {
            let v = eval_interval(arg, a, bits)?;
            match f {
                Func::Sin => v.sin(bits),
                Func::Cos => v.cos(bits),
                Func::Tan => v.sin(bits).div(&v.cos(bits), bits)?,
                Func::Sinh => v.sinh(bits),
                Func::Cosh => v.cosh(bits),
                Func::Tanh => v.sinh(bits).div(&v.cosh(bits), bits)?,
                Func::Exp => v.exp(bits),
                Func::Ln => v.ln(bits)?,
                Func::Sqrt => v.sqrt(bits)?,
                Func::Opaque { .. } => return Err(EvalError::Opaque(f.name())),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }
    use crate::symkernel::parse;

    fn at(pairs: &[(&str, BigRational)]) -> Assignment {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn exact_and_pole() {
        let e = parse("z^3/(y*z^3-1)").unwrap();
        let a = at(&[("y", rational(1, 1)), ("z", rational(2, 1))]);
        assert_eq!(eval(&e, &a, 64).unwrap(), Value::Exact(rational(8, 7)));
        let b = at(&[("y", rational(1, 1)), ("z", rational(1, 1))]);
        assert_eq!(eval(&e, &b, 64), Err(EvalError::Pole));
    }

    #[test]
    fn transcendental_encloses() {
        let e = parse("cosh(x)^2 - sinh(x)^2").unwrap();
        // canonical form is exactly 1; evaluate the raw identity instead
        let raw = Expr::cosh(Expr::sym("x")).powi(2) - Expr::sinh(Expr::sym("x")).powi(2);
        let a = at(&[("x", rational(3, 2))]);
        let v = eval(&raw, &a, 128).unwrap().as_interval();
        assert!(v.lo <= BigRational::one() && v.hi >= BigRational::one());
        assert_eq!(e, Expr::one());
    }
}
