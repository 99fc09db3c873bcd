use super::expr::{Expr, Node};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use std::fmt;

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_ATOM: u8 = 4;

fn precedence(e: &Expr) -> u8 {
    match e.node() {
        Node::Num(r) => {
            if r.is_negative() {
                PREC_ADD
            } else if r.is_integer() {
                PREC_ATOM
            } else {
                PREC_MUL
            }
        }
        Node::Sym(_) | Node::Fn(..) => PREC_ATOM,
        Node::Pow(_, k) => {
            if *k < 0 {
                PREC_MUL
            } else {
                3
            }
        }
        Node::Mul(_) => {
            let (c, _) = e.split_coeff();
            if c.is_negative() {
                PREC_ADD
            } else {
                PREC_MUL
            }
        }
        Node::Add(_) => PREC_ADD,
    }
}

fn wrap(e: &Expr, min: u8) -> String {
    let s = render(e);
    if precedence(e) < min {
        format!("({})", s)
    } else {
        s
    }
}

fn render_int(n: &BigInt) -> String {
    n.to_string()
}

fn render_product(coeff: &BigRational, factors: &[Expr]) -> String {
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    let c_num = coeff.numer().abs();
    let c_den = coeff.denom().clone();
    if !c_num.is_one() {
        num.push(render_int(&c_num));
    }
    if !c_den.is_one() {
        den.push(render_int(&c_den));
    }
    for f in factors {
        match f.node() {
            Node::Pow(b, k) if *k < 0 => {
                let positive = Expr::pow(b, -k);
                den.push(wrap(&positive, 3));
            }
            _ => num.push(wrap(f, PREC_MUL + 1)),
        }
    }
    let sign = if coeff.is_negative() { "-" } else { "" };
    let num_s = if num.is_empty() { "1".to_string() } else { num.join("*") };
    if den.is_empty() {
        format!("{}{}", sign, num_s)
    } else if den.len() == 1 {
        format!("{}{}/{}", sign, num_s, den[0])
    } else {
        format!("{}{}/({})", sign, num_s, den.join("*"))
    }
}

/// Infix rendering that the parser reads back to an equal expression.
pub fn render(e: &Expr) -> String {
    match e.node() {
        Node::Num(r) => {
            if r.is_integer() {
                render_int(r.numer())
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        Node::Sym(s) => s.to_string(),
        Node::Fn(f, a) => format!("{}({})", f.name(), render(a)),
        Node::Pow(b, k) => {
            if *k < 0 {
                render_product(&BigRational::one(), std::slice::from_ref(e))
            } else {
                format!("{}^{}", wrap(b, PREC_ATOM), k)
            }
        }
        Node::Mul(fs) => {
            let (c, _) = e.split_coeff();
            let start = if fs[0].as_num().is_some() { 1 } else { 0 };
            render_product(&c, &fs[start..])
        }
        Node::Add(ts) => {
            let mut ordered: Vec<&Expr> = ts.iter().filter(|t| t.as_num().is_none()).collect();
            ordered.extend(ts.iter().filter(|t| t.as_num().is_some()));
            let mut out = String::new();
            for (i, t) in ordered.iter().enumerate() {
                let (c, _) = t.split_coeff();
                if i == 0 {
                    out.push_str(&render(t));
                } else if c.is_negative() {
                    out.push_str(" - ");
                    out.push_str(&wrap(&-(*t).clone(), PREC_ADD + 1));
                } else {
                    out.push_str(" + ");
                    out.push_str(&render(t));
                }
            }
            out
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}
