#![allow(dead_code)]

use dmz::dmz::DmzSystem;
use dmz::symkernel::{canonicalize, parse, Expr};
use dmz::sysfile::SystemFile;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

pub const XYZ: [&str; 3] = ["x", "y", "z"];

pub fn p(s: &str) -> Expr {
    parse(s).unwrap_or_else(|e| panic!("{}: {}", s, e))
}

pub fn corpus(name: &str) -> SystemFile {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name);
    SystemFile::read(&path).unwrap_or_else(|e| panic!("{}", e))
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let d: i64 = rng.gen_range(1..=4);
    let n: i64 = rng.gen_range(-9..=9);
    q(n, d)
}

/// `c0 + c1 t + c2 t^2 + c3 t^3` with `c1 ≠ 0`.
pub fn cubic(rng: &mut ChaCha8Rng, t: &str) -> Expr {
    let x = Expr::sym(t);
    let mut terms = Vec::new();
    for k in 0..=3 {
        let mut c = small_rational(rng);
        if k == 1 && c == q(0, 1) {
            c = q(1, 1);
        }
        terms.push(Expr::num(c) * Expr::pow(&x, k));
    }
    canonicalize(&Expr::add_all(terms))
}

/// A polynomial in `vars` with at most `terms` monomials of total degree ≤ `deg`.
pub fn poly(rng: &mut ChaCha8Rng, vars: &[&str], deg: u32, terms: usize) -> Expr {
    let mut out = Vec::new();
    for _ in 0..terms {
        let mut m = Expr::num(small_rational(rng));
        let mut left = deg;
        for v in vars {
            let k = rng.gen_range(0..=left);
            left -= k;
            m = m * Expr::pow(&Expr::sym(v), i64::from(k));
        }
        out.push(m);
    }
    canonicalize(&Expr::add_all(out))
}

/// A quotient of random polynomials whose denominator cannot vanish identically.
pub fn ratfun(rng: &mut ChaCha8Rng, vars: &[&str]) -> Expr {
    let n = poly(rng, vars, 2, 3);
    let d = poly(rng, vars, 1, 2);
    canonicalize(&(n / (Expr::pow(&d, 2) + Expr::one())))
}

/// Random expression tree over `vars` in the rational fragment.
pub fn tree(rng: &mut ChaCha8Rng, vars: &[&str], depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.6) {
            Expr::sym(vars[rng.gen_range(0..vars.len())])
        } else {
            Expr::num(small_rational(rng))
        };
    }
    let a = tree(rng, vars, depth - 1);
    match rng.gen_range(0..5) {
        0 => a + tree(rng, vars, depth - 1),
        1 => a - tree(rng, vars, depth - 1),
        2 => a * tree(rng, vars, depth - 1),
        3 => a / (Expr::pow(&tree(rng, vars, depth - 1), 2) + Expr::one()),
        _ => Expr::pow(&a, rng.gen_range(0..=3)),
    }
}

/// Rebuilds a DMZ system with `f` applied to every coefficient.
pub fn map_dmz(s: &DmzSystem, f: impl Fn(&Expr) -> Expr) -> DmzSystem {
    let mut out = DmzSystem::new(&s.coords);
    let n = s.dim();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let g = s.gamma(k, i, j);
                if !g.is_zero_literal() {
                    out.set_gamma(k, i, j, f(&g)).unwrap();
                }
            }
            let c = s.c(i, j);
            if !c.is_zero_literal() {
                out.set_c(i, j, f(&c)).unwrap();
            }
        }
    }
    out
}

/// Replaces opaque `name^(order)(arg)` by the derivative of a polynomial in `t`.
pub fn instantiate(e: &Expr, polys: &[(&str, Expr)]) -> Expr {
    let r = e.replace_opaque(&|name, order, arg| {
        let (_, p) = polys.iter().find(|(n, _)| *n == name)?;
        let mut d = p.clone();
        for _ in 0..order {
            d = d.diff("t");
        }
        Some(d.subs1("t", arg))
    });
    canonicalize(&r)
}
