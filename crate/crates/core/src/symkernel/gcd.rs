//! Multivariate polynomial gcd over the integers.
//!
//! The heuristic gcd evaluates one variable at a large integer, recurses,
//! and reconstructs the candidate by symmetric ξ-adic interpolation. Every
//! candidate is confirmed by exact division, so a returned value is always
//! correct. When the heuristic gives up, a recursive primitive
//! pseudo-remainder sequence finishes the job.

use super::poly::Poly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

const HEU_ATTEMPTS: usize = 6;

/// Greatest common divisor with positive leading coefficient.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    gcd_cofactors(a, b).0
}

/// Returns `(g, a/g, b/g)`.
pub fn gcd_cofactors(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
    let n = a.nvars;
    if a.is_zero() && b.is_zero() {
        return (Poly::zero(n), Poly::zero(n), Poly::zero(n));
    }
    if a.is_zero() {
        let g = normalize_sign(b.clone());
        let cb = b.div_exact(&g).unwrap();
        return (g, Poly::zero(n), cb);
    }
    if b.is_zero() {
        let g = normalize_sign(a.clone());
        let ca = a.div_exact(&g).unwrap();
        return (g, ca, Poly::zero(n));
    }
    if a.is_constant() || b.is_constant() {
        let g = Poly::constant(n, a.content().gcd(&b.content()));
        return (g.clone(), a.div_exact(&g).unwrap(), b.div_exact(&g).unwrap());
    }
    if a == b {
        let g = normalize_sign(a.clone());
        let c = a.div_exact(&g).unwrap();
        return (g, c.clone(), c);
    }
    let ua = a.used_vars();
    let ub = b.used_vars();
    // A variable present in only one argument cannot occur in the gcd: replace
    // that argument by its content with respect to the variable.
    for v in 0..n {
        if ua[v] != ub[v] {
            let (x, y, swap) = if ua[v] { (a, b, false) } else { (b, a, true) };
            let cont = content_in(x, v);
            let g = gcd(&cont, y);
            let cx = x.div_exact(&g).unwrap();
            let cy = y.div_exact(&g).unwrap();
            return if swap { (g, cy, cx) } else { (g, cx, cy) };
        }
    }
    let vars: Vec<usize> = (0..n).filter(|&v| ua[v]).collect();
    if let Some((g, ca, cb)) = heu(a, b, &vars) {
        let g2 = normalize_sign(g.clone());
        if g2 != g {
            return (g2, ca.neg(), cb.neg());
        }
        return (g, ca, cb);
    }
    let g = normalize_sign(prs(a, b, &vars));
    (g.clone(), a.div_exact(&g).unwrap(), b.div_exact(&g).unwrap())
}

fn normalize_sign(p: Poly) -> Poly {
    if p.lc().is_negative() {
        p.neg()
    } else {
        p
    }
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `var`.
fn content_in(p: &Poly, var: usize) -> Poly {
    let mut g = Poly::zero(p.nvars);
    for c in p.coeffs_in(var) {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, &c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn int_sqrt(n: &BigInt) -> BigInt {
    if n.is_positive() {
        n.sqrt()
    } else {
        BigInt::zero()
    }
}

fn heu(f: &Poly, g: &Poly, vars: &[usize]) -> Option<(Poly, Poly, Poly)> {
    let n = f.nvars;
    if f.is_zero() || g.is_zero() {
        return None;
    }
    if vars.is_empty() {
        let a = f.constant_value()?;
        let b = g.constant_value()?;
        let h = a.gcd(&b);
        return Some((
            Poly::constant(n, h.clone()),
            Poly::constant(n, &a / &h),
            Poly::constant(n, &b / &h),
        ));
    }
    let c = f.content().gcd(&g.content());
    let cpoly = Poly::constant(n, c.clone());
    let f = f.div_exact(&cpoly).unwrap();
    let g = g.div_exact(&cpoly).unwrap();

    let f_norm = f.max_norm();
    let g_norm = g.max_norm();
    let b = BigInt::from(2) * f_norm.clone().min(g_norm.clone()) + BigInt::from(29);
    let mut x = {
        let a1 = b.clone().min(BigInt::from(99) * int_sqrt(&b));
        let a2 = BigInt::from(2)
            * (&f_norm / f.lc().abs()).min(&g_norm / g.lc().abs())
            + BigInt::from(4);
        a1.max(a2)
    };
    let (var, rest) = vars.split_last().unwrap();
    for _ in 0..HEU_ATTEMPTS {
        let ff = f.eval_var(*var, &x);
        let gg = g.eval_var(*var, &x);
        if !ff.is_zero() && !gg.is_zero() {
            let (h, cff, cfg) = heu(&ff, &gg, rest)?;
            let h = interpolate(&h, &x, *var).primitive();
            if !h.is_zero() {
                if let Some(cf) = f.div_exact(&h) {
                    if let Some(cg) = g.div_exact(&h) {
                        return Some((h.scale(&c), cf, cg));
                    }
                }
            }
            let cff = interpolate(&cff, &x, *var);
            if !cff.is_zero() {
                if let Some(h) = f.div_exact(&cff) {
                    if !h.is_zero() {
                        if let Some(cg) = g.div_exact(&h) {
                            return Some((h.scale(&c), cff, cg));
                        }
                    }
                }
            }
            let cfg = interpolate(&cfg, &x, *var);
            if !cfg.is_zero() {
                if let Some(h) = g.div_exact(&cfg) {
                    if !h.is_zero() {
                        if let Some(cf) = f.div_exact(&h) {
                            return Some((h.scale(&c), cf, cfg));
                        }
                    }
                }
            }
        }
        let s = int_sqrt(&int_sqrt(&x));
        x = BigInt::from(73794) * &x * s / BigInt::from(27011);
    }
    None
}

fn symmetric_mod(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if BigInt::from(2) * &r > *m {
        r - m
    } else {
        r
    }
}

fn interpolate(h: &Poly, x: &BigInt, var: usize) -> Poly {
    let n = h.nvars;
    let mut h = h.clone();
    let mut out = Poly::zero(n);
    let mut i = 0u32;
    while !h.is_zero() {
        let g = Poly {
            nvars: n,
            terms: h
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), symmetric_mod(c, x)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        };
        let mut mono = vec![0u32; n];
        mono[var] = i;
        out = out.add(&g.mul_mono(&mono, &BigInt::one()));
        h = h.sub(&g).div_exact(&Poly::constant(n, x.clone())).unwrap();
        i += 1;
    }
    normalize_sign(out)
}

fn pseudo_rem(a: &Poly, b: &Poly, var: usize) -> Poly {
    let n = b.degree(var);
    let lcb = b.lc_in(var);
    let mut r = a.clone();
    while !r.is_zero() && r.degree(var) >= n {
        let d = r.degree(var);
        let lcr = r.lc_in(var);
        let mut mono = vec![0u32; a.nvars];
        mono[var] = d - n;
        r = lcb.mul(&r).sub(&lcr.mul(&b.mul_mono(&mono, &BigInt::one())));
    }
    r
}

fn primitive_in(p: &Poly, var: usize) -> (Poly, Poly) {
    let c = content_in(p, var);
    if c.is_zero() {
        return (c, p.clone());
    }
    (c.clone(), p.div_exact(&c).unwrap())
}

fn prs(a: &Poly, b: &Poly, vars: &[usize]) -> Poly {
    let n = a.nvars;
    let Some((&v, _)) = vars.split_first() else {
        return Poly::constant(n, a.content().gcd(&b.content()));
    };
    let (ca, pa) = primitive_in(a, v);
    let (cb, pb) = primitive_in(b, v);
    let c = gcd(&ca, &cb);
    let (mut p, mut q) = if pa.degree(v) >= pb.degree(v) { (pa, pb) } else { (pb, pa) };
    loop {
        if q.is_zero() {
            break;
        }
        let r = pseudo_rem(&p, &q, v);
        if r.is_zero() {
            break;
        }
        if r.degree(v) == 0 {
            q = Poly::one(n);
            break;
        }
        p = q;
        q = primitive_in(&r, v).1;
    }
    let (_, pq) = primitive_in(&q, v);
    c.mul(&pq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }
    fn k(n: usize, c: i64) -> Poly {
        Poly::constant(n, BigInt::from(c))
    }

    #[test]
    fn gcd_of_products() {
        let n = 3;
        let (x, y, z) = (var(n, 0), var(n, 1), var(n, 2));
        let common = x.mul(&y).sub(&z.pow(3)).add(&k(n, 2));
        let a = common.mul(&x.add(&y)).mul(&k(n, 6));
        let b = common.mul(&z.sub(&x)).mul(&k(n, 4));
        let g = gcd(&a, &b);
        assert_eq!(g, common.scale(&BigInt::from(2)));
    }

    #[test]
    fn prs_agrees_with_heuristic() {
        let n = 2;
        let (x, y) = (var(n, 0), var(n, 1));
        let common = x.pow(2).sub(&y).add(&k(n, 1));
        let a = common.mul(&x.sub(&y));
        let b = common.mul(&x.add(&y).pow(2));
        let vars = vec![0, 1];
        assert_eq!(normalize_sign(prs(&a, &b, &vars)), common);
        assert_eq!(gcd(&a, &b), common);
    }

    #[test]
    fn coprime_inputs() {
        let n = 2;
        let (x, y) = (var(n, 0), var(n, 1));
        assert!(gcd(&x.add(&k(n, 1)), &y.sub(&k(n, 1))).is_one());
    }
}
