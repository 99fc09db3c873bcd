use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;

/// Exponent vector; index `i` is the power of variable `i`.
pub type Mono = Vec<u32>;

/// Sparse multivariate polynomial over the integers.
///
/// Terms are kept sorted in descending lexicographic order of exponent
/// vectors (variable 0 is the most significant), with nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    pub nvars: usize,
    pub terms: Vec<(Mono, BigInt)>,
}

fn lex(a: &Mono, b: &Mono) -> Ordering {
    a.cmp(b)
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero(nvars);
        }
        Poly {
            nvars,
            terms: vec![(vec![0; nvars], c)],
        }
    }

    pub fn one(nvars: usize) -> Poly {
        Poly::constant(nvars, BigInt::one())
    }

    pub fn var(nvars: usize, i: usize) -> Poly {
        let mut m = vec![0; nvars];
        m[i] = 1;
        Poly {
            nvars,
            terms: vec![(m, BigInt::one())],
        }
    }

    pub fn monomial(nvars: usize, m: Mono, c: BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero(nvars);
        }
        Poly {
            nvars,
            terms: vec![(m, c)],
        }
    }

    fn from_map(nvars: usize, map: HashMap<Mono, BigInt>) -> Poly {
        let mut terms: Vec<(Mono, BigInt)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| lex(&b.0, &a.0));
        Poly { nvars, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0))
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && !self.is_zero() && self.terms[0].1.is_one()
    }

    pub fn constant_value(&self) -> Option<BigInt> {
        if self.is_zero() {
            Some(BigInt::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    /// Leading coefficient in lexicographic order.
    pub fn lc(&self) -> BigInt {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_default()
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match lex(&self.terms[i].0, &other.terms[j].0) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].1 + &other.terms[j].1;
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Poly {
            nvars: self.nvars,
            terms: out,
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        if other.is_constant() {
            return self.scale(&other.terms[0].1);
        }
        if self.is_constant() {
            return other.scale(&self.terms[0].1);
        }
        let mut map: HashMap<Mono, BigInt> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Mono = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                let prod = ca * cb;
                match map.get_mut(&m) {
                    Some(v) => *v += prod,
                    None => {
                        map.insert(m, prod);
                    }
                }
            }
        }
        Poly::from_map(self.nvars, map)
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono, c: &BigInt) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(ma, a)| (ma.iter().zip(m).map(|(x, y)| x + y).collect(), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &Poly) -> Option<Poly> {
        assert!(!other.is_zero(), "polynomial division by zero");
        if self.is_zero() {
            return Some(Poly::zero(self.nvars));
        }
        if other.is_constant() {
            let c = &other.terms[0].1;
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, a) in &self.terms {
                let (q, r) = a.div_rem(c);
                if !r.is_zero() {
                    return None;
                }
                terms.push((m.clone(), q));
            }
            return Some(Poly {
                nvars: self.nvars,
                terms,
            });
        }
        let (lm, lcoef) = &other.terms[0];
        let mut rem = self.clone();
        let mut quotient: Vec<(Mono, BigInt)> = Vec::new();
        while let Some((rm, rc)) = rem.terms.first().cloned() {
            if rm.iter().zip(lm).any(|(a, b)| a < b) {
                return None;
            }
            let (q, r) = rc.div_rem(lcoef);
            if !r.is_zero() {
                return None;
            }
            let m: Mono = rm.iter().zip(lm).map(|(a, b)| a - b).collect();
            rem = rem.sub(&other.mul_mono(&m, &q));
            quotient.push((m, q));
        }
        quotient.sort_by(|a, b| lex(&b.0, &a.0));
        Some(Poly {
            nvars: self.nvars,
            terms: quotient,
        })
    }

    /// Gcd of the integer coefficients (nonnegative).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn primitive(&self) -> Poly {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            return self.clone();
        }
        self.div_exact(&Poly::constant(self.nvars, c)).unwrap()
    }

    pub fn max_norm(&self) -> BigInt {
        self.terms.iter().map(|(_, c)| c.abs()).max().unwrap_or_default()
    }

    pub fn degree(&self, var: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.iter().sum()).max().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.iter().any(|(m, _)| m[var] > 0)
    }

    pub fn used_vars(&self) -> Vec<bool> {
        let mut used = vec![false; self.nvars];
        for (m, _) in &self.terms {
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
        used
    }

    /// Coefficients in powers of `var`, indexed by degree.
    pub fn coeffs_in(&self, var: usize) -> Vec<Poly> {
        let deg = self.degree(var) as usize;
        let mut buckets: Vec<Vec<(Mono, BigInt)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let d = m2[var] as usize;
            m2[var] = 0;
            buckets[d].push((m2, c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut ts| {
                ts.sort_by(|a, b| lex(&b.0, &a.0));
                Poly {
                    nvars: self.nvars,
                    terms: ts,
                }
            })
            .collect()
    }

    pub fn from_coeffs_in(nvars: usize, var: usize, coeffs: &[Poly]) -> Poly {
        let mut acc = Poly::zero(nvars);
        for (d, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut m = vec![0; nvars];
            m[var] = d as u32;
            acc = acc.add(&c.mul_mono(&m, &BigInt::one()));
        }
        acc
    }

    /// Leading coefficient with respect to `var` (a polynomial free of `var`).
    pub fn lc_in(&self, var: usize) -> Poly {
        let d = self.degree(var);
        let mut ts: Vec<(Mono, BigInt)> = self
            .terms
            .iter()
            .filter(|(m, _)| m[var] == d)
            .map(|(m, c)| {
                let mut m2 = m.clone();
                m2[var] = 0;
                (m2, c.clone())
            })
            .collect();
        ts.sort_by(|a, b| lex(&b.0, &a.0));
        Poly {
            nvars: self.nvars,
            terms: ts,
        }
    }

    /// Substitutes an integer for `var`.
    pub fn eval_var(&self, var: usize, value: &BigInt) -> Poly {
        let mut map: HashMap<Mono, BigInt> = HashMap::new();
        let mut powers: Vec<BigInt> = vec![BigInt::one()];
        for (m, c) in &self.terms {
            let e = m[var] as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            let mut m2 = m.clone();
            m2[var] = 0;
            let v = c * &powers[e];
            *map.entry(m2).or_insert_with(BigInt::zero) += v;
        }
        Poly::from_map(self.nvars, map)
    }

    pub fn eval_rational(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[i].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Partial derivative with respect to `var`.
    pub fn derivative(&self, var: usize) -> Poly {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            if m[var] == 0 {
                continue;
            }
            let mut m2 = m.clone();
            let e = m2[var];
            m2[var] -= 1;
            terms.push((m2, c * BigInt::from(e)));
        }
        terms.sort_by(|a, b| lex(&b.0, &a.0));
        Poly {
            nvars: self.nvars,
            terms,
        }
    }
}
