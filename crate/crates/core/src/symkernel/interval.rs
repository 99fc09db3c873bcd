//! Validated interval arithmetic with rational endpoints.
//!
//! Endpoints are rounded outward to the dyadic grid `2^-bits` after every
//! operation, so widths stay controlled while every true value remains
//! enclosed. Elementary functions use argument reduction plus Taylor or
//! atanh series with explicit remainder bounds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntervalError {
    /// Division by an interval containing zero.
    Pole,
    /// Argument outside the function's domain (ln, sqrt).
    Domain,
}

fn two_pow(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn floor_grid(r: &BigRational, bits: u32) -> BigRational {
    let scaled = r * BigRational::from_integer(two_pow(bits));
    BigRational::new(scaled.floor().to_integer(), two_pow(bits))
}

fn ceil_grid(r: &BigRational, bits: u32) -> BigRational {
    let scaled = r * BigRational::from_integer(two_pow(bits));
    BigRational::new(scaled.ceil().to_integer(), two_pow(bits))
}

fn ulp(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), two_pow(bits))
}

/// Floor of log2 |r| (r nonzero).
fn log2_floor(r: &BigRational) -> i64 {
    let n = r.numer().abs();
    let d = r.denom().clone();
    let mut e = n.bits() as i64 - d.bits() as i64;
    // 2^e <= n/d < 2^(e+1) after adjustment
    let pow = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(BigInt::one() << k as usize)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-k) as usize)
        }
    };
    let a = BigRational::new(n, d);
    while pow(e) > a {
        e -= 1;
    }
    while pow(e + 1) <= a {
        e += 1;
    }
    e
}

fn pow2_rat(k: i64) -> BigRational {
    if k >= 0 {
        BigRational::from_integer(BigInt::one() << k as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-k) as usize)
    }
}

impl Interval {
    pub fn point(r: BigRational) -> Interval {
        Interval {
            lo: r.clone(),
            hi: r,
        }
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Interval {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn from_int(n: i64) -> Interval {
        Interval::point(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn round(&self, bits: u32) -> Interval {
        Interval {
            lo: floor_grid(&self.lo, bits),
            hi: ceil_grid(&self.hi, bits),
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn mag(&self) -> BigRational {
        self.lo.abs().max(self.hi.abs())
    }

    /// True when the whole interval lies within `[-tol, tol]`.
    pub fn within(&self, tol: &BigRational) -> bool {
        self.mag() <= *tol
    }

    /// True when the interval excludes `[-tol, tol]`.
    pub fn exceeds(&self, tol: &BigRational) -> bool {
        self.lo > *tol || self.hi < -tol.clone()
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64().unwrap_or(f64::NAN)
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn add(&self, o: &Interval, bits: u32) -> Interval {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
        .round(bits)
    }

    pub fn sub(&self, o: &Interval, bits: u32) -> Interval {
        self.add(&o.neg(), bits)
    }

    pub fn mul(&self, o: &Interval, bits: u32) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }.round(bits)
    }

    pub fn recip(&self, bits: u32) -> Result<Interval, IntervalError> {
        if self.contains_zero() {
            return Err(IntervalError::Pole);
        }
        Ok(Interval {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        }
        .round(bits))
    }

    pub fn div(&self, o: &Interval, bits: u32) -> Result<Interval, IntervalError> {
        Ok(self.mul(&o.recip(bits)?, bits))
    }

    pub fn powi(&self, k: i64, bits: u32) -> Result<Interval, IntervalError> {
        if k < 0 {
            return self.recip(bits)?.powi(-k, bits);
        }
        if k == 0 {
            return Ok(Interval::from_int(1));
        }
        if k % 2 == 0 {
            // even powers of an interval straddling zero start at zero
            let a = self.lo.abs();
            let b = self.hi.abs();
            let (mn, mx) = if self.contains_zero() {
                (BigRational::zero(), a.max(b))
            } else {
                (a.clone().min(b.clone()), a.max(b))
            };
            let e = k as usize;
            return Ok(Interval {
                lo: num_traits::pow(mn, e),
                hi: num_traits::pow(mx, e),
            }
            .round(bits));
        }
        let e = k as usize;
        Ok(Interval {
            lo: num_traits::pow(self.lo.clone(), e),
            hi: num_traits::pow(self.hi.clone(), e),
        }
        .round(bits))
    }

    pub fn exp(&self, bits: u32) -> Interval {
        let lo = exp_point(&self.lo, bits).lo;
        let hi = exp_point(&self.hi, bits).hi;
        Interval { lo, hi }
    }

    pub fn ln(&self, bits: u32) -> Result<Interval, IntervalError> {
        if !self.lo.is_positive() {
            return Err(IntervalError::Domain);
        }
        let lo = ln_point(&self.lo, bits).lo;
        let hi = ln_point(&self.hi, bits).hi;
        Ok(Interval { lo, hi })
    }

    pub fn sqrt(&self, bits: u32) -> Result<Interval, IntervalError> {
        if self.lo.is_negative() {
            return Err(IntervalError::Domain);
        }
        let scale = BigRational::from_integer(two_pow(2 * bits));
        let lo_n = (&self.lo * &scale).floor().to_integer().sqrt();
        let hi_n = (&self.hi * &scale).ceil().to_integer().sqrt() + BigInt::one();
        Ok(Interval {
            lo: BigRational::new(lo_n, two_pow(bits)),
            hi: BigRational::new(hi_n, two_pow(bits)),
        })
    }

    fn lipschitz(&self, f: impl Fn(&BigRational) -> Interval, bits: u32) -> Interval {
        let m = self.mid();
        let rad = self.width() / BigRational::from_integer(BigInt::from(2));
        let v = f(&m);
        let one = BigRational::one();
        let lo = (&v.lo - &rad).max(-one.clone());
        let hi = (&v.hi + &rad).min(one);
        Interval { lo, hi }.round(bits)
    }

    pub fn sin(&self, bits: u32) -> Interval {
        self.lipschitz(|m| sin_cos_point(m, bits).0, bits)
    }

    pub fn cos(&self, bits: u32) -> Interval {
        self.lipschitz(|m| sin_cos_point(m, bits).1, bits)
    }

    pub fn sinh(&self, bits: u32) -> Interval {
        let e = self.exp(bits);
        let f = self.neg().exp(bits);
        let half = Interval::point(BigRational::new(BigInt::one(), BigInt::from(2)));
        e.sub(&f, bits).mul(&half, bits)
    }

    pub fn cosh(&self, bits: u32) -> Interval {
        let e = self.exp(bits);
        let f = self.neg().exp(bits);
        let half = Interval::point(BigRational::new(BigInt::one(), BigInt::from(2)));
        let mut r = e.add(&f, bits).mul(&half, bits);
        if r.lo < BigRational::one() {
            r.lo = BigRational::one();
        }
        r
    }
}

/// Guard bits used by the series evaluations.
const GUARD: u32 = 24;

fn factorial_bound_terms(t_abs_log2: i64, target_bits: u32) -> usize {
    // smallest N with |t|^N / N! < 2^-target, using |t| <= 2^t_abs_log2 <= 1/2
    let mut n = 1usize;
    let mut log_term = 0f64;
    loop {
        log_term += t_abs_log2 as f64 - (n as f64).log2();
        if -log_term > target_bits as f64 + 2.0 {
            return n + 1;
        }
        n += 1;
    }
}

/// exp(r) enclosed at roughly `bits` absolute bits.
pub fn exp_point(r: &BigRational, bits: u32) -> Interval {
    if r.is_zero() {
        return Interval::from_int(1);
    }
    let lg = log2_floor(r);
    let k: u32 = if lg >= -1 { (lg + 2) as u32 } else { 0 };
    let w = bits + GUARD + 2 * k;
    let t = r / pow2_rat(k as i64);
    let terms = factorial_bound_terms(-1, w);
    let mut sum = BigRational::one();
    let mut term = BigRational::one();
    for n in 1..terms {
        term = floor_grid(&(&term * &t / BigRational::from_integer(BigInt::from(n))), w);
        sum += &term;
    }
    let err = ulp(w) * BigRational::from_integer(BigInt::from(2 * terms as i64 + 4));
    let mut acc = Interval {
        lo: &sum - &err,
        hi: &sum + &err,
    };
    for _ in 0..k {
        acc = acc.mul(&acc, w);
    }
    acc.round(bits + GUARD)
}

fn atanh_series(t: &BigRational, w: u32) -> Interval {
    // atanh t = sum t^(2j+1)/(2j+1), 0 <= t <= 1/3
    let t2 = t * t;
    let mut power = t.clone();
    let mut sum = BigRational::zero();
    let mut j = 0i64;
    let limit = BigRational::new(BigInt::one(), two_pow(w + 2));
    let mut count = 0i64;
    loop {
        let term = floor_grid(&(&power / BigRational::from_integer(BigInt::from(2 * j + 1))), w);
        sum += &term;
        count += 1;
        power = floor_grid(&(&power * &t2), w + 8);
        j += 1;
        if power < limit {
            break;
        }
    }
    // tail <= power * 9/8, plus rounding of each term
    let tail = &power * BigRational::new(BigInt::from(9), BigInt::from(8));
    let err = tail + ulp(w) * BigRational::from_integer(BigInt::from(2 * count + 4));
    Interval {
        lo: &sum - &err,
        hi: &sum + &err,
    }
}

fn ln2(w: u32) -> Interval {
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let a = atanh_series(&third, w);
    a.add(&a, w)
}

/// ln(r) for r > 0.
pub fn ln_point(r: &BigRational, bits: u32) -> Interval {
    let w = bits + GUARD;
    let e = log2_floor(r);
    let m = r / pow2_rat(e);
    let one = BigRational::one();
    let t = (&m - &one) / (&m + &one);
    let a = atanh_series(&t, w);
    let lnm = a.add(&a, w);
    let l2 = ln2(w + 16);
    let scaled = l2.mul(&Interval::from_int(e), w);
    lnm.add(&scaled, w)
}

/// Simultaneous enclosures of sin(r) and cos(r).
pub fn sin_cos_point(r: &BigRational, bits: u32) -> (Interval, Interval) {
    if r.is_zero() {
        return (Interval::from_int(0), Interval::from_int(1));
    }
    let lg = log2_floor(r);
    let k: u32 = if lg >= -2 { (lg + 3) as u32 } else { 0 };
    let w = bits + GUARD + 2 * k;
    let t = r / pow2_rat(k as i64);
    let terms = factorial_bound_terms(-2, w);
    let mut s = BigRational::zero();
    let mut c = BigRational::zero();
    let mut term = BigRational::one();
    for n in 0..terms {
        if n > 0 {
            term = floor_grid(&(&term * &t / BigRational::from_integer(BigInt::from(n as i64))), w);
        }
        let sign = if (n / 2) % 2 == 0 { 1 } else { -1 };
        let signed = if sign > 0 { term.clone() } else { -term.clone() };
        if n % 2 == 0 {
            c += signed;
        } else {
            s += signed;
        }
    }
    let err = ulp(w) * BigRational::from_integer(BigInt::from(2 * terms as i64 + 4));
    let mut si = Interval {
        lo: &s - &err,
        hi: &s + &err,
    };
    let mut ci = Interval {
        lo: &c - &err,
        hi: &c + &err,
    };
    let two = Interval::from_int(2);
    let one = Interval::from_int(1);
    for _ in 0..k {
        let s2 = two.mul(&si, w).mul(&ci, w);
        let c2 = one.sub(&two.mul(&si.powi(2, w).unwrap(), w), w);
        si = s2;
        ci = c2;
    }
    (si.round(bits + GUARD), ci.round(bits + GUARD))
}
