use super::gcd::{gcd, gcd_cofactors};
use super::poly::Poly;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Reduced quotient of integer polynomials.
///
/// Normal form: `gcd(num, den) = 1`, integer contents coprime, and the
/// leading coefficient of `den` (lexicographic) is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFun {
    pub num: Poly,
    pub den: Poly,
}

impl RatFun {
    pub fn zero(nvars: usize) -> RatFun {
        RatFun {
            num: Poly::zero(nvars),
            den: Poly::one(nvars),
        }
    }

    pub fn one(nvars: usize) -> RatFun {
        RatFun::from_poly(Poly::one(nvars))
    }

    pub fn from_poly(p: Poly) -> RatFun {
        let n = p.nvars;
        RatFun {
            num: p,
            den: Poly::one(n),
        }
    }

    pub fn from_rational(nvars: usize, r: &BigRational) -> RatFun {
        RatFun {
            num: Poly::constant(nvars, r.numer().clone()),
            den: Poly::constant(nvars, r.denom().clone()),
        }
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if !self.is_constant() {
            return None;
        }
        Some(BigRational::new(self.num.constant_value()?, self.den.constant_value()?))
    }

    /// Builds `num/den` and reduces it. Panics if `den` is zero.
    pub fn new(num: Poly, den: Poly) -> RatFun {
        assert!(!den.is_zero(), "division by zero");
        if num.is_zero() {
            return RatFun::zero(num.nvars);
        }
        let (_, n2, d2) = gcd_cofactors(&num, &den);
        RatFun::fix_sign(n2, d2)
    }

    fn fix_sign(num: Poly, den: Poly) -> RatFun {
        if den.lc().is_negative() {
            RatFun {
                num: num.neg(),
                den: den.neg(),
            }
        } else {
            RatFun { num, den }
        }
    }

    pub fn neg(&self) -> RatFun {
        RatFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFun::from_poly(self.num.add(&other.num));
        }
        // Henrici: with g = gcd(b, d), the only possible common factor of the
        // new numerator with b*d/g lies in g.
        let (g, b1, d1) = gcd_cofactors(&self.den, &other.den);
        let num = self.num.mul(&d1).add(&other.num.mul(&b1));
        if num.is_zero() {
            return RatFun::zero(self.nvars());
        }
        let den = b1.mul(&other.den);
        if g.is_one() {
            return RatFun::fix_sign(num, den);
        }
        let h = gcd(&num, &g);
        if h.is_one() {
            return RatFun::fix_sign(num, den);
        }
        RatFun::fix_sign(num.div_exact(&h).unwrap(), den.div_exact(&h).unwrap())
    }

    pub fn sub(&self, other: &RatFun) -> RatFun {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        if self.is_zero() || other.is_zero() {
            return RatFun::zero(self.nvars());
        }
        let (_, a, d) = gcd_cofactors(&self.num, &other.den);
        let (_, c, b) = gcd_cofactors(&other.num, &self.den);
        RatFun::fix_sign(a.mul(&c), b.mul(&d))
    }

    pub fn inv(&self) -> Option<RatFun> {
        if self.is_zero() {
            return None;
        }
        Some(RatFun::fix_sign(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &RatFun) -> Option<RatFun> {
        Some(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Option<RatFun> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let e = k.unsigned_abs() as u32;
        Some(RatFun::fix_sign(base.num.pow(e), base.den.pow(e)))
    }

    pub fn scale(&self, r: &BigRational) -> RatFun {
        self.mul(&RatFun::from_rational(self.nvars(), r))
    }

    pub fn eval_rational(&self, point: &[BigRational]) -> Option<BigRational> {
        let d = self.den.eval_rational(point);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval_rational(point) / d)
    }

    /// Partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> RatFun {
        let n = self
            .num
            .derivative(var)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(var)));
        RatFun::new(n, self.den.pow(2))
    }

    /// Integer-content-normalized numerator used for sign-insensitive keys.
    pub fn numerator_key(&self) -> Poly {
        let p = self.num.primitive();
        if p.lc().is_negative() {
            p.neg()
        } else {
            p
        }
    }

    pub fn constant_int(nvars: usize, c: i64) -> RatFun {
        RatFun::from_poly(Poly::constant(nvars, BigInt::from(c)))
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one() || (self.num == self.den && !self.num.is_zero())
    }
}

impl Default for RatFun {
    fn default() -> Self {
        RatFun::zero(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation() {
        let n = 2;
        let x = Poly::var(n, 0);
        let y = Poly::var(n, 1);
        let r = RatFun::new(x.pow(2).sub(&y.pow(2)), x.sub(&y));
        assert_eq!(r, RatFun::from_poly(x.add(&y)));
    }

    #[test]
    fn henrici_sum() {
        let n = 1;
        let x = Poly::var(n, 0);
        let one = Poly::one(n);
        let a = RatFun::new(one.clone(), x.sub(&one));
        let b = RatFun::new(one.neg(), x.add(&one));
        let s = a.add(&b);
        let expected = RatFun::new(Poly::constant(n, BigInt::from(2)), x.pow(2).sub(&one));
        assert_eq!(s, expected);
    }

    #[test]
    fn sign_convention() {
        let n = 1;
        let x = Poly::var(n, 0);
        let r = RatFun::new(Poly::one(n), x.neg());
        assert!(r.den.lc() > BigInt::zero());
        assert!(r.num.lc() < BigInt::zero());
    }
}
