use super::canon::try_canonicalize;
use super::eval::{eval_exact, eval_interval, Assignment, EvalError};
use super::expr::Expr;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Which decision procedure applies to an expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fragment {
    Rational,
    Transcendental,
    Opaque,
}

impl Fragment {
    pub fn of(e: &Expr) -> Fragment {
        if e.has_opaque() {
            Fragment::Opaque
        } else if e.has_transcendental() {
            Fragment::Transcendental
        } else {
            Fragment::Rational
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub point: Assignment,
    /// Midpoint of the enclosure of the value.
    pub value: f64,
    /// Description of the polynomials substituted for opaque functions.
    pub instantiation: Option<String>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.point.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
        write!(f, "at ({}) value ≈ {:.6e}", pts.join(", "), self.value)?;
        if let Some(i) = &self.instantiation {
            write!(f, " with {}", i)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    ProvablyZero,
    ProvablyNonzero { witness: Option<Witness> },
    ProbablyZero { samples: usize },
    ProbablyNonzero { witness: Witness },
    /// Every sample hit a pole or stayed ambiguous.
    Indeterminate,
}

impl Verdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, Verdict::ProvablyZero | Verdict::ProbablyZero { .. })
    }

    pub fn is_nonzero(&self) -> bool {
        matches!(self, Verdict::ProvablyNonzero { .. } | Verdict::ProbablyNonzero { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::ProvablyNonzero { witness } => witness.as_ref(),
            Verdict::ProbablyNonzero { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Verdict::ProvablyZero => "ProvablyZero".into(),
            Verdict::ProvablyNonzero { .. } => "ProvablyNonzero".into(),
            Verdict::ProbablyZero { samples } => format!("ProbablyZero({})", samples),
            Verdict::ProbablyNonzero { .. } => "ProbablyNonzero".into(),
            Verdict::Indeterminate => "Indeterminate".into(),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())?;
        if let Some(w) = self.witness() {
            write!(f, " {}", w)?;
        }
        Ok(())
    }
}

/// Sampling parameters for the non-rational fragments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroTest {
    pub seed: u64,
    pub samples: usize,
    /// Working precision in bits.
    pub precision: u32,
    /// Values with magnitude below `2^-tolerance_bits` count as zero.
    pub tolerance_bits: u32,
    /// Sample coordinates are drawn from `[-range, range]`.
    pub range: i64,
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest {
            seed: 0,
            samples: 32,
            precision: 256,
            tolerance_bits: 64,
            range: 10,
        }
    }
}

pub fn is_zero(e: &Expr) -> Verdict {
    is_zero_with(e, &ZeroTest::default())
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl ZeroTest {
    /// Deterministic generator for a given expression.
    pub fn rng_for(&self, e: &Expr) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ fnv1a(&e.to_string()))
    }

    pub fn random_rational(&self, rng: &mut ChaCha8Rng) -> BigRational {
        let q: i64 = rng.gen_range(1..=64);
        let p: i64 = rng.gen_range(-self.range * q..=self.range * q);
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    pub fn random_point(&self, vars: &[String], rng: &mut ChaCha8Rng) -> Assignment {
        vars.iter().map(|v| (v.clone(), self.random_rational(rng))).collect()
    }

    pub fn tolerance(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::one() << self.tolerance_bits as usize)
    }
}

pub fn is_zero_with(e: &Expr, cfg: &ZeroTest) -> Verdict {
    match Fragment::of(e) {
        Fragment::Opaque => opaque_verdict(e, cfg),
        Fragment::Rational => {
            let Ok(c) = try_canonicalize(e) else {
                return Verdict::Indeterminate;
            };
            if c.is_zero_literal() {
                Verdict::ProvablyZero
            } else {
                Verdict::ProvablyNonzero {
                    witness: rational_witness(&c, cfg),
                }
            }
        }
        Fragment::Transcendental => {
            let Ok(c) = try_canonicalize(e) else {
                return Verdict::Indeterminate;
            };
            sampled_verdict(&c, cfg)
        }
    }
}

fn rational_witness(c: &Expr, cfg: &ZeroTest) -> Option<Witness> {
    let vars: Vec<String> = c.free_symbols().into_iter().collect();
    let mut rng = cfg.rng_for(c);
    for _ in 0..64 {
        let pt = cfg.random_point(&vars, &mut rng);
        if let Ok(v) = eval_exact(c, &pt) {
            if !v.is_zero() {
                return Some(Witness {
                    point: pt,
                    value: Expr::to_f64_lossy(&v),
                    instantiation: None,
                });
            }
        }
    }
    None
}

fn sampled_verdict(c: &Expr, cfg: &ZeroTest) -> Verdict {
    let vars: Vec<String> = c.free_symbols().into_iter().collect();
    let mut rng = cfg.rng_for(c);
    let tol = cfg.tolerance();
    let mut good = 0usize;
    let max_attempts = 8 * cfg.samples.max(1);
    for _ in 0..max_attempts {
        if good >= cfg.samples {
            break;
        }
        let pt = cfg.random_point(&vars, &mut rng);
        let mut bits = cfg.precision;
        for _ in 0..3 {
            match eval_interval(c, &pt, bits) {
                Err(EvalError::Pole) | Err(EvalError::Domain) => break,
                Err(_) => return Verdict::Indeterminate,
                Ok(v) => {
                    if v.within(&tol) {
                        good += 1;
                        break;
                    }
                    if v.exceeds(&tol) {
                        return Verdict::ProbablyNonzero {
                            witness: Witness {
                                point: pt,
                                value: v.to_f64(),
                                instantiation: None,
                            },
                        };
                    }
                    bits *= 2;
                }
            }
        }
    }
    if good == 0 {
        Verdict::Indeterminate
    } else {
        Verdict::ProbablyZero { samples: good }
    }
}

/// Random integer polynomial of degree at most 3 in one variable.
pub(crate) fn random_cubic(rng: &mut ChaCha8Rng) -> [i64; 4] {
    loop {
        let c: [i64; 4] = [
            rng.gen_range(-5..=5),
            rng.gen_range(-5..=5),
            rng.gen_range(-5..=5),
            rng.gen_range(-5..=5),
        ];
        if c[1..].iter().any(|&x| x != 0) {
            return c;
        }
    }
}

/// Value of the `order`-th derivative of `c0 + c1 s + c2 s² + c3 s³` at `s`.
pub(crate) fn cubic_derivative(c: &[i64; 4], order: u32, s: &Expr) -> Expr {
    let mut coeffs: Vec<i64> = c.to_vec();
    for _ in 0..order {
        coeffs = coeffs.iter().enumerate().skip(1).map(|(i, &a)| a * i as i64).collect();
    }
    let mut terms = Vec::new();
    for (i, &a) in coeffs.iter().enumerate() {
        if a != 0 {
            terms.push(Expr::int(a) * Expr::pow(s, i as i64));
        }
    }
    Expr::add_all(terms)
}

fn opaque_verdict(e: &Expr, cfg: &ZeroTest) -> Verdict {
    let names: Vec<String> = e.opaque_functions().into_keys().collect();
    let mut rng = cfg.rng_for(e);
    let mut good = 0usize;
    for _ in 0..cfg.samples {
        let polys: Vec<(String, [i64; 4])> = names.iter().map(|n| (n.clone(), random_cubic(&mut rng))).collect();
        let inst = e.replace_opaque(&|name, order, arg| {
            polys
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, c)| cubic_derivative(c, order, arg))
        });
        let inner = ZeroTest {
            samples: 4,
            ..cfg.clone()
        };
        let v = is_zero_with(&inst, &inner);
        let describe = || {
            polys
                .iter()
                .map(|(n, c)| format!("{}(s)={}+{}*s+{}*s^2+{}*s^3", n, c[0], c[1], c[2], c[3]))
                .collect::<Vec<_>>()
                .join(", ")
        };
        match v {
            Verdict::ProvablyZero | Verdict::ProbablyZero { .. } => good += 1,
            Verdict::Indeterminate => {}
            Verdict::ProvablyNonzero { witness } => {
                let mut w = witness.unwrap_or(Witness {
                    point: Assignment::new(),
                    value: f64::NAN,
                    instantiation: None,
                });
                w.instantiation = Some(describe());
                return Verdict::ProbablyNonzero { witness: w };
            }
            Verdict::ProbablyNonzero { mut witness } => {
                witness.instantiation = Some(describe());
                return Verdict::ProbablyNonzero { witness };
            }
        }
    }
    if good == 0 {
        Verdict::Indeterminate
    } else {
        Verdict::ProbablyZero { samples: good }
    }
}

/// Treats opaque applications as independent indeterminates; sound for
/// every instantiation when the result is zero.
pub fn formal_is_zero(e: &Expr) -> bool {
    try_canonicalize(e).map(|c| c.is_zero_literal()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::{parse, parse_with, ParseOptions};

    #[test]
    fn rational_verdicts() {
        assert_eq!(is_zero(&parse("x*y - y*x").unwrap()), Verdict::ProvablyZero);
        let v = is_zero(&parse("x - y").unwrap());
        assert!(matches!(v, Verdict::ProvablyNonzero { witness: Some(_) }));
    }

    #[test]
    fn transcendental_verdicts() {
        let e = Expr::sin(Expr::sym("x")).powi(2) + Expr::cos(Expr::sym("x")).powi(2) - Expr::one();
        assert_eq!(is_zero(&e), Verdict::ProbablyZero { samples: 32 });
        let f = Expr::exp(Expr::sym("x")) - Expr::one() - Expr::sym("x");
        assert!(matches!(is_zero(&f), Verdict::ProbablyNonzero { .. }));
    }

    #[test]
    fn opaque_verdicts() {
        let mut o = ParseOptions::default();
        o.opaque.insert("f".into());
        o.raw = true;
        let e = parse_with("f(x)*f'(x)", &o).unwrap().diff("x");
        let expected = parse_with("f'(x)^2 + f(x)*f''(x)", &o).unwrap();
        assert!(is_zero(&(e.clone() - expected.clone())).is_zero());
        assert!(formal_is_zero(&(e - expected)));
        let bad = parse_with("f'(x) - f(x)", &o).unwrap();
        assert!(is_zero(&bad).is_nonzero());
    }
}
