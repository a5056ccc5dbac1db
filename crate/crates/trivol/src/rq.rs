//! Small helpers for arbitrary-precision rational arithmetic.

use num::bigint::BigInt;
use num::{BigRational, Integer, One, Zero};

pub fn rz() -> BigRational {
    BigRational::zero()
}

pub fn ri(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rq(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a rational as `p` or `p/q` (canonical form, positive denominator).
pub fn rat_str(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p` or `p/q`.
pub fn parse_rat(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
        Some((p, q)) => {
            let p = p.trim().parse::<BigInt>().ok()?;
            let q = q.trim().parse::<BigInt>().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(BigRational::new(p, q))
            }
        }
    }
}

/// Reduces `r` into `[0, m)` for a positive modulus `m`.
pub fn reduce_mod(r: &BigRational, m: &BigRational) -> BigRational {
    let q = (r / m).floor();
    r - q * m
}

/// True when `r` is an integer multiple of `m`.
pub fn is_multiple_of(r: &BigRational, m: &BigRational) -> bool {
    reduce_mod(r, m).is_zero()
}

/// Least common multiple of the denominators of a list of rationals.
pub fn denom_lcm(vals: &[BigRational]) -> BigInt {
    let mut l = BigInt::one();
    for v in vals {
        l = l.lcm(v.denom());
    }
    l
}

pub fn to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().expect("rational out of f64 range")
}
