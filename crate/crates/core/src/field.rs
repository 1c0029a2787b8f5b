//! Exact scalar fields: the rationals and prime fields `F_p` with `p < 2^31`.
//!
//! A [`Field`] is a context object; elements are plain values and every
//! operation goes through the context. This keeps `F_p` elements at 32 bits
//! while letting the same generic linear algebra run over `Q`.

use std::fmt::Debug;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Default prime for probabilistic paths.
pub const DEFAULT_PRIME: u32 = 10007;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FieldDesc {
    Q,
    Fp { p: u32 },
}

impl std::fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldDesc::Q => write!(f, "Q"),
            FieldDesc::Fp { p } => write!(f, "F_{p}"),
        }
    }
}

pub trait Field: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn desc(&self) -> FieldDesc;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_rational(&self, q: &BigRational) -> Result<Self::Elem>;
    fn to_rational(&self, a: &Self::Elem) -> BigRational;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// Distinct roots in the field of the univariate polynomial with
    /// coefficients `poly[i]` of `x^i`. `None` when the search is not
    /// attempted (coefficients too large for rational root enumeration).
    fn roots(&self, poly: &[Self::Elem]) -> Option<Vec<Self::Elem>>;

    fn rank(&self, m: &Matrix<Self>) -> usize
    where
        Self: Sized,
    {
        m.rank_gauss()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b).expect("division by zero"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn desc(&self) -> FieldDesc {
        FieldDesc::Q
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }
    fn from_rational(&self, q: &BigRational) -> Result<BigRational> {
        Ok(q.clone())
    }
    fn to_rational(&self, a: &BigRational) -> BigRational {
        a.clone()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_one(&self, a: &BigRational) -> bool {
        a.is_one()
    }

    fn roots(&self, poly: &[BigRational]) -> Option<Vec<BigRational>> {
        rational_roots(poly)
    }

    fn rank(&self, m: &Matrix<Self>) -> usize {
        crate::matrix::rational_rank(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= (1 << 31) || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn reduce_int(&self, v: &BigInt) -> u32 {
        let r = v.mod_floor(&BigInt::from(self.p));
        r.to_u32().unwrap()
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let p = self.p as u64;
        let mut base = a as u64 % p;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc as u32
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn desc(&self) -> FieldDesc {
        FieldDesc::Fp { p: self.p }
    }
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }
    fn from_rational(&self, q: &BigRational) -> Result<u32> {
        let den = self.reduce_int(q.denom());
        if den == 0 {
            return Err(Error::BadReduction { p: self.p });
        }
        let num = self.reduce_int(q.numer());
        Ok(self.mul(&num, &self.inv(&den).unwrap()))
    }
    fn to_rational(&self, a: &u32) -> BigRational {
        BigRational::from_integer((*a).into())
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + *b as u64;
        (s % self.p as u64) as u32
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + self.p as u64 - *b as u64;
        (s % self.p as u64) as u32
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        (*a != 0).then(|| self.pow(*a, self.p as u64 - 2))
    }

    fn roots(&self, poly: &[u32]) -> Option<Vec<u32>> {
        Some(crate::forms::fp_roots(self, poly))
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes just below 2^31, in decreasing order. Used by the multimodular rank.
pub(crate) fn large_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::new();
        let mut c: u64 = (1 << 31) - 1;
        while out.len() < 96 {
            if is_prime(c) {
                out.push(c as u32);
            }
            c -= 2;
        }
        out
    })
}

/// Parse `"p"` or `"p/q"` into lowest terms.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (
            a.trim().parse::<BigInt>().ok()?,
            b.trim().parse::<BigInt>().ok()?,
        ),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

const ROOT_SEARCH_LIMIT: u64 = 1 << 40;

/// Rational roots by the rational root theorem on the integer-cleared,
/// content-free polynomial. Gives up (returns `None`) when the extreme
/// nonzero coefficients are too large to factor by trial division.
fn rational_roots(poly: &[BigRational]) -> Option<Vec<BigRational>> {
    let mut coeffs: Vec<BigRational> = poly.to_vec();
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    if coeffs.len() <= 1 {
        return Some(Vec::new());
    }
    let mut roots = Vec::new();
    let lead_zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
    if lead_zeros > 0 {
        roots.push(BigRational::zero());
        coeffs.drain(..lead_zeros);
    }
    if coeffs.len() <= 1 {
        return Some(roots);
    }
    let lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * &lcm).to_integer()).collect();
    let a0 = ints[0].abs().to_u64().filter(|v| *v <= ROOT_SEARCH_LIMIT)?;
    let an = ints
        .last()
        .unwrap()
        .abs()
        .to_u64()
        .filter(|v| *v <= ROOT_SEARCH_LIMIT)?;
    let eval = |r: &BigRational| -> bool {
        let mut acc = BigRational::zero();
        for c in coeffs.iter().rev() {
            acc = acc * r + c;
        }
        acc.is_zero()
    };
    for p in divisors(a0) {
        for q in divisors(an) {
            for sign in [1i64, -1] {
                let r = BigRational::new(BigInt::from(p) * sign, BigInt::from(q));
                if !roots.contains(&r) && eval(&r) {
                    roots.push(r);
                }
            }
        }
    }
    Some(roots)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::new(10007).unwrap();
        for a in 1..200u32 {
            assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
        }
        assert!(PrimeField::new(10005).is_err());
    }

    #[test]
    fn bad_reduction() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.from_rational(&q(1, 7)), Err(Error::BadReduction { p: 7 }));
        assert_eq!(f.from_rational(&q(3, 2)).unwrap(), 5);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/-4").unwrap(), q(-3, 2));
        assert_eq!(format_rational(&q(-3, 2)), "-3/2");
        assert_eq!(format_rational(&q(4, 2)), "2");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn rational_roots_found() {
        // (2x - 1)(x + 3) x = 2x^3 + 5x^2 - 3x
        let poly = [q(0, 1), q(-3, 1), q(5, 1), q(2, 1)];
        let mut r = rational_roots(&poly).unwrap();
        r.sort();
        assert_eq!(r, vec![q(-3, 1), q(0, 1), q(1, 2)]);
        // x^2 - 2 has none
        assert!(rational_roots(&[q(-2, 1), q(0, 1), q(1, 1)])
            .unwrap()
            .is_empty());
    }

    #[test]
    fn large_primes_are_prime() {
        let ps = large_primes();
        assert_eq!(ps[0], 2147483647);
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
    }
}
