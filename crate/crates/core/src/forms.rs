//! Homogeneous binary forms in `(a, b)` and the univariate polynomial
//! arithmetic behind their gcd.
//!
//! A form of degree `d` stores `d + 1` coefficients, index `i` holding the
//! coefficient of `a^i b^(d-i)`. The zero form is the empty coefficient list
//! and has no degree. Because both variables are kept, the point `(1:0)` at
//! infinity needs no special casing: it is a root exactly when the top
//! coefficient vanishes.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryForm<E> {
    coeffs: Vec<E>,
}

impl<E: Clone + PartialEq> BinaryForm<E> {
    pub fn zero() -> Self {
        BinaryForm { coeffs: Vec::new() }
    }

    /// Build from coefficients; an all-zero list collapses to the zero form.
    pub fn from_coeffs<K: Field<Elem = E>>(f: &K, coeffs: Vec<E>) -> Self {
        if coeffs.iter().all(|c| f.is_zero(c)) {
            Self::zero()
        } else {
            BinaryForm { coeffs }
        }
    }

    pub fn constant<K: Field<Elem = E>>(f: &K, c: E) -> Self {
        Self::from_coeffs(f, vec![c])
    }

    /// `coef_b * b + coef_a * a`
    pub fn linear<K: Field<Elem = E>>(f: &K, coef_b: E, coef_a: E) -> Self {
        Self::from_coeffs(f, vec![coef_b, coef_a])
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add<K: Field<Elem = E>>(&self, other: &Self, f: &K) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(
            self.coeffs.len(),
            other.coeffs.len(),
            "adding forms of different degree"
        );
        let c = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| f.add(x, y))
            .collect();
        Self::from_coeffs(f, c)
    }

    pub fn neg<K: Field<Elem = E>>(&self, f: &K) -> Self {
        BinaryForm {
            coeffs: self.coeffs.iter().map(|x| f.neg(x)).collect(),
        }
    }

    pub fn mul<K: Field<Elem = E>>(&self, other: &Self, f: &K) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut c = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                c[i + j] = f.add(&c[i + j], &f.mul(x, y));
            }
        }
        Self::from_coeffs(f, c)
    }

    pub fn eval<K: Field<Elem = E>>(&self, a: &E, b: &E, f: &K) -> E {
        let d = match self.degree() {
            None => return f.zero(),
            Some(d) => d,
        };
        let mut acc = f.zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            let mut t = c.clone();
            for _ in 0..i {
                t = f.mul(&t, a);
            }
            for _ in 0..d - i {
                t = f.mul(&t, b);
            }
            acc = f.add(&acc, &t);
        }
        acc
    }

    /// Multiplicity of the root at infinity `(1:0)`, i.e. the power of `b`
    /// dividing the form.
    pub fn infinity_multiplicity<K: Field<Elem = E>>(&self, f: &K) -> usize {
        match self.coeffs.iter().rposition(|c| !f.is_zero(c)) {
            Some(top) => self.coeffs.len() - 1 - top,
            None => 0,
        }
    }

    /// `f(a, 1)` as a trimmed univariate polynomial in `a`.
    pub fn dehomogenize<K: Field<Elem = E>>(&self, f: &K) -> Vec<E> {
        let mut p = self.coeffs.clone();
        trim(f, &mut p);
        p
    }

    pub fn homogenize<K: Field<Elem = E>>(f: &K, poly: &[E], infinity: usize) -> Self {
        let mut c = poly.to_vec();
        trim(f, &mut c);
        if c.is_empty() {
            return Self::zero();
        }
        c.extend(std::iter::repeat(f.zero()).take(infinity));
        BinaryForm { coeffs: c }
    }

    /// Points `(a:b)` of the projective line over the field where the form
    /// vanishes, normalized to `(r:1)` or `(1:0)`. `None` if the root search
    /// was not attempted.
    pub fn roots<K: Field<Elem = E>>(&self, f: &K) -> Option<Vec<(E, E)>> {
        if self.is_zero() {
            return None;
        }
        let mut pts = Vec::new();
        if self.infinity_multiplicity(f) > 0 {
            pts.push((f.one(), f.zero()));
        }
        for r in f.roots(&self.dehomogenize(f))? {
            pts.push((r, f.one()));
        }
        Some(pts)
    }
}

pub(crate) fn trim<K: Field>(f: &K, p: &mut Vec<K::Elem>) {
    while p.last().is_some_and(|c| f.is_zero(c)) {
        p.pop();
    }
}

fn monic<K: Field>(f: &K, p: &[K::Elem]) -> Vec<K::Elem> {
    match p.last() {
        None => Vec::new(),
        Some(lc) => {
            let inv = f.inv(lc).unwrap();
            p.iter().map(|c| f.mul(c, &inv)).collect()
        }
    }
}

pub(crate) fn upoly_rem<K: Field>(f: &K, a: &[K::Elem], b: &[K::Elem]) -> Vec<K::Elem> {
    let mut r = a.to_vec();
    trim(f, &mut r);
    let db = b.len() - 1;
    let inv = f.inv(&b[db]).expect("division by zero polynomial");
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let q = f.mul(r.last().unwrap(), &inv);
        for (i, c) in b.iter().enumerate() {
            r[shift + i] = f.sub(&r[shift + i], &f.mul(&q, c));
        }
        r.pop();
        trim(f, &mut r);
    }
    r
}

/// Monic gcd of two univariate polynomials (either may be zero).
pub(crate) fn upoly_gcd<K: Field>(f: &K, a: &[K::Elem], b: &[K::Elem]) -> Vec<K::Elem> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(f, &mut x);
    trim(f, &mut y);
    while !y.is_empty() {
        let r = upoly_rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, &x)
}

fn upoly_mulmod<K: Field>(f: &K, a: &[K::Elem], b: &[K::Elem], m: &[K::Elem]) -> Vec<K::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] = f.add(&c[i + j], &f.mul(x, y));
        }
    }
    upoly_rem(f, &c, m)
}

fn upoly_powmod<K: Field>(f: &K, base: &[K::Elem], mut e: u64, m: &[K::Elem]) -> Vec<K::Elem> {
    let mut acc = upoly_rem(f, &[f.one()], m);
    let mut b = upoly_rem(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = upoly_mulmod(f, &acc, &b, m);
        }
        b = upoly_mulmod(f, &b, &b, m);
        e >>= 1;
    }
    acc
}

pub fn upoly_eval<K: Field>(f: &K, p: &[K::Elem], x: &K::Elem) -> K::Elem {
    p.iter()
        .rev()
        .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
}

/// Distinct roots in `F_p` of a univariate polynomial: `gcd(poly, x^p - x)`
/// isolates the linear factors, which are then split by random translates
/// (Cantor-Zassenhaus for degree one) with a deterministic translate sequence.
pub fn fp_roots(f: &crate::field::PrimeField, poly: &[u32]) -> Vec<u32> {
    let mut p = poly.to_vec();
    trim(f, &mut p);
    if p.len() <= 1 {
        return Vec::new();
    }
    let modulus = f.modulus() as u64;
    let x = vec![0, 1];
    let mut xp = upoly_powmod(f, &x, modulus, &p);
    // xp - x
    while xp.len() < 2 {
        xp.push(0);
    }
    xp[1] = f.sub(&xp[1], &1);
    trim(f, &mut xp);
    let h = upoly_gcd(f, &p, &xp);
    let mut roots = Vec::new();
    split_linear(f, &h, &mut roots, 1);
    roots.sort_unstable();
    roots
}

fn split_linear(f: &crate::field::PrimeField, h: &[u32], out: &mut Vec<u32>, mut shift: u32) {
    match h.len() {
        0 | 1 => {}
        2 => out.push(f.neg(&f.div(&h[0], &h[1]))),
        _ => {
            let p = f.modulus();
            if p == 2 {
                for r in 0..2u32 {
                    if upoly_eval(f, h, &r) == 0 {
                        out.push(r);
                    }
                }
                return;
            }
            loop {
                let base = vec![shift % p, 1];
                shift = shift.wrapping_add(1);
                let mut w = upoly_powmod(f, &base, (p as u64 - 1) / 2, h);
                if w.is_empty() {
                    w.push(0);
                }
                w[0] = f.sub(&w[0], &1);
                trim(f, &mut w);
                let g = upoly_gcd(f, h, &w);
                if g.len() > 1 && g.len() < h.len() {
                    let q = upoly_div_exact(f, h, &g);
                    split_linear(f, &g, out, shift);
                    split_linear(f, &q, out, shift);
                    return;
                }
            }
        }
    }
}

fn upoly_div_exact<K: Field>(f: &K, a: &[K::Elem], b: &[K::Elem]) -> Vec<K::Elem> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = f.inv(&b[db]).unwrap();
    let mut q = vec![f.zero(); a.len() - db];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = f.mul(r.last().unwrap(), &inv);
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = f.sub(&r[shift + i], &f.mul(&c, bc));
        }
        q[shift] = c;
        r.pop();
    }
    q
}

/// Monic gcd of binary forms: gcd of the dehomogenizations times the
/// smallest power of `b` among the inputs. Zero forms are ignored.
pub fn gcd_of_forms<K: Field>(f: &K, forms: &[BinaryForm<K::Elem>]) -> Result<BinaryForm<K::Elem>> {
    let nonzero: Vec<&BinaryForm<K::Elem>> = forms.iter().filter(|g| !g.is_zero()).collect();
    if nonzero.is_empty() {
        return Err(Error::ZeroIdeal);
    }
    let mut g: Vec<K::Elem> = Vec::new();
    let mut inf = usize::MAX;
    for form in &nonzero {
        g = upoly_gcd(f, &g, &form.dehomogenize(f));
        inf = inf.min(form.infinity_multiplicity(f));
        if g.len() == 1 && inf == 0 {
            break;
        }
    }
    let out = BinaryForm::homogenize(f, &g, inf);
    debug_assert!(nonzero.iter().all(|h| divides(f, &out, h)));
    Ok(out)
}

/// Whether `g` divides `h` as binary forms.
pub fn divides<K: Field>(f: &K, g: &BinaryForm<K::Elem>, h: &BinaryForm<K::Elem>) -> bool {
    if h.is_zero() {
        return true;
    }
    if g.is_zero() {
        return false;
    }
    g.infinity_multiplicity(f) <= h.infinity_multiplicity(f)
        && upoly_rem(f, &h.dehomogenize(f), &g.dehomogenize(f)).is_empty()
}

fn combinations(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    fn rec(start: usize, n: usize, k: usize, mask: u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(mask);
            return;
        }
        for i in start..=n - k {
            rec(i + 1, n, k - 1, mask | (1 << i), out);
        }
    }
    if k <= n {
        rec(0, n, k, 0, &mut out);
    }
    out
}

/// All `j x j` minors for `j = 1..=max_k`, level by level. Level `j` is
/// ordered by row subset then column subset (both lexicographic), and each
/// minor is expanded along its last row using the memoized level `j - 1`.
pub fn minor_levels<K: Field>(
    f: &K,
    entries: &[Vec<BinaryForm<K::Elem>>],
    max_k: usize,
) -> Vec<Vec<BinaryForm<K::Elem>>> {
    let rows = entries.len();
    let cols = entries.first().map_or(0, Vec::len);
    assert!(rows <= 64 && cols <= 64);
    let max_k = max_k.min(rows).min(cols);
    let mut prev: HashMap<(u64, u64), BinaryForm<K::Elem>> = HashMap::new();
    prev.insert((0, 0), BinaryForm::constant(f, f.one()));
    let mut levels = Vec::with_capacity(max_k);
    for j in 1..=max_k {
        let row_sets = combinations(rows, j);
        let col_sets = combinations(cols, j);
        let mut cur = HashMap::with_capacity(row_sets.len() * col_sets.len());
        let mut list = Vec::with_capacity(row_sets.len() * col_sets.len());
        for &rs in &row_sets {
            let last = 63 - rs.leading_zeros() as usize;
            let rest = rs & !(1 << last);
            for &cs in &col_sets {
                let mut acc = BinaryForm::zero();
                let mut pos = 0usize;
                for c in 0..cols {
                    if cs & (1 << c) == 0 {
                        continue;
                    }
                    let entry = &entries[last][c];
                    if !entry.is_zero() {
                        let sub = &prev[&(rest, cs & !(1 << c))];
                        if !sub.is_zero() {
                            let mut term = entry.mul(sub, f);
                            if (j - 1 + pos) % 2 == 1 {
                                term = term.neg(f);
                            }
                            acc = acc.add(&term, f);
                        }
                    }
                    pos += 1;
                }
                list.push(acc.clone());
                cur.insert((rs, cs), acc);
            }
        }
        levels.push(list);
        prev = cur;
    }
    levels
}

/// All `k x k` minors; `k = 0` gives the single constant form `1`.
pub fn minors<K: Field>(
    f: &K,
    entries: &[Vec<BinaryForm<K::Elem>>],
    k: usize,
) -> Vec<BinaryForm<K::Elem>> {
    if k == 0 {
        return vec![BinaryForm::constant(f, f.one())];
    }
    let rows = entries.len();
    let cols = entries.first().map_or(0, Vec::len);
    assert!(k <= rows.min(cols), "minor size exceeds matrix");
    minor_levels(f, entries, k).pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use num_rational::BigRational;

    type F = BinaryForm<BigRational>;

    fn form(c: &[i64]) -> F {
        let q = Rationals;
        F::from_coeffs(&q, c.iter().map(|&x| q.from_i64(x)).collect())
    }
    // a = coefficient index 1 of a degree-1 form; b = index 0
    fn a() -> F {
        form(&[0, 1])
    }
    fn b() -> F {
        form(&[1, 0])
    }

    #[test]
    fn gcd_examples() {
        let q = Rationals;
        let a2 = a().mul(&a(), &q);
        let ab = a().mul(&b(), &q);
        assert_eq!(gcd_of_forms(&q, &[a2, ab]).unwrap(), a());
        assert_eq!(gcd_of_forms(&q, &[a(), b()]).unwrap(), form(&[1]));
        assert_eq!(gcd_of_forms(&q, &[F::zero()]), Err(Error::ZeroIdeal));
        // gcd(b^2, a b) = b: root at infinity tracked through the b-power
        let b2 = b().mul(&b(), &q);
        assert_eq!(gcd_of_forms(&q, &[b2, a().mul(&b(), &q)]).unwrap(), b());
    }

    #[test]
    fn minor_examples() {
        let q = Rationals;
        assert_eq!(minors(&q, &[vec![a()]], 1), vec![a()]);
        let diag = vec![vec![a(), F::zero()], vec![F::zero(), b()]];
        assert_eq!(minors(&q, &diag, 2), vec![a().mul(&b(), &q)]);
        assert_eq!(minors(&q, &diag, 0), vec![form(&[1])]);
    }

    #[test]
    fn determinant_sign() {
        // [[a, b], [b, a]] has det a^2 - b^2
        let q = Rationals;
        let m = vec![vec![a(), b()], vec![b(), a()]];
        assert_eq!(minors(&q, &m, 2), vec![form(&[-1, 0, 1])]);
    }

    #[test]
    fn roots_include_infinity() {
        let q = Rationals;
        // b * (a - 2b) = a b - 2 b^2 : roots (1:0) and (2:1)
        let g = form(&[-2, 1, 0]);
        let r = g.roots(&q).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.contains(&(q.one(), q.zero())));
        assert!(r.contains(&(q.from_i64(2), q.one())));
    }

    #[test]
    fn fp_root_finding() {
        let f = PrimeField::new(10007).unwrap();
        // (x-3)(x-5)(x^2+1): x^2+1 irreducible mod 10007 since 10007 = 3 mod 4
        let poly = [15u32, 10007 - 8, 16, 10007 - 8, 1];
        assert_eq!(fp_roots(&f, &poly), vec![3, 5]);
        let f7 = PrimeField::new(7).unwrap();
        // x^7 - x splits completely
        let mut p = vec![0u32; 8];
        p[1] = 6;
        p[7] = 1;
        assert_eq!(fp_roots(&f7, &p), (0..7).collect::<Vec<_>>());
    }
}
