//! Basis enumeration for symmetric and exterior powers and for spaces of
//! homogeneous polynomials.

use std::collections::HashMap;

pub fn binom(n: i64, k: i64) -> u64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim H^0(P^n, O(d)) = binom(n + d, n)`, zero for `d < 0`.
pub fn global_sections_dim(n: usize, d: i64) -> usize {
    if d < 0 {
        0
    } else {
        binom(n as i64 + d, n as i64) as usize
    }
}

/// Exponent vectors of degree `degree` in `nvars` variables, lexicographic
/// with the first exponent descending: `[2,0], [1,1], [0,2]`.
pub fn monomials(nvars: usize, degree: usize) -> Vec<Vec<u32>> {
    fn rec(i: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left as u32;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e as u32;
            rec(i + 1, left - e, cur, out);
        }
    }
    if nvars == 0 {
        return if degree == 0 {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    rec(0, degree, &mut vec![0; nvars], &mut out);
    out
}

/// Monomials of one degree with a reverse index.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    pub monomials: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, degree: i64) -> Self {
        let monomials = if degree < 0 {
            Vec::new()
        } else {
            monomials(nvars, degree as usize)
        };
        let index = monomials
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        MonomialBasis { monomials, index }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, m: &[u32]) -> usize {
        self.index[m]
    }
}

/// `j`-subsets of `0..n` in colex order (compare largest element first).
pub fn subsets_colex(n: usize, j: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, j: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == j {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, j, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if j <= n {
        rec(0, n, j, &mut Vec::new(), &mut out);
    }
    out.sort_by(|x, y| x.iter().rev().cmp(y.iter().rev()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(global_sections_dim(3, 0), 1);
        assert_eq!(global_sections_dim(3, 1), 4);
        assert_eq!(global_sections_dim(3, 2), 10);
        assert_eq!(global_sections_dim(3, -1), 0);
        for n in 1..5 {
            for d in 0..4 {
                assert_eq!(monomials(n + 1, d).len(), global_sections_dim(n, d as i64));
            }
        }
        assert_eq!(monomials(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn colex_order() {
        assert_eq!(
            subsets_colex(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 3],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(subsets_colex(5, 0), vec![Vec::<usize>::new()]);
        assert_eq!(subsets_colex(7, 3).len(), 35);
    }
}
