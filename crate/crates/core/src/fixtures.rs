//! Named example maps.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::FieldDesc;
use crate::model::{Dimensions, KroneckerMap};

/// Fixture families and their id patterns.
pub const FAMILIES: [(&str, &str); 4] = [
    ("remark-s3", "n = m = 3 map with a line as degeneracy locus"),
    (
        "k3-counterexample",
        "3 x 5 map on P^2, stable with codimension-1 degeneracy",
    ),
    (
        "schwarzenberger-N-M",
        "band matrix of x_0..x_N in two shifted rows, rank M",
    ),
    ("boundary-N-M", "normal form with codim D = (M+1)/2, M odd"),
];

pub fn remark_s3() -> KroneckerMap {
    KroneckerMap::from_variables(
        3,
        &[
            vec![None, None, Some(0), Some(1), Some(2)],
            vec![Some(0), Some(1), None, None, Some(3)],
        ],
    )
    .expect("valid fixture")
}

pub fn k3_counterexample() -> KroneckerMap {
    KroneckerMap::from_variables(
        2,
        &[
            vec![Some(1), Some(0), None, None, None],
            vec![None, Some(2), Some(1), Some(0), None],
            vec![None, None, None, Some(2), Some(1)],
        ],
    )
    .expect("valid fixture")
}

fn parse_pair(rest: &str) -> Option<(usize, usize)> {
    let (n, m) = rest.split_once('-')?;
    Some((n.parse().ok()?, m.parse().ok()?))
}

pub fn fixture(id: &str) -> Result<KroneckerMap> {
    match id {
        "remark-s3" => return Ok(remark_s3()),
        "k3-counterexample" => return Ok(k3_counterexample()),
        _ => {}
    }
    if let Some((n, m)) = id.strip_prefix("schwarzenberger-").and_then(parse_pair) {
        return KroneckerMap::schwarzenberger(n, m);
    }
    if let Some((n, m)) = id.strip_prefix("boundary-").and_then(parse_pair) {
        return KroneckerMap::boundary_normal_form(n, m);
    }
    Err(Error::UnknownFixture(id.to_string()))
}

/// The block shape `(0 A0; A1 A2)`: row 0 vanishes on the first `m + 2 - s`
/// columns and carries `s` random forms after that, row 1 is random. The
/// columns where row 0 vanishes all land in `e_1 (x) V`, so the map is
/// unstable once `m + 2 - s > (m + 2) / 2`. Seeds that give a
/// non-injective map are skipped deterministically.
pub fn destabilized_block(n: usize, m: usize, s: usize, seed: u64) -> Result<KroneckerMap> {
    let dims = Dimensions::new(n, m, 2)?;
    if s == 0 || s > m + 1 {
        return Err(Error::Dimensions(format!(
            "block width s = {s} must lie in 1..={}",
            m + 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let form = |rng: &mut ChaCha8Rng| -> Vec<BigRational> {
        loop {
            let v: Vec<BigRational> = (0..=n)
                .map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(-3i64..=3))))
                .collect();
            if v.iter().any(|c| !c.is_zero()) {
                return v;
            }
        }
    };
    for _ in 0..1000 {
        let zero = vec![BigRational::zero(); n + 1];
        let row0: Vec<Vec<BigRational>> = (0..m + 2)
            .map(|j| {
                if j < m + 2 - s {
                    zero.clone()
                } else {
                    form(&mut rng)
                }
            })
            .collect();
        let row1: Vec<Vec<BigRational>> = (0..m + 2).map(|_| form(&mut rng)).collect();
        let a = KroneckerMap::new(dims, FieldDesc::Q, vec![row0, row1])?;
        if a.is_injective()? {
            return Ok(a);
        }
    }
    Err(Error::Precondition("no injective block map found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_resolve() {
        assert_eq!(
            fixture("remark-s3").unwrap().dims(),
            Dimensions { n: 3, m: 3, k: 2 }
        );
        assert_eq!(
            fixture("k3-counterexample").unwrap().dims(),
            Dimensions { n: 2, m: 2, k: 3 }
        );
        assert_eq!(
            fixture("schwarzenberger-4-3").unwrap().dims(),
            Dimensions { n: 4, m: 3, k: 2 }
        );
        assert_eq!(
            fixture("boundary-5-5").unwrap().dims(),
            Dimensions { n: 5, m: 5, k: 2 }
        );
        assert!(matches!(fixture("nope"), Err(Error::UnknownFixture(_))));
        assert!(fixture("boundary-3-4").is_err());
    }

    #[test]
    fn block_shape() {
        let a = destabilized_block(3, 3, 2, 0).unwrap();
        for j in 0..3 {
            assert!((0..4).all(|l| a.coeff(0, j, l).is_zero()));
        }
        assert!(a.is_injective().unwrap());
    }
}
