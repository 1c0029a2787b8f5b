macro_rules! with_field {
    ($desc:expr, |$f:ident| $body:expr) => {
        match $desc {
            $crate::field::FieldDesc::Q => {
                let $f = $crate::field::Rationals;
                $body
            }
            $crate::field::FieldDesc::Fp { p } => {
                let $f = $crate::field::PrimeField::new(p as u64)?;
                $body
            }
        }
    };
}

pub mod census;
pub mod combinatorics;
pub mod degeneracy;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod forms;
pub mod git;
pub mod homology;
pub mod json;
pub mod matrix;
pub mod model;
pub mod report;

pub use error::{Error, Result};
