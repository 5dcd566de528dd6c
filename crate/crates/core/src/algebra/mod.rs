//! Discrete decompositions of linear images of products.

pub mod decompose;
pub mod hypothesis;
pub mod kbound;
pub mod tail_combine;

pub use decompose::{linear_image_decompose, DecompositionPlan, Piece};
pub use hypothesis::{hypothesis_check, HypothesisReport, TrialReport};
pub use kbound::{kbound, RankVector};
pub use tail_combine::{tail_combine, TailCombinePlan, TailFamily};

use crate::error::{Error, Result};
use crate::expr::SetExpr;
use crate::normalize::{normalize, validate_msum};

/// Normalized Minkowski sum. At most one child may be unbounded, and that
/// child must be a tail or a union of tails and points.
pub fn minkowski_sum(children: &[SetExpr]) -> Result<SetExpr> {
    let mut norm = Vec::with_capacity(children.len());
    for (i, c) in children.iter().enumerate() {
        norm.push(
            normalize(c).map_err(|e| Error::Validation(format!("msum child #{}: {e}", i + 1)))?,
        );
    }
    validate_msum(&norm)?;
    match norm.len() {
        0 => Err(Error::Validation("msum of no sets".into())),
        1 => Ok(norm.pop().unwrap()),
        _ => normalize(&SetExpr::MSum(norm)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Direction;
    use crate::rat::{rat, Rat};
    use crate::topology::is_closed;

    #[test]
    fn minkowski_examples() {
        let g = SetExpr::geom(Rat::zero(), Rat::one(), rat(1, 2), true).unwrap();
        let zero = SetExpr::point(Rat::zero());
        assert_eq!(minkowski_sum(&[zero, g.clone()]).unwrap(), g);
        let a = SetExpr::fin([Rat::zero(), Rat::one()]).unwrap();
        let b = SetExpr::fin([Rat::zero(), Rat::int(10)]).unwrap();
        assert_eq!(
            minkowski_sum(&[a, b]).unwrap(),
            SetExpr::fin([0, 1, 10, 11].map(Rat::int)).unwrap()
        );
        let t = SetExpr::tail(Rat::zero(), Rat::int(2), Direction::Up).unwrap();
        let s = minkowski_sum(&[g.clone(), t.clone()]).unwrap();
        assert!(matches!(s, SetExpr::MSum(_)));
        assert!(is_closed(&s).unwrap());
        let err = minkowski_sum(&[t.clone(), g, t]).unwrap_err().to_string();
        assert!(err.contains("#1") && err.contains("#3"), "{err}");
    }
}
