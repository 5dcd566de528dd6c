//! Splitting `b_1 E_1 + ... + b_m E_m` (compact `E_i`) into discrete pieces.
//!
//! With `X = sum F_i` and `F_i = b_i E_i` closed, the accumulation points of
//! `X` are `union_i X'_i` where `X'_i` replaces `F_i` by its derived set.
//! Each `X'_i` is again a sum of compact sets of lower total rank, so it is
//! decomposed recursively, and what is left over is a set of isolated
//! points. The leftover is the sum of the isolated parts of the factors when
//! that sum avoids `acc(X)`; otherwise (representations collide, e.g.
//! `2^-j + 2^-k = 2^-(m)`) it is kept as `iso(X)`.

use crate::algebra::kbound::{kbound, RankVector};
use crate::error::{Error, Result};
use crate::expr::SetExpr;
use crate::normalize::normalize;
use crate::rat::Rat;
use crate::topology::{
    acc_normalized, intersects_normalized, is_closed_normalized, is_discrete_normalized,
    iso_points_normalized, rank,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    /// Factors replaced by their derived sets on the way down, 1-based and
    /// in order. Empty for the top-level isolated piece.
    pub path: Vec<usize>,
    pub set: SetExpr,
    pub discrete: bool,
}

impl Piece {
    /// `Y` for the top level, `X'1.Y`, `X'1.X'2.Y`, ... below it.
    pub fn label(&self) -> String {
        let mut s: String = self.path.iter().map(|i| format!("X'{i}.")).collect();
        s.push('Y');
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionPlan {
    pub coeffs: Vec<Rat>,
    /// `b_i E_i`, normalized.
    pub factors: Vec<SetExpr>,
    pub image: SetExpr,
    pub ranks: Vec<usize>,
    pub k: u64,
    pub pieces: Vec<Piece>,
}

impl DecompositionPlan {
    pub fn all_discrete(&self) -> bool {
        self.pieces.iter().all(|p| p.discrete)
    }
}

pub fn linear_image_decompose(e: &[SetExpr], b: &[Rat]) -> Result<DecompositionPlan> {
    if e.is_empty() || e.len() != b.len() {
        return Err(Error::Validation(format!(
            "need as many coefficients as sets (got {} and {})",
            b.len(),
            e.len()
        )));
    }
    let mut factors = Vec::with_capacity(e.len());
    let mut ranks = Vec::with_capacity(e.len());
    for (i, (ei, bi)) in e.iter().zip(b).enumerate() {
        if bi.is_zero() {
            return Err(Error::Validation(format!("coefficient #{} is zero", i + 1)));
        }
        let n = normalize(ei)?;
        if !n.is_bounded() || !is_closed_normalized(&n)? {
            return Err(Error::Precondition(format!(
                "set #{} is not compact; use tail_combine for a compact-plus-tail sum",
                i + 1
            )));
        }
        ranks.push(rank(&n)?);
        factors.push(normalize(&SetExpr::affine(n, bi.clone(), Rat::zero())?)?);
    }
    let k = kbound(&RankVector::from_ranks(&ranks)?)?;
    let mut pieces = Vec::new();
    split(&factors, &mut Vec::new(), &mut pieces)?;
    Ok(DecompositionPlan {
        coeffs: b.to_vec(),
        image: sum(&factors)?,
        factors,
        ranks,
        k,
        pieces,
    })
}

fn sum(fs: &[SetExpr]) -> Result<SetExpr> {
    if fs.len() == 1 {
        Ok(fs[0].clone())
    } else {
        normalize(&SetExpr::MSum(fs.to_vec()))
    }
}

fn split(fs: &[SetExpr], path: &mut Vec<usize>, out: &mut Vec<Piece>) -> Result<()> {
    let x = sum(fs)?;
    let accs: Vec<Option<SetExpr>> = fs.iter().map(acc_normalized).collect::<Result<_>>()?;
    let y = match acc_normalized(&x)? {
        None => x.clone(),
        Some(acc_x) => {
            let isos: Vec<SetExpr> = fs
                .iter()
                .map(iso_points_normalized)
                .collect::<Result<_>>()?;
            if isos.iter().any(|i| matches!(i, SetExpr::Iso(_))) {
                SetExpr::iso(x.clone())
            } else {
                let yp = sum(&isos)?;
                if intersects_normalized(&yp, &acc_x)? {
                    SetExpr::iso(x.clone())
                } else {
                    yp
                }
            }
        }
    };
    let discrete = is_discrete_normalized(&y)?;
    out.push(Piece {
        path: path.clone(),
        set: y,
        discrete,
    });
    for (i, a) in accs.iter().enumerate() {
        let Some(a) = a else { continue };
        let mut next = fs.to_vec();
        next[i] = a.clone();
        path.push(i + 1);
        split(&next, path, out)?;
        path.pop();
    }
    Ok(())
}
