//! Canonical forms.
//!
//! Normal form has no `Affine` nodes, no nested unions or sums, at most one
//! `Fin` per union or sum, and children sorted by the derived order. Inside a
//! sum every geometric child has its limit moved into the constant part; a
//! single nonzero constant is then pushed back into the first geometric (or
//! tail) child so that translates of the same sum share one form.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::expr::{Geom, SetExpr};
use crate::rat::Rat;
use crate::topology;

/// Pushes `scale * e + offset` down to the leaves.
pub(crate) fn fold_affine(e: &SetExpr, scale: &Rat, offset: &Rat) -> SetExpr {
    match e {
        SetExpr::Fin(ps) => {
            let mut out: Vec<Rat> = ps.iter().map(|p| scale * p + offset).collect();
            out.sort();
            SetExpr::Fin(out)
        }
        SetExpr::Geom(g) => SetExpr::Geom(g.affine(scale, offset)),
        SetExpr::Tail(t) => SetExpr::Tail(t.affine(scale, offset)),
        SetExpr::Affine {
            child,
            scale: s,
            offset: o,
        } => fold_affine(child, &(scale * s), &(scale * o + offset)),
        SetExpr::Union(cs) => {
            SetExpr::Union(cs.iter().map(|c| fold_affine(c, scale, offset)).collect())
        }
        SetExpr::MSum(cs) => SetExpr::MSum(
            cs.iter()
                .enumerate()
                .map(|(i, c)| {
                    if i == 0 {
                        fold_affine(c, scale, offset)
                    } else {
                        fold_affine(c, scale, &Rat::zero())
                    }
                })
                .collect(),
        ),
        SetExpr::Iso(c) => SetExpr::Iso(Box::new(fold_affine(c, scale, offset))),
    }
}

/// Semantically equal canonical form. Idempotent.
pub fn normalize(e: &SetExpr) -> Result<SetExpr> {
    canon(fold_affine(e, &Rat::one(), &Rat::zero()))
}

/// Normalizes an optional set.
pub fn normalize_maybe(e: Option<SetExpr>) -> Result<Option<SetExpr>> {
    e.map(|e| normalize(&e)).transpose()
}

fn canon(e: SetExpr) -> Result<SetExpr> {
    match e {
        SetExpr::Fin(_) | SetExpr::Geom(_) | SetExpr::Tail(_) => Ok(e),
        SetExpr::Affine { .. } => canon(fold_affine(&e, &Rat::one(), &Rat::zero())),
        SetExpr::Union(cs) => canon_union(cs),
        SetExpr::MSum(cs) => canon_msum(cs),
        SetExpr::Iso(child) => {
            let child = canon(*child)?;
            if matches!(child, SetExpr::Iso(_)) {
                return Ok(child);
            }
            topology::iso_points_normalized(&child)
        }
    }
}

fn canon_union(children: Vec<SetExpr>) -> Result<SetExpr> {
    let mut flat = Vec::new();
    for c in children {
        match canon(c)? {
            SetExpr::Union(cs) => flat.extend(cs),
            other => flat.push(other),
        }
    }
    let mut points: BTreeSet<Rat> = BTreeSet::new();
    let mut others = Vec::new();
    for c in flat {
        match c {
            SetExpr::Fin(ps) => points.extend(ps),
            other => others.push(other),
        }
    }
    // An open sequence together with its limit is the closed sequence.
    for c in others.iter_mut() {
        if let SetExpr::Geom(g) = c {
            if !g.with_limit && points.remove(&g.limit) {
                g.with_limit = true;
            }
        }
    }
    others.sort();
    others.dedup();
    let closed_twins: Vec<Geom> = others
        .iter()
        .filter_map(|c| match c {
            SetExpr::Geom(g) if g.with_limit => Some(g.clone()),
            _ => None,
        })
        .collect();
    others.retain(|c| match c {
        SetExpr::Geom(g) if !g.with_limit => !closed_twins
            .iter()
            .any(|t| t.limit == g.limit && t.scale == g.scale && t.ratio == g.ratio),
        _ => true,
    });
    // Points already covered by another child are dropped.
    points.retain(|x| {
        !others
            .iter()
            .any(|o| topology::membership_normalized(o, x).unwrap_or(false))
    });
    if !points.is_empty() {
        others.push(SetExpr::Fin(points.into_iter().collect()));
    }
    others.sort();
    match others.len() {
        0 => Err(Error::Validation("empty union".into())),
        1 => Ok(others.pop().unwrap()),
        _ => Ok(SetExpr::Union(others)),
    }
}

fn canon_msum(children: Vec<SetExpr>) -> Result<SetExpr> {
    let mut flat = Vec::new();
    for c in children {
        match canon(c)? {
            SetExpr::MSum(cs) => flat.extend(cs),
            other => flat.push(other),
        }
    }
    let mut points: BTreeSet<Rat> = BTreeSet::from([Rat::zero()]);
    let mut rest = Vec::new();
    for c in flat {
        match c {
            SetExpr::Fin(ps) => {
                points = points
                    .iter()
                    .flat_map(|x| ps.iter().map(move |p| x + p))
                    .collect();
            }
            SetExpr::Geom(mut g) => {
                points = points.iter().map(|x| x + &g.limit).collect();
                g.limit = Rat::zero();
                rest.push(SetExpr::Geom(g));
            }
            SetExpr::Iso(_) => {
                return Err(Error::Validation(
                    "msum children cannot be iso(...) residual sets".into(),
                ))
            }
            other => rest.push(other),
        }
    }
    if rest.is_empty() {
        return Ok(SetExpr::Fin(points.into_iter().collect()));
    }
    rest.sort();
    if points.len() == 1 {
        let t = points.into_iter().next().unwrap();
        if !t.is_zero() {
            let geom = rest.iter().position(|c| matches!(c, SetExpr::Geom(_)));
            let tail = rest.iter().position(|c| matches!(c, SetExpr::Tail(_)));
            match (geom, tail) {
                (Some(i), _) => {
                    if let SetExpr::Geom(g) = &mut rest[i] {
                        g.limit = t;
                    }
                }
                (None, Some(i)) => {
                    if let SetExpr::Tail(tl) = &mut rest[i] {
                        tl.start = &tl.start + &t;
                    }
                }
                (None, None) => rest.push(SetExpr::Fin(vec![t])),
            }
        }
    } else {
        rest.push(SetExpr::Fin(points.into_iter().collect()));
    }
    if rest.len() == 1 {
        return Ok(rest.pop().unwrap());
    }
    rest.sort();
    validate_msum(&rest)?;
    Ok(SetExpr::MSum(rest))
}

/// At most one unbounded child, and that child must be tail-like.
pub(crate) fn validate_msum(children: &[SetExpr]) -> Result<()> {
    if let Some(i) = children.iter().position(SetExpr::contains_iso) {
        return Err(Error::Validation(format!(
            "msum child #{} contains iso(...), which cannot be summed",
            i + 1
        )));
    }
    let unbounded: Vec<usize> = children
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_bounded())
        .map(|(i, _)| i)
        .collect();
    if unbounded.len() > 1 {
        return Err(Error::Validation(format!(
            "msum has {} unbounded children (#{}); at most one is allowed",
            unbounded.len(),
            unbounded
                .iter()
                .map(|i| (i + 1).to_string())
                .collect::<Vec<_>>()
                .join(", #")
        )));
    }
    if let Some(&i) = unbounded.first() {
        if !children[i].is_tail_like() {
            return Err(Error::Validation(format!(
                "msum child #{} is unbounded but not a tail or union of tails",
                i + 1
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Direction;
    use crate::rat::rat;

    fn fin(ps: &[(i64, i64)]) -> SetExpr {
        SetExpr::fin(ps.iter().map(|&(n, d)| rat(n, d))).unwrap()
    }

    fn geom(c: Rat, s: Rat, q: Rat, closed: bool) -> SetExpr {
        SetExpr::geom(c, s, q, closed).unwrap()
    }

    #[test]
    fn affine_of_fin() {
        let e = SetExpr::affine(fin(&[(1, 1), (2, 1)]), Rat::int(2), Rat::one()).unwrap();
        assert_eq!(normalize(&e).unwrap(), fin(&[(3, 1), (5, 1)]));
    }

    #[test]
    fn idempotent_union() {
        let e = SetExpr::union(vec![fin(&[(1, 1)]), fin(&[(1, 1), (2, 1)])]).unwrap();
        assert_eq!(normalize(&e).unwrap(), fin(&[(1, 1), (2, 1)]));
    }

    #[test]
    fn affine_of_geom() {
        let g = geom(Rat::zero(), Rat::one(), rat(1, 2), true);
        let e = SetExpr::affine(g, Rat::int(3), Rat::one()).unwrap();
        assert_eq!(
            normalize(&e).unwrap(),
            geom(Rat::one(), Rat::int(3), rat(1, 2), true)
        );
    }

    #[test]
    fn open_geom_plus_limit_closes() {
        let e = SetExpr::union(vec![
            geom(Rat::zero(), Rat::one(), rat(1, 2), false),
            fin(&[(0, 1), (1, 4), (7, 1)]),
        ])
        .unwrap();
        let n = normalize(&e).unwrap();
        assert_eq!(
            n,
            SetExpr::Union(vec![
                fin(&[(7, 1)]),
                geom(Rat::zero(), Rat::one(), rat(1, 2), true),
            ])
        );
    }

    #[test]
    fn msum_of_finite_sets() {
        let e = SetExpr::msum(vec![fin(&[(0, 1), (1, 1)]), fin(&[(0, 1), (10, 1)])]).unwrap();
        assert_eq!(
            normalize(&e).unwrap(),
            fin(&[(0, 1), (1, 1), (10, 1), (11, 1)])
        );
        let id = SetExpr::msum(vec![
            fin(&[(0, 1)]),
            geom(Rat::zero(), Rat::one(), rat(1, 3), true),
        ])
        .unwrap();
        assert_eq!(
            normalize(&id).unwrap(),
            geom(Rat::zero(), Rat::one(), rat(1, 3), true)
        );
    }

    #[test]
    fn msum_translation_canonical() {
        let a = SetExpr::msum(vec![
            geom(Rat::zero(), Rat::one(), rat(1, 2), true),
            geom(Rat::int(10), Rat::one(), rat(1, 2), true),
        ])
        .unwrap();
        let b = SetExpr::msum(vec![
            geom(Rat::int(10), Rat::one(), rat(1, 2), true),
            geom(Rat::zero(), Rat::one(), rat(1, 2), true),
        ])
        .unwrap();
        let c = SetExpr::msum(vec![
            fin(&[(10, 1)]),
            geom(Rat::zero(), Rat::one(), rat(1, 2), true),
            geom(Rat::zero(), Rat::one(), rat(1, 2), true),
        ])
        .unwrap();
        let na = normalize(&a).unwrap();
        assert_eq!(na, normalize(&b).unwrap());
        assert_eq!(na, normalize(&c).unwrap());
        assert_eq!(normalize(&na).unwrap(), na);
    }

    #[test]
    fn msum_rejects_two_tails() {
        let t = SetExpr::tail(Rat::zero(), Rat::one(), Direction::Up).unwrap();
        let e = SetExpr::msum(vec![t.clone(), t]).unwrap();
        let err = normalize(&e).unwrap_err();
        assert!(err.to_string().contains("unbounded"), "{err}");
        let g = geom(Rat::zero(), Rat::one(), rat(1, 2), true);
        let u = SetExpr::union(vec![
            g.clone(),
            SetExpr::tail(Rat::zero(), Rat::one(), Direction::Up).unwrap(),
        ])
        .unwrap();
        let bad = SetExpr::msum(vec![u, g]).unwrap();
        assert!(normalize(&bad).is_err());
    }

    #[test]
    fn nested_unions_flatten() {
        let e = SetExpr::union(vec![
            SetExpr::union(vec![fin(&[(1, 1)]), fin(&[(3, 1)])]).unwrap(),
            SetExpr::union(vec![fin(&[(2, 1)]), fin(&[(3, 1)])]).unwrap(),
        ])
        .unwrap();
        assert_eq!(normalize(&e).unwrap(), fin(&[(1, 1), (2, 1), (3, 1)]));
    }
}
