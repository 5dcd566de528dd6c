//! Symbolic descriptions of countable subsets of the real line.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }
}

/// `{limit + scale * ratio^k : k >= 0}`, plus `{limit}` when `with_limit`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Geom {
    pub limit: Rat,
    pub scale: Rat,
    pub ratio: Rat,
    pub with_limit: bool,
}

impl Geom {
    pub fn new(limit: Rat, scale: Rat, ratio: Rat, with_limit: bool) -> Result<Geom> {
        if scale.is_zero() {
            return Err(Error::Validation("geom scale must be nonzero".into()));
        }
        if ratio.is_zero() || ratio.abs() >= Rat::one() {
            return Err(Error::Validation(format!(
                "geom ratio out of range: need 0 < |ratio| < 1, got {ratio}"
            )));
        }
        Ok(Geom {
            limit,
            scale,
            ratio,
            with_limit,
        })
    }

    pub fn term(&self, k: u32) -> Rat {
        &self.limit + &self.scale * self.ratio.pow(k as i32)
    }

    /// Index `k` with `term(k) == x`, if any.
    pub fn index_of(&self, x: &Rat) -> Option<u32> {
        let t = (x - &self.limit) / &self.scale;
        if t.is_zero() {
            return None;
        }
        let target = t.abs();
        let mut p = Rat::one();
        let mut k = 0u32;
        while p.abs() >= target {
            if p == t {
                return Some(k);
            }
            p = p * &self.ratio;
            k += 1;
        }
        None
    }

    pub fn contains(&self, x: &Rat) -> bool {
        (self.with_limit && *x == self.limit) || self.index_of(x).is_some()
    }

    pub fn affine(&self, scale: &Rat, offset: &Rat) -> Geom {
        Geom {
            limit: scale * &self.limit + offset,
            scale: scale * &self.scale,
            ratio: self.ratio.clone(),
            with_limit: self.with_limit,
        }
    }

    /// Closed-hull bounds `(min, max)`.
    pub fn hull(&self) -> (Rat, Rat) {
        let first = self.term(0);
        let second = self.term(1);
        let lo = self.limit.clone().min(first.clone()).min(second.clone());
        let hi = self.limit.clone().max(first).max(second);
        (lo, hi)
    }
}

/// `{start + k * step : k >= 0}` (up) or `{start - k * step : k >= 0}` (down).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tail {
    pub start: Rat,
    pub step: Rat,
    pub dir: Direction,
}

impl Tail {
    pub fn new(start: Rat, step: Rat, dir: Direction) -> Result<Tail> {
        if !step.is_positive() {
            return Err(Error::Validation(format!(
                "tail step must be positive, got {step}"
            )));
        }
        Ok(Tail { start, step, dir })
    }

    /// Signed increment per index.
    pub fn signed_step(&self) -> Rat {
        match self.dir {
            Direction::Up => self.step.clone(),
            Direction::Down => -&self.step,
        }
    }

    pub fn term(&self, k: u64) -> Rat {
        &self.start + self.signed_step() * Rat::from(k as i64)
    }

    pub fn contains(&self, x: &Rat) -> bool {
        let q = (x - &self.start) / self.signed_step();
        q.is_integer() && !q.is_negative()
    }

    pub fn affine(&self, scale: &Rat, offset: &Rat) -> Tail {
        Tail {
            start: scale * &self.start + offset,
            step: (scale * &self.step).abs(),
            dir: if scale.is_negative() {
                self.dir.flip()
            } else {
                self.dir
            },
        }
    }

    /// Members of the tail inside the closed interval `[lo, hi]`, ascending.
    pub fn points_between(&self, lo: &Rat, hi: &Rat) -> Vec<Rat> {
        if lo > hi {
            return Vec::new();
        }
        let s = self.signed_step();
        let (a, b) = ((lo - &self.start) / &s, (hi - &self.start) / &s);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let kmin = a.ceil().max(Rat::zero());
        let kmax = b.floor();
        let mut out = Vec::new();
        let mut k = kmin;
        while k <= kmax {
            out.push(&self.start + &s * &k);
            k = k + Rat::one();
        }
        out.sort();
        out
    }
}

/// A symbolic countable subset of the reals.
///
/// The empty set has no `SetExpr` form; operations that can produce it
/// return `Option<SetExpr>` (see [`MaybeSet`]).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SetExpr {
    /// Finite set, strictly increasing and nonempty.
    Fin(Vec<Rat>),
    Geom(Geom),
    Tail(Tail),
    /// `scale * child + offset`.
    Affine {
        child: Box<SetExpr>,
        scale: Rat,
        offset: Rat,
    },
    Union(Vec<SetExpr>),
    /// Minkowski sum `{x_1 + ... + x_m}`.
    MSum(Vec<SetExpr>),
    /// Isolated points of the child: `{x in child : x not an accumulation
    /// point of child}`. Produced when the isolated part has no closed form
    /// in the other constructors.
    Iso(Box<SetExpr>),
}

pub type MaybeSet = Option<SetExpr>;

impl SetExpr {
    pub fn fin<I: IntoIterator<Item = Rat>>(points: I) -> Result<SetExpr> {
        let set: BTreeSet<Rat> = points.into_iter().collect();
        if set.is_empty() {
            return Err(Error::Validation(
                "fin needs at least one point (the empty set has no fin form)".into(),
            ));
        }
        Ok(SetExpr::Fin(set.into_iter().collect()))
    }

    pub fn point(x: Rat) -> SetExpr {
        SetExpr::Fin(vec![x])
    }

    pub fn geom(limit: Rat, scale: Rat, ratio: Rat, with_limit: bool) -> Result<SetExpr> {
        Geom::new(limit, scale, ratio, with_limit).map(SetExpr::Geom)
    }

    pub fn tail(start: Rat, step: Rat, dir: Direction) -> Result<SetExpr> {
        Tail::new(start, step, dir).map(SetExpr::Tail)
    }

    pub fn affine(child: SetExpr, scale: Rat, offset: Rat) -> Result<SetExpr> {
        if scale.is_zero() {
            return Err(Error::Validation("affine scale must be nonzero".into()));
        }
        Ok(SetExpr::Affine {
            child: Box::new(child),
            scale,
            offset,
        })
    }

    pub fn union(children: Vec<SetExpr>) -> Result<SetExpr> {
        if children.len() < 2 {
            return Err(Error::Validation(
                "union needs at least two children".into(),
            ));
        }
        Ok(SetExpr::Union(children))
    }

    pub fn msum(children: Vec<SetExpr>) -> Result<SetExpr> {
        if children.len() < 2 {
            return Err(Error::Validation("msum needs at least two children".into()));
        }
        if let Some(i) = children.iter().position(SetExpr::contains_iso) {
            return Err(Error::Validation(format!(
                "msum child #{} contains iso(...), which cannot be summed",
                i + 1
            )));
        }
        Ok(SetExpr::MSum(children))
    }

    pub fn iso(child: SetExpr) -> SetExpr {
        SetExpr::Iso(Box::new(child))
    }

    pub fn contains_iso(&self) -> bool {
        match self {
            SetExpr::Iso(_) => true,
            SetExpr::Affine { child, .. } => child.contains_iso(),
            SetExpr::Union(cs) | SetExpr::MSum(cs) => cs.iter().any(SetExpr::contains_iso),
            SetExpr::Fin(_) | SetExpr::Geom(_) | SetExpr::Tail(_) => false,
        }
    }

    /// Union of a list that may have any length; `None` when empty.
    pub fn union_of(mut children: Vec<SetExpr>) -> MaybeSet {
        match children.len() {
            0 => None,
            1 => children.pop(),
            _ => Some(SetExpr::Union(children)),
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            SetExpr::Fin(_) | SetExpr::Geom(_) => true,
            SetExpr::Tail(_) => false,
            SetExpr::Affine { child, .. } | SetExpr::Iso(child) => child.is_bounded(),
            SetExpr::Union(cs) | SetExpr::MSum(cs) => cs.iter().all(SetExpr::is_bounded),
        }
    }

    /// `(inf, sup)` of the set (equivalently of its closure). `None` when
    /// unbounded.
    pub fn hull(&self) -> Option<(Rat, Rat)> {
        match self {
            SetExpr::Fin(ps) => Some((ps[0].clone(), ps[ps.len() - 1].clone())),
            SetExpr::Geom(g) => Some(g.hull()),
            SetExpr::Tail(_) => None,
            SetExpr::Affine {
                child,
                scale,
                offset,
            } => {
                let (lo, hi) = child.hull()?;
                let (a, b) = (scale * &lo + offset, scale * &hi + offset);
                Some(if a <= b { (a, b) } else { (b, a) })
            }
            SetExpr::Iso(child) => child.hull(),
            SetExpr::Union(cs) => {
                let mut it = cs.iter().map(SetExpr::hull);
                let first = it.next()??;
                it.try_fold(first, |(lo, hi), h| {
                    let (l, u) = h?;
                    Some((lo.min(l), hi.max(u)))
                })
            }
            SetExpr::MSum(cs) => cs
                .iter()
                .try_fold((Rat::zero(), Rat::zero()), |(lo, hi), c| {
                    let (l, u) = c.hull()?;
                    Some((lo + l, hi + u))
                }),
        }
    }

    /// Structural depth, used for bounding recursion in tests.
    pub fn depth(&self) -> usize {
        match self {
            SetExpr::Fin(_) | SetExpr::Geom(_) | SetExpr::Tail(_) => 1,
            SetExpr::Affine { child, .. } | SetExpr::Iso(child) => 1 + child.depth(),
            SetExpr::Union(cs) | SetExpr::MSum(cs) => {
                1 + cs.iter().map(SetExpr::depth).max().unwrap_or(0)
            }
        }
    }

    /// True when the expression is a tail, or a union whose members are all
    /// tails or finite sets with at least one tail: a closed discrete set
    /// with a positive minimum gap.
    pub fn is_tail_like(&self) -> bool {
        match self {
            SetExpr::Tail(_) => true,
            SetExpr::Union(cs) => {
                cs.iter()
                    .all(|c| matches!(c, SetExpr::Tail(_) | SetExpr::Fin(_)))
                    && cs.iter().any(|c| matches!(c, SetExpr::Tail(_)))
            }
            SetExpr::Affine { child, .. } => child.is_tail_like(),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn geom_rejects_bad_ratio() {
        assert!(SetExpr::geom(Rat::zero(), Rat::one(), rat(3, 2), true).is_err());
        assert!(SetExpr::geom(Rat::zero(), Rat::one(), Rat::one(), true).is_err());
        assert!(SetExpr::geom(Rat::zero(), Rat::one(), Rat::zero(), true).is_err());
        assert!(SetExpr::geom(Rat::zero(), Rat::zero(), rat(1, 2), true).is_err());
        assert!(SetExpr::geom(Rat::zero(), Rat::one(), rat(-1, 2), true).is_ok());
    }

    #[test]
    fn geom_index() {
        let g = Geom::new(Rat::zero(), Rat::one(), rat(1, 2), true).unwrap();
        assert_eq!(g.index_of(&rat(1, 8)), Some(3));
        assert_eq!(g.index_of(&rat(3, 8)), None);
        assert_eq!(g.index_of(&Rat::int(2)), None);
        let alt = Geom::new(Rat::int(1), Rat::int(2), rat(-1, 3), false).unwrap();
        assert_eq!(alt.index_of(&(Rat::int(1) + rat(-2, 3))), Some(1));
        assert!(!alt.contains(&Rat::int(1)));
    }

    #[test]
    fn tail_membership_and_window() {
        let t = Tail::new(Rat::int(5), Rat::int(3), Direction::Up).unwrap();
        assert!(t.contains(&Rat::int(11)));
        assert!(!t.contains(&Rat::int(2)));
        assert_eq!(
            t.points_between(&Rat::int(0), &Rat::int(12)),
            vec![Rat::int(5), Rat::int(8), Rat::int(11)]
        );
        let d = t.affine(&Rat::int(-1), &Rat::zero());
        assert_eq!(d.dir, Direction::Down);
        assert!(d.contains(&Rat::int(-8)));
        assert_eq!(
            d.points_between(&Rat::int(-12), &Rat::int(0)),
            vec![Rat::int(-11), Rat::int(-8), Rat::int(-5)]
        );
    }

    #[test]
    fn fin_sorts_and_rejects_empty() {
        let f = SetExpr::fin([Rat::one(), rat(1, 2), Rat::one()]).unwrap();
        assert_eq!(f, SetExpr::Fin(vec![rat(1, 2), Rat::one()]));
        assert!(SetExpr::fin(Vec::new()).is_err());
    }

    #[test]
    fn hull_of_alternating_geom() {
        let g = Geom::new(Rat::zero(), Rat::one(), rat(-1, 2), true).unwrap();
        assert_eq!(g.hull(), (rat(-1, 2), Rat::one()));
    }
}
