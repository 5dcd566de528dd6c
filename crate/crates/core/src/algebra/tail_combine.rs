//! Sums `Y + Z` of a compact set and a closed discrete set with a positive
//! minimum gap.
//!
//! After shifting `Y` into `[0, N]` with `N` the least integer at least its
//! diameter, pick `M` minimal with `M d > N` (`d` the minimum gap of `Z`).
//! Enumerating `Z` increasingly as `iota`, translates `iota(n) + Y` whose
//! indices agree mod `M` are strictly ordered, so each family
//! `W_i = union_k (iota(Mk + i) + Y)` inherits discreteness from the
//! layers of `Y`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::expr::{Direction, SetExpr, Tail};
use crate::normalize::normalize;
use crate::rat::Rat;
use crate::topology::{derivative_chain, is_closed_normalized, is_discrete_normalized, iso_points};

pub const DEFAULT_WINDOW: (i64, i64) = (-20, 20);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailFamily {
    /// Residue `i` of the indices mod `M`.
    pub residue: u64,
    /// Indices `n` in the window with `n = i (mod M)`.
    pub indices: Vec<i64>,
    /// `C'_j = union_n (iota(n) + L_j)` over the layers `L_j` of `Y`.
    pub pieces: Vec<SetExpr>,
    pub discrete: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailCombinePlan {
    /// `Y` translated so that its minimum is 0.
    pub y: SetExpr,
    pub z: SetExpr,
    /// Amount added to the original `Y`.
    pub shift: Rat,
    pub d: Rat,
    pub n: Rat,
    pub m: u64,
    /// `(n, iota(n))` over the truncation window.
    pub iota_offsets: Vec<(i64, Rat)>,
    /// Isolated-point layers of the shifted `Y`, one per derived set.
    pub layers: Vec<SetExpr>,
    pub families: Vec<TailFamily>,
    /// Index pairs `(n1, n2)`, `n1 < n2` in one family, whose translates are
    /// not strictly ordered. Empty when the construction is sound.
    pub ordering_violations: Vec<(i64, i64)>,
}

impl TailCombinePlan {
    pub fn ordering_holds(&self) -> bool {
        self.ordering_violations.is_empty()
    }

    pub fn piece_count(&self) -> usize {
        self.families.iter().map(|f| f.pieces.len()).sum()
    }
}

/// Members of a closed discrete set with positive gap.
struct Lattice {
    tails: Vec<Tail>,
    points: Vec<Rat>,
}

impl Lattice {
    fn from_expr(z: &SetExpr) -> Result<Lattice> {
        let mut tails = Vec::new();
        let mut points = Vec::new();
        let members: Vec<&SetExpr> = match z {
            SetExpr::Union(cs) => cs.iter().collect(),
            other => vec![other],
        };
        for m in members {
            match m {
                SetExpr::Tail(t) => tails.push(t.clone()),
                SetExpr::Fin(ps) => points.extend(ps.iter().cloned()),
                other => {
                    return Err(Error::Validation(format!(
                        "Z must be tails and points, found {other:?}"
                    )))
                }
            }
        }
        if tails.is_empty() {
            return Err(Error::Validation("Z has no tail".into()));
        }
        Ok(Lattice { tails, points })
    }

    fn has(&self, dir: Direction) -> bool {
        self.tails.iter().any(|t| t.dir == dir)
    }

    fn between(&self, lo: &Rat, hi: &Rat) -> Vec<Rat> {
        let mut s: BTreeSet<Rat> = self
            .points
            .iter()
            .filter(|p| *p >= lo && *p <= hi)
            .cloned()
            .collect();
        for t in &self.tails {
            s.extend(t.points_between(lo, hi));
        }
        s.into_iter().collect()
    }

    fn period(&self) -> Rat {
        self.tails
            .iter()
            .skip(1)
            .fold(self.tails[0].step.clone(), |p, t| p.lcm(&t.step))
    }

    fn extent(&self) -> (Rat, Rat) {
        let mut all: Vec<&Rat> = self.points.iter().collect();
        all.extend(self.tails.iter().map(|t| &t.start));
        let lo = all.iter().map(|r| (*r).clone()).min().unwrap();
        let hi = all.iter().map(|r| (*r).clone()).max().unwrap();
        (lo, hi)
    }

    /// Exact minimum gap: beyond the starts the set is periodic with
    /// period `P`, so two periods on each side cover every gap.
    fn min_gap(&self) -> Result<Rat> {
        let p = self.period();
        let (lo, hi) = self.extent();
        let two = Rat::int(2);
        let pts = self.between(&(&lo - &(&two * &p)), &(&hi + &(&two * &p)));
        pts.windows(2)
            .map(|w| &w[1] - &w[0])
            .min()
            .ok_or_else(|| Error::Validation("cannot compute the gap of Z".into()))
    }

    /// `iota(0)`: least point for upward sets, greatest for downward sets,
    /// least nonnegative point otherwise.
    fn anchor(&self) -> Rat {
        let (lo, hi) = self.extent();
        match (self.has(Direction::Up), self.has(Direction::Down)) {
            (true, false) => lo,
            (false, true) => hi,
            _ => {
                let step = self.tails.iter().map(|t| t.step.clone()).max().unwrap();
                let mut width = step;
                loop {
                    if let Some(p) = self.between(&Rat::zero(), &width).into_iter().next() {
                        return p;
                    }
                    width = &width * &Rat::int(2);
                }
            }
        }
    }

    /// The `count` points strictly above (`up`) or below `from`, in order
    /// of distance; fewer only if the set ends.
    fn next_points(&self, from: &Rat, count: usize, up: bool) -> Vec<Rat> {
        if count == 0 {
            return Vec::new();
        }
        let dir = if up { Direction::Up } else { Direction::Down };
        let (lo, hi) = self.extent();
        let mut width = self.period() * Rat::int(count as i64 + 1) + (&hi - &lo);
        loop {
            let pts = if up {
                self.between(from, &(from + &width))
            } else {
                let mut v = self.between(&(from - &width), from);
                v.reverse();
                v
            };
            let pts: Vec<Rat> = pts.into_iter().filter(|p| p != from).collect();
            if pts.len() >= count || !self.has(dir) {
                return pts.into_iter().take(count).collect();
            }
            width = &width * &Rat::int(2);
        }
    }
}

/// Builds the plan over the index window `[a, b]` (clipped to the indices
/// that exist: `n >= 0` for upward sets, `n <= 0` for downward ones).
pub fn tail_combine(
    y: &SetExpr,
    z: &SetExpr,
    window: Option<(i64, i64)>,
) -> Result<TailCombinePlan> {
    let (wa, wb) = window.unwrap_or(DEFAULT_WINDOW);
    if wa > wb {
        return Err(Error::Validation(format!("empty window {wa}..{wb}")));
    }
    let y = normalize(y)?;
    if !y.is_bounded() || !is_closed_normalized(&y)? {
        return Err(Error::Precondition("Y must be compact".into()));
    }
    let z = normalize(z)?;
    if !z.is_tail_like() {
        return Err(Error::Validation(
            "Z must be a tail or a union of tails and points".into(),
        ));
    }
    let lat = Lattice::from_expr(&z)?;
    let d = lat.min_gap()?;

    let (ymin, ymax) = y.hull().expect("bounded");
    let shift = -ymin.clone();
    let ys = normalize(&SetExpr::affine(y.clone(), Rat::one(), shift.clone())?)?;
    let n = (&ymax - &ymin).ceil();
    let m_rat = (&n / &d).floor() + Rat::one();
    let m = m_rat
        .to_i64()
        .and_then(|m| u64::try_from(m).ok())
        .ok_or_else(|| Error::Validation("modulus out of range".into()))?;

    let (lo, hi) = match (lat.has(Direction::Up), lat.has(Direction::Down)) {
        (true, false) => (wa.max(0), wb.max(0)),
        (false, true) => (wa.min(0), wb.min(0)),
        _ => (wa, wb),
    };
    let anchor = lat.anchor();
    let mut iota: Vec<(i64, Rat)> = Vec::new();
    let below = lat.next_points(&anchor, (-lo).max(0) as usize, false);
    for (i, p) in below.iter().enumerate().rev() {
        iota.push((-(i as i64) - 1, p.clone()));
    }
    iota.push((0, anchor.clone()));
    for (i, p) in lat
        .next_points(&anchor, hi.max(0) as usize, true)
        .into_iter()
        .enumerate()
    {
        iota.push((i as i64 + 1, p));
    }
    iota.retain(|(k, _)| *k >= lo && *k <= hi);

    let chain = derivative_chain(&ys)?;
    let layers: Vec<SetExpr> = chain.chain.iter().map(iso_points).collect::<Result<_>>()?;
    let layer_discrete: Vec<bool> = layers
        .iter()
        .map(is_discrete_normalized)
        .collect::<Result<_>>()?;

    let diam = &ymax - &ymin;
    let mut ordering_violations = Vec::new();
    let mut families = Vec::with_capacity(m as usize);
    for i in 0..m {
        let members: Vec<&(i64, Rat)> = iota
            .iter()
            .filter(|(k, _)| k.rem_euclid(m as i64) as u64 == i)
            .collect();
        for (a, (ka, xa)) in members.iter().enumerate() {
            for (kb, xb) in members.iter().skip(a + 1).map(|p| (&p.0, &p.1)) {
                // max(iota(ka) + Y) < min(iota(kb) + Y)
                if !(xa + &diam < *xb) {
                    ordering_violations.push((*ka, *kb));
                }
            }
        }
        let mut pieces = Vec::with_capacity(layers.len());
        for l in &layers {
            let translates: Vec<SetExpr> = members
                .iter()
                .map(|(_, x)| SetExpr::affine(l.clone(), Rat::one(), x.clone()))
                .collect::<Result<_>>()?;
            if let Some(u) = SetExpr::union_of(translates) {
                pieces.push(normalize(&u)?)
            }
        }
        let ordered = ordering_violations.is_empty();
        // Strictly ordered translates have disjoint closed hulls, so a
        // union of translates of a discrete layer is discrete.
        let discrete = layer_discrete
            .iter()
            .take(pieces.len())
            .map(|&b| b && ordered)
            .collect();
        families.push(TailFamily {
            residue: i,
            indices: members.iter().map(|(k, _)| *k).collect(),
            pieces,
            discrete,
        });
    }

    Ok(TailCombinePlan {
        y: ys,
        z,
        shift,
        d,
        n,
        m,
        iota_offsets: iota,
        layers,
        families,
        ordering_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn tail(a: Rat, d: Rat, dir: Direction) -> SetExpr {
        SetExpr::tail(a, d, dir).unwrap()
    }

    #[test]
    fn points_plus_even_numbers() {
        let y = SetExpr::fin([Rat::zero(), rat(1, 2)]).unwrap();
        let z = tail(Rat::zero(), Rat::int(2), Direction::Up);
        let p = tail_combine(&y, &z, None).unwrap();
        assert_eq!(p.d, Rat::int(2));
        assert_eq!(p.n, Rat::one());
        assert_eq!(p.m, 1);
        assert_eq!(p.families.len(), 1);
        assert_eq!(p.families[0].pieces.len(), 1);
        assert!(p.ordering_holds());
        assert_eq!(p.iota_offsets.first().unwrap(), &(0, Rat::zero()));
        assert_eq!(p.iota_offsets.last().unwrap(), &(20, Rat::int(40)));
    }

    #[test]
    fn geom_plus_half_steps() {
        let y = SetExpr::geom(Rat::zero(), Rat::one(), rat(1, 2), true).unwrap();
        let z = tail(Rat::zero(), rat(1, 2), Direction::Up);
        let p = tail_combine(&y, &z, None).unwrap();
        assert_eq!(p.d, rat(1, 2));
        assert_eq!(p.n, Rat::one());
        assert_eq!(p.m, 3);
        assert_eq!(p.families.len(), 3);
        for f in &p.families {
            assert_eq!(f.pieces.len(), 2);
            assert!(f.discrete.iter().all(|&b| b));
        }
        assert!(p.ordering_holds());
    }

    #[test]
    fn singleton_y_is_shifted_z() {
        let y = SetExpr::point(Rat::zero());
        let z = tail(Rat::int(5), Rat::int(3), Direction::Up);
        let p = tail_combine(&y, &z, None).unwrap();
        assert_eq!(p.m, 1);
        assert_eq!(p.n, Rat::zero());
        let expected: Vec<Rat> = (0..=20).map(|k| Rat::int(5 + 3 * k)).collect();
        assert_eq!(p.families[0].pieces[0], SetExpr::fin(expected).unwrap());
    }

    #[test]
    fn two_sided_and_downward() {
        let y = SetExpr::fin([Rat::int(3), Rat::int(4)]).unwrap();
        let z = SetExpr::union(vec![
            tail(Rat::zero(), Rat::one(), Direction::Up),
            tail(rat(-1, 2), Rat::one(), Direction::Down),
        ])
        .unwrap();
        let p = tail_combine(&y, &z, None).unwrap();
        assert_eq!(p.shift, Rat::int(-3));
        assert_eq!(p.d, rat(1, 2));
        assert_eq!(p.m, 3);
        assert_eq!(p.iota_offsets.len(), 41);
        assert_eq!(p.iota_offsets[20], (0, Rat::zero()));
        assert_eq!(p.iota_offsets[19], (-1, rat(-1, 2)));
        assert_eq!(p.iota_offsets[21], (1, Rat::one()));
        assert!(p.ordering_holds());

        let down = tail(Rat::zero(), Rat::int(2), Direction::Down);
        let q = tail_combine(&y, &down, Some((-5, 5))).unwrap();
        assert_eq!(q.iota_offsets.len(), 6);
        assert_eq!(q.iota_offsets[0], (-5, Rat::int(-10)));
        assert!(q.ordering_holds());
    }

    #[test]
    fn rejects_bad_inputs() {
        let y = SetExpr::geom(Rat::zero(), Rat::one(), rat(1, 2), false).unwrap();
        let z = tail(Rat::zero(), Rat::one(), Direction::Up);
        assert!(matches!(
            tail_combine(&y, &z, None),
            Err(Error::Precondition(_))
        ));
        let closed = SetExpr::geom(Rat::zero(), Rat::one(), rat(1, 2), true).unwrap();
        assert!(tail_combine(&closed, &closed, None).is_err());
    }
}
