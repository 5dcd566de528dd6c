//! Brute-force cross-checker: depth-truncated enumeration plus accumulation
//! and isolation probes.
//!
//! The oracle is deliberately semi-decisive. A `Confirmed` accumulation
//! probe is sound (the witnesses are genuine members); `Unknown` refutes
//! nothing. Isolation radii are certified only when no omitted point can be
//! closer than the reported radius.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::expr::{Direction, SetExpr};
use crate::normalize::normalize;
use crate::rat::Rat;
use crate::solver::Product;
use crate::topology::Matcher;

/// Depth-truncated view of a set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub source: SetExpr,
    pub depth: usize,
    /// Strictly increasing.
    pub points: Vec<Rat>,
    /// Largest possible distance from an omitted point to `points`;
    /// `None` means unbounded.
    pub tail_bound: Option<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsSchedule {
    pub eps0: Rat,
    pub steps: u32,
}

impl Default for EpsSchedule {
    fn default() -> Self {
        EpsSchedule {
            eps0: Rat::one(),
            steps: 12,
        }
    }
}

impl EpsSchedule {
    pub fn new(eps0: Rat, steps: u32) -> Result<EpsSchedule> {
        if !eps0.is_positive() || steps == 0 {
            return Err(Error::Validation(
                "schedule needs eps0 > 0 and at least one step".into(),
            ));
        }
        Ok(EpsSchedule { eps0, steps })
    }

    /// `eps0 * 2^-j` for `j = 0..=steps`.
    pub fn radii(&self) -> Vec<Rat> {
        (0..=self.steps)
            .map(|j| &self.eps0 * &Rat::new(1, 2).pow(j as i32))
            .collect()
    }

    pub fn finest(&self) -> Rat {
        &self.eps0 * &Rat::new(1, 2).pow(self.steps as i32)
    }
}

pub const DEFAULT_DEPTH: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Probe {
    Confirmed,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radius {
    /// Distance to the nearest other enumerated point; `None` if there is
    /// none.
    pub radius: Option<Rat>,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gap {
    pub gap: Rat,
    /// True when the gap is the exact infimum over the whole set.
    pub certified: bool,
}

/// Truncated enumeration: Geom and Tail terms with index `k < depth`,
/// compounds composed from their children.
pub fn enumerate(e: &SetExpr, depth: usize) -> Result<Enumeration> {
    if depth == 0 {
        return Err(Error::Validation("depth must be positive".into()));
    }
    let n = normalize(e)?;
    let (points, tail_bound) = enum_raw(&n, depth)?;
    Ok(Enumeration {
        source: n,
        depth,
        points: points.into_iter().collect(),
        tail_bound,
    })
}

fn enum_raw(e: &SetExpr, depth: usize) -> Result<(BTreeSet<Rat>, Option<Rat>)> {
    Ok(match e {
        SetExpr::Fin(ps) => (ps.iter().cloned().collect(), Some(Rat::zero())),
        SetExpr::Geom(g) => {
            let mut pts: BTreeSet<Rat> = (0..depth as u32).map(|k| g.term(k)).collect();
            let q = g.ratio.abs();
            let s = g.scale.abs();
            let bound = if g.with_limit {
                pts.insert(g.limit.clone());
                &s * &q.pow(depth as i32)
            } else {
                &s * &q.pow(depth as i32 - 1) * (Rat::one() + &q)
            };
            (pts, Some(bound))
        }
        SetExpr::Tail(t) => ((0..depth as u64).map(|k| t.term(k)).collect(), None),
        SetExpr::Affine {
            child,
            scale,
            offset,
        } => {
            let (pts, b) = enum_raw(child, depth)?;
            (
                pts.iter().map(|p| scale * p + offset).collect(),
                b.map(|b| b * scale.abs()),
            )
        }
        SetExpr::Union(cs) => {
            let mut pts = BTreeSet::new();
            let mut bound = Some(Rat::zero());
            for c in cs {
                let (p, b) = enum_raw(c, depth)?;
                pts.extend(p);
                bound = match (bound, b) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    _ => None,
                };
            }
            (pts, bound)
        }
        SetExpr::MSum(cs) => {
            let mut pts: BTreeSet<Rat> = BTreeSet::from([Rat::zero()]);
            let mut bound = Some(Rat::zero());
            for c in cs {
                let (p, b) = enum_raw(c, depth)?;
                pts = pts
                    .iter()
                    .flat_map(|x| p.iter().map(move |y| x + y))
                    .collect();
                bound = match (bound, b) {
                    (Some(x), Some(y)) => Some(x + y),
                    _ => None,
                };
            }
            (pts, bound)
        }
        SetExpr::Iso(child) => {
            let m = Matcher::new(e)?;
            let (p, _) = enum_raw(child, depth)?;
            let mut keep = BTreeSet::new();
            for x in p {
                if m.contains(&x)? {
                    keep.insert(x);
                }
            }
            (keep, None)
        }
    })
}

/// `count` pseudo-random members of the depth-`depth` enumeration, drawn
/// by picking random terms in every factor (duplicates possible).
pub fn sample_points(e: &SetExpr, depth: usize, count: usize, seed: u64) -> Result<Vec<Rat>> {
    use rand::{Rng, SeedableRng};
    fn draw(e: &SetExpr, depth: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Result<Option<Rat>> {
        Ok(match e {
            SetExpr::Fin(ps) => Some(ps[rng.gen_range(0..ps.len())].clone()),
            SetExpr::Geom(g) => {
                let k = rng.gen_range(0..depth + usize::from(g.with_limit));
                Some(if k == depth {
                    g.limit.clone()
                } else {
                    g.term(k as u32)
                })
            }
            SetExpr::Tail(t) => Some(t.term(rng.gen_range(0..depth as u64))),
            SetExpr::Affine {
                child,
                scale,
                offset,
            } => draw(child, depth, rng)?.map(|x| scale * &x + offset),
            SetExpr::Union(cs) => draw(&cs[rng.gen_range(0..cs.len())], depth, rng)?,
            SetExpr::MSum(cs) => {
                let mut acc = Rat::zero();
                for c in cs {
                    match draw(c, depth, rng)? {
                        Some(x) => acc += &x,
                        None => return Ok(None),
                    }
                }
                Some(acc)
            }
            SetExpr::Iso(child) => {
                let m = Matcher::new(e)?;
                let mut found = None;
                for _ in 0..64 {
                    if let Some(x) = draw(child, depth, rng)? {
                        if m.contains(&x)? {
                            found = Some(x);
                            break;
                        }
                    }
                }
                found
            }
        })
    }
    let n = normalize(e)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        if let Some(x) = draw(&n, depth, &mut rng)? {
            out.push(x);
        }
    }
    Ok(out)
}

/// A few points of a product, for counterexample searches.
pub(crate) fn product_points(p: &Product, depth: usize) -> Vec<Rat> {
    enum_raw(&p.to_expr(), depth)
        .map(|(pts, _)| pts.into_iter().collect())
        .unwrap_or_default()
}

/// Closed intervals (`None` = infinite end) containing every omitted point.
type Region = Vec<(Option<Rat>, Option<Rat>)>;

fn omitted(e: &SetExpr, depth: usize) -> Result<(Region, Vec<Rat>)> {
    Ok(match e {
        SetExpr::Fin(ps) => (Vec::new(), ps.clone()),
        SetExpr::Geom(g) => {
            // Terms k >= depth; with a positive ratio they all sit on the
            // side of the limit given by the sign of the scale.
            let t = &g.scale * &g.ratio.pow(depth as i32);
            let r = t.abs();
            let region = if g.ratio.is_positive() {
                let far = &g.limit + &t;
                vec![(
                    Some(g.limit.clone().min(far.clone())),
                    Some(g.limit.clone().max(far)),
                )]
            } else {
                vec![(Some(&g.limit - &r), Some(&g.limit + &r))]
            };
            let mut pts: Vec<Rat> = (0..depth as u32).map(|k| g.term(k)).collect();
            if g.with_limit {
                pts.push(g.limit.clone());
            }
            (region, pts)
        }
        SetExpr::Tail(t) => {
            let far = t.term(depth as u64);
            let region = match t.dir {
                Direction::Up => vec![(Some(far), None)],
                Direction::Down => vec![(None, Some(far))],
            };
            (region, (0..depth as u64).map(|k| t.term(k)).collect())
        }
        SetExpr::Affine { .. } => omitted(&normalize(e)?, depth)?,
        SetExpr::Union(cs) => {
            let mut region = Vec::new();
            let mut pts = Vec::new();
            for c in cs {
                let (r, p) = omitted(c, depth)?;
                region.extend(r);
                pts.extend(p);
            }
            (region, pts)
        }
        SetExpr::MSum(cs) => {
            let kids: Vec<(Region, Vec<Rat>)> = cs
                .iter()
                .map(|c| omitted(c, depth))
                .collect::<Result<_>>()?;
            // An omitted sum has some omitted coordinate k; the others are
            // enumerated points or omitted points of their own.
            let mut region = Vec::new();
            for k in 0..kids.len() {
                let mut acc: Region = kids[k].0.clone();
                for (i, (r, p)) in kids.iter().enumerate() {
                    if i == k {
                        continue;
                    }
                    let mut cover: Region = p
                        .iter()
                        .map(|x| (Some(x.clone()), Some(x.clone())))
                        .collect();
                    cover.extend(r.iter().cloned());
                    acc = merge(sum_regions(&acc, &cover));
                }
                region.extend(acc);
            }
            let mut pts: BTreeSet<Rat> = BTreeSet::from([Rat::zero()]);
            for (_, p) in &kids {
                pts = pts
                    .iter()
                    .flat_map(|x| p.iter().map(move |y| x + y))
                    .collect();
            }
            (merge(region), pts.into_iter().collect())
        }
        SetExpr::Iso(child) => {
            let (region, _) = omitted(child, depth)?;
            let (pts, _) = enum_raw(e, depth)?;
            (region, pts.into_iter().collect())
        }
    })
}

fn sum_regions(a: &Region, b: &Region) -> Region {
    let add = |x: &Option<Rat>, y: &Option<Rat>| match (x, y) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    };
    let mut out = Vec::with_capacity(a.len() * b.len());
    for (l1, h1) in a {
        for (l2, h2) in b {
            out.push((add(l1, l2), add(h1, h2)));
        }
    }
    out
}

fn merge(mut r: Region) -> Region {
    r.sort_by(|a, b| match (&a.0, &b.0) {
        (None, None) => std::cmp::Ordering::Equal,
        (None, _) => std::cmp::Ordering::Less,
        (_, None) => std::cmp::Ordering::Greater,
        (Some(x), Some(y)) => x.cmp(y),
    });
    let mut out: Region = Vec::new();
    for (lo, hi) in r {
        if let Some(last) = out.last_mut() {
            let overlaps = match (&last.1, &lo) {
                (None, _) | (_, None) => true,
                (Some(h), Some(l)) => l <= h,
            };
            if overlaps {
                last.1 = match (&last.1, &hi) {
                    (Some(a), Some(b)) => Some(a.clone().max(b.clone())),
                    _ => None,
                };
                continue;
            }
        }
        out.push((lo, hi));
    }
    out
}

/// Confirmed iff every radius in the schedule has an enumerated witness
/// `p != x` with `|p - x| < eps`.
pub fn accumulation_probe(
    e: &SetExpr,
    x: &Rat,
    depth: usize,
    sched: &EpsSchedule,
) -> Result<Probe> {
    Ok(accumulation_probes(e, std::slice::from_ref(x), depth, sched)?[0])
}

/// [`accumulation_probe`] for many points over one enumeration.
pub fn accumulation_probes(
    e: &SetExpr,
    xs: &[Rat],
    depth: usize,
    sched: &EpsSchedule,
) -> Result<Vec<Probe>> {
    let en = enumerate(e, depth)?;
    let finest = sched.finest();
    Ok(xs
        .iter()
        .map(|x| match nearest_other(&en.points, x) {
            Some(d) if d < finest => Probe::Confirmed,
            _ => Probe::Unknown,
        })
        .collect())
}

fn nearest_other(points: &[Rat], x: &Rat) -> Option<Rat> {
    let i = points.partition_point(|p| p < x);
    let mut best: Option<Rat> = None;
    let mut consider = |p: &Rat| {
        let d = (p - x).abs();
        best = Some(match best.take() {
            Some(b) => b.min(d),
            None => d,
        });
    };
    if i > 0 {
        consider(&points[i - 1]);
    }
    let j = if points.get(i) == Some(x) { i + 1 } else { i };
    if let Some(p) = points.get(j) {
        consider(p);
    }
    best
}

/// Depth at which every geometric factor has terms within the finest probe
/// radius of its limit.
pub fn probe_depth(e: &SetExpr, sched: &EpsSchedule) -> Result<usize> {
    fn walk(e: &SetExpr, eps: &Rat, out: &mut usize) {
        match e {
            SetExpr::Geom(g) => {
                let q = g.ratio.abs();
                let mut t = g.scale.abs();
                let mut k = 0;
                while &t >= eps {
                    t = t * &q;
                    k += 1;
                }
                *out = (*out).max(k + 2);
            }
            SetExpr::Affine { child, .. } | SetExpr::Iso(child) => walk(child, eps, out),
            SetExpr::Union(cs) | SetExpr::MSum(cs) => cs.iter().for_each(|c| walk(c, eps, out)),
            SetExpr::Fin(_) | SetExpr::Tail(_) => {}
        }
    }
    let n = normalize(e)?;
    let mut out = 1;
    walk(&n, &sched.finest(), &mut out);
    Ok(out)
}

/// Distance from `x` to its nearest enumerated neighbour, certified when no
/// omitted point can lie strictly closer.
pub fn isolation_radius(e: &SetExpr, x: &Rat, depth: usize) -> Result<Radius> {
    Ok(isolation_radii(e, std::slice::from_ref(x), depth)?.remove(0))
}

/// [`isolation_radius`] for many points over one enumeration.
pub fn isolation_radii(e: &SetExpr, xs: &[Rat], depth: usize) -> Result<Vec<Radius>> {
    let en = enumerate(e, depth)?;
    let (region, _) = omitted(&en.source, depth)?;
    xs.iter()
        .map(|x| {
            if en.points.binary_search(x).is_err() {
                return Err(Error::Validation(format!(
                    "{x} is not among the points enumerated at depth {depth}"
                )));
            }
            let radius = nearest_other(&en.points, x);
            // The open ball (x - r, x + r) must miss every omitted interval.
            let certified = radius.as_ref().is_some_and(|r| {
                let (lo_ball, hi_ball) = (x - r, x + r);
                region.iter().all(|(lo, hi)| match (lo, hi) {
                    (_, Some(h)) if h <= &lo_ball => true,
                    (Some(l), _) if l >= &hi_ball => true,
                    _ => false,
                })
            });
            Ok(Radius { radius, certified })
        })
        .collect()
}

/// Minimum gap between enumerated points; exact for finite sets and single
/// tails, otherwise an upper bound on the infimum.
pub fn distance_min(e: &SetExpr, depth: usize) -> Result<Gap> {
    let en = enumerate(e, depth)?;
    if en.points.len() < 2 {
        return Err(Error::Validation(
            "distance_min needs at least two enumerated points".into(),
        ));
    }
    let gap = en
        .points
        .windows(2)
        .map(|w| &w[1] - &w[0])
        .min()
        .expect("two points");
    let certified = matches!(en.source, SetExpr::Fin(_) | SetExpr::Tail(_));
    Ok(Gap { gap, certified })
}
