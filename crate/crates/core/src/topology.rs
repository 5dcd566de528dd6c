//! Point-set topology of symbolic sets: membership, closure, accumulation
//! and isolated points, derived sets and Cantor–Bendixson rank.
//!
//! Public entry points normalize their input; the `*_normalized` variants
//! skip that step for callers that already hold a normal form.

use crate::error::{Error, Result};
use crate::expr::{MaybeSet, SetExpr};
use crate::normalize::{normalize, normalize_maybe};
use crate::rat::Rat;
use crate::solver::{self, Atom, Part, Product};

/// Derived-set chain and the facts computed alongside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopoFacts {
    pub is_closed: bool,
    pub is_compact: bool,
    pub is_discrete: bool,
    pub acc: MaybeSet,
    /// `X<0> = cl(e), X<1>, ...`; every listed derivative is nonempty and the
    /// next one (not listed) is empty.
    pub derivative_chain: Vec<SetExpr>,
    pub rank: usize,
}

/// Iterated derived sets of the closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivativeChain {
    pub chain: Vec<SetExpr>,
}

impl DerivativeChain {
    /// Index of the first empty derivative.
    pub fn rank(&self) -> usize {
        self.chain.len()
    }
}

const MAX_CHAIN: usize = 256;

// ---------------------------------------------------------------------------
// Membership

/// Reusable membership test with accumulation data precomputed for
/// `iso(...)` members. Build with [`compile`].
pub struct Matcher {
    parts: Vec<MPart>,
}

enum MPart {
    Sum(Product),
    Iso {
        base: Box<Matcher>,
        acc: Option<Box<Matcher>>,
    },
}

impl Matcher {
    pub(crate) fn new(e: &SetExpr) -> Result<Matcher> {
        let mut parts = Vec::new();
        for p in solver::parts(e)? {
            parts.push(match p {
                Part::Sum(prod) => MPart::Sum(prod),
                Part::Iso(x) => {
                    let acc = acc_normalized(&x)?;
                    MPart::Iso {
                        base: Box::new(Matcher::new(&x)?),
                        acc: acc.map(|a| Matcher::new(&a).map(Box::new)).transpose()?,
                    }
                }
            });
        }
        Ok(Matcher { parts })
    }

    pub fn contains(&self, x: &Rat) -> Result<bool> {
        let pt = Product::point(x.clone());
        for p in &self.parts {
            let hit = match p {
                MPart::Sum(prod) => solver::intersects(prod, &pt)?,
                MPart::Iso { base, acc } => {
                    base.contains(x)?
                        && match acc {
                            Some(a) => !a.contains(x)?,
                            None => true,
                        }
                }
            };
            if hit {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Membership tester for many queries against one set.
pub fn compile(e: &SetExpr) -> Result<Matcher> {
    Matcher::new(&normalize(e)?)
}

/// Exact membership test.
pub fn membership(e: &SetExpr, x: &Rat) -> Result<bool> {
    membership_normalized(&normalize(e)?, x)
}

pub fn membership_normalized(e: &SetExpr, x: &Rat) -> Result<bool> {
    Matcher::new(e)?.contains(x)
}

// ---------------------------------------------------------------------------
// Intersections

/// Do two sets share a point?
pub fn intersects(a: &SetExpr, b: &SetExpr) -> Result<bool> {
    intersects_normalized(&normalize(a)?, &normalize(b)?)
}

pub(crate) fn intersects_normalized(a: &SetExpr, b: &SetExpr) -> Result<bool> {
    let pa = solver::parts(a)?;
    let pb = solver::parts(b)?;
    for x in &pa {
        for y in &pb {
            if parts_intersect(x, y)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn parts_intersect(x: &Part, y: &Part) -> Result<bool> {
    match (x, y) {
        (Part::Sum(p), Part::Sum(q)) => solver::intersects(p, q),
        (Part::Iso(base), Part::Sum(p)) | (Part::Sum(p), Part::Iso(base)) => {
            if p.is_finite() {
                let m = Matcher::new(&SetExpr::iso(base.clone()))?;
                for pt in p.finite_points() {
                    if m.contains(&pt)? {
                        return Ok(true);
                    }
                }
                return Ok(false);
            }
            if !intersects_normalized(base, &p.to_expr())? {
                return Ok(false);
            }
            Err(Error::Unsupported(
                "intersection of a residual iso(...) set with an infinite family".into(),
            ))
        }
        (Part::Iso(a), Part::Iso(b)) => {
            if !intersects_normalized(a, b)? {
                return Ok(false);
            }
            Err(Error::Unsupported(
                "intersection of two overlapping residual iso(...) sets".into(),
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Closure and accumulation points

/// Symbolic closure.
pub fn closure(e: &SetExpr) -> Result<SetExpr> {
    closure_normalized(&normalize(e)?)
}

pub(crate) fn closure_normalized(e: &SetExpr) -> Result<SetExpr> {
    normalize(&close_raw(e))
}

fn close_raw(e: &SetExpr) -> SetExpr {
    match e {
        SetExpr::Fin(_) | SetExpr::Tail(_) => e.clone(),
        SetExpr::Geom(g) => {
            let mut g = g.clone();
            g.with_limit = true;
            SetExpr::Geom(g)
        }
        SetExpr::Affine {
            child,
            scale,
            offset,
        } => SetExpr::Affine {
            child: Box::new(close_raw(child)),
            scale: scale.clone(),
            offset: offset.clone(),
        },
        SetExpr::Union(cs) => SetExpr::Union(cs.iter().map(close_raw).collect()),
        SetExpr::MSum(cs) => SetExpr::MSum(cs.iter().map(close_raw).collect()),
        // Isolated points of a countable set are dense in it.
        SetExpr::Iso(c) => close_raw(c),
    }
}

/// Accumulation points (`None` = empty).
pub fn acc_points(e: &SetExpr) -> Result<MaybeSet> {
    acc_normalized(&normalize(e)?)
}

pub(crate) fn acc_normalized(e: &SetExpr) -> Result<MaybeSet> {
    normalize_maybe(acc_raw(e)?)
}

fn acc_raw(e: &SetExpr) -> Result<MaybeSet> {
    Ok(match e {
        SetExpr::Fin(_) | SetExpr::Tail(_) => None,
        SetExpr::Geom(g) => Some(SetExpr::point(g.limit.clone())),
        SetExpr::Affine { .. } => acc_raw(&normalize(e)?)?,
        SetExpr::Union(cs) => {
            let mut out = Vec::new();
            for c in cs {
                if let Some(a) = acc_raw(c)? {
                    out.push(a);
                }
            }
            SetExpr::union_of(out)
        }
        // A limit of distinct sums has some coordinate converging to an
        // accumulation point of its factor while the others converge inside
        // their closures; conversely every such point is a limit. With one
        // closed discrete unbounded factor the sum is locally finite in that
        // factor, so the same rule applies to the bounded factors alone.
        SetExpr::MSum(cs) => {
            let mut out = Vec::new();
            for (k, ck) in cs.iter().enumerate() {
                let Some(a) = acc_raw(ck)? else { continue };
                let children = cs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| if i == k { a.clone() } else { close_raw(c) })
                    .collect();
                out.push(SetExpr::MSum(children));
            }
            SetExpr::union_of(out)
        }
        // The accumulation points of iso(X) are those of X.
        SetExpr::Iso(c) => acc_raw(c)?,
    })
}

// ---------------------------------------------------------------------------
// Isolated points

/// Isolated points, in closed form where possible and as `iso(e)` otherwise.
pub fn iso_points(e: &SetExpr) -> Result<SetExpr> {
    iso_points_normalized(&normalize(e)?)
}

pub(crate) fn iso_points_normalized(e: &SetExpr) -> Result<SetExpr> {
    match e {
        SetExpr::Fin(_) | SetExpr::Tail(_) | SetExpr::Iso(_) => Ok(e.clone()),
        SetExpr::Geom(g) => {
            let mut g = g.clone();
            g.with_limit = false;
            Ok(SetExpr::Geom(g))
        }
        SetExpr::Affine { .. } => iso_points(e),
        SetExpr::Union(cs) => {
            let Some(acc) = acc_normalized(e)? else {
                return Ok(e.clone());
            };
            let acc_m = Matcher::new(&acc)?;
            let mut out = Vec::new();
            for c in cs {
                if let SetExpr::Fin(ps) = c {
                    let mut keep = Vec::new();
                    for p in ps {
                        if !acc_m.contains(p)? {
                            keep.push(p.clone());
                        }
                    }
                    if !keep.is_empty() {
                        out.push(SetExpr::Fin(keep));
                    }
                    continue;
                }
                let i = iso_points_normalized(c)?;
                if matches!(i, SetExpr::Iso(_)) || intersects_normalized(&i, &acc)? {
                    return Ok(SetExpr::iso(e.clone()));
                }
                out.push(i);
            }
            match SetExpr::union_of(out) {
                Some(u) => normalize(&u),
                None => Ok(SetExpr::iso(e.clone())),
            }
        }
        SetExpr::MSum(cs) => {
            let Some(acc) = acc_normalized(e)? else {
                return Ok(e.clone());
            };
            let mut isos = Vec::with_capacity(cs.len());
            for c in cs {
                let i = iso_points_normalized(c)?;
                if matches!(i, SetExpr::Iso(_)) {
                    return Ok(SetExpr::iso(e.clone()));
                }
                isos.push(i);
            }
            // Every isolated point is a sum of isolated points of the
            // factors; such a sum is isolated unless it coincides with an
            // accumulation point reached another way.
            let candidate = normalize(&SetExpr::MSum(isos))?;
            if intersects_normalized(&candidate, &acc)? {
                Ok(SetExpr::iso(e.clone()))
            } else {
                Ok(candidate)
            }
        }
    }
}

/// Derived set `e \ iso(e)`; only defined for closed `e`, where it equals the
/// accumulation points.
pub fn lpt_set(e: &SetExpr) -> Result<MaybeSet> {
    let n = normalize(e)?;
    if !is_closed_normalized(&n)? {
        return Err(Error::Precondition(
            "lpt is only defined for closed sets; take the closure first".into(),
        ));
    }
    acc_normalized(&n)
}

// ---------------------------------------------------------------------------
// Predicates

pub fn is_discrete(e: &SetExpr) -> Result<bool> {
    is_discrete_normalized(&normalize(e)?)
}

pub(crate) fn is_discrete_normalized(e: &SetExpr) -> Result<bool> {
    let members: Vec<&SetExpr> = match e {
        SetExpr::Union(cs) => cs.iter().collect(),
        other => vec![other],
    };
    let mut accs = Vec::with_capacity(members.len());
    for m in &members {
        accs.push(acc_normalized(m)?);
    }
    for (i, m) in members.iter().enumerate() {
        for (j, a) in accs.iter().enumerate() {
            let Some(a) = a else { continue };
            if i == j && matches!(m, SetExpr::Iso(_)) {
                continue;
            }
            if intersects_normalized(m, a)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn is_closed(e: &SetExpr) -> Result<bool> {
    is_closed_normalized(&normalize(e)?)
}

pub(crate) fn is_closed_normalized(e: &SetExpr) -> Result<bool> {
    if &closure_normalized(e)? == e {
        return Ok(true);
    }
    let Some(acc) = acc_normalized(e)? else {
        return Ok(true);
    };
    let m = Matcher::new(e)?;
    let targets = solver::parts(e)?;
    for part in solver::parts(&acc)? {
        let Part::Sum(p) = part else {
            return Err(Error::Unsupported("closedness of a residual set".into()));
        };
        if !product_subset(&p, &m, &targets)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_compact(e: &SetExpr) -> Result<bool> {
    let n = normalize(e)?;
    Ok(n.is_bounded() && is_closed_normalized(&n)?)
}

/// Decides `p ⊆ e` where `e` is given by its matcher and parts.
fn product_subset(p: &Product, m: &Matcher, targets: &[Part]) -> Result<bool> {
    if p.is_finite() {
        for x in p.finite_points() {
            if !m.contains(&x)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    for t in targets {
        if let Part::Sum(q) = t {
            if structurally_contained(p, q)? {
                return Ok(true);
            }
        }
    }
    for x in crate::oracle::product_points(p, 4) {
        if !m.contains(&x)? {
            return Ok(false);
        }
    }
    Err(Error::Unsupported(
        "cannot decide whether an accumulation family lies in the set".into(),
    ))
}

/// Sufficient condition for `p ⊆ q`: an injective matching of the infinite
/// atoms of `p` into atoms of `q` that contain them (after moving all
/// offsets into constants), with every constant of `p` reachable from the
/// constants plus unmatched atoms of `q`.
fn structurally_contained(p: &Product, q: &Product) -> Result<bool> {
    let (pc, pa) = zero_form(p);
    let (qc, qa) = zero_form(q);
    if pa.len() > qa.len() {
        return Ok(false);
    }
    let mut used = vec![false; qa.len()];
    match_atoms(&pa, &qa, 0, &mut used, &pc, &qc)
}

fn zero_form(p: &Product) -> (Vec<Rat>, Vec<Atom>) {
    let mut consts = vec![Rat::zero()];
    let mut atoms = Vec::new();
    let shift = |consts: &mut Vec<Rat>, by: &Rat| {
        for c in consts.iter_mut() {
            *c = &*c + by;
        }
    };
    for a in &p.atoms {
        match a {
            Atom::Points(ps) => {
                let mut next: Vec<Rat> = consts
                    .iter()
                    .flat_map(|c| ps.iter().map(move |x| c + x))
                    .collect();
                next.sort();
                next.dedup();
                consts = next;
            }
            Atom::Seq(g) => {
                shift(&mut consts, &g.limit);
                let mut g = g.clone();
                g.limit = Rat::zero();
                atoms.push(Atom::Seq(g));
            }
            Atom::Ray(t) => {
                shift(&mut consts, &t.start);
                let mut t = t.clone();
                t.start = Rat::zero();
                atoms.push(Atom::Ray(t));
            }
        }
    }
    (consts, atoms)
}

fn atom_contained(a: &Atom, b: &Atom) -> bool {
    match (a, b) {
        (Atom::Seq(g), Atom::Seq(h)) => {
            if g.with_limit && !h.with_limit {
                return false;
            }
            // g.ratio = h.ratio^m (m >= 1) and g.scale = h.scale * h.ratio^j.
            let mut pw = h.ratio.clone();
            let mut ratio_ok = false;
            while pw.abs() >= g.ratio.abs() {
                if pw == g.ratio {
                    ratio_ok = true;
                    break;
                }
                pw = pw * &h.ratio;
            }
            ratio_ok && h.index_of(&g.scale).is_some()
        }
        (Atom::Ray(s), Atom::Ray(t)) => s.dir == t.dir && (&s.step / &t.step).is_integer(),
        _ => false,
    }
}

fn match_atoms(
    pa: &[Atom],
    qa: &[Atom],
    idx: usize,
    used: &mut [bool],
    pc: &[Rat],
    qc: &[Rat],
) -> Result<bool> {
    if idx == pa.len() {
        let mut atoms = vec![Atom::Points(qc.to_vec())];
        for (j, a) in qa.iter().enumerate() {
            if !used[j] {
                atoms.push(a.clone());
            }
        }
        let rest = Product { atoms };
        for c in pc {
            if !solver::intersects(&rest, &Product::point(c.clone()))? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    for j in 0..qa.len() {
        if !used[j] && atom_contained(&pa[idx], &qa[j]) {
            used[j] = true;
            let ok = match_atoms(pa, qa, idx + 1, used, pc, qc)?;
            used[j] = false;
            if ok {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// Derived sets and rank

/// `X<0> = cl(e)`, `X<m> = lpt(X<m-1>)` until empty.
pub fn derivative_chain(e: &SetExpr) -> Result<DerivativeChain> {
    let mut x = closure(e)?;
    let mut chain = Vec::new();
    loop {
        if chain.len() >= MAX_CHAIN {
            return Err(Error::Unsupported("derivative chain too long".into()));
        }
        // On closed sets the derived set is the set of accumulation points.
        let next = acc_normalized(&x)?;
        chain.push(x);
        match next {
            Some(n) => x = n,
            None => break,
        }
    }
    Ok(DerivativeChain { chain })
}

pub fn rank(e: &SetExpr) -> Result<usize> {
    Ok(derivative_chain(e)?.rank())
}

pub fn topo_facts(e: &SetExpr) -> Result<TopoFacts> {
    let n = normalize(e)?;
    let chain = derivative_chain(&n)?;
    let is_closed = is_closed_normalized(&n)?;
    Ok(TopoFacts {
        is_closed,
        is_compact: is_closed && n.is_bounded(),
        is_discrete: is_discrete_normalized(&n)?,
        acc: acc_normalized(&n)?,
        rank: chain.rank(),
        derivative_chain: chain.chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Direction;
    use crate::rat::rat;

    fn g(c: i64, s: i64, q: Rat, closed: bool) -> SetExpr {
        SetExpr::geom(Rat::int(c), Rat::int(s), q, closed).unwrap()
    }

    fn fin(ps: &[Rat]) -> SetExpr {
        SetExpr::fin(ps.iter().cloned()).unwrap()
    }

    fn half(closed: bool) -> SetExpr {
        g(0, 1, rat(1, 2), closed)
    }

    fn third(closed: bool) -> SetExpr {
        g(0, 1, rat(1, 3), closed)
    }

    fn msum(cs: Vec<SetExpr>) -> SetExpr {
        SetExpr::msum(cs).unwrap()
    }

    fn union(cs: Vec<SetExpr>) -> SetExpr {
        SetExpr::union(cs).unwrap()
    }

    fn tail(a: i64, d: i64) -> SetExpr {
        SetExpr::tail(Rat::int(a), Rat::int(d), Direction::Up).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(membership(&half(true), &rat(1, 8)).unwrap());
        assert!(!membership(&half(false), &Rat::zero()).unwrap());
        let e = msum(vec![half(true), fin(&[Rat::zero(), Rat::one()])]);
        assert!(membership(&e, &rat(9, 8)).unwrap());
    }

    #[test]
    fn closure_examples() {
        assert_eq!(closure(&half(false)).unwrap(), half(true));
        assert_eq!(closure(&tail(0, 1)).unwrap(), tail(0, 1));
    }

    #[test]
    fn acc_examples() {
        assert_eq!(
            acc_points(&fin(&[Rat::one(), Rat::int(2), Rat::int(3)])).unwrap(),
            None
        );
        let e = msum(vec![half(true), third(true)]);
        assert_eq!(
            acc_points(&e).unwrap(),
            Some(normalize(&union(vec![half(true), third(true)])).unwrap())
        );
        let f = msum(vec![fin(&[Rat::zero(), rat(1, 2)]), tail(0, 2)]);
        assert_eq!(acc_points(&f).unwrap(), None);
    }

    #[test]
    fn iso_examples() {
        assert_eq!(iso_points(&half(true)).unwrap(), half(false));
        assert_eq!(
            iso_points(&fin(&[Rat::int(5)])).unwrap(),
            fin(&[Rat::int(5)])
        );
        // Unions with the limit normalize to the closed sequence first.
        let u = SetExpr::Union(vec![half(false), fin(&[Rat::zero()])]);
        assert_eq!(iso_points(&u).unwrap(), half(false));
        // Un-normalized: 0 is the limit of the other member.
        let u2 = SetExpr::Union(vec![half(false), fin(&[Rat::zero(), Rat::int(3)])]);
        assert_eq!(
            iso_points(&u2).unwrap(),
            union(vec![fin(&[Rat::int(3)]), half(false)])
        );
    }

    #[test]
    fn iso_with_coincidences_is_residual() {
        // 2^-j + 2^-k hits 2^-m, which is an accumulation point.
        let e = msum(vec![half(true), half(true)]);
        let i = iso_points(&e).unwrap();
        assert!(matches!(i, SetExpr::Iso(_)));
        assert!(is_discrete(&i).unwrap());
        assert!(membership(&i, &rat(3, 4)).unwrap());
        assert!(!membership(&i, &rat(1, 2)).unwrap());
        assert!(!membership(&i, &Rat::zero()).unwrap());
        assert_eq!(rank(&i).unwrap(), 3);
    }

    #[test]
    fn lpt_examples() {
        assert_eq!(lpt_set(&half(true)).unwrap(), Some(fin(&[Rat::zero()])));
        assert_eq!(lpt_set(&tail(0, 1)).unwrap(), None);
        let e = msum(vec![half(true), g(10, 1, rat(1, 2), true)]);
        assert_eq!(lpt_set(&e).unwrap(), Some(g(10, 1, rat(1, 2), true)));
        assert!(matches!(lpt_set(&half(false)), Err(Error::Precondition(_))));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&fin(&[Rat::zero()])).unwrap(), 1);
        let c = derivative_chain(&half(false)).unwrap();
        assert_eq!(c.chain, vec![half(true), fin(&[Rat::zero()])]);
        let e = msum(vec![half(true), third(true)]);
        let c = derivative_chain(&e).unwrap();
        assert_eq!(c.rank(), 3);
        assert_eq!(c.chain[2], fin(&[Rat::zero()]));
    }

    #[test]
    fn predicate_examples() {
        assert!(is_discrete(&half(false)).unwrap());
        assert!(!is_closed(&half(false)).unwrap());
        assert!(!is_discrete(&half(true)).unwrap());
        assert!(is_closed(&half(true)).unwrap());
        let f = msum(vec![fin(&[Rat::zero(), rat(1, 2)]), tail(0, 2)]);
        assert!(is_discrete(&f).unwrap());
        assert!(is_closed(&f).unwrap());
    }

    #[test]
    fn closedness_beyond_syntax() {
        // Open sequence plus {0,1}: the limit 1 is a term, the limit 0 is not.
        let e = msum(vec![half(false), fin(&[Rat::zero(), Rat::one()])]);
        assert!(!is_closed(&e).unwrap());
        // Open sequence whose limit is supplied by another member.
        let u = SetExpr::Union(vec![half(false), g(0, 1, rat(1, 4), true)]);
        assert!(is_closed(&u).unwrap());
        // Sum of open halves and closed halves: limits reached by the closed
        // factor.
        let s = msum(vec![half(false), half(true)]);
        assert!(!is_closed(&s).unwrap());
    }

    #[test]
    fn discreteness_of_residual_union() {
        let y = msum(vec![half(false), third(false)]);
        assert!(is_discrete(&y).unwrap());
        let y2 = msum(vec![half(false), half(false)]);
        assert!(!is_discrete(&y2).unwrap());
    }
}
