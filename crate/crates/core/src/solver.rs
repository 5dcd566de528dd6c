//! Exact intersection tests between Minkowski sums of atoms.
//!
//! Every normalized expression flattens into a finite union of *products*:
//! Minkowski sums of finite point sets, geometric sequences and arithmetic
//! tails. Asking whether two products share a point reduces to deciding
//! whether an equation
//!
//! ```text
//!     sum_l w_l * q_l^(k_l)  +  sum_t c_t * n_t  =  target,   k_l, n_t >= 0
//! ```
//!
//! has a solution in nonnegative integers, with `0 < |q_l| < 1`.
//!
//! * A nonzero target forces some term to be at least `|target| / L` in
//!   magnitude. Branching on which term is largest (and on its exponent,
//!   of which there are finitely many candidates) removes one unknown.
//! * A zero target with one ratio is shift-invariant: the terms sitting at
//!   the minimal exponent either cancel (recurse on the rest) or leave a
//!   nonzero residue that the deeper terms must match (nonzero case).
//! * A zero target mixing multiplicatively independent ratios whose prime
//!   supports are disjoint splits into per-class sums. Each class sum has a
//!   bounded denominator (its p-adic valuations are bounded by the other
//!   classes' coefficients) and bounded magnitude, so only finitely many
//!   values are possible.
//! * Tail unknowns contribute a bounded window of values (one direction) or
//!   every point of a lattice `g*Z` (both directions).
//!
//! Ratio classes sharing primes (e.g. `2/3` with `1/6`) are rejected with
//! [`Error::Unsupported`].

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::expr::{Geom, SetExpr, Tail};
use crate::rat::Rat;

const MAX_CLASS_CANDIDATES: u64 = 200_000;
const MAX_TAIL_VALUES: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Atom {
    Points(Vec<Rat>),
    Seq(Geom),
    Ray(Tail),
}

impl Atom {
    pub(crate) fn to_expr(&self) -> SetExpr {
        match self {
            Atom::Points(ps) => SetExpr::Fin(ps.clone()),
            Atom::Seq(g) => SetExpr::Geom(g.clone()),
            Atom::Ray(t) => SetExpr::Tail(t.clone()),
        }
    }
}

/// Minkowski sum of atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Product {
    pub atoms: Vec<Atom>,
}

impl Product {
    pub(crate) fn point(x: Rat) -> Product {
        Product {
            atoms: vec![Atom::Points(vec![x])],
        }
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.atoms.iter().all(|a| matches!(a, Atom::Points(_)))
    }

    /// All points of a finite product.
    pub(crate) fn finite_points(&self) -> Vec<Rat> {
        let mut acc: BTreeSet<Rat> = BTreeSet::from([Rat::zero()]);
        for a in &self.atoms {
            if let Atom::Points(ps) = a {
                acc = acc
                    .iter()
                    .flat_map(|x| ps.iter().map(move |p| x + p))
                    .collect();
            }
        }
        acc.into_iter().collect()
    }

    pub(crate) fn to_expr(&self) -> SetExpr {
        if self.atoms.len() == 1 {
            self.atoms[0].to_expr()
        } else {
            SetExpr::MSum(self.atoms.iter().map(Atom::to_expr).collect())
        }
    }
}

/// One member of the flattened union.
#[derive(Clone, Debug)]
pub(crate) enum Part {
    Sum(Product),
    /// Isolated points of the (normalized) child.
    Iso(SetExpr),
}

/// Flattens a normalized expression into a union of parts.
pub(crate) fn parts(e: &SetExpr) -> Result<Vec<Part>> {
    Ok(match e {
        SetExpr::Fin(ps) => vec![Part::Sum(Product {
            atoms: vec![Atom::Points(ps.clone())],
        })],
        SetExpr::Geom(g) => vec![Part::Sum(Product {
            atoms: vec![Atom::Seq(g.clone())],
        })],
        SetExpr::Tail(t) => vec![Part::Sum(Product {
            atoms: vec![Atom::Ray(t.clone())],
        })],
        SetExpr::Affine { .. } => {
            let folded = crate::normalize::fold_affine(e, &Rat::one(), &Rat::zero());
            parts(&folded)?
        }
        SetExpr::Iso(child) => vec![Part::Iso((**child).clone())],
        SetExpr::Union(cs) => {
            let mut out = Vec::new();
            for c in cs {
                out.extend(parts(c)?);
            }
            out
        }
        SetExpr::MSum(cs) => {
            let mut acc: Vec<Product> = vec![Product { atoms: Vec::new() }];
            for c in cs {
                let mut next = Vec::new();
                for p in parts(c)? {
                    let Part::Sum(p) = p else {
                        return Err(Error::Validation(
                            "iso(...) cannot appear inside msum".into(),
                        ));
                    };
                    for a in &acc {
                        let mut atoms = a.atoms.clone();
                        atoms.extend(p.atoms.iter().cloned());
                        next.push(Product { atoms });
                    }
                }
                acc = next;
            }
            acc.into_iter().map(Part::Sum).collect()
        }
    })
}

/// `w * q^k` for `k >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Term {
    w: Rat,
    q: Rat,
}

/// Decides whether two products share a point.
pub(crate) fn intersects(p: &Product, q: &Product) -> Result<bool> {
    let mut consts: BTreeSet<Rat> = BTreeSet::from([Rat::zero()]);
    let mut seqs: Vec<(Geom, bool)> = Vec::new();
    let mut rays: Vec<Rat> = Vec::new();
    let mut shift = Rat::zero();
    for (prod, positive) in [(p, true), (q, false)] {
        for a in &prod.atoms {
            match a {
                Atom::Points(ps) => {
                    consts = consts
                        .iter()
                        .flat_map(|c| ps.iter().map(move |x| if positive { c + x } else { c - x }))
                        .collect();
                }
                Atom::Seq(g) => seqs.push((g.clone(), positive)),
                Atom::Ray(t) => {
                    let s = t.signed_step();
                    if positive {
                        shift += &t.start;
                        rays.push(s);
                    } else {
                        shift -= &t.start;
                        rays.push(-s);
                    }
                }
            }
        }
    }
    branch_seqs(&seqs, 0, shift, Vec::new(), &consts, &rays)
}

fn branch_seqs(
    seqs: &[(Geom, bool)],
    idx: usize,
    shift: Rat,
    terms: Vec<Term>,
    consts: &BTreeSet<Rat>,
    rays: &[Rat],
) -> Result<bool> {
    if idx == seqs.len() {
        for c in consts {
            let target = -(c + &shift);
            if solve_with_tails(&terms, rays, &target)? {
                return Ok(true);
            }
        }
        return Ok(false);
    }
    let (g, positive) = &seqs[idx];
    let sign = |x: &Rat| if *positive { x.clone() } else { -x };
    let shift = shift + sign(&g.limit);
    if g.with_limit && branch_seqs(seqs, idx + 1, shift.clone(), terms.clone(), consts, rays)? {
        return Ok(true);
    }
    let mut terms = terms;
    terms.push(Term {
        w: sign(&g.scale),
        q: g.ratio.clone(),
    });
    branch_seqs(seqs, idx + 1, shift, terms, consts, rays)
}

fn solve_with_tails(terms: &[Term], rays: &[Rat], target: &Rat) -> Result<bool> {
    if rays.is_empty() {
        return exp_solve(terms, target);
    }
    let mass: Rat = terms.iter().map(|t| t.w.abs()).sum();
    let lo = target - &mass;
    let hi = target + &mass;
    let pos: Vec<&Rat> = rays.iter().filter(|c| c.is_positive()).collect();
    let neg: Vec<&Rat> = rays.iter().filter(|c| c.is_negative()).collect();
    if !pos.is_empty() && !neg.is_empty() {
        // Mixed directions reach every multiple of the lattice step.
        let g = rays[1..].iter().fold(rays[0].abs(), |g, c| g.gcd(c));
        let nlo = (&lo / &g).ceil();
        let nhi = (&hi / &g).floor();
        if nhi < nlo {
            return Ok(false);
        }
        let count = (&nhi - &nlo).to_i64().unwrap_or(i64::MAX);
        if count as u64 > MAX_TAIL_VALUES {
            return Err(Error::Unsupported("tail window too large".into()));
        }
        let mut n = nlo;
        while n <= nhi {
            if exp_solve(terms, &(target - &n * &g))? {
                return Ok(true);
            }
            n = n + Rat::one();
        }
        return Ok(false);
    }
    // One direction: bounded enumeration of index vectors.
    let (coefs, lo, hi) = if pos.is_empty() {
        let c: Vec<Rat> = neg.iter().map(|c| c.abs()).collect();
        (c, -&hi, -&lo)
    } else {
        (pos.iter().map(|c| (*c).clone()).collect::<Vec<_>>(), lo, hi)
    };
    let flip = pos.is_empty();
    let mut found = false;
    enumerate_ray_sums(&coefs, 0, Rat::zero(), &lo, &hi, &mut |s| {
        let t = if flip { -s } else { s.clone() };
        if exp_solve(terms, &(target - &t))? {
            found = true;
            return Ok(true);
        }
        Ok(false)
    })?;
    Ok(found)
}

fn enumerate_ray_sums(
    coefs: &[Rat],
    idx: usize,
    partial: Rat,
    lo: &Rat,
    hi: &Rat,
    visit: &mut dyn FnMut(&Rat) -> Result<bool>,
) -> Result<bool> {
    if &partial > hi {
        return Ok(false);
    }
    if idx == coefs.len() {
        if &partial >= lo {
            return visit(&partial);
        }
        return Ok(false);
    }
    let mut s = partial;
    while &s <= hi {
        if enumerate_ray_sums(coefs, idx + 1, s.clone(), lo, hi, visit)? {
            return Ok(true);
        }
        s += &coefs[idx];
    }
    Ok(false)
}

/// Is `sum w_l q_l^{k_l} = target` solvable with every `k_l >= 0`?
fn exp_solve(terms: &[Term], target: &Rat) -> Result<bool> {
    if terms.is_empty() {
        return Ok(target.is_zero());
    }
    let mass: Rat = terms.iter().map(|t| t.w.abs()).sum();
    if target.abs() > mass {
        return Ok(false);
    }
    if target.is_zero() {
        return homogeneous(terms);
    }
    let threshold = target.abs() / Rat::from(terms.len() as i64);
    for (i, t) in terms.iter().enumerate() {
        let mut val = t.w.clone();
        // Others are kept no larger than the chosen term; the cap only
        // shrinks, so the scaling carries over between iterations.
        let mut others: Vec<Term> = terms
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, o)| o.clone())
            .collect();
        loop {
            let cap = val.abs();
            if cap < threshold {
                break;
            }
            let mut rest_mass = Rat::zero();
            for o in &mut others {
                while o.w.abs() > cap {
                    o.w = &o.w * &o.q;
                }
                rest_mass += &o.w.abs();
            }
            let rest = target - &val;
            if rest.abs() <= rest_mass && exp_solve(&others, &rest)? {
                return Ok(true);
            }
            val = val * &t.q;
        }
    }
    Ok(false)
}

fn homogeneous(terms: &[Term]) -> Result<bool> {
    match terms.len() {
        0 => return Ok(true),
        1 => return Ok(false),
        _ => {}
    }
    // Negative ratios: split each exponent by parity so that every ratio is
    // positive.
    let mut variants: Vec<Vec<Term>> = vec![Vec::new()];
    for t in terms {
        if t.q.is_negative() {
            let sq = &t.q * &t.q;
            let mut next = Vec::with_capacity(variants.len() * 2);
            for v in &variants {
                let mut even = v.clone();
                even.push(Term {
                    w: t.w.clone(),
                    q: sq.clone(),
                });
                let mut odd = v.clone();
                odd.push(Term {
                    w: &t.w * &t.q,
                    q: sq.clone(),
                });
                next.push(even);
                next.push(odd);
            }
            variants = next;
        } else {
            for v in &mut variants {
                v.push(t.clone());
            }
        }
    }
    for v in variants {
        if homogeneous_positive(&v)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Prime-exponent vector of a positive rational.
type Valuation = BTreeMap<BigInt, i64>;

fn factor_into(n: &BigInt, sign: i64, out: &mut Valuation) {
    let mut n = n.abs();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(100_000u32);
    while !n.is_one() && p <= limit {
        if &p * &p > n {
            break;
        }
        while (&n % &p).is_zero() {
            n /= &p;
            *out.entry(p.clone()).or_insert(0) += sign;
        }
        p += 1u32;
    }
    if !n.is_one() {
        *out.entry(n).or_insert(0) += sign;
    }
    out.retain(|_, v| *v != 0);
}

fn valuation(q: &Rat) -> Valuation {
    let mut v = Valuation::new();
    factor_into(q.numer(), 1, &mut v);
    factor_into(q.denom(), -1, &mut v);
    v
}

/// Splits `q = base^e` with `base` primitive; returns (primitive vector, e).
fn primitive(q: &Rat) -> (Valuation, u64) {
    let v = valuation(q);
    let g = v.values().fold(0i64, |g, x| g.gcd(x)).unsigned_abs();
    let prim = v.into_iter().map(|(p, x)| (p, x / g as i64)).collect();
    (prim, g)
}

fn base_of(prim: &Valuation) -> Rat {
    prim.iter().fold(Rat::one(), |acc, (p, e)| {
        acc * Rat::from(p.clone()).pow(*e as i32)
    })
}

fn homogeneous_positive(terms: &[Term]) -> Result<bool> {
    let mut classes: BTreeMap<Valuation, Vec<(Rat, u64)>> = BTreeMap::new();
    for t in terms {
        let (prim, e) = primitive(&t.q);
        classes.entry(prim).or_default().push((t.w.clone(), e));
    }
    if classes.len() == 1 {
        let (prim, members) = classes.into_iter().next().unwrap();
        return single_class(&base_of(&prim), &members);
    }
    let keys: Vec<&Valuation> = classes.keys().collect();
    for (i, a) in keys.iter().enumerate() {
        for b in &keys[i + 1..] {
            if a.keys().any(|p| b.contains_key(p)) {
                return Err(Error::Unsupported(
                    "cancellation between geometric ratios that share prime factors".into(),
                ));
            }
        }
    }
    let denom = terms.iter().fold(BigInt::one(), |d, t| d.lcm(t.w.denom()));
    let unit = Rat::from_big(BigInt::one(), denom);
    let groups: Vec<(Rat, Vec<(Rat, u64)>)> = classes
        .into_iter()
        .map(|(prim, members)| (base_of(&prim), members))
        .collect();
    let masses: Vec<Rat> = groups
        .iter()
        .map(|(_, m)| m.iter().map(|(w, _)| w.abs()).sum())
        .collect();
    let mut budget = 1u64;
    for m in &masses[..masses.len() - 1] {
        let n = (m / &unit).floor().to_i64().unwrap_or(i64::MAX) as u64;
        budget = budget.saturating_mul(2 * n + 1);
    }
    if budget > MAX_CLASS_CANDIDATES {
        return Err(Error::Unsupported(
            "too many candidate class sums in mixed-ratio cancellation".into(),
        ));
    }
    assign_class_values(&groups, &masses, 0, Rat::zero(), &unit)
}

fn class_attains(base: &Rat, members: &[(Rat, u64)], value: &Rat) -> Result<bool> {
    if value.is_zero() {
        single_class(base, members)
    } else {
        let terms: Vec<Term> = members
            .iter()
            .map(|(w, e)| Term {
                w: w.clone(),
                q: base.pow(*e as i32),
            })
            .collect();
        exp_solve(&terms, value)
    }
}

fn assign_class_values(
    groups: &[(Rat, Vec<(Rat, u64)>)],
    masses: &[Rat],
    idx: usize,
    partial: Rat,
    unit: &Rat,
) -> Result<bool> {
    let remaining: Rat = masses[idx..].iter().cloned().sum();
    if partial.abs() > remaining {
        return Ok(false);
    }
    let (base, members) = &groups[idx];
    if idx + 1 == groups.len() {
        return class_attains(base, members, &-partial);
    }
    let n = (&masses[idx] / unit).floor();
    let mut j = -n.clone();
    while j <= n {
        let v = &j * unit;
        if class_attains(base, members, &v)?
            && assign_class_values(groups, masses, idx + 1, &partial + &v, unit)?
        {
            return Ok(true);
        }
        j = j + Rat::one();
    }
    Ok(false)
}

/// All ratios are positive powers `base^e`.
fn single_class(base: &Rat, members: &[(Rat, u64)]) -> Result<bool> {
    let l = members.iter().fold(1u64, |l, (_, e)| l.lcm(e));
    let common = base.pow(l as i32);
    // k = (l/e) j + t, t in [0, l/e): every term becomes w base^{e t} common^j.
    let mut combos: Vec<Vec<Rat>> = vec![Vec::new()];
    for (w, e) in members {
        let period = l / e;
        let mut next = Vec::with_capacity(combos.len() * period as usize);
        for c in &combos {
            for t in 0..period {
                let mut c2 = c.clone();
                c2.push(w * base.pow((e * t) as i32));
                next.push(c2);
            }
        }
        combos = next;
    }
    for ws in combos {
        if same_ratio_zero(&ws, &common)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Is `sum w_l r^{j_l} = 0` solvable? Shift so the minimum exponent is 0.
fn same_ratio_zero(ws: &[Rat], r: &Rat) -> Result<bool> {
    let n = ws.len();
    if n == 0 {
        return Ok(true);
    }
    if n == 1 {
        return Ok(false);
    }
    for mask in 1u32..(1u32 << n) {
        let mut lead = Rat::zero();
        let mut rest = Vec::new();
        for (i, w) in ws.iter().enumerate() {
            if mask & (1 << i) != 0 {
                lead += w;
            } else {
                rest.push(w * r);
            }
        }
        let ok = if rest.is_empty() {
            lead.is_zero()
        } else if lead.is_zero() {
            same_ratio_zero(&rest, r)?
        } else {
            let terms: Vec<Term> = rest.into_iter().map(|w| Term { w, q: r.clone() }).collect();
            exp_solve(&terms, &-lead)?
        };
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Direction;
    use crate::rat::rat;

    fn seq(c: Rat, s: Rat, q: Rat, closed: bool) -> Atom {
        Atom::Seq(Geom::new(c, s, q, closed).unwrap())
    }

    fn prod(atoms: Vec<Atom>) -> Product {
        Product { atoms }
    }

    /// Brute force over exponents `< depth` for single-term-per-side checks.
    fn brute(ws: &[(Rat, Rat)], target: &Rat, depth: u32) -> bool {
        fn go(ws: &[(Rat, Rat)], i: usize, acc: Rat, target: &Rat, depth: u32) -> bool {
            if i == ws.len() {
                return &acc == target;
            }
            (0..depth).any(|k| {
                go(
                    ws,
                    i + 1,
                    &acc + &ws[i].0 * ws[i].1.pow(k as i32),
                    target,
                    depth,
                )
            })
        }
        go(ws, 0, Rat::zero(), target, depth)
    }

    #[test]
    fn sum_of_halves_hits_powers() {
        // 2^-j + 2^-k = 2^-(m) has solutions (j = k = m + 1).
        let a = prod(vec![
            seq(Rat::zero(), Rat::one(), rat(1, 2), false),
            seq(Rat::zero(), Rat::one(), rat(1, 2), false),
        ]);
        let b = prod(vec![seq(Rat::zero(), Rat::one(), rat(1, 2), false)]);
        assert!(intersects(&a, &b).unwrap());
    }

    #[test]
    fn halves_plus_thirds_avoid_both() {
        let a = prod(vec![
            seq(Rat::zero(), Rat::one(), rat(1, 2), false),
            seq(Rat::zero(), Rat::one(), rat(1, 3), false),
        ]);
        let halves = prod(vec![seq(Rat::zero(), Rat::one(), rat(1, 2), true)]);
        let thirds = prod(vec![seq(Rat::zero(), Rat::one(), rat(1, 3), true)]);
        assert!(!intersects(&a, &halves).unwrap());
        assert!(!intersects(&a, &thirds).unwrap());
    }

    #[test]
    fn point_membership_in_sum() {
        let a = prod(vec![
            seq(Rat::zero(), Rat::one(), rat(1, 2), true),
            Atom::Points(vec![Rat::zero(), Rat::one()]),
        ]);
        assert!(intersects(&a, &Product::point(rat(9, 8))).unwrap());
        assert!(!intersects(&a, &Product::point(rat(5, 3))).unwrap());
        assert!(intersects(&a, &Product::point(Rat::zero())).unwrap());
    }

    #[test]
    fn tails_meet_on_lattice() {
        let up = Tail::new(Rat::zero(), Rat::int(2), Direction::Up).unwrap();
        let down = Tail::new(Rat::int(7), Rat::int(3), Direction::Down).unwrap();
        let a = prod(vec![Atom::Ray(up.clone())]);
        let b = prod(vec![Atom::Ray(down)]);
        // 4 = 7 - 3.
        assert!(intersects(&a, &b).unwrap());
        let c = prod(vec![Atom::Ray(
            Tail::new(Rat::one(), Rat::int(2), Direction::Up).unwrap(),
        )]);
        assert!(!intersects(&a, &c).unwrap());
        let d = prod(vec![
            Atom::Ray(up),
            Atom::Points(vec![Rat::zero(), rat(1, 2)]),
        ]);
        assert!(intersects(&d, &Product::point(rat(21, 2))).unwrap());
        assert!(!intersects(&d, &Product::point(rat(-1, 2))).unwrap());
    }

    #[test]
    fn alternating_ratio() {
        // (-1/2)^k hits 1/4 (k = 2) but not -1/4.
        let a = prod(vec![seq(Rat::zero(), Rat::one(), rat(-1, 2), false)]);
        assert!(intersects(&a, &Product::point(rat(1, 4))).unwrap());
        assert!(!intersects(&a, &Product::point(rat(-1, 4))).unwrap());
        // (-1/2)^j + (-1/2)^k = 0 has no solution; (-1/2)^j - (1/4)^k does.
        let b = prod(vec![
            seq(Rat::zero(), Rat::one(), rat(-1, 2), false),
            seq(Rat::zero(), Rat::one(), rat(-1, 2), false),
        ]);
        assert!(!intersects(&b, &Product::point(Rat::zero())).unwrap());
        let c = prod(vec![seq(Rat::zero(), Rat::one(), rat(1, 4), false)]);
        assert!(intersects(&a, &c).unwrap());
    }

    #[test]
    fn agrees_with_brute_force_on_small_systems() {
        let ratios = [rat(1, 2), rat(1, 3), rat(-1, 2), rat(1, 4), rat(2, 3)];
        let coefs = [
            Rat::one(),
            Rat::int(-1),
            Rat::int(2),
            rat(3, 2),
            Rat::int(-3),
        ];
        let targets = [
            Rat::zero(),
            rat(1, 2),
            rat(3, 4),
            rat(-1, 6),
            Rat::one(),
            rat(5, 9),
        ];
        for (i, q1) in ratios.iter().enumerate() {
            for q2 in &ratios[i..] {
                for w1 in &coefs {
                    for w2 in &coefs {
                        for t in &targets {
                            let terms = vec![
                                Term {
                                    w: w1.clone(),
                                    q: q1.clone(),
                                },
                                Term {
                                    w: w2.clone(),
                                    q: q2.clone(),
                                },
                            ];
                            let got = match exp_solve(&terms, t) {
                                Ok(b) => b,
                                Err(_) => continue,
                            };
                            let expect =
                                brute(&[(w1.clone(), q1.clone()), (w2.clone(), q2.clone())], t, 24);
                            // Brute force can only find solutions; when it
                            // does, the solver must agree. When it does not,
                            // the solver must not claim one below depth 24
                            // either unless the solution is deep; two-term
                            // systems here have all solutions shallow.
                            assert_eq!(got, expect, "{w1}*{q1}^a + {w2}*{q2}^b = {t}");
                        }
                    }
                }
            }
        }
    }
}
