//! Randomized check that linear images `v(E^n)` are closed and finite
//! unions of discrete sets.
//!
//! `E` is split into a compact part `C` and a tail part `T`. For each
//! `sigma in {0,1}^n` the image of `C` on the coordinates with
//! `sigma_i = 0` and of `T` on the others is `Y_sigma + Z_sigma`:
//! `Y_sigma` goes through [`linear_image_decompose`], and when `Z_sigma`
//! is present the sum goes through [`tail_combine`].

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::decompose::linear_image_decompose;
use crate::algebra::tail_combine::tail_combine;
use crate::error::{Error, Result};
use crate::expr::{Direction, SetExpr, Tail};
use crate::normalize::normalize;
use crate::rat::Rat;
use crate::topology::is_closed_normalized;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialReport {
    pub index: usize,
    pub coeffs: Vec<Rat>,
    /// Bound on the number of discrete pieces of the image.
    pub k: u64,
    pub pieces: u64,
    pub all_discrete: bool,
    pub closed: bool,
    pub pass: bool,
    /// Set when the trial could not be decided.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisReport {
    pub arity: usize,
    pub seed: u64,
    pub trials: Vec<TrialReport>,
}

impl HypothesisReport {
    pub fn pass(&self) -> bool {
        self.trials.iter().all(|t| t.pass)
    }
}

/// Nonzero numerator in `[-9, 9]`, denominator in `[1, 9]`.
pub fn sample_coeffs(seed: u64, index: usize, arity: usize) -> Vec<Rat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    (0..arity)
        .map(|_| {
            let mut n = 0;
            while n == 0 {
                n = rng.gen_range(-9..=9);
            }
            Rat::new(n, rng.gen_range(1..=9))
        })
        .collect()
}

pub fn hypothesis_check(
    e: &SetExpr,
    arity: usize,
    trials: usize,
    seed: u64,
) -> Result<HypothesisReport> {
    if arity == 0 || trials == 0 {
        return Err(Error::Validation(
            "arity and trials must be positive".into(),
        ));
    }
    let (compact, tails) = split(&normalize(e)?)?;
    let results: Vec<TrialReport> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let coeffs = sample_coeffs(seed, i, arity);
            match trial(compact.as_ref(), &tails, &coeffs) {
                Ok((k, pieces, all_discrete, closed)) => TrialReport {
                    index: i,
                    coeffs,
                    k,
                    pieces,
                    all_discrete,
                    closed,
                    pass: all_discrete && closed && pieces <= k,
                    error: None,
                },
                Err(err) => TrialReport {
                    index: i,
                    coeffs,
                    k: 0,
                    pieces: 0,
                    all_discrete: false,
                    closed: false,
                    pass: false,
                    error: Some(err.to_string()),
                },
            }
        })
        .collect();
    Ok(HypothesisReport {
        arity,
        seed,
        trials: results,
    })
}

/// Compact part (if any) and the tails of a normalized set.
fn split(e: &SetExpr) -> Result<(Option<SetExpr>, Vec<Tail>)> {
    let members: Vec<&SetExpr> = match e {
        SetExpr::Union(cs) => cs.iter().collect(),
        other => vec![other],
    };
    let mut compact = Vec::new();
    let mut tails = Vec::new();
    for m in members {
        match m {
            SetExpr::Tail(t) => tails.push(t.clone()),
            other if other.is_bounded() => compact.push(other.clone()),
            _ => {
                return Err(Error::Precondition(
                    "E must be compact or a compact set together with tails".into(),
                ))
            }
        }
    }
    let compact = SetExpr::union_of(compact)
        .map(|c| normalize(&c))
        .transpose()?;
    if let Some(c) = &compact {
        if !is_closed_normalized(c)? {
            return Err(Error::Precondition(
                "the bounded part of E is not closed".into(),
            ));
        }
    }
    Ok((compact, tails))
}

/// `(K, pieces, all pieces discrete, image closed)`.
fn trial(compact: Option<&SetExpr>, tails: &[Tail], v: &[Rat]) -> Result<(u64, u64, bool, bool)> {
    let n = v.len();
    let sigmas: Vec<u64> = if tails.is_empty() {
        vec![0]
    } else if compact.is_none() {
        vec![(1u64 << n) - 1]
    } else {
        (0..1u64 << n).collect()
    };
    let (mut k, mut pieces, mut discrete, mut closed) = (0u64, 0u64, true, true);
    for sigma in sigmas {
        let on_tail = |i: usize| sigma >> i & 1 == 1;
        let ys: Vec<SetExpr> = (0..n)
            .filter(|&i| !on_tail(i))
            .map(|_| compact.unwrap().clone())
            .collect();
        let yb: Vec<Rat> = (0..n)
            .filter(|&i| !on_tail(i))
            .map(|i| v[i].clone())
            .collect();
        let zb: Vec<Rat> = (0..n)
            .filter(|&i| on_tail(i))
            .map(|i| v[i].clone())
            .collect();
        let (y, k_y, y_pieces) = if ys.is_empty() {
            (SetExpr::point(Rat::zero()), 1, Vec::new())
        } else {
            let plan = linear_image_decompose(&ys, &yb)?;
            discrete &= plan.all_discrete();
            let count = plan.pieces.len() as u64;
            (plan.image, plan.k, vec![count])
        };
        if zb.is_empty() {
            k = k.saturating_add(k_y);
            pieces += y_pieces[0];
            // Sums of compact closed sets are compact.
            closed &= is_closed_normalized(&y)?;
            continue;
        }
        let z = tail_image(tails, &zb)?;
        let plan = tail_combine(&y, &z, None)?;
        discrete &=
            plan.ordering_holds() && plan.families.iter().all(|f| f.discrete.iter().all(|&b| b));
        k = k.saturating_add(plan.m.saturating_mul(k_y));
        pieces += plan.piece_count() as u64;
        let sum = normalize(&SetExpr::MSum(vec![y, z]))?;
        closed &= is_closed_normalized(&sum)?;
    }
    Ok((k, pieces, discrete, closed))
}

/// `sum_i b_i T` for the union of tails `T`.
fn tail_image(tails: &[Tail], b: &[Rat]) -> Result<SetExpr> {
    let mut choices: Vec<Vec<Tail>> = vec![Vec::new()];
    for bi in b {
        let mut next = Vec::new();
        for c in &choices {
            for t in tails {
                let mut c = c.clone();
                c.push(t.affine(bi, &Rat::zero()));
                next.push(c);
            }
        }
        choices = next;
    }
    let mut members = Vec::new();
    for c in choices {
        members.extend(tail_sum(&c)?);
    }
    normalize(&SetExpr::union_of(members).expect("at least one tail"))
}

/// Minkowski sum of tails, as tails and points.
fn tail_sum(ts: &[Tail]) -> Result<Vec<SetExpr>> {
    let origin: Rat = ts.iter().map(|t| t.start.clone()).sum();
    let g = ts
        .iter()
        .skip(1)
        .fold(ts[0].step.clone(), |g, t| g.gcd(&t.step));
    let up = ts.iter().any(|t| t.dir == Direction::Up);
    let down = ts.iter().any(|t| t.dir == Direction::Down);
    if up && down {
        // Opposite directions reach every point of origin + gZ.
        return Ok(vec![
            SetExpr::tail(origin.clone(), g.clone(), Direction::Up)?,
            SetExpr::tail(&origin - &g, g, Direction::Down)?,
        ]);
    }
    let dir = if up { Direction::Up } else { Direction::Down };
    // Numerical semigroup generated by step_i / g.
    let gens: Vec<u64> = ts
        .iter()
        .map(|t| {
            (&t.step / &g)
                .to_i64()
                .and_then(|x| u64::try_from(x).ok())
                .ok_or_else(|| Error::Unsupported("tail steps too large".into()))
        })
        .collect::<Result<BTreeSet<u64>>>()?
        .into_iter()
        .collect();
    let lo = gens[0];
    let hi = *gens.last().unwrap();
    let bound = lo
        .checked_mul(hi)
        .filter(|&b| b <= 1_000_000)
        .ok_or_else(|| Error::Unsupported("tail steps too large".into()))? as usize;
    let mut reach = vec![false; bound + 1];
    reach[0] = true;
    for x in 1..=bound {
        reach[x] = gens
            .iter()
            .any(|&s| s as usize <= x && reach[x - s as usize]);
    }
    let frobenius = (0..=bound).rev().find(|&x| !reach[x]);
    let sign = if up { Rat::one() } else { Rat::int(-1) };
    let at = |x: usize| &origin + &(&sign * &(&g * &Rat::int(x as i64)));
    let mut out = Vec::new();
    let from = match frobenius {
        None => 0,
        Some(f) => {
            let pts: Vec<Rat> = (0..f).filter(|&x| reach[x]).map(at).collect();
            out.push(SetExpr::fin(pts)?);
            f + 1
        }
    };
    out.push(SetExpr::tail(at(from), g, dir)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use crate::topology::membership;

    #[test]
    fn coefficients_are_deterministic_and_in_range() {
        let a = sample_coeffs(7, 3, 4);
        assert_eq!(a, sample_coeffs(7, 3, 4));
        assert_ne!(a, sample_coeffs(7, 4, 4));
        for c in a {
            assert!(!c.is_zero());
            assert!(c.abs() <= Rat::int(9));
        }
    }

    #[test]
    fn geom_arity_two() {
        let e = SetExpr::geom(Rat::zero(), Rat::one(), rat(1, 2), true).unwrap();
        let r = hypothesis_check(&e, 2, 5, 7).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!(r.trials.iter().all(|t| t.k == 5));
        assert_eq!(r, hypothesis_check(&e, 2, 5, 7).unwrap());
    }

    #[test]
    fn finite_arity_three() {
        let e = SetExpr::fin([Rat::zero(), Rat::one()]).unwrap();
        let r = hypothesis_check(&e, 3, 4, 1).unwrap();
        assert!(r.pass());
        assert!(r.trials.iter().all(|t| t.k == 1 && t.pieces == 1));
    }

    #[test]
    fn with_tail() {
        let e = SetExpr::union(vec![
            SetExpr::geom(Rat::zero(), Rat::one(), rat(1, 2), true).unwrap(),
            SetExpr::tail(Rat::zero(), Rat::one(), Direction::Up).unwrap(),
        ])
        .unwrap();
        let r = hypothesis_check(&e, 1, 4, 3).unwrap();
        assert!(r.pass(), "{r:?}");
        let r2 = hypothesis_check(&e, 2, 2, 3).unwrap();
        assert!(r2.pass(), "{r2:?}");
    }

    #[test]
    fn semigroup_sums() {
        let t = |a: i64, d: i64| Tail::new(Rat::int(a), Rat::int(d), Direction::Up).unwrap();
        let s = tail_sum(&[t(0, 3), t(1, 5)]).unwrap();
        let u = normalize(&SetExpr::union_of(s).unwrap()).unwrap();
        // 3a + 5b + 1: misses 2, 3, 5, 6, 8 (i.e. 1, 2, 4, 5, 7 unreachable in {3,5}).
        for x in [1, 4, 6, 7, 9, 10, 11, 12, 13, 14, 15] {
            assert!(membership(&u, &Rat::int(x)).unwrap(), "{x}");
        }
        for x in [0, 2, 3, 5, 8] {
            assert!(!membership(&u, &Rat::int(x)).unwrap(), "{x}");
        }
        let mixed = tail_sum(&[
            t(0, 4),
            Tail::new(Rat::zero(), Rat::int(6), Direction::Down).unwrap(),
        ])
        .unwrap();
        let u = normalize(&SetExpr::union_of(mixed).unwrap()).unwrap();
        assert!(membership(&u, &Rat::int(-100)).unwrap());
        assert!(!membership(&u, &Rat::int(3)).unwrap());
    }
}
