//! Admissible ternary words and the Cantor-like set built from them.
//!
//! A word `(i_1, ..., i_n)` over `{0, 1, 2}` is admissible when its last
//! digit is nonzero and no earlier digit is 1. Each word carries
//!
//! ```text
//!     u = sum_{j<n} i_j / 3^j,    v = u + i_n / 3^n,
//!     a_k = v - (-1)^{i_n} / (k 3^{n+1})                    (k >= 2)
//! ```
//!
//! and an open interval `I` (left of `u + 2/3^n` for `i_n = 2`, right of
//! `u + 1/3^n` for `i_n = 1`) holding every `a_k`. The intervals of
//! distinct words are disjoint, so `E = {a_k}` is discrete, while the
//! limits `v` form a set without isolated points.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    digits: Vec<u8>,
}

impl Word {
    pub fn new(digits: Vec<u8>) -> Result<Word> {
        let n = digits.len();
        if n == 0 {
            return Err(Error::Validation("words must be nonempty".into()));
        }
        if let Some(j) = digits.iter().position(|&d| d > 2) {
            return Err(Error::Validation(format!(
                "digit #{} = {} is not in {{0, 1, 2}}",
                j + 1,
                digits[j]
            )));
        }
        if digits[n - 1] == 0 {
            return Err(Error::Validation("the last digit must be 1 or 2".into()));
        }
        if let Some(j) = digits[..n - 1].iter().position(|&d| d == 1) {
            return Err(Error::Validation(format!(
                "digit #{} is 1; only the last digit may be 1",
                j + 1
            )));
        }
        Ok(Word { digits })
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> u8 {
        self.digits[self.digits.len() - 1]
    }

    pub fn u(&self) -> Rat {
        ternary(&self.digits[..self.len() - 1])
    }

    pub fn v(&self) -> Rat {
        ternary(&self.digits)
    }

    /// Open interval `(lo, hi)`.
    pub fn interval(&self) -> (Rat, Rat) {
        let n = self.len() as i32;
        let u = self.u();
        let p = third(n);
        let p1 = third(n + 1);
        if self.last() == 1 {
            let lo = &u + &p;
            let hi = &lo + &p1;
            (lo, hi)
        } else {
            (&u + &p + &p1 * &Rat::int(2), &u + &p * &Rat::int(2))
        }
    }

    /// `a_k` for `k >= 1`.
    pub fn point(&self, k: u64) -> Rat {
        let step = third(self.len() as i32 + 1) / Rat::from(k as i64);
        if self.last() == 1 {
            self.v() + step
        } else {
            self.v() - step
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

fn third(n: i32) -> Rat {
    Rat::new(1, 3).pow(n)
}

fn ternary(ds: &[u8]) -> Rat {
    ds.iter()
        .enumerate()
        .map(|(j, &d)| Rat::from(d as i64) * third(j as i32 + 1))
        .sum()
}

/// All admissible words of length at most `max_len`, by length and then
/// lexicographically.
pub fn enumerate_words(max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for n in 1..=max_len {
        for mask in 0..1u64 << (n - 1) {
            // Bits of `mask`, most significant first, pick 0 or 2.
            let prefix: Vec<u8> = (0..n - 1)
                .map(|j| if mask >> (n - 2 - j) & 1 == 1 { 2 } else { 0 })
                .collect();
            for last in [1u8, 2] {
                let mut d = prefix.clone();
                d.push(last);
                out.push(Word { digits: d });
            }
        }
    }
    out
}

/// Word whose `v` lies within `3^-(n+k-2)` of `v(sigma)`: for last digit 1,
/// the prefix followed by `0` and `k - 1` twos (`k >= 2`); for last digit
/// 2, `sigma` followed by `k - 1` zeros and a one (`k >= 1`).
pub fn non_isolation_witness(sigma: &Word, k: usize) -> Result<Word> {
    let n = sigma.len();
    let mut d: Vec<u8> = Vec::with_capacity(n + k);
    if sigma.last() == 1 {
        if k < 2 {
            return Err(Error::Precondition(
                "k must be at least 2 when the last digit is 1".into(),
            ));
        }
        d.extend_from_slice(&sigma.digits[..n - 1]);
        d.push(0);
        d.extend(std::iter::repeat_n(2, k - 1));
    } else {
        if k < 1 {
            return Err(Error::Precondition("k must be at least 1".into()));
        }
        d.extend_from_slice(&sigma.digits);
        d.extend(std::iter::repeat_n(0, k - 1));
        d.push(1);
    }
    Word::new(d).map_err(|e| Error::Construction(format!("witness for {sigma}: {e}")))
}

/// `3^-(n+k-2)`.
pub fn witness_bound(n: usize, k: usize) -> Rat {
    third(n as i32 + k as i32 - 2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordRecord {
    pub word: Word,
    pub u: Rat,
    pub v: Rat,
    pub interval: (Rat, Rat),
    /// `a_k` for `k = 2..=k_max`.
    pub points: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CantorInstance {
    pub max_len: usize,
    pub k_max: u64,
    pub records: Vec<WordRecord>,
}

impl CantorInstance {
    /// Truncation of `E`, sorted.
    pub fn e_points(&self) -> Vec<Rat> {
        let mut v: Vec<Rat> = self
            .records
            .iter()
            .flat_map(|r| r.points.iter().cloned())
            .collect();
        v.sort();
        v
    }

    /// Truncation of `D`, sorted.
    pub fn d_points(&self) -> Vec<Rat> {
        let mut v: Vec<Rat> = self.records.iter().map(|r| r.v.clone()).collect();
        v.sort();
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CantorReport {
    pub words: usize,
    pub points: usize,
    pub containment_violations: Vec<String>,
    pub disjointness_violations: Vec<String>,
    pub range_violations: Vec<String>,
    /// `D` points with no other `D` point within `3^-(L-2)`.
    pub density_violations: Vec<String>,
    /// Witnesses (length-`n` words, `k <= 6`) failing admissibility,
    /// distinctness or the distance bound.
    pub witness_violations: Vec<String>,
}

impl CantorReport {
    pub fn pass(&self) -> bool {
        self.containment_violations.is_empty()
            && self.disjointness_violations.is_empty()
            && self.range_violations.is_empty()
            && self.density_violations.is_empty()
            && self.witness_violations.is_empty()
    }
}

fn records(max_len: usize, k_max: u64) -> Result<Vec<WordRecord>> {
    if max_len == 0 || k_max < 2 {
        return Err(Error::Precondition(
            "need max length >= 1 and k_max >= 2 (a_1 sits on the interval boundary)".into(),
        ));
    }
    Ok(enumerate_words(max_len)
        .into_par_iter()
        .map(|w| WordRecord {
            u: w.u(),
            v: w.v(),
            interval: w.interval(),
            points: (2..=k_max).map(|k| w.point(k)).collect(),
            word: w,
        })
        .collect())
}

struct Checks {
    containment: Vec<String>,
    disjoint: Vec<String>,
    range: Vec<String>,
}

fn check_records(rs: &[WordRecord]) -> Checks {
    let one = Rat::one();
    let mut containment = Vec::new();
    let mut range = Vec::new();
    for r in rs {
        let (lo, hi) = &r.interval;
        for (i, a) in r.points.iter().enumerate() {
            if !(a > lo && a < hi) {
                containment.push(format!("{}: a_{} = {a} not in ({lo}, {hi})", r.word, i + 2));
            }
        }
        if !(r.v.is_positive() && r.v < one) {
            range.push(format!("{}: v = {} not in (0, 1)", r.word, r.v));
        }
    }
    let mut order: Vec<&WordRecord> = rs.iter().collect();
    order.sort_by(|a, b| a.interval.0.cmp(&b.interval.0));
    let mut disjoint = Vec::new();
    for w in order.windows(2) {
        if w[0].interval.1 > w[1].interval.0 {
            disjoint.push(format!("I{} and I{} overlap", w[0].word, w[1].word));
        }
    }
    Checks {
        containment,
        disjoint,
        range,
    }
}

/// Builds the truncated construction, failing on the first broken check.
pub fn cantor_build(max_len: usize, k_max: u64) -> Result<CantorInstance> {
    let rs = records(max_len, k_max)?;
    let c = check_records(&rs);
    if let Some(msg) = c
        .containment
        .first()
        .or(c.disjoint.first())
        .or(c.range.first())
    {
        return Err(Error::Construction(msg.clone()));
    }
    Ok(CantorInstance {
        max_len,
        k_max,
        records: rs,
    })
}

/// All checks, collected rather than aborting.
pub fn cantor_verify(max_len: usize, k_max: u64) -> Result<CantorReport> {
    let rs = records(max_len, k_max)?;
    let c = check_records(&rs);
    let mut d: Vec<(Rat, &Word)> = rs.iter().map(|r| (r.v.clone(), &r.word)).collect();
    d.sort();
    let scale = witness_bound(max_len, 0);
    let mut density = Vec::new();
    for i in 0..d.len() {
        let mut near = None;
        for j in [i.wrapping_sub(1), i + 1] {
            if let Some((x, _)) = d.get(j) {
                let gap = (x - &d[i].0).abs();
                near = Some(near.map_or(gap.clone(), |g: Rat| g.min(gap)));
            }
        }
        if near.is_none_or(|g| g > scale) {
            density.push(format!("{}: no other point of D within {scale}", d[i].1));
        }
    }
    let mut witness = Vec::new();
    for r in &rs {
        let w = &r.word;
        let k_lo = if w.last() == 1 { 2 } else { 1 };
        for k in k_lo..=6 {
            match non_isolation_witness(w, k) {
                Err(e) => witness.push(format!("{w}, k={k}: {e}")),
                Ok(t) => {
                    let gap = (t.v() - &r.v).abs();
                    if t == *w || !gap.is_positive() || gap > witness_bound(w.len(), k) {
                        witness.push(format!("{w}, k={k}: witness {t} at distance {gap}"));
                    }
                }
            }
        }
    }
    Ok(CantorReport {
        words: rs.len(),
        points: rs.iter().map(|r| r.points.len()).sum(),
        containment_violations: c.containment,
        disjointness_violations: c.disjoint,
        range_violations: c.range,
        density_violations: density,
        witness_violations: witness,
    })
}
