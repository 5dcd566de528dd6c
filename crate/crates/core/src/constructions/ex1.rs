//! Encoding points `d_1, ..., d_M` of `(0, N)` into an increasing sequence
//!
//! ```text
//!     a_n = N (n + 1)        n odd
//!     a_n = N n + d_{n/2}    n even          (n = 1, 2, ..., 2M)
//! ```
//!
//! whose differences in `(0, N)` are exactly the `d_j`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ex1Instance {
    pub bound: u64,
    pub d: Vec<Rat>,
    /// `a_1, ..., a_{2M}` (stored 0-based).
    pub a: Vec<Rat>,
}

impl Ex1Instance {
    /// `a_n` with 1-based `n`.
    pub fn term(&self, n: usize) -> &Rat {
        &self.a[n - 1]
    }
}

fn check_points(bound: u64, d: &[Rat]) -> Result<Rat> {
    if bound == 0 {
        return Err(Error::Validation("bound N must be positive".into()));
    }
    let n = Rat::from(bound as i64);
    let mut seen = BTreeSet::new();
    for (j, x) in d.iter().enumerate() {
        if !(x.is_positive() && x < &n) {
            return Err(Error::Validation(format!(
                "point #{} = {x} is outside (0, {bound})",
                j + 1
            )));
        }
        if !seen.insert(x) {
            return Err(Error::Validation(format!(
                "point #{} = {x} repeats an earlier point; points must be distinct",
                j + 1
            )));
        }
    }
    Ok(n)
}

pub fn ex1_encode(bound: u64, d: &[Rat]) -> Result<Ex1Instance> {
    let n = check_points(bound, d)?;
    let a: Vec<Rat> = (1..=2 * d.len())
        .map(|i| {
            let k = Rat::from(i as i64);
            if i % 2 == 1 {
                &n * &(k + Rat::one())
            } else {
                &n * &k + &d[i / 2 - 1]
            }
        })
        .collect();
    if let Some(i) = a.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::Construction(format!(
            "sequence not increasing at n = {}",
            i + 1
        )));
    }
    Ok(Ex1Instance {
        bound,
        d: d.to_vec(),
        a,
    })
}

/// `{x : 0 < x < N, x = x1 - x2 for some x1, x2 in e}`.
pub fn ex1_decode(bound: u64, e: &[Rat]) -> BTreeSet<Rat> {
    let n = Rat::from(bound as i64);
    let mut out = BTreeSet::new();
    for x1 in e {
        for x2 in e {
            let x = x1 - x2;
            if x.is_positive() && x < n {
                out.insert(x);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimReport {
    pub pairs_checked: u64,
    /// `(m, n)` with `m < n` where `0 < a_n - a_m < N` disagrees with
    /// `n = m + 1, m odd`.
    pub violations: Vec<(usize, usize)>,
}

impl ClaimReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `0 < a_n - a_m < N  <=>  (n = m + 1 and m odd)` for all
/// `1 <= m < n <= max_index`.
pub fn ex1_claim_check(bound: u64, d: &[Rat], max_index: usize) -> Result<ClaimReport> {
    let inst = ex1_encode(bound, d)?;
    if max_index > inst.a.len() {
        return Err(Error::Validation(format!(
            "max index {max_index} exceeds the {} encoded terms",
            inst.a.len()
        )));
    }
    let nr = Rat::from(bound as i64);
    let mut report = ClaimReport {
        pairs_checked: 0,
        violations: Vec::new(),
    };
    for m in 1..=max_index {
        for n in m + 1..=max_index {
            let diff = inst.term(n) - inst.term(m);
            let small = diff.is_positive() && diff < nr;
            let expected = n == m + 1 && m % 2 == 1;
            report.pairs_checked += 1;
            if small != expected {
                report.violations.push((m, n));
            }
        }
    }
    Ok(report)
}
