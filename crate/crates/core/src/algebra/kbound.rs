//! Upper bound on the number of discrete pieces of a linear image of a
//! product of compact sets.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// `N_i` means factor `i` is a union of at most `N_i + 1` discrete sets
/// (its rank minus one).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankVector {
    pub n: Vec<u32>,
}

impl RankVector {
    pub fn new(n: Vec<u32>) -> Result<RankVector> {
        if n.is_empty() {
            return Err(Error::Validation("rank vector must be nonempty".into()));
        }
        Ok(RankVector { n })
    }

    /// From Cantor–Bendixson ranks (each at least 1).
    pub fn from_ranks(ranks: &[usize]) -> Result<RankVector> {
        let n = ranks
            .iter()
            .map(|&r| {
                if r == 0 {
                    Err(Error::Validation("factor ranks must be at least 1".into()))
                } else {
                    u32::try_from(r - 1).map_err(|_| Error::Validation("rank too large".into()))
                }
            })
            .collect::<Result<_>>()?;
        RankVector::new(n)
    }
}

/// `K(N) = 1` when every `N_i = 0`, else `1 + sum_{N_i >= 1} K(N - e_i)`.
pub fn kbound(rv: &RankVector) -> Result<u64> {
    let mut memo = HashMap::new();
    let mut key = rv.n.clone();
    // The recursion is symmetric in the coordinates.
    key.sort_unstable();
    k_rec(&key, &mut memo)
}

fn k_rec(n: &[u32], memo: &mut HashMap<Vec<u32>, u64>) -> Result<u64> {
    if n.iter().all(|&x| x == 0) {
        return Ok(1);
    }
    if let Some(&k) = memo.get(n) {
        return Ok(k);
    }
    let mut total: u64 = 1;
    for i in 0..n.len() {
        if n[i] == 0 || (i > 0 && n[i] == n[i - 1]) {
            continue;
        }
        // Equal coordinates give equal sub-bounds; count them once each.
        let mult = n.iter().filter(|&&x| x == n[i]).count() as u64;
        let mut next = n.to_vec();
        next[i] -= 1;
        next.sort_unstable();
        let sub = k_rec(&next, memo)?;
        total = sub
            .checked_mul(mult)
            .and_then(|s| total.checked_add(s))
            .ok_or_else(|| Error::Validation("bound exceeds 64 bits".into()))?;
    }
    memo.insert(n.to_vec(), total);
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: &[u32]) -> u64 {
        kbound(&RankVector::new(n.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(k(&[0]), 1);
        assert_eq!(k(&[1]), 2);
        assert_eq!(k(&[1, 1]), 5);
        assert_eq!(k(&[1, 0]), 2);
        assert_eq!(k(&[1, 1, 1]), 16);
        assert_eq!(k(&[2]), 3);
        assert_eq!(k(&[0, 0, 0]), 1);
    }

    #[test]
    fn matches_plain_recursion() {
        fn plain(n: &mut Vec<u32>) -> u64 {
            if n.iter().all(|&x| x == 0) {
                return 1;
            }
            let mut t = 1;
            for i in 0..n.len() {
                if n[i] > 0 {
                    n[i] -= 1;
                    t += plain(n);
                    n[i] += 1;
                }
            }
            t
        }
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..3 {
                    assert_eq!(k(&[a, b, c]), plain(&mut vec![a, b, c]), "{a} {b} {c}");
                }
            }
        }
    }

    #[test]
    fn rejects_empty_and_overflow() {
        assert!(RankVector::new(vec![]).is_err());
        assert!(kbound(&RankVector::new(vec![60; 8]).unwrap()).is_err());
    }
}
