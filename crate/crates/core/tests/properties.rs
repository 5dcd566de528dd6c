mod common;

use std::collections::BTreeSet;

use cbset::algebra::{kbound, linear_image_decompose, minkowski_sum, RankVector};
use cbset::constructions::{ex1_decode, ex1_encode};
use cbset::dsl::{parse, render};
use cbset::oracle::{enumerate, sample_points};
use cbset::topology::{acc_points, closure, compile, is_closed, membership, rank};
use cbset::{normalize, Rat, SetExpr};
use common::{any_expr, bounded, nonzero_rat};
use proptest::prelude::*;

/// Words using letter `i` at most `n_i` times: sum over `m <= n` of the
/// multinomial `|m|! / prod m_i!`.
fn words_bound(n: &[u32]) -> u64 {
    fn go(n: &[u32], i: usize, m: &mut Vec<u32>) -> u64 {
        if i == n.len() {
            let total: u32 = m.iter().sum();
            let mut c: u64 = (1..=total as u64).product();
            for &x in m.iter() {
                c /= (1..=x as u64).product::<u64>();
            }
            return c;
        }
        (0..=n[i])
            .map(|x| {
                m.push(x);
                let r = go(n, i + 1, m);
                m.pop();
                r
            })
            .sum()
    }
    go(n, 0, &mut Vec::new())
}

fn k(n: &[u32]) -> u64 {
    kbound(&RankVector::new(n.to_vec()).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kbound_counts_words(n in prop::collection::vec(0u32..4, 1..5)) {
        prop_assert_eq!(k(&n), words_bound(&n));
    }

    #[test]
    fn kbound_is_monotone(n in prop::collection::vec(0u32..4, 1..5), i in 0usize..4) {
        let i = i % n.len();
        let mut m = n.clone();
        m[i] += 1;
        prop_assert!(k(&m) > k(&n));
    }

    #[test]
    fn render_parse_round_trip(e in any_expr()) {
        let text = render(&e);
        prop_assert_eq!(parse(&text).unwrap(), e.clone());
        let n = normalize(&e).unwrap();
        prop_assert_eq!(render(&parse(&render(&n)).unwrap()), render(&n));
    }

    #[test]
    fn closure_is_idempotent_and_closed(e in bounded()) {
        let c = closure(&e).unwrap();
        prop_assert_eq!(closure(&c).unwrap(), c.clone());
        prop_assert!(is_closed(&c).unwrap());
        if let Some(a) = acc_points(&e).unwrap() {
            let m = compile(&c).unwrap();
            for x in enumerate(&a, 6).unwrap().points {
                prop_assert!(m.contains(&x).unwrap(), "acc point {} outside closure", x);
            }
        }
    }

    #[test]
    fn enumerated_points_are_members(e in any_expr()) {
        let m = compile(&e).unwrap();
        for x in enumerate(&e, 6).unwrap().points {
            prop_assert!(m.contains(&x).unwrap(), "{} not in {}", x, render(&e));
        }
    }

    #[test]
    fn minkowski_sum_contains_pairwise_sums(a in bounded(), b in bounded(), seed in any::<u64>()) {
        let s = minkowski_sum(&[a.clone(), b.clone()]).unwrap();
        let xs = sample_points(&a, 8, 5, seed).unwrap();
        let ys = sample_points(&b, 8, 5, seed ^ 1).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            prop_assert!(membership(&s, &(x + y)).unwrap());
        }
    }

    #[test]
    fn ex1_round_trip(bound in 1u64..6, raw in prop::collection::btree_set((1i64..60, 2i64..13), 1..12)) {
        let d: BTreeSet<Rat> = raw
            .into_iter()
            .map(|(n, q)| Rat::new(n % (bound as i64 * q - 1) + 1, q))
            .collect();
        let d: Vec<Rat> = d.into_iter().collect();
        let inst = ex1_encode(bound, &d).unwrap();
        prop_assert_eq!(ex1_decode(bound, &inst.a), d.into_iter().collect::<BTreeSet<_>>());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decomposition_respects_bound(
        e in prop::collection::vec(bounded(), 1..3),
        b in prop::collection::vec(nonzero_rat(), 2),
    ) {
        let es: Vec<SetExpr> = e.iter().map(|x| closure(x).unwrap()).collect();
        let plan = linear_image_decompose(&es, &b[..es.len()]).unwrap();
        prop_assert!(plan.pieces.len() as u64 <= plan.k);
        prop_assert!(rank(&plan.image).unwrap() as u64 <= plan.k);
        prop_assert!(plan.all_discrete());
    }
}
