use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use cyclotome::chain::{cone, ChainComplex, ChainMap, DegreeWindow};
use cyclotome::io::{category_to_json, parse_document};
use cyclotome::linalg::{solve, SparseMatrix};
use cyclotome::resolution::{ml_check, random_chain_complex, random_tower};
use cyclotome::zoo::{random_dg_category, RandomDgParams};
use cyclotome::Field;

const Q: Field = Field::Rational;

fn matrix(max: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-2i64..=2, c), r))
}

fn to_sparse(field: Field, m: &[Vec<i64>]) -> SparseMatrix {
    let rows: Vec<&[i64]> = m.iter().map(|r| r.as_slice()).collect();
    SparseMatrix::from_i64(field, &rows)
}

fn direct_sum(a: &ChainComplex, b: &ChainComplex) -> ChainComplex {
    let w = a.window();
    let dims = w.degrees().map(|n| a.dim(n) + b.dim(n)).collect();
    let d = ((w.lo + 1)..=w.hi)
        .map(|n| {
            let (da, db) = (a.d(n), b.d(n));
            SparseMatrix::block(Q, &[a.dim(n - 1), b.dim(n - 1)], &[a.dim(n), b.dim(n)], &[vec![Some(&da), None], vec![None, Some(&db)]]).unwrap()
        })
        .collect();
    ChainComplex::new(Q, DegreeWindow::exact(w.lo, w.hi), dims, d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_of_product_is_bounded(a in matrix(5), seed in 0u64..1000) {
        let x = to_sparse(Q, &a);
        let cols = (seed % 5 + 1) as usize;
        let y_rows: Vec<Vec<i64>> = (0..x.cols())
            .map(|i| (0..cols).map(|j| ((seed as i64 + 3 * i as i64 + 7 * j as i64) % 5) - 2).collect())
            .collect();
        let y = to_sparse(Q, &y_rows);
        let p = x.compose(&y).unwrap();
        prop_assert!(p.rank() <= x.rank().min(y.rank()));
    }

    #[test]
    fn rank_nullity(a in matrix(6)) {
        let m = to_sparse(Q, &a);
        let k = m.kernel_basis();
        prop_assert_eq!(m.rank() + k.len(), m.cols());
        for v in &k {
            prop_assert!(m.apply(v).is_empty());
        }
    }

    #[test]
    fn transpose_is_an_involution(a in matrix(6)) {
        let m = to_sparse(Q, &a);
        prop_assert_eq!(m.transpose().transpose(), m.clone());
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn reduction_mod_p_only_drops_rank(a in matrix(6), p in prop::sample::select(vec![2u64, 3, 5, 7, 101])) {
        let fp = Field::prime(p).unwrap();
        prop_assert!(to_sparse(fp, &a).rank() <= to_sparse(Q, &a).rank());
        // a large prime leaves small integer matrices alone
        let big = Field::prime(1_000_003).unwrap();
        prop_assert_eq!(to_sparse(big, &a).rank(), to_sparse(Q, &a).rank());
    }

    #[test]
    fn solve_finds_preimages(a in matrix(6), coeffs in prop::collection::vec(-3i64..=3, 6)) {
        let m = to_sparse(Q, &a);
        let x: Vec<_> = (0..m.cols()).filter(|i| coeffs[*i] != 0).map(|i| (i, Q.from_i64(coeffs[i]))).collect();
        let b = m.apply(&x);
        let y = solve(&m, &b).expect("b is in the image");
        prop_assert_eq!(m.apply(&y), b);
    }

    #[test]
    fn cone_long_exact_sequence(seed in 0u64..5000) {
        let (lo, hi) = (0, 4);
        let b = random_chain_complex(Q, seed, lo, hi, lo - 1);
        let extra = random_chain_complex(Q, seed.wrapping_add(77), lo, hi, lo - 1);
        let a = direct_sum(&b, &extra);
        // f = projection + (d h + h d) with h built from a fixed pattern
        let mut comps = BTreeMap::new();
        let h = |n: i64| -> SparseMatrix {
            let (r, c) = (b.dim(n + 1), a.dim(n));
            let trip = (0..r.min(c)).map(|i| (i, (i + n as usize) % c.max(1), Q.from_i64(((seed as i64 + n) % 3) - 1)));
            SparseMatrix::from_triplets(Q, r, c, trip)
        };
        for n in lo..=hi {
            let proj = SparseMatrix::from_triplets(Q, b.dim(n), a.dim(n), (0..b.dim(n)).map(|i| (i, i, Q.one())));
            let mut f = proj;
            if n < hi {
                f = f.add(&b.d(n + 1).compose(&h(n)).unwrap()).unwrap();
            }
            if n > lo {
                f = f.add(&h(n - 1).compose(&a.d(n)).unwrap()).unwrap();
            }
            comps.insert(n, f);
        }
        let f = ChainMap::new(Arc::new(a.clone()), Arc::new(b.clone()), comps).unwrap();
        let c = cone(&f).unwrap();
        for n in lo..hi {
            let rk = |m: i64| if m < lo { 0 } else { f.homology_rank(m) };
            let ha = |m: i64| if m < lo { 0 } else { a.homology(m).unwrap().0 };
            let expect = b.homology(n).unwrap().0 - rk(n) + ha(n - 1) - rk(n - 1);
            prop_assert_eq!(c.homology(n).unwrap().0, expect, "degree {}", n);
        }
    }

    #[test]
    fn mittag_leffler_towers(seed in 0u64..100_000) {
        let (t, n) = random_tower(Q, seed);
        let rec = ml_check(&t, n, seed).unwrap();
        prop_assert!(rec.kernels_acyclic);
        prop_assert!(rec.holds());
    }

    #[test]
    fn presentation_json_round_trip(seed in 0u64..10_000) {
        let c = random_dg_category(Q, seed, RandomDgParams::default());
        let v = category_to_json(&c);
        let back = parse_document(&v.to_string(), None).unwrap();
        prop_assert_eq!(category_to_json(&back.category), v);
    }
}
