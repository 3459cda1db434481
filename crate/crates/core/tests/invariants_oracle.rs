mod common;

use common::{kernel, oracle_dims, rank, Dense};
use loewy::algebra::Algebra;
use loewy::database::subgroup_representatives;
use loewy::invariants::{frobenius, ideal_dims_profile, pair_count, same_table, IndexSet};
use loewy::Word;

#[test]
fn index_sets_match_dense_linear_algebra() {
    let mut count = 0;
    for z in 1..=60 {
        for key in subgroup_representatives(z) {
            let n = key.order();
            let a = Algebra::new(key.q_rep, n, z).unwrap();
            let profile = a.loewy_profile();
            let primes: &[Word] = if z <= 30 { &[2, 3] } else { &[2] };
            let got = ideal_dims_profile(&a, &profile, primes).unwrap();
            let mut want = Vec::new();
            for &p in primes {
                let d = Dense::new(key.q_rep, n, z, p as u32);
                let dims = oracle_dims(&d, profile.ll, p);
                if want.is_empty() {
                    want = dims;
                } else {
                    want.extend(dims.into_iter().filter(|(l, _)| l.starts_with('U') || l.starts_with('V')));
                }
            }
            assert_eq!(got, want, "q={} z={z}", key.q_rep);
            count += 1;
        }
    }
    assert!(count > 250);
}

#[test]
fn frobenius_image_is_additive() {
    for z in [40, 45, 56] {
        for key in subgroup_representatives(z) {
            let a = Algebra::new(key.q_rep, key.order(), z).unwrap();
            let d = Dense::new(key.q_rep, key.order(), z, 2);
            let f = frobenius(&a, 2).unwrap();
            assert_eq!(f.image_dim() as usize, d.frobenius_image().len());
            let images: Vec<_> = d.radical().iter().map(|x| d.power(x, 2)).collect();
            assert_eq!(rank(images, 2), f.image_dim() as usize);
        }
    }
}

fn brute_pairs(d: &Dense, w: &IndexSet) -> u64 {
    let dim = d.dim();
    let vec_of = |mask: u32| -> Vec<u32> { (0..dim).map(|i| (mask >> i) & 1).collect() };
    let mut count = 0;
    for x in 0..1u32 << dim {
        let xv = vec_of(x);
        for y in 0..1u32 << dim {
            let prod = d.mul(&xv, &vec_of(y));
            if prod.iter().enumerate().all(|(r, &c)| c == 0 || w.contains(r as Word)) {
                count += 1;
            }
        }
    }
    count
}

#[test]
fn pair_count_matches_enumeration() {
    for (q, n, z) in [(2, 3, 7), (3, 2, 4), (2, 4, 5), (4, 3, 9)] {
        let a = Algebra::new(q, n, z).unwrap();
        let d = Dense::new(q, n, z, 2);
        let f = frobenius(&a, 2).unwrap();
        let mut w: IndexSet = f.image.iter().skip(1).flatten().copied().collect();
        w = w.union(&IndexSet::from_iter([z]));
        for set in [w, IndexSet::new(), (0..=z).collect()] {
            assert_eq!(pair_count(&a, 2, &set).unwrap(), brute_pairs(&d, &set).into(), "q={q} z={z}");
        }
    }
}

#[test]
fn same_subgroup_gives_same_table() {
    for z in 2..=200 {
        for key in subgroup_representatives(z) {
            let n = key.order();
            let a = Algebra::new(key.q_rep, n, z).unwrap();
            for &g in key.subgroup.iter().filter(|&&g| g > 1) {
                if loewy::arith::mult_order(g, z).unwrap() == n {
                    let b = Algebra::new(g, n, z).unwrap();
                    assert!(same_table(&a, &b).unwrap(), "z={z} q={} g={g}", key.q_rep);
                }
            }
        }
    }
}

#[test]
fn kernel_helper() {
    let src = vec![vec![1, 0], vec![0, 1]];
    let img = vec![vec![1, 1], vec![1, 1]];
    assert_eq!(kernel(&src, &img, 2), vec![vec![1, 1]]);
}
