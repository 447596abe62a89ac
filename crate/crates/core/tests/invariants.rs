use proptest::prelude::*;

use pyramid_core::gh::{gh_bounds, gh_exact, DEFAULT_BUDGET};
use pyramid_core::oracle::{oracle_defect, oracle_gh, oracle_rho_n};
use pyramid_core::order::{precsim, widening_defect, DEFAULT_LIMIT};
use pyramid_core::pointed::rho_pointed;
use pyramid_core::pyramid::{rho, rho_n, PointedHandle, PyramidHandle, RhoParams};
use pyramid_core::zoo::{generate, SpaceRecipe};
use pyramid_core::{Ext, Space};

fn space(n: usize, seed: u64) -> Space {
    generate::<f64>(&SpaceRecipe::RandomMetric { n, seed }).unwrap().space
}

fn small() -> impl Strategy<Value = Space> {
    (1usize..=4, any::<u64>()).prop_map(|(n, s)| space(n, s))
}

fn h(x: &Space) -> PyramidHandle<f64> {
    PyramidHandle::Finite(x.clone())
}

fn gh(x: &Space, y: &Space) -> f64 {
    gh_exact(x, y, DEFAULT_LIMIT).unwrap().value.hi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gh_is_a_metric_on_classes(x in small(), y in small(), z in small()) {
        prop_assert_eq!(gh(&x, &y), gh(&y, &x));
        prop_assert!(gh(&x, &z) <= gh(&x, &y) + gh(&y, &z) + 1e-12);
        prop_assert_eq!(gh(&x, &x), 0.0);
        prop_assert!((gh(&x, &y) - oracle_gh(&x, &y).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn bounds_enclose_exact(x in small(), y in small()) {
        let b = gh_bounds(&x, &y, DEFAULT_BUDGET).unwrap().value;
        prop_assert!(b.contains_tol(gh(&x, &y), 1e-12));
    }

    #[test]
    fn defect_matches_oracle(x in small(), y in small()) {
        let d = widening_defect(&x, &y, DEFAULT_LIMIT).unwrap().defect;
        prop_assert_eq!(d, oracle_defect(&x, &y));
    }

    #[test]
    fn subspaces_and_truncations_are_dominated(x in small(), cap in 0.25f64..5.0) {
        let idx: Vec<usize> = (0..x.len()).step_by(2).collect();
        prop_assert!(precsim(&x.restrict(&idx), &x, 1e-12).unwrap());
        prop_assert!(precsim(&x.truncate(cap), &x, 1e-12).unwrap());
        prop_assert!(precsim(&x, &x.scale(1.5), 1e-12).unwrap());
    }

    #[test]
    fn slices_bracket_the_grid_oracle(x in small(), y in small(), n in 1usize..=3) {
        let p = RhoParams::default();
        let v = rho_n(&h(&x), &h(&y), n, &p).unwrap().value;
        let o = oracle_rho_n(&h(&x), &h(&y), n, p.delta).unwrap();
        prop_assert!(v.contains_tol(o, p.delta + 1e-12), "{v:?} vs {o}");
    }

    #[test]
    fn rho_is_bounded_by_three_gh(x in small(), y in small()) {
        let r = rho(&h(&x), &h(&y), &RhoParams::default()).unwrap();
        prop_assert!(r.total.lo <= 3.0 * gh(&x, &y) + 1e-9);
        prop_assert!(r.total.hi <= 2.0 + r.tail_bound);
        let same = rho(&h(&x), &h(&x.permute(&(0..x.len()).rev().collect::<Vec<_>>())), &RhoParams::default()).unwrap();
        prop_assert_eq!(same.total.lo, 0.0);
    }
}

#[test]
fn slices_decrease_towards_the_maximum() {
    // Sigma_n grows toward the maximal pyramid as n grows.
    let p = RhoParams::default();
    let mut last = f64::INFINITY;
    for n in 1..=6 {
        let s = generate::<f64>(&SpaceRecipe::Sigma { n, d: Ext::Finite(1.0) }).unwrap().space;
        let r = rho(&h(&s), &PyramidHandle::MaxSentinel, &p).unwrap();
        assert!(r.total.lo <= last + 1e-12);
        last = r.total.lo;
    }
}

#[test]
fn pointed_distance_sees_the_base() {
    let path = generate::<f64>(&SpaceRecipe::Path { length: 2.0, k: 2 }).unwrap().space;
    let end = pyramid_core::Pointed::new(path.clone(), 0).unwrap();
    let mid = pyramid_core::Pointed::new(path.clone(), 1).unwrap();
    let p = RhoParams::default();
    let plain = rho(&h(&path), &h(&path), &p).unwrap();
    let pointed = rho_pointed(&PointedHandle::Finite(end), &PointedHandle::Finite(mid), &p).unwrap();
    assert!(plain.total.lo == 0.0 && plain.total.hi <= plain.tail_bound);
    assert!(pointed.total.lo > 0.0, "{:?}", pointed.total);
}

#[test]
fn single_precision_agrees() {
    let x = space(4, 7);
    let y = space(3, 9);
    let p = RhoParams::default();
    let a = rho(&h(&x), &h(&y), &p).unwrap().total;
    let b = rho(&PyramidHandle::Finite(x.cast::<f32>()), &PyramidHandle::Finite(y.cast::<f32>()), &p).unwrap().total;
    assert!((a.lo - b.lo as f64).abs() < 1e-5 && (a.hi - b.hi as f64).abs() < 1e-5, "{a:?} vs {b:?}");
}
