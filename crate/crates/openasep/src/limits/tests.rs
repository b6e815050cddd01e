use super::*;
use crate::asep_exact::{stationary_measure, BoundaryParams, Which};

#[test]
fn tv_examples() {
    let ber = bernoulli_product(1, 0.5);
    let z = BinaryMeasure::point(1, 0);
    let o = BinaryMeasure::point(1, 1);
    assert_eq!(tv_distance(&ber, &ber).unwrap(), 0.0);
    assert_eq!(tv_distance(&z, &o).unwrap(), 1.0);
    assert_eq!(tv_distance(&ber, &z).unwrap(), 0.5);
    assert!(tv_distance(&ber, &bernoulli_product(2, 0.5)).is_err());
    assert_eq!(bernoulli_product(2, 0.0), BinaryMeasure::point(2, 0));
}

#[test]
fn gf_bound_worked_example() {
    let ber = bernoulli_product(1, 0.5);
    let z = BinaryMeasure::point(1, 0);
    assert!((gf_tv_bound(&ber, &z, &[(1.0, 2.0)]).unwrap() - 0.75).abs() < 1e-15);
    assert_eq!(gf_tv_bound(&ber, &ber, &[(1.0, 2.0)]).unwrap(), 0.0);
}

#[test]
fn grid_is_ordered() {
    for side in [Side::AtOrAboveOne, Side::AtOrBelowOne] {
        let g = NodeGrid::new(3, 0.3, side).unwrap();
        let flat: Vec<f64> = g.nodes.iter().flat_map(|&(a, b)| [a, b]).collect();
        assert!(flat.windows(2).all(|w| w[0] < w[1]));
        match side {
            Side::AtOrAboveOne => assert!(flat[0] > 1.0 && flat[5] < 1.3),
            Side::AtOrBelowOne => assert!(flat[0] > 0.7 && flat[5] < 1.0),
        }
    }
}

#[test]
fn gf_inversion_is_exact_on_products() {
    let ber = BinaryMeasure::product(&[0.2, 0.7, 0.4]);
    let grid = NodeGrid::new(3, 0.1, Side::AtOrAboveOne).unwrap();
    let back = measure_from_gf(|t: &[f64]| ber.generating_function(t), &grid).unwrap();
    let d = tv_distance(&ber, &back).unwrap();
    assert!(d < 1e-10, "{d}");
}

#[test]
fn theta_examples() {
    let p = BoundaryParams::new(3.0, 0.0, 0.0, 0.0, 0.01).unwrap();
    assert!((theta_from_support(&p).unwrap() - 0.75).abs() < 1e-14);
    let p = BoundaryParams::new(3.0, 0.0, 0.0, 0.0, 0.5).unwrap();
    assert!((theta_from_support(&p).unwrap() - 25.0 / 32.0).abs() < 1e-14);
    let p = BoundaryParams::new(0.5, 0.0, 0.5, 0.0, 0.5).unwrap();
    assert!(matches!(theta_from_support(&p), Err(Error::Phase(_))));
}

#[test]
fn budget_examples() {
    assert!((rate_budget((-3.0f64).exp()) - 1.0).abs() < 1e-15);
    for (th, h) in [(0.75, 10.0), (0.5, 1.0), (0.5, 10.0), (0.75, 1.0)] {
        let r = budget_check(th, h, 10_000).unwrap();
        assert!(r.pass(), "{r:?}");
    }
}

#[test]
fn eta_in_high_density_is_bernoulli() {
    let p = BoundaryParams::new(3.0, -0.2, 0.6, -0.1, 0.5).unwrap();
    let eta = eta_measure(&p, 2).unwrap();
    let want = bernoulli_product(2, 0.75);
    assert!(tv_distance(&eta, &want).unwrap() < 1e-8);
}

#[test]
fn lambda_on_ac_line_is_bernoulli() {
    let p = BoundaryParams::new(2.0, 0.0, 0.5, 0.0, 0.5).unwrap();
    let lam = lambda_measure(&p, 2).unwrap();
    assert!(tv_distance(&lam, &bernoulli_product(2, 2.0 / 3.0)).unwrap() < 1e-9);
}

#[test]
fn lambda_marginal_consistency_and_duality() {
    let p = BoundaryParams::new(3.0, 0.0, 0.6, 0.0, 0.5).unwrap();
    let l2 = lambda_measure(&p, 2).unwrap();
    let l3 = lambda_measure(&p, 3).unwrap();
    assert!(tv_distance(&l3.marginal(Which::First, 2).unwrap(), &l2).unwrap() < 1e-8);
    let eta = eta_measure(&p.swapped(), 2).unwrap();
    assert!(tv_distance(&flip(&eta), &l2).unwrap() < 1e-8);
    let (_, d) = product_approximation(&l2).unwrap();
    assert!(d > 1e-4);
}

#[test]
fn lambda_is_close_to_large_n_marginal() {
    let p = BoundaryParams::new(3.0, 0.0, 0.6, 0.0, 0.5).unwrap();
    let l2 = lambda_measure(&p, 2).unwrap();
    let d8 = tv_distance(&stationary_measure(8, &p.to_rates()).unwrap().marginal(Which::First, 2).unwrap(), &l2).unwrap();
    let d10 =
        tv_distance(&stationary_measure(10, &p.to_rates()).unwrap().marginal(Which::First, 2).unwrap(), &l2).unwrap();
    assert!(d10 < d8 && d10 < 0.05, "{d8} {d10}");
}
