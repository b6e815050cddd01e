use super::*;
use crate::qseries::{aw_norm, aw_polynomial};
use crate::real::DoubleDouble;

type Dd = DoubleDouble;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn dd(a: f64, b: f64, c: f64, d: f64, q: f64) -> AwParams<Dd> {
    AwParams::from_f64(a, b, c, d, q)
}

#[test]
fn admissibility_examples() {
    assert!(check_admissible(&dd(2.0, -0.5, 0.3, -0.2, 0.5), 1e-9).pass());
    let r = check_admissible(&dd(2.0, 0.6, 0.0, 0.0, 0.5), 1e-9);
    assert!(!r.conditions[0].pass);
    let r = check_admissible(&dd(2.0, -0.5, 4.0, -0.1, 0.5), 1e-9);
    assert!(r.conditions[0].pass && !r.conditions[1].pass);
    assert_eq!(r.conditions[1].nearest_l.map(i64::abs), Some(1));
}

#[test]
fn single_atom_at_q_zero() {
    let m = build_from_params(dd(2.0, 0.0, 0.0, 0.0, 0.0), &tol()).unwrap();
    assert_eq!(m.atoms.len(), 1);
    assert!((m.atoms[0].location.to_f64() - 1.25).abs() < 1e-15);
    assert!((m.atoms[0].mass.to_f64() - 0.75).abs() < 1e-15);
    assert!((m.continuous_mass.to_f64() - 0.25).abs() < 1e-12);
}

#[test]
fn small_parameters_give_probability_measure() {
    let m = build_from_params(dd(0.5, -0.3, 0.4, 0.2, 0.6), &tol()).unwrap();
    assert!(m.atoms.is_empty());
    assert_eq!(m.density_sign, 1);
    assert!((m.total_variation().unwrap().to_f64() - 1.0).abs() < 1e-12);
}

#[test]
fn atoms_for_a_equal_three() {
    let m = build_from_params(dd(3.0, 0.0, 0.0, 0.0, 0.5), &tol()).unwrap();
    let locs: Vec<f64> = m.atoms.iter().map(|a| a.location.to_f64()).collect();
    assert_eq!(locs.len(), 2);
    assert!((locs[0] - 5.0 / 3.0).abs() < 1e-15);
    assert!((locs[1] - 13.0 / 12.0).abs() < 1e-15);
    assert!((m.total_mass().to_f64() - 1.0).abs() < 1e-12);
    assert!((m.support_second.to_f64() - 13.0 / 12.0).abs() < 1e-15);
}

#[test]
fn semicircle_density() {
    let m = build_from_params(dd(0.0, 0.0, 0.0, 0.0, 0.0), &tol()).unwrap();
    let two_pi = 2.0 / std::f64::consts::PI;
    assert!((m.density_at(Dd::from_f64(0.0)).unwrap().to_f64() - two_pi).abs() < 1e-15);
    assert!((m.density_at(Dd::from_f64(0.5)).unwrap().to_f64() - two_pi * 0.75f64.sqrt()).abs() < 1e-15);
    assert!(m.integrate(|x| x).unwrap().to_f64().abs() < 1e-14);
    assert!(m.density_at(Dd::from_f64(1.0)).is_err());
}

#[test]
fn density_agrees_across_precisions() {
    let (a, b, c, d, q) = (2.5, -0.6, 1.4, -0.3, 0.45);
    let md = build_from_params(dd(a, b, c, d, q), &tol()).unwrap();
    let mf = build_from_params(AwParams::<f64>::from_f64(a, b, c, d, q), &tol()).unwrap();
    let x = 0.3;
    let vd = md.density_at(Dd::from_f64(x)).unwrap().to_f64();
    let vf = mf.density_at(x).unwrap();
    assert!((vd - vf).abs() <= 1e-10 * vd.abs());
}

#[test]
fn negative_atom_total_variation() {
    let m = build_from_params(dd(2.0, -0.5, 0.3, -0.2, 0.5), &tol()).unwrap();
    let neg: f64 = m.atoms.iter().map(|a| a.mass.to_f64()).filter(|&v| v < 0.0).sum::<f64>()
        + m.continuous_mass.to_f64().min(0.0);
    let tv = m.total_variation().unwrap().to_f64();
    assert!((tv - (1.0 + 2.0 * neg.abs())).abs() < 1e-10);
}

#[test]
fn orthogonality_small_case() {
    let p = dd(2.0, 0.0, 0.0, 0.0, 0.0);
    let m = build_from_params(p, &tol()).unwrap();
    let i1 = m.integrate(|x| aw_polynomial(1, x, &p).unwrap()).unwrap();
    assert!(i1.to_f64().abs() < 1e-12);
    let i2 = m.integrate(|x| { let w = aw_polynomial(1, x, &p).unwrap(); w * w }).unwrap();
    assert!((i2 - aw_norm(1, &p).unwrap()).to_f64().abs() < 1e-12);
}

#[test]
fn orthogonality_shock_quadruple_with_conjugate_pair() {
    let p = AwParams::<Dd> {
        a: Dd::from_f64(2.2),
        b: Dd::from_f64(-0.4),
        cd: CdPair::Conjugate { re: Dd::from_f64(0.5), im: Dd::from_f64(0.6) },
        q: Dd::from_f64(0.5),
    };
    let m = build_from_params(p, &tol()).unwrap();
    for j in 0..5 {
        for k in 0..5 {
            let v = m
                .integrate(|x| aw_polynomial(j, x, &p).unwrap() * aw_polynomial(k, x, &p).unwrap())
                .unwrap()
                .to_f64();
            let want = if j == k { aw_norm(j, &p).unwrap().to_f64() } else { 0.0 };
            assert!((v - want).abs() <= 1e-10 * want.abs().max(1.0), "j={j} k={k} {v} {want}");
        }
    }
}

#[test]
fn marginal_examples() {
    let hd = pi_marginal(Dd::from_f64(3.0), Dd::zero(), Dd::from_f64(0.5), Dd::zero(), Dd::zero(), Dd::one(), &tol())
        .unwrap();
    assert_eq!(hd.atoms.len(), 1);
    assert!((hd.support_top.to_f64() - 5.0 / 3.0).abs() < 1e-15);
    let ld = pi_marginal(Dd::from_f64(0.5), Dd::zero(), Dd::from_f64(3.0), Dd::zero(), Dd::zero(), Dd::one(), &tol())
        .unwrap();
    assert_eq!(ld.atoms[0].generator, Generator::C);
    assert!((ld.support_top.to_f64() - 5.0 / 3.0).abs() < 1e-15);
}

#[test]
fn kernel_from_top_atom_is_point_mass() {
    let (a, b, c, d, q) = (3.0, -0.2, 0.5, -0.1, 0.5);
    let s = Dd::one();
    let t = Dd::from_f64(1.2);
    let pis = pi_marginal(Dd::from_f64(a), Dd::from_f64(b), Dd::from_f64(c), Dd::from_f64(d), Dd::from_f64(q), s, &tol())
        .unwrap();
    let top = pis.top_atom().unwrap();
    let spec = KernelSpec {
        a: Dd::from_f64(a),
        b: Dd::from_f64(b),
        q: Dd::from_f64(q),
        s,
        t,
        x: SupportPoint { x: top.location, kind: PointKind::Atom { root: top.root } },
        support: Some((Dd::from_f64(c), Dd::from_f64(d))),
    };
    let k = transition_kernel(&spec, &tol()).unwrap();
    let y0t = (Dd::from_f64(a) * t.sqrt() + Dd::one() / (Dd::from_f64(a) * t.sqrt())) * Dd::from_f64(0.5);
    let big: Vec<_> = k.atoms.iter().filter(|x| x.mass.abs().to_f64() > 1e-12).collect();
    assert_eq!(big.len(), 1);
    assert!((big[0].location - y0t).abs().to_f64() < 1e-14);
    assert!(k.continuous_mass.abs().to_f64() < 1e-12);
}

#[test]
fn kernel_same_time_and_support() {
    let spec = KernelSpec {
        a: Dd::from_f64(1.5),
        b: Dd::from_f64(-0.3),
        q: Dd::from_f64(0.5),
        s: Dd::one(),
        t: Dd::one(),
        x: SupportPoint::from_x(Dd::from_f64(0.2)),
        support: Some((Dd::from_f64(0.4), Dd::from_f64(-0.2))),
    };
    let k = transition_kernel(&spec, &tol()).unwrap();
    assert_eq!(k.atoms.len(), 1);
    assert_eq!(k.atoms[0].mass.to_f64(), 1.0);
    let spec2 = KernelSpec { t: Dd::from_f64(1.05), ..spec };
    let k2 = transition_kernel(&spec2, &tol()).unwrap();
    let pit = pi_marginal(spec.a, spec.b, Dd::from_f64(0.4), Dd::from_f64(-0.2), spec.q, spec2.t, &tol()).unwrap();
    for at in k2.support_atoms() {
        assert!(kernel::in_support(&pit, at.location));
    }
    let bad = KernelSpec { x: SupportPoint::from_x(Dd::from_f64(1.3)), ..spec2 };
    assert!(matches!(transition_kernel(&bad, &tol()), Err(Error::XNotInSupport(_))));
}

#[test]
fn backends_agree() {
    let q = Dd::from_f64(0.5);
    for (a, b, c, d) in [(2.0, -0.3, 0.6, -0.2), (0.6, -0.2, 1.8, -0.4), (1.5, 0.0, 0.9, 0.0)] {
        let spec = MultiAwSpec::new(
            Dd::from_f64(a),
            Dd::from_f64(b),
            Dd::from_f64(c),
            Dd::from_f64(d),
            q,
            vec![Dd::from_f64(1.0), Dd::from_f64(1.04), Dd::from_f64(1.1)],
        );
        let f = vec![
            Poly::affine(Dd::from_f64(0.3), Dd::from_f64(1.1)),
            Poly::affine(Dd::from_f64(-0.5), Dd::from_f64(0.7)),
            Poly::affine(Dd::from_f64(1.2), Dd::from_f64(-0.4)),
        ];
        let n = multi_integrate_nested(&spec, &f, &tol()).unwrap().to_f64();
        let p = multi_integrate_projection(&spec, &f, &tol()).unwrap().to_f64();
        assert!((n - p).abs() < 1e-9 * n.abs().max(1.0), "{n} {p}");
    }
}

#[test]
fn projection_residual() {
    let (a, b, c, d, q) = (2.4, -0.3, 0.7, -0.25, 0.45);
    let f = |v: f64| Dd::from_f64(v);
    let (s, t) = (f(1.01), f(1.07));
    let pis = pi_marginal(f(a), f(b), f(c), f(d), f(q), s, &tol()).unwrap();
    let mut pts: Vec<SupportPoint<Dd>> = pis
        .support_atoms()
        .map(|at| SupportPoint { x: at.location, kind: PointKind::Atom { root: at.root } })
        .collect();
    pts.extend([-0.9, -0.2, 0.4, 0.95].iter().map(|&x| SupportPoint::from_x(f(x))));
    for x in pts {
        let spec = KernelSpec { a: f(a), b: f(b), q: f(q), s, t, x, support: Some((f(c), f(d))) };
        let k = transition_kernel(&spec, &tol()).unwrap();
        for j in 0..=5 {
            let lhs = k
                .integrate(|y| scaled_polynomial(j, y, f(a), f(b), f(c), f(d), f(q), t).unwrap())
                .unwrap();
            let rhs = scaled_polynomial(j, x.x, f(a), f(b), f(c), f(d), f(q), s).unwrap();
            assert!((lhs - rhs).abs().to_f64() < 1e-8 * rhs.abs().to_f64().max(1.0), "j={j} x={} {lhs} {rhs}", x.x);
        }
    }
}

#[test]
fn time_reversal_three_times() {
    let f = |v: f64| Dd::from_f64(v);
    let (a, b, c, d, q) = (1.8, -0.4, 0.6, 0.2, 0.5);
    let times = [1.0, 1.03, 1.08];
    let g = [(0.2, 1.0), (1.1, -0.6), (0.4, 0.9)];
    let fwd = MultiAwSpec::new(f(a), f(b), f(c), f(d), f(q), times.iter().map(|&t| f(t)).collect());
    let rev = MultiAwSpec::new(f(c), f(d), f(a), f(b), f(q), times.iter().rev().map(|&t| f(1.0 / t)).collect());
    let gf: Vec<Poly<Dd>> = g.iter().map(|&(u, v)| Poly::affine(f(u), f(v))).collect();
    let gr: Vec<Poly<Dd>> = gf.iter().rev().cloned().collect();
    let x = multi_integrate_nested(&fwd, &gf, &tol()).unwrap().to_f64();
    let y = multi_integrate_nested(&rev, &gr, &tol()).unwrap().to_f64();
    assert!((x - y).abs() < 1e-8 * x.abs().max(1.0), "{x} {y}");
}

#[test]
fn nested_cap_enforced() {
    let f = |v: f64| Dd::from_f64(v);
    let spec = MultiAwSpec::new(f(0.5), f(0.2), f(0.5), f(0.2), f(0.5), vec![f(1.0); 7]);
    let g = vec![Poly::affine(f(1.0), f(1.0)); 7];
    assert!(matches!(multi_integrate_nested(&spec, &g, &tol()), Err(Error::CapExceeded(_))));
}
