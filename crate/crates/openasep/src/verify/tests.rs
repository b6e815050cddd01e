use super::*;

/// Identities the suite must cover, each with at least one check.
const IDENTITIES: &[&str] = &[
    "boundary reparameterization and its inverse",
    "phase diagram",
    "low density limit with total variation rate",
    "lambda_m defined by generating functions",
    "high density limit with total variation rate",
    "product Bernoulli limit iff AC = 1",
    "Askey-Wilson signed measures, density, atoms and masses",
    "marginals, transition kernels and multi-time measures",
    "generating function as an Askey-Wilson integral",
    "kernels supported on U_t, top atom carried to top atom",
    "particle-hole duality",
    "inverse rate map",
    "sandwiching of generating functions",
    "eta_m and convergence of the last sites",
    "closed form of theta",
    "n / log n growth budget",
    "total variation bound from generating functions",
    "kernel total variation bound",
    "atom mass ratio bound",
    "total variation through the largest atom masses",
    "time reversal",
    "orthogonality and projection",
];

#[test]
fn manifest_covers_identities() {
    for id in IDENTITIES {
        let entry = MANIFEST.iter().find(|(k, _)| k == id).unwrap_or_else(|| panic!("{id} missing"));
        assert!(!entry.1.is_empty());
        for c in entry.1 {
            assert!(CHECKS.contains(c), "{c}");
        }
    }
    let cfg = CheckConfig::default();
    for name in CHECKS {
        assert!(!default_grid(name, &cfg).unwrap().is_empty(), "{name}");
        assert!(MANIFEST.iter().any(|(_, cs)| cs.contains(name)), "{name} not in manifest");
    }
    let mut sorted = CHECKS.to_vec();
    sorted.sort();
    assert_eq!(sorted, CHECKS);
}

#[test]
fn unknown_and_empty() {
    let cfg = CheckConfig::default();
    let pt = CheckPoint { label: "x".into(), params: None, n: 0, m: 0 };
    assert!(matches!(run_check("nope", &pt, &cfg), Err(Error::UnknownCheck(_))));
    assert!(run_suite(&Selection::Names(vec![]), &cfg).unwrap().is_empty());
    assert!(run_suite(&Selection::parse("phase,nope"), &cfg).is_err());
    assert_eq!(Selection::parse("ALL"), Selection::All);
}

#[test]
fn single_check_selection() {
    let cfg = CheckConfig::default();
    let r = run_suite(&Selection::parse("phase"), &cfg).unwrap();
    assert_eq!(r.len(), default_grid("phase", &cfg).unwrap().len());
    assert!(r.iter().all(|x| x.status == Status::Pass && x.name == "phase"));
}

#[test]
fn spec_examples() {
    let cfg = CheckConfig::default();
    let fan = CheckPoint::at("fan", BoundaryParams::new(0.5, -0.2, 0.6, -0.1, 0.5).unwrap(), 0, 0);
    let r = run_check("mass_one", &fan, &cfg).unwrap();
    assert_eq!(r.status, Status::Pass, "{r:?}");
    let shock = CheckPoint::at("shock", BoundaryParams::new(3.0, 0.0, 0.6, 0.0, 0.5).unwrap(), 6, 2);
    let r = run_check("characterization", &shock, &cfg).unwrap();
    assert_eq!(r.status, Status::Pass, "{r:?}");
    let ac = CheckPoint::at("AC=1.5", BoundaryParams::new(3.0, 0.0, 0.5, 0.0, 0.5).unwrap(), 4, 2);
    let r = run_check("bernoulli_iff", &ac, &cfg).unwrap();
    assert_eq!(r.status, Status::Pass, "{r:?}");
}

#[test]
fn reports_are_reproducible() {
    let cfg = CheckConfig::default();
    let a = run_suite(&Selection::parse("gf_bound,sandwich"), &cfg).unwrap();
    let b = run_suite(&Selection::parse("gf_bound,sandwich"), &cfg).unwrap();
    let ja: Vec<String> = a.iter().map(|r| r.json_line()).collect();
    let jb: Vec<String> = b.iter().map(|r| r.json_line()).collect();
    assert_eq!(ja, jb);
    assert!(a.iter().all(|r| r.status == Status::Pass), "{}", format_table(&a));
}

#[test]
fn status_round_trip() {
    for s in [Status::Pass, Status::Fail, Status::Skipped("why".into())] {
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<Status>(&j).unwrap(), s);
    }
    assert_eq!(serde_json::to_string(&Status::Skipped("r".into())).unwrap(), "\"SKIPPED(r)\"");
}
