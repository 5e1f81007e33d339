use crosspoly_core::exact::{l1_distance, l1_norm, int, RationalVector};
use crosspoly_core::kissing::{
    ball_size_bruteforce, construct_x, greedy_kissing_subset, union_bound_floor,
    verify_kissing_configuration, CodeParams, KissingConfiguration,
};
use crosspoly_core::rates::{
    blichfeldt_finite_log, blichfeldt_rate, upper_bound_rate, xprime_complement_rate,
    xprime_complement_rate_at, RateArgs, RateRegistry, UpperRateParams,
};

/// Plain sequential greedy over the canonical order used by the library.
fn naive_greedy(points: &[RationalVector], scale: i64) -> Vec<RationalVector> {
    let s = int(scale);
    let mut kept: Vec<RationalVector> = Vec::new();
    for p in points {
        if kept.iter().all(|q| l1_distance(p, q) >= s) {
            kept.push(p.clone());
        }
    }
    kept
}

#[test]
fn greedy_matches_naive_scan() {
    let params = CodeParams::new(7, 3, 1).unwrap();
    let x = construct_x(&params).unwrap();
    let pts = x.vectors();
    let scale = params.m;
    let cfg = greedy_kissing_subset(&pts, &int(scale as i64)).unwrap();
    assert!(cfg.is_verified());
    assert_eq!(cfg.points(), naive_greedy(&pts, scale as i64).as_slice());
    assert!(cfg.len() as u128 >= union_bound_floor(&params).unwrap().floor);
}

#[test]
fn code_points_have_expected_shape() {
    let params = CodeParams::new(6, 2, 2).unwrap();
    let x = construct_x(&params).unwrap();
    assert_eq!(x.len() as u64, u64::try_from(params.size()).unwrap());
    for p in x.vectors() {
        let twos = p.iter().filter(|c| c.numer().to_string().trim_start_matches('-') == "2").count();
        let ones = p.iter().filter(|c| c.numer().to_string().trim_start_matches('-') == "1").count();
        assert_eq!((ones, twos), (2, 2));
        assert_eq!(l1_norm(&p), int(6));
    }
}

#[test]
fn ball_count_is_center_independent() {
    let params = CodeParams::new(8, 3, 1).unwrap();
    let x = construct_x(&params).unwrap();
    let counts: Vec<u128> = x
        .sample_centers(6, 11)
        .iter()
        .map(|c| ball_size_bruteforce(&params, c).unwrap().count)
        .collect();
    assert!(counts.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn verifier_reports_first_close_pair() {
    let pts = vec![
        RationalVector::from_ints(&[2, 0, 0]),
        RationalVector::from_ints(&[0, 2, 0]),
        RationalVector::from_fracs(&[(3, 2), (1, 2), (0, 1)]),
    ];
    let cfg = KissingConfiguration::new(3, int(2), pts).unwrap();
    let rep = verify_kissing_configuration(&cfg).unwrap();
    assert!(!rep.valid);
    let json = serde_json::to_value(&rep).unwrap();
    assert_eq!(json["violation"]["i"], 0);
    assert_eq!(json["violation"]["j"], 2);
}

#[test]
fn upper_exponents_match_closed_forms() {
    let p = UpperRateParams::standard();
    let a = p.b * (1.0 - p.c);
    let h = |t: f64| -t * t.log2() - (1.0 - t) * (1.0 - t).log2();
    let x = xprime_complement_rate(&p).unwrap();
    let direct = h(p.c) + p.c * ((3.0 - 2.0 * a) / (1.0 - 2.0 * a)).log2();
    assert!((x.value - direct).abs() < 1e-12);
    let bl = blichfeldt_rate(p.r).unwrap();
    assert!((bl.base - 2.0 * p.r * (std::f64::consts::E / std::f64::consts::PI).sqrt()).abs() < 1e-12);
    let up = upper_bound_rate(&p).unwrap();
    assert!((up.value - x.value.max(bl.value)).abs() < 1e-12);
}

#[test]
fn finite_forms_converge() {
    let p = UpperRateParams::standard();
    let limit = xprime_complement_rate(&p).unwrap().value;
    let gaps: Vec<f64> = [100, 1000, 10_000]
        .iter()
        .map(|&n| (xprime_complement_rate_at(&p, n).unwrap().value - limit).abs())
        .collect();
    assert!(gaps[2] < gaps[0] && gaps[2] < 1e-3);
    let bl = blichfeldt_rate(p.r).unwrap().base.ln();
    assert!((blichfeldt_finite_log(p.r, 100_000) - bl).abs() < 1e-3);
}

#[test]
fn registry_round_trip() {
    let reg = RateRegistry::default();
    let sup = reg.evaluate("sup-f", &RateArgs::new().set("grid", 200.0)).unwrap();
    let arg = sup.argmax.clone().unwrap();
    let f = reg
        .evaluate("f", &RateArgs::new().set("y1", arg[0]).set("y2", arg[1]))
        .unwrap();
    assert!((f.value - sup.value).abs() < 1e-12);
    let infeasible = reg.evaluate("f", &RateArgs::new().set("y1", 0.5)).unwrap();
    assert_eq!(infeasible.feasible, Some(false));
}
