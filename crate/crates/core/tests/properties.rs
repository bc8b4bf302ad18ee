use std::f64::consts::PI;

use proptest::prelude::*;

use cmc_fsi::alpha::{alpha0, alpha_closed, alpha_series};
use cmc_fsi::config::{presets, CurrentCompensator, OperatingPoint};
use cmc_fsi::ftransform::{f_transform, PartialFractionTerm};
use cmc_fsi::loopgain::{
    build_loop_gain, crossover_frequency, crossover_pi_closed, crossover_type2_closed, phase_margin, recombine,
    LoopGain, RationalLoopGain,
};
use cmc_fsi::stability::{
    acmc_pi_verdict, acmc_type2_verdict, hba_verdict, kmax, kp_limit, ktilde_max, voltage_loop_mv, KLimit,
};
use cmc_fsi::sweep::{sweep_stability, Range, SweepScheme};
use cmc_fsi::{ConverterConfig, Scheme, Topology, VoltageLoop};

fn boost(d: f64, scheme: Scheme, k_c: f64, z: f64, p: Option<f64>) -> ConverterConfig {
    let mut cfg = presets::example1(true);
    let ws = cfg.omega_s();
    cfg.scheme = scheme;
    cfg.operating_point = OperatingPoint::Duty(d);
    cfg.v_s = 14.0 * (1.0 - d);
    cfg.v_c = None;
    cfg.compensator = Some(CurrentCompensator {
        k_c,
        omega_z: z * ws,
        omega_p: p.map(|p| p * ws),
    });
    cfg
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

proptest! {
    #[test]
    fn series_matches_closed_form_inside_radius(d in 0.0f64..=1.0, p in 0.01f64..0.2) {
        let gap = (alpha_closed(d, p).unwrap() - alpha_series(d, p, 30).unwrap()).abs();
        prop_assert!(gap < 1e-8, "gap {gap}");
    }

    #[test]
    fn small_p_limit_is_alpha0(d in 0.0f64..=1.0) {
        prop_assert!((alpha_closed(d, 1e-8).unwrap() - alpha0(d).unwrap()).abs() < 1e-5);
    }

    #[test]
    fn f_transform_is_linear(
        d in 0.01f64..0.99,
        c1 in -1e5f64..1e5, c2 in -1e10f64..1e10, c3 in -1e5f64..1e5,
        p in 0.05f64..5.0,
        a in -3.0f64..3.0, b in -3.0f64..3.0,
    ) {
        let ws = 2.0 * PI * 5e4;
        let t1 = vec![PartialFractionTerm::origin1(c1), PartialFractionTerm::real_pole(c3, p * ws)];
        let t2 = vec![PartialFractionTerm::origin2(c2)];
        let both: Vec<_> = t1.iter().map(|t| t.scaled(a)).chain(t2.iter().map(|t| t.scaled(b))).collect();
        let f1 = f_transform(&t1, d, ws).unwrap();
        let f2 = f_transform(&t2, d, ws).unwrap();
        let lhs = f_transform(&both, d, ws).unwrap();
        let scale = (a * f1).abs() + (b * f2).abs();
        prop_assert!((lhs - (a * f1 + b * f2)).abs() <= 1e-14 * scale);
    }

    #[test]
    fn kmax_exceeds_reference_bound_where_finite(d in 0.01f64..0.99, p in 0.05f64..5.0) {
        if let KLimit::Finite(k) = kmax(d, p).unwrap() {
            prop_assert!(k > 1.0 / (2.0 * PI), "kmax({d}, {p}) = {k}");
        }
    }

    #[test]
    fn ktilde_max_is_smallest_at_full_duty(d in 0.01f64..1.0, z in 0.001f64..=0.1) {
        let at_one = ktilde_max(1.0, z).unwrap().finite().unwrap();
        if let KLimit::Finite(k) = ktilde_max(d, z).unwrap() {
            prop_assert!(k >= at_one * (1.0 - 1e-12));
        }
    }

    #[test]
    fn closed_form_crossovers_match_bisection(k in 0.01f64..3.0, p in 0.05f64..1.0, kt in 0.001f64..0.1, z in 0.005f64..0.1) {
        let ws = 2.0 * PI * 5e4;
        let t2 = RationalLoopGain::new(k * ws, vec![], vec![p * ws], 1);
        let wc = crossover_frequency(&t2, ws).unwrap() / ws;
        prop_assert!(rel(wc, crossover_type2_closed(k, p)) < 1e-3);
        let pi = RationalLoopGain::new(kt * ws * ws, vec![z * ws], vec![], 2);
        let wc = crossover_frequency(&pi, ws).unwrap() / ws;
        prop_assert!(rel(wc, crossover_pi_closed(kt, z)) < 1e-3);
    }

    #[test]
    fn partial_fractions_recombine(d in 0.05f64..0.95, k_c in 1e4f64..1e6, z in 0.005f64..0.2, p in 0.3f64..3.0, pi in any::<bool>()) {
        let cfg = if pi {
            boost(d, Scheme::AcmcPi, k_c, z, None)
        } else {
            boost(d, Scheme::AcmcType2, k_c, z, Some(p))
        };
        let t = build_loop_gain(&cfg).unwrap();
        let back = recombine(&t.partial_fractions().unwrap(), t.origin_order, &t.poles);
        let num = t.numerator_poly();
        let scale = num.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        for (i, c) in num.iter().enumerate() {
            let r = back.get(i).copied().unwrap_or(0.0);
            prop_assert!((r - c).abs() <= 1e-10 * scale, "coefficient {i}: {r} vs {c}");
        }
        for r in back.iter().skip(num.len()) {
            prop_assert!(r.abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn phase_margin_does_not_depend_on_duty(d1 in 0.05f64..0.95, d2 in 0.05f64..0.95, p in 0.2f64..2.0) {
        let a = boost(d1, Scheme::AcmcType2, 141670.0, 0.018, Some(p));
        let b = boost(d2, Scheme::AcmcType2, 141670.0, 0.018, Some(p));
        let pa = phase_margin(&build_loop_gain(&a).unwrap(), a.omega_s()).unwrap();
        let pb = phase_margin(&build_loop_gain(&b).unwrap(), b.omega_s()).unwrap();
        prop_assert!((pa.phase_margin_deg - pb.phase_margin_deg).abs() < 1e-9);
    }

    #[test]
    fn buck_and_boost_share_every_condition(d in 0.05f64..0.95, k_c in 1e4f64..1e6, z in 0.005f64..0.2, p in 0.3f64..3.0, which in 0usize..3) {
        let scheme = [Scheme::Pcmc, Scheme::AcmcType2, Scheme::AcmcPi][which];
        let mut bst = boost(d, scheme, k_c, z, (scheme == Scheme::AcmcType2).then_some(p));
        if scheme == Scheme::Pcmc {
            bst.compensator = None;
        }
        let mut bck = bst.clone();
        bck.topology = Topology::Buck;
        bck.v_s = 14.0;
        let a = hba_verdict(&bst).unwrap();
        let b = hba_verdict(&bck).unwrap();
        prop_assert!(rel(a.index, b.index) < 1e-12);
        prop_assert_eq!(a.stable, b.stable);
    }

    #[test]
    fn config_round_trip(
        d in 0.05f64..0.95, topo in 0usize..3, which in 0usize..3,
        k_c in 1e3f64..1e6, z in 0.001f64..0.2, p in 0.3f64..5.0,
        r_c in 0.0f64..0.1, v_c in proptest::option::of(0.1f64..5.0),
    ) {
        let scheme = [Scheme::Pcmc, Scheme::AcmcType2, Scheme::AcmcPi][which];
        let mut cfg = boost(d, scheme, k_c, z, (scheme == Scheme::AcmcType2).then_some(p));
        if scheme == Scheme::Pcmc {
            cfg.compensator = None;
        }
        cfg.topology = [Topology::Buck, Topology::Boost, Topology::BuckBoost][topo];
        cfg.r_c = r_c;
        cfg.v_c = v_c;
        let back = ConverterConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn stability_forms_are_equivalent(d in 0.02f64..0.98, k_c in 1e4f64..1e6, z in 0.0005f64..0.05, p in 0.05f64..5.0, pi in any::<bool>()) {
        if pi {
            let cfg = boost(d, Scheme::AcmcPi, k_c, z, None);
            let v = acmc_pi_verdict(&cfg).unwrap();
            let m_a = cfg.ramp_slope();
            prop_assert_eq!(v.stable, v.required_ramp_slope < m_a);
            let kt = cfg.ktilde_gain().unwrap();
            let limit = ktilde_max(d, z).unwrap();
            if (v.index - 1.0).abs() > 1e-9 {
                prop_assert_eq!(v.stable, limit.admits(kt));
            }
        } else {
            let cfg = boost(d, Scheme::AcmcType2, k_c, z, Some(p));
            let v = acmc_type2_verdict(&cfg, false).unwrap();
            let m_a = cfg.ramp_slope();
            prop_assert_eq!(v.stable, v.required_ramp_slope < m_a);
            let k = cfg.k_gain().unwrap();
            if (v.index - 1.0).abs() > 1e-9 {
                prop_assert_eq!(v.stable, kmax(d, p).unwrap().admits(k));
            }
        }
    }
}

fn pcmc_buck(d: f64, loop_: VoltageLoop) -> ConverterConfig {
    let mut cfg = presets::example1(true);
    cfg.topology = Topology::Buck;
    cfg.scheme = Scheme::Pcmc;
    cfg.compensator = None;
    cfg.v_s = 14.0;
    cfg.operating_point = OperatingPoint::Duty(d);
    cfg.v_c = None;
    cfg.voltage_loop = loop_;
    cfg
}

#[test]
fn type2_voltage_loop_approaches_pi_for_far_pole() {
    let (k_c, omega_z) = (2e5, 2e3);
    for d in [0.3, 0.55, 0.7, 0.9] {
        let ws = pcmc_buck(d, VoltageLoop::Open).omega_s();
        let pi = voltage_loop_mv(&pcmc_buck(d, VoltageLoop::Pi { k_c, omega_z })).unwrap();
        let t2 = voltage_loop_mv(&pcmc_buck(d, VoltageLoop::Type2 { k_c, omega_z, omega_p: 100.0 * ws })).unwrap();
        assert!(rel(t2, pi) < 0.01, "D={d}: {t2} vs {pi}");
    }
}

#[test]
fn kp_limit_increases_with_ramp_amplitude() {
    let mut cfg = pcmc_buck(0.7, VoltageLoop::Proportional { k_p: 1.0 });
    let mut last = f64::NEG_INFINITY;
    for v_m in [0.5, 1.0, 2.0, 4.0] {
        cfg.v_m = v_m;
        let k = kp_limit(&cfg).unwrap().finite().unwrap();
        assert!(k > last);
        last = k;
    }
}

#[test]
fn sweep_cells_follow_the_limit() {
    let grid = sweep_stability(
        SweepScheme::Type2,
        0.6,
        Range::new(0.01, 0.99, 41).unwrap(),
        Range::new(0.05, 5.0, 41).unwrap(),
    )
    .unwrap();
    for c in &grid.cells {
        match c.limit {
            KLimit::Finite(k) => assert_eq!(c.stable, 0.6 < k),
            KLimit::AlwaysStable => assert!(c.stable),
        }
    }
}

#[test]
fn conservative_gain_is_stable_everywhere() {
    for i in 0..50 {
        for j in 0..50 {
            let d = 0.01 + 0.98 * i as f64 / 49.0;
            let p = 0.05 + 4.95 * j as f64 / 49.0;
            assert!(kmax(d, p).unwrap().admits(0.3), "D={d} p={p}");
        }
    }
}
