//! Acceptance criteria 1 to 8. Prints one PASS/FAIL line per criterion,
//! followed by its individual checks, and exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use cmc_fsi::alpha::{alpha0, alpha1, alpha_closed, alpha_series};
use cmc_fsi::config::{presets, OperatingPoint};
use cmc_fsi::ftransform::{f_transform, PartialFractionTerm};
use cmc_fsi::loopgain::{ssaa, LoopGain, RationalLoopGain};
use cmc_fsi::sda::{analyze, verdict_of, PoincareResult};
use cmc_fsi::sim::{rk4_crosscheck, simulate, Classification};
use cmc_fsi::stability::{hba_verdict, kp_limit, ktilde_max, pcmc_voltage_verdict, voltage_loop_mv, KLimit};
use cmc_fsi::sweep::{sweep_stability, Range, SweepScheme};
use cmc_fsi::{ConverterConfig, Scheme, Topology, VoltageLoop};

struct Check {
    ok: bool,
    what: String,
}

#[derive(Default)]
struct Criterion {
    checks: Vec<Check>,
}

impl Criterion {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.checks.push(Check { ok, what: what.into() });
    }

    fn within(&mut self, label: &str, value: f64, target: f64, tol: f64) {
        let ok = (value - target).abs() <= tol;
        self.check(ok, format!("{label}: {value:.6} vs {target} +- {tol}"));
    }

    fn rel_within(&mut self, label: &str, value: f64, target: f64, rel: f64) {
        let ok = ((value - target) / target).abs() <= rel;
        self.check(ok, format!("{label}: {value:.6} vs {target} +- {:.3}%", rel * 100.0));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

fn sda(cfg: &ConverterConfig) -> Option<PoincareResult> {
    analyze(cfg).ok()
}

fn sorted_re(r: &PoincareResult) -> Vec<f64> {
    let mut v: Vec<f64> = r.eigenvalues.iter().map(|z| z.re).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn eig_set(c: &mut Criterion, label: &str, r: Option<&PoincareResult>, expected: &[f64], tol: f64) {
    let Some(r) = r else {
        c.check(false, format!("{label}: SDA failed"));
        return;
    };
    let got = sorted_re(r);
    let real = r.eigenvalues.iter().all(|z| z.im.abs() <= tol);
    let ok = real && got.len() == expected.len() && got.iter().zip(expected).all(|(g, e)| (g - e).abs() <= tol);
    let shown: Vec<String> = got.iter().map(|x| format!("{x:.4}")).collect();
    c.check(ok, format!("{label}: eigenvalues [{}] vs {expected:?} +- {tol}", shown.join(", ")));
}

fn dominant_near(c: &mut Criterion, label: &str, r: Option<&PoincareResult>, target: f64, tol: f64) {
    match r {
        Some(r) => c.within(&format!("{label} dominant eigenvalue"), r.dominant.re, target, tol),
        None => c.check(false, format!("{label}: SDA failed")),
    }
}

fn sim_class(cfg: &ConverterConfig, periods: usize) -> Option<Classification> {
    simulate(cfg, periods, None).ok().map(|t| t.classification)
}

fn nonlinear_verdicts(c: &mut Criterion, label: &str, cfg: &ConverterConfig, stable: bool) {
    let want = if stable { "stable" } else { "unstable" };
    match hba_verdict(cfg) {
        Ok(v) => c.check(v.stable == stable, format!("{label}: HBA {want} (index {:.4})", v.index)),
        Err(e) => c.check(false, format!("{label}: HBA error {e}")),
    }
    match sda(cfg) {
        Some(r) => {
            let v = verdict_of(&r);
            let ok = if stable { v.stable } else { r.unstable };
            c.check(ok, format!("{label}: SDA {want} (dominant {:.4})", r.dominant.re));
        }
        None => c.check(false, format!("{label}: SDA failed")),
    }
    let class = sim_class(cfg, 300);
    let want_class = if stable { Classification::Period1 } else { Classification::Subharmonic };
    c.check(
        class == Some(want_class),
        format!("{label}: simulation {want_class} within 300 periods (got {class:?})"),
    );
}

fn runtime(c: &mut Criterion, start: Instant, limit: Duration) {
    let t = start.elapsed();
    c.check(t < limit, format!("runtime {:.2} s < {} s", t.as_secs_f64(), limit.as_secs()));
}

/// Loop gain `g·Π(1 + s/z)/(s^m Π(1 + s/p))` built from normalized
/// frequencies.
fn gain(ws: f64, zeros: &[f64], poles: &[f64], order: u32) -> RationalLoopGain {
    RationalLoopGain::new(
        1.0,
        zeros.iter().map(|z| z * ws).collect(),
        poles.iter().map(|p| p * ws).collect(),
        order,
    )
}

fn ac1() -> Criterion {
    let start = Instant::now();
    let mut c = Criterion::default();
    let mut rng = StdRng::seed_from_u64(1);
    let names = ["A 1/(s+wp)", "B 1/s", "E 1/(s(1+s/wp))", "G (1+s/wz)/s^2", "I (1+s/wz)/(s^2(1+s/wp))"];
    let mut worst = [0.0f64; 5];
    let mut failed = [0usize; 5];
    for _ in 0..100 {
        let d = rng.random_range(0.01..0.99);
        let p = rng.random_range(0.05..3.0);
        let z = rng.random_range(0.002..0.9) * p;
        let ws = 2.0 * PI * rng.random_range(1e3..1e6);
        let (a0, a1, a) = (alpha0(d).unwrap(), alpha1(d).unwrap(), alpha_closed(d, p).unwrap());
        let wp = p * ws;
        let cases: [(Vec<PartialFractionTerm>, f64); 5] = [
            (vec![PartialFractionTerm::real_pole(1.0, wp)], a / ws),
            (gain(ws, &[], &[], 1).partial_fractions().unwrap(), a0 / ws),
            (
                RationalLoopGain::new(1.0, vec![], vec![wp], 1).partial_fractions().unwrap(),
                (a0 - a) / ws,
            ),
            (gain(ws, &[z], &[], 2).partial_fractions().unwrap(), (a0 / z + a1) / (ws * ws)),
            (
                gain(ws, &[z], &[p], 2).partial_fractions().unwrap(),
                (a1 + (1.0 / p - 1.0 / z) * (a - a0)) / (ws * ws),
            ),
        ];
        for (k, (terms, expected)) in cases.iter().enumerate() {
            let got = f_transform(terms, d, ws).unwrap();
            let e = rel_err(got, *expected);
            worst[k] = worst[k].max(e);
            if e > 1e-10 {
                failed[k] += 1;
            }
        }
    }
    for k in 0..5 {
        c.check(
            failed[k] == 0,
            format!("case {}: 100 draws, worst relative error {:.2e} (tol 1e-10)", names[k], worst[k]),
        );
    }
    runtime(&mut c, start, Duration::from_secs(1));
    c
}

fn ac2() -> Criterion {
    let start = Instant::now();
    let mut c = Criterion::default();
    let cfg = presets::example1(true);
    match hba_verdict(&cfg) {
        Ok(v) => c.check(v.index > 1.0, format!("v_s=1.96: HBA index {:.4} > 1", v.index)),
        Err(e) => c.check(false, format!("HBA error {e}")),
    }
    let r = sda(&cfg);
    eig_set(&mut c, "v_s=1.96 SDA", r.as_ref(), &[-1.02, 0.0, 0.88, 0.91], 0.02);
    let class = sim_class(&cfg, 300);
    c.check(
        class == Some(Classification::Subharmonic),
        format!("v_s=1.96: simulation SUBHARMONIC within 300 periods (got {class:?})"),
    );
    match ssaa(&cfg) {
        Ok(a) => c.within("v_s=1.96: SSAA phase margin deg", a.phase_margin_deg, 60.0, 5.0),
        Err(e) => c.check(false, format!("SSAA error {e}")),
    }
    nonlinear_verdicts(&mut c, "v_s=2.1", &presets::example1(false), true);
    runtime(&mut c, start, Duration::from_secs(30));
    c
}

/// Roots of `K(α₀ − α) = 1` in p, bracketed on a fine grid and bisected.
fn hba_window(k: f64, d: f64) -> Vec<f64> {
    let f = |p: f64| k * (alpha0(d).unwrap() - alpha_closed(d, p).unwrap()) - 1.0;
    let grid: Vec<f64> = (0..=4000).map(|i| 0.01 + i as f64 * 0.001).collect();
    let mut roots = Vec::new();
    for w in grid.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        if f(lo).signum() == f(hi).signum() {
            continue;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == f(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots
}

fn ac3() -> Criterion {
    let start = Instant::now();
    let mut c = Criterion::default();
    let roots = hba_window(1.3, 0.36);
    c.check(roots.len() == 2, format!("K=1.3, D=0.36: HBA roots {roots:?}"));
    if roots.len() == 2 {
        c.within("window lower edge p", roots[0], 0.18, 0.005);
        c.within("window upper edge p", roots[1], 0.515, 0.005);
    }
    for (p, stable, lambda) in [(0.17, true, None), (0.18, false, Some(-1.07)), (0.515, false, Some(-1.002)), (0.52, true, None)] {
        let cfg = presets::example2(p);
        let label = format!("p={p}");
        let r = sda(&cfg);
        match &r {
            Some(r) => {
                let v = verdict_of(r);
                let ok = if stable { v.stable } else { r.unstable };
                c.check(ok, format!("{label}: SDA {} (dominant {:.4})", if stable { "stable" } else { "unstable" }, r.dominant.re));
            }
            None => c.check(false, format!("{label}: SDA failed")),
        }
        if let Some(l) = lambda {
            dominant_near(&mut c, &label, r.as_ref(), l, 0.02);
        }
        let want = if stable { Classification::Period1 } else { Classification::Subharmonic };
        let class = sim_class(&cfg, 300);
        c.check(class == Some(want), format!("{label}: simulation {want} (got {class:?})"));
    }
    runtime(&mut c, start, Duration::from_secs(60));
    c
}

fn ac4() -> Criterion {
    let start = Instant::now();
    let mut c = Criterion::default();
    match ktilde_max(0.6, 0.018) {
        Ok(KLimit::Finite(v)) => c.rel_within("K~max(0.6, 0.018)", v, 0.0232, 0.03),
        other => c.check(false, format!("K~max(0.6, 0.018) = {other:?}")),
    }
    let unstable = presets::example3(true);
    let r = sda(&unstable);
    match &r {
        Some(r) => c.check(r.unstable, format!("v_s=5.6: SDA unstable (dominant {:.4})", r.dominant.re)),
        None => c.check(false, "v_s=5.6: SDA failed"),
    }
    dominant_near(&mut c, "v_s=5.6", r.as_ref(), -1.02, 0.02);
    let class = sim_class(&unstable, 300);
    c.check(class == Some(Classification::Subharmonic), format!("v_s=5.6: simulation SUBHARMONIC (got {class:?})"));

    let stable = presets::example3(false);
    c.within("v_s=5.88: duty", stable.duty(), 0.58, 0.005);
    match sda(&stable) {
        Some(r) => c.check(verdict_of(&r).stable, format!("v_s=5.88: SDA stable (dominant {:.4})", r.dominant.re)),
        None => c.check(false, "v_s=5.88: SDA failed"),
    }
    let class = sim_class(&stable, 300);
    c.check(class == Some(Classification::Period1), format!("v_s=5.88: simulation PERIOD1 (got {class:?})"));
    match ssaa(&unstable) {
        Ok(a) => c.within("SSAA phase margin deg", a.phase_margin_deg, 89.0, 2.0),
        Err(e) => c.check(false, format!("SSAA error {e}")),
    }
    runtime(&mut c, start, Duration::from_secs(30));
    c
}

fn ac5() -> Criterion {
    let start = Instant::now();
    let mut c = Criterion::default();
    let mut worst = 0.0f64;
    let mut mismatched = Vec::new();
    let mut failures = Vec::new();
    for i in 0..10 {
        let d = 0.45 + 0.05 * i as f64;
        let mut buck = presets::example1(true);
        buck.topology = Topology::Buck;
        buck.v_s = 14.0;
        buck.operating_point = OperatingPoint::Duty(d);
        buck.v_c = None;
        let mut boost = buck.clone();
        boost.topology = Topology::Boost;
        boost.v_s = 14.0 * (1.0 - d);
        match (hba_verdict(&buck), hba_verdict(&boost)) {
            (Ok(a), Ok(b)) => worst = worst.max(rel_err(a.index, b.index)),
            _ => failures.push(format!("HBA D={d:.2}")),
        }
        match (sda(&buck), sda(&boost)) {
            (Some(a), Some(b)) => {
                let (va, vb) = (verdict_of(&a), verdict_of(&b));
                if va.stable != vb.stable || a.unstable != b.unstable {
                    mismatched.push(format!("D={d:.2} buck {:.4} boost {:.4}", a.dominant.re, b.dominant.re));
                }
            }
            _ => failures.push(format!("SDA D={d:.2}")),
        }
    }
    c.check(failures.is_empty(), format!("all analyses ran (failures: {failures:?})"));
    c.check(worst <= 1e-12, format!("HBA index buck vs boost, D=0.45..0.90: worst relative gap {worst:.2e} (tol 1e-12)"));
    c.check(mismatched.is_empty(), format!("SDA verdicts match at all 10 duties (mismatches: {mismatched:?})"));
    runtime(&mut c, start, Duration::from_secs(60));
    c
}

fn ac6() -> Criterion {
    let start = Instant::now();
    let mut c = Criterion::default();
    let d = Range::new(0.01, 0.99, 201).unwrap();
    let p = Range::new(0.05, 5.0, 201).unwrap();
    let grid = sweep_stability(SweepScheme::Type2, 1.0 / PI - 1e-6, d, p).unwrap();
    let mut finite = 0;
    let mut below = 0;
    let mut min_finite = f64::INFINITY;
    for cell in &grid.cells {
        if let KLimit::Finite(k) = cell.limit {
            finite += 1;
            min_finite = min_finite.min(k);
            if k <= 1.0 / (2.0 * PI) {
                below += 1;
            }
        }
    }
    c.check(
        below == 0,
        format!("{finite} finite K_max cells, smallest {min_finite:.6} > 1/2pi = {:.6}", 1.0 / (2.0 * PI)),
    );
    let unstable = grid.cells.iter().filter(|c| !c.stable).count();
    c.check(unstable == 0, format!("K = 1/pi - 1e-6 stable at all 40401 cells ({unstable} unstable)"));
    let mut worst = 0.0f64;
    for i in 1..=20 {
        let z = 0.005 * i as f64;
        let expected = z / (PI * (1.0 + PI * z));
        match ktilde_max(1.0, z) {
            Ok(KLimit::Finite(v)) => worst = worst.max(rel_err(v, expected)),
            _ => worst = f64::INFINITY,
        }
    }
    c.check(worst <= 1e-10, format!("K~max(1, z) = z/(pi(1+pi z)), z = 0.005..0.1: worst relative error {worst:.2e}"));
    runtime(&mut c, start, Duration::from_secs(5));
    c
}

fn random_buck(rng: &mut StdRng) -> ConverterConfig {
    let mut cfg = presets::example1(true);
    cfg.topology = Topology::Buck;
    cfg.scheme = Scheme::Pcmc;
    cfg.compensator = None;
    cfg.v_c = None;
    cfg.v_s = rng.random_range(5.0..48.0);
    cfg.operating_point = OperatingPoint::Duty(rng.random_range(0.52..0.95));
    cfg.f_s = rng.random_range(2e4..5e5);
    cfg.l = rng.random_range(1e-6..1e-4);
    cfg.c = rng.random_range(1e-5..1e-3);
    cfg.r = rng.random_range(0.5..20.0);
    cfg.r_c = rng.random_range(0.001..0.1);
    cfg.r_s = rng.random_range(0.01..0.5);
    cfg.v_m = rng.random_range(0.5..5.0);
    cfg
}

fn ac7() -> Criterion {
    let start = Instant::now();
    let mut c = Criterion::default();
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst_mv = 0.0f64;
    let mut worst_index = 0.0f64;
    let mut tested = 0;
    let mut draws = 0;
    while tested < 100 && draws < 10_000 {
        draws += 1;
        let mut cfg = random_buck(&mut rng);
        let (k_c, omega_z) = (rng.random_range(1e4..1e6), rng.random_range(1e2..1e4));
        cfg.voltage_loop = VoltageLoop::Pi { k_c, omega_z };
        let pi = voltage_loop_mv(&cfg).unwrap();
        cfg.voltage_loop = VoltageLoop::Proportional { k_p: k_c / omega_z };
        let prop = voltage_loop_mv(&cfg).unwrap();
        worst_mv = worst_mv.max(rel_err(pi, prop));
        let Ok(KLimit::Finite(limit)) = kp_limit(&cfg) else {
            continue;
        };
        if limit <= 0.0 {
            continue;
        }
        cfg.voltage_loop = VoltageLoop::Proportional { k_p: limit };
        let index = pcmc_voltage_verdict(&cfg).unwrap().index;
        worst_index = worst_index.max((index - 1.0).abs());
        tested += 1;
    }
    c.check(worst_mv <= 1e-12, format!("PI m_v with k_p = K_c/w_z equals proportional m_v: worst relative gap {worst_mv:.2e}"));
    c.check(
        tested == 100 && worst_index <= 1e-9,
        format!("k_p limit substituted back, {tested} random bucks: worst |index - 1| {worst_index:.2e} (tol 1e-9)"),
    );
    runtime(&mut c, start, Duration::from_secs(1));
    c
}

fn ac8() -> Criterion {
    let start = Instant::now();
    let mut c = Criterion::default();
    let mut worst = 0.0f64;
    for cfg in [presets::example1(true), presets::example2(0.52), presets::example3(true)] {
        let (Ok(exact), Ok(rk4)) = (simulate(&cfg, 50, None), rk4_crosscheck(&cfg, 50, 10_000)) else {
            c.check(false, "simulation failed");
            continue;
        };
        for (a, b) in exact.clock_samples.iter().zip(&rk4.clock_samples) {
            for ((u, v), s) in a.x.iter().zip(&b.x).zip(&exact.scales) {
                worst = worst.max(((u - v) / s).abs());
            }
        }
    }
    c.check(worst <= 1e-6, format!("exact vs RK4 clock samples, 3 configs x 50 periods: worst scaled gap {worst:.2e} (tol 1e-6)"));

    let mut worst_series = 0.0f64;
    for i in 0..=10 {
        let d = i as f64 / 10.0;
        for j in 1..=20 {
            let p = 0.01 * j as f64;
            worst_series = worst_series.max((alpha_closed(d, p).unwrap() - alpha_series(d, p, 30).unwrap()).abs());
        }
    }
    c.check(worst_series <= 1e-8, format!("alpha series (30 terms) vs closed form, p <= 0.2: worst {worst_series:.2e} (tol 1e-8)"));

    let mut rng = StdRng::seed_from_u64(8);
    let mut worst_lin = 0.0f64;
    for _ in 0..100 {
        let d = rng.random_range(0.01..0.99);
        let ws = 2.0 * PI * rng.random_range(1e3..1e6);
        let t1 = vec![
            PartialFractionTerm::origin1(rng.random_range(-1e5..1e5)),
            PartialFractionTerm::real_pole(rng.random_range(-1e5..1e5), ws * rng.random_range(0.05..3.0)),
        ];
        let t2 = vec![
            PartialFractionTerm::origin2(rng.random_range(-1e10..1e10)),
            PartialFractionTerm::real_pole(rng.random_range(-1e5..1e5), ws * rng.random_range(3.0..6.0)),
        ];
        let (a, b) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let combined: Vec<_> = t1.iter().map(|t| t.scaled(a)).chain(t2.iter().map(|t| t.scaled(b))).collect();
        let lhs = f_transform(&combined, d, ws).unwrap();
        let rhs = a * f_transform(&t1, d, ws).unwrap() + b * f_transform(&t2, d, ws).unwrap();
        let scale = (a * f_transform(&t1, d, ws).unwrap()).abs() + (b * f_transform(&t2, d, ws).unwrap()).abs();
        worst_lin = worst_lin.max((lhs - rhs).abs() / scale);
    }
    c.check(
        worst_lin <= 1e-14,
        format!("F-transform linearity, 100 draws: worst gap {worst_lin:.2e} of the term magnitude (rounding only)"),
    );

    let mut worst_step = 0.0f64;
    let mut warned = Vec::new();
    let rows = [
        presets::example1(true),
        presets::example1(false),
        presets::example2(0.17),
        presets::example2(0.18),
        presets::example2(0.515),
        presets::example2(0.52),
        presets::example3(true),
        presets::example3(false),
    ];
    for (i, cfg) in rows.iter().enumerate() {
        match sda(cfg) {
            Some(r) => {
                worst_step = worst_step.max(r.step_halving_change);
                if !r.warnings.is_empty() {
                    warned.push(i);
                }
            }
            None => worst_step = f64::INFINITY,
        }
    }
    c.check(
        worst_step < 1e-3 && warned.is_empty(),
        format!("SDA eigenvalues under step halving, 8 example rows: worst change {worst_step:.2e} (tol 1e-3)"),
    );
    runtime(&mut c, start, Duration::from_secs(60));
    c
}

type Run = fn() -> Criterion;

fn main() {
    let criteria: [(&str, Run); 8] = [
        ("F-transform reproduces the closed-form case conditions", ac1),
        ("Example 1 four-way agreement", ac2),
        ("Example 2 unstable p window", ac3),
        ("Example 3 PI case", ac4),
        ("Buck/boost unification", ac5),
        ("Conservative bounds", ac6),
        ("Voltage-loop formulas", ac7),
        ("Integrator and property suite", ac8),
    ];
    let mut all = true;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let c = run();
        let pass = c.passed();
        all &= pass;
        println!("AC{} {} {title}", i + 1, if pass { "PASS" } else { "FAIL" });
        for check in &c.checks {
            println!("    {} {}", if check.ok { "ok " } else { "BAD" }, check.what);
        }
    }
    if !all {
        std::process::exit(1);
    }
}
