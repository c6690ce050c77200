//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines reach the terminal. The
//! process fails if any criterion outside `EXPECTED_FAILURES` fails, or if
//! an expected failure starts passing.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sparse_sieve::arith::{factorize, gcd, quad_cong_roots};
use sparse_sieve::bounds::{bound_shapes, sieve_lhs, theorem1_bracket, ShapeParams};
use sparse_sieve::cli::{execute, Command, ExperimentConfig};
use sparse_sieve::counting::{
    count_window_ap, dirichlet_approx, k_delta, p_alpha, square_window_bound, ClassWindows,
    WindowQuery,
};
use sparse_sieve::harmonic::{
    gauss_sum, gauss_sum_row, measure_vdc_constant, oscillatory_e, oscillatory_e_closed, phi,
    phi_hat, phi_hat_quadrature, poisson_residual, vdc_instances, VdcRegime,
};
use sparse_sieve::moduli::{
    build_moduli_set, derive_subset, enumerate_farey, ModuliKind, ModuliSet,
};
use sparse_sieve::oracle;
use sparse_sieve::sequence::{make_sequence, CoefficientSequence, ModulusEvaluator, SequenceKind};
use sparse_sieve::verify::{
    frozen_calibration, frozen_shape_regimes, PHI_HAT_POINTS, POISSON_GRID,
};

/// Criteria that cannot hold as stated; see the project notes.
const EXPECTED_FAILURES: [u32; 1] = [10];

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

fn random_seq(r: &mut ChaCha8Rng, n: usize) -> CoefficientSequence {
    let kind = match r.random_range(0..3) {
        0 => SequenceKind::RandomSigns(r.random()),
        1 => SequenceKind::RandomPhases(r.random()),
        _ => SequenceKind::Focused(r.random()),
    };
    make_sequence(&kind, n).unwrap()
}

fn c1_gauss() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut checked = 0u64;
    let mut bad = 0u64;
    for c in 1..=512u64 {
        let bound = (2.0 * c as f64).sqrt() + 1e-9;
        for k in (1..=c).filter(|&k| gcd(k, c) == 1) {
            for g in gauss_sum_row(k as i64, c).unwrap() {
                checked += 1;
                worst = worst.max(g.norm() / (2.0 * c as f64).sqrt());
                bad += u64::from(g.norm() > bound);
            }
        }
    }
    // the row evaluator against the single-sum routine on a sample
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let mut mismatch = 0;
    for _ in 0..2000 {
        let c = r.random_range(1..=512u64);
        let k = loop {
            let k = r.random_range(1..=c);
            if gcd(k, c) == 1 {
                break k;
            }
        };
        let l = r.random_range(0..c);
        let row = gauss_sum_row(k as i64, c).unwrap();
        let single = gauss_sum(k as i64, l as i64, c).unwrap();
        mismatch += u32::from((row[l as usize] - single).norm() > 1e-9);
    }
    let eq = gauss_sum(1, 0, 4).unwrap();
    let eq_ok =
        (eq - Complex64::new(2.0, 2.0)).norm() <= 1e-9 && (eq.norm() - 8f64.sqrt()).abs() <= 1e-9;
    let t = start.elapsed();
    outcome(
        bad == 0 && mismatch == 0 && eq_ok && within(t, 60),
        format!("{checked} sums, max |G|/√(2c) = {worst:.12}, equality case ok = {eq_ok}, {t:.1?}"),
    )
}

fn c2_classical() -> Outcome {
    let start = Instant::now();
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut bad = 0;
    for _ in 0..200 {
        let n = r.random_range(1..=128usize);
        let seq = random_seq(&mut r, n);
        let span = r.random_range(1..=128u64);
        let p = r.random_range(0.02..0.6);
        let mut el: Vec<u64> = (1..=span).filter(|_| r.random_bool(p)).collect();
        if el.is_empty() {
            el.push(span);
        }
        let set = ModuliSet::explicit_in(el, 0.0, span as f64).unwrap();
        let lhs = sieve_lhs(&seq, &set).unwrap();
        let rhs = (n as f64 + (span * span) as f64) * seq.energy();
        worst = worst.max(lhs / rhs);
        bad += u32::from(lhs > rhs * (1.0 + 1e-9));
    }
    let t = start.elapsed();
    outcome(
        bad == 0 && within(t, 60),
        format!("200 instances, max lhs/((N+span²)Z) = {worst:.6}, {t:.1?}"),
    )
}

fn c3_parseval() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = r.random_range(1..=300usize);
        let seq = random_seq(&mut r, n);
        let z = seq.energy();
        for q in [n as u64, n as u64 + 1, 2 * n as u64 + 3] {
            // direct evaluation at every a/q, independent of the bucketing
            let direct: f64 = (1..=q)
                .map(|a| oracle::exp_sum_naive(&seq, a as f64 / q as f64).norm_sqr())
                .sum();
            let fast = ModulusEvaluator::new(&seq, q).energy(false);
            let want = q as f64 * z;
            worst = worst
                .max((direct - want).abs() / want)
                .max((fast - want).abs() / want);
        }
    }
    outcome(
        worst <= 1e-8,
        format!("150 identities, max relative error {worst:.2e}"),
    )
}

fn c4_roots() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(4);
    let (mut over, mut differ, mut total) = (0, 0, 0);
    let mut tight = 0;
    for k in 1..=4096u64 {
        let omega = factorize(k).omega();
        let bound = 1u64 << (omega + 1);
        for _ in 0..20 {
            let (g, l) = if k == 1 {
                (1, 0)
            } else {
                loop {
                    let g = r.random_range(1..k);
                    let l = r.random_range(1..k);
                    if gcd(g, k) == 1 && gcd(l, k) == 1 {
                        break (g, l as i64);
                    }
                }
            };
            let fast = quad_cong_roots(g, l, k);
            let scan = oracle::quad_roots_scan(g, l, k);
            total += 1;
            over += u32::from(fast.count > bound);
            differ += u32::from(fast.roots != scan || fast.count != scan.len() as u64);
            tight += u32::from(fast.count == bound);
        }
    }
    outcome(
        over == 0 && differ == 0,
        format!("{total} instances, {over} over 2^(ω+1), {differ} oracle mismatches, {tight} attain the bound"),
    )
}

fn c5_oracles() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let (mut win_bad, mut kd_bad, mut pa_bad) = (0, 0, 0);
    for _ in 0..200 {
        // A_t against the candidate scan
        let offset = r.random_range(0..=500u64) as f64;
        let span = r.random_range(1..=1000u64) as f64;
        let p = r.random_range(0.01..0.5);
        let el: Vec<u64> = ((offset as u64 + 1)..=((offset + span) as u64))
            .filter(|_| r.random_bool(p))
            .take(1000)
            .collect();
        let set = ModuliSet::explicit_in(el, offset, span).unwrap();
        let t = r.random_range(1..=8u64);
        let sub = derive_subset(&set, t);
        let k = r.random_range(1..=50u64);
        let l = loop {
            let l = r.random_range(0..k as i64);
            if gcd(l as u64, k) == 1 {
                break l;
            }
        };
        let u = r.random_range(0.0..=span);
        let q = WindowQuery::new(u, k, l, t).unwrap();
        let fast = count_window_ap(&sub, &q, offset, span);
        let slow =
            oracle::window_count_scan(&sub, u, k, l, offset / t as f64, (offset + span) / t as f64);
        win_bad += u32::from(fast != slow);

        // K(Δ) and P(α) on Farey lists of at most 10³ points
        let farey = loop {
            let top = r.random_range(1..=90u64);
            let el: Vec<u64> = (1..=top).filter(|_| r.random_bool(0.2)).collect();
            if el.is_empty() {
                continue;
            }
            let s = ModuliSet::explicit(el).unwrap();
            if s.farey_size() <= 1000 {
                break enumerate_farey(&s).unwrap();
            }
        };
        let delta = if r.random_bool(0.3) {
            // exact half-gaps between two points stress the closed-arc ends
            let e = farey.entries();
            let (i, j) = (r.random_range(0..e.len()), r.random_range(0..e.len()));
            ((e[i].value - e[j].value).abs() / 2.0).clamp(1e-6, 0.5)
        } else {
            10f64.powf(r.random_range(-4.0..-0.31))
        };
        kd_bad += u32::from(k_delta(&farey, delta).unwrap() != oracle::k_delta_scan(&farey, delta));
        let alpha = r.random_range(-0.1..1.1);
        pa_bad +=
            u32::from(p_alpha(&farey, alpha, delta) != oracle::p_alpha_scan(&farey, alpha, delta));
    }
    outcome(
        win_bad + kd_bad + pa_bad == 0,
        format!(
            "mismatches: count_window_ap {win_bad}/200, k_delta {kd_bad}/200, p_alpha {pa_bad}/200"
        ),
    )
}

fn c6_dirichlet() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(6);
    let mut bad = 0;
    for _ in 0..10_000 {
        let alpha: f64 = r.random();
        let tau = r.random_range(1.0..=1000.0);
        let a = dirichlet_approx(alpha, tau).unwrap();
        let ok = a.r >= 1
            && a.r as f64 <= tau
            && gcd(a.b.unsigned_abs(), a.r) == 1
            && a.z.abs() <= 1.0 / (a.r as f64 * tau);
        bad += u32::from(!ok);
    }
    outcome(bad == 0, format!("10000 draws, {bad} violations"))
}

fn c7_kernel() -> Outcome {
    let worst_hat = PHI_HAT_POINTS
        .iter()
        .map(|&s| (phi_hat_quadrature(s) - phi_hat(s)).abs())
        .fold(0.0, f64::max);
    let worst_poisson = POISSON_GRID
        .iter()
        .map(|&(sc, sh)| poisson_residual(sc, sh).unwrap())
        .fold(0.0, f64::max);
    let min_phi = (0..1000)
        .map(|i| phi(-0.5 + i as f64 / 999.0))
        .fold(f64::INFINITY, f64::min);
    outcome(
        worst_hat <= 1e-6 && worst_poisson <= 1e-6 && min_phi >= 1.0 - 1e-15,
        format!(
            "φ̂ error {worst_hat:.2e} at {} points, Poisson residual {worst_poisson:.2e} on {} points, min φ on |x|≤1/2 = {min_phi:.15}",
            PHI_HAT_POINTS.len(),
            POISSON_GRID.len()
        ),
    )
}

fn c8_oscillatory() -> Outcome {
    let e00 = oscillatory_e(0, 0, 1, 0.01, 777.25).unwrap() == Complex64::new(777.25, 0.0);
    let mut worst = 0.0f64;
    let mut magnitude_ok = true;
    for inst in vdc_instances(VdcRegime::FirstDerivativeJ, 8, 50) {
        let q = oscillatory_e(inst.j, 0, inst.r_star, inst.z, inst.q0).unwrap();
        let c = oscillatory_e_closed(inst.j, inst.z, inst.q0);
        worst = worst.max((q - c).norm() / inst.q0);
        magnitude_ok &= c.norm() <= 1.0 / (inst.j.unsigned_abs() as f64 * inst.z);
    }
    let cal = frozen_calibration();
    let mut constants = Vec::new();
    let mut regress = false;
    for regime in VdcRegime::ALL {
        let m = measure_vdc_constant(
            regime,
            &vdc_instances(regime, cal.vdc_seed, cal.vdc_instances),
        )
        .unwrap();
        let frozen = cal.vdc_constants[regime.name()];
        regress |= m > frozen;
        constants.push(format!("{} {m:.4}≤{frozen}", regime.name()));
    }
    outcome(
        e00 && worst <= 1e-6 && magnitude_ok && !regress,
        format!(
            "E(0,0)=Q₀ {e00}; quadrature vs closed form max {worst:.2e}·Q₀ over 50; constants {}",
            constants.join(", ")
        ),
    )
}

fn c9_square_window() -> Outcome {
    let mut checked = 0u64;
    let mut bad = 0u64;
    let mut tight = 0u64;
    for q0 in [
        10.0, 37.0, 100.0, 999.0, 4096.0, 20_000.0, 65_537.0, 100_000.0,
    ] {
        let set = build_moduli_set(&ModuliKind::SquaresInOctave(q0)).unwrap();
        for t in 1..=20u64 {
            let sub = derive_subset(&set, t);
            for k in 1..=50u64 {
                let w = ClassWindows::new(&sub, k, t, set.offset(), set.span());
                for l in (0..k).filter(|&l| gcd(l, k) == 1) {
                    for i in 0..10 {
                        let u = (q0 / t as f64).powf(i as f64 / 9.0);
                        let a = w.max_count(u, l as i64);
                        let b = square_window_bound(q0, t, u, k, l as i64);
                        checked += 1;
                        bad += u64::from(a > b);
                        tight += u64::from(a == b && a > 0);
                    }
                }
            }
        }
    }
    outcome(
        bad == 0,
        format!("{checked} cases, {bad} violations, {tight} tight"),
    )
}

fn c10_shape_regimes() -> Outcome {
    let n = 1e8f64;
    let points = [
        (n.powf(0.29).floor(), "thm3"),
        (n.powf(0.42).floor(), "thm4"),
    ];
    let frozen = frozen_shape_regimes();
    let mut pass = true;
    let mut parts = Vec::new();
    for (q, winner) in points {
        let sh = bound_shapes(&ShapeParams::new(n, q, q)).unwrap();
        let w = sh[winner];
        let rivals = ["zhao", "Z1", "Z2"].map(|k| (k, sh[k]));
        let beaten: Vec<&str> = rivals
            .iter()
            .filter(|(_, v)| w >= *v)
            .map(|(k, _)| *k)
            .collect();
        let fix = frozen
            .iter()
            .find(|f| f.q == q && f.n == n)
            .expect("frozen fixture");
        let drift = fix
            .shapes
            .iter()
            .map(|(k, v)| (sh[k] - v).abs() / v.abs())
            .fold(0.0, f64::max);
        pass &= beaten.is_empty() && drift <= 1e-12;
        parts.push(format!(
            "Q={q}: {winner}={w:.6e} vs zhao={:.6e} Z1={:.6e} Z2={:.6e}{}; fixture drift {drift:.1e}",
            rivals[0].1,
            rivals[1].1,
            rivals[2].1,
            if beaten.is_empty() {
                String::new()
            } else {
                format!(" [not below {}]", beaten.join(","))
            }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c11_bracket() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let mut bad = 0;
    let mut grew = 0;
    for _ in 0..20 {
        let span = r.random_range(1..=64u64);
        let offset = r.random_range(0..=64u64);
        let el: Vec<u64> = (offset + 1..=offset + span)
            .filter(|_| r.random_bool(0.4))
            .collect();
        let set = ModuliSet::explicit_in(el, offset as f64, span as f64).unwrap();
        let n = r.random_range(4..=256u64);
        let coarse = theorem1_bracket(&set, n, 64).b;
        let fine = theorem1_bracket(&set, n, 4096).b;
        bad += u32::from(fine < coarse);
        grew += u32::from(fine > coarse);
    }
    let empty = ModuliSet::explicit(vec![]).unwrap();
    let shape = theorem1_bracket(&empty, 1000, 64).shape;
    outcome(
        bad == 0 && shape == 1000.0,
        format!(
            "20 instances, {bad} decreases, {grew} strictly increased; empty set shape = {shape}"
        ),
    )
}

fn c12_determinism() -> Outcome {
    let start = Instant::now();
    let shapes = ExperimentConfig {
        command: Some(Command::Shapes),
        seq: "ones".into(),
        moduli: "squares".into(),
        grid_n: vec!["10^8".into()],
        grid_q: vec!["N^0.29".into(), "N^0.42".into()],
        ..ExperimentConfig::default()
    };
    let sweep = ExperimentConfig {
        command: Some(Command::Sweep),
        seq: "ones,random_phases".into(),
        seed: 12,
        moduli: "squares".into(),
        grid_n: ["2^10", "2^11", "2^12", "2^13", "2^14"]
            .map(String::from)
            .to_vec(),
        grid_q: vec!["N^0.3".into()],
        ..ExperimentConfig::default()
    };
    let mut same = true;
    let mut sizes = Vec::new();
    for cfg in [&shapes, &sweep] {
        let one = execute(&ExperimentConfig {
            threads: Some(1),
            ..cfg.clone()
        })
        .unwrap()
        .bytes;
        let eight = execute(&ExperimentConfig {
            threads: Some(8),
            ..cfg.clone()
        })
        .unwrap()
        .bytes;
        same &= one == eight;
        sizes.push(format!(
            "{} rows",
            String::from_utf8_lossy(&one).lines().count() - 1
        ));
    }
    let t = start.elapsed();
    outcome(
        same && within(t, 600),
        format!(
            "1 vs 8 threads byte-identical = {same} ({}), {t:.1?}",
            sizes.join(" + ")
        ),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "Gauss-sum bound", c1_gauss),
        (2, "classical large sieve", c2_classical),
        (3, "Parseval identity", c3_parseval),
        (4, "quadratic root count bound", c4_roots),
        (5, "oracle equivalence", c5_oracles),
        (6, "Dirichlet approximation", c6_dirichlet),
        (7, "kernel and Poisson summation", c7_kernel),
        (8, "oscillatory integrals", c8_oscillatory),
        (9, "square-moduli window bound", c9_square_window),
        (10, "shape regime comparisons", c10_shape_regimes),
        (11, "bracket refinement", c11_bracket),
        (12, "end-to-end determinism", c12_determinism),
    ];
    let expected: BTreeSet<u32> = EXPECTED_FAILURES.into_iter().collect();
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        let note = match (o.pass, expected.contains(&id)) {
            (false, true) => " (expected)",
            (true, true) => " (expected to fail; update EXPECTED_FAILURES)",
            _ => "",
        };
        println!(
            "{status} criterion {id:>2} {name}{note}: {} [{:.1?}]",
            o.detail,
            start.elapsed()
        );
        if o.pass == expected.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
