//! Randomized invariants shared by the property tests and the acceptance
//! runner. Each property runs through its own `TestRunner`.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use jch_core::defects::{defect_dispersion, melted_bounds, DefectKind};
use jch_core::model::{
    effective_interaction, eigen_energy, hopping_overlap, mixing_angle, Branch, Convention,
    ModelParams, RangeCutoff,
};
use jch_core::oracle::{classical_ground_state, exact_diagonalize, rotate, RingModel};
use jch_core::staircase::{enumerate_fillings, staircase_map, Filling, StaircaseModel};
use jch_core::{Axis, MapLabel};

pub const CASES: u32 = 1000;

pub fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    })
}

fn convention() -> impl Strategy<Value = Convention> {
    prop_oneof![Just(Convention::Literal), Just(Convention::Paper)]
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

pub type Property = fn(&mut TestRunner) -> Result<(), String>;

fn report<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

pub fn overlap_non_negative(runner: &mut TestRunner) -> Result<(), String> {
    report(runner.run(&(0u32..=10, -10.0f64..10.0), |(n, delta)| {
        let b = hopping_overlap(n, n + 1, delta, 1.0).unwrap();
        check(b >= 0.0 && b.is_finite(), || format!("beta = {b}"))
    }))
}

pub fn interaction_symmetric_decreasing(runner: &mut TestRunner) -> Result<(), String> {
    let s = (1u32..=2, 1u32..=2, 1u32..50, -10.0f64..10.0, 0.0f64..5.0, convention());
    report(runner.run(&s, |(n, m, d, delta, v1, conv)| {
        let p = ModelParams::default()
            .with_delta(delta)
            .with_v1(v1)
            .with_convention(conv);
        let a = effective_interaction(n, m, d, &p).unwrap();
        let b = effective_interaction(m, n, d, &p).unwrap();
        let next = effective_interaction(n, m, d + 1, &p).unwrap();
        check(a == b && a >= 0.0, || format!("J({n},{m}) = {a}, J({m},{n}) = {b}"))?;
        if a > 0.0 {
            let ratio = a / next;
            let expected = ((f64::from(d) + 1.0) / f64::from(d)).powi(6);
            check(next < a, || format!("not decreasing at d = {d}"))?;
            check((ratio - expected).abs() <= 1e-12 * expected, || {
                format!("ratio {ratio} vs {expected}")
            })?;
        }
        Ok(())
    }))
}

pub fn energy_continuous_at_resonance(runner: &mut TestRunner) -> Result<(), String> {
    let s = (-2.0f64..2.0, -2.0f64..2.0, 0.1f64..3.0);
    report(runner.run(&s, |(omega, mu, g)| {
        let base = ModelParams {
            omega,
            mu,
            g,
            ..Default::default()
        };
        let eps = 1e-6 * g;
        let up = eigen_energy(1, Branch::Minus, &base.with_delta(eps));
        let down = eigen_energy(1, Branch::Minus, &base.with_delta(-eps));
        // |dE/dδ| ≤ 1/2, so the jump across ±ε is bounded by ε.
        check((up - down).abs() <= eps + 1e-14, || format!("jump {}", up - down))?;
        let h = 1e-4;
        let slope = (eigen_energy(1, Branch::Minus, &base.with_mu(mu + h))
            - eigen_energy(1, Branch::Minus, &base.with_mu(mu - h)))
            / (2.0 * h);
        check((slope + 1.0).abs() < 1e-6, || format!("dE/dmu = {slope}"))
    }))
}

pub fn resonant_weights_equal(runner: &mut TestRunner) -> Result<(), String> {
    let s = (1u32..=10, 0.1f64..3.0, 1u32..30, 0.0f64..3.0, convention());
    report(runner.run(&s, |(n, g, d, v1, conv)| {
        let s2 = mixing_angle(n, 0.0, g).unwrap().sin().powi(2);
        check((s2 - 0.5).abs() < 1e-15, || format!("sin^2 = {s2}"))?;
        let p = ModelParams {
            g,
            v1,
            convention: conv,
            ..Default::default()
        };
        let j11 = effective_interaction(1, 1, d, &p).unwrap();
        for (a, b) in [(1, 2), (2, 1), (2, 2)] {
            let j = effective_interaction(a, b, d, &p).unwrap();
            check((j - j11).abs() <= 1e-15 * j11.max(1e-300), || {
                format!("J({a},{b}) = {j} vs J(1,1) = {j11}")
            })?;
        }
        Ok(())
    }))
}

fn ring_case() -> impl Strategy<Value = (ModelParams, Vec<u8>)> {
    (2usize..=12, 1u32..=2, -1.5f64..0.5, 0.0f64..1.0, -1.0f64..1.0, convention()).prop_flat_map(
        |(len, n_max, mu, v1, delta, conv)| {
            let p = ModelParams::default()
                .with_n_max(n_max)
                .with_mu(mu)
                .with_v1(v1)
                .with_delta(delta)
                .with_convention(conv);
            (Just(p), prop::collection::vec(0u8..=n_max as u8, len))
        },
    )
}

pub fn translation_invariance(runner: &mut TestRunner) -> Result<(), String> {
    report(runner.run(&ring_case(), |(p, occ)| {
        let ring = RingModel::new(occ.len(), &p).unwrap();
        let e = ring.energy(&occ);
        for k in 0..occ.len() {
            let r = ring.energy(&rotate(&occ, k));
            check((r - e).abs() <= 1e-12, || format!("rotation {k}: {r} vs {e}"))?;
        }
        Ok(())
    }))
}

pub fn variational_bound(runner: &mut TestRunner) -> Result<(), String> {
    let s = (2usize..=6, 1u32..=2, -1.5f64..0.2, 0.0f64..1.0, 0.0f64..0.1);
    report(runner.run(&s, |(len, n_max, mu, v1, t)| {
        let p = ModelParams::default()
            .with_n_max(n_max)
            .with_mu(mu)
            .with_v1(v1)
            .with_t(t)
            .with_convention(Convention::Paper);
        let ed = exact_diagonalize(len, &p).unwrap().ground_energy;
        let cl = classical_ground_state(len, &p).unwrap().energy;
        check(ed <= cl + 1e-12, || format!("ED {ed} above classical {cl}"))
    }))
}

pub fn windows_disjoint_and_consistent(runner: &mut TestRunner) -> Result<(), String> {
    // A truncated tail is not convex, so only the full 1/d^6 law is covered.
    let s = (1e-4f64..1.0, 2u32..=8);
    report(runner.run(&s, |(vt, q_max)| {
        let m = StaircaseModel::new(-1.0, vt, RangeCutoff::Infinite);
        let phases = m.crystals(q_max).map_err(|e| TestCaseError::fail(e.to_string()))?;
        for c in phases.iter().filter(|c| c.filling != Filling::FULL) {
            let w = m.stability_width(c.filling).unwrap();
            check(w >= 0.0, || format!("negative width for {}", c.filling))?;
            check((c.width - w).abs() <= 1e-10, || {
                format!("{}: edges {} vs series {w}", c.filling, c.width)
            })?;
        }
        Ok(())
    }))
}

pub fn filling_monotone_in_mu(runner: &mut TestRunner) -> Result<(), String> {
    let s = (1e-3f64..1.0, -1.05f64..-0.99, 0.01f64..0.5, 50usize..300);
    report(runner.run(&s, |(vt, lo, span, points)| {
        let m = StaircaseModel::new(-1.0, vt, RangeCutoff::Infinite);
        let map = staircase_map(
            &m,
            Axis::new(lo, lo + span, points),
            Axis::new(vt, vt * 1.5, 2),
            6,
        )
        .unwrap();
        let mut last = Filling::new(1, 1).map(|_| (0u32, 1u32)).unwrap();
        for cell in &map.rows[0] {
            if let Some((p, q)) = cell.filling {
                check(u64::from(p) * u64::from(last.1) >= u64::from(last.0) * u64::from(q), || {
                    format!("{p}/{q} after {}/{}", last.0, last.1)
                })?;
                last = (p, q);
            }
        }
        Ok(())
    }))
}

pub fn melting_shrinks_linearly(runner: &mut TestRunner) -> Result<(), String> {
    let s = (1e-3f64..1.0, 1e-6f64..1e-2, 2u32..=8);
    report(runner.run(&s, |(vt, j, q_max)| {
        let m = StaircaseModel::new(-1.0, vt, RangeCutoff::Infinite);
        for f in enumerate_fillings(q_max).unwrap() {
            if f == Filling::FULL {
                continue;
            }
            let c = m.crystal(f).unwrap();
            let b = melted_bounds(f, &m, j).unwrap();
            let q = f64::from(f.q());
            check(b.mu_up < c.mu_particle && b.mu_down > c.mu_hole, || {
                format!("{f} window did not shrink")
            })?;
            check((b.width() - (c.width - 4.0 * q * j)).abs() <= 1e-12, || {
                format!("{f} width not linear in J")
            })?;
            check(b.survives == (c.width > 4.0 * q * j), || format!("{f} survival flag"))?;
        }
        Ok(())
    }))
}

pub fn defect_band_shape(runner: &mut TestRunner) -> Result<(), String> {
    let s = (1u32..=10, 0.0f64..0.1, -4.0f64..4.0);
    report(runner.run(&s, |(q, j, k)| {
        let min = defect_dispersion(DefectKind::Particle, q, j, 0.0);
        let e = defect_dispersion(DefectKind::Hole, q, j, k);
        check(min == -2.0 * f64::from(q) * j, || format!("minimum {min}"))?;
        check(e >= min - 1e-15, || format!("below band bottom: {e}"))?;
        check((e - defect_dispersion(DefectKind::Hole, q, j, -k)).abs() < 1e-15, || {
            "asymmetric band".into()
        })
    }))
}

/// Zero-hopping ED filling at the centre half of an analytic window.
pub fn ed_filling_matches_staircase(runner: &mut TestRunner) -> Result<(), String> {
    let fillings = [(1, 4), (1, 2), (3, 4), (1, 1)];
    let s = (1e-2f64..1.0, 0usize..4, 0.25f64..0.75);
    report(runner.run(&s, |(vt, which, u)| {
        let p = ModelParams::default()
            .with_v1(2.0 * vt)
            .with_convention(Convention::Paper);
        let m = StaircaseModel::from_params(&p).unwrap();
        let (a, b) = fillings[which];
        let f = Filling::new(a, b).unwrap();
        let c = m.crystal(f).unwrap();
        let mu = if f == Filling::FULL {
            c.mu_hole + u * vt
        } else {
            c.mu_hole + u * c.width
        };
        let ed = exact_diagonalize(8, &p.with_mu(mu)).unwrap();
        check((ed.filling - f.value()).abs() < 1e-12, || {
            format!("Ṽ = {vt}, mu = {mu}: ED filling {} vs {f}", ed.filling)
        })?;
        let cell = jch_core::staircase::select_phase(mu, m.onset, vt, &m.crystals(6).unwrap());
        check(matches!(cell.label, MapLabel::Solid | MapLabel::Uniform), || {
            format!("analytic label {:?}", cell.label)
        })?;
        check(cell.filling == Some((f.p(), f.q())), || format!("analytic {:?}", cell.filling))
    }))
}

pub fn all() -> Vec<(&'static str, Property)> {
    vec![
        ("hopping overlap non-negative", overlap_non_negative),
        ("interaction symmetric, decreasing, 1/d^6 ratio", interaction_symmetric_decreasing),
        ("E_1- continuous at resonance, dE/dmu = -1", energy_continuous_at_resonance),
        ("resonant Rydberg weights equal", resonant_weights_equal),
        ("ring energy translation invariant", translation_invariance),
        ("ED ground energy below classical", variational_bound),
        ("staircase windows disjoint and consistent", windows_disjoint_and_consistent),
        ("selected filling non-decreasing in mu", filling_monotone_in_mu),
        ("melted windows shrink linearly", melting_shrinks_linearly),
        ("defect band minimum and symmetry", defect_band_shape),
        ("zero-hopping ED filling matches staircase", ed_filling_matches_staircase),
    ]
}
