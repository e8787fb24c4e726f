//! Acceptance gate: ten end-to-end criteria, one test (and one printed
//! pass/fail line) per criterion. Run with `--nocapture` to see the
//! statistics behind each verdict.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinrs::checks::{
    check_commute, check_equivariance, check_jacobi, check_mdybe, check_skew, sample_cartan,
    sample_traceless, CheckParams,
};
use spinrs::dynamics::{
    conserved_report, eom_componentwise, eom_field, integrate, HamiltonianSpec, IntegratorConfig,
    RSState,
};
use spinrs::factorization::{
    factorization_residual, solve, FactorizationResult, GaugeBackend, SolveOptions,
};
use spinrs::lie_typea::{CartanVector, Dimension, GroupElement, SimpleSubset};
use spinrs::linalg::CMat;
use spinrs::rmatrix::RMatrixSpec;
use spinrs::scalar::cx;
use spinrs::C64;
use std::time::Instant;

fn verdict(num: usize, name: &str, passed: bool, detail: &str) {
    println!(
        "criterion {num:02} {name}: {} ({detail})",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {num:02} {name} failed: {detail}");
}

fn grid(t0: f64, t1: f64, samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|k| t0 + (t1 - t0) * k as f64 / (samples - 1) as f64)
        .collect()
}

fn trace_ham() -> HamiltonianSpec<f64> {
    HamiltonianSpec::new(vec![(1, cx(1.0, 0.0))]).unwrap()
}

/// Hermitian positive group element exp(s * herm(X)) with X random traceless.
fn hermitian_group(dim: Dimension, rng: &mut ChaCha8Rng, scale: f64) -> GroupElement<f64> {
    let x = sample_traceless(dim, rng);
    let adj = x.mat().adjoint();
    let h = (x.mat() + &adj).scaled(cx(0.5 * scale, 0.0));
    spinrs::lie_typea::matrix_exp(&spinrs::lie_typea::AlgebraElement::new(h).unwrap()).unwrap()
}

/// Hermitian group element I + H with |H_ij| <= bound off the diagonal.
fn near_identity_hermitian(m: usize, rng: &mut ChaCha8Rng, bound: f64) -> GroupElement<f64> {
    let mut a = CMat::<f64>::identity(m);
    for i in 0..m {
        a[(i, i)] = cx(1.0 + rng.gen_range(-bound..bound), 0.0);
        for j in i + 1..m {
            let z = cx(
                rng.gen_range(-bound * 0.7..bound * 0.7),
                rng.gen_range(-bound * 0.7..bound * 0.7),
            );
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    GroupElement::sl_normalized(a)
}

fn all_subsets(dim: Dimension) -> Vec<SimpleSubset> {
    let n = dim.n();
    (0..(1usize << n))
        .map(|mask| {
            SimpleSubset::new(dim, (1..=n).filter(move |k| mask >> (k - 1) & 1 == 1)).unwrap()
        })
        .collect()
}

#[test]
fn c01_modified_dynamical_yang_baxter() {
    let started = Instant::now();
    let mut worst = 0.0_f64;
    for n in 1..=3 {
        let dim = Dimension::new(n).unwrap();
        for subset in all_subsets(dim) {
            let p = CheckParams {
                dim,
                subset,
                kappa: 0.5,
                samples: 1000,
                seed: 11 + n as u64,
            };
            let rep = check_mdybe(&p).unwrap();
            worst = worst.max(rep.statistic);
            assert!(rep.passed, "{}", rep.detail);
        }
    }
    let secs = started.elapsed().as_secs_f64();
    verdict(
        1,
        "shifted Yang-Baxter residual",
        worst < 1e-10 && secs < 60.0,
        &format!("max residual {worst:.3e} over n=1..3, all subsets, 1000 samples each, {secs:.1}s"),
    );
}

#[test]
fn c02_skew_symmetry_and_equivariance() {
    let mut worst = 0.0_f64;
    for n in 1..=3 {
        let dim = Dimension::new(n).unwrap();
        let mut subsets = vec![SimpleSubset::full(dim)];
        if n == 3 {
            subsets.push(SimpleSubset::new(dim, [1, 3]).unwrap());
        }
        for subset in subsets {
            let p = CheckParams {
                dim,
                subset,
                kappa: 0.5,
                samples: 1000,
                seed: 23,
            };
            for rep in [check_skew(&p).unwrap(), check_equivariance(&p).unwrap()] {
                worst = worst.max(rep.statistic);
                assert!(rep.passed, "{}", rep.detail);
            }
        }
    }
    verdict(
        2,
        "skew symmetry and Cartan equivariance",
        worst < 1e-12,
        &format!("max defect {worst:.3e} over 1000 samples per check"),
    );
}

#[test]
fn c03_invariants_commute_on_gauge_bundle() {
    let mut on_bundle = 0.0_f64;
    let mut off_bundle_median = f64::INFINITY;
    for n in 1..=3 {
        let dim = Dimension::new(n).unwrap();
        let p = CheckParams {
            dim,
            subset: SimpleSubset::full(dim),
            kappa: 0.5,
            samples: 500,
            seed: 31,
        };
        for rep in check_commute(&p).unwrap() {
            if rep.name.contains("off") {
                off_bundle_median = off_bundle_median.min(rep.statistic);
            } else {
                on_bundle = on_bundle.max(rep.statistic);
            }
            assert!(rep.passed, "{}", rep.detail);
        }
    }
    verdict(
        3,
        "power-trace brackets",
        on_bundle < 1e-10 && off_bundle_median > 1e-4,
        &format!(
            "on-bundle max {on_bundle:.3e} at 500 points, off-bundle median {off_bundle_median:.3e}"
        ),
    );
}

#[test]
fn c04_field_matches_componentwise_equations() {
    let ham = trace_ham();
    let mut worst = 0.0_f64;
    for n in 1..=3 {
        let dim = Dimension::new(n).unwrap();
        let subset = SimpleSubset::full(dim);
        let spec = RMatrixSpec::new(dim, subset.clone(), 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41 + n as u64);
        let per = 1000 / 3 + 1;
        for _ in 0..per {
            let q = sample_cartan(dim, &subset, &mut rng);
            let g = hermitian_group(dim, &mut rng, 0.4);
            let s = RSState::new(q, g).unwrap();
            let (dq, dg) = eom_field(&spec, &ham, &s).unwrap();
            let (ddq, dg_c) = eom_componentwise(&spec, &s).unwrap();
            worst = worst.max((&dg - &dg_c).max_abs());
            // the diagonal equation couples dg to the second derivative
            for (i, v) in ddq.iter().enumerate() {
                worst = worst.max((dg[(i, i)] + *v * cx(2.0, 0.0)).norm());
            }
            // and dq must be the Cartan projection: traceless, real for Hermitian g
            let sum: C64 = dq.entries().iter().sum();
            worst = worst.max(sum.norm());
        }
    }
    verdict(
        4,
        "vector field vs componentwise form",
        worst < 1e-12,
        &format!("max deviation {worst:.3e} over 1000+ Hermitian states, n=1..3"),
    );
}

fn sup_distance(a: &[RSState<f64>], b: &[RSState<f64>]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut e = 0.0_f64;
    for (x, y) in a.iter().zip(b) {
        e = e.max(x.q.sub(&y.q).norm_inf());
        e = e.max((x.g.mat() - y.g.mat()).max_abs());
    }
    e
}

#[test]
fn c05_solver_cross_agreement() {
    let started = Instant::now();
    let ham = trace_ham();
    let t_grid = grid(0.0, 1.0, 201);
    let mut worst = 0.0_f64;
    for n in 1..=3 {
        let dim = Dimension::new(n).unwrap();
        let subset = SimpleSubset::full(dim);
        let spec = RMatrixSpec::new(dim, subset.clone(), 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(50 + n as u64);
        let q0 = sample_cartan(dim, &subset, &mut rng);
        let g0 = near_identity_hermitian(dim.size(), &mut rng, 0.2);
        let s0 = RSState::new(q0, g0).unwrap();
        let fact = solve(&spec, &ham, &s0, &t_grid, &SolveOptions::default()).unwrap();
        let ode = integrate(
            &spec,
            &ham,
            &s0,
            &t_grid,
            &IntegratorConfig::rk45(1e-11, 1e-14),
        )
        .unwrap();
        assert!(fact.breakdown.is_none() && ode.meta.breakdown.is_none());
        worst = worst.max(sup_distance(&fact.traj.states, &ode.states));
    }
    let secs = started.elapsed().as_secs_f64();
    verdict(
        5,
        "factorization vs adaptive integration",
        worst < 1e-6 && secs < 120.0,
        &format!("sup distance {worst:.3e} on 201-point unit-time grids, n=1..3, {secs:.1}s"),
    );
}

#[test]
fn c06_diagonal_closed_form() {
    let ham = trace_ham();
    let dim = Dimension::new(1).unwrap();
    let subset = SimpleSubset::full(dim);
    let spec = RMatrixSpec::new(dim, subset, 0.5).unwrap();
    let q0 = CartanVector::from_real(&[1.0, -1.0]).unwrap();
    let g0 = GroupElement::from_diag(&[cx(2.0, 0.0), cx(0.5, 0.0)]).unwrap();
    let s0 = RSState::new(q0, g0.clone()).unwrap();
    let t_grid = grid(0.0, 1.0, 41);
    let ode = integrate(&spec, &ham, &s0, &t_grid, &IntegratorConfig::rk45(1e-11, 1e-14)).unwrap();
    let fact = solve(&spec, &ham, &s0, &t_grid, &SolveOptions::default()).unwrap();
    let mut worst = 0.0_f64;
    for traj in [&ode, &fact.traj] {
        for (t, s) in traj.times.iter().zip(&traj.states) {
            worst = worst.max((s.q.entries()[0] - cx(1.0 - 0.375 * t, 0.0)).norm());
            worst = worst.max((s.q.entries()[1] - cx(-1.0 + 0.375 * t, 0.0)).norm());
            worst = worst.max((s.g.mat() - g0.mat()).max_abs());
        }
    }
    verdict(
        6,
        "diagonal initial data stays on the closed form",
        worst < 1e-10,
        &format!("max deviation {worst:.3e} for both solvers"),
    );
}

#[test]
fn c07_conservation_and_isospectrality() {
    let ham = HamiltonianSpec::new(vec![(1, cx(1.0, 0.0)), (2, cx(0.5, 0.0))]).unwrap();
    let dim = Dimension::new(2).unwrap();
    let subset = SimpleSubset::full(dim);
    let spec = RMatrixSpec::new(dim, subset.clone(), 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let q0 = sample_cartan(dim, &subset, &mut rng);
    let g0 = near_identity_hermitian(dim.size(), &mut rng, 0.3);
    let s0 = RSState::new(q0, g0).unwrap();
    let t_grid = grid(0.0, 1.0, 101);

    let trace_only = trace_ham();
    let fact = solve(&spec, &trace_only, &s0, &t_grid, &SolveOptions::default()).unwrap();
    let fact_rep = conserved_report(&fact.traj).unwrap();
    let fact_drift = fact_rep
        .trace_drifts
        .iter()
        .fold(fact_rep.spectrum_drift, |a, &b| a.max(b));

    let ode = integrate(&spec, &ham, &s0, &t_grid, &IntegratorConfig::rk45(1e-9, 1e-12)).unwrap();
    let ode_rep = conserved_report(&ode).unwrap();
    let ode_drift = ode_rep
        .trace_drifts
        .iter()
        .fold(ode_rep.spectrum_drift, |a, &b| a.max(b));

    verdict(
        7,
        "spectral invariants are conserved",
        fact_drift < 1e-10 && ode_drift < 1e-7,
        &format!("factorization drift {fact_drift:.3e}, adaptive drift {ode_drift:.3e} over unit time"),
    );
}

#[test]
fn c08_gauge_backend_robustness() {
    let ham = trace_ham();
    let dim = Dimension::new(2).unwrap();
    let subset = SimpleSubset::full(dim);
    let spec = RMatrixSpec::new(dim, subset.clone(), 0.5).unwrap();
    let t_grid = grid(0.0, 1.0, 81);
    let mut worst = 0.0_f64;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(800 + seed);
        let q0 = sample_cartan(dim, &subset, &mut rng);
        let g0 = near_identity_hermitian(dim.size(), &mut rng, 0.25);
        let s0 = RSState::new(q0, g0).unwrap();
        // each backend is solved past its default residual target so the
        // cross-backend discrepancy sits below the agreement tolerance
        let tight = |backend| SolveOptions {
            backend,
            gauge_residual_tol: 1e-9,
            max_refinements: 9,
            ..SolveOptions::default()
        };
        let a = solve(&spec, &ham, &s0, &t_grid, &tight(GaugeBackend::Anchor)).unwrap();
        let z = solve(&spec, &ham, &s0, &t_grid, &tight(GaugeBackend::ZeroDiagonal)).unwrap();
        worst = worst.max(sup_distance(&a.traj.states, &z.traj.states));
    }
    verdict(
        8,
        "gauge backends agree",
        worst < 1e-8,
        &format!("max trajectory distance {worst:.3e} over 20 random runs"),
    );
}

#[test]
fn c09_factorization_residuals_and_ablation() {
    let ham = trace_ham();
    let dim = Dimension::new(2).unwrap();
    let subset = SimpleSubset::full(dim);
    let spec = RMatrixSpec::new(dim, subset.clone(), 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let q0 = sample_cartan(dim, &subset, &mut rng);
    let g0 = near_identity_hermitian(dim.size(), &mut rng, 0.4);
    let s0 = RSState::new(q0, g0).unwrap();
    let t_grid = grid(0.0, 1.0, 101);

    let good: FactorizationResult<f64> =
        solve(&spec, &ham, &s0, &t_grid, &SolveOptions::default()).unwrap();
    let fact_res = factorization_residual(&good, &ham, &s0, 0.5).unwrap();
    let gauge_res = good.gauge_residual;

    let ablated = solve(
        &spec,
        &ham,
        &s0,
        &t_grid,
        &SolveOptions {
            ablate_gauge_integral: true,
            ..SolveOptions::default()
        },
    )
    .unwrap();

    verdict(
        9,
        "factorization residuals with gauge ablation control",
        fact_res < 1e-8 && gauge_res < 1e-8 && ablated.gauge_residual > 1e-3,
        &format!(
            "factorization {fact_res:.3e}, gauge condition {gauge_res:.3e}, ablated {:.3e}",
            ablated.gauge_residual
        ),
    );
}

#[test]
fn c10_jacobi_identity() {
    let mut worst = 0.0_f64;
    for n in 1..=2 {
        let dim = Dimension::new(n).unwrap();
        let p = CheckParams {
            dim,
            subset: SimpleSubset::full(dim),
            kappa: 0.5,
            samples: 100,
            seed: 101,
        };
        let rep = check_jacobi(&p).unwrap();
        worst = worst.max(rep.statistic);
        assert!(rep.passed, "{}", rep.detail);
    }
    verdict(
        10,
        "Jacobi identity for the bracket",
        worst < 1e-4,
        &format!("max cyclic sum {worst:.3e} at 100 points, n=1..2"),
    );
}
