//! Acceptance gate. Every criterion prints one `PASS`/`FAIL` line with its runtime and
//! then asserts. Run with `cargo test -p affine-body-core --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use affine_body::checks::{check_brackets, check_decomposition, random_configuration};
use affine_body::dynamics::geodesic::geodesic_dual_route;
use affine_body::dynamics::integrate::{integrate, StepControl};
use affine_body::dynamics::planar::{
    classify_planar, planar_effective_potential, planar_minimum, planar_period, planar_state, relative_coordinate,
    Verdict,
};
use affine_body::kinematics::{degeneracy_margin, two_polar, Matrix};
use affine_body::phase::model::ModelSpec;
use affine_body::phase::potential::PotentialSpec;
use affine_body::phase::state::{ReducedState, SkewMatrix};
use affine_body::quantum::eigen::eigensolve;
use affine_body::quantum::operator::build_reduced_hamiltonian;
use affine_body::quantum::problem::{Axis, LabelMode, Sector, SpectralProblem};
use affine_body::quantum::spin::{spin_matrices, SpinLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, ok: bool, elapsed: Duration, limit: Duration, detail: &str) {
    let timely = elapsed < limit;
    let verdict = if ok && timely { "PASS" } else { "FAIL" };
    println!(
        "criterion {id} {verdict} {name}: {detail} ({:.3} s, limit {} s)",
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
    assert!(timely, "criterion {id} ({name}) exceeded {} s", limit.as_secs());
}

#[test]
fn criterion_1_decomposition() {
    let start = Instant::now();
    let r = check_decomposition(2024, 1000, 1e6).unwrap();
    let ok = r.reconstruction < 1e-10 && r.orthogonality < 1e-12 && r.singular_values < 1e-9;
    let detail = format!(
        "reconstruction {:.2e}, orthogonality {:.2e}, singular values {:.2e}",
        r.reconstruction, r.orthogonality, r.singular_values
    );
    report(1, "decomposition", ok, start.elapsed(), Duration::from_secs(5), &detail);
}

#[test]
fn criterion_2_poisson_algebra() {
    let start = Instant::now();
    let r = check_brackets(2024, 200).unwrap();
    let ok = r.antisymmetry < 1e-9 && r.jacobi < 1e-9 && r.leibniz < 1e-9;
    let detail = format!("antisymmetry {:.2e}, Jacobi {:.2e}, Leibniz {:.2e}", r.antisymmetry, r.jacobi, r.leibniz);
    report(2, "Poisson algebra", ok, start.elapsed(), Duration::from_secs(10), &detail);
}

/// Ordered, well separated invariants with couplings bounded away from zero.
fn random_state(rng: &mut ChaCha8Rng, n: usize) -> ReducedState {
    let mut q: Vec<f64> = Vec::new();
    while q.len() < n {
        let c = rng.random_range(-1.0..1.0);
        if q.iter().all(|v: &f64| (v - c).abs() > 0.4) {
            q.push(c);
        }
    }
    q.sort_by(|a, b| b.total_cmp(a));
    let p = (0..n).map(|_| rng.random_range(-0.3..0.3)).collect();
    let mut coupling = || {
        let k = n * (n - 1) / 2;
        let v = (0..k).map(|_| rng.random_range(0.2..0.6) * if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
        SkewMatrix::from_upper(n, v).unwrap()
    };
    let (m, nn) = (coupling(), coupling());
    ReducedState::new(q, p, m, nn).unwrap()
}

#[test]
fn criterion_3_conservation() {
    let start = Instant::now();
    let cases = [
        (ModelSpec::dalembert(1.0), PotentialSpec::harmonic_well(1.0)),
        (ModelSpec::aff_aff(1.0, 0.5), PotentialSpec::none()),
        (ModelSpec::aff_metr(2.0, 1.0, 0.5), PotentialSpec::none()),
        (ModelSpec::metr_aff(2.0, 1.0, 0.5), PotentialSpec::none()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let control = StepControl::Rk4 { step: 1e-3, record_every: 100 };
    let (mut energy, mut casimir, mut planar): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (model, potential) in &cases {
        for k in 0..10 {
            let n = 2 + k % 2;
            let s0 = random_state(&mut rng, n);
            let traj = integrate(model, potential, &s0, 10.0, &control).unwrap();
            energy = energy.max(traj.energy_drift());
            if model.kind.conserves_csl2() {
                casimir = casimir.max(traj.casimir_drift());
            }
            if n == 2 {
                planar = planar.max(traj.drift_of(|s| s.m.get(0, 1))).max(traj.drift_of(|s| s.n.get(0, 1)));
            }
        }
    }
    let ok = energy < 1e-8 && casimir < 1e-8 && planar < 1e-10;
    let detail = format!("energy {energy:.2e}, C_SL(n)(2) {casimir:.2e}, planar couplings {planar:.2e}");
    report(3, "conservation", ok, start.elapsed(), Duration::from_secs(60), &detail);
}

#[test]
fn criterion_4_geodesic_dual_route() {
    let start = Instant::now();
    let model = ModelSpec::aff_aff(1.0, 0.5);
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi0 = loop {
            let phi = random_configuration(&mut rng, 3, 10.0, true);
            if degeneracy_margin(two_polar(&phi).unwrap().q.as_slice()) > 0.2 {
                break phi;
            }
        };
        let omega = Matrix::from_fn(3, 3, |_, _| rng.random_range(-0.3..0.3));
        let r = geodesic_dual_route(&phi0, &omega, &model, 1.0, 20, 1e-3).unwrap();
        worst = worst.max(r.max_error);
    }
    report(4, "geodesic dual route", worst < 1e-6, start.elapsed(), Duration::from_secs(30), &format!("max error {worst:.2e}"));
}

/// Times at which `x(t) − x_min` changes sign.
fn crossings(times: &[f64], xs: &[f64], x_min: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 1..xs.len() {
        let (a, b) = (xs[k - 1] - x_min, xs[k] - x_min);
        if a != 0.0 && a.signum() != b.signum() {
            out.push(times[k]);
        }
    }
    out
}

#[test]
fn criterion_5_planar_threshold() {
    let start = Instant::now();
    let a_const = 1.0;
    let model = ModelSpec::aff_aff(a_const, 0.5);
    let values = [0.5, 1.0, 2.0];
    let mut agree = 0;
    let mut checked = 0;
    let mut notes = Vec::new();
    for &m in &values {
        for &n in &values {
            if m == n {
                continue;
            }
            checked += 1;
            let verdict = classify_planar(m, n).verdict;
            let integrated = if n > m {
                let x_min = planar_minimum(m, n).unwrap();
                let v_min = planar_effective_potential(m, n, a_const, x_min).unwrap();
                let energy = 0.5 * v_min;
                let period = planar_period(m, n, a_const, energy).unwrap();
                // p_x²/A + V_min = E
                let p_x = (a_const * (energy - v_min)).sqrt();
                let control = StepControl::Rk4 { step: 1e-3, record_every: 1 };
                let traj = integrate(&model, &PotentialSpec::none(), &planar_state(x_min, p_x, m, n), 3.0 * period, &control)
                    .unwrap();
                let xs: Vec<f64> = traj.states.iter().map(relative_coordinate).collect();
                let count = crossings(&traj.times, &xs, x_min).len();
                let max_x = xs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                notes.push(format!("({m},{n}) crossings {count}"));
                if count >= 2 && max_x < 10.0 {
                    Verdict::Bounded
                } else {
                    Verdict::Unbounded
                }
            } else {
                let control = StepControl::Rk4 { step: 1e-3, record_every: 1000 };
                let traj =
                    integrate(&model, &PotentialSpec::none(), &planar_state(1.0, 0.0, m, n), 100.0, &control).unwrap();
                let x_end = relative_coordinate(traj.last().unwrap());
                notes.push(format!("({m},{n}) x(100) {x_end:.1}"));
                if x_end.abs() > 10.0 {
                    Verdict::Unbounded
                } else {
                    Verdict::Bounded
                }
            };
            if integrated == verdict {
                agree += 1;
            } else {
                notes.push(format!("({m},{n}) disagrees: {verdict} vs {integrated}"));
            }
        }
    }
    let detail = format!("{agree}/{checked} agree; {}", notes.join(", "));
    report(5, "planar threshold", agree == checked && checked == 6, start.elapsed(), Duration::from_secs(60), &detail);
}

#[test]
fn criterion_6_spin_algebra() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for twice in 0..=8 {
        let block = spin_matrices(SpinLabel::from_twice(twice), 1.0);
        worst = worst.max(block.casimir_residual());
    }
    report(6, "spin algebra", worst < 1e-12, start.elapsed(), Duration::from_secs(1), &format!("Casimir residual {worst:.2e}"));
}

fn box_levels(points: usize, width: f64) -> Vec<f64> {
    let p = SpectralProblem::dilatation(
        3,
        ModelSpec::aff_aff(1.0, 0.5),
        PotentialSpec::box_well(width),
        Axis::new(-0.5 * width, 0.5 * width, points),
    );
    eigensolve(&build_reduced_hamiltonian(&p).unwrap(), 5).unwrap().eigenvalues
}

#[test]
fn criterion_7_spectral_oracle() {
    let start = Instant::now();
    let width = 1.5;
    // ħ²π²k² / (2n(A + nB)L²) with n = 3, A = 1, B = 0.5, ħ = 1
    let exact: Vec<f64> =
        (1..=5).map(|k| (std::f64::consts::PI * k as f64 / width).powi(2) / (2.0 * 3.0 * 2.5)).collect();
    let fine = box_levels(512, width);
    let coarse = box_levels(256, width);
    let rel: Vec<f64> = fine.iter().zip(&exact).map(|(e, x)| (e - x).abs() / x).collect();
    let ratios: Vec<f64> =
        (0..5).map(|k| (coarse[k] - exact[k]).abs() / (fine[k] - exact[k]).abs()).collect();
    let ok = rel.iter().all(|r| *r < 1e-2) && ratios.iter().all(|r| (3.2..=4.8).contains(r));
    let detail = format!(
        "max relative error {:.2e}, ratios {}",
        rel.iter().fold(0.0f64, |a, b| a.max(*b)),
        ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(" ")
    );
    report(7, "spectral oracle", ok, start.elapsed(), Duration::from_secs(30), &detail);
}

#[test]
fn criterion_8_angular_splitting() {
    let start = Instant::now();
    let model = ModelSpec::metr_aff(2.0, 1.0, 0.5);
    let base = SpectralProblem::dilatation(3, model.clone(), PotentialSpec::harmonic_well(4.0), Axis::new(-3.0, 3.0, 200));
    let s0 = eigensolve(&build_reduced_hamiltonian(&base).unwrap(), 5).unwrap();
    let s1_problem = base.clone().with_labels(1.0, 0.0, LabelMode::Integer);
    let s1 = eigensolve(&build_reduced_hamiltonian(&s1_problem).unwrap(), 15).unwrap();
    let levels = s1.levels(1e-9);
    let shift = model.hbar * model.hbar / model.mu().unwrap();
    let mut worst: f64 = 0.0;
    for (l, e0) in levels.iter().zip(&s0.eigenvalues) {
        worst = worst.max((l.energy - e0 - shift).abs());
    }
    let ok = levels.len() == 5 && levels.iter().all(|l| l.multiplicity == 3) && worst < 1e-10;
    let detail = format!("shift ħ²/μ = {shift}, deviation {worst:.2e}, {} levels", levels.len());
    report(8, "angular splitting", ok, start.elapsed(), Duration::from_secs(30), &detail);
}

#[test]
fn criterion_9_self_adjointness() {
    let start = Instant::now();
    let shape2 = |model: ModelSpec, alpha: f64, beta: f64, axis: Axis| SpectralProblem {
        n: 2,
        sector: Sector::Shape,
        alpha,
        beta,
        grid: vec![axis],
        ..SpectralProblem::dilatation(2, model, PotentialSpec::none(), axis)
    };
    let shape3 = {
        let mut p = shape2(ModelSpec::aff_aff(1.0, 0.5), 0.0, 0.0, Axis::new(-3.0, 3.0, 24));
        p.n = 3;
        p.grid = vec![Axis::new(-3.0, 3.0, 16), Axis::new(-3.0, 3.0, 16)];
        p.with_labels(1.0, 1.0, LabelMode::Integer)
    };
    let cartesian = SpectralProblem {
        sector: Sector::Cartesian,
        alpha: 1.0,
        beta: 2.0,
        grid: vec![Axis::new(0.0, 3.0, 24), Axis::new(0.05, 3.05, 24)],
        ..SpectralProblem::dilatation(2, ModelSpec::dalembert(1.0), PotentialSpec::none(), Axis::new(0.0, 3.0, 24))
    };
    let problems = vec![
        shape2(ModelSpec::aff_aff(1.0, 0.5), 1.0, 2.0, Axis::new(0.0, 4.0, 200)),
        shape2(ModelSpec::trig_un(1.0, 0.5), 1.0, 2.0, Axis::new(0.0, 2.2, 200)),
        shape3,
        cartesian,
    ];
    let (mut symmetry, mut weighted): (f64, f64) = (0.0, 0.0);
    for p in problems {
        let amended = build_reduced_hamiltonian(&p).unwrap();
        let scale = amended.matrix.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        symmetry = symmetry.max(amended.symmetry_defect() / scale);
        let raw = build_reduced_hamiltonian(&SpectralProblem { use_amended_transform: false, ..p }).unwrap();
        weighted = weighted.max(raw.self_adjointness_residual());
    }
    let ok = symmetry <= f64::EPSILON && weighted < 1e-10;
    let detail = format!("amended asymmetry {symmetry:.2e}, weighted residual {weighted:.2e}");
    report(9, "self-adjointness", ok, start.elapsed(), Duration::from_secs(10), &detail);
}
