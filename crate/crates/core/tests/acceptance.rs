//! Acceptance suite: one test per quantitative claim the crate commits to,
//! each printing a single PASS/FAIL line (visible with
//! `cargo test --test acceptance -- --nocapture`).
//!
//! Runtime budgets are asserted in release builds only; debug builds print
//! the measured time without enforcing it.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nm_thermo::generator::{
    check_detailed_balance, check_gibbs_fixed_point, check_unital, divisibility_witness, evolve,
    pauli_depolarizing, LindbladGenerator, RateFunction, TimeGrid,
};
use nm_thermo::oracle;
use nm_thermo::purity;
use nm_thermo::qstate::{
    self, bloch_state, c, matrix_powf, random, relative_entropy, renyi_relative_entropy, trace,
    trace_distance, CMat, DensityMatrix,
};
use nm_thermo::spinbath::{
    born_markov_hamiltonian, born_markov_qubit, SpinBathModel, SpinBathParams,
};
use nm_thermo::thermo::{
    self, complementarity_residual, derivative_uniform, renyi_chi_terms, renyi_entropy_rate_unital,
    EprMethod, ThermalContext,
};

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn enforce_runtime(criterion: &str, elapsed_s: f64, budget_s: f64) {
    if cfg!(debug_assertions) {
        println!(
            "acceptance {criterion}: runtime {elapsed_s:.2} s (budget {budget_s} s, not enforced in debug)"
        );
    } else {
        assert!(
            elapsed_s < budget_s,
            "{criterion}: runtime {elapsed_s:.2} s exceeds budget {budget_s} s"
        );
    }
}

fn spinbath_initial_state() -> DensityMatrix {
    DensityMatrix::new(CMat::from_row_slice(
        2,
        2,
        &[c(0.75, 0.0), c(0.25, 0.0), c(0.25, 0.0), c(0.25, 0.0)],
    ))
    .unwrap()
}

/// Criterion 1: the depolarizing sign law dP/dt = −4Γ(t)|r(t)|² with
/// Γ(t) = e^{−t} cos t from ρ(0) = |0⟩⟨0|, to max-abs 1e-6, with
/// sign(dP/dt) = −sign(Γ) wherever both factors are resolvable.
#[test]
fn criterion_01_depolarizing_sign_law() {
    let start = Instant::now();
    let report = purity::depolarizing_scenario(3.0, 1e-3).unwrap();
    let mut max_dev: f64 = 0.0;
    let mut sign_violations = 0usize;
    for k in 0..report.times.len() {
        let t = report.times[k];
        let gamma = report.rates[k][0];
        let radius = purity::depolarizing_bloch_radius(t);
        max_dev = max_dev.max((report.purity_rate[k] + 4.0 * gamma * radius * radius).abs());
        if gamma.abs() > 1e-9 && radius > 1e-6 && report.purity_rate[k] * gamma >= 0.0 {
            sign_violations += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = max_dev <= 1e-6 && sign_violations == 0;
    verdict(
        "criterion 01 (depolarizing sign law)",
        pass,
        &format!("closed-form dev {max_dev:.3e} (tol 1e-6), sign violations {sign_violations}, {elapsed:.2} s"),
    );
    assert!(
        pass,
        "max dev {max_dev:e}, sign violations {sign_violations}"
    );
    enforce_runtime("criterion 01", elapsed, 1.0);
}

/// Criterion 2: Born–Markov qubit (γ = ω₀ = β = 1) from |1⟩⟨1| on [0, 10]:
/// max |β dF/dt + σ| ≤ 1e-4 with the two sides from independent routes, and
/// min σ ≥ −1e-6.
#[test]
fn criterion_02_free_energy_epr_identity() {
    let start = Instant::now();
    let gen = born_markov_qubit(1.0, 1.0, 1.0).unwrap();
    let ctx = ThermalContext::constant(born_markov_hamiltonian(1.0), 1.0).unwrap();
    let rho0 = DensityMatrix::new(qstate::excited_projector()).unwrap();
    let grid = TimeGrid::from_range(0.0, 10.0, 1e-3).unwrap();
    let traj = evolve(&gen, &rho0, grid, 1e-3).unwrap();
    let sigma_def = thermo::epr(&traj, &ctx, EprMethod::RelativeEntropyDerivative).unwrap();
    let sigma_heat = thermo::epr(&traj, &ctx, EprMethod::EntropyMinusHeat).unwrap();
    let f_series: Vec<f64> = traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(&t, s)| thermo::free_energy(s, &ctx, t, None).unwrap())
        .collect();
    let df = derivative_uniform(traj.times(), &f_series).unwrap();
    let residual = df
        .iter()
        .zip(&sigma_heat.values)
        .map(|(d, s)| (d + s).abs())
        .fold(0.0, f64::max);
    let min_sigma = sigma_def.min();
    let elapsed = start.elapsed().as_secs_f64();
    let pass = residual <= 1e-4 && min_sigma >= -1e-6;
    verdict(
        "criterion 02 (free energy vs EPR identity)",
        pass,
        &format!("max |β dF/dt + σ| = {residual:.3e} (tol 1e-4), min σ = {min_sigma:.3e} (≥ -1e-6), {elapsed:.2} s"),
    );
    assert!(pass, "residual {residual:e}, min σ {min_sigma:e}");
    enforce_runtime("criterion 02", elapsed, 1.0);
}

/// Criterion 3: 500 random generators with normal jump operators all pass
/// the unitality check; 500 generators containing a decidedly non-normal
/// operator with generic positive rates all fail it. 1e-9 matrix norms.
#[test]
fn criterion_03_unitality_normality_ensemble() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut normal_failures = 0usize;
    let mut non_normal_passes = 0usize;
    for case in 0..500 {
        let dim = 2 + (case % 3);
        let mut gen = LindbladGenerator::new(dim);
        for _ in 0..rng.random_range(1..4) {
            let op = match rng.random_range(0..3) {
                0 => random::random_hermitian(dim, &mut rng),
                1 => random::random_normal(dim, &mut rng),
                _ => {
                    let u = random::random_unitary(dim, &mut rng);
                    &u * random::random_hermitian(dim, &mut rng) * u.adjoint()
                }
            };
            gen = gen
                .with_term(op, RateFunction::constant(rng.random_range(0.1..2.0)))
                .unwrap();
        }
        if !check_unital(&gen, 0.0, 1e-9) {
            normal_failures += 1;
        }

        let mut bad = LindbladGenerator::new(dim)
            .with_term(
                random::random_non_normal(dim, &mut rng),
                RateFunction::constant(rng.random_range(0.1..2.0)),
            )
            .unwrap();
        for _ in 0..rng.random_range(0..3) {
            bad = bad
                .with_term(
                    random::random_normal(dim, &mut rng),
                    RateFunction::constant(rng.random_range(0.1..2.0)),
                )
                .unwrap();
        }
        if check_unital(&bad, 0.0, 1e-9) {
            non_normal_passes += 1;
        }
    }
    let pass = normal_failures == 0 && non_normal_passes == 0;
    verdict(
        "criterion 03 (unitality-normality ensemble)",
        pass,
        &format!("500 normal generators: {normal_failures} misclassified; 500 non-normal: {non_normal_passes} misclassified"),
    );
    assert!(pass);
}

/// Criterion 4: detailed balance and Gibbs fixed point hold for 20 random
/// Born–Markov triples and both flip to false under a 1% absorption
/// perturbation.
#[test]
fn criterion_04_detailed_balance_classification() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut failures = Vec::new();
    for case in 0..20 {
        let gamma = rng.random_range(0.3..2.0);
        let omega0 = rng.random_range(0.5..2.0);
        let beta = rng.random_range(0.2..2.0);
        let gen = born_markov_qubit(gamma, omega0, beta).unwrap();
        let h = born_markov_hamiltonian(omega0);
        let balanced = check_detailed_balance(&gen, &h, beta, 1e-9).unwrap();
        let fixed = check_gibbs_fixed_point(&gen, &h, beta, 0.0, 1e-10).unwrap();
        let n_planck = 1.0 / ((beta * omega0).exp_m1());
        let perturbed = LindbladGenerator::new(2)
            .with_constant_hamiltonian(h.clone())
            .unwrap()
            .with_term(
                qstate::sigma_minus(),
                RateFunction::constant(gamma * (n_planck + 1.0)),
            )
            .unwrap()
            .with_term(
                qstate::sigma_plus(),
                RateFunction::constant(gamma * n_planck * 1.01),
            )
            .unwrap();
        let still_balanced = check_detailed_balance(&perturbed, &h, beta, 1e-9).unwrap();
        let still_fixed = check_gibbs_fixed_point(&perturbed, &h, beta, 0.0, 1e-10).unwrap();
        if !(balanced && fixed && !still_balanced && !still_fixed) {
            failures.push((case, gamma, omega0, beta));
        }
    }
    let pass = failures.is_empty();
    verdict(
        "criterion 04 (detailed-balance classification)",
        pass,
        &format!("20 random triples, failures: {failures:?}"),
    );
    assert!(pass);
}

/// Criterion 5: closed-form reduced state vs the exact composite oracle for
/// N ∈ {4, 6, 8, 10} over t ∈ [0, 10] step 0.05: max entrywise deviation
/// ≤ 1e-6.
#[test]
fn criterion_05_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst_overall: f64 = 0.0;
    let mut per_n = Vec::new();
    for n in [4usize, 6, 8, 10] {
        let params = SpinBathParams {
            n_spins: n,
            ..SpinBathParams::figure_defaults()
        };
        let model = SpinBathModel::new(params).unwrap();
        let cs = oracle::build_composite(&params).unwrap();
        let rho0 = random::random_density(2, &mut rng);
        let grid = TimeGrid::from_range(0.0, 10.0, 0.05).unwrap();
        let exact = oracle::exact_reduced_trajectory(&cs, &rho0, grid).unwrap();
        let mut worst: f64 = 0.0;
        for (state, &t) in exact.states().iter().zip(exact.times()) {
            let closed = model.reduced_state(&rho0, t).unwrap();
            worst = worst.max(qstate::max_abs_entry(&(state.matrix() - closed.matrix())));
        }
        per_n.push(format!("N={n}: {worst:.2e}"));
        worst_overall = worst_overall.max(worst);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst_overall <= 1e-6;
    verdict(
        "criterion 05 (oracle equivalence)",
        pass,
        &format!("{} (tol 1e-6), {elapsed:.2} s", per_n.join(", ")),
    );
    assert!(pass, "max deviation {worst_overall:e}");
    enforce_runtime("criterion 05", elapsed, 30.0);
}

/// Criterion 6: integrating the generator built from the extracted rates
/// reproduces the closed-form trajectory to 1e-5 on [0, 10] for 10 random
/// initial states.
#[test]
fn criterion_06_rate_reconstruction() {
    let start = Instant::now();
    let model = SpinBathModel::new(SpinBathParams::figure_defaults()).unwrap();
    let step = 1e-3;
    let gen = model.generator(10.0, step).unwrap();
    let grid = TimeGrid::from_range(0.0, 10.0, step).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let rho0s: Vec<DensityMatrix> = (0..10)
        .map(|_| random::random_density(2, &mut rng))
        .collect();
    let worst = nm_thermo::parallel::map_slice(&rho0s, |rho0| {
        let integrated = evolve(&gen, rho0, grid, step).unwrap();
        let mut dev: f64 = 0.0;
        for (state, &t) in integrated.states().iter().zip(integrated.times()) {
            let closed = model.reduced_state(rho0, t).unwrap();
            dev = dev.max(qstate::max_abs_entry(&(state.matrix() - closed.matrix())));
        }
        dev
    })
    .into_iter()
    .fold(0.0, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-5;
    verdict(
        "criterion 06 (rate reconstruction)",
        pass,
        &format!("10 random states, max deviation {worst:.3e} (tol 1e-5), {elapsed:.2} s"),
    );
    assert!(pass, "max deviation {worst:e}");
    enforce_runtime("criterion 06", elapsed, 10.0);
}

/// Criterion 7: the free-energy-gap identity β d/dt(F − F_th) = −σ̃ on the
/// spin-bath run at β = 1, ω₀ = ω = 1, α = 0.1, with the two sides computed
/// through independent routes; max residual ≤ 1e-4.
#[test]
fn criterion_07_free_energy_gap_identity() {
    let model = SpinBathModel::new(SpinBathParams::figure_defaults()).unwrap();
    let grid = TimeGrid::from_range(0.0, 10.0, 1e-3).unwrap();
    let traj = model
        .closed_form_trajectory(&spinbath_initial_state(), grid)
        .unwrap();
    let ctx = model.driven_context().unwrap();
    let (_, work_route, _) = thermo::gepr_decompositions(&traj, &ctx).unwrap();
    let gap = thermo::free_energy_gap_rate(&traj, &ctx).unwrap();
    let residual = gap
        .values
        .iter()
        .zip(&work_route.values)
        .map(|(g, s)| (g + s).abs())
        .fold(0.0, f64::max);
    let pass = residual <= 1e-4;
    verdict(
        "criterion 07 (free-energy-gap identity)",
        pass,
        &format!("max |β d(F − F_th)/dt + σ̃| = {residual:.3e} (tol 1e-4)"),
    );
    assert!(pass, "residual {residual:e}");
}

/// Criterion 8: the necessity claim on the cold-bath scenario
/// (T = 0.05; at warmer baths the drifting-Hamiltonian work term pushes σ̃
/// negative slightly ahead of the first rate crossing): every grid time
/// with σ̃ < −1e-6 carries a negative rate, and at least one flagged time
/// has σ̃ > 0.
#[test]
fn criterion_08_nm_necessity_for_negative_gepr() {
    let model = SpinBathModel::new(SpinBathParams::cold_bath_scenario()).unwrap();
    let grid = TimeGrid::from_range(0.0, 10.0, 1e-3).unwrap();
    let traj = model
        .closed_form_trajectory(&spinbath_initial_state(), grid)
        .unwrap();
    let ctx = model.driven_context().unwrap();
    let sigma_tilde = thermo::gepr(&traj, &ctx).unwrap();
    let witness = divisibility_witness(traj.generator().unwrap(), &grid);
    let mut negative_total = 0usize;
    let mut negative_unflagged = 0usize;
    let mut flagged_positive = 0usize;
    for (k, w) in witness.iter().enumerate() {
        let sig = sigma_tilde.values[k];
        if sig < -1e-6 {
            negative_total += 1;
            if w.all_nonnegative {
                negative_unflagged += 1;
            }
        }
        if !w.all_nonnegative && sig > 1e-6 {
            flagged_positive += 1;
        }
    }
    let pass = negative_unflagged == 0 && negative_total > 0 && flagged_positive > 0;
    verdict(
        "criterion 08 (NM necessity for negative GEPR)",
        pass,
        &format!(
            "σ̃ < -1e-6 at {negative_total} points, {negative_unflagged} outside negative-rate windows; \
             {flagged_positive} flagged points with σ̃ > 0 (converse fails as required)"
        ),
    );
    assert!(
        pass,
        "unflagged negatives {negative_unflagged}, flagged positives {flagged_positive}"
    );
}

/// Criterion 9: the Pinsker family S^γ ≥ 2γ D_T² on 10⁴ random qubit and
/// qutrit pairs for γ ∈ {0.1, 0.3, 0.5, 0.9, 1.0} with residual ≥ −1e-10,
/// and the complementarity residual ≥ −1e-6 along the model-zoo
/// trajectories for γ ∈ {0.3, 0.5, 1.0}.
#[test]
fn criterion_09_pinsker_and_complementarity() {
    let gammas = [0.1, 0.3, 0.5, 0.9, 1.0];
    let mut worst_pinsker = f64::INFINITY;
    for dim in [2usize, 3] {
        let mut rng = ChaCha8Rng::seed_from_u64(909 + dim as u64);
        let pairs: Vec<(DensityMatrix, DensityMatrix)> = (0..10_000)
            .map(|_| {
                (
                    random::random_density(dim, &mut rng),
                    random::random_density(dim, &mut rng),
                )
            })
            .collect();
        let min = nm_thermo::parallel::map_slice(&pairs, |(rho, sigma)| {
            let d = trace_distance(rho, sigma).unwrap();
            gammas
                .iter()
                .map(|&g| {
                    let s = if g == 1.0 {
                        relative_entropy(rho, sigma).unwrap()
                    } else {
                        renyi_relative_entropy(rho, sigma, g).unwrap()
                    };
                    s - 2.0 * g * d * d
                })
                .fold(f64::INFINITY, f64::min)
        })
        .into_iter()
        .fold(f64::INFINITY, f64::min);
        worst_pinsker = worst_pinsker.min(min);
    }

    // model zoo: depolarizing (β → 0), thermal qubit, driven spin bath
    let mut worst_complementarity = f64::INFINITY;
    {
        let gen = pauli_depolarizing(purity::depolarizing_rate());
        let rho0 = bloch_state(0.8, 0.1, -0.3).unwrap();
        let traj = evolve(
            &gen,
            &rho0,
            TimeGrid::from_range(0.0, 3.0, 0.01).unwrap(),
            1e-3,
        )
        .unwrap();
        let ctx = ThermalContext::constant(qstate::zeros(2), 0.0).unwrap();
        for g in [0.3, 0.5, 1.0] {
            worst_complementarity =
                worst_complementarity.min(complementarity_residual(&traj, &ctx, g).unwrap().min());
        }
    }
    {
        let gen = born_markov_qubit(1.0, 1.0, 1.0).unwrap();
        let ctx = ThermalContext::constant(born_markov_hamiltonian(1.0), 1.0).unwrap();
        let rho0 = DensityMatrix::new(qstate::excited_projector()).unwrap();
        let traj = evolve(
            &gen,
            &rho0,
            TimeGrid::from_range(0.0, 10.0, 0.01).unwrap(),
            1e-3,
        )
        .unwrap();
        for g in [0.3, 0.5, 1.0] {
            worst_complementarity =
                worst_complementarity.min(complementarity_residual(&traj, &ctx, g).unwrap().min());
        }
    }
    {
        let model = SpinBathModel::new(SpinBathParams::figure_defaults()).unwrap();
        let grid = TimeGrid::from_range(0.0, 10.0, 0.01).unwrap();
        let traj = model
            .closed_form_trajectory(&spinbath_initial_state(), grid)
            .unwrap();
        let ctx = model.driven_context().unwrap();
        for g in [0.3, 0.5, 1.0] {
            worst_complementarity =
                worst_complementarity.min(complementarity_residual(&traj, &ctx, g).unwrap().min());
        }
    }

    let pass = worst_pinsker >= -1e-10 && worst_complementarity >= -1e-6;
    verdict(
        "criterion 09 (Pinsker / complementarity)",
        pass,
        &format!(
            "min Pinsker residual {worst_pinsker:.3e} (≥ -1e-10) over 2×10⁴ pairs × 5 orders; \
             min complementarity residual {worst_complementarity:.3e} (≥ -1e-6) over the model zoo"
        ),
    );
    assert!(pass);
}

/// Criterion 10: the Rényi entropy-rate formula Σ_α Γ_α χ_α matches the
/// finite-difference dS_γ/dt along depolarizing trajectories to 1e-5 for
/// γ ∈ {0.5, 2}, and every χ_α is positive on full-rank states.
#[test]
fn criterion_10_renyi_entropy_rate() {
    let gen = pauli_depolarizing(purity::depolarizing_rate());
    let rho0 = bloch_state(0.6, 0.2, -0.3).unwrap();
    // step 2e-4 keeps the fd oracle's truncation error below the target
    let grid = TimeGrid::from_range(0.0, 3.0, 2e-4).unwrap();
    let traj = evolve(&gen, &rho0, grid, 2e-4).unwrap();
    let mut worst: f64 = 0.0;
    for gamma in [0.5, 2.0] {
        let renyi_entropy: Vec<f64> = traj
            .states()
            .iter()
            .map(|s| trace(&matrix_powf(s.matrix(), gamma).unwrap()).re.ln() / (1.0 - gamma))
            .collect();
        let fd = derivative_uniform(traj.times(), &renyi_entropy).unwrap();
        for ((&t, state), fd_val) in traj.times().iter().zip(traj.states()).zip(&fd) {
            let analytic = renyi_entropy_rate_unital(state, &gen, t, gamma).unwrap();
            worst = worst.max((analytic - fd_val).abs());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut min_chi = f64::INFINITY;
    for _ in 0..100 {
        let rho = random::random_density(2, &mut rng);
        for gamma in [0.5, 2.0] {
            let chis = renyi_chi_terms(&rho, &gen, 0.0, gamma).unwrap();
            min_chi = chis.into_iter().fold(min_chi, f64::min);
        }
    }
    let pass = worst <= 1e-5 && min_chi > 0.0;
    verdict(
        "criterion 10 (Rényi entropy rate)",
        pass,
        &format!("max |analytic − fd| = {worst:.3e} (tol 1e-5), min χ over random full-rank states {min_chi:.3e} (> 0)"),
    );
    assert!(pass, "fd deviation {worst:e}, min χ {min_chi:e}");
}

/// Criterion 11: the three GEPR decompositions agree to 1e-4 on the
/// spin-bath run, and σ̃ ≡ σ to 1e-10 for the time-independent thermal
/// qubit.
#[test]
fn criterion_11_gepr_decompositions() {
    let model = SpinBathModel::new(SpinBathParams::figure_defaults()).unwrap();
    let grid = TimeGrid::from_range(0.0, 10.0, 1e-3).unwrap();
    let traj = model
        .closed_form_trajectory(&spinbath_initial_state(), grid)
        .unwrap();
    let ctx = model.driven_context().unwrap();
    let (s1, s2, s3) = thermo::gepr_decompositions(&traj, &ctx).unwrap();
    let pair_dev = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let spinbath_dev = pair_dev(&s1.values, &s2.values)
        .max(pair_dev(&s1.values, &s3.values))
        .max(pair_dev(&s2.values, &s3.values));

    let gen = born_markov_qubit(1.0, 1.0, 1.0).unwrap();
    let ctx_q = ThermalContext::constant(born_markov_hamiltonian(1.0), 1.0).unwrap();
    let rho0 = bloch_state(0.4, -0.2, 0.3).unwrap();
    let traj_q = evolve(
        &gen,
        &rho0,
        TimeGrid::from_range(0.0, 5.0, 1e-3).unwrap(),
        1e-3,
    )
    .unwrap();
    let sigma = thermo::epr(&traj_q, &ctx_q, EprMethod::RelativeEntropyDerivative).unwrap();
    let sigma_tilde = thermo::gepr(&traj_q, &ctx_q).unwrap();
    let qubit_dev = pair_dev(&sigma.values, &sigma_tilde.values);

    let pass = spinbath_dev <= 1e-4 && qubit_dev <= 1e-10;
    verdict(
        "criterion 11 (GEPR decompositions)",
        pass,
        &format!("spin-bath mutual dev {spinbath_dev:.3e} (tol 1e-4); thermal-qubit σ̃ vs σ dev {qubit_dev:.3e} (tol 1e-10)"),
    );
    assert!(
        pass,
        "spin-bath dev {spinbath_dev:e}, qubit dev {qubit_dev:e}"
    );
}
