//! The verification suite behind `nm-thermo verify`.
//!
//! Fast level: oracle equivalence at N ∈ {4, 6}, the identity residuals on
//! the three stock scenarios, the Pinsker sweep, and the rate
//! reconstruction. Full level adds N ∈ {8, 10, 12} and the random-ensemble
//! theorem checks. Every check reports its measured error and threshold in
//! the JSON report; the exit status is nonzero iff any check fails.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nm_thermo::generator::{
    check_all_normal, check_detailed_balance, check_gibbs_fixed_point, check_unital, evolve,
    hermitian_unital_form, LindbladGenerator, RateFunction, TimeGrid,
};
use nm_thermo::oracle;
use nm_thermo::parallel;
use nm_thermo::purity;
use nm_thermo::qstate::{
    self, hs_norm, matrix_unit, random, relative_entropy, renyi_relative_entropy, trace_distance,
    DensityMatrix,
};
use nm_thermo::spinbath::{
    born_markov_hamiltonian, born_markov_qubit, SpinBathModel, SpinBathParams,
};
use nm_thermo::thermo::{self, derivative_uniform, EprMethod, ThermalContext};

use crate::scenarios::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Verification depth
    #[arg(long, value_enum, default_value = "fast")]
    pub level: Level,

    /// JSON report path
    #[arg(long, default_value = "verify-report.json")]
    pub out: PathBuf,

    /// Seed for the randomized sweeps
    #[arg(long, default_value_t = 7)]
    pub seed: u64,

    /// Negative-control fixture: flip the sign of the extracted dephasing
    /// rate before the reconstruction check (must make it fail)
    #[arg(long, hide = true)]
    pub corrupt_deph_sign: bool,
}

struct CheckResult {
    name: String,
    max_error: f64,
    rms_error: Option<f64>,
    tol: f64,
    params: serde_json::Value,
    pass: bool,
    runtime_ms: u128,
}

impl CheckResult {
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "name": self.name,
            "max_error": self.max_error,
            "rms_error": self.rms_error,
            "tol": self.tol,
            "params": self.params,
            "pass": self.pass,
            "runtime_ms": self.runtime_ms,
        })
    }
}

fn timed(
    name: &str,
    tol: f64,
    params: serde_json::Value,
    f: impl FnOnce() -> Result<(f64, Option<f64>), CliError>,
) -> Result<CheckResult, CliError> {
    let start = Instant::now();
    let (max_error, rms_error) = f()?;
    let result = CheckResult {
        name: name.to_string(),
        max_error,
        rms_error,
        tol,
        params,
        pass: max_error <= tol,
        runtime_ms: start.elapsed().as_millis(),
    };
    println!(
        "{:44} {}  (error {:.3e}, tol {:.1e}, {} ms)",
        result.name,
        if result.pass { "PASS" } else { "FAIL" },
        result.max_error,
        result.tol,
        result.runtime_ms
    );
    Ok(result)
}

// ---------------------------------------------------------------------------
// Individual checks
// ---------------------------------------------------------------------------

fn oracle_equivalence(n: usize, seed: u64) -> Result<(f64, Option<f64>), CliError> {
    let params = SpinBathParams {
        n_spins: n,
        ..SpinBathParams::figure_defaults()
    };
    let model = SpinBathModel::new(params)?;
    let cs = oracle::build_composite(&params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho0 = random::random_density(2, &mut rng);
    let grid = TimeGrid::from_range(0.0, 10.0, 0.05)?;
    let exact = oracle::exact_reduced_trajectory(&cs, &rho0, grid)?;
    let mut max_dev: f64 = 0.0;
    let mut sq = 0.0;
    for (state, &t) in exact.states().iter().zip(exact.times()) {
        let closed = model.reduced_state(&rho0, t)?;
        let dev = qstate::max_abs_entry(&(state.matrix() - closed.matrix()));
        max_dev = max_dev.max(dev);
        sq += dev * dev;
    }
    Ok((max_dev, Some((sq / exact.len() as f64).sqrt())))
}

fn rate_reconstruction(
    states: usize,
    seed: u64,
    corrupt_deph_sign: bool,
) -> Result<(f64, Option<f64>), CliError> {
    let params = SpinBathParams::figure_defaults();
    let model = SpinBathModel::new(params)?;
    let step = 1e-3;
    let t_max = 10.0;
    let gen = {
        let base = model.generator(t_max, step)?;
        if corrupt_deph_sign {
            // rebuild with the dephasing term negated
            let m2 = model.clone();
            let mut corrupted = LindbladGenerator::new(2).with_hamiltonian_fn(move |t| {
                qstate::pauli_z().scale(m2.extracted_rates(t).map(|r| r.unitary).unwrap_or(0.0))
            });
            for (k, term) in base.terms().iter().enumerate() {
                let rate = term.rate.clone();
                let rate = if k == 2 {
                    RateFunction::new(move |t| -rate.eval(t))
                } else {
                    rate
                };
                corrupted = corrupted.with_term(term.operator.clone(), rate)?;
            }
            corrupted
        } else {
            base
        }
    };
    let grid = TimeGrid::from_range(0.0, t_max, step)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho0s: Vec<DensityMatrix> = (0..states)
        .map(|_| random::random_density(2, &mut rng))
        .collect();
    let devs: Vec<f64> = parallel::map_slice(&rho0s, |rho0| {
        // a state-validity abort counts as an (infinitely) failed
        // reconstruction, not a suite error
        let integrated = match evolve(&gen, rho0, grid, step) {
            Ok(traj) => traj,
            Err(_) => return f64::INFINITY,
        };
        let mut worst: f64 = 0.0;
        for (state, &t) in integrated.states().iter().zip(integrated.times()) {
            match model.reduced_state(rho0, t) {
                Ok(closed) => {
                    worst = worst.max(qstate::max_abs_entry(&(state.matrix() - closed.matrix())));
                }
                Err(_) => return f64::INFINITY,
            }
        }
        worst
    });
    Ok((devs.into_iter().fold(0.0, f64::max), None))
}

/// Returns (identity residual, EPR negativity) on the relaxing thermal
/// qubit, reported as two separate checks.
fn thermal_qubit_series() -> Result<(f64, f64), CliError> {
    let gen = born_markov_qubit(1.0, 1.0, 1.0)?;
    let ctx = ThermalContext::constant(born_markov_hamiltonian(1.0), 1.0)?;
    let rho0 = DensityMatrix::new(qstate::excited_projector())?;
    let grid = TimeGrid::from_range(0.0, 10.0, 1e-3)?;
    let traj = evolve(&gen, &rho0, grid, 1e-3)?;
    let sigma_heat = thermo::epr(&traj, &ctx, EprMethod::EntropyMinusHeat)?;
    let sigma = thermo::epr(&traj, &ctx, EprMethod::RelativeEntropyDerivative)?;
    let f_series: Vec<f64> = traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(&t, s)| thermo::free_energy(s, &ctx, t, None))
        .collect::<Result<_, _>>()?;
    let df = derivative_uniform(traj.times(), &f_series)?;
    let residual = df
        .iter()
        .zip(&sigma_heat.values)
        .map(|(d, s)| (d + s).abs())
        .fold(0.0, f64::max);
    Ok((residual, (-sigma.min()).max(0.0)))
}

fn depolarizing_closed_form() -> Result<(f64, Option<f64>), CliError> {
    let report = purity::depolarizing_scenario(3.0, 1e-3)?;
    let mut dev: f64 = 0.0;
    let mut sign_violations = 0usize;
    for k in 0..report.times.len() {
        let t = report.times[k];
        let gamma = report.rates[k][0];
        let radius = purity::depolarizing_bloch_radius(t);
        dev = dev.max((report.purity_rate[k] + 4.0 * gamma * radius * radius).abs());
        if gamma.abs() > 1e-9 && radius > 1e-6 && report.purity_rate[k] * gamma >= 0.0 {
            sign_violations += 1;
        }
    }
    if sign_violations > 0 {
        return Ok((f64::INFINITY, None));
    }
    Ok((dev, None))
}

fn free_energy_gap_identity() -> Result<(f64, Option<f64>), CliError> {
    let model = SpinBathModel::new(SpinBathParams::figure_defaults())?;
    let rho0 = DensityMatrix::new(nm_thermo::qstate::CMat::from_row_slice(
        2,
        2,
        &[
            qstate::c(0.75, 0.0),
            qstate::c(0.25, 0.0),
            qstate::c(0.25, 0.0),
            qstate::c(0.25, 0.0),
        ],
    ))?;
    let grid = TimeGrid::from_range(0.0, 10.0, 1e-3)?;
    let traj = model.closed_form_trajectory(&rho0, grid)?;
    let ctx = model.driven_context()?;
    let (s1, s2, s3) = thermo::gepr_decompositions(&traj, &ctx)?;
    let gap = thermo::free_energy_gap_rate(&traj, &ctx)?;
    let mut worst: f64 = 0.0;
    for k in 0..traj.len() {
        worst = worst.max((gap.values[k] + s2.values[k]).abs());
        worst = worst.max((s1.values[k] - s2.values[k]).abs());
        worst = worst.max((s1.values[k] - s3.values[k]).abs());
    }
    Ok((worst, None))
}

fn pinsker_sweep(pairs: usize, seed: u64) -> Result<(f64, Option<f64>), CliError> {
    let gammas = [0.1, 0.3, 0.5, 0.9, 1.0];
    let mut worst: f64 = 0.0;
    for dim in [2usize, 3] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ dim as u64);
        let ensemble: Vec<(DensityMatrix, DensityMatrix)> = (0..pairs)
            .map(|_| {
                (
                    random::random_density(dim, &mut rng),
                    random::random_density(dim, &mut rng),
                )
            })
            .collect();
        let residuals = parallel::map_slice(&ensemble, |(rho, sigma)| {
            let d = trace_distance(rho, sigma).expect("same dims");
            gammas
                .iter()
                .map(|&g| {
                    let s = if g == 1.0 {
                        relative_entropy(rho, sigma).expect("full rank")
                    } else {
                        renyi_relative_entropy(rho, sigma, g).expect("full rank")
                    };
                    s - 2.0 * g * d * d
                })
                .fold(f64::INFINITY, f64::min)
        });
        let min = residuals.into_iter().fold(f64::INFINITY, f64::min);
        worst = worst.max((-min).max(0.0));
    }
    Ok((worst, None))
}

fn unitality_normality_ensemble(count: usize, seed: u64) -> Result<(f64, Option<f64>), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut misclassified = 0usize;
    for case in 0..count {
        let dim = 2 + (case % 3);
        // normal-operator generator must be unital
        let mut gen = LindbladGenerator::new(dim);
        let n_terms = rng.random_range(1..4);
        for _ in 0..n_terms {
            let op = match rng.random_range(0..3) {
                0 => random::random_hermitian(dim, &mut rng),
                1 => random::random_normal(dim, &mut rng),
                _ => {
                    let u = random::random_unitary(dim, &mut rng);
                    &u * random::random_hermitian(dim, &mut rng) * u.adjoint()
                }
            };
            gen = gen.with_term(op, RateFunction::constant(rng.random_range(0.1..2.0)))?;
        }
        if !check_all_normal(&gen, 1e-9) || !check_unital(&gen, 0.0, 1e-9) {
            misclassified += 1;
        }
        // generator with a decidedly non-normal operator must fail
        let mut bad = LindbladGenerator::new(dim);
        bad = bad.with_term(
            random::random_non_normal(dim, &mut rng),
            RateFunction::constant(rng.random_range(0.1..2.0)),
        )?;
        for _ in 0..rng.random_range(0..3) {
            bad = bad.with_term(
                random::random_normal(dim, &mut rng),
                RateFunction::constant(rng.random_range(0.1..2.0)),
            )?;
        }
        if check_unital(&bad, 0.0, 1e-9) {
            misclassified += 1;
        }
    }
    Ok((misclassified as f64, None))
}

fn detailed_balance_ensemble(count: usize, seed: u64) -> Result<(f64, Option<f64>), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    for _ in 0..count {
        let gamma = rng.random_range(0.3..2.0);
        let omega0 = rng.random_range(0.5..2.0);
        let beta = rng.random_range(0.2..2.0);
        let gen = born_markov_qubit(gamma, omega0, beta)?;
        let h = born_markov_hamiltonian(omega0);
        if !check_detailed_balance(&gen, &h, beta, 1e-9)?
            || !check_gibbs_fixed_point(&gen, &h, beta, 0.0, 1e-10)?
        {
            failures += 1;
        }
        // 1% absorption perturbation must flip both checks to false
        let n_planck = 1.0 / ((beta * omega0).exp_m1());
        let perturbed = LindbladGenerator::new(2)
            .with_constant_hamiltonian(h.clone())?
            .with_term(
                qstate::sigma_minus(),
                RateFunction::constant(gamma * (n_planck + 1.0)),
            )?
            .with_term(
                qstate::sigma_plus(),
                RateFunction::constant(gamma * n_planck * 1.01),
            )?;
        if check_detailed_balance(&perturbed, &h, beta, 1e-9)?
            || check_gibbs_fixed_point(&perturbed, &h, beta, 0.0, 1e-10)?
        {
            failures += 1;
        }
    }
    Ok((failures as f64, None))
}

fn hermitianization_roundtrip(count: usize, seed: u64) -> Result<(f64, Option<f64>), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for case in 0..count {
        let gen = if case % 2 == 0 {
            // qubit with random normal jumps
            let mut g = LindbladGenerator::new(2);
            for _ in 0..rng.random_range(1..4) {
                g = g.with_term(
                    random::random_normal(2, &mut rng),
                    RateFunction::constant(rng.random_range(-0.5..1.5)),
                )?;
            }
            g
        } else {
            // symmetric matrix-unit pairs in dim 3
            let dim = 3;
            let mut g = LindbladGenerator::new(dim);
            for j in 0..dim {
                for k in (j + 1)..dim {
                    let lam = rng.random_range(0.0..1.0);
                    g = g
                        .with_term(matrix_unit(dim, j, k), RateFunction::constant(lam))?
                        .with_term(matrix_unit(dim, k, j), RateFunction::constant(lam))?;
                }
            }
            g
        };
        let rebuilt = hermitian_unital_form(&gen, 0.0)?;
        for term in rebuilt.terms() {
            if !qstate::is_hermitian(&term.operator, 1e-9) {
                return Ok((f64::INFINITY, None));
            }
        }
        let d = gen.dim();
        for a in 0..d {
            for b in 0..d {
                let e = matrix_unit(d, a, b);
                let dev = hs_norm(&(gen.apply_raw(&e, 0.0)? - rebuilt.apply_raw(&e, 0.0)?));
                worst = worst.max(dev);
            }
        }
    }
    Ok((worst, None))
}

fn thermal_epr_positivity(count: usize, seed: u64) -> Result<(f64, Option<f64>), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h_grid = 0.01;
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let gamma = rng.random_range(0.3..1.5);
        let omega0 = rng.random_range(0.5..2.0);
        let beta = rng.random_range(0.2..2.0);
        let gen = born_markov_qubit(gamma, omega0, beta)?;
        let ctx = ThermalContext::constant(born_markov_hamiltonian(omega0), beta)?;
        let rho0 = random::random_density(2, &mut rng);
        let grid = TimeGrid::from_range(0.0, 5.0, h_grid)?;
        let traj = evolve(&gen, &rho0, grid, 1e-3)?;
        let sigma = thermo::epr(&traj, &ctx, EprMethod::RelativeEntropyDerivative)?;
        worst = worst.max((-sigma.min()).max(0.0));
    }
    // discretization allowance 5h²
    Ok((worst, Some(5.0 * h_grid * h_grid)))
}

// ---------------------------------------------------------------------------
// Suite driver
// ---------------------------------------------------------------------------

pub fn run(args: VerifyArgs) -> Result<bool, CliError> {
    let mut checks: Vec<CheckResult> = Vec::new();
    let seed = args.seed;

    for n in [4usize, 6] {
        checks.push(timed(
            &format!("oracle_equivalence_N{n}"),
            1e-6,
            serde_json::json!({"N": n, "tmax": 10.0, "step": 0.05}),
            || oracle_equivalence(n, seed),
        )?);
    }
    if args.level == Level::Full {
        for n in [8usize, 10, 12] {
            checks.push(timed(
                &format!("oracle_equivalence_N{n}"),
                1e-6,
                serde_json::json!({"N": n, "tmax": 10.0, "step": 0.05}),
                || oracle_equivalence(n, seed),
            )?);
        }
    }

    let recon_states = if args.level == Level::Full { 10 } else { 3 };
    checks.push(timed(
        "rate_reconstruction",
        1e-5,
        serde_json::json!({"states": recon_states, "corrupted": args.corrupt_deph_sign}),
        || rate_reconstruction(recon_states, seed, args.corrupt_deph_sign),
    )?);

    let (identity_residual, epr_negativity) = thermal_qubit_series()?;
    checks.push(timed(
        "free_energy_epr_identity_thermal_qubit",
        1e-4,
        serde_json::json!({"gamma": 1.0, "omega0": 1.0, "beta": 1.0}),
        || Ok((identity_residual, None)),
    )?);
    checks.push(timed(
        "epr_positivity_thermal_qubit",
        1e-6,
        serde_json::json!({"gamma": 1.0, "omega0": 1.0, "beta": 1.0}),
        || Ok((epr_negativity, None)),
    )?);
    checks.push(timed(
        "depolarizing_purity_closed_form",
        1e-6,
        serde_json::json!({"tmax": 3.0, "step": 1e-3}),
        depolarizing_closed_form,
    )?);
    checks.push(timed(
        "free_energy_gap_identity_spinbath",
        1e-4,
        serde_json::json!({
            "N": 10, "T": 1.0, "beta": 1.0, "omega0": 1.0, "omega": 1.0, "alpha": 0.1,
            "rho11": 0.75, "re_rho12": 0.25, "tmax": 10.0, "step": 1e-3,
        }),
        free_energy_gap_identity,
    )?);

    let pairs = 10_000usize;
    checks.push(timed(
        "pinsker_sweep",
        1e-10,
        serde_json::json!({"pairs": pairs, "dims": [2, 3], "orders": [0.1, 0.3, 0.5, 0.9, 1.0]}),
        || pinsker_sweep(pairs, seed),
    )?);

    if args.level == Level::Full {
        checks.push(timed(
            "unitality_normality_ensemble",
            0.0,
            serde_json::json!({"generators": 500}),
            || unitality_normality_ensemble(500, seed),
        )?);
        checks.push(timed(
            "detailed_balance_ensemble",
            0.0,
            serde_json::json!({"triples": 20, "perturbation": 0.01}),
            || detailed_balance_ensemble(20, seed),
        )?);
        checks.push(timed(
            "hermitian_unital_form_roundtrip",
            1e-9,
            serde_json::json!({"generators": 40}),
            || hermitianization_roundtrip(40, seed),
        )?);
        checks.push(timed(
            "thermal_epr_positivity_ensemble",
            5e-4,
            serde_json::json!({"generators": 10, "grid_step": 0.01}),
            || thermal_epr_positivity(10, seed),
        )?);
    }

    let all_pass = checks.iter().all(|c| c.pass);
    let report = serde_json::json!({
        "level": match args.level { Level::Fast => "fast", Level::Full => "full" },
        "seed": seed,
        "version": env!("CARGO_PKG_VERSION"),
        "checks": checks.iter().map(CheckResult::to_json).collect::<Vec<_>>(),
        "pass": all_pass,
    });
    let file = File::create(&args.out).map_err(|e| CliError::Io(e.to_string()))?;
    serde_json::to_writer_pretty(BufWriter::new(file), &report)
        .map_err(|e| CliError::Io(e.to_string()))?;
    println!(
        "verify: {} ({} checks, report at {})",
        if all_pass { "PASS" } else { "FAIL" },
        checks.len(),
        args.out.display()
    );
    Ok(all_pass)
}
