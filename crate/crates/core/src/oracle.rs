//! Brute-force verifier for the spin-bath closed forms: build the full
//! system⊗bath Hamiltonian in the bosonized representation, propagate
//! exactly through one eigendecomposition, partial-trace the bath, and
//! compare.
//!
//! The bath Fock space is truncated at N+2 levels (occupations 0..=N+1).
//! The thermal bath populates occupations 0..=N, and the only transition out
//! of that range reaches exactly level N+1 (the |1,N⟩ ↔ |0,N+1⟩ block), so
//! this truncation is exact for every initial state the model admits; one
//! level fewer and the top thermal mode would leak.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::generator::{TimeGrid, Trajectory};
use crate::parallel;
use crate::qstate::{
    c, identity, is_hermitian, pauli_z, sigma_minus, sigma_plus, CMat, DensityMatrix, Spectrum,
};
use crate::spinbath::SpinBathParams;
use crate::thermo::ThermoSeries;

/// The composite system: total Hamiltonian on dim 2·(N+2) and the truncated
/// thermal bath state.
#[derive(Clone, Debug)]
pub struct CompositeSystem {
    pub params: SpinBathParams,
    pub bath_dim: usize,
    pub hamiltonian: CMat,
    pub bath_state: CMat,
}

/// Kronecker product, system factor first (row index = s·dim_bath + m).
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Trace out the bath factor of a composite density matrix.
pub fn partial_trace_bath(m: &CMat, dim_sys: usize, dim_bath: usize) -> Result<CMat> {
    if m.nrows() != dim_sys * dim_bath || m.ncols() != dim_sys * dim_bath {
        return Err(Error::Dimension(format!(
            "composite matrix is {}×{}, expected {}",
            m.nrows(),
            m.ncols(),
            dim_sys * dim_bath
        )));
    }
    let mut out = CMat::zeros(dim_sys, dim_sys);
    for i in 0..dim_sys {
        for j in 0..dim_sys {
            let mut acc = c(0.0, 0.0);
            for k in 0..dim_bath {
                acc += m[(i * dim_bath + k, j * dim_bath + k)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Assemble H = H_S + H_B + H_I on the truncated composite space:
/// H_S = ω₀σ_z, H_B = −ω(1 − n̂/N), and
/// H_I = 2α[σ₊ f(n̂) b + σ₋ b† f(n̂)] − α√N σ_z (1 − n̂/N) with
/// f(n̂) = √(1 − n̂/2N).
pub fn build_composite(params: &SpinBathParams) -> Result<CompositeSystem> {
    if params.n_spins < 1 {
        return Err(Error::Parameter("need at least one bath spin".into()));
    }
    if params.temperature <= 0.0 {
        return Err(Error::Parameter("bath temperature must be positive".into()));
    }
    let nn = params.n_spins as f64;
    let bath_dim = params.n_spins + 2;

    let mut lower = CMat::zeros(bath_dim, bath_dim);
    for m in 1..bath_dim {
        lower[(m - 1, m)] = c((m as f64).sqrt(), 0.0);
    }
    let f_diag = CMat::from_diagonal(&DVector::from_iterator(
        bath_dim,
        (0..bath_dim).map(|m| c((1.0 - m as f64 / (2.0 * nn)).max(0.0).sqrt(), 0.0)),
    ));
    let depletion = CMat::from_diagonal(&DVector::from_iterator(
        bath_dim,
        (0..bath_dim).map(|m| c(1.0 - m as f64 / nn, 0.0)),
    ));

    let h_sys = kron(&pauli_z().scale(params.omega0), &identity(bath_dim));
    let h_bath = kron(&identity(2), &depletion.scale(-params.omega));
    let hop = &f_diag * &lower; // f(n̂) b
    let h_int = (kron(&sigma_plus(), &hop) + kron(&sigma_minus(), &hop.adjoint()))
        .scale(2.0 * params.alpha)
        - kron(&pauli_z(), &depletion).scale(params.alpha * nn.sqrt());

    let hamiltonian = h_sys + h_bath + h_int;
    if !is_hermitian(&hamiltonian, 1e-12) {
        return Err(Error::Numerical(
            "composite Hamiltonian is not Hermitian".into(),
        ));
    }

    // thermal bath on occupations 0..=N, zero weight on the guard level N+1
    let tt = params.temperature;
    let z: f64 = (0..=params.n_spins)
        .map(|n| (-(params.omega / tt) * (n as f64 / nn - 1.0)).exp())
        .sum();
    let bath_state = CMat::from_diagonal(&DVector::from_iterator(
        bath_dim,
        (0..bath_dim).map(|m| {
            if m <= params.n_spins {
                c(
                    (-(params.omega / tt) * (m as f64 / nn - 1.0)).exp() / z,
                    0.0,
                )
            } else {
                c(0.0, 0.0)
            }
        }),
    ));

    Ok(CompositeSystem {
        params: *params,
        bath_dim,
        hamiltonian,
        bath_state,
    })
}

impl CompositeSystem {
    /// Replace the thermal bath by an arbitrary bath state (e.g. a pure
    /// Fock level for T → 0 corner cases).
    pub fn with_bath_state(mut self, bath: CMat) -> Result<CompositeSystem> {
        if bath.nrows() != self.bath_dim || bath.ncols() != self.bath_dim {
            return Err(Error::Dimension("bath state dimension mismatch".into()));
        }
        self.bath_state = bath;
        Ok(self)
    }

    /// Propagator e^{−iHt} through the cached spectrum of H.
    pub fn propagator(spec: &Spectrum, t: f64) -> CMat {
        spec.apply(|e| C64_exp_neg_i(e * t))
    }
}

#[allow(non_snake_case)]
fn C64_exp_neg_i(phase: f64) -> crate::qstate::C64 {
    crate::qstate::C64::from_polar(1.0, -phase)
}

/// Exact reduced trajectory: one eigendecomposition of H, then per-time
/// unitary propagation of ρ0 ⊗ ρ_B and a bath partial trace. Grid points are
/// independent and run in parallel.
pub fn exact_reduced_trajectory(
    cs: &CompositeSystem,
    rho0: &DensityMatrix,
    grid: TimeGrid,
) -> Result<Trajectory> {
    if rho0.dim() != 2 {
        return Err(Error::Dimension("system is a qubit".into()));
    }
    let spec = Spectrum::of_hermitian(&cs.hamiltonian)?;
    let rho_total0 = kron(rho0.matrix(), &cs.bath_state);
    let states: Vec<DensityMatrix> = parallel::map_slice(&grid.times(), |&t| {
        let p = CompositeSystem::propagator(&spec, t);
        let rho_t = &p * &rho_total0 * p.adjoint();
        let reduced = partial_trace_bath(&rho_t, 2, cs.bath_dim)?;
        DensityMatrix::with_tolerance(reduced, 1e-9, 1e-9).map_err(|e| Error::Integration {
            t,
            detail: e.to_string(),
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    Trajectory::from_parts(grid.times(), states, None)
}

/// Max-abs / RMS comparison of two aligned series against a tolerance.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub max_abs: f64,
    pub rms: f64,
    /// Time at which the max deviation occurs.
    pub max_at: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn finite_difference_check(
    series: &ThermoSeries,
    analytic: &ThermoSeries,
    tol: f64,
) -> Result<CheckReport> {
    if series.len() != analytic.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} points",
            series.len(),
            analytic.len()
        )));
    }
    for (a, b) in series.times.iter().zip(&analytic.times) {
        if (a - b).abs() > 1e-9 * a.abs().max(1.0) {
            return Err(Error::GridMismatch("series grids differ".into()));
        }
    }
    let mut max_abs = 0.0;
    let mut max_at = series.times.first().copied().unwrap_or(0.0);
    let mut sq_sum = 0.0;
    for ((&t, &x), &y) in series
        .times
        .iter()
        .zip(&series.values)
        .zip(&analytic.values)
    {
        let dev = (x - y).abs();
        sq_sum += dev * dev;
        if dev > max_abs {
            max_abs = dev;
            max_at = t;
        }
    }
    let rms = (sq_sum / series.len() as f64).sqrt();
    Ok(CheckReport {
        max_abs,
        rms,
        max_at,
        tol,
        pass: max_abs <= tol,
    })
}

/// Max entrywise deviation between two state trajectories on the same grid.
pub fn max_state_deviation(a: &Trajectory, b: &Trajectory) -> Result<(f64, f64)> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} points",
            a.len(),
            b.len()
        )));
    }
    let mut worst = 0.0;
    let mut worst_t = 0.0;
    for ((sa, sb), &t) in a.states().iter().zip(b.states()).zip(a.times()) {
        let dev = crate::qstate::max_abs_entry(&(sa.matrix() - sb.matrix()));
        if dev > worst {
            worst = dev;
            worst_t = t;
        }
    }
    Ok((worst, worst_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_params(n: usize) -> SpinBathParams {
        SpinBathParams {
            n_spins: n,
            ..SpinBathParams::figure_defaults()
        }
    }

    #[test]
    fn composite_dimensions_and_bath_spectrum() {
        // N = 1: bath levels {0, 1} carry H_B eigenvalues {−ω, 0}; the guard
        // level 1+1 carries +ω
        let cs = build_composite(&small_params(1)).unwrap();
        assert_eq!(cs.hamiltonian.nrows(), 6);
        let h_b = |m: usize| -cs.params.omega * (1.0 - m as f64 / 1.0);
        assert_abs_diff_eq!(h_b(0), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h_b(1), 0.0, epsilon = 1e-15);
        // partition over the physical levels only
        let z: f64 = cs.bath_state.diagonal().iter().map(|x| x.re).sum();
        assert_abs_diff_eq!(z, 1.0, epsilon = 1e-12);
        let w_ratio = cs.bath_state[(0, 0)].re / cs.bath_state[(1, 1)].re;
        assert_abs_diff_eq!(w_ratio, (1.0f64 / 1.0).exp(), epsilon = 1e-12);
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        for n in [1, 3, 6] {
            let cs = build_composite(&small_params(n)).unwrap();
            assert!(qstate::is_hermitian(&cs.hamiltonian, 1e-12));
        }
    }

    #[test]
    fn propagator_is_unitary() {
        let cs = build_composite(&small_params(4)).unwrap();
        let spec = Spectrum::of_hermitian(&cs.hamiltonian).unwrap();
        for t in [0.0, 0.3, 2.7, 9.9] {
            let p = CompositeSystem::propagator(&spec, t);
            let dev = qstate::max_abs_entry(&(p.adjoint() * &p - identity(p.nrows())));
            assert!(dev < 1e-10, "unitarity deviation {dev:e} at t = {t}");
        }
    }

    #[test]
    fn time_zero_returns_the_initial_state() {
        let cs = build_composite(&small_params(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let rho0 = qstate::random::random_density(2, &mut rng);
        let grid = TimeGrid::from_range(0.0, 1.0, 1.0).unwrap();
        let traj = exact_reduced_trajectory(&cs, &rho0, grid).unwrap();
        let dev = qstate::max_abs_entry(&(traj.states()[0].matrix() - rho0.matrix()));
        assert!(dev < 1e-12);
    }

    #[test]
    fn decoupled_system_keeps_populations_and_phase() {
        // α = 0: populations frozen, coherence rotates at 2ω₀
        let params = SpinBathParams {
            alpha: 0.0,
            ..small_params(3)
        };
        let cs = build_composite(&params).unwrap();
        let rho0 = crate::qstate::bloch_state(0.6, 0.0, 0.3).unwrap();
        let grid = TimeGrid::from_range(0.0, 2.0, 0.5).unwrap();
        let traj = exact_reduced_trajectory(&cs, &rho0, grid).unwrap();
        for (state, &t) in traj.states().iter().zip(traj.times()) {
            assert_abs_diff_eq!(
                state.matrix()[(0, 0)].re,
                rho0.matrix()[(0, 0)].re,
                epsilon = 1e-12
            );
            let expected = rho0.matrix()[(0, 1)]
                * crate::qstate::C64::from_polar(1.0, -2.0 * params.omega0 * t);
            assert!((state.matrix()[(0, 1)] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn global_purity_is_preserved() {
        // unitary propagation preserves Tr[ρ²] of the composite, including
        // the pure-bath corner
        let cs = build_composite(&small_params(2)).unwrap();
        let pure_bath = {
            let mut b = CMat::zeros(cs.bath_dim, cs.bath_dim);
            b[(0, 0)] = c(1.0, 0.0);
            b
        };
        let cs = cs.with_bath_state(pure_bath).unwrap();
        let rho0 = DensityMatrix::pure(&[c(0.8, 0.0), c(0.0, 0.6)]).unwrap();
        let spec = Spectrum::of_hermitian(&cs.hamiltonian).unwrap();
        let rho_tot0 = kron(rho0.matrix(), &cs.bath_state);
        let purity0: f64 = rho_tot0.iter().map(|z| z.norm_sqr()).sum();
        assert_abs_diff_eq!(purity0, 1.0, epsilon = 1e-12);
        for t in [0.5, 3.0] {
            let p = CompositeSystem::propagator(&spec, t);
            let rho_t = &p * &rho_tot0 * p.adjoint();
            let purity_t: f64 = rho_t.iter().map(|z| z.norm_sqr()).sum();
            assert_abs_diff_eq!(purity_t, purity0, epsilon = 1e-10);
        }
    }

    #[test]
    fn partial_trace_is_linear_and_trace_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let (ds, db) = (2, 4);
        let m1 = qstate::random::random_density(ds * db, &mut rng);
        let m2 = qstate::random::random_density(ds * db, &mut rng);
        let a = partial_trace_bath(m1.matrix(), ds, db).unwrap();
        let b = partial_trace_bath(m2.matrix(), ds, db).unwrap();
        assert_abs_diff_eq!(qstate::trace(&a).re, 1.0, epsilon = 1e-12);
        let mix = m1.matrix().scale(0.3) + m2.matrix().scale(0.7);
        let ab = partial_trace_bath(&mix, ds, db).unwrap();
        let dev = qstate::max_abs_entry(&(ab - (a.scale(0.3) + b.scale(0.7))));
        assert!(dev < 1e-13);
    }

    #[test]
    fn kron_against_small_case() {
        let a = qstate::pauli_x();
        let b = identity(2);
        let k = kron(&a, &b);
        assert_eq!(k.nrows(), 4);
        assert_abs_diff_eq!(k[(0, 2)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k[(1, 3)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k[(0, 1)].re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn finite_difference_check_reports_deviations() {
        let times: Vec<f64> = (0..11).map(|k| 0.1 * k as f64).collect();
        let s1 =
            ThermoSeries::new("a", times.clone(), times.iter().map(|t| t.sin()).collect()).unwrap();
        let identical = finite_difference_check(&s1, &s1, 1e-12).unwrap();
        assert!(identical.pass);
        assert_eq!(identical.max_abs, 0.0);
        let mut shifted = s1.clone();
        shifted.values[7] += 1e-3;
        let report = finite_difference_check(&s1, &shifted, 1e-4).unwrap();
        assert!(!report.pass);
        assert_abs_diff_eq!(report.max_abs, 1e-3, epsilon = 1e-12);
        assert_abs_diff_eq!(report.max_at, 0.7, epsilon = 1e-12);
    }
}
