//! Time-local master-equation generators in GKSL form,
//!
//!   L(ρ) = −i[H(t), ρ] + Σ_α Γ_α(t) (A_α ρ A_α† − ½{A_α†A_α, ρ}),
//!
//! their numerical integration, and the classification checks: unitality,
//! normality of the jump operators, Gibbs fixed point, detailed balance, and
//! the divisibility (negative-rate) witness. Rates may go negative; that is
//! the non-Markovian window the witness flags, and the integrator proceeds
//! through it as long as the state stays valid.

mod hermitianize;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::qstate::{
    self, anticommutator, commutator, hs_norm, identity, is_hermitian, is_normal, matrix_unit,
    CMat, DensityMatrix, Spectrum, C64,
};

pub use hermitianize::hermitian_unital_form;

/// Tolerance separating numerical zero crossings from genuine rate
/// negativity in [`divisibility_witness`].
pub const RATE_SIGN_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Rates and Hamiltonians
// ---------------------------------------------------------------------------

/// A pure map t ↦ Γ(t). Negative values are allowed; they mark the
/// non-Markovian windows.
#[derive(Clone)]
pub struct RateFunction(Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl RateFunction {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RateFunction(Arc::new(f))
    }

    pub fn constant(value: f64) -> Self {
        RateFunction(Arc::new(move |_| value))
    }

    /// Rate sampled on the uniform grid t0 + k·dt. Queries landing on a node
    /// (within 1e-6·dt) return the node value exactly; queries in between
    /// interpolate linearly; queries outside the range clamp to the ends.
    pub fn tabulated_uniform(t0: f64, dt: f64, values: Vec<f64>) -> Self {
        assert!(dt > 0.0 && !values.is_empty());
        RateFunction(Arc::new(move |t| {
            let x = (t - t0) / dt;
            let k = x.round();
            if (x - k).abs() < 1e-6 {
                let k = (k as isize).clamp(0, values.len() as isize - 1) as usize;
                return values[k];
            }
            let lo = (x.floor() as isize).clamp(0, values.len() as isize - 1) as usize;
            let hi = (lo + 1).min(values.len() - 1);
            let frac = (x - lo as f64).clamp(0.0, 1.0);
            values[lo] * (1.0 - frac) + values[hi] * frac
        }))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.0)(t)
    }
}

impl std::fmt::Debug for RateFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RateFunction(..)")
    }
}

#[derive(Clone)]
enum Hamiltonian {
    None,
    Constant(CMat),
    TimeDependent(Arc<dyn Fn(f64) -> CMat + Send + Sync>),
}

/// One (jump operator, rate) pair.
#[derive(Clone, Debug)]
pub struct LindbladTerm {
    pub operator: CMat,
    pub rate: RateFunction,
}

/// A time-local GKSL generator: optional Hamiltonian plus jump terms.
#[derive(Clone)]
pub struct LindbladGenerator {
    dim: usize,
    hamiltonian: Hamiltonian,
    terms: Vec<LindbladTerm>,
}

impl std::fmt::Debug for LindbladGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "LindbladGenerator(dim={}, terms={})",
            self.dim,
            self.terms.len()
        )
    }
}

impl LindbladGenerator {
    pub fn new(dim: usize) -> Self {
        LindbladGenerator {
            dim,
            hamiltonian: Hamiltonian::None,
            terms: Vec::new(),
        }
    }

    pub fn with_constant_hamiltonian(mut self, h: CMat) -> Result<Self> {
        if h.nrows() != self.dim || h.ncols() != self.dim {
            return Err(Error::Dimension(format!(
                "Hamiltonian is {}×{}, generator dim is {}",
                h.nrows(),
                h.ncols(),
                self.dim
            )));
        }
        if !is_hermitian(&h, 1e-8) {
            return Err(Error::Parameter("Hamiltonian must be Hermitian".into()));
        }
        self.hamiltonian = Hamiltonian::Constant(h);
        Ok(self)
    }

    /// Time-dependent Hamiltonian map. The map must produce Hermitian
    /// matrices of the generator dimension; this is checked when applied.
    pub fn with_hamiltonian_fn(mut self, f: impl Fn(f64) -> CMat + Send + Sync + 'static) -> Self {
        self.hamiltonian = Hamiltonian::TimeDependent(Arc::new(f));
        self
    }

    pub fn with_term(mut self, operator: CMat, rate: RateFunction) -> Result<Self> {
        if operator.nrows() != self.dim || operator.ncols() != self.dim {
            return Err(Error::Dimension(format!(
                "jump operator is {}×{}, generator dim is {}",
                operator.nrows(),
                operator.ncols(),
                self.dim
            )));
        }
        self.terms.push(LindbladTerm { operator, rate });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[LindbladTerm] {
        &self.terms
    }

    pub fn hamiltonian_at(&self, t: f64) -> Option<CMat> {
        match &self.hamiltonian {
            Hamiltonian::None => None,
            Hamiltonian::Constant(h) => Some(h.clone()),
            Hamiltonian::TimeDependent(f) => Some(f(t)),
        }
    }

    /// Generator action on a raw matrix (no state validation; used by the
    /// integrator on intermediate Runge–Kutta stages).
    pub fn apply_raw(&self, m: &CMat, t: f64) -> Result<CMat> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::Dimension(format!(
                "state is {}×{}, generator dim is {}",
                m.nrows(),
                m.ncols(),
                self.dim
            )));
        }
        let mut out = CMat::zeros(self.dim, self.dim);
        if let Some(h) = self.hamiltonian_at(t) {
            if !is_hermitian(&h, 1e-8) {
                return Err(Error::Parameter(format!(
                    "Hamiltonian map is not Hermitian at t = {t}"
                )));
            }
            out += commutator(&h, m)
                .scale(-1.0)
                .map(|z| z * C64::new(0.0, 1.0));
        }
        for term in &self.terms {
            let g = term.rate.eval(t);
            if g == 0.0 {
                continue;
            }
            if !g.is_finite() {
                return Err(Error::Numerical(format!("rate not finite at t = {t}")));
            }
            let a = &term.operator;
            let adag_a = a.adjoint() * a;
            let sandwich = a * m * a.adjoint();
            out += (sandwich - anticommutator(&adag_a, m).scale(0.5)).scale(g);
        }
        Ok(out)
    }
}

/// L(ρ) at time t. The result is traceless and Hermitian to numerical
/// precision.
pub fn apply_generator(gen: &LindbladGenerator, rho: &DensityMatrix, t: f64) -> Result<CMat> {
    gen.apply_raw(rho.matrix(), t)
}

// ---------------------------------------------------------------------------
// Time grids and trajectories
// ---------------------------------------------------------------------------

/// Uniform time grid t0 + k·dt, k = 0..=steps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    /// Grid over [t0, t_max] with the requested spacing; the step count is
    /// rounded so the grid lands on t_max.
    pub fn from_range(t0: f64, t_max: f64, dt: f64) -> Result<TimeGrid> {
        if dt <= 0.0 || t_max <= t0 {
            return Err(Error::Parameter(
                "grid requires dt > 0 and t_max > t0".into(),
            ));
        }
        let steps = ((t_max - t0) / dt).round().max(1.0) as usize;
        Ok(TimeGrid {
            t0,
            dt: (t_max - t0) / steps as f64,
            steps,
        })
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + self.dt * k as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }
}

/// States sampled on a time grid, optionally carrying the generator that
/// produced them (analytic ρ̇ for the thermodynamic layer).
#[derive(Clone, Debug)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    generator: Option<LindbladGenerator>,
}

impl Trajectory {
    pub fn from_parts(
        times: Vec<f64>,
        states: Vec<DensityMatrix>,
        generator: Option<LindbladGenerator>,
    ) -> Result<Trajectory> {
        if times.len() != states.len() {
            return Err(Error::GridMismatch(format!(
                "{} times vs {} states",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter("times must be strictly increasing".into()));
        }
        Ok(Trajectory {
            times,
            states,
            generator,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn generator(&self) -> Option<&LindbladGenerator> {
        self.generator.as_ref()
    }

    /// Uniform grid spacing; errors when the grid is not uniform to 1e-9
    /// relative.
    pub fn uniform_dt(&self) -> Result<f64> {
        if self.times.len() < 2 {
            return Err(Error::GridMismatch(
                "trajectory has fewer than 2 points".into(),
            ));
        }
        let dt = self.times[1] - self.times[0];
        for w in self.times.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0) {
                return Err(Error::GridMismatch("grid is not uniform".into()));
            }
        }
        Ok(dt)
    }
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

/// Integrate ρ̇ = L(ρ) with classical fixed-step RK4, sampling states on
/// `grid`. When `step` is smaller than the grid spacing, each grid interval
/// is subdivided into equal RK4 substeps no larger than `step`.
///
/// The trace is renormalized whenever the drift exceeds 1e-12, and every
/// stored state must pass the validity check at tolerance 1e-8; a violation
/// aborts with the offending time.
pub fn evolve(
    gen: &LindbladGenerator,
    rho0: &DensityMatrix,
    grid: TimeGrid,
    step: f64,
) -> Result<Trajectory> {
    if step <= 0.0 {
        return Err(Error::Parameter("integrator step must be positive".into()));
    }
    if rho0.dim() != gen.dim() {
        return Err(Error::Dimension(format!(
            "initial state dim {} vs generator dim {}",
            rho0.dim(),
            gen.dim()
        )));
    }
    let substeps = (grid.dt / step).ceil().max(1.0) as usize;
    let h = grid.dt / substeps as f64;

    let mut current = rho0.matrix().clone();
    let mut times = Vec::with_capacity(grid.len());
    let mut states = Vec::with_capacity(grid.len());
    let store = |m: &CMat, t: f64, out: &mut Vec<DensityMatrix>| -> Result<()> {
        match DensityMatrix::with_tolerance(m.clone(), 1e-8, 1e-8) {
            Ok(dm) => {
                out.push(dm);
                Ok(())
            }
            Err(e) => Err(Error::Integration {
                t,
                detail: e.to_string(),
            }),
        }
    };

    store(&current, grid.t0, &mut states)?;
    times.push(grid.t0);

    for k in 0..grid.steps {
        let t_k = grid.time(k);
        for j in 0..substeps {
            let t = t_k + h * j as f64;
            let k1 = gen.apply_raw(&current, t)?;
            let k2 = gen.apply_raw(&(&current + k1.scale(0.5 * h)), t + 0.5 * h)?;
            let k3 = gen.apply_raw(&(&current + k2.scale(0.5 * h)), t + 0.5 * h)?;
            let k4 = gen.apply_raw(&(&current + k3.scale(h)), t + h)?;
            current += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0);
            let tr = qstate::trace(&current).re;
            if (tr - 1.0).abs() > 1e-12 {
                current = current.scale(1.0 / tr);
            }
        }
        let t_next = grid.time(k + 1);
        store(&current, t_next, &mut states)?;
        times.push(t_next);
    }

    Trajectory::from_parts(times, states, Some(gen.clone()))
}

// ---------------------------------------------------------------------------
// Classification checks
// ---------------------------------------------------------------------------

/// Whether the dissipative part annihilates the identity:
/// ‖L(I/d)·d‖ ≤ tol. The Hamiltonian commutator vanishes identically on the
/// identity, so it never contributes.
pub fn check_unital(gen: &LindbladGenerator, t: f64, tol: f64) -> bool {
    let d = gen.dim();
    let l_id = gen
        .apply_raw(&identity(d).scale(1.0 / d as f64), t)
        .map(|m| m.scale(d as f64));
    match l_id {
        Ok(m) => hs_norm(&m) <= tol,
        Err(_) => false,
    }
}

/// Whether every jump operator is normal within tol.
pub fn check_all_normal(gen: &LindbladGenerator, tol: f64) -> bool {
    gen.terms()
        .iter()
        .all(|term| is_normal(&term.operator, tol).unwrap_or(false))
}

/// Whether the Gibbs state of (H, β) is a fixed point of the generator at
/// time t: ‖L(τ_β)‖ ≤ tol.
pub fn check_gibbs_fixed_point(
    gen: &LindbladGenerator,
    h: &CMat,
    beta: f64,
    t: f64,
    tol: f64,
) -> Result<bool> {
    let (tau, _) = qstate::gibbs_state(h, beta)?;
    let l_tau = gen.apply_raw(tau.matrix(), t)?;
    Ok(hs_norm(&l_tau) <= tol)
}

/// Times at which detailed balance is sampled; rates in this crate are
/// smooth, so a handful of points distinguishes balanced from unbalanced
/// rate pairs.
const DETAILED_BALANCE_SAMPLES: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

/// Detailed-balance test for generators whose jump operators are scalar
/// multiples of matrix units |j⟩⟨i| in the eigenbasis of `h`: checks
/// Γ_ji(t) = Γ_ij(t) e^{−β(E_i−E_j)} for every level pair at sampled times,
/// treating a missing partner as rate 0.
///
/// Operators not of matrix-unit form (within `tol`, relative to their
/// largest element) make the hypothesis inapplicable and produce
/// [`Error::NotApplicable`]. Degenerate eigenvalues are tie-broken by the
/// (stable) descending eigenvalue order.
pub fn check_detailed_balance(
    gen: &LindbladGenerator,
    h: &CMat,
    beta: f64,
    tol: f64,
) -> Result<bool> {
    if !is_hermitian(h, 1e-8) {
        return Err(Error::Parameter(
            "reference Hamiltonian must be Hermitian".into(),
        ));
    }
    let spec = Spectrum::of_hermitian(h)?;
    let d = gen.dim();
    let v = &spec.eigenvectors;

    // (i, j) ↦ scaled rates for operator ∝ |j⟩⟨i| (transition i → j)
    type Channels<'a> = Vec<(usize, usize, Vec<(f64, &'a RateFunction)>)>;
    let mut channels: Channels = Vec::new();
    for term in gen.terms() {
        let a_eig = v.adjoint() * &term.operator * v;
        let mut best = (0usize, 0usize, 0.0f64);
        for r in 0..d {
            for c_ in 0..d {
                let mag = a_eig[(r, c_)].norm();
                if mag > best.2 {
                    best = (r, c_, mag);
                }
            }
        }
        let (row, col, max_mag) = best;
        if max_mag == 0.0 {
            continue; // zero operator contributes nothing
        }
        for r in 0..d {
            for c_ in 0..d {
                if (r, c_) != (row, col) && a_eig[(r, c_)].norm() > tol * max_mag {
                    return Err(Error::NotApplicable(format!(
                        "jump operator is not a matrix unit in the energy eigenbasis \
                         (entry ({r},{c_}) = {:.3e} of max {:.3e})",
                        a_eig[(r, c_)].norm(),
                        max_mag
                    )));
                }
            }
        }
        // operator = c·|row⟩⟨col|: transition col → row with rate Γ·|c|²
        let weight = max_mag * max_mag;
        match channels.iter_mut().find(|(i, j, _)| (*i, *j) == (col, row)) {
            Some((_, _, list)) => list.push((weight, &term.rate)),
            None => channels.push((col, row, vec![(weight, &term.rate)])),
        }
    }

    let rate_at = |i: usize, j: usize, t: f64| -> f64 {
        channels
            .iter()
            .find(|(a, b, _)| (*a, *b) == (i, j))
            .map(|(_, _, list)| list.iter().map(|(w, r)| w * r.eval(t)).sum())
            .unwrap_or(0.0)
    };

    for i in 0..d {
        for j in (i + 1)..d {
            let factor = (-beta * (spec.eigenvalues[i] - spec.eigenvalues[j])).exp();
            for &t in &DETAILED_BALANCE_SAMPLES {
                let forward = rate_at(i, j, t); // Γ_ij, transition i → j
                let backward = rate_at(j, i, t); // Γ_ji
                let expected = forward * factor;
                let scale = forward.abs().max(backward.abs()).max(1e-300);
                if (backward - expected).abs() > tol * scale {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Per-time rate signs on a grid: flags every time where some Γ_α(t) drops
/// below −[`RATE_SIGN_TOL`], i.e. the non-Markovian window set.
#[derive(Clone, Debug)]
pub struct WitnessPoint {
    pub t: f64,
    pub rates: Vec<f64>,
    /// Indices of terms with Γ_α(t) < −RATE_SIGN_TOL.
    pub negative_terms: Vec<usize>,
    pub all_nonnegative: bool,
}

pub fn divisibility_witness(gen: &LindbladGenerator, grid: &TimeGrid) -> Vec<WitnessPoint> {
    grid.times()
        .into_iter()
        .map(|t| {
            let rates: Vec<f64> = gen.terms().iter().map(|term| term.rate.eval(t)).collect();
            let negative_terms: Vec<usize> = rates
                .iter()
                .enumerate()
                .filter(|(_, &g)| g < -RATE_SIGN_TOL)
                .map(|(k, _)| k)
                .collect();
            let all_nonnegative = negative_terms.is_empty();
            WitnessPoint {
                t,
                rates,
                negative_terms,
                all_nonnegative,
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Stock generators
// ---------------------------------------------------------------------------

/// Qubit depolarizing generator Σ_i Γ(t)(σ_i ρ σ_i − ρ) with a common rate
/// on all three Pauli channels.
pub fn pauli_depolarizing(rate: RateFunction) -> LindbladGenerator {
    LindbladGenerator::new(2)
        .with_term(qstate::pauli_x(), rate.clone())
        .and_then(|g| g.with_term(qstate::pauli_y(), rate.clone()))
        .and_then(|g| g.with_term(qstate::pauli_z(), rate))
        .expect("Pauli operators match the qubit dimension")
}

/// Generator with a single matrix-unit jump |j⟩⟨i| at a constant rate,
/// useful for building detailed-balance examples.
pub fn matrix_unit_term(dim: usize, j: usize, i: usize, rate: f64) -> Result<LindbladGenerator> {
    LindbladGenerator::new(dim).with_term(matrix_unit(dim, j, i), RateFunction::constant(rate))
}
