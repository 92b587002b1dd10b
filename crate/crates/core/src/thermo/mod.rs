//! Thermodynamic observables along a trajectory: entropy production rate
//! (EPR), Rényi EPR, heat current, extractable work, free energy, athermality,
//! the Pinsker complementarity residual, and the generalized EPR (GEPR) with
//! its equivalent decompositions for drifting Hamiltonians.
//!
//! Scalar series are differentiated by second-order finite differences on the
//! trajectory grid (central in the interior, one-sided at the ends). Where a
//! trajectory carries its generator, ρ̇ is taken from the generator action
//! instead, which makes the cross-checks between the decompositions
//! non-trivial rather than stencil identities.

mod fd;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::generator::{apply_generator, LindbladGenerator, Trajectory};
use crate::qstate::{
    self, gibbs_state, log_partition, relative_entropy, renyi_relative_entropy, trace_distance,
    trace_product_re, von_neumann_entropy, CMat, DensityMatrix,
};

pub use fd::{derivative_uniform, matrix_derivative_uniform};

/// Step for the fallback central-difference derivative of a time-dependent
/// Hamiltonian map.
const H_DOT_STEP: f64 = 1e-5;

// ---------------------------------------------------------------------------
// Thermal context
// ---------------------------------------------------------------------------

type HamiltonianMap = Arc<dyn Fn(f64) -> CMat + Send + Sync>;

/// Reference Hamiltonian (possibly drifting) and inverse temperature, with
/// the derived instantaneous Gibbs state τ_β(t) = e^{−βH(t)}/Z(t).
#[derive(Clone)]
pub struct ThermalContext {
    hamiltonian: HamiltonianMap,
    hamiltonian_dot: Option<HamiltonianMap>,
    beta: f64,
    driven: bool,
}

impl ThermalContext {
    /// Context with a time-independent reference Hamiltonian.
    pub fn constant(h: CMat, beta: f64) -> Result<ThermalContext> {
        if beta < 0.0 {
            return Err(Error::Parameter("inverse temperature must be ≥ 0".into()));
        }
        if !qstate::is_hermitian(&h, 1e-8) {
            return Err(Error::Parameter(
                "reference Hamiltonian must be Hermitian".into(),
            ));
        }
        Ok(ThermalContext {
            hamiltonian: Arc::new(move |_| h.clone()),
            hamiltonian_dot: None,
            beta,
            driven: false,
        })
    }

    /// Context with a drifting Hamiltonian H̃(t); `h_dot` supplies the
    /// analytic derivative when available, otherwise central differences
    /// with step 1e-5 are used.
    pub fn driven(
        h: impl Fn(f64) -> CMat + Send + Sync + 'static,
        h_dot: Option<HamiltonianMap>,
        beta: f64,
    ) -> Result<ThermalContext> {
        if beta < 0.0 {
            return Err(Error::Parameter("inverse temperature must be ≥ 0".into()));
        }
        Ok(ThermalContext {
            hamiltonian: Arc::new(h),
            hamiltonian_dot: h_dot,
            beta,
            driven: true,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_driven(&self) -> bool {
        self.driven
    }

    pub fn hamiltonian(&self, t: f64) -> CMat {
        (self.hamiltonian)(t)
    }

    pub fn hamiltonian_dot(&self, t: f64) -> CMat {
        match &self.hamiltonian_dot {
            Some(f) => f(t),
            None => {
                if !self.driven {
                    let h = self.hamiltonian(t);
                    return CMat::zeros(h.nrows(), h.ncols());
                }
                let plus = self.hamiltonian(t + H_DOT_STEP);
                let minus = self.hamiltonian(t - H_DOT_STEP);
                (plus - minus).scale(1.0 / (2.0 * H_DOT_STEP))
            }
        }
    }

    /// Instantaneous Gibbs state and partition function.
    pub fn gibbs(&self, t: f64) -> Result<(DensityMatrix, f64)> {
        gibbs_state(&self.hamiltonian(t), self.beta)
    }

    pub fn log_partition(&self, t: f64) -> Result<f64> {
        log_partition(&self.hamiltonian(t), self.beta)
    }

    /// Von Neumann entropy of the instantaneous Gibbs state.
    pub fn thermal_entropy(&self, t: f64) -> Result<f64> {
        let (tau, _) = self.gibbs(t)?;
        von_neumann_entropy(&tau)
    }
}

impl std::fmt::Debug for ThermalContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ThermalContext(beta={}, driven={})",
            self.beta, self.driven
        )
    }
}

// ---------------------------------------------------------------------------
// Labeled series
// ---------------------------------------------------------------------------

/// A labeled scalar series aligned with a trajectory grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermoSeries {
    pub label: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ThermoSeries {
    pub fn new(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::GridMismatch(format!(
                "{} times vs {} values",
                times.len(),
                values.len()
            )));
        }
        Ok(ThermoSeries {
            label: label.into(),
            times,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Finite-difference derivative of this series, as a new series.
    pub fn derivative(&self, label: impl Into<String>) -> Result<ThermoSeries> {
        let dv = derivative_uniform(&self.times, &self.values)?;
        ThermoSeries::new(label, self.times.clone(), dv)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }
}

// ---------------------------------------------------------------------------
// Scalar observables at a single time
// ---------------------------------------------------------------------------

/// Heat current J = Tr[H(t) ρ̇] with ρ̇ from the generator action.
pub fn heat_current(
    gen: &LindbladGenerator,
    rho: &DensityMatrix,
    ctx: &ThermalContext,
    t: f64,
) -> Result<f64> {
    let rho_dot = apply_generator(gen, rho, t)?;
    Ok(trace_product_re(&ctx.hamiltonian(t), &rho_dot))
}

/// W = Tr[H(t)(ρ − τ_β(t))]; sign free, zero at the Gibbs state.
pub fn extractable_work(rho: &DensityMatrix, ctx: &ThermalContext, t: f64) -> Result<f64> {
    let (tau, _) = ctx.gibbs(t)?;
    let h = ctx.hamiltonian(t);
    Ok(trace_product_re(&h, rho.matrix()) - trace_product_re(&h, tau.matrix()))
}

/// Free energy. Without a Rényi order: F = Tr[H(t)ρ] − S(ρ)/β. With γ:
/// F^γ = S_γ(ρ‖τ_β(t))/β − ln Z(t)/β. Both reduce to −ln Z/β at ρ = τ_β.
pub fn free_energy(
    rho: &DensityMatrix,
    ctx: &ThermalContext,
    t: f64,
    gamma: Option<f64>,
) -> Result<f64> {
    if ctx.beta() <= 0.0 {
        return Err(Error::Parameter(
            "free energy needs β > 0; at β = 0 use the purity framework".into(),
        ));
    }
    match gamma {
        None => {
            let s = von_neumann_entropy(rho)?;
            Ok(trace_product_re(&ctx.hamiltonian(t), rho.matrix()) - s / ctx.beta())
        }
        Some(g) => {
            let (tau, _) = ctx.gibbs(t)?;
            let sg = if (g - 1.0).abs() < 1e-12 {
                relative_entropy(rho, &tau)?
            } else {
                renyi_relative_entropy(rho, &tau, g)?
            };
            Ok((sg - ctx.log_partition(t)?) / ctx.beta())
        }
    }
}

/// Athermality A(t) = D_T(ρ, τ_β(t)).
pub fn athermality(rho: &DensityMatrix, ctx: &ThermalContext, t: f64) -> Result<f64> {
    let (tau, _) = ctx.gibbs(t)?;
    trace_distance(rho, &tau)
}

// ---------------------------------------------------------------------------
// EPR
// ---------------------------------------------------------------------------

/// How to compute the entropy production rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EprMethod {
    /// σ(t) = −d/dt S(ρ(t)‖τ_β) by finite differences of the divergence.
    RelativeEntropyDerivative,
    /// σ(t) = dS/dt − β Tr[H ρ̇]; ρ̇ from the trajectory's generator when
    /// present, finite differences otherwise. Requires a non-driven context.
    EntropyMinusHeat,
}

fn divergence_series(traj: &Trajectory, ctx: &ThermalContext) -> Result<Vec<f64>> {
    traj.times()
        .iter()
        .zip(traj.states())
        .map(|(&t, rho)| {
            let (tau, _) = ctx.gibbs(t)?;
            relative_entropy(rho, &tau)
        })
        .collect()
}

fn entropy_series(traj: &Trajectory) -> Result<Vec<f64>> {
    traj.states().iter().map(von_neumann_entropy).collect()
}

/// ρ̇ on the grid: generator action when the trajectory carries one, else
/// finite differences of the states.
fn rho_dot_series(traj: &Trajectory) -> Result<Vec<CMat>> {
    match traj.generator() {
        Some(gen) => traj
            .times()
            .iter()
            .zip(traj.states())
            .map(|(&t, rho)| apply_generator(gen, rho, t))
            .collect(),
        None => {
            let mats: Vec<CMat> = traj.states().iter().map(|s| s.matrix().clone()).collect();
            matrix_derivative_uniform(traj.times(), &mats)
        }
    }
}

/// Entropy production rate along a trajectory.
pub fn epr(traj: &Trajectory, ctx: &ThermalContext, method: EprMethod) -> Result<ThermoSeries> {
    if traj.len() < 3 {
        return Err(Error::Parameter(
            "EPR needs at least 3 trajectory points".into(),
        ));
    }
    match method {
        EprMethod::RelativeEntropyDerivative => {
            let div = divergence_series(traj, ctx)?;
            let mut d = derivative_uniform(traj.times(), &div)?;
            d.iter_mut().for_each(|x| *x = -*x);
            ThermoSeries::new("epr", traj.times().to_vec(), d)
        }
        EprMethod::EntropyMinusHeat => {
            if ctx.is_driven() {
                return Err(Error::Parameter(
                    "entropy-minus-heat EPR assumes a constant reference Hamiltonian; \
                     use gepr for driven contexts"
                        .into(),
                ));
            }
            let s = entropy_series(traj)?;
            let s_dot = derivative_uniform(traj.times(), &s)?;
            let rho_dots = rho_dot_series(traj)?;
            let values: Vec<f64> = traj
                .times()
                .iter()
                .zip(&rho_dots)
                .zip(&s_dot)
                .map(|((&t, rd), &sd)| sd - ctx.beta() * trace_product_re(&ctx.hamiltonian(t), rd))
                .collect();
            ThermoSeries::new("epr", traj.times().to_vec(), values)
        }
    }
}

/// Rényi EPR σ^γ(t) = −d/dt S_γ(ρ(t)‖τ_β) by finite differences.
pub fn renyi_epr(traj: &Trajectory, ctx: &ThermalContext, gamma: f64) -> Result<ThermoSeries> {
    if gamma <= 0.0 || (gamma - 1.0).abs() < 1e-14 {
        return Err(Error::Parameter(
            "Rényi order must be positive and ≠ 1".into(),
        ));
    }
    let div: Vec<f64> = traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(&t, rho)| {
            let (tau, _) = ctx.gibbs(t)?;
            renyi_relative_entropy(rho, &tau, gamma)
        })
        .collect::<Result<_>>()?;
    let mut d = derivative_uniform(traj.times(), &div)?;
    d.iter_mut().for_each(|x| *x = -*x);
    ThermoSeries::new(format!("renyi_epr_{gamma}"), traj.times().to_vec(), d)
}

/// Per-term χ_α(t) of the Rényi entropy rate under a unital generator:
/// χ_α = γ/(1−γ) · Tr[ρ^{γ−1} A_α ρ A_α† − ρ^γ A_α†A_α] / Tr[ρ^γ].
pub fn renyi_chi_terms(
    rho: &DensityMatrix,
    gen: &LindbladGenerator,
    t: f64,
    gamma: f64,
) -> Result<Vec<f64>> {
    let _ = t;
    if gamma <= 0.0 || (gamma - 1.0).abs() < 1e-14 {
        return Err(Error::Parameter(
            "Rényi order must be positive and ≠ 1".into(),
        ));
    }
    if !crate::generator::check_all_normal(gen, 1e-9) {
        return Err(Error::Classification(
            "Rényi entropy rate decomposition requires normal jump operators".into(),
        ));
    }
    let rho_pow = qstate::matrix_powf(rho.matrix(), gamma)?;
    let rho_pow_m1 = qstate::matrix_powf(rho.matrix(), gamma - 1.0)?;
    let tr_pow = qstate::trace(&rho_pow).re;
    let prefactor = gamma / (1.0 - gamma) / tr_pow;
    gen.terms()
        .iter()
        .map(|term| {
            let a = &term.operator;
            let sandwich = a * rho.matrix() * a.adjoint();
            let t1 = trace_product_re(&rho_pow_m1, &sandwich);
            let t2 = trace_product_re(&rho_pow, &(a.adjoint() * a));
            Ok(prefactor * (t1 - t2))
        })
        .collect()
}

/// dS_γ/dt = Σ_α Γ_α(t) χ_α(t) for a unital generator on a full-rank state.
pub fn renyi_entropy_rate_unital(
    rho: &DensityMatrix,
    gen: &LindbladGenerator,
    t: f64,
    gamma: f64,
) -> Result<f64> {
    if !crate::generator::check_unital(gen, t, 1e-9) {
        return Err(Error::Classification(
            "Rényi entropy rate formula holds for unital generators".into(),
        ));
    }
    let chis = renyi_chi_terms(rho, gen, t, gamma)?;
    Ok(gen
        .terms()
        .iter()
        .zip(&chis)
        .map(|(term, chi)| term.rate.eval(t) * chi)
        .sum())
}

// ---------------------------------------------------------------------------
// Complementarity
// ---------------------------------------------------------------------------

/// Residual of the free-energy-loss / athermality complementarity bound:
/// S^γ(ρ(0)‖τ) − ΔF^γ(t) − 2γ A²(t) with ΔF^γ(t) the divergence loss
/// S^γ(ρ(0)‖τ) − S^γ(ρ(t)‖τ). Driven contexts use the instantaneous Gibbs
/// state in both the divergence and the athermality. Non-negative along any
/// CPTP trajectory by the Pinsker bound.
pub fn complementarity_residual(
    traj: &Trajectory,
    ctx: &ThermalContext,
    gamma: f64,
) -> Result<ThermoSeries> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Parameter(
            "complementarity requires γ ∈ (0, 1]".into(),
        ));
    }
    let div_at = |rho: &DensityMatrix, t: f64| -> Result<f64> {
        let (tau, _) = ctx.gibbs(t)?;
        if (gamma - 1.0).abs() < 1e-12 {
            relative_entropy(rho, &tau)
        } else {
            renyi_relative_entropy(rho, &tau, gamma)
        }
    };
    let initial = div_at(&traj.states()[0], traj.times()[0])?;
    let values: Vec<f64> = traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(&t, rho)| {
            let loss = initial - div_at(rho, t)?;
            let a = athermality(rho, ctx, t)?;
            Ok(initial - loss - 2.0 * gamma * a * a)
        })
        .collect::<Result<_>>()?;
    ThermoSeries::new(
        format!("complementarity_residual_{gamma}"),
        traj.times().to_vec(),
        values,
    )
}

// ---------------------------------------------------------------------------
// GEPR
// ---------------------------------------------------------------------------

/// Generalized EPR σ̃(t) = −d/dt S(ρ(t)‖τ_β(t)) against the instantaneous
/// Gibbs state.
pub fn gepr(traj: &Trajectory, ctx: &ThermalContext) -> Result<ThermoSeries> {
    let div = divergence_series(traj, ctx)?;
    let mut d = derivative_uniform(traj.times(), &div)?;
    d.iter_mut().for_each(|x| *x = -*x);
    ThermoSeries::new("gepr", traj.times().to_vec(), d)
}

/// The three equivalent GEPR routes:
///
/// 1. −d/dt S(ρ‖τ_β(t)) (divergence derivative),
/// 2. σ − β(⟨W⟩ − ⟨W⟩_th) with σ = dS/dt − βTr[H̃ρ̇], ⟨W⟩ = Tr[Ḣ̃ρ],
///    ⟨W⟩_th = Tr[Ḣ̃τ_β(t)],
/// 3. d/dt[(S − S_th) − βW] with W = Tr[H̃(ρ − τ_β(t))].
pub fn gepr_decompositions(
    traj: &Trajectory,
    ctx: &ThermalContext,
) -> Result<(ThermoSeries, ThermoSeries, ThermoSeries)> {
    let times = traj.times().to_vec();
    let first = gepr(traj, ctx)?;

    // route 2
    let s = entropy_series(traj)?;
    let s_dot = derivative_uniform(&times, &s)?;
    let rho_dots = rho_dot_series(traj)?;
    let beta = ctx.beta();
    let mut second_vals = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let h = ctx.hamiltonian(t);
        let h_dot = ctx.hamiltonian_dot(t);
        let (tau, _) = ctx.gibbs(t)?;
        let sigma = s_dot[k] - beta * trace_product_re(&h, &rho_dots[k]);
        let w_mean = trace_product_re(&h_dot, traj.states()[k].matrix());
        let w_th = trace_product_re(&h_dot, tau.matrix());
        second_vals.push(sigma - beta * (w_mean - w_th));
    }
    let second = ThermoSeries::new("gepr_work_route", times.clone(), second_vals)?;

    // route 3
    let mut bracket = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let s_th = ctx.thermal_entropy(t)?;
        let w = extractable_work(&traj.states()[k], ctx, t)?;
        bracket.push((s[k] - s_th) - beta * w);
    }
    let third_vals = derivative_uniform(&times, &bracket)?;
    let third = ThermoSeries::new("gepr_entropy_work_route", times, third_vals)?;

    Ok((first, second, third))
}

/// β d/dt (F(t) − F_th(t)) with F_th = −ln Z(t)/β; equals −σ̃(t).
pub fn free_energy_gap_rate(traj: &Trajectory, ctx: &ThermalContext) -> Result<ThermoSeries> {
    if ctx.beta() <= 0.0 {
        return Err(Error::Parameter("free energy gap rate needs β > 0".into()));
    }
    let gap: Vec<f64> = traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(&t, rho)| {
            let f = free_energy(rho, ctx, t, None)?;
            let f_th = -ctx.log_partition(t)? / ctx.beta();
            Ok(ctx.beta() * (f - f_th))
        })
        .collect::<Result<_>>()?;
    let d = derivative_uniform(traj.times(), &gap)?;
    ThermoSeries::new("beta_dF_gap_dt", traj.times().to_vec(), d)
}
