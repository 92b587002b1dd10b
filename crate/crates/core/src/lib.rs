//! Numerical toolkit for time-local quantum master equations with
//! time-dependent (possibly negative) rates.
//!
//! The crate is organised around six layers:
//!
//! - [`qstate`]: dense complex matrices, density matrices, entropies,
//!   divergences, distances and the asymmetry functional. All entropies are
//!   in nats.
//! - [`generator`]: GKSL-form generators `L(ρ) = -i[H,ρ] + Σ Γ_α(t) D[A_α]ρ`,
//!   a fixed-step RK4 integrator, and the classification checks (unitality,
//!   normality, Gibbs fixed point, detailed balance, divisibility witness).
//! - [`thermo`]: entropy production rate, Rényi EPR, heat current, work,
//!   free energy, athermality, the Pinsker complementarity residual, and the
//!   generalized EPR with its equivalent decompositions for driven systems.
//! - [`purity`]: the purity-rate decomposition over jump-operator asymmetries
//!   and the depolarizing reference scenario.
//! - [`spinbath`]: closed-form reduced dynamics of a central spin coupled to
//!   a bosonized spin bath, the extracted time-dependent rates, the induced
//!   drifting Hamiltonian, and the Born–Markov thermal qubit.
//! - [`oracle`]: a brute-force composite-system verifier (exact propagator,
//!   partial trace) certifying the closed forms at small bath size.
//!
//! Sweeps over states, parameters or grid points are embarrassingly parallel;
//! with the default `parallel` feature they run on rayon, without it the same
//! entry points fall back to sequential iteration (see [`parallel`]).

pub mod error;
pub mod generator;
pub mod oracle;
pub mod parallel;
pub mod purity;
pub mod qstate;
pub mod spinbath;
pub mod thermo;

pub use error::{Error, Result};
pub use generator::{LindbladGenerator, LindbladTerm, RateFunction, TimeGrid, Trajectory};
pub use qstate::{CMat, DensityMatrix, Spectrum, C64};
pub use thermo::{ThermalContext, ThermoSeries};
