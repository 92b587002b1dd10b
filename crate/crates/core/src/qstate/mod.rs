//! Dense complex-matrix foundation: quantum states, observables, entropies,
//! distances and the asymmetry functional.
//!
//! All entropic quantities are in natural log (nats). Matrix functions go
//! through a full Hermitian eigendecomposition, which is exact and cheap at
//! the dimensions this crate targets (≤ ~64).
//!
//! Qubit helpers use the basis ordering (|1⟩, |0⟩) = (excited, ground), so a
//! 2×2 state prints as [[ρ11, ρ12], [ρ21, ρ22]] with ρ11 the excited-state
//! population and `pauli_z` = diag(+1, −1) assigning the excited state the
//! higher `σ_z` eigenvalue.

pub mod random;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex64;
pub type CMat = DMatrix<C64>;

/// Eigenvalues in `[-EIG_FLOOR, EIG_FLOOR]` are clamped to `EIG_FLOOR` inside
/// logarithms and negative powers; below `-EIG_FLOOR` a freshly constructed
/// state is rejected.
pub const EIG_FLOOR: f64 = 1e-12;
/// Absolute tolerance on the max entry deviation from Hermiticity.
pub const HERM_TOL: f64 = 1e-10;
/// Absolute tolerance on |trace − 1|.
pub const TRACE_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Elementary matrix helpers
// ---------------------------------------------------------------------------

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn zeros(dim: usize) -> CMat {
    CMat::zeros(dim, dim)
}

/// Matrix unit |j⟩⟨k| in a `dim`-dimensional space.
pub fn matrix_unit(dim: usize, j: usize, k: usize) -> CMat {
    let mut m = CMat::zeros(dim, dim);
    m[(j, k)] = C64::new(1.0, 0.0);
    m
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

/// Hilbert–Schmidt norm ‖M‖ = √Tr[M†M].
pub fn hs_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

/// Real part of Tr[A B]; exact for products of Hermitian operators.
pub fn trace_product_re(a: &CMat, b: &CMat) -> f64 {
    // Tr[AB] = Σ_ij A_ij B_ji without forming the product.
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc.re
}

pub fn max_abs_entry(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let n = m.nrows();
    for i in 0..n {
        for j in i..n {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

fn check_square(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

fn check_same_dim(a: &CMat, b: &CMat) -> Result<usize> {
    let da = check_square(a)?;
    let db = check_square(b)?;
    if da != db {
        return Err(Error::Dimension(format!(
            "operand dims {da} and {db} differ"
        )));
    }
    Ok(da)
}

// ---------------------------------------------------------------------------
// Qubit operators, basis (|1⟩, |0⟩) = (excited, ground)
// ---------------------------------------------------------------------------

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// Raising operator σ₊ = |1⟩⟨0|.
pub fn sigma_plus() -> CMat {
    matrix_unit(2, 0, 1)
}

/// Lowering operator σ₋ = |0⟩⟨1|.
pub fn sigma_minus() -> CMat {
    matrix_unit(2, 1, 0)
}

/// Projector |1⟩⟨1| onto the excited state.
pub fn excited_projector() -> CMat {
    matrix_unit(2, 0, 0)
}

/// Projector |0⟩⟨0| onto the ground state.
pub fn ground_projector() -> CMat {
    matrix_unit(2, 1, 1)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Qubit state (I + r·σ)/2 from a Bloch vector.
pub fn bloch_state(rx: f64, ry: f64, rz: f64) -> Result<DensityMatrix> {
    let m = CMat::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + rz), 0.0),
            c(0.5 * rx, -0.5 * ry),
            c(0.5 * rx, 0.5 * ry),
            c(0.5 * (1.0 - rz), 0.0),
        ],
    );
    DensityMatrix::new(m)
}

/// Bloch vector (⟨σx⟩, ⟨σy⟩, ⟨σz⟩) of a qubit state.
pub fn bloch_vector(rho: &DensityMatrix) -> Result<[f64; 3]> {
    if rho.dim() != 2 {
        return Err(Error::Dimension(
            "Bloch vector requires a qubit state".into(),
        ));
    }
    let m = rho.matrix();
    Ok([
        2.0 * m[(0, 1)].re,
        -2.0 * m[(0, 1)].im,
        (m[(0, 0)] - m[(1, 1)]).re,
    ])
}

// ---------------------------------------------------------------------------
// Spectrum and matrix functions
// ---------------------------------------------------------------------------

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending,
/// eigenvector columns aligned with them.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

impl Spectrum {
    /// Decompose a Hermitian matrix. Hermiticity is the caller's contract;
    /// only squareness is checked here.
    pub fn of_hermitian(m: &CMat) -> Result<Spectrum> {
        let dim = check_square(m)?;
        let eig = m.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .partial_cmp(&eig.eigenvalues[a])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        if eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical("non-finite eigenvalue".into()));
        }
        let mut eigenvectors = CMat::zeros(dim, dim);
        for (col, &k) in order.iter().enumerate() {
            eigenvectors.set_column(col, &eig.eigenvectors.column(k));
        }
        Ok(Spectrum {
            eigenvalues,
            eigenvectors,
        })
    }

    /// Rebuild Σ f(λ_i) |v_i⟩⟨v_i| for a complex-valued f.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> CMat {
        let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&x| f(x)),
        ));
        &self.eigenvectors * d * self.eigenvectors.adjoint()
    }
}

/// f(M) for Hermitian M through the eigendecomposition.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> C64) -> Result<CMat> {
    Ok(Spectrum::of_hermitian(m)?.apply(f))
}

/// Principal logarithm of a positive matrix, with the eigenvalue floor.
pub fn matrix_ln(m: &CMat) -> Result<CMat> {
    let spec = Spectrum::of_hermitian(m)?;
    Ok(spec.apply(|x| c(x.max(EIG_FLOOR).ln(), 0.0)))
}

/// Real power M^p of a positive matrix. Non-negative powers clamp negative
/// eigenvalues to zero; negative powers use the eigenvalue floor.
pub fn matrix_powf(m: &CMat, p: f64) -> Result<CMat> {
    let spec = Spectrum::of_hermitian(m)?;
    if p >= 0.0 {
        Ok(spec.apply(|x| c(x.max(0.0).powf(p), 0.0)))
    } else {
        Ok(spec.apply(|x| c(x.max(EIG_FLOOR).powf(p), 0.0)))
    }
}

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

/// A positive, unit-trace, Hermitian matrix. Validated on construction,
/// immutable afterwards.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    /// Validate with the default tolerances (`HERM_TOL`, `TRACE_TOL`,
    /// eigenvalues ≥ −`EIG_FLOOR`).
    pub fn new(mat: CMat) -> Result<DensityMatrix> {
        Self::with_tolerance(mat, HERM_TOL, EIG_FLOOR)
    }

    /// Validate with a caller-chosen Hermiticity/trace tolerance and
    /// negativity allowance `neg_tol` (numerically integrated states use a
    /// looser 1e-8).
    pub fn with_tolerance(mat: CMat, herm_tol: f64, neg_tol: f64) -> Result<DensityMatrix> {
        check_square(&mat)?;
        if !is_hermitian(&mat, herm_tol) {
            return Err(Error::InvalidState(format!(
                "not Hermitian within {herm_tol:e}"
            )));
        }
        let tr = trace(&mat);
        if (tr - c(1.0, 0.0)).norm() > herm_tol.max(TRACE_TOL) {
            return Err(Error::InvalidState(format!(
                "trace {} differs from 1",
                tr.re
            )));
        }
        let spec = Spectrum::of_hermitian(&mat)?;
        if let Some(&min) = spec
            .eigenvalues
            .iter()
            .min_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
        {
            if min < -neg_tol {
                return Err(Error::InvalidState(format!(
                    "negative eigenvalue {min:e} below -{neg_tol:e}"
                )));
            }
        }
        Ok(DensityMatrix { mat })
    }

    /// Pure state |ψ⟩⟨ψ| from an (unnormalized) amplitude vector.
    pub fn pure(amplitudes: &[C64]) -> Result<DensityMatrix> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::Parameter("zero state vector".into()));
        }
        let dim = amplitudes.len();
        let mut m = CMat::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = amplitudes[i] * amplitudes[j].conj() / norm_sq;
            }
        }
        DensityMatrix::new(m)
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> DensityMatrix {
        DensityMatrix {
            mat: identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// Diagonal state from a probability vector.
    pub fn from_probabilities(p: &[f64]) -> Result<DensityMatrix> {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            p.len(),
            p.iter().map(|&x| c(x, 0.0)),
        ));
        DensityMatrix::new(m)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        Spectrum::of_hermitian(&self.mat)
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Whether ‖M M† − M† M‖ ≤ tol.
pub fn is_normal(m: &CMat, tol: f64) -> Result<bool> {
    check_square(m)?;
    if tol <= 0.0 {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    let adj = m.adjoint();
    Ok(hs_norm(&(m * &adj - &adj * m)) <= tol)
}

/// S(ρ) = −Σ λ ln λ over eigenvalues above the floor, in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let spec = rho.spectrum()?;
    Ok(spec
        .eigenvalues
        .iter()
        .filter(|&&x| x > EIG_FLOOR)
        .map(|&x| -x * x.ln())
        .sum())
}

/// S(ρ‖σ) = Tr[ρ(ln ρ − ln σ)] in nats. Errors with
/// [`Error::SupportViolation`] when ρ has weight on the kernel of σ, i.e.
/// the value is +∞.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho.matrix(), sigma.matrix())?;
    let spec_s = sigma.spectrum()?;
    // populations of ρ in the eigenbasis of σ
    let mut cross = 0.0;
    for (k, &lam) in spec_s.eigenvalues.iter().enumerate() {
        let v = spec_s.eigenvectors.column(k);
        let p = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        if lam <= EIG_FLOOR {
            if p > 1e-10 {
                return Err(Error::SupportViolation);
            }
            continue;
        }
        cross += p * lam.ln();
    }
    let s_rho = von_neumann_entropy(rho)?;
    Ok(-s_rho - cross)
}

/// Rényi relative entropy S_γ(ρ‖σ) = ln(Tr[ρ^γ σ^{1−γ}]) / (γ−1), γ > 0,
/// γ ≠ 1, in nats.
pub fn renyi_relative_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    gamma: f64,
) -> Result<f64> {
    check_same_dim(rho.matrix(), sigma.matrix())?;
    if gamma <= 0.0 {
        return Err(Error::Parameter("Rényi order must be positive".into()));
    }
    if (gamma - 1.0).abs() < 1e-14 {
        return Err(Error::Parameter(
            "Rényi order 1 is the von Neumann limit; use relative_entropy".into(),
        ));
    }
    let p = matrix_powf(rho.matrix(), gamma)?;
    let q = matrix_powf(sigma.matrix(), 1.0 - gamma)?;
    let t = trace_product_re(&p, &q);
    if t <= 0.0 {
        return Err(Error::SupportViolation);
    }
    Ok(t.ln() / (gamma - 1.0))
}

/// Trace distance D_T(ρ,σ) = ½ Σ |μ_i| over eigenvalues of ρ − σ.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho.matrix(), sigma.matrix())?;
    let diff = rho.matrix() - sigma.matrix();
    let spec = Spectrum::of_hermitian(&diff)?;
    Ok(0.5 * spec.eigenvalues.iter().map(|x| x.abs()).sum::<f64>())
}

/// Purity P = Tr[ρ²].
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// Asymmetry Q(O) = ‖[ρ, O]‖²_HS of an operator with respect to a state.
pub fn asymmetry(rho: &DensityMatrix, op: &CMat) -> Result<f64> {
    check_same_dim(rho.matrix(), op)?;
    let comm = commutator(rho.matrix(), op);
    Ok(comm.iter().map(|z| z.norm_sqr()).sum())
}

/// Gibbs state τ_β = e^{−βH}/Z with its partition function Z = Tr e^{−βH}.
///
/// The exponential is computed with the spectrum shifted by the ground
/// energy, so τ_β is well conditioned for any β ≥ 0; the returned Z is the
/// unshifted Tr e^{−βH} (see [`log_partition`] for the overflow-safe log).
pub fn gibbs_state(h: &CMat, beta: f64) -> Result<(DensityMatrix, f64)> {
    check_square(h)?;
    if !is_hermitian(h, HERM_TOL) {
        return Err(Error::Parameter("Hamiltonian must be Hermitian".into()));
    }
    if beta < 0.0 {
        return Err(Error::Parameter("inverse temperature must be ≥ 0".into()));
    }
    let spec = Spectrum::of_hermitian(h)?;
    let e0 = spec
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let z_shifted: f64 = spec
        .eigenvalues
        .iter()
        .map(|&e| (-beta * (e - e0)).exp())
        .sum();
    let tau = spec.apply(|e| c((-beta * (e - e0)).exp() / z_shifted, 0.0));
    let z = z_shifted * (-beta * e0).exp();
    Ok((DensityMatrix::new(tau)?, z))
}

/// ln Z = ln Tr e^{−βH}, computed without overflow.
pub fn log_partition(h: &CMat, beta: f64) -> Result<f64> {
    let spec = Spectrum::of_hermitian(h)?;
    let e0 = spec
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let z_shifted: f64 = spec
        .eigenvalues
        .iter()
        .map(|&e| (-beta * (e - e0)).exp())
        .sum();
    Ok(z_shifted.ln() - beta * e0)
}
