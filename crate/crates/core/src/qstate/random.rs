//! Random states and operators for property suites and ensemble checks.
//!
//! Everything is driven by a caller-supplied RNG so sweeps stay
//! reproducible under a fixed seed.

use nalgebra::DVector;
use rand::Rng;

use super::{c, CMat, DensityMatrix, C64};

fn standard_complex(rng: &mut impl Rng) -> C64 {
    // Box–Muller pair; unit-variance complex Gaussian.
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    c(
        r * (2.0 * std::f64::consts::PI * u2).cos(),
        r * (2.0 * std::f64::consts::PI * u2).sin(),
    )
    .scale(std::f64::consts::FRAC_1_SQRT_2)
}

/// Complex Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(dim: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(dim, dim, |_, _| standard_complex(rng))
}

/// Haar-ish random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMat {
    let g = ginibre(dim, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    // fix the phase convention so the distribution is Haar
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random full-rank density matrix GG†/Tr[GG†] (Hilbert–Schmidt measure).
pub fn random_density(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = ginibre(dim, rng);
    let m = &g * g.adjoint();
    let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
    DensityMatrix::new(m.scale(1.0 / tr)).expect("Wishart state is valid by construction")
}

/// Random pure state |ψ⟩⟨ψ|.
pub fn random_pure(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let amps: Vec<C64> = (0..dim).map(|_| standard_complex(rng)).collect();
    DensityMatrix::pure(&amps).expect("Gaussian amplitudes are nonzero a.s.")
}

/// Random Hermitian matrix (G + G†)/2, entries O(1).
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> CMat {
    let g = ginibre(dim, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// Random normal matrix U diag(z) U† with complex spectrum z.
pub fn random_normal(dim: usize, rng: &mut impl Rng) -> CMat {
    let u = random_unitary(dim, rng);
    let d = CMat::from_diagonal(&DVector::from_iterator(
        dim,
        (0..dim).map(|_| standard_complex(rng)),
    ));
    &u * d * u.adjoint()
}

/// Random matrix rejected until it is decidedly non-normal:
/// ‖[M, M†]‖ ≥ 0.05 · ‖M‖².
pub fn random_non_normal(dim: usize, rng: &mut impl Rng) -> CMat {
    loop {
        let m = ginibre(dim, rng);
        let adj = m.adjoint();
        let defect = super::hs_norm(&(&m * &adj - &adj * &m));
        let scale = super::hs_norm(&m).powi(2);
        if defect >= 0.05 * scale {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in [2, 3, 5] {
            let u = random_unitary(dim, &mut rng);
            let dev = qstate::max_abs_entry(&(u.adjoint() * &u - qstate::identity(dim)));
            assert!(dev < 1e-12, "unitarity deviation {dev:e}");
        }
    }

    #[test]
    fn density_is_valid_and_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let rho = random_density(3, &mut rng);
            let spec = rho.spectrum().unwrap();
            assert!(spec.eigenvalues.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn non_normal_rejector_terminates() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_non_normal(2, &mut rng);
        assert!(!qstate::is_normal(&m, 1e-9).unwrap());
    }
}
