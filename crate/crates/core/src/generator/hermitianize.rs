//! Rewriting a unital generator over Hermitian jump operators.
//!
//! The dissipative part of a GKSL generator is expanded in an orthonormal
//! Hermitian operator basis {F_0 = I/√d, F_1, …}. The traceless-block
//! Kossakowski matrix K splits into a real symmetric part R (whose
//! eigenvectors give Hermitian jumps with real rates) and an imaginary
//! antisymmetric part J. Unitality forces Σ J_kl [F_k, F_l] = 0 but not
//! J = 0; whatever J-action remains is matched against a commutator −i[G,·]
//! by least squares. The construction is accepted only if the rebuilt
//! generator reproduces the original action on the full matrix-unit basis
//! and if the J-action is not a commutator (possible for dim ≥ 3) the
//! mismatch is reported instead of silently dropped.

use nalgebra::{DMatrix, DVector};

use super::{LindbladGenerator, RateFunction};
use crate::error::{Error, Result};
use crate::qstate::{c, commutator, hs_norm, matrix_unit, trace, CMat, C64};

/// Orthonormal Hermitian basis of d×d matrices: identity first, then the
/// symmetric/antisymmetric off-diagonal pairs and the diagonal traceless
/// elements.
fn hermitian_basis(d: usize) -> Vec<CMat> {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d * d);
    basis.push(CMat::identity(d, d).scale(1.0 / (d as f64).sqrt()));
    for j in 0..d {
        for k in (j + 1)..d {
            let e_jk = matrix_unit(d, j, k);
            let e_kj = matrix_unit(d, k, j);
            basis.push((&e_jk + &e_kj).scale(inv_sqrt2));
            basis.push((&e_jk - &e_kj).scale(inv_sqrt2).map(|z| z * c(0.0, -1.0)));
        }
    }
    for l in 1..d {
        let mut m = CMat::zeros(d, d);
        for p in 0..l {
            m[(p, p)] = c(1.0, 0.0);
        }
        m[(l, l)] = c(-(l as f64), 0.0);
        basis.push(m.scale(1.0 / ((l * (l + 1)) as f64).sqrt()));
    }
    basis
}

/// Superoperator of a map as a d²×d² matrix acting on vec(ρ), columns
/// indexed by matrix units.
fn action_matrix(d: usize, f: impl Fn(&CMat) -> CMat) -> CMat {
    let mut s = CMat::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            let img = f(&matrix_unit(d, a, b));
            for r in 0..d {
                for cc in 0..d {
                    s[(r * d + cc, a * d + b)] = img[(r, cc)];
                }
            }
        }
    }
    s
}

/// Rewrite a generator that is unital at time `t` into an action-equal
/// generator whose jump operators are all Hermitian (rates frozen at `t`),
/// possibly with an extra Hamiltonian piece absorbed from the rewriting.
///
/// Non-unital input is a classification error, as is the (dim ≥ 3) corner
/// where the imaginary Kossakowski part is not a commutator and no
/// Hermitian-jump representation reproduces the action.
pub fn hermitian_unital_form(gen: &LindbladGenerator, t: f64) -> Result<LindbladGenerator> {
    let d = gen.dim();
    let rates: Vec<f64> = gen.terms().iter().map(|term| term.rate.eval(t)).collect();
    let scale: f64 = gen
        .terms()
        .iter()
        .zip(&rates)
        .map(|(term, g)| g.abs() * hs_norm(&term.operator).powi(2))
        .sum::<f64>()
        .max(1.0);

    // unitality gate
    let defect: CMat = gen
        .terms()
        .iter()
        .zip(&rates)
        .map(|(term, &g)| {
            let a = &term.operator;
            (a * a.adjoint() - a.adjoint() * a).scale(g)
        })
        .fold(CMat::zeros(d, d), |acc, m| acc + m);
    if hs_norm(&defect) > 1e-9 * scale {
        return Err(Error::Classification(format!(
            "generator is not unital at t = {t}: ‖L(I)‖ = {:.3e}",
            hs_norm(&defect)
        )));
    }

    if gen.terms().is_empty() {
        return Ok(gen.clone());
    }

    let basis = hermitian_basis(d);
    let nb = d * d - 1; // traceless block size

    // expand each jump operator; K over the traceless block, plus the
    // Hamiltonian induced by identity components
    let mut k_mat = DMatrix::<C64>::zeros(nb, nb);
    let mut g_induced = CMat::zeros(d, d);
    for (term, &g) in gen.terms().iter().zip(&rates) {
        let a = &term.operator;
        let coeff: Vec<C64> = basis.iter().map(|f_k| trace(&(f_k * a))).collect();
        let c0 = coeff[0];
        let a_traceless = a - CMat::identity(d, d)
            .scale(1.0 / (d as f64).sqrt())
            .map(|z| z * c0);
        // (i/(2√d)) (c̄₀Ã − c₀Ã†), Hermitian
        g_induced += (a_traceless.map(|z| z * c0.conj()) - a_traceless.adjoint().map(|z| z * c0))
            .map(|z| z * c(0.0, g / (2.0 * (d as f64).sqrt())));
        for k in 1..d * d {
            for l in 1..d * d {
                k_mat[(k - 1, l - 1)] += coeff[k] * coeff[l].conj() * c(g, 0.0);
            }
        }
    }

    // real-symmetric part → Hermitian jumps with real rates
    let r_part =
        DMatrix::<f64>::from_fn(nb, nb, |k, l| 0.5 * (k_mat[(k, l)].re + k_mat[(l, k)].re));
    let j_part =
        DMatrix::<f64>::from_fn(nb, nb, |k, l| 0.5 * (k_mat[(k, l)].im - k_mat[(l, k)].im));
    let r_eig = r_part.clone().symmetric_eigen();

    let mut new_terms: Vec<(CMat, f64)> = Vec::new();
    for mu in 0..nb {
        let lam = r_eig.eigenvalues[mu];
        if lam.abs() < 1e-12 * scale {
            continue;
        }
        let mut op = CMat::zeros(d, d);
        for k in 0..nb {
            op += basis[k + 1].scale(r_eig.eigenvectors[(k, mu)]);
        }
        new_terms.push((op, lam));
    }

    // imaginary antisymmetric part → best-fit commutator −i[G_J, ·]
    let mut g_j = CMat::zeros(d, d);
    if j_part.iter().any(|x| x.abs() > 1e-12 * scale) {
        let m_j = action_matrix(d, |rho| {
            let mut out = CMat::zeros(d, d);
            for k in 0..nb {
                for l in 0..nb {
                    let jkl = j_part[(k, l)];
                    if jkl == 0.0 {
                        continue;
                    }
                    let fk = &basis[k + 1];
                    let fl = &basis[l + 1];
                    let flfk = fl * fk;
                    out += (fk * rho * fl - (&flfk * rho + rho * &flfk).scale(0.5))
                        .map(|z| z * c(0.0, jkl));
                }
            }
            out
        });
        // columns: superoperators of −i[F_m, ·]
        let cols: Vec<CMat> = (1..d * d)
            .map(|m| {
                action_matrix(d, |rho| {
                    commutator(&basis[m], rho).map(|z| z * c(0.0, -1.0))
                })
            })
            .collect();
        // real least squares over stacked Re/Im entries
        let rows = 2 * d * d * d * d;
        let mut a_ls = DMatrix::<f64>::zeros(rows, nb);
        let mut b_ls = DVector::<f64>::zeros(rows);
        for (idx, z) in m_j.iter().enumerate() {
            b_ls[2 * idx] = z.re;
            b_ls[2 * idx + 1] = z.im;
        }
        for (m, col) in cols.iter().enumerate() {
            for (idx, z) in col.iter().enumerate() {
                a_ls[(2 * idx, m)] = z.re;
                a_ls[(2 * idx + 1, m)] = z.im;
            }
        }
        let svd = a_ls.svd(true, true);
        let sol = svd
            .solve(&b_ls, 1e-12)
            .map_err(|e| Error::Numerical(format!("least squares failed: {e}")))?;
        for m in 0..nb {
            g_j += basis[m + 1].scale(sol[m]);
        }
    }

    // assemble and verify action equality on the matrix-unit basis
    let extra_h = g_induced + g_j;
    let mut rebuilt = LindbladGenerator::new(d);
    let h_total = match gen.hamiltonian_at(t) {
        Some(h) => h + &extra_h,
        None => extra_h.clone(),
    };
    if hs_norm(&h_total) > 1e-14 {
        rebuilt = rebuilt.with_constant_hamiltonian(h_total)?;
    }
    for (op, lam) in &new_terms {
        rebuilt = rebuilt.with_term(op.clone(), RateFunction::constant(*lam))?;
    }

    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let e_ab = matrix_unit(d, a, b);
            let orig = gen.apply_raw(&e_ab, t)?;
            let new = rebuilt.apply_raw(&e_ab, t)?;
            worst = worst.max(hs_norm(&(orig - new)));
        }
    }
    if worst > 1e-9 * scale {
        return Err(Error::Classification(format!(
            "no Hermitian-jump representation reproduces the action \
             (residual {worst:.3e}); the imaginary Kossakowski part is not a commutator"
        )));
    }
    Ok(rebuilt)
}
