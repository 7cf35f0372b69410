//! Dense complex matrix helpers shared by the oracles.

use nalgebra::{DMatrix, DVector, Dim, Matrix, RawStorage};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance on `‖H - H†‖_max` accepted by [`expm_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-12;

pub fn max_abs<R: Dim, C: Dim, S: RawStorage<Complex64, R, C>>(m: &Matrix<Complex64, R, C, S>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermiticity_error(h: &CMatrix) -> f64 {
    if !h.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(h - h.adjoint()))
}

/// `max |U†U - Id|`.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

/// `e^{iθH}` for Hermitian `H`, through `H = V diag(λ) V†`.
pub fn expm_hermitian(h: &CMatrix, theta: f64) -> Result<CMatrix> {
    let err = hermiticity_error(h);
    if err > HERMITIAN_TOL {
        return Err(Error::Precondition(format!(
            "matrix is not Hermitian (max |H - H†| = {err:e})"
        )));
    }
    let n = h.nrows();
    if n == 0 || theta == 0.0 {
        return Ok(CMatrix::identity(n, n));
    }
    // symmetrize so the eigensolver sees an exactly Hermitian input
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let phases = eig
        .eigenvalues
        .map(|lambda| Complex64::from_polar(1.0, theta * lambda));
    let v = &eig.eigenvectors;
    Ok(v * CMatrix::from_diagonal(&phases) * v.adjoint())
}

/// `min_χ ‖U - e^{iχ}T‖_F`, attained at `χ = arg tr(T†U)`.
pub fn phase_invariant_distance(u: &CMatrix, target: &CMatrix) -> f64 {
    let phase = optimal_phase(u, target);
    (u - target.map(|z| z * phase)).norm()
}

/// `max |U - e^{iχ}T|` entrywise with the optimal `χ` of [`phase_invariant_distance`].
pub fn phase_invariant_max_diff(u: &CMatrix, target: &CMatrix) -> f64 {
    let phase = optimal_phase(u, target);
    max_abs(&(u - target.map(|z| z * phase)))
}

fn optimal_phase(u: &CMatrix, target: &CMatrix) -> Complex64 {
    // tr(T†U) without forming the product
    let trace: Complex64 = target.iter().zip(u.iter()).map(|(t, x)| t.conj() * x).sum();
    if trace.norm() > 0.0 {
        trace / trace.norm()
    } else {
        Complex64::new(1.0, 0.0)
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exponential_of_pauli_x() {
        // e^{iθX} = cosθ Id + i sinθ X
        let x = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let u = expm_hermitian(&x, FRAC_PI_2).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 1.), c(0., 1.), c(0., 0.)]);
        assert!(max_abs(&(u - expected)) < 1e-14);
    }

    #[test]
    fn exponential_is_unitary_for_complex_hermitian() {
        let h = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.3, 0.), c(0.2, -0.7), c(0., 0.1),
                c(0.2, 0.7), c(-1.1, 0.), c(0.5, 0.5),
                c(0., -0.1), c(0.5, -0.5), c(0.9, 0.),
            ],
        );
        let u = expm_hermitian(&h, 1.7).unwrap();
        assert!(unitarity_error(&u) < 1e-13);
        // e^{iθH} e^{-iθH} = Id
        let back = expm_hermitian(&h, -1.7).unwrap();
        assert!(max_abs(&(u * back - CMatrix::identity(3, 3))) < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert!(matches!(expm_hermitian(&h, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn distance_ignores_global_phase() {
        let u = CMatrix::from_row_slice(2, 2, &[c(0., 1.), c(0., 0.), c(0., 0.), c(1., 0.)]);
        let t = u.map(|z| z * Complex64::from_polar(1.0, 2.2));
        assert!(phase_invariant_distance(&u, &t) < 1e-14);
        assert!(phase_invariant_max_diff(&u, &t) < 1e-14);
        let id = CMatrix::identity(2, 2);
        assert!(phase_invariant_distance(&u, &id) > 0.5);
    }
}
