//! Local invariants and entangling power of two-qubit gates.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{unitarity_error, CMatrix};

/// Unitarity tolerance accepted by [`TwoQubitUnitary::new`].
pub const UNITARY_TOL: f64 = 1e-10;

/// A 4×4 unitary in the computational basis `|00⟩, |01⟩, |10⟩, |11⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitUnitary(CMatrix);

impl TwoQubitUnitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.shape() != (4, 4) {
            return invalid(format!("two-qubit gate must be 4x4, got {:?}", matrix.shape()));
        }
        let err = unitarity_error(&matrix);
        if err > UNITARY_TOL {
            return Err(Error::Precondition(format!(
                "two-qubit gate is not unitary (max |U†U - Id| = {err:e})"
            )));
        }
        Ok(Self(matrix))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn identity() -> Self {
        Self(CMatrix::identity(4, 4))
    }

    pub fn cnot() -> Self {
        Self(real_matrix(&[
            1., 0., 0., 0., //
            0., 1., 0., 0., //
            0., 0., 0., 1., //
            0., 0., 1., 0.,
        ]))
    }

    pub fn swap() -> Self {
        Self(real_matrix(&[
            1., 0., 0., 0., //
            0., 0., 1., 0., //
            0., 1., 0., 0., //
            0., 0., 0., 1.,
        ]))
    }
}

fn real_matrix(rows: &[f64; 16]) -> CMatrix {
    CMatrix::from_row_slice(4, 4, &rows.map(|x| Complex64::new(x, 0.0)))
}

/// Columns are `(|00⟩+|11⟩)/√2`, `-i(|00⟩-|11⟩)/√2`, `(|01⟩-|10⟩)/√2`, `-i(|01⟩+|10⟩)/√2`.
pub fn magic_basis() -> CMatrix {
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let i = Complex64::new(0.0, FRAC_1_SQRT_2);
    let o = Complex64::new(0.0, 0.0);
    CMatrix::from_row_slice(
        4,
        4,
        &[
            r, -i, o, o, //
            o, o, r, -i, //
            o, o, -r, -i, //
            r, i, o, o,
        ],
    )
}

/// `Q† U Q` in the magic basis.
pub fn to_magic_basis(u: &TwoQubitUnitary) -> CMatrix {
    let q = magic_basis();
    q.adjoint() * u.matrix() * q
}

/// The two local invariants and the entangling power `1 - |G1|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalInvariants {
    pub g1: Complex64,
    pub g2: Complex64,
    pub ep: f64,
}

pub fn local_invariants(u: &TwoQubitUnitary) -> LocalInvariants {
    let ub = to_magic_basis(u);
    let m = ub.transpose() * &ub;
    let det = u.matrix().determinant();
    let tr = m.trace();
    let tr_sq = tr * tr;
    let g1 = tr_sq / (det * 16.0);
    let g2 = (tr_sq - (&m * &m).trace()) / (det * 4.0);
    // |G1| <= 1 up to rounding
    let ep = (1.0 - g1.norm()).clamp(0.0, 1.0);
    LocalInvariants { g1, g2, ep }
}

/// Closed form `1 - cos⁴(φ/2)` for the entangling power of `C(φ)`.
pub fn ep_formula(phi: f64) -> f64 {
    1.0 - (phi / 2.0).cos().powi(4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, max_abs};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `e^{iα} Rz(β) Ry(γ) Rz(δ)`, covering all of U(2).
    fn u2(a: f64, b: f64, g: f64, d: f64) -> CMatrix {
        let rz = |t: f64| {
            CMatrix::from_row_slice(2, 2, &[Complex64::from_polar(1., -t / 2.), c(0., 0.), c(0., 0.), Complex64::from_polar(1., t / 2.)])
        };
        let (s, co) = (g / 2.0).sin_cos();
        let ry = CMatrix::from_row_slice(2, 2, &[c(co, 0.), c(-s, 0.), c(s, 0.), c(co, 0.)]);
        (rz(b) * ry * rz(d)).map(|z| z * Complex64::from_polar(1., a))
    }

    #[test]
    fn magic_basis_is_unitary() {
        assert!(unitarity_error(&magic_basis()) < 1e-15);
    }

    #[test]
    fn identity_and_cnot() {
        let inv = local_invariants(&TwoQubitUnitary::identity());
        assert!((inv.g1 - c(1., 0.)).norm() < 1e-14);
        assert!((inv.g2 - c(3., 0.)).norm() < 1e-14);
        assert_eq!(inv.ep, 0.0);
        let inv = local_invariants(&TwoQubitUnitary::cnot());
        assert!(inv.g1.norm() < 1e-14);
        assert!((inv.ep - 1.0).abs() < 1e-14);
    }

    #[test]
    fn swap_has_unit_g1() {
        let ub = to_magic_basis(&TwoQubitUnitary::swap());
        // real orthogonal in the magic basis; the sign of G1 comes from det = -1
        assert!(max_abs(&(ub.transpose() * &ub - CMatrix::identity(4, 4))) < 1e-14);
        let inv = local_invariants(&TwoQubitUnitary::swap());
        assert!((inv.g1 - c(-1., 0.)).norm() < 1e-14);
        assert!(inv.ep < 1e-14);
    }

    #[test]
    fn local_gate_is_orthogonal_in_magic_basis() {
        let u = kron(&u2(0.3, 1.0, 2.0, -0.5), &u2(-1.2, 0.1, 0.7, 2.9));
        let ub = to_magic_basis(&TwoQubitUnitary::new(u).unwrap());
        let m = ub.transpose() * &ub;
        let scale = m[(0, 0)];
        assert!((scale.norm() - 1.0).abs() < 1e-13);
        assert!(max_abs(&(m - CMatrix::identity(4, 4).map(|z| z * scale))) < 1e-13);
    }

    #[test]
    fn rejects_non_unitary_and_wrong_shape() {
        assert!(matches!(
            TwoQubitUnitary::new(CMatrix::identity(4, 4).map(|z| z * 2.0)),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(TwoQubitUnitary::new(CMatrix::identity(2, 2)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn formula_values() {
        assert_eq!(ep_formula(0.0), 0.0);
        assert!((ep_formula(std::f64::consts::PI) - 1.0).abs() < 1e-15);
        assert!((ep_formula(std::f64::consts::FRAC_PI_2) - 0.75).abs() < 1e-15);
    }

    fn angles() -> impl Strategy<Value = [f64; 4]> {
        prop::array::uniform4(-4.0f64..4.0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn invariants_are_local_and_swap_invariant(
            a in angles(), b in angles(), cc in angles(), d in angles(), g in angles(),
        ) {
            // a generic gate: local layers around a canonical XX+YY+ZZ interaction
            let core = {
                let x = CMatrix::from_row_slice(2, 2, &[c(0.,0.), c(1.,0.), c(1.,0.), c(0.,0.)]);
                let y = CMatrix::from_row_slice(2, 2, &[c(0.,0.), c(0.,-1.), c(0.,1.), c(0.,0.)]);
                let z = CMatrix::from_row_slice(2, 2, &[c(1.,0.), c(0.,0.), c(0.,0.), c(-1.,0.)]);
                let h = kron(&x, &x).scale(g[0]) + kron(&y, &y).scale(g[1]) + kron(&z, &z).scale(g[2]);
                crate::linalg::expm_hermitian(&h, 1.0).unwrap()
            };
            let u = TwoQubitUnitary::new(core.clone()).unwrap();
            let dressed = kron(&u2(a[0], a[1], a[2], a[3]), &u2(b[0], b[1], b[2], b[3]))
                * core
                * kron(&u2(cc[0], cc[1], cc[2], cc[3]), &u2(d[0], d[1], d[2], d[3]));
            let dressed = TwoQubitUnitary::new(dressed).unwrap();
            let swap = TwoQubitUnitary::swap();
            let swapped = TwoQubitUnitary::new(swap.matrix() * u.matrix() * swap.matrix()).unwrap();

            let base = local_invariants(&u);
            for other in [local_invariants(&dressed), local_invariants(&swapped)] {
                prop_assert!((base.g1 - other.g1).norm() < 1e-10);
                prop_assert!((base.g2 - other.g2).norm() < 1e-10);
            }
            prop_assert!((0.0..=1.0).contains(&base.ep));
        }
    }
}
