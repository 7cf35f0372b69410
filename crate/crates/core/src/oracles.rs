//! Ground-truth simulators at the two classical endpoints of the anyon model.
//!
//! At `φ = 0` the particles are free fermions: a circuit is fully described by
//! its `m×m` single-particle matrix and many-particle amplitudes are minors of
//! it. At `φ = π` they are hard-core bosons, i.e. a qubit chain evolving under
//! `(Id + Z_i)/2` and `(X_i X_j + Y_i Y_j)/2`.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fock::{FockVector, OccupationState};
use crate::linalg::{expm_hermitian, CMatrix, CVector};
use crate::optics::{Circuit, OpticalElement};

/// Largest register handled by [`hardcore_boson_evolve`].
pub const MAX_CHAIN_MODES: usize = 10;

/// `m×m` unitary acting on single-particle amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParticleUnitary(pub CMatrix);

impl SingleParticleUnitary {
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

/// Product of the element matrices in application order.
pub fn single_particle_matrix(c: &Circuit) -> SingleParticleUnitary {
    let m = c.modes();
    let mut u = CMatrix::identity(m, m);
    for e in c.elements() {
        let mut step = CMatrix::identity(m, m);
        match *e {
            OpticalElement::PhaseShifter { mode, theta } => {
                step[(mode - 1, mode - 1)] = Complex64::from_polar(1.0, theta);
            }
            OpticalElement::BeamSplitter { i, j, theta } => {
                let (s, co) = theta.sin_cos();
                let (a, b) = (i - 1, j - 1);
                step[(a, a)] = Complex64::new(co, 0.0);
                step[(b, b)] = Complex64::new(co, 0.0);
                step[(a, b)] = Complex64::new(0.0, s);
                step[(b, a)] = Complex64::new(0.0, s);
            }
        }
        u = step * u;
    }
    SingleParticleUnitary(u)
}

/// `⟨y|U|x⟩` for free fermions: the minor of `U` with rows at the occupied
/// modes of `y` and columns at those of `x`, both ascending.
pub fn free_fermion_amplitude(
    u: &SingleParticleUnitary,
    x: &OccupationState,
    y: &OccupationState,
) -> Result<Complex64> {
    let m = u.0.nrows();
    if x.modes() != m || y.modes() != m {
        return invalid(format!("occupations must have {m} modes"));
    }
    if x.particles() != y.particles() {
        return invalid(format!(
            "particle numbers differ: {} in, {} out",
            x.particles(),
            y.particles()
        ));
    }
    let cols = x.occupied_modes();
    let rows = y.occupied_modes();
    let n = cols.len();
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let minor = CMatrix::from_fn(n, n, |r, c| u.0[(rows[r] - 1, cols[c] - 1)]);
    Ok(minor.determinant())
}

/// Chain index of an occupation. Occupied modes are `Z = +1` qubits
/// (computational 0); qubit 1 is the most significant bit.
pub fn chain_index(s: &OccupationState) -> usize {
    let m = s.modes();
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    (!s.mask() & full) as usize
}

/// Dense chain statevector of a Fock vector.
pub fn to_chain_state(v: &FockVector) -> Result<CVector> {
    check_chain_size(v.modes())?;
    let mut out = CVector::zeros(1 << v.modes());
    for (s, a) in v.iter() {
        out[chain_index(&s)] = a;
    }
    Ok(out)
}

/// Inverse of [`to_chain_state`].
pub fn from_chain_state(modes: usize, v: &CVector) -> Result<FockVector> {
    check_chain_size(modes)?;
    if v.len() != 1 << modes {
        return invalid(format!("chain state has length {}, expected {}", v.len(), 1usize << modes));
    }
    let full = (1u64 << modes) - 1;
    FockVector::from_amplitudes(
        modes,
        v.iter().enumerate().map(|(k, a)| (OccupationState::from_mask(modes, !(k as u64) & full), *a)),
    )
}

fn check_chain_size(m: usize) -> Result<()> {
    if m > MAX_CHAIN_MODES {
        return Err(Error::ResourceLimit { what: "qubit-chain oracle", limit: MAX_CHAIN_MODES, got: m });
    }
    Ok(())
}

fn pauli(kind: char) -> CMatrix {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries = match kind {
        'X' => [o, one, one, o],
        'Y' => [o, -i, i, o],
        'Z' => [one, o, o, -one],
        _ => [one, o, o, one],
    };
    CMatrix::from_row_slice(2, 2, &entries)
}

/// Tensor product with `ops[k]` on qubit `k + 1`.
fn chain_operator(m: usize, ops: &[(usize, char)]) -> CMatrix {
    (1..=m).fold(CMatrix::identity(1, 1), |acc, q| {
        let kind = ops.iter().find(|(site, _)| *site == q).map_or('I', |&(_, k)| k);
        acc.kronecker(&pauli(kind))
    })
}

/// Element Hamiltonian on the qubit chain.
pub fn chain_hamiltonian(m: usize, e: &OpticalElement) -> CMatrix {
    let dim = 1 << m;
    match *e {
        OpticalElement::PhaseShifter { mode, .. } => {
            (CMatrix::identity(dim, dim) + chain_operator(m, &[(mode, 'Z')])).scale(0.5)
        }
        OpticalElement::BeamSplitter { i, j, .. } => {
            (chain_operator(m, &[(i, 'X'), (j, 'X')]) + chain_operator(m, &[(i, 'Y'), (j, 'Y')]))
                .scale(0.5)
        }
    }
}

/// Full `2^m × 2^m` chain unitary of `c`.
pub fn hardcore_boson_unitary(c: &Circuit) -> Result<CMatrix> {
    let m = c.modes();
    check_chain_size(m)?;
    let dim = 1 << m;
    c.elements().iter().try_fold(CMatrix::identity(dim, dim), |acc, e| {
        Ok(expm_hermitian(&chain_hamiltonian(m, e), e.theta())? * acc)
    })
}

/// Evolves a chain statevector through `c` by dense exponentiation.
pub fn hardcore_boson_evolve(c: &Circuit, v: &CVector) -> Result<CVector> {
    let m = c.modes();
    check_chain_size(m)?;
    if v.len() != 1 << m {
        return invalid(format!("chain state has length {}, expected {}", v.len(), 1usize << m));
    }
    c.elements().iter().try_fold(v.clone(), |state, e| {
        Ok(expm_hermitian(&chain_hamiltonian(m, e), e.theta())? * state)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, unitarity_error};
    use crate::optics::{run_circuit, Engine};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn st(s: &str) -> OccupationState {
        s.parse().unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_particle_examples() {
        let empty = Circuit::new(3, 0.0).unwrap();
        assert_eq!(single_particle_matrix(&empty).0, CMatrix::identity(3, 3));

        let bs = Circuit::from_elements(2, 0.0, [OpticalElement::beam_splitter(1, 2, FRAC_PI_2)]).unwrap();
        let u = single_particle_matrix(&bs).0;
        let want = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 1.), c(0., 1.), c(0., 0.)]);
        assert!(max_abs(&(u - want)) < 1e-15);
    }

    #[test]
    fn composition_order_matches_one_particle_simulation() {
        let circ = Circuit::from_elements(
            3,
            0.0,
            [OpticalElement::phase_shifter(1, 0.7), OpticalElement::beam_splitter(1, 3, 0.4), OpticalElement::beam_splitter(2, 3, 1.2)],
        )
        .unwrap();
        let u = single_particle_matrix(&circ);
        assert!(unitarity_error(&u.0) < 1e-14);
        for x in ["100", "010", "001"] {
            let out = run_circuit(&circ, &st(x), Engine::Analytic).unwrap();
            for y in ["100", "010", "001"] {
                let amp = free_fermion_amplitude(&u, &st(x), &st(y)).unwrap();
                assert!((amp - out.amplitude(&st(y))).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn two_particle_diagonal_element_is_one() {
        let circ = Circuit::from_elements(2, 0.0, [OpticalElement::beam_splitter(1, 2, 0.83)]).unwrap();
        let u = single_particle_matrix(&circ);
        let amp = free_fermion_amplitude(&u, &st("11"), &st("11")).unwrap();
        assert!((amp - c(1., 0.)).norm() < 1e-15);
    }

    #[test]
    fn amplitude_argument_checks() {
        let u = single_particle_matrix(&Circuit::new(3, 0.0).unwrap());
        assert!(free_fermion_amplitude(&u, &st("110"), &st("100")).is_err());
        assert!(free_fermion_amplitude(&u, &st("11"), &st("11")).is_err());
        assert_eq!(free_fermion_amplitude(&u, &st("000"), &st("000")).unwrap(), c(1., 0.));
    }

    #[test]
    fn chain_elements() {
        let theta = 0.61;
        let ps = Circuit::from_elements(2, PI, [OpticalElement::phase_shifter(1, theta)]).unwrap();
        let v = to_chain_state(&FockVector::basis(st("10"))).unwrap();
        let out = from_chain_state(2, &hardcore_boson_evolve(&ps, &v).unwrap()).unwrap();
        assert!((out.amplitude(&st("10")) - Complex64::from_polar(1., theta)).norm() < 1e-14);

        let bs = Circuit::from_elements(2, PI, [OpticalElement::beam_splitter(1, 2, theta)]).unwrap();
        let out = from_chain_state(2, &hardcore_boson_evolve(&bs, &v).unwrap()).unwrap();
        assert!((out.amplitude(&st("10")) - c(theta.cos(), 0.)).norm() < 1e-14);
        assert!((out.amplitude(&st("01")) - c(0., theta.sin())).norm() < 1e-14);
    }

    #[test]
    fn chain_matches_fock_engine_at_pi() {
        let circ = Circuit::from_elements(
            4,
            PI,
            [
                OpticalElement::beam_splitter(1, 3, 0.9),
                OpticalElement::phase_shifter(2, -0.4),
                OpticalElement::beam_splitter(1, 4, 1.7),
                OpticalElement::beam_splitter(2, 3, 0.2),
            ],
        )
        .unwrap();
        for s in crate::fock::enumerate_basis(4, 2).unwrap() {
            let fock = run_circuit(&circ, &s, Engine::Analytic).unwrap();
            let chain = hardcore_boson_evolve(&circ, &to_chain_state(&FockVector::basis(s)).unwrap()).unwrap();
            let chain = from_chain_state(4, &chain).unwrap();
            assert!(fock.max_abs_diff(&chain) < 1e-12, "{s}");
        }
    }

    #[test]
    fn chain_unitary_matches_stepwise_evolution() {
        let circ = Circuit::from_elements(
            3,
            PI,
            [OpticalElement::beam_splitter(1, 3, 0.5), OpticalElement::phase_shifter(3, 1.1)],
        )
        .unwrap();
        let u = hardcore_boson_unitary(&circ).unwrap();
        assert!(unitarity_error(&u) < 1e-13);
        let v = to_chain_state(&FockVector::basis(st("100"))).unwrap();
        let stepwise = hardcore_boson_evolve(&circ, &v).unwrap();
        assert!(max_abs(&(u * v - stepwise)) < 1e-14);
    }

    #[test]
    fn chain_resource_limit() {
        let circ = Circuit::new(11, PI).unwrap();
        let err = hardcore_boson_evolve(&circ, &CVector::zeros(2)).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { limit: 10, got: 11, .. }));
    }

    #[test]
    fn chain_index_round_trip() {
        let v = FockVector::from_amplitudes(3, [(st("101"), c(0.6, 0.)), (st("011"), c(0., 0.8))]).unwrap();
        let chain = to_chain_state(&v).unwrap();
        assert_eq!(chain[0b010], c(0.6, 0.));
        assert_eq!(from_chain_state(3, &chain).unwrap(), v);
    }
}
