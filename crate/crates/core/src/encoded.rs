//! Dual-rail encoded qubits on anyonic modes.
//!
//! Qubit `q` (1-based) lives in modes `(2q-1, 2q)` with `|0_L⟩ = |1,0⟩` and
//! `|1_L⟩ = |0,1⟩`. Logical amplitudes are indexed with qubit 1 as the most
//! significant bit.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fock::{enumerate_basis, FockVector, OccupationState};
use crate::linalg::CMatrix;
use crate::optics::{Circuit, OpticalElement};

/// Indices of `|1010⟩, |1001⟩, |0110⟩, |0101⟩` in the 4-mode two-particle basis.
pub const CODE_INDICES: [usize; 4] = [1, 2, 3, 4];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `R_n̂(θ) = cos(θ/2) Id - i sin(θ/2) n̂·σ`.
pub fn rotation(axis: [f64; 3], theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    let [x, y, z] = axis;
    // n·σ = [[z, x - iy], [x + iy, -z]]
    CMatrix::from_row_slice(
        2,
        2,
        &[
            c(co, -s * z),
            c(0.0, -s) * c(x, -y),
            c(0.0, -s) * c(x, y),
            c(co, s * z),
        ],
    )
}

pub fn rz(theta: f64) -> CMatrix {
    rotation([0.0, 0.0, 1.0], theta)
}

pub fn rx(theta: f64) -> CMatrix {
    rotation([1.0, 0.0, 0.0], theta)
}

/// `n` qubits on `2n` modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogicalLayout {
    n_qubits: usize,
}

impl LogicalLayout {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || 2 * n_qubits > crate::fock::MAX_MODES {
            return invalid(format!("unsupported qubit count {n_qubits}"));
        }
        Ok(Self { n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn modes(&self) -> usize {
        2 * self.n_qubits
    }

    /// Modes `(2q-1, 2q)` carrying qubit `q`.
    pub fn pair(&self, q: usize) -> Result<(usize, usize)> {
        if q == 0 || q > self.n_qubits {
            return invalid(format!("qubit {q} out of range 1..={}", self.n_qubits));
        }
        Ok((2 * q - 1, 2 * q))
    }
}

/// Dual-rail image of a logical bitstring.
pub fn encode_logical(bits: &[u8]) -> Result<OccupationState> {
    let mut occ = Vec::with_capacity(2 * bits.len());
    for (k, &b) in bits.iter().enumerate() {
        match b {
            0 => occ.extend([1, 0]),
            1 => occ.extend([0, 1]),
            _ => return invalid(format!("logical bit {} is {b}; must be 0 or 1", k + 1)),
        }
    }
    OccupationState::new(&occ)
}

/// Parses `"0110"`-style logical labels and encodes them.
pub fn encode_logical_str(label: &str) -> Result<OccupationState> {
    let bits = label
        .chars()
        .map(|ch| match ch {
            '0' => Ok(0),
            '1' => Ok(1),
            other => invalid(format!("unexpected character {other:?} in logical label {label:?}")),
        })
        .collect::<Result<Vec<u8>>>()?;
    encode_logical(&bits)
}

/// Logical amplitudes recovered from a Fock vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedState {
    pub amplitudes: Vec<Complex64>,
    /// Squared norm of the part of the vector outside the code space.
    pub leakage: f64,
}

/// Projects `v` onto the code space of `layout`.
pub fn decode_logical(v: &FockVector, layout: &LogicalLayout) -> Result<DecodedState> {
    if v.modes() != layout.modes() {
        return invalid(format!(
            "vector has {} modes but the layout needs {}",
            v.modes(),
            layout.modes()
        ));
    }
    let n = layout.n_qubits();
    let mut amplitudes = vec![Complex64::default(); 1 << n];
    let mut leakage = 0.0;
    for (s, a) in v.iter() {
        let mut index = 0usize;
        let mut in_code = true;
        for q in 1..=n {
            match (s.occupied(2 * q - 1), s.occupied(2 * q)) {
                (true, false) => index <<= 1,
                (false, true) => index = (index << 1) | 1,
                _ => {
                    in_code = false;
                    break;
                }
            }
        }
        if in_code {
            amplitudes[index] += a;
        } else {
            leakage += a.norm_sqr();
        }
    }
    Ok(DecodedState { amplitudes, leakage })
}

/// `e^{iα} R_ẑ(β) R_x̂(γ) R_ẑ(δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitSpec {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl SingleQubitSpec {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self { alpha, beta, gamma, delta }
    }

    pub fn matrix(&self) -> CMatrix {
        (rz(self.beta) * rx(self.gamma) * rz(self.delta)).map(|z| z * Complex64::from_polar(1.0, self.alpha))
    }

    /// ZXZ Euler angles of a 2×2 unitary.
    pub fn from_unitary(u: &CMatrix) -> Result<Self> {
        if u.shape() != (2, 2) {
            return invalid(format!("single-qubit gate must be 2x2, got {:?}", u.shape()));
        }
        let err = crate::linalg::unitarity_error(u);
        if err > 1e-10 {
            return Err(Error::Precondition(format!("gate is not unitary (error {err:e})")));
        }
        let alpha = u.determinant().arg() / 2.0;
        let v = u.map(|z| z * Complex64::from_polar(1.0, -alpha));
        let gamma = 2.0 * v[(1, 0)].norm().atan2(v[(0, 0)].norm());
        let sum = if v[(1, 1)].norm() > 1e-14 { 2.0 * v[(1, 1)].arg() } else { 0.0 };
        let diff = if v[(1, 0)].norm() > 1e-14 {
            2.0 * (c(0.0, 1.0) * v[(1, 0)]).arg()
        } else {
            0.0
        };
        Ok(Self::new(alpha, (sum + diff) / 2.0, gamma, (sum - diff) / 2.0))
    }
}

/// PS/BS elements whose encoded action is `R_ẑ(β) R_x̂(γ) R_ẑ(δ)` up to a
/// global phase. Zero angles emit no element.
///
/// On a pair, `PS_{2q}(θ)` acts as `diag(1, e^{iθ}) = e^{iθ/2} R_ẑ(θ)` and
/// `BS_{2q-1,2q}(θ)` as `[[cosθ, i sinθ], [i sinθ, cosθ]] = R_x̂(-2θ)`.
pub fn compile_rotations(
    spec: &SingleQubitSpec,
    qubit: usize,
    layout: &LogicalLayout,
    phi: f64,
) -> Result<Circuit> {
    let (lo, hi) = layout.pair(qubit)?;
    let mut circuit = Circuit::new(layout.modes(), phi)?;
    // application order is right to left in the product
    if spec.delta != 0.0 {
        circuit.push(OpticalElement::phase_shifter(hi, spec.delta))?;
    }
    if spec.gamma != 0.0 {
        circuit.push(OpticalElement::beam_splitter(lo, hi, -spec.gamma / 2.0))?;
    }
    if spec.beta != 0.0 {
        circuit.push(OpticalElement::phase_shifter(hi, spec.beta))?;
    }
    Ok(circuit)
}

/// Like [`compile_rotations`], followed by a pair-uniform phase so that the
/// encoded action equals `e^{iα} R_ẑ(β) R_x̂(γ) R_ẑ(δ)` exactly.
pub fn compile_single_qubit(
    spec: &SingleQubitSpec,
    qubit: usize,
    layout: &LogicalLayout,
    phi: f64,
) -> Result<Circuit> {
    let mut circuit = compile_rotations(spec, qubit, layout, phi)?;
    let (lo, hi) = layout.pair(qubit)?;
    let correction = spec.alpha - (spec.beta + spec.delta) / 2.0;
    if correction != 0.0 {
        circuit.push(OpticalElement::phase_shifter(lo, correction))?;
        circuit.push(OpticalElement::phase_shifter(hi, correction))?;
    }
    Ok(circuit)
}

/// The encoded two-qubit gate `C(φ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CPhiGate {
    pub phi: f64,
    /// 6×6 on `|1100⟩, |1010⟩, |1001⟩, |0110⟩, |0101⟩, |0011⟩`.
    pub two_particle_matrix: CMatrix,
    /// 4×4 on `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub encoded_matrix: CMatrix,
    /// Rotation axis `n̂ = (-sin φ, 0, cos φ)`.
    pub axis: [f64; 3],
}

/// The tabulated two-particle matrix of `C(φ)` and its encoded restriction.
pub fn c_phi_reference(phi: f64) -> CPhiGate {
    let (s, co) = phi.sin_cos();
    let r = FRAC_1_SQRT_2;
    let mut m = CMatrix::identity(6, 6);
    m[(1, 1)] = Complex64::from_polar(1.0, -FRAC_PI_4);
    m[(2, 2)] = c(r, -r * co);
    m[(2, 4)] = c(0.0, r * s);
    m[(3, 3)] = Complex64::from_polar(1.0, FRAC_PI_4);
    m[(4, 2)] = c(0.0, r * s);
    m[(4, 4)] = c(r, r * co);
    let encoded_matrix = restrict_to_code_space(&m);
    CPhiGate { phi, two_particle_matrix: m, encoded_matrix, axis: [-s, 0.0, co] }
}

/// `R_ẑ(π/2) ⊗ |0⟩⟨0| + R_n̂(π/2) ⊗ |1⟩⟨1|` with `n̂ = (-sin φ, 0, cos φ)`;
/// the rotation acts on qubit 1 and the projector on qubit 2.
pub fn controlled_rotation_form(phi: f64) -> CMatrix {
    let p0 = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
    let p1 = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
    let axis = [-phi.sin(), 0.0, phi.cos()];
    rz(FRAC_PI_2).kronecker(&p0) + rotation(axis, FRAC_PI_2).kronecker(&p1)
}

/// Rows and columns of a 4-mode two-particle matrix on the code states.
pub fn restrict_to_code_space(m: &CMatrix) -> CMatrix {
    CMatrix::from_fn(4, 4, |r, col| m[(CODE_INDICES[r], CODE_INDICES[col])])
}

/// Applies a two-particle 6×6 matrix to the 4-mode window starting at
/// `first_mode`, leaving the other modes untouched.
///
/// Window operators only involve occupations inside the window, so the
/// matrix is the same whatever the outside modes hold.
pub fn apply_window_unitary(v: &FockVector, first_mode: usize, u: &CMatrix) -> Result<FockVector> {
    if u.shape() != (6, 6) {
        return invalid(format!("window matrix must be 6x6, got {:?}", u.shape()));
    }
    if first_mode == 0 || first_mode + 3 > v.modes() {
        return invalid(format!("window at mode {first_mode} does not fit in {} modes", v.modes()));
    }
    let window = enumerate_basis(4, 2)?;
    let modes: Vec<usize> = (first_mode..first_mode + 4).collect();
    let mut out = FockVector::zero(v.modes());
    for (s, a) in v.iter() {
        let local: Vec<u8> = modes.iter().map(|&i| u8::from(s.occupied(i))).collect();
        let local = OccupationState::new(&local)?;
        let col = window.iter().position(|w| *w == local).ok_or_else(|| {
            Error::CodeSpace(format!(
                "state {s} holds {} particles in modes {}..={}; expected 2",
                local.particles(),
                first_mode,
                first_mode + 3
            ))
        })?;
        for (row, w) in window.iter().enumerate() {
            let coeff = u[(row, col)];
            if coeff.norm() == 0.0 {
                continue;
            }
            let target = modes
                .iter()
                .enumerate()
                .fold(s, |acc, (k, &mode)| acc.with(mode, w.occupied(k + 1)));
            out.add(target, a * coeff)?;
        }
    }
    out.prune();
    Ok(out)
}

/// Applies `gate` to encoded qubits `(first_qubit, first_qubit + 1)`.
pub fn apply_encoded_two_qubit(
    v: &FockVector,
    layout: &LogicalLayout,
    first_qubit: usize,
    gate: &CPhiGate,
) -> Result<FockVector> {
    if v.modes() != layout.modes() {
        return invalid(format!("vector has {} modes but the layout needs {}", v.modes(), layout.modes()));
    }
    layout.pair(first_qubit + 1)?;
    let (lo, _) = layout.pair(first_qubit)?;
    apply_window_unitary(v, lo, &gate.two_particle_matrix)
}
