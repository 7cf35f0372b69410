//! Beam-splitter sequences that reproduce the tabulated two-qubit gate.

use std::f64::consts::PI;

use anyon_core::encoded::c_phi_reference;
use anyon_core::linalg::max_abs;
use anyon_core::optics::sector_unitary;
use anyon_core::{Circuit, Engine, OpticalElement};

// found by `anyon decompose --phi pi --max-len 5`
const SEQUENCE: [(usize, usize, f64); 5] = [
    (3, 4, 7.0 * PI / 4.0),
    (2, 3, 3.0 * PI / 2.0),
    (2, 4, 3.0 * PI / 4.0),
    (2, 3, PI / 2.0),
    (3, 4, 5.0 * PI / 4.0),
];

fn sequence_unitary(phi: f64) -> anyon_core::linalg::CMatrix {
    let elements = SEQUENCE.iter().map(|&(i, j, t)| OpticalElement::beam_splitter(i, j, t));
    sector_unitary(&Circuit::from_elements(4, phi, elements).unwrap(), 2, Engine::Exact).unwrap()
}

#[test]
fn five_beam_splitters_give_c_pi() {
    let gap = max_abs(&(sequence_unitary(PI) - c_phi_reference(PI).two_particle_matrix));
    assert!(gap < 1e-12, "{gap:e}");
}

#[test]
fn the_same_angles_miss_c_phi_elsewhere() {
    // the table's φ dependence is not carried by this fixed-angle sequence
    for phi in [0.0, PI / 2.0] {
        let gap = max_abs(&(sequence_unitary(phi) - c_phi_reference(phi).two_particle_matrix));
        assert!(gap > 0.5, "φ = {phi}: {gap:e}");
    }
}
