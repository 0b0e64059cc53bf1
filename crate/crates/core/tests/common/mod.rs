//! Dense reference model built directly from ladder-operator action on Fock
//! states, independent of the block layout used by the library.

#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use pbgsim::dos::DiscretizedReservoir;
use pbgsim::dynamics::SystemParams;
use pbgsim::statespace::{Atom, BasisState, ExcitationBasis};

/// Occupation numbers: atom (0/1), defect, then one entry per reservoir mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fock {
    pub atom: u32,
    pub defect: u32,
    pub modes: Vec<u32>,
}

impl Fock {
    pub fn total(&self) -> u32 {
        self.atom + self.defect + self.modes.iter().sum::<u32>()
    }

    pub fn to_basis_state(&self) -> BasisState {
        let atom = if self.atom == 1 { Atom::Excited } else { Atom::Ground };
        let mut s = BasisState::new(atom, self.defect);
        for (j, &n) in self.modes.iter().enumerate() {
            for _ in 0..n {
                s = s.with_photon(j + 1);
            }
        }
        s
    }
}

fn mode_configurations(n_modes: usize, photons: u32) -> Vec<Vec<u32>> {
    if n_modes == 0 {
        return if photons == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=photons {
        for mut rest in mode_configurations(n_modes - 1, photons - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every Fock state with exactly `p` excitations.
pub fn enumerate(p: u32, n_modes: usize, has_defect: bool) -> Vec<Fock> {
    let mut out = Vec::new();
    for atom in 0..=1u32.min(p) {
        let max_defect = if has_defect { p - atom } else { 0 };
        for defect in 0..=max_defect {
            for modes in mode_configurations(n_modes, p - atom - defect) {
                out.push(Fock { atom, defect, modes });
            }
        }
    }
    out
}

pub struct DenseModel {
    pub states: Vec<Fock>,
    pub h: DMatrix<f64>,
}

impl DenseModel {
    pub fn new(p: u32, params: &SystemParams, res: &DiscretizedReservoir, has_defect: bool) -> Self {
        let states = enumerate(p, res.n_modes, has_defect);
        let index: HashMap<Fock, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let dim = states.len();
        let mut h = DMatrix::zeros(dim, dim);
        let detunings = res.detunings();
        for (col, s) in states.iter().enumerate() {
            let mut diag = s.defect as f64 * params.delta_d;
            if s.atom == 1 {
                diag += params.delta_o - res.vacuum_shift;
            }
            for (j, &n) in s.modes.iter().enumerate() {
                diag += n as f64 * detunings[j];
            }
            h[(col, col)] += diag;

            // sigma_- a^dagger and sigma_+ a, for the defect and each mode
            if s.atom == 1 {
                if has_defect {
                    let mut t = s.clone();
                    t.atom = 0;
                    t.defect += 1;
                    h[(index[&t], col)] += params.g_d * (t.defect as f64).sqrt();
                }
                for j in 0..s.modes.len() {
                    let mut t = s.clone();
                    t.atom = 0;
                    t.modes[j] += 1;
                    h[(index[&t], col)] += res.couplings[j] * (t.modes[j] as f64).sqrt();
                }
            } else {
                if s.defect > 0 {
                    let mut t = s.clone();
                    t.atom = 1;
                    t.defect -= 1;
                    h[(index[&t], col)] += params.g_d * (s.defect as f64).sqrt();
                }
                for j in 0..s.modes.len() {
                    if s.modes[j] > 0 {
                        let mut t = s.clone();
                        t.atom = 1;
                        t.modes[j] -= 1;
                        h[(index[&t], col)] += res.couplings[j] * (s.modes[j] as f64).sqrt();
                    }
                }
            }
        }
        Self { states, h }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Permutation taking dense positions to library basis positions.
    pub fn library_positions(&self, basis: &ExcitationBasis) -> Vec<usize> {
        self.states
            .iter()
            .map(|s| basis.index_of(&s.to_basis_state()).expect("state missing from library basis"))
            .collect()
    }

    /// `-i H psi` with `psi` given in library order.
    pub fn derivative(&self, basis: &ExcitationBasis, psi: &[Complex64]) -> Vec<Complex64> {
        let pos = self.library_positions(basis);
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for r in 0..self.dim() {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..self.dim() {
                acc += psi[pos[c]] * self.h[(r, c)];
            }
            out[pos[r]] = Complex64::new(0.0, -1.0) * acc;
        }
        out
    }

    pub fn propagator(&self) -> ExactPropagator {
        let eig = SymmetricEigen::new(self.h.clone());
        ExactPropagator {
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }
}

/// `e^(-i H t)` through the eigendecomposition of the real symmetric `H`.
pub struct ExactPropagator {
    pub energies: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl ExactPropagator {
    /// State at time `t`, in dense order.
    pub fn evolve(&self, psi0: &[Complex64], t: f64) -> Vec<Complex64> {
        let n = psi0.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let acc: Complex64 = psi0.iter().enumerate().map(|(i, x)| x * self.vectors[(i, k)]).sum();
            *c = acc * Complex64::from_polar(1.0, -self.energies[k] * t);
        }
        (0..n)
            .map(|i| (0..n).map(|k| coeffs[k] * self.vectors[(i, k)]).sum())
            .collect()
    }
}

/// Sup-norm distance between library-ordered `psi` and dense-ordered `dense`.
pub fn sup_distance(pos: &[usize], psi: &[Complex64], dense: &[Complex64]) -> f64 {
    pos.iter()
        .zip(dense)
        .map(|(&p, d)| (psi[p] - d).norm())
        .fold(0.0, f64::max)
}

pub fn to_dense_order(pos: &[usize], psi: &[Complex64]) -> Vec<Complex64> {
    pos.iter().map(|&p| psi[p]).collect()
}
