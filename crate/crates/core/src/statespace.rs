//! Fixed-excitation sectors of atom ⊗ defect mode ⊗ N reservoir modes.
//!
//! Every basis state is labelled by the atomic level, the defect photon count
//! and the reservoir occupations. A sector with `p` excitations splits into
//! blocks by (atom, defect photons, reservoir photons):
//!
//! | block            | atom | defect | reservoir | p = 1  | p = 2  |
//! |------------------|------|--------|-----------|--------|--------|
//! | `excited_vacuum` | e    | p - 1  | 0         | `a0`   | `a0`   |
//! | `defect_full`    | g    | p      | 0         | defect | `b0`   |
//! | `ground_single`  | g    | p - 1  | 1_j       | `b_j`  | `b_j`  |
//! | `excited_single` | e    | p - 2  | 1_j       |        | `a_j`  |
//! | `ground_pair`    | g    | p - 2  | 1_j 1_k   |        | `b_jk` |
//!
//! Blocks that would need defect photons are absent without a defect mode.
//! Blocks are stored in the order of the table; pairs are stored once with
//! `j <= k`, row by row.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Atom {
    Ground,
    Excited,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisState {
    pub atom: Atom,
    pub defect_occupation: u32,
    /// Mode index (1-based) -> photon count. Zero counts are never stored.
    pub reservoir_occupation: BTreeMap<usize, u32>,
}

impl BasisState {
    pub fn new(atom: Atom, defect_occupation: u32) -> Self {
        Self {
            atom,
            defect_occupation,
            reservoir_occupation: BTreeMap::new(),
        }
    }

    /// Add one photon to reservoir mode `j` (1-based).
    pub fn with_photon(mut self, j: usize) -> Self {
        *self.reservoir_occupation.entry(j).or_insert(0) += 1;
        self
    }

    pub fn reservoir_photons(&self) -> u32 {
        self.reservoir_occupation.values().sum()
    }

    pub fn excitations(&self) -> u32 {
        u32::from(self.atom == Atom::Excited) + self.defect_occupation + self.reservoir_photons()
    }

    /// Mode indices with one entry per photon, ascending.
    fn photon_modes(&self) -> Vec<usize> {
        self.reservoir_occupation
            .iter()
            .flat_map(|(&j, &n)| std::iter::repeat_n(j, n as usize))
            .collect()
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atom = match self.atom {
            Atom::Ground => "g",
            Atom::Excited => "e",
        };
        write!(f, "|{atom},{}_d", self.defect_occupation)?;
        if self.reservoir_occupation.is_empty() {
            f.write_str(",0")?;
        }
        for (j, n) in &self.reservoir_occupation {
            write!(f, ",{n}_{j}")?;
        }
        f.write_str(">")
    }
}

/// Start offsets of the blocks present in a sector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub excited_vacuum: Option<usize>,
    pub defect_full: Option<usize>,
    pub ground_single: Option<usize>,
    pub excited_single: Option<usize>,
    pub ground_pair: Option<usize>,
    pub size: usize,
}

impl Layout {
    fn new(p: usize, n: usize, has_defect: bool) -> Self {
        let mut layout = Layout::default();
        let mut next = 0;
        let mut take = |len: usize| {
            let start = next;
            next += len;
            Some(start)
        };
        match (p, has_defect) {
            (1, false) => {
                layout.excited_vacuum = take(1);
                layout.ground_single = take(n);
            }
            (1, true) => {
                layout.excited_vacuum = take(1);
                layout.defect_full = take(1);
                layout.ground_single = take(n);
            }
            (2, false) => {
                layout.excited_single = take(n);
                layout.ground_pair = take(pair_count(n));
            }
            (2, true) => {
                layout.excited_vacuum = take(1);
                layout.defect_full = take(1);
                layout.ground_single = take(n);
                layout.excited_single = take(n);
                layout.ground_pair = take(pair_count(n));
            }
            _ => unreachable!("sector validated by the caller"),
        }
        layout.size = next;
        layout
    }
}

/// Number of unordered pairs `j <= k` among `n` modes.
pub fn pair_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Position of the unordered pair `(j, k)`, `j <= k`, 0-based, within the pair block.
#[inline]
pub fn pair_offset(n: usize, j: usize, k: usize) -> usize {
    debug_assert!(j <= k && k < n);
    // rows 0..j hold n, n-1, ..., n-j+1 entries
    j * n - j * j.saturating_sub(1) / 2 + (k - j)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcitationBasis {
    pub p: usize,
    pub n_modes: usize,
    pub has_defect: bool,
    pub layout: Layout,
    pub states: Vec<BasisState>,
}

pub fn build_basis(p: usize, n_modes: usize, has_defect: bool) -> Result<ExcitationBasis> {
    if p == 0 || p > 2 {
        return Err(Error::UnsupportedSector(p));
    }
    let layout = Layout::new(p, n_modes, has_defect);
    if layout.size == 0 {
        return Err(Error::Domain(format!(
            "the p = {p} sector without a defect mode needs at least one reservoir mode"
        )));
    }
    let p32 = p as u32;
    let mut states = Vec::with_capacity(layout.size);
    if layout.excited_vacuum.is_some() {
        states.push(BasisState::new(Atom::Excited, p32 - 1));
    }
    if layout.defect_full.is_some() {
        states.push(BasisState::new(Atom::Ground, p32));
    }
    if layout.ground_single.is_some() {
        states.extend((1..=n_modes).map(|j| BasisState::new(Atom::Ground, p32 - 1).with_photon(j)));
    }
    if layout.excited_single.is_some() {
        states.extend((1..=n_modes).map(|j| BasisState::new(Atom::Excited, p32 - 2).with_photon(j)));
    }
    if layout.ground_pair.is_some() {
        for j in 1..=n_modes {
            for k in j..=n_modes {
                states.push(BasisState::new(Atom::Ground, p32 - 2).with_photon(j).with_photon(k));
            }
        }
    }
    debug_assert_eq!(states.len(), layout.size);
    Ok(ExcitationBasis {
        p,
        n_modes,
        has_defect,
        layout,
        states,
    })
}

impl ExcitationBasis {
    pub fn len(&self) -> usize {
        self.layout.size
    }

    pub fn is_empty(&self) -> bool {
        self.layout.size == 0
    }

    pub fn state_of(&self, i: usize) -> Result<&BasisState> {
        self.states
            .get(i)
            .ok_or_else(|| Error::Lookup(format!("index {i} outside a basis of size {}", self.len())))
    }

    pub fn index_of(&self, s: &BasisState) -> Result<usize> {
        let missing = || Error::Lookup(format!("{s} is not in the p = {} sector", self.p));
        if s.excitations() as usize != self.p {
            return Err(missing());
        }
        if s.reservoir_occupation.keys().any(|&j| j == 0 || j > self.n_modes) {
            return Err(Error::Lookup(format!(
                "{s} references a mode outside 1..={}",
                self.n_modes
            )));
        }
        let modes = s.photon_modes();
        let block = match (s.atom, modes.len()) {
            (Atom::Excited, 0) => self.layout.excited_vacuum,
            (Atom::Ground, 0) => self.layout.defect_full,
            (Atom::Ground, 1) => self.layout.ground_single.map(|o| o + modes[0] - 1),
            (Atom::Excited, 1) => self.layout.excited_single.map(|o| o + modes[0] - 1),
            (Atom::Ground, 2) => self
                .layout
                .ground_pair
                .map(|o| o + pair_offset(self.n_modes, modes[0] - 1, modes[1] - 1)),
            _ => None,
        };
        block.ok_or_else(missing)
    }

    /// Index of the pair state with photons in modes `j` and `k` (1-based, any order).
    pub fn pair_index(&self, j: usize, k: usize) -> Result<usize> {
        self.index_of(&BasisState::new(Atom::Ground, self.p as u32 - 2).with_photon(j).with_photon(k))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            amplitudes: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm_sq().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        self.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(self)
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.amplitudes[i]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    /// Excited atom, every field mode empty (`|e,0>`).
    AtomExcited,
    /// Excited atom with one photon in the defect mode (`|e,1_d,0>`).
    AtomExcitedDefectLoaded,
    Custom(Vec<(BasisState, Complex64)>),
}

pub fn initial_state(basis: &ExcitationBasis, which: &InitialCondition) -> Result<StateVector> {
    let mut psi = StateVector::zeros(basis.len());
    match which {
        InitialCondition::AtomExcited => {
            let i = basis.index_of(&BasisState::new(Atom::Excited, 0))?;
            psi.amplitudes[i] = Complex64::new(1.0, 0.0);
        }
        InitialCondition::AtomExcitedDefectLoaded => {
            let i = basis.index_of(&BasisState::new(Atom::Excited, 1))?;
            psi.amplitudes[i] = Complex64::new(1.0, 0.0);
        }
        InitialCondition::Custom(entries) => {
            for (s, amp) in entries {
                psi.amplitudes[basis.index_of(s)?] += amp;
            }
            psi = psi.normalized()?;
        }
    }
    Ok(psi)
}
