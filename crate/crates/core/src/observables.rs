//! Populations and photon numbers of a state in a fixed-excitation sector.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statespace::{Atom, ExcitationBasis, StateVector};

/// Field names double as CSV column names.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub p_excited: f64,
    pub n_defect: f64,
    pub p_res_zero: f64,
    pub p_res_one: f64,
    pub p_res_two: f64,
    pub n_total: f64,
    pub norm_sq: f64,
}

/// Which states count towards the one-photon reservoir sector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectorDefinition {
    /// Every state with exactly one reservoir photon. The three sector
    /// populations then partition the norm.
    #[default]
    Inclusive,
    /// Only ground-state-atom states with one reservoir photon (`|g,1_d,1_j>`);
    /// the excited-atom family `|e,0,1_j>` is left out of `p_res_one`.
    GroundOnly,
}

impl std::str::FromStr for SectorDefinition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "inclusive" => Ok(SectorDefinition::Inclusive),
            "ground-only" => Ok(SectorDefinition::GroundOnly),
            other => Err(Error::Config(format!(
                "unknown sector definition '{other}' (expected inclusive or ground-only)"
            ))),
        }
    }
}

impl std::fmt::Display for SectorDefinition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SectorDefinition::Inclusive => f.write_str("inclusive"),
            SectorDefinition::GroundOnly => f.write_str("ground-only"),
        }
    }
}

/// Per-state labels of a basis, flattened for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Observables {
    excited: Vec<bool>,
    defect: Vec<u32>,
    reservoir: Vec<u32>,
    excitations: Vec<u32>,
    has_defect: bool,
    sectors: SectorDefinition,
}

impl Observables {
    pub fn new(basis: &ExcitationBasis) -> Self {
        Self::with_sectors(basis, SectorDefinition::Inclusive)
    }

    pub fn with_sectors(basis: &ExcitationBasis, sectors: SectorDefinition) -> Self {
        let states = &basis.states;
        Self {
            excited: states.iter().map(|s| s.atom == Atom::Excited).collect(),
            defect: states.iter().map(|s| s.defect_occupation).collect(),
            reservoir: states.iter().map(|s| s.reservoir_photons()).collect(),
            excitations: states.iter().map(|s| s.excitations()).collect(),
            has_defect: basis.has_defect,
            sectors,
        }
    }

    pub fn record(&self, psi: &StateVector) -> ObservableRecord {
        let mut r = ObservableRecord::default();
        for (i, a) in psi.amplitudes.iter().enumerate() {
            let w = a.norm_sqr();
            r.norm_sq += w;
            r.n_total += w * self.excitations[i] as f64;
            r.n_defect += w * self.defect[i] as f64;
            if self.excited[i] {
                r.p_excited += w;
            }
            match self.reservoir[i] {
                0 => r.p_res_zero += w,
                1 if self.sectors == SectorDefinition::Inclusive || !self.excited[i] => r.p_res_one += w,
                1 => {}
                _ => r.p_res_two += w,
            }
        }
        r
    }

    pub fn has_defect(&self) -> bool {
        self.has_defect
    }
}

/// Excited-state population: `|a0|^2`, plus `sum_j |a_j|^2` for two excitations.
pub fn atomic_inversion(basis: &ExcitationBasis, psi: &StateVector) -> f64 {
    basis
        .states
        .iter()
        .zip(&psi.amplitudes)
        .filter(|(s, _)| s.atom == Atom::Excited)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Mean defect photon number, `|a0|^2 + 2|b0|^2 + sum_j |b_j|^2` for two excitations.
pub fn defect_photon_number(basis: &ExcitationBasis, psi: &StateVector) -> Result<f64> {
    if !basis.has_defect {
        return Err(Error::MissingDefect);
    }
    Ok(basis
        .states
        .iter()
        .zip(&psi.amplitudes)
        .map(|(s, a)| s.defect_occupation as f64 * a.norm_sqr())
        .sum())
}

/// Populations of the zero-, one- and two-photon sectors of the reservoir.
pub fn reservoir_sector_populations(basis: &ExcitationBasis, psi: &StateVector) -> (f64, f64, f64) {
    let mut sectors = [0.0; 3];
    for (s, a) in basis.states.iter().zip(&psi.amplitudes) {
        sectors[(s.reservoir_photons() as usize).min(2)] += a.norm_sqr();
    }
    (sectors[0], sectors[1], sectors[2])
}

pub fn total_excitations(basis: &ExcitationBasis, psi: &StateVector) -> f64 {
    basis
        .states
        .iter()
        .zip(&psi.amplitudes)
        .map(|(s, a)| s.excitations() as f64 * a.norm_sqr())
        .sum()
}

pub fn norm_sq(psi: &StateVector) -> f64 {
    psi.norm_sq()
}
