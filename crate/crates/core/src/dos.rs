//! Band-edge density of states and its replacement by a finite set of
//! discrete modes.
//!
//! The isotropic band-edge model has `rho(w) = k / sqrt(w - w_e)` above the
//! edge and zero below it. The atom sees the reservoir only through the
//! spectral density `|kappa_w|^2 rho(w) = (C / pi) / sqrt(w - w_e)`. Modes in
//! `(w_e, w_u]` are kept as discrete oscillators, one per unit of integrated
//! density; modes above `w_u` are eliminated and leave behind the constant
//! level shift returned by [`vacuum_shift`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default width of the discretized band, `w_u - w_e`.
pub const DEFAULT_BAND_WIDTH: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityOfStates {
    /// Band-edge frequency.
    pub omega_e: f64,
    /// Normalization `k` of `rho(w) = k / sqrt(w - w_e)`.
    pub k_const: f64,
    /// Effective atom-reservoir coupling `C`.
    pub coupling_c: f64,
}

impl DensityOfStates {
    pub fn new(omega_e: f64, k_const: f64, coupling_c: f64) -> Self {
        Self {
            omega_e,
            k_const,
            coupling_c,
        }
    }

    /// Density whose normalization puts exactly `n_modes` unit cells between
    /// the band edge and `omega_u`.
    pub fn for_band(n_modes: usize, omega_e: f64, omega_u: f64, coupling_c: f64) -> Result<Self> {
        let k_const = solve_k(n_modes, omega_e, omega_u)?;
        Ok(Self::new(omega_e, k_const, coupling_c))
    }

    pub fn evaluate(&self, omega: f64) -> Result<f64> {
        evaluate_dos(self, omega)
    }
}

pub fn evaluate_dos(dos: &DensityOfStates, omega: f64) -> Result<f64> {
    if omega == dos.omega_e {
        return Err(Error::Singularity(omega));
    }
    if omega < dos.omega_e {
        return Ok(0.0);
    }
    Ok(dos.k_const / (omega - dos.omega_e).sqrt())
}

/// Normalization `k = N / (2 sqrt(w_u - w_e))`, the one for which the density
/// integrates to `N` over `(w_e, w_u]`.
///
/// With this `k` and the coupling of [`coupling_from_integral`], the discrete
/// modes reproduce the spectral density `(C/pi) / sqrt(w - w_e)` pointwise:
/// `g_r^2 * rho(w) = (2C sqrt(w_u - w_e) / (N pi)) * k / sqrt(w - w_e)`.
pub fn solve_k(n_modes: usize, omega_e: f64, omega_u: f64) -> Result<f64> {
    if n_modes == 0 {
        return Err(Error::Domain("at least one discrete mode is required".into()));
    }
    if !(omega_u > omega_e) {
        return Err(Error::Domain(format!(
            "omega_u = {omega_u} must lie above the band edge omega_e = {omega_e}"
        )));
    }
    Ok(n_modes as f64 / (2.0 * (omega_u - omega_e).sqrt()))
}

/// Seed offset that puts the first mode at the centre of the first unit cell,
/// `int_{w_e}^{w_e + delta} rho = 1/2`, i.e. `delta = 1 / (16 k^2)`. Each mode then
/// sits in the middle of its own `Delta N = 1` cell and no spectral weight is
/// lost below the first mode.
pub fn cell_centred_seed(dos: &DensityOfStates) -> f64 {
    1.0 / (16.0 * dos.k_const * dos.k_const)
}

/// Shared coupling `g_r = sqrt((2C / (N pi)) sqrt(w_u - w_e))`.
pub fn coupling_from_integral(dos: &DensityOfStates, n_modes: usize, omega_u: f64) -> Result<f64> {
    if n_modes == 0 {
        return Err(Error::Domain("at least one discrete mode is required".into()));
    }
    if !(omega_u > dos.omega_e) {
        return Err(Error::Domain(format!(
            "omega_u = {omega_u} must lie above the band edge omega_e = {}",
            dos.omega_e
        )));
    }
    let width = omega_u - dos.omega_e;
    Ok((2.0 * dos.coupling_c / (n_modes as f64 * PI) * width.sqrt()).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// `w_{i+1} = w_i + 1/rho(w_i)`
    FirstOrder,
    /// `w_{i+1} = w_{i-1} + 2/rho(w_i)`, seeded with one first-order step.
    Midpoint,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "first-order" | "firstorder" | "first" => Ok(Scheme::FirstOrder),
            "midpoint" | "mid" => Ok(Scheme::Midpoint),
            other => Err(Error::Config(format!(
                "unknown scheme '{other}' (expected first-order or midpoint)"
            ))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::FirstOrder => f.write_str("first-order"),
            Scheme::Midpoint => f.write_str("midpoint"),
        }
    }
}

/// Discrete stand-in for the band-edge part of the reservoir.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedReservoir {
    pub omega_e: f64,
    /// Mode frequencies, strictly increasing.
    pub frequencies: Vec<f64>,
    /// Per-mode couplings. Every entry equals `coupling_g` for the band-edge
    /// model; other densities may fill this differently.
    pub couplings: Vec<f64>,
    pub coupling_g: f64,
    pub n_modes: usize,
    pub omega_u: f64,
    pub delta_seed: f64,
    pub vacuum_shift: f64,
}

impl DiscretizedReservoir {
    /// Assemble a reservoir from explicit modes. Used for model problems
    /// (single resonant mode, zero shift) and for densities other than the
    /// band-edge one.
    pub fn from_modes(
        omega_e: f64,
        frequencies: Vec<f64>,
        couplings: Vec<f64>,
        omega_u: f64,
        vacuum_shift: f64,
    ) -> Result<Self> {
        if frequencies.len() != couplings.len() {
            return Err(Error::Shape {
                expected: frequencies.len(),
                got: couplings.len(),
            });
        }
        if frequencies.iter().chain(&couplings).any(|x| !x.is_finite()) || !vacuum_shift.is_finite() {
            return Err(Error::Domain("mode parameters must be finite".into()));
        }
        let coupling_g = couplings.first().copied().unwrap_or(0.0);
        let delta_seed = frequencies.first().map_or(0.0, |w| w - omega_e);
        Ok(Self {
            omega_e,
            n_modes: frequencies.len(),
            frequencies,
            couplings,
            coupling_g,
            omega_u,
            delta_seed,
            vacuum_shift,
        })
    }

    /// Detunings `Delta_j = w_j - w_e` in the frame rotating at the band edge.
    pub fn detunings(&self) -> Vec<f64> {
        self.frequencies.iter().map(|w| w - self.omega_e).collect()
    }

    pub fn without_shift(mut self) -> Self {
        self.vacuum_shift = 0.0;
        self
    }
}

pub fn discretize(
    dos: &DensityOfStates,
    n_modes: usize,
    omega_u: f64,
    delta_seed: f64,
    scheme: Scheme,
) -> Result<DiscretizedReservoir> {
    if n_modes == 0 {
        return Err(Error::Domain("at least one discrete mode is required".into()));
    }
    if scheme == Scheme::Midpoint && n_modes < 2 {
        return Err(Error::Domain("the midpoint scheme needs at least two modes".into()));
    }
    if !(delta_seed > 0.0) {
        return Err(Error::Domain(format!("delta_seed = {delta_seed} must be positive")));
    }
    if !(omega_u > dos.omega_e + delta_seed) {
        return Err(Error::Domain(format!(
            "omega_u = {omega_u} must exceed omega_e + delta_seed = {}",
            dos.omega_e + delta_seed
        )));
    }
    if !(dos.k_const > 0.0) {
        return Err(Error::Domain(format!("k = {} must be positive", dos.k_const)));
    }

    let spacing = |w: f64| -> Result<f64> { Ok(1.0 / dos.evaluate(w)?) };

    let mut frequencies = Vec::with_capacity(n_modes);
    frequencies.push(dos.omega_e + delta_seed);
    if n_modes > 1 {
        frequencies.push(frequencies[0] + spacing(frequencies[0])?);
    }
    for i in 2..n_modes {
        let next = match scheme {
            Scheme::FirstOrder => frequencies[i - 1] + spacing(frequencies[i - 1])?,
            Scheme::Midpoint => frequencies[i - 2] + 2.0 * spacing(frequencies[i - 1])?,
        };
        if !(next > frequencies[i - 1]) {
            return Err(Error::Domain(format!(
                "discretization stopped increasing at mode {} (w = {next})",
                i + 1
            )));
        }
        frequencies.push(next);
    }

    // The recursion starts at w_e + delta, so the cells below the seed are
    // pushed to the top of the band: a consistent (N, w_u, k) triple ends near
    // w_e + (sqrt(w_u - w_e) + sqrt(delta))^2, within one local spacing.
    let last = frequencies[n_modes - 1];
    let last_spacing = if n_modes > 1 {
        last - frequencies[n_modes - 2]
    } else {
        spacing(last)?
    };
    let shifted_top = dos.omega_e + ((omega_u - dos.omega_e).sqrt() + delta_seed.sqrt()).powi(2);
    let allowed = shifted_top + last_spacing;
    if last > allowed {
        return Err(Error::Consistency {
            omega_last: last,
            omega_u,
            allowed,
        });
    }

    let coupling_g = coupling_from_integral(dos, n_modes, omega_u)?;
    let mut res = DiscretizedReservoir {
        omega_e: dos.omega_e,
        frequencies,
        couplings: vec![coupling_g; n_modes],
        coupling_g,
        n_modes,
        omega_u,
        delta_seed,
        vacuum_shift: 0.0,
    };
    res.vacuum_shift = vacuum_shift(&res);
    Ok(res)
}

/// Level shift `S = g_r^2 N / (w_u - w_e)` left by the eliminated modes above
/// `w_u`. It enters the excited-state detuning as `Delta_o - S`.
pub fn vacuum_shift(res: &DiscretizedReservoir) -> f64 {
    let width = res.omega_u - res.omega_e;
    if !width.is_finite() {
        return 0.0;
    }
    res.coupling_g * res.coupling_g * res.n_modes as f64 / width
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn band(n: usize) -> DensityOfStates {
        DensityOfStates::for_band(n, 0.0, 16.0, 1.0).unwrap()
    }

    #[test]
    fn dos_values() {
        let dos = DensityOfStates::new(0.0, 1.0, 1.0);
        assert_eq!(dos.evaluate(4.0).unwrap(), 0.5);
        assert_eq!(dos.evaluate(-1.0).unwrap(), 0.0);
        let edge = DensityOfStates::new(1.0, 2.5, 1.0);
        assert_eq!(edge.evaluate(1.0), Err(Error::Singularity(1.0)));
    }

    #[test]
    fn k_from_band() {
        assert_eq!(solve_k(150, 0.0, 16.0).unwrap(), 18.75);
        assert_eq!(solve_k(1, 0.0, 0.25).unwrap(), 1.0);
        assert_eq!(solve_k(500, 0.0, 16.0).unwrap(), 62.5);
        assert!(matches!(solve_k(10, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(solve_k(10, 1.0, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn coupling_values() {
        let g150 = coupling_from_integral(&band(150), 150, 16.0).unwrap();
        let g500 = coupling_from_integral(&band(500), 500, 16.0).unwrap();
        assert_relative_eq!(g150, (8.0 / (150.0 * PI)).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(g150, 0.130294, epsilon = 1e-6);
        assert_relative_eq!(g500, 0.0713650, epsilon = 1e-7);
        for n in [1, 7, 150, 500, 2000] {
            let g = coupling_from_integral(&band(n), n, 16.0).unwrap();
            assert_relative_eq!(n as f64 * g * g, 8.0 / PI, max_relative = 1e-14);
        }
    }

    #[test]
    fn first_order_step() {
        let res = discretize(&band(150), 150, 16.0, 0.01, Scheme::FirstOrder).unwrap();
        assert_eq!(res.frequencies.len(), 150);
        assert_eq!(res.frequencies[0], 0.01);
        assert_relative_eq!(res.frequencies[1], 0.01 + 0.1 / 18.75, max_relative = 1e-15);
        assert_relative_eq!(res.frequencies[1], 0.015333, epsilon = 1e-6);
    }

    #[test]
    fn midpoint_seed_matches_first_order() {
        let dos = DensityOfStates::for_band(2, 0.0, 16.0, 1.0).unwrap();
        let mid = discretize(&dos, 2, 16.0, 0.01, Scheme::Midpoint).unwrap();
        let first = discretize(&dos, 2, 16.0, 0.01, Scheme::FirstOrder).unwrap();
        assert_eq!(mid.frequencies, first.frequencies);
        let one = DensityOfStates::for_band(1, 0.0, 16.0, 1.0).unwrap();
        assert!(discretize(&one, 1, 16.0, 0.01, Scheme::Midpoint).is_err());
    }

    #[test]
    fn shift_values() {
        let r150 = discretize(&band(150), 150, 16.0, 0.01, Scheme::FirstOrder).unwrap();
        let r500 = discretize(&band(500), 500, 16.0, 0.01, Scheme::FirstOrder).unwrap();
        assert_relative_eq!(r150.vacuum_shift, 2.0 / (4.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(r150.vacuum_shift, 0.159155, epsilon = 1e-6);
        assert_relative_eq!(r150.vacuum_shift, r500.vacuum_shift, max_relative = 1e-14);
        let mut far = r150.clone();
        far.omega_u = f64::INFINITY;
        assert_eq!(vacuum_shift(&far), 0.0);
    }

    #[test]
    fn consistency_error_for_mismatched_k() {
        let thin = DensityOfStates::new(0.0, 2.0, 1.0);
        let err = discretize(&thin, 150, 16.0, 0.01, Scheme::FirstOrder).unwrap_err();
        assert!(matches!(err, Error::Consistency { .. }));
    }

    #[test]
    fn bad_inputs() {
        let dos = band(10);
        assert!(discretize(&dos, 0, 16.0, 0.01, Scheme::FirstOrder).is_err());
        assert!(discretize(&dos, 10, 16.0, 0.0, Scheme::FirstOrder).is_err());
        assert!(discretize(&dos, 10, 0.005, 0.01, Scheme::FirstOrder).is_err());
    }

    #[test]
    fn local_density_matches() {
        let dos = band(150);
        let res = discretize(&dos, 150, 16.0, 0.01, Scheme::FirstOrder).unwrap();
        for w in res.frequencies.windows(2) {
            let local = 1.0 / (w[1] - w[0]);
            let exact = dos.evaluate(w[0]).unwrap();
            assert!((local / exact - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn cell_centred_seed_halves_first_cell() {
        let dos = band(150);
        let delta = cell_centred_seed(&dos);
        assert_relative_eq!(delta, 16.0 / (4.0 * 150.0 * 150.0), max_relative = 1e-14);
        // int_0^delta k / sqrt(w) dw = 2 k sqrt(delta)
        assert_relative_eq!(2.0 * dos.k_const * delta.sqrt(), 0.5, max_relative = 1e-14);
        for scheme in [Scheme::FirstOrder, Scheme::Midpoint] {
            let res = discretize(&dos, 150, 16.0, delta, scheme).unwrap();
            assert!(*res.frequencies.last().unwrap() < 16.0);
        }
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("midpoint".parse::<Scheme>().unwrap(), Scheme::Midpoint);
        assert_eq!("first-order".parse::<Scheme>().unwrap(), Scheme::FirstOrder);
        assert!("rk4".parse::<Scheme>().is_err());
    }
}
