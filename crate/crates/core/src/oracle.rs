//! Reference solution of single-excitation decay into the full band-edge
//! continuum, independent of any discretization.
//!
//! Eliminating every reservoir amplitude exactly leaves
//!
//! ```text
//! da0/dt = -i Delta_o a0(t) - int_0^t K(t - s) a0(s) ds,
//! K(tau) = int_0^inf dx (C/pi) x^(-1/2) e^(-i x tau) = C e^(-i pi/4) / sqrt(pi tau).
//! ```
//!
//! The kernel is weakly singular at `tau = 0`, so the convolution uses product
//! integration: `a0` is interpolated linearly on each panel and the moments of
//! `tau^(-1/2)` are integrated exactly. The outer equation is stepped with the
//! trapezoidal rule, which is implicit only in the (scalar) newest value.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub coupling_c: f64,
    pub delta_o: f64,
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self {
            coupling_c: 1.0,
            delta_o: 0.0,
        }
    }
}

impl KernelSpec {
    /// `C e^(-i pi/4) / sqrt(pi)`, the kernel without its `tau^(-1/2)`.
    fn prefactor(&self) -> Complex64 {
        Complex64::from_polar(self.coupling_c / PI.sqrt(), -PI / 4.0)
    }
}

pub fn memory_kernel(spec: &KernelSpec, tau: f64) -> Result<Complex64> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("memory kernel needs tau > 0, got {tau}")));
    }
    Ok(spec.prefactor() / tau.sqrt())
}

/// Exact panel moments for `u in [j h, (j+1) h]`:
/// `near[j]` weights the sample at `u = j h`, `far[j]` the one at `u = (j+1) h`.
fn panel_weights(h: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let sh = h.sqrt();
    let mut near = Vec::with_capacity(n);
    let mut far = Vec::with_capacity(n);
    for j in 0..n {
        let jf = j as f64;
        let (r0, r1) = (jf.sqrt(), (jf + 1.0).sqrt());
        // int u^(-1/2) du and int u^(1/2) du over the panel, in units of sqrt(h)
        // and h^(3/2), written without cancellation
        let m0 = 2.0 / (r1 + r0);
        let m1 = (2.0 / 3.0) * (3.0 * jf * jf + 3.0 * jf + 1.0) / (r1 * r1 * r1 + r0 * r0 * r0);
        near.push(sh * ((jf + 1.0) * m0 - m1));
        far.push(sh * (m1 - jf * m0));
    }
    (near, far)
}

/// `a0(t)` on a uniform grid starting at zero, with `a0(0) = 1`.
pub fn solve_decay_exact(spec: &KernelSpec, t_grid: &[f64]) -> Result<Vec<Complex64>> {
    if t_grid.is_empty() {
        return Ok(Vec::new());
    }
    if t_grid[0] != 0.0 {
        return Err(Error::Domain(format!("time grid must start at 0, got {}", t_grid[0])));
    }
    if t_grid.len() == 1 {
        return Ok(vec![Complex64::new(1.0, 0.0)]);
    }
    let n = t_grid.len() - 1;
    let h = t_grid[n] / n as f64;
    if !(h > 0.0) {
        return Err(Error::Domain("time grid must be increasing".into()));
    }
    for (i, &t) in t_grid.iter().enumerate() {
        if (t - i as f64 * h).abs() > 1e-9 * h.max(t) {
            return Err(Error::Domain(format!("time grid is not uniform at index {i}")));
        }
    }
    solve_uniform(spec, h, n)
}

/// Same as [`solve_decay_exact`] on `t_i = i h`, `i = 0..=n_steps`.
pub fn solve_uniform(spec: &KernelSpec, h: f64, n_steps: usize) -> Result<Vec<Complex64>> {
    let c0 = spec.prefactor();
    let (near, far) = panel_weights(h, n_steps.max(1));
    // combined weight of a_i in the convolution at t_n, as a function of n - i
    let combined: Vec<f64> = (0..n_steps.max(1))
        .map(|l| if l == 0 { near[0] } else { near[l] + far[l - 1] })
        .collect();

    let rot = Complex64::new(0.0, spec.delta_o);
    let mut a = Vec::with_capacity(n_steps + 1);
    a.push(Complex64::new(1.0, 0.0));
    // f_0 = -i Delta a_0 (empty history)
    let mut f_prev = -rot * a[0];
    let denom = Complex64::new(1.0, 0.0) + (rot + c0 * combined[0]) * (0.5 * h);
    for step in 1..=n_steps {
        // history part of the convolution at t_step, excluding a_step
        let mut hist = far[step - 1] * a[0];
        for i in 1..step {
            hist += a[i] * combined[step - i];
        }
        let rhs = a[step - 1] + (f_prev - c0 * hist) * (0.5 * h);
        let next = rhs / denom;
        if !next.re.is_finite() || !next.im.is_finite() {
            return Err(Error::NonFinite(step as f64 * h));
        }
        f_prev = -rot * next - c0 * (hist + next * combined[0]);
        a.push(next);
    }
    Ok(a)
}

/// Sup-norm change of `a0` on the coarse grid when the step is halved.
pub fn refinement_error(spec: &KernelSpec, t_max: f64, h: f64) -> Result<f64> {
    let n = (t_max / h).round() as usize;
    if n == 0 {
        return Ok(0.0);
    }
    let h = t_max / n as f64;
    let coarse = solve_uniform(spec, h, n)?;
    let fine = solve_uniform(spec, h / 2.0, 2 * n)?;
    Ok(coarse
        .iter()
        .enumerate()
        .map(|(i, a)| (a - fine[2 * i]).norm())
        .fold(0.0, f64::max))
}
