//! Fourier transforms of uniform annulus probabilities.
//!
//! For d ≥ 2 the transform is radial and reduces to
//! ∫_{r−e}^{r} ρ^{d−1}·σ̂₁(ρs) dρ normalized by ∫ ρ^{d−1} dρ, so that the
//! value at s = 0 is exactly 1. The radial integral is oscillatory with
//! period 1/s in ρ; panels are kept at or below a quarter period so
//! Gauss–Legendre stays accurate for large r·s, and the panel count is
//! doubled until two successive refinements agree to 1e−8.
//!
//! In d = 1 the region is the symmetric two-interval set, whose transform
//! is exactly real: [sin(2πzr) − sin(2πz(r−e))]/(2πze), evaluated in the
//! cancellation-free form cos(2πz(r−e/2))·sinc(πze).

use crate::error::{Error, Result};
use crate::geometry::{radial_power_gap, ThicknessFunction};
use crate::quad::integrate_panel;
use crate::specfun::sphere_fourier;
use crate::check_dim;
use rayon::prelude::*;
use std::f64::consts::PI;

/// A kernel evaluation request: geometry plus the frequency magnitude
/// (d ≥ 2; the transform is radial) or signed frequency (d = 1; the
/// transform is even, so only |z| matters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuery {
    pub dim: usize,
    pub r: f64,
    pub e: f64,
    pub freq: f64,
}

impl KernelQuery {
    pub fn new(dim: usize, r: f64, e: f64, freq: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(r > 0.0) {
            return Err(Error::domain("outer radius r", "r > 0", r));
        }
        if !(e > 0.0) || e > r {
            return Err(Error::domain("thickness e", "0 < e <= r", e));
        }
        if dim >= 2 && !(freq >= 0.0) {
            return Err(Error::domain("frequency magnitude s", "s >= 0", freq));
        }
        Ok(KernelQuery { dim, r, e, freq })
    }
}

/// Relative agreement between successive panel refinements.
const REFINEMENT_TARGET: f64 = 1e-8;

/// Transform of the uniform probability on the annulus, real in every
/// dimension (the d = 1 two-interval set is symmetric).
pub fn annulus_kernel(q: &KernelQuery) -> Result<f64> {
    KernelQuery::new(q.dim, q.r, q.e, q.freq)?;
    if q.freq == 0.0 {
        return Ok(1.0);
    }
    if q.dim == 1 {
        let z = q.freq.abs();
        let u = PI * z * q.e;
        let sinc = if u.abs() < 1e-8 {
            1.0 - u * u / 6.0
        } else {
            u.sin() / u
        };
        return Ok((2.0 * PI * z * (q.r - 0.5 * q.e)).cos() * sinc);
    }
    let s = q.freq;
    let d = q.dim;
    let denominator = radial_power_gap(d, q.r, q.e) / d as f64;

    // quarter-period panels, then refine until two rules agree
    let base = ((4.0 * s * q.e).ceil() as usize).clamp(2, 1 << 21);
    let mut panels = base;
    let mut prev = radial_moment(d, q.r, q.e, s, panels)?;
    for _ in 0..8 {
        panels *= 2;
        let next = radial_moment(d, q.r, q.e, s, panels)?;
        let delta = (next - prev).abs();
        prev = next;
        if delta <= REFINEMENT_TARGET * prev.abs() + 1e-12 * denominator {
            break;
        }
    }
    Ok(prev / denominator)
}

fn radial_moment(d: usize, r: f64, e: f64, s: f64, panels: usize) -> Result<f64> {
    if panels > (1 << 22) {
        return Err(Error::Unsupported(format!(
            "kernel quadrature needs {panels} panels; reduce s·e"
        )));
    }
    let lo = r - e;
    let width = e / panels as f64;
    let partial: Vec<f64> = (0..panels)
        .into_par_iter()
        .map(|i| {
            let a = lo + i as f64 * width;
            let b = if i + 1 == panels { r } else { a + width };
            integrate_panel(a, b, 16, |rho| {
                rho.powi(d as i32 - 1)
                    * sphere_fourier(d, rho * s).expect("validated dimension")
            })
        })
        .collect();
    Ok(partial.iter().sum())
}

/// Modulus and phase of a real kernel value (phase 0 or π).
pub fn modulus_phase(value: f64) -> (f64, f64) {
    if value >= 0.0 {
        (value, 0.0)
    } else {
        (-value, PI)
    }
}

/// One row of a decay scan: the kernel of C_{r, e(r)} at frequency s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub r: f64,
    pub e: f64,
    pub s: f64,
    pub value: f64,
}

/// Kernel values along an increasing radius grid with e = e(r).
pub fn decay_scan(
    d: usize,
    thickness: &ThicknessFunction,
    s: f64,
    r_grid: &[f64],
) -> Result<Vec<KernelSample>> {
    check_dim(d)?;
    if !(s > 0.0) {
        return Err(Error::domain("frequency s", "s > 0", s));
    }
    if r_grid.is_empty() {
        return Err(Error::Empty("radius grid"));
    }
    for w in r_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::domain("radius grid", "strictly increasing", w[1]));
        }
    }
    let rows: Vec<Result<KernelSample>> = r_grid
        .par_iter()
        .map(|&r| {
            let e = thickness.thickness(r)?.value;
            let value = annulus_kernel(&KernelQuery::new(d, r, e, s)?)?;
            Ok(KernelSample { r, e, s, value })
        })
        .collect();
    rows.into_iter().collect()
}

/// Log-spaced radius grid helper for scans.
pub fn log_radius_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi > lo) {
        return Err(Error::domain("grid bounds", "0 < lo < hi", lo));
    }
    if n < 2 {
        return Err(Error::domain("grid size", "n >= 2", n as f64));
    }
    let ratio = (hi / lo).powf(1.0 / (n - 1) as f64);
    Ok((0..n)
        .map(|i| if i + 1 == n { hi } else { lo * ratio.powi(i as i32) })
        .collect())
}
