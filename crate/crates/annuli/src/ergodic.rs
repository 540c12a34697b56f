//! Translation flows of R^d on the d-torus, annulus ergodic averages, their
//! spectral closed forms, and mean-square error curves.
//!
//! The flow is T_t ω = ω + A·t mod 1 for an invertible matrix A; the only
//! invariant frequency is zero, so the flow is ergodic and the invariant
//! projection of a trigonometric polynomial is its constant coefficient.
//! On these systems the annulus average has an exact spectral form:
//! A_r φ(ω) = Σ_k φ̂(k)·e^{2πi k·ω}·ĉ_r(|Aᵀk|), which turns mean ergodic
//! statements into kernel-decay statements.

use crate::error::{Error, Result};
use crate::fourier::{annulus_kernel, KernelQuery};
use crate::geometry::{Norm, ThicknessFunction};
use crate::sampling::{annulus_mc_mean, annulus_product_mean, QuadratureScheme};
use crate::check_dim;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

/// Determinant guard: matrices this close to singular are rejected.
const DET_GUARD: f64 = 1e-9;

/// The translation action T_t ω = ω + A·t mod 1 on the d-torus.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusSystem {
    dim: usize,
    /// Row-major d×d matrix.
    matrix: Vec<f64>,
}

impl TorusSystem {
    pub fn new(dim: usize, matrix: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: matrix.len(),
            });
        }
        let det = determinant(dim, &matrix);
        if det.abs() < DET_GUARD {
            return Err(Error::domain("det A", "|det A| >= 1e-9", det));
        }
        Ok(TorusSystem { dim, matrix })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = 1.0;
        }
        Ok(TorusSystem { dim, matrix: m })
    }

    /// Matrix file: CSV rows of d numbers.
    pub fn from_csv(dim: usize, path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_path(path)
            .map_err(|e| Error::Parse(e.to_string()))?;
        let mut matrix = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            for cell in record.iter() {
                matrix.push(
                    cell.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad matrix entry `{cell}`")))?,
                );
            }
        }
        TorusSystem::new(dim, matrix)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// A·t.
    pub fn apply(&self, t: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.matrix[i * self.dim + j] * t[j])
                    .sum()
            })
            .collect()
    }

    /// Aᵀk for an integer frequency vector.
    pub fn transpose_apply(&self, k: &[i64]) -> Vec<f64> {
        (0..self.dim)
            .map(|j| {
                (0..self.dim)
                    .map(|i| self.matrix[i * self.dim + j] * k[i] as f64)
                    .sum()
            })
            .collect()
    }

    /// T_t ω (componentwise mod 1).
    pub fn flow(&self, omega: &[f64], t: &[f64]) -> Vec<f64> {
        self.apply(t)
            .iter()
            .zip(omega)
            .map(|(at, w)| frac(w + at))
            .collect()
    }
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

fn determinant(d: usize, matrix: &[f64]) -> f64 {
    let mut m = matrix.to_vec();
    let mut det = 1.0;
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&a, &b| {
                m[a * d + col]
                    .abs()
                    .partial_cmp(&m[b * d + col].abs())
                    .unwrap()
            })
            .unwrap();
        if m[pivot * d + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..d {
                m.swap(col * d + j, pivot * d + j);
            }
            det = -det;
        }
        let p = m[col * d + col];
        det *= p;
        for row in col + 1..d {
            let f = m[row * d + col] / p;
            for j in col..d {
                m[row * d + j] -= f * m[col * d + j];
            }
        }
    }
    det
}

/// A trigonometric polynomial Σ φ̂(k) e^{2πi k·x} with finitely many
/// nonzero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

impl TrigPoly {
    pub fn new(dim: usize, coeffs: impl IntoIterator<Item = (Vec<i64>, Complex64)>) -> Result<Self> {
        check_dim(dim)?;
        let mut map = BTreeMap::new();
        for (k, c) in coeffs {
            if k.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.len(),
                });
            }
            if c != Complex64::new(0.0, 0.0) {
                map.insert(k, c);
            }
        }
        Ok(TrigPoly { dim, coeffs: map })
    }

    /// The single wave e^{2πi k·x}.
    pub fn wave(k: Vec<i64>) -> Result<Self> {
        let dim = k.len();
        TrigPoly::new(dim, [(k, Complex64::new(1.0, 0.0))])
    }

    pub fn constant(dim: usize, c: Complex64) -> Result<Self> {
        TrigPoly::new(dim, [(vec![0; dim], c)])
    }

    /// TrigPoly file format: CSV with header `k1,...,kd,re,im`.
    pub fn from_csv(dim: usize, path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_path(path)
            .map_err(|e| Error::Parse(e.to_string()))?;
        let mut coeffs = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            if record.len() != dim + 2 {
                return Err(Error::Parse(format!(
                    "trig-poly row needs {} columns (k1..k{dim},re,im), got {}",
                    dim + 2,
                    record.len()
                )));
            }
            let k: Vec<i64> = (0..dim)
                .map(|i| {
                    record[i]
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad frequency `{}`", &record[i])))
                })
                .collect::<Result<_>>()?;
            let re: f64 = record[dim]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient `{}`", &record[dim])))?;
            let im: f64 = record[dim + 1]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient `{}`", &record[dim + 1])))?;
            coeffs.push((k, Complex64::new(re, im)));
        }
        TrigPoly::new(dim, coeffs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex64)> {
        self.coeffs.iter()
    }

    /// The invariant projection on an ergodic system: the coefficient at 0.
    pub fn mean(&self) -> Complex64 {
        self.coeffs
            .get(&vec![0; self.dim])
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &self.coeffs {
            let phase: f64 = k.iter().zip(x).map(|(&ki, &xi)| ki as f64 * xi).sum();
            acc += c * Complex64::from_polar(1.0, 2.0 * PI * phase);
        }
        Ok(acc)
    }
}

fn check_inputs(sys: &TorusSystem, phi: &TrigPoly, omega: &[f64]) -> Result<()> {
    if phi.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: phi.dim(),
        });
    }
    if omega.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: omega.len(),
        });
    }
    Ok(())
}

/// Direct quadrature/Monte Carlo estimate of the annulus ergodic average
/// (1/|C_{r,e(r)}|)·∫ φ(T_t ω) dt, with its scheme error estimate.
pub fn flow_average(
    sys: &TorusSystem,
    phi: &TrigPoly,
    omega: &[f64],
    r: f64,
    thickness: &ThicknessFunction,
    scheme: &QuadratureScheme,
) -> Result<(Complex64, f64)> {
    check_inputs(sys, phi, omega)?;
    let d = sys.dim();
    let e = thickness.thickness(r)?.value;
    scheme.validate(d, Norm::Euclidean)?;
    crate::geometry::annulus_volume(d, r, e, Norm::Euclidean)?;
    let eval = |t: &[f64]| -> Complex64 {
        let point = sys.flow(omega, t);
        phi.eval(&point).expect("dimensions validated")
    };
    match *scheme {
        QuadratureScheme::MonteCarlo { n, seed } => {
            annulus_mc_mean(d, r, e, Norm::Euclidean, n, seed, eval)
        }
        QuadratureScheme::Product { n_rad, n_ang } => {
            annulus_product_mean(d, r, e, n_rad, n_ang, eval)
        }
    }
}

/// Exact spectral form A_r φ(ω) = Σ_k φ̂(k)·e^{2πi k·ω}·ĉ_r(|Aᵀk|),
/// accurate up to the kernel quadrature tolerance.
pub fn spectral_average(
    sys: &TorusSystem,
    phi: &TrigPoly,
    omega: &[f64],
    r: f64,
    thickness: &ThicknessFunction,
) -> Result<Complex64> {
    check_inputs(sys, phi, omega)?;
    let d = sys.dim();
    let e = thickness.thickness(r)?.value;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, c) in phi.coeffs() {
        let freq = crate::geometry::euclidean_norm(&sys.transpose_apply(k));
        let kernel = annulus_kernel(&KernelQuery::new(d, r, e, freq)?)?;
        let phase: f64 = k.iter().zip(omega).map(|(&ki, &wi)| ki as f64 * wi).sum();
        acc += c * Complex64::from_polar(1.0, 2.0 * PI * phase) * kernel;
    }
    Ok(acc)
}

/// Exact L²(μ) distance ‖A_r φ − φ̃‖₂ = √(Σ_{k≠0} |φ̂(k)|²·ĉ_r(|Aᵀk|)²)
/// by orthogonality of the characters.
pub fn mean_l2_error(
    sys: &TorusSystem,
    phi: &TrigPoly,
    r: f64,
    thickness: &ThicknessFunction,
) -> Result<f64> {
    if phi.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: phi.dim(),
        });
    }
    let d = sys.dim();
    let e = thickness.thickness(r)?.value;
    let mut acc = 0.0;
    for (k, c) in phi.coeffs() {
        if k.iter().all(|&ki| ki == 0) {
            continue;
        }
        let freq = crate::geometry::euclidean_norm(&sys.transpose_apply(k));
        let kernel = annulus_kernel(&KernelQuery::new(d, r, e, freq)?)?;
        acc += c.norm_sqr() * kernel * kernel;
    }
    Ok(acc.sqrt())
}
