//! Uniform sampling and averaging on annuli and spheres.
//!
//! Monte Carlo runs are split into fixed-size chunks, one ChaCha stream per
//! chunk, and reduced in chunk order: results are bit-identical for any
//! worker count. Product rules are deterministic radial × angular grids.

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geometry::{parse_f64, radial_power_gap, Norm};
use crate::quad::gauss_legendre;
use crate::check_dim;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Samples per Monte Carlo chunk. One RNG stream per chunk keeps results
/// independent of the degree of parallelism.
const CHUNK: usize = 4096;

/// How a region average is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadratureScheme {
    /// i.i.d. uniform samples; error estimate is the standard error.
    MonteCarlo { n: usize, seed: u64 },
    /// Radial × angular product grid (d ≤ 3, euclidean regions); error
    /// estimate is the difference against the half-resolution rule.
    Product { n_rad: usize, n_ang: usize },
}

impl QuadratureScheme {
    pub fn validate(&self, d: usize, norm: Norm) -> Result<()> {
        check_dim(d)?;
        match *self {
            QuadratureScheme::MonteCarlo { n, .. } => {
                if n < 100 {
                    return Err(Error::domain("sample count n", "n >= 100", n as f64));
                }
            }
            QuadratureScheme::Product { n_rad, n_ang } => {
                if d > 3 {
                    return Err(Error::Unsupported(format!(
                        "product rule supports d <= 3, got d = {d}"
                    )));
                }
                if norm != Norm::Euclidean {
                    return Err(Error::Unsupported(
                        "product rule supports the euclidean norm only".into(),
                    ));
                }
                if n_rad < 8 {
                    return Err(Error::domain("radial nodes", "n_rad >= 8", n_rad as f64));
                }
                if n_ang < 16 {
                    return Err(Error::domain("angular nodes", "n_ang >= 16", n_ang as f64));
                }
            }
        }
        Ok(())
    }
}

/// Scheme mini-grammar: `mc:<n>,<seed>` | `prod:<n_rad>,<n_ang>`.
impl FromStr for QuadratureScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("scheme spec `{s}` is missing parameters")))?;
        let (a, b) = rest
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("scheme spec `{s}` needs two parameters")))?;
        match head {
            "mc" => Ok(QuadratureScheme::MonteCarlo {
                n: parse_f64(a, "n")? as usize,
                seed: b
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad seed `{b}`")))?,
            }),
            "prod" => Ok(QuadratureScheme::Product {
                n_rad: parse_f64(a, "n_rad")? as usize,
                n_ang: parse_f64(b, "n_ang")? as usize,
            }),
            other => Err(Error::Parse(format!("unknown scheme `{other}`"))),
        }
    }
}

impl fmt::Display for QuadratureScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadratureScheme::MonteCarlo { n, seed } => write!(f, "mc:{n},{seed}"),
            QuadratureScheme::Product { n_rad, n_ang } => write!(f, "prod:{n_rad},{n_ang}"),
        }
    }
}

/// A value with its scheme-reported error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform direction on the euclidean unit sphere via normalized Gaussians.
fn unit_direction(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    use rand_distr::StandardNormal;
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = crate::geometry::euclidean_norm(&v);
        if n > 1e-12 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Radius with density ∝ ρ^{d−1} on [r−e, r]: inverse CDF
/// ρ = (u·(r^d − (r−e)^d) + (r−e)^d)^{1/d}.
fn shell_radius(d: usize, r: f64, e: f64, rng: &mut ChaCha8Rng) -> f64 {
    let gap = radial_power_gap(d, r, e);
    let base = (r - e).powi(d as i32);
    let u: f64 = rng.gen();
    (base + u * gap).powf(1.0 / d as f64)
}

fn draw_annulus_point(d: usize, r: f64, e: f64, norm: Norm, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match norm {
        Norm::Euclidean => {
            let rho = shell_radius(d, r, e, rng);
            let mut dir = unit_direction(d, rng);
            for c in dir.iter_mut() {
                *c *= rho;
            }
            dir
        }
        Norm::Max => {
            // the max-coordinate magnitude has the same ρ^{d-1} law; the
            // conditional law given the magnitude is uniform on the cube
            // surface: a uniform face and uniform in-face coordinates
            let m = shell_radius(d, r, e, rng);
            let axis = rng.gen_range(0..d);
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let mut t: Vec<f64> = (0..d).map(|_| rng.gen_range(-m..=m)).collect();
            t[axis] = sign * m;
            t
        }
    }
}

/// n i.i.d. uniform points of the annulus {r−e ≤ ‖t‖ ≤ r}.
pub fn sample_annulus(
    d: usize,
    r: f64,
    e: f64,
    norm: Norm,
    n: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    crate::geometry::annulus_volume(d, r, e, norm)?; // validates geometry
    if n == 0 {
        return Err(Error::domain("sample count n", "n >= 1", 0.0));
    }
    let mut rng = stream_rng(seed, 0);
    Ok((0..n)
        .map(|_| draw_annulus_point(d, r, e, norm, &mut rng))
        .collect())
}

/// n i.i.d. uniform points on the euclidean sphere of radius ρ.
pub fn sample_sphere(d: usize, rho: f64, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    check_dim(d)?;
    if !(rho > 0.0) {
        return Err(Error::domain("sphere radius", "rho > 0", rho));
    }
    if n == 0 {
        return Err(Error::domain("sample count n", "n >= 1", 0.0));
    }
    let mut rng = stream_rng(seed, 0);
    Ok((0..n)
        .map(|_| {
            let mut dir = unit_direction(d, &mut rng);
            for c in dir.iter_mut() {
                *c *= rho;
            }
            dir
        })
        .collect())
}

pub(crate) fn sample_sphere_point(d: usize, rho: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut dir = unit_direction(d, rng);
    for c in dir.iter_mut() {
        *c *= rho;
    }
    dir
}

pub(crate) fn sample_shell_point(d: usize, r: f64, e: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    draw_annulus_point(d, r, e, Norm::Euclidean, rng)
}

/// Chunked, order-fixed Monte Carlo mean of `eval` over points drawn by
/// `draw`. Non-finite evaluations (isolated singular hits) are resampled.
pub(crate) fn mc_mean_complex<D, F>(
    n: usize,
    seed: u64,
    draw: D,
    eval: F,
) -> Result<(Complex64, f64)>
where
    D: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let n_chunks = n.div_ceil(CHUNK);
    let partials: Vec<Result<(Complex64, f64)>> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = stream_rng(seed, ci as u64 + 1);
            let count = if ci + 1 == n_chunks {
                n - ci * CHUNK
            } else {
                CHUNK
            };
            let mut sum = Complex64::new(0.0, 0.0);
            let mut sumsq = 0.0;
            for _ in 0..count {
                let mut tries = 0;
                let v = loop {
                    let t = draw(&mut rng);
                    let v = eval(&t);
                    if v.re.is_finite() && v.im.is_finite() {
                        break v;
                    }
                    tries += 1;
                    if tries > 64 {
                        return Err(Error::Unsupported(
                            "field evaluation is persistently non-finite on the region".into(),
                        ));
                    }
                };
                sum += v;
                sumsq += v.norm_sqr();
            }
            Ok((sum, sumsq))
        })
        .collect();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sumsq = 0.0;
    for p in partials {
        let (s, q) = p?;
        sum += s;
        sumsq += q;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sumsq - nf * mean.norm_sqr()) / (nf - 1.0)).max(0.0);
    Ok((mean, (var / nf).sqrt()))
}

/// Nodes of the product rule on the annulus {r−e ≤ ‖t‖ ≤ r} ⊂ R^d,
/// d ∈ {1,2,3}: (weight, point) with weights proportional to Lebesgue
/// measure. Angular sub-grids use midpoint rules (exact for periodic
/// smooth integrands); the polar angle in d = 3 uses Gauss–Legendre in
/// cos θ.
fn product_nodes(d: usize, r: f64, e: f64, n_rad: usize, n_ang: usize) -> Vec<(f64, Vec<f64>)> {
    let mut nodes = Vec::new();
    match d {
        1 => {
            // two intervals [-r, -r+e] and [r-e, r]
            let rule = gauss_legendre(n_rad);
            for (&xi, &wi) in rule.nodes.iter().zip(&rule.weights) {
                let right = (r - e) + 0.5 * e * (xi + 1.0);
                let w = 0.5 * e * wi;
                nodes.push((w, vec![right]));
                nodes.push((w, vec![-right]));
            }
        }
        2 => {
            let rule = gauss_legendre(n_rad);
            for (&xi, &wi) in rule.nodes.iter().zip(&rule.weights) {
                let rho = (r - e) + 0.5 * e * (xi + 1.0);
                let w_rad = 0.5 * e * wi * rho;
                for j in 0..n_ang {
                    let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n_ang as f64;
                    nodes.push((w_rad / n_ang as f64, vec![rho * theta.cos(), rho * theta.sin()]));
                }
            }
        }
        3 => {
            let rad = gauss_legendre(n_rad);
            let pol = gauss_legendre(n_ang);
            let n_az = 2 * n_ang;
            for (&xi, &wi) in rad.nodes.iter().zip(&rad.weights) {
                let rho = (r - e) + 0.5 * e * (xi + 1.0);
                let w_rad = 0.5 * e * wi * rho * rho;
                for (&u, &wu) in pol.nodes.iter().zip(&pol.weights) {
                    let sin_t = (1.0 - u * u).max(0.0).sqrt();
                    for j in 0..n_az {
                        let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n_az as f64;
                        nodes.push((
                            w_rad * wu / n_az as f64,
                            vec![rho * sin_t * phi.cos(), rho * sin_t * phi.sin(), rho * u],
                        ));
                    }
                }
            }
        }
        _ => unreachable!("validated: product rule requires d <= 3"),
    }
    nodes
}

fn sphere_nodes(d: usize, rho: f64, n_ang: usize) -> Vec<(f64, Vec<f64>)> {
    let mut nodes = Vec::new();
    match d {
        1 => {
            nodes.push((0.5, vec![rho]));
            nodes.push((0.5, vec![-rho]));
        }
        2 => {
            for j in 0..n_ang {
                let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n_ang as f64;
                nodes.push((
                    1.0 / n_ang as f64,
                    vec![rho * theta.cos(), rho * theta.sin()],
                ));
            }
        }
        3 => {
            let pol = gauss_legendre(n_ang);
            let n_az = 2 * n_ang;
            for (&u, &wu) in pol.nodes.iter().zip(&pol.weights) {
                let sin_t = (1.0 - u * u).max(0.0).sqrt();
                for j in 0..n_az {
                    let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n_az as f64;
                    nodes.push((
                        0.5 * wu / n_az as f64,
                        vec![rho * sin_t * phi.cos(), rho * sin_t * phi.sin(), rho * u],
                    ));
                }
            }
        }
        _ => unreachable!("validated: product rule requires d <= 3"),
    }
    nodes
}

/// Weighted mean over explicit nodes; numerator and denominator accumulate
/// in the same order so constant integrands average to the constant
/// exactly. Non-finite node values (grid coincidences with an integrable
/// singularity) are retried with a slightly rotated node.
pub(crate) fn weighted_mean_complex<F>(nodes: &[(f64, Vec<f64>)], eval: F) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Complex64,
{
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (w, t) in nodes {
        let mut v = eval(t);
        if !(v.re.is_finite() && v.im.is_finite()) {
            let mut t2 = t.clone();
            t2[0] += 1e-9 * (1.0 + t[0].abs());
            v = eval(&t2);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Unsupported(
                    "field evaluation is persistently non-finite on the region".into(),
                ));
            }
        }
        num += *w * v;
        den += *w;
    }
    Ok(num / den)
}

fn eval_shifted<'a>(
    field: &'a ScalarField,
    x: &[f64],
) -> impl Fn(&[f64]) -> Complex64 + Sync + 'a {
    let x = x.to_vec();
    move |t: &[f64]| {
        let pt: Vec<f64> = x.iter().zip(t).map(|(a, b)| a + b).collect();
        match field.eval(&pt) {
            Ok(v) => Complex64::new(v, 0.0),
            Err(_) => Complex64::new(f64::NAN, 0.0),
        }
    }
}

fn check_point(d: usize, x: &[f64]) -> Result<()> {
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    Ok(())
}

fn check_field_dim(field: &ScalarField, d: usize) -> Result<()> {
    if let Some(fd) = field.dim_constraint() {
        if fd != d {
            return Err(Error::DimensionMismatch {
                expected: fd,
                got: d,
            });
        }
    }
    Ok(())
}

/// Mean of the field over x + {r−e ≤ ‖t‖ ≤ r}.
pub fn annulus_average(
    field: &ScalarField,
    x: &[f64],
    r: f64,
    e: f64,
    norm: Norm,
    scheme: &QuadratureScheme,
) -> Result<Estimate> {
    let d = x.len();
    crate::geometry::annulus_volume(d, r, e, norm)?;
    scheme.validate(d, norm)?;
    check_field_dim(field, d)?;
    let eval = eval_shifted(field, x);
    match *scheme {
        QuadratureScheme::MonteCarlo { n, seed } => {
            let (mean, se) =
                mc_mean_complex(n, seed, |rng| draw_annulus_point(d, r, e, norm, rng), eval)?;
            Ok(Estimate {
                value: mean.re,
                error: se,
            })
        }
        QuadratureScheme::Product { n_rad, n_ang } => {
            let full = weighted_mean_complex(&product_nodes(d, r, e, n_rad, n_ang), &eval)?;
            let half = weighted_mean_complex(
                &product_nodes(d, r, e, (n_rad / 2).max(4), (n_ang / 2).max(8)),
                &eval,
            )?;
            Ok(Estimate {
                value: full.re,
                error: (full - half).norm(),
            })
        }
    }
}

/// Mean of the field over the sphere of radius ρ centered at x
/// (uniform surface probability).
pub fn sphere_average(
    field: &ScalarField,
    x: &[f64],
    rho: f64,
    scheme: &QuadratureScheme,
) -> Result<Estimate> {
    let d = x.len();
    check_dim(d)?;
    if !(rho > 0.0) {
        return Err(Error::domain("sphere radius", "rho > 0", rho));
    }
    scheme.validate(d, Norm::Euclidean)?;
    check_field_dim(field, d)?;
    check_point(d, x)?;
    let eval = eval_shifted(field, x);
    match *scheme {
        QuadratureScheme::MonteCarlo { n, seed } => {
            let (mean, se) = mc_mean_complex(
                n,
                seed,
                |rng| {
                    let mut dir = unit_direction(d, rng);
                    for c in dir.iter_mut() {
                        *c *= rho;
                    }
                    dir
                },
                eval,
            )?;
            Ok(Estimate {
                value: mean.re,
                error: se,
            })
        }
        QuadratureScheme::Product { n_ang, .. } => {
            let full = weighted_mean_complex(&sphere_nodes(d, rho, n_ang), &eval)?;
            let half = weighted_mean_complex(&sphere_nodes(d, rho, (n_ang / 2).max(8)), &eval)?;
            Ok(Estimate {
                value: full.re,
                error: (full - half).norm(),
            })
        }
    }
}

pub(crate) fn annulus_mc_mean(
    d: usize,
    r: f64,
    e: f64,
    norm: Norm,
    n: usize,
    seed: u64,
    eval: impl Fn(&[f64]) -> Complex64 + Sync,
) -> Result<(Complex64, f64)> {
    mc_mean_complex(n, seed, |rng| draw_annulus_point(d, r, e, norm, rng), eval)
}

pub(crate) fn annulus_product_mean(
    d: usize,
    r: f64,
    e: f64,
    n_rad: usize,
    n_ang: usize,
    eval: impl Fn(&[f64]) -> Complex64 + Sync,
) -> Result<(Complex64, f64)> {
    let full = weighted_mean_complex(&product_nodes(d, r, e, n_rad, n_ang), &eval)?;
    let half = weighted_mean_complex(
        &product_nodes(d, r, e, (n_rad / 2).max(4), (n_ang / 2).max(8)),
        &eval,
    )?;
    Ok((full, (full - half).norm()))
}
