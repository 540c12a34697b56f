//! Annuli, balls and spheres in the ℓ² and ℓ∞ norms: volumes, membership,
//! and thickness functions r ↦ e(r).

use crate::error::{Error, Result};
use crate::{check_dim, MAX_DIM};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Which norm carves the annulus out of R^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Euclidean,
    Max,
}

impl Norm {
    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            Norm::Euclidean => euclidean_norm(v),
            Norm::Max => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }
}

impl FromStr for Norm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" | "l2" => Ok(Norm::Euclidean),
            "max" | "linf" => Ok(Norm::Max),
            other => Err(Error::Parse(format!(
                "unknown norm `{other}` (expected `euclidean` or `max`)"
            ))),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::Euclidean => write!(f, "euclidean"),
            Norm::Max => write!(f, "max"),
        }
    }
}

pub fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Volume of the unit euclidean ball, v_d = π^{d/2}/Γ(d/2+1).
///
/// Computed by the recurrence v_d = v_{d-2}·2π/d, exact to rounding.
pub fn unit_ball_volume(d: usize) -> f64 {
    debug_assert!((1..=MAX_DIM).contains(&d));
    let mut v = if d % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if d % 2 == 0 { 2 } else { 3 };
    while k <= d {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    v
}

/// Surface area of the unit euclidean sphere, s_d = 2π^{d/2}/Γ(d/2) = d·v_d.
///
/// For d = 1 this is the counting measure of {±1}, i.e. 2.
pub fn unit_sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

/// r^d − (r−e)^d in factored form: e·Σ_j r^{d−1−j}(r−e)^j.
///
/// The direct difference cancels catastrophically for e ≪ r; the factored
/// sum is a product of exact-sign terms and stays fully accurate down to
/// e = 1e−16·r.
pub fn radial_power_gap(d: usize, r: f64, e: f64) -> f64 {
    let inner = r - e;
    let mut sum = 0.0;
    for j in 0..d {
        sum += r.powi((d - 1 - j) as i32) * inner.powi(j as i32);
    }
    e * sum
}

fn check_annulus(d: usize, r: f64, e: f64) -> Result<()> {
    check_dim(d)?;
    if !(r > 0.0) {
        return Err(Error::domain("outer radius r", "r > 0", r));
    }
    if !(e > 0.0) {
        return Err(Error::domain("thickness e", "e > 0", e));
    }
    if e > r {
        return Err(Error::domain("thickness e", "e <= r", e));
    }
    Ok(())
}

/// Lebesgue measure of the annulus {r−e ≤ ‖t‖ ≤ r} in the given norm.
pub fn annulus_volume(d: usize, r: f64, e: f64, norm: Norm) -> Result<f64> {
    check_annulus(d, r, e)?;
    let gap = radial_power_gap(d, r, e);
    Ok(match norm {
        Norm::Euclidean => unit_ball_volume(d) * gap,
        Norm::Max => 2f64.powi(d as i32) * gap,
    })
}

/// Surface area of the euclidean sphere of radius ρ in R^d.
pub fn sphere_area(d: usize, rho: f64) -> Result<f64> {
    check_dim(d)?;
    if !(rho > 0.0) {
        return Err(Error::domain("sphere radius", "rho > 0", rho));
    }
    Ok(unit_sphere_area(d) * rho.powi((d - 1) as i32))
}

/// A concrete annulus: center, outer radius, thickness and norm.
///
/// e = r degenerates to the ball of radius r.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusSpec {
    pub dim: usize,
    pub center: Vec<f64>,
    pub outer: f64,
    pub thickness: f64,
    pub norm: Norm,
}

impl AnnulusSpec {
    pub fn new(center: Vec<f64>, outer: f64, thickness: f64, norm: Norm) -> Result<Self> {
        let dim = center.len();
        check_annulus(dim, outer, thickness)?;
        Ok(AnnulusSpec {
            dim,
            center,
            outer,
            thickness,
            norm,
        })
    }

    pub fn centered(dim: usize, outer: f64, thickness: f64, norm: Norm) -> Result<Self> {
        Self::new(vec![0.0; dim], outer, thickness, norm)
    }

    pub fn volume(&self) -> f64 {
        annulus_volume(self.dim, self.outer, self.thickness, self.norm)
            .expect("validated at construction")
    }

    /// Membership test: r−e ≤ ‖t − center‖ ≤ r in the spec's norm.
    pub fn contains(&self, t: &[f64]) -> Result<bool> {
        if t.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: t.len(),
            });
        }
        let diff: Vec<f64> = t
            .iter()
            .zip(&self.center)
            .map(|(a, b)| a - b)
            .collect();
        let dist = self.norm.of(&diff);
        Ok(dist >= self.outer - self.thickness && dist <= self.outer)
    }
}

/// Result of evaluating a thickness function: the (possibly clamped)
/// thickness and whether clamping to e = r fired.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thickness {
    pub value: f64,
    pub clamped: bool,
}

/// A rule r ↦ e(r) with 0 < e(r) ≤ r, total on (0, ∞).
///
/// Rules that exceed r are clamped to r and report it via the `clamped`
/// flag rather than failing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ThicknessFunction {
    /// e(r) = r: annuli degenerate to balls.
    Ball,
    /// e(r) = γ·r with γ ∈ (0, 1].
    Proportional { gamma: f64 },
    /// e(r) = e₀ (clamped to r below r = e₀).
    Constant { e0: f64 },
    /// e(r) = c·r^α with c > 0 and α ∈ [0, 1).
    PowerLaw { c: f64, alpha: f64 },
    /// Log-linear interpolation through sorted (rᵢ, eᵢ) nodes; constant
    /// extension by the nearest node outside the tabulated range.
    Table { nodes: Vec<(f64, f64)> },
}

impl ThicknessFunction {
    pub fn proportional(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::domain("gamma", "0 < gamma <= 1", gamma));
        }
        Ok(ThicknessFunction::Proportional { gamma })
    }

    pub fn constant(e0: f64) -> Result<Self> {
        if !(e0 > 0.0) {
            return Err(Error::domain("e0", "e0 > 0", e0));
        }
        Ok(ThicknessFunction::Constant { e0 })
    }

    pub fn power_law(c: f64, alpha: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::domain("c", "c > 0", c));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::domain("alpha", "0 <= alpha < 1", alpha));
        }
        Ok(ThicknessFunction::PowerLaw { c, alpha })
    }

    /// Table nodes must have strictly increasing radii and positive thickness.
    pub fn table(nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Empty("thickness table"));
        }
        for win in nodes.windows(2) {
            if !(win[1].0 > win[0].0) {
                return Err(Error::domain(
                    "table radii",
                    "strictly increasing",
                    win[1].0,
                ));
            }
        }
        for &(r, e) in &nodes {
            if !(r > 0.0) {
                return Err(Error::domain("table radius", "r > 0", r));
            }
            if !(e > 0.0) {
                return Err(Error::domain("table thickness", "e > 0", e));
            }
        }
        Ok(ThicknessFunction::Table { nodes })
    }

    /// Load a `table:` CSV file with header `r,e`.
    pub fn table_from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Parse(e.to_string()))?;
        let mut nodes = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            if record.len() < 2 {
                return Err(Error::Parse(format!(
                    "thickness table row needs 2 columns, got {}",
                    record.len()
                )));
            }
            let r: f64 = record[0]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad table radius `{}`", &record[0])))?;
            let e: f64 = record[1]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad table thickness `{}`", &record[1])))?;
            nodes.push((r, e));
        }
        Self::table(nodes)
    }

    /// Evaluate e(r), clamping to r. Errors only for r ≤ 0.
    pub fn thickness(&self, r: f64) -> Result<Thickness> {
        if !(r > 0.0) {
            return Err(Error::domain("radius r", "r > 0", r));
        }
        let raw = match self {
            ThicknessFunction::Ball => r,
            ThicknessFunction::Proportional { gamma } => gamma * r,
            ThicknessFunction::Constant { e0 } => *e0,
            ThicknessFunction::PowerLaw { c, alpha } => c * r.powf(*alpha),
            ThicknessFunction::Table { nodes } => table_interpolate(nodes, r),
        };
        if raw > r {
            Ok(Thickness {
                value: r,
                clamped: true,
            })
        } else {
            Ok(Thickness {
                value: raw,
                clamped: false,
            })
        }
    }
}

fn table_interpolate(nodes: &[(f64, f64)], r: f64) -> f64 {
    let first = nodes[0];
    let last = nodes[nodes.len() - 1];
    if r <= first.0 {
        return first.1;
    }
    if r >= last.0 {
        return last.1;
    }
    let idx = nodes.partition_point(|&(ri, _)| ri < r);
    let (r0, e0) = nodes[idx - 1];
    let (r1, e1) = nodes[idx];
    let w = (r.ln() - r0.ln()) / (r1.ln() - r0.ln());
    ((1.0 - w) * e0.ln() + w * e1.ln()).exp()
}

/// Thickness mini-grammar:
/// `ball` | `prop:<γ>` | `const:<e0>` | `pow:<c>,<alpha>` | `table:<path>`.
impl FromStr for ThicknessFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        match head {
            "ball" => Ok(ThicknessFunction::Ball),
            "prop" => {
                let gamma = parse_f64(spec_params(rest, s)?, "gamma")?;
                ThicknessFunction::proportional(gamma)
            }
            "const" => {
                let e0 = parse_f64(spec_params(rest, s)?, "e0")?;
                ThicknessFunction::constant(e0)
            }
            "pow" => {
                let rest = spec_params(rest, s)?;
                let (c, alpha) = rest.split_once(',').ok_or_else(|| {
                    Error::Parse(format!("`pow:` expects `pow:<c>,<alpha>`, got `{s}`"))
                })?;
                ThicknessFunction::power_law(parse_f64(c, "c")?, parse_f64(alpha, "alpha")?)
            }
            "table" => ThicknessFunction::table_from_csv(Path::new(spec_params(rest, s)?)),
            other => Err(Error::Parse(format!("unknown thickness rule `{other}`"))),
        }
    }
}

impl fmt::Display for ThicknessFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThicknessFunction::Ball => write!(f, "ball"),
            ThicknessFunction::Proportional { gamma } => write!(f, "prop:{gamma}"),
            ThicknessFunction::Constant { e0 } => write!(f, "const:{e0}"),
            ThicknessFunction::PowerLaw { c, alpha } => write!(f, "pow:{c},{alpha}"),
            ThicknessFunction::Table { nodes } => write!(f, "table[{} nodes]", nodes.len()),
        }
    }
}

pub(crate) fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("expected a number for {what}, got `{s}`")))
}

pub(crate) fn spec_params<'a>(rest: Option<&'a str>, spec: &str) -> Result<&'a str> {
    rest.ok_or_else(|| Error::Parse(format!("spec `{spec}` is missing parameters")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn ball_volumes() {
        assert_relative_eq!(unit_ball_volume(1), 2.0);
        assert_relative_eq!(unit_ball_volume(2), PI);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, epsilon = 1e-15);
        assert_relative_eq!(unit_ball_volume(4), PI * PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn annulus_volume_examples() {
        // full disc
        assert_relative_eq!(
            annulus_volume(2, 1.0, 1.0, Norm::Euclidean).unwrap(),
            PI,
            epsilon = 1e-12
        );
        // ring between radii 1 and 2
        assert_relative_eq!(
            annulus_volume(2, 2.0, 1.0, Norm::Euclidean).unwrap(),
            3.0 * PI,
            epsilon = 1e-12
        );
        // cube of side 2
        assert_relative_eq!(annulus_volume(3, 1.0, 1.0, Norm::Max).unwrap(), 8.0);
    }

    #[test]
    fn annulus_volume_rejects_bad_geometry() {
        assert!(annulus_volume(2, 1.0, 0.0, Norm::Euclidean).is_err());
        assert!(annulus_volume(2, 1.0, 1.5, Norm::Euclidean).is_err());
        assert!(annulus_volume(0, 1.0, 0.5, Norm::Euclidean).is_err());
        assert!(annulus_volume(11, 1.0, 0.5, Norm::Euclidean).is_err());
    }

    #[test]
    fn radial_gap_is_stable_for_thin_shells() {
        // naive difference loses everything at e = 1e-16·r
        let r = 1.5;
        let e = 1e-16;
        let gap = radial_power_gap(2, r, e);
        assert_relative_eq!(gap, 2.0 * r * e, max_relative = 1e-12);
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(2, 1.0).unwrap(), 2.0 * PI);
        assert_relative_eq!(sphere_area(3, 2.0).unwrap(), 16.0 * PI, epsilon = 1e-12);
        assert_relative_eq!(sphere_area(1, 5.0).unwrap(), 2.0);
        assert!(sphere_area(3, 0.0).is_err());
    }

    #[test]
    fn thickness_variants() {
        let f = ThicknessFunction::proportional(0.5).unwrap();
        let t = f.thickness(4.0).unwrap();
        assert_eq!((t.value, t.clamped), (2.0, false));

        let f = ThicknessFunction::constant(3.0).unwrap();
        let t = f.thickness(2.0).unwrap();
        assert_eq!((t.value, t.clamped), (2.0, true));

        let f = ThicknessFunction::power_law(1.0, 0.5).unwrap();
        let t = f.thickness(9.0).unwrap();
        assert_relative_eq!(t.value, 3.0);
        assert!(!t.clamped);

        assert!(f.thickness(0.0).is_err());
        assert!(f.thickness(-1.0).is_err());
    }

    #[test]
    fn ball_rule_never_clamps() {
        let f = ThicknessFunction::Ball;
        for r in [1e-9, 0.5, 1.0, 1e6] {
            let t = f.thickness(r).unwrap();
            assert_eq!(t.value, r);
            assert!(!t.clamped);
        }
    }

    #[test]
    fn table_log_linear_interpolation() {
        // power law e = r^0.5 sampled at two nodes interpolates exactly
        let f = ThicknessFunction::table(vec![(1.0, 1.0), (100.0, 10.0)]).unwrap();
        let t = f.thickness(10.0).unwrap();
        assert_relative_eq!(t.value, 10f64.sqrt(), max_relative = 1e-12);
        // nearest-node extension
        assert_relative_eq!(f.thickness(0.5).unwrap().value, 0.5); // clamped to r
        assert!(f.thickness(0.5).unwrap().clamped);
        assert_relative_eq!(f.thickness(1000.0).unwrap().value, 10.0);
    }

    #[test]
    fn table_validation() {
        assert!(ThicknessFunction::table(vec![]).is_err());
        assert!(ThicknessFunction::table(vec![(2.0, 1.0), (1.0, 1.0)]).is_err());
        assert!(ThicknessFunction::table(vec![(1.0, 0.0)]).is_err());
    }

    #[test]
    fn contains_examples() {
        let ann = AnnulusSpec::centered(2, 2.0, 1.0, Norm::Euclidean).unwrap();
        assert!(ann.contains(&[1.5, 0.0]).unwrap());
        assert!(!ann.contains(&[0.5, 0.0]).unwrap());
        let cube = AnnulusSpec::centered(2, 2.0, 1.0, Norm::Max).unwrap();
        assert!(cube.contains(&[0.5, 1.2]).unwrap());
        assert!(ann.contains(&[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn thickness_grammar() {
        assert_eq!(
            "ball".parse::<ThicknessFunction>().unwrap(),
            ThicknessFunction::Ball
        );
        assert_eq!(
            "prop:0.5".parse::<ThicknessFunction>().unwrap(),
            ThicknessFunction::Proportional { gamma: 0.5 }
        );
        assert_eq!(
            "const:1e-4".parse::<ThicknessFunction>().unwrap(),
            ThicknessFunction::Constant { e0: 1e-4 }
        );
        assert_eq!(
            "pow:1,0.5".parse::<ThicknessFunction>().unwrap(),
            ThicknessFunction::PowerLaw { c: 1.0, alpha: 0.5 }
        );
        assert!("prop:2".parse::<ThicknessFunction>().is_err());
        assert!("pow:1".parse::<ThicknessFunction>().is_err());
        assert!("wedge:1".parse::<ThicknessFunction>().is_err());
    }

    #[test]
    fn volume_additivity() {
        // annulus + inner ball = outer ball, 1e-12 relative
        for d in 1..=MAX_DIM {
            let (r, e) = (2.7, 1.3);
            let ann = annulus_volume(d, r, e, Norm::Euclidean).unwrap();
            let inner = unit_ball_volume(d) * (r - e).powi(d as i32);
            let outer = unit_ball_volume(d) * r.powi(d as i32);
            assert_relative_eq!(ann + inner, outer, max_relative = 1e-12);
        }
    }
}
