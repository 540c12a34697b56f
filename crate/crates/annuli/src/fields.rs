//! The registry of scalar test functions on R^d.
//!
//! The central entry is the critical-integrability field
//! f(x) = −1/(‖x‖^{d−1}·ln‖x‖) on the punctured ball of radius 1/2 (zero
//! outside), whose d/(d−1)-norm is finite while its thin-annulus averages
//! grow like ln|ln e|. Its rescaling f(x/h) and a few simple reference
//! fields (ball indicator, radial power, trigonometric wave) complete the
//! registry.

use crate::error::{Error, Result};
use crate::geometry::{euclidean_norm, parse_f64, spec_params, unit_sphere_area};
use crate::quad::integrate_geometric;
use crate::{check_dim, MAX_DIM};


/// A scalar field from the closed registry.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarField {
    /// −1/(‖x‖^{d−1} ln ‖x‖) on 0 < ‖x‖ < 1/2, zero on ‖x‖ ≥ 1/2.
    Counterexample { dim: usize },
    /// The counterexample evaluated at x/h (support radius h/2).
    ScaledCounterexample { dim: usize, h: f64 },
    /// Indicator of the closed ball of radius R.
    BallIndicator { radius: f64 },
    /// ‖x‖^β (β = 0 is the constant 1).
    RadialPower { beta: f64 },
    /// cos(2π k·x) for an integer frequency vector k.
    TrigWave { freq: Vec<i64> },
}

/// Radial structure of a field, used by deterministic radial evaluators.
#[derive(Debug, Clone, Copy)]
pub enum RadialKind {
    Counterexample { dim: usize, h: f64 },
    BallIndicator { radius: f64 },
    RadialPower { beta: f64 },
}

impl ScalarField {
    pub fn counterexample(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(ScalarField::Counterexample { dim })
    }

    pub fn scaled_counterexample(dim: usize, h: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(h > 0.0) {
            return Err(Error::domain("scale h", "h > 0", h));
        }
        Ok(ScalarField::ScaledCounterexample { dim, h })
    }

    pub fn ball_indicator(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::domain("indicator radius", "R > 0", radius));
        }
        Ok(ScalarField::BallIndicator { radius })
    }

    /// Field mini-grammar:
    /// `cex` | `cex-scaled:<h>` | `ball-ind:<R>` | `radial-pow:<beta>` |
    /// `trig:<k1>,...,<kd>`. `dim` fixes the ambient dimension for the
    /// counterexample variants and validates the wave vector length.
    pub fn parse(s: &str, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        match head {
            "cex" => ScalarField::counterexample(dim),
            "cex-scaled" => {
                ScalarField::scaled_counterexample(dim, parse_f64(spec_params(rest, s)?, "h")?)
            }
            "ball-ind" => ScalarField::ball_indicator(parse_f64(spec_params(rest, s)?, "R")?),
            "radial-pow" => Ok(ScalarField::RadialPower {
                beta: parse_f64(spec_params(rest, s)?, "beta")?,
            }),
            "trig" => {
                let freq: Vec<i64> = spec_params(rest, s)?
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad wave component `{t}`")))
                    })
                    .collect::<Result<_>>()?;
                if freq.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: freq.len(),
                    });
                }
                Ok(ScalarField::TrigWave { freq })
            }
            other => Err(Error::Parse(format!("unknown field `{other}`"))),
        }
    }

    /// Dimension the field is pinned to, if any.
    pub fn dim_constraint(&self) -> Option<usize> {
        match self {
            ScalarField::Counterexample { dim }
            | ScalarField::ScaledCounterexample { dim, .. } => Some(*dim),
            ScalarField::TrigWave { freq } => Some(freq.len()),
            _ => None,
        }
    }

    pub fn as_radial(&self) -> Option<RadialKind> {
        match *self {
            ScalarField::Counterexample { dim } => Some(RadialKind::Counterexample { dim, h: 1.0 }),
            ScalarField::ScaledCounterexample { dim, h } => {
                Some(RadialKind::Counterexample { dim, h })
            }
            ScalarField::BallIndicator { radius } => Some(RadialKind::BallIndicator { radius }),
            ScalarField::RadialPower { beta } => Some(RadialKind::RadialPower { beta }),
            ScalarField::TrigWave { .. } => None,
        }
    }

    /// Evaluate the field. The counterexample variants return +∞ at their
    /// singular origin; quadrature drivers resample or perturb such hits
    /// (the singularity is integrable and the event has measure zero).
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if let Some(d) = self.dim_constraint() {
            if x.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: x.len(),
                });
            }
        }
        if x.is_empty() || x.len() > MAX_DIM {
            return Err(Error::DimensionOutOfRange { got: x.len() });
        }
        Ok(match self {
            ScalarField::Counterexample { dim } => {
                counterexample_profile(*dim, euclidean_norm(x), 1.0)
            }
            ScalarField::ScaledCounterexample { dim, h } => {
                counterexample_profile(*dim, euclidean_norm(x), *h)
            }
            ScalarField::BallIndicator { radius } => {
                if euclidean_norm(x) <= *radius {
                    1.0
                } else {
                    0.0
                }
            }
            ScalarField::RadialPower { beta } => euclidean_norm(x).powf(*beta),
            ScalarField::TrigWave { freq } => {
                let phase: f64 = freq
                    .iter()
                    .zip(x)
                    .map(|(&k, &xi)| k as f64 * xi)
                    .sum();
                (2.0 * std::f64::consts::PI * phase).cos()
            }
        })
    }
}

impl RadialKind {
    /// Field value at distance ρ from the origin.
    pub fn profile(&self, rho: f64) -> f64 {
        match *self {
            RadialKind::Counterexample { dim, h } => counterexample_profile(dim, rho, h),
            RadialKind::BallIndicator { radius } => {
                if rho <= radius {
                    1.0
                } else {
                    0.0
                }
            }
            RadialKind::RadialPower { beta } => rho.powf(beta),
        }
    }

    /// Radius outside which the profile is identically zero (None: unbounded).
    pub fn support_radius(&self) -> Option<f64> {
        match *self {
            RadialKind::Counterexample { h, .. } => Some(0.5 * h),
            RadialKind::BallIndicator { radius } => Some(radius),
            RadialKind::RadialPower { .. } => None,
        }
    }
}

fn counterexample_profile(dim: usize, rho: f64, h: f64) -> f64 {
    let u = rho / h;
    if u >= 0.5 {
        0.0
    } else if u == 0.0 {
        f64::INFINITY
    } else {
        -1.0 / (u.powi(dim as i32 - 1) * u.ln())
    }
}

/// Closed form and quadrature cross-check for ∫ f^{d/(d−1)} over R^d,
/// f the (unscaled) counterexample in dimension d.
#[derive(Debug, Clone, Copy)]
pub struct CriticalNorm {
    /// s_d·(d−1)·(ln 2)^{−1/(d−1)}
    pub closed_form: f64,
    /// Radial quadrature of s_d·ρ^{−1}|ln ρ|^{−d/(d−1)} over (0, 1/2).
    pub quadrature: f64,
}

/// The d/(d−1)-integral of the counterexample, with its quadrature
/// cross-check. Errors if the two routes disagree by more than 0.5%.
pub fn critical_norm(d: usize) -> Result<CriticalNorm> {
    check_dim(d)?;
    if d < 2 {
        return Err(Error::domain("dimension", "d >= 2", d as f64));
    }
    let sd = unit_sphere_area(d);
    let p = d as f64 / (d as f64 - 1.0);
    let closed_form = sd * (d as f64 - 1.0) * std::f64::consts::LN_2.powf(-1.0 / (d as f64 - 1.0));

    // In u = −ln ρ the integrand is s_d·u^{−p} on (ln 2, ∞); log-spaced
    // panels resolve the power law, truncated where the tail is < 0.25%.
    let u_max = 1e8;
    let quadrature = sd * integrate_geometric(std::f64::consts::LN_2, u_max, 12, 8, |u| u.powf(-p));

    let rel = (closed_form - quadrature).abs() / closed_form;
    if rel > 5e-3 {
        return Err(Error::Unsupported(format!(
            "critical norm cross-check failed: closed {closed_form} vs quadrature {quadrature}"
        )));
    }
    Ok(CriticalNorm {
        closed_form,
        quadrature,
    })
}

/// ∫ |f|^p over R^d.
///
/// Counterexample variants: closed form at the critical exponent
/// p = d/(d−1), radial quadrature for 1 ≤ p below it, error above it
/// (the integral diverges). Ball indicator: v_d·R^d for every p. Fields
/// without a finite norm over R^d are rejected.
pub fn p_norm_integral(field: &ScalarField, p: f64, d: usize) -> Result<f64> {
    check_dim(d)?;
    if !(p >= 1.0) {
        return Err(Error::domain("exponent p", "p >= 1", p));
    }
    if let Some(fd) = field.dim_constraint() {
        if fd != d {
            return Err(Error::DimensionMismatch {
                expected: fd,
                got: d,
            });
        }
    }
    let critical = d as f64 / (d as f64 - 1.0);
    match field {
        ScalarField::BallIndicator { radius } => {
            Ok(crate::geometry::unit_ball_volume(d) * radius.powi(d as i32))
        }
        ScalarField::Counterexample { .. } => counterexample_p_norm(d, p, 1.0, critical),
        ScalarField::ScaledCounterexample { h, .. } => {
            // substitution x → x/h scales the integral by h^d
            counterexample_p_norm(d, p, *h, critical)
        }
        ScalarField::RadialPower { .. } | ScalarField::TrigWave { .. } => Err(Error::Unsupported(
            "field has infinite p-norm over R^d".into(),
        )),
    }
}

fn counterexample_p_norm(d: usize, p: f64, h: f64, critical: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain("dimension", "d >= 2", d as f64));
    }
    let scale = h.powi(d as i32);
    if (p - critical).abs() < 1e-12 {
        return Ok(scale * critical_norm(d)?.closed_form);
    }
    if p > critical {
        return Err(Error::Unsupported(format!(
            "counterexample p-norm diverges for p = {p} > d/(d-1) = {critical}"
        )));
    }
    // s_d ∫_0^{1/2} ρ^{d-1} (ρ^{1-d}/|ln ρ|)^p dρ, u = −ln ρ:
    // s_d ∫_{ln 2}^∞ e^{-c u} u^{-p} du with c = (d-1)(1-p) + 1 > 0.
    let c = (d as f64 - 1.0) * (1.0 - p) + 1.0;
    let u_max = (80.0 / c).max(40.0);
    let sd = unit_sphere_area(d);
    Ok(scale
        * sd
        * integrate_geometric(std::f64::consts::LN_2, u_max, 24, 10, |u| {
            (-c * u).exp() * u.powf(-p)
        }))
}

/// ln|ln e| / r^{d−1}, the thin-annulus growth scale of the counterexample
/// averages at the point's own radius. Defined for r > 1 and 0 < e ≤ 1/4;
/// `None` outside that region.
pub fn log_log_bound(d: usize, r: f64, e: f64) -> Result<Option<f64>> {
    check_dim(d)?;
    if !(r > 1.0) || !(e > 0.0) || e > 0.25 {
        return Ok(None);
    }
    Ok(Some(e.ln().abs().ln() / r.powi(d as i32 - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{E, PI};

    #[test]
    fn counterexample_at_inverse_e() {
        // ln(1/e) = −1 so the value is exactly e at ‖x‖ = 1/e in d = 2
        let f = ScalarField::counterexample(2).unwrap();
        let v = f.eval(&[1.0 / E, 0.0]).unwrap();
        assert_relative_eq!(v, E, max_relative = 1e-14);
    }

    #[test]
    fn counterexample_vanishes_outside_half_ball() {
        let f = ScalarField::counterexample(3).unwrap();
        assert_eq!(f.eval(&[0.6, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(f.eval(&[0.5, 0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn counterexample_singularity_marker() {
        let f = ScalarField::counterexample(2).unwrap();
        assert!(f.eval(&[0.0, 0.0]).unwrap().is_infinite());
    }

    #[test]
    fn scaled_counterexample_matches_substitution() {
        // oracle: eval of the unscaled field at x/h
        let f = ScalarField::counterexample(2).unwrap();
        let g = ScalarField::scaled_counterexample(2, 10.0).unwrap();
        let x = [10.0 / E, 0.0];
        let xh = [1.0 / E, 0.0];
        assert_relative_eq!(
            g.eval(&x).unwrap(),
            f.eval(&xh).unwrap(),
            max_relative = 1e-13
        );
        assert_relative_eq!(g.eval(&x).unwrap(), E, max_relative = 1e-13);
    }

    #[test]
    fn nonnegative_on_its_domain() {
        let f = ScalarField::counterexample(2).unwrap();
        for i in 1..500 {
            let rho = i as f64 * 1e-3;
            let v = f.eval(&[rho, 0.0]).unwrap();
            assert!(v >= 0.0, "f({rho}) = {v} < 0");
        }
    }

    #[test]
    fn profile_decreasing_near_origin() {
        // ρ ↦ −1/(ρ^{d−1} ln ρ) decreases on (0, e^{−(d−1)})
        for d in [2usize, 3, 4] {
            let f = ScalarField::counterexample(d).unwrap();
            let hi = (-(d as f64 - 1.0)).exp();
            let mut prev = f64::INFINITY;
            for i in 1..=40 {
                let rho = hi * i as f64 / 41.0;
                let mut x = vec![0.0; d];
                x[0] = rho;
                let v = f.eval(&x).unwrap();
                assert!(v < prev, "not decreasing at d={d}, rho={rho}");
                prev = v;
            }
        }
    }

    #[test]
    fn trig_wave_and_radial_power() {
        let w = ScalarField::TrigWave { freq: vec![1, 0] };
        assert_relative_eq!(w.eval(&[0.25, 0.7]).unwrap(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(w.eval(&[0.5, 0.3]).unwrap(), -1.0);
        let one = ScalarField::RadialPower { beta: 0.0 };
        assert_eq!(one.eval(&[3.0, 4.0]).unwrap(), 1.0);
        assert_eq!(one.eval(&[0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn critical_norm_closed_forms() {
        // 2π/ln 2 and 8π/√(ln 2), checked against the radial quadrature
        let n2 = critical_norm(2).unwrap();
        assert_relative_eq!(n2.closed_form, 9.064720283654388, max_relative = 1e-12);
        assert_relative_eq!(n2.closed_form, 2.0 * PI / 2f64.ln(), max_relative = 1e-13);
        let n3 = critical_norm(3).unwrap();
        assert_relative_eq!(n3.closed_form, 30.187498684044698, max_relative = 1e-12);
        let n4 = critical_norm(4).unwrap();
        assert_relative_eq!(n4.closed_form, 66.912795669230633, max_relative = 1e-12);
        for n in [n2, n3, n4] {
            let rel = (n.closed_form - n.quadrature).abs() / n.closed_form;
            assert!(rel < 5e-3, "cross-check off by {rel}");
        }
        assert!(critical_norm(1).is_err());
    }

    #[test]
    fn scaled_norm_law() {
        // ∫ g^{d/(d-1)} = h^d ∫ f^{d/(d-1)} with g = f(·/h)
        let g = ScalarField::scaled_counterexample(2, 2.0).unwrap();
        let v = p_norm_integral(&g, 2.0, 2).unwrap();
        assert_relative_eq!(v, 4.0 * (2.0 * PI / 2f64.ln()), max_relative = 1e-12);
    }

    #[test]
    fn p_norm_rejects_divergent_cases() {
        let f = ScalarField::counterexample(2).unwrap();
        assert!(p_norm_integral(&f, 2.5, 2).is_err());
        let w = ScalarField::TrigWave { freq: vec![1, 1] };
        assert!(p_norm_integral(&w, 2.0, 2).is_err());
    }

    #[test]
    fn subcritical_p_norm_is_finite_and_positive() {
        let f = ScalarField::counterexample(2).unwrap();
        let v = p_norm_integral(&f, 1.0, 2).unwrap();
        // ∫ f = 2π E₁(ln 2); sanity bracket
        assert!(v > 2.0 && v < 3.0, "‖f‖₁ = {v}");
    }

    #[test]
    fn log_log_bound_examples() {
        // e = e^{-e}: ln|ln e| = 1, over r^{d-1} = 2
        let v = log_log_bound(2, 2.0, (-E).exp()).unwrap().unwrap();
        assert_relative_eq!(v, 0.5, max_relative = 1e-12);
        let v = log_log_bound(3, 2.0, 0.25).unwrap().unwrap();
        assert_relative_eq!(v, 0.08165856499457025, max_relative = 1e-12);
        // validity guard
        assert_eq!(log_log_bound(2, 2.0, 0.3).unwrap(), None);
        assert_eq!(log_log_bound(2, 0.9, 0.1).unwrap(), None);
    }

    #[test]
    fn field_grammar() {
        assert_eq!(
            ScalarField::parse("cex", 2).unwrap(),
            ScalarField::Counterexample { dim: 2 }
        );
        assert_eq!(
            ScalarField::parse("cex-scaled:3", 2).unwrap(),
            ScalarField::ScaledCounterexample { dim: 2, h: 3.0 }
        );
        assert_eq!(
            ScalarField::parse("ball-ind:1.5", 3).unwrap(),
            ScalarField::BallIndicator { radius: 1.5 }
        );
        assert_eq!(
            ScalarField::parse("trig:1,0", 2).unwrap(),
            ScalarField::TrigWave { freq: vec![1, 0] }
        );
        assert!(ScalarField::parse("trig:1,0,2", 2).is_err());
        assert!(ScalarField::parse("nope", 2).is_err());
        assert!(ScalarField::parse("ball-ind:-1", 2).is_err());
    }
}
