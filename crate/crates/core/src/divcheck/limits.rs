//! Origin-limit and integrability estimates along shrinking spheres.

use crate::expr::{EvalError, Expr};

use super::sampling::sphere_directions;
use super::CheckConfig;

/// Magnitudes above this never count as a vanishing limit.
pub const LIMIT_ZERO: f64 = 1e-6;

/// Mean `|v|` of a quantity over spheres of radius `2^{-k}·r_min`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCheck {
    pub quantity: String,
    pub radii: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// Magnitudes never increase and the last one is below [`LIMIT_ZERO`].
    pub is_zero: bool,
    pub error: Option<EvalError>,
}

/// Log-log slope of the mean magnitude against the radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrabilityEstimate {
    pub exponent: f64,
    pub dim: usize,
    /// `exponent > -dim`, a heuristic and never a proof.
    pub likely_integrable: bool,
}

fn sphere_magnitudes(
    expr: &Expr,
    dim: usize,
    r_min: f64,
    cfg: &CheckConfig,
) -> (Vec<f64>, Vec<f64>, Option<EvalError>) {
    let dirs = sphere_directions(dim, cfg.limit_directions, cfg.seed);
    let mut radii = Vec::new();
    let mut mags = Vec::new();
    let mut x = vec![0.0; dim];
    for k in 0..=cfg.limit_steps {
        let r = r_min * 0.5f64.powi(k as i32);
        let mut sum = 0.0;
        for d in &dirs {
            x.iter_mut().zip(d).for_each(|(xi, di)| *xi = r * di);
            match expr.eval(&x) {
                Ok(v) => sum += v.abs(),
                Err(e) => return (radii, mags, Some(e)),
            }
        }
        radii.push(r);
        mags.push(sum / dirs.len() as f64);
    }
    (radii, mags, None)
}

pub(crate) fn origin_limit(
    quantity: &str,
    expr: &Expr,
    dim: usize,
    r_min: f64,
    cfg: &CheckConfig,
) -> LimitCheck {
    let (radii, magnitudes, error) = sphere_magnitudes(expr, dim, r_min, cfg);
    let monotone = magnitudes.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let is_zero = error.is_none() && monotone && magnitudes.last().is_some_and(|&m| m < LIMIT_ZERO);
    LimitCheck {
        quantity: quantity.to_string(),
        radii,
        magnitudes,
        is_zero,
        error,
    }
}

pub(crate) fn integrability(
    expr: &Expr,
    dim: usize,
    r_min: f64,
    cfg: &CheckConfig,
) -> IntegrabilityEstimate {
    let (radii, mags, _) = sphere_magnitudes(expr, dim, r_min, cfg);
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(&mags)
        .filter(|(_, &m)| m > 0.0 && m.is_finite())
        .map(|(&r, &m)| (r.ln(), m.ln()))
        .collect();
    let exponent = if pts.len() < 2 {
        f64::INFINITY
    } else {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };
    IntegrabilityEstimate {
        exponent,
        dim,
        likely_integrable: exponent > -(dim as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    #[test]
    fn polynomial_limit_vanishes() {
        let e = parse_expr("x1^2 + x2^4", 2).unwrap();
        let l = origin_limit("q", &e, 2, 0.1, &CheckConfig::default());
        assert!(l.is_zero);
        assert_eq!(l.radii.len(), 21);
    }

    #[test]
    fn constant_limit_does_not_vanish() {
        let e = parse_expr("1 + x1", 2).unwrap();
        assert!(!origin_limit("q", &e, 2, 0.1, &CheckConfig::default()).is_zero);
    }

    #[test]
    fn singular_limit_reports_error_or_growth() {
        let e = parse_expr("1/(x1^2 + x2^2)", 2).unwrap();
        assert!(!origin_limit("q", &e, 2, 0.1, &CheckConfig::default()).is_zero);
    }

    #[test]
    fn radial_exponent() {
        let e = parse_expr("(x1^2 + x2^2)^-1.5", 2).unwrap();
        let est = integrability(&e, 2, 0.5, &CheckConfig::default());
        assert!((est.exponent + 3.0).abs() < 1e-9);
        assert!(!est.likely_integrable);
        let e = parse_expr("(x1^2 + x2^2)^-0.5", 2).unwrap();
        assert!(integrability(&e, 2, 0.5, &CheckConfig::default()).likely_integrable);
    }
}
