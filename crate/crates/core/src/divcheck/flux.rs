//! Monte-Carlo flux through a sphere against the volume integral of the
//! divergence over the enclosed shell.

use crate::density::scale_field;
use crate::expr::{divergence, EvalError, Expr, VectorField};

use super::sampling::{sample_region, sphere_directions, unit_ball_volume};
use super::{CheckConfig, CheckError, Region};

/// Inner radius of the shell as a fraction of the sphere radius.
pub const INNER_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxEstimate {
    pub radius: f64,
    pub inner_radius: f64,
    /// `∮ (ρF)·n dΓ` over `|x| = radius`.
    pub flux: f64,
    /// `∫ div(ρF) dV` over `inner_radius ≤ |x| ≤ radius`.
    pub volume_integral: f64,
    pub samples: usize,
}

impl FluxEstimate {
    pub fn relative_difference(&self) -> f64 {
        (self.flux - self.volume_integral).abs() / self.flux.abs().max(self.volume_integral.abs())
    }
}

/// Both integrals use `cfg.samples` points. Without the inner shell the two
/// differ by the flux through `|x| = inner_radius`, which vanishes with it
/// when `ρF` is bounded near the origin.
pub fn flux_sphere_estimate(
    f: &VectorField,
    rho: &Expr,
    r: f64,
    cfg: &CheckConfig,
) -> Result<FluxEstimate, CheckError> {
    cfg.validate()?;
    let n = f.dim();
    if rho.max_var() > n {
        return Err(CheckError::DimensionMismatch(format!(
            "density uses x{} but the field has dimension {n}",
            rho.max_var()
        )));
    }
    let inner = r * INNER_FRACTION;
    let region = Region::annulus(n, inner, r)?;
    let scaled = scale_field(rho, f);
    let div = divergence(&scaled);

    let dirs = sphere_directions(n, cfg.samples, cfg.seed);
    let normal = cfg.exec.map(dirs.len(), |i| -> Result<f64, EvalError> {
        let x: Vec<f64> = dirs[i].iter().map(|d| r * d).collect();
        let v = scaled.eval(&x)?;
        Ok(v.iter().zip(&dirs[i]).map(|(a, b)| a * b).sum())
    });
    let normal = normal.into_iter().collect::<Result<Vec<_>, _>>()?;
    let area = n as f64 * unit_ball_volume(n) * r.powi(n as i32 - 1);
    let flux = area * normal.iter().sum::<f64>() / normal.len() as f64;

    let pts = sample_region(&region, cfg.samples, 0.0, cfg.seed);
    let vals = cfg.exec.map(pts.len(), |i| div.eval(&pts[i]));
    let vals = vals.into_iter().collect::<Result<Vec<_>, _>>()?;
    let shell = unit_ball_volume(n) * (r.powi(n as i32) - inner.powi(n as i32));
    let volume_integral = shell * vals.iter().sum::<f64>() / vals.len() as f64;

    Ok(FluxEstimate {
        radius: r,
        inner_radius: inner,
        flux,
        volume_integral,
        samples: cfg.samples,
    })
}
