//! Density functions `ρ(x)` and the composite fields `ρ·f`, `ρ⁻¹·f`.
//!
//! Densities are stored symbolically so every divergence taken downstream is
//! exact; only the sweep over the region is approximated by sampling.

use thiserror::Error;

use crate::expr::{Expr, Func, VectorField};
use crate::linalg::{is_positive_definite, Matrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error("alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("P must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("P is not symmetric")]
    NotSymmetric,
    #[error("P is not positive definite")]
    NotPositiveDefinite,
    #[error("expression references x{var} but the density has dimension {dim}")]
    VariableOutOfRange { var: usize, dim: usize },
    #[error("density dimension {density} does not match field dimension {field}")]
    DimensionMismatch { density: usize, field: usize },
}

/// How a density was constructed.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `ρ = |x|^{2α}`.
    NormPower {
        alpha: f64,
    },
    /// `ρ = (xᵀPx)^α`.
    QuadraticForm {
        p: Matrix,
        alpha: f64,
    },
    /// `ρ = |grad S|`, paired with `|grad S⁻¹|` in the inverse slot.
    GradNorm {
        s: Expr,
    },
    Custom,
}

/// A density `ρ` and the function used in the `ρ⁻¹` slot of the checks.
///
/// For every family except [`Family::GradNorm`] the two are reciprocal. The
/// grad-norm family instead carries `|grad S⁻¹| = |grad S|/S²`, which is what
/// the `S`-based conditions put in that slot.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFunction {
    dim: usize,
    rho: Expr,
    rho_inv: Expr,
    family: Family,
}

impl DensityFunction {
    /// A user-supplied pair; `rho_inv` should be `1/rho`.
    pub fn custom(dim: usize, rho: Expr, rho_inv: Expr) -> Result<Self, DensityError> {
        if dim == 0 {
            return Err(DensityError::ZeroDimension);
        }
        for e in [&rho, &rho_inv] {
            if e.max_var() > dim {
                return Err(DensityError::VariableOutOfRange {
                    var: e.max_var(),
                    dim,
                });
            }
        }
        Ok(Self {
            dim,
            rho,
            rho_inv,
            family: Family::Custom,
        })
    }

    /// `ρ = 1`; every density condition reduces to a plain divergence condition.
    pub fn unit(dim: usize) -> Self {
        Self {
            dim,
            rho: Expr::Const(1.0),
            rho_inv: Expr::Const(1.0),
            family: Family::Custom,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rho(&self) -> &Expr {
        &self.rho
    }

    pub fn rho_inv(&self) -> &Expr {
        &self.rho_inv
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Whether `rho · rho_inv = 1` is expected to hold.
    pub fn is_reciprocal_pair(&self) -> bool {
        !matches!(self.family, Family::GradNorm { .. })
    }

    pub fn describe(&self) -> String {
        match &self.family {
            Family::NormPower { alpha } => format!("norm-power |x|^(2*{alpha})"),
            Family::QuadraticForm { p, alpha } => format!("quadratic-form (x'Px)^{alpha}, P = {p}"),
            Family::GradNorm { s } => format!("grad-norm |grad S|, S = {s}"),
            Family::Custom => format!("custom rho = {}", self.rho),
        }
    }

    /// `ρ·f`.
    pub fn scaled_field(&self, field: &VectorField) -> Result<VectorField, DensityError> {
        self.check_dim(field)?;
        Ok(scale_field(&self.rho, field))
    }

    /// `ρ⁻¹·f`.
    pub fn inverse_scaled_field(&self, field: &VectorField) -> Result<VectorField, DensityError> {
        self.check_dim(field)?;
        Ok(scale_field(&self.rho_inv, field))
    }

    fn check_dim(&self, field: &VectorField) -> Result<(), DensityError> {
        if field.dim() != self.dim {
            return Err(DensityError::DimensionMismatch {
                density: self.dim,
                field: field.dim(),
            });
        }
        Ok(())
    }
}

/// A scalar function `S(x)`; positivity is verified by sampling where used.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFunction {
    dim: usize,
    expr: Expr,
}

impl ScalarFunction {
    pub fn new(dim: usize, expr: Expr) -> Result<Self, DensityError> {
        if dim == 0 {
            return Err(DensityError::ZeroDimension);
        }
        if expr.max_var() > dim {
            return Err(DensityError::VariableOutOfRange {
                var: expr.max_var(),
                dim,
            });
        }
        Ok(Self { dim, expr })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

fn check_alpha(alpha: f64) -> Result<(), DensityError> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(DensityError::InvalidAlpha(alpha))
    }
}

/// `ρ = (x1²+...+xn²)^α`, `ρ⁻¹ = (x1²+...+xn²)^(-α)`.
pub fn norm_power_density(alpha: f64, n: usize) -> Result<DensityFunction, DensityError> {
    check_alpha(alpha)?;
    if n == 0 {
        return Err(DensityError::ZeroDimension);
    }
    let r2 = Expr::squared_norm(n);
    Ok(DensityFunction {
        dim: n,
        rho: Expr::pow(r2.clone(), Expr::Const(alpha)),
        rho_inv: Expr::pow(r2, Expr::Const(-alpha)),
        family: Family::NormPower { alpha },
    })
}

/// `xᵀPx` expanded as a polynomial in `x`.
pub fn quadratic_form_expr(p: &Matrix) -> Expr {
    let n = p.rows();
    let mut terms = Vec::new();
    for i in 0..n {
        terms.push(Expr::mul(
            Expr::Const(p[(i, i)]),
            Expr::pow(Expr::Var(i), Expr::Const(2.0)),
        ));
        for j in i + 1..n {
            let c = p[(i, j)] + p[(j, i)];
            terms.push(Expr::mul(
                Expr::Const(c),
                Expr::mul(Expr::Var(i), Expr::Var(j)),
            ));
        }
    }
    terms
        .into_iter()
        .reduce(Expr::add)
        .unwrap_or(Expr::Const(0.0))
}

/// `ρ = (xᵀPx)^α` for symmetric positive definite `P`.
pub fn quadratic_form_density(p: &Matrix, alpha: f64) -> Result<DensityFunction, DensityError> {
    check_alpha(alpha)?;
    if !p.is_square() {
        return Err(DensityError::NotSquare(p.rows(), p.cols()));
    }
    if p.rows() == 0 {
        return Err(DensityError::ZeroDimension);
    }
    if !p.is_symmetric() {
        return Err(DensityError::NotSymmetric);
    }
    if !is_positive_definite(p, 0.0) {
        return Err(DensityError::NotPositiveDefinite);
    }
    let q = quadratic_form_expr(p);
    Ok(DensityFunction {
        dim: p.rows(),
        rho: Expr::pow(q.clone(), Expr::Const(alpha)),
        rho_inv: Expr::pow(q, Expr::Const(-alpha)),
        family: Family::QuadraticForm {
            p: p.clone(),
            alpha,
        },
    })
}

/// `ρ = |grad S|` with `|grad S⁻¹| = |grad S| / S²` in the inverse slot.
pub fn grad_norm_density(s: &ScalarFunction) -> DensityFunction {
    let grad_sq = s
        .expr
        .gradient(s.dim)
        .into_iter()
        .map(|g| Expr::pow(g, Expr::Const(2.0)))
        .reduce(Expr::add)
        .unwrap_or(Expr::Const(0.0));
    let rho = Expr::call(Func::Sqrt, grad_sq);
    let rho_inv = Expr::div(rho.clone(), Expr::pow(s.expr.clone(), Expr::Const(2.0)));
    DensityFunction {
        dim: s.dim,
        rho,
        rho_inv,
        family: Family::GradNorm { s: s.expr.clone() },
    }
}

/// Componentwise product `rho · F_i`.
pub fn scale_field(rho: &Expr, field: &VectorField) -> VectorField {
    let components = field
        .components()
        .iter()
        .map(|c| Expr::mul(rho.clone(), c.clone()))
        .collect();
    VectorField::new(components).expect("scaling preserves dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{divergence, parse_expr};

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn norm_power_values() {
        let d = norm_power_density(1.0, 2).unwrap();
        assert_eq!(d.rho().eval(&[1.0, 1.0]).unwrap(), 2.0);
        let d = norm_power_density(2.0, 2).unwrap();
        assert_eq!(d.rho_inv().eval(&[1.0, 0.0]).unwrap(), 1.0);
        let d = norm_power_density(2.0, 3).unwrap();
        assert_eq!(d.rho().eval(&[1.0, 1.0, 1.0]).unwrap(), 9.0);
    }

    #[test]
    fn invalid_parameters() {
        assert_eq!(
            norm_power_density(0.0, 2),
            Err(DensityError::InvalidAlpha(0.0))
        );
        assert_eq!(norm_power_density(1.0, 0), Err(DensityError::ZeroDimension));
        assert_eq!(
            quadratic_form_density(&m(&[&[1.0, 0.5], &[0.0, 1.0]]), 1.0),
            Err(DensityError::NotSymmetric)
        );
        assert_eq!(
            quadratic_form_density(&m(&[&[-1.5, -0.75], &[-0.75, -1.5]]), 1.0),
            Err(DensityError::NotPositiveDefinite)
        );
    }

    #[test]
    fn quadratic_form_values() {
        let d = quadratic_form_density(&m(&[&[0.6, 0.3], &[0.3, 0.9]]), 1.0).unwrap();
        assert!((d.rho().eval(&[1.0, 0.0]).unwrap() - 0.6).abs() < 1e-15);
        let d = quadratic_form_density(&m(&[&[1.0, 0.0], &[0.0, 2.0]]), 2.0).unwrap();
        assert_eq!(d.rho().eval(&[1.0, 1.0]).unwrap(), 9.0);
    }

    #[test]
    fn identity_quadratic_form_matches_norm_power() {
        let q = quadratic_form_density(&Matrix::identity(2), 1.0).unwrap();
        let n = norm_power_density(1.0, 2).unwrap();
        for k in 0..20 {
            let t = k as f64 * 0.37;
            let p = [t.cos() * (1.0 + t), (2.0 * t).sin() - 0.3];
            assert!((q.rho().eval(&p).unwrap() - n.rho().eval(&p).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn grad_norm_values() {
        let s = ScalarFunction::new(2, parse_expr("(x1^2 + x2^2)/2", 2).unwrap()).unwrap();
        let d = grad_norm_density(&s);
        let theta: f64 = 0.7;
        assert!((d.rho().eval(&[theta.cos(), theta.sin()]).unwrap() - 1.0).abs() < 1e-14);
        assert!(!d.is_reciprocal_pair());

        let s = ScalarFunction::new(2, parse_expr("x1^2 + x2^2", 2).unwrap()).unwrap();
        let d = grad_norm_density(&s);
        assert!((d.rho().eval(&[1.0, 1.0]).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        // |grad(1/S)| = |grad S|/S² = 2√2/4
        assert!((d.rho_inv().eval(&[1.0, 1.0]).unwrap() - 2f64.sqrt() / 2.0).abs() < 1e-14);

        let s = ScalarFunction::new(2, parse_expr("x1^2", 2).unwrap()).unwrap();
        assert_eq!(grad_norm_density(&s).rho().eval(&[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn scale_by_one_is_identity() {
        let f = VectorField::parse(&["x2", "-x1 - x2^3"]).unwrap();
        let g = scale_field(&Expr::Const(1.0), &f);
        assert_eq!(f, g);
    }

    #[test]
    fn example_four_product_rule_term() {
        let f = VectorField::parse(&["x2 - 2*x1*x3^2", "-x1 - 2*x2*x3^2", "-2*x3^3"]).unwrap();
        let d = norm_power_density(2.0, 3).unwrap();
        let lhs = Expr::sub(
            divergence(&d.scaled_field(&f).unwrap()),
            Expr::mul(d.rho().clone(), divergence(&f)),
        );
        assert!((lhs.eval(&[0.0, 0.0, 1.0]).unwrap() + 8.0).abs() < 1e-12);
    }

    #[test]
    fn example_three_inverse_divergence() {
        let f = VectorField::parse(&["-x1 + x1^2 - x2^2", "-x2 + 2*x1*x2"]).unwrap();
        let d = norm_power_density(2.0, 2).unwrap();
        let v = divergence(&d.inverse_scaled_field(&f).unwrap())
            .eval(&[0.5, 0.0])
            .unwrap();
        assert!((v - 32.0).abs() < 1e-10);
    }

    #[test]
    fn dimension_mismatch() {
        let f = VectorField::parse(&["x1"]).unwrap();
        let d = norm_power_density(1.0, 2).unwrap();
        assert!(matches!(
            d.scaled_field(&f),
            Err(DensityError::DimensionMismatch {
                density: 2,
                field: 1
            })
        ));
    }
}
