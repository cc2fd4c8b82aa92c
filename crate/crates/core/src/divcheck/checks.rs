use crate::density::{grad_norm_density, DensityFunction, ScalarFunction};
use crate::expr::{divergence, Expr, VectorField};

use super::limits::{integrability, origin_limit};
use super::sampling::sample_region;
use super::{
    CheckConfig, CheckError, Margins, Region, SideCheck, SignCounts, Status, Verdict, Witness,
};

/// Case selector of the `S`-based conditions.
pub type Theorem1Case = u8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Want {
    Negative,
    Positive,
}

struct Cond {
    label: String,
    expr: Expr,
    want: Want,
}

impl Cond {
    fn new(label: &str, expr: Expr, want: Want) -> Self {
        Self {
            label: label.to_string(),
            expr,
            want,
        }
    }

    /// Positive when `v` has the wrong sign.
    fn excess(&self, v: f64) -> f64 {
        match self.want {
            Want::Negative => v,
            Want::Positive => -v,
        }
    }
}

struct Plan {
    check: String,
    primary: Cond,
    sides: Vec<Cond>,
    limits: Vec<(String, Expr)>,
    integrability: Option<Expr>,
    necessary: bool,
    notes: Vec<String>,
}

struct Tally {
    counts: SignCounts,
    band: f64,
    worst: Option<usize>,
    boundary: Vec<usize>,
}

fn tally(cond: &Cond, values: &[f64], tol: f64) -> Tally {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let band = tol * (1.0 + scale);
    let mut counts = SignCounts::default();
    let mut worst: Option<usize> = None;
    let mut boundary = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let e = cond.excess(v);
        if e > band {
            counts.violated += 1;
            if worst.is_none_or(|w| e > cond.excess(values[w])) {
                worst = Some(i);
            }
        } else if e < -band {
            counts.satisfied += 1;
        } else {
            counts.boundary += 1;
            boundary.push(i);
        }
    }
    Tally {
        counts,
        band,
        worst,
        boundary,
    }
}

fn witness(cond: &Cond, points: &[Vec<f64>], values: &[f64], i: usize) -> Witness {
    Witness {
        point: points[i].clone(),
        value: values[i],
        condition: cond.label.clone(),
    }
}

fn margins(values: &[f64]) -> Option<Margins> {
    if values.is_empty() {
        return None;
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Some(Margins { min, max, mean })
}

fn equality_locus(points: &[Vec<f64>], boundary: &[usize]) -> Vec<usize> {
    if boundary.is_empty() {
        return Vec::new();
    }
    let mut on_boundary = vec![false; points.len()];
    boundary.iter().for_each(|&i| on_boundary[i] = true);
    let dim = points[0].len();
    (0..dim)
        .filter(|&j| {
            let mut on_plane = points
                .iter()
                .enumerate()
                .filter(|(_, x)| x[j] == 0.0)
                .peekable();
            on_plane.peek().is_some() && on_plane.all(|(i, _)| on_boundary[i])
        })
        .map(|j| j + 1)
        .collect()
}

fn run(plan: Plan, region: &Region, cfg: &CheckConfig) -> Result<Verdict, CheckError> {
    cfg.validate()?;
    let points = sample_region(region, cfg.samples, cfg.plane_fraction, cfg.seed);
    if points.is_empty() {
        return Err(CheckError::EmptyRegion);
    }
    let conds: Vec<&Cond> = std::iter::once(&plan.primary).chain(&plan.sides).collect();
    let rows = cfg.exec.map(points.len(), |i| {
        conds
            .iter()
            .map(|c| c.expr.eval(&points[i]))
            .collect::<Result<Vec<f64>, _>>()
    });

    let limits = plan
        .limits
        .iter()
        .map(|(q, e)| origin_limit(q, e, region.dim(), region.r_min(), cfg))
        .collect();
    let integrability = plan
        .integrability
        .as_ref()
        .map(|e| integrability(e, region.dim(), region.r_min(), cfg));

    let mut verdict = Verdict {
        check: plan.check,
        condition: plan.primary.label.clone(),
        status: Status::Inconclusive,
        strict: false,
        witness: None,
        margins: None,
        band: 0.0,
        samples: points.len(),
        counts: SignCounts::default(),
        sides: Vec::new(),
        equality_locus: Vec::new(),
        limits,
        integrability,
        domain_error: None,
        notes: plan.notes,
    };

    let mut columns = vec![Vec::with_capacity(points.len()); conds.len()];
    for row in rows {
        match row {
            Ok(vals) => vals
                .into_iter()
                .zip(&mut columns)
                .for_each(|(v, c)| c.push(v)),
            Err(e) => {
                verdict.notes.push(format!("evaluation failed: {}", e.kind));
                verdict.domain_error = Some(e);
                return Ok(verdict);
            }
        }
    }

    let primary = &plan.primary;
    let values = &columns[0];
    let t = tally(primary, values, cfg.tol);
    verdict.margins = margins(values);
    verdict.band = t.band;
    verdict.counts = t.counts;
    verdict.equality_locus = equality_locus(&points, &t.boundary);
    verdict.sides = plan
        .sides
        .iter()
        .zip(&columns[1..])
        .map(|(c, vals)| {
            let st = tally(c, vals, cfg.tol);
            SideCheck {
                condition: c.label.clone(),
                counts: st.counts,
                band: st.band,
                worst: st.worst.map(|i| witness(c, &points, vals, i)),
            }
        })
        .collect();

    let c = t.counts;
    let primary_witness = t.worst.map(|i| witness(primary, &points, values, i));
    if plan.necessary {
        if c.violated > 0 && c.satisfied > 0 {
            verdict.status = Status::Indefinite;
            verdict.witness = primary_witness;
        } else if c.violated > 0 {
            verdict.status = Status::Violated;
            verdict.witness = primary_witness;
        } else if c.boundary > 0 {
            verdict.status = Status::Inconclusive;
            verdict.notes.push(format!(
                "{} samples lie within the tolerance band of the strict inequality",
                c.boundary
            ));
        } else {
            verdict.status = Status::HoldsOnSamples;
            verdict.strict = true;
        }
    } else if c.violated > 0 {
        verdict.status = Status::Violated;
        verdict.witness = primary_witness;
    } else if let Some(side) = verdict.sides.iter().find(|s| !s.holds()) {
        verdict.status = Status::Violated;
        verdict.witness = side.worst.clone();
    } else if c.satisfied == 0 {
        verdict.status = Status::Inconclusive;
        verdict
            .notes
            .push("every sample lies within the tolerance band".to_string());
    } else {
        verdict.status = Status::HoldsOnSamples;
        verdict.strict = c.boundary == 0;
    }
    Ok(verdict)
}

fn check_dims(f: &VectorField, rho: &DensityFunction, region: &Region) -> Result<(), CheckError> {
    if f.dim() != rho.dim() || f.dim() != region.dim() {
        return Err(CheckError::DimensionMismatch(format!(
            "field {}, density {}, region {}",
            f.dim(),
            rho.dim(),
            region.dim()
        )));
    }
    Ok(())
}

/// Necessary condition on `div{ρf} < 0`, plus the origin value of `div{ρf}`.
pub fn check_necessary_c1(
    f: &VectorField,
    rho: &DensityFunction,
    region: &Region,
    cfg: &CheckConfig,
) -> Result<Verdict, CheckError> {
    check_dims(f, rho, region)?;
    let e = divergence(&rho.scaled_field(f)?);
    let plan = Plan {
        check: "necessary-c1".into(),
        primary: Cond::new("div(rho*f) < 0", e.clone(), Want::Negative),
        sides: Vec::new(),
        limits: vec![("div(rho*f) at 0".into(), e)],
        integrability: None,
        necessary: true,
        notes: Vec::new(),
    };
    run(plan, region, cfg)
}

/// Necessary condition on `div{ρ⁻¹f} > 0`, with the integrability heuristic.
pub fn check_necessary_c2(
    f: &VectorField,
    rho: &DensityFunction,
    region: &Region,
    cfg: &CheckConfig,
) -> Result<Verdict, CheckError> {
    check_dims(f, rho, region)?;
    let e = divergence(&rho.inverse_scaled_field(f)?);
    let plan = Plan {
        check: "necessary-c2".into(),
        primary: Cond::new("div(rho_inv*f) > 0", e.clone(), Want::Positive),
        sides: Vec::new(),
        limits: Vec::new(),
        integrability: Some(e),
        necessary: true,
        notes: vec!["integrability near the origin is a radial-exponent heuristic".into()],
    };
    run(plan, region, cfg)
}

/// Sufficient conditions, cases 1 to 3. Case 3 uses `cfg.beta`.
pub fn check_sufficient(
    f: &VectorField,
    rho: &DensityFunction,
    region: &Region,
    cfg: &CheckConfig,
    case: u8,
) -> Result<Verdict, CheckError> {
    check_dims(f, rho, region)?;
    cfg.validate()?;
    let div_rho_f = || -> Result<Expr, CheckError> { Ok(divergence(&rho.scaled_field(f)?)) };
    let div_inv_f =
        || -> Result<Expr, CheckError> { Ok(divergence(&rho.inverse_scaled_field(f)?)) };
    let div_f = divergence(f);
    let r = rho.rho().clone();
    let side_div_f = || Cond::new("div(f) <= 0", div_f.clone(), Want::Negative);

    let (primary, sides, limits) = match case {
        1 => {
            let d = div_rho_f()?;
            let slack = Expr::sub(d.clone(), Expr::mul(r, div_f.clone()));
            (
                Cond::new("div(rho*f) - rho*div(f) <= 0", slack, Want::Negative),
                Vec::new(),
                vec![("div(rho*f) at 0".to_string(), d)],
            )
        }
        2 => {
            let d = div_inv_f()?;
            let lim = Expr::mul(Expr::mul(r.clone(), r), d.clone());
            (
                Cond::new("div(rho_inv*f) >= 0", d, Want::Positive),
                vec![side_div_f()],
                vec![("rho^2*div(rho_inv*f) as |x| -> 0".to_string(), lim)],
            )
        }
        3 => {
            let d = div_rho_f()?;
            let di = div_inv_f()?;
            let weighted = Expr::mul(
                Expr::Const(cfg.beta),
                Expr::mul(Expr::mul(r.clone(), r.clone()), di.clone()),
            );
            let slack = Expr::sub(d.clone(), weighted);
            let sides = if cfg.beta > 1.0 {
                vec![side_div_f()]
            } else {
                Vec::new()
            };
            (
                Cond::new(
                    "div(rho*f) - beta*rho^2*div(rho_inv*f) <= 0",
                    slack,
                    Want::Negative,
                ),
                sides,
                vec![
                    ("div(rho*f) at 0".to_string(), d),
                    (
                        "rho*div(rho_inv*f) as |x| -> 0".to_string(),
                        Expr::mul(r, di),
                    ),
                ],
            )
        }
        _ => {
            return Err(CheckError::InvalidCase {
                check: "the sufficient conditions",
                case,
            })
        }
    };
    let mut notes = Vec::new();
    if case == 3 {
        notes.push(format!("beta = {}", cfg.beta));
    }
    let plan = Plan {
        check: format!("sufficient-case{case}"),
        primary,
        sides,
        limits,
        integrability: None,
        necessary: false,
        notes,
    };
    run(plan, region, cfg)
}

/// Conditions with `ρ = |grad S|` (case 1) and `|grad S⁻¹|` (case 2).
///
/// Samples where `grad S` vanishes or `S ≤ 0` are returned as errors. The
/// requirement that `S` grows without bound towards the boundary of the
/// domain cannot be sampled and is recorded as a note.
pub fn check_theorem1(
    f: &VectorField,
    s: &ScalarFunction,
    region: &Region,
    cfg: &CheckConfig,
    case: Theorem1Case,
) -> Result<Verdict, CheckError> {
    if !(1..=2).contains(&case) {
        return Err(CheckError::InvalidCase {
            check: "the S-based conditions",
            case,
        });
    }
    cfg.validate()?;
    let rho = grad_norm_density(s);
    check_dims(f, &rho, region)?;

    let points = sample_region(region, cfg.samples, cfg.plane_fraction, cfg.seed);
    let pre = cfg.exec.map(points.len(), |i| {
        let g = rho.rho().eval(&points[i]).ok();
        let v = s.expr().eval(&points[i]).ok();
        (g, v)
    });
    let gmax = pre
        .iter()
        .filter_map(|p| p.0)
        .fold(0.0f64, |m, g| m.max(g.abs()));
    let gband = cfg.tol * (1.0 + gmax);
    for (i, (g, v)) in pre.iter().enumerate() {
        if g.is_some_and(|g| g <= gband) {
            return Err(CheckError::ZeroGradient {
                point: points[i].clone(),
            });
        }
        if let Some(v) = v.filter(|&v| v <= 0.0) {
            return Err(CheckError::NonPositiveScalar {
                point: points[i].clone(),
                value: v,
            });
        }
    }

    let mut verdict = if case == 1 {
        check_necessary_c1(f, &rho, region, cfg)?
    } else {
        check_necessary_c2(f, &rho, region, cfg)?
    };
    verdict.check = format!("theorem1-case{case}");
    verdict
        .notes
        .push("unchecked assumption: S grows without bound towards the boundary of D".into());
    Ok(verdict)
}

/// Sufficient conditions for the closed loop `f + g·u`.
pub fn check_closed_loop(
    f: &VectorField,
    g: &[Vec<Expr>],
    u: &[Expr],
    rho: &DensityFunction,
    region: &Region,
    cfg: &CheckConfig,
    case: u8,
) -> Result<Verdict, CheckError> {
    let n = f.dim();
    if g.len() != n || g.iter().any(|row| row.len() != u.len()) {
        return Err(CheckError::DimensionMismatch(format!(
            "g must be {n}x{} to match u",
            u.len()
        )));
    }
    let gu = g
        .iter()
        .map(|row| {
            row.iter()
                .zip(u)
                .map(|(gij, uj)| Expr::mul(gij.clone(), uj.clone()))
                .fold(Expr::Const(0.0), Expr::add)
        })
        .collect();
    let closed = f.plus(&VectorField::new(gu)?)?;
    let mut verdict = check_sufficient(&closed, rho, region, cfg, case)?;
    verdict.check = format!("closed-loop-case{case}");
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{norm_power_density, quadratic_form_density};
    use crate::expr::{fd_divergence, parse_expr};
    use crate::linalg::{solve_lyapunov, Matrix};

    fn ex1(c: f64) -> VectorField {
        VectorField::parse(&["x2".to_string(), format!("-({c})*x1 - x1^2*x2 - x2^3")]).unwrap()
    }

    fn ex2(b: f64) -> VectorField {
        VectorField::parse(&["-x1".to_string(), format!("{b}*x2 - x1^2*x2")]).unwrap()
    }

    fn ex3() -> VectorField {
        VectorField::parse(&["-x1 + x1^2 - x2^2", "-x2 + 2*x1*x2"]).unwrap()
    }

    fn ex4() -> VectorField {
        VectorField::parse(&["x2 - 2*x1*x3^2", "-x1 - 2*x2*x3^2", "-2*x3^3"]).unwrap()
    }

    fn annulus(n: usize) -> Region {
        Region::annulus(n, 0.1, 2.0).unwrap()
    }

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    fn assert_witness_valid(v: &Verdict, f: impl Fn(&[f64]) -> f64) {
        let w = v.witness.as_ref().expect("witness");
        let again = f(&w.point);
        assert!((again - w.value).abs() <= 1e-12 * (1.0 + w.value.abs()));
    }

    #[test]
    fn example1_stable_case_holds() {
        let v = check_necessary_c1(
            &ex1(1.0),
            &norm_power_density(2.0, 2).unwrap(),
            &annulus(2),
            &cfg(),
        )
        .unwrap();
        assert_eq!(v.status, Status::HoldsOnSamples);
        assert!(v.strict);
        assert_eq!(v.samples, 2000);
        assert!(v.limits_hold());
    }

    #[test]
    fn example1_unstable_case_indefinite() {
        let rho = norm_power_density(2.0, 2).unwrap();
        let f = ex1(-1.0);
        let v = check_necessary_c1(&f, &rho, &annulus(2), &cfg()).unwrap();
        assert_eq!(v.status, Status::Indefinite);
        let e = divergence(&rho.scaled_field(&f).unwrap());
        assert_witness_valid(&v, |x| e.eval(x).unwrap());
        assert!(v.witness.unwrap().value > v.band);
    }

    #[test]
    fn example2_passes_necessary_test() {
        let v = check_necessary_c1(
            &ex2(0.1),
            &norm_power_density(2.0, 2).unwrap(),
            &annulus(2),
            &cfg(),
        )
        .unwrap();
        assert_eq!(v.status, Status::HoldsOnSamples);
    }

    #[test]
    fn example2_fails_sufficient_case1_on_x2_axis() {
        let rho = norm_power_density(2.0, 2).unwrap();
        let v = check_sufficient(&ex2(0.1), &rho, &annulus(2), &cfg(), 1).unwrap();
        assert_eq!(v.status, Status::Violated);
        let w = v.witness.unwrap();
        assert_eq!(w.point[0], 0.0);
        // grad ρᵀf at x1 = 0 is 2α|x|^{2α-2}·b·x2²
        let x2: f64 = w.point[1];
        let closed = 2.0 * 2.0 * x2.powi(2) * 0.1 * x2.powi(2);
        assert!((w.value - closed).abs() < 1e-9 * closed);
    }

    #[test]
    fn example3_second_condition_holds() {
        let rho = norm_power_density(2.0, 2).unwrap();
        let v = check_necessary_c2(&ex3(), &rho, &annulus(2), &cfg()).unwrap();
        assert_eq!(v.status, Status::HoldsOnSamples);
        assert!(v.integrability.is_some());
    }

    #[test]
    fn example1_second_condition_with_alpha_one() {
        // div{|x|^{-2}f} = -1 identically for c = 1
        let rho = norm_power_density(1.0, 2).unwrap();
        let v = check_necessary_c2(&ex1(1.0), &rho, &annulus(2), &cfg()).unwrap();
        assert_eq!(v.status, Status::Violated);
        let v = check_necessary_c2(
            &ex1(1.0),
            &norm_power_density(2.0, 2).unwrap(),
            &annulus(2),
            &cfg(),
        )
        .unwrap();
        assert_eq!(v.status, Status::Indefinite);
    }

    #[test]
    fn stable_linear_field_second_condition() {
        let f = VectorField::linear(&Matrix::from_rows(&[[-1.0, 0.0], [0.0, -1.0]]).unwrap());
        let rho = norm_power_density(2.0, 2).unwrap();
        let v = check_necessary_c2(&f, &rho, &annulus(2), &cfg()).unwrap();
        assert_eq!(v.status, Status::HoldsOnSamples);
        let scaled = rho.inverse_scaled_field(&f).unwrap();
        for p in [[0.3, 0.4], [1.0, -1.5]] {
            let r2: f64 = p[0] * p[0] + p[1] * p[1];
            let oracle = fd_divergence(&scaled, &p, 1e-5).unwrap();
            assert!((oracle - 2.0 * r2.powi(-2)).abs() < 1e-6 * (1.0 + oracle.abs()));
        }
    }

    #[test]
    fn example4_case1_nonstrict_with_locus() {
        let rho = norm_power_density(3.0, 3).unwrap();
        let v = check_sufficient(&ex4(), &rho, &annulus(3), &cfg(), 1).unwrap();
        assert_eq!(v.status, Status::HoldsOnSamples);
        assert!(!v.strict);
        assert_eq!(v.equality_locus, vec![3]);
        assert!(v.limits_hold());
        assert_eq!(v.claim(), Some("stable"));
    }

    #[test]
    fn example4_case2_and_case3() {
        let rho = norm_power_density(3.0, 3).unwrap();
        let v = check_sufficient(&ex4(), &rho, &annulus(3), &cfg(), 2).unwrap();
        assert_eq!(v.status, Status::HoldsOnSamples);
        assert!(!v.strict);
        assert!(v.sides[0].holds());
        assert!(v.limits_hold());
        for beta in [1.0, 2.0] {
            let c = CheckConfig { beta, ..cfg() };
            let v = check_sufficient(&ex4(), &rho, &annulus(3), &c, 3).unwrap();
            assert_eq!(v.status, Status::HoldsOnSamples, "beta {beta}");
            assert_eq!(v.sides.len(), usize::from(beta > 1.0));
        }
    }

    #[test]
    fn theorem1_quadratic_s() {
        let s = ScalarFunction::new(2, parse_expr("(x1^2 + x2^2)/2", 2).unwrap()).unwrap();
        let stable = VectorField::parse(&["-x1", "-x2"]).unwrap();
        let v = check_theorem1(&stable, &s, &annulus(2), &cfg(), 1).unwrap();
        assert_eq!(v.status, Status::HoldsOnSamples);
        let unstable = VectorField::parse(&["x1", "x2"]).unwrap();
        let v = check_theorem1(&unstable, &s, &annulus(2), &cfg(), 1).unwrap();
        assert_eq!(v.status, Status::Violated);
    }

    #[test]
    fn theorem1_degenerate_s_reports_zero_gradient() {
        let s = ScalarFunction::new(2, parse_expr("x1^2", 2).unwrap()).unwrap();
        let f = VectorField::parse(&["-x1", "-x2"]).unwrap();
        match check_theorem1(&f, &s, &annulus(2), &cfg(), 1) {
            Err(CheckError::ZeroGradient { point }) => assert_eq!(point[0], 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn closed_loop_with_zero_control_matches_open_loop() {
        let rho = norm_power_density(3.0, 3).unwrap();
        let zero = vec![vec![Expr::Const(0.0)]; 3];
        let a = check_closed_loop(
            &ex4(),
            &zero,
            &[Expr::Const(0.0)],
            &rho,
            &annulus(3),
            &cfg(),
            1,
        )
        .unwrap();
        let b = check_sufficient(&ex4(), &rho, &annulus(3), &cfg(), 1).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.check, "closed-loop-case1");
    }

    #[test]
    fn closed_loop_stabilized_linear_system() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [1.0, 1.0]]).unwrap();
        let f = VectorField::linear(&a);
        let g = vec![vec![Expr::Const(0.0)], vec![Expr::Const(1.0)]];
        let u = vec![parse_expr("-3*x1 - 4*x2", 2).unwrap()];
        let acl = Matrix::from_rows(&[[0.0, 1.0], [-2.0, -3.0]]).unwrap();
        let p = solve_lyapunov(&acl, &Matrix::identity(2)).unwrap();
        let rho = quadratic_form_density(&p, 1.0).unwrap();
        let v = check_closed_loop(&f, &g, &u, &rho, &annulus(2), &cfg(), 1).unwrap();
        assert_eq!(v.status, Status::HoldsOnSamples);
        assert!(v.strict);

        let bad_u = vec![parse_expr("-0.7082*x1 - 2.2651*x2", 2).unwrap()];
        let v = check_closed_loop(&f, &g, &bad_u, &rho, &annulus(2), &cfg(), 1).unwrap();
        assert_eq!(v.status, Status::Violated);
    }

    #[test]
    fn domain_error_is_inconclusive() {
        let f = VectorField::parse(&["ln(x1)", "x2"]).unwrap();
        let v = check_necessary_c1(&f, &DensityFunction::unit(2), &annulus(2), &cfg()).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
        assert!(v.domain_error.is_some());
    }

    #[test]
    fn zero_field_is_inconclusive() {
        let f = VectorField::parse(&["0", "0"]).unwrap();
        let v = check_sufficient(&f, &DensityFunction::unit(2), &annulus(2), &cfg(), 1).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
    }

    #[test]
    fn invalid_case_and_dims() {
        let rho = norm_power_density(1.0, 2).unwrap();
        assert!(check_sufficient(&ex3(), &rho, &annulus(2), &cfg(), 4).is_err());
        assert!(check_necessary_c1(&ex3(), &rho, &annulus(3), &cfg()).is_err());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let rho = norm_power_density(2.0, 2).unwrap();
        let seq = CheckConfig {
            exec: crate::exec::Exec::Sequential,
            ..cfg()
        };
        let par = CheckConfig {
            exec: crate::exec::Exec::Parallel,
            ..cfg()
        };
        let a = check_necessary_c1(&ex1(-1.0), &rho, &annulus(2), &seq).unwrap();
        let b = check_necessary_c1(&ex1(-1.0), &rho, &annulus(2), &par).unwrap();
        assert_eq!(a, b);
    }
}
