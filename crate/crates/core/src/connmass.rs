//! Homogeneous mass of connectivity M′ = ∫₀^∞ r^{d-1} H(r) dr.
//!
//! Closed forms for every link model, a quadrature oracle, the large-diversity
//! scaling laws, and the step-function approximation for MIMO together with
//! its error split ε = ε₋ + ε₊ at the transition radius (n/β)^{1/η}.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{capability, domain, Error, Result};
use crate::linkmodels::{ConnectionModel, LinkKind, PathLossParams};
use crate::quadrature::{integrate_with_breaks, QuadConfig};
use crate::specfun::{gauss_2f1, log_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassMethod {
    ClosedForm,
    Quadrature,
    StepApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassResult {
    pub value: f64,
    pub method: MassMethod,
    /// Quadrature error estimate; zero for the other methods.
    pub est_abs_error: f64,
}

impl MassResult {
    fn closed(value: f64) -> Self {
        Self { value, method: MassMethod::ClosedForm, est_abs_error: 0.0 }
    }
}

fn quad_config() -> QuadConfig {
    QuadConfig { abs_tol: 0.0, rel_tol: 1e-12, max_subintervals: 4000 }
}

/// Γ(m + s) / (β^s d Γ(m)) with s = d/η.
pub fn mass_simo_closed(m: u32, params: &PathLossParams) -> Result<MassResult> {
    if m == 0 {
        return domain("SIMO/MISO needs m >= 1");
    }
    let s = params.shape();
    let mf = m as f64;
    let log_ratio = log_gamma(mf + s)? - log_gamma(mf)?;
    Ok(MassResult::closed(log_ratio.exp() / (params.beta().powf(s) * params.dim() as f64)))
}

/// Closed form for MIMO with m = 2 and n = max(n_t, n_r) ≥ 2.
///
/// With s = d/η and F(a, b; c) = ₂F₁(a, b; c; -1):
///
/// ```text
/// dβ^s M′ = Γ(n-1+s)/Γ(n-1) · (2 - n - 2s + (n+s)(n-1+s)/(n-1))
///         + Γ(2n+s)/(Γ(n)Γ(n-1)) · ( 2F(s+n, s+2n; s+n+1)/(s+n)
///                                    -  F(s+n-1, s+2n; s+n)/(s+n-1)
///                                    -  F(s+n+1, s+2n; s+n+2)/(s+n+1) )
/// ```
///
/// The first line integrates the terms linear in Γ(·, x); the second the
/// quadratic ones, via ∫ x^{μ-1} e^{-x} Γ(b, x) dx = Γ(μ+b)/μ · 2^{-μ-b} F(1, μ+b; μ+1; 1/2)
/// rewritten at z = -1.
pub fn mass_mimo_closed(n: u32, params: &PathLossParams) -> Result<MassResult> {
    if n < 2 {
        return capability(format!("MIMO mass requires n >= 2, got {n}"));
    }
    let s = params.shape();
    let nf = n as f64;
    let linear = (log_gamma(nf - 1.0 + s)? - log_gamma(nf - 1.0)?).exp()
        * (2.0 - nf - 2.0 * s + (nf + s) * (nf - 1.0 + s) / (nf - 1.0));
    let weight = (log_gamma(2.0 * nf + s)? - log_gamma(nf)? - log_gamma(nf - 1.0)?).exp();
    let b = s + 2.0 * nf;
    let hyp = 2.0 * gauss_2f1(s + nf, b, s + nf + 1.0, -1.0)? / (s + nf)
        - gauss_2f1(s + nf - 1.0, b, s + nf, -1.0)? / (s + nf - 1.0)
        - gauss_2f1(s + nf + 1.0, b, s + nf + 2.0, -1.0)? / (s + nf + 1.0);
    let value = (linear + weight * hyp) / (params.dim() as f64 * params.beta().powf(s));
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::NonConvergence(format!("MIMO closed-form mass at n={n} lost precision")));
    }
    Ok(MassResult::closed(value))
}

/// The n = 2 specialization ((s² + s + 2 - 2^{-s}) Γ(s)) / (β^s η).
pub fn mass_mimo_n2(params: &PathLossParams) -> Result<MassResult> {
    let s = params.shape();
    let poly = s * s + s + 2.0 - 2f64.powf(-s);
    Ok(MassResult::closed(poly * log_gamma(s)?.exp() / (params.beta().powf(s) * params.eta())))
}

/// A previously published hypergeometric expression for the same mass:
///
/// ```text
/// (1-s)Γ(n-1+s)/(β^s d Γ(n-1))
///   + ηΓ(2n+s)/(β^s d Γ(n)²) · ( F(n-1, 2n+s; n+1)/n
///                                - (n-1)/((n+s)(n-1+s)) F(n-1+s, 2n+s; n+1+s) )
/// ```
///
/// It does not reproduce the defining integral (at n = 2, d = 3, η = 2 it
/// gives about 5.0 against 2.391). Kept only so that the discrepancy stays
/// visible in tests; use [`mass_mimo_closed`].
pub fn mass_mimo_closed_as_printed(n: u32, params: &PathLossParams) -> Result<f64> {
    if n < 2 {
        return capability(format!("MIMO mass requires n >= 2, got {n}"));
    }
    let s = params.shape();
    let nf = n as f64;
    let norm = params.beta().powf(s) * params.dim() as f64;
    let first = (1.0 - s) * (log_gamma(nf - 1.0 + s)? - log_gamma(nf - 1.0)?).exp() / norm;
    let weight = params.eta() * (log_gamma(2.0 * nf + s)? - 2.0 * log_gamma(nf)?).exp() / norm;
    let bracket = gauss_2f1(nf - 1.0, 2.0 * nf + s, nf + 1.0, -1.0)? / nf
        - (nf - 1.0) / ((nf + s) * (nf - 1.0 + s))
            * gauss_2f1(nf - 1.0 + s, 2.0 * nf + s, nf + 1.0 + s, -1.0)?;
    Ok(first + weight * bracket)
}

/// Closed-form mass for any supported model.
pub fn mass_closed(model: &ConnectionModel) -> Result<MassResult> {
    let p = model.params();
    match model.kind() {
        LinkKind::Siso => mass_simo_closed(1, &p),
        LinkKind::SimoMiso { m } => mass_simo_closed(m, &p),
        LinkKind::Mimo { n_t, n_r } => mass_mimo_closed(n_t.max(n_r), &p),
        LinkKind::UnitDisk { radius, .. } => {
            let d = p.dim() as i32;
            Ok(MassResult::closed(radius.powi(d) / d as f64))
        }
    }
}

/// Diversity order k used to place the quadrature breakpoint and cutoff.
fn diversity(model: &ConnectionModel) -> f64 {
    match model.kind() {
        LinkKind::Siso | LinkKind::UnitDisk { .. } => 1.0,
        LinkKind::SimoMiso { m } => m as f64,
        LinkKind::Mimo { n_t, n_r } => n_t.max(n_r) as f64,
    }
}

/// Radius where H drops from ≈1 to ≈0, (k/β)^{1/η}.
fn transition_radius(model: &ConnectionModel) -> f64 {
    let p = model.params();
    (diversity(model) / p.beta()).powf(1.0 / p.eta())
}

/// Truncation radius ((max(k,1) + 40)/β)^{1/η} · 2. At this radius βr^η ≥ 4(k + 40),
/// where every fading H is below e^{-100} relative to its bulk.
pub fn quadrature_cutoff(model: &ConnectionModel) -> f64 {
    let p = model.params();
    ((diversity(model).max(1.0) + 40.0) / p.beta()).powf(1.0 / p.eta()) * 2.0
}

/// Integrate `f(r)` where `f` may fail; the first error wins.
fn integrate_fallible<F>(f: F, breaks: &[f64]) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let q = integrate_with_breaks(
        |r| match f(r) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        breaks,
        &quad_config(),
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let q = q?;
    Ok((q.value, q.abs_error))
}

/// Adaptive quadrature of the defining integral.
pub fn mass_quadrature(model: &ConnectionModel) -> Result<MassResult> {
    let p = model.params();
    let d = p.dim() as i32;
    let (value, err) = match model.kind() {
        LinkKind::UnitDisk { radius, .. } => {
            integrate_fallible(|r| Ok(r.powi(d - 1)), &[0.0, radius])?
        }
        _ => {
            let breaks = [0.0, transition_radius(model), quadrature_cutoff(model)];
            integrate_fallible(|r| Ok(r.powi(d - 1) * model.pair_connectedness(r)?), &breaks)?
        }
    };
    Ok(MassResult { value, method: MassMethod::Quadrature, est_abs_error: err })
}

/// Leading large-k term k^s / (β^s d), k = m for SIMO/MISO and n for MIMO.
pub fn mass_scaling_leading(model: &ConnectionModel) -> Result<f64> {
    let k = match model.kind() {
        LinkKind::SimoMiso { m } => m as f64,
        LinkKind::Mimo { n_t, n_r } => n_t.max(n_r) as f64,
        LinkKind::Siso | LinkKind::UnitDisk { .. } => {
            return capability("leading-order scaling is defined for SIMO/MISO and MIMO only")
        }
    };
    let p = model.params();
    let s = p.shape();
    Ok((k / p.beta()).powf(s) / p.dim() as f64)
}

/// Step-function approximation (1/d)(n/β)^{d/η}.
pub fn mass_step_approx(n: u32, params: &PathLossParams) -> Result<MassResult> {
    if n < 2 {
        return capability(format!("MIMO step approximation requires n >= 2, got {n}"));
    }
    let value = (n as f64 / params.beta()).powf(params.shape()) / params.dim() as f64;
    Ok(MassResult { value, method: MassMethod::StepApprox, est_abs_error: 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepError {
    /// ∫₀^{r_t} r^{d-1}(H - 1) dr ≤ 0
    pub eps_minus: f64,
    /// ∫_{r_t}^∞ r^{d-1} H dr ≥ 0
    pub eps_plus: f64,
}

impl StepError {
    pub fn total(&self) -> f64 {
        self.eps_minus + self.eps_plus
    }
}

/// ε₋ and ε₊ for MIMO (m = 2) with transition radius r_t = (n/β)^{1/η}.
pub fn step_error(n: u32, params: &PathLossParams) -> Result<StepError> {
    if n < 2 {
        return capability(format!("MIMO step error requires n >= 2, got {n}"));
    }
    let model = ConnectionModel::mimo(2, n, *params)?;
    let d = params.dim() as i32;
    let rt = transition_radius(&model);
    let (lower, _) =
        integrate_fallible(|r| Ok(r.powi(d - 1) * (model.pair_connectedness(r)? - 1.0)), &[0.0, rt])?;
    let (upper, _) = integrate_fallible(
        |r| Ok(r.powi(d - 1) * model.pair_connectedness(r)?),
        &[rt, quadrature_cutoff(&model)],
    )?;
    Ok(StepError { eps_minus: lower.min(0.0), eps_plus: upper.max(0.0) })
}

/// Ordinary least-squares slope of ln|y| against ln x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::DegenerateFit("need at least two paired samples".into()));
    }
    let mut lx = Vec::with_capacity(xs.len());
    let mut ly = Vec::with_capacity(ys.len());
    for (&x, &y) in xs.iter().zip(ys) {
        if !(x > 0.0 && x.is_finite()) || !(y != 0.0 && y.is_finite()) {
            return Err(Error::DegenerateFit(format!("sample ({x}, {y}) has no finite logarithm")));
        }
        lx.push(x.ln());
        ly.push(y.abs().ln());
    }
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    Ok(sxy / sxx)
}

fn check_sweep(ks: &[u32], min: u32) -> Result<()> {
    if ks.len() < 4 {
        return domain("order fit needs at least 4 values");
    }
    if ks.windows(2).any(|w| w[1] <= w[0]) {
        return domain("order fit values must be strictly increasing");
    }
    if ks[0] < min {
        return domain(format!("order fit values must be >= {min}"));
    }
    if (ks[ks.len() - 1] as f64) < 8.0 * ks[0] as f64 {
        return domain("order fit values must span at least a factor of 8");
    }
    Ok(())
}

/// Slope of ln|ε(n)| against ln n with ε from quadrature; ≈ d/η - 1/2 asymptotically.
pub fn error_order_fit(n_values: &[u32], params: &PathLossParams) -> Result<f64> {
    check_sweep(n_values, 2)?;
    let mut eps = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let e = step_error(n, params)?.total();
        if e == 0.0 {
            return Err(Error::DegenerateFit(format!("ε({n}) = 0")));
        }
        eps.push(e);
    }
    let ns: Vec<f64> = n_values.iter().map(|&n| n as f64).collect();
    loglog_slope(&ns, &eps)
}

/// Which diversity family a scaling sweep runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiversityFamily {
    SimoMiso,
    Mimo,
}

impl DiversityFamily {
    pub fn model(self, k: u32, params: PathLossParams) -> Result<ConnectionModel> {
        match self {
            DiversityFamily::SimoMiso => ConnectionModel::simo_miso(k, params),
            DiversityFamily::Mimo => ConnectionModel::mimo(2, k, params),
        }
    }
}

/// M′_closed / leading - 1 for one diversity order.
pub fn leading_order_gap(family: DiversityFamily, k: u32, params: &PathLossParams) -> Result<f64> {
    let model = family.model(k, *params)?;
    Ok(mass_closed(&model)?.value / mass_scaling_leading(&model)? - 1.0)
}

/// Slope of ln|M′/leading - 1| against ln k: -1 for SIMO/MISO, -1/2 for MIMO.
/// For SIMO/MISO with d = η the correction vanishes identically and the fit
/// reports a degenerate-fit error.
pub fn scaling_order_fit(family: DiversityFamily, ks: &[u32], params: &PathLossParams) -> Result<f64> {
    let min = match family {
        DiversityFamily::SimoMiso => 1,
        DiversityFamily::Mimo => 2,
    };
    check_sweep(ks, min)?;
    let mut gaps = Vec::with_capacity(ks.len());
    for &k in ks {
        let g = leading_order_gap(family, k, params)?;
        if g.abs() < 1e-13 {
            return Err(Error::DegenerateFit(format!("correction at k={k} is zero to rounding")));
        }
        gaps.push(g);
    }
    let xs: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    loglog_slope(&xs, &gaps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pl(beta: f64, eta: f64, d: u32) -> PathLossParams {
        PathLossParams::new(beta, eta, d).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn simo_closed_examples() {
        let m = mass_simo_closed(1, &pl(1.0, 2.0, 2)).unwrap().value;
        assert!((m - 0.5).abs() < 1e-15);
        assert!((m * 2.0 * PI - PI).abs() < 1e-14);
        let m = mass_simo_closed(1, &pl(1.0, 2.0, 3)).unwrap().value;
        assert!((m - PI.sqrt() / 4.0).abs() < 1e-15);
        assert!((m * 4.0 * PI - PI.powf(1.5)).abs() < 1e-13);
    }

    #[test]
    fn simo_m4_against_quadrature() {
        let p = pl(0.7, 3.0, 3);
        let closed = mass_simo_closed(4, &p).unwrap().value;
        let quad = mass_quadrature(&ConnectionModel::simo_miso(4, p).unwrap()).unwrap();
        assert!(rel(closed, quad.value) < 1e-10);
        // Γ(5)/(0.7 · 3 · Γ(4)) = 4/2.1
        assert!(rel(closed, 4.0 / 2.1) < 1e-14);
        assert_eq!(quad.method, MassMethod::Quadrature);
        assert!(quad.est_abs_error < 1e-9);
    }

    #[test]
    fn mimo_n2_value_and_constant() {
        let p = pl(1.0, 2.0, 3);
        let closed = mass_mimo_closed(2, &p).unwrap().value;
        let special = mass_mimo_n2(&p).unwrap().value;
        let by_hand = (1.5f64.powi(2) + 1.5 + 2.0 - 2f64.powf(-1.5)) * (PI.sqrt() / 2.0) / 2.0;
        assert!(rel(closed, special) < 1e-12);
        assert!(rel(special, by_hand) < 1e-14);
        assert!((closed * 16.0 / PI.sqrt() - (23.0 - 2f64.sqrt())).abs() < 1e-10);
        assert!((closed - 2.391_238_143_512_242).abs() < 1e-12);
    }

    #[test]
    fn n2_specialization_over_grid() {
        for d in 1..=3 {
            for eta in [2.0, 3.0, 4.0, 5.5] {
                for beta in [0.5, 1.0, 2.0] {
                    let p = pl(beta, eta, d);
                    let a = mass_mimo_closed(2, &p).unwrap().value;
                    let b = mass_mimo_n2(&p).unwrap().value;
                    assert!(rel(a, b) < 1e-11, "d={d} eta={eta} beta={beta}");
                }
            }
        }
    }

    #[test]
    fn mimo_closed_reference_values() {
        // 30-digit quadrature of ∫ r^{d-1} H(r) dr.
        let cases = [
            (5, 2, 4.0, 1.3, 1.180_906_448_864_873),
            (3, 3, 2.0, 1.0, 3.827_564_627_017_373),
            (8, 1, 3.0, 0.5, 2.790_954_083_180_082),
            (4, 2, 2.0, 2.0, 1.546_875),
            (64, 3, 2.0, 1.0, 208.758_839_294_668_79),
            (128, 2, 4.0, 1.0, 5.928_025_544_691_158_6),
        ];
        for (n, d, eta, beta, expected) in cases {
            let v = mass_mimo_closed(n, &pl(beta, eta, d)).unwrap().value;
            assert!(rel(v, expected) < 1e-11, "n={n}: {v} vs {expected}");
        }
    }

    #[test]
    fn printed_expression_disagrees_with_integral() {
        let p = pl(1.0, 2.0, 3);
        let printed = mass_mimo_closed_as_printed(2, &p).unwrap();
        let quad = mass_quadrature(&ConnectionModel::mimo(2, 2, p).unwrap()).unwrap().value;
        assert!(rel(printed, quad) > 0.5, "printed {printed}, integral {quad}");
    }

    #[test]
    fn quadrature_examples() {
        let q = mass_quadrature(&ConnectionModel::siso(pl(1.0, 2.0, 2))).unwrap().value;
        assert!((q - 0.5).abs() < 1e-10);
        let disk = ConnectionModel::unit_disk(1.0, pl(1.0, 2.0, 3)).unwrap();
        assert!((mass_quadrature(&disk).unwrap().value - 1.0 / 3.0).abs() < 1e-14);
        assert!((mass_closed(&disk).unwrap().value - 1.0 / 3.0).abs() < 1e-15);
        let m = ConnectionModel::mimo(2, 3, pl(1.0, 2.0, 3)).unwrap();
        let (c, q) = (mass_closed(&m).unwrap().value, mass_quadrature(&m).unwrap().value);
        assert!(rel(c, q) < 1e-6);
    }

    #[test]
    fn closed_matches_quadrature_on_grid() {
        for d in 1..=3 {
            for eta in [2.0, 3.0, 4.0] {
                for beta in [0.5, 1.0, 2.0] {
                    let p = pl(beta, eta, d);
                    for k in 1..=8u32 {
                        let mut models = vec![ConnectionModel::simo_miso(k, p).unwrap()];
                        if k >= 2 {
                            models.push(ConnectionModel::mimo(2, k, p).unwrap());
                        }
                        for m in models {
                            let c = mass_closed(&m).unwrap().value;
                            let q = mass_quadrature(&m).unwrap().value;
                            assert!((c - q).abs() <= 1e-9f64.max(1e-6 * c), "{m:?}: {c} vs {q}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn power_scaling_factorizes() {
        for d in 1..=3 {
            for eta in [2.0, 3.0, 4.0] {
                let s = d as f64 / eta;
                for (kind, k) in [(0, 1), (0, 5), (1, 2), (1, 6)] {
                    let value = |beta: f64| {
                        let p = pl(beta, eta, d);
                        let m = if kind == 0 {
                            ConnectionModel::simo_miso(k, p).unwrap()
                        } else {
                            ConnectionModel::mimo(2, k, p).unwrap()
                        };
                        mass_closed(&m).unwrap().value * beta.powf(s)
                    };
                    let base = value(1.0);
                    for beta in [0.5, 2.0, 3.7] {
                        assert!(rel(value(beta), base) < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn leading_order_examples() {
        let p = pl(1.0, 2.0, 2);
        let l = mass_scaling_leading(&ConnectionModel::simo_miso(1, p).unwrap()).unwrap();
        assert!((l - 0.5).abs() < 1e-15);
        let p3 = pl(1.0, 2.0, 3);
        let l = mass_scaling_leading(&ConnectionModel::mimo(2, 4, p3).unwrap()).unwrap();
        assert!((l - 8.0 / 3.0).abs() < 1e-14);
        let g16 = leading_order_gap(DiversityFamily::SimoMiso, 16, &p3).unwrap().abs();
        let g8 = leading_order_gap(DiversityFamily::SimoMiso, 8, &p3).unwrap().abs();
        assert!(g16 < g8);
        assert!(matches!(
            mass_scaling_leading(&ConnectionModel::siso(p3)),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn step_approx_examples() {
        let p = pl(1.0, 2.0, 3);
        assert!((mass_step_approx(2, &p).unwrap().value - 2f64.powf(1.5) / 3.0).abs() < 1e-15);
        assert!((mass_step_approx(8, &p).unwrap().value - 8f64.powf(1.5) / 3.0).abs() < 1e-13);
        let gap = |n| {
            let step = mass_step_approx(n, &p).unwrap().value;
            (mass_mimo_closed(n, &p).unwrap().value - step).abs() / step
        };
        assert!(gap(64) < gap(16));
        assert!(mass_step_approx(1, &p).is_err());
    }

    #[test]
    fn step_error_reference_values() {
        let p = pl(1.0, 2.0, 3);
        let e = step_error(2, &p).unwrap();
        assert!((e.eps_minus + 0.071_816_063_513_550_20).abs() < 1e-10);
        assert!((e.eps_plus - 1.520_245_165_443_729).abs() < 1e-10);
        let step = mass_step_approx(2, &p).unwrap().value;
        let closed = mass_mimo_closed(2, &p).unwrap().value;
        assert!(rel(step + e.total(), closed) < 1e-8);

        let p = pl(1.0, 2.0, 2);
        let e = step_error(32, &p).unwrap();
        assert!((e.eps_minus + 0.125_152_911_472_724_8).abs() < 1e-10);
        assert!((e.eps_plus - 3.304_249_031_407_666).abs() < 1e-10);
    }

    #[test]
    fn step_error_signs_and_reconciliation() {
        for (d, eta) in [(1, 2.0), (2, 3.0), (3, 4.0)] {
            let p = pl(1.3, eta, d);
            for n in [2, 5, 17, 40] {
                let e = step_error(n, &p).unwrap();
                assert!(e.eps_minus <= 0.0 && e.eps_plus >= 0.0);
                let quad = mass_quadrature(&ConnectionModel::mimo(2, n, p).unwrap()).unwrap().value;
                let step = mass_step_approx(n, &p).unwrap().value;
                assert!(rel(step + e.total(), quad) < 1e-8, "d={d} eta={eta} n={n}");
            }
        }
    }

    #[test]
    fn loglog_slope_recovers_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| -3.0 * x.powf(-0.7)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() + 0.7).abs() < 1e-12);
        assert!(matches!(loglog_slope(&xs, &[1.0, 0.0, 1.0, 1.0]), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn sweep_validation() {
        let p = pl(1.0, 2.0, 3);
        assert!(error_order_fit(&[8, 16, 32], &p).is_err());
        assert!(error_order_fit(&[8, 9, 10, 11], &p).is_err());
        assert!(error_order_fit(&[8, 16, 16, 64], &p).is_err());
        // s = 1 makes Γ(m+1)/Γ(m) = m exactly: no correction to fit.
        let flat = pl(1.0, 3.0, 3);
        assert!(matches!(
            scaling_order_fit(DiversityFamily::SimoMiso, &[4, 8, 16, 32], &flat),
            Err(Error::DegenerateFit(_))
        ));
    }
}
