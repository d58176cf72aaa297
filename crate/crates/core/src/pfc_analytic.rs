//! High-density full-connectivity probability for 2×2 MIMO links (η = 2, d = 3)
//! in a convex right prism.
//!
//! Each boundary feature of codimension i contributes ρ^{1-i} G V e^{-ρ ω M′},
//! and P_fc ≈ 1 - Σ over features. The constants below are specific to
//! H(r) = e^{-βr²}(β²r⁴ + 2 - e^{-βr²}), whose mass is M′ = (23 - √2)√π / (16 β^{3/2}).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{capability, domain, Result};
use crate::geometry::{group_features, BoundaryFeature, FeatureClass, RightPrism};
use crate::linkmodels::ConnectionModel;

/// 23 - √2.
pub const RATE_CONSTANT: f64 = 23.0 - std::f64::consts::SQRT_2;

/// Feature constants for one β. `rate_constant` is normally [`RATE_CONSTANT`];
/// other values exist only to exercise the validation checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mimo2x2Analytic {
    beta: f64,
    rate_constant: f64,
}

impl Mimo2x2Analytic {
    pub fn new(model: &ConnectionModel) -> Result<Self> {
        let p = model.params();
        if !model.is_mimo_2x2() || p.eta() != 2.0 || p.dim() != 3 {
            return capability(format!(
                "boundary contributions are derived for 2x2 MIMO with eta = 2, d = 3 only; got {:?}, eta = {}, d = {}",
                model.kind(),
                p.eta(),
                p.dim()
            ));
        }
        Ok(Self { beta: p.beta(), rate_constant: RATE_CONSTANT })
    }

    pub fn with_rate_constant(self, rate_constant: f64) -> Self {
        Self { rate_constant, ..self }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Rate per unit solid angle, the M′ implied by the feature formulas.
    pub fn unit_rate(&self) -> f64 {
        self.rate_constant * PI.sqrt() / (16.0 * self.beta.powf(1.5))
    }

    pub fn geometric_factor(&self, class: FeatureClass, theta: Option<f64>) -> Result<f64> {
        let b = self.beta;
        Ok(match class {
            FeatureClass::Corner => {
                let t = check_theta(theta)?;
                256.0 * b.powi(3) / (t.sin() * 343.0 * PI * PI * t)
            }
            FeatureClass::Edge => {
                let t = check_theta(theta)?;
                16.0 * b * b / (t.sin() * 49.0 * PI * PI)
            }
            FeatureClass::Face => 2.0 * b / (7.0 * PI),
            FeatureClass::Bulk => 1.0,
        })
    }

    /// Coefficient of ρ in the exponent. The corner rate is (23-√2)√π ϑ/(16β^{3/2}),
    /// the edge rate twice that; faces and bulk use ϑ → π and 2π.
    pub fn exponent_rate(&self, class: FeatureClass, theta: Option<f64>) -> Result<f64> {
        let scale = self.rate_constant * PI.sqrt() / self.beta.powf(1.5);
        Ok(match class {
            FeatureClass::Corner => scale * check_theta(theta)? / 16.0,
            FeatureClass::Edge => scale * check_theta(theta)? / 8.0,
            FeatureClass::Face => scale * PI / 8.0,
            FeatureClass::Bulk => scale * PI / 4.0,
        })
    }

    /// ρ^{-i} G V e^{-ρ·rate}: one feature's share of P_out before the global ρ.
    pub fn contribution(&self, feature: &BoundaryFeature, rho: f64) -> Result<FeatureContribution> {
        check_rho(rho)?;
        if !(feature.measure.is_finite() && feature.measure > 0.0) {
            return domain(format!("feature measure must be positive, got {}", feature.measure));
        }
        let g = self.geometric_factor(feature.class, feature.angle)?;
        let rate = self.exponent_rate(feature.class, feature.angle)?;
        let codim = feature.codim() as i32;
        let decay = (-rho * rate).exp() * g * feature.measure * feature.multiplicity as f64;
        Ok(FeatureContribution {
            feature: *feature,
            geometric_factor: g,
            exponent_rate: rate,
            density_power: 1 - codim,
            value: rho.powi(-codim) * decay,
            term: rho.powi(1 - codim) * decay,
        })
    }
}

fn check_theta(theta: Option<f64>) -> Result<f64> {
    match theta {
        Some(t) if t > 0.0 && t < PI => Ok(t),
        Some(t) => domain(format!("feature angle must lie in (0, π), got {t}")),
        None => domain("corner and edge features need an angle"),
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho >= 0.0) {
        return domain(format!("density must be finite and non-negative, got {rho}"));
    }
    Ok(())
}

/// 256β³ cscϑ / (343π²ρ³ϑ) · e^{-(23-√2)√π ρϑ/(16β^{3/2})}.
pub fn corner_contribution(theta: f64, model: &ConnectionModel, rho: f64) -> Result<f64> {
    Ok(Mimo2x2Analytic::new(model)?.contribution(&BoundaryFeature::corner(theta), rho)?.value)
}

/// 16Lβ² cscϑ / (49π²ρ²) · e^{-(23-√2)√π ρϑ/(8β^{3/2})}.
pub fn edge_contribution(theta: f64, length: f64, model: &ConnectionModel, rho: f64) -> Result<f64> {
    Ok(Mimo2x2Analytic::new(model)?.contribution(&BoundaryFeature::edge(theta, length), rho)?.value)
}

/// 2βS / (7πρ) · e^{-(23-√2)π^{3/2}ρ/(8β^{3/2})}, for the whole surface at once.
pub fn face_contribution(surface_area: f64, model: &ConnectionModel, rho: f64) -> Result<f64> {
    Ok(Mimo2x2Analytic::new(model)?.contribution(&BoundaryFeature::face(surface_area), rho)?.value)
}

/// V · e^{-(23-√2)π^{3/2}ρ/(4β^{3/2})}.
pub fn bulk_contribution(volume: f64, model: &ConnectionModel, rho: f64) -> Result<f64> {
    Ok(Mimo2x2Analytic::new(model)?.contribution(&BoundaryFeature::bulk(volume), rho)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureContribution {
    pub feature: BoundaryFeature,
    pub geometric_factor: f64,
    pub exponent_rate: f64,
    /// 1 - codim.
    pub density_power: i32,
    /// Without the global ρ prefactor (the C/E/F/U convention).
    pub value: f64,
    /// ρ^{1-i} G V e^{-ρ·rate} × multiplicity; these sum to P_out.
    pub term: f64,
}

/// Per-class sums of [`FeatureContribution::term`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassTotals {
    pub corner: f64,
    pub edge: f64,
    pub face: f64,
    pub bulk: f64,
}

impl ClassTotals {
    pub fn get(&self, class: FeatureClass) -> f64 {
        match class {
            FeatureClass::Corner => self.corner,
            FeatureClass::Edge => self.edge,
            FeatureClass::Face => self.face,
            FeatureClass::Bulk => self.bulk,
        }
    }

    fn add(&mut self, class: FeatureClass, v: f64) {
        match class {
            FeatureClass::Corner => self.corner += v,
            FeatureClass::Edge => self.edge += v,
            FeatureClass::Face => self.face += v,
            FeatureClass::Bulk => self.bulk += v,
        }
    }
}

/// P_fc with boundary classes added one at a time, bulk first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialSums {
    pub bulk_only: f64,
    pub with_faces: f64,
    pub with_edges: f64,
    pub full: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RegimeFlags {
    /// The first-order P_fc is negative (too sparse for the expansion).
    pub negative_pfc: bool,
    /// √β × shortest edge is below the validity scale.
    pub small_scale: bool,
}

impl RegimeFlags {
    pub fn out_of_regime(&self) -> bool {
        self.negative_pfc || self.small_scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfcBreakdown {
    pub rho: f64,
    pub contributions: Vec<FeatureContribution>,
    pub totals: ClassTotals,
    pub partial: PartialSums,
    pub p_fc: f64,
    pub p_out: f64,
    pub flags: RegimeFlags,
}

/// Evaluate the general formula at one density with a prepared feature list.
pub fn breakdown_at(
    analytic: &Mimo2x2Analytic,
    features: &[BoundaryFeature],
    small_scale: bool,
    rho: f64,
) -> Result<PfcBreakdown> {
    let mut contributions = features
        .iter()
        .map(|f| analytic.contribution(f, rho))
        .collect::<Result<Vec<_>>>()?;
    contributions.sort_by(|a, b| b.feature.codim().cmp(&a.feature.codim()));
    let mut totals = ClassTotals::default();
    for c in &contributions {
        totals.add(c.feature.class, c.term);
    }
    let bulk_only = 1.0 - totals.bulk;
    let with_faces = bulk_only - totals.face;
    let with_edges = with_faces - totals.edge;
    let full = with_edges - totals.corner;
    Ok(PfcBreakdown {
        rho,
        contributions,
        totals,
        partial: PartialSums { bulk_only, with_faces, with_edges, full },
        p_fc: full,
        p_out: 1.0 - full,
        flags: RegimeFlags { negative_pfc: full < 0.0, small_scale },
    })
}

/// P_fc ≈ 1 - Σ_features ρ^{1-i} G V e^{-ρ ω M′} for each density, in input order.
pub fn assemble(prism: &RightPrism, model: &ConnectionModel, rho_grid: &[f64]) -> Result<Vec<PfcBreakdown>> {
    let analytic = Mimo2x2Analytic::new(model)?;
    assemble_with(&analytic, prism, rho_grid)
}

pub fn assemble_with(
    analytic: &Mimo2x2Analytic,
    prism: &RightPrism,
    rho_grid: &[f64],
) -> Result<Vec<PfcBreakdown>> {
    let features = group_features(&prism.enumerate_features());
    let small = prism.is_small_scale(analytic.beta());
    rho_grid.iter().map(|&rho| breakdown_at(analytic, &features, small, rho)).collect()
}

/// One row of the (V, ω, G) table for a grouped feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTableRow {
    pub class: FeatureClass,
    pub theta: Option<f64>,
    pub multiplicity: u32,
    pub measure: f64,
    pub solid_angle: f64,
    pub geometric_factor: f64,
    pub measure_symbol: String,
    pub solid_angle_symbol: &'static str,
    pub geometric_factor_symbol: &'static str,
}

pub fn feature_table(prism: &RightPrism, model: &ConnectionModel) -> Result<Vec<FeatureTableRow>> {
    let analytic = Mimo2x2Analytic::new(model)?;
    let mut rows = Vec::new();
    let mut features = group_features(&prism.enumerate_features());
    features.sort_by(|a, b| b.codim().cmp(&a.codim()));
    for f in features {
        let (measure_symbol, solid, factor) = match f.class {
            FeatureClass::Corner => ("1".to_string(), "ϑ", "256β³cscϑ/(343π²ϑ)"),
            FeatureClass::Edge => (format!("{}", f.measure), "2ϑ", "16β²cscϑ/(49π²)"),
            FeatureClass::Face => ("S".to_string(), "2π", "2β/(7π)"),
            FeatureClass::Bulk => ("V".to_string(), "4π", "1"),
        };
        rows.push(FeatureTableRow {
            class: f.class,
            theta: f.angle,
            multiplicity: f.multiplicity,
            measure: f.measure,
            solid_angle: f.solid_angle,
            geometric_factor: analytic.geometric_factor(f.class, f.angle)?,
            measure_symbol,
            solid_angle_symbol: solid,
            geometric_factor_symbol: factor,
        });
    }
    Ok(rows)
}

/// The six named house-prism terms, without the global ρ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HouseTerms {
    /// Six right-angled corners.
    pub c1: f64,
    /// Four 3π/4 corners.
    pub c2: f64,
    /// Right-angled edges, total length (9 + 2√2)L.
    pub e1: f64,
    /// Two 3π/4 edges of length L.
    pub e2: f64,
    pub f: f64,
    pub u: f64,
}

impl HouseTerms {
    pub fn from_breakdown(b: &PfcBreakdown) -> Self {
        let right = |t: Option<f64>| t.is_some_and(|t| (t - PI / 2.0).abs() < 1e-9);
        let mut out = HouseTerms { c1: 0.0, c2: 0.0, e1: 0.0, e2: 0.0, f: 0.0, u: 0.0 };
        for c in &b.contributions {
            let slot = match (c.feature.class, right(c.feature.angle)) {
                (FeatureClass::Corner, true) => &mut out.c1,
                (FeatureClass::Corner, false) => &mut out.c2,
                (FeatureClass::Edge, true) => &mut out.e1,
                (FeatureClass::Edge, false) => &mut out.e2,
                (FeatureClass::Face, _) => &mut out.f,
                (FeatureClass::Bulk, _) => &mut out.u,
            };
            *slot += c.value;
        }
        out
    }

    pub fn sum(&self) -> f64 {
        self.c1 + self.c2 + self.e1 + self.e2 + self.f + self.u
    }
}

/// ln of each class total at ρ > 0, computed without underflow.
fn log_class_totals(analytic: &Mimo2x2Analytic, features: &[BoundaryFeature], rho: f64) -> Result<[f64; 4]> {
    let mut per_class: [Vec<f64>; 4] = Default::default();
    for f in features {
        let g = analytic.geometric_factor(f.class, f.angle)?;
        let rate = analytic.exponent_rate(f.class, f.angle)?;
        let i = f.codim() as f64;
        let log_term = (g * f.measure * f.multiplicity as f64).ln() + (1.0 - i) * rho.ln() - rho * rate;
        per_class[f.codim() as usize].push(log_term);
    }
    Ok(per_class.map(|v| {
        let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            m
        } else {
            m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
        }
    }))
}

/// Smallest ρ* such that above it the corner class exceeds every other class total.
pub fn corner_dominance_crossover(prism: &RightPrism, model: &ConnectionModel) -> Result<f64> {
    let analytic = Mimo2x2Analytic::new(model)?;
    let features = group_features(&prism.enumerate_features());
    let margin = |rho: f64| -> Result<f64> {
        let l = log_class_totals(&analytic, &features, rho)?;
        Ok(l[3] - l[0].max(l[1]).max(l[2]))
    };
    // Log-spaced scan; above the last non-positive margin the corners lead for good
    // because their rate is the smallest.
    let (lo, hi, steps) = (1e-4f64, 1e4f64, 800);
    let grid: Vec<f64> = (0..=steps).map(|k| lo * (hi / lo).powf(k as f64 / steps as f64)).collect();
    if margin(hi)? <= 0.0 {
        return domain("corner terms do not dominate within the scanned density range");
    }
    let mut last_bad = None;
    for (k, &rho) in grid.iter().enumerate() {
        if margin(rho)? <= 0.0 {
            last_bad = Some(k);
        }
    }
    let Some(k) = last_bad else { return Ok(0.0) };
    let (mut a, mut b) = (grid[k], grid[k + 1]);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if margin(mid)? <= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= 1e-14 * b {
            break;
        }
    }
    Ok(b)
}
