//! Pair-connectedness H(r) for Rayleigh-faded point-to-point links.
//!
//! A link of length r connects with probability H(r) = 1 - F_X(β r^η), where
//! X is the channel power gain. For SISO X is exponential, for SIMO/MISO it is
//! Gamma(m, 1) and for MIMO with beamforming and MRC it is the largest
//! eigenvalue of the channel Gram matrix.

use serde::{Deserialize, Serialize};

use crate::error::{capability, domain, Result};
use crate::specfun::{self, log_gamma};

/// Path loss constants shared by all fading models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    beta: f64,
    eta: f64,
    dim: u32,
}

impl PathLossParams {
    pub fn new(beta: f64, eta: f64, dim: u32) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return domain(format!("beta must be positive and finite, got {beta}"));
        }
        if !(eta.is_finite() && eta >= 2.0) {
            return domain(format!("path-loss exponent must be finite and >= 2, got {eta}"));
        }
        if !(1..=3).contains(&dim) {
            return domain(format!("dimension must be 1, 2 or 3, got {dim}"));
        }
        Ok(Self { beta, eta, dim })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// d/η, the exponent every mass formula is built from.
    pub fn shape(&self) -> f64 {
        self.dim as f64 / self.eta
    }

    /// βr^η, the argument handed to the channel-gain CDF.
    pub fn snr_argument(&self, r: f64) -> f64 {
        self.beta * r.powf(self.eta)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(beta, self.eta, self.dim)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinkKind {
    Siso,
    /// Receive (SIMO) or transmit (MISO) diversity with `m` branches.
    SimoMiso { m: u32 },
    /// Transmit beamforming with maximum ratio combining.
    Mimo { n_t: u32, n_r: u32 },
    /// Hard cutoff; `plateau` is the value taken exactly at r = radius.
    UnitDisk { radius: f64, plateau: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionModel {
    kind: LinkKind,
    params: PathLossParams,
}

impl ConnectionModel {
    pub fn new(kind: LinkKind, params: PathLossParams) -> Result<Self> {
        match kind {
            LinkKind::Siso => {}
            LinkKind::SimoMiso { m } => {
                if m == 0 {
                    return domain("SIMO/MISO needs at least one diversity branch");
                }
            }
            LinkKind::Mimo { n_t, n_r } => {
                if n_t.min(n_r) != 2 {
                    return capability(format!(
                        "MIMO is implemented for min(n_t, n_r) = 2 only, got {n_t}x{n_r}"
                    ));
                }
            }
            LinkKind::UnitDisk { radius, plateau } => {
                if !(radius.is_finite() && radius > 0.0) {
                    return domain(format!("unit-disk radius must be positive, got {radius}"));
                }
                if !(0.0..=1.0).contains(&plateau) {
                    return domain(format!("unit-disk plateau must lie in [0, 1], got {plateau}"));
                }
            }
        }
        Ok(Self { kind, params })
    }

    pub fn siso(params: PathLossParams) -> Self {
        Self { kind: LinkKind::Siso, params }
    }

    pub fn simo_miso(m: u32, params: PathLossParams) -> Result<Self> {
        Self::new(LinkKind::SimoMiso { m }, params)
    }

    pub fn mimo(n_t: u32, n_r: u32, params: PathLossParams) -> Result<Self> {
        Self::new(LinkKind::Mimo { n_t, n_r }, params)
    }

    /// Unit disk with the plateau set to the SISO value e^{-β}.
    pub fn unit_disk(radius: f64, params: PathLossParams) -> Result<Self> {
        Self::new(LinkKind::UnitDisk { radius, plateau: (-params.beta).exp() }, params)
    }

    pub fn kind(&self) -> LinkKind {
        self.kind
    }

    pub fn params(&self) -> PathLossParams {
        self.params
    }

    pub fn with_params(&self, params: PathLossParams) -> Self {
        Self { kind: self.kind, params }
    }

    /// max(n_t, n_r) for MIMO, `None` otherwise.
    pub fn mimo_order(&self) -> Option<u32> {
        match self.kind {
            LinkKind::Mimo { n_t, n_r } => Some(n_t.max(n_r)),
            _ => None,
        }
    }

    /// True for the 2x2 MIMO link, the case with closed-form prism results.
    pub fn is_mimo_2x2(&self) -> bool {
        matches!(self.kind, LinkKind::Mimo { n_t: 2, n_r: 2 })
    }

    /// H(r).
    pub fn pair_connectedness(&self, r: f64) -> Result<f64> {
        if !(r.is_finite() && r >= 0.0) {
            return domain(format!("distance must be finite and non-negative, got {r}"));
        }
        let x = self.params.snr_argument(r);
        match self.kind {
            LinkKind::Siso => Ok((-x).exp()),
            LinkKind::SimoMiso { m } => specfun::regularized_upper_gamma(m as f64, x),
            LinkKind::Mimo { n_t, n_r } => mimo_m2(n_t.max(n_r), x),
            LinkKind::UnitDisk { radius, plateau } => Ok(if r < radius {
                1.0
            } else if r == radius {
                plateau
            } else {
                0.0
            }),
        }
    }
}

/// H for m = 2 MIMO as a function of x = βr^η, in the cancellation-free
/// arrangement 2Q - Q² + x A² + (1 - Q)(x - n) A with Q = Q(n, x) and
/// A = x^{n-1} e^{-x} / Γ(n). Algebraically identical to
/// 1 - n P(n-1,x) P(n+1,x) + (n-1) P(n,x)².
pub(crate) fn mimo_m2(n: u32, x: f64) -> Result<f64> {
    let nf = n as f64;
    let (p, q) = specfun::SpecFunConfig::default().regularized_gamma_pair(nf, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    let a = ((nf - 1.0) * x.ln() - x - log_gamma(nf)?).exp();
    let h = 2.0 * q - q * q + x * a * a + p * (x - nf) * a;
    Ok(h.clamp(0.0, 1.0))
}

/// The literal expansion 1 - n P(n-1,x) P(n+1,x) + (n-1) P(n,x)² at x = βr^η.
pub fn mimo_regularized_expansion(n: u32, params: &PathLossParams, r: f64) -> Result<f64> {
    check_mimo_n(n)?;
    check_r(r)?;
    let x = params.snr_argument(r);
    let nf = n as f64;
    let p = |a: f64| specfun::regularized_lower_gamma(a, x);
    Ok(1.0 - nf * p(nf - 1.0)? * p(nf + 1.0)? + (nf - 1.0) * p(nf)?.powi(2))
}

/// Determinant form 1 - κ_{m,n} det[γ(n - m + i + j - 1, βr^η)]_{i,j=1..m}
/// with κ_{m,n}^{-1} = Π_i Γ(n-i+1) Γ(m-i+1). Evaluated for m ∈ {1, 2}.
pub fn pair_connectedness_mimo_det(n_t: u32, n_r: u32, params: &PathLossParams, r: f64) -> Result<f64> {
    check_r(r)?;
    let m = n_t.min(n_r);
    let n = n_t.max(n_r);
    if m == 0 {
        return domain("antenna counts must be positive");
    }
    if m > 2 {
        return capability(format!("determinant form evaluated for min(n_t, n_r) <= 2, got {m}"));
    }
    let x = params.snr_argument(r);
    let (m_f, n_f) = (m as f64, n as f64);
    let entry = |i: u32, j: u32| specfun::lower_incomplete_gamma(n_f - m_f + (i + j) as f64 - 1.0, x);

    let mut log_kappa_inv = 0.0;
    for i in 1..=m {
        log_kappa_inv += log_gamma(n_f - i as f64 + 1.0)? + log_gamma(m_f - i as f64 + 1.0)?;
    }
    let det = match m {
        1 => entry(1, 1)?,
        _ => entry(1, 1)? * entry(2, 2)? - entry(1, 2)? * entry(2, 1)?,
    };
    Ok(1.0 - det * (-log_kappa_inv).exp())
}

/// The unregularized rearrangement
///
/// ```text
/// H = [n Γ(n-1,x) - 2Γ(n,x) + Γ(n+1,x)/(n-1)] / Γ(n-1)
///   + [Γ(n,x)² - Γ(n-1,x) Γ(n+1,x)] / (Γ(n) Γ(n-1))
/// ```
///
/// at x = βr^η. Fails with an overflow error once Γ(n)² leaves f64 range.
pub fn mimo_gamma_form(n: u32, params: &PathLossParams, r: f64) -> Result<f64> {
    check_mimo_n(n)?;
    check_r(r)?;
    let x = params.snr_argument(r);
    let nf = n as f64;
    let up = |a: f64| specfun::upper_incomplete_gamma(a, x);
    let (g_lo, g_mid, g_hi) = (up(nf - 1.0)?, up(nf)?, up(nf + 1.0)?);
    let gamma_lo = specfun::gamma(nf - 1.0)?;
    let gamma_mid = specfun::gamma(nf)?;
    let linear = (nf * g_lo - 2.0 * g_mid + g_hi / (nf - 1.0)) / gamma_lo;
    let quadratic = (g_mid * g_mid - g_lo * g_hi) / (gamma_mid * gamma_lo);
    let h = linear + quadratic;
    if h.is_finite() {
        Ok(h)
    } else {
        Err(crate::Error::Overflow(format!("gamma form at n={n} leaves f64 range")))
    }
}

fn check_mimo_n(n: u32) -> Result<()> {
    if n < 2 {
        return capability(format!("MIMO m = 2 requires n >= 2, got {n}"));
    }
    Ok(())
}

fn check_r(r: f64) -> Result<()> {
    if !(r.is_finite() && r >= 0.0) {
        return domain(format!("distance must be finite and non-negative, got {r}"));
    }
    Ok(())
}
