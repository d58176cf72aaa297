//! Globally adaptive Gauss-Kronrod (G7/K15) quadrature on finite intervals.

use crate::error::{domain, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639,
    0.949_107_912_342_758_525,
    0.864_864_423_359_769_073,
    0.741_531_185_599_394_440,
    0.586_087_235_467_691_130,
    0.405_845_151_377_397_167,
    0.207_784_955_007_898_468,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_553,
    0.104_790_010_322_250_184,
    0.140_653_259_715_525_919,
    0.169_004_726_639_267_903,
    0.190_350_578_064_785_410,
    0.204_432_940_075_298_892,
    0.209_482_141_084_727_828,
];
// Gauss weights for the K15 nodes at odd positions 1, 3, 5 and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693,
    0.279_705_391_489_276_668,
    0.381_830_050_505_118_945,
    0.417_959_183_673_469_388,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subintervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-12, max_subintervals: 4000 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment { lo, hi, value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

/// Integrate `f` over [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    integrate_with_breaks(f, &[a, b], cfg)
}

/// Integrate over [breaks[0], breaks[last]], starting from the given partition.
/// Breakpoints should sit where the integrand changes character.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if breaks.len() < 2 || breaks.iter().any(|x| !x.is_finite()) {
        return domain("quadrature needs at least two finite breakpoints");
    }
    if breaks.windows(2).any(|w| w[1] < w[0]) {
        return domain("quadrature breakpoints must be non-decreasing");
    }
    let mut segments: Vec<Segment> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod15(&f, w[0], w[1]))
        .collect();
    let mut evaluations = 15 * segments.len();
    if segments.is_empty() {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }

    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() {
            return Err(Error::NonConvergence("integrand produced a non-finite value".into()));
        }
        if error <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
            return Ok(QuadResult { value, abs_error: error, evaluations });
        }
        if segments.len() >= cfg.max_subintervals {
            return Err(Error::NonConvergence(format!(
                "quadrature error estimate {error:e} above tolerance after {} subintervals",
                segments.len()
            )));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            return Err(Error::NonConvergence("interval bisection underflow".into()));
        }
        segments.push(kronrod15(&f, seg.lo, mid));
        segments.push(kronrod15(&f, mid, seg.hi));
        evaluations += 30;
    }
}
