//! Incomplete gamma functions: power series for x < a + 1, modified Lentz
//! continued fraction for x >= a + 1.

use super::gamma::log_gamma;
use super::SpecFunConfig;
use crate::error::{domain, Error, Result};

const TINY: f64 = 1e-300;

/// Raw result of one evaluation, kept in a form from which both regularized
/// and unregularized values can be rebuilt without forming Γ(a).
enum Branch {
    /// γ(a, x) = x^a e^{-x} · sum
    Series(f64),
    /// Γ(a, x) = x^a e^{-x} / denom
    ContinuedFraction(f64),
}

struct Evaluation {
    /// a ln x - x
    log_kernel: f64,
    log_gamma_a: f64,
    branch: Branch,
}

impl SpecFunConfig {
    fn evaluate(&self, a: f64, x: f64) -> Result<Evaluation> {
        if !a.is_finite() || !x.is_finite() || a <= 0.0 || x < 0.0 {
            return domain(format!("incomplete gamma requires a > 0, x >= 0 finite; got a={a}, x={x}"));
        }
        let log_gamma_a = log_gamma(a)?;
        let log_kernel = a * x.ln() - x;
        let branch = if x < a + 1.0 {
            Branch::Series(self.lower_series(a, x)?)
        } else {
            Branch::ContinuedFraction(self.upper_continued_fraction(a, x)?)
        };
        Ok(Evaluation { log_kernel, log_gamma_a, branch })
    }

    /// Σ_{k≥0} x^k / (a (a+1) ... (a+k))
    fn lower_series(&self, a: f64, x: f64) -> Result<f64> {
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..self.max_iter() {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * self.rel_tol() {
                return Ok(sum);
            }
        }
        Err(Error::NonConvergence(format!("incomplete gamma series at a={a}, x={x}")))
    }

    /// Denominator D with Γ(a, x) = x^a e^{-x} / D.
    fn upper_continued_fraction(&self, a: f64, x: f64) -> Result<f64> {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=self.max_iter() {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < self.rel_tol() {
                return Ok(1.0 / h);
            }
        }
        Err(Error::NonConvergence(format!("incomplete gamma continued fraction at a={a}, x={x}")))
    }

    /// (P(a, x), Q(a, x)).
    pub fn regularized_gamma_pair(&self, a: f64, x: f64) -> Result<(f64, f64)> {
        if x == 0.0 && a > 0.0 && a.is_finite() {
            return Ok((0.0, 1.0));
        }
        let ev = self.evaluate(a, x)?;
        let log_pref = ev.log_kernel - ev.log_gamma_a;
        Ok(match ev.branch {
            Branch::Series(sum) => {
                let p = (log_pref + sum.ln()).exp().min(1.0);
                (p, 1.0 - p)
            }
            Branch::ContinuedFraction(denom) => {
                let q = (log_pref - denom.ln()).exp().min(1.0);
                (1.0 - q, q)
            }
        })
    }

    pub fn regularized_lower_gamma(&self, a: f64, x: f64) -> Result<f64> {
        Ok(self.regularized_gamma_pair(a, x)?.0)
    }

    pub fn regularized_upper_gamma(&self, a: f64, x: f64) -> Result<f64> {
        Ok(self.regularized_gamma_pair(a, x)?.1)
    }

    /// Unregularized Γ(a, x).
    pub fn upper_incomplete_gamma(&self, a: f64, x: f64) -> Result<f64> {
        let value = if x == 0.0 {
            log_gamma(a)?.exp()
        } else {
            let ev = self.evaluate(a, x)?;
            match ev.branch {
                Branch::ContinuedFraction(denom) => (ev.log_kernel - denom.ln()).exp(),
                Branch::Series(sum) => {
                    let p = (ev.log_kernel - ev.log_gamma_a + sum.ln()).exp();
                    (ev.log_gamma_a + (-p).ln_1p()).exp()
                }
            }
        };
        finite(value, "Γ(a, x)", a, x)
    }

    /// Unregularized γ(a, x).
    pub fn lower_incomplete_gamma(&self, a: f64, x: f64) -> Result<f64> {
        if x == 0.0 && a > 0.0 && a.is_finite() {
            return Ok(0.0);
        }
        let ev = self.evaluate(a, x)?;
        let value = match ev.branch {
            Branch::Series(sum) => (ev.log_kernel + sum.ln()).exp(),
            Branch::ContinuedFraction(denom) => {
                let q = (ev.log_kernel - ev.log_gamma_a - denom.ln()).exp();
                (ev.log_gamma_a + (-q).ln_1p()).exp()
            }
        };
        finite(value, "γ(a, x)", a, x)
    }
}

fn finite(v: f64, what: &str, a: f64, x: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("{what} at a={a}, x={x} exceeds f64 range")))
    }
}

#[cfg(test)]
mod tests {
    use crate::specfun::*;
    use proptest::prelude::*;

    /// Σ_{k≥0} x^{a+k} e^{-x} / Γ(a+k+1), a direct Poisson-tail series.
    fn poisson_series_p(a: f64, x: f64) -> f64 {
        let mut term = (a * x.ln() - x - log_gamma(a + 1.0).unwrap()).exp();
        let mut sum = 0.0;
        let mut k = 0.0;
        while term > 1e-18 * sum || k < 5.0 {
            sum += term;
            term *= x / (a + k + 1.0);
            k += 1.0;
        }
        sum
    }

    /// Composite Simpson on [x, x + 80] for ∫ t^{a-1} e^{-t} dt.
    fn simpson_upper(a: f64, x: f64) -> f64 {
        let n = 200_000;
        let hi = x + 80.0;
        let h = (hi - x) / n as f64;
        let f = |t: f64| t.powf(a - 1.0) * (-t).exp();
        let mut s = f(x) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(x + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn lower_regularized_examples() {
        assert_eq!(regularized_lower_gamma(1.0, 0.0).unwrap(), 0.0);
        let p = regularized_lower_gamma(1.0, 1.0).unwrap();
        assert!((p - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((p - 0.632_120_558_828_557_7).abs() < 1e-15);

        let p22 = regularized_lower_gamma(2.0, 2.0).unwrap();
        let oracle = poisson_series_p(2.0, 2.0);
        assert!((p22 - oracle).abs() < 1e-14);
        assert!((p22 - 0.593_994_150_290_161_9).abs() < 1e-14);
    }

    #[test]
    fn upper_unregularized_examples() {
        for x0 in [0.0, 0.3, 1.0, 4.5, 30.0] {
            let v = upper_incomplete_gamma(1.0, x0).unwrap();
            assert!((v - (-x0).exp()).abs() <= 1e-14 * (-x0).exp());
        }
        assert!((upper_incomplete_gamma(3.0, 0.0).unwrap() - 2.0).abs() < 1e-13);

        let v = upper_incomplete_gamma(2.5, 1.7).unwrap();
        let oracle = simpson_upper(2.5, 1.7);
        assert!((v - oracle).abs() < 1e-10, "{v} vs {oracle}");
        assert!((v - 0.848_876_789_458_320_6).abs() < 1e-13);
    }

    #[test]
    fn lower_unregularized_matches_regularized() {
        for (a, x) in [(0.5, 0.2), (3.0, 1.0), (3.0, 10.0), (8.5, 2.0), (40.0, 60.0)] {
            let g = lower_incomplete_gamma(a, x).unwrap();
            let p = regularized_lower_gamma(a, x).unwrap() * gamma(a).unwrap();
            assert!((g - p).abs() <= 1e-13 * p.abs(), "a={a} x={x}");
        }
    }

    #[test]
    fn recurrence_grid() {
        let mut a = 0.5;
        while a <= 50.0 {
            let mut x = 0.0;
            while x <= 100.0 {
                let lhs = regularized_lower_gamma(a + 1.0, x).unwrap();
                let rhs = regularized_lower_gamma(a, x).unwrap()
                    - if x == 0.0 { 0.0 } else { (a * x.ln() - x - log_gamma(a + 1.0).unwrap()).exp() };
                assert!((lhs - rhs).abs() < 1e-12, "a={a} x={x}: {lhs} vs {rhs}");
                x += 0.37;
            }
            a += 0.75;
        }
    }

    #[test]
    fn complementarity_grid() {
        for a in [0.5, 1.0, 2.5, 7.0, 20.0, 49.5] {
            for x in [0.0, 0.1, 1.0, 5.0, 20.0, 50.0, 100.0] {
                let p = regularized_lower_gamma(a, x).unwrap();
                let q = upper_incomplete_gamma(a, x).unwrap() / gamma(a).unwrap();
                assert!((p + q - 1.0).abs() < 1e-12, "a={a} x={x}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(regularized_lower_gamma(0.0, 1.0).is_err());
        assert!(regularized_lower_gamma(-1.0, 1.0).is_err());
        assert!(regularized_lower_gamma(1.0, -0.1).is_err());
        assert!(regularized_lower_gamma(1.0, f64::INFINITY).is_err());
        assert!(upper_incomplete_gamma(f64::NAN, 1.0).is_err());
        assert!(matches!(
            upper_incomplete_gamma(200.0, 1.0),
            Err(crate::Error::Overflow(_))
        ));
    }

    #[test]
    fn tight_iteration_cap_reports_nonconvergence() {
        let cfg = SpecFunConfig::new(1e-14, 100).unwrap();
        assert!(matches!(
            cfg.regularized_lower_gamma(5000.0, 4990.0),
            Err(crate::Error::NonConvergence(_))
        ));
    }

    proptest! {
        #[test]
        fn monotone_in_x(a in 0.3f64..60.0, mut xs in proptest::collection::vec(0.0f64..150.0, 2..40)) {
            xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
            let ps: Vec<f64> = xs.iter().map(|&x| regularized_lower_gamma(a, x).unwrap()).collect();
            for w in ps.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-15);
            }
            for p in ps {
                prop_assert!((0.0..=1.0).contains(&p));
            }
        }
    }
}
