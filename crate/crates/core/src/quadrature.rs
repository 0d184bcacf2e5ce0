//! Fixed Gauss rules and composite integration helpers.
//!
//! Nodes and weights come from `gauss-quad`; only even degrees are used
//! because that crate pins the middle node of odd Jacobi rules to zero.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi, GaussLegendre};

use crate::error::{Error, Result};

/// A quadrature rule on [-1, 1] for the weight (1 - x)^a (1 + x)^b.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pairs: Vec<(f64, f64)>,
    right_exponent: f64,
    left_exponent: f64,
}

impl GaussRule {
    pub fn legendre(degree: usize) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(degree.max(1)).unwrap());
        Self {
            pairs: rule.as_node_weight_pairs().to_vec(),
            right_exponent: 0.0,
            left_exponent: 0.0,
        }
    }

    /// Gauss–Jacobi rule with weight (1 - x)^`right` (1 + x)^`left`.
    pub fn jacobi(degree: usize, right: f64, left: f64) -> Result<Self> {
        if degree < 2 || degree % 2 == 1 {
            return Err(Error::Unsupported(format!(
                "Gauss-Jacobi degree must be even and >= 2, got {degree}"
            )));
        }
        let a = FiniteAboveNegOneF64::new(right)
            .ok_or_else(|| Error::Unsupported(format!("Jacobi exponent {right} <= -1")))?;
        let b = FiniteAboveNegOneF64::new(left)
            .ok_or_else(|| Error::Unsupported(format!("Jacobi exponent {left} <= -1")))?;
        let rule = GaussJacobi::new(NonZeroUsize::new(degree).unwrap(), a, b);
        Ok(Self {
            pairs: rule.as_node_weight_pairs().to_vec(),
            right_exponent: right,
            left_exponent: left,
        })
    }

    pub fn degree(&self) -> usize {
        self.pairs.len()
    }

    /// ∫_a^b (b - s)^p (s - a)^q g(s) ds where p, q are the rule's exponents.
    pub fn integrate(&self, a: f64, b: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let sum: f64 = self.pairs.iter().map(|&(x, w)| w * g(mid + half * x)).sum();
        sum * half.powf(1.0 + self.right_exponent + self.left_exponent)
    }
}

pub(crate) fn legendre32() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::legendre(32))
}

pub(crate) fn legendre16() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::legendre(16))
}

/// Sorted, de-duplicated cut points of [a, b] including both ends.
pub fn merge_breakpoints(a: f64, b: f64, extra: &[f64]) -> Vec<f64> {
    let mut cuts: Vec<f64> = extra.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15);
    cuts
}

/// Composite 32-point Gauss–Legendre over [a, b], split at `breakpoints`.
pub fn integrate_split(a: f64, b: f64, breakpoints: &[f64], mut g: impl FnMut(f64) -> f64) -> f64 {
    let cuts = merge_breakpoints(a, b, breakpoints);
    let rule = legendre32();
    cuts.windows(2).map(|w| rule.integrate(w[0], w[1], &mut g)).sum()
}

/// Like [`integrate_split`], but every piece is further refined geometrically
/// toward both of its ends, so integrands with algebraic endpoint behaviour
/// such as (t - s)^0.3 are still resolved to near machine precision.
pub fn integrate_graded(a: f64, b: f64, breakpoints: &[f64], levels: usize, mut g: impl FnMut(f64) -> f64) -> f64 {
    let cuts = merge_breakpoints(a, b, breakpoints);
    let rule = legendre16();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let mut pts = vec![lo, mid, hi];
        let mut h = 0.5 * (hi - lo);
        for _ in 0..levels {
            h *= 0.5;
            pts.push(lo + h);
            pts.push(hi - h);
        }
        pts.sort_by(f64::total_cmp);
        for p in pts.windows(2) {
            if p[1] > p[0] {
                total += rule.integrate(p[0], p[1], &mut g);
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beta(a: f64, b: f64) -> f64 {
        libm::tgamma(a) * libm::tgamma(b) / libm::tgamma(a + b)
    }

    #[test]
    fn legendre_is_exact_on_polynomials() {
        let r = GaussRule::legendre(16);
        let v = r.integrate(0.2, 0.9, |x: f64| x.powi(31));
        let exact = (0.9f64.powi(32) - 0.2f64.powi(32)) / 32.0;
        assert!((v - exact).abs() < 1e-15);
    }

    #[test]
    fn jacobi_matches_beta_function() {
        // ∫_0^t s^k (t - s)^(-α) ds = t^(k+1-α) B(k+1, 1-α)
        for &alpha in &[0.1, 0.5, 0.9] {
            let r = GaussRule::jacobi(24, -alpha, 0.0).unwrap();
            for k in 0..6 {
                let t: f64 = 0.7;
                let v = r.integrate(0.0, t, |s| s.powi(k));
                let exact = t.powf(k as f64 + 1.0 - alpha) * beta(k as f64 + 1.0, 1.0 - alpha);
                assert!((v - exact).abs() < 1e-13, "alpha={alpha} k={k}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn jacobi_left_weight() {
        let r = GaussRule::jacobi(24, 0.0, 0.5).unwrap();
        let v = r.integrate(0.0, 2.0, |_| 1.0);
        assert!((v - 2.0f64.powf(1.5) / 1.5).abs() < 1e-13);
    }

    #[test]
    fn odd_jacobi_degree_is_rejected() {
        assert!(GaussRule::jacobi(5, -0.5, 0.0).is_err());
        assert!(GaussRule::jacobi(4, -1.0, 0.0).is_err());
    }

    #[test]
    fn graded_resolves_endpoint_power() {
        let v = integrate_graded(
            0.0,
            1.0,
            &[0.6],
            40,
            |s| if s < 0.6 { (0.6 - s).powf(0.2) } else { 0.0 },
        );
        let exact = 0.6f64.powf(1.2) / 1.2;
        assert!((v - exact).abs() < 1e-12, "{v} vs {exact}");
    }
}
