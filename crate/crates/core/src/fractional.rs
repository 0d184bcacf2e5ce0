//! Caputo derivatives of order α ∈ (0, 1] in one variable.
//!
//! For 0 < α < 1,
//!
//! ```text
//! ᶜD^α f(t) = 1/Γ(1-α) ∫_0^t f'(s) (t - s)^(-α) ds,
//! ```
//!
//! and α = 1 is the classical first derivative. Two independent routes are
//! provided for [`PiecewiseFracPoly`] inputs:
//!
//! * [`caputo_poly`] integrates against the weight with a 24-node
//!   Gauss–Jacobi rule, split at the breakpoints of `f'`;
//! * [`caputo_poly_as_fn`] expands every integer-power piece in closed form.
//!
//! Fractional-power terms fall back to quadrature in both routes.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::piecewise::{pow, PiecewiseFracPoly, Term};
use crate::quadrature::{legendre16, GaussRule};

const JACOBI_NODES: usize = 24;

pub(crate) fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

fn beta(a: f64, b: f64) -> f64 {
    gamma(a) * gamma(b) / gamma(a + b)
}

/// A validated Caputo order with its quadrature rules prepared.
#[derive(Debug, Clone)]
pub struct CaputoOrder {
    alpha: f64,
    inv_gamma: f64,
    /// Weight (t - s)^(-α) on [x, t].
    singular: Option<Arc<GaussRule>>,
    /// Weight x^(1-α) on [0, m].
    smooth_left: Option<Arc<GaussRule>>,
}

impl PartialEq for CaputoOrder {
    fn eq(&self, other: &Self) -> bool {
        self.alpha == other.alpha
    }
}

impl CaputoOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain {
                what: "alpha",
                value: alpha,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if alpha == 1.0 {
            return Ok(Self {
                alpha,
                inv_gamma: 0.0,
                singular: None,
                smooth_left: None,
            });
        }
        Ok(Self {
            alpha,
            inv_gamma: 1.0 / gamma(1.0 - alpha),
            singular: Some(Arc::new(GaussRule::jacobi(JACOBI_NODES, -alpha, 0.0)?)),
            smooth_left: Some(Arc::new(GaussRule::jacobi(JACOBI_NODES, 0.0, 1.0 - alpha)?)),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_classical(&self) -> bool {
        self.alpha == 1.0
    }

    /// ∫_x^t g(s) (t - s)^(-α) ds, exact for polynomial `g` up to degree 47.
    fn weighted(&self, x: f64, t: f64, g: impl FnMut(f64) -> f64) -> f64 {
        if x >= t {
            return 0.0;
        }
        self.singular.as_ref().expect("fractional order").integrate(x, t, g)
    }
}

/// ᶜD^α of `t^e`, evaluated at `t > 0`.
pub fn caputo_monomial(e: f64, order: &CaputoOrder, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain {
            what: "t",
            value: t,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if !(e >= 0.0) {
        return Err(Error::Contract(format!("negative exponent {e}")));
    }
    if e == 0.0 {
        return Ok(0.0);
    }
    if order.is_classical() {
        return Ok(e * pow(t, e - 1.0));
    }
    let a = order.alpha;
    Ok(gamma(e + 1.0) / gamma(e + 1.0 - a) * t.powf(e - a))
}

/// ᶜD^α of a function given by its first derivative `df`, smooth on [0, t].
pub fn caputo_smooth(df: impl Fn(f64) -> f64, order: &CaputoOrder, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if order.is_classical() {
        return df(t);
    }
    order.inv_gamma * order.weighted(0.0, t, df)
}

fn check_t(t: f64) -> Result<()> {
    Error::check_unit("t", t)
}

/// ∫_x^t s^q (t - s)^(-α) ds for non-integer q > -1.
fn fractional_tail(q: f64, x: f64, t: f64, order: &CaputoOrder) -> Result<f64> {
    if x >= t {
        return Ok(0.0);
    }
    let a = order.alpha;
    let full = t.powf(q + 1.0 - a) * beta(q + 1.0, 1.0 - a);
    if x <= 0.0 {
        return Ok(full);
    }
    if x >= 0.5 * t {
        return Ok(order.weighted(x, t, |s| s.powf(q)));
    }
    let head = GaussRule::jacobi(JACOBI_NODES, 0.0, q)?;
    Ok(full - head.integrate(0.0, x, |s| (t - s).powf(-a)))
}

/// ∫_l^r s^k (t - s)^(-α) ds for integer k, in closed form.
fn power_segment(k: u32, l: f64, r: f64, t: f64, alpha: f64) -> f64 {
    let (ul, ur) = (t - l, t - r);
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        let p = j as f64 + 1.0 - alpha;
        let tk = t.powi((k - j) as i32);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let bracket = ul.powf(p) - if ur > 0.0 { ur.powf(p) } else { 0.0 };
        sum += binom * tk * sign * bracket / p;
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    sum
}

/// ᶜD^α p(t) by Gauss–Jacobi quadrature, split at the breakpoints of `p'`.
///
/// `t = 0` returns 0 for any input with bounded derivative.
pub fn caputo_poly(p: &PiecewiseFracPoly, order: &CaputoOrder, t: f64) -> Result<f64> {
    check_t(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    if order.is_classical() {
        return p.derivative_value(t, 1);
    }
    let mut total = 0.0;
    for (idx, piece) in p.pieces().iter().enumerate() {
        let (l, r) = p.piece_bounds(idx);
        if l >= t {
            break;
        }
        let r = r.min(t);
        let (ints, fracs): (Vec<Term>, Vec<Term>) =
            piece.iter().filter(|u| u.exponent > 0.0).partition(|u| u.is_integer());
        if !ints.is_empty() {
            let dp = |s: f64| {
                ints.iter()
                    .map(|u| u.coeff * u.exponent * s.powi(u.exponent as i32 - 1))
                    .sum::<f64>()
            };
            total += order.weighted(l, t, dp) - order.weighted(r, t, dp);
        }
        for u in fracs {
            let q = u.exponent - 1.0;
            total += u.coeff * u.exponent * (fractional_tail(q, l, t, order)? - fractional_tail(q, r, t, order)?);
        }
    }
    Ok(order.inv_gamma * total)
}

/// Closed-form Caputo derivative of a [`PiecewiseFracPoly`].
///
/// On the first piece the monomial rule gives `Σ c Γ(e+1)/Γ(e+1-α) t^(e-α)`
/// directly. Past the first breakpoint, each earlier piece contributes an
/// integral of `s^k (t-s)^(-α)` expanded by the binomial theorem.
#[derive(Debug, Clone)]
pub struct CaputoDerivative {
    source: PiecewiseFracPoly,
    order: CaputoOrder,
    head: Vec<Term>,
    head_end: f64,
}

pub fn caputo_poly_as_fn(p: &PiecewiseFracPoly, order: &CaputoOrder) -> CaputoDerivative {
    let a = order.alpha;
    let head = p.pieces()[0]
        .iter()
        .filter(|u| u.exponent > 0.0)
        .map(|u| {
            if order.is_classical() {
                Term::new(u.coeff * u.exponent, u.exponent - 1.0)
            } else {
                Term::new(
                    u.coeff * gamma(u.exponent + 1.0) / gamma(u.exponent + 1.0 - a),
                    u.exponent - a,
                )
            }
        })
        .collect();
    CaputoDerivative {
        source: p.clone(),
        order: order.clone(),
        head,
        head_end: p.breakpoints()[1],
    }
}

impl CaputoDerivative {
    pub fn eval(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        if self.order.is_classical() {
            return self.source.derivative_value(t, 1);
        }
        if t <= self.head_end {
            return Ok(self.head.iter().map(|u| u.coeff * t.powf(u.exponent)).sum());
        }
        caputo_exact(&self.source, &self.order, t)
    }

    /// The closed form on the first piece, valid for `t` up to [`Self::head_end`].
    pub fn head(&self) -> &[Term] {
        &self.head
    }

    pub fn head_end(&self) -> f64 {
        self.head_end
    }
}

/// Analytic evaluation used by [`CaputoDerivative`] and the basis code.
pub(crate) fn caputo_exact(p: &PiecewiseFracPoly, order: &CaputoOrder, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    if order.is_classical() {
        return p.derivative_value(t, 1);
    }
    let a = order.alpha;
    let mut total = 0.0;
    for (idx, piece) in p.pieces().iter().enumerate() {
        let (l, r) = p.piece_bounds(idx);
        if l >= t {
            break;
        }
        let r = r.min(t);
        for u in piece.iter().filter(|u| u.exponent > 0.0) {
            let weight = u.coeff * u.exponent;
            if u.is_integer() {
                total += weight * power_segment(u.exponent as u32 - 1, l, r, t, a);
            } else {
                let q = u.exponent - 1.0;
                total += weight * (fractional_tail(q, l, t, order)? - fractional_tail(q, r, t, order)?);
            }
        }
    }
    Ok(order.inv_gamma * total)
}

/// ∫_0^m x^p (d + x)^p dx for p = 1 - α, d >= 0.
fn shifted_power_integral(order: &CaputoOrder, m: f64, d: f64) -> f64 {
    let p = 1.0 - order.alpha;
    if m <= 0.0 {
        return 0.0;
    }
    if d <= 1e-15 * m {
        return m.powf(2.0 * p + 1.0) / (2.0 * p + 1.0);
    }
    let rule = order.smooth_left.as_ref().expect("fractional order");
    if d >= m {
        return rule.integrate(0.0, m, |x| (d + x).powf(p));
    }
    let mut total = d.powf(2.0 * p + 1.0) * rule.integrate(0.0, 1.0, |y| (1.0 + y).powf(p));
    let gl = legendre16();
    let mut lo = d;
    while lo < m {
        let hi = (2.0 * lo).min(m);
        total += gl.integrate(lo, hi, |x| (x * (d + x)).powf(p));
        lo = hi;
    }
    total
}

/// ᶜD^α_t ᶜD^α_s R²(t, s) at (t1, t2), the W₂² kernel differentiated in both
/// arguments. Uses ∂_t ∂_s R²(t, s) = 1 + min(t, s).
pub fn double_caputo_rk2(t1: f64, t2: f64, order: &CaputoOrder) -> f64 {
    if t1 <= 0.0 || t2 <= 0.0 {
        return 0.0;
    }
    if order.is_classical() {
        return 1.0 + t1.min(t2);
    }
    let p = 1.0 - order.alpha;
    let g = gamma(2.0 - order.alpha);
    let m = t1.min(t2);
    let d = (t1 - t2).abs();
    ((t1 * t2).powf(p) + shifted_power_integral(order, m, d)) / (g * g)
}
