//! Separable functions on [0, 1]² and the inner products of the kernel spaces.

use crate::error::{Error, Result};
use crate::fractional::{caputo_exact, double_caputo_rk2, CaputoOrder};
use crate::kernels::{r2, KernelSpaceId};
use crate::piecewise::PiecewiseFracPoly;
use crate::quadrature::integrate_graded;

/// Grading depth used by the inner-product oracles near breakpoints.
const ORACLE_LEVELS: usize = 36;

/// A univariate function on [0, 1] that can report its derivatives.
pub trait UnivariateFn {
    fn value(&self, x: f64) -> f64;

    /// Classical derivative of the given order at `x`.
    fn derivative(&self, x: f64, order: usize) -> Result<f64>;

    /// Highest derivative order that [`UnivariateFn::derivative`] supports.
    fn smoothness(&self) -> usize;

    /// Interior points where some derivative may jump.
    fn kinks(&self) -> Vec<f64>;
}

impl UnivariateFn for PiecewiseFracPoly {
    fn value(&self, x: f64) -> f64 {
        PiecewiseFracPoly::value(self, x)
    }

    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        self.derivative_value(x, order)
    }

    fn smoothness(&self) -> usize {
        self.pieces()
            .iter()
            .flatten()
            .filter(|t| !t.is_integer())
            .map(|t| t.exponent.floor() as usize)
            .min()
            .unwrap_or(usize::MAX)
    }

    fn kinks(&self) -> Vec<f64> {
        let b = self.breakpoints();
        b[1..b.len() - 1].to_vec()
    }
}

/// τ ↦ ᶜD^α_s R²(τ, s) at s = `anchor`: the fractional part of a ψ function.
///
/// Not a polynomial in τ. It is evaluated by building the kernel section in s
/// for each τ and applying the closed-form Caputo derivative; τ-derivatives
/// come from anchor derivatives of the kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct CaputoSection {
    anchor: f64,
    order: CaputoOrder,
}

impl CaputoSection {
    pub fn new(anchor: f64, order: CaputoOrder) -> Result<Self> {
        Error::check_unit("anchor", anchor)?;
        Ok(Self { anchor, order })
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn order(&self) -> &CaputoOrder {
        &self.order
    }

    /// ᶜD^α in τ, evaluated at `t`, using the same order as the section.
    pub fn caputo(&self, t: f64) -> f64 {
        double_caputo_rk2(t, self.anchor, &self.order)
    }
}

impl UnivariateFn for CaputoSection {
    fn value(&self, x: f64) -> f64 {
        self.derivative(x, 0).expect("order 0 is always available")
    }

    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        if order > 2 {
            return Err(Error::Unsupported(format!(
                "Caputo sections have {order} derivatives only in the weak sense"
            )));
        }
        let x = x.clamp(0.0, 1.0);
        caputo_exact(&r2().section(x, order), &self.order, self.anchor)
    }

    fn smoothness(&self) -> usize {
        2
    }

    fn kinks(&self) -> Vec<f64> {
        if self.anchor > 0.0 && self.anchor < 1.0 {
            vec![self.anchor]
        } else {
            Vec::new()
        }
    }
}

/// One factor of a separable term.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Poly(PiecewiseFracPoly),
    Caputo(CaputoSection),
}

impl Factor {
    /// ᶜD^α of the factor at `t`.
    pub fn caputo(&self, order: &CaputoOrder, t: f64) -> Result<f64> {
        match self {
            Factor::Poly(p) => caputo_exact(p, order, t),
            Factor::Caputo(c) if c.order == *order => Ok(c.caputo(t)),
            Factor::Caputo(c) => Err(Error::Unsupported(format!(
                "Caputo order {} applied to a section built with order {}",
                order.alpha(),
                c.order.alpha()
            ))),
        }
    }
}

impl From<PiecewiseFracPoly> for Factor {
    fn from(p: PiecewiseFracPoly) -> Self {
        Factor::Poly(p)
    }
}

impl From<CaputoSection> for Factor {
    fn from(c: CaputoSection) -> Self {
        Factor::Caputo(c)
    }
}

impl UnivariateFn for Factor {
    fn value(&self, x: f64) -> f64 {
        match self {
            Factor::Poly(p) => p.value(x),
            Factor::Caputo(c) => UnivariateFn::value(c, x),
        }
    }

    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        match self {
            Factor::Poly(p) => p.derivative_value(x, order),
            Factor::Caputo(c) => c.derivative(x, order),
        }
    }

    fn smoothness(&self) -> usize {
        match self {
            Factor::Poly(p) => UnivariateFn::smoothness(p),
            Factor::Caputo(c) => c.smoothness(),
        }
    }

    fn kinks(&self) -> Vec<f64> {
        match self {
            Factor::Poly(p) => UnivariateFn::kinks(p),
            Factor::Caputo(c) => c.kinks(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparableTerm {
    pub coeff: f64,
    pub zeta: Factor,
    pub tau: Factor,
}

/// `Σ coeff · zeta(ζ) · tau(τ)` over a non-empty list of terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableFn2D {
    terms: Vec<SeparableTerm>,
}

impl SeparableFn2D {
    pub fn new(terms: Vec<SeparableTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Contract("a separable function needs at least one term".into()));
        }
        Ok(Self { terms })
    }

    pub fn product(zeta: impl Into<Factor>, tau: impl Into<Factor>) -> Self {
        Self {
            terms: vec![SeparableTerm {
                coeff: 1.0,
                zeta: zeta.into(),
                tau: tau.into(),
            }],
        }
    }

    /// The kernel section K^(3,2)_anchor = R³(anchor.0, ·) R²(anchor.1, ·).
    pub fn kernel32(anchor: (f64, f64)) -> Result<Self> {
        Ok(Self::product(
            crate::kernels::rk_as_poly(KernelSpaceId::W3, anchor.0)?,
            crate::kernels::rk_as_poly(KernelSpaceId::W2, anchor.1)?,
        ))
    }

    pub fn terms(&self) -> &[SeparableTerm] {
        &self.terms
    }

    pub fn eval(&self, zeta: f64, tau: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff * t.zeta.value(zeta) * t.tau.value(tau))
            .sum()
    }

    /// ∂ᵢ_ζ ∂ʲ_τ at (ζ, τ).
    pub fn partial(&self, zeta: f64, tau: f64, d_zeta: usize, d_tau: usize) -> Result<f64> {
        let mut total = 0.0;
        for t in &self.terms {
            total += t.coeff * t.zeta.derivative(zeta, d_zeta)? * t.tau.derivative(tau, d_tau)?;
        }
        Ok(total)
    }

    /// ᶜD^α in τ at (ζ, τ).
    pub fn caputo_tau(&self, order: &CaputoOrder, zeta: f64, tau: f64) -> Result<f64> {
        let mut total = 0.0;
        for t in &self.terms {
            let z = t.zeta.value(zeta);
            if z != 0.0 {
                total += t.coeff * z * t.tau.caputo(order, tau)?;
            }
        }
        Ok(total)
    }
}

/// ⟨f, g⟩ in W₂¹, W₂² or W₂³: `Σ_{i<r} f⁽ⁱ⁾(0) g⁽ⁱ⁾(0) + ∫₀¹ f⁽ʳ⁾ g⁽ʳ⁾`.
///
/// The integral is composite Gauss–Legendre split at the kinks of both
/// arguments and graded toward every kink.
pub fn inner_product_oracle(space: KernelSpaceId, f: &dyn UnivariateFn, g: &dyn UnivariateFn) -> Result<f64> {
    let r = space
        .order()
        .ok_or_else(|| Error::Contract(format!("{space:?} is two-dimensional; use inner_product_oracle_2d")))?;
    for (name, u) in [("f", f), ("g", g)] {
        if u.smoothness() < r {
            return Err(Error::Contract(format!(
                "{name} provides {} derivatives, {space:?} needs {r}",
                u.smoothness()
            )));
        }
    }
    let mut total = 0.0;
    for i in 0..r {
        total += f.derivative(0.0, i)? * g.derivative(0.0, i)?;
    }
    let mut kinks = f.kinks();
    kinks.extend(g.kinks());
    // derivatives were checked above, so a failure here is a genuine bug
    let mut failure = None;
    total += integrate_graded(0.0, 1.0, &kinks, ORACLE_LEVELS, |x| {
        match (f.derivative(x, r), g.derivative(x, r)) {
            (Ok(a), Ok(b)) => a * b,
            (Err(e), _) | (_, Err(e)) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// ⟨f, g⟩ in W₂^(3,2) or W₂^(1,1), the tensor products of the 1-D spaces.
pub fn inner_product_oracle_2d(space: KernelSpaceId, f: &SeparableFn2D, g: &SeparableFn2D) -> Result<f64> {
    let (sz, st) = space
        .factors()
        .ok_or_else(|| Error::Contract(format!("{space:?} is one-dimensional; use inner_product_oracle")))?;
    let mut total = 0.0;
    for u in f.terms() {
        for v in g.terms() {
            let iz = inner_product_oracle(sz, &u.zeta, &v.zeta)?;
            if iz == 0.0 {
                continue;
            }
            total += u.coeff * v.coeff * iz * inner_product_oracle(st, &u.tau, &v.tau)?;
        }
    }
    Ok(total)
}
