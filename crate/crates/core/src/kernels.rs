//! Reproducing kernels of W₂¹, W₂², W₂³ on [0, 1] and their tensor products.
//!
//! Every kernel is stored as two bivariate polynomial branches in
//! (anchor, x): one for `x <= anchor`, one for `x > anchor`. Sections with a
//! fixed anchor become [`PiecewiseFracPoly`] values with breakpoints
//! `{0, anchor, 1}`, and anchor derivatives fall out of the same branches.
//!
//! The W₂² and W₂³ kernels reproduce the closed subspaces with zero trace at
//! 0 (W₂²) and at both 0 and 1 (W₂³) under the inner product
//! `Σ_{i<r} f⁽ⁱ⁾(0) g⁽ⁱ⁾(0) + ∫ f⁽ʳ⁾ g⁽ʳ⁾`.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::piecewise::PiecewiseFracPoly;

/// Which inner product / kernel family an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelSpaceId {
    W1,
    W2,
    W3,
    /// W₂^(3,2) on [0,1]²: W₂³ in ζ ⊗ W₂² in τ.
    W32,
    /// W₂^(1,1) on [0,1]²: W₂¹ ⊗ W₂¹.
    W11,
}

impl KernelSpaceId {
    /// Number of derivatives the 1-D inner product needs, or `None` for 2-D spaces.
    pub fn order(self) -> Option<usize> {
        match self {
            KernelSpaceId::W1 => Some(1),
            KernelSpaceId::W2 => Some(2),
            KernelSpaceId::W3 => Some(3),
            KernelSpaceId::W32 | KernelSpaceId::W11 => None,
        }
    }

    /// The (ζ, τ) factor spaces of a tensor-product space.
    pub fn factors(self) -> Option<(KernelSpaceId, KernelSpaceId)> {
        match self {
            KernelSpaceId::W32 => Some((KernelSpaceId::W3, KernelSpaceId::W2)),
            KernelSpaceId::W11 => Some((KernelSpaceId::W1, KernelSpaceId::W1)),
            _ => None,
        }
    }
}

/// Dense polynomial in two variables; `c[i][j]` multiplies `anchor^i · x^j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub(crate) struct BiPoly {
    c: Vec<Vec<f64>>,
}

impl BiPoly {
    /// Polynomial in `x` alone.
    fn in_x(coeffs: &[f64]) -> Self {
        Self {
            c: vec![coeffs.to_vec()],
        }
    }

    /// Polynomial in the anchor alone.
    fn in_anchor(coeffs: &[f64]) -> Self {
        Self {
            c: coeffs.iter().map(|&v| vec![v]).collect(),
        }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.c.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0.0)
    }

    fn dims(&self) -> (usize, usize) {
        (self.c.len(), self.c.iter().map(Vec::len).max().unwrap_or(0))
    }

    fn scale(&self, s: f64) -> Self {
        Self {
            c: self.c.iter().map(|r| r.iter().map(|v| v * s).collect()).collect(),
        }
    }

    pub(crate) fn d_anchor(&self, order: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..order {
            out.c = out
                .c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, row)| row.iter().map(|v| v * i as f64).collect())
                .collect();
        }
        out
    }

    pub(crate) fn d_x(&self, order: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..order {
            out.c = out
                .c
                .iter()
                .map(|row| row.iter().enumerate().skip(1).map(|(j, v)| v * j as f64).collect())
                .collect();
        }
        out
    }

    pub(crate) fn eval(&self, anchor: f64, x: f64) -> f64 {
        let mut acc = 0.0;
        for row in self.c.iter().rev() {
            let mut inner = 0.0;
            for v in row.iter().rev() {
                inner = inner * x + v;
            }
            acc = acc * anchor + inner;
        }
        acc
    }

    /// Coefficients in `x` after fixing the anchor.
    pub(crate) fn at_anchor(&self, anchor: f64) -> Vec<f64> {
        let (_, nx) = self.dims();
        let mut out = vec![0.0; nx];
        let mut p = 1.0;
        for row in &self.c {
            for (j, v) in row.iter().enumerate() {
                out[j] += v * p;
            }
            p *= anchor;
        }
        out
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let (na, nx) = self.dims();
        let (ma, mx) = rhs.dims();
        let c = (0..na.max(ma))
            .map(|i| (0..nx.max(mx)).map(|j| self.get(i, j) + rhs.get(i, j)).collect())
            .collect();
        BiPoly { c }
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        self.scale(-1.0)
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        self + &(-rhs)
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let (na, nx) = self.dims();
        let (ma, mx) = rhs.dims();
        if na == 0 || ma == 0 {
            return BiPoly::default();
        }
        let mut c = vec![vec![0.0; nx + mx - 1]; na + ma - 1];
        for (i, row) in self.c.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                for (k, rrow) in rhs.c.iter().enumerate() {
                    for (l, b) in rrow.iter().enumerate() {
                        c[i + k][j + l] += a * b;
                    }
                }
            }
        }
        BiPoly { c }
    }
}

/// A kernel as its two polynomial branches.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct KernelBranches {
    /// Valid for `x <= anchor`.
    pub(crate) lower: BiPoly,
    /// Valid for `x > anchor`.
    pub(crate) upper: BiPoly,
}

impl KernelBranches {
    /// Value of ∂ᵢ_anchor ∂ʲ_x K(anchor, x).
    pub(crate) fn eval(&self, anchor: f64, x: f64, d_anchor: usize, d_x: usize) -> f64 {
        let branch = if x <= anchor { &self.lower } else { &self.upper };
        if d_anchor == 0 && d_x == 0 {
            branch.eval(anchor, x)
        } else {
            branch.d_anchor(d_anchor).d_x(d_x).eval(anchor, x)
        }
    }

    /// x ↦ ∂ᵢ_anchor K(anchor, x) with the anchor fixed.
    pub(crate) fn section(&self, anchor: f64, d_anchor: usize) -> PiecewiseFracPoly {
        let lower = self.lower.d_anchor(d_anchor).at_anchor(anchor);
        let upper = self.upper.d_anchor(d_anchor).at_anchor(anchor);
        let built = if anchor <= 0.0 {
            PiecewiseFracPoly::from_coeffs(vec![0.0, 1.0], &[upper])
        } else if anchor >= 1.0 {
            PiecewiseFracPoly::from_coeffs(vec![0.0, 1.0], &[lower])
        } else {
            PiecewiseFracPoly::from_coeffs(vec![0.0, anchor, 1.0], &[lower, upper])
        };
        built.expect("kernel section breakpoints are valid")
    }
}

fn build_r3() -> KernelBranches {
    let x = |c: &[f64]| BiPoly::in_x(c);
    let a = |c: &[f64]| BiPoly::in_anchor(c);
    let scale = 1.0 / 18720.0;

    // s <= y, with y the anchor and s the variable
    let quartic = x(&[120.0, 30.0, 10.0, -5.0, 1.0]);
    let weight = a(&[0.0, 0.0, 6.0, -4.0, 1.0]); // 6y² - 4y³ + y⁴
    let bracket = &(&x(&[0.0, 0.0, 0.0, 0.0, 156.0]) + &(&weight * &quartic))
        + &(&a(&[0.0, 12.0]) * &x(&[360.0, -300.0, -100.0, -15.0, 3.0]));
    let lower = (&(&a(&[-1.0, 1.0]) * &x(&[0.0, 1.0])) * &bracket).scale(-scale);

    // s > y
    let cubic_b = x(&[-120.0, 6.0, -4.0, 1.0]);
    let cubic_c = x(&[36.0, 6.0, -4.0, 1.0]);
    let s = x(&[0.0, 1.0]);
    let bracket = &(&(&(&(&a(&[0.0, 30.0]) * &(&s * &cubic_b)) + &(&a(&[0.0, 0.0, 10.0]) * &(&s * &cubic_b)))
        + &(&s * &cubic_c).scale(120.0))
        - &(&a(&[0.0, 0.0, 0.0, 5.0]) * &(&s * &cubic_c)))
        + &(&a(&[0.0, 0.0, 0.0, 0.0, 1.0]) * &x(&[156.0, 36.0, 6.0, -4.0, 1.0]));
    let upper = (&(&x(&[-1.0, 1.0]) * &a(&[0.0, 1.0])) * &bracket).scale(-scale);

    KernelBranches { lower, upper }
}

fn build_r2() -> KernelBranches {
    let x = |c: &[f64]| BiPoly::in_x(c);
    let a = |c: &[f64]| BiPoly::in_anchor(c);
    // ζ <= v: vζ + vζ²/2 − ζ³/6
    let lower = &(&a(&[0.0, 1.0]) * &x(&[0.0, 1.0, 0.5])) + &x(&[0.0, 0.0, 0.0, -1.0 / 6.0]);
    // ζ > v: −v³/6 + ζv²/2 + ζv
    let upper = &a(&[0.0, 0.0, 0.0, -1.0 / 6.0]) + &(&a(&[0.0, 1.0, 0.5]) * &x(&[0.0, 1.0]));
    KernelBranches { lower, upper }
}

fn build_r1() -> KernelBranches {
    KernelBranches {
        lower: BiPoly::in_x(&[1.0, 1.0]),
        upper: BiPoly::in_anchor(&[1.0, 1.0]),
    }
}

pub(crate) fn r3() -> &'static KernelBranches {
    static K: OnceLock<KernelBranches> = OnceLock::new();
    K.get_or_init(build_r3)
}

pub(crate) fn r2() -> &'static KernelBranches {
    static K: OnceLock<KernelBranches> = OnceLock::new();
    K.get_or_init(build_r2)
}

pub(crate) fn r1() -> &'static KernelBranches {
    static K: OnceLock<KernelBranches> = OnceLock::new();
    K.get_or_init(build_r1)
}

pub(crate) fn branches(space: KernelSpaceId) -> Result<&'static KernelBranches> {
    match space {
        KernelSpaceId::W1 => Ok(r1()),
        KernelSpaceId::W2 => Ok(r2()),
        KernelSpaceId::W3 => Ok(r3()),
        other => Err(Error::Unsupported(format!(
            "{other:?} is a two-dimensional space without a univariate kernel"
        ))),
    }
}

/// R¹_η(s) = 1 + min(s, η).
pub fn rk1(eta: f64, s: f64) -> Result<f64> {
    Error::check_unit("eta", eta)?;
    Error::check_unit("s", s)?;
    Ok(r1().eval(eta, s, 0, 0))
}

/// R²_v(ζ), the kernel of {f ∈ W₂² : f(0) = 0}.
pub fn rk2(v: f64, zeta: f64) -> Result<f64> {
    Error::check_unit("v", v)?;
    Error::check_unit("zeta", zeta)?;
    Ok(r2().eval(v, zeta, 0, 0))
}

/// R³_y(s), the kernel of {f ∈ W₂³ : f(0) = f(1) = 0}.
pub fn rk3(y: f64, s: f64) -> Result<f64> {
    Error::check_unit("y", y)?;
    Error::check_unit("s", s)?;
    Ok(r3().eval(y, s, 0, 0))
}

/// The kernel section `s ↦ R_anchor(s)` as a piecewise polynomial.
pub fn rk_as_poly(space: KernelSpaceId, anchor: f64) -> Result<PiecewiseFracPoly> {
    Error::check_unit("anchor", anchor)?;
    Ok(branches(space)?.section(anchor, 0))
}

/// `s ↦ ∂ᵏ/∂yᵏ R_y(s)` at `y = anchor`.
pub fn rk_anchor_derivative(space: KernelSpaceId, anchor: f64, order: usize) -> Result<PiecewiseFracPoly> {
    Error::check_unit("anchor", anchor)?;
    Ok(branches(space)?.section(anchor, order))
}

/// K^(3,2)_(z,w)(ζ, t) = R³_z(ζ) R²_w(t).
pub fn kernel32(anchor: (f64, f64), query: (f64, f64)) -> Result<f64> {
    Ok(rk3(anchor.0, query.0)? * rk2(anchor.1, query.1)?)
}

/// S^(1,1)_(z,w)(ζ, t) = R¹_z(ζ) R¹_w(t).
pub fn kernel11(anchor: (f64, f64), query: (f64, f64)) -> Result<f64> {
    Ok(rk1(anchor.0, query.0)? * rk1(anchor.1, query.1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Both branches of the W₂³ kernel, transcribed independently for the test.
    fn r3_reference(y: f64, s: f64) -> f64 {
        if s <= y {
            let a = 120.0 + 30.0 * s + 10.0 * s * s - 5.0 * s.powi(3) + s.powi(4);
            -((-1.0 + y)
                * s
                * (156.0 * s.powi(4) + 6.0 * y * y * a - 4.0 * y.powi(3) * a
                    + y.powi(4) * a
                    + 12.0 * y * (360.0 - 300.0 * s - 100.0 * s * s - 15.0 * s.powi(3) + 3.0 * s.powi(4))))
                / 18720.0
        } else {
            let b = -120.0 + 6.0 * s - 4.0 * s * s + s.powi(3);
            let c = 36.0 + 6.0 * s - 4.0 * s * s + s.powi(3);
            -((-1.0 + s)
                * y
                * (30.0 * y * s * b + 10.0 * y * y * s * b + 120.0 * s * c - 5.0 * y.powi(3) * s * c
                    + y.powi(4) * (156.0 + 36.0 * s + 6.0 * s * s - 4.0 * s.powi(3) + s.powi(4))))
                / 18720.0
        }
    }

    #[test]
    fn rk1_examples() {
        assert_eq!(rk1(0.5, 0.3).unwrap(), 1.3);
        assert_eq!(rk1(0.3, 0.5).unwrap(), 1.3);
        assert_eq!(rk1(0.0, 0.0).unwrap(), 1.0);
        assert!(rk1(1.2, 0.3).is_err());
    }

    #[test]
    fn rk2_examples() {
        let v = rk2(0.5, 0.2).unwrap();
        assert!((v - (0.1 + 0.01 - 0.008 / 6.0)).abs() < 1e-15);
        assert!((rk2(0.2, 0.5).unwrap() - v).abs() < 1e-15);
        assert_eq!(rk2(0.7, 0.0).unwrap(), 0.0);
        assert!(rk2(0.5, -0.1).is_err());
    }

    #[test]
    fn rk3_matches_transcribed_formula() {
        for i in 0..=20 {
            for j in 0..=20 {
                let (y, s) = (i as f64 / 20.0, j as f64 / 20.0);
                let a = rk3(y, s).unwrap();
                let b = r3_reference(y, s);
                assert!((a - b).abs() < 1e-15, "({y},{s}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn rk3_examples() {
        assert_eq!(rk3(0.3, 0.0).unwrap(), 0.0);
        assert!(rk3(0.7, 1.0).unwrap().abs() < 1e-16);
        assert!((rk3(0.4, 0.7).unwrap() - rk3(0.7, 0.4).unwrap()).abs() < 1e-16);
        // v* = R³(0.5, 0.5), computed symbolically: 321311 / 19169280
        let v_star = 321311.0 / 19169280.0;
        assert!((rk3(0.5, 0.5).unwrap() - v_star).abs() < 1e-16);
        assert!(rk3(0.5, 1.01).is_err());
    }

    #[test]
    fn branches_agree_on_diagonal() {
        for k in [r1(), r2(), r3()] {
            for i in 1..20 {
                let y = i as f64 / 20.0;
                let lo = k.lower.eval(y, y);
                let hi = k.upper.eval(y, y);
                assert!((lo - hi).abs() < 1e-12);
            }
        }
        // R³ is C⁴ across the diagonal
        for d in 0..5 {
            let y = 0.37;
            let lo = r3().lower.d_x(d).eval(y, y);
            let hi = r3().upper.d_x(d).eval(y, y);
            assert!((lo - hi).abs() < 1e-12, "derivative {d}");
        }
    }

    #[test]
    fn rk_as_poly_examples() {
        let p = rk_as_poly(KernelSpaceId::W1, 0.5).unwrap();
        assert_eq!(p.value(0.3), 1.3);
        let p = rk_as_poly(KernelSpaceId::W3, 0.5).unwrap();
        assert!((p.value(0.5) - 321311.0 / 19169280.0).abs() < 1e-16);
        assert_eq!(p.breakpoints(), &[0.0, 0.5, 1.0]);
        let p = rk_as_poly(KernelSpaceId::W2, 1.0).unwrap();
        for &z in &[0.0f64, 0.3, 0.8, 1.0] {
            let expected = z + z * z / 2.0 - z.powi(3) / 6.0;
            assert!((p.value(z) - expected).abs() < 1e-15);
        }
        assert!(rk_as_poly(KernelSpaceId::W32, 0.5).is_err());
    }

    #[test]
    fn rk_as_poly_agrees_with_pointwise() {
        let spaces = [
            (KernelSpaceId::W1, rk1 as fn(f64, f64) -> Result<f64>),
            (KernelSpaceId::W2, rk2),
            (KernelSpaceId::W3, rk3),
        ];
        for (space, f) in spaces {
            for &anchor in &[0.0, 0.13, 0.5, 0.91, 1.0] {
                let p = rk_as_poly(space, anchor).unwrap();
                for i in 0..200 {
                    let x = i as f64 / 199.0;
                    assert!((p.value(x) - f(anchor, x).unwrap()).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn section_derivative_matches_hand_differentiation() {
        // ∂/∂ζ of (vζ + vζ²/2 − ζ³/6) at v = 0.5, ζ = 0.2
        let p = rk_as_poly(KernelSpaceId::W2, 0.5).unwrap();
        let d = p.derivative(1).unwrap().value(0.2);
        assert!((d - 0.58).abs() < 1e-15);
    }

    #[test]
    fn anchor_derivative_matches_finite_difference() {
        let h = 1e-4;
        let y = 0.42;
        let p = rk_anchor_derivative(KernelSpaceId::W3, y, 2).unwrap();
        for &s in &[0.1, 0.3, 0.6, 0.95] {
            let fd = (rk3(y + h, s).unwrap() - 2.0 * rk3(y, s).unwrap() + rk3(y - h, s).unwrap()) / (h * h);
            assert!((p.value(s) - fd).abs() < 1e-6, "s={s}: {} vs {fd}", p.value(s));
        }
    }

    #[test]
    fn product_kernels() {
        assert_eq!(kernel32((0.5, 0.5), (0.3, 0.0)).unwrap(), 0.0);
        let v = kernel32((0.3, 0.4), (0.3, 0.4)).unwrap();
        assert_eq!(v, rk3(0.3, 0.3).unwrap() * rk2(0.4, 0.4).unwrap());
        let (a, b) = ((0.21, 0.77), (0.64, 0.35));
        assert!((kernel32(a, b).unwrap() - kernel32(b, a).unwrap()).abs() < 1e-16);
        assert!((kernel11((0.5, 0.5), (0.3, 0.2)).unwrap() - 1.56).abs() < 1e-15);
        assert!((kernel11(a, b).unwrap() - kernel11(b, a).unwrap()).abs() < 1e-16);
        assert_eq!(kernel11((0.0, 0.0), (0.8, 0.6)).unwrap(), 1.0);
        assert!(kernel11((0.0, 1.5), (0.8, 0.6)).is_err());
    }
}
