//! Collocation points, the functions ψ_i and their orthonormalization.
//!
//! ψ_i is the operator applied to K^(3,2) in its anchor variables, evaluated
//! at the i-th collocation point, so `⟨v, ψ_i⟩ = (L v)(ζ_i, τ_i)` in
//! W₂^(3,2) and the Gram matrix follows without any quadrature:
//! `⟨ψ_i, ψ_k⟩ = (L ψ_k)(ζ_i, τ_i)`.
//!
//! Every point with τ = 0 gives ψ ≡ 0 (the W₂² kernel vanishes there), so the
//! leading (0, 0) point of a collocation set anchors the initial iterate but
//! carries no basis function.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernels::{r3, KernelSpaceId};
use crate::piecewise::PiecewiseFracPoly;
use crate::problem::HomogenizedProblem;
use crate::separable::{CaputoSection, Factor, SeparableFn2D, SeparableTerm};

/// Relative pivot floor for the Cholesky factorization.
pub const EPS_PD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointOrdering {
    /// Outer loop over τ, inner over ζ.
    TauMajor,
    /// Outer loop over ζ, inner over τ.
    ZetaMajor,
}

impl fmt::Display for PointOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointOrdering::TauMajor => "tau-major",
            PointOrdering::ZetaMajor => "zeta-major",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollocationSet {
    points: Vec<(f64, f64)>,
    scheme: String,
}

/// `(0, 0)` followed by the interior grid `(i/(n_zeta+1), j/(n_tau+1))`, τ-major.
///
/// The grid family is dense in [0, 1]² as both counts grow.
pub fn generate_collocation(n_zeta: usize, n_tau: usize) -> Result<CollocationSet> {
    generate_collocation_ordered(n_zeta, n_tau, PointOrdering::TauMajor)
}

pub fn generate_collocation_ordered(n_zeta: usize, n_tau: usize, ordering: PointOrdering) -> Result<CollocationSet> {
    if n_zeta == 0 || n_tau == 0 {
        return Err(Error::Contract(format!(
            "collocation grid needs positive counts, got {n_zeta} x {n_tau}"
        )));
    }
    let z = |i: usize| i as f64 / (n_zeta + 1) as f64;
    let t = |j: usize| j as f64 / (n_tau + 1) as f64;
    let mut points = vec![(0.0, 0.0)];
    match ordering {
        PointOrdering::TauMajor => {
            for j in 1..=n_tau {
                points.extend((1..=n_zeta).map(|i| (z(i), t(j))));
            }
        }
        PointOrdering::ZetaMajor => {
            for i in 1..=n_zeta {
                points.extend((1..=n_tau).map(|j| (z(i), t(j))));
            }
        }
    }
    Ok(CollocationSet {
        points,
        scheme: format!("origin + {n_zeta}x{n_tau} uniform interior grid, {ordering}"),
    })
}

impl CollocationSet {
    /// An explicit point list; the first point must be the origin.
    pub fn from_points(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.first() != Some(&(0.0, 0.0)) {
            return Err(Error::Contract("the first collocation point must be (0, 0)".into()));
        }
        for (i, p) in points.iter().enumerate() {
            Error::check_unit("zeta", p.0)?;
            Error::check_unit("tau", p.1)?;
            if points[..i].contains(p) {
                return Err(Error::Contract(format!("collocation point {p:?} is repeated")));
            }
        }
        Ok(Self {
            points,
            scheme: "explicit".into(),
        })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Points that carry a basis function: everything after the origin.
    pub fn active(&self) -> &[(f64, f64)] {
        &self.points[1..]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn scheme(&self) -> &str {
        &self.scheme
    }
}

/// ψ for the collocation point `point` (reference coordinates):
///
/// ```text
/// ψ(ζ, τ) = a_t R³(ζ_i, ζ) · ᶜD^α_t R²(t, τ)|_{t=τ_i}
///         − a_zz ∂²_s R³(s, ζ)|_{s=ζ_i} · R²(τ_i, τ)
///         + a_0 R³(ζ_i, ζ) · R²(τ_i, τ)
/// ```
///
/// Terms with a zero coefficient are dropped.
pub fn build_psi(hp: &HomogenizedProblem, point: (f64, f64)) -> Result<SeparableFn2D> {
    Error::check_unit("zeta", point.0)?;
    Error::check_unit("tau", point.1)?;
    let c = hp.coefficients();
    let k3 = r3().section(point.0, 0);
    let k3_dd = r3().section(point.0, 2);
    let k2 = crate::kernels::rk_as_poly(KernelSpaceId::W2, point.1)?;
    let mut terms = Vec::with_capacity(3);
    if c.time != 0.0 {
        terms.push(SeparableTerm {
            coeff: c.time,
            zeta: Factor::Poly(k3.clone()),
            tau: Factor::Caputo(CaputoSection::new(point.1, hp.order().clone())?),
        });
    }
    if c.diffusion != 0.0 {
        terms.push(SeparableTerm {
            coeff: -c.diffusion,
            zeta: Factor::Poly(k3_dd),
            tau: Factor::Poly(k2.clone()),
        });
    }
    if c.reaction != 0.0 {
        terms.push(SeparableTerm {
            coeff: c.reaction,
            zeta: Factor::Poly(k3),
            tau: Factor::Poly(k2),
        });
    }
    if terms.is_empty() {
        terms.push(SeparableTerm {
            coeff: 0.0,
            zeta: Factor::Poly(PiecewiseFracPoly::zero()),
            tau: Factor::Poly(PiecewiseFracPoly::zero()),
        });
    }
    SeparableFn2D::new(terms)
}

/// ⟨ψ_i, ψ_k⟩ = (L ψ_k)(ζ_i, τ_i).
pub fn gram_entry(hp: &HomogenizedProblem, psi_k: &SeparableFn2D, point_i: (f64, f64)) -> Result<f64> {
    hp.apply_linear_operator(psi_k, point_i)
}

/// ξ = L⁻¹ where G = L Lᵀ; the rows of ξ give Ψ_i = Σ_k ξ_ik ψ_k.
///
/// A pivot d_i² ≤ [`EPS_PD`] · max diag(G) is reported as degenerate, with
/// `index` counting from 0.
pub fn gram_schmidt(gram: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = gram.nrows();
    if gram.ncols() != n {
        return Err(Error::Contract(format!("gram matrix is {}x{}", n, gram.ncols())));
    }
    let scale = gram.diagonal().iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let floor = EPS_PD * scale;
    let mut l = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for k in 0..=i {
            let mut s = gram[(i, k)];
            for j in 0..k {
                s -= l[(i, j)] * l[(k, j)];
            }
            if i == k {
                if !(s > floor) {
                    return Err(Error::Degenerate { index: i, pivot: s });
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, k)] = s / l[(k, k)];
            }
        }
    }
    let mut xi = DMatrix::<f64>::zeros(n, n);
    for col in 0..n {
        xi[(col, col)] = 1.0 / l[(col, col)];
        for i in col + 1..n {
            let mut s = 0.0;
            for j in col..i {
                s += l[(i, j)] * xi[(j, col)];
            }
            xi[(i, col)] = -s / l[(i, i)];
        }
    }
    Ok(xi)
}

/// The orthonormal system Ψ_i = Σ_k ξ_ik ψ_k over the active collocation points.
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    collocation: CollocationSet,
    psi: Vec<SeparableFn2D>,
    gram: DMatrix<f64>,
    xi: DMatrix<f64>,
    asymmetry: f64,
}

pub fn build_basis(hp: &HomogenizedProblem, collocation: CollocationSet) -> Result<OrthoBasis> {
    let points = collocation.active().to_vec();
    let psi = points.iter().map(|&p| build_psi(hp, p)).collect::<Result<Vec<_>>>()?;
    let n = points.len();
    let mut raw = DMatrix::<f64>::zeros(n, n);
    for (k, psi_k) in psi.iter().enumerate() {
        for (i, &p) in points.iter().enumerate() {
            raw[(i, k)] = gram_entry(hp, psi_k, p)?;
        }
    }
    let asymmetry = (&raw - raw.transpose()).amax();
    let gram = (&raw + raw.transpose()) * 0.5;
    let xi = gram_schmidt(&gram)?;
    Ok(OrthoBasis {
        collocation,
        psi,
        gram,
        xi,
        asymmetry,
    })
}

impl OrthoBasis {
    pub fn collocation(&self) -> &CollocationSet {
        &self.collocation
    }

    /// Collocation points carrying ψ_1 … ψ_n.
    pub fn points(&self) -> &[(f64, f64)] {
        self.collocation.active()
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn psi(&self) -> &[SeparableFn2D] {
        &self.psi
    }

    /// Symmetrized Gram matrix ⟨ψ_i, ψ_k⟩.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn xi(&self) -> &DMatrix<f64> {
        &self.xi
    }

    /// Largest |G_ik − G_ki| before symmetrization.
    pub fn gram_asymmetry(&self) -> f64 {
        self.asymmetry
    }

    /// max |ξ G ξᵀ − I|.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.len();
        (&self.xi * &self.gram * self.xi.transpose() - DMatrix::<f64>::identity(n, n)).amax()
    }

    /// Ψ_i(ζ, τ) in reference coordinates.
    pub fn eval_orthonormal(&self, i: usize, zeta: f64, tau: f64) -> f64 {
        (0..=i).map(|k| self.xi[(i, k)] * self.psi[k].eval(zeta, tau)).sum()
    }
}
