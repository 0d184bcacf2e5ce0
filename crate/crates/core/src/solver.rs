//! The iterative series solution and its diagnostics.
//!
//! With w₀ ≡ 0 and M_k = M(x_k, v_{k−1}(x_k)) frozen at the step where it
//! is first needed,
//!
//! ```text
//! B̃_i = Σ_{k≤i} ξ_ik M_k,    v_n = Σ_{i≤n} B̃_i Ψ_i = Σ_k c_k ψ_k,   c = ξᵀ B̃.
//! ```
//!
//! Values and ζ-derivatives of the running iterate at the collocation points
//! are updated incrementally, so each step costs O(n).

use nalgebra::{DMatrix, DVector};

use crate::basis::OrthoBasis;
use crate::error::{Error, Result};
use crate::problem::{HomogenizedProblem, Homogenizer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Number of sweeps. The first is the sequential scheme; each further
    /// sweep re-evaluates every M_k at the previous sweep's solution.
    pub passes: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { passes: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    problem: HomogenizedProblem,
    basis: OrthoBasis,
    b_coeffs: Vec<f64>,
    coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// |B̃_i| in step order.
    pub b_magnitudes: Vec<f64>,
    /// ‖v_i‖ = (Σ_{j≤i} B̃_j²)^½.
    pub cumulative_norms: Vec<f64>,
    /// (L v_n − M(v_n)) at each active collocation point.
    pub residuals: Vec<f64>,
}

pub fn solve(hp: &HomogenizedProblem, basis: OrthoBasis) -> Result<(Solution, SolveReport)> {
    solve_with(hp, basis, SolveOptions::default())
}

pub fn solve_with(
    hp: &HomogenizedProblem,
    basis: OrthoBasis,
    options: SolveOptions,
) -> Result<(Solution, SolveReport)> {
    let n = basis.len();
    let points = basis.points().to_vec();
    let mut psi_val = DMatrix::<f64>::zeros(n, n);
    let mut psi_dz = DMatrix::<f64>::zeros(n, n);
    for (k, psi) in basis.psi().iter().enumerate() {
        for (m, &(z, t)) in points.iter().enumerate() {
            psi_val[(k, m)] = psi.eval(z, t);
            psi_dz[(k, m)] = psi.partial(z, t, 1, 0)?;
        }
    }
    let xi = basis.xi();
    let ortho_val = xi * &psi_val;
    let ortho_dz = xi * &psi_dz;

    let m_at = |k: usize, v: f64, vz: f64| -> Result<f64> {
        let m = hp.eval_m(points[k], v, vz);
        if m.is_finite() {
            Ok(m)
        } else {
            Err(Error::Divergence {
                index: k,
                detail: format!("M = {m} at {:?} with v = {v}, v_zeta = {vz}", points[k]),
            })
        }
    };

    let mut b = DVector::<f64>::zeros(n);
    let mut values = DVector::<f64>::zeros(n);
    let mut slopes = DVector::<f64>::zeros(n);
    for pass in 0..options.passes.max(1) {
        let mut m_cache = DVector::<f64>::zeros(n);
        if pass == 0 {
            for i in 0..n {
                m_cache[i] = m_at(i, values[i], slopes[i])?;
                b[i] = (0..=i).map(|k| xi[(i, k)] * m_cache[k]).sum();
                values.axpy(b[i], &ortho_val.row(i).transpose(), 1.0);
                slopes.axpy(b[i], &ortho_dz.row(i).transpose(), 1.0);
            }
        } else {
            for k in 0..n {
                m_cache[k] = m_at(k, values[k], slopes[k])?;
            }
            b = xi * &m_cache;
            values = ortho_val.transpose() * &b;
            slopes = ortho_dz.transpose() * &b;
        }
    }

    let coefficients = xi.transpose() * &b;
    let lv = basis.gram() * &coefficients;
    let residuals = (0..n)
        .map(|m| lv[m] - hp.eval_m(points[m], values[m], slopes[m]))
        .collect();
    let mut acc = 0.0;
    let cumulative_norms = b
        .iter()
        .map(|x| {
            acc += x * x;
            acc.sqrt()
        })
        .collect();
    let report = SolveReport {
        b_magnitudes: b.iter().map(|x| x.abs()).collect(),
        cumulative_norms,
        residuals,
    };
    let solution = Solution {
        problem: hp.clone(),
        basis,
        b_coeffs: b.iter().copied().collect(),
        coefficients: coefficients.iter().copied().collect(),
    };
    Ok((solution, report))
}

impl Solution {
    pub fn n(&self) -> usize {
        self.b_coeffs.len()
    }

    pub fn basis(&self) -> &OrthoBasis {
        &self.basis
    }

    pub fn problem(&self) -> &HomogenizedProblem {
        &self.problem
    }

    pub fn homogenizer(&self) -> &Homogenizer {
        self.problem.homogenizer()
    }

    /// B̃_1 … B̃_n.
    pub fn b_coeffs(&self) -> &[f64] {
        &self.b_coeffs
    }

    /// c with v_n = Σ_k c_k ψ_k.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// v_n at a reference point.
    pub fn eval_homogeneous(&self, zeta: f64, tau: f64) -> f64 {
        self.basis
            .psi()
            .iter()
            .zip(&self.coefficients)
            .map(|(psi, c)| c * psi.eval(zeta, tau))
            .sum()
    }

    /// w_n = v_n + f at a point of the original domain.
    pub fn evaluate(&self, zeta: f64, tau: f64) -> Result<f64> {
        let d = self.problem.spec().domain();
        if !d.contains(zeta, tau) {
            return Err(Error::Domain {
                what: if zeta < d.a || zeta > d.b { "zeta" } else { "tau" },
                value: if zeta < d.a || zeta > d.b { zeta } else { tau },
                lo: if zeta < d.a || zeta > d.b { d.a } else { 0.0 },
                hi: if zeta < d.a || zeta > d.b { d.b } else { d.t_max },
            });
        }
        let (zr, tr) = self.problem.to_reference((zeta, tau));
        Ok(self.eval_homogeneous(zr.clamp(0.0, 1.0), tr.clamp(0.0, 1.0)) + self.homogenizer().value(zeta, tau))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorNorms {
    /// (Σ e_i²)^½ without a grid-spacing factor.
    pub l2: f64,
    pub linf: f64,
    /// |w_exact − w_n| at each grid point.
    pub pointwise: Vec<f64>,
}

pub fn error_norms(sol: &Solution, exact: &dyn Fn(f64, f64) -> f64, tau: f64, zeta_grid: &[f64]) -> Result<ErrorNorms> {
    if zeta_grid.is_empty() {
        return Err(Error::Contract("error norms need a non-empty grid".into()));
    }
    let pointwise = zeta_grid
        .iter()
        .map(|&z| Ok((exact(z, tau) - sol.evaluate(z, tau)?).abs()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ErrorNorms {
        l2: pointwise.iter().map(|e| e * e).sum::<f64>().sqrt(),
        linf: pointwise.iter().fold(0.0, |m, &e| m.max(e)),
        pointwise,
    })
}

/// max over prefixes m of |c_mᵀ G c_m − Σ_{i≤m} B̃_i²|, with c_m = ξᵀ B̃ truncated to m terms.
pub fn norm_telescoping_check(sol: &Solution) -> f64 {
    let n = sol.n();
    let xi = sol.basis.xi();
    let g = sol.basis.gram();
    let mut c = DVector::<f64>::zeros(n);
    let mut partial = 0.0;
    let mut worst = 0.0f64;
    for i in 0..n {
        let b = sol.b_coeffs[i];
        c.axpy(b, &xi.row(i).transpose(), 1.0);
        partial += b * b;
        let direct = c.dot(&(g * &c));
        worst = worst.max((direct - partial).abs());
    }
    worst
}

/// Σ_{i>n_small} B̃_i², the computable part of the truncation error.
pub fn error_tail(sol: &Solution, n_small: usize) -> Result<f64> {
    if n_small > sol.n() {
        return Err(Error::Contract(format!("n_small = {n_small} exceeds n = {}", sol.n())));
    }
    Ok(sol.b_coeffs[n_small..].iter().map(|b| b * b).sum())
}
