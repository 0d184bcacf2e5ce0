//! Piecewise sums of real powers on [0, 1].
//!
//! Each piece holds terms `c · x^e` with `e >= 0`. Pieces are closed on the
//! left of the domain and on their right end: at an interior breakpoint the
//! value comes from the piece to its left, matching the `s <= y` branch of
//! the kernel formulas.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub exponent: f64,
}

impl Term {
    pub fn new(coeff: f64, exponent: f64) -> Self {
        Self { coeff, exponent }
    }

    pub fn is_integer(&self) -> bool {
        self.exponent.fract() == 0.0
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.coeff * pow(x, self.exponent)
    }
}

#[inline]
pub(crate) fn pow(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e.fract() == 0.0 && e.abs() < 64.0 {
        x.powi(e as i32)
    } else {
        x.powf(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFracPoly {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<Term>>,
}

impl PiecewiseFracPoly {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Vec<Term>>) -> Result<Self> {
        if breakpoints.len() < 2 || pieces.len() + 1 != breakpoints.len() {
            return Err(Error::Contract(format!(
                "{} breakpoints cannot bound {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::Contract("breakpoints must span [0, 1]".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Contract("breakpoints must be strictly increasing".into()));
        }
        let mut merged = Vec::with_capacity(pieces.len());
        for piece in pieces {
            let mut terms: Vec<Term> = Vec::with_capacity(piece.len());
            for t in piece {
                if !(t.exponent >= 0.0) || !t.exponent.is_finite() || !t.coeff.is_finite() {
                    return Err(Error::Contract(format!("invalid term {t:?}")));
                }
                match terms.iter_mut().find(|u| u.exponent == t.exponent) {
                    Some(u) => u.coeff += t.coeff,
                    None => terms.push(t),
                }
            }
            terms.retain(|t| t.coeff != 0.0);
            terms.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
            merged.push(terms);
        }
        Ok(Self {
            breakpoints,
            pieces: merged,
        })
    }

    /// Piecewise polynomial with integer powers; `coeffs[p][k]` multiplies `x^k` on piece `p`.
    pub fn from_coeffs(breakpoints: Vec<f64>, coeffs: &[Vec<f64>]) -> Result<Self> {
        let pieces = coeffs
            .iter()
            .map(|c| c.iter().enumerate().map(|(k, &v)| Term::new(v, k as f64)).collect())
            .collect();
        Self::new(breakpoints, pieces)
    }

    pub fn polynomial(coeffs: &[f64]) -> Self {
        Self::from_coeffs(vec![0.0, 1.0], &[coeffs.to_vec()]).expect("single-piece polynomial")
    }

    pub fn zero() -> Self {
        Self::polynomial(&[])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<Term>] {
        &self.pieces
    }

    pub fn piece_bounds(&self, index: usize) -> (f64, f64) {
        (self.breakpoints[index], self.breakpoints[index + 1])
    }

    pub fn is_integer_polynomial(&self) -> bool {
        self.pieces.iter().flatten().all(Term::is_integer)
    }

    /// Index of the piece that owns `x` (left-piece convention at breakpoints).
    pub fn piece_index(&self, x: f64) -> usize {
        let interior = &self.breakpoints[1..self.breakpoints.len() - 1];
        interior.partition_point(|&b| b < x)
    }

    /// Unchecked evaluation; arguments outside [0, 1] use the nearest end piece.
    pub fn value(&self, x: f64) -> f64 {
        self.pieces[self.piece_index(x)].iter().map(|t| t.value(x)).sum()
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Error::check_unit("x", x)?;
        Ok(self.value(x))
    }

    /// Term-by-term power-rule derivative of the given order.
    pub fn derivative(&self, order: usize) -> Result<Self> {
        let mut pieces = self.pieces.clone();
        for _ in 0..order {
            for piece in &mut pieces {
                let mut next = Vec::with_capacity(piece.len());
                for t in piece.iter() {
                    if t.exponent == 0.0 {
                        continue;
                    }
                    if !t.is_integer() && t.exponent < 1.0 {
                        return Err(Error::Unsupported(format!(
                            "differentiating x^{} would leave a negative power",
                            t.exponent
                        )));
                    }
                    next.push(Term::new(t.coeff * t.exponent, t.exponent - 1.0));
                }
                *piece = next;
            }
        }
        Self::new(self.breakpoints.clone(), pieces)
    }

    pub fn derivative_value(&self, x: f64, order: usize) -> Result<f64> {
        if order == 0 {
            return Ok(self.value(x));
        }
        let piece = &self.pieces[self.piece_index(x)];
        let mut total = 0.0;
        for t in piece {
            let mut c = t.coeff;
            let mut e = t.exponent;
            for _ in 0..order {
                if e == 0.0 {
                    c = 0.0;
                    break;
                }
                if t.exponent.fract() != 0.0 && e < 1.0 {
                    return Err(Error::Unsupported(format!(
                        "differentiating x^{} would leave a negative power",
                        t.exponent
                    )));
                }
                c *= e;
                e -= 1.0;
            }
            if c != 0.0 {
                total += c * pow(x, e);
            }
        }
        Ok(total)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| p.iter().map(|t| Term::new(t.coeff * factor, t.exponent)).collect())
            .collect();
        Self::new(self.breakpoints.clone(), pieces).expect("scaling preserves invariants")
    }

    /// `a·f + b·g` on the union of both breakpoint sets.
    pub fn linear_combination(a: f64, f: &Self, b: f64, g: &Self) -> Self {
        let mut bps: Vec<f64> = f.breakpoints.iter().chain(g.breakpoints.iter()).copied().collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let pieces = bps
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let lhs = &f.pieces[f.piece_index(mid)];
                let rhs = &g.pieces[g.piece_index(mid)];
                lhs.iter()
                    .map(|t| Term::new(a * t.coeff, t.exponent))
                    .chain(rhs.iter().map(|t| Term::new(b * t.coeff, t.exponent)))
                    .collect()
            })
            .collect();
        Self::new(bps, pieces).expect("union of valid breakpoint sets")
    }
}
