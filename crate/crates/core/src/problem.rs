//! The generalized time-fractional Burgers–Huxley problem
//!
//! ```text
//! ᶜD^α_τ w = κ w_ζζ − ν w^δ w_ζ + β (1 − w^δ) w (η w^δ − γ) + g
//! w(ζ, 0) = h(ζ),  w(a, τ) = p1(τ),  w(b, τ) = p2(τ)
//! ```
//!
//! on [a, b] × [0, T], with an optional source `g` (zero for the built-in
//! examples). The unknown is split as `w = v + f`, where `f` carries the
//! initial and boundary data, and `v` lives on the reference square.
//! In reference coordinates `L v = M(v)` with
//!
//! ```text
//! L v = T^(-α) ᶜD^α_τ̂ v − κ/(b−a)² v_ζ̂ζ̂ + γβ v
//! M   = N(w, w_ζ) + g − (ᶜD^α_τ f − κ f_ζζ + γβ f)
//! N   = −ν w^δ w_ζ + βη w^(δ+1) − βη w^(2δ+1) + βγ w^(δ+1)
//! ```

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fractional::{caputo_smooth, CaputoOrder};
use crate::separable::SeparableFn2D;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type FieldFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

const CORNER_TOL: f64 = 1e-10;

/// A univariate data function with its first two derivatives.
#[derive(Clone)]
pub struct Profile {
    value: ScalarFn,
    d1: ScalarFn,
    d2: ScalarFn,
}

impl Profile {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
        }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0, |_| 0.0, |_| 0.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn d1(&self, x: f64) -> f64 {
        (self.d1)(x)
    }

    pub fn d2(&self, x: f64) -> f64 {
        (self.d2)(x)
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Profile")
    }
}

/// `w(ζ, τ) = (½ − ½ tanh(kζ + cτ))^p`, the exact solutions of the examples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TravelingWave {
    pub k: f64,
    pub c: f64,
    pub p: f64,
}

impl TravelingWave {
    pub const EXAMPLE1: TravelingWave = TravelingWave {
        k: 0.25,
        c: 0.375,
        p: 1.0,
    };
    pub const EXAMPLE2: TravelingWave = TravelingWave {
        k: 1.0 / 3.0,
        c: -10.0 / 9.0,
        p: 0.5,
    };

    fn base(&self, zeta: f64, tau: f64) -> f64 {
        0.5 - 0.5 * (self.k * zeta + self.c * tau).tanh()
    }

    pub fn value(&self, zeta: f64, tau: f64) -> f64 {
        self.base(zeta, tau).powf(self.p)
    }

    /// d/dz and d²/dz² of u^p with u = ½ − ½ tanh z.
    fn dz(&self, zeta: f64, tau: f64) -> (f64, f64) {
        let u = self.base(zeta, tau);
        let w = u.powf(self.p);
        let p = self.p;
        let first = -2.0 * p * w * (1.0 - u);
        let second = 4.0 * p * w * (1.0 - u) * (p * (1.0 - u) - u);
        (first, second)
    }

    pub fn d_zeta(&self, zeta: f64, tau: f64) -> f64 {
        self.k * self.dz(zeta, tau).0
    }

    pub fn d2_zeta(&self, zeta: f64, tau: f64) -> f64 {
        self.k * self.k * self.dz(zeta, tau).1
    }

    pub fn d_tau(&self, zeta: f64, tau: f64) -> f64 {
        self.c * self.dz(zeta, tau).0
    }

    /// Initial profile ζ ↦ w(ζ, 0).
    pub fn initial(self) -> Profile {
        Profile::new(
            move |z| self.value(z, 0.0),
            move |z| self.d_zeta(z, 0.0),
            move |z| self.d2_zeta(z, 0.0),
        )
    }

    /// Boundary profile τ ↦ w(ζ₀, τ).
    pub fn boundary(self, zeta0: f64) -> Profile {
        Profile::new(
            move |t| self.value(zeta0, t),
            move |t| self.d_tau(zeta0, t),
            move |t| self.c * self.c * self.dz(zeta0, t).1,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub alpha: f64,
    pub kappa: f64,
    pub nu: f64,
    pub beta: f64,
    pub eta: f64,
    pub gamma: f64,
    pub delta: u32,
}

impl Params {
    pub fn example1(alpha: f64) -> Self {
        Self {
            alpha,
            kappa: 1.0,
            nu: -1.0,
            beta: 1.0,
            eta: 1.0,
            gamma: 1.0,
            delta: 1,
        }
    }

    pub fn example2(alpha: f64) -> Self {
        Self {
            alpha,
            kappa: 1.0,
            nu: -1.0,
            beta: -1.0,
            eta: 0.0,
            gamma: 1.0,
            delta: 2,
        }
    }

    /// Heat equation defaults: κ = 1, every nonlinear coefficient zero.
    pub fn linear(alpha: f64) -> Self {
        Self {
            alpha,
            kappa: 1.0,
            nu: 0.0,
            beta: 0.0,
            eta: 0.0,
            gamma: 0.0,
            delta: 1,
        }
    }
}

/// The space-time rectangle [a, b] × [0, t_max].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub a: f64,
    pub b: f64,
    pub t_max: f64,
}

impl Domain {
    pub const UNIT: Domain = Domain {
        a: 0.0,
        b: 1.0,
        t_max: 1.0,
    };

    pub fn contains(&self, zeta: f64, tau: f64) -> bool {
        zeta >= self.a && zeta <= self.b && tau >= 0.0 && tau <= self.t_max
    }
}

#[derive(Clone)]
pub struct ProblemSpec {
    name: String,
    order: CaputoOrder,
    params: Params,
    domain: Domain,
    h: Profile,
    p1: Profile,
    p2: Profile,
    exact: Option<FieldFn>,
    source: Option<FieldFn>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("domain", &self.domain)
            .field("exact", &self.exact.is_some())
            .field("source", &self.source.is_some())
            .finish()
    }
}

impl ProblemSpec {
    pub fn new(params: Params, domain: Domain, h: Profile, p1: Profile, p2: Profile) -> Result<Self> {
        let order = CaputoOrder::new(params.alpha)?;
        if params.delta == 0 {
            return Err(Error::Config("delta must be a positive integer".into()));
        }
        let finite = [params.kappa, params.nu, params.beta, params.eta, params.gamma];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config(format!("non-finite coefficient in {params:?}")));
        }
        if !(domain.a < domain.b) || !(domain.t_max > 0.0) || !domain.b.is_finite() || !domain.t_max.is_finite() {
            return Err(Error::Config(format!("degenerate domain {domain:?}")));
        }
        let spec = Self {
            name: "custom".into(),
            order,
            params,
            domain,
            h,
            p1,
            p2,
            exact: None,
            source: None,
        };
        spec.check_corners()?;
        Ok(spec)
    }

    /// Data taken from the traces of a travelling wave, which also becomes the exact solution.
    pub fn from_wave(params: Params, domain: Domain, wave: TravelingWave) -> Result<Self> {
        let spec = Self::new(
            params,
            domain,
            wave.initial(),
            wave.boundary(domain.a),
            wave.boundary(domain.b),
        )?;
        Ok(spec.with_exact(move |z, t| wave.value(z, t)))
    }

    pub fn example1(alpha: f64) -> Result<Self> {
        Ok(Self::from_wave(Params::example1(alpha), Domain::UNIT, TravelingWave::EXAMPLE1)?.named("example1"))
    }

    pub fn example2(alpha: f64) -> Result<Self> {
        Ok(Self::from_wave(Params::example2(alpha), Domain::UNIT, TravelingWave::EXAMPLE2)?.named("example2"))
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_exact(mut self, exact: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exact = Some(Arc::new(exact));
        self
    }

    /// Adds `g(ζ, τ)` to the right-hand side.
    pub fn with_source(mut self, source: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.source = Some(Arc::new(source));
        self
    }

    fn check_corners(&self) -> Result<()> {
        let d = self.domain;
        let left = (self.h.value(d.a) - self.p1.value(0.0)).abs();
        if !(left <= CORNER_TOL) {
            return Err(Error::CornerMismatch {
                corner: "(a, 0)",
                mismatch: left,
            });
        }
        let right = (self.h.value(d.b) - self.p2.value(0.0)).abs();
        if !(right <= CORNER_TOL) {
            return Err(Error::CornerMismatch {
                corner: "(b, 0)",
                mismatch: right,
            });
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> &CaputoOrder {
        &self.order
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn initial(&self) -> &Profile {
        &self.h
    }

    pub fn left_boundary(&self) -> &Profile {
        &self.p1
    }

    pub fn right_boundary(&self) -> &Profile {
        &self.p2
    }

    pub fn exact(&self) -> Option<&FieldFn> {
        self.exact.as_ref()
    }

    pub fn source(&self, zeta: f64, tau: f64) -> f64 {
        self.source.as_ref().map_or(0.0, |g| g(zeta, tau))
    }

    /// N(w, w_ζ): the nonlinear part of the right-hand side.
    pub fn nonlinear(&self, w: f64, w_zeta: f64) -> f64 {
        let p = &self.params;
        let wd = w.powi(p.delta as i32);
        let wd1 = wd * w;
        -p.nu * wd * w_zeta + p.beta * p.eta * wd1 - p.beta * p.eta * wd1 * wd + p.beta * p.gamma * wd1
    }

    /// The full right-hand side `κ w_ζζ − ν w^δ w_ζ + β(1 − w^δ) w (η w^δ − γ) + g`.
    pub fn rhs(&self, zeta: f64, tau: f64, w: f64, w_zeta: f64, w_zetazeta: f64) -> f64 {
        let p = &self.params;
        let wd = w.powi(p.delta as i32);
        p.kappa * w_zetazeta - p.nu * wd * w_zeta
            + p.beta * (1.0 - wd) * w * (p.eta * wd - p.gamma)
            + self.source(zeta, tau)
    }
}

/// The data-carrying part `f` of `w = v + f`, in original coordinates.
#[derive(Debug, Clone)]
pub struct Homogenizer {
    h: Profile,
    p1: Profile,
    p2: Profile,
    a: f64,
    b: f64,
    order: CaputoOrder,
}

pub fn build_homogenizer(spec: &ProblemSpec) -> Result<Homogenizer> {
    spec.check_corners()?;
    Ok(Homogenizer {
        h: spec.h.clone(),
        p1: spec.p1.clone(),
        p2: spec.p2.clone(),
        a: spec.domain.a,
        b: spec.domain.b,
        order: spec.order.clone(),
    })
}

impl Homogenizer {
    fn weight(&self, zeta: f64) -> f64 {
        (zeta - self.a) / (self.b - self.a)
    }

    fn jump(&self, tau: f64) -> f64 {
        self.p2.value(tau) - self.h.value(self.b) - self.p1.value(tau) + self.h.value(self.a)
    }

    /// f(ζ, τ) = h(ζ) + p1(τ) − h(a) + (ζ − a)/(b − a) · [p2(τ) − h(b) − p1(τ) + h(a)].
    pub fn value(&self, zeta: f64, tau: f64) -> f64 {
        self.h.value(zeta) + self.p1.value(tau) - self.h.value(self.a) + self.weight(zeta) * self.jump(tau)
    }

    pub fn d_zeta(&self, zeta: f64, tau: f64) -> f64 {
        self.h.d1(zeta) + self.jump(tau) / (self.b - self.a)
    }

    pub fn d2_zeta(&self, zeta: f64, _tau: f64) -> f64 {
        self.h.d2(zeta)
    }

    pub fn d_tau(&self, zeta: f64, tau: f64) -> f64 {
        let s = self.weight(zeta);
        (1.0 - s) * self.p1.d1(tau) + s * self.p2.d1(tau)
    }

    pub fn caputo_tau(&self, zeta: f64, tau: f64) -> f64 {
        let s = self.weight(zeta);
        let c1 = caputo_smooth(|t| self.p1.d1(t), &self.order, tau);
        let c2 = caputo_smooth(|t| self.p2.d1(t), &self.order, tau);
        (1.0 - s) * c1 + s * c2
    }
}

/// Anything `L` can be applied to: values, ∂²_ζ and ᶜD^α_τ in reference coordinates.
pub trait OperatorInput {
    fn value(&self, zeta: f64, tau: f64) -> Result<f64>;
    fn d2_zeta(&self, zeta: f64, tau: f64) -> Result<f64>;
    fn caputo_tau(&self, order: &CaputoOrder, zeta: f64, tau: f64) -> Result<f64>;
}

impl OperatorInput for SeparableFn2D {
    fn value(&self, zeta: f64, tau: f64) -> Result<f64> {
        Ok(self.eval(zeta, tau))
    }

    fn d2_zeta(&self, zeta: f64, tau: f64) -> Result<f64> {
        self.partial(zeta, tau, 2, 0)
    }

    fn caputo_tau(&self, order: &CaputoOrder, zeta: f64, tau: f64) -> Result<f64> {
        SeparableFn2D::caputo_tau(self, order, zeta, tau)
    }
}

/// Coefficients of `L = time·ᶜD^α_τ̂ − diffusion·∂²_ζ̂ + reaction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorCoefficients {
    pub time: f64,
    pub diffusion: f64,
    pub reaction: f64,
}

/// A problem mapped to the reference square, ready for the kernel machinery.
#[derive(Debug, Clone)]
pub struct HomogenizedProblem {
    spec: ProblemSpec,
    homogenizer: Homogenizer,
    coefficients: OperatorCoefficients,
}

pub fn rescale_to_reference(spec: &ProblemSpec) -> Result<HomogenizedProblem> {
    let homogenizer = build_homogenizer(spec)?;
    let d = spec.domain;
    let p = spec.params;
    let width = d.b - d.a;
    Ok(HomogenizedProblem {
        spec: spec.clone(),
        homogenizer,
        coefficients: OperatorCoefficients {
            time: d.t_max.powf(-p.alpha),
            diffusion: p.kappa / (width * width),
            reaction: p.gamma * p.beta,
        },
    })
}

impl HomogenizedProblem {
    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn homogenizer(&self) -> &Homogenizer {
        &self.homogenizer
    }

    pub fn coefficients(&self) -> OperatorCoefficients {
        self.coefficients
    }

    pub fn order(&self) -> &CaputoOrder {
        &self.spec.order
    }

    pub fn to_original(&self, point: (f64, f64)) -> (f64, f64) {
        let d = self.spec.domain;
        (d.a + (d.b - d.a) * point.0, d.t_max * point.1)
    }

    pub fn to_reference(&self, point: (f64, f64)) -> (f64, f64) {
        let d = self.spec.domain;
        ((point.0 - d.a) / (d.b - d.a), point.1 / d.t_max)
    }

    /// (L v)(point) for `point` in the reference square.
    pub fn apply_linear_operator(&self, v: &dyn OperatorInput, point: (f64, f64)) -> Result<f64> {
        Error::check_unit("zeta", point.0)?;
        Error::check_unit("tau", point.1)?;
        let c = self.coefficients;
        let (z, t) = point;
        let mut total = 0.0;
        if c.time != 0.0 {
            total += c.time * v.caputo_tau(self.order(), z, t)?;
        }
        if c.diffusion != 0.0 {
            total -= c.diffusion * v.d2_zeta(z, t)?;
        }
        if c.reaction != 0.0 {
            total += c.reaction * v.value(z, t)?;
        }
        Ok(total)
    }

    /// (L f) in original coordinates.
    pub fn homogenizer_residual(&self, zeta: f64, tau: f64) -> f64 {
        let p = &self.spec.params;
        let f = &self.homogenizer;
        f.caputo_tau(zeta, tau) - p.kappa * f.d2_zeta(zeta, tau) + p.gamma * p.beta * f.value(zeta, tau)
    }

    /// M at a reference point, given v and ∂_ζ̂ v there.
    pub fn eval_m(&self, point: (f64, f64), v_val: f64, v_zeta: f64) -> f64 {
        let (z, t) = self.to_original(point);
        let d = self.spec.domain;
        let f = &self.homogenizer;
        let w = v_val + f.value(z, t);
        let w_zeta = v_zeta / (d.b - d.a) + f.d_zeta(z, t);
        self.spec.nonlinear(w, w_zeta) + self.spec.source(z, t) - self.homogenizer_residual(z, t)
    }
}

/// Which built-in data a config file refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataSet {
    Example1,
    Example2,
    Zero,
}

/// Parses `key = value` lines. `data` picks the initial/boundary data and
/// default parameters; any other key overrides a parameter or domain bound.
/// `#` starts a comment.
pub fn parse_config(text: &str) -> Result<ProblemSpec> {
    let mut entries = Vec::new();
    let mut data = DataSet::Zero;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let (key, value) = (key.trim().to_ascii_lowercase(), value.trim());
        if key == "data" {
            data = match value {
                "example1" | "1" => DataSet::Example1,
                "example2" | "2" => DataSet::Example2,
                "zero" => DataSet::Zero,
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown data set {other:?}",
                        lineno + 1
                    )))
                }
            };
        } else {
            let number: f64 = value
                .parse()
                .map_err(|_| Error::Config(format!("line {}: {key} = {value:?} is not a number", lineno + 1)))?;
            entries.push((lineno + 1, key, number));
        }
    }
    let mut params = match data {
        DataSet::Example1 => Params::example1(1.0),
        DataSet::Example2 => Params::example2(1.0),
        DataSet::Zero => Params::linear(1.0),
    };
    let mut domain = Domain::UNIT;
    for (lineno, key, x) in entries {
        match key.as_str() {
            "alpha" => params.alpha = x,
            "kappa" => params.kappa = x,
            "nu" => params.nu = x,
            "beta" => params.beta = x,
            "eta" => params.eta = x,
            "gamma" => params.gamma = x,
            "delta" => {
                if x.fract() != 0.0 || x < 1.0 || x > u32::MAX as f64 {
                    return Err(Error::Config(format!(
                        "line {lineno}: delta must be a positive integer"
                    )));
                }
                params.delta = x as u32;
            }
            "a" => domain.a = x,
            "b" => domain.b = x,
            "t_max" | "t" => domain.t_max = x,
            other => return Err(Error::Config(format!("line {lineno}: unknown key {other:?}"))),
        }
    }
    match data {
        DataSet::Example1 => Ok(ProblemSpec::from_wave(params, domain, TravelingWave::EXAMPLE1)?.named("example1")),
        DataSet::Example2 => Ok(ProblemSpec::from_wave(params, domain, TravelingWave::EXAMPLE2)?.named("example2")),
        DataSet::Zero => Ok(
            ProblemSpec::new(params, domain, Profile::zero(), Profile::zero(), Profile::zero())?
                .with_exact(|_, _| 0.0)
                .named("zero"),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractional::caputo_monomial;
    use crate::oracle;

    #[test]
    fn wave_derivatives_match_differences() {
        for wave in [TravelingWave::EXAMPLE1, TravelingWave::EXAMPLE2] {
            let (z, t) = (0.37, 0.61);
            let fz = |x: f64| wave.value(x, t);
            let ft = |x: f64| wave.value(z, x);
            assert!((wave.d_zeta(z, t) - oracle::central_difference(&fz, z, 1e-3, 1)).abs() < 1e-10);
            assert!((wave.d2_zeta(z, t) - oracle::central_difference(&fz, z, 1e-3, 2)).abs() < 1e-8);
            assert!((wave.d_tau(z, t) - oracle::central_difference(&ft, t, 1e-3, 1)).abs() < 1e-10);
        }
    }

    fn residual(spec: &ProblemSpec, wave: TravelingWave, z: f64, t: f64) -> f64 {
        wave.d_tau(z, t) - spec.rhs(z, t, wave.value(z, t), wave.d_zeta(z, t), wave.d2_zeta(z, t))
    }

    #[test]
    fn example1_wave_solves_the_classical_equation() {
        let spec = ProblemSpec::example1(1.0).unwrap();
        for &(z, t) in &[(0.1, 0.2), (0.5, 0.5), (0.9, 0.8)] {
            assert!(residual(&spec, TravelingWave::EXAMPLE1, z, t).abs() < 1e-13);
        }
    }

    #[test]
    fn example2_printed_wave_is_not_exact() {
        // The printed profile leaves an O(0.1) residual; flipping the sign of k solves the equation.
        let spec = ProblemSpec::example2(1.0).unwrap();
        let mirrored = TravelingWave {
            k: -1.0 / 3.0,
            ..TravelingWave::EXAMPLE2
        };
        for &(z, t) in &[(0.1, 0.2), (0.5, 0.5), (0.9, 0.8)] {
            assert!(residual(&spec, TravelingWave::EXAMPLE2, z, t).abs() > 1e-2);
            assert!(residual(&spec, mirrored, z, t).abs() < 1e-13);
        }
    }

    #[test]
    fn example_values() {
        let e1 = TravelingWave::EXAMPLE1;
        assert!((e1.value(0.5, 0.5) - 0.348645).abs() < 5e-7);
        assert_eq!(e1.value(0.0, 0.0), 0.5);
        assert!((TravelingWave::EXAMPLE2.value(0.5, 1.0 / 3.0) - 0.774897).abs() < 5e-7);
    }

    #[test]
    fn corner_mismatch_is_rejected() {
        let h = Profile::new(|_| 1.0, |_| 0.0, |_| 0.0);
        let err = ProblemSpec::new(Params::linear(0.5), Domain::UNIT, h, Profile::zero(), Profile::zero()).unwrap_err();
        assert!(matches!(err, Error::CornerMismatch { mismatch, .. } if (mismatch - 1.0).abs() < 1e-15));
    }

    #[test]
    fn homogenizer_traces() {
        let spec = ProblemSpec::from_wave(
            Params::example1(0.9),
            Domain {
                a: -0.5,
                b: 1.5,
                t_max: 2.0,
            },
            TravelingWave::EXAMPLE1,
        )
        .unwrap();
        let f = build_homogenizer(&spec).unwrap();
        let w = TravelingWave::EXAMPLE1;
        for i in 0..50 {
            let s = i as f64 / 49.0;
            let z = -0.5 + 2.0 * s;
            let t = 2.0 * s;
            assert!((f.value(z, 0.0) - w.value(z, 0.0)).abs() < 1e-10);
            assert!((f.value(-0.5, t) - w.value(-0.5, t)).abs() < 1e-10);
            assert!((f.value(1.5, t) - w.value(1.5, t)).abs() < 1e-10);
        }
    }

    #[test]
    fn homogenizer_midpoint_example1() {
        // Hand evaluation with h = w(·,0), p1 = w(0,·), p2 = w(1,·)
        let w = TravelingWave::EXAMPLE1;
        let f = build_homogenizer(&ProblemSpec::example1(0.9).unwrap()).unwrap();
        let expected = w.value(0.5, 0.0) + w.value(0.0, 0.5) - 0.5
            + 0.5 * (w.value(1.0, 0.5) - w.value(1.0, 0.0) - w.value(0.0, 0.5) + 0.5);
        assert!((f.value(0.5, 0.5) - expected).abs() < 1e-15);
        assert!((f.value(0.5, 0.5) - 0.349_827_350_819_588_7).abs() < 1e-14);
    }

    #[test]
    fn homogenizer_derivatives() {
        let spec = ProblemSpec::example2(0.6).unwrap();
        let f = build_homogenizer(&spec).unwrap();
        let (z, t) = (0.3, 0.7);
        let fz = |x: f64| f.value(x, t);
        assert!((f.d_zeta(z, t) - oracle::central_difference(&fz, z, 1e-3, 1)).abs() < 1e-10);
        assert!((f.d2_zeta(z, t) - oracle::central_difference(&fz, z, 1e-3, 2)).abs() < 1e-8);
        let df = |s: f64| {
            let g = |x: f64| f.value(z, x);
            oracle::central_difference(&g, s, 1e-4, 1)
        };
        let reference = oracle::caputo(&df, &[], 0.6, t);
        assert!((f.caputo_tau(z, t) - reference).abs() < 1e-7);
    }

    #[test]
    fn rescaling_coefficients() {
        let unit = rescale_to_reference(&ProblemSpec::example1(0.7).unwrap()).unwrap();
        assert_eq!(
            unit.coefficients(),
            OperatorCoefficients {
                time: 1.0,
                diffusion: 1.0,
                reaction: 1.0
            }
        );
        let wide = |alpha| {
            let spec = ProblemSpec::new(
                Params::linear(alpha),
                Domain {
                    a: 0.0,
                    b: 0.5,
                    t_max: 2.0,
                },
                Profile::zero(),
                Profile::zero(),
                Profile::zero(),
            )
            .unwrap();
            rescale_to_reference(&spec).unwrap().coefficients()
        };
        let c = wide(1.0);
        assert_eq!(c.time, 0.5);
        assert_eq!(c.diffusion, 4.0);
        // τ² on [0, 2]: ᶜD^α_τ at τ = 1.2 equals T^(-α) ᶜD^α_τ̂ of (Tτ̂)² at τ̂ = 0.6
        let o = CaputoOrder::new(0.5).unwrap();
        let direct = caputo_monomial(2.0, &o, 1.2).unwrap();
        let reference = wide(0.5).time * 4.0 * caputo_monomial(2.0, &o, 0.6).unwrap();
        assert!((direct - reference).abs() < 1e-14);
        assert!((wide(0.5).time - 2f64.powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_domain_is_rejected() {
        let bad = Domain {
            a: 1.0,
            b: 1.0,
            t_max: 1.0,
        };
        assert!(ProblemSpec::new(
            Params::linear(0.5),
            bad,
            Profile::zero(),
            Profile::zero(),
            Profile::zero()
        )
        .is_err());
    }

    #[test]
    fn m_reduces_to_example_forms() {
        let e1 = ProblemSpec::example1(0.9).unwrap();
        let e2 = ProblemSpec::example2(0.9).unwrap();
        for i in 0..20 {
            let w = -1.0 + 0.13 * i as f64;
            let wz = 0.7 - 0.09 * i as f64;
            // ww_ζ + (1 − w)w(w − 1) moved past the +w of L
            let m1 = w * wz + 2.0 * w * w - w.powi(3);
            assert!((e1.nonlinear(w, wz) - m1).abs() < 1e-12);
            assert!((e1.nonlinear(w, wz) - (e1.rhs(0.0, 0.0, w, wz, 0.0) + w)).abs() < 1e-12);
            let m2 = w * w * wz + w * (1.0 - w * w) - w;
            assert!((e2.nonlinear(w, wz) - m2).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_solution_has_small_residual_at_alpha_one() {
        let hp = rescale_to_reference(&ProblemSpec::example1(1.0).unwrap()).unwrap();
        let w = TravelingWave::EXAMPLE1;
        let f = hp.homogenizer();
        for i in 1..=20 {
            let z = i as f64 / 21.0;
            let t = 1.0 - z * 0.9;
            let v = |zz: f64, tt: f64| w.value(zz, tt) - f.value(zz, tt);
            let vt = oracle::central_difference(&|x| v(z, x), t, 1e-4, 1);
            let vz = oracle::central_difference(&|x| v(x, t), z, 1e-4, 1);
            let vzz = oracle::central_difference(&|x| v(x, t), z, 1e-3, 2);
            let lhs = vt - vzz + v(z, t);
            let residual = lhs - hp.eval_m((z, t), v(z, t), vz);
            assert!(residual.abs() < 1e-4, "({z},{t}): {residual}");
        }
    }

    #[test]
    fn splitting_matches_full_equation() {
        // L v − M(v) = ᶜD^α w − RHS(w) for w = v + f, v a smooth separable test function
        let spec = ProblemSpec::example2(0.75).unwrap();
        let hp = rescale_to_reference(&spec).unwrap();
        let v = SeparableFn2D::kernel32((0.4, 0.6)).unwrap();
        let f = hp.homogenizer();
        for i in 0..30 {
            let z = (i as f64 * 0.618034).fract() * 0.9 + 0.05;
            let t = (i as f64 * 0.414214).fract() * 0.9 + 0.05;
            let vz = v.partial(z, t, 1, 0).unwrap();
            let split = hp.apply_linear_operator(&v, (z, t)).unwrap() - hp.eval_m((z, t), v.eval(z, t), vz);
            let dw = |s: f64| v.partial(z, s, 0, 1).unwrap() + f.d_tau(z, s);
            let caputo_w = oracle::caputo(&dw, &[0.6], 0.75, t);
            let w = v.eval(z, t) + f.value(z, t);
            let wz = vz + f.d_zeta(z, t);
            let wzz = v.partial(z, t, 2, 0).unwrap() + f.d2_zeta(z, t);
            let full = caputo_w - spec.rhs(z, t, w, wz, wzz);
            assert!((split - full).abs() < 1e-6, "({z},{t}): {split} vs {full}");
        }
    }

    #[test]
    fn config_parsing() {
        let spec = parse_config("data = example2\nalpha = 0.5 # fractional\n\nkappa=2").unwrap();
        assert_eq!(spec.params().delta, 2);
        assert_eq!(spec.params().alpha, 0.5);
        assert_eq!(spec.params().kappa, 2.0);
        assert!(spec.exact().is_some());
        assert!(parse_config("alpha = 0.5\nfoo = 1").is_err());
        assert!(parse_config("alpha = x").is_err());
        assert!(parse_config("alpha = 1.5").is_err());
        assert!(parse_config("delta = 1.5").is_err());
        assert!(parse_config("a = 2").is_err());
        let z = parse_config("alpha=0.3\nt_max=2").unwrap();
        assert_eq!(z.domain().t_max, 2.0);
        assert_eq!(z.name(), "zero");
    }
}
