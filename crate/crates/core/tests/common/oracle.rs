//! Reference quadratures used only by tests.
//!
//! Self-contained on purpose: Gauss–Legendre nodes are generated here by
//! Newton iteration, and the Caputo reference uses a change of variables
//! instead of Jacobi weights, so it shares no code path with the library.

#![allow(dead_code)]

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Composite Gauss–Legendre on [a, b] with `panels` equal panels between
/// consecutive `kinks`, each panel graded geometrically toward both ends.
pub fn integrate(a: f64, b: f64, kinks: &[f64], panels: usize, f: &dyn Fn(f64) -> f64) -> f64 {
    let (x, w) = gauss_legendre(20);
    let mut cuts: Vec<f64> = kinks.iter().copied().filter(|&k| k > a && k < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    for seg in cuts.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let mut pts: Vec<f64> = (0..=panels)
            .map(|i| lo + (hi - lo) * i as f64 / panels as f64)
            .collect();
        let first = (hi - lo) / panels as f64;
        let mut h = first;
        for _ in 0..40 {
            h *= 0.5;
            pts.push(lo + h);
            pts.push(hi - h);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        for p in pts.windows(2) {
            let (c, r) = (0.5 * (p[0] + p[1]), 0.5 * (p[1] - p[0]));
            total += r * x.iter().zip(&w).map(|(xi, wi)| wi * f(c + r * xi)).sum::<f64>();
        }
    }
    total
}

/// Caputo derivative (0 < alpha < 1) of a function whose first derivative is
/// `df`, using u = (t - s)^(1-alpha) so the weak singularity disappears.
/// `kinks` lists points where `df` is not smooth.
pub fn caputo(df: &dyn Fn(f64) -> f64, kinks: &[f64], alpha: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let p = 1.0 - alpha;
    let upper = t.powf(p);
    let u_kinks: Vec<f64> = kinks
        .iter()
        .filter(|&&k| k > 0.0 && k < t)
        .map(|&k| (t - k).powf(p))
        .collect();
    let g = |u: f64| df(t - u.powf(1.0 / p));
    let integral = integrate(0.0, upper, &u_kinks, 25, &g) / p;
    integral / libm::tgamma(1.0 - alpha)
}

/// Central difference of order 1 or 2 with step `h`.
pub fn central_difference(f: &dyn Fn(f64) -> f64, x: f64, h: f64, order: usize) -> f64 {
    match order {
        1 => (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h),
        2 => (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h),
        _ => panic!("unsupported difference order {order}"),
    }
}
