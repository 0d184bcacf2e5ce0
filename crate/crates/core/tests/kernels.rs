use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use rkhsm::kernels::{kernel11, kernel32, rk1, rk2, rk3, rk_as_poly, KernelSpaceId};
use rkhsm::piecewise::PiecewiseFracPoly;
use rkhsm::separable::{inner_product_oracle, inner_product_oracle_2d, SeparableFn2D};

/// Members of each space as coefficient vectors; W₂² members vanish at 0,
/// W₂³ members at 0 and 1.
fn members(space: KernelSpaceId) -> Vec<Vec<f64>> {
    match space {
        KernelSpaceId::W1 => vec![
            vec![1.0],
            vec![0.0, 1.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0, 0.0, 1.0],
        ],
        KernelSpaceId::W2 => vec![
            vec![0.0, 1.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        ],
        _ => vec![
            vec![0.0, 1.0, -1.0],
            vec![0.0, 0.0, 1.0, -1.0],
            vec![0.0, 0.0, 0.0, 1.0, -1.0],
            vec![0.0, 0.0, 0.0, 0.0, 1.0, -1.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0],
        ],
    }
}

fn combine(space: KernelSpaceId, weights: &[f64]) -> PiecewiseFracPoly {
    let mut coeffs = vec![0.0; 7];
    for (w, m) in weights.iter().zip(members(space)) {
        for (c, v) in coeffs.iter_mut().zip(m) {
            *c += w * v;
        }
    }
    PiecewiseFracPoly::polynomial(&coeffs)
}

fn space() -> impl Strategy<Value = KernelSpaceId> {
    prop_oneof![
        Just(KernelSpaceId::W1),
        Just(KernelSpaceId::W2),
        Just(KernelSpaceId::W3)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reproducing_property(space in space(), anchor in 0.0f64..=1.0, weights in prop::collection::vec(-2.0f64..2.0, 5)) {
        let f = combine(space, &weights);
        let k = rk_as_poly(space, anchor).unwrap();
        let ip = inner_product_oracle(space, &f, &k).unwrap();
        prop_assert!((ip - f.value(anchor)).abs() < 1e-7, "{} vs {}", ip, f.value(anchor));
    }

    #[test]
    fn kernels_are_symmetric(x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        prop_assert!((rk1(x, y).unwrap() - rk1(y, x).unwrap()).abs() < 1e-15);
        prop_assert!((rk2(x, y).unwrap() - rk2(y, x).unwrap()).abs() < 1e-15);
        prop_assert!((rk3(x, y).unwrap() - rk3(y, x).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn product_kernels_factor(a in (0.0f64..=1.0, 0.0f64..=1.0), b in (0.0f64..=1.0, 0.0f64..=1.0)) {
        prop_assert!((kernel32(a, b).unwrap() - rk3(a.0, b.0).unwrap() * rk2(a.1, b.1).unwrap()).abs() < 1e-15);
        prop_assert!((kernel11(a, b).unwrap() - rk1(a.0, b.0).unwrap() * rk1(a.1, b.1).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn gram_of_random_points_is_psd() {
    let mut rng = StdRng::seed_from_u64(11);
    let points: Vec<(f64, f64)> = (0..10)
        .map(|_| (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)))
        .collect();
    for k in [
        kernel32 as fn((f64, f64), (f64, f64)) -> rkhsm::error::Result<f64>,
        kernel11,
    ] {
        let g = DMatrix::from_fn(10, 10, |i, j| k(points[i], points[j]).unwrap());
        assert!((&g - g.transpose()).abs().max() < 1e-15);
        let eig = g.clone().symmetric_eigen().eigenvalues;
        let scale = g.abs().max();
        assert!(eig.iter().all(|&l| l > -1e-12 * scale), "{eig}");
    }
}

#[test]
fn tensor_reproducing_property() {
    let f = SeparableFn2D::product(
        PiecewiseFracPoly::polynomial(&[0.0, 1.0, -1.0]),
        PiecewiseFracPoly::polynomial(&[0.0, 2.0, 1.0]),
    );
    for anchor in [(0.2, 0.7), (0.5, 0.5), (0.9, 0.1)] {
        let k = SeparableFn2D::kernel32(anchor).unwrap();
        let ip = inner_product_oracle_2d(KernelSpaceId::W32, &f, &k).unwrap();
        assert!((ip - f.eval(anchor.0, anchor.1)).abs() < 1e-8);
    }
}
