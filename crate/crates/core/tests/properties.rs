//! Property tests for the core invariants: analytic Jacobians against finite
//! differences, solve round-trips, inner-product structure, branch-anchored
//! powers, kernel membership, and closed-form/quadrature agreement.

use ballmap::bounds::{growth_bounds_closed, growth_bounds_quadrature};
use ballmap::classes::{tilde_inverse, tilde_transform, ClassParams};
use ballmap::holomap::HoloMap;
use ballmap::kernel::Kernel;
use ballmap::linalg::{CMatrix, CVec};
use ballmap::power::principal_power;
use ballmap::C64;
use num_complex::Complex;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

fn arb_cvec(n: usize, scale: f64) -> impl Strategy<Value = CVec<f64>> {
    proptest::collection::vec((-scale..scale, -scale..scale), n)
        .prop_map(|v| CVec(v.into_iter().map(|(re, im)| c(re, im)).collect()))
}

#[derive(Debug, Clone)]
struct MapAndPoint {
    map: HoloMap<f64>,
    z: CVec<f64>,
}

/// Random polynomial maps of degree <= 4 in dimension <= 4, with a small
/// evaluation point for the derivative checks.
fn arb_map_and_point(identity_part: bool) -> impl Strategy<Value = MapAndPoint> {
    (1usize..=4).prop_flat_map(move |n| {
        let term = (
            0..n,
            proptest::collection::vec(0u32..=3, n),
            -0.5..0.5f64,
            -0.5..0.5f64,
        );
        let terms = proptest::collection::vec(term, 1..8).prop_filter("degree cap", |ts| {
            ts.iter().all(|(_, idx, _, _)| idx.iter().sum::<u32>() <= 4)
        });
        (terms, arb_cvec(n, 0.25 / n as f64)).prop_map(move |(ts, z)| {
            let mut b = HoloMap::builder(n).unwrap().degree_cap(4);
            if identity_part {
                for i in 0..n {
                    let mut idx = vec![0u32; n];
                    idx[i] = 1;
                    b = b.term(i, &idx, c(1.0, 0.0)).unwrap();
                }
            }
            for (out, idx, re, im) in ts {
                let degree: u32 = idx.iter().sum();
                if identity_part && degree < 2 {
                    continue; // keep the linear part exactly the identity
                }
                b = b.term(out, &idx, c(re, im)).unwrap();
            }
            MapAndPoint { map: b.build(), z }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn jacobian_matches_central_differences(mp in arb_map_and_point(false)) {
        let n = mp.map.dim();
        let j = mp.map.jacobian(&mp.z).unwrap();
        let h = 1e-5;
        let mut jnorm = 0.0f64;
        for i in 0..n {
            for k in 0..n {
                jnorm = jnorm.max(j[(i, k)].norm());
            }
        }
        for col in 0..n {
            let mut zp = mp.z.clone();
            let mut zm = mp.z.clone();
            zp[col] += c(h, 0.0);
            zm[col] -= c(h, 0.0);
            let fp = mp.map.eval(&zp).unwrap();
            let fm = mp.map.eval(&zm).unwrap();
            for row in 0..n {
                let fd = (fp[row] - fm[row]) / c(2.0 * h, 0.0);
                let err = (j[(row, col)] - fd).norm();
                prop_assert!(err <= 1e-6 * (1.0 + jnorm), "entry ({}, {}): err {}", row, col, err);
            }
        }
    }

    #[test]
    fn solve_then_multiply_back(mp in arb_map_and_point(true), w in (1usize..=4).prop_flat_map(|n| arb_cvec(n, 2.0))) {
        prop_assume!(w.dim() == mp.map.dim());
        let (x, cond) = match mp.map.solve_jacobian_with_cond(&mp.z, &w) {
            Ok(v) => v,
            Err(_) => return Ok(()), // singular points are legitimately rejected
        };
        prop_assume!(cond <= 1e6);
        prop_assume!(w.norm() > 1e-6);
        let back = mp.map.jacobian(&mp.z).unwrap().mul_vec(&x).unwrap();
        prop_assert!(back.dist(&w) / w.norm() <= 1e-10);
    }

    #[test]
    fn inner_product_structure(z in arb_cvec(3, 1.0), w in arb_cvec(3, 1.0), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let zw = z.inner(&w).unwrap();
        let wz = w.inner(&z).unwrap();
        prop_assert!((zw - wz.conj()).norm() < 1e-14);
        let zz = z.inner(&z).unwrap();
        prop_assert!(zz.im.abs() < 1e-15 && zz.re >= 0.0);
        // conjugate-linearity in the second slot
        let scaled = z.inner(&w.scale(c(a, b))).unwrap();
        prop_assert!((scaled - zw * c(a, b).conj()).norm() < 1e-12);
    }

    #[test]
    fn principal_power_is_additive_in_right_half_plane(
        re in 0.05..3.0f64,
        im in -3.0..3.0f64,
        p in -2.0..2.0f64,
        q in -2.0..2.0f64,
    ) {
        let w = c(re, im);
        let lhs = principal_power(w, p).unwrap() * principal_power(w, q).unwrap();
        let rhs = principal_power(w, p + q).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn mobius_membership_round_trip(
        a in -1.0..0.98f64,
        gap in 0.02..1.0f64,
        rho in 0.01..0.99f64,
        theta in 0.0..std::f64::consts::TAU,
    ) {
        let b = (a + gap).min(1.0);
        prop_assume!(a < b);
        let k = Kernel::mobius(a, b).unwrap();
        let zeta = C64::from_polar(rho, theta);
        let w = k.eval(zeta).unwrap();
        prop_assert!(k.contains(w).unwrap());
        let margin = k.margin(w).unwrap();
        prop_assert!((margin - (1.0 - rho)).abs() < 1e-10);
        // a preimage outside the closed disk maps outside the range
        let outside = zeta / rho * 1.5;
        let w_out = (Complex::new(1.0, 0.0) + outside * a) / (Complex::new(1.0, 0.0) + outside * b);
        prop_assert!(!k.contains(w_out).unwrap());
    }

    #[test]
    fn circle_extrema_bound_samples(
        a in -1.0..0.9f64,
        gap in 0.05..1.0f64,
        r in 0.05..0.95f64,
        theta in 0.0..std::f64::consts::TAU,
    ) {
        let b = (a + gap).min(1.0);
        prop_assume!(a < b);
        let k = Kernel::mobius(a, b).unwrap();
        let (lo, hi) = k.circle_extrema(r).unwrap();
        let v = k.eval(C64::from_polar(r, theta)).unwrap().re;
        prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
    }

    #[test]
    fn closed_growth_matches_quadrature(
        a in -1.0..0.9f64,
        gap in 0.05..1.0f64,
        alpha in 0.0..0.9f64,
        r in 0.05..0.9f64,
    ) {
        let b = (a + gap).min(1.0);
        prop_assume!(a < b);
        let k = Kernel::mobius(a, b).unwrap();
        let (cl, ch) = growth_bounds_closed(a, b, alpha, r).unwrap();
        let (ql, qh) = growth_bounds_quadrature(&k, alpha, r).unwrap();
        prop_assert!((cl - ql).abs() / cl <= 1e-8);
        prop_assert!((ch - qh).abs() / ch <= 1e-8);
    }

    #[test]
    fn tilde_transform_round_trip(
        alpha in 0.0..0.95f64,
        beta in -1.4..1.4f64,
        qre in -3.0..3.0f64,
        qim in -3.0..3.0f64,
    ) {
        let p = ClassParams::new(alpha, beta).unwrap();
        prop_assert_eq!(tilde_transform(c(1.0, 0.0), &p), c(1.0, 0.0));
        let q = c(qre, qim);
        let w = tilde_transform(q, &p);
        prop_assert!((tilde_inverse(w, &p) - q).norm() <= 1e-11 * (1.0 + q.norm()));
    }
}

#[test]
fn second_partials_match_jacobian_differences() {
    // d/dz_j of the Jacobian column equals the second-partials matrix
    let map = HoloMap::builder(2)
        .unwrap()
        .term(0, &[1, 0], c(1.0, 0.0))
        .unwrap()
        .term(0, &[2, 1], c(0.4, -0.3))
        .unwrap()
        .term(1, &[0, 3], c(-0.2, 0.5))
        .unwrap()
        .term(1, &[1, 1], c(0.7, 0.1))
        .unwrap()
        .build();
    let z = CVec(vec![c(0.21, 0.1), c(-0.15, 0.3)]);
    let h = 1e-6;
    for j in 0..2 {
        let m = map.second_partials(&z, j).unwrap();
        let mut zp = z.clone();
        let mut zm = z.clone();
        zp[j] += c(h, 0.0);
        zm[j] -= c(h, 0.0);
        let jp = map.jacobian(&zp).unwrap();
        let jm = map.jacobian(&zm).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                let fd = (jp[(i, k)] - jm[(i, k)]) / c(2.0 * h, 0.0);
                assert!((m[(i, k)] - fd).norm() < 1e-7, "({i},{k}) vs d/dz_{j}");
            }
        }
    }
    let _ = CMatrix::<f64>::identity(2);
}
