//! Sampling harness: deterministic sphere samples, holomorphic tangent frames,
//! heuristic sphere-extremum search, and boundary-contact quantities.

use crate::error::{Error, Result};
use crate::linalg::CVec;
use crate::map::BallMap;
use crate::real::C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One deterministic point on the sphere ||z|| = r, by normalizing a complex
/// Gaussian vector; the stream depends only on (seed, index).
pub fn sphere_point(n: usize, r: f64, seed: u64, index: u64) -> CVec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(
        splitmix64(seed) ^ splitmix64(index.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1)),
    );
    loop {
        let mut v = CVec::zero(n);
        for i in 0..n {
            let u1: f64 = 1.0 - rng.gen::<f64>();
            let u2: f64 = rng.gen();
            let mag = (-2.0 * u1.ln()).sqrt();
            let ang = 2.0 * std::f64::consts::PI * u2;
            v[i] = C::new(mag * ang.cos(), mag * ang.sin());
        }
        let norm = v.norm();
        if norm > 1e-12 {
            return v.scale(C::new(r / norm, 0.0));
        }
    }
}

/// `count` deterministic points on the sphere ||z|| = r.
pub fn sphere_sample(n: usize, r: f64, count: usize, seed: u64) -> Result<Vec<CVec<f64>>> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParam(
            "sample radius must lie in (0, 1)".into(),
        ));
    }
    Ok((0..count)
        .map(|i| sphere_point(n, r, seed, i as u64))
        .collect())
}

/// Orthonormal basis of the holomorphic tangent space {w : <w, z> = 0},
/// built by Gram-Schmidt against z/||z||.
pub fn tangent_frame(z: &CVec<f64>) -> Result<Vec<CVec<f64>>> {
    let n = z.dim();
    let nz = z.norm();
    if nz == 0.0 {
        return Err(Error::InvalidParam(
            "tangent frame is undefined at z = 0".into(),
        ));
    }
    let mut basis: Vec<CVec<f64>> = vec![z.scale(C::new(1.0 / nz, 0.0))];
    for j in 0..n {
        if basis.len() == n {
            break;
        }
        let mut w = CVec::zero(n);
        w[j] = C::new(1.0, 0.0);
        for b in &basis {
            let coeff = w.inner(b)?;
            w = w.sub(&b.scale(coeff));
        }
        let nw = w.norm();
        if nw > 1e-8 {
            basis.push(w.scale(C::new(1.0 / nw, 0.0)));
        }
    }
    Ok(basis.split_off(1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremumMode {
    Max,
    Min,
}

/// Best of `budget` seeded sphere samples, refined by 200 steps of projected
/// coordinate ascent/descent with a step of 1e-3 decaying by 0.7 on failure.
pub fn sphere_extremum(
    map: &dyn BallMap,
    r: f64,
    mode: ExtremumMode,
    budget: usize,
    seed: u64,
) -> Result<(CVec<f64>, f64)> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParam(
            "extremum radius must lie in (0, 1)".into(),
        ));
    }
    if budget == 0 {
        return Err(Error::InvalidParam(
            "extremum search needs a positive budget".into(),
        ));
    }
    let n = map.dim();
    let better = |a: f64, b: f64| match mode {
        ExtremumMode::Max => a > b,
        ExtremumMode::Min => a < b,
    };
    let objective = |z: &CVec<f64>| -> Result<f64> { Ok(map.eval(z)?.norm()) };
    let mut best = sphere_point(n, r, seed, 0);
    let mut best_v = objective(&best)?;
    for i in 1..budget {
        let z = sphere_point(n, r, seed, i as u64);
        let v = objective(&z)?;
        if better(v, best_v) {
            best = z;
            best_v = v;
        }
    }
    let mut step = 1e-3;
    for _ in 0..200 {
        let mut improved = false;
        for coord in 0..(2 * n) {
            for sgn in [1.0, -1.0] {
                let mut y = best.clone();
                let delta = step * sgn;
                let i = coord / 2;
                if coord % 2 == 0 {
                    y[i] += C::new(delta, 0.0);
                } else {
                    y[i] += C::new(0.0, delta);
                }
                let ny = y.norm();
                if ny < 1e-12 {
                    continue;
                }
                let y = y.scale(C::new(r / ny, 0.0));
                let v = objective(&y)?;
                if better(v, best_v) {
                    best = y;
                    best_v = v;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.7;
        }
    }
    Ok((best, best_v))
}

/// Local polish of an extremal point: projected coordinate descent with a
/// fixed-step cascade from 1e-4 down to 1e-13. Contact quantities are
/// first-order sensitive to the position, so the heuristic search result is
/// sharpened before they are evaluated.
pub fn polish_extremum(
    map: &dyn BallMap,
    start: &CVec<f64>,
    r: f64,
    mode: ExtremumMode,
) -> Result<(CVec<f64>, f64)> {
    let n = map.dim();
    let better = |a: f64, b: f64| match mode {
        ExtremumMode::Max => a > b,
        ExtremumMode::Min => a < b,
    };
    let objective = |z: &CVec<f64>| -> Result<f64> { Ok(map.eval(z)?.norm()) };
    let mut best = start.clone();
    let mut best_v = objective(&best)?;
    let mut step = 1e-4;
    while step > 1e-13 {
        for _sweep in 0..50 {
            let mut improved = false;
            for coord in 0..(2 * n) {
                for sgn in [1.0, -1.0] {
                    let mut y = best.clone();
                    let i = coord / 2;
                    if coord % 2 == 0 {
                        y[i] += C::new(step * sgn, 0.0);
                    } else {
                        y[i] += C::new(0.0, step * sgn);
                    }
                    let ny = y.norm();
                    if ny < 1e-12 {
                        continue;
                    }
                    let y = y.scale(C::new(r / ny, 0.0));
                    let v = objective(&y)?;
                    if better(v, best_v) {
                        best = y;
                        best_v = v;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        step *= 0.1;
    }
    Ok((best, best_v))
}

/// Boundary-contact data at a sphere point of a rescaled self-map.
#[derive(Clone, Debug)]
pub struct BoundaryData {
    pub z0: CVec<f64>,
    pub w0: CVec<f64>,
    /// Re of the contact coefficient conj(w0)' J_g(z0) z0.
    pub lambda: f64,
    pub lambda_imag_residual: f64,
    /// min over the tangent frame of sqrt(lambda) - ||J_g(z0) delta||.
    pub tangent_slack: f64,
    /// lambda^{(n+1)/2} - |det J_g(z0)|.
    pub det_slack: f64,
}

const BOUNDARY_NORM_TOL: f64 = 1e-9;

/// Computes the contact coefficient lambda and the slacks of the two
/// boundary inequalities. The caller supplies the already-rescaled map, so
/// that both z0 and g(z0) lie on the unit sphere.
pub fn boundary_lambda(gmap: &dyn BallMap, z0: &CVec<f64>) -> Result<BoundaryData> {
    let dev_in = (z0.norm() - 1.0).abs();
    if dev_in > BOUNDARY_NORM_TOL {
        return Err(Error::NotBoundaryPoint { deviation: dev_in });
    }
    let w0 = gmap.eval(z0)?;
    let dev_out = (w0.norm() - 1.0).abs();
    if dev_out > BOUNDARY_NORM_TOL {
        return Err(Error::NotBoundaryPoint { deviation: dev_out });
    }
    let j = gmap.jacobian(z0)?;
    let contact = j.mul_vec(z0)?.inner(&w0)?;
    let lambda = contact.re;
    let sqrt_lambda = lambda.max(0.0).sqrt();
    let mut tangent_slack = f64::INFINITY;
    for delta in tangent_frame(z0)? {
        let image = j.mul_vec(&delta)?;
        tangent_slack = tangent_slack.min(sqrt_lambda - image.norm());
    }
    let n = z0.dim();
    let det = match j.lu() {
        Ok(lu) => lu.det(),
        Err(_) => C::new(0.0, 0.0),
    };
    let det_slack = lambda.max(0.0).powf((n as f64 + 1.0) / 2.0) - det.norm();
    Ok(BoundaryData {
        z0: z0.clone(),
        w0,
        lambda,
        lambda_imag_residual: contact.im.abs(),
        tangent_slack,
        det_slack,
    })
}

/// A fixed rescaling of a map: w -> f(r w)/m, used to place sphere extrema on
/// the unit sphere before the boundary-contact computation.
pub struct RescaledMap<'a> {
    pub inner: &'a dyn BallMap,
    pub r: f64,
    pub m: f64,
}

impl<'a> BallMap for RescaledMap<'a> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, z: &CVec<f64>) -> Result<CVec<f64>> {
        let v = self.inner.eval(&z.scale(C::new(self.r, 0.0)))?;
        Ok(v.scale(C::new(1.0 / self.m, 0.0)))
    }

    fn jacobian(&self, z: &CVec<f64>) -> Result<crate::linalg::CMatrix<f64>> {
        let mut j = self.inner.jacobian(&z.scale(C::new(self.r, 0.0)))?;
        let s = C::new(self.r / self.m, 0.0);
        let n = j.dim();
        for i in 0..n {
            for k in 0..n {
                j[(i, k)] *= s;
            }
        }
        Ok(j)
    }

    fn is_normalized(&self) -> bool {
        false
    }
}
