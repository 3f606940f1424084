//! Bound evaluators: growth integrals and their closed forms, the four
//! sandwich quantities, coefficient-bound infima, and distortion bounds with
//! their specialized code paths.

use crate::classes::ClassParams;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::quad::adaptive_simpson;
use crate::real::Real;

/// Absolute tolerance of the growth-integral quadrature.
pub const QUAD_ABS_TOL: f64 = 1e-10;

/// Quadrature is evaluated only for alpha <= this guard value.
pub const QUAD_ALPHA_MAX: f64 = 0.99;

/// |T| below this switches the closed forms to their exponential limit.
pub const T_SWITCH: f64 = 1e-12;

fn check_mobius_range<T: Real>(a: T, b: T) -> Result<()> {
    if !(a >= -T::one() && a < b && b <= T::one()) {
        return Err(Error::InvalidParam(format!(
            "require -1 <= A < B <= 1, got A={a}, B={b}"
        )));
    }
    Ok(())
}

fn check_radius<T: Real>(r: T) -> Result<()> {
    if !(r >= T::zero() && r < T::one()) {
        return Err(Error::InvalidParam(format!(
            "radius must lie in [0, 1), got {r}"
        )));
    }
    Ok(())
}

/// T = A - A alpha + B alpha.
pub fn t_param<T: Real>(a: T, b: T, alpha: T) -> T {
    a - a * alpha + b * alpha
}

/// (1 + t r)^{e/t} evaluated as exp(e ln(1+tr)/t), with the limit e^{e r} at t = 0.
fn pow_one_plus<T: Real>(t: T, e: T, r: T) -> T {
    if t.abs() < T::lit(T_SWITCH) {
        (e * r).exp()
    } else {
        (e * (t * r).ln_1p() / t).exp()
    }
}

/// One-sided slopes of (min_re, max_re) at r = 0.
fn extrema_slopes_at_zero<T: Real>(k: &Kernel<T>) -> Result<(T, T)> {
    match k {
        Kernel::Mobius { a, b } => Ok((*a - *b, *b - *a)),
        Kernel::Generic(_) => {
            let diff = |h: T| -> Result<(T, T)> {
                let (mn, mx) = k.circle_extrema(h)?;
                Ok(((mn - T::one()) / h, (mx - T::one()) / h))
            };
            let h = T::lit(1e-5);
            let (m1, x1) = diff(h)?;
            let (m2, x2) = diff(h * T::half())?;
            Ok((T::two() * m2 - m1, T::two() * x2 - x1))
        }
    }
}

/// Closed-form growth bounds (lower, upper) for the Moebius kernel.
pub fn growth_bounds_closed<T: Real>(a: T, b: T, alpha: T, r: T) -> Result<(T, T)> {
    check_mobius_range(a, b)?;
    check_radius(r)?;
    if !(alpha >= T::zero() && alpha < T::one()) {
        return Err(Error::InvalidParam(format!(
            "alpha must lie in [0, 1), got {alpha}"
        )));
    }
    let t = t_param(a, b, alpha);
    if T::one() - t.abs() * r <= T::zero() {
        return Err(Error::InvalidParam("1 - |T| r must stay positive".into()));
    }
    let e = (b - a) * (T::one() - alpha);
    let upper = r * pow_one_plus(t, e, r);
    let lower = r * pow_one_plus(-t, -e, r);
    Ok((lower, upper))
}

/// Growth bounds (lower, upper) by adaptive quadrature of the two integrals,
/// valid for any admissible kernel. The integrand's removable singularity at
/// y = 0 is filled with its analytic limit.
pub fn growth_bounds_quadrature<T: Real>(k: &Kernel<T>, alpha: T, r: T) -> Result<(T, T)> {
    check_radius(r)?;
    if !(alpha >= T::zero() && alpha <= T::lit(QUAD_ALPHA_MAX)) {
        return Err(Error::InvalidParam(format!(
            "quadrature requires alpha in [0, {QUAD_ALPHA_MAX}], got {alpha}"
        )));
    }
    if r == T::zero() {
        return Ok((T::zero(), T::zero()));
    }
    let onema = T::one() - alpha;
    let (slope_min, slope_max) = extrema_slopes_at_zero(k)?;
    let tol = T::lit(QUAD_ABS_TOL);
    let integral = |use_min: bool, limit: T| -> Result<T> {
        let f = move |y: T| -> T {
            if y == T::zero() {
                return limit;
            }
            let (mn, mx) = k.circle_extrema(y).expect("radius stays inside [0, 1)");
            let m = if use_min { mn } else { mx };
            let d = onema * m + alpha;
            (T::one() / d - T::one()) / y
        };
        adaptive_simpson(&f, T::zero(), r, tol)
    };
    let phi2 = r * integral(true, -(onema * slope_min))?.exp();
    let phi1 = r * integral(false, -(onema * slope_max))?.exp();
    Ok((phi1, phi2))
}

/// The four sandwich quantities of the inner-product bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SandwichBounds<T: Real> {
    pub b1: T,
    pub b2: T,
    pub b3: T,
    pub b4: T,
}

/// B1/B2 alone, available for any admissible kernel.
pub fn lemma23_b12<T: Real>(k: &Kernel<T>, p: &ClassParams<T>, r: T) -> Result<(T, T)> {
    check_radius(r)?;
    let (mn, mx) = k.circle_extrema(r)?;
    let onema = T::one() - p.alpha;
    let base = onema * p.cos_beta() * r * r;
    let ratio = p.alpha / onema;
    Ok((base * (mn + ratio), base * (mx + ratio)))
}

/// B1..B4; the modulus bounds B3/B4 exist only for Moebius kernels.
pub fn lemma23_bounds<T: Real>(
    k: &Kernel<T>,
    p: &ClassParams<T>,
    r: T,
) -> Result<SandwichBounds<T>> {
    let (b1, b2) = lemma23_b12(k, p, r)?;
    let (a, b) = k
        .mobius_params()
        .ok_or_else(|| Error::Unsupported("B3/B4 require a Moebius kernel".into()))?;
    let onema = T::one() - p.alpha;
    let base = onema * p.cos_beta() * r * r;
    let rad = (p.alpha * p.alpha + p.tan_beta() * p.tan_beta()).sqrt();
    let b3 = ((T::one() + a * r) / (T::one() + b * r) - rad / onema) * base;
    let b4 = ((T::one() - a * r) / (T::one() - b * r) + rad / onema) * base;
    Ok(SandwichBounds { b1, b2, b3, b4 })
}

/// Coefficient-bound infima and the distinguished-coefficient bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoeffBounds<T: Real> {
    pub a1: T,
    pub a2: T,
    /// (3 sqrt 3 / 2) min(a1, a2).
    pub q_bound: T,
    /// min(a1, a2).
    pub a0: T,
    /// Set when the infimum is not positive (the disk around 1 is empty).
    pub degenerate: bool,
}

const COEFF_SCAN_POINTS: usize = 512;
const COEFF_SCAN_MARGIN: f64 = 1e-4;
const GOLDEN_ITERS: usize = 100;

fn golden_min<T: Real>(f: &dyn Fn(T) -> T, mut lo: T, mut hi: T) -> T {
    let invphi = T::lit(0.6180339887498949);
    let mut c = hi - invphi * (hi - lo);
    let mut d = lo + invphi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..GOLDEN_ITERS {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = f(d);
        }
    }
    let x = (lo + hi) * T::half();
    f(x)
}

/// Scan + golden-section interior infimum over (0, 1), with the two endpoint
/// limits appended; the infimum of these quotients is attained at an endpoint
/// for every Moebius kernel, so the limits are required for exact values.
fn quotient_infimum<T: Real>(f: &dyn Fn(T) -> T, limit_zero: T, limit_one: T) -> T {
    let lo = T::lit(COEFF_SCAN_MARGIN);
    let hi = T::one() - T::lit(COEFF_SCAN_MARGIN);
    let step = (hi - lo) / T::lit((COEFF_SCAN_POINTS - 1) as f64);
    let mut best_i = 0usize;
    let mut best_v = T::infinity();
    for i in 0..COEFF_SCAN_POINTS {
        let x = lo + step * T::lit(i as f64);
        let v = f(x);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let bl = lo + step * T::lit(best_i.saturating_sub(1) as f64);
    let bh = lo + step * T::lit(((best_i + 1).min(COEFF_SCAN_POINTS - 1)) as f64);
    let interior = golden_min(f, bl, bh).min(best_v);
    interior.min(limit_zero).min(limit_one)
}

/// a1, a2 infima over r in (0, 1) and the coefficient bound (3 sqrt 3/2) a0.
pub fn coeff_bound<T: Real>(k: &Kernel<T>, p: &ClassParams<T>) -> Result<CoeffBounds<T>> {
    let alpha = p.alpha;
    let onema = T::one() - alpha;
    let phi1 = |r: T| -> T {
        let (mn, _) = k.circle_extrema(r).expect("radius stays inside [0, 1)");
        (T::one() - (onema * mn + alpha)) / r
    };
    let phi2 = |r: T| -> T {
        let (_, mx) = k.circle_extrema(r).expect("radius stays inside [0, 1)");
        ((onema * mx + alpha) - T::one()) / r
    };
    let (slope_min, slope_max) = extrema_slopes_at_zero(k)?;
    let lim0_a1 = -onema * slope_min;
    let lim0_a2 = onema * slope_max;
    let (lim1_a1, lim1_a2) = match k {
        Kernel::Mobius { a, b } => {
            let g1 = (T::one() + *a) / (T::one() + *b);
            let a1 = T::one() - (onema * g1 + alpha);
            let a2 = if *b < T::one() {
                let gm1 = (T::one() - *a) / (T::one() - *b);
                (onema * gm1 + alpha) - T::one()
            } else {
                T::infinity()
            };
            (a1, a2)
        }
        Kernel::Generic(_) => {
            let r = T::one() - T::lit(1e-9);
            (phi1(r), phi2(r))
        }
    };
    let a1 = quotient_infimum(&phi1, lim0_a1, lim1_a1);
    let a2 = quotient_infimum(&phi2, lim0_a2, lim1_a2);
    let a0 = a1.min(a2);
    let coef = T::lit(1.5) * T::lit(3.0).sqrt();
    Ok(CoeffBounds {
        a1,
        a2,
        q_bound: coef * a0,
        a0,
        degenerate: !(a0 > T::zero()),
    })
}

/// The two distortion factors of the Frechet/determinant bounds.
pub fn distortion_factors<T: Real>(a: T, b: T, p: &ClassParams<T>, r: T) -> Result<(T, T)> {
    check_mobius_range(a, b)?;
    check_radius(r)?;
    let onema = T::one() - p.alpha;
    let cosb = p.cos_beta();
    let rad = (p.alpha * p.alpha + p.tan_beta() * p.tan_beta()).sqrt();
    let f1 = ((T::one() + a * r) / (T::one() + b * r) - rad / onema) * onema * cosb;
    let f2 = ((T::one() - a * r) / (T::one() - b * r) + rad / onema) * onema * cosb;
    Ok((f1, f2))
}

/// Determinant, tangent-action, and unit-vector distortion bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistortionBounds<T: Real> {
    pub det_upper: T,
    pub det_lower: T,
    pub tangent_upper: T,
    pub tangent_lower: T,
    pub unitvec_upper: T,
}

fn lower_parts<T: Real>(a: T, b: T, p: &ClassParams<T>, r: T, n: usize, f2: T) -> (T, T) {
    let t = t_param(a, b, p.alpha);
    let e = (b - a) * (T::one() - p.alpha);
    let rl = pow_one_plus(-t, -e, r);
    let np1h = (T::from_usize(n).unwrap() + T::one()) * T::half();
    (rl.powi(n as i32) * f2.powf(-np1h), rl / f2.sqrt())
}

/// Bounds at the sphere extremal points, assembled from the closed growth
/// forms and the distortion factors. The upper family needs F1 > 0.
pub fn distortion_bounds<T: Real>(
    a: T,
    b: T,
    p: &ClassParams<T>,
    r: T,
    n: usize,
) -> Result<DistortionBounds<T>> {
    if n == 0 {
        return Err(Error::InvalidParam("dimension must be at least 1".into()));
    }
    let (f1, f2) = distortion_factors(a, b, p, r)?;
    if !(f1 > T::zero()) {
        return Err(Error::UpperBoundsUndefined {
            f1: f1.to_f64().unwrap_or(f64::NAN),
        });
    }
    let t = t_param(a, b, p.alpha);
    let e = (b - a) * (T::one() - p.alpha);
    let ru = pow_one_plus(t, e, r);
    let np1h = (T::from_usize(n).unwrap() + T::one()) * T::half();
    let (det_lower, tangent_lower) = lower_parts(a, b, p, r, n, f2);
    Ok(DistortionBounds {
        det_upper: ru.powi(n as i32) * (T::one() / f1).powf(np1h),
        det_lower,
        tangent_upper: ru * (T::one() / f1).sqrt(),
        tangent_lower,
        unitvec_upper: ru / f1,
    })
}

/// Determinant and tangent bounds without the unit-vector quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistortionCore<T: Real> {
    pub det_upper: T,
    pub det_lower: T,
    pub tangent_upper: T,
    pub tangent_lower: T,
}

/// The alpha = beta = 0 specialization, written from its own displays.
pub fn cor35_bounds<T: Real>(a: T, b: T, r: T, n: usize) -> Result<DistortionCore<T>> {
    check_mobius_range(a, b)?;
    check_radius(r)?;
    let nn = T::from_usize(n).unwrap();
    let np1h = (nn + T::one()) * T::half();
    let qu = (T::one() + b * r) / (T::one() + a * r);
    let ql = (T::one() - a * r) / (T::one() - b * r);
    let (gu_n, gu_1, gl_n, gl_1) = if a.abs() > T::lit(T_SWITCH) {
        (
            (T::one() + a * r).powf(nn * (b - a) / a),
            (T::one() + a * r).powf((b - a) / a),
            (T::one() - a * r).powf(nn * (b - a) / a),
            (T::one() - a * r).powf((b - a) / a),
        )
    } else {
        (
            (nn * (b - a) * r).exp(),
            ((b - a) * r).exp(),
            (nn * (a - b) * r).exp(),
            ((a - b) * r).exp(),
        )
    };
    Ok(DistortionCore {
        det_upper: gu_n * qu.powf(np1h),
        det_lower: gl_n * ql.powf(-np1h),
        tangent_upper: gu_1 * qu.sqrt(),
        tangent_lower: gl_1 * ql.powf(-T::half()),
    })
}

/// The order-gamma starlike specialization A = -1, B = 1 - 2 gamma, written
/// from its own displays.
pub fn cor36_bounds<T: Real>(gamma: T, r: T, n: usize) -> Result<DistortionCore<T>> {
    if !(gamma > T::zero() && gamma < T::one()) {
        return Err(Error::InvalidParam(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    check_radius(r)?;
    let nn = T::from_usize(n).unwrap();
    let np1h = (nn + T::one()) * T::half();
    let bb = T::one() - T::two() * gamma;
    let fu = (T::one() - r) / (T::one() + bb * r);
    let fl = (T::one() + r) / (T::one() - bb * r);
    Ok(DistortionCore {
        det_upper: (T::one() - r).powf(T::two() * (gamma - T::one()) * nn) * fu.powf(-np1h),
        det_lower: (T::one() + r).powf(-T::two() * (T::one() - gamma) * nn) * fl.powf(-np1h),
        tangent_upper: (T::one() - r).powf(T::two() * (gamma - T::one())) * fu.powf(-T::half()),
        tangent_lower: (T::one() + r).powf(-T::two() * (T::one() - gamma)) * fl.powf(-T::half()),
    })
}

/// One row of evaluated bound quantities at a radius.
#[derive(Clone, Copy, Debug)]
pub struct BoundReport {
    pub r: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub t: f64,
    pub f1: f64,
    pub f2: f64,
    pub det_upper: f64,
    pub det_lower: f64,
    pub tangent_upper: f64,
    pub tangent_lower: f64,
    pub unitvec_upper: f64,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

pub const BOUND_REPORT_HEADER: &str =
    "r,phi1,phi2,B1,B2,B3,B4,T,F1,F2,det_upper,det_lower,tangent_upper,tangent_lower,unitvec_upper";

impl BoundReport {
    /// Assembles a report row. Moebius-gated columns are NaN for generic
    /// kernels, and the upper distortion family is NaN when F1 <= 0.
    pub fn compute(
        k: &Kernel<f64>,
        p: &ClassParams<f64>,
        n: usize,
        r: f64,
        coeff: Option<&CoeffBounds<f64>>,
    ) -> Result<BoundReport> {
        check_radius(r)?;
        let cb = match coeff {
            Some(c) => *c,
            None => coeff_bound(k, p)?,
        };
        let (b1, b2) = if r == 0.0 {
            (0.0, 0.0)
        } else {
            lemma23_b12(k, p, r)?
        };
        match k.mobius_params() {
            Some((a, b)) => {
                let (phi1, phi2) = if r == 0.0 {
                    (0.0, 0.0)
                } else {
                    growth_bounds_closed(a, b, p.alpha, r)?
                };
                let sw = lemma23_bounds(k, p, r)?;
                let (f1, f2) = distortion_factors(a, b, p, r)?;
                let (det_upper, tangent_upper, unitvec_upper, det_lower, tangent_lower) =
                    if f1 > 0.0 {
                        let d = distortion_bounds(a, b, p, r, n)?;
                        (
                            d.det_upper,
                            d.tangent_upper,
                            d.unitvec_upper,
                            d.det_lower,
                            d.tangent_lower,
                        )
                    } else {
                        let (dl, tl) = lower_parts(a, b, p, r, n, f2);
                        (f64::NAN, f64::NAN, f64::NAN, dl, tl)
                    };
                Ok(BoundReport {
                    r,
                    phi1,
                    phi2,
                    b1: sw.b1,
                    b2: sw.b2,
                    b3: sw.b3,
                    b4: sw.b4,
                    t: t_param(a, b, p.alpha),
                    f1,
                    f2,
                    det_upper,
                    det_lower,
                    tangent_upper,
                    tangent_lower,
                    unitvec_upper,
                    a0: cb.a0,
                    a1: cb.a1,
                    a2: cb.a2,
                })
            }
            None => {
                let (phi1, phi2) = growth_bounds_quadrature(k, p.alpha, r)?;
                Ok(BoundReport {
                    r,
                    phi1,
                    phi2,
                    b1,
                    b2,
                    b3: f64::NAN,
                    b4: f64::NAN,
                    t: f64::NAN,
                    f1: f64::NAN,
                    f2: f64::NAN,
                    det_upper: f64::NAN,
                    det_lower: f64::NAN,
                    tangent_upper: f64::NAN,
                    tangent_lower: f64::NAN,
                    unitvec_upper: f64::NAN,
                    a0: cb.a0,
                    a1: cb.a1,
                    a2: cb.a2,
                })
            }
        }
    }

    pub fn csv_row(&self) -> String {
        use crate::report::fmt_g17 as g;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            g(self.r),
            g(self.phi1),
            g(self.phi2),
            g(self.b1),
            g(self.b2),
            g(self.b3),
            g(self.b4),
            g(self.t),
            g(self.f1),
            g(self.f2),
            g(self.det_upper),
            g(self.det_lower),
            g(self.tangent_upper),
            g(self.tangent_lower),
            g(self.unitvec_upper),
        )
    }
}
