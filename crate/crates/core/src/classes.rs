//! Membership machinery for the Caratheodory-type classes and the starlike-type
//! mapping classes, plus the shearing extraction and certified 1-D generators.

use crate::error::{Error, Result};
use crate::func1d::{Func1D, PowerSeries};
use crate::holomap::HoloMap;
use crate::kernel::Kernel;
use crate::linalg::{CMatrix, CVec};
use crate::map::BallMap;
use crate::real::{Real, C};
use crate::verify::sphere_point;
use serde::{Deserialize, Serialize};

/// Worst-margin tolerance below which a sampled subject is declared a non-member.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// The class parameters (alpha, beta) with alpha in [0,1), beta in (-pi/2, pi/2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassParams<T: Real> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> ClassParams<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        if !(alpha >= T::zero() && alpha < T::one()) {
            return Err(Error::InvalidParam(format!(
                "alpha must lie in [0, 1), got {alpha}"
            )));
        }
        let half_pi = T::FRAC_PI_2();
        if !(beta > -half_pi && beta < half_pi) {
            return Err(Error::InvalidParam(format!(
                "beta must lie in (-pi/2, pi/2), got {beta}"
            )));
        }
        Ok(ClassParams { alpha, beta })
    }

    pub fn zero() -> Self {
        ClassParams {
            alpha: T::zero(),
            beta: T::zero(),
        }
    }

    pub fn tan_beta(&self) -> T {
        self.beta.tan()
    }

    pub fn cos_beta(&self) -> T {
        self.beta.cos()
    }
}

/// w = (-alpha + i tan beta)/(1-alpha) + ((1 - i tan beta)/(1-alpha)) q, written
/// as 1 + scale (q - 1) so that q = 1 is an exact fixed point.
pub fn tilde_transform<T: Real>(q: C<T>, p: &ClassParams<T>) -> C<T> {
    let one = C::new(T::one(), T::zero());
    let scale = C::new(T::one(), -p.tan_beta()) / (T::one() - p.alpha);
    one + scale * (q - one)
}

/// Inverse of `tilde_transform` in its q slot.
pub fn tilde_inverse<T: Real>(w: C<T>, p: &ClassParams<T>) -> C<T> {
    let one = C::new(T::one(), T::zero());
    let scale = C::new(T::one(), -p.tan_beta()) / (T::one() - p.alpha);
    one + (w - one) / scale
}

/// <h(z), z> / ||z||^2 for a polynomial field h.
pub fn q_value<T: Real>(h: &HoloMap<T>, z: &CVec<T>) -> Result<C<T>> {
    let nsq = z.norm_sqr();
    if nsq == T::zero() {
        return Err(Error::InvalidParam("q_value is undefined at z = 0".into()));
    }
    if nsq >= T::one() {
        return Err(Error::InvalidParam("q_value requires ||z|| < 1".into()));
    }
    Ok(h.eval(z)?.inner(z)? / nsq)
}

/// Class-membership modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    M,
    MG,
    MTilde,
    SHat,
    SGStar,
    Spirallike,
    AlmostStarlike,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "m" => Ok(Mode::M),
            "m_g" => Ok(Mode::MG),
            "m_tilde" => Ok(Mode::MTilde),
            "s_hat" => Ok(Mode::SHat),
            "s_g_star" => Ok(Mode::SGStar),
            "spirallike" => Ok(Mode::Spirallike),
            "almost_starlike" => Ok(Mode::AlmostStarlike),
            other => Err(Error::InvalidParam(format!("unknown mode '{other}'"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::M => "m",
            Mode::MG => "m_g",
            Mode::MTilde => "m_tilde",
            Mode::SHat => "s_hat",
            Mode::SGStar => "s_g_star",
            Mode::Spirallike => "spirallike",
            Mode::AlmostStarlike => "almost_starlike",
        }
    }

    /// The subject is a vector field (h itself) rather than a mapping to invert.
    fn is_field_mode(&self) -> bool {
        matches!(self, Mode::M | Mode::MG | Mode::MTilde)
    }

    /// Effective (alpha, beta) used by the tilde transform for this mode.
    fn effective_params(&self, p: &ClassParams<f64>) -> ClassParams<f64> {
        match self {
            Mode::M | Mode::MG | Mode::SGStar => ClassParams::zero(),
            Mode::AlmostStarlike => ClassParams {
                alpha: p.alpha,
                beta: 0.0,
            },
            Mode::Spirallike => ClassParams {
                alpha: 0.0,
                beta: p.beta,
            },
            Mode::MTilde | Mode::SHat => *p,
        }
    }
}

/// Deterministic sampling plan: geometric radii times seeded unit directions.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplePlan {
    pub radii: usize,
    pub dirs: usize,
    pub rmin: f64,
    pub rmax: f64,
    pub seed: u64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            radii: 24,
            dirs: 200,
            rmin: 0.05,
            rmax: 0.95,
            seed: 0xba11_5eed,
        }
    }
}

impl SamplePlan {
    pub fn validate(&self) -> Result<()> {
        if self.radii == 0 || self.dirs == 0 {
            return Err(Error::InvalidParam(
                "sample plan needs at least one radius and direction".into(),
            ));
        }
        if !(self.rmin > 0.0 && self.rmin <= self.rmax && self.rmax < 1.0) {
            return Err(Error::InvalidParam(
                "sample radii must satisfy 0 < rmin <= rmax < 1".into(),
            ));
        }
        Ok(())
    }

    pub fn radius_grid(&self) -> Vec<f64> {
        if self.radii == 1 {
            return vec![self.rmin];
        }
        let ratio = self.rmax / self.rmin;
        (0..self.radii)
            .map(|i| self.rmin * ratio.powf(i as f64 / (self.radii - 1) as f64))
            .collect()
    }
}

/// Outcome of a sampled membership test.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub member: bool,
    pub worst_margin: f64,
    pub witness: CVec<f64>,
    pub samples_used: usize,
}

impl Verdict {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "member": self.member,
            "worst_margin": self.worst_margin,
            "witness": self.witness.0.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "samples_used": self.samples_used,
        })
    }
}

/// Samples the defining quantity of the requested class over the plan grid and
/// returns the worst signed margin together with its witness point.
///
/// Normalization (h(0) = 0, J(0) = I) is one of the class conditions: a
/// non-normalized subject is still sampled but can never be a member.
pub fn membership_verdict(
    subject: &dyn BallMap,
    mode: Mode,
    kernel: &Kernel<f64>,
    params: &ClassParams<f64>,
    plan: &SamplePlan,
) -> Result<Verdict> {
    plan.validate()?;
    let normalized = subject.is_normalized();
    let n = subject.dim();
    let eff = mode.effective_params(params);
    let mut worst = f64::INFINITY;
    let mut witness = CVec::zero(n);
    let mut samples = 0usize;
    for (ri, r) in plan.radius_grid().into_iter().enumerate() {
        for di in 0..plan.dirs {
            let z = sphere_point(n, r, plan.seed, (ri * plan.dirs + di) as u64);
            let value = subject.eval(&z)?;
            let h = if mode.is_field_mode() {
                value
            } else {
                subject.solve_jacobian(&z, &value)?
            };
            let q = h.inner(&z)? / z.norm_sqr();
            let margin = match mode {
                Mode::M => q.re,
                _ => kernel.margin(tilde_transform(q, &eff))?,
            };
            samples += 1;
            if margin < worst {
                worst = margin;
                witness = z;
            }
        }
    }
    Ok(Verdict {
        member: normalized && worst >= -MEMBERSHIP_TOL,
        worst_margin: worst,
        witness,
        samples_used: samples,
    })
}

/// The sheared truncation (rho z1 + q z2^2, sigma z2) of a two-dimensional field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShearedMap {
    pub rho: C<f64>,
    pub sigma: C<f64>,
    pub q: C<f64>,
}

impl ShearedMap {
    pub fn as_holomap(&self) -> HoloMap<f64> {
        HoloMap::sheared(self.rho, self.q, self.sigma)
    }
}

const SHEAR_SHAPE_TOL: f64 = 1e-12;

/// Extracts (rho, sigma, q^1_{0,2}) from a coefficient table of the shape
/// (rho z1 + q z2^2 + higher, sigma z2 + higher).
pub fn shearing(h: &HoloMap<f64>) -> Result<ShearedMap> {
    if h.dim() != 2 {
        return Err(Error::InvalidParam("shearing is defined for n = 2".into()));
    }
    if h.coefficient(0, &[0, 0]).norm() > SHEAR_SHAPE_TOL
        || h.coefficient(1, &[0, 0]).norm() > SHEAR_SHAPE_TOL
    {
        return Err(Error::ShapeViolation("constant term must vanish".into()));
    }
    let rho = h.coefficient(0, &[1, 0]);
    let sigma = h.coefficient(1, &[0, 1]);
    if rho.norm() <= SHEAR_SHAPE_TOL || sigma.norm() <= SHEAR_SHAPE_TOL {
        return Err(Error::ShapeViolation(
            "diagonal linear part must be nonzero".into(),
        ));
    }
    if h.coefficient(0, &[0, 1]).norm() > SHEAR_SHAPE_TOL {
        return Err(Error::ShapeViolation(
            "component 1 must have no linear z2 term".into(),
        ));
    }
    if h.coefficient(1, &[1, 0]).norm() > SHEAR_SHAPE_TOL {
        return Err(Error::ShapeViolation(
            "component 2 must have no linear z1 term".into(),
        ));
    }
    Ok(ShearedMap {
        rho,
        sigma,
        q: h.coefficient(0, &[0, 2]),
    })
}

/// Number of circle samples used to extract Taylor coefficients of a generic
/// kernel's reciprocal. The extraction radius sits close to 1: the rounding
/// noise of coefficient k scales like eps/radius^k, so a small radius would
/// drown every coefficient beyond k ~ 20.
const CAUCHY_SAMPLES: usize = 2048;
const CAUCHY_RADIUS: f64 = 0.97;

/// Builds the truncated series of f(z) = z exp( int_0^z (1/g(cu) - 1) du/u ).
///
/// By construction f(z)/(z f'(z)) = g(cz), which lies in g(D) for |c| <= 1, so
/// the output is a 1-D g-starlike generator up to truncation.
pub fn synth_gstarlike_1d(k: &Kernel<f64>, c: C<f64>, degree: usize) -> Result<Func1D<f64>> {
    if c.norm() > 1.0 + 1e-14 {
        return Err(Error::InvalidParam("require |c| <= 1".into()));
    }
    if degree < 1 {
        return Err(Error::InvalidParam(
            "series degree must be at least 1".into(),
        ));
    }
    // Coefficients s_k of t(u) = 1/g(cu) - 1.
    let mut s = vec![C::new(0.0, 0.0); degree + 1];
    match k {
        Kernel::Mobius { a, b } => {
            // (1+Bu)/(1+Au) - 1 = (B-A) u sum_j (-Au)^j
            let mut pow = C::new(1.0, 0.0);
            for k_idx in 1..=degree {
                s[k_idx] = (c * (b - a)) * pow;
                pow *= -c * *a;
            }
        }
        Kernel::Generic(_) => {
            // Taylor coefficients by discrete Cauchy sums on |u| = 1/2.
            let kappa = |u: C<f64>| -> Result<C<f64>> {
                Ok(C::new(1.0, 0.0) / k.eval(c * u)? - C::new(1.0, 0.0))
            };
            let mut vals = Vec::with_capacity(CAUCHY_SAMPLES);
            for j in 0..CAUCHY_SAMPLES {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / CAUCHY_SAMPLES as f64;
                vals.push(kappa(C::from_polar(CAUCHY_RADIUS, theta))?);
            }
            for (k_idx, slot) in s.iter_mut().enumerate().take(degree + 1).skip(1) {
                let mut acc = crate::real::NeumaierC::new();
                for (j, v) in vals.iter().enumerate() {
                    let theta = -2.0 * std::f64::consts::PI * (j * k_idx % CAUCHY_SAMPLES) as f64
                        / CAUCHY_SAMPLES as f64;
                    acc.add(*v * C::from_polar(1.0, theta));
                }
                *slot = acc.value() / (CAUCHY_SAMPLES as f64 * CAUCHY_RADIUS.powi(k_idx as i32));
            }
        }
    }
    // W = int t(u)/u du has coefficients s_k / k; f = z exp(W).
    let mut w = vec![C::new(0.0, 0.0); degree];
    for (k_idx, wk) in w.iter_mut().enumerate().skip(1) {
        *wk = s[k_idx] / k_idx as f64;
    }
    let f = PowerSeries::new(w).exp_trunc(degree - 1)?.shift_up();
    Ok(Func1D::Series(f))
}

/// A certified member of the tilde class: h(z) = z psi(z1) with
/// tilde(psi(z1)) = g(c z1) by construction.
#[derive(Clone, Debug)]
pub struct CertifiedField {
    pub n: usize,
    pub kernel: Kernel<f64>,
    pub c: C<f64>,
    pub params: ClassParams<f64>,
}

impl CertifiedField {
    pub fn new(n: usize, kernel: Kernel<f64>, c: C<f64>, params: ClassParams<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParam("dimension must be at least 1".into()));
        }
        if c.norm() > 1.0 + 1e-14 {
            return Err(Error::InvalidParam("require |c| <= 1".into()));
        }
        Ok(CertifiedField {
            n,
            kernel,
            c,
            params,
        })
    }

    fn psi(&self, z1: C<f64>) -> Result<C<f64>> {
        Ok(tilde_inverse(self.kernel.eval(self.c * z1)?, &self.params))
    }
}

impl BallMap for CertifiedField {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, z: &CVec<f64>) -> Result<CVec<f64>> {
        let psi = self.psi(z[0])?;
        Ok(z.scale(psi))
    }

    fn jacobian(&self, z: &CVec<f64>) -> Result<CMatrix<f64>> {
        let psi = self.psi(z[0])?;
        // d/dz1 psi = g'(c z1) c / scale
        let h = 1e-6;
        let dpsi = (self.psi(z[0] + C::new(h, 0.0))? - self.psi(z[0] - C::new(h, 0.0))?)
            / C::new(2.0 * h, 0.0);
        let mut m = CMatrix::zero(self.n);
        for i in 0..self.n {
            m[(i, i)] = psi;
            m[(i, 0)] += z[i] * dpsi;
        }
        Ok(m)
    }

    fn is_normalized(&self) -> bool {
        true
    }
}
