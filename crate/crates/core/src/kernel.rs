//! The disk function g: evaluation, real-part extrema on circles, and
//! range membership with a conformally natural margin.

use crate::error::{Error, Result};
use crate::real::{Real, C};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Points per circle when extrema of a generic kernel are sampled.
pub const GENERIC_EXTREMA_SAMPLES: usize = 2048;

/// Newton restarts on a disk grid for generic range inversion.
const INVERSION_RESTARTS_RADII: usize = 8;
const INVERSION_RESTARTS_ANGLES: usize = 8;

type EvalFn<T> = dyn Fn(C<T>) -> C<T> + Send + Sync;
type ExtremaFn<T> = dyn Fn(T) -> (T, T) + Send + Sync;

/// A kernel supplied by callbacks rather than a closed form.
pub struct GenericKernel<T: Real> {
    pub name: String,
    eval: Arc<EvalFn<T>>,
    deriv: Option<Arc<EvalFn<T>>>,
    extrema: Option<Arc<ExtremaFn<T>>>,
}

impl<T: Real> GenericKernel<T> {
    pub fn new(
        name: impl Into<String>,
        eval: Arc<EvalFn<T>>,
        deriv: Option<Arc<EvalFn<T>>>,
        extrema: Option<Arc<ExtremaFn<T>>>,
    ) -> Self {
        GenericKernel {
            name: name.into(),
            eval,
            deriv,
            extrema,
        }
    }
}

/// The disk function g of the class definitions: g(0) = 1, real coefficients,
/// positive real part, and circle extrema attained at the two real points.
#[derive(Clone)]
pub enum Kernel<T: Real> {
    /// g(zeta) = (1 + A zeta)/(1 + B zeta) with -1 <= A < B <= 1.
    Mobius {
        a: T,
        b: T,
    },
    Generic(Arc<GenericKernel<T>>),
}

impl<T: Real> std::fmt::Debug for Kernel<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kernel::Mobius { a, b } => write!(f, "Mobius(A={a}, B={b})"),
            Kernel::Generic(g) => write!(f, "Generic({})", g.name),
        }
    }
}

impl<T: Real> Kernel<T> {
    pub fn mobius(a: T, b: T) -> Result<Self> {
        if !(a >= -T::one() && a < b && b <= T::one()) {
            return Err(Error::InvalidParam(format!(
                "Moebius kernel requires -1 <= A < B <= 1, got A={a}, B={b}"
            )));
        }
        Ok(Kernel::Mobius { a, b })
    }

    pub fn is_mobius(&self) -> bool {
        matches!(self, Kernel::Mobius { .. })
    }

    pub fn mobius_params(&self) -> Option<(T, T)> {
        match self {
            Kernel::Mobius { a, b } => Some((*a, *b)),
            Kernel::Generic(_) => None,
        }
    }

    /// g(zeta) for |zeta| < 1.
    pub fn eval(&self, zeta: C<T>) -> Result<C<T>> {
        if zeta.norm() >= T::one() {
            return Err(Error::InvalidParam(
                "kernel argument must satisfy |zeta| < 1".into(),
            ));
        }
        Ok(self.eval_unchecked(zeta))
    }

    fn eval_unchecked(&self, zeta: C<T>) -> C<T> {
        match self {
            Kernel::Mobius { a, b } => {
                let one = C::new(T::one(), T::zero());
                (one + zeta * *a) / (one + zeta * *b)
            }
            Kernel::Generic(g) => (g.eval)(zeta),
        }
    }

    fn deriv(&self, zeta: C<T>) -> C<T> {
        match self {
            Kernel::Mobius { a, b } => {
                let one = C::new(T::one(), T::zero());
                let den = one + zeta * *b;
                C::new(*a - *b, T::zero()) / (den * den)
            }
            Kernel::Generic(g) => {
                if let Some(d) = &g.deriv {
                    d(zeta)
                } else {
                    let h = T::lit(1e-6);
                    ((g.eval)(zeta + C::new(h, T::zero())) - (g.eval)(zeta - C::new(h, T::zero())))
                        / C::new(h * T::two(), T::zero())
                }
            }
        }
    }

    /// (min, max) of Re g on the circle |zeta| = r.
    ///
    /// For a Moebius kernel with A < B the restriction of g to (-1, 1) is
    /// decreasing, so the pair is (g(r), g(-r)). Generic kernels use their
    /// extrema callback, or a 2048-point circle sample.
    pub fn circle_extrema(&self, r: T) -> Result<(T, T)> {
        if !(r >= T::zero() && r < T::one()) {
            return Err(Error::InvalidParam(
                "circle radius must lie in [0, 1)".into(),
            ));
        }
        if r == T::zero() {
            return Ok((T::one(), T::one()));
        }
        match self {
            Kernel::Mobius { a, b } => {
                let g = |x: T| (T::one() + *a * x) / (T::one() + *b * x);
                Ok((g(r), g(-r)))
            }
            Kernel::Generic(gk) => {
                if let Some(f) = &gk.extrema {
                    Ok(f(r))
                } else {
                    let mut lo = T::infinity();
                    let mut hi = T::neg_infinity();
                    for j in 0..GENERIC_EXTREMA_SAMPLES {
                        let theta = T::lit(j as f64) * T::lit(2.0) * T::PI()
                            / T::lit(GENERIC_EXTREMA_SAMPLES as f64);
                        let v = (gk.eval)(C::from_polar(r, theta)).re;
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                    Ok((lo, hi))
                }
            }
        }
    }

    /// Signed margin of w into g(D): positive inside, negative outside.
    ///
    /// Moebius kernels use the modulus of the preimage, margin = 1 - |zeta(w)|
    /// with zeta(w) = (1 - w)/(w B - A). Generic kernels invert numerically by
    /// Newton from a grid of restarts; an indeterminate search is an error.
    pub fn margin(&self, w: C<T>) -> Result<T> {
        match self {
            Kernel::Mobius { a, b } => {
                let one = C::new(T::one(), T::zero());
                let den = w * *b - C::new(*a, T::zero());
                if den.norm() == T::zero() {
                    return Ok(T::neg_infinity());
                }
                Ok(T::one() - ((one - w) / den).norm())
            }
            Kernel::Generic(_) => {
                let tol = T::lit(1e-10);
                let mut best: Option<T> = None;
                for ir in 0..INVERSION_RESTARTS_RADII {
                    for ia in 0..INVERSION_RESTARTS_ANGLES {
                        let rho =
                            T::lit((ir as f64) / INVERSION_RESTARTS_RADII as f64) * T::lit(0.95);
                        let theta = T::lit(2.0) * T::PI() * T::lit(ia as f64)
                            / T::lit(INVERSION_RESTARTS_ANGLES as f64);
                        let mut zeta = C::from_polar(rho, theta);
                        for _ in 0..50 {
                            if zeta.norm() >= T::one() {
                                break;
                            }
                            let fv = self.eval_unchecked(zeta) - w;
                            if fv.norm() <= T::lit(1e-13) {
                                break;
                            }
                            let dv = self.deriv(zeta);
                            if dv.norm() < T::lit(1e-14) {
                                break;
                            }
                            zeta -= fv / dv;
                        }
                        if zeta.norm() < T::one() && (self.eval_unchecked(zeta) - w).norm() <= tol {
                            let m = T::one() - zeta.norm();
                            best = Some(match best {
                                Some(p) => p.max(m),
                                None => m,
                            });
                        }
                    }
                }
                best.ok_or(Error::NoConvergence)
            }
        }
    }

    /// w in g(D)?
    pub fn contains(&self, w: C<T>) -> Result<bool> {
        Ok(self.margin(w)? > T::zero())
    }

    /// Sampling check of the defining axioms: g(0) = 1, real coefficients
    /// (conjugate symmetry), positive real part, and circle extrema attained
    /// at the two real points. A necessary-condition check only.
    pub fn check_axioms(&self, circles: usize, samples: usize, slack: T) -> Result<()> {
        let at_zero = self.eval_unchecked(C::new(T::zero(), T::zero()));
        if (at_zero - C::new(T::one(), T::zero())).norm() > T::lit(1e-12) {
            return Err(Error::InvalidParam("kernel must satisfy g(0) = 1".into()));
        }
        for ic in 1..=circles {
            let r = T::lit(ic as f64 / (circles as f64 + 1.0)) * T::lit(0.98);
            let (lo, hi) = self.circle_extrema(r)?;
            for j in 0..samples {
                let theta = T::lit(2.0) * T::PI() * T::lit(j as f64) / T::lit(samples as f64);
                let zeta = C::from_polar(r, theta);
                let v = self.eval_unchecked(zeta);
                let vc = self.eval_unchecked(zeta.conj());
                if (vc - v.conj()).norm() > T::lit(1e-10) {
                    return Err(Error::InvalidParam(
                        "kernel lacks conjugate symmetry".into(),
                    ));
                }
                if v.re <= T::zero() {
                    return Err(Error::InvalidParam(
                        "kernel real part is not positive".into(),
                    ));
                }
                if v.re < lo - slack || v.re > hi + slack {
                    return Err(Error::InvalidParam(
                        "kernel circle extrema are not attained at the real points".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Named generic kernels resolvable from JSON and the CLI.
pub fn registry(name: &str) -> Option<Kernel<f64>> {
    match name {
        // g = 1 + zeta/2: univalent, positive real part, extrema at the real axis.
        "linear" => Some(Kernel::Generic(Arc::new(GenericKernel::new(
            "linear",
            Arc::new(|z: C<f64>| C::new(1.0, 0.0) + z * 0.5),
            Some(Arc::new(|_z: C<f64>| C::new(0.5, 0.0))),
            Some(Arc::new(|r: f64| (1.0 - 0.5 * r, 1.0 + 0.5 * r))),
        )))),
        // g = 1 + zeta/2 + zeta^2/8: the circle-extrema property holds because the
        // quadratic in cos(theta) has its vertex outside [-1, 1] for every r < 1.
        "quad" => Some(Kernel::Generic(Arc::new(GenericKernel::new(
            "quad",
            Arc::new(|z: C<f64>| C::new(1.0, 0.0) + z * 0.5 + z * z * 0.125),
            Some(Arc::new(|z: C<f64>| C::new(0.5, 0.0) + z * 0.25)),
            Some(Arc::new(|r: f64| {
                (1.0 - 0.5 * r + 0.125 * r * r, 1.0 + 0.5 * r + 0.125 * r * r)
            })),
        )))),
        // Same map with sampled extrema, for exercising the fallback path.
        "quad-sampled" => Some(Kernel::Generic(Arc::new(GenericKernel::new(
            "quad-sampled",
            Arc::new(|z: C<f64>| C::new(1.0, 0.0) + z * 0.5 + z * z * 0.125),
            Some(Arc::new(|z: C<f64>| C::new(0.5, 0.0) + z * 0.25)),
            None,
        )))),
        _ => None,
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MobiusDto {
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, untagged)]
enum KernelDto {
    Mobius { mobius: MobiusDto },
    Generic { generic: String },
}

impl Kernel<f64> {
    pub fn to_json(&self) -> serde_json::Value {
        let dto = match self {
            Kernel::Mobius { a, b } => KernelDto::Mobius {
                mobius: MobiusDto { a: *a, b: *b },
            },
            Kernel::Generic(g) => KernelDto::Generic {
                generic: g.name.clone(),
            },
        };
        serde_json::to_value(dto).expect("kernel serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dto: KernelDto = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParam(format!("kernel json: {e}")))?;
        match dto {
            KernelDto::Mobius { mobius } => Kernel::mobius(mobius.a, mobius.b),
            KernelDto::Generic { generic } => registry(&generic)
                .ok_or_else(|| Error::InvalidParam(format!("unknown generic kernel '{generic}'"))),
        }
    }
}
