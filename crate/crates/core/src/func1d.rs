//! One-dimensional holomorphic functions of the disk: truncated power series and
//! the named closed-form builtins, behind a common evaluation trait.

use crate::error::{Error, Result};
use crate::real::{NeumaierC, Real, C};
use serde::{Deserialize, Serialize};

/// A holomorphic function on the unit disk with analytic derivatives.
///
/// `ratio0` and `log_deriv_excess` expose the combinations f(z)/z and
/// f'(z)/f(z) - 1/z that extension operators need; both are holomorphic at 0
/// for normalized f. Implementors should override them where a cancellation-free
/// form exists.
pub trait Holo1<T: Real>: Send + Sync {
    fn value(&self, z: C<T>) -> C<T>;
    fn d1(&self, z: C<T>) -> C<T>;
    fn d2(&self, z: C<T>) -> C<T>;

    /// f(z)/z, with the removable singularity at 0 filled by f'(0).
    fn ratio0(&self, z: C<T>) -> C<T> {
        if z.norm_sqr() == T::zero() {
            self.d1(z)
        } else {
            self.value(z) / z
        }
    }

    /// f'(z)/f(z) - 1/z, with the removable singularity at 0 filled by f''(0)/2.
    fn log_deriv_excess(&self, z: C<T>) -> C<T> {
        if z.norm_sqr() == T::zero() {
            self.d2(z) / T::two()
        } else {
            (self.d1(z) - self.ratio0(z)) / self.value(z)
        }
    }
}

/// Truncated power series sum_k coeffs\[k\] z^k.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries<T: Real> {
    coeffs: Vec<C<T>>,
}

impl<T: Real> PowerSeries<T> {
    pub fn new(coeffs: Vec<C<T>>) -> Self {
        PowerSeries { coeffs }
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C<T> {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or_else(|| C::new(T::zero(), T::zero()))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: C<T>) -> C<T> {
        let mut acc = C::new(T::zero(), T::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// sum_k k c_k z^{k-1}.
    pub fn eval_d1(&self, z: C<T>) -> C<T> {
        let mut acc = C::new(T::zero(), T::zero());
        for (k, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * z + *c * T::from_usize(k).unwrap();
        }
        acc
    }

    /// sum_k k(k-1) c_k z^{k-2}.
    pub fn eval_d2(&self, z: C<T>) -> C<T> {
        let mut acc = C::new(T::zero(), T::zero());
        for (k, c) in self.coeffs.iter().enumerate().skip(2).rev() {
            acc = acc * z + *c * T::from_usize(k * (k - 1)).unwrap();
        }
        acc
    }

    /// sum_{k>=1} c_k z^{k-1} (that is, f(z)/z for a series with c_0 = 0).
    pub fn eval_shift1(&self, z: C<T>) -> C<T> {
        let mut acc = C::new(T::zero(), T::zero());
        for c in self.coeffs.iter().skip(1).rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// sum_{k>=2} (k-1) c_k z^{k-2} (the numerator of f'(z)/f(z) - 1/z times f(z)/z).
    pub fn eval_excess_numer(&self, z: C<T>) -> C<T> {
        let mut acc = C::new(T::zero(), T::zero());
        for (k, c) in self.coeffs.iter().enumerate().skip(2).rev() {
            acc = acc * z + *c * T::from_usize(k - 1).unwrap();
        }
        acc
    }

    /// Termwise antiderivative with value 0 at the origin.
    pub fn integrate(&self) -> PowerSeries<T> {
        let mut out = vec![C::new(T::zero(), T::zero()); self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k + 1] = *c / T::from_usize(k + 1).unwrap();
        }
        PowerSeries::new(out)
    }

    /// exp of a series with zero constant term, truncated at `max_deg`.
    pub fn exp_trunc(&self, max_deg: usize) -> Result<PowerSeries<T>> {
        if self.coeff(0).norm_sqr() != T::zero() {
            return Err(Error::InvalidParam(
                "series exp requires zero constant term".into(),
            ));
        }
        let mut e = vec![C::new(T::zero(), T::zero()); max_deg + 1];
        e[0] = C::new(T::one(), T::zero());
        for m in 1..=max_deg {
            let mut acc = NeumaierC::new();
            for k in 1..=m {
                let w = self.coeff(k);
                if w.norm_sqr() == T::zero() {
                    continue;
                }
                acc.add(w * T::from_usize(k).unwrap() * e[m - k]);
            }
            e[m] = acc.value() / T::from_usize(m).unwrap();
        }
        Ok(PowerSeries::new(e))
    }

    /// Multiply by z (shift all powers up by one).
    pub fn shift_up(&self) -> PowerSeries<T> {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(C::new(T::zero(), T::zero()));
        out.extend_from_slice(&self.coeffs);
        PowerSeries::new(out)
    }
}

/// A 1-D normalized function: either a named closed form or a truncated series.
#[derive(Clone, Debug)]
pub enum Func1D<T: Real> {
    Identity,
    /// z / (1-z)^2.
    Koebe,
    /// z (1 + A c z)^{(B-A)/A}, with the exponential limit z e^{(B-A) c z} at A = 0.
    /// This is the disk function whose starlikeness ratio f/(z f') equals the
    /// Moebius kernel (1+A cz)/(1+B cz) exactly.
    MobiusStarlike {
        a: T,
        b: T,
        c: C<T>,
    },
    Series(PowerSeries<T>),
}

impl<T: Real> Func1D<T> {
    pub fn mobius_starlike(a: T, b: T, c: C<T>) -> Result<Self> {
        if !(a >= -T::one() && a < b && b <= T::one()) {
            return Err(Error::InvalidParam("require -1 <= A < B <= 1".into()));
        }
        if c.norm() > T::one() + T::lit(1e-14) {
            return Err(Error::InvalidParam("require |c| <= 1".into()));
        }
        Ok(Func1D::MobiusStarlike { a, b, c })
    }

    pub fn is_normalized(&self) -> bool {
        match self {
            Func1D::Identity | Func1D::Koebe | Func1D::MobiusStarlike { .. } => true,
            Func1D::Series(s) => {
                s.coeff(0).norm_sqr() == T::zero() && s.coeff(1) == C::new(T::one(), T::zero())
            }
        }
    }

    /// log-derivative of f(z)/z; exact closed form for the Moebius generator.
    fn mobius_ratio_parts(a: T, b: T, c: C<T>, z: C<T>) -> (C<T>, C<T>) {
        let one = C::new(T::one(), T::zero());
        let w = c * z * a; // A c z
        let u = one + w;
        // L = ln(1 + A c z)/A, via the series in w when A is tiny.
        let l = if a.abs() >= T::lit(1e-8) {
            u.ln() / a
        } else {
            // cz * (1 - w/2 + w^2/3 - ...) with |w| <= 1e-8: two terms suffice.
            c * z * (one - w / T::two() + w * w / T::lit(3.0))
        };
        let g = (l * (b - a)).exp(); // G = (1 + A c z)^{(B-A)/A}, anchored to 1 at z = 0
        let d = c * (b - a) / u; // G'/G
        (g, d)
    }
}

impl<T: Real> Holo1<T> for Func1D<T> {
    fn value(&self, z: C<T>) -> C<T> {
        match self {
            Func1D::Identity => z,
            Func1D::Koebe => {
                let one = C::new(T::one(), T::zero());
                let d = one - z;
                z / (d * d)
            }
            Func1D::MobiusStarlike { a, b, c } => {
                let (g, _) = Self::mobius_ratio_parts(*a, *b, *c, z);
                z * g
            }
            Func1D::Series(s) => s.eval(z),
        }
    }

    fn d1(&self, z: C<T>) -> C<T> {
        match self {
            Func1D::Identity => C::new(T::one(), T::zero()),
            Func1D::Koebe => {
                let one = C::new(T::one(), T::zero());
                let d = one - z;
                (one + z) / (d * d * d)
            }
            Func1D::MobiusStarlike { a, b, c } => {
                let (g, d) = Self::mobius_ratio_parts(*a, *b, *c, z);
                g * (C::new(T::one(), T::zero()) + z * d)
            }
            Func1D::Series(s) => s.eval_d1(z),
        }
    }

    fn d2(&self, z: C<T>) -> C<T> {
        match self {
            Func1D::Identity => C::new(T::zero(), T::zero()),
            Func1D::Koebe => {
                let one = C::new(T::one(), T::zero());
                let d = one - z;
                (C::new(T::lit(4.0), T::zero()) + z * T::two()) / (d * d * d * d)
            }
            Func1D::MobiusStarlike { a, b, c } => {
                let (g, d) = Self::mobius_ratio_parts(*a, *b, *c, z);
                let u = C::new(T::one(), T::zero()) + *c * z * *a;
                let dprime = -d * *c * *a / u;
                g * (d * T::two() + z * d * d + z * dprime)
            }
            Func1D::Series(s) => s.eval_d2(z),
        }
    }

    fn ratio0(&self, z: C<T>) -> C<T> {
        match self {
            Func1D::Identity => C::new(T::one(), T::zero()),
            Func1D::Koebe => {
                let one = C::new(T::one(), T::zero());
                let d = one - z;
                one / (d * d)
            }
            Func1D::MobiusStarlike { a, b, c } => Self::mobius_ratio_parts(*a, *b, *c, z).0,
            Func1D::Series(s) => s.eval_shift1(z),
        }
    }

    fn log_deriv_excess(&self, z: C<T>) -> C<T> {
        match self {
            Func1D::Identity => C::new(T::zero(), T::zero()),
            Func1D::Koebe => {
                let one = C::new(T::one(), T::zero());
                C::new(T::two(), T::zero()) / (one - z)
            }
            Func1D::MobiusStarlike { a, b, c } => Self::mobius_ratio_parts(*a, *b, *c, z).1,
            Func1D::Series(s) => s.eval_excess_numer(z) / s.eval_shift1(z),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MobiusStarlikeParams {
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    c: [f64; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, untagged)]
enum Func1DDto {
    Builtin {
        builtin: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        params: Option<MobiusStarlikeParams>,
    },
    Series {
        series: Vec<[f64; 2]>,
    },
}

impl Func1D<f64> {
    pub fn to_json(&self) -> serde_json::Value {
        let dto = match self {
            Func1D::Identity => Func1DDto::Builtin {
                builtin: "identity".into(),
                params: None,
            },
            Func1D::Koebe => Func1DDto::Builtin {
                builtin: "koebe".into(),
                params: None,
            },
            Func1D::MobiusStarlike { a, b, c } => Func1DDto::Builtin {
                builtin: "mobius-starlike".into(),
                params: Some(MobiusStarlikeParams {
                    a: *a,
                    b: *b,
                    c: [c.re, c.im],
                }),
            },
            Func1D::Series(s) => Func1DDto::Series {
                series: s.coeffs().iter().map(|c| [c.re, c.im]).collect(),
            },
        };
        serde_json::to_value(dto).expect("func1d serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dto: Func1DDto = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParam(format!("func1d json: {e}")))?;
        match dto {
            Func1DDto::Builtin { builtin, params } => match builtin.as_str() {
                "identity" => Ok(Func1D::Identity),
                "koebe" => Ok(Func1D::Koebe),
                "mobius-starlike" => {
                    let p = params.ok_or_else(|| {
                        Error::InvalidParam("mobius-starlike requires params {A, B, c}".into())
                    })?;
                    Func1D::mobius_starlike(p.a, p.b, C::new(p.c[0], p.c[1]))
                }
                other => Err(Error::InvalidParam(format!("unknown builtin '{other}'"))),
            },
            Func1DDto::Series { series } => Ok(Func1D::Series(PowerSeries::new(
                series.into_iter().map(|[re, im]| C::new(re, im)).collect(),
            ))),
        }
    }
}
