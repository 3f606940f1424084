use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Scalar the numeric core is generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Convert an `f64` constant into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("constant must be representable in the scalar type")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::one() / Self::two()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the generic scalar.
pub type C<T> = Complex<T>;

/// Neumaier (Kahan-Babuska) compensated accumulator.
#[derive(Clone, Copy, Debug)]
pub struct Neumaier<T: Real> {
    sum: T,
    comp: T,
}

impl<T: Real> Default for Neumaier<T> {
    fn default() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }
}

impl<T: Real> Neumaier<T> {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// Compensated accumulator for complex terms (real and imaginary parts separately).
#[derive(Clone, Copy, Debug)]
pub struct NeumaierC<T: Real> {
    re: Neumaier<T>,
    im: Neumaier<T>,
}

impl<T: Real> Default for NeumaierC<T> {
    fn default() -> Self {
        Self {
            re: Neumaier::new(),
            im: Neumaier::new(),
        }
    }
}

impl<T: Real> NeumaierC<T> {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: C<T>) {
        self.re.add(x.re);
        self.im.add(x.im);
    }

    #[inline]
    pub fn value(&self) -> C<T> {
        C::new(self.re.value(), self.im.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancellation() {
        let mut acc = Neumaier::<f64>::new();
        acc.add(1.0);
        acc.add(1e100);
        acc.add(1.0);
        acc.add(-1e100);
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn complex_accumulator_matches_parts() {
        let mut acc = NeumaierC::<f64>::new();
        for k in 1..=1000 {
            acc.add(C::new(1.0 / k as f64, -1.0 / k as f64));
        }
        let v = acc.value();
        assert!((v.re + v.im).abs() < 1e-15);
    }
}
