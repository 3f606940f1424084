//! Complex vectors, matrices, and a small dense LU solver with partial pivoting.

use crate::error::{Error, Result};
use crate::real::{NeumaierC, Real, C};

/// Relative pivot threshold below which a Jacobian is declared singular.
pub const PIVOT_RTOL: f64 = 1e-13;

/// Column vector in C^n.
#[derive(Clone, Debug, PartialEq)]
pub struct CVec<T: Real>(pub Vec<C<T>>);

impl<T: Real> CVec<T> {
    pub fn zero(n: usize) -> Self {
        CVec(vec![C::new(T::zero(), T::zero()); n])
    }

    pub fn from_reals(xs: &[T]) -> Self {
        CVec(xs.iter().map(|&x| C::new(x, T::zero())).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sqr(&self) -> T {
        let mut acc = crate::real::Neumaier::new();
        for z in &self.0 {
            acc.add(z.norm_sqr());
        }
        acc.value()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Hermitian inner product, conjugate-linear in the second slot.
    pub fn inner(&self, other: &CVec<T>) -> Result<C<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let mut acc = NeumaierC::new();
        for (z, w) in self.0.iter().zip(other.0.iter()) {
            acc.add(z * w.conj());
        }
        Ok(acc.value())
    }

    pub fn scale(&self, c: C<T>) -> CVec<T> {
        CVec(self.0.iter().map(|z| z * c).collect())
    }

    pub fn add(&self, other: &CVec<T>) -> CVec<T> {
        CVec(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &CVec<T>) -> CVec<T> {
        CVec(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn dist(&self, other: &CVec<T>) -> T {
        self.sub(other).norm()
    }
}

impl<T: Real> std::ops::Index<usize> for CVec<T> {
    type Output = C<T>;
    fn index(&self, i: usize) -> &C<T> {
        &self.0[i]
    }
}

impl<T: Real> std::ops::IndexMut<usize> for CVec<T> {
    fn index_mut(&mut self, i: usize) -> &mut C<T> {
        &mut self.0[i]
    }
}

/// Dense n x n complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T: Real> {
    n: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zero(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![C::new(T::zero(), T::zero()); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m[(i, i)] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, v: &CVec<T>) -> Result<CVec<T>> {
        if v.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: v.dim(),
            });
        }
        let mut out = CVec::zero(self.n);
        for i in 0..self.n {
            let mut acc = NeumaierC::new();
            for j in 0..self.n {
                acc.add(self[(i, j)] * v[j]);
            }
            out[i] = acc.value();
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// LU-factor and solve; also used for determinants.
    pub fn lu(&self) -> Result<Lu<T>> {
        Lu::factor(self)
    }

    pub fn det(&self) -> Result<C<T>> {
        Ok(self.lu()?.det())
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.n + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Partial-pivoting LU factorization of a small dense complex matrix.
pub struct Lu<T: Real> {
    n: usize,
    lu: Vec<C<T>>,
    perm: Vec<usize>,
    sign_flips: usize,
}

impl<T: Real> Lu<T> {
    pub fn factor(m: &CMatrix<T>) -> Result<Lu<T>> {
        let n = m.n;
        let scale = m.max_abs();
        if !(scale > T::zero()) {
            return Err(Error::SingularJacobian {
                pivot: 0.0,
                threshold: 0.0,
            });
        }
        let threshold = T::lit(PIVOT_RTOL) * scale;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign_flips = 0usize;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[perm[k] * n + k].norm();
            for i in (k + 1)..n {
                let v = lu[perm[i] * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best < threshold {
                return Err(Error::SingularJacobian {
                    pivot: best.to_f64().unwrap_or(0.0),
                    threshold: threshold.to_f64().unwrap_or(0.0),
                });
            }
            if p != k {
                perm.swap(k, p);
                sign_flips += 1;
            }
            let pk = perm[k];
            let piv = lu[pk * n + k];
            for i in (k + 1)..n {
                let pi = perm[i];
                let factor = lu[pi * n + k] / piv;
                lu[pi * n + k] = factor;
                for j in (k + 1)..n {
                    let upd = lu[pk * n + j] * factor;
                    lu[pi * n + j] -= upd;
                }
            }
        }
        Ok(Lu {
            n,
            lu,
            perm,
            sign_flips,
        })
    }

    pub fn solve(&self, b: &CVec<T>) -> Result<CVec<T>> {
        if b.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: b.dim(),
            });
        }
        let n = self.n;
        let mut y = vec![C::new(T::zero(), T::zero()); n];
        for i in 0..n {
            let pi = self.perm[i];
            let mut acc = NeumaierC::new();
            acc.add(b[pi]);
            for j in 0..i {
                acc.add(-self.lu[pi * n + j] * y[j]);
            }
            y[i] = acc.value();
        }
        let mut x = vec![C::new(T::zero(), T::zero()); n];
        for i in (0..n).rev() {
            let pi = self.perm[i];
            let mut acc = NeumaierC::new();
            acc.add(y[i]);
            for j in (i + 1)..n {
                acc.add(-self.lu[pi * n + j] * x[j]);
            }
            x[i] = acc.value() / self.lu[pi * n + i];
        }
        Ok(CVec(x))
    }

    pub fn det(&self) -> C<T> {
        let mut d = C::new(T::one(), T::zero());
        for i in 0..self.n {
            d *= self.lu[self.perm[i] * self.n + i];
        }
        if self.sign_flips % 2 == 1 {
            d = -d;
        }
        d
    }

    /// Cheap condition estimate: ratio of largest to smallest pivot magnitude.
    pub fn cond_estimate(&self) -> T {
        let mut hi = T::zero();
        let mut lo = T::infinity();
        for i in 0..self.n {
            let v = self.lu[self.perm[i] * self.n + i].norm();
            hi = hi.max(v);
            lo = lo.min(v);
        }
        hi / lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn inner_hand_value() {
        // z=(1,i), w=(i,1) -> 1*(-i) + i*1 = 0
        let z = CVec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let w = CVec(vec![c(0.0, 1.0), c(1.0, 0.0)]);
        let v = z.inner(&w).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn inner_hermitian_and_positive() {
        let z = CVec(vec![c(0.3, -0.2), c(0.1, 0.7), c(-0.4, 0.05)]);
        let w = CVec(vec![c(-0.1, 0.9), c(0.2, 0.2), c(0.5, -0.3)]);
        let zw = z.inner(&w).unwrap();
        let wz = w.inner(&z).unwrap();
        assert!((zw - wz.conj()).norm() < 1e-15);
        let zz = z.inner(&z).unwrap();
        assert!(zz.im.abs() < 1e-16);
        assert!(zz.re > 0.0);
    }

    #[test]
    fn inner_dimension_mismatch() {
        let z = CVec::<f64>::zero(2);
        let w = CVec::<f64>::zero(3);
        assert!(matches!(z.inner(&w), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn lu_solves_triangular_system() {
        // [[1, c], [0, 1]] x = (1, 1)  =>  x = (1 - c, 1), c = 3*sqrt(3)/2
        let cc = 3.0 * 3.0_f64.sqrt() / 2.0;
        let mut m = CMatrix::zero(2);
        m[(0, 0)] = c(1.0, 0.0);
        m[(0, 1)] = c(cc, 0.0);
        m[(1, 1)] = c(1.0, 0.0);
        let x = m
            .lu()
            .unwrap()
            .solve(&CVec(vec![c(1.0, 0.0), c(1.0, 0.0)]))
            .unwrap();
        assert!((x[0] - c(1.0 - cc, 0.0)).norm() < 1e-15);
        assert!((x[1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lu_rejects_zero_row() {
        let mut m = CMatrix::zero(2);
        m[(0, 0)] = c(1.0, 0.0);
        m[(0, 1)] = c(2.0, 0.0);
        assert!(matches!(m.lu(), Err(Error::SingularJacobian { .. })));
    }

    #[test]
    fn lu_round_trip_well_conditioned() {
        let mut m = CMatrix::zero(3);
        let entries = [
            [c(2.0, 0.3), c(-0.5, 0.1), c(0.2, -0.7)],
            [c(0.1, -0.2), c(1.5, 0.0), c(0.4, 0.4)],
            [c(-0.3, 0.6), c(0.2, -0.1), c(1.8, 0.2)],
        ];
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = entries[i][j];
            }
        }
        let w = CVec(vec![c(1.0, -1.0), c(0.5, 0.25), c(-0.75, 2.0)]);
        let lu = m.lu().unwrap();
        assert!(lu.cond_estimate() < 1e6);
        let x = lu.solve(&w).unwrap();
        let back = m.mul_vec(&x).unwrap();
        assert!(back.dist(&w) / w.norm() < 1e-12);
    }

    #[test]
    fn det_of_permuted_identity() {
        let mut m = CMatrix::<f64>::zero(2);
        m[(0, 1)] = c(1.0, 0.0);
        m[(1, 0)] = c(1.0, 0.0);
        let d = m.det().unwrap();
        assert!((d - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn f32_instantiation_smoke() {
        let mut m = CMatrix::<f32>::identity(2);
        m[(0, 1)] = C::new(0.5f32, 0.0);
        let x = m
            .lu()
            .unwrap()
            .solve(&CVec(vec![C::new(1.0f32, 0.0), C::new(1.0, 0.0)]))
            .unwrap();
        assert!((x[0] - C::new(0.5f32, 0.0)).norm() < 1e-6);
    }
}
