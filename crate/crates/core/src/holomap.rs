//! Polynomial holomorphic mappings of the ball as multi-index coefficient tables.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVec};
use crate::real::{NeumaierC, Real, C};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Default total-degree cap for coefficient tables.
pub const DEFAULT_DEGREE_CAP: u32 = 8;

/// A polynomial mapping B^n -> C^n stored as (component, multi-index) -> coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct HoloMap<T: Real> {
    n: usize,
    degree_cap: u32,
    terms: BTreeMap<(usize, Vec<u32>), C<T>>,
    normalized: bool,
}

pub struct HoloMapBuilder<T: Real> {
    n: usize,
    degree_cap: u32,
    terms: BTreeMap<(usize, Vec<u32>), C<T>>,
}

impl<T: Real> HoloMapBuilder<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParam("dimension must be at least 1".into()));
        }
        Ok(HoloMapBuilder {
            n,
            degree_cap: DEFAULT_DEGREE_CAP,
            terms: BTreeMap::new(),
        })
    }

    pub fn degree_cap(mut self, cap: u32) -> Self {
        self.degree_cap = cap;
        self
    }

    pub fn term(mut self, out: usize, idx: &[u32], coeff: C<T>) -> Result<Self> {
        if out >= self.n {
            return Err(Error::InvalidParam(format!(
                "output index {out} out of range for n={}",
                self.n
            )));
        }
        if idx.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: idx.len(),
            });
        }
        let total: u32 = idx.iter().sum();
        if total > self.degree_cap {
            return Err(Error::InvalidParam(format!(
                "total degree {total} exceeds cap {}",
                self.degree_cap
            )));
        }
        if coeff.norm_sqr() > T::zero() {
            let entry = self
                .terms
                .entry((out, idx.to_vec()))
                .or_insert_with(|| C::new(T::zero(), T::zero()));
            *entry += coeff;
        }
        Ok(self)
    }

    pub fn build(self) -> HoloMap<T> {
        let mut terms = self.terms;
        terms.retain(|_, c| c.norm_sqr() > T::zero());
        let normalized = {
            let mut ok = true;
            // no constant terms, and linear part equal to the identity
            for ((out, idx), coeff) in &terms {
                let total: u32 = idx.iter().sum();
                if total == 0 {
                    ok = false;
                    break;
                }
                if total == 1 {
                    let j = idx.iter().position(|&k| k == 1).unwrap();
                    let want = if j == *out {
                        C::new(T::one(), T::zero())
                    } else {
                        C::new(T::zero(), T::zero())
                    };
                    if *coeff != want {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                for i in 0..self.n {
                    let mut idx = vec![0u32; self.n];
                    idx[i] = 1;
                    match terms.get(&(i, idx)) {
                        Some(c) if *c == C::new(T::one(), T::zero()) => {}
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            ok
        };
        HoloMap {
            n: self.n,
            degree_cap: self.degree_cap,
            terms,
            normalized,
        }
    }
}

impl<T: Real> HoloMap<T> {
    pub fn builder(n: usize) -> Result<HoloMapBuilder<T>> {
        HoloMapBuilder::new(n)
    }

    pub fn identity(n: usize) -> Self {
        let mut b = HoloMapBuilder::new(n).expect("n >= 1");
        for i in 0..n {
            let mut idx = vec![0u32; n];
            idx[i] = 1;
            b = b.term(i, &idx, C::new(T::one(), T::zero())).unwrap();
        }
        b.build()
    }

    pub fn zero_map(n: usize) -> Self {
        HoloMapBuilder::new(n).expect("n >= 1").build()
    }

    /// z -> c * z.
    pub fn scaled(n: usize, c: C<T>) -> Self {
        let mut b = HoloMapBuilder::new(n).expect("n >= 1");
        for i in 0..n {
            let mut idx = vec![0u32; n];
            idx[i] = 1;
            b = b.term(i, &idx, c).unwrap();
        }
        b.build()
    }

    /// The truncated two-dimensional map (rho*z1 + q*z2^2, sigma*z2).
    pub fn sheared(rho: C<T>, q: C<T>, sigma: C<T>) -> Self {
        HoloMapBuilder::new(2)
            .unwrap()
            .term(0, &[1, 0], rho)
            .unwrap()
            .term(0, &[0, 2], q)
            .unwrap()
            .term(1, &[0, 1], sigma)
            .unwrap()
            .build()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn coefficient(&self, out: usize, idx: &[u32]) -> C<T> {
        self.terms
            .get(&(out, idx.to_vec()))
            .copied()
            .unwrap_or_else(|| C::new(T::zero(), T::zero()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, Vec<u32>), &C<T>)> {
        self.terms.iter()
    }

    fn check_dim(&self, z: &CVec<T>) -> Result<()> {
        if z.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.dim(),
            });
        }
        Ok(())
    }

    fn monomial(z: &CVec<T>, idx: &[u32]) -> C<T> {
        let mut v = C::new(T::one(), T::zero());
        for (j, &k) in idx.iter().enumerate() {
            if k > 0 {
                v *= z[j].powu(k);
            }
        }
        v
    }

    /// Value of the mapping, accumulated with compensated summation per component.
    pub fn eval(&self, z: &CVec<T>) -> Result<CVec<T>> {
        self.check_dim(z)?;
        let mut acc: Vec<NeumaierC<T>> = vec![NeumaierC::new(); self.n];
        for ((out, idx), coeff) in &self.terms {
            acc[*out].add(*coeff * Self::monomial(z, idx));
        }
        Ok(CVec(acc.into_iter().map(|a| a.value()).collect()))
    }

    /// Analytic Jacobian from the coefficient table (no finite differences).
    pub fn jacobian(&self, z: &CVec<T>) -> Result<CMatrix<T>> {
        self.check_dim(z)?;
        let mut acc: Vec<NeumaierC<T>> = vec![NeumaierC::new(); self.n * self.n];
        let mut didx = vec![0u32; self.n];
        for ((out, idx), coeff) in &self.terms {
            for j in 0..self.n {
                let k = idx[j];
                if k == 0 {
                    continue;
                }
                didx.copy_from_slice(idx);
                didx[j] = k - 1;
                let v = *coeff * T::from_u32(k).unwrap() * Self::monomial(z, &didx);
                acc[*out * self.n + j].add(v);
            }
        }
        let mut m = CMatrix::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = acc[i * self.n + j].value();
            }
        }
        Ok(m)
    }

    /// Matrix of second partials d^2 f_i / (dz_k dz_j) for a fixed j, entry (i, k).
    pub fn second_partials(&self, z: &CVec<T>, j: usize) -> Result<CMatrix<T>> {
        self.check_dim(z)?;
        let mut m = CMatrix::zero(self.n);
        let mut didx = vec![0u32; self.n];
        for ((out, idx), coeff) in &self.terms {
            let kj = idx[j];
            if kj == 0 {
                continue;
            }
            for k in 0..self.n {
                let mult = if k == j { kj * (kj - 1) } else { kj * idx[k] };
                if mult == 0 {
                    continue;
                }
                didx.copy_from_slice(idx);
                didx[j] -= 1;
                didx[k] -= 1;
                let v = *coeff * T::from_u32(mult).unwrap() * Self::monomial(z, &didx);
                m[(*out, k)] += v;
            }
        }
        Ok(m)
    }

    /// Solves J_f(z) x = w by partial-pivoting LU.
    pub fn solve_jacobian(&self, z: &CVec<T>, w: &CVec<T>) -> Result<CVec<T>> {
        Ok(self.solve_jacobian_with_cond(z, w)?.0)
    }

    /// Same as `solve_jacobian` but also reports the condition estimate of the factor.
    pub fn solve_jacobian_with_cond(&self, z: &CVec<T>, w: &CVec<T>) -> Result<(CVec<T>, T)> {
        self.check_dim(w)?;
        let lu = self.jacobian(z)?.lu()?;
        let cond = lu.cond_estimate();
        Ok((lu.solve(w)?, cond))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDto {
    out: usize,
    idx: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HoloMapDto {
    n: usize,
    terms: Vec<TermDto>,
}

impl HoloMap<f64> {
    pub fn to_json(&self) -> serde_json::Value {
        let terms = self
            .terms
            .iter()
            .map(|((out, idx), c)| TermDto {
                out: *out,
                idx: idx.clone(),
                re: c.re,
                im: c.im,
            })
            .collect();
        serde_json::to_value(HoloMapDto { n: self.n, terms }).expect("holomap serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dto: HoloMapDto = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParam(format!("holomap json: {e}")))?;
        let mut b = HoloMapBuilder::new(dto.n)?;
        let mut cap = DEFAULT_DEGREE_CAP;
        for t in &dto.terms {
            cap = cap.max(t.idx.iter().sum());
        }
        b = b.degree_cap(cap);
        for t in dto.terms {
            b = b.term(t.out, &t.idx, C::new(t.re, t.im))?;
        }
        Ok(b.build())
    }
}
