//! Loewner chains of dilation type, transition mappings, the evolution-equation
//! residual, the operator-commutation identity, and the spirallike flow.

use crate::classes::{membership_verdict, ClassParams, Mode, SamplePlan};
use crate::error::{Error, Result};
use crate::extend::{modified_rs, rs_eval, rs_jacobian, ExtensionParams};
use crate::func1d::{Func1D, Holo1};
use crate::kernel::Kernel;
use crate::linalg::{CMatrix, CVec};
use crate::map::{BallMap, Func1DMap};
use crate::power::principal_power;
use crate::real::C;
use std::sync::atomic::{AtomicBool, Ordering};

/// Newton inversion tolerance for transition mappings.
pub const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITERS: usize = 50;
const HOMOTOPY_SUBSTEPS: usize = 16;

/// Default time step of the centered difference in the residual checks.
pub const DEFAULT_DT: f64 = 1e-4;

/// The dilation chain f(z, t) = e^t f(z) over a certified 1-D starlike base.
/// Its evolution vector field is h(z) = f(z)/f'(z), independent of time.
pub struct Chain1D {
    base: Func1D<f64>,
    kernel: Kernel<f64>,
}

/// Builds the dilation chain after verifying by sampling that the ratio
/// f/(z f') maps into g(D).
pub fn starlike_chain(f: &Func1D<f64>, k: &Kernel<f64>) -> Result<Chain1D> {
    let plan = SamplePlan {
        dirs: 32,
        ..SamplePlan::default()
    };
    let v = membership_verdict(
        &Func1DMap(f.clone()),
        Mode::SGStar,
        k,
        &ClassParams::zero(),
        &plan,
    )?;
    if !v.member {
        return Err(Error::NotGStarlike {
            worst_margin: v.worst_margin,
        });
    }
    Ok(Chain1D {
        base: f.clone(),
        kernel: k.clone(),
    })
}

impl Chain1D {
    pub fn base(&self) -> &Func1D<f64> {
        &self.base
    }

    pub fn kernel(&self) -> &Kernel<f64> {
        &self.kernel
    }

    pub fn value(&self, z1: C<f64>, t: f64) -> C<f64> {
        self.base.value(z1) * t.exp()
    }

    pub fn deriv_z(&self, z1: C<f64>, t: f64) -> C<f64> {
        self.base.d1(z1) * t.exp()
    }

    /// h(z) = f(z)/f'(z).
    pub fn vector_field(&self, z1: C<f64>) -> C<f64> {
        self.base.value(z1) / self.base.d1(z1)
    }
}

fn newton_invert(f: &Func1D<f64>, target: C<f64>, seed: C<f64>) -> Result<C<f64>> {
    let mut v = seed;
    let scale = 1.0 + target.norm();
    for _ in 0..NEWTON_MAX_ITERS {
        let fv = f.value(v) - target;
        if fv.norm() <= NEWTON_TOL * scale {
            return Ok(v);
        }
        let d = f.d1(v);
        if d.norm() < 1e-14 {
            return Err(Error::NewtonDivergence(
                "derivative vanished during inversion".into(),
            ));
        }
        v -= fv / d;
        if v.norm() >= 1.0 {
            return Err(Error::NewtonDivergence("iterate left the unit disk".into()));
        }
    }
    Err(Error::NewtonDivergence("iteration cap reached".into()))
}

/// v = f^{-1}(e^{s-t} f(z1)) with its z1-derivative e^{s-t} f'(z1)/f'(v).
pub fn transition_1d_with_deriv(
    chain: &Chain1D,
    z1: C<f64>,
    s: f64,
    t: f64,
) -> Result<(C<f64>, C<f64>)> {
    if !(0.0 <= s && s <= t) {
        return Err(Error::InvalidParam(
            "transition requires 0 <= s <= t".into(),
        ));
    }
    if z1.norm() >= 1.0 {
        return Err(Error::InvalidParam(
            "transition argument must satisfy |z1| < 1".into(),
        ));
    }
    if s == t {
        return Ok((z1, C::new(1.0, 0.0)));
    }
    let f = &chain.base;
    let fz = f.value(z1);
    let mu = (s - t).exp();
    let v = match newton_invert(f, fz * mu, z1 * mu) {
        Ok(v) => v,
        Err(_) => {
            // Radial homotopy in the time gap for ill-conditioned bases.
            let mut v = z1;
            for k in 1..=HOMOTOPY_SUBSTEPS {
                let muk = ((s - t) * k as f64 / HOMOTOPY_SUBSTEPS as f64).exp();
                v = newton_invert(f, fz * muk, v)?;
            }
            v
        }
    };
    if v.norm() > z1.norm() * (1.0 + 1e-10) + 1e-300 {
        return Err(Error::NewtonDivergence(format!(
            "inverted point violates the Schwarz bound: |v| = {} > |z1| = {}",
            v.norm(),
            z1.norm()
        )));
    }
    Ok((v, f.d1(z1) / f.d1(v) * mu))
}

pub fn transition_1d(chain: &Chain1D, z1: C<f64>, s: f64, t: f64) -> Result<C<f64>> {
    Ok(transition_1d_with_deriv(chain, z1, s, t)?.0)
}

/// The lifted chain over the extension operator with exponents in the
/// admissible regime.
pub struct ChainND {
    chain: Chain1D,
    params: ExtensionParams,
    n: usize,
}

pub fn rs_chain(chain: Chain1D, params: ExtensionParams, n: usize) -> Result<ChainND> {
    params.require_chain_regime()?;
    if n < 2 {
        return Err(Error::InvalidParam("lifted chain needs n >= 2".into()));
    }
    Ok(ChainND { chain, params, n })
}

impl ChainND {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn chain(&self) -> &Chain1D {
        &self.chain
    }

    pub fn params(&self) -> ExtensionParams {
        self.params
    }

    /// F(z, t) = e^t Phi(f)(z): with the dilation base f(., t) = e^t f, the
    /// exponential prefactor and both power anchors of the chain form collapse
    /// into this single product.
    pub fn value(&self, z: &CVec<f64>, t: f64) -> Result<CVec<f64>> {
        Ok(rs_eval(&self.chain.base, &self.params, self.n, z)?.scale(C::new(t.exp(), 0.0)))
    }

    pub fn jacobian(&self, z: &CVec<f64>, t: f64) -> Result<CMatrix<f64>> {
        let mut j = rs_jacobian(&self.chain.base, &self.params, self.n, z)?;
        let e = C::new(t.exp(), 0.0);
        for i in 0..self.n {
            for k in 0..self.n {
                j[(i, k)] *= e;
            }
        }
        Ok(j)
    }
}

/// The lifted transition mapping
/// (v(z1), z_tilde e^{(s-t)(1-ah-bh)} (v/z1)^{ah} (v')^{bh}), with the power
/// branches anchored to e^{(s-t) ah} and e^{(s-t) bh} at z1 = 0.
pub fn transition_nd(c: &ChainND, z: &CVec<f64>, s: f64, t: f64) -> Result<CVec<f64>> {
    if z.dim() != c.n {
        return Err(Error::DimensionMismatch {
            expected: c.n,
            got: z.dim(),
        });
    }
    if s == t {
        return Ok(z.clone());
    }
    let (v, vp) = transition_1d_with_deriv(&c.chain, z[0], s, t)?;
    let mu = (s - t).exp();
    let ah = c.params.alpha_hat;
    let bh = c.params.beta_hat;
    let mut factor = C::new(mu.powf(1.0 - ah - bh), 0.0);
    if ah != 0.0 {
        let ratio = if z[0].norm() < 1e-300 {
            C::new(1.0, 0.0)
        } else {
            v / (z[0] * mu)
        };
        factor *= principal_power(ratio, ah)? * mu.powf(ah);
    }
    if bh != 0.0 {
        factor *= principal_power(vp / mu, bh)? * mu.powf(bh);
    }
    let mut out = CVec::zero(c.n);
    out[0] = v;
    for i in 1..c.n {
        out[i] = z[i] * factor;
    }
    Ok(out)
}

/// Centered-difference residual of the evolution equation for the 1-D chain:
/// || dF/dt - J_F h || with the analytic field h = f/f'.
pub fn pde_residual_1d(chain: &Chain1D, z1: C<f64>, t: f64, dt: f64) -> Result<f64> {
    if !(dt > 0.0 && t - dt >= 0.0) {
        return Err(Error::InvalidParam("need dt > 0 and t - dt >= 0".into()));
    }
    let df = (chain.value(z1, t + dt) - chain.value(z1, t - dt)) / (2.0 * dt);
    let jh = chain.deriv_z(z1, t) * chain.vector_field(z1);
    Ok((df - jh).norm())
}

/// Membership residual of the lifted chain: the vector field recovered from
/// the centered time difference must lie in the Caratheodory-type range class;
/// returns the violation max(0, -margin) of the recovered field.
pub fn pde_residual_nd(c: &ChainND, z: &CVec<f64>, t: f64, dt: f64) -> Result<f64> {
    if !(dt > 0.0 && t - dt >= 0.0) {
        return Err(Error::InvalidParam("need dt > 0 and t - dt >= 0".into()));
    }
    let nsq = z.norm_sqr();
    if nsq == 0.0 {
        return Err(Error::InvalidParam("residual is undefined at z = 0".into()));
    }
    let fp = c.value(z, t + dt)?;
    let fm = c.value(z, t - dt)?;
    let df = fp.sub(&fm).scale(C::new(1.0 / (2.0 * dt), 0.0));
    let h = c.jacobian(z, t)?.lu()?.solve(&df)?;
    let q = h.inner(z)? / nsq;
    let margin = c.chain.kernel.margin(q)?;
    Ok((-margin).max(0.0))
}

/// Recovered-field margin of the lifted chain at a point (the quantity whose
/// violation `pde_residual_nd` reports).
pub fn recovered_field_margin(c: &ChainND, z: &CVec<f64>, t: f64, dt: f64) -> Result<f64> {
    let r = pde_residual_nd(c, z, t, dt)?;
    if r > 0.0 {
        return Ok(-r);
    }
    let fp = c.value(z, t + dt)?;
    let fm = c.value(z, t - dt)?;
    let df = fp.sub(&fm).scale(C::new(1.0 / (2.0 * dt), 0.0));
    let h = c.jacobian(z, t)?.lu()?.solve(&df)?;
    c.chain.kernel.margin(h.inner(z)? / z.norm_sqr())
}

/// e^t m(v_t(z1)) as a disk function; normalized because v_t'(0) = e^{-t}.
struct ComposedBase<'a> {
    m: &'a Func1D<f64>,
    chain: &'a Chain1D,
    t: f64,
    poisoned: AtomicBool,
}

impl<'a> ComposedBase<'a> {
    fn v(&self, z1: C<f64>) -> (C<f64>, C<f64>) {
        match transition_1d_with_deriv(self.chain, z1, 0.0, self.t) {
            Ok(p) => p,
            Err(_) => {
                self.poisoned.store(true, Ordering::Relaxed);
                (C::new(f64::NAN, 0.0), C::new(f64::NAN, 0.0))
            }
        }
    }

    fn v_second(&self, z1: C<f64>, v: C<f64>, vp: C<f64>) -> C<f64> {
        // v' = e^{-t} f'(z)/f'(v)  =>  v'' = e^{-t}(f''(z) f'(v) - f'(z) f''(v) v')/f'(v)^2
        let f = self.chain.base();
        let mu = (-self.t).exp();
        let fv1 = f.d1(v);
        (f.d2(z1) * fv1 - f.d1(z1) * f.d2(v) * vp) * mu / (fv1 * fv1)
    }
}

impl<'a> Holo1<f64> for ComposedBase<'a> {
    fn value(&self, z1: C<f64>) -> C<f64> {
        let (v, _) = self.v(z1);
        self.m.value(v) * self.t.exp()
    }

    fn d1(&self, z1: C<f64>) -> C<f64> {
        let (v, vp) = self.v(z1);
        self.m.d1(v) * vp * self.t.exp()
    }

    fn d2(&self, z1: C<f64>) -> C<f64> {
        let (v, vp) = self.v(z1);
        let vpp = self.v_second(z1, v, vp);
        (self.m.d2(v) * vp * vp + self.m.d1(v) * vpp) * self.t.exp()
    }
}

/// || e^t Phi(m)(V(z, 0, t)) - Phi(e^t (m o v_t))(z) ||: both sides of the
/// operator-commutation identity evaluated independently.
pub fn commutation_identity_check(
    m: &Func1D<f64>,
    chain: &Chain1D,
    params: &ExtensionParams,
    n: usize,
    t: f64,
    z: &CVec<f64>,
) -> Result<f64> {
    if !m.is_normalized() {
        return Err(Error::InvalidParam(
            "commutation base must be normalized".into(),
        ));
    }
    if t < 0.0 {
        return Err(Error::InvalidParam(
            "commutation time must be nonnegative".into(),
        ));
    }
    let nd = ChainND {
        chain: Chain1D {
            base: chain.base.clone(),
            kernel: chain.kernel.clone(),
        },
        params: *params,
        n,
    };
    nd.params.require_chain_regime()?;
    let big_v = transition_nd(&nd, z, 0.0, t)?;
    let op_m = modified_rs(m, *params, n)?;
    let lhs = op_m.eval(&big_v)?.scale(C::new(t.exp(), 0.0));
    let composed = ComposedBase {
        m,
        chain,
        t,
        poisoned: AtomicBool::new(false),
    };
    let rhs = rs_eval(&composed, params, n, z)?;
    if composed.poisoned.load(Ordering::Relaxed) {
        return Err(Error::NewtonDivergence(
            "transition inversion failed inside composition".into(),
        ));
    }
    Ok(lhs.dist(&rhs))
}

/// Trajectory of the spirallike normalizing flow.
#[derive(Clone, Debug)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<CVec<f64>>,
    pub f_norms: Vec<f64>,
    /// Measured direction of ||z(t)||; recorded rather than assumed.
    pub norm_strictly_decreasing: bool,
}

impl FlowTrajectory {
    pub fn state_norms(&self) -> Vec<f64> {
        self.states.iter().map(|z| z.norm()).collect()
    }
}

/// Fixed-step fourth-order Runge-Kutta integration of
/// dz/dt = -e^{-i beta} [J_F(z)]^{-1} F(z), recording ||F(z(t))|| along the way.
pub fn spirallike_flow(
    map: &dyn BallMap,
    z0: &CVec<f64>,
    beta: f64,
    t_end: f64,
    steps: usize,
) -> Result<FlowTrajectory> {
    if !(beta > -std::f64::consts::FRAC_PI_2 && beta < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParam("beta must lie in (-pi/2, pi/2)".into()));
    }
    if steps == 0 || !(t_end > 0.0) {
        return Err(Error::InvalidParam(
            "need t_end > 0 and at least one step".into(),
        ));
    }
    let nz = z0.norm();
    if !(nz > 0.0 && nz < 1.0) {
        return Err(Error::InvalidParam(
            "flow starts in the punctured unit ball".into(),
        ));
    }
    let rot = -C::from_polar(1.0, -beta);
    let rhs = |z: &CVec<f64>| -> Result<CVec<f64>> {
        let f = map.eval(z)?;
        Ok(map.solve_jacobian(z, &f)?.scale(rot))
    };
    let h = t_end / steps as f64;
    let mut state = z0.clone();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut f_norms = Vec::with_capacity(steps + 1);
    times.push(0.0);
    f_norms.push(map.eval(&state)?.norm());
    states.push(state.clone());
    for k in 1..=steps {
        let k1 = rhs(&state)?;
        let k2 = rhs(&state.add(&k1.scale(C::new(h / 2.0, 0.0))))?;
        let k3 = rhs(&state.add(&k2.scale(C::new(h / 2.0, 0.0))))?;
        let k4 = rhs(&state.add(&k3.scale(C::new(h, 0.0))))?;
        let incr = k1
            .add(&k2.scale(C::new(2.0, 0.0)))
            .add(&k3.scale(C::new(2.0, 0.0)))
            .add(&k4)
            .scale(C::new(h / 6.0, 0.0));
        state = state.add(&incr);
        let t = h * k as f64;
        if state.norm() >= 1.0 {
            return Err(Error::EscapedBall { t });
        }
        times.push(t);
        f_norms.push(map.eval(&state)?.norm());
        states.push(state.clone());
    }
    let norms: Vec<f64> = states.iter().map(|z| z.norm()).collect();
    let decreasing = norms.windows(2).all(|w| w[1] < w[0]);
    Ok(FlowTrajectory {
        times,
        states,
        f_norms,
        norm_strictly_decreasing: decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::synth_gstarlike_1d;
    use crate::extend::roper_suffridge;
    use crate::func1d::PowerSeries;
    use crate::verify::sphere_point;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    fn classical_kernel() -> Kernel<f64> {
        Kernel::mobius(-1.0, 1.0).unwrap()
    }

    fn koebe_chain() -> Chain1D {
        starlike_chain(&Func1D::Koebe, &classical_kernel()).unwrap()
    }

    #[test]
    fn identity_chain_field() {
        let chain = starlike_chain(&Func1D::Identity, &classical_kernel()).unwrap();
        let z = c(0.3, 0.4);
        assert!((chain.value(z, 0.7) - z * 0.7f64.exp()).norm() < 1e-15);
        assert!((chain.vector_field(z) - z).norm() < 1e-15);
    }

    #[test]
    fn koebe_chain_field_ratio_is_kernel() {
        // h(z)/z = f/(z f') = (1-z)/(1+z)
        let chain = koebe_chain();
        for z in [c(0.5, 0.0), c(-0.2, 0.3), c(0.1, -0.6)] {
            let ratio = chain.vector_field(z) / z;
            let g = classical_kernel().eval(z).unwrap();
            assert!((ratio - g).norm() < 1e-14);
        }
    }

    #[test]
    fn non_starlike_base_rejected() {
        let f = Func1D::Series(PowerSeries::new(vec![
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(5.0, 0.0),
        ]));
        assert!(matches!(
            starlike_chain(&f, &classical_kernel()),
            Err(Error::NotGStarlike { .. })
        ));
    }

    #[test]
    fn transition_trivial_cases() {
        let chain = koebe_chain();
        let z = c(0.4, 0.2);
        assert_eq!(transition_1d(&chain, z, 0.8, 0.8).unwrap(), z);

        let idc = starlike_chain(&Func1D::Identity, &classical_kernel()).unwrap();
        let v = transition_1d(&idc, z, 0.25, 1.0).unwrap();
        assert!((v - z * (0.25f64 - 1.0).exp()).norm() < 1e-13);
    }

    #[test]
    fn koebe_transition_quadratic_solve() {
        // z/(1-z)^2 = 1 at the transition target; v = (3 - sqrt 5)/2
        let chain = koebe_chain();
        let v = transition_1d(&chain, c(0.5, 0.0), 0.0, 2.0f64.ln()).unwrap();
        let expect = (3.0 - 5.0f64.sqrt()) / 2.0;
        assert!((v - c(expect, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn transition_derivative_matches_finite_differences() {
        let chain = koebe_chain();
        let (s, t) = (0.2, 0.9);
        let z = c(0.35, -0.25);
        let (_, vp) = transition_1d_with_deriv(&chain, z, s, t).unwrap();
        let h = 1e-6;
        let vp_fd = (transition_1d(&chain, z + c(h, 0.0), s, t).unwrap()
            - transition_1d(&chain, z - c(h, 0.0), s, t).unwrap())
            / c(2.0 * h, 0.0);
        assert!((vp - vp_fd).norm() < 1e-8);
    }

    #[test]
    fn subordination_1d() {
        // f(z, s) = f(v(z, s, t), t)
        let chain = koebe_chain();
        for (s, t) in [(0.0, 0.5), (0.3, 1.0), (0.7, 0.70001)] {
            for z in [c(0.5, 0.0), c(-0.3, 0.4), c(0.05, -0.6)] {
                let v = transition_1d(&chain, z, s, t).unwrap();
                let lhs = chain.value(z, s);
                let rhs = chain.value(v, t);
                assert!((lhs - rhs).norm() < 1e-10, "s={s} t={t}");
                assert!(v.norm() <= z.norm() + 1e-12, "Schwarz property");
            }
        }
    }

    #[test]
    fn nd_chain_at_time_zero_is_the_extension() {
        let chain = koebe_chain();
        let p = ExtensionParams::new(0.25, 0.5).unwrap();
        let nd = rs_chain(chain, p, 3).unwrap();
        let op = modified_rs(&Func1D::Koebe, p, 3).unwrap();
        for i in 0..50 {
            let z = sphere_point(3, 0.05 + 0.015 * i as f64, 9, i as u64);
            let a = nd.value(&z, 0.0).unwrap();
            let b = op.eval(&z).unwrap();
            assert!(a.dist(&b) <= 1e-14 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn nd_chain_identity_base_is_pure_dilation() {
        let chain = starlike_chain(&Func1D::Identity, &classical_kernel()).unwrap();
        let nd = rs_chain(chain, ExtensionParams::new(0.6, 0.3).unwrap(), 2).unwrap();
        let z = CVec(vec![c(0.2, 0.1), c(-0.3, 0.25)]);
        for t in [0.0, 0.4, 1.3] {
            let v = nd.value(&z, t).unwrap();
            assert!(v.dist(&z.scale(c(t.exp(), 0.0))) < 1e-13);
        }
    }

    #[test]
    fn nd_chain_normalization_by_finite_differences() {
        let chain = koebe_chain();
        let nd = rs_chain(chain, ExtensionParams::new(0.5, 0.25).unwrap(), 2).unwrap();
        let t: f64 = 0.6;
        let h = 1e-6;
        for j in 0..2 {
            let mut zp = CVec::zero(2);
            let mut zm = CVec::zero(2);
            zp[j] = c(h, 0.0);
            zm[j] = c(-h, 0.0);
            let fp = nd.value(&zp, t).unwrap();
            let fm = nd.value(&zm, t).unwrap();
            for i in 0..2 {
                let want = if i == j { t.exp() } else { 0.0 };
                let fd = (fp[i] - fm[i]) / c(2.0 * h, 0.0);
                assert!((fd - c(want, 0.0)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn nd_transition_identity_base() {
        let chain = starlike_chain(&Func1D::Identity, &classical_kernel()).unwrap();
        let nd = rs_chain(chain, ExtensionParams::new(0.4, 0.5).unwrap(), 2).unwrap();
        let z = CVec(vec![c(0.3, 0.2), c(-0.2, 0.4)]);
        let (s, t) = (0.2, 1.1);
        let v = transition_nd(&nd, &z, s, t).unwrap();
        assert!(v.dist(&z.scale(c((s - t).exp(), 0.0))) < 1e-12);
        assert_eq!(transition_nd(&nd, &z, 0.5, 0.5).unwrap(), z);
    }

    #[test]
    fn nd_subordination_and_semigroup() {
        let chain = koebe_chain();
        let nd = rs_chain(chain, ExtensionParams::new(0.25, 0.5).unwrap(), 2).unwrap();
        let pts: Vec<CVec<f64>> = (0..12)
            .map(|i| sphere_point(2, 0.08 + 0.06 * i as f64, 5, i as u64))
            .collect();
        for (s, t) in [(0.0, 0.6), (0.2, 1.0)] {
            for z in &pts {
                let v = transition_nd(&nd, z, s, t).unwrap();
                assert!(v.norm() <= z.norm() + 1e-12, "Schwarz property in n dims");
                let lhs = nd.value(z, s).unwrap();
                let rhs = nd.value(&v, t).unwrap();
                assert!(lhs.dist(&rhs) < 1e-8, "subordination at s={s} t={t}");
            }
        }
        // V(., s, u) = V(V(., s, t), t, u)
        let (s, t, u) = (0.1, 0.5, 1.2);
        for z in &pts {
            let direct = transition_nd(&nd, z, s, u).unwrap();
            let two_step = transition_nd(&nd, &transition_nd(&nd, z, s, t).unwrap(), t, u).unwrap();
            assert!(direct.dist(&two_step) < 1e-9, "semigroup composition");
        }
    }

    #[test]
    fn pde_residual_identity_and_koebe() {
        let idc = starlike_chain(&Func1D::Identity, &classical_kernel()).unwrap();
        assert!(pde_residual_1d(&idc, c(0.4, 0.3), 0.5, DEFAULT_DT).unwrap() <= 1e-8);
        let chain = koebe_chain();
        for i in 0..100 {
            let theta = 0.0628 * i as f64;
            let z = C::from_polar(0.05 + 0.008 * i as f64, theta);
            let t = 0.01 + 0.01 * i as f64;
            assert!(pde_residual_1d(&chain, z, t, DEFAULT_DT).unwrap() <= 1e-6);
        }
    }

    #[test]
    fn nd_recovered_field_passes_membership() {
        let chain = koebe_chain();
        let nd = rs_chain(chain, ExtensionParams::new(0.0, 0.5).unwrap(), 2).unwrap();
        for i in 0..30 {
            let z = sphere_point(2, 0.1 + 0.025 * i as f64, 23, i as u64);
            let t = 0.1 + 0.03 * i as f64;
            let viol = pde_residual_nd(&nd, &z, t, DEFAULT_DT).unwrap();
            assert!(viol <= 1e-6, "violation {viol} at sample {i}");
            assert!(recovered_field_margin(&nd, &z, t, DEFAULT_DT).unwrap() >= -1e-6);
        }
    }

    #[test]
    fn commutation_identity() {
        let chain = koebe_chain();
        let p = ExtensionParams::new(0.5, 0.5).unwrap();
        // t = 0 is exact
        let z = CVec(vec![c(0.3, 0.1), c(-0.2, 0.35)]);
        assert_eq!(
            commutation_identity_check(&Func1D::Koebe, &chain, &p, 2, 0.0, &z).unwrap(),
            0.0
        );
        // identity base reduces by hand
        let d = commutation_identity_check(&Func1D::Identity, &chain, &p, 2, 0.4, &z).unwrap();
        assert!(d <= 1e-12, "identity commutation defect {d}");
        // the Koebe pair
        for i in 0..10 {
            let z = sphere_point(2, 0.12 + 0.05 * i as f64, 31, i as u64);
            let d = commutation_identity_check(&Func1D::Koebe, &chain, &p, 2, 0.3, &z).unwrap();
            assert!(d <= 1e-9, "commutation defect {d} at sample {i}");
        }
    }

    #[test]
    fn flow_identity_closed_form() {
        let id2 = crate::holomap::HoloMap::<f64>::identity(2);
        let z0 = CVec(vec![c(0.4, 0.1), c(-0.2, 0.3)]);
        // beta = 0: z(t) = e^{-t} z0
        let traj = spirallike_flow(&id2, &z0, 0.0, 1.0, 200).unwrap();
        let last = traj.states.last().unwrap();
        assert!(last.dist(&z0.scale(c((-1.0f64).exp(), 0.0))) < 1e-10);
        assert!(traj.norm_strictly_decreasing);

        // beta = pi/4: z(t) = e^{-e^{-i beta} t} z0, norm decay e^{-t/sqrt 2}
        let beta = std::f64::consts::FRAC_PI_4;
        let traj = spirallike_flow(&id2, &z0, beta, 2.0, 400).unwrap();
        let rot = -C::from_polar(1.0, -beta);
        let last = traj.states.last().unwrap();
        assert!(last.dist(&z0.scale((rot * 2.0).exp())) < 1e-9);
        let decay = traj.states.last().unwrap().norm() / z0.norm();
        assert!((decay - (-2.0 / 2.0f64.sqrt()).exp()).abs() < 1e-9);
    }

    #[test]
    fn flow_norm_law_for_extension() {
        let k = classical_kernel();
        let f = synth_gstarlike_1d(&k, c(0.6, 0.0), 64).unwrap();
        let op = roper_suffridge(&f, 2).unwrap();
        let z0 = CVec(vec![c(0.3, 0.1), c(0.2, -0.25)]);
        let beta = 0.5;
        let traj = spirallike_flow(&op, &z0, beta, 2.0, 2000).unwrap();
        let f0 = traj.f_norms[0];
        for (t, fn_t) in traj.times.iter().zip(traj.f_norms.iter()) {
            let expect = f0 * (-t * beta.cos()).exp();
            assert!((fn_t - expect).abs() <= 1e-6 * f0, "t = {t}");
        }
        assert!(traj.norm_strictly_decreasing);
    }

    #[test]
    fn flow_input_validation() {
        let id2 = crate::holomap::HoloMap::<f64>::identity(2);
        let z0 = CVec(vec![c(0.4, 0.0), c(0.0, 0.0)]);
        assert!(spirallike_flow(&id2, &CVec::zero(2), 0.0, 1.0, 10).is_err());
        assert!(spirallike_flow(&id2, &z0, 2.0, 1.0, 10).is_err());
        assert!(spirallike_flow(&id2, &z0, 0.0, 1.0, 0).is_err());
    }
}
