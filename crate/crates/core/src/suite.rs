//! The theorem-by-theorem verification suite: certified families, sandwich and
//! distortion checks, chain and flow checks, and deterministic reporting.

use crate::bounds::{
    coeff_bound, distortion_bounds, distortion_factors, growth_bounds_closed,
    growth_bounds_quadrature, lemma23_b12, lemma23_bounds,
};
use crate::classes::{
    membership_verdict, synth_gstarlike_1d, CertifiedField, ClassParams, Mode, SamplePlan,
};
use crate::error::{Error, Result};
use crate::extend::{modified_rs, ExtendedMap, ExtensionParams};
use crate::func1d::Func1D;
use crate::kernel::Kernel;
use crate::loewner::{
    commutation_identity_check, pde_residual_1d, recovered_field_margin, rs_chain, spirallike_flow,
    starlike_chain, transition_1d, transition_nd,
};
use crate::map::{BallMap, Func1DMap};
use crate::real::C;
use crate::report::fmt_g17;
use crate::verify::{
    boundary_lambda, polish_extremum, sphere_extremum, sphere_point, splitmix64, ExtremumMode,
    RescaledMap,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

// Check tolerances, pinned in one place.
pub const TOL_MEMBERSHIP: f64 = 1e-9;
pub const TOL_GROWTH: f64 = 1e-9;
pub const TOL_SANDWICH: f64 = 1e-9;
pub const TOL_DISTORTION: f64 = 1e-7;
pub const TOL_SUBORDINATION: f64 = 1e-8;
pub const TOL_SEMIGROUP: f64 = 1e-9;
pub const TOL_PDE_RESIDUAL: f64 = 1e-6;
pub const TOL_COMMUTATION: f64 = 1e-9;
pub const TOL_RECOVERED_FIELD: f64 = 1e-6;
pub const TOL_FLOW_LAW: f64 = 1e-6;
pub const FLOW_RATIO_BAND: f64 = 1e-2;
pub const TOL_COEFF: f64 = 1e-6;
pub const TOL_SHEARING: f64 = 1e-6;
pub const TOL_BOUNDARY_IMAG: f64 = 1e-6;

const COEFF_SCAN_POINTS: usize = 1_000_001;
const SHEARING_SCAN_POINTS: usize = 1_000_001;

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub c: [f64; 2],
    pub degree: usize,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, untagged)]
pub enum BaseSpec {
    Synth { synth: SynthSpec },
    Func(serde_json::Value),
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendSpec {
    pub ahat: f64,
    pub bhat: f64,
    pub n: usize,
}

/// A certified family member: a 1-D generator for a kernel, optionally lifted.
#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kernel: serde_json::Value,
    pub base: BaseSpec,
    #[serde(default)]
    pub extend: Option<ExtendSpec>,
}

/// A constructed member of the tilde class for the sandwich check.
#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub kernel: serde_json::Value,
    pub alpha: f64,
    pub beta: f64,
    pub c: [f64; 2],
    pub n: usize,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffSpec {
    pub kernel: serde_json::Value,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    /// Index into `families` of the map to flow.
    pub family: usize,
    pub betas: Vec<f64>,
    pub t_end: f64,
    pub steps_per_unit: usize,
    /// Long horizon at which ||F(z(t))||/||z(t)|| is compared with 1.
    pub ratio_t: f64,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoewnerSpec {
    /// Index into `families` of the 1-D chain base.
    pub family: usize,
    /// Index into `families` of the 1-D base used on the other side of the
    /// commutation identity.
    pub m_family: usize,
    pub ahat: f64,
    pub bhat: f64,
    pub n: usize,
    pub s: f64,
    pub t: f64,
    pub u: f64,
    pub dt: f64,
    pub samples: usize,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_dirs")]
    pub dirs: usize,
    #[serde(default)]
    pub families: Vec<FamilySpec>,
    #[serde(default)]
    pub fields: Vec<FieldSpec>,
    #[serde(default)]
    pub coeff_kernels: Vec<CoeffSpec>,
    #[serde(default)]
    pub shearing_coeffs: Vec<[f64; 2]>,
    #[serde(default)]
    pub flow: Option<FlowSpec>,
    #[serde(default)]
    pub loewner: Option<LoewnerSpec>,
    /// Self-test hook: scales the growth upper bound; 1.0 in normal runs.
    #[serde(default = "default_scale")]
    pub growth_upper_scale: f64,
    #[serde(default = "default_budget")]
    pub extremum_budget: usize,
}

fn default_radii() -> Vec<f64> {
    vec![0.3, 0.5, 0.7]
}

fn default_dirs() -> usize {
    40
}

fn default_scale() -> f64 {
    1.0
}

fn default_budget() -> usize {
    400
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParam(format!("suite config: {e}")))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("suite config serializes")
    }

    /// The in-repo default configuration.
    pub fn default_config() -> Self {
        let mobius = |a: f64, b: f64| serde_json::json!({"mobius": {"A": a, "B": b}});
        let synth = |c: [f64; 2], degree: usize| BaseSpec::Synth {
            synth: SynthSpec { c, degree },
        };
        let generator = |a: f64, b: f64, c: [f64; 2]| {
            BaseSpec::Func(serde_json::json!({
                "builtin": "mobius-starlike",
                "params": {"A": a, "B": b, "c": c},
            }))
        };
        let families = vec![
            FamilySpec {
                kernel: mobius(-1.0, 1.0),
                base: synth([0.7, 0.0], 96),
                extend: None,
            },
            FamilySpec {
                kernel: mobius(-0.5, 0.5),
                base: synth([0.8, 0.1], 96),
                extend: None,
            },
            FamilySpec {
                kernel: mobius(0.0, 1.0),
                base: synth([0.6, -0.2], 96),
                extend: None,
            },
            FamilySpec {
                kernel: mobius(-1.0, 0.0),
                base: synth([0.75, 0.0], 96),
                extend: None,
            },
            FamilySpec {
                kernel: mobius(-1.0, 1.0),
                base: generator(-1.0, 1.0, [0.7, 0.0]),
                extend: Some(ExtendSpec {
                    ahat: 0.0,
                    bhat: 0.5,
                    n: 2,
                }),
            },
            FamilySpec {
                kernel: mobius(-1.0, 1.0),
                base: generator(-1.0, 1.0, [0.5, 0.2]),
                extend: Some(ExtendSpec {
                    ahat: 0.0,
                    bhat: 0.5,
                    n: 3,
                }),
            },
            // generic kernel: growth bounds come from quadrature and the range
            // margin from Newton inversion
            FamilySpec {
                kernel: serde_json::json!({"generic": "quad"}),
                base: synth([0.7, 0.0], 64),
                extend: None,
            },
        ];
        let mut fields = Vec::new();
        for (a, b) in [(-1.0, 1.0), (-0.5, 0.5)] {
            for (alpha, beta) in [(0.0, 0.0), (0.3, 0.5), (0.3, -0.5)] {
                fields.push(FieldSpec {
                    kernel: mobius(a, b),
                    alpha,
                    beta,
                    c: [0.8, 0.0],
                    n: 2,
                });
            }
        }
        SuiteConfig {
            seed: 20180125,
            radii: default_radii(),
            dirs: default_dirs(),
            families,
            fields,
            coeff_kernels: vec![
                CoeffSpec {
                    kernel: mobius(-1.0, 1.0),
                    alpha: 0.0,
                    beta: 0.0,
                },
                CoeffSpec {
                    kernel: mobius(-0.5, 0.5),
                    alpha: 0.0,
                    beta: 0.0,
                },
                CoeffSpec {
                    kernel: mobius(0.0, 0.8),
                    alpha: 0.0,
                    beta: 0.0,
                },
            ],
            shearing_coeffs: vec![[1.0, 0.0], [0.5, 0.3]],
            flow: Some(FlowSpec {
                family: 4,
                betas: vec![0.0, std::f64::consts::FRAC_PI_4],
                t_end: 2.0,
                steps_per_unit: 1000,
                ratio_t: 20.0,
            }),
            loewner: Some(LoewnerSpec {
                family: 0,
                m_family: 4,
                ahat: 0.25,
                bhat: 0.5,
                n: 2,
                s: 0.2,
                t: 0.7,
                u: 1.2,
                dt: 1e-4,
                samples: 10,
            }),
            growth_upper_scale: 1.0,
            extremum_budget: 400,
        }
    }
}

/// One pass/fail line of the suite.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteRecord {
    pub name: String,
    /// The inequality or identity the record checks.
    pub law: String,
    pub samples: usize,
    pub worst_margin: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SuiteRecord {
    fn gated(name: String, law: &str, samples: usize, worst_margin: f64, tolerance: f64) -> Self {
        SuiteRecord {
            name,
            law: law.to_string(),
            samples,
            worst_margin,
            tolerance,
            pass: worst_margin >= -tolerance,
        }
    }

    fn failure(name: String, law: &str, err: &Error) -> Self {
        SuiteRecord {
            name,
            law: format!("{law} [error: {err}]"),
            samples: 0,
            worst_margin: f64::NEG_INFINITY,
            tolerance: 0.0,
            pass: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub pass: bool,
    pub wall_time_s: f64,
    pub records: Vec<SuiteRecord>,
}

impl SuiteReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("suite report serializes")
    }

    /// Deterministic CSV: fixed column order and no timing column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,law,samples,worst_margin,tolerance,pass\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.name,
                r.law,
                r.samples,
                fmt_g17(r.worst_margin),
                fmt_g17(r.tolerance),
                r.pass
            ));
        }
        out
    }
}

enum MemberMap {
    OneD(Func1DMap),
    Lifted(ExtendedMap),
}

impl MemberMap {
    fn as_map(&self) -> &dyn BallMap {
        match self {
            MemberMap::OneD(m) => m,
            MemberMap::Lifted(m) => m,
        }
    }
}

fn parse_kernel(v: &serde_json::Value) -> Result<Kernel<f64>> {
    Kernel::from_json(&v.to_string())
}

fn build_base(kernel: &Kernel<f64>, base: &BaseSpec) -> Result<Func1D<f64>> {
    match base {
        BaseSpec::Synth { synth } => {
            synth_gstarlike_1d(kernel, C::new(synth.c[0], synth.c[1]), synth.degree)
        }
        BaseSpec::Func(v) => Func1D::from_json(&v.to_string()),
    }
}

fn build_member(fam: &FamilySpec) -> Result<(Kernel<f64>, Func1D<f64>, MemberMap)> {
    let kernel = parse_kernel(&fam.kernel)?;
    let base = build_base(&kernel, &fam.base)?;
    let member = match &fam.extend {
        Some(e) => MemberMap::Lifted(modified_rs(
            &base,
            ExtensionParams::new(e.ahat, e.bhat)?,
            e.n,
        )?),
        None => MemberMap::OneD(Func1DMap(base.clone())),
    };
    Ok((kernel, base, member))
}

fn growth_bounds_for(kernel: &Kernel<f64>, r: f64) -> Result<(f64, f64)> {
    match kernel.mobius_params() {
        Some((a, b)) => growth_bounds_closed(a, b, 0.0, r),
        None => growth_bounds_quadrature(kernel, 0.0, r),
    }
}

fn family_records(cfg: &SuiteConfig, fi: usize) -> Vec<SuiteRecord> {
    let fam = &cfg.families[fi];
    let tag = |s: &str| format!("{s}[family={fi}]");
    let (kernel, _base, member) = match build_member(fam) {
        Ok(x) => x,
        Err(e) => {
            return vec![SuiteRecord::failure(
                tag("family-build"),
                "construction",
                &e,
            )]
        }
    };
    let map = member.as_map();
    let n = map.dim();
    let mut out = Vec::new();
    let seed = splitmix64(cfg.seed ^ (fi as u64).wrapping_mul(0x1234_5678_9abc_def1));

    // Membership of the certified member.
    let rmax = cfg.radii.iter().cloned().fold(0.0f64, f64::max).min(0.9);
    let plan = SamplePlan {
        radii: 10,
        dirs: cfg.dirs.max(8),
        rmin: 0.05,
        rmax,
        seed,
    };
    match membership_verdict(map, Mode::SGStar, &kernel, &ClassParams::zero(), &plan) {
        Ok(v) => out.push(SuiteRecord::gated(
            tag("membership"),
            "starlikeness-ratio stays in the kernel range",
            v.samples_used,
            v.worst_margin,
            TOL_MEMBERSHIP,
        )),
        Err(e) => out.push(SuiteRecord::failure(tag("membership"), "membership", &e)),
    }

    // Growth sandwich and the unit-vector distortion bound.
    let run_growth = || -> Result<(SuiteRecord, SuiteRecord, Option<SuiteRecord>)> {
        let mut lower_margin = f64::INFINITY;
        let mut upper_margin = f64::INFINITY;
        let mut unit_margin = f64::INFINITY;
        let mut samples = 0usize;
        let mobius = kernel.mobius_params();
        for (ri, &r) in cfg.radii.iter().enumerate() {
            let (phi1, phi2) = growth_bounds_for(&kernel, r)?;
            let ub = match mobius {
                Some((a, b)) => {
                    let (f1, _) = distortion_factors(a, b, &ClassParams::zero(), r)?;
                    let (_, gu) = growth_bounds_closed(a, b, 0.0, r)?;
                    Some(gu / (f1 * r))
                }
                None => None,
            };
            for d in 0..cfg.dirs {
                let z = sphere_point(n, r, seed, (1 + ri * cfg.dirs + d) as u64);
                let v = map.eval(&z)?.norm();
                lower_margin = lower_margin.min(v - phi1);
                upper_margin = upper_margin.min(cfg.growth_upper_scale * phi2 - v);
                if let Some(ub) = ub {
                    let f = map.eval(&z)?;
                    let hv = map.solve_jacobian(&z, &f)?;
                    let unit = hv.scale(C::new(1.0 / hv.norm(), 0.0));
                    let jv = map.jacobian(&z)?.mul_vec(&unit)?;
                    unit_margin = unit_margin.min(ub - jv.norm());
                }
                samples += 1;
            }
        }
        let lo = SuiteRecord::gated(
            tag("growth-lower"),
            "lower growth bound <= ||F||",
            samples,
            lower_margin,
            TOL_GROWTH,
        );
        let hi = SuiteRecord::gated(
            tag("growth-upper"),
            "||F|| <= upper growth bound",
            samples,
            upper_margin,
            TOL_GROWTH,
        );
        let uv = mobius.map(|_| {
            SuiteRecord::gated(
                tag("unitvec-upper"),
                "||J_F v|| <= growth-upper/(F1 r)",
                samples,
                unit_margin,
                TOL_DISTORTION,
            )
        });
        Ok((lo, hi, uv))
    };
    match run_growth() {
        Ok((lo, hi, uv)) => {
            out.push(lo);
            out.push(hi);
            if let Some(uv) = uv {
                out.push(uv);
            }
        }
        Err(e) => out.push(SuiteRecord::failure(tag("growth"), "growth sandwich", &e)),
    }

    // Distortion at heuristically-found sphere extrema (lifted members only).
    if n >= 2 {
        if let Some((a, b)) = kernel.mobius_params() {
            let run_distortion = || -> Result<Vec<SuiteRecord>> {
                let mut recs = Vec::new();
                let p0 = ClassParams::zero();
                let mut du = f64::INFINITY;
                let mut tu = f64::INFINITY;
                let mut dl = f64::INFINITY;
                let mut tl = f64::INFINITY;
                let mut bl = f64::INFINITY;
                let mut bi = f64::INFINITY;
                for &r in &cfg.radii {
                    let bounds = distortion_bounds(a, b, &p0, r, n)?;
                    let (zmax, _) =
                        sphere_extremum(map, r, ExtremumMode::Max, cfg.extremum_budget, seed)?;
                    let (zmin, _) =
                        sphere_extremum(map, r, ExtremumMode::Min, cfg.extremum_budget, seed ^ 1)?;
                    let (zmax, m) = polish_extremum(map, &zmax, r, ExtremumMode::Max)?;
                    let (zmin, _) = polish_extremum(map, &zmin, r, ExtremumMode::Min)?;
                    let jmax = map.jacobian(&zmax)?;
                    let jmin = map.jacobian(&zmin)?;
                    du = du.min(bounds.det_upper - jmax.lu()?.det().norm());
                    dl = dl.min(jmin.lu()?.det().norm() - bounds.det_lower);
                    for delta in crate::verify::tangent_frame(&zmax)? {
                        tu = tu.min(bounds.tangent_upper - jmax.mul_vec(&delta)?.norm());
                    }
                    for delta in crate::verify::tangent_frame(&zmin)? {
                        tl = tl.min(jmin.mul_vec(&delta)?.norm() - bounds.tangent_lower);
                    }
                    // Boundary contact at the rescaled max point.
                    let resc = RescaledMap { inner: map, r, m };
                    let data = boundary_lambda(&resc, &zmax.scale(C::new(1.0 / r, 0.0)))?;
                    let (f1, _) = distortion_factors(a, b, &p0, r)?;
                    bl = bl.min(1.0 / f1 - data.lambda);
                    bi = bi.min(TOL_BOUNDARY_IMAG - data.lambda_imag_residual);
                }
                let k = cfg.radii.len();
                recs.push(SuiteRecord::gated(
                    tag("det-upper"),
                    "|det J| at max point <= bound",
                    k,
                    du,
                    TOL_DISTORTION,
                ));
                recs.push(SuiteRecord::gated(
                    tag("tangent-upper"),
                    "||J delta|| at max point <= bound",
                    k,
                    tu,
                    TOL_DISTORTION,
                ));
                recs.push(SuiteRecord::gated(
                    tag("det-lower"),
                    "|det J| at min point >= bound",
                    k,
                    dl,
                    TOL_DISTORTION,
                ));
                recs.push(SuiteRecord::gated(
                    tag("tangent-lower"),
                    "||J delta|| at min point >= bound",
                    k,
                    tl,
                    TOL_DISTORTION,
                ));
                recs.push(SuiteRecord::gated(
                    tag("boundary-lambda"),
                    "contact coefficient <= 1/F1",
                    k,
                    bl,
                    TOL_DISTORTION,
                ));
                recs.push(SuiteRecord::gated(
                    tag("boundary-imag"),
                    "contact coefficient is real",
                    k,
                    bi,
                    0.0,
                ));
                Ok(recs)
            };
            match run_distortion() {
                Ok(mut recs) => out.append(&mut recs),
                Err(e) => out.push(SuiteRecord::failure(
                    tag("distortion"),
                    "distortion at extrema",
                    &e,
                )),
            }
        }
    }
    out
}

fn field_records(cfg: &SuiteConfig, xi: usize) -> Vec<SuiteRecord> {
    let spec = &cfg.fields[xi];
    let tag = |s: &str| format!("{s}[field={xi}]");
    let run = || -> Result<Vec<SuiteRecord>> {
        let kernel = parse_kernel(&spec.kernel)?;
        let params = ClassParams::new(spec.alpha, spec.beta)?;
        let field =
            CertifiedField::new(spec.n, kernel.clone(), C::new(spec.c[0], spec.c[1]), params)?;
        let seed = splitmix64(cfg.seed ^ 0xf1e1d ^ (xi as u64) << 7);
        let eib = C::from_polar(1.0, -spec.beta);
        let mut m1 = f64::INFINITY;
        let mut m2 = f64::INFINITY;
        let mut m3 = f64::INFINITY;
        let mut m4 = f64::INFINITY;
        let mut samples = 0usize;
        for (ri, &r) in cfg.radii.iter().enumerate() {
            let (b1, b2) = lemma23_b12(&kernel, &params, r)?;
            let sw = lemma23_bounds(&kernel, &params, r)?;
            for d in 0..cfg.dirs {
                let z = sphere_point(spec.n, r, seed, (ri * cfg.dirs + d) as u64);
                let hz = field.eval(&z)?;
                let ip = hz.inner(&z)?;
                let real_part = (eib * ip).re;
                m1 = m1.min(real_part - b1);
                m2 = m2.min(b2 - real_part);
                m3 = m3.min(ip.norm() - sw.b3);
                m4 = m4.min(sw.b4 - ip.norm());
                samples += 1;
            }
        }
        Ok(vec![
            SuiteRecord::gated(
                tag("sandwich-lower-real"),
                "B1 <= Re<e^{-ib}h, z>",
                samples,
                m1,
                TOL_SANDWICH,
            ),
            SuiteRecord::gated(
                tag("sandwich-upper-real"),
                "Re<e^{-ib}h, z> <= B2",
                samples,
                m2,
                TOL_SANDWICH,
            ),
            SuiteRecord::gated(
                tag("sandwich-lower-abs"),
                "B3 <= |<h, z>|",
                samples,
                m3,
                TOL_SANDWICH,
            ),
            SuiteRecord::gated(
                tag("sandwich-upper-abs"),
                "|<h, z>| <= B4",
                samples,
                m4,
                TOL_SANDWICH,
            ),
        ])
    };
    match run() {
        Ok(recs) => recs,
        Err(e) => vec![SuiteRecord::failure(
            tag("sandwich"),
            "inner-product sandwich",
            &e,
        )],
    }
}

fn coeff_records(cfg: &SuiteConfig, ci: usize) -> Vec<SuiteRecord> {
    let spec = &cfg.coeff_kernels[ci];
    let tag = |s: &str| format!("{s}[coeff={ci}]");
    let run = || -> Result<Vec<SuiteRecord>> {
        let kernel = parse_kernel(&spec.kernel)?;
        let params = ClassParams::new(spec.alpha, spec.beta)?;
        let cb = coeff_bound(&kernel, &params)?;
        let onema = 1.0 - params.alpha;
        let mut scan1 = f64::INFINITY;
        let mut scan2 = f64::INFINITY;
        for i in 0..COEFF_SCAN_POINTS {
            let r = 1e-9 + (1.0 - 2e-9) * i as f64 / (COEFF_SCAN_POINTS - 1) as f64;
            let (mn, mx) = kernel.circle_extrema(r)?;
            scan1 = scan1.min((1.0 - (onema * mn + params.alpha)) / r);
            scan2 = scan2.min(((onema * mx + params.alpha) - 1.0) / r);
        }
        let dev = (cb.a1 - scan1).abs().max((cb.a2 - scan2).abs());
        Ok(vec![
            SuiteRecord::gated(tag("coeff-positive"), "min(a1, a2) > 0", 2, cb.a0, 0.0),
            SuiteRecord::gated(
                tag("coeff-scan"),
                "minimizer agrees with the dense scan",
                COEFF_SCAN_POINTS,
                TOL_COEFF - dev,
                0.0,
            ),
        ])
    };
    match run() {
        Ok(recs) => recs,
        Err(e) => vec![SuiteRecord::failure(tag("coeff"), "coefficient bound", &e)],
    }
}

fn shearing_records(cfg: &SuiteConfig, si: usize) -> Vec<SuiteRecord> {
    let c = C::new(cfg.shearing_coeffs[si][0], cfg.shearing_coeffs[si][1]);
    let tag = |s: &str| format!("{s}[shear={si}]");
    // sup over the unit sphere of |<h^{[c]}(z), z> - ||z||^2| = |c| sup t(1-t^2)
    // with t = |z1|; scan the 1-D profile densely.
    let mut sup = 0.0f64;
    for i in 0..SHEARING_SCAN_POINTS {
        let t = i as f64 / (SHEARING_SCAN_POINTS - 1) as f64;
        sup = sup.max(t * (1.0 - t * t));
    }
    sup *= c.norm();
    let expect = c.norm() * 2.0 / (3.0 * 3.0_f64.sqrt());
    let dev = (sup - expect).abs();
    vec![SuiteRecord::gated(
        tag("shearing-sup"),
        "sup |<h^{[c]} z, z>/||z||^2 - 1| = |c| 2/(3 sqrt 3)",
        SHEARING_SCAN_POINTS,
        TOL_SHEARING - dev,
        0.0,
    )]
}

fn flow_records(cfg: &SuiteConfig, bi: usize) -> Vec<SuiteRecord> {
    let spec = cfg
        .flow
        .as_ref()
        .expect("flow cell only built when configured");
    let beta = spec.betas[bi];
    let tag = |s: &str| format!("{s}[beta={bi}]");
    let run = || -> Result<Vec<SuiteRecord>> {
        let fam = cfg
            .families
            .get(spec.family)
            .ok_or_else(|| Error::InvalidParam("flow family index out of range".into()))?;
        let (_, _, member) = build_member(fam)?;
        let map = member.as_map();
        let n = map.dim();
        let z0 = sphere_point(n, 0.4, splitmix64(cfg.seed ^ 0xf10a), 0);
        let steps = (spec.t_end * spec.steps_per_unit as f64).ceil() as usize;
        let traj = spirallike_flow(map, &z0, beta, spec.t_end, steps)?;
        let f0 = traj.f_norms[0];
        let mut dev = 0.0f64;
        for (t, fnorm) in traj.times.iter().zip(traj.f_norms.iter()) {
            dev = dev.max((fnorm * (t * beta.cos()).exp() / f0 - 1.0).abs());
        }
        let monotone_margin = if traj.norm_strictly_decreasing {
            0.0
        } else {
            f64::NEG_INFINITY
        };
        // Long-horizon ratio ||F(z(t))||/||z(t)|| -> 1.
        let long_steps = (spec.ratio_t * spec.steps_per_unit as f64).ceil() as usize;
        let long = spirallike_flow(map, &z0, beta, spec.ratio_t, long_steps)?;
        let ratio = long.f_norms.last().unwrap() / long.states.last().unwrap().norm();
        Ok(vec![
            SuiteRecord::gated(
                tag("flow-norm-law"),
                "||F(z(t))|| e^{t cos b} is constant",
                traj.times.len(),
                TOL_FLOW_LAW - dev,
                0.0,
            ),
            SuiteRecord::gated(
                tag("flow-monotone"),
                "||z(t)|| is strictly monotone (measured: decreasing)",
                traj.times.len(),
                monotone_margin,
                0.0,
            ),
            SuiteRecord::gated(
                tag("flow-ratio"),
                "||F(z(t))||/||z(t)|| -> 1 at the long horizon",
                long.times.len(),
                FLOW_RATIO_BAND - (ratio - 1.0).abs(),
                0.0,
            ),
        ])
    };
    match run() {
        Ok(recs) => recs,
        Err(e) => vec![SuiteRecord::failure(tag("flow"), "spirallike flow", &e)],
    }
}

fn loewner_records(cfg: &SuiteConfig) -> Vec<SuiteRecord> {
    let spec = cfg
        .loewner
        .as_ref()
        .expect("loewner cell only built when configured");
    let tag = |s: &str| format!("{s}[loewner]");
    let run = || -> Result<Vec<SuiteRecord>> {
        let fam = cfg
            .families
            .get(spec.family)
            .ok_or_else(|| Error::InvalidParam("loewner family index out of range".into()))?;
        let (kernel, base, _) = build_member(fam)?;
        let mfam = cfg
            .families
            .get(spec.m_family)
            .ok_or_else(|| Error::InvalidParam("loewner m_family index out of range".into()))?;
        let (_, mbase, _) = build_member(mfam)?;
        let chain = starlike_chain(&base, &kernel)?;
        let params = ExtensionParams::new(spec.ahat, spec.bhat)?;
        let nd = rs_chain(starlike_chain(&base, &kernel)?, params, spec.n)?;
        let seed = splitmix64(cfg.seed ^ 0x10e4);
        let mut sub1 = 0.0f64;
        let mut subn = 0.0f64;
        let mut semi = 0.0f64;
        let mut pde = 0.0f64;
        let mut comm = 0.0f64;
        let mut field_margin = f64::INFINITY;
        for i in 0..spec.samples {
            let r = 0.1 + 0.5 * (i as f64 / spec.samples.max(2) as f64);
            let z1 = sphere_point(1, r, seed, i as u64)[0];
            let z = sphere_point(spec.n, r, seed, (1000 + i) as u64);
            // 1-D subordination f(z, s) = f(v(z, s, t), t)
            let v = transition_1d(&chain, z1, spec.s, spec.t)?;
            sub1 = sub1.max((chain.value(z1, spec.s) - chain.value(v, spec.t)).norm());
            // lifted subordination and the semigroup law
            let vn = transition_nd(&nd, &z, spec.s, spec.t)?;
            subn = subn.max(nd.value(&z, spec.s)?.dist(&nd.value(&vn, spec.t)?));
            let direct = transition_nd(&nd, &z, spec.s, spec.u)?;
            let two = transition_nd(
                &nd,
                &transition_nd(&nd, &z, spec.s, spec.t)?,
                spec.t,
                spec.u,
            )?;
            semi = semi.max(direct.dist(&two));
            // evolution residuals
            pde = pde.max(pde_residual_1d(&chain, z1, spec.t, spec.dt)?);
            field_margin = field_margin.min(recovered_field_margin(&nd, &z, spec.t, spec.dt)?);
            // operator commutation
            comm = comm.max(commutation_identity_check(
                &mbase, &chain, &params, spec.n, spec.t, &z,
            )?);
        }
        Ok(vec![
            SuiteRecord::gated(
                tag("subordination-1d"),
                "f(z, s) = f(v(z, s, t), t)",
                spec.samples,
                TOL_SUBORDINATION - sub1,
                0.0,
            ),
            SuiteRecord::gated(
                tag("subordination-nd"),
                "F(z, s) = F(V(z, s, t), t)",
                spec.samples,
                TOL_SUBORDINATION - subn,
                0.0,
            ),
            SuiteRecord::gated(
                tag("semigroup"),
                "V(., s, u) = V(V(., s, t), t, u)",
                spec.samples,
                TOL_SEMIGROUP - semi,
                0.0,
            ),
            SuiteRecord::gated(
                tag("pde-residual"),
                "dF/dt = J_F h",
                spec.samples,
                TOL_PDE_RESIDUAL - pde,
                0.0,
            ),
            SuiteRecord::gated(
                tag("recovered-field"),
                "recovered field stays in the kernel range",
                spec.samples,
                field_margin,
                TOL_RECOVERED_FIELD,
            ),
            SuiteRecord::gated(
                tag("commutation"),
                "e^t M(V(z, t)) = Phi(e^t m o v_t)(z)",
                spec.samples,
                TOL_COMMUTATION - comm,
                0.0,
            ),
        ])
    };
    match run() {
        Ok(recs) => recs,
        Err(e) => vec![SuiteRecord::failure(tag("loewner"), "chain machinery", &e)],
    }
}

enum Cell {
    Family(usize),
    Field(usize),
    Coeff(usize),
    Shearing(usize),
    Flow(usize),
    Loewner,
}

/// Runs every configured check; errors become failing records, never aborts.
pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let start = std::time::Instant::now();
    let mut cells = Vec::new();
    for i in 0..cfg.families.len() {
        cells.push(Cell::Family(i));
    }
    for i in 0..cfg.fields.len() {
        cells.push(Cell::Field(i));
    }
    for i in 0..cfg.coeff_kernels.len() {
        cells.push(Cell::Coeff(i));
    }
    for i in 0..cfg.shearing_coeffs.len() {
        cells.push(Cell::Shearing(i));
    }
    if let Some(flow) = &cfg.flow {
        for i in 0..flow.betas.len() {
            cells.push(Cell::Flow(i));
        }
    }
    if cfg.loewner.is_some() {
        cells.push(Cell::Loewner);
    }
    let nested: Vec<Vec<SuiteRecord>> = cells
        .par_iter()
        .map(|cell| match cell {
            Cell::Family(i) => family_records(cfg, *i),
            Cell::Field(i) => field_records(cfg, *i),
            Cell::Coeff(i) => coeff_records(cfg, *i),
            Cell::Shearing(i) => shearing_records(cfg, *i),
            Cell::Flow(i) => flow_records(cfg, *i),
            Cell::Loewner => loewner_records(cfg),
        })
        .collect();
    let records: Vec<SuiteRecord> = nested.into_iter().flatten().collect();
    let pass = records.iter().all(|r| r.pass);
    SuiteReport {
        seed: cfg.seed,
        pass,
        wall_time_s: start.elapsed().as_secs_f64(),
        records,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_passes_with_empty_report() {
        let cfg = SuiteConfig {
            seed: 1,
            radii: default_radii(),
            dirs: 8,
            families: vec![],
            fields: vec![],
            coeff_kernels: vec![],
            shearing_coeffs: vec![],
            flow: None,
            loewner: None,
            growth_upper_scale: 1.0,
            extremum_budget: 16,
        };
        let report = run_suite(&cfg);
        assert!(report.pass);
        assert!(report.records.is_empty());
        assert_eq!(
            report.to_csv(),
            "name,law,samples,worst_margin,tolerance,pass\n"
        );
    }

    #[test]
    fn corrupted_upper_bound_fails_growth_check() {
        let mut cfg = SuiteConfig::default_config();
        cfg.families.truncate(1);
        cfg.fields.clear();
        cfg.coeff_kernels.clear();
        cfg.shearing_coeffs.clear();
        cfg.flow = None;
        cfg.loewner = None;
        cfg.dirs = 8;
        cfg.growth_upper_scale = 0.5;
        let report = run_suite(&cfg);
        assert!(!report.pass);
        let rec = report
            .records
            .iter()
            .find(|r| r.name.starts_with("growth-upper"))
            .expect("growth record present");
        assert!(!rec.pass);
        assert!(rec.worst_margin < 0.0);
    }

    #[test]
    fn config_json_round_trip_rejects_unknown_fields() {
        let cfg = SuiteConfig::default_config();
        let text = serde_json::to_string(&cfg.to_json()).unwrap();
        let back = SuiteConfig::from_json(&text).unwrap();
        assert_eq!(back.seed, cfg.seed);
        assert_eq!(back.families.len(), cfg.families.len());
        assert!(SuiteConfig::from_json("{\"seed\": 1, \"definitely_not_a_field\": 2}").is_err());
    }
}
