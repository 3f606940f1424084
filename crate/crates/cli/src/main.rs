//! Command-line surface: bound tables, membership checks, operator
//! application, chain and flow runs, and the verification suite.

mod spec;

use anyhow::{Context, Result};
use ballmap::bounds::{coeff_bound, growth_bounds_quadrature, BoundReport, BOUND_REPORT_HEADER};
use ballmap::classes::{membership_verdict, ClassParams, Mode, SamplePlan};
use ballmap::extend::ExtendedMap;
use ballmap::loewner::{
    pde_residual_1d, recovered_field_margin, rs_chain, spirallike_flow, starlike_chain,
};
use ballmap::map::BallMap;
use ballmap::report::{fmt_c17, fmt_g17};
use ballmap::suite::{run_suite, SuiteConfig};
use ballmap::verify::sphere_point;
use clap::{Args, Parser, Subcommand};
use spec::{
    parse_func1d, parse_kernel, parse_map_subject, parse_point, parse_radius_grid, Subject,
};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_NON_MEMBER: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ballmap",
    about = "Growth/distortion bound tables, class-membership checks, extension operators, chains, flows, and the verification suite",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the bound table over a radius grid and emit CSV
    Bounds(BoundsArgs),
    /// Sampled class-membership verdict for a mapping
    Check(CheckArgs),
    /// Apply an extension operator and emit sampled evaluations
    Extend(ExtendArgs),
    /// Chain evaluation along t, or a spirallike flow trajectory
    Chain(ChainArgs),
    /// Run the verification suite
    Suite(SuiteArgs),
}

#[derive(Args)]
struct BoundsArgs {
    /// Kernel spec: mobius:A,B or generic:NAME
    #[arg(long, default_value = "mobius:-1,1")]
    kernel: String,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Radius grid: start:end:count, or a single radius
    #[arg(long, default_value = "0.1:0.9:9")]
    radii: String,
    /// Dimension used by the determinant bounds
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Append quadrature growth columns and a max-discrepancy summary
    #[arg(long)]
    compare_quadrature: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Map spec: identity, koebe, neg, mobius-starlike:A,B,c_re,c_im (c_im optional), or FILE.json
    #[arg(long)]
    map: String,
    /// One of m, m_g, m_tilde, s_hat, s_g_star, spirallike, almost_starlike
    #[arg(long, default_value = "s_g_star")]
    mode: String,
    #[arg(long, default_value = "mobius:-1,1")]
    kernel: String,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Dimension for builtin polynomial maps
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 24)]
    radii_count: usize,
    #[arg(long, default_value_t = 200)]
    dirs: usize,
    #[arg(long, default_value_t = 0.05)]
    rmin: f64,
    #[arg(long, default_value_t = 0.95)]
    rmax: f64,
    #[arg(long, default_value_t = 0xba11_5eed)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExtendArgs {
    /// 1-D base: identity, koebe, mobius-starlike:A,B,c_re,c_im (c_im optional), or FILE.json
    #[arg(long)]
    f: Option<String>,
    /// Polynomial base for the determinant-power operator: identity | FILE.json
    #[arg(long)]
    map: Option<String>,
    /// Operator: roper-suffridge | modified | pfaltzgraff
    #[arg(long, default_value = "modified")]
    op: String,
    #[arg(long, default_value_t = 0.0)]
    ahat: f64,
    #[arg(long, default_value_t = 0.5)]
    bhat: f64,
    /// Output dimension (for pfaltzgraff: the base dimension)
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Samples per radius
    #[arg(long, default_value_t = 16)]
    samples: usize,
    #[arg(long, default_value = "0.1:0.9:5")]
    radii: String,
    #[arg(long, default_value_t = 0xba11_5eed)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the operator metadata JSON
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Args)]
struct ChainArgs {
    /// Integrate the spirallike flow instead of evaluating the chain
    #[arg(long)]
    flow: bool,
    /// 1-D chain base (chain mode) or extension base (flow mode)
    #[arg(long)]
    f: Option<String>,
    /// Polynomial map for flow mode: identity | FILE.json
    #[arg(long)]
    map: Option<String>,
    #[arg(long, default_value = "mobius:-1,1")]
    kernel: String,
    #[arg(long, default_value_t = 0.0)]
    ahat: f64,
    #[arg(long, default_value_t = 0.5)]
    bhat: f64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Spirallike rotation angle
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Start point, "re,im;re,im;..."
    #[arg(long, default_value = "0.3,0;0.2,0.1")]
    z: String,
    /// Time grid for chain mode: start:end:count or a single time
    #[arg(long, default_value = "0:1:11")]
    times: String,
    #[arg(long, default_value_t = 1e-4)]
    dt: f64,
    #[arg(long, default_value_t = 2.0)]
    t_end: f64,
    #[arg(long, default_value_t = 2000)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// "default" or a path to a suite config JSON
    #[arg(long, default_value = "default")]
    config: String,
    #[arg(long, default_value = "report.json")]
    out: PathBuf,
    #[arg(long, default_value = "report.csv")]
    csv: PathBuf,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_bounds(args: &BoundsArgs) -> Result<u8> {
    let kernel = match parse_kernel(&args.kernel) {
        Ok(k) => k,
        Err(e) => {
            eprintln!("invalid kernel: {e}");
            return Ok(EXIT_INVALID);
        }
    };
    let params = match ClassParams::new(args.alpha, args.beta) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("invalid parameters: {e}");
            return Ok(EXIT_INVALID);
        }
    };
    let radii = match parse_radius_grid(&args.radii) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("invalid radius grid: {e}");
            return Ok(EXIT_INVALID);
        }
    };
    if args.n == 0 {
        eprintln!("invalid dimension: n must be at least 1");
        return Ok(EXIT_INVALID);
    }
    let run = || -> ballmap::Result<String> {
        let coeff = coeff_bound(&kernel, &params)?;
        let mut csv = String::new();
        let mut header = BOUND_REPORT_HEADER.to_string();
        if args.compare_quadrature {
            header.push_str(",phi1_quad,phi2_quad");
        }
        csv.push_str(&header);
        csv.push('\n');
        let mut max_rel: f64 = 0.0;
        for &r in &radii {
            let rep = BoundReport::compute(&kernel, &params, args.n, r, Some(&coeff))?;
            csv.push_str(&rep.csv_row());
            if args.compare_quadrature {
                let (q1, q2) = growth_bounds_quadrature(&kernel, params.alpha, r)?;
                csv.push_str(&format!(",{},{}", fmt_g17(q1), fmt_g17(q2)));
                if r > 0.0 {
                    max_rel = max_rel
                        .max((rep.phi1 - q1).abs() / rep.phi1.abs().max(1e-300))
                        .max((rep.phi2 - q2).abs() / rep.phi2.abs().max(1e-300));
                }
            }
            csv.push('\n');
        }
        if args.compare_quadrature {
            csv.push_str(&format!("# max_rel_discrepancy={}\n", fmt_g17(max_rel)));
        }
        Ok(csv)
    };
    match run() {
        Ok(csv) => {
            emit(&args.out, &csv)?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            eprintln!("numeric failure: {e}");
            Ok(EXIT_NUMERIC)
        }
    }
}

fn cmd_check(args: &CheckArgs) -> Result<u8> {
    let parsed = (|| -> ballmap::Result<_> {
        let kernel = parse_kernel(&args.kernel)?;
        let mode = Mode::parse(&args.mode)?;
        let params = ClassParams::new(args.alpha, args.beta)?;
        let subject = parse_map_subject(&args.map, args.n)?;
        let plan = SamplePlan {
            radii: args.radii_count,
            dirs: args.dirs,
            rmin: args.rmin,
            rmax: args.rmax,
            seed: args.seed,
        };
        plan.validate()?;
        Ok((kernel, mode, params, subject, plan))
    })();
    let (kernel, mode, params, subject, plan) = match parsed {
        Ok(x) => x,
        Err(e) => {
            eprintln!("invalid input: {e}");
            return Ok(EXIT_INVALID);
        }
    };
    match membership_verdict(subject.as_map(), mode, &kernel, &params, &plan) {
        Ok(v) => {
            let text = serde_json::to_string_pretty(&v.to_json())? + "\n";
            emit(&args.out, &text)?;
            Ok(if v.member { EXIT_OK } else { EXIT_NON_MEMBER })
        }
        Err(e) => {
            eprintln!("membership evaluation failed: {e}");
            Ok(EXIT_NUMERIC)
        }
    }
}

fn build_extension(args: &ExtendArgs) -> ballmap::Result<ExtendedMap> {
    match args.op.as_str() {
        "roper-suffridge" | "modified" => {
            let spec = args.f.as_deref().unwrap_or("koebe");
            let f = parse_func1d(spec)?;
            if args.op == "roper-suffridge" {
                ballmap::extend::roper_suffridge(&f, args.n)
            } else {
                ballmap::extend::modified_rs(
                    &f,
                    ballmap::extend::ExtensionParams::new(args.ahat, args.bhat)?,
                    args.n,
                )
            }
        }
        "pfaltzgraff" => {
            let spec = args.map.as_deref().unwrap_or("identity");
            let base = match parse_map_subject(spec, args.n)? {
                Subject::Poly(h) => h,
                Subject::Disk(_) => {
                    return Err(ballmap::Error::InvalidParam(
                        "the determinant-power operator takes a polynomial map base".into(),
                    ))
                }
            };
            ballmap::extend::pfaltzgraff_suffridge(&base, args.ahat)
        }
        other => Err(ballmap::Error::InvalidParam(format!(
            "unknown operator '{other}'"
        ))),
    }
}

fn cmd_extend(args: &ExtendArgs) -> Result<u8> {
    let radii = match parse_radius_grid(&args.radii) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("invalid radius grid: {e}");
            return Ok(EXIT_INVALID);
        }
    };
    let op = match build_extension(args) {
        Ok(op) => op,
        Err(e) => {
            eprintln!("invalid operator spec: {e}");
            return Ok(EXIT_INVALID);
        }
    };
    let n = op.dim();
    let run = || -> ballmap::Result<String> {
        let mut csv = String::from("r,index");
        for i in 0..n {
            csv.push_str(&format!(",z{i}_re,z{i}_im"));
        }
        for i in 0..n {
            csv.push_str(&format!(",F{i}_re,F{i}_im"));
        }
        csv.push('\n');
        for (ri, &r) in radii.iter().enumerate() {
            for s in 0..args.samples {
                let z = if r == 0.0 {
                    ballmap::CVec64::zero(n)
                } else {
                    sphere_point(n, r, args.seed, (ri * args.samples + s) as u64)
                };
                let v = op.eval(&z)?;
                csv.push_str(&fmt_g17(r));
                csv.push_str(&format!(",{s}"));
                for i in 0..n {
                    csv.push(',');
                    csv.push_str(&fmt_c17(z[i]));
                }
                for i in 0..n {
                    csv.push(',');
                    csv.push_str(&fmt_c17(v[i]));
                }
                csv.push('\n');
            }
        }
        Ok(csv)
    };
    match run() {
        Ok(csv) => {
            let meta = serde_json::to_string_pretty(&op.metadata())? + "\n";
            emit(&args.out, &csv)?;
            match (&args.meta, &args.out) {
                (Some(path), _) => std::fs::write(path, &meta)?,
                (None, Some(_)) => print!("{meta}"),
                (None, None) => eprint!("{meta}"),
            }
            Ok(EXIT_OK)
        }
        Err(e) => {
            eprintln!("numeric failure: {e}");
            Ok(EXIT_NUMERIC)
        }
    }
}

fn cmd_chain(args: &ChainArgs) -> Result<u8> {
    let z0 = match parse_point(&args.z) {
        Ok(z) => z,
        Err(e) => {
            eprintln!("invalid start point: {e}");
            return Ok(EXIT_INVALID);
        }
    };
    if args.flow {
        return cmd_flow(args, z0);
    }
    let times = match parse_radius_grid(&args.times) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("invalid time grid: {e}");
            return Ok(EXIT_INVALID);
        }
    };
    let built = (|| -> ballmap::Result<_> {
        let kernel = parse_kernel(&args.kernel)?;
        let spec = args.f.as_deref().unwrap_or("koebe");
        let f = parse_func1d(spec)?;
        let chain = starlike_chain(&f, &kernel)?;
        Ok(chain)
    })();
    let chain = match built {
        Ok(c) => c,
        Err(e) => {
            eprintln!("invalid chain spec: {e}");
            return Ok(EXIT_INVALID);
        }
    };
    let run = || -> ballmap::Result<String> {
        if args.n <= 1 || z0.dim() == 1 {
            let z1 = z0[0];
            let mut csv = String::from("t,F_re,F_im,norm_F,pde_residual\n");
            for &t in &times {
                let v = chain.value(z1, t);
                let res = pde_residual_1d(&chain, z1, t.max(args.dt), args.dt)?;
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_g17(t),
                    fmt_c17(v),
                    fmt_g17(v.norm()),
                    fmt_g17(res)
                ));
            }
            Ok(csv)
        } else {
            let params = ballmap::extend::ExtensionParams::new(args.ahat, args.bhat)?;
            let nd = rs_chain(chain, params, args.n)?;
            let mut csv = String::from("t");
            for i in 0..args.n {
                csv.push_str(&format!(",F{i}_re,F{i}_im"));
            }
            csv.push_str(",norm_F,field_margin\n");
            for &t in &times {
                let v = nd.value(&z0, t)?;
                let margin = recovered_field_margin(&nd, &z0, t.max(args.dt), args.dt)?;
                csv.push_str(&fmt_g17(t));
                for i in 0..args.n {
                    csv.push(',');
                    csv.push_str(&fmt_c17(v[i]));
                }
                csv.push_str(&format!(",{},{}\n", fmt_g17(v.norm()), fmt_g17(margin)));
            }
            Ok(csv)
        }
    };
    match run() {
        Ok(csv) => {
            emit(&args.out, &csv)?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            eprintln!("numeric failure: {e}");
            Ok(EXIT_NUMERIC)
        }
    }
}

fn cmd_flow(args: &ChainArgs, z0: ballmap::CVec64) -> Result<u8> {
    enum FlowMap {
        Poly(ballmap::HoloMap64),
        Ext(ExtendedMap),
    }
    impl FlowMap {
        fn as_map(&self) -> &dyn BallMap {
            match self {
                FlowMap::Poly(m) => m,
                FlowMap::Ext(m) => m,
            }
        }
    }
    let built = (|| -> ballmap::Result<FlowMap> {
        if let Some(f) = &args.f {
            let base = parse_func1d(f)?;
            let params = ballmap::extend::ExtensionParams::new(args.ahat, args.bhat)?;
            Ok(FlowMap::Ext(ballmap::extend::modified_rs(
                &base, params, args.n,
            )?))
        } else {
            let spec = args.map.as_deref().unwrap_or("identity");
            match parse_map_subject(spec, z0.dim())? {
                Subject::Poly(h) => Ok(FlowMap::Poly(h)),
                Subject::Disk(_) => Err(ballmap::Error::InvalidParam(
                    "flow over a 1-D base needs --f together with extension exponents".into(),
                )),
            }
        }
    })();
    let map = match built {
        Ok(m) => m,
        Err(e) => {
            eprintln!("invalid flow spec: {e}");
            return Ok(EXIT_INVALID);
        }
    };
    let run = || -> ballmap::Result<String> {
        let traj = spirallike_flow(map.as_map(), &z0, args.beta, args.t_end, args.steps)?;
        let n = z0.dim();
        let f0 = traj.f_norms[0];
        let mut csv = String::from("t");
        for i in 0..n {
            csv.push_str(&format!(",z{i}_re,z{i}_im"));
        }
        csv.push_str(",norm_z,norm_F,law_residual\n");
        for k in 0..traj.times.len() {
            let t = traj.times[k];
            csv.push_str(&fmt_g17(t));
            for i in 0..n {
                csv.push(',');
                csv.push_str(&fmt_c17(traj.states[k][i]));
            }
            let law = (traj.f_norms[k] * (t * args.beta.cos()).exp() / f0 - 1.0).abs();
            csv.push_str(&format!(
                ",{},{},{}\n",
                fmt_g17(traj.states[k].norm()),
                fmt_g17(traj.f_norms[k]),
                fmt_g17(law)
            ));
        }
        csv.push_str(&format!(
            "# norm_strictly_decreasing={} (measured direction; recorded, not assumed)\n",
            traj.norm_strictly_decreasing
        ));
        Ok(csv)
    };
    match run() {
        Ok(csv) => {
            emit(&args.out, &csv)?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            eprintln!("numeric failure: {e}");
            Ok(EXIT_NUMERIC)
        }
    }
}

fn cmd_suite(args: &SuiteArgs) -> Result<u8> {
    let cfg = if args.config == "default" {
        SuiteConfig::default_config()
    } else {
        let text = match std::fs::read_to_string(&args.config) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("cannot read config {}: {e}", args.config);
                return Ok(EXIT_INVALID);
            }
        };
        match SuiteConfig::from_json(&text) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("invalid config: {e}");
                return Ok(EXIT_INVALID);
            }
        }
    };
    let report = run_suite(&cfg);
    for r in &report.records {
        println!(
            "{} {} | {} | margin {} (tol {})",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.law,
            fmt_g17(r.worst_margin),
            fmt_g17(r.tolerance)
        );
    }
    println!(
        "suite: {} records, {} in {:.2}s",
        report.records.len(),
        if report.pass {
            "all passed"
        } else {
            "FAILURES"
        },
        report.wall_time_s
    );
    std::fs::write(
        &args.out,
        serde_json::to_string_pretty(&report.to_json())? + "\n",
    )?;
    std::fs::write(&args.csv, report.to_csv())?;
    Ok(if report.pass {
        EXIT_OK
    } else {
        EXIT_NON_MEMBER
    })
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("BALLMAP_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global();
        }
    }
    let cli = Cli::parse();
    let code = match &cli.cmd {
        Cmd::Bounds(args) => cmd_bounds(args),
        Cmd::Check(args) => cmd_check(args),
        Cmd::Extend(args) => cmd_extend(args),
        Cmd::Chain(args) => cmd_chain(args),
        Cmd::Suite(args) => cmd_suite(args),
    };
    match code {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}
