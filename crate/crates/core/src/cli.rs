//! The `hardy-trace` command line.
//!
//! Every command writes one report (JSON, or CSV where a table makes sense) to
//! stdout or `--output`. Failures print a JSON error object to stderr and exit
//! with 1 (usage), 2 (domain), 3 (numerical) or 4 (I/O).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exactnum::{ComplexRational, Rational};
use crate::kernels::{cauchy_kernel, cauchy_series};
use crate::multiindex::{c_constant, enumerate_upto, MultiIndex};
use crate::random::PolyGenerator;
use crate::report::{fmt_f64, to_json};
use crate::sphere::{CPoint, SphereSampler};
use crate::sphere_poly::{mc_moment, moment, monomial_integral, SpherePolynomial};
use crate::tracetest::{is_boundary_trace, sweep, szego_residual};
use crate::transforms::{
    cauchy_transform_poly, eval_holo, poisson_transform_mc, radial_scan, radial_scan_csv, RadialScanRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "hardy-trace", version, about = "Exact boundary-trace certificates on the unit sphere of C^n")]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Report format; defaults to csv for radial-scan and json otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Table of c_ω for |ω| ≤ order.
    Constants {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        order: u32,
    },
    /// Exact moment ∫ ζ^α ζ̄^β f dσ.
    Moment {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<u32>,
        #[arg(long, value_delimiter = ',', required = true)]
        beta: Vec<u32>,
    },
    /// Membership certificate.
    Check {
        input: PathBuf,
        /// First sweep order for non-members; escalates by 2.
        #[arg(long, default_value_t = 2)]
        order: u32,
    },
    /// Every violated condition with |α|, |β| ≤ order.
    Sweep {
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        order: u32,
    },
    /// L^p distances between f and its Poisson slices at the given radii.
    RadialScan {
        input: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.9,0.99")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Seeded self-test of the decision procedure and its stochastic cross-checks.
    Verify {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Constants,
    Moment,
    Check,
    Sweep,
    RadialScan,
    Verify,
}

/// A fully parsed invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub input_path: Option<PathBuf>,
    pub n: usize,
    pub seed: u64,
    pub samples: u64,
    pub order: u32,
    pub p: f64,
    pub radii: Vec<f64>,
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    fn blank(command: CommandKind) -> Self {
        RunConfig {
            command,
            input_path: None,
            n: 0,
            seed: 0,
            samples: 0,
            order: 0,
            p: 2.0,
            radii: Vec::new(),
            alpha: Vec::new(),
            beta: Vec::new(),
            output: None,
            format: Format::Json,
        }
    }

    /// Parses `args` (program name first). Help and version requests come back
    /// as the clap error that renders them.
    pub fn from_args<I, T>(args: I) -> std::result::Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let args = Args::try_parse_from(args)?;
        let mut cfg = match args.command {
            Cmd::Constants { n, order } => RunConfig { n, order, ..Self::blank(CommandKind::Constants) },
            Cmd::Moment { input, alpha, beta } => {
                RunConfig { input_path: Some(input), alpha, beta, ..Self::blank(CommandKind::Moment) }
            }
            Cmd::Check { input, order } => RunConfig { input_path: Some(input), order, ..Self::blank(CommandKind::Check) },
            Cmd::Sweep { input, order } => RunConfig { input_path: Some(input), order, ..Self::blank(CommandKind::Sweep) },
            Cmd::RadialScan { input, p, radii, samples, seed } => RunConfig {
                input_path: Some(input),
                p,
                radii,
                samples,
                seed,
                format: Format::Csv,
                ..Self::blank(CommandKind::RadialScan)
            },
            Cmd::Verify { n, seed, samples } => RunConfig { n, seed, samples, ..Self::blank(CommandKind::Verify) },
        };
        cfg.output = args.output;
        if let Some(format) = args.format {
            cfg.format = format;
        }
        Ok(cfg)
    }

    fn read_input(&self) -> Result<SpherePolynomial> {
        let path = self.input_path.as_ref().ok_or_else(|| Error::Usage("missing input path".into()))?;
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        parse_polynomial(&text)
    }
}

/// A polynomial from its JSON document.
pub fn parse_polynomial(document: &str) -> Result<SpherePolynomial> {
    SpherePolynomial::from_json(document)
}

/// What a command produced: the report text and the exit status to end with.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub status: i32,
    /// Set when `status ≠ 0` although a report was still produced.
    pub failure: Option<Error>,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Outcome { report, status: 0, failure: None }
    }
}

fn unsupported(cfg: &RunConfig) -> Error {
    Error::Usage(format!("{:?} output is not available for {:?}", cfg.format, cfg.command))
}

fn index(n: usize, comps: &[u32], what: &str) -> Result<MultiIndex> {
    if comps.len() != n {
        return Err(Error::Usage(format!("{what} has {} components, polynomial has n = {n}", comps.len())));
    }
    MultiIndex::new(comps.iter().copied())
}

#[derive(Serialize)]
struct ConstantRow {
    omega: MultiIndex,
    c: Rational,
    c_float: f64,
}

fn float(z: &ComplexRational) -> Result<Complex64> {
    z.to_complex64()
}

#[derive(Serialize)]
struct FloatC(#[serde(serialize_with = "crate::report::ser_complex")] Complex64);

/// Executes one command and renders its report.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        CommandKind::Constants => {
            if cfg.n == 0 {
                return Err(Error::ZeroDimension);
            }
            let rows = enumerate_upto(cfg.n, cfg.order)
                .into_iter()
                .map(|omega| {
                    let c = c_constant(&omega);
                    Ok(ConstantRow { c_float: c.to_f64()?, omega, c })
                })
                .collect::<Result<Vec<_>>>()?;
            match cfg.format {
                Format::Json => Ok(Outcome::ok(to_json(&json_constants(cfg, &rows)?)?)),
                Format::Csv => {
                    let mut out = String::from("omega,c,c_float\n");
                    for row in &rows {
                        out.push_str(&format!("\"{}\",{},{}\n", row.omega, row.c, fmt_f64(row.c_float)));
                    }
                    Ok(Outcome::ok(out))
                }
            }
        }
        CommandKind::Moment => {
            if cfg.format != Format::Json {
                return Err(unsupported(cfg));
            }
            let f = cfg.read_input()?;
            let alpha = index(f.dim(), &cfg.alpha, "alpha")?;
            let beta = index(f.dim(), &cfg.beta, "beta")?;
            let m = moment(&f, &alpha, &beta)?;
            let doc = json!({
                "alpha": alpha,
                "beta": beta,
                "moment": m,
                "moment_float": FloatC(float(&m)?),
            });
            Ok(Outcome::ok(to_json(&doc)?))
        }
        CommandKind::Check => {
            if cfg.format != Format::Json {
                return Err(unsupported(cfg));
            }
            let f = cfg.read_input()?;
            Ok(Outcome::ok(to_json(&is_boundary_trace(&f, cfg.order)?)?))
        }
        CommandKind::Sweep => {
            let f = cfg.read_input()?;
            let found = sweep(&f, cfg.order)?;
            match cfg.format {
                Format::Json => Ok(Outcome::ok(to_json(&json!({ "order": cfg.order, "violations": found }))?)),
                Format::Csv => {
                    let mut out = String::from("kind,alpha,beta,lhs,rhs,lhs_re,lhs_im,rhs_re,rhs_im\n");
                    for r in &found {
                        let (l, rh) = (float(&r.lhs)?, float(&r.rhs)?);
                        out.push_str(&format!(
                            "{},\"{}\",\"{}\",{},{},{},{},{},{}\n",
                            r.kind,
                            r.alpha,
                            r.beta,
                            r.lhs,
                            r.rhs,
                            fmt_f64(l.re),
                            fmt_f64(l.im),
                            fmt_f64(rh.re),
                            fmt_f64(rh.im)
                        ));
                    }
                    Ok(Outcome::ok(out))
                }
            }
        }
        CommandKind::RadialScan => {
            let f = cfg.read_input()?;
            let mut sampler = SphereSampler::new(f.dim(), cfg.seed)?;
            let rows = radial_scan(&f, cfg.p, &cfg.radii, &mut sampler, cfg.samples)?;
            match cfg.format {
                Format::Csv => Ok(Outcome::ok(radial_scan_csv(&rows))),
                Format::Json => Ok(Outcome::ok(to_json::<[RadialScanRow]>(&rows)?)),
            }
        }
        CommandKind::Verify => {
            if cfg.format != Format::Json {
                return Err(unsupported(cfg));
            }
            let report = verify(cfg.n, cfg.seed, cfg.samples)?;
            let text = to_json(&report)?;
            if report.passed {
                Ok(Outcome::ok(text))
            } else {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                let err = Error::Verification(failed.join(", "));
                Ok(Outcome { report: text, status: err.class().exit_code(), failure: Some(err) })
            }
        }
    }
}

fn json_constants(cfg: &RunConfig, rows: &[ConstantRow]) -> Result<serde_json::Value> {
    Ok(json!({ "n": cfg.n, "order": cfg.order, "constants": rows }))
}

/// One property checked by `verify`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub seed: u64,
    pub samples: u64,
    pub passed: bool,
    pub checks: Vec<VerifyCheck>,
}

fn check(name: &str, cases: usize, failures: Vec<String>) -> VerifyCheck {
    VerifyCheck {
        name: name.to_string(),
        passed: failures.is_empty(),
        cases,
        detail: if failures.is_empty() { "ok".to_string() } else { failures.join("; ") },
    }
}

/// The self-test behind the `verify` command.
///
/// Exact checks: holomorphic data (disguised by the sphere relation) has zero
/// residual and no violated condition; random non-members get a certificate;
/// in one variable condition B never fails. Stochastic checks, all at 4
/// standard errors: monomial integrals, the Poisson transform of members
/// against their exact Szegő projection, and the kernel series bound.
pub fn verify(n: usize, seed: u64, samples: u64) -> Result<VerifyReport> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    crate::montecarlo::require_samples(samples)?;
    let mut gen = PolyGenerator::new(seed);
    let mut checks = Vec::new();

    let mut failures = Vec::new();
    for i in 0..20 {
        let f = gen.member(n, 3);
        let (res, _) = szego_residual(&f);
        let found = sweep(&f, f.degree().min(5) + 1)?;
        if !res.is_zero() || !found.is_empty() {
            failures.push(format!("member #{i}: residual {res}, {} violations", found.len()));
        }
    }
    checks.push(check("forward", 20, failures));

    let mut failures = Vec::new();
    let mut worst = 0;
    for i in 0..20 {
        let f = gen.non_member(n, 3);
        let cert = is_boundary_trace(&f, 2)?;
        match (&cert.violation, cert.violation_order) {
            (Some(v), Some(order)) if !v.satisfied && !cert.member => worst = worst.max(order),
            _ => failures.push(format!("non-member #{i} has no violation")),
        }
    }
    let mut backward = check("backward", 20, failures);
    if backward.passed {
        backward.detail = format!("ok; highest violation order {worst}");
    }
    checks.push(backward);

    let mut failures = Vec::new();
    if n == 1 {
        for i in 0..10 {
            let f = gen.sphere_poly(1, 6, 5);
            if sweep(&f, 8)?.iter().any(|r| r.kind == crate::tracetest::ConditionKind::B) {
                failures.push(format!("polynomial #{i} violates condition B"));
            }
        }
        checks.push(check("one-variable", 10, failures));
    } else {
        let mut comps = vec![0u32; n];
        comps[0] = 1;
        comps[1] = 1;
        let ab = MultiIndex::new(comps)?;
        let f = SpherePolynomial::monomial(ab.clone(), ab.clone(), ComplexRational::one())?;
        let r = crate::tracetest::check_condition_b(&f, &ab, &ab)?;
        // c_{2e₁+2e₂}/c_{e₁+e₂} versus c_{e₁+e₂}
        let mut two = vec![0u32; n];
        two[0] = 2;
        two[1] = 2;
        let expect_lhs = c_constant(&MultiIndex::new(two)?).checked_div(&c_constant(&ab))?;
        if r.satisfied || r.lhs != ComplexRational::real(expect_lhs) || r.rhs != ComplexRational::real(c_constant(&ab)) {
            failures.push(format!("|ζ₁ζ₂|² gives lhs {} rhs {}", r.lhs, r.rhs));
        }
        checks.push(check("counterexample", 1, failures));
    }

    let mut failures = Vec::new();
    let mut sampler = SphereSampler::new(n, seed)?;
    for _ in 0..5 {
        let omega = gen.multi_index(n, 3);
        let upsilon = gen.multi_index(n, 3);
        let est = mc_moment(|_| Complex64::new(1.0, 0.0), &omega, &upsilon, &mut sampler, samples)?;
        let exact = monomial_integral(&omega, &upsilon)?.to_f64()?;
        if !est.within(Complex64::new(exact, 0.0), 4.0) {
            failures.push(format!("∫ζ^{omega}ζ̄^{upsilon}: {} vs {exact}", est.value));
        }
    }
    checks.push(check("monomial-integrals", 5, failures));

    let mut failures = Vec::new();
    for i in 0..3 {
        let f = gen.member(n, 2);
        let g = cauchy_transform_poly(&f);
        let z = sampler.sample().scaled(0.5);
        let terms = f.clone();
        let est = poisson_transform_mc(move |zeta| terms.eval(zeta).unwrap_or(Complex64::new(f64::NAN, 0.0)), &z, &mut sampler, samples)?;
        let exact = eval_holo(&g, &z)?;
        if !est.within(exact, 4.0) {
            failures.push(format!("member #{i} at {z}: {} vs {exact} (z-score {:.2})", est.value, est.z_score(exact)));
        }
    }
    checks.push(check("poisson-equals-cauchy", 3, failures));

    let mut failures = Vec::new();
    for i in 0..10 {
        let z: CPoint = sampler.sample().scaled(0.8);
        let w: CPoint = sampler.sample().scaled(0.9);
        let exact = cauchy_kernel(&z, &w)?;
        for order in [5, 10, 20] {
            let (v, t) = cauchy_series(&z, &w, order)?;
            if (v - exact).norm() > t.error_bound() {
                failures.push(format!("pair #{i}, N = {order}: error {} > bound {}", (v - exact).norm(), t.error_bound()));
            }
        }
    }
    checks.push(check("kernel-series", 30, failures));

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { n, seed, samples, passed, checks })
}

/// Writes `report` to `destination`, or to stdout when there is none.
pub fn emit_report(report: &str, destination: Option<&Path>) -> Result<()> {
    let mut text = report.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match destination {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// The JSON object printed to stderr on failure.
pub fn error_object(err: &Error) -> String {
    let class = err.class();
    json!({ "error": { "class": class.as_str(), "code": class.exit_code(), "message": err.to_string() } }).to_string()
}

/// Runs the program on `args` and returns its exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::from_args(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let err = Error::Usage(e.render().to_string().trim().to_string());
            eprintln!("{}", error_object(&err));
            return err.class().exit_code();
        }
    };
    let result = run(&cfg).and_then(|outcome| {
        emit_report(&outcome.report, cfg.output.as_deref())?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            if let Some(err) = &outcome.failure {
                eprintln!("{}", error_object(err));
            }
            outcome.status
        }
        Err(err) => {
            eprintln!("{}", error_object(&err));
            err.class().exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> RunConfig {
        RunConfig::from_args(std::iter::once("hardy-trace").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn parse_polynomial_examples() {
        let f = parse_polynomial(r#"{"n":2,"terms":[{"mu":[1,0],"nu":[0,0],"re":"1/1","im":"0/1"}]}"#).unwrap();
        assert_eq!(f.len(), 1);
        assert!(parse_polynomial(r#"{"n":2,"terms":[]}"#).unwrap().is_empty());
        let bad = parse_polynomial(r#"{"n":2,"terms":[{"mu":[1],"nu":[0,0],"re":"1/1","im":"0/1"}]}"#);
        assert!(matches!(bad, Err(Error::Schema(_))));
        match parse_polynomial("{\"n\":2,\n\"terms\":[") {
            Err(Error::Parse(msg)) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constants_table() {
        let out = run(&cfg(&["constants", "--n", "2", "--order", "2"])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.report).unwrap();
        let rows = v["constants"].as_array().unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[4]["omega"], json!([1, 1]));
        assert_eq!(rows[4]["c"], json!("1/6"));
        let csv = run(&cfg(&["constants", "--n", "2", "--order", "1", "--format", "csv"])).unwrap().report;
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn defaults_and_flags() {
        let c = cfg(&["radial-scan", "f.json"]);
        assert_eq!(c.radii, vec![0.5, 0.9, 0.99]);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(cfg(&["check", "f.json"]).order, 2);
        let m = cfg(&["moment", "f.json", "--alpha", "1,0", "--beta", "0,1", "--output", "o.json"]);
        assert_eq!((m.alpha, m.beta), (vec![1, 0], vec![0, 1]));
        assert_eq!(m.output, Some(PathBuf::from("o.json")));
        assert!(RunConfig::from_args(["hardy-trace", "bogus"]).is_err());
        assert_eq!(main_with_args(["hardy-trace", "bogus"]), 1);
        assert_eq!(main_with_args(["hardy-trace", "constants", "--n", "0", "--output", "/dev/null"]), 2);
        assert_eq!(main_with_args(["hardy-trace", "check", "/nonexistent/f.json"]), 4);
    }

    #[test]
    fn error_objects_are_json() {
        let v: serde_json::Value = serde_json::from_str(&error_object(&Error::Singular { gap: 0.0 })).unwrap();
        assert_eq!(v["error"]["code"], json!(3));
        assert_eq!(v["error"]["class"], json!("numerical"));
    }
}
