//! Command-line front end: `verify`, `liealg`, `search`, `variations`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::g2::G2Structure;
use crate::liegeom::{
    bryant_identities_check, cor_g2sub_check, oneill_analysis, parse_structure_constants,
    search_closed_g2, validate_closed_g2, write_structure_constants, CorReport, LieAlgebra,
    OneillReport, SubmersionSplit,
};
use crate::report::{parse_tolerance, CheckReport, RunConfig, Status, SCHEMA};
use crate::scalar::{Rational, Scalar, ScalarMode};
use crate::variations::{
    density_second_derivative_check, first_variation_check, moduli_fibration_demo,
    second_variation_check, volume_curve, write_csv, DensityReport, FirstVariationReport,
    ImmersionFamily, ModuliReport, QuadratureSpec, SecondVariationReport,
};

/// Exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "g2lab",
    version,
    about = "Checks for coassociative variations and closed G2-structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the seeded pointwise identity suites.
    Verify(VerifyArgs),
    /// Validate a structure-constants file and check the closed-G2 identities.
    Liealg(LiealgArgs),
    /// Enumerate closed-G2 nilpotent algebras and write each one to a file.
    Search(SearchArgs),
    /// Run the finite-difference variation harness on an immersion family.
    Variations(VariationsArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Seed for every randomized input.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scalar type: exact rationals or f64.
    #[arg(long, default_value = "exact")]
    mode: ScalarMode,
    /// Where to write the JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall time per check (makes reports run-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Trials per suite (default: per-suite).
    #[arg(long)]
    trials: Option<u64>,
    /// Float-mode tolerance override, `<check>=<value>`; repeatable.
    #[arg(long, value_parser = parse_tolerance)]
    tolerance: Vec<(String, f64)>,
    /// Restrict to these suites; repeatable.
    #[arg(long)]
    suite: Vec<String>,
}

#[derive(Debug, Args)]
struct LiealgArgs {
    /// Structure-constants file.
    path: PathBuf,
    #[command(flatten)]
    common: Common,
    /// 1-based indices spanning the vertical ideal, e.g. `3` or `4,5,6,7`.
    #[arg(long, value_delimiter = ',')]
    vertical: Vec<usize>,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Allowed structure constants, e.g. `0,1,-1` or `0,1/2`.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0,1,-1"
    )]
    coefficients: Vec<String>,
    /// Nilpotency step bound (1: abelian only, 2: two-step).
    #[arg(long, default_value_t = 2)]
    step_bound: usize,
    /// Output directory for algebra files and summary.tsv.
    #[arg(long, default_value = "search-out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VariationsArgs {
    /// Immersion family from the registry.
    #[arg(long)]
    family: String,
    /// Amplitude for `graph` and `tangential`, radius for `sphere`.
    #[arg(long)]
    amplitude: Option<f64>,
    /// Quadrature nodes per axis.
    #[arg(long, default_value_t = 16)]
    grid: usize,
    /// Finite-difference step in t.
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    /// Richardson-extrapolate the t-derivatives.
    #[arg(long)]
    richardson: bool,
    /// Curve range [−t_max, t_max].
    #[arg(long, default_value_t = 0.2)]
    t_max: f64,
    /// Number of curve points.
    #[arg(long, default_value_t = 5)]
    points: usize,
    /// Output directory for `<family>.csv` and `<family>.json`.
    #[arg(long, default_value = "variations-out")]
    out: PathBuf,
    /// Record wall time in the JSON report.
    #[arg(long)]
    timing: bool,
}

/// Runs the CLI on explicit arguments and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_PASS
                }
                _ => EXIT_USAGE,
            };
        }
    };
    configure_threads();
    let res = match cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Liealg(a) => cmd_liealg(a),
        Command::Search(a) => cmd_search(a),
        Command::Variations(a) => cmd_variations(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("G2LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Precondition(format!("cannot write {}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn print_checks(checks: &[CheckReport]) {
    let mut out = std::io::stdout().lock();
    for c in checks {
        let _ = writeln!(out, "{}", c.line());
    }
}

fn exit_for(checks: &[CheckReport]) -> i32 {
    if checks.iter().any(|c| c.status == Status::Fail) {
        EXIT_FAIL
    } else {
        EXIT_PASS
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let cfg = RunConfig {
        seed: a.common.seed,
        trials: a.trials,
        tolerances: a.tolerance.into_iter().collect(),
        mode: a.common.mode,
        out: a.common.out,
        suites: a.suite,
        timing: a.common.timing,
    };
    let report = crate::report::verify(&cfg)?;
    print_checks(&report.checks);
    println!(
        "{} passed, {} failed, {} skipped",
        report.summary.passed, report.summary.failed, report.summary.skipped
    );
    if let Some(p) = &cfg.out {
        write_file(p, &report.to_json())?;
    }
    Ok(if report.all_pass() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

#[derive(Debug, Serialize)]
struct OneillSummary {
    vertical: Vec<usize>,
    a_max: f64,
    t_max: f64,
    fibres_totally_geodesic: bool,
    a_half_bracket_residual: f64,
    curvature_identity_residual: f64,
    mixed_term_residual: f64,
    base_ricci_max: f64,
    /// 1-based horizontal index pairs.
    pairs: Vec<crate::liegeom::HorizontalPair>,
}

impl OneillSummary {
    fn new<S: Scalar>(vertical: &[usize], r: &OneillReport<S>) -> Self {
        Self {
            vertical: vertical.iter().map(|v| v + 1).collect(),
            a_max: r.a_max(),
            t_max: r.t_max(),
            fibres_totally_geodesic: r.fibres_totally_geodesic(),
            a_half_bracket_residual: r.a_half_bracket_residual,
            curvature_identity_residual: r.curvature_identity_residual,
            mixed_term_residual: r.mixed_term_residual,
            base_ricci_max: r.base_ricci_max,
            pairs: r
                .pairs
                .iter()
                .map(|p| crate::liegeom::HorizontalPair {
                    x: p.x + 1,
                    y: p.y + 1,
                    ..p.clone()
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
struct LiealgReport {
    schema: u32,
    command: &'static str,
    file: String,
    mode: ScalarMode,
    dim: usize,
    derived_dim: usize,
    tau2: Option<String>,
    tau2_norm_sq: Option<String>,
    ricci_trace: Option<String>,
    checks: Vec<CheckReport>,
    oneill: Option<OneillSummary>,
    corollary: Option<CorReport>,
}

fn cmd_liealg(a: LiealgArgs) -> Result<i32> {
    let text = fs::read_to_string(&a.path)
        .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", a.path.display())))?;
    let alg = parse_structure_constants(&text)
        .map_err(|e| Error::Precondition(format!("{}: {e}", a.path.display())))?;
    match a.common.mode {
        ScalarMode::Exact => liealg_in(alg, &a),
        ScalarMode::Float => liealg_in(alg.map(|x| x.to_f64()), &a),
    }
}

fn liealg_in<S: Scalar>(alg: LieAlgebra<S>, a: &LiealgArgs) -> Result<i32> {
    let mode = S::MODE;
    let tol = match mode {
        ScalarMode::Exact => 0.0,
        ScalarMode::Float => 1e-10,
    };
    let mut report = LiealgReport {
        schema: SCHEMA,
        command: "liealg",
        file: a.path.display().to_string(),
        mode,
        dim: alg.dim(),
        derived_dim: alg.derived_dim(),
        tau2: None,
        tau2_norm_sq: None,
        ricci_trace: None,
        checks: Vec::new(),
        oneill: None,
        corollary: None,
    };
    let g2 = G2Structure::<S>::model();
    let mut closed = None;
    if alg.dim() != 7 {
        report.checks.push(CheckReport::skipped(
            "closed-g2",
            "closed-g2-identities",
            mode,
            format!("dimension {} is not 7", alg.dim()),
        ));
    } else {
        match validate_closed_g2(&g2, &alg) {
            Ok(c) => {
                let b = bryant_identities_check(&g2, &c)?;
                report.tau2 = Some(c.tau2.to_string());
                report.tau2_norm_sq = Some(c.tau2.norm_sq().to_string());
                report.ricci_trace = Some(c.curvature.scal.to_string());
                for (id, anchor, r) in [
                    ("dpsi-tau2-phi", "torsion-tau2", b.dpsi.max_abs()),
                    ("p7-tau2", "torsion-tau2", b.p7.max_abs()),
                    (
                        "scalar-curvature",
                        "scalar-curvature",
                        b.scalar.to_f64().abs(),
                    ),
                    ("eq-dtau2", "eq:dtau2", b.dtau2.max_abs()),
                ] {
                    report
                        .checks
                        .push(CheckReport::judged(id, anchor, mode, r, tol, 1));
                }
                closed = Some(c);
            }
            Err(e @ (Error::NotClosed(_) | Error::Inconsistent(_))) => {
                let mut r = CheckReport::judged(
                    "closed-g2",
                    "closed-g2-identities",
                    mode,
                    f64::NAN,
                    tol,
                    1,
                );
                r.detail = Some(e.to_string());
                report.checks.push(r);
            }
            Err(e) => return Err(e),
        }
    }
    if !a.vertical.is_empty() {
        let vertical: Vec<usize> = a
            .vertical
            .iter()
            .map(|&v| {
                v.checked_sub(1).filter(|&v| v < alg.dim()).ok_or_else(|| {
                    Error::Precondition(format!(
                        "vertical index {v} out of range 1..={}",
                        alg.dim()
                    ))
                })
            })
            .collect::<Result<_>>()?;
        let split = SubmersionSplit::new(alg.clone(), &vertical)?;
        let o = oneill_analysis(&split)?;
        report.checks.push(CheckReport::judged(
            "oneill-curvature",
            "oneill-curvature",
            mode,
            o.max_residual(),
            tol,
            o.pairs.len() as u64,
        ));
        report.oneill = Some(OneillSummary::new(&vertical, &o));
        if let Some(c) = &closed {
            if vertical.len() == 4 {
                let cor = cor_g2sub_check(&g2, c, &split)?;
                let bad = matches!(cor.verdict, crate::liegeom::Verdict::Inconsistent { .. });
                let mut r = CheckReport::judged(
                    "cor-g2sub",
                    "cor:G2sub",
                    mode,
                    if bad { 1.0 } else { 0.0 },
                    0.0,
                    1,
                );
                r.detail = Some(serde_json::to_string(&cor.verdict).expect("verdict serializes"));
                report.checks.push(r);
                report.corollary = Some(cor);
            }
        }
    }
    println!(
        "{}: dim {}, derived dim {}",
        report.file, report.dim, report.derived_dim
    );
    if let Some(t) = &report.tau2 {
        println!("tau2 = {t}");
        println!(
            "|tau2|^2 = {}",
            report.tau2_norm_sq.as_deref().unwrap_or("")
        );
        println!("tr Ric = {}", report.ricci_trace.as_deref().unwrap_or(""));
    }
    print_checks(&report.checks);
    if let Some(p) = &a.common.out {
        write_file(
            p,
            &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"),
        )?;
    }
    Ok(exit_for(&report.checks))
}

fn cmd_search(a: SearchArgs) -> Result<i32> {
    let coeffs: Vec<Rational> = a
        .coefficients
        .iter()
        .map(|s| {
            s.trim()
                .parse::<Rational>()
                .map_err(|_| Error::Precondition(format!("bad coefficient `{s}`")))
        })
        .collect::<Result<_>>()?;
    let hits = search_closed_g2(a.step_bound, &coeffs)?;
    fs::create_dir_all(&a.out).map_err(|e| io_err(&a.out, e))?;
    let mut summary = String::from("index\tfile\tcentre\tderived_dim\ttau2_norm_sq\n");
    println!(
        "seed {}, coefficients {{{}}}, {} algebras",
        a.seed,
        a.coefficients.join(","),
        hits.len()
    );
    for (i, h) in hits.iter().enumerate() {
        let file = format!("closed-g2-{:02}.txt", i + 1);
        let mut centre: Vec<String> = h.center.iter().map(|c| format!("e{}", c + 1)).collect();
        if centre.is_empty() {
            centre.push("-".into());
        }
        let header = vec![
            "closed G2-structure on a nilpotent Lie algebra (model phi)".to_string(),
            format!("centre {}", centre.join(" ")),
            format!("derived dim {}", h.derived_dim),
            format!("|tau2|^2 = {}", h.tau2_norm_sq),
        ];
        write_file(
            &a.out.join(&file),
            &write_structure_constants(&h.alg, &header),
        )?;
        let line = format!(
            "{}\t{}\t{}\t{}\t{}\n",
            i + 1,
            file,
            centre.join(" "),
            h.derived_dim,
            h.tau2_norm_sq
        );
        print!("{line}");
        summary.push_str(&line);
    }
    write_file(&a.out.join("summary.tsv"), &summary)?;
    Ok(EXIT_PASS)
}

/// Tolerances for the variation harness.
const FIRST_VARIATION_TOL: f64 = 1e-5;
const SECOND_VARIATION_TOL: f64 = 1e-4;
const DENSITY_TOL: f64 = 1e-4;
const FLAT_VOLUME_TOL: f64 = 1e-12;
const CALIBRATION_TOL: f64 = 1e-10;
/// Chart point for the pointwise density check.
const DENSITY_POINT: [f64; 4] = [0.13, 0.37, 0.61, 0.89];

#[derive(Debug, Serialize)]
struct VariationsReport {
    schema: u32,
    command: &'static str,
    family: ImmersionFamily,
    grid: usize,
    h: f64,
    richardson: bool,
    csv: String,
    checks: Vec<CheckReport>,
    first_variation: Option<FirstVariationReport>,
    second_variation: Option<SecondVariationReport>,
    density: Option<DensityReport>,
    moduli: Option<ModuliReport>,
}

fn timed<T>(timing: bool, f: impl FnOnce() -> T) -> (T, Option<u64>) {
    let start = std::time::Instant::now();
    let out = f();
    (out, timing.then(|| start.elapsed().as_millis() as u64))
}

fn cmd_variations(a: VariationsArgs) -> Result<i32> {
    let mut fam = ImmersionFamily::from_name(&a.family)?;
    if let Some(x) = a.amplitude {
        match &mut fam {
            ImmersionFamily::Graph { amplitude, .. }
            | ImmersionFamily::Tangential { amplitude } => *amplitude = x,
            ImmersionFamily::Sphere { radius } if x > 0.0 => *radius = x,
            _ => {
                return Err(Error::Precondition(format!(
                    "--amplitude does not apply to {}",
                    fam.name()
                )))
            }
        }
    }
    let q = QuadratureSpec {
        n: a.grid,
        h_t: a.h,
        richardson: a.richardson,
        ..Default::default()
    }
    .validated()?;
    if a.points == 0 || !(a.t_max >= 0.0) {
        return Err(Error::Precondition(
            "need at least one curve point and t_max ≥ 0".into(),
        ));
    }
    let mode = ScalarMode::Float;
    let ts: Vec<f64> = if a.points == 1 {
        vec![0.0]
    } else {
        (0..a.points)
            .map(|i| -a.t_max + 2.0 * a.t_max * i as f64 / (a.points - 1) as f64)
            .collect()
    };
    let curve = volume_curve(&fam, &q, &ts)?;
    let csv_path = a.out.join(format!("{}.csv", fam.name()));
    let mut csv = Vec::new();
    write_csv(&curve, &mut csv).expect("write to memory");
    write_file(&csv_path, &String::from_utf8(csv).expect("ascii csv"))?;

    let mut checks = Vec::new();
    let (fv, ms) = timed(a.timing, || first_variation_check(&fam, &q));
    let fv = fv?;
    let mut r = CheckReport::judged(
        "first-variation",
        "first-variation",
        mode,
        fv.mismatch / fv.dvol_fd.abs().max(1.0),
        FIRST_VARIATION_TOL,
        1,
    );
    r.elapsed_ms = ms;
    checks.push(r);
    if let Some(g) = &fv.g2 {
        checks.push(CheckReport::judged(
            "coassociative-first-variation",
            "first-variation",
            mode,
            (fv.dvol_fd - g.tau2_integral).abs(),
            FIRST_VARIATION_TOL,
            1,
        ));
    }

    let sv = match second_variation_check(&fam, &q) {
        Ok(sv) => {
            checks.push(CheckReport::judged(
                "second-variation",
                "second-variation",
                mode,
                sv.relative_mismatch,
                SECOND_VARIATION_TOL,
                1,
            ));
            if let Some(rhs) = sv.theorem_rhs {
                checks.push(CheckReport::judged(
                    "theorem-rhs",
                    "thm:secvar",
                    mode,
                    rhs.abs().max((sv.d2vol_fd - rhs).abs()),
                    CALIBRATION_TOL,
                    1,
                ));
            }
            Some(sv)
        }
        Err(e @ (Error::NotMinimal { .. } | Error::Precondition(_))) => {
            checks.push(CheckReport::skipped(
                "second-variation",
                "second-variation",
                mode,
                e.to_string(),
            ));
            None
        }
        Err(e) => return Err(e),
    };

    let density = match density_second_derivative_check(&fam, &q, &DENSITY_POINT) {
        Ok(d) => {
            let worst = d
                .direct_vs_classical
                .max(d.direct_vs_coassociative)
                .max(d.classical_vs_coassociative);
            checks.push(CheckReport::judged(
                "density-f2",
                "density-f2",
                mode,
                worst,
                DENSITY_TOL,
                1,
            ));
            Some(d)
        }
        Err(
            e @ (Error::NotMinimal { .. } | Error::Precondition(_) | Error::NotCoassociative(_)),
        ) => {
            checks.push(CheckReport::skipped(
                "density-f2",
                "density-f2",
                mode,
                e.to_string(),
            ));
            None
        }
        Err(e) => return Err(e),
    };

    let moduli = if fam.is_moduli_family() {
        let m = moduli_fibration_demo(&q)?;
        checks.push(CheckReport::judged(
            "moduli-volume",
            "fibration-example",
            mode,
            m.volume_spread,
            FLAT_VOLUME_TOL,
            m.volumes.len() as u64,
        ));
        checks.push(CheckReport::judged(
            "moduli-calibration",
            "fibration-example",
            mode,
            m.calibration_defect_max,
            CALIBRATION_TOL,
            m.volumes.len() as u64,
        ));
        checks.push(CheckReport::judged(
            "moduli-basis",
            "fibration-example",
            mode,
            m.constancy_residual
                .max(m.selfdual_residual)
                .max(m.gram_residual),
            CALIBRATION_TOL,
            1,
        ));
        Some(m)
    } else {
        None
    };

    let report = VariationsReport {
        schema: SCHEMA,
        command: "variations",
        family: fam.clone(),
        grid: q.n,
        h: q.h_t,
        richardson: q.richardson,
        csv: csv_path.display().to_string(),
        checks,
        first_variation: Some(fv),
        second_variation: sv,
        density,
        moduli,
    };
    print_checks(&report.checks);
    let json = a.out.join(format!("{}.json", fam.name()));
    write_file(
        &json,
        &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"),
    )?;
    println!("wrote {} and {}", csv_path.display(), json.display());
    Ok(exit_for(&report.checks))
}
