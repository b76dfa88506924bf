use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use euler_taylor::analysis::{
    default_band, fit_power_law, radius_interval, root_test_sequence, ExponentMode, FitResult, RadiusKind,
};
use euler_taylor::euler::{bnw_datum, load_series, Extender, TaylorSeries};
use euler_taylor::exact::{format_rational, parse_decimal, to_scientific};
use euler_taylor::field::{parse_datum, FourierField};
use euler_taylor::norms::{mu_and_remainder, norm_series, partial_sum_scan, squared_norms, NormSeries};
use euler_taylor::pade::{
    classify_poles, dlog_approximant, dlog_exponent, find_poles, pade_approximant, pole_statistics, PadeError,
    PadeResult, PoleReport, DEFAULT_IM_TOL, ROOT_TOL,
};
use euler_taylor::symmetry::{as_pure_rotations, detect_symmetries, presentation_report};

const DATA_ERROR: u8 = 3;
const NUMERICAL_ERROR: u8 = 4;
const CONJECTURAL: &str = "conjectural";

#[derive(Parser)]
#[command(name = "euler-taylor", version, about = "Exact time-Taylor series of 3D Euler flows on the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extend the Taylor series, writing checkpoints and norms.csv.
    Compute(ComputeArgs),
    /// Norm series, root tests, fits, radius intervals, scans and remainders.
    Analyze(AnalyzeArgs),
    /// Diagonal Padé approximants of the norm series and their poles.
    Pade(PadeArgs),
    /// Symmetry profile of the datum and the presentation of its groups.
    Report(ReportArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Args)]
struct Common {
    /// `bnw` for the built-in datum, otherwise a path to a datum file.
    #[arg(long, default_value = "bnw")]
    datum: String,
    /// Sobolev index of the norms.
    #[arg(long, default_value_t = 3)]
    n: u32,
    /// Defaults to `<output-dir>/checkpoints`.
    #[arg(long)]
    checkpoint_dir: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

impl Common {
    fn checkpoint_dir(&self) -> PathBuf {
        self.checkpoint_dir.clone().unwrap_or_else(|| self.output_dir.join("checkpoints"))
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    order: usize,
    #[arg(long, value_enum, default_value = "on")]
    symmetry: Switch,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: Common,
    /// Highest order to use; defaults to every checkpoint present.
    #[arg(long)]
    order: Option<usize>,
    /// Fit range `lo..hi`; defaults to the last 16 orders. Points are taken
    /// every `fit-step` orders counting down from `hi`.
    #[arg(long, value_parser = parse_range)]
    fit_range: Option<(usize, usize)>,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    fit_step: u64,
    /// Half-width of the radius intervals; defaults to the fit rms rounded
    /// up to one significant digit.
    #[arg(long)]
    band: Option<f64>,
    /// Comma-separated decimal times for the partial-sum scan.
    #[arg(long, value_delimiter = ',', value_parser = parse_exact_decimal, default_value = "0,0.1,0.2,0.3")]
    t: Vec<BigRational>,
    /// Lower bound on the convergence radius used by the remainder bound.
    #[arg(long, value_parser = parse_exact_decimal, default_value = "0.32")]
    radius_lower: BigRational,
}

#[derive(Args)]
struct PadeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    order: Option<usize>,
    /// Comma-separated diagonal orders `p` of `[p/p]`; defaults to all that
    /// the available coefficients allow.
    #[arg(long, value_delimiter = ',')]
    diagonal: Vec<usize>,
    /// Comma-separated orders of D-log approximants to evaluate.
    #[arg(long, value_delimiter = ',')]
    dlog: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_IM_TOL)]
    im_tol: f64,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, default_value = "bnw")]
    datum: String,
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or("expected lo..hi")?;
    let lo: usize = a.parse().map_err(|e| format!("{e}"))?;
    let hi: usize = b.parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err("empty range".into());
    }
    Ok((lo, hi))
}

fn parse_exact_decimal(s: &str) -> Result<BigRational, String> {
    parse_decimal(s.trim()).map_err(|e| e.to_string())
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

trait Classify<T> {
    fn data(self) -> Result<T, Failure>;
    fn numerical(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn data(self) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code: DATA_ERROR,
            error: e.into(),
        })
    }
    fn numerical(self) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code: NUMERICAL_ERROR,
            error: e.into(),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(args) => compute(&args),
        Command::Analyze(args) => analyze(&args),
        Command::Pade(args) => pade(&args),
        Command::Report(args) => report(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn load_datum(source: &str) -> anyhow::Result<FourierField> {
    if source == "bnw" {
        return Ok(bnw_datum());
    }
    let text = std::fs::read_to_string(source).with_context(|| format!("reading datum {source}"))?;
    parse_datum(&text).with_context(|| format!("parsing datum {source}"))
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .data()?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .data()?;
    println!("{}", path.display());
    Ok(())
}

fn decimal16(x: &BigRational) -> String {
    to_scientific(x, 16).to_string()
}

fn compute(args: &ComputeArgs) -> Result<(), Failure> {
    let datum = load_datum(&args.common.datum).data()?;
    let dir = args.common.checkpoint_dir();
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating {}", dir.display()))
        .data()?;
    let profile = (args.symmetry == Switch::On).then(|| detect_symmetries(&datum, 0));
    if let Some(p) = &profile {
        eprintln!("symmetry: {} elements fix the datum, {} negate it", p.plus_group.len(), p.minus_set.len());
    }
    let start = Instant::now();
    let series = Extender::new(args.order)
        .profile(profile.as_ref())
        .checkpoint_dir(Some(&dir))
        .threads(args.threads.map(|t| t as usize))
        .on_order(|r| {
            eprintln!(
                "order {} done: {} modes, {} computed, {:.3?} (total {:.3?})",
                r.order,
                r.modes,
                r.computed_buckets,
                r.elapsed,
                start.elapsed()
            )
        })
        .run(TaylorSeries::new(datum))
        .map_err(|e| {
            let code = match e {
                euler_taylor::euler::EulerError::SymmetryInconsistent { .. }
                | euler_taylor::euler::EulerError::ParityViolation { .. }
                | euler_taylor::euler::EulerError::Invariant { .. } => NUMERICAL_ERROR,
                _ => DATA_ERROR,
            };
            Failure { code, error: e.into() }
        })?;
    let norms = squared_norms(&series.truncated(args.order), args.common.n);
    let mut csv = String::from("j,squared_norm_exact,squared_norm\n");
    for (j, x) in norms.iter().enumerate() {
        writeln!(csv, "{j},{},{}", format_rational(x), decimal16(x)).unwrap();
    }
    write_output(&args.common.output_dir, "norms.csv", &csv)
}

/// Checkpointed series with the parity information of its datum.
fn load(common: &Common, order: Option<usize>) -> Result<(TaylorSeries, bool), Failure> {
    let datum = load_datum(&common.datum).data()?;
    let minus = !detect_symmetries(&datum, 0).minus_set.is_empty();
    let series = load_series(&common.checkpoint_dir(), datum, order).data()?;
    eprintln!("loaded orders 0..={}", series.highest_order());
    Ok((series, minus))
}

fn fit_row(kind: &str, n: u32, fit: &FitResult, band: Option<f64>) -> Result<String, Failure> {
    let which = if kind == "tau" { RadiusKind::Tau } else { RadiusKind::Theta };
    let band = band.unwrap_or_else(|| default_band(fit.rms_error));
    let est = radius_interval(fit, band, 2, which, n).numerical()?;
    Ok(format!(
        "{kind},{n},{},{},{:.10},{:.10},{:.10},{:.3e},{band},{:.2},{:.2},{CONJECTURAL}\n",
        fit.j_min, fit.j_max, fit.a, fit.b, fit.c, fit.rms_error, est.lower, est.upper
    ))
}

fn analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let (series, minus) = load(&args.common, args.order)?;
    let order = series.highest_order();
    let n = args.common.n;
    let out = &args.common.output_dir;
    let nu: NormSeries = norm_series(&series, n, minus);
    let norms = squared_norms(&series, n);

    let mut csv = String::from("j,nu_exact,nu\n");
    for (j, x) in nu.coeffs.iter().enumerate() {
        writeln!(csv, "{j},{},{}", format_rational(x), decimal16(x)).unwrap();
    }
    write_output(out, "nu.csv", &csv)?;

    // Root tests: ‖u_j‖^{-1/j} and |ν_j|^{-1/j}, skipping vanishing terms.
    let mut tau_points = Vec::new();
    let mut theta_points = Vec::new();
    let mut csv = String::from("j,norm_root,nu_root\n");
    for j in 1..=order {
        let tau = match norms[j].is_positive() {
            true => Some(root_test_sequence(&[norms[j].clone()], j, ExponentMode::SquaredNorm).numerical()?[0]),
            false => None,
        };
        let abs_nu = nu.coeffs[j].abs();
        let theta = match abs_nu.is_positive() {
            true => Some(root_test_sequence(&[abs_nu], j, ExponentMode::Norm).numerical()?[0]),
            false => None,
        };
        let show = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        writeln!(csv, "{j},{},{}", show(tau), show(theta)).unwrap();
        tau_points.extend(tau.map(|v| (j, v)));
        theta_points.extend(theta.map(|v| (j, v)));
    }
    write_output(out, "roottest.csv", &csv)?;

    let (lo, hi) = args.fit_range.unwrap_or((order.saturating_sub(16).max(1), order));
    let step = args.fit_step as usize;
    let on_grid = |pts: &[(usize, f64)]| -> Vec<(usize, f64)> {
        pts.iter().copied().filter(|(j, _)| *j <= hi && (hi - j) % step == 0).collect()
    };
    let mut fit_csv = String::from("which,n,j_min,j_max,a,b,c,rms,band,lower,upper,label\n");
    for (kind, pts) in [("tau", &tau_points), ("theta", &theta_points)] {
        match fit_power_law(&on_grid(pts), lo..=hi) {
            Ok(fit) => fit_csv.push_str(&fit_row(kind, n, &fit, args.band)?),
            Err(e) if args.fit_range.is_none() => eprintln!("{kind} fit skipped: {e}"),
            Err(e) => return Err(e).numerical(),
        }
    }
    write_output(out, "fit.csv", &fit_csv)?;

    let scan = partial_sum_scan(&series, n, &args.t, 0..=order).numerical()?;
    let mut csv = String::from("big_n,t,value_exact,value\n");
    for row in &scan {
        writeln!(csv, "{},{},{},{}", row.big_n, format_rational(&row.t), format_rational(&row.exact), decimal16(&row.exact)).unwrap();
    }
    write_output(out, "scan.csv", &csv)?;

    let mut csv = String::from("big_n,t,mu_n,bound,label\n");
    for big_n in 1..=order {
        for t in &args.t {
            match mu_and_remainder(&norms, big_n, t, &args.radius_lower) {
                Ok(rep) => writeln!(csv, "{big_n},{},{:.6e},{:.6e},{}", format_rational(t), rep.mu.mu(big_n), rep.bound, rep.label).unwrap(),
                Err(e) => eprintln!("remainder skipped at N={big_n}, t={}: {e}", format_rational(t)),
            }
        }
    }
    write_output(out, "remainder.csv", &csv)
}

fn pade_row(p: usize, result: &PadeResult, im_tol: f64) -> Result<(String, Option<PoleReport>), Failure> {
    let Some(approx) = result.approximant() else {
        return Ok((format!("{p},{p},false,,,,,,\n"), None));
    };
    if approx.denominator.iter().skip(1).all(Zero::is_zero) {
        return Ok((format!("{p},{p},true,,,,,,\n"), None));
    }
    let poles = find_poles(approx, ROOT_TOL).numerical()?;
    let rep = classify_poles(&poles, im_tol).numerical()?;
    let (tr_abs, tr_re, tr_im) = match rep.t_real {
        Some(z) => (format!("{:.6}", z.norm()), format!("{:.6}", z.re.abs()), format!("{:.6}", z.im.abs())),
        None => Default::default(),
    };
    let row = format!(
        "{p},{p},true,{:.6},{:.6},{:.6},{tr_abs},{tr_re},{tr_im}\n",
        rep.t_min.norm(),
        rep.t_min.re.abs(),
        rep.t_min.im.abs()
    );
    Ok((row, Some(rep)))
}

fn pade(args: &PadeArgs) -> Result<(), Failure> {
    let (series, minus) = load(&args.common, args.order)?;
    let nu = norm_series(&series, args.common.n, minus);
    let c = &nu.coeffs;
    let out = &args.common.output_dir;
    let diagonals: Vec<usize> = if args.diagonal.is_empty() {
        (0..=(c.len() - 1) / 2).collect()
    } else {
        args.diagonal.clone()
    };
    let mut csv = String::from("p,q,exists,t_min_abs,t_min_re,t_min_im,t_real_abs,t_real_re,t_real_im\n");
    let mut reports = Vec::new();
    for &p in &diagonals {
        let result = pade_approximant(c, p, p).data()?;
        let (row, rep) = pade_row(p, &result, args.im_tol)?;
        csv.push_str(&row);
        reports.extend(rep);
    }
    write_output(out, "pade.csv", &csv)?;

    let with_real: Vec<PoleReport> = reports.into_iter().filter(|r| r.t_real.is_some()).collect();
    match pole_statistics(&with_real) {
        Ok(s) => {
            let csv = format!(
                "mean_t_min_abs,rms_t_min_abs,mean_t_real_abs,rms_t_real_abs,band,lower,upper,label\n{:.7},{:.7},{:.7},{:.7},{},{:.2},{:.2},{}\n",
                s.mean_t_min, s.rms_t_min, s.mean_t_real, s.rms_t_real, s.band, s.interval.0, s.interval.1, s.label
            );
            write_output(out, "statistics.csv", &csv)?;
        }
        Err(PadeError::TooFewReports) => eprintln!("pole statistics need at least two approximants with an almost-real pole"),
        Err(e) => return Err(e).numerical(),
    }

    if !args.dlog.is_empty() {
        let mut csv = String::from("p,exists,pole_re,pole_im,lambda_re,lambda_im,alpha_re,alpha_im\n");
        for &p in &args.dlog {
            csv.push_str(&dlog_row(c, p, args.im_tol)?);
        }
        write_output(out, "dlog.csv", &csv)?;
    }
    Ok(())
}

fn dlog_row(c: &[BigRational], p: usize, im_tol: f64) -> Result<String, Failure> {
    let result = dlog_approximant(c, p).data()?;
    let Some(approx) = result.approximant() else {
        return Ok(format!("{p},false,,,,,,\n"));
    };
    if approx.denominator.iter().skip(1).all(Zero::is_zero) {
        return Ok(format!("{p},true,,,,,,\n"));
    }
    let poles = find_poles(approx, ROOT_TOL).numerical()?;
    let rep = classify_poles(&poles, im_tol).numerical()?;
    let Some(pole) = rep.t_real else {
        return Ok(format!("{p},true,,,,,,\n"));
    };
    let pole = if pole.re < 0.0 { -pole } else { pole };
    match dlog_exponent(approx, pole) {
        Ok(d) => Ok(format!(
            "{p},true,{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            d.pole.re, d.pole.im, d.lambda_star.re, d.lambda_star.im, d.alpha_star.re, d.alpha_star.im
        )),
        Err(PadeError::MultipleRoot) => Ok(format!("{p},true,{:.6},{:.6},indeterminate,,,\n", pole.re, pole.im)),
        Err(e) => Err(e).numerical(),
    }
}

fn report(args: &ReportArgs) -> Result<(), Failure> {
    let datum = load_datum(&args.datum).data()?;
    if datum.is_empty() {
        return Err(anyhow!("the datum is zero")).data();
    }
    let profile = detect_symmetries(&datum, 0);
    write_output(&args.output_dir, "profile.txt", &profile.dump())?;
    let full = presentation_report(&profile.plus_group);
    let reduced = presentation_report(&as_pure_rotations(&profile.reduced_plus));
    let text = format!(
        "symmetry group\n{full}\nreduced symmetry group\n{reduced}\nnegating elements {}\n",
        profile.minus_set.len()
    );
    if full.relations.iter().chain(&reduced.relations).any(|r| !r.holds) {
        return Err(anyhow!("a group relation fails")).numerical();
    }
    write_output(&args.output_dir, "presentation.txt", &text)
}
