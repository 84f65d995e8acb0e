//! `exactreal` command-line tool.
//!
//! Exit codes: 0 success, 1 other failure, 2 domain error, 3 precision
//! exhausted or promise violated, 4 parse or usage error.
//! Results go to stdout, diagnostics to stderr.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use exactreal::bench::{self, BenchOp, NRange, CSV_HEADER};
use exactreal::calculus::{analytic_max, integrate, max_param, oracle_from_real_expr, AnalyticFn, Modulus};
use exactreal::enrich::{eigenvector_2x2, SymMat2};
use exactreal::expr::{parse_expr, parse_number};
use exactreal::logistic::{Logistic, Mode, RationalLimits};
use exactreal::ode::IVProblem;
use exactreal::{Dyadic, Error, EvalConfig, Real, RealSeq};

const BENCH_INPUTS: &str = "\
Inputs per op (deterministic):
  add, mul   two seeded random rationals a/(d 2^n) in (0, 1), a with n bits, d odd with 31 bits
  exp        argument 2^k
  hexp       argument 2^(-2^j), j = k, or j = ceil(log2 n) when k = 0
  series     geometric series with A = 2^k, q = 2, r = 1 at x = 1/2
  max        t(1-t) on [0, 1], modulus n -> n; work_prec is the grid exponent
  integrate  t(1-t) on [0, 1], modulus n -> n; work_prec is the grid exponent
  ode        y' = (1-y)/2 up to t = 1; work_prec is log2 of the step count";

#[derive(Parser)]
#[command(name = "exactreal", version, about = "Exact real arithmetic with lazy ball evaluation")]
#[command(after_help = "Environment: EXACTREAL_MAX_PREC overrides the precision cap (bits).\n\
Exit codes: 0 ok, 1 other, 2 domain, 3 precision exhausted or promise violated, 4 parse.")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an expression such as "exp(sqrt(2)) / 3".
    Eval(EvalArgs),
    /// Iterate x <- r x (1 - x).
    Logistic(LogisticArgs),
    /// Measure cost against precision and write CSV.
    #[command(after_help = BENCH_INPUTS)]
    Bench(BenchArgs),
    /// Run a built-in fixture and compare with its closed form.
    Demo(DemoArgs),
    /// Eigenvector of a symmetric 2x2 matrix.
    Ev(EvArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dec,
    Dyadic,
}

#[derive(Args)]
struct EvalArgs {
    expr: String,
    /// Absolute precision n: print a_n with |x - a_n 2^-n| <= 2^-n.
    #[arg(long, conflicts_with = "digits")]
    prec: Option<u64>,
    /// Decimal digits after the point.
    #[arg(long)]
    digits: Option<usize>,
    #[arg(long, value_enum, default_value = "dec")]
    format: Format,
    /// Bind a variable, e.g. --var x=1/3 (repeatable).
    #[arg(long = "var", value_name = "NAME=VALUE")]
    vars: Vec<String>,
}

#[derive(Args)]
struct LogisticArgs {
    #[arg(long, default_value_t = 30)]
    steps: u64,
    #[arg(long, default_value = "exact")]
    mode: String,
    #[arg(long, default_value = "15/4")]
    r: String,
    #[arg(long, default_value = "1/2")]
    x0: String,
    #[arg(long, default_value_t = 10)]
    digits: usize,
    /// Precision growth factor of the restart loop (exact mode).
    #[arg(long, default_value_t = 2)]
    growth: u64,
    /// Step limit of the rational mode.
    #[arg(long, default_value_t = 64)]
    max_rational_steps: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    op: String,
    /// a:b:s for additive steps or a:b:*s for multiplicative steps.
    #[arg(long, default_value = "1024:65536:*2")]
    n_range: String,
    #[arg(long, default_value_t = 0)]
    k: u64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    csv: Option<String>,
    /// Repetitions per row; the fastest is kept.
    #[arg(long, default_value_t = 3)]
    reps: u32,
}

#[derive(Args)]
struct DemoArgs {
    #[command(subcommand)]
    which: Demo,
}

#[derive(Subcommand)]
enum Demo {
    /// Parametric maximum of t(1-t), grid and analytic versions.
    Max {
        #[arg(long, default_value_t = 10)]
        n: u64,
    },
    /// Integrals of t and t(1-t) over [0, 1].
    Integrate {
        #[arg(long, default_value_t = 10)]
        n: u64,
    },
    /// Three initial value problems with closed-form solutions.
    Ode {
        #[arg(long, default_value_t = 10)]
        n: u64,
        /// Print the trace of y' = (1-y)/2 as CSV (t,center,radius).
        #[arg(long)]
        trace: bool,
        /// Like --trace, but rows are written as they are computed.
        #[arg(long)]
        stream: bool,
    },
    /// Residuals for seeded random symmetric matrices.
    Ev {
        #[arg(long, default_value_t = 30)]
        n: u64,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct EvArgs {
    #[arg(long)]
    a11: String,
    #[arg(long)]
    a12: String,
    #[arg(long)]
    a22: String,
    /// Number of distinct eigenvalues (1 or 2).
    #[arg(long, default_value_t = 2)]
    distinct: u8,
    #[arg(long, default_value_t = 20)]
    digits: usize,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(io::Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Domain(_)) => 2,
            Failure::Lib(Error::PrecisionExhausted { .. } | Error::PromiseViolation(_)) => 3,
            Failure::Lib(Error::Parse { .. }) | Failure::Usage(_) => 4,
            _ => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Io(e) => format!("i/o error: {e}"),
            Failure::Usage(m) => m.clone(),
        }
    }
}

type Out<T = ()> = std::result::Result<T, Failure>;

fn config() -> Out<EvalConfig> {
    let mut cfg = EvalConfig::default();
    if let Ok(v) = std::env::var("EXACTREAL_MAX_PREC") {
        let max = v
            .trim()
            .parse::<u64>()
            .map_err(|_| Failure::Usage(format!("EXACTREAL_MAX_PREC must be a number of bits, got {v:?}")))?;
        cfg = cfg.with_max_precision(max);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn real_from_str(s: &str) -> Out<Real> {
    let q = parse_number(s)?;
    Ok(Real::rational(q.numer().clone(), q.denom().clone()))
}

/// Upper bound on `|x|` from an enclosure at precision `n`.
fn abs_bound(x: &Real, n: u64, cfg: &EvalConfig) -> Out<Dyadic> {
    Ok(x.enclose(n, cfg)?.mag_upper())
}

fn deviation(value: &Dyadic, exact: &Real, n: u64, cfg: &EvalConfig) -> Out<Dyadic> {
    abs_bound(&(Real::constant(value.clone()) - exact), n + 20, cfg)
}

fn report(out: &mut impl Write, name: &str, value: &Dyadic, exact: &Real, n: u64, cfg: &EvalConfig) -> Out {
    let dev = deviation(value, exact, n, cfg)?;
    let bound = Dyadic::pow2(-(n as i64));
    let verdict = if dev <= bound { "ok" } else { "FAIL" };
    writeln!(
        out,
        "{name}: value {} bound 2^-{n} deviation {:.3e} {verdict}",
        value.to_decimal_string(n as usize / 3 + 4),
        dev.to_f64()
    )?;
    Ok(())
}

fn cmd_eval(a: &EvalArgs, cfg: &EvalConfig) -> Out {
    let e = parse_expr(&a.expr)?;
    let mut env = HashMap::new();
    for binding in &a.vars {
        let (name, value) = binding
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("expected NAME=VALUE, got {binding:?}")))?;
        env.insert(name.trim().to_string(), real_from_str(value)?);
    }
    let x = e.to_real(&env)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match (a.prec, a.format) {
        (Some(n), Format::Dyadic) => {
            let v = x.approx_with(n, cfg)?.value;
            writeln!(out, "{v}*2^-{n}")?;
        }
        (Some(n), Format::Dec) => {
            let d = x.approx_dyadic(n, cfg)?;
            writeln!(out, "{}", d.to_decimal_string(n as usize))?;
        }
        (None, Format::Dec) => writeln!(out, "{}", x.to_decimal(a.digits.unwrap_or(20).max(1), cfg)?)?,
        (None, Format::Dyadic) => {
            let digits = a.digits.unwrap_or(20).max(1);
            let n = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 2;
            let v = x.approx_with(n, cfg)?.value;
            writeln!(out, "{v}*2^-{n}")?;
        }
    }
    Ok(())
}

fn cmd_logistic(a: &LogisticArgs, cfg: &EvalConfig) -> Out {
    let mode: Mode = a.mode.parse()?;
    let l = Logistic::new(parse_number(&a.r)?, parse_number(&a.x0)?)?;
    let cfg = cfg.clone().with_growth(a.growth);
    cfg.validate()?;
    let limits = RationalLimits {
        max_steps: a.max_rational_steps,
        ..RationalLimits::default()
    };
    let s = l.run(mode, a.steps, a.digits.max(1), &cfg, limits)?;
    println!("{s}");
    Ok(())
}

fn cmd_bench(a: &BenchArgs, cfg: &EvalConfig) -> Out {
    let op: BenchOp = a.op.parse()?;
    let range: NRange = a.n_range.parse()?;
    let rows = bench::sweep(op, &range, a.k, a.reps, cfg);
    let mut sink: Box<dyn Write> = match &a.csv {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    writeln!(sink, "{CSV_HEADER}")?;
    for r in &rows {
        writeln!(sink, "{}", r.to_csv())?;
    }
    sink.flush()?;
    let failed = rows.iter().filter(|r| r.status == bench::Status::Failed).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed", rows.len());
    }
    if let Some(s) = bench::loglog_slope(&rows) {
        eprintln!("fitted log-log slope of time against n: {s:.3}");
    }
    Ok(())
}

fn parabola(cfg: &EvalConfig) -> Out<exactreal::calculus::FunctionOracle> {
    Ok(oracle_from_real_expr(
        |t| &t * &(Real::one() - &t),
        Modulus::new(|n| n),
        Dyadic::zero(),
        Dyadic::one(),
        cfg.clone(),
    )?)
}

fn demo_max(n: u64, cfg: &EvalConfig) -> Out {
    let f = parabola(cfg)?;
    let mut out = io::stdout().lock();
    writeln!(out, "f(t) = t(1 - t) on [0, 1], modulus n -> n")?;
    let v = max_param(&f, &Dyadic::one(), n)?;
    report(&mut out, "max on [0, 1]", &v, &Real::rational(1, 4), n, cfg)?;
    let v = max_param(&f, &Dyadic::pow2(-2), n)?;
    report(&mut out, "max on [0, 1/4]", &v, &Real::rational(3, 16), n, cfg)?;
    // t - t^2 = 1/4 - (t - 1/2)^2
    let coeffs = RealSeq::finite(vec![Real::rational(1, 4), Real::zero(), Real::from_i64(-1)]);
    let g = AnalyticFn::new(coeffs, Dyadic::pow2(-1), 1, 1)?;
    let r = g.radius().clone();
    let lo = &Dyadic::pow2(-1) - &r;
    let hi = &Dyadic::pow2(-1) + &r;
    let v = analytic_max(&g, &lo, &hi, n, cfg)?;
    report(&mut out, "analytic max around 1/2", &v, &Real::rational(1, 4), n, cfg)?;
    Ok(())
}

fn demo_integrate(n: u64, cfg: &EvalConfig) -> Out {
    let mut out = io::stdout().lock();
    let id = oracle_from_real_expr(|t| t, Modulus::new(|n| n), Dyadic::zero(), Dyadic::one(), cfg.clone())?;
    let v = integrate(&id, &Dyadic::one(), n)?;
    report(&mut out, "integral of t over [0, 1]", &v, &Real::rational(1, 2), n, cfg)?;
    let f = parabola(cfg)?;
    let v = integrate(&f, &Dyadic::one(), n)?;
    report(&mut out, "integral of t(1 - t) over [0, 1]", &v, &Real::rational(1, 6), n, cfg)?;
    Ok(())
}

fn relaxation() -> IVProblem {
    IVProblem::new(1, Modulus::lipschitz(0), |_, y, _| Ok((&Dyadic::one() - y).half()))
}

fn demo_ode(n: u64, trace: bool, stream: bool, cfg: &EvalConfig) -> Out {
    let mut out = io::stdout().lock();
    if trace || stream {
        let p = relaxation();
        writeln!(out, "t,center,radius")?;
        let digits = n as usize / 3 + 4;
        let mut row = |e: exactreal::ode::Enclosure| -> Out {
            writeln!(
                out,
                "{},{},{:.3e}",
                e.t.to_decimal_string(digits),
                e.value.center().to_decimal_string(digits),
                e.value.radius().to_f64()
            )?;
            Ok(())
        };
        if stream {
            let mut failure = None;
            let res = p.trace_streaming(n, |e| {
                row(e).map_err(|f| {
                    let msg = f.message();
                    failure = Some(f);
                    Error::Domain(msg)
                })
            });
            if let Some(f) = failure {
                return Err(f);
            }
            res?;
        } else {
            for e in p.trace(n)? {
                row(e)?;
            }
        }
        return Ok(());
    }
    let one = Dyadic::one();
    let unit = IVProblem::new(1, Modulus::lipschitz(0), |_, _, _| Ok(Dyadic::one()));
    let v = unit.solve(&Dyadic::pow2(-1), n)?;
    report(&mut out, "y' = 1 at t = 1/2", &v, &Real::rational(1, 2), n, cfg)?;
    let decay = IVProblem::new(1, Modulus::lipschitz(0), |_, y, _| Ok(-y));
    let v = decay.solve(&one, n)?;
    report(&mut out, "y' = -y from y(0) = 0 at t = 1", &v, &Real::zero(), n, cfg)?;
    let v = relaxation().solve(&one, n)?;
    let exact = Real::one() - (-Real::rational(1, 2)).exp();
    report(&mut out, "y' = (1 - y)/2 at t = 1", &v, &exact, n, cfg)?;
    Ok(())
}

fn print_eigen(out: &mut impl Write, m: &SymMat2, distinct: u8, n: u64, digits: usize, cfg: &EvalConfig) -> Out {
    let ep = eigenvector_2x2(m, distinct, cfg)?;
    let (r1, r2) = m.residual(&ep.vector, &ep.lambda);
    let residual = abs_bound(&(&r1 * &r1 + &r2 * &r2).sqrt(), n + 4, cfg)?;
    let norm = &ep.vector.0 * &ep.vector.0 + &ep.vector.1 * &ep.vector.1 - Real::one();
    let norm_err = abs_bound(&norm, n + 4, cfg)?;
    writeln!(out, "lambda {}", ep.lambda.to_decimal(digits, cfg)?)?;
    writeln!(
        out,
        "vector ({}, {})",
        ep.vector.0.to_decimal(digits, cfg)?,
        ep.vector.1.to_decimal(digits, cfg)?
    )?;
    let bound = Dyadic::pow2(-(n as i64));
    let verdict = if residual <= bound && norm_err <= bound { "ok" } else { "FAIL" };
    writeln!(
        out,
        "residual {:.3e} norm error {:.3e} bound 2^-{n} {verdict}",
        residual.to_f64(),
        norm_err.to_f64()
    )?;
    Ok(())
}

fn demo_ev(n: u64, count: usize, seed: u64, cfg: &EvalConfig) -> Out {
    let mut out = io::stdout().lock();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < count {
        let mut q = || (rng.gen_range(-40i64..=40), rng.gen_range(1i64..=9));
        let (a, b, c) = (q(), q(), q());
        let f = |(p, d): (i64, i64)| p as f64 / d as f64;
        if (f(a) - f(c)).powi(2) + 4.0 * f(b).powi(2) < 1.5 {
            continue;
        }
        done += 1;
        writeln!(out, "matrix [[{}/{}, {}/{}], [{}/{}, {}/{}]] distinct 2", a.0, a.1, b.0, b.1, b.0, b.1, c.0, c.1)?;
        let m = SymMat2::new(Real::rational(a.0, a.1), Real::rational(b.0, b.1), Real::rational(c.0, c.1));
        print_eigen(&mut out, &m, 2, n, 12, cfg)?;
    }
    writeln!(out, "matrix [[3, 0], [0, 3]] distinct 1")?;
    let m = SymMat2::new(Real::from_i64(3), Real::zero(), Real::from_i64(3));
    print_eigen(&mut out, &m, 1, n, 12, cfg)?;
    Ok(())
}

fn cmd_ev(a: &EvArgs, cfg: &EvalConfig) -> Out {
    let m = SymMat2::new(real_from_str(&a.a11)?, real_from_str(&a.a12)?, real_from_str(&a.a22)?);
    let n = (a.digits as f64 * std::f64::consts::LOG2_10).ceil() as u64;
    let mut out = io::stdout().lock();
    writeln!(out, "matrix [[{}, {}], [{}, {}]] distinct {}", a.a11, a.a12, a.a12, a.a22, a.distinct)?;
    print_eigen(&mut out, &m, a.distinct, n, a.digits.max(1), cfg)
}

fn run(cli: Cli) -> Out {
    let cfg = config()?;
    match &cli.cmd {
        Command::Eval(a) => cmd_eval(a, &cfg),
        Command::Logistic(a) => cmd_logistic(a, &cfg),
        Command::Bench(a) => cmd_bench(a, &cfg),
        Command::Demo(d) => match d.which {
            Demo::Max { n } => demo_max(n, &cfg),
            Demo::Integrate { n } => demo_integrate(n, &cfg),
            Demo::Ode { n, trace, stream } => demo_ode(n, trace, stream, &cfg),
            Demo::Ev { n, count, seed } => demo_ev(n, count, seed, &cfg),
        },
        Command::Ev(a) => cmd_ev(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
