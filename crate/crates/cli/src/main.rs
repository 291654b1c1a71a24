//! `logcoef` command-line front end.
//!
//! Exit codes: 0 certified or all checks passed, 1 failed, 2 indeterminate,
//! 3 usage or input error, 4 internal numerical error.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use logcoef::certifier::{self, load_tables, verify_against, AppendixCheck, Verdict};
use logcoef::exactnum::{parse_rational, rat, rational_to_f64};
use logcoef::hpreal::{DEFAULT_PRECISION, MAX_PRECISION, MIN_PRECISION};
use logcoef::radius::{self, RadiusRow};
use logcoef::series::{self, ClosedFormId, ExactSeries};
use logcoef::weights::WeightFamily;
use logcoef::{constants, BigRational, Error};

const EXIT_OK: u8 = 0;
const EXIT_FAILED: u8 = 1;
const EXIT_INDETERMINATE: u8 = 2;
const EXIT_USAGE: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "logcoef", version, about = "Exact certification of weighted logarithmic-coefficient inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Working precision in bits for high-precision constants.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION as u32,
          value_parser = clap::value_parser!(u32).range(MIN_PRECISION as i64..=MAX_PRECISION as i64))]
    precision: u32,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Omit the generation timestamp from JSON output.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the three-condition certification for one weight and cutoff.
    Certify {
        /// Weight family, e.g. "twofactornum:alpha=1,beta=1".
        #[arg(long)]
        family: String,
        /// Cutoff N.
        #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
    },
    /// Rebuild the stored Q_k tables and compare them exactly.
    AppendixVerify {
        /// JSON file replacing the built-in tables.
        #[arg(long)]
        tables: Option<PathBuf>,
    },
    /// Table of the sharp constants.
    Constants {
        /// Significant digits in the printed values.
        #[arg(long, default_value_t = 30)]
        digits: usize,
    },
    /// Radii r1..r4 at one b or on an equally spaced grid over [0, 2].
    Radius {
        /// The coefficient bound b = |a_2|; accepts "p/q".
        #[arg(long)]
        b: Option<String>,
        /// Grid size when --b is absent.
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
    /// Data behind the figures.
    FigureData {
        #[arg(value_enum)]
        figure: Figure,
        /// Grid size for the radius figures.
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Closed-form, Koebe sharpness and U-operator identity checks.
    SeriesCheck {
        /// Truncation order for the Koebe checks.
        #[arg(long, default_value_t = 30)]
        order: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Figure {
    Fig1,
    Fig2,
    Fig3,
}

struct Output {
    body: String,
    code: u8,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Internal(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Domain(_) | Error::EmptyInterval { .. } | Error::NotRational(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

struct Ctx {
    format: Option<Format>,
    precision: usize,
    timestamp: bool,
}

impl Ctx {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn json(&self, command: &str, mut body: Value) -> String {
        if let Value::Object(map) = &mut body {
            map.insert("command".into(), json!(command));
            if self.timestamp {
                map.insert("generated_at".into(), json!(chrono::Utc::now().to_rfc3339()));
            }
        }
        let mut s = serde_json::to_string_pretty(&body).expect("json value serializes");
        s.push('\n');
        s
    }
}

fn csv_string<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("csv row serializes");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

fn reject_csv(format: Format, command: &str) -> CliResult<()> {
    if format == Format::Csv {
        return Err(CliError::Usage(format!("{command} has no csv output")));
    }
    Ok(())
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Certified => EXIT_OK,
        Verdict::Failed { .. } => EXIT_FAILED,
        Verdict::Indeterminate { .. } => EXIT_INDETERMINATE,
    }
}

fn cmd_certify(ctx: &Ctx, family: &str, n: usize) -> CliResult<Output> {
    let format = ctx.format_or(Format::Json);
    reject_csv(format, "certify")?;
    let family: WeightFamily = family.parse()?;
    let report = certifier::certify(&family, n)?;
    let code = verdict_code(&report.verdict);
    let body = match format {
        Format::Json => ctx.json("certify", serde_json::to_value(&report).expect("report serializes")),
        _ => {
            let mut s = format!("family: {}\nN: {}\n", report.family, report.n);
            s += &format!("condition (0): {}\n", pass(report.condition0.passed));
            s += &format!(
                "condition (i): {} (N0 = {})\n",
                pass(report.condition_i.passed),
                report.condition_i.n0.map_or("-".into(), |v| v.to_string())
            );
            s += &format!("v_k >= 0: {}\n", pass(report.necessary_v_passed));
            for q in &report.condition_ii {
                s += &format!("Q_{} > 0 on (-1,1): {}\n", q.k, pass(q.passed));
            }
            s += &format!("verdict: {}\n", report.verdict.label());
            if let Verdict::Failed { reason, .. } | Verdict::Indeterminate { reason } = &report.verdict {
                s += &format!("reason: {reason}\n");
            }
            s
        }
    };
    Ok(Output { body, code })
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

fn cmd_appendix_verify(ctx: &Ctx, tables: Option<&PathBuf>) -> CliResult<Output> {
    let format = ctx.format_or(Format::Json);
    reject_csv(format, "appendix-verify")?;
    let tables = match tables {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            load_tables(&text)?
        }
        None => certifier::builtin_tables()?,
    };
    if tables.is_empty() {
        return Err(CliError::Usage("no tables to verify".into()));
    }
    let checks = tables.iter().map(verify_against).collect::<Result<Vec<AppendixCheck>, _>>()?;
    let ok = checks.iter().all(|c| c.all_match && c.profiles_hold);
    let matched: usize = checks.iter().map(|c| c.matched).sum();
    let total: usize = checks.iter().map(|c| c.total).sum();
    let body = match format {
        Format::Json => ctx.json(
            "appendix-verify",
            json!({ "matched": matched, "total": total, "passed": ok, "tables": checks }),
        ),
        _ => {
            let mut s = String::new();
            for c in &checks {
                s += &format!(
                    "{}: {}/{} polynomials match, root profiles {}\n",
                    c.table,
                    c.matched,
                    c.total,
                    if c.profiles_hold { "hold" } else { "violated" }
                );
                for m in &c.mismatches {
                    s += &format!(
                        "  Q_{} coefficient of x^{}: expected {}, rebuilt {}\n",
                        m.k, m.position, m.expected, m.actual
                    );
                }
            }
            s += &format!("total: {matched}/{total} matched\n");
            s
        }
    };
    Ok(Output {
        body,
        code: if ok { EXIT_OK } else { EXIT_FAILED },
    })
}

fn cmd_constants(ctx: &Ctx, digits: usize) -> CliResult<Output> {
    let rows = constants::table(ctx.precision, digits)?;
    let body = match ctx.format_or(Format::Json) {
        Format::Json => ctx.json("constants", json!({ "precision": ctx.precision, "constants": rows })),
        Format::Csv => csv_string(&rows),
        Format::Text => rows
            .iter()
            .map(|r| format!("{:<24} {} (+/- {:.1e})  {}\n", r.name, r.value, r.error, r.definition))
            .collect(),
    };
    Ok(Output { body, code: EXIT_OK })
}

fn parse_b(s: &str) -> CliResult<f64> {
    let b = parse_rational(s)?;
    if b < rat(0, 1) || b > rat(2, 1) {
        return Err(CliError::Usage(format!("b must lie in [0, 2], got {s}")));
    }
    Ok(rational_to_f64(&b))
}

fn radius_rows(b: Option<&str>, points: usize) -> CliResult<Vec<RadiusRow>> {
    let grid = match b {
        Some(s) => vec![parse_b(s)?],
        None if points < 2 => return Err(CliError::Usage("--points must be at least 2".into())),
        None => radius::default_grid(points),
    };
    Ok(radius::radius_table(&grid)?)
}

fn cmd_radius(ctx: &Ctx, b: Option<&str>, points: usize) -> CliResult<Output> {
    let rows = radius_rows(b, points)?;
    let body = match ctx.format_or(Format::Csv) {
        Format::Json => ctx.json("radius", json!({ "rows": rows })),
        Format::Csv => csv_string(&rows),
        Format::Text => {
            let mut s = format!("{}\n", radius::CSV_HEADER);
            for r in &rows {
                s += &r.to_csv();
                s.push('\n');
            }
            s
        }
    };
    Ok(Output { body, code: EXIT_OK })
}

#[derive(Serialize)]
struct Fig1Row {
    x: f64,
    q1: f64,
}

#[derive(Serialize)]
struct Fig2Row {
    b: f64,
    r1: f64,
    r2: f64,
    r2_minus_r1: f64,
}

#[derive(Serialize)]
struct Fig3Row {
    b: f64,
    r3: f64,
    r4: f64,
    r4_minus_r3: f64,
}

/// `Q_1` on 401 points of `[−1, 1]` for `n/(n²+b₀)`, `N = 3`.
fn fig1_rows() -> CliResult<(BigRational, Vec<Fig1Row>)> {
    let b0 = radius::solve_b0()?.lower;
    let family = WeightFamily::rat_quad_num(rat(0, 1), b0.clone())?;
    let seq = logcoef::weights::DerivedSeq::new(family, 3)?;
    let q1 = certifier::build_q(&seq, 1)?;
    let rows = (0..=400)
        .map(|i| {
            let x = rat(i - 200, 200);
            Fig1Row {
                x: rational_to_f64(&x),
                q1: rational_to_f64(&q1.eval(&x)),
            }
        })
        .collect();
    Ok((b0, rows))
}

fn cmd_figure_data(ctx: &Ctx, figure: Figure, points: usize) -> CliResult<Output> {
    let format = ctx.format_or(Format::Csv);
    reject_text(format)?;
    let body = match figure {
        Figure::Fig1 => {
            let (b0, rows) = fig1_rows()?;
            match format {
                Format::Json => ctx.json(
                    "figure-data",
                    json!({ "figure": "fig1", "b": logcoef::exactnum::format_rational(&b0), "rows": rows }),
                ),
                _ => csv_string(&rows),
            }
        }
        Figure::Fig2 | Figure::Fig3 => {
            let rows = radius_rows(None, points)?;
            if figure == Figure::Fig2 {
                let rows: Vec<Fig2Row> = rows
                    .iter()
                    .map(|r| Fig2Row { b: r.b, r1: r.r1, r2: r.r2, r2_minus_r1: r.r2_minus_r1 })
                    .collect();
                match format {
                    Format::Json => ctx.json("figure-data", json!({ "figure": "fig2", "rows": rows })),
                    _ => csv_string(&rows),
                }
            } else {
                let rows: Vec<Fig3Row> = rows
                    .iter()
                    .map(|r| Fig3Row { b: r.b, r3: r.r3, r4: r.r4, r4_minus_r3: r.r4_minus_r3 })
                    .collect();
                match format {
                    Format::Json => ctx.json("figure-data", json!({ "figure": "fig3", "rows": rows })),
                    _ => csv_string(&rows),
                }
            }
        }
    };
    Ok(Output { body, code: EXIT_OK })
}

fn reject_text(format: Format) -> CliResult<()> {
    if format == Format::Text {
        return Err(CliError::Usage("figure-data emits csv or json".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct NamedCheck {
    name: String,
    passed: bool,
    detail: String,
}

fn series_checks(order: usize, prec: usize) -> CliResult<Vec<NamedCheck>> {
    if order < 3 {
        return Err(CliError::Usage("--order must be at least 3".into()));
    }
    let mut out = Vec::new();
    for id in ClosedFormId::ALL {
        let c = series::series_closed_form_check(id);
        out.push(NamedCheck {
            name: format!("closed form {}", id.as_str()),
            passed: c.passed,
            detail: format!("max deviation {:.3e}", c.max_deviation),
        });
    }
    let koebe = ExactSeries::koebe(order + 1);
    let gamma = series::log_coefficients(&koebe)?;
    let lm_ok = (1..=order)
        .map(|n| series::lebedev_milin_check(&gamma, n).map(|c| c.slack == rat(0, 1)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .all(|b| b);
    out.push(NamedCheck {
        name: "Koebe Lebedev-Milin slack".into(),
        passed: lm_ok,
        detail: format!("slack exactly 0 for n <= {order}"),
    });
    for spec in [
        "reciprocal:alpha=1",
        "twofactornum:alpha=1,beta=1",
        "ratquadnum:a=0,b=4/3",
        "squaredfactor:alpha=1,beta=1/20",
    ] {
        let family: WeightFamily = spec.parse()?;
        let w = series::weighted_check(&family, &gamma, order, prec)?;
        out.push(NamedCheck {
            name: format!("Koebe weighted equality {spec}"),
            passed: w.termwise_equal,
            detail: format!("{order} terms compared exactly"),
        });
    }
    let pf = series::transform_pf(&koebe)?;
    let u = series::u_operator(&pf)?;
    let mut ok = true;
    for n in 2..u.order().min(gamma.len()) {
        ok &= u.coeff(n) == Some(&series::u_pf_coefficient(&gamma, n)?);
    }
    let h = series::transform_h(&koebe)?;
    let uh = series::u_operator(&h)?;
    for n in 2..uh.order().min(gamma.len()) {
        ok &= uh.coeff(n) == Some(&series::u_h_coefficient(&gamma, n)?);
    }
    out.push(NamedCheck {
        name: "Koebe U-operator coefficients".into(),
        passed: ok,
        detail: "U_H and U_{P_f} match the gamma formulas exactly".into(),
    });
    Ok(out)
}

fn cmd_series_check(ctx: &Ctx, order: usize) -> CliResult<Output> {
    let checks = series_checks(order, ctx.precision)?;
    let ok = checks.iter().all(|c| c.passed);
    let body = match ctx.format_or(Format::Text) {
        Format::Json => ctx.json("series-check", json!({ "passed": ok, "checks": checks })),
        Format::Csv => csv_string(&checks),
        Format::Text => checks
            .iter()
            .map(|c| format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
            .collect(),
    };
    Ok(Output {
        body,
        code: if ok { EXIT_OK } else { EXIT_FAILED },
    })
}

fn run(cli: Cli) -> CliResult<Output> {
    let ctx = Ctx {
        format: cli.format,
        precision: cli.precision as usize,
        timestamp: !cli.no_timestamp,
    };
    match &cli.command {
        Command::Certify { family, n } => cmd_certify(&ctx, family, *n as usize),
        Command::AppendixVerify { tables } => cmd_appendix_verify(&ctx, tables.as_ref()),
        Command::Constants { digits } => cmd_constants(&ctx, *digits),
        Command::Radius { b, points } => cmd_radius(&ctx, b.as_deref(), *points),
        Command::FigureData { figure, points } => cmd_figure_data(&ctx, *figure, *points),
        Command::SeriesCheck { order } => cmd_series_check(&ctx, *order),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out_path = cli.out.clone();
    match run(cli) {
        Ok(out) => {
            let written = match &out_path {
                Some(p) => fs::write(p, &out.body),
                None => io::stdout().write_all(out.body.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            ExitCode::from(out.code)
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
