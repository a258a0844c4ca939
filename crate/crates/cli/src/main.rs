use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pirarray::bounds::{bound_report, bound_table, table_csv, BoundReport};
use pirarray::code::{load_code_document, save_code, save_code_document};
use pirarray::constructions::{ConstructionOutput, Constructor, DEFAULT_MAX_SERVERS};
use pirarray::designs::{load_steiner, make_steiner};
use pirarray::emulator::{emulate_trials, EmulationReport};
use pirarray::scalar::{format_rational, parse_rational, to_decimal};
use pirarray::verifier::{
    check_certificate, exact_k, load_certificate, save_certificate, VerifierConfig,
};
use pirarray::{example_7x4, Error, PirArrayCode, Rational, RecoveryCertificate};

#[derive(Parser)]
#[command(name = "pirarray", version, about = "PIR array codes: build, verify, bound, emulate")]
struct Cli {
    /// Output format for summaries.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    C1,
    C2,
    General,
    GeneralRational,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code family with its recovery certificate.
    Construct {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        d: Option<usize>,
        /// s as `a/b` or `a`.
        #[arg(long)]
        s: Option<String>,
        /// Steiner system file for c2 (generated for d = 1, 2 when absent).
        #[arg(long)]
        steiner: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_SERVERS)]
        max_servers: u64,
    },
    /// Compute k by exhaustive search (or a lower bound for large codes).
    Verify {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, default_value_t = VerifierConfig::default().exact_limit)]
        exact_limit: usize,
        #[arg(long, default_value_t = VerifierConfig::default().node_budget)]
        node_budget: u64,
    },
    /// Check a recovery certificate against a code.
    Certify {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Lower and upper rate bounds at one (s, t).
    Bounds {
        #[arg(long)]
        s: String,
        #[arg(long)]
        t: u64,
    },
    /// Bound table over a grid of s and t.
    Table {
        /// Comma-separated list of s values.
        #[arg(long, value_delimiter = ',', required = true)]
        s_list: Vec<String>,
        #[arg(long, default_value_t = 1)]
        t_min: u64,
        #[arg(long)]
        t_max: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Recover every part from every certificate set over random databases.
    Emulate {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        cert: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Part size in bits.
        #[arg(long, default_value = "64", value_parser = ["8", "32", "64", "128"])]
        word_bits: String,
    },
    /// Write the bundled 7x4 example code and its certificate.
    Example {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Check(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Unsupported(_) | Error::TooLarge(_) => Failure::Usage(e.to_string()),
            Error::Internal(_) => Failure::Internal(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

struct Ctx {
    format: Format,
}

impl Ctx {
    fn emit(&self, text: &str, value: Value) {
        // a closed pipe (e.g. `| head`) is not an error
        let mut out = io::stdout().lock();
        let _ = match self.format {
            Format::Text => writeln!(out, "{text}"),
            Format::Json => writeln!(out, "{value}"),
        };
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Check(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Outcome {
    fs::write(path, bytes).map_err(|e| Failure::Check(format!("{}: {e}", path.display())))
}

fn parse_s(s: &str) -> Result<Rational, Failure> {
    parse_rational(s).ok_or_else(|| Failure::Usage(format!("cannot parse s = {s:?}; use a/b or an integer")))
}

fn load_code(path: &Path) -> Result<PirArrayCode, Failure> {
    Ok(load_code_document(&read(path)?)?.code)
}

fn load_cert(path: &Path) -> Result<RecoveryCertificate, Failure> {
    Ok(load_certificate(&read(path)?)?)
}

#[allow(clippy::too_many_arguments)]
fn construct(
    ctx: &Ctx,
    family: FamilyArg,
    t: usize,
    d: Option<usize>,
    s: Option<String>,
    steiner: Option<PathBuf>,
    out: Option<PathBuf>,
    cert: Option<PathBuf>,
    max_servers: u64,
) -> Outcome {
    let builder = Constructor { max_servers };
    let s = s.as_deref().map(parse_s).transpose()?;
    // d from --d, or from s = 1 + d/t
    let resolve_d = || -> Result<usize, Failure> {
        if let Some(d) = d {
            return Ok(d);
        }
        let s = s
            .as_ref()
            .ok_or_else(|| Failure::Usage("give --d or --s".into()))?;
        let p = s * Rational::from_integer(t.into());
        if !p.is_integer() || p <= Rational::from_integer(t.into()) {
            return Err(Failure::Usage(format!(
                "s·t must be an integer above t, got {}",
                format_rational(&p)
            )));
        }
        Ok(p.to_integer().to_string().parse::<usize>().map_err(|e| Failure::Usage(e.to_string()))? - t)
    };
    let output: ConstructionOutput = match family {
        FamilyArg::C1 => builder.construction1(t, resolve_d()?)?,
        FamilyArg::C2 => {
            let d = resolve_d()?;
            let sys = match steiner {
                Some(path) => load_steiner(&read(&path)?)?,
                None => make_steiner(d, t + d)?,
            };
            builder.construction2(t, d, &sys)?
        }
        FamilyArg::General => {
            let s = s.ok_or_else(|| Failure::Usage("--s is required for the general family".into()))?;
            if !s.is_integer() {
                return Err(Failure::Usage(format!(
                    "s = {} is not an integer; use --family general-rational",
                    format_rational(&s)
                )));
            }
            let si = s
                .to_integer()
                .to_string()
                .parse::<usize>()
                .map_err(|_| Failure::Usage("s out of range".into()))?;
            builder.general_construction(si, t)?
        }
        FamilyArg::GeneralRational => {
            let s = s.ok_or_else(|| Failure::Usage("--s is required for general-rational".into()))?;
            let num = s.numer().to_string().parse::<u64>();
            let den = s.denom().to_string().parse::<u64>();
            match (num, den) {
                (Ok(n), Ok(dn)) => builder.general_construction_rational(n, dn, t)?,
                _ => return Err(Failure::Usage("s must be a positive rational".into())),
            }
        }
    };
    check_certificate(&output.code, &output.certificate)
        .map_err(|v| Failure::Internal(format!("built certificate rejected: {v}")))?;
    let family_value = output.family.to_value();
    if let Some(path) = &out {
        write(path, &save_code_document(&output.code, Some(&family_value)))?;
    }
    if let Some(path) = &cert {
        write(path, &save_certificate(&output.certificate))?;
    }
    let rate = output.rate();
    let matches: Vec<String> = bound_report(&output.s(), output.code.t() as u64)
        .map(|r| {
            r.lower
                .iter()
                .chain(&r.upper)
                .filter(|(_, v)| *v == rate)
                .map(|(l, _)| l.clone())
                .collect()
        })
        .unwrap_or_default();
    let mut text = format!(
        "m={} k={} rate={}",
        output.predicted_m,
        output.predicted_k,
        format_rational(&rate)
    );
    text.push_str(&format!(
        "\nfamily={} s={} t={} eta={:?}",
        output.family.name, output.family.s, output.family.t, output.family.eta
    ));
    if !matches.is_empty() {
        text.push_str(&format!("\nmatches {}", matches.join(" ")));
    }
    ctx.emit(
        &text,
        json!({
            "m": output.predicted_m,
            "k": output.predicted_k,
            "rate": format_rational(&rate),
            "family": family_value,
            "matches": matches,
        }),
    );
    Ok(())
}

fn verify(ctx: &Ctx, code: &Path, exact_limit: usize, node_budget: u64) -> Outcome {
    let code = load_code(code)?;
    let report = exact_k(&code, &VerifierConfig { exact_limit, node_budget });
    let mode = |exact: bool| if exact { "exact" } else { "lower bound" };
    let mut text = String::new();
    for part in &report.parts {
        text.push_str(&format!(
            "x_{}: {} ({})\n",
            part.part + 1,
            part.max_disjoint,
            mode(part.exact)
        ));
    }
    text.push_str(&format!(
        "k={} ({}) rate={}",
        report.k(),
        mode(report.exact()),
        format_rational(&report.rate())
    ));
    ctx.emit(
        &text,
        json!({
            "m": report.m,
            "k": report.k(),
            "exact": report.exact(),
            "rate": format_rational(&report.rate()),
            "parts": report.parts.iter().map(|p| json!({
                "part": p.part + 1,
                "max_disjoint": p.max_disjoint,
                "exact": p.exact,
            })).collect::<Vec<_>>(),
        }),
    );
    Ok(())
}

fn certify(ctx: &Ctx, code: &Path, cert: &Path) -> Outcome {
    let code = load_code(code)?;
    let cert = load_cert(cert)?;
    match check_certificate(&code, &cert) {
        Ok(()) => {
            ctx.emit(
                &format!("pass k={}", cert.claimed_k),
                json!({"pass": true, "k": cert.claimed_k}),
            );
            Ok(())
        }
        Err(v) => {
            ctx.emit(
                &format!("fail: {v}"),
                json!({
                    "pass": false,
                    "violation": v.to_string(),
                    "part": v.part.map(|p| p + 1),
                    "set": v.set_index.map(|s| s + 1),
                }),
            );
            Err(Failure::Check(String::new()))
        }
    }
}

fn labeled_json(list: &[(String, Rational)]) -> Vec<Value> {
    list.iter()
        .map(|(l, v)| json!({"source": l, "value": format_rational(v)}))
        .collect()
}

fn report_json(r: &BoundReport) -> Value {
    json!({
        "s": format_rational(&r.s),
        "t": r.t,
        "lower": labeled_json(&r.lower),
        "upper": labeled_json(&r.upper),
        "best_lower": r.best_lower.as_ref().map(format_rational),
        "best_upper": format_rational(&r.best_upper),
        "tight": r.tight,
    })
}

fn bounds(ctx: &Ctx, s: &str, t: u64) -> Outcome {
    let s = parse_s(s)?;
    let r = bound_report(&s, t)?;
    let mut text = String::new();
    for (l, v) in &r.lower {
        text.push_str(&format!("lower {l} = {}\n", format_rational(v)));
    }
    for (l, v) in &r.upper {
        text.push_str(&format!("upper {l} = {}\n", format_rational(v)));
    }
    if r.tight {
        text.push_str(&format!("tight g={}", format_rational(&r.best_upper)));
    } else {
        let lower = r.best_lower.as_ref().map_or("-".to_string(), format_rational);
        text.push_str(&format!(
            "gap {lower} <= g <= {}",
            format_rational(&r.best_upper)
        ));
    }
    ctx.emit(&text, report_json(&r));
    Ok(())
}

fn table(ctx: &Ctx, s_list: &[String], t_min: u64, t_max: u64, csv: Option<PathBuf>) -> Outcome {
    let s_values = s_list.iter().map(|s| parse_s(s)).collect::<Result<Vec<_>, _>>()?;
    if t_min == 0 || t_max < t_min {
        return Err(Failure::Usage(format!("empty t range {t_min}..={t_max}")));
    }
    let rows = bound_table(&s_values, t_min..=t_max)?;
    if let Some(path) = &csv {
        write(path, table_csv(&rows).as_bytes())?;
    }
    let mut text = format!("{:>6} {:>4} {:>10} {:>10} tight", "s", "t", "lower", "upper");
    for r in &rows {
        let lower = r.best_lower.as_ref().map_or("-".to_string(), |v| to_decimal(v, 6));
        text.push_str(&format!(
            "\n{:>6} {:>4} {:>10} {:>10} {}",
            format_rational(&r.s),
            r.t,
            lower,
            to_decimal(&r.best_upper, 6),
            r.tight
        ));
    }
    ctx.emit(&text, Value::Array(rows.iter().map(report_json).collect()));
    Ok(())
}

fn emulate(ctx: &Ctx, code: &Path, cert: &Path, seed: u64, trials: u64, bits: &str) -> Outcome {
    let code = load_code(code)?;
    let cert = load_cert(cert)?;
    let report: EmulationReport = match bits {
        "8" => emulate_trials::<u8>(&code, &cert, seed, trials)?,
        "32" => emulate_trials::<u32>(&code, &cert, seed, trials)?,
        "128" => emulate_trials::<u128>(&code, &cert, seed, trials)?,
        _ => emulate_trials::<u64>(&code, &cert, seed, trials)?,
    };
    let mut text = format!(
        "trials={trials} recoveries={} failures={}",
        report.recoveries,
        report.failures.len()
    );
    for f in report.failures.iter().take(10) {
        text.push_str(&format!(
            "\nx_{} set {}: expected {} got {}",
            f.part + 1,
            f.set_index + 1,
            f.expected,
            f.recovered
        ));
    }
    text.push_str(if report.passed() { "\npass" } else { "\nfail" });
    ctx.emit(
        &text,
        json!({"trials": trials, "seed": seed, "report": report, "pass": report.passed()}),
    );
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check(String::new()))
    }
}

fn example(ctx: &Ctx, out: Option<PathBuf>, cert: Option<PathBuf>) -> Outcome {
    let code = example_7x4();
    let certificate = exact_k(&code, &VerifierConfig::default()).certificate();
    if let Some(path) = &out {
        write(path, &save_code(&code))?;
    }
    if let Some(path) = &cert {
        write(path, &save_certificate(&certificate))?;
    }
    if out.is_none() && cert.is_none() && ctx.format == Format::Text {
        let _ = io::stdout().write_all(&save_code(&code));
        return Ok(());
    }
    ctx.emit(
        &format!("p={} t={} m={} k={}", code.p(), code.t(), code.m(), certificate.claimed_k),
        json!({"p": code.p(), "t": code.t(), "m": code.m(), "k": certificate.claimed_k}),
    );
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let ctx = Ctx { format: cli.format };
    match cli.command {
        Command::Construct {
            family,
            t,
            d,
            s,
            steiner,
            out,
            cert,
            max_servers,
        } => construct(&ctx, family, t, d, s, steiner, out, cert, max_servers),
        Command::Verify {
            code,
            exact_limit,
            node_budget,
        } => verify(&ctx, &code, exact_limit, node_budget),
        Command::Certify { code, cert } => certify(&ctx, &code, &cert),
        Command::Bounds { s, t } => bounds(&ctx, &s, t),
        Command::Table {
            s_list,
            t_min,
            t_max,
            csv,
        } => table(&ctx, &s_list, t_min, t_max, csv),
        Command::Emulate {
            code,
            cert,
            seed,
            trials,
            word_bits,
        } => emulate(&ctx, &code, &cert, seed, trials, &word_bits),
        Command::Example { out, cert } => example(&ctx, out, cert),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let (code, msg) = match failure {
                Failure::Check(m) => (1, m),
                Failure::Usage(m) => (2, m),
                Failure::Internal(m) => (3, m),
            };
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(code)
        }
    }
}
