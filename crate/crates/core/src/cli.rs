//! Command-line front end. Every subcommand builds a [`Report`] holding a CSV
//! table and a JSON document; `--format` picks what goes to stdout and
//! `--out` writes both side by side.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::Ratio;
use serde_json::{json, Value};

use crate::acceptance;
use crate::charsum::{lemma_value, unit_character_sum, LaurentTruncation, SumMethod};
use crate::counting::{Counter, Method, DEFAULT_BUDGET};
use crate::denef::{leading_constant, local_density, valuation_histogram, DensityMethod};
use crate::gf::{Elem, Field};
use crate::poles::{pole_structure, tauberian_predict, BundleClass};
use crate::polyfield::{necklace_count, places_up_to, Place, PolyRing};
use crate::wound::WoundGroup;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "woundcount", version, about = "Point counts and local densities for a wound unipotent group over F_q(t)")]
pub struct Cli {
    /// Size of the rayon worker pool (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write `<out>.csv` and `<out>.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// A power of p (default: p).
    #[arg(long)]
    q: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Places of F_q(t) of degree at most --trunc.
    Places {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 3)]
        trunc: u32,
    },
    /// N(M) over a height range.
    Count {
        #[command(flatten)]
        field: FieldArgs,
        /// `lo..hi` (inclusive) or a single M.
        #[arg(long, default_value = "0..8")]
        m: String,
        /// Cross-check against the naive enumerator.
        #[arg(long)]
        naive: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Valuation histograms and local densities.
    Density {
        #[command(flatten)]
        field: FieldArgs,
        /// Coefficients of a monic irreducible, lowest degree first, e.g. `1,1,1`.
        #[arg(long)]
        place: Option<String>,
        /// Without --place, every finite place of degree at most this.
        #[arg(long, default_value_t = 1)]
        trunc: u32,
        /// Complex exponents such as `2`, `2+3i`, `0.5-1i`.
        #[arg(long = "s", default_values_t = vec!["2".to_string()])]
        s: Vec<String>,
        #[arg(long, default_value_t = crate::denef::DEFAULT_CLASS_BUDGET)]
        budget: u64,
    },
    /// The leading constant from its local factors.
    Constant {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 12)]
        trunc: u32,
    },
    /// Pole invariants of a class and the Tauberian main term.
    Poles {
        #[command(flatten)]
        field: FieldArgs,
        /// Coefficients lambda_a, e.g. `2` or `1/2,1`.
        #[arg(long, default_value = "1")]
        lambda: String,
        /// rho_a per index (default: all 1).
        #[arg(long)]
        rho: Option<String>,
        /// Heights for the prediction, as for `count`.
        #[arg(long)]
        m: Option<String>,
        /// Residues `re` or `re+imi`, one per pole.
        #[arg(long)]
        residue: Vec<String>,
    },
    /// Unit character sums against the expected table.
    Charsum {
        /// Residue field size (default: every q_v in 2,3,4,5).
        #[arg(long)]
        qv: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        d: Option<u32>,
        /// Precision (default n*d + 1).
        #[arg(long)]
        e: Option<u32>,
        #[arg(long, default_value_t = crate::charsum::DEFAULT_UNIT_BUDGET)]
        budget: u64,
    },
    /// Run the acceptance suite.
    VerifyAll,
}

/// A CSV table and its JSON twin.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub csv: String,
    pub json: Value,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    /// Partial report, message.
    Budget(Report, String),
    /// Full report, message.
    Verify(Report, String),
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn field_for(args: &FieldArgs) -> Result<Arc<Field>, Failure> {
    let p = args.p;
    let q = args.q.unwrap_or(p as u64);
    let mut e = 0;
    let mut r = q;
    while r > 1 && r % p as u64 == 0 {
        r /= p as u64;
        e += 1;
    }
    if r != 1 || e == 0 {
        return Err(usage(format!("q = {q} is not a power of p = {p}")));
    }
    Field::new(p, e).map_err(|err| usage(err.to_string()))
}

/// `lo..hi` inclusive, or a single value.
pub fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<u32>, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("bad height `{t}`"));
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (lo, hi) = (num(a)?, num(b)?);
            if lo > hi {
                return Err(format!("empty range `{s}`"));
            }
            Ok(lo..=hi)
        }
        None => {
            let m = num(s)?;
            Ok(m..=m)
        }
    }
}

/// `a`, `a+bi`, `a-bi`, `bi`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let err = || format!("bad complex number `{s}`");
    let t = s.trim().replace(' ', "");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| err());
    };
    // split at the last sign that is not the leading one or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        x => x,
    };
    Ok(Complex64::new(re.parse().map_err(|_| err())?, im.parse().map_err(|_| err())?))
}

fn parse_ratio(s: &str) -> Result<Ratio<i64>, String> {
    let err = || format!("bad rational `{s}`");
    match s.trim().split_once('/') {
        Some((a, b)) => {
            let (a, b) = (a.trim().parse::<i64>().map_err(|_| err())?, b.trim().parse::<i64>().map_err(|_| err())?);
            if b == 0 {
                return Err(err());
            }
            Ok(Ratio::new(a, b))
        }
        None => s.trim().parse::<i64>().map(Ratio::from_integer).map_err(|_| err()),
    }
}

/// Quotes a CSV field when it contains a separator or quote.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn places_report(ring: &PolyRing, trunc: u32) -> Report {
    let places = places_up_to(ring, trunc);
    let mut csv = String::from("degree,place\n");
    let mut rows = Vec::new();
    for v in &places {
        csv.push_str(&format!("{},{}\n", v.degree(), csv_field(&v.to_string())));
        rows.push(json!({"degree": v.degree(), "name": v.to_string(), "place": v}));
    }
    let counts: Vec<Value> = (1..=trunc)
        .map(|d| {
            let found = places.iter().filter(|v| !v.is_infinite() && v.degree() == d).count() as u64;
            json!({"degree": d, "count": found, "necklace": necklace_count(ring.q(), d)})
        })
        .collect();
    Report {
        csv,
        json: json!({"q": ring.q(), "max_degree": trunc, "counts": counts, "places": rows}),
    }
}

fn count_report(field: Arc<Field>, range: std::ops::RangeInclusive<u32>, naive: bool, budget: u64) -> Result<Report, Failure> {
    let counter = Counter::new(WoundGroup::new(field)).with_budget(budget);
    let to_report = |t: &crate::counting::CountTable| Report {
        csv: t.to_csv(),
        json: serde_json::to_value(t).expect("plain data"),
    };
    let table = match counter.count_table(range.clone(), Method::Structured) {
        Ok(t) => t,
        Err((partial, e)) => return Err(Failure::Budget(to_report(&partial), e.to_string())),
    };
    if naive {
        let check = match counter.count_table(range, Method::Naive) {
            Ok(t) => t,
            Err((partial, e)) => return Err(Failure::Budget(to_report(&partial), e.to_string())),
        };
        let mut report = to_report(&table);
        report.csv.push_str(&check.to_csv().lines().skip(1).map(|l| format!("{l}\n")).collect::<String>());
        report.json = json!({"structured": table, "naive": check});
        let diff: Vec<String> = table
            .rows
            .iter()
            .zip(&check.rows)
            .filter(|(a, b)| a != b)
            .map(|(a, b)| format!("M={}: structured {} naive {}", a.m, a.n, b.n))
            .collect();
        if !diff.is_empty() {
            return Err(Failure::Verify(report, diff.join("; ")));
        }
        return Ok(report);
    }
    Ok(to_report(&table))
}

fn parse_place(ring: &PolyRing, s: &str) -> Result<Place, Failure> {
    let coeffs: Result<Vec<i64>, _> = s.split(',').map(|c| c.trim().parse::<i64>()).collect();
    let coeffs = coeffs.map_err(|_| usage(format!("bad place `{s}`: expected coefficients like 1,1,1")))?;
    Place::finite(ring, ring.from_ints(&coeffs)).map_err(|e| usage(e.to_string()))
}

fn density_report(field: Arc<Field>, place: Option<&str>, trunc: u32, s: &[String], budget: u64) -> Result<Report, Failure> {
    let group = WoundGroup::new(field);
    let ring = group.ring();
    let places = match place {
        Some(text) => vec![parse_place(ring, text)?],
        None => places_up_to(ring, trunc).into_iter().filter(|v| !v.is_infinite()).collect(),
    };
    let exps: Vec<Complex64> = s.iter().map(|x| parse_complex(x)).collect::<Result<_, _>>().map_err(usage)?;
    let mut csv = String::from("place,s_re,s_im,closed_re,closed_im,bruteforce_re,bruteforce_im\n");
    let mut out = Vec::new();
    for v in &places {
        let hist = valuation_histogram(&group, v, Some(budget)).map_err(|e| match e {
            crate::denef::DenefError::BudgetExceeded { .. } => Failure::Budget(
                Report { csv: csv.clone(), json: json!({"places": out.clone()}) },
                e.to_string(),
            ),
            other => usage(other.to_string()),
        })?;
        let mut values = Vec::new();
        for &s in &exps {
            let closed = local_density(&group, v, s, DensityMethod::Closed).map_err(|e| usage(e.to_string()))?;
            let brute = local_density(&group, v, s, DensityMethod::Bruteforce).map_err(|e| usage(e.to_string()))?;
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                csv_field(&v.to_string()),
                s.re, s.im, closed.re, closed.im, brute.re, brute.im
            ));
            values.push(json!({
                "s_re": s.re, "s_im": s.im,
                "closed_re": closed.re, "closed_im": closed.im,
                "bruteforce_re": brute.re, "bruteforce_im": brute.im,
            }));
        }
        let closed_form = hist.matches_closed_form(group.p() as u32);
        out.push(json!({"name": v.to_string(), "histogram": hist, "closed_form_holds": closed_form, "densities": values}));
    }
    let report = Report { csv, json: json!({"places": out}) };
    if out.iter().any(|p| p["closed_form_holds"] == false) {
        return Err(Failure::Verify(report, "valuation histogram differs from q_v^(p-1-m)".into()));
    }
    Ok(report)
}

fn constant_report(p: u32, q: u64, trunc: u32) -> Result<Report, Failure> {
    if trunc == 0 {
        return Err(usage("--trunc must be at least 1"));
    }
    let r = leading_constant(p, q, trunc);
    let json = serde_json::to_value(&r).expect("plain data");
    let mut csv = String::from("factor,value\n");
    if let Value::Object(map) = &json {
        for (k, v) in map {
            csv.push_str(&format!("{k},{v}\n"));
        }
    }
    Ok(Report { csv, json })
}

fn poles_report(
    field: &Field,
    lambda: &str,
    rho: Option<&str>,
    m: Option<&str>,
    residues: &[String],
) -> Result<Report, Failure> {
    let p = field.characteristic();
    let q = field.order() as u64;
    let lambda: Vec<Ratio<i64>> = lambda.split(',').map(parse_ratio).collect::<Result<_, _>>().map_err(usage)?;
    let rho: Vec<i64> = match rho {
        Some(r) => r
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|_| format!("bad rho `{x}`")))
            .collect::<Result<_, _>>()
            .map_err(usage)?,
        None => vec![1; lambda.len()],
    };
    let class = BundleClass::new(p, lambda.clone(), rho.clone()).map_err(|e| usage(e.to_string()))?;
    let ps = pole_structure(&class, q);
    let mut json = json!({"structure": ps});
    let mut csv = String::from("pole,re,im\n");
    for (j, pole) in ps.poles.iter().enumerate() {
        csv.push_str(&format!("{j},{},{}\n", pole.re_f64, pole.im_f64));
    }
    let Some(m) = m else {
        return Ok(Report { csv, json });
    };
    let range = parse_range(m).map_err(usage)?;
    let residues: Vec<Complex64> = if residues.is_empty() {
        // Z_{k rho}(s) = Z_rho(k s): every pole carries c_rho / k
        if lambda.len() != 1 {
            return Err(usage("--residue is required unless lambda is a multiple of rho on one index"));
        }
        let k = lambda[0] / Ratio::from_integer(rho[0]);
        let k = *k.numer() as f64 / *k.denom() as f64;
        let c = leading_constant(p, q, 40).closed_form;
        vec![Complex64::new(c / k, 0.0); ps.pole_count()]
    } else {
        residues.iter().map(|r| parse_complex(r)).collect::<Result<_, _>>().map_err(usage)?
    };
    csv.push_str("M,prediction\n");
    let mut rows = Vec::new();
    for m in range {
        let n = tauberian_predict(ps.a, ps.b, ps.d, &residues, q, m).map_err(|e| usage(e.to_string()))?;
        csv.push_str(&format!("{m},{n}\n"));
        rows.push(json!({"M": m, "prediction": n}));
    }
    json["residues"] = json!(residues.iter().map(|r| json!({"re": r.re, "im": r.im})).collect::<Vec<_>>());
    json["predictions"] = Value::Array(rows);
    Ok(Report { csv, json })
}

fn residue_field_of_order(q: u32) -> Result<Arc<Field>, Failure> {
    let p = (2..=q).find(|k| q % k == 0).unwrap_or(q);
    let mut e = 0;
    let mut r = q;
    while r > 1 && r % p == 0 {
        r /= p;
        e += 1;
    }
    if q < 2 || r != 1 {
        return Err(usage(format!("q_v = {q} is not a prime power")));
    }
    Field::new(p, e).map_err(|err| usage(err.to_string()))
}

fn charsum_report(qv: Option<u32>, n: Option<u32>, d: Option<u32>, e: Option<u32>, budget: u64) -> Result<Report, Failure> {
    let fields: Vec<u32> = qv.map_or(vec![2, 3, 4, 5], |q| vec![q]);
    let ns: Vec<u32> = n.map_or(vec![1, 2, 3], |n| vec![n]);
    let ds: Vec<u32> = d.map_or(vec![0, 1, 2, 3, 4], |d| vec![d]);
    if ns.contains(&0) {
        return Err(usage("--n must be at least 1"));
    }
    let mut csv = String::from("q_v,n,d,e,value_re,value_im,expected,stabilized,validated\n");
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    for &q in &fields {
        let f = residue_field_of_order(q)?;
        let u = LaurentTruncation::new(&f, 0, vec![Elem::ONE]);
        for &n in &ns {
            for &d in &ds {
                let prec = e.unwrap_or(n * d + 1);
                let r = match unit_character_sum(&u, n, d, prec, SumMethod::Fibered, Some(budget)) {
                    Ok(r) => r,
                    Err(crate::charsum::CharSumError::BudgetExceeded { .. }) => {
                        let partial = Report { csv: csv.clone(), json: json!({"rows": rows.clone()}) };
                        return Err(Failure::Budget(partial, format!("q_v={q} n={n} d={d} exceeds the budget")));
                    }
                    Err(err) => return Err(usage(err.to_string())),
                };
                let expected = lemma_value(q as u64, n, d);
                if r.validated && (r.value - expected).norm() > 1e-10 {
                    mismatches.push(format!("q_v={q} n={n} d={d}: {} vs {expected}", r.value));
                }
                csv.push_str(&format!(
                    "{q},{n},{d},{},{},{},{expected},{},{}\n",
                    r.e, r.value.re, r.value.im, r.stabilized, r.validated
                ));
                let mut row = serde_json::to_value(&r).expect("plain data");
                row["q_v"] = json!(q);
                row["n"] = json!(n);
                row["d"] = json!(d);
                row["expected"] = json!(expected);
                rows.push(row);
            }
        }
    }
    let report = Report { csv, json: json!({"rows": rows}) };
    if !mismatches.is_empty() {
        return Err(Failure::Verify(report, mismatches.join("; ")));
    }
    Ok(report)
}

fn verify_report() -> Result<Report, Failure> {
    let results = acceptance::run_all();
    let mut csv = String::from("id,name,passed,elapsed_ms,detail\n");
    for r in &results {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.id,
            r.name,
            r.passed,
            r.elapsed_ms,
            csv_field(&r.detail)
        ));
    }
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.line()).collect();
    let report = Report {
        csv,
        json: json!({"criteria": results, "all_passed": failed.is_empty()}),
    };
    if failed.is_empty() {
        Ok(report)
    } else {
        Err(Failure::Verify(report, failed.join("\n")))
    }
}

fn dispatch(command: &Command) -> Result<Report, Failure> {
    match command {
        Command::Places { field, trunc } => Ok(places_report(&PolyRing::new(field_for(field)?), *trunc)),
        Command::Count { field, m, naive, budget } => {
            let range = parse_range(m).map_err(usage)?;
            if *budget == 0 {
                return Err(usage("--budget must be positive"));
            }
            count_report(field_for(field)?, range, *naive, *budget)
        }
        Command::Density { field, place, trunc, s, budget } => {
            density_report(field_for(field)?, place.as_deref(), *trunc, s, *budget)
        }
        Command::Constant { field, trunc } => {
            let f = field_for(field)?;
            constant_report(f.characteristic(), f.order() as u64, *trunc)
        }
        Command::Poles { field, lambda, rho, m, residue } => {
            poles_report(&*field_for(field)?, lambda, rho.as_deref(), m.as_deref(), residue)
        }
        Command::Charsum { qv, n, d, e, budget } => charsum_report(*qv, *n, *d, *e, *budget),
        Command::VerifyAll => verify_report(),
    }
}

fn write_files(out: &Path, report: &Report) -> std::io::Result<()> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(out.with_extension("csv"), &report.csv)?;
    let json = serde_json::to_string_pretty(&report.json).expect("plain data");
    std::fs::write(out.with_extension("json"), json + "\n")
}

fn emit(cli: &Cli, report: &Report, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let text = match cli.format {
        Format::Csv => report.csv.clone(),
        Format::Json => serde_json::to_string_pretty(&report.json).expect("plain data") + "\n",
    };
    if stdout.write_all(text.as_bytes()).is_err() {
        return EXIT_USAGE;
    }
    if let Some(out) = &cli.out {
        if let Err(e) = write_files(out, report) {
            let _ = writeln!(stderr, "error: cannot write {}: {e}", out.display());
            return EXIT_USAGE;
        }
    }
    EXIT_OK
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| dispatch(&cli.command)) {
        Ok(report) => emit(&cli, &report, stdout, stderr),
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Budget(partial, msg)) => {
            emit(&cli, &partial, stdout, stderr);
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_BUDGET
        }
        Err(Failure::Verify(report, msg)) => {
            emit(&cli, &report, stdout, stderr);
            let _ = writeln!(stderr, "verification failed:\n{msg}");
            EXIT_VERIFY
        }
    }
}
