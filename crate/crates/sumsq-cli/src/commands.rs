use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};
use sumsq::classify::{classify, default_trunc, ClassificationReport};
use sumsq::determinacy::{determinacy_bound, DeterminacyKind, DeterminacyReport};
use sumsq::expr::{parse_default, parse_expr, parse_series};
use sumsq::flow::right_equivalence_witness;
use sumsq::psd::{count_real_roots, erase_denominators, quadratic_z_psd_default, sturm, Interval, QuadraticTerm, QuadraticZAnswer};
use sumsq::upoly::UPoly;
use sumsq::weierstrass::prepare;
use sumsq::{vars, Error, Rational, Series, Vars};

use crate::{certfile, json, Command, Options};

pub struct Output {
    pub stdout: String,
    pub code: u8,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: 0 }
    }
}

/// Library errors plus the front end's own input failures.
#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> &'static str {
        match self {
            CliError::Lib(e) => e.code(),
            CliError::Io(_) => "io_error",
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

type R<T> = std::result::Result<T, CliError>;

pub fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Lib(Error::PrecisionViolation(_)) => 3,
        _ => 2,
    }
}

pub fn describe_error(e: &CliError, as_json: bool) -> String {
    if as_json {
        json!({ "error": { "code": e.code(), "message": e.to_string() } }).to_string()
    } else {
        format!("error[{}]: {e}", e.code())
    }
}

fn xy() -> Vars {
    vars(&["x", "y"])
}

fn names(v: &Vars) -> Vec<String> {
    v.iter().cloned().collect()
}

pub fn run(cmd: &Command, opts: Options) -> R<Output> {
    match cmd {
        Command::Classify { f } => classify_one(f, opts).map(|r| Output::ok(render_classification(&r, opts))),
        Command::Determinacy { f, max_k } => {
            let s = parse_default(f)?;
            let d = determinacy_bound(&s, *max_k)?;
            Ok(Output::ok(render_determinacy(&s, &d, opts)))
        }
        Command::Witness { f, g, k, n } => witness(f, g, *k, *n, opts),
        Command::Weierstrass { f, var } => weierstrass(f, var, opts),
        Command::PsdCheck { a0, a1, a2 } => psd_check([a0, a1, a2], opts),
        Command::Sturm { p, lo, hi } => sturm_cmd(p, lo.as_deref(), hi.as_deref(), opts),
        Command::EraseDenominators { cert_file } => {
            let src = std::fs::read_to_string(cert_file).map_err(|e| CliError::Io(format!("{}: {e}", cert_file.display())))?;
            let cert = erase_denominators(&certfile::parse(&src)?)?;
            let v = json::certificate(&cert);
            if opts.json {
                return Ok(Output::ok(json::render(&v)));
            }
            let mut out = format!("target: {}\n", cert.target);
            for s in &cert.summands {
                let _ = writeln!(out, "  + ({s})^2");
            }
            if let Some(m) = &cert.modulus {
                let _ = writeln!(out, "  + ({}) * ({})", m.cofactor, m.relation);
            }
            let _ = writeln!(out, "verified exactly: {}", cert.is_exact());
            Ok(Output::ok(out))
        }
        Command::Batch { file, command, max_k } => batch(file, command, *max_k, opts),
    }
}

fn classify_one(f: &str, opts: Options) -> R<ClassificationReport> {
    let ast = parse_expr(f)?;
    if let Some(v) = ast.variables().iter().find(|v| *v != "x" && *v != "y") {
        return Err(Error::InvalidArgument(format!("F must be a polynomial in x and y, found {v}")).into());
    }
    let s = ast.to_series(&xy())?;
    let t = opts.trunc.unwrap_or_else(|| default_trunc(s.degree().unwrap_or(0)));
    Ok(classify(&s, t)?)
}

fn render_classification(r: &ClassificationReport, opts: Options) -> String {
    if opts.json {
        return json::render(&json::classification(r));
    }
    let mut out = String::new();
    let _ = writeln!(out, "F = {}", r.input);
    let params: Vec<String> = r.normal_form.params().into_iter().map(|(k, v)| format!("{k} = {v}")).collect();
    let _ = writeln!(out, "normal form: {} ({}){}", r.normal_form.polynomial(), r.normal_form.tag(), if params.is_empty() { String::new() } else { format!(", {}", params.join(", ")) });
    let _ = writeln!(out, "verdict: {} ({})", r.verdict.as_str(), r.reason);
    let vs = names(r.input.vars());
    for s in &r.chain {
        let sub: Vec<String> = vs.iter().zip(&s.images).map(|(n, i)| format!("{n} -> {i}")).collect();
        let _ = writeln!(out, "  {}: {}", s.label, sub.join(", "));
    }
    let _ = writeln!(out, "  unit: {}", r.unit.truncate(r.verified_to.max(1)));
    let _ = writeln!(out, "verified modulo m^{}", r.verified_to);
    for n in &r.notes {
        let _ = writeln!(out, "note: {n}");
    }
    out
}

fn kind_text(d: &DeterminacyReport<Rational>) -> String {
    match (d.kind, d.k) {
        (DeterminacyKind::Determined, Some(k)) => format!("{k}-determined"),
        (DeterminacyKind::Quasidetermined, Some(k)) => format!("{k}-quasidetermined"),
        (DeterminacyKind::NotCertifiedUpTo(k), _) => format!("not certified up to k = {k}"),
        _ => "unknown".into(),
    }
}

fn render_determinacy(f: &Series, d: &DeterminacyReport<Rational>, opts: Options) -> String {
    if opts.json {
        json::render(&json::determinacy(d))
    } else {
        format!("{f}: {}\n", kind_text(d))
    }
}

fn witness(f: &str, g: &str, k: u32, n: u32, opts: Options) -> R<Output> {
    let fs = parse_default(f)?;
    let gs = parse_default(g)?;
    let mut all = names(fs.vars());
    for v in gs.vars().iter() {
        if !all.contains(v) {
            all.push(v.clone());
        }
    }
    let v: Vars = all.clone().into();
    let (fs, gs) = (fs.embed(&v)?, gs.embed(&v)?);
    let w = right_equivalence_witness(&fs, &gs, k, n)?;
    if opts.json {
        let v = json!({
            "substitutions": json::substitution(&all, &w.substitutions),
            "unit": json::series(&w.unit),
            "verified_to": w.verified_to,
        });
        return Ok(Output::ok(json::render(&v)));
    }
    let mut out = String::new();
    for (name, s) in all.iter().zip(&w.substitutions) {
        let _ = writeln!(out, "{name} -> {s}");
    }
    let _ = writeln!(out, "unit: {}", w.unit);
    let _ = writeln!(out, "f = u * g(phi) modulo m^{}", w.verified_to);
    Ok(Output::ok(out))
}

fn weierstrass(f: &str, var: &str, opts: Options) -> R<Output> {
    let s = parse_default(f)?;
    let i = s
        .vars()
        .iter()
        .position(|v| v == var)
        .ok_or_else(|| Error::InvalidArgument(format!("{var} does not occur among {:?}", names(s.vars()))))?;
    let t = opts.trunc.unwrap_or_else(|| default_trunc(s.degree().unwrap_or(0)));
    let w = prepare(&s.truncate(t.min(sumsq::series::DEGREE_CAP)), i)?;
    if opts.json {
        let v = json!({
            "var": var,
            "degree": w.degree,
            "polynomial": json::series(&w.polynomial()),
            "coefficients": w.coeffs.iter().map(json::series).collect::<Vec<_>>(),
            "unit": json::series(&w.unit),
            "trunc": w.unit.trunc(),
        });
        return Ok(Output::ok(json::render(&v)));
    }
    Ok(Output::ok(format!("P = {}\nU = {}\nmodulo m^{}\n", w.polynomial(), w.unit, w.unit.trunc())))
}

fn psd_check(a: [&String; 3], opts: Options) -> R<Output> {
    let s = a.iter().map(|t| parse_series(t, &xy())).collect::<sumsq::Result<Vec<_>>>()?;
    let ans = quadratic_z_psd_default(&s[0], &s[1], &s[2]);
    let (answer, detail) = match &ans {
        QuadraticZAnswer::Yes => ("yes", Value::Null),
        QuadraticZAnswer::Inconclusive => ("inconclusive", Value::Null),
        QuadraticZAnswer::No { failing, arc } => {
            let which = match failing {
                QuadraticTerm::A0 => "a0",
                QuadraticTerm::A2 => "a2",
                QuadraticTerm::Discriminant => "4*a0*a2 - a1^2",
            };
            ("no", json!({ "failing": which, "arc": json::arc(arc) }))
        }
    };
    if opts.json {
        let mut v = json!({ "answer": answer });
        if !detail.is_null() {
            v["failing"] = detail["failing"].clone();
            v["arc"] = detail["arc"].clone();
        }
        return Ok(Output::ok(json::render(&v)));
    }
    let mut out = format!("{answer}\n");
    if !detail.is_null() {
        let _ = writeln!(out, "{} is negative along {}", detail["failing"].as_str().unwrap_or(""), detail["arc"]);
    }
    Ok(Output::ok(out))
}

/// A polynomial in one variable, whatever its name.
fn univariate(p: &str) -> R<UPoly<Rational>> {
    let s = parse_default(p)?;
    let used: Vec<usize> = (0..s.nvars()).filter(|&i| s.degree_in(i) > 0).collect();
    if used.len() > 1 {
        return Err(Error::InvalidArgument("sturm takes a polynomial in one variable".into()).into());
    }
    let i = used.first().copied().unwrap_or(0);
    let deg = s.degree_in(i) as usize;
    let mut c = vec![Rational::from_integer(0.into()); deg + 1];
    for (e, v) in s.terms() {
        c[e[i] as usize] = v.clone();
    }
    Ok(UPoly::new(c))
}

fn rational_arg(s: &str) -> R<Rational> {
    s.trim().parse::<Rational>().map_err(|_| Error::InvalidArgument(format!("not a rational: {s}")).into())
}

fn sturm_cmd(p: &str, lo: Option<&str>, hi: Option<&str>, opts: Options) -> R<Output> {
    let poly = univariate(p)?;
    let interval = match (lo, hi) {
        (None, None) => Interval::Real,
        (Some(l), Some(h)) => Interval::Closed(rational_arg(l)?, rational_arg(h)?),
        _ => return Err(Error::InvalidArgument("give both --lo and --hi, or neither".into()).into()),
    };
    let chain = sturm(&poly)?;
    let count = count_real_roots(&poly, &interval)?;
    if opts.json {
        let v = json!({
            "chain": chain.polys.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "real_roots": count.count,
            "squarefree_taken": count.squarefree_taken,
        });
        return Ok(Output::ok(json::render(&v)));
    }
    let mut out = String::new();
    for p in &chain.polys {
        let _ = writeln!(out, "{p}");
    }
    let _ = writeln!(out, "real roots: {}{}", count.count, if count.squarefree_taken { " (distinct)" } else { "" });
    Ok(Output::ok(out))
}

fn batch(file: &std::path::Path, command: &str, max_k: u32, opts: Options) -> R<Output> {
    let src = std::fs::read_to_string(file).map_err(|e| CliError::Io(format!("{}: {e}", file.display())))?;
    let lines: Vec<&str> = src
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .collect();
    let results: Vec<(String, u8)> = lines
        .par_iter()
        .map(|line| {
            let r = match command {
                "determinacy" => parse_default(line)
                    .and_then(|s| determinacy_bound(&s, max_k).map(|d| render_determinacy(&s, &d, opts)))
                    .map_err(CliError::from),
                _ => classify_one(line, opts).map(|r| render_classification(&r, opts)),
            };
            match r {
                Ok(s) => (s, 0),
                Err(e) => {
                    let text = if opts.json {
                        json::render(&json!({ "input": line, "error": { "code": e.code(), "message": e.to_string() } }))
                    } else {
                        format!("{line}: error[{}]: {e}\n", e.code())
                    };
                    (text, exit_code(&e))
                }
            }
        })
        .collect();
    let code = results.iter().map(|r| r.1).max().unwrap_or(0);
    let sep = if opts.json { "" } else { "\n" };
    let stdout = results.into_iter().map(|r| r.0).collect::<Vec<_>>().join(sep);
    Ok(Output { stdout, code })
}
