//! Command-line front end: job files, field descriptors and dispatch.

pub mod job;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fields::{BiPoly, Tower};
use crate::lgp::{self, FuzzParams, GlobalForm, ScanStatus, Target, Verdict};
use crate::places::{blowup_valuation, decide_local, place_correspondence, BlowupChain, BlowupStep, PlaceJson, PlaceSpec};
use crate::springer::{decide_isotropy, decide_ratfun, DiagonalForm};
use crate::weierstrass::{normalize_form, w_prepare, Dvr, NormalizedForm, YSeries};

pub use job::{parse_field, split_product, EntryJson, FieldSpec, JobFile, Options, RawFactor};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNDECIDED: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    DecideCdvf,
    Prepare,
    Normalize,
    Place,
    Scan,
    Witness,
    Verdict,
    Fuzz,
    BlowupVal,
}

#[derive(Debug, Parser)]
#[command(name = "qflg", version, about = "Isotropy of quadratic forms over complete discretely valued fields and Frac(A[[y]])")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Job file (JSON); command-line values override its fields.
    pub job: Option<PathBuf>,
    /// Field or ring descriptor, e.g. F3((t)), F3[[x]], FracR(F3[[x]][[y]]).
    #[arg(long, alias = "base")]
    pub field: Option<String>,
    /// Comma-separated entries.
    #[arg(long)]
    pub form: Option<String>,
    #[arg(long)]
    pub poly: Option<String>,
    /// gauss, infinity, special:POLY, generic:POLY, blowup:STEPS, or JSON.
    #[arg(long)]
    pub place: Option<String>,
    /// Comma-separated steps: origin, inf, a value, or FIELD:VALUE.
    #[arg(long)]
    pub chain: Option<String>,
    #[arg(short = 'N', long)]
    pub precision: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub cap: Option<usize>,
    /// Witness bidegree bound "dx,dy".
    #[arg(long)]
    pub witness_degree: Option<String>,
    #[arg(long)]
    pub p: Option<u64>,
    /// Rank range "lo-hi" or a single rank.
    #[arg(long)]
    pub rank: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub factor_degree: Option<usize>,
}

/// Exit code and the document written to stdout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

struct Report {
    code: i32,
    json: Value,
    text: String,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Report { code: EXIT_OK, json, text }
    }
}

/// Parses arguments (without the program name) and runs the command.
pub fn run_args<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("qflg")).chain(args.into_iter().map(Into::into));
    match Args::try_parse_from(argv) {
        Ok(a) => run(&a),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            Outcome { code, output: e.render().to_string() }
        }
    }
}

pub fn run(args: &Args) -> Outcome {
    let job = match &args.job {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(src) => JobFile::parse(&src),
            Err(e) => Err(Error::invalid(format!("{}: {e}", path.display()))),
        },
        None => Ok(JobFile::new("")),
    };
    let result = job.and_then(|j| dispatch(args, j));
    match result {
        Ok(r) => Outcome {
            code: r.code,
            output: if args.json { pretty(&r.json) } else { r.text },
        },
        Err(e) => {
            let code = if matches!(e, Error::ConsistencyViolation(_)) { EXIT_VIOLATION } else { EXIT_INPUT };
            let output = if args.json {
                pretty(&json!({ "error": error_kind(&e), "message": e.to_string() }))
            } else {
                format!("error: {e}\n")
            };
            Outcome { code, output }
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json serializes") + "\n"
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::ZeroInput => "ZeroInput",
        Error::InsufficientPrecision(_) => "InsufficientPrecision",
        Error::UnsupportedField(_) => "UnsupportedField",
        Error::NotASquare => "NotASquare",
        Error::NotAUnit => "NotAUnit",
        Error::NotDivisorOfDistinguished(_) => "NotDivisorOfDistinguished",
        Error::ReducibleFactor(_) => "ReducibleFactor",
        Error::UnsupportedPlace(_) => "UnsupportedPlace",
        Error::UnsupportedCenter(_) => "UnsupportedCenter",
        Error::NoCanonicalExtension(_) => "NoCanonicalExtension",
        Error::PrecisionTooLowToCertify => "PrecisionTooLowToCertify",
        Error::WitnessSearchExhausted => "WitnessSearchExhausted",
        Error::ConsistencyViolation(_) => "ConsistencyViolation",
        Error::Parse { .. } => "Parse",
        Error::InvalidInput(_) => "InvalidInput",
        Error::DegreeCapExceeded(_) => "DegreeCapExceeded",
    }
}

/// Flag, then job option, then `QFLG_PRECISION`, then the default.
fn precision(args: &Args, job: &JobFile) -> Result<usize> {
    if let Some(n) = args.precision.or(job.options.precision) {
        return Ok(n);
    }
    match std::env::var("QFLG_PRECISION") {
        Ok(s) => s.trim().parse().map_err(|_| Error::invalid(format!("QFLG_PRECISION must be a positive integer, not '{s}'"))),
        Err(_) => Ok(lgp::ScanBounds::default().precision),
    }
}

fn split_list(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// Steps `origin`, `inf`, a value in `k`, or `FIELD:VALUE`.
pub fn parse_chain(s: &str) -> Result<BlowupChain> {
    let steps = split_list(s)
        .into_iter()
        .map(|t| match t.as_str() {
            "origin" => BlowupStep::Origin,
            "inf" | "infinity" => BlowupStep::Infinity,
            v => match v.split_once(':') {
                Some((f, val)) => BlowupStep::Ext { field: f.trim().into(), value: val.trim().into() },
                None => BlowupStep::Value { value: v.into() },
            },
        })
        .collect::<Vec<_>>();
    if steps.is_empty() {
        return Err(Error::invalid("empty chain"));
    }
    Ok(BlowupChain::new(steps))
}

/// Shorthand or JSON place.
pub fn parse_place(r: &Dvr, s: &str) -> Result<PlaceSpec> {
    let t = s.trim();
    if t.starts_with('{') {
        let j: PlaceJson = serde_json::from_str(t).map_err(|e| Error::Parse { column: e.column(), message: e.to_string() })?;
        return PlaceSpec::from_json(r, &j);
    }
    let (head, rest) = t.split_once(':').map_or((t, ""), |(h, r)| (h.trim(), r.trim()));
    let j = match head {
        "gauss" => PlaceJson::Gauss,
        "infinity" | "inf" => PlaceJson::Infinity,
        "special" | "special-point" => PlaceJson::SpecialPoint { poly: rest.into() },
        "generic" | "generic-point" => {
            PlaceJson::GenericPoint { poly: rest.into(), irreducible: crate::weierstrass::Irreducibility::Asserted }
        }
        "blowup" => PlaceJson::Blowup { steps: parse_chain(rest)?.steps },
        _ => {
            return Err(Error::invalid(format!(
                "unknown place '{head}'; expected gauss, infinity, special:POLY, generic:POLY or blowup:STEPS"
            )))
        }
    };
    PlaceSpec::from_json(r, &j)
}

fn dispatch(args: &Args, mut job: JobFile) -> Result<Report> {
    if let Some(f) = &args.field {
        job.field = f.clone();
    }
    if let Some(f) = &args.form {
        job.form = split_list(f).into_iter().map(EntryJson::Literal).collect();
    }
    if let Some(p) = &args.poly {
        job.poly = Some(p.clone());
    }
    if let Some(c) = &args.chain {
        job.chain = Some(parse_chain(c)?.steps);
    }
    if job.field.is_empty() && args.command == Command::Fuzz {
        let p = args.p.or(job.fuzz.map(|f| f.p)).unwrap_or(3);
        job.field = format!("F{p}[[x]]");
    }
    if job.field.is_empty() {
        return Err(Error::invalid("no field given: pass --field or a job file"));
    }
    let n = precision(args, &job)?;
    let field = parse_field(&job.field, n)?;
    let mut bounds = job.bounds(n);
    if args.seed != 0 || job.options.seed.is_none() {
        bounds.seed = args.seed;
    }
    if let Some(d) = args.depth {
        bounds.blowup_depth = d;
    }
    if let Some(c) = args.cap {
        bounds.residue_degree_cap = c;
    }
    if let Some(w) = &args.witness_degree {
        let (dx, dy) = w
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
            .ok_or_else(|| Error::invalid(format!("--witness-degree expects 'dx,dy', not '{w}'")))?;
        bounds.witness_degree_x = dx;
        bounds.witness_degree_y = dy;
    }
    match args.command {
        Command::DecideCdvf => decide_cdvf(&field, &job),
        Command::Prepare => prepare(&field, &job),
        Command::Normalize => {
            let q = normalized(&field, &job)?;
            Ok(normalize_report(&q))
        }
        Command::Place => place(args, &field, &job),
        Command::Scan => scan(&field, &job, &bounds),
        Command::Witness => witness(&field, &job, &bounds),
        Command::Verdict => verdict(&field, &job, &bounds),
        Command::Fuzz => fuzz(args, &field, &job, &bounds),
        Command::BlowupVal => blowup_val(&field, &job, bounds.residue_degree_cap.max(crate::places::DEFAULT_DEGREE_CAP)),
    }
}

fn tower(field: &FieldSpec) -> Result<&Tower> {
    match field {
        FieldSpec::Tower(t) => Ok(t),
        _ => Err(Error::invalid("decide-cdvf needs a field such as F3((t)), Q3 or F3(t)")),
    }
}

fn ring(field: &FieldSpec) -> Result<(&Dvr, Target)> {
    match field {
        FieldSpec::Ring(r) => Ok((r, Target::L)),
        FieldSpec::Function(r, t) => Ok((r, *t)),
        FieldSpec::Tower(_) => Err(Error::invalid("this command needs F3[[x]], Z3, FracR(F3[[x]][[y]]) or F3((x))(y)")),
    }
}

fn literal_entries(job: &JobFile) -> Result<Vec<String>> {
    if job.form.is_empty() {
        return Err(Error::invalid("no form given"));
    }
    job.form
        .iter()
        .map(|e| match e {
            EntryJson::Literal(s) => Ok(s.clone()),
            _ => Err(Error::invalid("decide-cdvf takes literal entries")),
        })
        .collect()
}

fn decide_cdvf(field: &FieldSpec, job: &JobFile) -> Result<Report> {
    let t = tower(field)?;
    let q = DiagonalForm::parse(t, &literal_entries(job)?.join(", "))?;
    let d = match t {
        Tower::RatFun { .. } => decide_ratfun(&q)?,
        _ => decide_isotropy(&q)?,
    };
    let word = if d.isotropic { "isotropic" } else { "anisotropic" };
    let witness: Option<Vec<String>> = d.witness.as_ref().map(|w| w.iter().map(|e| t.format(e)).collect());
    let mut text = format!("{word} over {}: <{}>\n", t.name(), q.format_entries().join(", "));
    if let Some(w) = &witness {
        text += &format!("witness: ({})\n", w.join(", "));
    }
    text += &d.certificate.render();
    let json = json!({
        "field": t.name(),
        "form": q.format_entries(),
        "isotropic": d.isotropic,
        "witness": witness,
        "certificate": d.certificate,
    });
    Ok(Report::ok(json, text))
}

fn prepare(field: &FieldSpec, job: &JobFile) -> Result<Report> {
    let (r, _) = ring(field)?;
    let src = job.poly.as_deref().ok_or_else(|| Error::invalid("no polynomial given: pass --poly"))?;
    let f = r.parse_poly(src)?;
    let p = w_prepare(r, &YSeries::exact(f))?;
    let (u, d) = (r.format_poly(&p.unit), p.dist.format(r));
    let text = format!("f = {src}\nn = {}\nU = {u}\nP = {d}\n", p.n);
    let json = json!({ "ring": r.name(), "precision": r.precision(), "n": p.n, "unit": u, "distinguished": d });
    Ok(Report::ok(json, text))
}

fn normalized(field: &FieldSpec, job: &JobFile) -> Result<NormalizedForm> {
    let (r, _) = ring(field)?;
    if job.form.is_empty() {
        return Err(Error::invalid("no form given"));
    }
    let entries = job.form.iter().map(|e| job::entry_factors(r, e)).collect::<Result<Vec<_>>>()?;
    normalize_form(r, &entries)
}

fn normalize_report(q: &NormalizedForm) -> Report {
    let r = &q.ring;
    let coeffs: Vec<_> = q.coeffs.iter().map(|c| c.to_json(r)).collect();
    let squares: Vec<String> = q.records.iter().map(|s| s.format(r)).collect();
    let mut text = String::new();
    for (i, (c, s)) in q.coeffs.iter().zip(&squares).enumerate() {
        text += &format!("a{} = {}   removed {s}\n", i + 1, format_coefficient(&c.to_json(r)));
    }
    for w in &q.warnings {
        text += &format!("warning: {w}\n");
    }
    let json = json!({ "ring": r.name(), "form": coeffs, "squares": squares, "warnings": q.warnings });
    Report::ok(json, text)
}

fn format_coefficient(c: &crate::weierstrass::CoefficientJson) -> String {
    let mut parts = vec![c.lambda.clone()];
    match c.n {
        0 => {}
        1 => parts.push("x".into()),
        n => parts.push(format!("x^{n}")),
    }
    for f in &c.factors {
        let p = if f.poly.contains(' ') { format!("({})", f.poly) } else { f.poly.clone() };
        parts.push(if f.exp == 1 { p } else { format!("{p}^{}", f.exp) });
    }
    if parts.len() > 1 && parts[0] == "1" {
        parts.remove(0);
    }
    parts.join("*")
}

fn place(args: &Args, field: &FieldSpec, job: &JobFile) -> Result<Report> {
    let q = normalized(field, job)?;
    let r = &q.ring;
    let spec = match (&args.place, &job.place) {
        (Some(s), _) => parse_place(r, s)?,
        (None, Some(j)) => PlaceSpec::from_json(r, j)?,
        (None, None) => return Err(Error::invalid("no place given: pass --place")),
    };
    let d = decide_local(&q, &spec)?;
    let ext = place_correspondence(r, &spec);
    let word = if d.isotropic { "isotropic" } else { "anisotropic" };
    let mut text = format!("{word} at {} (residue field {})\n", spec.label(r), d.certificate.residue_field);
    text += &format!(
        "first residue form:  <{}>\nsecond residue form: <{}>\n",
        d.residues.first.format_entries().join(", "),
        d.residues.second.format_entries().join(", ")
    );
    let mut warnings = q.warnings.clone();
    match &ext {
        Ok(e) => text += &format!("extends to {} with residue field {}\n", e.ring, e.completion),
        Err(e) => warnings.push(e.to_string()),
    }
    text += "first:\n";
    text += &indent(&d.certificate.first.render());
    text += "second:\n";
    text += &indent(&d.certificate.second.render());
    for w in &warnings {
        text += &format!("warning: {w}\n");
    }
    let json = json!({
        "place": spec.to_json(r),
        "isotropic": d.isotropic,
        "first": d.residues.first.format_entries(),
        "second": d.residues.second.format_entries(),
        "certificate": d.certificate,
        "extension": ext.ok(),
        "warnings": warnings,
    });
    Ok(Report::ok(json, text))
}

fn indent(s: &str) -> String {
    s.lines().map(|l| format!("  {l}\n")).collect()
}

fn scan(field: &FieldSpec, job: &JobFile, b: &crate::lgp::ScanBounds) -> Result<Report> {
    b.validate()?;
    let q = normalized(field, job)?;
    let s = lgp::local_scan(&q, b)?;
    let mut text = String::new();
    for e in &s.log {
        let status = match e.status {
            ScanStatus::Isotropic => "isotropic",
            ScanStatus::Anisotropic => "ANISOTROPIC",
            ScanStatus::Unsupported => "unsupported",
        };
        text += &format!("{:<40} {status}", e.place);
        if let Some(d) = &e.detail {
            text += &format!("  ({d})");
        }
        text.push('\n');
    }
    match &s.obstruction {
        Some(o) => text += &format!("obstruction at {}\n", o.label),
        None => text += &format!("no obstruction at {} places\n", s.log.len()),
    }
    let json = json!({ "bounds": b, "scan": s });
    Ok(Report::ok(json, text))
}

fn witness(field: &FieldSpec, job: &JobFile, b: &crate::lgp::ScanBounds) -> Result<Report> {
    let q = normalized(field, job)?;
    let g = GlobalForm::from_normalized(&q)?;
    match lgp::witness_search(&g, b.witness_degree_x, b.witness_degree_y, b.precision, b.seed) {
        Ok(w) => {
            let text = format!("{} witness for <{}>: ({})\n", kind_word(&w), g.format_entries().join(", "), w.vector.join(", "));
            Ok(Report::ok(json!({ "form": g.format_entries(), "bounds": b, "witness": w }), text))
        }
        Err(Error::WitnessSearchExhausted) => Ok(Report {
            code: EXIT_UNDECIDED,
            json: json!({ "form": g.format_entries(), "bounds": b, "witness": null }),
            text: format!("no witness within bidegree ({}, {})\n", b.witness_degree_x, b.witness_degree_y),
        }),
        Err(e) => Err(e),
    }
}

fn kind_word(w: &lgp::GlobalWitness) -> &'static str {
    match w.kind {
        lgp::WitnessKind::Exact => "exact",
        lgp::WitnessKind::Hensel => "hensel",
    }
}

fn verdict(field: &FieldSpec, job: &JobFile, b: &crate::lgp::ScanBounds) -> Result<Report> {
    let (_, target) = ring(field)?;
    let q = normalized(field, job)?;
    let rep = lgp::verdict_for(&q, b, target)?;
    let mut text = format!("{} for <{}>\n", rep.verdict.kind(), rep.form.join(", "));
    let code = match &rep.verdict {
        Verdict::Obstructed { label, certificate, .. } => {
            text += &format!("anisotropic at {label} (residue field {})\n", certificate.residue_field);
            text += &indent(&certificate.first.render());
            text += &indent(&certificate.second.render());
            EXIT_OK
        }
        Verdict::Isotropic { witness } => {
            text += &format!("{} witness: ({})\n", kind_word(witness), witness.vector.join(", "));
            EXIT_OK
        }
        Verdict::Undecided { reason } => {
            text += &format!("reason: {reason}\n");
            EXIT_UNDECIDED
        }
    };
    text += &format!("places checked: {}\n", rep.scan.len());
    if let Some(c) = &rep.companion {
        text += &format!("companion: {c}\n");
    }
    for w in &rep.warnings {
        text += &format!("warning: {w}\n");
    }
    Ok(Report { code, json: serde_json::to_value(&rep).expect("report serializes"), text })
}

fn fuzz(args: &Args, field: &FieldSpec, job: &JobFile, b: &crate::lgp::ScanBounds) -> Result<Report> {
    let mut params = job.fuzz.unwrap_or(FuzzParams { p: 3, rank_min: 3, rank_max: 4, factor_degree_max: 3, trials: 20 });
    if let Ok((r, _)) = ring(field) {
        params.p = r.residue_field().characteristic();
        if r.residue_field().order() != params.p as u128 || r.is_padic() {
            return Err(Error::UnsupportedField("fuzz runs over F_p[[x]]".into()));
        }
    }
    if let Some(p) = args.p {
        params.p = p;
    }
    if let Some(s) = &args.rank {
        let (lo, hi) = s.split_once('-').unwrap_or((s, s));
        params.rank_min = lo.trim().parse().map_err(|_| Error::invalid(format!("bad rank range '{s}'")))?;
        params.rank_max = hi.trim().parse().map_err(|_| Error::invalid(format!("bad rank range '{s}'")))?;
    }
    if let Some(t) = args.trials {
        params.trials = t;
    }
    if let Some(d) = args.factor_degree {
        params.factor_degree_max = d;
    }
    let rep = lgp::fuzz(&params, b)?;
    let c = &rep.counts;
    let mut text = format!(
        "{} trials over F{}[[x]][[y]], ranks {}-{}: {} obstructed, {} isotropic, {} undecided, {} violations\n",
        params.trials, params.p, params.rank_min, params.rank_max, c.obstructed, c.isotropic, c.undecided, c.violations
    );
    if !rep.deep_obstructions.is_empty() {
        text += &format!("obstructed only at blow-up places: {:?}\n", rep.deep_obstructions);
    }
    for v in &rep.violations {
        text += &format!("violation: {v}\n");
    }
    let code = if c.violations > 0 { EXIT_VIOLATION } else { EXIT_OK };
    Ok(Report { code, json: serde_json::to_value(&rep).expect("report serializes"), text })
}

fn blowup_val(field: &FieldSpec, job: &JobFile, cap: usize) -> Result<Report> {
    let k = match field {
        FieldSpec::Tower(Tower::Finite(k)) => k.clone(),
        FieldSpec::Ring(r) | FieldSpec::Function(r, _) if !r.is_padic() => r.residue_field(),
        _ => return Err(Error::invalid("blow-up valuations need a finite field or k[[x]]")),
    };
    let steps = job.chain.clone().ok_or_else(|| Error::invalid("no chain given: pass --chain"))?;
    let chain = BlowupChain::new(steps);
    let src = job.poly.as_deref().ok_or_else(|| Error::invalid("no polynomial given: pass --poly"))?;
    let f = BiPoly::parse(src, &k)?;
    let rc = chain.resolve(&k, cap)?;
    let v = blowup_valuation(&chain, &k, &f)?;
    let residue = v.residue.format(&rc.field, "t");
    let text = format!(
        "v{}({src}) = {}\nresidue: {residue} over {}\nchart: x = {}, y = {}\n",
        chain.label(),
        v.value,
        v.chart.field,
        v.chart.x,
        v.chart.y
    );
    let json = json!({ "chain": chain.steps, "poly": src, "value": v.value, "residue": residue, "chart": v.chart });
    Ok(Report::ok(json, text))
}
