use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Tower;
use crate::lgp::{FuzzParams, ScanBounds, Target};
use crate::places::{BlowupStep, PlaceJson};
use crate::weierstrass::{APoly, CoefficientJson, Dvr};

/// One entry of a form: a literal, an explicit factor list, or a
/// normalized record `lambda * x^n * prod P^exp`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Literal(String),
    Normalized(CoefficientJson),
    Factored { factors: Vec<RawFactor> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFactor {
    pub poly: String,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub exp: u32,
}

fn one() -> u32 {
    1
}

fn is_one(e: &u32) -> bool {
    *e == 1
}

/// Overrides of the scan bounds; absent fields keep their defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residue_degree_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_degree_x: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_degree_y: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Options {
    pub fn is_empty(&self) -> bool {
        *self == Options::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    pub field: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub form: Vec<EntryJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub place: Option<PlaceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<BlowupStep>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuzz: Option<FuzzParams>,
    #[serde(default, skip_serializing_if = "Options::is_empty")]
    pub options: Options,
}

impl JobFile {
    pub fn new(field: impl Into<String>) -> Self {
        JobFile {
            field: field.into(),
            form: vec![],
            poly: None,
            place: None,
            chain: None,
            fuzz: None,
            options: Options::default(),
        }
    }

    /// Parses a job; errors carry the line and column from the JSON reader.
    pub fn parse(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::Parse { column: e.column(), message: format!("line {}: {e}", e.line()) })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("job serializes")
    }

    /// Bounds from the defaults, the job options and then the command line.
    pub fn bounds(&self, precision: usize) -> ScanBounds {
        let d = ScanBounds::default();
        let o = &self.options;
        ScanBounds {
            blowup_depth: o.blowup_depth.unwrap_or(d.blowup_depth),
            residue_degree_cap: o.residue_degree_cap.unwrap_or(d.residue_degree_cap),
            witness_degree_x: o.witness_degree_x.unwrap_or(d.witness_degree_x),
            witness_degree_y: o.witness_degree_y.unwrap_or(d.witness_degree_y),
            precision,
            seed: o.seed.unwrap_or(d.seed),
        }
    }
}

/// What a field descriptor names.
#[derive(Clone, Debug)]
pub enum FieldSpec {
    /// A complete discretely valued field (or a tower of them), a finite
    /// field, or `F_q(t)`.
    Tower(Tower),
    /// `k[[x]]` or `Z_p`.
    Ring(Dvr),
    /// `Frac(A[[y]])` or `K(y)` over `A = k[[x]]`.
    Function(Dvr, Target),
}

const SHAPES: [&str; 9] = [
    "F{q}",
    "Q{p}",
    "F{q}((x))",
    "F{q}((x))((y))",
    "F{q}(t)",
    "F{q}[[x]]",
    "Z{p}",
    "FracR(F{q}[[x]][[y]])",
    "F{q}((x))(y)",
];

/// Parses a descriptor; on failure suggests the closest accepted shape.
pub fn parse_field(desc: &str, precision: usize) -> Result<FieldSpec> {
    let s: String = desc.chars().filter(|c| !c.is_whitespace()).collect();
    let parsed = parse_inner(&s, precision);
    parsed.map_err(|e| {
        let q: String = s.chars().skip(1).take_while(|c| c.is_ascii_digit()).collect();
        let q = if q.is_empty() { "3".to_string() } else { q };
        let best = SHAPES
            .iter()
            .map(|t| t.replace("{q}", &q).replace("{p}", &q))
            .min_by_key(|c| strsim::levenshtein(c, &s))
            .expect("shapes are nonempty");
        let msg = match e {
            Error::Parse { message, .. } => message,
            other => other.to_string(),
        };
        Error::invalid(format!("field descriptor '{desc}': {msg}; did you mean '{best}'?"))
    })
}

fn parse_inner(s: &str, precision: usize) -> Result<FieldSpec> {
    if let Some(inner) = s.strip_prefix("FracR(").and_then(|r| r.strip_suffix(')')) {
        let base = inner.strip_suffix("[[y]]").ok_or_else(|| Error::invalid("expected FracR(k[[x]][[y]])"))?;
        let r = Dvr::parse(base, precision)?;
        if r.is_padic() {
            return Err(Error::UnsupportedField("places are implemented over k[[x]]".into()));
        }
        return Ok(FieldSpec::Function(r, Target::L));
    }
    if let Some(base) = s.strip_suffix("((x))(y)") {
        let r = Dvr::parse(&format!("{base}[[x]]"), precision)?;
        return Ok(FieldSpec::Function(r, Target::F));
    }
    if s.contains("[[") || s.starts_with('Z') {
        return Ok(FieldSpec::Ring(Dvr::parse(s, precision)?));
    }
    Ok(FieldSpec::Tower(Tower::parse_descriptor(s, precision)?))
}

/// Splits `"c*(y - x)^2*y"` at top-level `*` into `(factor, exponent)`; a
/// sum stays one factor.
pub fn split_product(src: &str) -> Vec<(String, u32)> {
    let s = src.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, s),
    };
    let mut depth = 0i32;
    let mut pieces = Vec::new();
    let mut start = 0;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 => return vec![(s.to_string(), 1)],
            '*' if depth == 0 => {
                pieces.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    pieces.push(&body[start..]);
    let mut out: Vec<(String, u32)> = Vec::new();
    if sign {
        out.push(("-1".into(), 1));
    }
    for p in pieces {
        let p = p.trim();
        let (base, exp) = match p.rfind('^') {
            Some(i) if p[..i].ends_with(')') || !p[..i].contains('(') => match p[i + 1..].trim().parse::<u32>() {
                Ok(e) => (p[..i].trim(), e),
                Err(_) => (p, 1),
            },
            _ => (p, 1),
        };
        let base = base.strip_prefix('(').and_then(|b| b.strip_suffix(')')).filter(|b| balanced(b)).unwrap_or(base);
        out.push((base.to_string(), exp));
    }
    out
}

fn balanced(s: &str) -> bool {
    let mut d = 0i32;
    for c in s.chars() {
        match c {
            '(' => d += 1,
            ')' => {
                d -= 1;
                if d < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    d == 0
}

/// Factor lists for `normalize_form`.
pub fn entry_factors(r: &Dvr, e: &EntryJson) -> Result<Vec<(APoly, u32)>> {
    match e {
        EntryJson::Literal(s) => split_product(s).into_iter().map(|(f, e)| Ok((r.parse_poly(&f)?, e))).collect(),
        EntryJson::Factored { factors } => factors.iter().map(|f| Ok((r.parse_poly(&f.poly)?, f.exp))).collect(),
        EntryJson::Normalized(c) => {
            let mut out = vec![(r.parse_poly(&c.lambda)?, 1)];
            if c.n > 0 {
                out.push((vec![r.uniformizer()], c.n));
            }
            for f in &c.factors {
                out.push((r.parse_poly(&f.poly)?, f.exp));
            }
            Ok(out)
        }
    }
}
