//! Isotropy of diagonal forms: residue splitting over complete discretely
//! valued fields, finite-field leaf rules, and the rational function field solver.

mod certify;
mod ratfun;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Elem, Tower};

pub use certify::certify_witness;
pub use ratfun::{decide_ratfun, decide_ratfun_verdict};

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalForm {
    pub tower: Tower,
    pub entries: Vec<Elem>,
}

impl DiagonalForm {
    pub fn new(tower: Tower, entries: Vec<Elem>) -> Result<Self> {
        for e in &entries {
            if tower.is_zero(e)? {
                return Err(Error::ZeroInput);
            }
        }
        Ok(DiagonalForm { tower, entries })
    }

    /// Comma-separated entries in the literal grammar, e.g. `"1, 2*t, t^-1"`.
    pub fn parse(tower: &Tower, src: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for part in split_top_level(src) {
            entries.push(tower.parse_elem(part)?);
        }
        if entries.is_empty() {
            return Err(Error::invalid("empty form"));
        }
        Self::new(tower.clone(), entries)
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    /// `sum a_i v_i^2`.
    pub fn evaluate(&self, v: &[Elem]) -> Result<Elem> {
        if v.len() != self.rank() {
            return Err(Error::invalid("vector length differs from rank"));
        }
        let t = &self.tower;
        let mut acc = t.zero();
        for (a, x) in self.entries.iter().zip(v) {
            if t.is_zero(x)? {
                continue;
            }
            acc = t.add(&acc, &t.mul(a, &t.mul(x, x)?)?)?;
        }
        Ok(acc)
    }

    pub fn format_entries(&self) -> Vec<String> {
        self.entries.iter().map(|e| self.tower.format(e)).collect()
    }
}

/// Splits at commas outside parentheses.
pub(crate) fn split_top_level(src: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in src.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(src[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = src[start..].trim();
    if !last.is_empty() || !out.is_empty() {
        out.push(last);
    }
    out
}

/// Proof object for an isotropy decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// A vector on which the form vanishes.
    Witness {
        field: String,
        vector: Vec<String>,
        exact: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        precision: Option<usize>,
    },
    /// Anisotropic because both residue forms are.
    Split {
        field: String,
        uniformizer: String,
        classes: Vec<String>,
        first: Box<Certificate>,
        second: Box<Certificate>,
    },
    /// Anisotropic form over a base field.
    Leaf { field: String, entries: Vec<String>, reason: String },
    /// Anisotropic over the completion of a rational function field at a place.
    LocalObstruction { field: String, place: String, local: Box<Certificate> },
    /// Isotropic at every place of a rational function field.
    LocallyIsotropic { field: String, places: Vec<String> },
    /// Isotropic by the rank bound; explicit search ran out of budget.
    WitnessPending { field: String, reason: String },
}

impl Certificate {
    pub fn is_isotropic(&self) -> bool {
        matches!(
            self,
            Certificate::Witness { .. } | Certificate::LocallyIsotropic { .. } | Certificate::WitnessPending { .. }
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    /// Leaves of an anisotropy tree.
    pub fn leaves(&self) -> Vec<&Certificate> {
        match self {
            Certificate::Split { first, second, .. } => {
                let mut v = first.leaves();
                v.extend(second.leaves());
                v
            }
            Certificate::LocalObstruction { local, .. } => local.leaves(),
            c => vec![c],
        }
    }

    /// Indented human-readable rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        render_into(self, 0, &mut out);
        out
    }
}

fn render_into(c: &Certificate, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match c {
        Certificate::Witness { field, vector, exact, precision } => {
            let how = if *exact { "exact".to_string() } else { format!("hensel, precision {}", precision.unwrap_or(0)) };
            out.push_str(&format!("{pad}witness over {field} ({how}): ({})\n", vector.join(", ")));
        }
        Certificate::Split { field, uniformizer, classes, first, second } => {
            out.push_str(&format!("{pad}split over {field} at {uniformizer}: <{}>\n", classes.join(", ")));
            render_into(first, depth + 1, out);
            render_into(second, depth + 1, out);
        }
        Certificate::Leaf { field, entries, reason } => {
            out.push_str(&format!("{pad}anisotropic over {field}: <{}> ({reason})\n", entries.join(", ")));
        }
        Certificate::LocalObstruction { field, place, local } => {
            out.push_str(&format!("{pad}obstruction over {field} at place {place}\n"));
            render_into(local, depth + 1, out);
        }
        Certificate::LocallyIsotropic { field, places } => {
            out.push_str(&format!("{pad}isotropic over {field}: locally isotropic at {}\n", places.join(", ")));
        }
        Certificate::WitnessPending { field, reason } => {
            out.push_str(&format!("{pad}isotropic over {field}, witness pending: {reason}\n"));
        }
    }
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub isotropic: bool,
    pub certificate: Certificate,
    /// Exact vector with `q(v) = 0`, or a truncated vector passing the Hensel check.
    pub witness: Option<Vec<Elem>>,
}

/// One recursion node of [`decide_isotropy_traced`].
#[derive(Clone, Debug)]
pub struct TraceNode {
    pub form: DiagonalForm,
    pub isotropic: bool,
    /// Verdicts of the two residue forms; `None` for non-split nodes.
    pub parts: Option<(bool, bool)>,
    pub witness: Option<Vec<Elem>>,
}

/// The residue forms of `q` at `pi` (default: the level's uniformizer), and
/// for each entry its part (0 or 1) and valuation.
pub fn springer_split(q: &DiagonalForm, pi: Option<&Elem>) -> Result<(DiagonalForm, DiagonalForm, Vec<(usize, i64)>)> {
    let t = &q.tower;
    let res = t.residue_field()?;
    let pi_inv = match pi {
        Some(p) => {
            if t.valuation(p)? != 1 {
                return Err(Error::invalid("uniformizer must have valuation 1"));
            }
            Some((p.clone(), t.inv(p)?))
        }
        None => None,
    };
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut placement = Vec::new();
    for a in &q.entries {
        let (v, r) = match &pi_inv {
            None => t.leading(a)?,
            Some((_, pinv)) => {
                let v = t.valuation(a)?;
                let u = t.mul(a, &t.pow(pinv, v)?)?;
                (v, t.leading(&u)?.1)
            }
        };
        if v.rem_euclid(2) == 0 {
            placement.push((0, v));
            first.push(r);
        } else {
            placement.push((1, v));
            second.push(r);
        }
    }
    Ok((
        DiagonalForm { tower: res.clone(), entries: first },
        DiagonalForm { tower: res, entries: second },
        placement,
    ))
}

pub fn decide_isotropy(q: &DiagonalForm) -> Result<Decision> {
    decide(q, &mut None)
}

/// As [`decide_isotropy`], also recording every recursion node.
pub fn decide_isotropy_traced(q: &DiagonalForm) -> Result<(Decision, Vec<TraceNode>)> {
    let mut trace = Some(Vec::new());
    let d = decide(q, &mut trace)?;
    Ok((d, trace.unwrap()))
}

fn witness_cert(q: &DiagonalForm, w: &[Elem]) -> Certificate {
    let exact = w.iter().all(|x| q.tower.is_exact(x));
    Certificate::Witness {
        field: q.tower.name(),
        vector: w.iter().map(|x| q.tower.format(x)).collect(),
        exact,
        precision: if exact { None } else { Some(q.tower.precision()) },
    }
}

fn isotropic(q: &DiagonalForm, w: Vec<Elem>) -> Decision {
    Decision { isotropic: true, certificate: witness_cert(q, &w), witness: Some(w) }
}

fn anisotropic(certificate: Certificate) -> Decision {
    Decision { isotropic: false, certificate, witness: None }
}

pub(crate) fn decide(q: &DiagonalForm, trace: &mut Option<Vec<TraceNode>>) -> Result<Decision> {
    let d = match &q.tower {
        Tower::Finite(_) => decide_finite(q)?,
        Tower::RatFun { .. } => decide_ratfun(q)?,
        Tower::Laurent { .. } | Tower::PAdic { .. } => return decide_cdvf(q, trace),
    };
    if let Some(tr) = trace.as_mut() {
        tr.push(TraceNode { form: q.clone(), isotropic: d.isotropic, parts: None, witness: d.witness.clone() });
    }
    Ok(d)
}

/// Square-class representative over a finite field: `1` or the canonical non-square.
fn finite_class(t: &Tower, a: &Elem) -> Result<String> {
    if t.is_square(a)? {
        Ok("1".into())
    } else {
        Ok(t.format(&t.non_square_constant()?))
    }
}

fn decide_finite(q: &DiagonalForm) -> Result<Decision> {
    let t = &q.tower;
    let field = t.name();
    match q.rank() {
        0 => Ok(anisotropic(Certificate::Leaf { field, entries: vec![], reason: "empty form".into() })),
        1 => Ok(anisotropic(Certificate::Leaf {
            field,
            entries: vec![finite_class(t, &q.entries[0])?],
            reason: "rank 1".into(),
        })),
        2 => {
            let r = t.neg(&t.div(&q.entries[0], &q.entries[1])?)?;
            if t.is_square(&r)? {
                Ok(isotropic(q, vec![t.one(), t.sqrt(&r)?]))
            } else {
                let entries = vec![finite_class(t, &q.entries[0])?, finite_class(t, &q.entries[1])?];
                Ok(anisotropic(Certificate::Leaf { field, entries, reason: "-a1/a2 is not a square".into() }))
            }
        }
        r => {
            if let Some(w) = pair_witness(q)? {
                return Ok(isotropic(q, w));
            }
            // a1 x^2 + a2 y^2 = -a3 always has a solution over a finite field
            let Tower::Finite(f) = t else { unreachable!() };
            let (a1, a2, a3) = (&q.entries[0], &q.entries[1], &q.entries[2]);
            for x in f.elements() {
                let x = Elem::Fin(x);
                let lhs = t.add(a3, &t.mul(a1, &t.mul(&x, &x)?)?)?;
                let s = t.neg(&t.div(&lhs, a2)?)?;
                if t.is_zero(&s)? || t.is_square(&s)? {
                    let y = if t.is_zero(&s)? { t.zero() } else { t.sqrt(&s)? };
                    let mut w = vec![x, y, t.one()];
                    w.resize(r, t.zero());
                    return Ok(isotropic(q, w));
                }
            }
            Err(Error::ConsistencyViolation("rank-3 form over a finite field without a zero".into()))
        }
    }
}

/// A zero supported on two coordinates: `-a_i/a_j` a square, first such pair.
pub(crate) fn pair_witness(q: &DiagonalForm) -> Result<Option<Vec<Elem>>> {
    let t = &q.tower;
    for i in 0..q.rank() {
        for j in i + 1..q.rank() {
            let r = t.neg(&t.div(&q.entries[i], &q.entries[j])?)?;
            if t.is_square(&r)? {
                let mut w = vec![t.zero(); q.rank()];
                w[i] = t.one();
                w[j] = t.sqrt(&r)?;
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// Square class of a CDVF entry: `pi^(v mod 2) * residue`.
fn cdvf_class(t: &Tower, a: &Elem) -> Result<String> {
    let (v, r) = t.leading(a)?;
    let res = t.residue_field()?;
    let rc = match res {
        Tower::Finite(_) => finite_class(&res, &r)?,
        _ => cdvf_or_plain_class(&res, &r)?,
    };
    let var = t.var().unwrap_or_default();
    Ok(if v.rem_euclid(2) == 1 { format!("{var}*({rc})") } else { rc })
}

fn cdvf_or_plain_class(t: &Tower, a: &Elem) -> Result<String> {
    if t.is_cdvf() {
        cdvf_class(t, a)
    } else {
        Ok(t.format(a))
    }
}

fn decide_cdvf(q: &DiagonalForm, trace: &mut Option<Vec<TraceNode>>) -> Result<Decision> {
    let t = &q.tower;
    if t.residue_characteristic() == 2 {
        return Err(Error::UnsupportedField("residue characteristic 2".into()));
    }
    let (q1, q2, placement) = springer_split(q, None)?;
    let d1 = if q1.rank() > 0 { Some(decide(&q1, trace)?) } else { None };
    // second part only matters when the first is anisotropic
    let d2 = if d1.as_ref().is_some_and(|d| d.isotropic) || q2.rank() == 0 {
        None
    } else {
        Some(decide(&q2, trace)?)
    };
    let iso1 = d1.as_ref().is_some_and(|d| d.isotropic);
    let iso2 = d2.as_ref().is_some_and(|d| d.isotropic);
    let traced_parts = match trace {
        Some(_) => {
            let p2 = match &d2 {
                Some(d) => d.isotropic,
                None => q2.rank() > 0 && decide(&q2, &mut None)?.isotropic,
            };
            Some((iso1, p2))
        }
        None => None,
    };
    let decision = if iso1 || iso2 {
        let (part, rd) = if iso1 { (0, d1.as_ref().unwrap()) } else { (1, d2.as_ref().unwrap()) };
        match &rd.witness {
            Some(w) => isotropic(q, lift_witness(q, &placement, part, w)?),
            None => {
                // residue isotropic without an explicit vector (function field case)
                Decision {
                    isotropic: true,
                    certificate: Certificate::WitnessPending {
                        field: t.name(),
                        reason: "residue form isotropic without explicit witness".into(),
                    },
                    witness: None,
                }
            }
        }
    } else {
        let empty = |f: &DiagonalForm| Certificate::Leaf { field: f.tower.name(), entries: vec![], reason: "empty form".into() };
        let first = d1.map_or_else(|| empty(&q1), |d| d.certificate);
        let second = d2.map_or_else(|| empty(&q2), |d| d.certificate);
        anisotropic(Certificate::Split {
            field: t.name(),
            uniformizer: t.var().unwrap_or_default(),
            classes: q.entries.iter().map(|a| cdvf_class(t, a)).collect::<Result<_>>()?,
            first: Box::new(first),
            second: Box::new(second),
        })
    };
    if let Some(tr) = trace.as_mut() {
        tr.push(TraceNode {
            form: q.clone(),
            isotropic: decision.isotropic,
            parts: traced_parts,
            witness: decision.witness.clone(),
        });
    }
    Ok(decision)
}

/// Lifts a zero of a residue form to `q`: coordinates `pi^-floor(v/2) * lift(w_i)`
/// on the isotropic part, then one coordinate re-solved by a square root.
fn lift_witness(q: &DiagonalForm, placement: &[(usize, i64)], part: usize, w: &[Elem]) -> Result<Vec<Elem>> {
    let t = &q.tower;
    let res = t.residue_field()?;
    let mut v = vec![t.zero(); q.rank()];
    let mut j = None;
    let mut k = 0;
    for (i, &(p, val)) in placement.iter().enumerate() {
        if p != part {
            continue;
        }
        let wi = &w[k];
        k += 1;
        if res.is_zero(wi)? {
            continue;
        }
        if j.is_none() {
            j = Some(i);
        }
        v[i] = t.monomial(wi, -val.div_euclid(2))?;
    }
    let j = j.ok_or_else(|| Error::invalid("zero residue witness"))?;
    let mut rest = t.zero();
    for (i, x) in v.iter().enumerate() {
        if i != j && !t.is_zero(x)? {
            rest = t.add(&rest, &t.mul(&q.entries[i], &t.mul(x, x)?)?)?;
        }
    }
    if t.is_zero(&rest)? {
        return Err(Error::invalid("residue witness has a single nonzero coordinate"));
    }
    let target = t.neg(&t.div(&rest, &q.entries[j])?)?;
    let root = t.sqrt(&target)?;
    v[j] = t.exact_truncation(&root);
    Ok(v.iter().map(|x| t.exact_truncation(x)).collect())
}

