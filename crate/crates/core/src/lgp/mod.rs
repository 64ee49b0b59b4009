//! Local-global verification over `L = Frac(k[[x]][[y]])`: bounded place
//! enumeration, the obstruction scan, an independent witness search and
//! three-valued verdicts.

mod fuzz;
mod witness;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use fuzz::{fuzz, random_normalized_form, FuzzCounts, FuzzParams, FuzzReport, TrialRecord};
pub use witness::{
    certify_global_witness, exact_witness_search, witness_search, GlobalForm, GlobalWitness, WitnessKind, EXHAUSTIVE_LIMIT, SEARCH_BUDGET,
};

use crate::error::{Error, Result};
use crate::fields::FiniteField;
use crate::places::{decide_local, BlowupChain, BlowupStep, LocalCertificate, PlaceJson, PlaceSpec};
use crate::weierstrass::{normalize_form, APoly, NormalizedForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanBounds {
    pub blowup_depth: usize,
    pub residue_degree_cap: usize,
    pub witness_degree_x: usize,
    pub witness_degree_y: usize,
    pub precision: usize,
    pub seed: u64,
}

impl Default for ScanBounds {
    fn default() -> Self {
        ScanBounds {
            blowup_depth: 2,
            residue_degree_cap: 2,
            witness_degree_x: 4,
            witness_degree_y: 4,
            precision: 16,
            seed: 0,
        }
    }
}

impl ScanBounds {
    pub fn validate(&self) -> Result<()> {
        if self.precision < 8 {
            return Err(Error::invalid("precision must be at least 8"));
        }
        if self.residue_degree_cap == 0 {
            return Err(Error::invalid("residue degree cap must be at least 1"));
        }
        Ok(())
    }
}

/// Gauss, the generic points of the factors, infinity, special points at
/// nonzero roots of the entry reductions, then the blow-up chains of
/// [`chains`].
pub fn enumerate_places(q: &NormalizedForm, b: &ScanBounds) -> Result<Vec<PlaceSpec>> {
    let r = &q.ring;
    let mut out = vec![PlaceSpec::Gauss];
    let mut seen: Vec<&crate::weierstrass::DistinguishedPoly> = Vec::new();
    for c in &q.coeffs {
        for (p, _, status) in &c.factors {
            if !seen.iter().any(|s| r.poly_eq(s.coeffs(), p.coeffs())) {
                seen.push(p);
                out.push(PlaceSpec::GenericPoint { poly: p.clone(), status: *status });
            }
        }
    }
    out.push(PlaceSpec::Infinity);
    out.extend(special_points(q, b)?);
    if !r.is_padic() {
        out.extend(chains(&r.residue_field(), b.blowup_depth, b.residue_degree_cap)?.into_iter().map(PlaceSpec::Blowup));
    }
    Ok(out)
}

/// Closed points `pi != y` of degree at most the cap dividing the reduction
/// of some entry modulo `x`.
fn special_points(q: &NormalizedForm, b: &ScanBounds) -> Result<Vec<PlaceSpec>> {
    let r = &q.ring;
    if r.is_padic() {
        return Ok(vec![]);
    }
    let k = r.residue_field();
    let mut out: Vec<PlaceSpec> = Vec::new();
    for c in crate::places::coefficients(q)? {
        if c.n == 1 {
            continue;
        }
        let mut red = crate::fields::Poly::constant(c.lambda.clone());
        for p in &c.factors {
            let (bp, _) = crate::places::to_bipoly(r, p.coeffs());
            red = red.mul(&bp.at_x_zero(&k), &k);
        }
        for (pi, _) in red.factor(&k)?.factors {
            let d = pi.degree().unwrap_or(0);
            if d == 0 || d > b.residue_degree_cap || pi.coeff(0, &k).is_zero() {
                continue;
            }
            let place = PlaceSpec::special_point(&k, pi)?;
            if !out.contains(&place) {
                out.push(place);
            }
        }
    }
    Ok(out)
}

/// Chains `[origin]` and `[origin, c_1, ..., c_j]` for `1 <= j <= depth`,
/// breadth first, each `c_i` a closed point of the latest exceptional line
/// with residue degree over `k` at most `cap`: rational values first, then
/// points of higher degree, then infinity.
pub fn chains(k: &Arc<FiniteField>, depth: usize, cap: usize) -> Result<Vec<BlowupChain>> {
    if depth == 0 {
        return Ok(vec![]);
    }
    let origin = BlowupChain::new(vec![BlowupStep::Origin]);
    let mut out = vec![origin.clone()];
    let mut frontier = vec![(origin, 1usize)];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (chain, deg) in &frontier {
            for (step, d) in centers(k, *deg, cap)? {
                let mut steps = chain.steps.clone();
                steps.push(step);
                next.push((BlowupChain::new(steps), d));
            }
        }
        out.extend(next.iter().map(|(c, _)| c.clone()));
        frontier = next;
    }
    Ok(out)
}

/// Centers on an exceptional line over `kappa` with `[kappa : k] = deg`:
/// one root per closed point of the affine line, then infinity.
fn centers(k: &Arc<FiniteField>, deg: usize, cap: usize) -> Result<Vec<(BlowupStep, usize)>> {
    let p = k.characteristic();
    let kdeg = k.degree();
    let cur = FiniteField::new(p, kdeg * deg)?;
    let qcur = cur.order();
    let mut out = Vec::new();
    for d in 1..=cap / deg {
        let big = FiniteField::new(p, kdeg * deg * d)?;
        let mut taken = vec![false; big.order() as usize];
        for idx in 0..big.order() {
            if taken[idx as usize] {
                continue;
            }
            let c = big.element(idx);
            let mut orbit = vec![idx];
            let mut z = big.pow_u128(&c, qcur);
            while z != c {
                orbit.push(big.index(&z));
                z = big.pow_u128(&z, qcur);
            }
            for &o in &orbit {
                taken[o as usize] = true;
            }
            if orbit.len() != d {
                continue;
            }
            let step = if kdeg * deg * d == kdeg {
                BlowupStep::Value { value: k.format(&c) }
            } else if let Some(a) = big.as_prime(&c) {
                BlowupStep::Value { value: a.to_string() }
            } else {
                BlowupStep::Ext { field: big.name(), value: big.format(&c) }
            };
            out.push((step, deg * d));
        }
    }
    out.push((BlowupStep::Infinity, deg));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanStatus {
    Isotropic,
    Anisotropic,
    Unsupported,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub place: String,
    pub status: ScanStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Obstruction {
    pub place: PlaceJson,
    pub label: String,
    pub certificate: LocalCertificate,
    /// The place has an extension to `L` with the same completion data.
    pub extends_to_l: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Scan {
    pub obstruction: Option<Obstruction>,
    pub log: Vec<ScanEntry>,
}

fn extends_to_l(place: &PlaceSpec) -> bool {
    matches!(place, PlaceSpec::Gauss | PlaceSpec::Blowup(_) | PlaceSpec::GenericPoint { .. })
}

/// Decides isotropy at each enumerated place, stopping at the first
/// anisotropic one. Places the engine cannot handle are logged.
pub fn local_scan(q: &NormalizedForm, b: &ScanBounds) -> Result<Scan> {
    let r = &q.ring;
    let mut log = Vec::new();
    for place in enumerate_places(q, b)? {
        let label = place.label(r);
        match decide_local(q, &place) {
            Ok(d) if d.isotropic => log.push(ScanEntry { place: label, status: ScanStatus::Isotropic, detail: None }),
            Ok(d) => {
                log.push(ScanEntry { place: label.clone(), status: ScanStatus::Anisotropic, detail: None });
                return Ok(Scan {
                    obstruction: Some(Obstruction {
                        place: place.to_json(r),
                        label,
                        certificate: d.certificate,
                        extends_to_l: extends_to_l(&place),
                    }),
                    log,
                });
            }
            Err(
                e @ (Error::UnsupportedPlace(_)
                | Error::InsufficientPrecision(_)
                | Error::DegreeCapExceeded(_)
                | Error::UnsupportedCenter(_)),
            ) => log.push(ScanEntry { place: label, status: ScanStatus::Unsupported, detail: Some(e.to_string()) }),
            Err(e) => return Err(e),
        }
    }
    Ok(Scan { obstruction: None, log })
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Obstructed { place: PlaceJson, label: String, certificate: LocalCertificate },
    Isotropic { witness: GlobalWitness },
    Undecided { reason: String },
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Obstructed { .. } => "OBSTRUCTED",
            Verdict::Isotropic { .. } => "ISOTROPIC",
            Verdict::Undecided { .. } => "UNDECIDED",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictReport {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub form: Vec<String>,
    pub bounds: ScanBounds,
    pub scan: Vec<ScanEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Verdict of `<1, a, b, ab>` for a rank-3 input `<1, a, b>`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub companion: Option<String>,
}

/// The field a verdict is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    /// `L = Frac(A[[y]])`; units of `A[[y]]` are squares up to constants.
    L,
    /// `F = K(y)`; the entries must be `lambda x^n prod P_j` on the nose.
    F,
}

/// Over `F` the normalized form must equal the input up to squares in `F`.
fn check_target(q: &NormalizedForm, target: Target) -> Result<()> {
    if target == Target::L {
        return Ok(());
    }
    let r = &q.ring;
    for rec in &q.records {
        let u = r.poly_trim(r.poly_reduce(&rec.unit_sqrt.coeffs));
        let is_one = u.len() == 1 && r.sub(&u[0], &r.one()).is_ok_and(|d| r.field().is_zero(&d) != Ok(false));
        if !is_one {
            return Err(Error::UnsupportedField(format!(
                "entry with unit part {} + O(y^{}): over K(y) the form is not determined by its normalization",
                r.format_poly(&u),
                rec.unit_sqrt.y_precision.unwrap_or(0)
            )));
        }
    }
    Ok(())
}

/// Verdict without the rank-3 companion check.
fn verdict_single(q: &NormalizedForm, b: &ScanBounds, target: Target) -> Result<VerdictReport> {
    b.validate()?;
    check_target(q, target)?;
    let scan = local_scan(q, b)?;
    let g = GlobalForm::from_normalized(q)?;
    let found = match target {
        Target::L => witness_search(&g, b.witness_degree_x, b.witness_degree_y, b.precision, b.seed),
        Target::F => exact_witness_search(&g, b.witness_degree_x, b.witness_degree_y, b.seed)
            .and_then(|w| w.ok_or(Error::WitnessSearchExhausted)),
    };
    let witness = match found {
        Ok(w) => {
            assert!(certify_global_witness(&g, &w)?, "witness search returned an uncertified vector");
            Some(w)
        }
        Err(Error::WitnessSearchExhausted) => None,
        Err(e) => return Err(e),
    };
    let mut warnings = q.warnings.clone();
    warnings.extend(scan.log.iter().filter(|e| e.status == ScanStatus::Unsupported).map(|e| {
        format!("UnsupportedPlace: {}: {}", e.place, e.detail.clone().unwrap_or_default())
    }));
    let verdict = match (scan.obstruction, witness) {
        (Some(o), Some(w)) if o.extends_to_l || w.kind == WitnessKind::Exact => {
            let dump = serde_json::json!({ "form": g.format_entries(), "obstruction": o, "witness": w });
            return Err(Error::ConsistencyViolation(dump.to_string()));
        }
        (Some(o), Some(w)) => {
            // anisotropic over a completion of F that does not see L
            warnings.push(format!("obstruction at {} holds over F only", o.label));
            Verdict::Isotropic { witness: w }
        }
        (Some(o), None) => Verdict::Obstructed { place: o.place, label: o.label, certificate: o.certificate },
        (None, Some(w)) => Verdict::Isotropic { witness: w },
        (None, None) => Verdict::Undecided { reason: Error::WitnessSearchExhausted.to_string() },
    };
    Ok(VerdictReport {
        verdict,
        form: g.format_entries(),
        bounds: *b,
        scan: scan.log,
        warnings,
        companion: None,
    })
}

/// Three-valued verdict over `L`. A rank-3 form is also decided through its
/// rank-4 companion and the two outcomes must agree.
pub fn verdict(q: &NormalizedForm, b: &ScanBounds) -> Result<VerdictReport> {
    verdict_for(q, b, Target::L)
}

pub fn verdict_for(q: &NormalizedForm, b: &ScanBounds, target: Target) -> Result<VerdictReport> {
    if q.coeffs.is_empty() {
        return Err(Error::invalid("form of rank 0"));
    }
    let mut rep = verdict_single(q, b, target)?;
    if q.coeffs.len() == 3 {
        let c = companion(q)?;
        let other = verdict_single(&c, b, target)?;
        let (a, o) = (rep.verdict.kind(), other.verdict.kind());
        if (a == "OBSTRUCTED" && o == "ISOTROPIC") || (a == "ISOTROPIC" && o == "OBSTRUCTED") {
            let dump = serde_json::json!({ "form": rep, "companion": other });
            return Err(Error::ConsistencyViolation(dump.to_string()));
        }
        rep.companion = Some(o.to_string());
    }
    Ok(rep)
}

fn factor_list(q: &NormalizedForm, i: usize) -> Vec<(APoly, u32)> {
    let r = &q.ring;
    let c = &q.coeffs[i];
    let mut out = vec![(vec![c.lambda.clone()], 1)];
    if c.n == 1 {
        out.push((vec![r.uniformizer()], 1));
    }
    for (p, e, _) in &c.factors {
        out.push((p.coeffs().to_vec(), *e));
    }
    out
}

/// `<a_1, a_2, a_3>` is similar to `<1, a, b>` with `a = a_1 a_2`,
/// `b = a_1 a_3`; the companion is `<1, a, b, ab>`, `ab ~ a_2 a_3`.
pub fn companion(q: &NormalizedForm) -> Result<NormalizedForm> {
    if q.coeffs.len() != 3 {
        return Err(Error::invalid("companion forms are defined for rank 3"));
    }
    let r = &q.ring;
    let join = |i: usize, j: usize| {
        let mut v = factor_list(q, i);
        v.extend(factor_list(q, j));
        v
    };
    let entries = vec![vec![(vec![r.one()], 1)], join(0, 1), join(0, 2), join(1, 2)];
    normalize_form(r, &entries)
}
