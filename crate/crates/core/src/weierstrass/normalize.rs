use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Elem;
use crate::weierstrass::newton::{irreducibility, Irreducibility};
use crate::weierstrass::prep::{square_normalize, w_prepare, DistinguishedPoly, YSeries};
use crate::weierstrass::ring::{APoly, Dvr};

/// `lambda * x^n * prod P_j^(e_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedCoefficient {
    pub lambda: Elem,
    pub n: u32,
    pub factors: Vec<(DistinguishedPoly, u32, Irreducibility)>,
}

/// The square removed from one entry: the entry equals the normalized
/// coefficient times `(x^x_power * prod P^e * unit_sqrt)^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsometryRecord {
    pub x_power: u32,
    pub factor_powers: Vec<(DistinguishedPoly, u32)>,
    pub unit_sqrt: YSeries,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedForm {
    pub ring: Dvr,
    pub coeffs: Vec<NormalizedCoefficient>,
    pub records: Vec<IsometryRecord>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorJson {
    pub poly: String,
    pub exp: u32,
    pub irreducible: Irreducibility,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientJson {
    pub lambda: String,
    pub n: u32,
    pub factors: Vec<FactorJson>,
}

impl NormalizedCoefficient {
    pub fn to_json(&self, r: &Dvr) -> CoefficientJson {
        CoefficientJson {
            lambda: r.format(&self.lambda),
            n: self.n,
            factors: self
                .factors
                .iter()
                .map(|(p, e, s)| FactorJson { poly: p.format(r), exp: *e, irreducible: *s })
                .collect(),
        }
    }

    /// `lambda * x^n * prod P_j^(e_j)` as a polynomial in `y`.
    pub fn reconstruct(&self, r: &Dvr) -> Result<APoly> {
        let mut out = vec![r.mul(&self.lambda, &r.field().pow(&r.uniformizer(), self.n as i64)?)?];
        for (p, e, _) in &self.factors {
            out = r.poly_mul(&out, &r.poly_pow(p.coeffs(), *e)?)?;
        }
        Ok(out)
    }

    pub fn asserted(&self) -> bool {
        self.factors.iter().any(|(_, _, s)| *s == Irreducibility::Asserted)
    }
}

impl IsometryRecord {
    /// The square root of the discarded square, through `y^(N-1)`.
    pub fn root(&self, r: &Dvr) -> Result<APoly> {
        let n = r.precision();
        let xk = r.field().pow(&r.uniformizer(), self.x_power as i64)?;
        let mut out = r.poly_scale(&self.unit_sqrt.coeffs, &xk)?;
        for (p, e) in &self.factor_powers {
            out = r.poly_mul_trunc(&out, &r.poly_pow(p.coeffs(), *e)?, n)?;
        }
        Ok(out)
    }

    pub fn format(&self, r: &Dvr) -> String {
        let mut parts = Vec::new();
        match self.x_power {
            0 => {}
            1 => parts.push("x".to_string()),
            k => parts.push(format!("x^{k}")),
        }
        for (p, e) in &self.factor_powers {
            let s = p.format(r);
            let s = if s.contains(' ') { format!("({s})") } else { s };
            parts.push(if *e == 1 { s } else { format!("{s}^{e}") });
        }
        let u = r.format_poly(&self.unit_sqrt.coeffs);
        if u != "1" {
            parts.push(format!("({u} + O(y^{}))", self.unit_sqrt.y_precision.unwrap_or(0)));
        }
        if parts.is_empty() {
            "1".into()
        } else {
            format!("({})^2", parts.join("*"))
        }
    }
}

/// Normalizes each entry, given as a list of `(polynomial, exponent)`.
pub fn normalize_form(r: &Dvr, entries: &[Vec<(APoly, u32)>]) -> Result<NormalizedForm> {
    let mut coeffs = Vec::new();
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for entry in entries {
        let (c, rec) = normalize_entry(r, entry)?;
        if c.asserted() {
            let names: Vec<String> = c
                .factors
                .iter()
                .filter(|(_, _, s)| *s == Irreducibility::Asserted)
                .map(|(p, _, _)| p.format(r))
                .collect();
            warnings.push(format!("IrreducibilityUnverified: {}", names.join(", ")));
        }
        coeffs.push(c);
        records.push(rec);
    }
    Ok(NormalizedForm { ring: r.clone(), coeffs, records, warnings })
}

fn normalize_entry(r: &Dvr, entry: &[(APoly, u32)]) -> Result<(NormalizedCoefficient, IsometryRecord)> {
    let big_n = r.precision();
    let mut x_total = 0u32;
    let mut unit = vec![r.one()];
    let mut factors: Vec<(DistinguishedPoly, u32)> = Vec::new();
    let push = |p: DistinguishedPoly, e: u32, factors: &mut Vec<(DistinguishedPoly, u32)>| {
        if let Some(slot) = factors.iter_mut().find(|(q, _)| r.poly_eq(q.coeffs(), p.coeffs())) {
            slot.1 += e;
        } else {
            factors.push((p, e));
        }
    };
    for (f, e) in entry {
        if *e == 0 {
            continue;
        }
        let prep = w_prepare(r, &YSeries::exact(f.clone()))?;
        x_total += prep.n * e;
        for _ in 0..*e {
            unit = r.poly_mul_trunc(&unit, &prep.unit, big_n)?;
        }
        let c = prep.dist.coeffs();
        let k = c.iter().take_while(|a| r.val(a).is_none()).count();
        if k > 0 {
            push(DistinguishedPoly::y_power(r, 1), k as u32 * e, &mut factors);
        }
        if prep.dist.degree() > k {
            push(DistinguishedPoly::new(r, c[k..].to_vec())?, *e, &mut factors);
        }
    }
    if unit.is_empty() {
        return Err(Error::ZeroInput);
    }
    let (lambda, root) = square_normalize(r, &YSeries::truncated(unit, big_n))?;
    let mut kept = Vec::new();
    let mut squares = Vec::new();
    for (p, e) in factors {
        if e / 2 > 0 {
            squares.push((p.clone(), e / 2));
        }
        if e % 2 == 1 {
            let status = irreducibility(r, &p)?;
            kept.push((p, 1, status));
        }
    }
    kept.sort_by(|a, b| (a.0.degree(), a.0.format(r)).cmp(&(b.0.degree(), b.0.format(r))));
    let coeff = NormalizedCoefficient { lambda, n: x_total % 2, factors: kept };
    let record = IsometryRecord { x_power: x_total / 2, factor_powers: squares, unit_sqrt: root };
    Ok((coeff, record))
}
