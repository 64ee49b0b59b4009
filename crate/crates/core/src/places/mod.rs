//! Places of `F = K(y)` over `A = k[[x]]` and local isotropy at them:
//! the Gauss place, the `1/y`-adic place, closed points of the special
//! fiber, divisorial valuations from blow-ups over the origin, and the
//! `f`-adic places of irreducible distinguished polynomials.

mod blowup;
mod generic;

use serde::{Deserialize, Serialize};

pub use blowup::{blowup_valuation, BlowupChain, BlowupStep, BlowupValue, ChartRecord, ResolvedChain, DEFAULT_DEGREE_CAP};
pub use generic::GenericResidue;

use crate::error::{Error, Result};
use crate::fields::{BiPoly, Elem, Fe, FiniteField, Poly, RatFn, ResidueExtension, Series, Tower};
use crate::springer::{decide_isotropy, decide_ratfun_verdict, Certificate, Decision, DiagonalForm};
use crate::weierstrass::{irreducibility, APoly, DistinguishedPoly, Dvr, Irreducibility, NormalizedForm};

#[derive(Clone, Debug, PartialEq)]
pub enum PlaceSpec {
    /// The `x`-adic valuation; residue field `k(y)`.
    Gauss,
    /// The `1/y`-adic valuation; residue field `K`.
    Infinity,
    /// A closed point `pi(y) = 0` of the special fiber, `pi` monic
    /// irreducible over `k` with `pi(0) != 0`; the root is the class of `y`.
    SpecialPoint { poly: Poly },
    Blowup(BlowupChain),
    /// The `f`-adic valuation of a distinguished irreducible `f`.
    GenericPoint { poly: DistinguishedPoly, status: Irreducibility },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum PlaceJson {
    Gauss,
    Infinity,
    SpecialPoint { poly: String },
    Blowup { steps: Vec<BlowupStep> },
    GenericPoint { poly: String, irreducible: Irreducibility },
}

/// `lambda * x^n * prod P_j` with the factors as polynomials in `y`.
#[derive(Clone, Debug)]
pub struct Coefficient {
    pub lambda: Fe,
    pub n: u32,
    pub factors: Vec<DistinguishedPoly>,
}

impl Coefficient {
    /// Sum of the `y`-degrees of the factors.
    pub fn m(&self) -> usize {
        self.factors.iter().map(|p| p.degree()).sum()
    }
}

/// Places need `A = k[[x]]`.
pub fn coefficients(q: &NormalizedForm) -> Result<Vec<Coefficient>> {
    let r = &q.ring;
    if r.is_padic() {
        return Err(Error::UnsupportedField(format!("places are implemented over k[[x]], not {}", r.name())));
    }
    q.coeffs
        .iter()
        .map(|c| {
            let mut factors = Vec::new();
            for (p, e, _) in &c.factors {
                for _ in 0..*e {
                    factors.push(p.clone());
                }
            }
            Ok(Coefficient { lambda: r.residue(&c.lambda)?, n: c.n, factors })
        })
        .collect()
}

impl PlaceSpec {
    pub fn special_point(k: &FiniteField, poly: Poly) -> Result<Self> {
        let d = poly.degree().unwrap_or(0);
        if d == 0 || !poly.is_monic(k) || !poly.is_irreducible(k) {
            return Err(Error::invalid(format!("{} is not monic irreducible", poly.format(k, "y"))));
        }
        if poly.coeff(0, k).is_zero() {
            return Err(Error::invalid("the special point must differ from y = 0"));
        }
        Ok(PlaceSpec::SpecialPoint { poly })
    }

    pub fn generic_point(r: &Dvr, poly: DistinguishedPoly) -> Result<Self> {
        let status = irreducibility(r, &poly)?;
        Ok(PlaceSpec::GenericPoint { poly, status })
    }

    pub fn case_name(&self) -> &'static str {
        match self {
            PlaceSpec::Gauss => "gauss",
            PlaceSpec::Infinity => "infinity",
            PlaceSpec::SpecialPoint { .. } => "special-point",
            PlaceSpec::Blowup(_) => "blowup",
            PlaceSpec::GenericPoint { .. } => "generic-point",
        }
    }

    pub fn label(&self, r: &Dvr) -> String {
        match self {
            PlaceSpec::Gauss => "gauss".into(),
            PlaceSpec::Infinity => "infinity".into(),
            PlaceSpec::SpecialPoint { poly } => format!("special-point({})", poly.format(&r.residue_field(), "y")),
            PlaceSpec::Blowup(c) => format!("blowup{}", c.label()),
            PlaceSpec::GenericPoint { poly, .. } => format!("generic-point({})", poly.format(r)),
        }
    }

    pub fn to_json(&self, r: &Dvr) -> PlaceJson {
        match self {
            PlaceSpec::Gauss => PlaceJson::Gauss,
            PlaceSpec::Infinity => PlaceJson::Infinity,
            PlaceSpec::SpecialPoint { poly } => PlaceJson::SpecialPoint { poly: poly.format(&r.residue_field(), "y") },
            PlaceSpec::Blowup(c) => PlaceJson::Blowup { steps: c.steps.clone() },
            PlaceSpec::GenericPoint { poly, status } => {
                PlaceJson::GenericPoint { poly: poly.format(r), irreducible: *status }
            }
        }
    }

    /// Validates a serialized place against the ring; the irreducibility
    /// status of a generic point is recomputed.
    pub fn from_json(r: &Dvr, j: &PlaceJson) -> Result<Self> {
        Ok(match j {
            PlaceJson::Gauss => PlaceSpec::Gauss,
            PlaceJson::Infinity => PlaceSpec::Infinity,
            PlaceJson::SpecialPoint { poly } => {
                let k = r.residue_field();
                let b = BiPoly::parse(poly, &k)?;
                if b.degree_x().unwrap_or(0) > 0 {
                    return Err(Error::invalid("a special point is a polynomial in y over k"));
                }
                PlaceSpec::special_point(&k, b.at_x_zero(&k))?
            }
            PlaceJson::Blowup { steps } => PlaceSpec::Blowup(BlowupChain::new(steps.clone())),
            PlaceJson::GenericPoint { poly, .. } => {
                let p = DistinguishedPoly::new(r, r.parse_poly(poly)?)?;
                PlaceSpec::generic_point(r, p)?
            }
        })
    }
}

/// The two residue forms of a place and, at the Gauss and infinite places,
/// the constant forms `mu_1, ..., mu_4` with
/// `q = mu_1 + y mu_2 + x (mu_3 + y mu_4)` up to squares.
#[derive(Clone, Debug)]
pub struct ResidueData {
    pub first: DiagonalForm,
    pub second: DiagonalForm,
    pub residue_field: String,
    pub mu: Option<[Vec<Fe>; 4]>,
}

fn mu_forms(cs: &[Coefficient]) -> [Vec<Fe>; 4] {
    let mut mu: [Vec<Fe>; 4] = Default::default();
    for c in cs {
        let slot = 2 * c.n as usize + c.m() % 2;
        mu[slot].push(c.lambda.clone());
    }
    mu
}

/// Polynomial over `k` in `(x, y)` for `p`, with the `x`-precision when the
/// coefficients are truncated series.
pub fn to_bipoly(r: &Dvr, p: &APoly) -> (BiPoly, Option<usize>) {
    let k = r.residue_field();
    let mut terms = Vec::new();
    let mut known: Option<usize> = None;
    for (j, c) in p.iter().enumerate() {
        let Elem::Ser(s) = c else { continue };
        if let Some(end) = s.abs_end() {
            let end = end.max(0) as usize;
            known = Some(known.map_or(end, |k: usize| k.min(end)));
        }
        if s.is_zero_like() {
            continue;
        }
        for (i, a) in s.unit_part().iter().enumerate() {
            if let Elem::Fin(a) = a {
                terms.push(((s.valuation() as usize + i, j), a.clone()));
            }
        }
    }
    (BiPoly::from_terms(terms, &k), known)
}

fn form(tower: Tower, entries: Vec<Elem>) -> Result<DiagonalForm> {
    DiagonalForm::new(tower, entries)
}

/// Residue forms at `place` (the second one after dividing by a uniformizer).
pub fn residue_data(q: &NormalizedForm, place: &PlaceSpec) -> Result<ResidueData> {
    let r = &q.ring;
    let cs = coefficients(q)?;
    let k = r.residue_field();
    match place {
        PlaceSpec::Gauss => {
            let t = Tower::ratfun(k.clone(), "y");
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for c in &cs {
                let e = Elem::Rat(RatFn::from_poly(Poly::monomial(&k, c.lambda.clone(), c.m()), &k));
                if c.n == 0 { a.push(e) } else { b.push(e) }
            }
            Ok(ResidueData {
                first: form(t.clone(), a)?,
                second: form(t.clone(), b)?,
                residue_field: t.name(),
                mu: Some(mu_forms(&cs)),
            })
        }
        PlaceSpec::Infinity => {
            // b_i = lambda_i x^n_i y^m_i, uniformizer 1/y
            let t = Tower::laurent(Tower::Finite(k.clone()), &r.field().var().unwrap(), r.precision());
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for c in &cs {
                let e = Elem::Ser(Series::monomial(Elem::Fin(c.lambda.clone()), c.n as i64));
                if c.m() % 2 == 0 { a.push(e) } else { b.push(e) }
            }
            Ok(ResidueData {
                first: form(t.clone(), a)?,
                second: form(t.clone(), b)?,
                residue_field: t.name(),
                mu: Some(mu_forms(&cs)),
            })
        }
        PlaceSpec::SpecialPoint { poly } => {
            let ext = ResidueExtension::new(&k, poly)?;
            let big = ext.field().clone();
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for c in &cs {
                // P_j = y^m_j mod x, y is a unit at the point
                let val = big.mul(&ext.embedding.apply(&c.lambda), &big.pow_u128(&ext.root, c.m() as u128));
                let e = Elem::Fin(val);
                if c.n == 0 { a.push(e) } else { b.push(e) }
            }
            let t = Tower::Finite(big.clone());
            Ok(ResidueData { first: form(t.clone(), a)?, second: form(t, b)?, residue_field: big.name(), mu: None })
        }
        PlaceSpec::Blowup(chain) => {
            let rc = chain.resolve(&k, DEFAULT_DEGREE_CAP)?;
            blowup_residues(r, &cs, &rc)
        }
        PlaceSpec::GenericPoint { poly, .. } => {
            let gr = GenericResidue::new(r, poly)?;
            let t = gr.tower();
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for c in &cs {
                let (mut w, mut rho) = gr.of_constant(r, &r.sigma(&c.lambda))?;
                let mut vf = 0;
                let mut parts = Vec::new();
                if c.n == 1 {
                    parts.push(gr.of_x()?);
                }
                for p in &c.factors {
                    if r.poly_eq(p.coeffs(), poly.coeffs()) {
                        vf += 1;
                    } else {
                        parts.push(gr.of_poly(r, p.coeffs())?);
                    }
                }
                for (pw, pr) in parts {
                    w += pw;
                    rho = gr.field.mul(&rho, &pr);
                }
                let e = Elem::Ser(Series::monomial(Elem::Fin(rho), w));
                if vf % 2 == 0 { a.push(e) } else { b.push(e) }
            }
            Ok(ResidueData {
                first: form(t.clone(), a)?,
                second: form(t, b)?,
                residue_field: gr.descriptor(r),
                mu: None,
            })
        }
    }
}

fn blowup_residues(r: &Dvr, cs: &[Coefficient], rc: &ResolvedChain) -> Result<ResidueData> {
    let big = rc.field.clone();
    let xv = rc.value(&BiPoly::x(&r.residue_field()), None)?;
    let t = Tower::ratfun(big.clone(), "t");
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for c in cs {
        let mut v = 0i64;
        let mut res = Poly::constant(rc.embedding.apply(&c.lambda));
        if c.n == 1 {
            v += xv.value;
            res = res.mul(&xv.residue, &big);
        }
        for p in &c.factors {
            let (bp, known) = to_bipoly(r, p.coeffs());
            let pv = rc.value(&bp, known)?;
            v += pv.value;
            res = res.mul(&pv.residue, &big);
        }
        let e = Elem::Rat(RatFn::from_poly(res, &big));
        if v % 2 == 0 { a.push(e) } else { b.push(e) }
    }
    Ok(ResidueData {
        first: form(t.clone(), a)?,
        second: form(t.clone(), b)?,
        residue_field: t.name(),
        mu: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalCertificate {
    pub place: PlaceJson,
    pub residue_field: String,
    pub isotropic: bool,
    pub first: Certificate,
    pub second: Certificate,
}

#[derive(Clone, Debug)]
pub struct LocalDecision {
    pub isotropic: bool,
    pub certificate: LocalCertificate,
    pub residues: ResidueData,
}

/// Decision over a residue field; rank 0 is anisotropic.
fn decide_residue(q: &DiagonalForm) -> Result<Decision> {
    match &q.tower {
        Tower::RatFun { .. } => decide_ratfun_verdict(q),
        _ => decide_isotropy(q),
    }
}

/// Isotropy over the completion at `place`: isotropic iff one of the two
/// residue forms is.
pub fn decide_local(q: &NormalizedForm, place: &PlaceSpec) -> Result<LocalDecision> {
    let rd = residue_data(q, place)?;
    let d1 = decide_residue(&rd.first)?;
    let d2 = decide_residue(&rd.second)?;
    let isotropic = d1.isotropic || d2.isotropic;
    assert_eq!(isotropic, d1.certificate.is_isotropic() || d2.certificate.is_isotropic());
    Ok(LocalDecision {
        isotropic,
        certificate: LocalCertificate {
            place: place.to_json(&q.ring),
            residue_field: rd.residue_field.clone(),
            isotropic,
            first: d1.certificate,
            second: d2.certificate,
        },
        residues: rd,
    })
}

/// A place of `L = Frac(A[[y]])` extending a place of `F`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtendedPlace {
    pub place: PlaceJson,
    pub ring: String,
    /// Residue field of the place of `F`.
    pub restriction: String,
    /// Residue field of the extension to `L`.
    pub completion: String,
}

/// The place of `L` with the same residue field, where one is canonical.
pub fn place_correspondence(r: &Dvr, place: &PlaceSpec) -> Result<ExtendedPlace> {
    let k = r.residue_field();
    let ring = format!("{}[[y]]", r.name());
    let (restriction, completion) = match place {
        PlaceSpec::Gauss => (format!("{}(y)", k.name()), format!("{}((y))", k.name())),
        PlaceSpec::Blowup(chain) => {
            let rc = chain.resolve(&k, DEFAULT_DEGREE_CAP)?;
            let t = format!("{}(t)", rc.field.name());
            (t.clone(), t)
        }
        PlaceSpec::GenericPoint { poly, .. } => {
            let d = format!("Frac({}[y]/({}))", r.name(), poly.format(r));
            (d.clone(), d)
        }
        PlaceSpec::SpecialPoint { .. } | PlaceSpec::Infinity => {
            return Err(Error::NoCanonicalExtension(place.label(r)));
        }
    };
    Ok(ExtendedPlace { place: place.to_json(r), ring, restriction, completion })
}
