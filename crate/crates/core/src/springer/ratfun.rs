use std::sync::Arc;

use crate::error::Result;
use crate::fields::{Elem, Fe, FiniteField, Poly, RatFn, ResidueExtension, Series, Tower};
use crate::springer::{decide, isotropic, pair_witness, Certificate, Decision, DiagonalForm};

/// Candidate budget for explicit witness search over `F_q(t)`.
const SEARCH_BUDGET: u128 = 4000;

/// A place of `F_q(t)`: a monic irreducible, or `None` for the degree place.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RatPlace(pub Option<Poly>);

impl RatPlace {
    fn name(&self, f: &FiniteField, var: &str) -> String {
        match &self.0 {
            Some(p) => p.format(f, var),
            None => "inf".into(),
        }
    }
}

fn parts(q: &DiagonalForm) -> (Arc<FiniteField>, String, Vec<RatFn>) {
    let Tower::RatFun { base, var } = &q.tower else { unreachable!() };
    let entries = q
        .entries
        .iter()
        .map(|e| match e {
            Elem::Rat(r) => r.clone(),
            _ => unreachable!(),
        })
        .collect();
    (base.clone(), var.clone(), entries)
}

/// Places where some entry is not a unit, then the degree place.
pub(crate) fn bad_places(f: &FiniteField, entries: &[RatFn]) -> Result<Vec<RatPlace>> {
    let mut polys: Vec<Poly> = Vec::new();
    for e in entries {
        for p in [e.num(), e.den()] {
            if p.degree().unwrap_or(0) == 0 {
                continue;
            }
            for (irr, _) in p.factor(f)?.factors {
                if !polys.contains(&irr) {
                    polys.push(irr);
                }
            }
        }
    }
    polys.sort_by(|a, b| a.canonical_cmp(b, f));
    let mut out: Vec<RatPlace> = polys.into_iter().map(|p| RatPlace(Some(p))).collect();
    out.push(RatPlace(None));
    Ok(out)
}

/// The form over the completion at `place`, as monomials `s^v * residue`
/// over `F_{q^d}((s))`; isometric up to squares to the completed form.
pub(crate) fn local_form(f: &Arc<FiniteField>, entries: &[RatFn], place: &RatPlace) -> Result<DiagonalForm> {
    let (field, data): (Arc<FiniteField>, Vec<(i64, Fe)>) = match &place.0 {
        Some(pi) => {
            let ext = ResidueExtension::new(f, pi)?;
            let big = ext.field().clone();
            let mut data = Vec::new();
            for e in entries {
                let (v, n, d) = e.unit_at(pi, f)?;
                data.push((v, big.div(&ext.reduce(&n), &ext.reduce(&d))?));
            }
            (big, data)
        }
        None => {
            let mut data = Vec::new();
            for e in entries {
                let v = e.valuation_at_infinity()?;
                data.push((v, f.div(e.num().lead().unwrap(), e.den().lead().unwrap())?));
            }
            (f.clone(), data)
        }
    };
    let level = Tower::laurent(Tower::Finite(field), "s", 1);
    let entries = data.into_iter().map(|(v, c)| Elem::Ser(Series::monomial(Elem::Fin(c), v))).collect();
    Ok(DiagonalForm { tower: level, entries })
}

/// Isotropy over `F_q(t)`: Hasse-Minkowski over the places dividing the
/// entries and the degree place for rank at most 4, the rank bound above.
pub fn decide_ratfun(q: &DiagonalForm) -> Result<Decision> {
    decide_ratfun_with(q, true)
}

/// As `decide_ratfun`, without the explicit witness search for isotropic
/// forms; the certificate is then the place scan or the rank bound.
pub fn decide_ratfun_verdict(q: &DiagonalForm) -> Result<Decision> {
    decide_ratfun_with(q, false)
}

fn decide_ratfun_with(q: &DiagonalForm, with_search: bool) -> Result<Decision> {
    let (f, var, entries) = parts(q);
    let t = &q.tower;
    if q.rank() == 0 {
        return Ok(Decision {
            isotropic: false,
            certificate: Certificate::Leaf { field: t.name(), entries: vec![], reason: "empty form".into() },
            witness: None,
        });
    }
    if q.rank() == 1 {
        return Ok(Decision {
            isotropic: false,
            certificate: Certificate::Leaf { field: t.name(), entries: q.format_entries(), reason: "rank 1".into() },
            witness: None,
        });
    }
    if q.rank() <= 4 {
        let places = bad_places(&f, &entries)?;
        for place in &places {
            let local = local_form(&f, &entries, place)?;
            let d = decide(&local, &mut None)?;
            if !d.isotropic {
                return Ok(Decision {
                    isotropic: false,
                    certificate: Certificate::LocalObstruction {
                        field: t.name(),
                        place: place.name(&f, &var),
                        local: Box::new(d.certificate),
                    },
                    witness: None,
                });
            }
        }
        if with_search {
            if let Some(w) = search(q, &f, &entries)? {
                return Ok(isotropic(q, w));
            }
        }
        return Ok(Decision {
            isotropic: true,
            certificate: Certificate::LocallyIsotropic {
                field: t.name(),
                places: places.iter().map(|p| p.name(&f, &var)).collect(),
            },
            witness: None,
        });
    }
    if with_search {
        if let Some(w) = search(q, &f, &entries)? {
            return Ok(isotropic(q, w));
        }
    }
    let reason = if with_search {
        format!("rank {} exceeds 4; search budget {SEARCH_BUDGET} exhausted", q.rank())
    } else {
        format!("rank {} exceeds 4", q.rank())
    };
    Ok(Decision {
        isotropic: true,
        certificate: Certificate::WitnessPending { field: t.name(), reason },
        witness: None,
    })
}

/// Enumerates polynomial coordinates for all but the last entry with
/// escalating degree, solving the last coordinate by a square root.
fn search(q: &DiagonalForm, f: &Arc<FiniteField>, entries: &[RatFn]) -> Result<Option<Vec<Elem>>> {
    if let Some(w) = pair_witness(q)? {
        return Ok(Some(w));
    }
    let r = entries.len();
    let order = f.order();
    // a_i = n_i/d_i; with x_i = y_i/d_i the form becomes <n_i d_i>
    let b: Vec<Poly> = entries.iter().map(|e| e.num().mul(e.den(), f)).collect();
    let mut degree = 0usize;
    loop {
        let per_coord = order.checked_pow(degree as u32 + 1);
        let total = per_coord.and_then(|c| c.checked_pow(r as u32 - 1));
        let Some(total) = total.filter(|&t| t <= SEARCH_BUDGET) else { break };
        let pc = per_coord.unwrap();
        for idx in 1..total {
            let mut rest = idx;
            let mut ys = Vec::with_capacity(r);
            let mut sum = Poly::zero();
            for bi in &b[..r - 1] {
                let y = poly_from_index(f, rest % pc, degree + 1);
                rest /= pc;
                sum = sum.add(&bi.mul(&y.mul(&y, f), f), f);
                ys.push(y);
            }
            let target = if sum.is_zero() {
                None
            } else {
                Some(RatFn::new(sum.neg(f), b[r - 1].clone(), f)?)
            };
            let yr = match target {
                None => RatFn::zero(f),
                Some(s) => {
                    if !quick_square(&s, f) || !s.is_square(f)? {
                        continue;
                    }
                    s.sqrt(f)?
                }
            };
            let mut w: Vec<Elem> = Vec::with_capacity(r);
            for (y, e) in ys.into_iter().zip(entries) {
                w.push(Elem::Rat(RatFn::new(y, e.den().clone(), f)?));
            }
            w.push(Elem::Rat(yr.mul(&RatFn::new(Poly::one(f), entries[r - 1].den().clone(), f)?, f)?));
            if q.evaluate(&w).ok().is_some_and(|v| q.tower.is_zero(&v) == Ok(true)) {
                return Ok(Some(w));
            }
        }
        degree += 1;
    }
    Ok(None)
}

fn poly_from_index(f: &FiniteField, mut idx: u128, len: usize) -> Poly {
    let q = f.order();
    let mut c = Vec::with_capacity(len);
    for _ in 0..len {
        c.push(f.element(idx % q));
        idx /= q;
    }
    Poly::new(c)
}

/// Necessary conditions: even total degree and square leading coefficient.
fn quick_square(s: &RatFn, f: &FiniteField) -> bool {
    let (Some(dn), Some(dd)) = (s.num().degree(), s.den().degree()) else { return true };
    (dn + dd) % 2 == 0 && f.is_square(s.num().lead().unwrap()).unwrap_or(false)
}
