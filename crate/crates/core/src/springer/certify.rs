use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::fields::{Elem, Tower};
use crate::springer::DiagonalForm;

/// Known relative precision of `a` through all levels; `None` when exact.
fn known_precision(t: &Tower, a: &Elem) -> Option<usize> {
    match (t, a) {
        (Tower::Laurent { base, .. }, Elem::Ser(s)) => {
            let inner = s.unit_part().iter().filter_map(|c| known_precision(base, c)).min();
            match (s.precision(), inner) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            }
        }
        (_, Elem::Pad(x)) => x.precision(),
        _ => None,
    }
}

/// Checks `q(v) = 0`.
///
/// Coordinates are evaluated exactly after dropping their precision records.
/// A nonzero value is accepted when some coordinate `j` has
/// `val(q(v)) > val(a_j v_j^2)` in the lexicographic valuation through the
/// tower: then `v_j` can be corrected by the square root of a one-unit,
/// which exists since the residue characteristic is odd and every level is
/// complete. Inexact coordinates need at least `n` known digits.
pub fn certify_witness(q: &DiagonalForm, v: &[Elem], n: usize) -> Result<bool> {
    let t = &q.tower;
    if v.len() != q.rank() {
        return Err(Error::invalid("vector length differs from rank"));
    }
    let exact: Vec<Elem> = v.iter().map(|x| t.exact_truncation(x)).collect();
    let mut nonzero = Vec::new();
    for (j, x) in exact.iter().enumerate() {
        if !t.is_zero(x)? {
            nonzero.push(j);
        }
    }
    if nonzero.is_empty() {
        return Err(Error::invalid("zero vector"));
    }
    let inexact = v.iter().filter_map(|x| known_precision(t, x)).min();
    if let Some(k) = inexact {
        if k < n {
            return Err(Error::PrecisionTooLowToCertify);
        }
    }
    let r = q.evaluate(&exact)?;
    if t.is_zero(&r)? {
        return Ok(true);
    }
    if !t.is_cdvf() {
        return Ok(false);
    }
    let vr = t.lex_valuation(&r)?;
    for &j in &nonzero {
        let term = t.mul(&q.entries[j], &t.mul(&exact[j], &exact[j])?)?;
        if vr.cmp(&t.lex_valuation(&term)?) == Ordering::Greater {
            return Ok(true);
        }
    }
    if inexact.is_some() {
        return Err(Error::PrecisionTooLowToCertify);
    }
    Ok(false)
}
