//! Truncated Laurent series over a tower level.
//!
//! A nonzero series is `t^valuation * (u_0 + u_1 t + ...)` with `u_0 != 0`.
//! `precision` is the number of known unit coefficients, `None` meaning the
//! element is an exact Laurent polynomial. Loss rules:
//!
//! * `mul`: relative precision is the minimum of the operands'.
//! * `add`: absolute precision is the minimum of the operands'; cancellation of
//!   leading terms shrinks the relative precision accordingly.
//! * `inv`: keeps relative precision; an exact non-monomial is expanded to the
//!   working precision of the level.
//! * `sqrt`: keeps relative precision (capped at the requested `N`).
//!
//! A sum whose known coefficients all vanish is an inexact zero `O(t^k)`,
//! never silently promoted to exact zero.

use crate::error::{Error, Result};
use crate::fields::tower::{Elem, Tower};

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub(crate) valuation: i64,
    pub(crate) unit: Vec<Elem>,
    pub(crate) precision: Option<usize>,
}

/// Coefficients from `start` upward; known up to `end` (exclusive) or exact.
struct Raw {
    start: i64,
    coeffs: Vec<Elem>,
    end: Option<i64>,
}

impl Series {
    pub fn zero() -> Self {
        Series { valuation: 0, unit: Vec::new(), precision: None }
    }

    /// `O(t^k)`.
    pub fn inexact_zero(k: i64) -> Self {
        Series { valuation: k, unit: Vec::new(), precision: Some(0) }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.unit.is_empty() && self.precision.is_none()
    }

    pub fn is_zero_like(&self) -> bool {
        self.unit.is_empty()
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn unit_part(&self) -> &[Elem] {
        &self.unit
    }

    pub fn precision(&self) -> Option<usize> {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_none()
    }

    /// Absolute precision (exponent of the first unknown coefficient).
    pub fn abs_end(&self) -> Option<i64> {
        self.precision.map(|p| self.valuation + p as i64)
    }

    pub(crate) fn monomial(coeff: Elem, exp: i64) -> Self {
        Series { valuation: exp, unit: vec![coeff], precision: None }
    }

    /// Builds from coefficients of `t^start, t^(start+1), ...`; `known` is the
    /// number of known coefficients (`None` = exact).
    pub fn from_coeffs(base: &Tower, start: i64, coeffs: Vec<Elem>, known: Option<usize>) -> Result<Self> {
        let end = known.map(|k| start + k as i64);
        let mut coeffs = coeffs;
        if let Some(k) = known {
            coeffs.truncate(k);
        }
        normalize(base, Raw { start, coeffs, end })
    }

    /// Same element with precision discarded: the known coefficients taken as exact.
    pub fn truncated_exact(&self, base: &Tower) -> Self {
        let unit: Vec<Elem> = self.unit.iter().map(|c| base.exact_truncation(c)).collect();
        let mut s = Series { valuation: self.valuation, unit, precision: None };
        trim_trailing(base, &mut s.unit);
        if s.unit.is_empty() {
            Series::zero()
        } else {
            s
        }
    }

    fn raw(&self) -> Raw {
        Raw { start: self.valuation, coeffs: self.unit.clone(), end: self.abs_end() }
    }

    pub fn neg(&self, base: &Tower) -> Result<Self> {
        Ok(Series {
            valuation: self.valuation,
            unit: self.unit.iter().map(|c| base.neg(c)).collect::<Result<_>>()?,
            precision: self.precision,
        })
    }

    pub fn add(&self, o: &Series, base: &Tower) -> Result<Self> {
        if self.is_exact_zero() {
            return Ok(o.clone());
        }
        if o.is_exact_zero() {
            return Ok(self.clone());
        }
        let a = self.raw();
        let b = o.raw();
        let start = a.start.min(b.start);
        let end = match (a.end, b.end) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        };
        let top = end.unwrap_or_else(|| {
            (a.start + a.coeffs.len() as i64).max(b.start + b.coeffs.len() as i64)
        });
        if top <= start {
            return Ok(Series::inexact_zero(top));
        }
        let mut coeffs = Vec::with_capacity((top - start) as usize);
        for e in start..top {
            let ca = coeff_at(&a, e, base);
            let cb = coeff_at(&b, e, base);
            coeffs.push(base.add(&ca, &cb)?);
        }
        normalize(base, Raw { start, coeffs, end })
    }

    pub fn sub(&self, o: &Series, base: &Tower) -> Result<Self> {
        self.add(&o.neg(base)?, base)
    }

    pub fn mul(&self, o: &Series, base: &Tower) -> Result<Self> {
        if self.is_exact_zero() || o.is_exact_zero() {
            return Ok(Series::zero());
        }
        if self.is_zero_like() || o.is_zero_like() {
            return Ok(Series::inexact_zero(self.valuation + o.valuation));
        }
        let prec = match (self.precision, o.precision) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        };
        let len = prec.unwrap_or(self.unit.len() + o.unit.len() - 1);
        let mut coeffs = vec![base.zero(); len];
        for (i, a) in self.unit.iter().enumerate().take(len) {
            if base.is_zero(a).unwrap_or(false) {
                continue;
            }
            for (j, b) in o.unit.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                let t = base.mul(a, b)?;
                coeffs[i + j] = base.add(&coeffs[i + j], &t)?;
            }
        }
        normalize(base, Raw { start: self.valuation + o.valuation, end: prec.map(|p| self.valuation + o.valuation + p as i64), coeffs })
    }

    /// Inverse; exact non-monomials are expanded to `working` coefficients.
    pub fn inv(&self, base: &Tower, working: usize) -> Result<Self> {
        if self.is_zero_like() {
            return Err(if self.is_exact() {
                Error::ZeroInput
            } else {
                Error::precision("inverse of O(t^k)")
            });
        }
        let u0_inv = base.inv(&self.unit[0])?;
        if self.is_exact() && self.unit.len() == 1 {
            return Ok(Series { valuation: -self.valuation, unit: vec![u0_inv], precision: None });
        }
        let n = self.precision.unwrap_or(working).max(1);
        let mut w: Vec<Elem> = Vec::with_capacity(n);
        w.push(u0_inv.clone());
        for k in 1..n {
            let mut acc = base.zero();
            for j in 1..=k {
                if let Some(u) = self.unit.get(j) {
                    acc = base.add(&acc, &base.mul(u, &w[k - j])?)?;
                }
            }
            w.push(base.neg(&base.mul(&acc, &u0_inv)?)?);
        }
        Ok(Series { valuation: -self.valuation, unit: w, precision: Some(n) })
    }

    pub fn shift(&self, k: i64) -> Self {
        let mut s = self.clone();
        s.valuation += k;
        s
    }

    /// Newton/Hensel square root to `n` unit coefficients.
    ///
    /// Requires even valuation and a square leading coefficient. An exact input
    /// whose root terminates returns an exact root.
    pub fn sqrt(&self, base: &Tower, n: usize) -> Result<Self> {
        if self.is_exact_zero() {
            return Ok(Series::zero());
        }
        if self.is_zero_like() {
            return Err(Error::precision("square root of O(t^k)"));
        }
        if self.valuation.rem_euclid(2) != 0 {
            return Err(Error::NotASquare);
        }
        if !base.is_square(&self.unit[0])? {
            return Err(Error::NotASquare);
        }
        let n = self.precision.map_or(n, |p| p.min(n)).max(1);
        let g0 = base.sqrt(&self.unit[0])?;
        let two_g0_inv = base.inv(&base.mul(&base.from_int(2), &g0)?)?;
        let mut g: Vec<Elem> = vec![g0];
        for k in 1..n {
            let mut acc = self.unit.get(k).cloned().unwrap_or_else(|| base.zero());
            for j in 1..k {
                acc = base.sub(&acc, &base.mul(&g[j], &g[k - j])?)?;
            }
            g.push(base.mul(&acc, &two_g0_inv)?);
        }
        let approx = Series { valuation: self.valuation / 2, unit: g, precision: Some(n) };
        if self.is_exact() {
            let exact = approx.truncated_exact(base);
            if exact.mul(&exact, base)? == *self {
                return Ok(exact);
            }
        }
        Ok(approx)
    }
}

fn coeff_at(r: &Raw, e: i64, base: &Tower) -> Elem {
    let idx = e - r.start;
    if idx < 0 {
        return base.zero();
    }
    r.coeffs.get(idx as usize).cloned().unwrap_or_else(|| base.zero())
}

fn trim_trailing(base: &Tower, coeffs: &mut Vec<Elem>) {
    while coeffs.last().is_some_and(|c| base.is_zero(c) == Ok(true)) {
        coeffs.pop();
    }
}

fn normalize(base: &Tower, raw: Raw) -> Result<Series> {
    let Raw { start, mut coeffs, end } = raw;
    let mut lead = 0;
    while lead < coeffs.len() {
        match base.is_zero(&coeffs[lead]) {
            Ok(true) => lead += 1,
            Ok(false) => break,
            Err(_) => {
                return Err(Error::precision("leading coefficient is an inexact zero"));
            }
        }
    }
    let valuation = start + lead as i64;
    coeffs.drain(..lead);
    if coeffs.is_empty() {
        return Ok(match end {
            None => Series::zero(),
            Some(e) => Series::inexact_zero(e.max(valuation)),
        });
    }
    let precision = end.map(|e| (e - valuation) as usize);
    if precision.is_none() {
        trim_trailing(base, &mut coeffs);
    }
    Ok(Series { valuation, unit: coeffs, precision })
}
