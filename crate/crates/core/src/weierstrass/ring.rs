use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::expr::{Eval, Expr};
use crate::fields::{Elem, Fe, FiniteField, Tower};

/// A polynomial in `y` over the ring, lowest degree first.
pub type APoly = Vec<Elem>;

/// The complete discrete valuation ring `k[[x]]` or `Z_p`, computed modulo
/// `pi^N`. Elements live in the fraction field level of the tower.
#[derive(Clone, Debug, PartialEq)]
pub struct Dvr {
    field: Tower,
    n: usize,
}

impl Dvr {
    pub fn power_series(k: Arc<FiniteField>, var: &str, n: usize) -> Self {
        Dvr { field: Tower::laurent(Tower::Finite(k), var, n), n }
    }

    pub fn padic_integers(p: u64, n: usize) -> Result<Self> {
        Ok(Dvr { field: Tower::padic(p, n)?, n })
    }

    /// `F9[[x]]` or `Z3`.
    pub fn parse(src: &str, n: usize) -> Result<Self> {
        let s = src.trim();
        if let Some(rest) = s.strip_prefix('Z') {
            let p: u64 = rest.parse().map_err(|_| Error::UnsupportedField(s.into()))?;
            return Dvr::padic_integers(p, n);
        }
        if let Some(open) = s.find("[[") {
            let inner = s[open + 2..].strip_suffix("]]").ok_or_else(|| Error::UnsupportedField(s.into()))?;
            let Tower::Finite(k) = Tower::parse_descriptor(&s[..open], n)? else {
                return Err(Error::UnsupportedField(s.into()));
            };
            if inner.is_empty() || !inner.chars().all(|c| c.is_ascii_alphabetic()) || inner == "y" {
                return Err(Error::UnsupportedField(s.into()));
            }
            return Ok(Dvr::power_series(k, inner, n));
        }
        Err(Error::UnsupportedField(s.into()))
    }

    pub fn name(&self) -> String {
        match &self.field {
            Tower::PAdic { p, .. } => format!("Z{p}"),
            Tower::Laurent { base, var, .. } => format!("{}[[{var}]]", base.name()),
            _ => unreachable!(),
        }
    }

    pub fn precision(&self) -> usize {
        self.n
    }

    pub fn with_precision(&self, n: usize) -> Self {
        Dvr { field: self.field.with_precision(n), n }
    }

    /// The fraction field as a tower level.
    pub fn field(&self) -> &Tower {
        &self.field
    }

    pub fn residue_field(&self) -> Arc<FiniteField> {
        self.field.bottom().expect("tower has a finite bottom")
    }

    pub fn is_padic(&self) -> bool {
        matches!(self.field, Tower::PAdic { .. })
    }

    pub fn zero(&self) -> Elem {
        self.field.zero()
    }

    pub fn one(&self) -> Elem {
        self.field.one()
    }

    pub fn from_int(&self, k: i64) -> Elem {
        self.field.from_int(k)
    }

    pub fn uniformizer(&self) -> Elem {
        self.field.uniformizer().expect("complete level")
    }

    /// Lower bound for the valuation; `None` for exact zero.
    pub fn val(&self, a: &Elem) -> Option<i64> {
        self.field.valuation_bound(a)
    }

    /// True when `a` is zero modulo `pi^N`.
    pub fn is_negligible(&self, a: &Elem) -> bool {
        self.val(a).map_or(true, |v| v >= self.n as i64)
    }

    /// Nonzero modulo `pi` with a known leading digit.
    pub fn is_unit(&self, a: &Elem) -> bool {
        self.val(a) == Some(0) && self.field.is_zero(a) == Ok(false)
    }

    /// `a mod pi^N`; negligible elements become exact zero.
    pub fn reduce(&self, a: &Elem) -> Elem {
        if self.is_negligible(a) {
            return self.zero();
        }
        self.field.truncate_abs(a, self.n as i64)
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.reduce(&self.field.add(a, b)?))
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.reduce(&self.field.sub(a, b)?))
    }

    pub fn neg(&self, a: &Elem) -> Result<Elem> {
        self.field.neg(a)
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.reduce(&self.field.mul(a, b)?))
    }

    pub fn inv_unit(&self, a: &Elem) -> Result<Elem> {
        if !self.is_unit(a) {
            return Err(Error::NotAUnit);
        }
        Ok(self.reduce(&self.field.inv(a)?))
    }

    /// Exact division by `pi^k`.
    pub fn shift_down(&self, a: &Elem, k: i64) -> Result<Elem> {
        let m = self.field.monomial(&self.field.residue_field()?.one(), -k)?;
        self.field.mul(a, &m)
    }

    /// Reduction modulo `pi`; zero for elements of positive valuation.
    pub fn residue(&self, a: &Elem) -> Result<Fe> {
        let k = self.residue_field();
        match self.val(a) {
            Some(v) if v < 0 => Err(Error::invalid("element is not integral")),
            Some(0) if self.field.is_zero(a) == Ok(false) => {
                let (_, r) = self.field.leading(a)?;
                match r {
                    Elem::Fin(c) => Ok(c),
                    _ => unreachable!(),
                }
            }
            Some(0) => Err(Error::precision("residue of an unknown digit")),
            _ => Ok(k.zero()),
        }
    }

    /// The representative of a residue in the fixed digit set.
    pub fn sigma(&self, c: &Fe) -> Elem {
        self.field.lift_from_bottom(c).expect("finite bottom")
    }

    pub fn sqrt(&self, a: &Elem) -> Result<Elem> {
        Ok(self.reduce(&self.field.sqrt(a)?))
    }

    pub fn format(&self, a: &Elem) -> String {
        let e = self.field.exact_truncation(a);
        let s = self.field.format(&e);
        if s.contains(' ') {
            format!("({s})")
        } else {
            s
        }
    }

    pub fn elem_eq(&self, a: &Elem, b: &Elem) -> bool {
        self.field.sub(a, b).map(|d| self.is_negligible(&d)).unwrap_or(false)
    }

    // ---- polynomials in y ----

    pub fn poly_trim(&self, mut f: APoly) -> APoly {
        while f.last().is_some_and(|c| self.val(c).is_none()) {
            f.pop();
        }
        f
    }

    pub fn poly_reduce(&self, f: &APoly) -> APoly {
        let out: APoly = f.iter().map(|c| self.reduce(c)).collect();
        self.poly_trim(out)
    }

    pub fn poly_add(&self, a: &APoly, b: &APoly) -> Result<APoly> {
        let len = a.len().max(b.len());
        let z = self.zero();
        let mut out = Vec::with_capacity(len);
        for i in 0..len {
            out.push(self.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))?);
        }
        Ok(self.poly_trim(out))
    }

    pub fn poly_neg(&self, a: &APoly) -> Result<APoly> {
        a.iter().map(|c| self.neg(c)).collect()
    }

    pub fn poly_sub(&self, a: &APoly, b: &APoly) -> Result<APoly> {
        self.poly_add(a, &self.poly_neg(b)?)
    }

    pub fn poly_scale(&self, a: &APoly, c: &Elem) -> Result<APoly> {
        let out = a.iter().map(|x| self.mul(x, c)).collect::<Result<Vec<_>>>()?;
        Ok(self.poly_trim(out))
    }

    pub fn poly_mul(&self, a: &APoly, b: &APoly) -> Result<APoly> {
        self.poly_mul_trunc(a, b, usize::MAX)
    }

    /// Product with `y`-degrees below `len` only.
    pub fn poly_mul_trunc(&self, a: &APoly, b: &APoly, len: usize) -> Result<APoly> {
        if a.is_empty() || b.is_empty() {
            return Ok(vec![]);
        }
        let full = (a.len() + b.len() - 1).min(len);
        let mut out = vec![self.zero(); full];
        for (i, x) in a.iter().enumerate() {
            if self.val(x).is_none() || i >= full {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if i + j >= full {
                    break;
                }
                if self.val(y).is_none() {
                    continue;
                }
                let t = self.field.mul(x, y)?;
                out[i + j] = self.field.add(&out[i + j], &t)?;
            }
        }
        Ok(self.poly_reduce(&out))
    }

    pub fn poly_pow(&self, a: &APoly, e: u32) -> Result<APoly> {
        let mut r = vec![self.one()];
        for _ in 0..e {
            r = self.poly_mul(&r, a)?;
        }
        Ok(r)
    }

    /// Division by a monic polynomial, modulo `pi^N`.
    pub fn poly_divrem_monic(&self, g: &APoly, p: &APoly) -> Result<(APoly, APoly)> {
        let m = p.len() - 1;
        let mut r = self.poly_reduce(g);
        if r.len() <= m {
            return Ok((vec![], r));
        }
        let mut q = vec![self.zero(); r.len() - m];
        for k in (m..r.len()).rev() {
            let c = r[k].clone();
            if self.val(&c).is_none() {
                continue;
            }
            q[k - m] = c.clone();
            for (j, pj) in p.iter().enumerate() {
                let t = self.field.mul(&c, pj)?;
                r[k - m + j] = self.sub(&r[k - m + j], &t)?;
            }
        }
        r.truncate(m);
        Ok((self.poly_trim(q), self.poly_trim(self.poly_reduce(&r))))
    }

    /// Agreement modulo `pi^N` coefficientwise.
    pub fn poly_eq(&self, a: &APoly, b: &APoly) -> bool {
        match self.poly_sub(a, b) {
            Ok(d) => d.iter().all(|c| self.is_negligible(c)),
            Err(_) => false,
        }
    }

    pub fn poly_is_integral(&self, a: &APoly) -> bool {
        a.iter().all(|c| self.val(c).map_or(true, |v| v >= 0))
    }

    /// Parses a polynomial in `y` (and the series variable for `k[[x]]`).
    pub fn parse_poly(&self, src: &str) -> Result<APoly> {
        let mut vars: Vec<String> = Vec::new();
        if let Tower::Laurent { var, .. } = &self.field {
            vars.push(var.clone());
        }
        vars.push("y".into());
        let names: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        let expr = Expr::parse(src, &names)?;
        let f = expr.eval(&PolyEval { r: self, y_index: names.len() - 1 })?;
        if !self.poly_is_integral(&f) {
            return Err(Error::invalid(format!("{src}: coefficients must be integral")));
        }
        Ok(self.poly_reduce(&f))
    }

    pub fn format_poly(&self, f: &APoly) -> String {
        let mut terms = Vec::new();
        for (j, c) in f.iter().enumerate().rev() {
            if self.val(c).is_none() || self.field.is_zero(c).unwrap_or(true) {
                continue;
            }
            let is_one = self.field.exact_truncation(c) == self.one();
            let ymon = match j {
                0 => String::new(),
                1 => "y".into(),
                _ => format!("y^{j}"),
            };
            terms.push(match (j, is_one) {
                (0, _) => self.format(c),
                (_, true) => ymon,
                _ => format!("{}*{ymon}", self.format(c)),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

struct PolyEval<'a> {
    r: &'a Dvr,
    y_index: usize,
}

impl Eval for PolyEval<'_> {
    type Value = APoly;

    fn int(&self, n: i64) -> Result<APoly> {
        Ok(self.r.poly_trim(vec![self.r.from_int(n)]))
    }

    fn var(&self, i: usize) -> Result<APoly> {
        if i == self.y_index {
            Ok(vec![self.r.zero(), self.r.one()])
        } else {
            Ok(vec![self.r.uniformizer()])
        }
    }

    fn add(&self, a: &APoly, b: &APoly) -> Result<APoly> {
        let t = &self.r.field;
        let len = a.len().max(b.len());
        let z = t.zero();
        let out = (0..len)
            .map(|i| t.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.r.poly_trim(out))
    }

    fn neg(&self, a: &APoly) -> Result<APoly> {
        self.r.poly_neg(a)
    }

    fn mul(&self, a: &APoly, b: &APoly) -> Result<APoly> {
        if a.is_empty() || b.is_empty() {
            return Ok(vec![]);
        }
        let t = &self.r.field;
        let mut out = vec![t.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = t.add(&out[i + j], &t.mul(x, y)?)?;
            }
        }
        Ok(self.r.poly_trim(out))
    }

    fn pow(&self, a: &APoly, e: i64) -> Result<APoly> {
        if e < 0 {
            if a.len() == 1 {
                return Ok(vec![self.r.field.pow(&a[0], e)?]);
            }
            return Err(Error::invalid("negative power of a polynomial in y"));
        }
        let mut r = vec![self.r.one()];
        for _ in 0..e {
            r = self.mul(&r, a)?;
        }
        Ok(r)
    }
}
