//! Field towers: a finite field, Laurent series over a tower level, `Q_p`, or
//! a rational function field over a finite field.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::fields::expr::{Eval, Expr};
use crate::fields::ff::{Fe, FiniteField};
use crate::fields::padic::{legendre, PAdic};
use crate::fields::poly::Poly;
use crate::fields::ratfun::RatFn;
use crate::fields::series::Series;

pub const DEFAULT_PRECISION: usize = 32;

#[derive(Clone, PartialEq, Eq)]
pub enum Tower {
    Finite(Arc<FiniteField>),
    /// `base((var))`, inverses and roots expanded to `precision` coefficients.
    Laurent { base: Arc<Tower>, var: String, precision: usize },
    PAdic { p: u64, precision: usize },
    RatFun { base: Arc<FiniteField>, var: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Elem {
    Fin(Fe),
    Ser(Series),
    Pad(PAdic),
    Rat(RatFn),
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

fn mismatch() -> Error {
    Error::invalid("element does not belong to this field")
}

impl Tower {
    pub fn finite(p: u64, n: usize) -> Result<Self> {
        Ok(Tower::Finite(FiniteField::new(p, n)?))
    }

    pub fn laurent(base: Tower, var: &str, precision: usize) -> Self {
        Tower::Laurent { base: Arc::new(base), var: var.to_string(), precision }
    }

    pub fn padic(p: u64, precision: usize) -> Result<Self> {
        FiniteField::prime(p)?;
        Ok(Tower::PAdic { p, precision })
    }

    pub fn ratfun(base: Arc<FiniteField>, var: &str) -> Self {
        Tower::RatFun { base, var: var.to_string() }
    }

    /// Parses a descriptor: `F<q>` or `Q<p>`, then any number of `((v))`
    /// levels, or a single `(v)` on a finite field.
    pub fn parse_descriptor(src: &str, precision: usize) -> Result<Tower> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |col: usize, msg: &str| Error::Parse { column: col + 1, message: msg.to_string() };
        let digits_end = |from: usize| s[from..].find(|c: char| !c.is_ascii_digit()).map_or(s.len(), |i| from + i);
        let mut tower = match s.chars().next() {
            Some('F') => {
                let end = digits_end(1);
                let q: u64 = s[1..end].parse().map_err(|_| bad(1, "expected field order after 'F'"))?;
                let (p, n) = prime_power(q).ok_or_else(|| bad(1, "field order must be an odd prime power"))?;
                let t = Tower::finite(p, n)?;
                (t, end)
            }
            Some('Q') => {
                let end = digits_end(1);
                let p: u64 = s[1..end].parse().map_err(|_| bad(1, "expected prime after 'Q'"))?;
                (Tower::padic(p, precision)?, end)
            }
            _ => return Err(bad(0, "expected 'F<q>' or 'Q<p>' (e.g. F3, F9, Q5, F3((x)), F3(t))")),
        };
        let (ref mut t, ref mut pos) = tower;
        while *pos < s.len() {
            let rest = &s[*pos..];
            if let Some(inner) = rest.strip_prefix("((") {
                let close = inner.find("))").ok_or_else(|| bad(*pos, "unclosed '(('"))?;
                let var = &inner[..close];
                check_var(var).map_err(|m| bad(*pos + 2, &m))?;
                if matches!(t, Tower::RatFun { .. }) {
                    return Err(bad(*pos, "series over a rational function field are not supported"));
                }
                *t = Tower::laurent(t.clone(), var, precision);
                *pos += 4 + close;
            } else if let Some(inner) = rest.strip_prefix('(') {
                let close = inner.find(')').ok_or_else(|| bad(*pos, "unclosed '('"))?;
                let var = &inner[..close];
                check_var(var).map_err(|m| bad(*pos + 1, &m))?;
                let Tower::Finite(f) = &*t else {
                    return Err(bad(*pos, "rational function fields are supported over finite fields only"));
                };
                *t = Tower::ratfun(f.clone(), var);
                *pos += 2 + close;
            } else {
                return Err(bad(*pos, "expected '((var))' or '(var)'"));
            }
        }
        let used = t.variables();
        for (i, v) in used.iter().enumerate() {
            if used[..i].contains(v) {
                return Err(Error::invalid(format!("variable '{v}' used twice")));
            }
        }
        Ok(tower.0)
    }

    /// Descriptor string such as `F3((x))((y))`, `Q5`, `F9(t)`.
    pub fn name(&self) -> String {
        match self {
            Tower::Finite(f) => f.name(),
            Tower::Laurent { base, var, .. } => format!("{}(({var}))", base.name()),
            Tower::PAdic { p, .. } => format!("Q{p}"),
            Tower::RatFun { base, var } => format!("{}({var})", base.name()),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Tower::Finite(f) => f.characteristic(),
            Tower::Laurent { base, .. } => base.characteristic(),
            Tower::PAdic { .. } => 0,
            Tower::RatFun { base, .. } => base.characteristic(),
        }
    }

    /// Characteristic of the bottom finite field.
    pub fn residue_characteristic(&self) -> u64 {
        match self {
            Tower::PAdic { p, .. } => *p,
            _ => self.characteristic(),
        }
    }

    pub fn is_cdvf(&self) -> bool {
        matches!(self, Tower::Laurent { .. } | Tower::PAdic { .. })
    }

    pub fn precision(&self) -> usize {
        match self {
            Tower::Laurent { precision, .. } | Tower::PAdic { precision, .. } => *precision,
            _ => DEFAULT_PRECISION,
        }
    }

    /// Same tower with every CDVF level's working precision set to `n`.
    pub fn with_precision(&self, n: usize) -> Tower {
        match self {
            Tower::Laurent { base, var, .. } => {
                Tower::Laurent { base: Arc::new(base.with_precision(n)), var: var.clone(), precision: n }
            }
            Tower::PAdic { p, .. } => Tower::PAdic { p: *p, precision: n },
            t => t.clone(),
        }
    }

    /// Name of the uniformizer (or function field variable).
    pub fn var(&self) -> Option<String> {
        match self {
            Tower::Laurent { var, .. } | Tower::RatFun { var, .. } => Some(var.clone()),
            Tower::PAdic { p, .. } => Some(p.to_string()),
            Tower::Finite(_) => None,
        }
    }

    /// Residue field of a CDVF level.
    pub fn residue_field(&self) -> Result<Tower> {
        match self {
            Tower::Laurent { base, .. } => Ok((**base).clone()),
            Tower::PAdic { p, .. } => Ok(Tower::Finite(FiniteField::prime(*p)?)),
            _ => Err(Error::UnsupportedField(format!("{} is not complete discretely valued", self.name()))),
        }
    }

    /// Finite field at the bottom of the tower (`F_p` for `Q_p`).
    pub fn bottom(&self) -> Result<Arc<FiniteField>> {
        match self {
            Tower::Finite(f) | Tower::RatFun { base: f, .. } => Ok(f.clone()),
            Tower::Laurent { base, .. } => base.bottom(),
            Tower::PAdic { p, .. } => FiniteField::prime(*p),
        }
    }

    pub fn zero(&self) -> Elem {
        match self {
            Tower::Finite(f) => Elem::Fin(f.zero()),
            Tower::Laurent { .. } => Elem::Ser(Series::zero()),
            Tower::PAdic { .. } => Elem::Pad(PAdic::zero()),
            Tower::RatFun { base, .. } => Elem::Rat(RatFn::zero(base)),
        }
    }

    pub fn one(&self) -> Elem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Elem {
        match self {
            Tower::Finite(f) => Elem::Fin(f.from_int(n)),
            Tower::Laurent { base, .. } => {
                let c = base.from_int(n);
                if base.is_zero(&c).unwrap_or(true) {
                    Elem::Ser(Series::zero())
                } else {
                    Elem::Ser(Series::monomial(c, 0))
                }
            }
            Tower::PAdic { p, .. } => Elem::Pad(PAdic::from_int(*p, n)),
            Tower::RatFun { base, .. } => Elem::Rat(RatFn::constant(base.from_int(n), base)),
        }
    }

    /// The uniformizer of a CDVF level, or the variable of `F_q(t)`.
    pub fn uniformizer(&self) -> Result<Elem> {
        match self {
            Tower::Laurent { base, .. } => Ok(Elem::Ser(Series::monomial(base.one(), 1))),
            Tower::PAdic { p, .. } => Ok(Elem::Pad(PAdic::from_int(*p, *p as i64))),
            Tower::RatFun { base, .. } => Ok(Elem::Rat(RatFn::from_poly(Poly::x(base), base))),
            Tower::Finite(_) => Err(Error::UnsupportedField("finite field has no uniformizer".into())),
        }
    }

    /// Generator of the top-level finite field `F_p[a]/(m)`, lifted to this level.
    pub fn generator(&self) -> Result<Elem> {
        let f = self.bottom()?;
        if f.degree() == 1 {
            return Err(Error::invalid("prime field has no named generator"));
        }
        self.lift_from_bottom(&f.generator())
    }

    /// Embeds an element of the bottom finite field.
    pub fn lift_from_bottom(&self, c: &Fe) -> Result<Elem> {
        match self {
            Tower::Finite(_) => Ok(Elem::Fin(c.clone())),
            Tower::Laurent { base, .. } => {
                let e = base.lift_from_bottom(c)?;
                if base.is_zero(&e)? {
                    Ok(Elem::Ser(Series::zero()))
                } else {
                    Ok(Elem::Ser(Series::monomial(e, 0)))
                }
            }
            Tower::PAdic { p, .. } => Ok(Elem::Pad(PAdic::from_int(*p, c.0[0] as i64))),
            Tower::RatFun { base, .. } => Ok(Elem::Rat(RatFn::constant(c.clone(), base))),
        }
    }

    /// Teichmuller-free lift of a residue: constant series, or the integer in `0..p`.
    pub fn lift(&self, r: &Elem) -> Result<Elem> {
        match (self, r) {
            (Tower::Laurent { base, .. }, r) => {
                if base.is_zero(r)? {
                    Ok(Elem::Ser(Series::zero()))
                } else {
                    Ok(Elem::Ser(Series::monomial(r.clone(), 0)))
                }
            }
            (Tower::PAdic { p, .. }, Elem::Fin(c)) => Ok(Elem::Pad(PAdic::from_int(*p, c.0[0] as i64))),
            _ => Err(mismatch()),
        }
    }

    pub fn is_zero(&self, a: &Elem) -> Result<bool> {
        match a {
            Elem::Fin(x) => Ok(x.is_zero()),
            Elem::Rat(x) => Ok(x.is_zero()),
            Elem::Ser(s) => zero_test(s.is_zero_like(), s.is_exact_zero()),
            Elem::Pad(x) => zero_test(x.is_zero_like(), x.is_exact_zero()),
        }
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        match (self, a, b) {
            (Tower::Finite(f), Elem::Fin(x), Elem::Fin(y)) => Ok(Elem::Fin(f.add(x, y))),
            (Tower::Laurent { base, .. }, Elem::Ser(x), Elem::Ser(y)) => Ok(Elem::Ser(x.add(y, base)?)),
            (Tower::PAdic { p, .. }, Elem::Pad(x), Elem::Pad(y)) => Ok(Elem::Pad(x.add(y, *p))),
            (Tower::RatFun { base, .. }, Elem::Rat(x), Elem::Rat(y)) => Ok(Elem::Rat(x.add(y, base)?)),
            _ => Err(mismatch()),
        }
    }

    pub fn neg(&self, a: &Elem) -> Result<Elem> {
        match (self, a) {
            (Tower::Finite(f), Elem::Fin(x)) => Ok(Elem::Fin(f.neg(x))),
            (Tower::Laurent { base, .. }, Elem::Ser(x)) => Ok(Elem::Ser(x.neg(base)?)),
            (Tower::PAdic { p, .. }, Elem::Pad(x)) => Ok(Elem::Pad(x.neg(*p))),
            (Tower::RatFun { base, .. }, Elem::Rat(x)) => Ok(Elem::Rat(x.neg(base))),
            _ => Err(mismatch()),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        self.add(a, &self.neg(b)?)
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        match (self, a, b) {
            (Tower::Finite(f), Elem::Fin(x), Elem::Fin(y)) => Ok(Elem::Fin(f.mul(x, y))),
            (Tower::Laurent { base, .. }, Elem::Ser(x), Elem::Ser(y)) => Ok(Elem::Ser(x.mul(y, base)?)),
            (Tower::PAdic { p, .. }, Elem::Pad(x), Elem::Pad(y)) => Ok(Elem::Pad(x.mul(y, *p))),
            (Tower::RatFun { base, .. }, Elem::Rat(x), Elem::Rat(y)) => Ok(Elem::Rat(x.mul(y, base)?)),
            _ => Err(mismatch()),
        }
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        match (self, a) {
            (Tower::Finite(f), Elem::Fin(x)) => Ok(Elem::Fin(f.inv(x)?)),
            (Tower::Laurent { base, precision, .. }, Elem::Ser(x)) => Ok(Elem::Ser(x.inv(base, *precision)?)),
            (Tower::PAdic { p, precision }, Elem::Pad(x)) => Ok(Elem::Pad(x.inv(*p, *precision)?)),
            (Tower::RatFun { base, .. }, Elem::Rat(x)) => Ok(Elem::Rat(x.inv(base)?)),
            _ => Err(mismatch()),
        }
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        self.mul(a, &self.inv(b)?)
    }

    pub fn pow(&self, a: &Elem, e: i64) -> Result<Elem> {
        let mut base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// Valuation at a CDVF level.
    pub fn valuation(&self, a: &Elem) -> Result<i64> {
        match a {
            Elem::Ser(s) if self.is_cdvf() => unit_valuation(s.is_zero_like(), s.is_exact_zero(), s.valuation()),
            Elem::Pad(x) if self.is_cdvf() => unit_valuation(x.is_zero_like(), x.is_exact_zero(), x.valuation()),
            _ => Err(Error::UnsupportedField(format!("no valuation on {}", self.name()))),
        }
    }

    /// `(v, r)`: valuation and the residue of `a * pi^-v` in the residue field.
    pub fn leading(&self, a: &Elem) -> Result<(i64, Elem)> {
        let v = self.valuation(a)?;
        match (self, a) {
            (Tower::Laurent { .. }, Elem::Ser(s)) => Ok((v, s.unit_part()[0].clone())),
            (Tower::PAdic { p, .. }, Elem::Pad(x)) => {
                let f = FiniteField::prime(*p)?;
                Ok((v, Elem::Fin(f.from_int(x.residue(*p) as i64))))
            }
            _ => Err(mismatch()),
        }
    }

    /// Valuations through the tower: `v`, then the valuation of the leading
    /// residue one level down, and so on until a non-CDVF level.
    pub fn lex_valuation(&self, a: &Elem) -> Result<Vec<i64>> {
        let mut out = Vec::new();
        let mut level = self.clone();
        let mut cur = a.clone();
        while level.is_cdvf() {
            let (v, r) = level.leading(&cur)?;
            out.push(v);
            level = level.residue_field()?;
            cur = r;
        }
        Ok(out)
    }

    pub fn is_square(&self, a: &Elem) -> Result<bool> {
        if self.residue_characteristic() == 2 {
            return Err(Error::UnsupportedField("characteristic 2".into()));
        }
        match (self, a) {
            (Tower::Finite(f), Elem::Fin(x)) => f.is_square(x),
            (Tower::Laurent { base, .. }, Elem::Ser(_)) => {
                let (v, r) = self.leading(a)?;
                Ok(v.rem_euclid(2) == 0 && base.is_square(&r)?)
            }
            (Tower::PAdic { p, .. }, Elem::Pad(x)) => {
                let v = self.valuation(a)?;
                Ok(v.rem_euclid(2) == 0 && legendre(x.residue(*p), *p) == 1)
            }
            (Tower::RatFun { base, .. }, Elem::Rat(x)) => x.is_square(base),
            _ => Err(mismatch()),
        }
    }

    /// Square root to the level's working precision.
    pub fn sqrt(&self, a: &Elem) -> Result<Elem> {
        match (self, a) {
            (Tower::Finite(f), Elem::Fin(x)) => Ok(Elem::Fin(f.sqrt(x)?)),
            (Tower::Laurent { base, precision, .. }, Elem::Ser(x)) => Ok(Elem::Ser(x.sqrt(base, *precision)?)),
            (Tower::PAdic { p, precision }, Elem::Pad(x)) => Ok(Elem::Pad(x.sqrt(*p, *precision)?)),
            (Tower::RatFun { base, .. }, Elem::Rat(x)) => Ok(Elem::Rat(x.sqrt(base)?)),
            _ => Err(mismatch()),
        }
    }

    /// Drops precision records: the known digits taken as an exact element.
    pub fn exact_truncation(&self, a: &Elem) -> Elem {
        match (self, a) {
            (Tower::Laurent { base, .. }, Elem::Ser(s)) => Elem::Ser(s.truncated_exact(base)),
            (_, Elem::Pad(x)) => Elem::Pad(x.truncated_exact()),
            _ => a.clone(),
        }
    }

    /// True when `a` carries no precision loss anywhere.
    pub fn is_exact(&self, a: &Elem) -> bool {
        match (self, a) {
            (Tower::Laurent { base, .. }, Elem::Ser(s)) => {
                s.is_exact() && s.unit_part().iter().all(|c| base.is_exact(c))
            }
            (_, Elem::Pad(x)) => x.precision().is_none(),
            _ => true,
        }
    }

    /// `pi^k * c` for a residue-level `c`.
    pub fn monomial(&self, c: &Elem, k: i64) -> Result<Elem> {
        match self {
            Tower::Laurent { base, .. } => {
                if base.is_zero(c)? {
                    Ok(Elem::Ser(Series::zero()))
                } else {
                    Ok(Elem::Ser(Series::monomial(c.clone(), k)))
                }
            }
            Tower::PAdic { .. } => {
                let u = self.lift(c)?;
                let pi = self.uniformizer()?;
                self.mul(&u, &self.pow(&pi, k)?)
            }
            _ => Err(Error::UnsupportedField(format!("{} has no monomials", self.name()))),
        }
    }

    /// Lower bound for the valuation: the valuation of a nonzero element,
    /// `k` for `O(pi^k)`, `None` for exact zero.
    pub fn valuation_bound(&self, a: &Elem) -> Option<i64> {
        match a {
            Elem::Ser(s) if s.is_exact_zero() => None,
            Elem::Ser(s) => Some(s.valuation()),
            Elem::Pad(x) if x.is_exact_zero() => None,
            Elem::Pad(x) => Some(x.valuation()),
            _ => None,
        }
    }

    /// `a mod pi^n`: digits from `n` on are dropped and marked unknown.
    pub fn truncate_abs(&self, a: &Elem, n: i64) -> Elem {
        match (self, a) {
            (Tower::Laurent { base, .. }, Elem::Ser(s)) => {
                if s.is_exact_zero() {
                    return a.clone();
                }
                let v = s.valuation();
                let end = s.abs_end().map_or(n, |e| e.min(n));
                if s.is_zero_like() || v >= end {
                    return Elem::Ser(Series::inexact_zero(end.min(s.abs_end().unwrap_or(end))));
                }
                let keep = (end - v) as usize;
                let coeffs: Vec<Elem> = s.unit_part().iter().take(keep).cloned().collect();
                Elem::Ser(Series::from_coeffs(base, v, coeffs, Some(keep)).expect("leading coefficient is nonzero"))
            }
            (Tower::PAdic { p, .. }, Elem::Pad(x)) => {
                if x.is_exact_zero() {
                    return a.clone();
                }
                let v = x.valuation();
                let end = x.precision().map_or(n, |k| (v + k as i64).min(n));
                if x.is_zero_like() || v >= end {
                    return Elem::Pad(PAdic::inexact_zero(end));
                }
                let k = (end - v) as usize;
                let unit = x.unit().mod_floor(&num_traits::pow(BigInt::from(*p), k));
                Elem::Pad(PAdic::from_parts(v, unit, Some(k)))
            }
            _ => a.clone(),
        }
    }

    /// A fixed non-square of the bottom finite field, lifted.
    pub fn non_square_constant(&self) -> Result<Elem> {
        let f = self.bottom()?;
        self.lift_from_bottom(&f.non_square())
    }

    pub fn format(&self, a: &Elem) -> String {
        match (self, a) {
            (Tower::Finite(f), Elem::Fin(x)) => f.format(x),
            (Tower::RatFun { base, var }, Elem::Rat(x)) => x.format(base, var),
            (Tower::PAdic { p, .. }, Elem::Pad(x)) => format_padic(x, *p),
            (Tower::Laurent { base, var, .. }, Elem::Ser(s)) => format_series(s, base, var),
            _ => format!("{a:?}"),
        }
    }
}

/// Evaluates grammar literals in a tower: each level's variable is its
/// uniformizer, `a` is the generator of a non-prime bottom field.
struct TowerEval<'a> {
    tower: &'a Tower,
    /// `(level, element of that level)` per declared variable.
    vars: Vec<(Tower, Elem)>,
}

impl Tower {
    /// Variables usable in literals, innermost first.
    pub fn variables(&self) -> Vec<String> {
        let mut out = match self {
            Tower::Laurent { base, .. } => base.variables(),
            Tower::Finite(f) | Tower::RatFun { base: f, .. } if f.degree() > 1 => vec!["a".to_string()],
            _ => Vec::new(),
        };
        if let Tower::Laurent { var, .. } | Tower::RatFun { var, .. } = self {
            out.push(var.clone());
        }
        out
    }

    /// Embeds an element of a lower level (given as that level) into `self`.
    pub fn embed(&self, level: &Tower, e: &Elem) -> Result<Elem> {
        if level == self {
            return Ok(e.clone());
        }
        match self {
            Tower::Laurent { base, .. } => {
                let inner = base.embed(level, e)?;
                self.lift(&inner)
            }
            _ => Err(mismatch()),
        }
    }

    pub fn parse_elem(&self, src: &str) -> Result<Elem> {
        let names = self.variables();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let expr = Expr::parse(src, &refs)?;
        let mut vars = Vec::new();
        let mut chain = vec![self.clone()];
        while let Tower::Laurent { base, .. } = chain.last().unwrap() {
            let b = (**base).clone();
            chain.push(b);
        }
        for name in &names {
            if name == "a" {
                vars.push((self.clone(), self.generator()?));
                continue;
            }
            let level = chain.iter().find(|l| l.var().as_deref() == Some(name.as_str())).unwrap();
            vars.push((level.clone(), level.uniformizer()?));
        }
        expr.eval(&TowerEval { tower: self, vars })
    }
}

impl Eval for TowerEval<'_> {
    type Value = Elem;
    fn int(&self, n: i64) -> Result<Elem> {
        Ok(self.tower.from_int(n))
    }
    fn var(&self, i: usize) -> Result<Elem> {
        let (level, e) = &self.vars[i];
        self.tower.embed(level, e)
    }
    fn add(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        self.tower.add(a, b)
    }
    fn neg(&self, a: &Elem) -> Result<Elem> {
        self.tower.neg(a)
    }
    fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        self.tower.mul(a, b)
    }
    fn pow(&self, a: &Elem, e: i64) -> Result<Elem> {
        self.tower.pow(a, e)
    }
}

fn check_var(v: &str) -> std::result::Result<(), String> {
    let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && v != "a";
    if ok {
        Ok(())
    } else {
        Err(format!("invalid variable name '{v}'"))
    }
}

fn prime_power(q: u64) -> Option<(u64, usize)> {
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut n = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        n += 1;
    }
    (r == 1).then_some((p, n))
}

fn zero_test(zero_like: bool, exact_zero: bool) -> Result<bool> {
    match (zero_like, exact_zero) {
        (false, _) => Ok(false),
        (true, true) => Ok(true),
        (true, false) => Err(Error::precision("element is O(pi^k)")),
    }
}

fn unit_valuation(zero_like: bool, exact_zero: bool, v: i64) -> Result<i64> {
    match (zero_like, exact_zero) {
        (false, _) => Ok(v),
        (true, true) => Err(Error::ZeroInput),
        (true, false) => Err(Error::precision("valuation of O(pi^k)")),
    }
}

fn power(var: &str, e: i64) -> String {
    match e {
        0 => String::new(),
        1 => var.to_string(),
        e => format!("{var}^{e}"),
    }
}

fn format_series(s: &Series, base: &Tower, var: &str) -> String {
    let mut terms = Vec::new();
    for (i, c) in s.unit_part().iter().enumerate() {
        if base.is_zero(c).unwrap_or(false) {
            continue;
        }
        let e = s.valuation() + i as i64;
        let coeff = base.format(c);
        let composite = coeff.contains(['+', ' ', '*']);
        let mono = power(var, e);
        terms.push(match (mono.is_empty(), coeff.as_str()) {
            (true, _) => coeff.clone(),
            (false, "1") => mono,
            (false, _) if composite => format!("({coeff})*{mono}"),
            (false, _) => format!("{coeff}*{mono}"),
        });
    }
    if let Some(end) = s.abs_end() {
        terms.push(format!("O({})", if end == 0 { "1".to_string() } else { power(var, end) }));
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn format_padic(x: &PAdic, p: u64) -> String {
    if x.is_exact_zero() {
        return "0".into();
    }
    let unit: BigInt = x.unit().clone();
    let mut s = match x.valuation() {
        0 => unit.to_string(),
        v => format!("{unit}*{p}^{v}"),
    };
    if let Some(k) = x.precision() {
        let end = x.valuation() + k as i64;
        if x.is_zero_like() {
            s = format!("O({p}^{end})");
        } else {
            s = format!("{s} + O({p}^{end})");
        }
    }
    s
}
