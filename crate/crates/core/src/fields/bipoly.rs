//! Sparse polynomials in `x, y` over a finite field.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::Result;
use crate::fields::expr::{Eval, Expr};
use crate::fields::ff::{Embedding, Fe, FiniteField};
use crate::fields::poly::Poly;

/// Terms keyed by `(deg_x, deg_y)`; no zero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    terms: BTreeMap<(usize, usize), Fe>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn constant(c: Fe) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn one(f: &FiniteField) -> Self {
        Self::constant(f.one())
    }

    pub fn monomial(c: Fe, i: usize, j: usize) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        BiPoly { terms }
    }

    pub fn x(f: &FiniteField) -> Self {
        Self::monomial(f.one(), 1, 0)
    }

    pub fn y(f: &FiniteField) -> Self {
        Self::monomial(f.one(), 0, 1)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((usize, usize), Fe)>, f: &FiniteField) -> Self {
        let mut out = BiPoly::zero();
        for ((i, j), c) in terms {
            out.add_term(i, j, &c, f);
        }
        out
    }

    /// `sum_j c_j(x) y^j`.
    pub fn from_y_coeffs(cs: &[Poly]) -> Self {
        let mut terms = BTreeMap::new();
        for (j, c) in cs.iter().enumerate() {
            for (i, a) in c.coeffs().iter().enumerate() {
                if !a.is_zero() {
                    terms.insert((i, j), a.clone());
                }
            }
        }
        BiPoly { terms }
    }

    pub fn parse(src: &str, f: &FiniteField) -> Result<Self> {
        Expr::parse(src, &["x", "y"])?.eval(&BiEval(f))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &Fe)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: usize, j: usize) -> Option<&Fe> {
        self.terms.get(&(i, j))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&(i, j)| i == 0 && j == 0)
    }

    pub fn degree_x(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn degree_y(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.1).max()
    }

    /// Lowest total degree.
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.0 + k.1).min()
    }

    /// Largest `k` with `x^k` dividing.
    pub fn x_order(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.0).min()
    }

    pub fn y_order(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.1).min()
    }

    fn add_term(&mut self, i: usize, j: usize, c: &Fe, f: &FiniteField) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(|| f.zero());
        *e = f.add(e, c);
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn add(&self, o: &BiPoly, f: &FiniteField) -> BiPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &o.terms {
            out.add_term(i, j, c, f);
        }
        out
    }

    pub fn neg(&self, f: &FiniteField) -> BiPoly {
        BiPoly { terms: self.terms.iter().map(|(k, c)| (*k, f.neg(c))).collect() }
    }

    pub fn sub(&self, o: &BiPoly, f: &FiniteField) -> BiPoly {
        self.add(&o.neg(f), f)
    }

    pub fn scale(&self, s: &Fe, f: &FiniteField) -> BiPoly {
        if s.is_zero() {
            return BiPoly::zero();
        }
        BiPoly { terms: self.terms.iter().map(|(k, c)| (*k, f.mul(c, s))).collect() }
    }

    pub fn mul(&self, o: &BiPoly, f: &FiniteField) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &o.terms {
                out.add_term(i + k, j + l, &f.mul(a, b), f);
            }
        }
        out
    }

    pub fn pow(&self, e: usize, f: &FiniteField) -> BiPoly {
        let mut acc = BiPoly::one(f);
        for _ in 0..e {
            acc = acc.mul(self, f);
        }
        acc
    }

    /// Multiplication by `x^a y^b`.
    pub fn shift(&self, a: usize, b: usize) -> BiPoly {
        BiPoly { terms: self.terms.iter().map(|(&(i, j), c)| ((i + a, j + b), c.clone())).collect() }
    }

    /// Exact division by `x^a y^b`; terms must be divisible.
    pub fn unshift(&self, a: usize, b: usize) -> BiPoly {
        BiPoly { terms: self.terms.iter().map(|(&(i, j), c)| ((i - a, j - b), c.clone())).collect() }
    }

    /// Terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: usize) -> BiPoly {
        BiPoly { terms: self.terms.iter().filter(|(k, _)| k.0 + k.1 == d).map(|(k, c)| (*k, c.clone())).collect() }
    }

    /// Terms with `x`-degree below `n`.
    pub fn truncate_x(&self, n: usize) -> BiPoly {
        BiPoly { terms: self.terms.iter().filter(|(k, _)| k.0 < n).map(|(k, c)| (*k, c.clone())).collect() }
    }

    /// Coefficient of `y^j` as a polynomial in `x`.
    pub fn y_coeff(&self, j: usize, f: &FiniteField) -> Poly {
        let mut c = vec![f.zero(); self.degree_x().map_or(0, |d| d + 1)];
        for (&(i, jj), a) in &self.terms {
            if jj == j {
                c[i] = a.clone();
            }
        }
        Poly::new(c)
    }

    pub fn y_coeffs(&self, f: &FiniteField) -> Vec<Poly> {
        (0..=self.degree_y().unwrap_or(0)).map(|j| self.y_coeff(j, f)).collect()
    }

    /// Coefficient of `x^i` as a polynomial in `y`.
    pub fn x_coeff(&self, i: usize, f: &FiniteField) -> Poly {
        let mut c = vec![f.zero(); self.degree_y().map_or(0, |d| d + 1)];
        for (&(ii, j), a) in &self.terms {
            if ii == i {
                c[j] = a.clone();
            }
        }
        Poly::new(c)
    }

    /// `f(0, y)`.
    pub fn at_x_zero(&self, f: &FiniteField) -> Poly {
        self.x_coeff(0, f)
    }

    pub fn eval(&self, x: &Fe, y: &Fe, f: &FiniteField) -> Fe {
        let mut acc = f.zero();
        for (&(i, j), c) in &self.terms {
            let t = f.mul(c, &f.mul(&f.pow_u128(x, i as u128), &f.pow_u128(y, j as u128)));
            acc = f.add(&acc, &t);
        }
        acc
    }

    /// `self(xs, ys)`.
    pub fn compose(&self, xs: &BiPoly, ys: &BiPoly, f: &FiniteField) -> BiPoly {
        let mut xp: Vec<BiPoly> = vec![BiPoly::one(f)];
        let mut yp: Vec<BiPoly> = vec![BiPoly::one(f)];
        let mut out = BiPoly::zero();
        for (&(i, j), c) in &self.terms {
            while xp.len() <= i {
                let n = xp.last().unwrap().mul(xs, f);
                xp.push(n);
            }
            while yp.len() <= j {
                let n = yp.last().unwrap().mul(ys, f);
                yp.push(n);
            }
            out = out.add(&xp[i].mul(&yp[j], f).scale(c, f), f);
        }
        out
    }

    pub fn map(&self, emb: &Embedding) -> BiPoly {
        BiPoly { terms: self.terms.iter().map(|(k, c)| (*k, emb.apply(c))).collect() }
    }

    /// Polynomial in `y` with the `x`-coefficients evaluated at `x = a`.
    pub fn specialize_x(&self, a: &Fe, f: &FiniteField) -> Poly {
        let mut c = vec![f.zero(); self.degree_y().map_or(0, |d| d + 1)];
        for (&(i, j), v) in &self.terms {
            c[j] = f.add(&c[j], &f.mul(v, &f.pow_u128(a, i as u128)));
        }
        Poly::new(c)
    }

    /// Random polynomial with degrees bounded by `(dx, dy)`.
    pub fn random<R: Rng + ?Sized>(f: &FiniteField, dx: usize, dy: usize, rng: &mut R) -> BiPoly {
        let mut out = BiPoly::zero();
        for i in 0..=dx {
            for j in 0..=dy {
                out.add_term(i, j, &f.random(rng), f);
            }
        }
        out
    }

    pub fn format(&self, f: &FiniteField) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut keys: Vec<&(usize, usize)> = self.terms.keys().collect();
        // descending in y, then in x
        keys.sort_by(|a, b| b.1.cmp(&a.1).then(b.0.cmp(&a.0)));
        let mut out = String::new();
        for (n, k) in keys.into_iter().enumerate() {
            let c = &self.terms[k];
            let mut factors = Vec::new();
            let cs = f.format(c);
            let composite = cs.contains('+');
            let unit = f.is_one(c);
            if !unit || (k.0 == 0 && k.1 == 0) {
                factors.push(if composite { format!("({cs})") } else { cs });
            }
            for (deg, v) in [(k.0, "x"), (k.1, "y")] {
                match deg {
                    0 => {}
                    1 => factors.push(v.to_string()),
                    d => factors.push(format!("{v}^{d}")),
                }
            }
            if n > 0 {
                out.push_str(" + ");
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

struct BiEval<'a>(&'a FiniteField);

impl Eval for BiEval<'_> {
    type Value = BiPoly;
    fn int(&self, n: i64) -> Result<BiPoly> {
        Ok(BiPoly::constant(self.0.from_int(n)))
    }
    fn var(&self, i: usize) -> Result<BiPoly> {
        Ok(if i == 0 { BiPoly::x(self.0) } else { BiPoly::y(self.0) })
    }
    fn add(&self, a: &BiPoly, b: &BiPoly) -> Result<BiPoly> {
        Ok(a.add(b, self.0))
    }
    fn neg(&self, a: &BiPoly) -> Result<BiPoly> {
        Ok(a.neg(self.0))
    }
    fn mul(&self, a: &BiPoly, b: &BiPoly) -> Result<BiPoly> {
        Ok(a.mul(b, self.0))
    }
    fn pow(&self, a: &BiPoly, e: i64) -> Result<BiPoly> {
        if e < 0 {
            return Err(crate::error::Error::invalid("negative exponent in a polynomial"));
        }
        Ok(a.pow(e as usize, self.0))
    }
}
