//! Dense univariate polynomials over a finite field and their factorization
//! (square-free split, distinct-degree, Cantor-Zassenhaus equal-degree).

use std::cmp::Ordering;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fields::ff::{Fe, FiniteField};

/// Coefficients low degree first; no trailing zeros (the zero polynomial is empty).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    c: Vec<Fe>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Factorization {
    pub unit: Fe,
    /// Monic irreducibles with multiplicity, in canonical order.
    pub factors: Vec<(Poly, usize)>,
}

impl Poly {
    pub fn new(mut c: Vec<Fe>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn constant(a: Fe) -> Self {
        Poly::new(vec![a])
    }

    pub fn one(f: &FiniteField) -> Self {
        Poly::constant(f.one())
    }

    /// The monomial `t`.
    pub fn x(f: &FiniteField) -> Self {
        Poly::new(vec![f.zero(), f.one()])
    }

    pub fn monomial(f: &FiniteField, coeff: Fe, deg: usize) -> Self {
        let mut c = vec![f.zero(); deg];
        c.push(coeff);
        Poly::new(c)
    }

    pub fn from_ints(f: &FiniteField, coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&n| f.from_int(n)).collect())
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.c
    }

    pub fn coeff(&self, i: usize, f: &FiniteField) -> Fe {
        self.c.get(i).cloned().unwrap_or_else(|| f.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Fe> {
        self.c.last()
    }

    pub fn is_monic(&self, f: &FiniteField) -> bool {
        self.lead().is_some_and(|l| f.is_one(l))
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn add(&self, o: &Poly, f: &FiniteField) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| f.add(&self.coeff(i, f), &o.coeff(i, f))).collect())
    }

    pub fn sub(&self, o: &Poly, f: &FiniteField) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| f.sub(&self.coeff(i, f), &o.coeff(i, f))).collect())
    }

    pub fn neg(&self, f: &FiniteField) -> Poly {
        Poly::new(self.c.iter().map(|a| f.neg(a)).collect())
    }

    pub fn scale(&self, s: &Fe, f: &FiniteField) -> Poly {
        Poly::new(self.c.iter().map(|a| f.mul(a, s)).collect())
    }

    pub fn mul(&self, o: &Poly, f: &FiniteField) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![f.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: usize, f: &FiniteField) -> Poly {
        let mut acc = Poly::one(f);
        for _ in 0..e {
            acc = acc.mul(self, f);
        }
        acc
    }

    pub fn div_rem(&self, d: &Poly, f: &FiniteField) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::ZeroInput)?;
        let inv_lead = f.inv(d.lead().unwrap())?;
        let mut r = self.c.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut q = vec![f.zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = f.mul(&r[k + dd], &inv_lead);
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.c.iter().enumerate() {
                r[k + j] = f.sub(&r[k + j], &f.mul(&c, dj));
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Poly::new(q), Poly::new(r)))
    }

    pub fn rem(&self, d: &Poly, f: &FiniteField) -> Result<Poly> {
        Ok(self.div_rem(d, f)?.1)
    }

    /// Exact quotient; errors if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly, f: &FiniteField) -> Result<Poly> {
        let (q, r) = self.div_rem(d, f)?;
        if !r.is_zero() {
            return Err(Error::invalid("inexact polynomial division"));
        }
        Ok(q)
    }

    pub fn monic(&self, f: &FiniteField) -> Poly {
        match self.lead() {
            None => Poly::zero(),
            Some(l) => self.scale(&f.inv(l).unwrap(), f),
        }
    }

    pub fn gcd(&self, o: &Poly, f: &FiniteField) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b, f).unwrap();
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn derivative(&self, f: &FiniteField) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| f.mul_int(a, i as u64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Fe, f: &FiniteField) -> Fe {
        self.c.iter().rev().fold(f.zero(), |acc, a| f.add(&f.mul(&acc, x), a))
    }

    pub fn pow_mod(&self, e: &BigUint, m: &Poly, f: &FiniteField) -> Poly {
        let base = self.rem(m, f).unwrap();
        let mut acc = Poly::one(f).rem(m, f).unwrap();
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc, f).rem(m, f).unwrap();
            if e.bit(i) {
                acc = acc.mul(&base, f).rem(m, f).unwrap();
            }
        }
        acc
    }

    /// Canonical order: degree, then coefficient indices from the constant term up.
    pub fn canonical_cmp(&self, o: &Poly, f: &FiniteField) -> Ordering {
        self.c.len().cmp(&o.c.len()).then_with(|| {
            self.c
                .iter()
                .map(|a| f.index(a))
                .cmp(o.c.iter().map(|a| f.index(a)))
        })
    }

    /// Rabin's test.
    pub fn is_irreducible(&self, f: &FiniteField) -> bool {
        let Some(n) = self.degree() else { return false };
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let m = self.monic(f);
        let q = f.order_big();
        let x = Poly::x(f);
        let mut frob = vec![x.clone()];
        for _ in 0..n {
            let last = frob.last().unwrap().pow_mod(&q, &m, f);
            frob.push(last);
        }
        if frob[n].sub(&x, f).rem(&m, f).unwrap().is_zero() {
            for r in prime_divisors(n) {
                let h = frob[n / r].sub(&x, f);
                if m.gcd(&h, f).degree() != Some(0) {
                    return false;
                }
            }
            true
        } else {
            false
        }
    }

    /// Roots in `f`, sorted by enumeration index, without multiplicity.
    pub fn roots(&self, f: &FiniteField) -> Vec<Fe> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let m = self.monic(f);
        let x = Poly::x(f);
        let g = x.pow_mod(&f.order_big(), &m, f).sub(&x, f).gcd(&m, f);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut roots: Vec<Fe> = equal_degree(&g, 1, f, &mut rng)
            .into_iter()
            .map(|lin| f.neg(&lin.c[0]))
            .collect();
        roots.sort_by_key(|r| f.index(r));
        roots
    }

    /// Full factorization into a unit times monic irreducible powers.
    pub fn factor(&self, f: &FiniteField) -> Result<Factorization> {
        let unit = self.lead().cloned().ok_or(Error::ZeroInput)?;
        let m = self.monic(f);
        let mut factors: Vec<(Poly, usize)> = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0xfac7);
        for (sqf, mult) in square_free(&m, f) {
            for (block, d) in distinct_degree(&sqf, f) {
                for irr in equal_degree(&block, d, f, &mut rng) {
                    factors.push((irr, mult));
                }
            }
        }
        factors.sort_by(|a, b| a.0.canonical_cmp(&b.0, f).then(a.1.cmp(&b.1)));
        // merge equal factors appearing from different square-free layers
        let mut merged: Vec<(Poly, usize)> = Vec::new();
        for (p, e) in factors {
            match merged.last_mut() {
                Some((q, k)) if *q == p => *k += e,
                _ => merged.push((p, e)),
            }
        }
        Ok(Factorization { unit, factors: merged })
    }

    pub fn format(&self, f: &FiniteField, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let coeff = f.format(a);
            let wrapped = if coeff.contains('+') { format!("({coeff})") } else { coeff };
            let t = match i {
                0 => wrapped,
                _ => {
                    let mono = if i == 1 { var.to_string() } else { format!("{var}^{i}") };
                    if f.is_one(a) {
                        mono
                    } else {
                        format!("{wrapped}*{mono}")
                    }
                }
            };
            terms.push(t);
        }
        terms.join(" + ")
    }
}

impl Factorization {
    pub fn expand(&self, f: &FiniteField) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(self.unit.clone()), |acc, (p, e)| acc.mul(&p.pow(*e, f), f))
    }
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `c^(1/p)` coefficient-wise for a polynomial in `t^p`.
fn pth_root(g: &Poly, f: &FiniteField) -> Poly {
    let p = f.characteristic() as usize;
    let e = f.order() / f.characteristic() as u128;
    Poly::new(g.c.iter().step_by(p).map(|a| f.pow_u128(a, e)).collect())
}

fn square_free(m: &Poly, f: &FiniteField) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    if m.degree().unwrap_or(0) == 0 {
        return out;
    }
    let d = m.derivative(f);
    if d.is_zero() {
        let p = f.characteristic() as usize;
        for (g, k) in square_free(&pth_root(m, f), f) {
            out.push((g, k * p));
        }
        return out;
    }
    let mut c = m.gcd(&d, f);
    let mut w = m.div_exact(&c, f).unwrap();
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd(&c, f);
        let fac = w.div_exact(&y, f).unwrap();
        if fac.degree().unwrap_or(0) > 0 {
            out.push((fac, i));
        }
        w = y;
        c = c.div_exact(&w, f).unwrap();
        i += 1;
    }
    if c.degree().unwrap_or(0) > 0 {
        let p = f.characteristic() as usize;
        for (g, k) in square_free(&pth_root(&c, f), f) {
            out.push((g, k * p));
        }
    }
    out
}

fn distinct_degree(g: &Poly, f: &FiniteField) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut rest = g.clone();
    let x = Poly::x(f);
    let q = f.order_big();
    let mut h = x.clone();
    let mut i = 1;
    while rest.degree().unwrap_or(0) >= 2 * i {
        h = h.pow_mod(&q, &rest, f);
        let d = h.sub(&x, f).gcd(&rest, f);
        if d.degree().unwrap_or(0) > 0 {
            rest = rest.div_exact(&d, f).unwrap();
            h = h.rem(&rest, f).unwrap();
            out.push((d, i));
        }
        i += 1;
    }
    if let Some(n) = rest.degree() {
        if n > 0 {
            out.push((rest, n));
        }
    }
    out
}

fn equal_degree(g: &Poly, d: usize, f: &FiniteField, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = match g.degree() {
        None | Some(0) => return Vec::new(),
        Some(n) => n,
    };
    if n == d {
        return vec![g.monic(f)];
    }
    let e = (f.order_big().pow(d as u32) - 1u32) / 2u32;
    loop {
        let a = Poly::new((0..n).map(|_| f.random(rng)).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = a.pow_mod(&e, g, f).sub(&Poly::one(f), f);
        let h = b.gcd(g, f);
        let hd = h.degree().unwrap_or(0);
        if hd > 0 && hd < n {
            let other = g.div_exact(&h, f).unwrap();
            let mut out = equal_degree(&h, d, f, rng);
            out.extend(equal_degree(&other, d, f, rng));
            return out;
        }
    }
}
