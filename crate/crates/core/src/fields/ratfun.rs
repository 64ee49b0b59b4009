//! Rational functions `num/den` over a finite field, `den` monic and coprime to `num`.

use crate::error::{Error, Result};
use crate::fields::ff::{Fe, FiniteField};
use crate::fields::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    pub(crate) num: Poly,
    pub(crate) den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly, f: &FiniteField) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroInput);
        }
        if num.is_zero() {
            return Ok(Self::zero(f));
        }
        let g = num.gcd(&den, f);
        let num = num.div_exact(&g, f)?;
        let den = den.div_exact(&g, f)?;
        let l = f.inv(den.lead().unwrap())?;
        Ok(RatFn { num: num.scale(&l, f), den: den.scale(&l, f) })
    }

    pub fn from_poly(p: Poly, f: &FiniteField) -> Self {
        RatFn { num: p, den: Poly::one(f) }
    }

    pub fn constant(c: Fe, f: &FiniteField) -> Self {
        Self::from_poly(Poly::constant(c), f)
    }

    pub fn zero(f: &FiniteField) -> Self {
        RatFn { num: Poly::zero(), den: Poly::one(f) }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RatFn, f: &FiniteField) -> Result<Self> {
        let n = self.num.mul(&o.den, f).add(&o.num.mul(&self.den, f), f);
        RatFn::new(n, self.den.mul(&o.den, f), f)
    }

    pub fn neg(&self, f: &FiniteField) -> Self {
        RatFn { num: self.num.neg(f), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFn, f: &FiniteField) -> Result<Self> {
        self.add(&o.neg(f), f)
    }

    pub fn mul(&self, o: &RatFn, f: &FiniteField) -> Result<Self> {
        RatFn::new(self.num.mul(&o.num, f), self.den.mul(&o.den, f), f)
    }

    pub fn inv(&self, f: &FiniteField) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        RatFn::new(self.den.clone(), self.num.clone(), f)
    }

    /// Valuation at the place of the monic irreducible `pi`.
    pub fn valuation_at(&self, pi: &Poly, f: &FiniteField) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(poly_valuation(&self.num, pi, f) as i64 - poly_valuation(&self.den, pi, f) as i64)
    }

    /// Valuation at infinity, `deg den - deg num`.
    pub fn valuation_at_infinity(&self) -> Result<i64> {
        let n = self.num.degree().ok_or(Error::ZeroInput)?;
        Ok(self.den.degree().unwrap() as i64 - n as i64)
    }

    /// `self / pi^v` with `v` the valuation at `pi`, as a pair of polynomials prime to `pi`.
    pub fn unit_at(&self, pi: &Poly, f: &FiniteField) -> Result<(i64, Poly, Poly)> {
        let v = self.valuation_at(pi, f)?;
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        while num.rem(pi, f)?.is_zero() {
            num = num.div_exact(pi, f)?;
        }
        while den.rem(pi, f)?.is_zero() {
            den = den.div_exact(pi, f)?;
        }
        Ok((v, num, den))
    }

    /// Square test in `F_q(t)`: square leading coefficient and even multiplicities.
    pub fn is_square(&self, f: &FiniteField) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let fac = self.num.mul(&self.den, f).factor(f)?;
        Ok(f.is_square(&fac.unit)? && fac.factors.iter().all(|(_, e)| e % 2 == 0))
    }

    pub fn sqrt(&self, f: &FiniteField) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        if !self.is_square(f)? {
            return Err(Error::NotASquare);
        }
        let root = |p: &Poly| -> Result<Poly> {
            let fac = p.factor(f)?;
            let mut acc = Poly::constant(f.sqrt(&fac.unit)?);
            for (q, e) in &fac.factors {
                acc = acc.mul(&q.pow(e / 2, f), f);
            }
            Ok(acc)
        };
        // num*den is a square and gcd(num, den) = 1, so both are squares up to units
        let n = self.num.monic(f);
        let lead = self.num.lead().unwrap().clone();
        let rn = root(&n)?;
        let rd = root(&self.den)?;
        RatFn::new(rn.scale(&f.sqrt(&lead)?, f), rd, f)
    }

    pub fn format(&self, f: &FiniteField, var: &str) -> String {
        let n = self.num.format(f, var);
        if self.den.degree() == Some(0) {
            n
        } else {
            format!("({n})/({})", self.den.format(f, var))
        }
    }
}

pub(crate) fn poly_valuation(p: &Poly, pi: &Poly, f: &FiniteField) -> usize {
    let mut v = 0;
    let mut cur = p.clone();
    while !cur.is_zero() {
        let (q, r) = cur.div_rem(pi, f).unwrap();
        if !r.is_zero() {
            break;
        }
        cur = q;
        v += 1;
    }
    v
}
