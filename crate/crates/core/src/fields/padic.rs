//! Elements of `Q_p` as `p^valuation * unit`, with the same precision
//! discipline as [`Series`](crate::fields::series::Series): `precision` counts
//! known `p`-adic digits of the unit, `None` marks an exact rational of the form
//! `p^v * n` with `n` an integer prime to `p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PAdic {
    pub(crate) valuation: i64,
    pub(crate) unit: BigInt,
    pub(crate) precision: Option<usize>,
}

fn pow(p: u64, k: usize) -> BigInt {
    num_traits::pow(BigInt::from(p), k)
}

impl PAdic {
    pub fn zero() -> Self {
        PAdic { valuation: 0, unit: BigInt::zero(), precision: None }
    }

    pub fn inexact_zero(k: i64) -> Self {
        PAdic { valuation: k, unit: BigInt::zero(), precision: Some(0) }
    }

    pub fn from_int(p: u64, n: i64) -> Self {
        Self::from_bigint(p, BigInt::from(n))
    }

    pub fn from_bigint(p: u64, n: BigInt) -> Self {
        if n.is_zero() {
            return Self::zero();
        }
        let pb = BigInt::from(p);
        let mut v = 0;
        let mut u = n;
        while (&u % &pb).is_zero() {
            u /= &pb;
            v += 1;
        }
        PAdic { valuation: v, unit: u, precision: None }
    }

    /// Unchecked constructor; `unit` must be prime to `p` unless zero.
    pub(crate) fn from_parts(valuation: i64, unit: BigInt, precision: Option<usize>) -> Self {
        PAdic { valuation, unit, precision }
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    pub fn precision(&self) -> Option<usize> {
        self.precision
    }

    pub fn is_zero_like(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.unit.is_zero() && self.precision.is_none()
    }

    /// Unit residue in `0..p`.
    pub fn residue(&self, p: u64) -> u64 {
        self.unit.mod_floor(&BigInt::from(p)).try_into().unwrap()
    }

    fn reduced(p: u64, valuation: i64, unit: BigInt, precision: Option<usize>) -> Self {
        let pb = BigInt::from(p);
        if unit.is_zero() {
            return match precision {
                None => Self::zero(),
                Some(k) => Self::inexact_zero(valuation + k as i64),
            };
        }
        let mut v = valuation;
        let mut u = unit;
        let mut prec = precision;
        while (&u % &pb).is_zero() {
            u /= &pb;
            v += 1;
            if let Some(k) = prec.as_mut() {
                if *k == 0 {
                    return Self::inexact_zero(v);
                }
                *k -= 1;
            }
            if u.is_zero() {
                return match prec {
                    None => Self::zero(),
                    Some(k) => Self::inexact_zero(v + k as i64),
                };
            }
        }
        if let Some(k) = prec {
            if k == 0 {
                return Self::inexact_zero(v);
            }
            u = u.mod_floor(&pow(p, k));
            if u.is_zero() {
                return Self::inexact_zero(v + k as i64);
            }
        }
        PAdic { valuation: v, unit: u, precision: prec }
    }

    pub fn neg(&self, p: u64) -> Self {
        let unit = match self.precision {
            Some(k) if !self.unit.is_zero() => (-&self.unit).mod_floor(&pow(p, k)),
            _ => -&self.unit,
        };
        PAdic { valuation: self.valuation, unit, precision: self.precision }
    }

    pub fn add(&self, o: &PAdic, p: u64) -> Self {
        if self.is_exact_zero() {
            return o.clone();
        }
        if o.is_exact_zero() {
            return self.clone();
        }
        let end_a = self.precision.map(|k| self.valuation + k as i64);
        let end_b = o.precision.map(|k| o.valuation + k as i64);
        let end = match (end_a, end_b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        };
        let v = self.valuation.min(o.valuation);
        if let Some(e) = end {
            if e <= v {
                return Self::inexact_zero(e);
            }
        }
        let a = &self.unit * pow(p, (self.valuation - v) as usize);
        let b = &o.unit * pow(p, (o.valuation - v) as usize);
        Self::reduced(p, v, a + b, end.map(|e| (e - v) as usize))
    }

    pub fn sub(&self, o: &PAdic, p: u64) -> Self {
        self.add(&o.neg(p), p)
    }

    pub fn mul(&self, o: &PAdic, p: u64) -> Self {
        if self.is_exact_zero() || o.is_exact_zero() {
            return Self::zero();
        }
        if self.is_zero_like() || o.is_zero_like() {
            return Self::inexact_zero(self.valuation + o.valuation);
        }
        let prec = match (self.precision, o.precision) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        };
        Self::reduced(p, self.valuation + o.valuation, &self.unit * &o.unit, prec)
    }

    pub fn inv(&self, p: u64, working: usize) -> Result<Self> {
        if self.is_zero_like() {
            return Err(if self.precision.is_none() {
                Error::ZeroInput
            } else {
                Error::precision("inverse of O(p^k)")
            });
        }
        if self.precision.is_none() && self.unit.abs().is_one() {
            return Ok(PAdic { valuation: -self.valuation, unit: self.unit.clone(), precision: None });
        }
        let k = self.precision.unwrap_or(working).max(1);
        let m = pow(p, k);
        let inv = mod_inverse(&self.unit.mod_floor(&m), &m).ok_or(Error::NotAUnit)?;
        Ok(PAdic { valuation: -self.valuation, unit: inv, precision: Some(k) })
    }

    /// Hensel square root to `n` digits; even valuation and square residue required.
    pub fn sqrt(&self, p: u64, n: usize) -> Result<Self> {
        if self.is_exact_zero() {
            return Ok(Self::zero());
        }
        if self.is_zero_like() {
            return Err(Error::precision("square root of O(p^k)"));
        }
        if self.valuation.rem_euclid(2) != 0 {
            return Err(Error::NotASquare);
        }
        let r = self.residue(p);
        if legendre(r, p) != 1 {
            return Err(Error::NotASquare);
        }
        if self.precision.is_none() {
            if let Some(root) = exact_isqrt(&self.unit) {
                return Ok(PAdic { valuation: self.valuation / 2, unit: root, precision: None });
            }
        }
        let k = self.precision.map_or(n, |x| x.min(n)).max(1);
        let m = pow(p, k);
        let target = self.unit.mod_floor(&m);
        // root mod p by search, then Newton: g <- g - (g^2 - a)/(2g)
        let g0 = (1..p).find(|&g| (g * g) % p == r).unwrap();
        let mut g = BigInt::from(g0);
        let mut known = 1usize;
        while known < k {
            known = (known * 2).min(k);
            let mk = pow(p, known);
            let inv2g = mod_inverse(&(BigInt::from(2) * &g).mod_floor(&mk), &mk).unwrap();
            let delta = ((&g * &g - &target) * inv2g).mod_floor(&mk);
            g = (&g - delta).mod_floor(&mk);
        }
        Ok(PAdic { valuation: self.valuation / 2, unit: g, precision: Some(k) })
    }

    pub fn truncated_exact(&self) -> Self {
        if self.is_zero_like() {
            return Self::zero();
        }
        PAdic { valuation: self.valuation, unit: self.unit.clone(), precision: None }
    }
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

pub(crate) fn legendre(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    let mut acc = 1u64;
    let mut base = a;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}
