//! Finite fields of odd characteristic.
//!
//! `F_{p^n}` is presented as `F_p[a]/(m(a))` where `m` is the canonical modulus:
//! the monic irreducible of degree `n` with the smallest enumeration index
//! (coefficients read as base-`p` digits, constant term least significant).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fields::poly::Poly;

/// Element of a finite field: coefficients in the power basis of the generator, low degree first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(pub(crate) Vec<u64>);

impl Fe {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe{:?}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteField {
    p: u64,
    degree: usize,
    /// Monic, `degree + 1` coefficients, low degree first.
    modulus: Vec<u64>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn field_cache() -> &'static Mutex<HashMap<(u64, usize), Arc<FiniteField>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<FiniteField>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl FiniteField {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Arc<FiniteField>> {
        Self::new(p, 1)
    }

    /// The canonical field with `p^n` elements.
    pub fn new(p: u64, n: usize) -> Result<Arc<FiniteField>> {
        if p == 2 {
            return Err(Error::UnsupportedField("characteristic 2".into()));
        }
        if !is_prime(p) {
            return Err(Error::UnsupportedField(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::UnsupportedField("extension degree 0".into()));
        }
        if p >= 1 << 31 {
            return Err(Error::UnsupportedField(format!("characteristic {p} too large")));
        }
        if let Some(f) = field_cache().lock().unwrap().get(&(p, n)) {
            return Ok(f.clone());
        }
        let field = if n == 1 {
            FiniteField { p, degree: 1, modulus: vec![0, 1] }
        } else {
            let base = FiniteField::prime(p)?;
            let modulus = canonical_modulus(&base, n)?;
            FiniteField { p, degree: n, modulus }
        };
        let arc = Arc::new(field);
        field_cache().lock().unwrap().insert((p, n), arc.clone());
        Ok(arc)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.degree as u32)
    }

    pub fn order_big(&self) -> BigUint {
        BigUint::from(self.p).pow(self.degree as u32)
    }

    pub fn name(&self) -> String {
        format!("F{}", self.order())
    }

    pub fn zero(&self) -> Fe {
        Fe(vec![0; self.degree])
    }

    pub fn one(&self) -> Fe {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Fe {
        let mut v = vec![0; self.degree];
        v[0] = n.rem_euclid(self.p as i64) as u64;
        Fe(v)
    }

    /// Reduces `sum c_i a^i` into the field, folding high powers through the modulus.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Fe {
        if coeffs.len() <= self.degree {
            let mut v = vec![0; self.degree];
            for (i, &c) in coeffs.iter().enumerate() {
                v[i] = c % self.p;
            }
            return Fe(v);
        }
        let gen = self.generator();
        coeffs.iter().rev().fold(self.zero(), |acc, &c| {
            let shifted = self.mul(&acc, &gen);
            self.add(&shifted, &self.from_int((c % self.p) as i64))
        })
    }

    /// The generator `a` of the power basis (zero for prime fields, presented as `F_p[a]/(a)`).
    pub fn generator(&self) -> Fe {
        if self.degree == 1 {
            // F_p[a]/(a): the generator is 0
            return self.zero();
        }
        let mut v = vec![0; self.degree];
        v[1] = 1;
        Fe(v)
    }

    pub fn is_zero(&self, a: &Fe) -> bool {
        a.is_zero()
    }

    pub fn is_one(&self, a: &Fe) -> bool {
        a.0[0] == 1 && a.0[1..].iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &Fe, b: &Fe) -> Fe {
        Fe(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + y) % self.p).collect())
    }

    pub fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        Fe(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + self.p - y) % self.p).collect())
    }

    pub fn neg(&self, a: &Fe) -> Fe {
        Fe(a.0.iter().map(|&x| (self.p - x) % self.p).collect())
    }

    pub fn mul_int(&self, a: &Fe, n: u64) -> Fe {
        let n = n % self.p;
        Fe(a.0.iter().map(|&x| x * n % self.p).collect())
    }

    pub fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        let p = self.p;
        let n = self.degree;
        if n == 1 {
            return Fe(vec![a.0[0] * b.0[0] % p]);
        }
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        for k in (n..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for j in 0..n {
                let m = self.modulus[j];
                if m != 0 {
                    prod[k - n + j] = (prod[k - n + j] + (p - m) * c) % p;
                }
            }
        }
        prod.truncate(n);
        Fe(prod)
    }

    pub fn square(&self, a: &Fe) -> Fe {
        self.mul(a, a)
    }

    pub fn pow_u128(&self, a: &Fe, mut e: u128) -> Fe {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn pow_big(&self, a: &Fe, e: &BigUint) -> Fe {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    pub fn pow_i64(&self, a: &Fe, e: i64) -> Result<Fe> {
        if e >= 0 {
            Ok(self.pow_u128(a, e as u128))
        } else {
            Ok(self.pow_u128(&self.inv(a)?, e.unsigned_abs() as u128))
        }
    }

    pub fn inv(&self, a: &Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(self.pow_u128(a, self.order() - 2))
    }

    pub fn div(&self, a: &Fe, b: &Fe) -> Result<Fe> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Euler's criterion.
    pub fn is_square(&self, a: &Fe) -> Result<bool> {
        if a.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(self.is_one(&self.pow_u128(a, (self.order() - 1) / 2)))
    }

    /// Square test that accepts zero (zero is a square).
    pub fn is_square_or_zero(&self, a: &Fe) -> bool {
        a.is_zero() || self.is_square(a).unwrap_or(false)
    }

    /// Smallest non-square in enumeration order.
    pub fn non_square(&self) -> Fe {
        (1..self.order())
            .map(|i| self.element(i))
            .find(|e| !self.is_square(e).unwrap())
            .expect("odd finite field has non-squares")
    }

    /// Tonelli-Shanks square root; returns the root with the smaller enumeration index.
    pub fn sqrt(&self, a: &Fe) -> Result<Fe> {
        if a.is_zero() {
            return Ok(self.zero());
        }
        if !self.is_square(a)? {
            return Err(Error::NotASquare);
        }
        let q = self.order();
        let mut m = q - 1;
        let mut s = 0u32;
        while m % 2 == 0 {
            m /= 2;
            s += 1;
        }
        let z = self.non_square();
        let mut c = self.pow_u128(&z, m);
        let mut x = self.pow_u128(a, m.div_ceil(2));
        let mut t = self.pow_u128(a, m);
        let mut r = s;
        while !self.is_one(&t) {
            let mut i = 0;
            let mut t2 = t.clone();
            while !self.is_one(&t2) {
                t2 = self.mul(&t2, &t2);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(r - i - 1) {
                b = self.mul(&b, &b);
            }
            x = self.mul(&x, &b);
            c = self.mul(&b, &b);
            t = self.mul(&t, &c);
            r = i;
        }
        let other = self.neg(&x);
        Ok(if self.index(&other) < self.index(&x) { other } else { x })
    }

    /// Element with the given enumeration index (base-`p` digits).
    pub fn element(&self, mut index: u128) -> Fe {
        let mut v = vec![0; self.degree];
        for c in v.iter_mut() {
            *c = (index % self.p as u128) as u64;
            index /= self.p as u128;
        }
        Fe(v)
    }

    pub fn index(&self, a: &Fe) -> u128 {
        a.0.iter().rev().fold(0u128, |acc, &c| acc * self.p as u128 + c as u128)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.order()).map(move |i| self.element(i))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe((0..self.degree).map(|_| rng.gen_range(0..self.p)).collect())
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        loop {
            let a = self.random(rng);
            if !a.is_zero() {
                return a;
            }
        }
    }

    /// Coefficient of `a` in the prime field, if `a` lies there.
    pub fn as_prime(&self, a: &Fe) -> Option<u64> {
        if a.0[1..].iter().all(|&c| c == 0) {
            Some(a.0[0])
        } else {
            None
        }
    }

    pub fn format(&self, a: &Fe) -> String {
        format_fe(a, self.p, "a")
    }
}

/// Prints `a` as a polynomial in `gen` with coefficients in `0..p`, highest power first.
pub(crate) fn format_fe(a: &Fe, p: u64, gen: &str) -> String {
    let _ = p;
    let mut terms = Vec::new();
    for (i, &c) in a.0.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let t = match (i, c) {
            (0, c) => c.to_string(),
            (1, 1) => gen.to_string(),
            (1, c) => format!("{c}*{gen}"),
            (i, 1) => format!("{gen}^{i}"),
            (i, c) => format!("{c}*{gen}^{i}"),
        };
        terms.push(t);
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

fn canonical_modulus(base: &FiniteField, n: usize) -> Result<Vec<u64>> {
    let p = base.p as u128;
    let count = p.pow(n as u32);
    for idx in 0..count {
        let mut coeffs: Vec<Fe> = Vec::with_capacity(n + 1);
        let mut rest = idx;
        for _ in 0..n {
            coeffs.push(base.from_int((rest % p) as i64));
            rest /= p;
        }
        if coeffs[0].is_zero() {
            continue;
        }
        coeffs.push(base.one());
        let poly = Poly::new(coeffs);
        if poly.is_irreducible(base) {
            return Ok(poly.coeffs().iter().map(|c| c.0[0]).collect());
        }
    }
    Err(Error::UnsupportedField(format!("no irreducible of degree {n}")))
}

/// A field embedding `small -> big`, determined by the image of the generator of `small`.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub small: Arc<FiniteField>,
    pub big: Arc<FiniteField>,
    gen_image: Fe,
}

impl Embedding {
    pub fn identity(field: &Arc<FiniteField>) -> Self {
        Embedding { small: field.clone(), big: field.clone(), gen_image: field.generator() }
    }

    /// Embeds `small` into `big` by sending the generator to the smallest root of its modulus.
    pub fn new(small: &Arc<FiniteField>, big: &Arc<FiniteField>) -> Result<Self> {
        if small.p != big.p || big.degree % small.degree != 0 {
            return Err(Error::UnsupportedField(format!(
                "{} does not embed in {}",
                small.name(),
                big.name()
            )));
        }
        if small.degree == 1 {
            return Ok(Embedding { small: small.clone(), big: big.clone(), gen_image: big.zero() });
        }
        if Arc::ptr_eq(small, big) || **small == **big {
            return Ok(Self::identity(small));
        }
        let m = Poly::new(small.modulus.iter().map(|&c| big.from_int(c as i64)).collect());
        let roots = m.roots(big);
        let gen_image = roots
            .into_iter()
            .min_by_key(|r| big.index(r))
            .ok_or_else(|| Error::UnsupportedField("modulus has no root in target".into()))?;
        Ok(Embedding { small: small.clone(), big: big.clone(), gen_image })
    }

    pub fn apply(&self, a: &Fe) -> Fe {
        if self.small.degree == 1 {
            return self.big.from_int(a.0[0] as i64);
        }
        // Horner in the generator image
        let mut acc = self.big.zero();
        for &c in a.0.iter().rev() {
            acc = self.big.mul(&acc, &self.gen_image);
            acc = self.big.add(&acc, &self.big.from_int(c as i64));
        }
        acc
    }

    pub fn apply_poly(&self, f: &Poly) -> Poly {
        Poly::new(f.coeffs().iter().map(|c| self.apply(c)).collect())
    }
}

/// `F_q[t]/(pi)` realised as a canonical field, with the map from `F_q[t]`.
#[derive(Clone, Debug)]
pub struct ResidueExtension {
    pub embedding: Embedding,
    /// Image of `t`.
    pub root: Fe,
}

impl ResidueExtension {
    /// `pi` must be monic irreducible over `base`.
    pub fn new(base: &Arc<FiniteField>, pi: &Poly) -> Result<Self> {
        let d = pi.degree().ok_or(Error::ZeroInput)?;
        if d == 0 {
            return Err(Error::invalid("residue extension by a constant"));
        }
        let big = FiniteField::new(base.p, base.degree * d)?;
        let embedding = Embedding::new(base, &big)?;
        let image = embedding.apply_poly(pi);
        let root = image
            .roots(&big)
            .into_iter()
            .min_by_key(|r| big.index(r))
            .ok_or_else(|| Error::invalid("polynomial is not irreducible"))?;
        Ok(ResidueExtension { embedding, root })
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.embedding.big
    }

    /// Reduction of `f in F_q[t]` modulo `pi`.
    pub fn reduce(&self, f: &Poly) -> Fe {
        let big = &self.embedding.big;
        let mut acc = big.zero();
        for c in f.coeffs().iter().rev() {
            acc = big.mul(&acc, &self.root);
            acc = big.add(&acc, &self.embedding.apply(c));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_f9_modulus() {
        let f9 = FiniteField::new(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        assert_eq!(f9.order(), 9);
    }

    #[test]
    fn rejects_characteristic_two() {
        assert!(matches!(FiniteField::new(2, 1), Err(Error::UnsupportedField(_))));
        assert!(FiniteField::new(9, 1).is_err());
    }

    #[test]
    fn euler_examples() {
        let f5 = FiniteField::prime(5).unwrap();
        assert!(f5.is_square(&f5.one()).unwrap());
        let f3 = FiniteField::prime(3).unwrap();
        assert!(!f3.is_square(&f3.from_int(2)).unwrap());
        assert_eq!(f3.is_square(&f3.zero()), Err(Error::ZeroInput));
    }

    #[test]
    fn sqrt_is_a_root_in_extensions() {
        for (p, n) in [(3, 1), (5, 1), (3, 2), (7, 2), (3, 3)] {
            let f = FiniteField::new(p, n).unwrap();
            for a in f.elements().skip(1) {
                let sq = f.square(&a);
                let r = f.sqrt(&sq).unwrap();
                assert_eq!(f.square(&r), sq);
            }
        }
    }

    #[test]
    fn inverse_and_enumeration() {
        let f = FiniteField::new(5, 2).unwrap();
        for i in 1..f.order() {
            let a = f.element(i);
            assert_eq!(f.index(&a), i);
            assert!(f.is_one(&f.mul(&a, &f.inv(&a).unwrap())));
        }
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let f9 = FiniteField::new(3, 2).unwrap();
        let f81 = FiniteField::new(3, 4).unwrap();
        let e = Embedding::new(&f9, &f81).unwrap();
        for a in f9.elements() {
            for b in f9.elements() {
                assert_eq!(e.apply(&f9.mul(&a, &b)), f81.mul(&e.apply(&a), &e.apply(&b)));
                assert_eq!(e.apply(&f9.add(&a, &b)), f81.add(&e.apply(&a), &e.apply(&b)));
            }
        }
    }
}
