use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::fields::{Elem, Embedding, Fe, FiniteField, Poly, ResidueExtension, Tower};
use crate::weierstrass::{irreducibility, APoly, DistinguishedPoly, Dvr, Irreducibility};

/// The residue field `K[y]/(f)` of the `f`-adic place, a complete field with
/// ramification `e` over `K = k((x))` and residue field `F_Q` of degree `g`.
///
/// For a single Newton slope `h/e` the class `gamma` of `theta^e / x^h`
/// (`theta` the class of `y`) is a root of the residual polynomial and
/// generates `F_Q`; `varpi = theta^a x^b` with `a*h + b*e = 1` is a
/// uniformizer.
#[derive(Clone, Debug)]
pub struct GenericResidue {
    pub f: DistinguishedPoly,
    pub e: i64,
    pub g: usize,
    h: i64,
    a: i64,
    b: i64,
    pub field: Arc<FiniteField>,
    embedding: Embedding,
    gamma: Fe,
}

impl GenericResidue {
    pub fn new(r: &Dvr, f: &DistinguishedPoly) -> Result<Self> {
        let k = r.residue_field();
        let m = f.degree();
        let unsupported = |why: &str| Error::UnsupportedPlace(format!("{}: {why}", f.format(r)));
        if m == 0 {
            return Err(unsupported("constant polynomial"));
        }
        if m == 1 {
            return Ok(GenericResidue {
                f: f.clone(),
                e: 1,
                g: 1,
                h: 1,
                a: 0,
                b: 1,
                field: k.clone(),
                embedding: Embedding::identity(&k),
                gamma: k.one(),
            });
        }
        match irreducibility(r, f) {
            Ok(Irreducibility::Proved) => {}
            Ok(Irreducibility::Asserted) => return Err(unsupported("outside the single-slope class")),
            Err(e) => return Err(e),
        }
        let c = f.coeffs();
        let v0 = r.val(&c[0]).expect("irreducible of degree > 1");
        let mi = m as i64;
        let g = v0.gcd(&mi);
        let (e, h) = (mi / g, v0 / g);
        let ext = h.extended_gcd(&e);
        let (a, b) = (ext.x, ext.y);
        let mut res = Vec::new();
        for i in 0..=g {
            let j = (i * e) as usize;
            let shifted = r.shift_down(&c[j], h * (g - i))?;
            res.push(if r.val(&shifted).is_some_and(|v| v == 0) { r.residue(&shifted)? } else { k.zero() });
        }
        let residual = Poly::new(res).monic(&k);
        let (field, embedding, gamma) = if g == 1 {
            let root = k.neg(&residual.coeff(0, &k));
            (k.clone(), Embedding::identity(&k), root)
        } else {
            let ext = ResidueExtension::new(&k, &residual)?;
            (ext.field().clone(), ext.embedding.clone(), ext.root.clone())
        };
        Ok(GenericResidue { f: f.clone(), e, g: g as usize, h, a, b, field, embedding, gamma })
    }

    pub fn descriptor(&self, r: &Dvr) -> String {
        format!("{}[y]/({}), e={}, f={}, residue {}", r.field().name(), self.f.format(r), self.e, self.g, self.field.name())
    }

    /// `(w(u), residue of u / varpi^w(u))` for `u = lambda`.
    pub fn of_constant(&self, r: &Dvr, lambda: &Elem) -> Result<(i64, Fe)> {
        Ok((0, self.embedding.apply(&r.residue(lambda)?)))
    }

    /// Data of `x`: valuation `e`, residue `gamma^(-a)`.
    pub fn of_x(&self) -> Result<(i64, Fe)> {
        Ok((self.e, self.field.pow_i64(&self.gamma, -self.a)?))
    }

    /// Data of the class of `p` in `K[y]/(f)`.
    pub fn of_poly(&self, r: &Dvr, p: &APoly) -> Result<(i64, Fe)> {
        let (_, rem) = r.poly_divrem_monic(p, self.f.coeffs())?;
        let mut best: Option<i64> = None;
        let mut bound: Option<i64> = None;
        for (j, c) in rem.iter().enumerate() {
            let Some(v) = r.val(c) else { continue };
            let w = self.e * v + self.h * j as i64;
            if r.field().is_zero(c).is_err() {
                bound = Some(bound.map_or(w, |b: i64| b.min(w)));
            } else {
                best = Some(best.map_or(w, |b: i64| b.min(w)));
            }
        }
        let Some(w) = best else {
            return Err(Error::precision(format!("class modulo {} is not determined", self.f.format(r))));
        };
        if bound.is_some_and(|b| b <= w) {
            return Err(Error::precision(format!("valuation modulo {} is not determined", self.f.format(r))));
        }
        let mut acc = self.field.zero();
        for (j, c) in rem.iter().enumerate() {
            let Some(v) = r.val(c) else { continue };
            if r.field().is_zero(c).is_err() || self.e * v + self.h * j as i64 != w {
                continue;
            }
            let lead = r.residue(&r.shift_down(c, v)?)?;
            let s = (j as i64 - self.a * w) / self.e;
            let term = self.field.mul(&self.embedding.apply(&lead), &self.field.pow_i64(&self.gamma, s)?);
            acc = self.field.add(&acc, &term);
        }
        if acc.is_zero() {
            return Err(Error::ConsistencyViolation("leading residues cancelled".into()));
        }
        let _ = self.b;
        Ok((w, acc))
    }

    /// The complete residue field as a tower, uniformizer named `x` when it is `x`.
    pub fn tower(&self) -> Tower {
        let var = if self.e == 1 && self.a == 0 { "x" } else { "s" };
        Tower::laurent(Tower::Finite(self.field.clone()), var, 1)
    }
}
