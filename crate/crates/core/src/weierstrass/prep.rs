use crate::error::{Error, Result};
use crate::fields::Elem;
use crate::weierstrass::ring::{APoly, Dvr};

/// An element of `A[[y]]`: coefficients of `y^0, y^1, ...`, known through
/// `y^(y_precision - 1)`; `None` means the polynomial is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct YSeries {
    pub coeffs: APoly,
    pub y_precision: Option<usize>,
}

impl YSeries {
    pub fn exact(coeffs: APoly) -> Self {
        YSeries { coeffs, y_precision: None }
    }

    pub fn truncated(coeffs: APoly, y_precision: usize) -> Self {
        let mut coeffs = coeffs;
        coeffs.truncate(y_precision);
        YSeries { coeffs, y_precision: Some(y_precision) }
    }
}

/// Monic in `y` with every lower coefficient in the maximal ideal of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistinguishedPoly {
    coeffs: APoly,
}

impl DistinguishedPoly {
    pub fn new(r: &Dvr, coeffs: APoly) -> Result<Self> {
        let coeffs = r.poly_reduce(&coeffs);
        let Some((lead, lower)) = coeffs.split_last() else {
            return Err(Error::invalid("zero polynomial is not distinguished"));
        };
        if !r.elem_eq(lead, &r.one()) {
            return Err(Error::invalid(format!("{} is not monic", r.format_poly(&coeffs))));
        }
        if let Some(c) = lower.iter().find(|c| r.val(c).is_some_and(|v| v < 1)) {
            return Err(Error::invalid(format!(
                "{} has the unit coefficient {}",
                r.format_poly(&coeffs),
                r.format(c)
            )));
        }
        let mut coeffs = coeffs;
        *coeffs.last_mut().unwrap() = r.one();
        Ok(DistinguishedPoly { coeffs })
    }

    pub fn one(r: &Dvr) -> Self {
        DistinguishedPoly { coeffs: vec![r.one()] }
    }

    pub fn y_power(r: &Dvr, m: usize) -> Self {
        let mut coeffs = vec![r.zero(); m];
        coeffs.push(r.one());
        DistinguishedPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &APoly {
        &self.coeffs
    }

    pub fn format(&self, r: &Dvr) -> String {
        r.format_poly(&self.coeffs)
    }
}

/// `g = Q*P + R` with `deg R < deg P`, modulo `pi^N`; `Q` through `y^(N-1)`.
///
/// A coefficient `g_j` only reaches `R` multiplied by `pi^(j - m + 1)`, so
/// the truncation of `g` below `y^(N + m)` determines `R` modulo `pi^N` and
/// polynomial long division by the monic `P` suffices.
pub fn w_divide(r: &Dvr, g: &YSeries, p: &DistinguishedPoly) -> Result<(YSeries, APoly)> {
    let n = r.precision();
    let m = p.degree();
    let need = n + m;
    if let Some(yp) = g.y_precision {
        if yp < need {
            return Err(Error::precision(format!("w_divide needs y-precision {need}, got {yp}")));
        }
    }
    let mut gt = g.coeffs.clone();
    gt.truncate(need);
    let (q, rem) = r.poly_divrem_monic(&gt, p.coeffs())?;
    let q = YSeries::truncated(q, n);
    Ok((q, rem))
}

/// Result of `w_prepare`: `f = x^n * U * P`.
#[derive(Clone, Debug, PartialEq)]
pub struct Preparation {
    pub n: u32,
    pub unit: APoly,
    pub dist: DistinguishedPoly,
}

impl Preparation {
    /// `x^n * U * P` modulo `pi^N`.
    pub fn expand(&self, r: &Dvr) -> Result<APoly> {
        let xn = r.field().pow(&r.uniformizer(), self.n as i64)?;
        let up = r.poly_mul(&self.unit, self.dist.coeffs())?;
        r.poly_scale(&up, &xn)
    }
}

/// Weierstrass preparation of a polynomial (or truncated series) in `y`.
///
/// With `g = f / x^n` and `m` the first unit coefficient, the coprime
/// factorization `g = y^m * (g / y^m)` modulo `pi` is lifted one digit at a
/// time. `U = g div P` is recomputed by monic division at each step, so it
/// stays a polynomial of degree `deg g - m`. Lifting stops once the
/// remainder has no known nonzero digit.
pub fn w_prepare(r: &Dvr, f: &YSeries) -> Result<Preparation> {
    let big_n = r.precision();
    let vals: Vec<Option<i64>> = f.coeffs.iter().map(|c| r.val(c)).collect();
    if vals.iter().all(|v| v.is_none()) {
        return Err(Error::ZeroInput);
    }
    let n = vals.iter().flatten().copied().min().unwrap();
    if n < 0 {
        return Err(Error::invalid("coefficients must be integral"));
    }
    let g: APoly = f.coeffs.iter().map(|c| r.shift_down(c, n)).collect::<Result<_>>()?;
    let Some(m) = g.iter().position(|c| r.is_unit(c)) else {
        return Err(Error::precision("content valuation is not determined at input precision"));
    };
    if let Some(yp) = f.y_precision {
        if yp < big_n + m {
            return Err(Error::precision(format!("w_prepare needs y-precision {}, got {yp}", big_n + m)));
        }
    }
    let mut g = g;
    if f.y_precision.is_some() {
        g.truncate(big_n + m);
    }
    let g = r.poly_reduce(&g);
    if m == 0 {
        return Ok(Preparation { n: n as u32, unit: g, dist: DistinguishedPoly::one(r) });
    }
    let mut p = DistinguishedPoly::y_power(r, m).coeffs;
    for _ in 0..=(2 * big_n + 2) {
        let (u, rem) = r.poly_divrem_monic(&g, &p)?;
        if rem.iter().all(|c| r.is_negligible(c) || r.field().is_zero(c).is_err()) {
            return Ok(Preparation { n: n as u32, unit: u, dist: DistinguishedPoly::new(r, p)? });
        }
        let uinv = series_inverse(r, &u, m)?;
        let d = r.poly_mul_trunc(&rem, &uinv, m)?;
        let mut padded = d;
        padded.resize(m, r.zero());
        padded.push(r.zero());
        p = r.poly_add(&p, &padded)?;
        if p.len() != m + 1 {
            p.resize(m + 1, r.zero());
            p[m] = r.one();
        }
    }
    Err(Error::ConsistencyViolation("Hensel lifting did not converge".into()))
}

/// Inverse of a `y`-series with unit constant term, through `y^(len-1)`.
pub fn series_inverse(r: &Dvr, u: &APoly, len: usize) -> Result<APoly> {
    let c0 = u.first().ok_or(Error::NotAUnit)?;
    let inv0 = r.inv_unit(c0)?;
    let mut out = vec![inv0.clone()];
    for k in 1..len {
        let mut s = r.zero();
        for j in 1..=k {
            if let Some(uj) = u.get(j) {
                s = r.add(&s, &r.mul(uj, &out[k - j])?)?;
            }
        }
        out.push(r.mul(&r.neg(&s)?, &inv0)?);
    }
    Ok(out)
}

/// `(u, u*f)` with `u` the inverse of the leading `y`-coefficient.
pub fn monicize(r: &Dvr, f: &APoly) -> Result<(Elem, DistinguishedPoly)> {
    let f = r.poly_reduce(f);
    let lead = f.last().ok_or(Error::ZeroInput)?;
    if !r.is_unit(lead) {
        return Err(Error::NotDivisorOfDistinguished(format!(
            "leading coefficient of {} is not a unit",
            r.format_poly(&f)
        )));
    }
    let u = r.inv_unit(lead)?;
    let uf = r.poly_scale(&f, &u)?;
    match DistinguishedPoly::new(r, uf) {
        Ok(d) => Ok((u, d)),
        Err(_) => Err(Error::NotDivisorOfDistinguished(format!(
            "{} is not y^{} modulo the maximal ideal",
            r.format_poly(&f),
            f.len() - 1
        ))),
    }
}

/// Smallest precision at which a truncated square certificate is accepted.
pub const MIN_SQUARE_PRECISION: usize = 8;

/// Splits a unit `f` of `A[[y]]` as `lambda * g^2` with `lambda` in the
/// digit set; `g` is returned through `y^(N-1)` with coefficients mod `pi^N`.
pub fn square_normalize(r: &Dvr, f: &YSeries) -> Result<(Elem, YSeries)> {
    let n = r.precision();
    if n < MIN_SQUARE_PRECISION {
        return Err(Error::precision(format!("square certificates need precision at least {MIN_SQUARE_PRECISION}")));
    }
    if let Some(yp) = f.y_precision {
        if yp < n {
            return Err(Error::precision(format!("square_normalize needs y-precision {n}, got {yp}")));
        }
    }
    let c0 = f.coeffs.first().ok_or(Error::NotAUnit)?;
    if !r.is_unit(c0) {
        return Err(Error::NotAUnit);
    }
    let lambda = r.sigma(&r.residue(c0)?);
    let linv = r.inv_unit(&lambda)?;
    let h = r.poly_scale(&f.coeffs, &linv)?;
    let mut g0 = r.sqrt(&h[0])?;
    if r.residue(&g0)? != r.residue_field().one() {
        g0 = r.neg(&g0)?;
    }
    let inv2g0 = r.inv_unit(&r.mul(&r.from_int(2), &g0)?)?;
    let mut g = vec![g0];
    for k in 1..n {
        let mut s = h.get(k).cloned().unwrap_or_else(|| r.zero());
        for j in 1..k {
            s = r.sub(&s, &r.mul(&g[j], &g[k - j])?)?;
        }
        g.push(r.mul(&s, &inv2g0)?);
    }
    Ok((lambda, YSeries::truncated(r.poly_trim(g), n)))
}
