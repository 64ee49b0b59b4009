use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{BiPoly, Elem, Fe, FiniteField, Tower};
use crate::places::{coefficients, to_bipoly};
use crate::springer::{decide_isotropy, DiagonalForm};
use crate::weierstrass::NormalizedForm;

/// Leaf evaluations allowed across the exhaustive stages of one search.
pub const SEARCH_BUDGET: u64 = 2_000_000;
/// A subset is searched exhaustively when its space has at most this size.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;
const RANDOM_SAMPLES: usize = 2_000;
const TABLE_LIMIT: usize = 1024;

/// A diagonal form with entries in `k[x, y]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalForm {
    pub field: Arc<FiniteField>,
    pub entries: Vec<BiPoly>,
}

impl GlobalForm {
    pub fn new(field: Arc<FiniteField>, entries: Vec<BiPoly>) -> Result<Self> {
        if entries.iter().any(|e| e.is_zero()) {
            return Err(Error::ZeroInput);
        }
        Ok(GlobalForm { field, entries })
    }

    /// `lambda * x^n * prod P_j` for each normalized coefficient, the factors
    /// taken at their stored truncation.
    pub fn from_normalized(q: &NormalizedForm) -> Result<Self> {
        let r = &q.ring;
        let k = r.residue_field();
        let mut entries = Vec::new();
        for c in coefficients(q)? {
            let mut e = BiPoly::constant(c.lambda.clone());
            if c.n == 1 {
                e = e.shift(1, 0);
            }
            for p in &c.factors {
                e = e.mul(&to_bipoly(r, p.coeffs()).0, &k);
            }
            entries.push(e);
        }
        GlobalForm::new(k, entries)
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn evaluate(&self, v: &[BiPoly]) -> BiPoly {
        let k = &*self.field;
        let mut s = BiPoly::zero();
        for (a, x) in self.entries.iter().zip(v) {
            s = s.add(&a.mul(&x.mul(x, k), k), k);
        }
        s
    }

    pub fn format_entries(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.format(&self.field)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    /// `q(v) = 0` in `k[x, y]`.
    Exact,
    /// `q(v)` vanishes to order `precision` at the origin and
    /// `a_j v_j^2` is a unit of `k[[x, y]]`: the `j`-th coordinate
    /// corrects to an exact zero by a square root of a one-unit.
    Hensel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalWitness {
    pub kind: WitnessKind,
    pub vector: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub precision: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pivot: Option<usize>,
}

impl GlobalWitness {
    fn exact(q: &GlobalForm, v: &[BiPoly]) -> Self {
        GlobalWitness {
            kind: WitnessKind::Exact,
            vector: v.iter().map(|c| c.format(&q.field)).collect(),
            precision: None,
            pivot: None,
        }
    }
}

/// Checks a witness independently of how it was found.
pub fn certify_global_witness(q: &GlobalForm, w: &GlobalWitness) -> Result<bool> {
    let k = &*q.field;
    if w.vector.len() != q.rank() {
        return Err(Error::invalid("vector length differs from rank"));
    }
    let v = w.vector.iter().map(|s| BiPoly::parse(s, k)).collect::<Result<Vec<_>>>()?;
    if v.iter().all(|c| c.is_zero()) {
        return Ok(false);
    }
    let value = q.evaluate(&v);
    match w.kind {
        WitnessKind::Exact => Ok(value.is_zero()),
        WitnessKind::Hensel => {
            let (Some(n), Some(j)) = (w.precision, w.pivot) else {
                return Ok(false);
            };
            let unit = |p: &BiPoly| p.coeff(0, 0).is_some_and(|c| !c.is_zero());
            if j >= q.rank() || !unit(&q.entries[j]) || !unit(&v[j]) {
                return Ok(false);
            }
            Ok(value.order().map_or(true, |o| o >= n))
        }
    }
}

/// Dense arithmetic on element indices.
struct Tables {
    q: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
}

impl Tables {
    fn new(k: &FiniteField) -> Result<Self> {
        let q = k.order() as usize;
        if q > 256 {
            return Err(Error::UnsupportedField(format!("witness search supports fields of order <= 256, not {}", k.name())));
        }
        let el: Vec<Fe> = k.elements().collect();
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for i in 0..q {
            for j in 0..q {
                add[i * q + j] = k.index(&k.add(&el[i], &el[j])) as u16;
                mul[i * q + j] = k.index(&k.mul(&el[i], &el[j])) as u16;
            }
        }
        Ok(Tables { q, add, mul })
    }

    fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.q + b as usize]
    }

    fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.q + b as usize]
    }
}

/// Polynomials of bidegree at most `(a, b)`, indexed by their digits.
struct Stage<'a> {
    q: &'a GlobalForm,
    a: usize,
    b: usize,
    size: u64,
    gx: usize,
    grid: usize,
    /// `table[i][d]` = dense `a_i * d^2`.
    table: Option<Vec<Vec<Vec<u16>>>>,
}

impl<'a> Stage<'a> {
    fn new(q: &'a GlobalForm, t: &Tables, a: usize, b: usize) -> Self {
        let cells = (a + 1) * (b + 1);
        let size = (t.q as u64).checked_pow(cells as u32).unwrap_or(u64::MAX);
        let dx = q.entries.iter().filter_map(|e| e.degree_x()).max().unwrap_or(0);
        let dy = q.entries.iter().filter_map(|e| e.degree_y()).max().unwrap_or(0);
        let gx = dx + 2 * a + 1;
        let grid = gx * (dy + 2 * b + 1);
        let mut st = Stage { q, a, b, size, gx, grid, table: None };
        if size <= TABLE_LIMIT as u64 {
            let k = &*q.field;
            let table = q
                .entries
                .iter()
                .map(|e| (0..size).map(|d| st.dense(&e.mul(&st.poly(d).pow(2, k), k))).collect())
                .collect();
            st.table = Some(table);
        }
        st
    }

    fn poly(&self, mut d: u64) -> BiPoly {
        let k = &*self.q.field;
        let qn = k.order() as u64;
        let mut terms = Vec::new();
        for j in 0..=self.b {
            for i in 0..=self.a {
                let digit = d % qn;
                d /= qn;
                if digit != 0 {
                    terms.push(((i, j), k.element(digit as u128)));
                }
            }
        }
        BiPoly::from_terms(terms, k)
    }

    fn dense(&self, p: &BiPoly) -> Vec<u16> {
        let k = &*self.q.field;
        let mut v = vec![0u16; self.grid];
        for (&(i, j), c) in p.terms() {
            v[i + self.gx * j] = k.index(c) as u16;
        }
        v
    }

    /// First zero with support exactly `s`, scanning every combination.
    fn exhaustive(&self, t: &Tables, s: &[usize], budget: &mut u64) -> Option<Vec<u64>> {
        let table = self.table.as_ref()?;
        let mut partial = vec![vec![0u16; self.grid]; s.len() + 1];
        let mut choice = vec![1u64; s.len()];
        self.dfs(t, table, s, 0, &mut partial, &mut choice, budget).then_some(choice)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        t: &Tables,
        table: &[Vec<Vec<u16>>],
        s: &[usize],
        level: usize,
        partial: &mut [Vec<u16>],
        choice: &mut [u64],
        budget: &mut u64,
    ) -> bool {
        for d in 1..self.size {
            let (lo, hi) = partial.split_at_mut(level + 1);
            let row = &table[s[level]][d as usize];
            for ((o, &p), &r) in hi[0].iter_mut().zip(&lo[level]).zip(row) {
                *o = t.add(p, r);
            }
            choice[level] = d;
            if level + 1 == s.len() {
                if *budget == 0 {
                    return false;
                }
                *budget -= 1;
                if hi[0].iter().all(|&c| c == 0) {
                    return true;
                }
            } else if self.dfs(t, table, s, level + 1, partial, choice, budget) {
                return true;
            }
            if *budget == 0 {
                return false;
            }
        }
        false
    }
}

fn subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, s, &mut Vec::new(), &mut out);
    out
}

/// Bidegrees up to `(dx, dy)` by increasing total, then by `y`-degree.
fn stages(dx: usize, dy: usize) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = (0..=dx).flat_map(|a| (0..=dy).map(move |b| (a, b))).collect();
    v.sort_by_key(|&(a, b)| (a + b, std::cmp::Reverse(b)));
    v
}

/// Vector with coordinates in `k[x][y]` of bidegree at most `(dx, dy)` on
/// which `q` vanishes, else a truncated-series zero certified by Hensel's
/// lemma at the origin to order `precision`.
pub fn witness_search(q: &GlobalForm, dx: usize, dy: usize, precision: usize, seed: u64) -> Result<GlobalWitness> {
    match exact_witness_search(q, dx, dy, seed)? {
        Some(w) => Ok(w),
        None => hensel_at_origin(q, precision),
    }
}

/// The polynomial stage of [`witness_search`] alone.
pub fn exact_witness_search(q: &GlobalForm, dx: usize, dy: usize, seed: u64) -> Result<Option<GlobalWitness>> {
    let k = &*q.field;
    let r = q.rank();
    if r < 2 {
        return Ok(None);
    }
    let t = Tables::new(k)?;
    let mut budget = SEARCH_BUDGET;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (a, b) in stages(dx, dy) {
        let st = Stage::new(q, &t, a, b);
        let mut partial_cover = false;
        for size in 2..=r {
            let space = (st.size - 1).checked_pow(size as u32).unwrap_or(u64::MAX);
            for s in subsets(r, size) {
                if space <= EXHAUSTIVE_LIMIT && st.table.is_some() && budget >= space {
                    if let Some(choice) = st.exhaustive(&t, &s, &mut budget) {
                        let mut v = vec![BiPoly::zero(); r];
                        for (&i, &d) in s.iter().zip(&choice) {
                            v[i] = st.poly(d);
                        }
                        return Ok(Some(GlobalWitness::exact(q, &v)));
                    }
                } else {
                    partial_cover = true;
                }
            }
        }
        if partial_cover {
            if let Some(v) = sample(q, &t, &st, &mut rng) {
                return Ok(Some(GlobalWitness::exact(q, &v)));
            }
        }
    }
    Ok(None)
}

fn sample(q: &GlobalForm, t: &Tables, st: &Stage, rng: &mut ChaCha8Rng) -> Option<Vec<BiPoly>> {
    let k = &*q.field;
    let r = q.rank();
    let entries: Vec<Vec<(usize, usize, u16)>> = q
        .entries
        .iter()
        .map(|e| e.terms().map(|(&(i, j), c)| (i, j, k.index(c) as u16)).collect())
        .collect();
    let (w, h) = (st.a + 1, st.b + 1);
    let (sw, sh) = (2 * st.a + 1, 2 * st.b + 1);
    let mut sum = vec![0u16; st.grid];
    let mut sq = vec![0u16; sw * sh];
    for _ in 0..RANDOM_SAMPLES {
        sum.iter_mut().for_each(|c| *c = 0);
        let size = rng.gen_range(2..=r);
        let mut idx: Vec<usize> = (0..r).collect();
        let mut chosen = Vec::with_capacity(size);
        for i in 0..size {
            let j = rng.gen_range(i..r);
            idx.swap(i, j);
            let d: Vec<u16> = loop {
                let d: Vec<u16> = (0..w * h).map(|_| rng.gen_range(0..t.q) as u16).collect();
                if d.iter().any(|&c| c != 0) {
                    break d;
                }
            };
            sq.iter_mut().for_each(|c| *c = 0);
            for (p1, &c1) in d.iter().enumerate().filter(|(_, c)| **c != 0) {
                for (p2, &c2) in d.iter().enumerate().filter(|(_, c)| **c != 0) {
                    let pos = (p1 % w + p2 % w) + sw * (p1 / w + p2 / w);
                    sq[pos] = t.add(sq[pos], t.mul(c1, c2));
                }
            }
            for &(ei, ej, c) in &entries[idx[i]] {
                for (pos, &v) in sq.iter().enumerate().filter(|(_, v)| **v != 0) {
                    let g = (ei + pos % sw) + st.gx * (ej + pos / sw);
                    sum[g] = t.add(sum[g], t.mul(c, v));
                }
            }
            chosen.push((idx[i], d));
        }
        if sum.iter().all(|&c| c == 0) {
            let mut v = vec![BiPoly::zero(); r];
            for (i, d) in chosen {
                let terms = d.iter().enumerate().filter(|(_, c)| **c != 0).map(|(p, &c)| ((p % w, p / w), k.element(c as u128)));
                v[i] = BiPoly::from_terms(terms, k);
            }
            debug_assert!(q.evaluate(&v).is_zero());
            return Some(v);
        }
    }
    None
}

fn truncate_total(p: &BiPoly, n: usize, k: &FiniteField) -> BiPoly {
    BiPoly::from_terms(p.terms().filter(|(&(i, j), _)| i + j < n).map(|(&e, c)| (e, c.clone())), k)
}

/// Square root of `1 + z` by Newton steps `s <- (s + (1 + z)/s) / 2`.
fn sqrt_newton(z: &BiPoly, n: usize, k: &FiniteField) -> Result<BiPoly> {
    let target = BiPoly::one(k).add(z, k);
    let half = k.inv(&k.from_int(2))?;
    let mut s = BiPoly::one(k);
    let mut prec = 1;
    while prec < n {
        prec = (2 * prec).min(n);
        let inv = series_inverse(&s, prec, k)?;
        s = truncate_total(&s.add(&target.mul(&inv, k), k), prec, k).scale(&half, k);
    }
    Ok(s)
}

/// Inverse of a unit of `k[[x, y]]` below total degree `n`.
fn series_inverse(u: &BiPoly, n: usize, k: &FiniteField) -> Result<BiPoly> {
    let c = u.coeff(0, 0).filter(|c| !c.is_zero()).ok_or(Error::NotAUnit)?;
    let c_inv = k.inv(c)?;
    // u = c (1 + w), 1/u = c^-1 sum (-w)^j
    let w = truncate_total(&u.scale(&c_inv, k).sub(&BiPoly::one(k), k), n, k);
    let neg_w = w.neg(k);
    let mut out = BiPoly::one(k);
    let mut pow = BiPoly::one(k);
    for _ in 1..n {
        pow = truncate_total(&pow.mul(&neg_w, k), n, k);
        if pow.is_zero() {
            break;
        }
        out = out.add(&pow, k);
    }
    Ok(out.scale(&c_inv, k))
}

/// A zero of the unit part at the origin, lifted in one coordinate.
fn hensel_at_origin(q: &GlobalForm, n: usize) -> Result<GlobalWitness> {
    let k = &q.field;
    let units: Vec<usize> =
        (0..q.rank()).filter(|&i| q.entries[i].coeff(0, 0).is_some_and(|c| !c.is_zero())).collect();
    if units.len() < 2 {
        return Err(Error::WitnessSearchExhausted);
    }
    let tower = Tower::Finite(k.clone());
    let residue: Vec<Elem> = units.iter().map(|&i| Elem::Fin(q.entries[i].coeff(0, 0).unwrap().clone())).collect();
    let d = decide_isotropy(&DiagonalForm::new(tower, residue)?)?;
    let Some(w) = d.witness.filter(|_| d.isotropic) else {
        return Err(Error::WitnessSearchExhausted);
    };
    let c: Vec<Fe> = w
        .iter()
        .map(|e| match e {
            Elem::Fin(a) => a.clone(),
            _ => unreachable!("finite field witness"),
        })
        .collect();
    let (pos, cj) = c.iter().enumerate().find(|(_, a)| !a.is_zero()).expect("nonzero witness");
    let j = units[pos];
    let mut v = vec![BiPoly::zero(); q.rank()];
    let mut rest = BiPoly::zero();
    for (&i, a) in units.iter().zip(&c) {
        if i != j && !a.is_zero() {
            v[i] = BiPoly::constant(a.clone());
            rest = rest.add(&q.entries[i].scale(&k.square(a), k), k);
        }
    }
    // v_j^2 = -rest / a_j = c_j^2 (1 + z)
    let target = truncate_total(&rest.neg(k).mul(&series_inverse(&q.entries[j], n, k)?, k), n, k);
    let z = target.scale(&k.inv(&k.square(cj))?, k).sub(&BiPoly::one(k), k);
    v[j] = sqrt_newton(&z, n, k)?.scale(cj, k);
    let w = GlobalWitness {
        kind: WitnessKind::Hensel,
        vector: v.iter().map(|p| p.format(k)).collect(),
        precision: Some(n),
        pivot: Some(j),
    };
    debug_assert!(certify_global_witness(q, &w)?);
    Ok(w)
}
