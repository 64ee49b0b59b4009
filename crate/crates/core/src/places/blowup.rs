use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{BiPoly, Embedding, Fe, FiniteField, Poly};

/// Default cap on `[kappa' : k]` for extension steps.
pub const DEFAULT_DEGREE_CAP: usize = 8;

/// One center on the newest exceptional curve, in the `y/x`-type chart
/// parameter `t` of that curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BlowupStep {
    /// The origin of the chart; as the first step, the origin of the special fiber.
    Origin,
    /// `t = value`, a value in the base residue field.
    Value { value: String },
    /// `t = value` with `value` in the named extension, e.g. `F9` and `a + 1`.
    Ext { field: String, value: String },
    /// The point `t = infinity`.
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupChain {
    pub steps: Vec<BlowupStep>,
}

/// Coordinates of `x` and `y` on the chart `(u, t)` around the last
/// exceptional curve `u = 0`, stored as polynomials in `(u, t)`.
#[derive(Clone, Debug)]
pub struct ResolvedChain {
    pub field: Arc<FiniteField>,
    pub embedding: Embedding,
    pub x_map: BiPoly,
    pub y_map: BiPoly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartRecord {
    pub field: String,
    pub x: String,
    pub y: String,
}

/// `v(f)` along the last exceptional curve and the restriction of
/// `f / u^v` to that curve, a polynomial in the chart parameter `t`.
#[derive(Clone, Debug)]
pub struct BlowupValue {
    pub value: i64,
    pub residue: Poly,
    pub chart: ChartRecord,
}

fn uv(f: &FiniteField) -> (BiPoly, BiPoly) {
    (BiPoly::x(f), BiPoly::y(f))
}

impl BlowupChain {
    pub fn new(steps: Vec<BlowupStep>) -> Self {
        BlowupChain { steps }
    }

    pub fn origin() -> Self {
        BlowupChain { steps: vec![BlowupStep::Origin] }
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self
            .steps
            .iter()
            .map(|s| match s {
                BlowupStep::Origin => "origin".into(),
                BlowupStep::Value { value } => value.clone(),
                BlowupStep::Ext { field, value } => format!("{value} in {field}"),
                BlowupStep::Infinity => "inf".into(),
            })
            .collect();
        format!("[{}]", parts.join(", "))
    }

    /// Residue field of the last exceptional curve's constants and the
    /// chart maps, with extension steps adjoined to `k`.
    pub fn resolve(&self, k: &Arc<FiniteField>, cap: usize) -> Result<ResolvedChain> {
        let Some(BlowupStep::Origin) = self.steps.first() else {
            return Err(Error::UnsupportedCenter("a chain must start at the origin of the special fiber".into()));
        };
        let mut degree = k.degree();
        let mut exts = Vec::new();
        for s in &self.steps {
            if let BlowupStep::Ext { field, value } = s {
                let crate::fields::Tower::Finite(e) = crate::fields::Tower::parse_descriptor(field, 1)? else {
                    return Err(Error::UnsupportedField(field.clone()));
                };
                if e.characteristic() != k.characteristic() {
                    return Err(Error::UnsupportedField(format!("{field} has the wrong characteristic")));
                }
                degree = degree.lcm(&e.degree());
                exts.push((e.clone(), parse_fe(&e, value)?));
            }
        }
        if degree / k.degree() > cap {
            return Err(Error::DegreeCapExceeded(format!(
                "residue extension of degree {} exceeds the cap {cap}",
                degree / k.degree()
            )));
        }
        let big = FiniteField::new(k.characteristic(), degree)?;
        let embedding = Embedding::new(k, &big)?;
        let f = &*big;
        let (u, w) = uv(f);
        let mut exts = exts.into_iter();
        // state maps in the coordinates (u, w) of the current center
        let mut state = (u.clone(), w.clone());
        let blow = |m: &(BiPoly, BiPoly)| {
            let ut = u.mul(&w, f);
            (m.0.compose(&u, &ut, f), m.1.compose(&u, &ut, f))
        };
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                let chart = blow(&state);
                let shift = |c: &Fe| -> (BiPoly, BiPoly) {
                    let wc = w.add(&BiPoly::constant(c.clone()), f);
                    (chart.0.compose(&u, &wc, f), chart.1.compose(&u, &wc, f))
                };
                let next = match s {
                    BlowupStep::Origin => shift(&f.zero()),
                    BlowupStep::Value { value } => shift(&embedding.apply(&parse_fe(k, value)?)),
                    BlowupStep::Ext { .. } => {
                        let (e, c) = exts.next().expect("collected above");
                        shift(&Embedding::new(&e, &big)?.apply(&c))
                    }
                    BlowupStep::Infinity => {
                        // other chart: (a, b) -> (u * w, u)
                        let uw = u.mul(&w, f);
                        (state.0.compose(&uw, &u, f), state.1.compose(&uw, &u, f))
                    }
                };
                state = next;
            }
        }
        let last = blow(&state);
        Ok(ResolvedChain { field: big.clone(), embedding, x_map: last.0, y_map: last.1 })
    }
}

fn parse_fe(f: &Arc<FiniteField>, src: &str) -> Result<Fe> {
    let t = crate::fields::Tower::Finite(f.clone());
    match t.parse_elem(src)? {
        crate::fields::Elem::Fin(c) => Ok(c),
        _ => unreachable!(),
    }
}

impl ResolvedChain {
    pub fn chart(&self) -> ChartRecord {
        let f = &self.field;
        let rename = |p: &BiPoly| p.format(f).replace('x', "u").replace('y', "t");
        ChartRecord { field: f.name(), x: rename(&self.x_map), y: rename(&self.y_map) }
    }

    /// Order of `x` along the last exceptional curve.
    pub fn x_value(&self) -> i64 {
        self.x_map.x_order().expect("x map is nonzero") as i64
    }

    /// Valuation of `f in k[x, y]`, known modulo `x^known` when `known` is set.
    pub fn value(&self, f: &BiPoly, known: Option<usize>) -> Result<BlowupValue> {
        if f.is_zero() {
            return Err(Error::ZeroInput);
        }
        let big = &*self.field;
        let limit = known.map(|n| n as i64 * self.x_value());
        let g = f.map(&self.embedding);
        let g = match limit {
            Some(l) => truncated_compose(&g, &self.x_map, &self.y_map, l as usize, big),
            None => g.compose(&self.x_map, &self.y_map, big),
        };
        let Some(v) = g.x_order() else {
            return Err(Error::precision("transform vanishes below the known precision"));
        };
        if limit.is_some_and(|l| v as i64 >= l) {
            return Err(Error::precision("blow-up value is not determined at input precision"));
        }
        Ok(BlowupValue { value: v as i64, residue: g.x_coeff(v, big), chart: self.chart() })
    }
}

/// `f(xs, ys)` keeping `u`-degrees below `limit`.
fn truncated_compose(f: &BiPoly, xs: &BiPoly, ys: &BiPoly, limit: usize, big: &FiniteField) -> BiPoly {
    let mut xp = vec![BiPoly::one(big)];
    let mut yp = vec![BiPoly::one(big)];
    let mut out = BiPoly::zero();
    for (&(i, j), c) in f.terms() {
        while xp.len() <= i {
            let n = xp.last().unwrap().mul(xs, big).truncate_x(limit);
            xp.push(n);
        }
        while yp.len() <= j {
            let n = yp.last().unwrap().mul(ys, big).truncate_x(limit);
            yp.push(n);
        }
        out = out.add(&xp[i].mul(&yp[j], big).truncate_x(limit).scale(c, big), big);
    }
    out
}

/// `v(f)` on `k[x, y]` for the divisorial valuation of the chain.
pub fn blowup_valuation(chain: &BlowupChain, k: &Arc<FiniteField>, f: &BiPoly) -> Result<BlowupValue> {
    chain.resolve(k, DEFAULT_DEGREE_CAP)?.value(f, None)
}
