use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Poly;
use crate::weierstrass::prep::DistinguishedPoly;
use crate::weierstrass::ring::Dvr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Irreducibility {
    Proved,
    Asserted,
}

/// Newton polygon test for a distinguished polynomial.
///
/// One slope `h/e` in lowest terms with an irreducible residual polynomial
/// proves irreducibility. Several slopes, a factor `y`, or one slope with a
/// squarefree reducible residual polynomial prove reducibility and give
/// `ReducibleFactor`. Anything undetermined at the working precision or a
/// residual polynomial with repeated factors is left as an assertion.
pub fn irreducibility(r: &Dvr, p: &DistinguishedPoly) -> Result<Irreducibility> {
    let m = p.degree();
    let c = p.coeffs();
    if m <= 1 {
        return Ok(Irreducibility::Proved);
    }
    let reducible = |why: &str| Err(Error::ReducibleFactor(format!("{}: {why}", p.format(r))));
    let Some(v0) = r.val(&c[0]) else {
        return reducible("divisible by y");
    };
    if r.field().is_zero(&c[0]).is_err() {
        return Ok(Irreducibility::Asserted);
    }
    let (v0, mi) = (v0, m as i64);
    // point (j, v_j) against the segment from (0, v0) to (m, 0)
    let mut on_segment = vec![false; m + 1];
    on_segment[0] = true;
    on_segment[m] = true;
    for j in 1..m {
        let Some(vj) = r.val(&c[j]) else { continue };
        let exact = r.field().is_zero(&c[j]).is_ok();
        let lhs = vj * mi;
        let rhs = v0 * (mi - j as i64);
        if lhs < rhs {
            if exact {
                return reducible("Newton polygon has several slopes");
            }
            return Ok(Irreducibility::Asserted);
        }
        if lhs == rhs {
            if !exact {
                return Ok(Irreducibility::Asserted);
            }
            on_segment[j] = true;
        }
    }
    let g = v0.gcd(&mi) as usize;
    let e = m / g;
    let h = v0 / g as i64;
    let k = r.residue_field();
    let mut res = Vec::with_capacity(g + 1);
    for i in 0..=g {
        let j = i * e;
        if !on_segment[j] {
            res.push(k.zero());
            continue;
        }
        let shifted = r.shift_down(&c[j], h * (g - i) as i64)?;
        res.push(r.residue(&shifted)?);
    }
    let residual = Poly::new(res);
    if residual.is_irreducible(&k) {
        return Ok(Irreducibility::Proved);
    }
    let squarefree = residual.gcd(&residual.derivative(&k), &k).is_constant();
    if squarefree {
        return reducible("residual polynomial splits");
    }
    Ok(Irreducibility::Asserted)
}
