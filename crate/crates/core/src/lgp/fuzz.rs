use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::FiniteField;
use crate::lgp::{verdict, ScanBounds, Verdict};
use crate::places::PlaceJson;
use crate::weierstrass::{irreducibility, normalize_form, APoly, CoefficientJson, DistinguishedPoly, Dvr, Irreducibility, NormalizedForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FuzzParams {
    /// Residue characteristic of `k = F_p`.
    pub p: u64,
    pub rank_min: usize,
    pub rank_max: usize,
    pub factor_degree_max: usize,
    pub trials: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    pub form: Vec<CoefficientJson>,
    pub verdict: String,
    /// Obstructing place or witness vector.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
    pub bounds: ScanBounds,
    pub millis: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FuzzCounts {
    pub obstructed: usize,
    pub isotropic: usize,
    pub undecided: usize,
    pub violations: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FuzzReport {
    pub params: FuzzParams,
    pub bounds: ScanBounds,
    pub counts: FuzzCounts,
    pub undecided: Vec<usize>,
    /// Trials obstructed only at a blow-up place.
    pub deep_obstructions: Vec<usize>,
    /// Dumps of consistency violations.
    pub violations: Vec<String>,
    pub trials: Vec<TrialRecord>,
}

fn trial_seed(master: u64, i: usize) -> u64 {
    master.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64).rotate_left(17) ^ 0x5851_F42D_4C95_7F2D
}

/// Irreducible distinguished polynomial of `y`-degree `1..=dmax` with
/// coefficients of `x`-degree at most 2.
fn random_factor(r: &Dvr, dmax: usize, rng: &mut ChaCha8Rng) -> Result<DistinguishedPoly> {
    let p = r.residue_field().characteristic();
    loop {
        let m = rng.gen_range(1..=dmax);
        let mut s = format!("y^{m}");
        for j in 0..m {
            for i in 1..=2 {
                let c = rng.gen_range(0..p);
                if c != 0 {
                    s += &format!(" + {c}*x^{i}*y^{j}");
                }
            }
        }
        let c = r.parse_poly(&s)?;
        if r.val(&c[0]).is_none() {
            continue;
        }
        let f = DistinguishedPoly::new(r, c)?;
        match irreducibility(r, &f) {
            Ok(Irreducibility::Proved) => return Ok(f),
            Ok(Irreducibility::Asserted) | Err(Error::ReducibleFactor(_)) => {}
            Err(e) => return Err(e),
        }
    }
}

/// `lambda * x^n * prod P_j` entries with random irreducible `P_j`.
pub fn random_normalized_form(r: &Dvr, rank: usize, dmax: usize, rng: &mut ChaCha8Rng) -> Result<NormalizedForm> {
    let p = r.residue_field().characteristic();
    let mut entries = Vec::new();
    for _ in 0..rank {
        let mut e: Vec<(APoly, u32)> = vec![(vec![r.from_int(rng.gen_range(1..p) as i64)], 1)];
        if rng.gen_bool(0.5) {
            e.push((vec![r.uniformizer()], 1));
        }
        for _ in 0..rng.gen_range(0..=2) {
            e.push((random_factor(r, dmax, rng)?.coeffs().to_vec(), 1));
        }
        entries.push(e);
    }
    normalize_form(r, &entries)
}

fn run_trial(
    r: &Dvr,
    params: &FuzzParams,
    b: &ScanBounds,
    index: usize,
    seed: u64,
) -> Result<(TrialRecord, Option<String>, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank = rng.gen_range(params.rank_min..=params.rank_max);
    let q = random_normalized_form(r, rank, params.factor_degree_max, &mut rng)?;
    let form = q.coeffs.iter().map(|c| c.to_json(r)).collect();
    let bounds = ScanBounds { seed, ..*b };
    let start = Instant::now();
    let result = verdict(&q, &bounds);
    let millis = start.elapsed().as_millis() as u64;
    let mut deep = false;
    let (kind, detail, violation) = match result {
        Ok(rep) => match &rep.verdict {
            Verdict::Obstructed { place, label, .. } => {
                deep = matches!(place, PlaceJson::Blowup { .. });
                ("OBSTRUCTED".to_string(), Some(serde_json::json!({ "place": label })), None)
            }
            Verdict::Isotropic { witness } => ("ISOTROPIC".into(), Some(serde_json::to_value(witness).unwrap()), None),
            Verdict::Undecided { reason } => ("UNDECIDED".into(), Some(serde_json::json!({ "reason": reason })), None),
        },
        Err(Error::ConsistencyViolation(dump)) => ("CONSISTENCY_VIOLATION".into(), None, Some(dump)),
        Err(e) => return Err(e),
    };
    Ok((TrialRecord { index, seed, form, verdict: kind, detail, bounds, millis }, violation, deep))
}

/// Runs `verdict` on `trials` random normalized forms over `F_p[[x]]`;
/// the outcome depends only on the parameters and the seed in `b`.
pub fn fuzz(params: &FuzzParams, b: &ScanBounds) -> Result<FuzzReport> {
    b.validate()?;
    if params.rank_min == 0 || params.rank_min > params.rank_max || params.factor_degree_max == 0 {
        return Err(Error::invalid("fuzz needs 1 <= rank_min <= rank_max and factor_degree_max >= 1"));
    }
    let r = Dvr::power_series(FiniteField::prime(params.p)?, "x", b.precision);
    let results: Vec<_> = (0..params.trials)
        .into_par_iter()
        .map(|i| run_trial(&r, params, b, i, trial_seed(b.seed, i)))
        .collect::<Result<_>>()?;
    let mut counts = FuzzCounts::default();
    let mut undecided = Vec::new();
    let mut deep_obstructions = Vec::new();
    let mut violations = Vec::new();
    let mut trials = Vec::new();
    for (rec, violation, deep) in results {
        match rec.verdict.as_str() {
            "OBSTRUCTED" => counts.obstructed += 1,
            "ISOTROPIC" => counts.isotropic += 1,
            "UNDECIDED" => {
                counts.undecided += 1;
                undecided.push(rec.index);
            }
            _ => counts.violations += 1,
        }
        if deep {
            deep_obstructions.push(rec.index);
        }
        if let Some(v) = violation {
            violations.push(v);
        }
        trials.push(rec);
    }
    Ok(FuzzReport { params: *params, bounds: *b, counts, undecided, deep_obstructions, violations, trials })
}
