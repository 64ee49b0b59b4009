use qflg::fields::{BiPoly, FiniteField};
use qflg::lgp::*;
use qflg::places::{BlowupStep, PlaceJson, PlaceSpec};
use qflg::weierstrass::{normalize_form, APoly, Dvr, NormalizedForm};

fn ring(p: u64) -> Dvr {
    Dvr::power_series(FiniteField::prime(p).unwrap(), "x", 16)
}

fn nf(r: &Dvr, entries: &[&[&str]]) -> NormalizedForm {
    let es: Vec<Vec<(APoly, u32)>> =
        entries.iter().map(|e| e.iter().map(|s| (r.parse_poly(s).unwrap(), 1)).collect()).collect();
    normalize_form(r, &es).unwrap()
}

fn labels(r: &Dvr, ps: &[PlaceSpec]) -> Vec<String> {
    ps.iter().map(|p| p.label(r)).collect()
}

#[test]
fn enumeration_examples() {
    let r = ring(3);
    let b0 = ScanBounds { blowup_depth: 0, ..Default::default() };
    let q = nf(&r, &[&["1"], &["1"], &["1"], &["x"], &["y"]]);
    assert_eq!(labels(&r, &enumerate_places(&q, &b0).unwrap()), ["gauss", "generic-point(y)", "infinity"]);
    let q = nf(&r, &[&["1"]]);
    assert_eq!(labels(&r, &enumerate_places(&q, &b0).unwrap()), ["gauss", "infinity"]);
    let q = nf(&r, &[&["1"], &["y^2 - x"]]);
    let b1 = ScanBounds { blowup_depth: 1, residue_degree_cap: 1, ..Default::default() };
    let ps = enumerate_places(&q, &b1).unwrap();
    assert!(labels(&r, &ps).contains(&"generic-point(y^2 + 2*x)".to_string()), "{:?}", labels(&r, &ps));
    let depth_one: Vec<_> = ps
        .iter()
        .filter_map(|p| match p {
            PlaceSpec::Blowup(c) if c.steps.len() == 2 => Some(c.steps[1].clone()),
            _ => None,
        })
        .collect();
    let v = |s: &str| BlowupStep::Value { value: s.into() };
    assert_eq!(depth_one, [v("0"), v("1"), v("2"), BlowupStep::Infinity]);
}

#[test]
fn chain_counts() {
    let k = FiniteField::prime(3).unwrap();
    assert_eq!(chains(&k, 0, 2).unwrap().len(), 0);
    assert_eq!(chains(&k, 1, 1).unwrap().len(), 5);
    // 1 + (4 + 3) + (4 * 7 + 3 * 10)
    assert_eq!(chains(&k, 2, 2).unwrap().len(), 66);
    let k5 = FiniteField::prime(5).unwrap();
    // points of P^1(F_5): 6 per level
    assert_eq!(chains(&k5, 2, 1).unwrap().len(), 1 + 6 + 36);
}

#[test]
fn scan_examples() {
    let r = ring(3);
    let b = ScanBounds::default();
    let s = local_scan(&nf(&r, &[&["1"], &["y"], &["x"], &["x", "y"]]), &b).unwrap();
    assert_eq!(s.obstruction.unwrap().label, "gauss");
    let s = local_scan(&nf(&r, &[&["1"], &["-1"], &["x"], &["y"], &["x", "y"]]), &b).unwrap();
    assert!(s.obstruction.is_none());
    assert!(s.log.len() > 60);
    // anisotropic at both generic points; y comes first
    let q = nf(&r, &[&["1"], &["-1", "y"], &["y - x"]]);
    let s = local_scan(&q, &b).unwrap();
    assert_eq!(s.obstruction.unwrap().label, "generic-point(y)");
    let f = qflg::weierstrass::DistinguishedPoly::new(&r, r.parse_poly("y - x").unwrap()).unwrap();
    let place = PlaceSpec::generic_point(&r, f).unwrap();
    assert!(!qflg::places::decide_local(&q, &place).unwrap().isotropic);
}

fn global(k: &std::sync::Arc<FiniteField>, entries: &[&str]) -> GlobalForm {
    GlobalForm::new(k.clone(), entries.iter().map(|s| BiPoly::parse(s, k).unwrap()).collect()).unwrap()
}

#[test]
fn witness_examples() {
    let k = FiniteField::prime(3).unwrap();
    let q = global(&k, &["1", "1", "1", "x", "y"]);
    let w = witness_search(&q, 4, 4, 16, 0).unwrap();
    assert_eq!(w.kind, WitnessKind::Exact);
    assert_eq!(w.vector, ["1", "1", "1", "0", "0"]);
    let q = global(&k, &["1", "-y^2"]);
    assert_eq!(witness_search(&q, 4, 4, 16, 0).unwrap().vector, ["y", "1"]);
    let q = global(&k, &["1", "y", "x", "x*y"]);
    assert_eq!(witness_search(&q, 4, 4, 16, 0), Err(qflg::Error::WitnessSearchExhausted));
}

#[test]
fn hensel_fallback() {
    let k = FiniteField::prime(3).unwrap();
    // 1 + y is a square in k[[y]] but not in k[x, y]
    let q = global(&k, &["1", "-1 - y"]);
    let w = witness_search(&q, 1, 1, 12, 0).unwrap();
    assert_eq!(w.kind, WitnessKind::Hensel);
    assert!(certify_global_witness(&q, &w).unwrap());
    let mut bad = w.clone();
    bad.precision = Some(40);
    assert!(!certify_global_witness(&q, &bad).unwrap());
}

#[test]
fn verdict_examples() {
    let r = ring(3);
    let b = ScanBounds::default();
    let v = verdict(&nf(&r, &[&["1"], &["1"], &["1"], &["x"], &["y"]]), &b).unwrap();
    match &v.verdict {
        Verdict::Isotropic { witness } => assert_eq!(witness.vector, ["1", "1", "1", "0", "0"]),
        other => panic!("{other:?}"),
    }
    let v = verdict(&nf(&r, &[&["1"], &["y"], &["x"], &["x", "y"]]), &b).unwrap();
    match &v.verdict {
        Verdict::Obstructed { place, .. } => assert_eq!(place, &PlaceJson::Gauss),
        other => panic!("{other:?}"),
    }
    let mut padded: Vec<&[&str]> = vec![&["1"], &["y"], &["x"], &["x", "y"], &["2"]];
    padded.extend([&["1"][..], &["1"], &["2"], &["2"], &["1"]]);
    let v = verdict(&nf(&r, &padded), &b).unwrap();
    assert_ne!(v.verdict.kind(), "OBSTRUCTED");
    let j = serde_json::to_value(&v).unwrap();
    assert_eq!(j["bounds"]["blowupDepth"], 2);
}

#[test]
fn rank_three_companion() {
    let r = ring(3);
    let q = nf(&r, &[&["1"], &["-1", "y"], &["y - x"]]);
    let c = companion(&q).unwrap();
    assert_eq!(c.coeffs.len(), 4);
    let v = verdict(&q, &ScanBounds::default()).unwrap();
    assert_eq!(v.verdict.kind(), "OBSTRUCTED");
    assert_eq!(v.companion.as_deref(), Some("OBSTRUCTED"));
}

#[test]
fn fuzz_small_runs() {
    let b = ScanBounds { seed: 7, ..Default::default() };
    for (lo, hi) in [(3, 4), (5, 8)] {
        let params = FuzzParams { p: 3, rank_min: lo, rank_max: hi, factor_degree_max: 3, trials: 20 };
        let t = std::time::Instant::now();
        let rep = fuzz(&params, &b).unwrap();
        eprintln!("rank {lo}-{hi}: {:?} in {:?}", rep.counts, t.elapsed());
        let slow: Vec<_> = rep.trials.iter().map(|t| t.millis).collect();
        eprintln!("{slow:?}");
        assert_eq!(rep.counts.violations, 0, "{:?}", rep.violations);
        let again = fuzz(&params, &b).unwrap();
        assert_eq!(
            serde_json::to_value(&again.counts).unwrap(),
            serde_json::to_value(&rep.counts).unwrap()
        );
    }
}

fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn companion_verdicts_agree() {
    let r = ring(3);
    let b = ScanBounds::default();
    let mut g = rng(41);
    let mut decided_pairs = 0;
    for _ in 0..200 {
        // <a_1, a_2, a_3> with a_1 = 1 is <1, a, b>
        let mut q = random_normalized_form(&r, 2, 2, &mut g).unwrap();
        let one = normalize_form(&r, &[vec![(vec![r.one()], 1)]]).unwrap();
        q.coeffs.insert(0, one.coeffs[0].clone());
        q.records.insert(0, one.records[0].clone());
        let v = verdict(&q, &b).unwrap();
        let c = companion(&q).unwrap();
        let w = verdict(&c, &b).unwrap();
        assert_eq!(v.companion.as_deref(), Some(w.verdict.kind()));
        let (a, o) = (v.verdict.kind(), w.verdict.kind());
        if a != "UNDECIDED" && o != "UNDECIDED" {
            assert_eq!(a, o);
            decided_pairs += 1;
        }
    }
    assert!(decided_pairs > 100, "{decided_pairs}");
}

#[test]
fn enlarging_bounds_keeps_decisions() {
    let r = ring(3);
    let small = ScanBounds {
        blowup_depth: 0,
        residue_degree_cap: 1,
        witness_degree_x: 1,
        witness_degree_y: 1,
        ..Default::default()
    };
    let large = ScanBounds::default();
    let mut g = rng(42);
    for i in 0..40 {
        let q = random_normalized_form(&r, 3 + i % 6, 3, &mut g).unwrap();
        let a = verdict(&q, &small).unwrap().verdict.kind();
        let b = verdict(&q, &large).unwrap().verdict.kind();
        if a != "UNDECIDED" {
            assert_eq!(a, b);
        }
    }
}

#[test]
fn rank_nine_is_never_obstructed() {
    let b = ScanBounds::default();
    let r = ring(3);
    let mut g = rng(43);
    for _ in 0..10 {
        let q = random_normalized_form(&r, 9, 3, &mut g).unwrap();
        assert!(local_scan(&q, &b).unwrap().obstruction.is_none());
    }
}
