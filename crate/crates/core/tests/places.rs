use std::sync::Arc;

use qflg::fields::{BiPoly, FiniteField, Poly};
use qflg::places::*;
use qflg::weierstrass::{normalize_form, APoly, DistinguishedPoly, Dvr, NormalizedForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ring(p: u64) -> Dvr {
    Dvr::power_series(FiniteField::prime(p).unwrap(), "x", 16)
}

/// Entries as lists of factor strings.
fn nf(r: &Dvr, entries: &[&[&str]]) -> NormalizedForm {
    let es: Vec<Vec<(APoly, u32)>> =
        entries.iter().map(|e| e.iter().map(|s| (r.parse_poly(s).unwrap(), 1)).collect()).collect();
    normalize_form(r, &es).unwrap()
}

fn chain(steps: &[&str]) -> BlowupChain {
    BlowupChain::new(
        steps
            .iter()
            .map(|s| match *s {
                "origin" => BlowupStep::Origin,
                "inf" => BlowupStep::Infinity,
                v if v.contains(':') => {
                    let (f, val) = v.split_once(':').unwrap();
                    BlowupStep::Ext { field: f.into(), value: val.into() }
                }
                v => BlowupStep::Value { value: v.into() },
            })
            .collect(),
    )
}

fn val(c: &BlowupChain, k: &Arc<FiniteField>, f: &str) -> i64 {
    blowup_valuation(c, k, &BiPoly::parse(f, k).unwrap()).unwrap().value
}

#[test]
fn blowup_examples() {
    let k = FiniteField::prime(3).unwrap();
    let c = chain(&["origin"]);
    assert_eq!((val(&c, &k, "x"), val(&c, &k, "y"), val(&c, &k, "x^2 + y^3")), (1, 1, 2));
    let c = chain(&["origin", "origin"]);
    assert_eq!((val(&c, &k, "x"), val(&c, &k, "y"), val(&c, &k, "x^2 + y^3")), (1, 2, 2));
    let c = chain(&["origin", "1"]);
    assert_eq!((val(&c, &k, "y - x"), val(&c, &k, "x"), val(&c, &k, "y")), (2, 1, 1));
    let c = chain(&["origin", "inf"]);
    assert_eq!((val(&c, &k, "x"), val(&c, &k, "y")), (2, 1));
    let bad = chain(&["1"]);
    assert!(matches!(blowup_valuation(&bad, &k, &BiPoly::x(&k)), Err(qflg::Error::UnsupportedCenter(_))));
    assert!(matches!(blowup_valuation(&c, &k, &BiPoly::zero()), Err(qflg::Error::ZeroInput)));
}

#[test]
fn blowup_residue_on_exceptional_curve() {
    let k = FiniteField::prime(3).unwrap();
    let v = blowup_valuation(&chain(&["origin"]), &k, &BiPoly::parse("y^2 - x^2 + x^3", &k).unwrap()).unwrap();
    assert_eq!(v.value, 2);
    assert_eq!(v.residue.format(&k, "t"), "t^2 + 2");
    // extension center: t = a in F9 with a^2 = 2 (a root of t^2 + 1)
    let c = chain(&["origin", "F9:a"]);
    let rc = c.resolve(&k, DEFAULT_DEGREE_CAP).unwrap();
    assert_eq!(rc.field.order(), 9);
    assert_eq!(val(&c, &k, "y^2 + x^2"), 3);
}

fn random_chain(k: &FiniteField, rng: &mut ChaCha8Rng) -> BlowupChain {
    let depth = rng.gen_range(1..=3);
    let mut steps = vec![BlowupStep::Origin];
    for _ in 1..depth {
        steps.push(match rng.gen_range(0..4) {
            0 => BlowupStep::Origin,
            1 => BlowupStep::Infinity,
            _ => BlowupStep::Value { value: k.format(&k.random(rng)) },
        });
    }
    BlowupChain::new(steps)
}

#[test]
fn valuation_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for p in [3, 5] {
        let k = FiniteField::prime(p).unwrap();
        for _ in 0..250 {
            let c = random_chain(&k, &mut rng);
            let rc = c.resolve(&k, DEFAULT_DEGREE_CAP).unwrap();
            let f = BiPoly::random(&k, 3, 3, &mut rng);
            let g = BiPoly::random(&k, 3, 3, &mut rng);
            if f.is_zero() || g.is_zero() {
                continue;
            }
            let vf = rc.value(&f, None).unwrap().value;
            let vg = rc.value(&g, None).unwrap().value;
            assert_eq!(rc.value(&f.mul(&g, &k), None).unwrap().value, vf + vg);
            let s = f.add(&g, &k);
            if !s.is_zero() {
                assert!(rc.value(&s, None).unwrap().value >= vf.min(vg));
            }
            assert!(rc.x_value() >= 1);
        }
    }
}

#[test]
fn depth_one_is_vanishing_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for p in [3, 5] {
        let k = FiniteField::prime(p).unwrap();
        for _ in 0..150 {
            let f = BiPoly::random(&k, 4, 4, &mut rng);
            if f.is_zero() {
                continue;
            }
            let lowest = f.terms().map(|(&(i, j), _)| i + j).min().unwrap() as i64;
            assert_eq!(blowup_valuation(&chain(&["origin"]), &k, &f).unwrap().value, lowest);
        }
    }
}

fn entries(d: &qflg::springer::DiagonalForm) -> Vec<String> {
    d.format_entries()
}

#[test]
fn gauss_examples() {
    let r = ring(3);
    let q = nf(&r, &[&["1"], &["y"], &["x"], &["x", "y"]]);
    let rd = residue_data(&q, &PlaceSpec::Gauss).unwrap();
    assert_eq!(entries(&rd.first), ["1", "y"]);
    assert_eq!(entries(&rd.second), ["1", "y"]);
    let one = FiniteField::prime(3).unwrap().one();
    assert_eq!(rd.mu.unwrap(), [vec![one.clone()], vec![one.clone()], vec![one.clone()], vec![one]]);
    assert!(!decide_local(&q, &PlaceSpec::Gauss).unwrap().isotropic);
    let q = nf(&r, &[&["1"], &["1"], &["1"], &["x"], &["y"]]);
    assert!(decide_local(&q, &PlaceSpec::Gauss).unwrap().isotropic);
}

#[test]
fn generic_point_example() {
    let r = ring(3);
    let q = nf(&r, &[&["1"], &["-1", "y"], &["y - x"]]);
    let f = DistinguishedPoly::new(&r, r.parse_poly("y - x").unwrap()).unwrap();
    let place = PlaceSpec::generic_point(&r, f).unwrap();
    let rd = residue_data(&q, &place).unwrap();
    assert_eq!(rd.first.tower.name(), "F3((x))");
    assert_eq!(entries(&rd.first), ["1", "2*x"]);
    assert_eq!(entries(&rd.second), ["1"]);
    let d = decide_local(&q, &place).unwrap();
    assert!(!d.isotropic);
    let j = serde_json::to_value(&d.certificate).unwrap();
    assert_eq!(j["place"]["case"], "generic-point");
}

#[test]
fn generic_point_ramified() {
    let r = ring(3);
    // theta^2 = x: <1, -y> is anisotropic at generic-point(y^2 - x) only if -theta is a non-square
    let f = DistinguishedPoly::new(&r, r.parse_poly("y^2 - x").unwrap()).unwrap();
    let place = PlaceSpec::generic_point(&r, f).unwrap();
    let q = nf(&r, &[&["1"], &["x"]]);
    let rd = residue_data(&q, &place).unwrap();
    // x = theta^2 is a square in K[y]/(y^2 - x)
    assert_eq!(rd.first.tower.name(), "F3((s))");
    assert_eq!(entries(&rd.first), ["1", "s^2"]);
    assert!(decide_local(&q, &place).unwrap().isotropic == false);
    let q = nf(&r, &[&["1"], &["-1", "x"]]);
    assert!(decide_local(&q, &place).unwrap().isotropic);
}

#[test]
fn special_point_example() {
    let r = ring(3);
    let k = r.residue_field();
    let q = nf(&r, &[&["1"], &["1"], &["1"], &["x"], &["y"]]);
    let place = PlaceSpec::special_point(&k, Poly::from_ints(&k, &[-2, 1])).unwrap();
    let rd = residue_data(&q, &place).unwrap();
    assert_eq!(entries(&rd.first), ["1", "1", "1", "2"]);
    assert_eq!(entries(&rd.second), ["1"]);
    assert!(decide_local(&q, &place).unwrap().isotropic);
    assert!(PlaceSpec::special_point(&k, Poly::x(&k)).is_err());
}

#[test]
fn place_json_round_trip() {
    let r = ring(3);
    let k = r.residue_field();
    let f = DistinguishedPoly::new(&r, r.parse_poly("y^2 - x").unwrap()).unwrap();
    let places = vec![
        PlaceSpec::Gauss,
        PlaceSpec::Infinity,
        PlaceSpec::special_point(&k, Poly::from_ints(&k, &[1, 0, 1])).unwrap(),
        PlaceSpec::Blowup(chain(&["origin", "2", "inf", "F9:a+1"])),
        PlaceSpec::generic_point(&r, f).unwrap(),
    ];
    for p in places {
        let s = serde_json::to_string(&p.to_json(&r)).unwrap();
        let back: PlaceJson = serde_json::from_str(&s).unwrap();
        assert_eq!(PlaceSpec::from_json(&r, &back).unwrap(), p, "{s}");
    }
    let s = serde_json::to_string(&PlaceSpec::Blowup(chain(&["origin", "1"])).to_json(&r)).unwrap();
    assert_eq!(s, r#"{"case":"blowup","steps":[{"kind":"origin"},{"kind":"value","value":"1"}]}"#);
}

#[test]
fn correspondence_examples() {
    let r = ring(3);
    let g = place_correspondence(&r, &PlaceSpec::Gauss).unwrap();
    assert_eq!((g.restriction.as_str(), g.completion.as_str()), ("F3(y)", "F3((y))"));
    let f = DistinguishedPoly::new(&r, r.parse_poly("y - x").unwrap()).unwrap();
    let gp = place_correspondence(&r, &PlaceSpec::generic_point(&r, f).unwrap()).unwrap();
    assert_eq!(gp.restriction, gp.completion);
    let c = place_correspondence(&r, &PlaceSpec::Blowup(chain(&["origin"]))).unwrap();
    assert_eq!(c.place, PlaceJson::Blowup { steps: vec![BlowupStep::Origin] });
    assert!(matches!(place_correspondence(&r, &PlaceSpec::Infinity), Err(qflg::Error::NoCanonicalExtension(_))));
}

/// Eisenstein of degree 1..=3: irreducible and distinguished.
fn eisenstein(r: &Dvr, rng: &mut ChaCha8Rng) -> String {
    let p = r.residue_field().characteristic() as i64;
    let m = rng.gen_range(1..=3);
    let mut s = format!("y^{m} + {}*x", rng.gen_range(1..p));
    for j in 1..m {
        s += &format!(" + {}*x^{}*y^{j}", rng.gen_range(0..p), rng.gen_range(1..3));
    }
    s
}

fn random_form(r: &Dvr, rng: &mut ChaCha8Rng, rank: usize) -> Vec<Vec<String>> {
    let p = r.residue_field().characteristic() as i64;
    (0..rank)
        .map(|_| {
            let mut e = vec![format!("{}", rng.gen_range(1..p))];
            if rng.gen_bool(0.5) {
                e.push("x".into());
            }
            for _ in 0..rng.gen_range(0..=2) {
                e.push(eisenstein(r, rng));
            }
            e
        })
        .collect()
}

fn nf_owned(r: &Dvr, f: &[Vec<String>]) -> NormalizedForm {
    let refs: Vec<Vec<&str>> = f.iter().map(|e| e.iter().map(|s| s.as_str()).collect()).collect();
    let slices: Vec<&[&str]> = refs.iter().map(|v| v.as_slice()).collect();
    nf(r, &slices)
}

#[test]
fn gauss_and_infinity_mu_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for p in [3, 5] {
        let r = ring(p);
        for _ in 0..100 {
            let rank = rng.gen_range(1..=8);
            let q = nf_owned(&r, &random_form(&r, &mut rng, rank));
            let g = residue_data(&q, &PlaceSpec::Gauss).unwrap();
            let i = residue_data(&q, &PlaceSpec::Infinity).unwrap();
            assert_eq!(g.mu, i.mu);
        }
    }
}

#[test]
fn special_points_never_obstruct_rank_five() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for p in [3, 5] {
        let r = ring(p);
        let k = r.residue_field();
        let mut points = Vec::new();
        while points.len() < 20 {
            let d = rng.gen_range(1..=4);
            let mut c: Vec<i64> = (0..d).map(|_| rng.gen_range(0..p as i64)).collect();
            c.push(1);
            let poly = Poly::from_ints(&k, &c);
            if let Ok(pl) = PlaceSpec::special_point(&k, poly) {
                if !points.contains(&pl) {
                    points.push(pl);
                }
            }
        }
        for _ in 0..100 {
            let rank = rng.gen_range(5..=8);
            let q = nf_owned(&r, &random_form(&r, &mut rng, rank));
            for pl in &points {
                assert!(decide_local(&q, pl).unwrap().isotropic);
            }
        }
    }
}

#[test]
fn non_divisor_generic_points_never_obstruct_rank_five() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let r = ring(3);
    let mut done = 0;
    while done < 200 {
        let rank = rng.gen_range(5..=8);
        let form = random_form(&r, &mut rng, rank);
        let q = nf_owned(&r, &form);
        let f = DistinguishedPoly::new(&r, r.parse_poly(&eisenstein(&r, &mut rng)).unwrap()).unwrap();
        let divides = q.coeffs.iter().any(|c| c.factors.iter().any(|(p, _, _)| r.poly_eq(p.coeffs(), f.coeffs())));
        if divides {
            continue;
        }
        let place = PlaceSpec::generic_point(&r, f).unwrap();
        assert!(decide_local(&q, &place).unwrap().isotropic);
        done += 1;
    }
}

#[test]
fn blowup_places_decide() {
    let r = ring(3);
    let q = nf(&r, &[&["1"], &["y"], &["x"], &["x", "y"]]);
    let d = decide_local(&q, &PlaceSpec::Blowup(chain(&["origin"]))).unwrap();
    // v(y) = v(x) = 1: residues 1, t | 1, t over F3(t)
    assert_eq!(entries(&d.residues.first), ["1", "t"]);
    assert_eq!(entries(&d.residues.second), ["t", "1"]);
    assert!(!d.isotropic);
}
