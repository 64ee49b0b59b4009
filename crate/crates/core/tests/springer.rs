use qflg::fields::{Elem, FiniteField, Series, Tower};
use qflg::springer::{
    certify_witness, decide_isotropy, decide_isotropy_traced, decide_ratfun, springer_split, Certificate, DiagonalForm,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tower(d: &str) -> Tower {
    Tower::parse_descriptor(d, 16).unwrap()
}

fn form(d: &str, entries: &str) -> DiagonalForm {
    DiagonalForm::parse(&tower(d), entries).unwrap()
}

fn entries_of(q: &DiagonalForm) -> Vec<String> {
    q.format_entries()
}

/// Every nonzero vector over a finite field, for rank <= 2 leaves.
fn leaf_has_zero(field: &FiniteField, entries: &[qflg::fields::Fe]) -> bool {
    let elems: Vec<_> = field.elements().collect();
    let r = entries.len();
    let total = elems.len().pow(r as u32);
    (1..total).any(|mut idx| {
        let mut acc = field.zero();
        for a in entries {
            let x = &elems[idx % elems.len()];
            idx /= elems.len();
            acc = field.add(&acc, &field.mul(a, &field.mul(x, x)));
        }
        acc.is_zero()
    })
}

fn recheck_leaves(cert: &Certificate) {
    for leaf in cert.leaves() {
        let Certificate::Leaf { field, entries, .. } = leaf else {
            panic!("anisotropy tree ends in {leaf:?}");
        };
        let t = tower(field);
        if let Tower::Finite(f) = &t {
            let fes: Vec<_> = entries
                .iter()
                .map(|e| match t.parse_elem(e).unwrap() {
                    Elem::Fin(x) => x,
                    _ => unreachable!(),
                })
                .collect();
            assert!(!leaf_has_zero(f, &fes), "leaf {entries:?} over {field} is isotropic");
        }
    }
}

#[test]
fn split_examples() {
    let (a, b, _) = springer_split(&form("F3((t))", "1, t"), None).unwrap();
    assert_eq!((entries_of(&a), entries_of(&b)), (vec!["1".into()], vec!["1".into()]));
    let (a, b, _) = springer_split(&form("F3((t))", "t^2, 2*t^3"), None).unwrap();
    assert_eq!((entries_of(&a), entries_of(&b)), (vec!["1".into()], vec!["2".into()]));
    let (a, b, _) = springer_split(&form("F3((t))", "1, 2, t, 2*t"), None).unwrap();
    assert_eq!(entries_of(&a), ["1", "2"]);
    assert_eq!(entries_of(&b), ["1", "2"]);
    assert_eq!(a.tower.name(), "F3");
}

#[test]
fn split_at_other_uniformizer() {
    let q = form("F3((t))", "1, t + t^2");
    let pi = q.tower.parse_elem("t + t^2").unwrap();
    let (a, b, _) = springer_split(&q, Some(&pi)).unwrap();
    assert_eq!((entries_of(&a), entries_of(&b)), (vec!["1".into()], vec!["1".into()]));
}

#[test]
fn hyperbolic_plane_everywhere() {
    for d in ["F3", "F9", "F3((t))", "Q3", "F3((x))((y))", "F5(t)"] {
        let q = form(d, "1, -1");
        let dec = decide_isotropy(&q).unwrap();
        assert!(dec.isotropic, "{d}");
        let w = dec.witness.unwrap();
        assert_eq!(q.tower.format(&w[0]), "1");
        assert_eq!(q.tower.format(&w[1]), "1");
        assert!(certify_witness(&q, &w, 8).unwrap());
    }
}

#[test]
fn decide_examples() {
    let q = form("F3((t))", "1, 1, t, t");
    let d = decide_isotropy(&q).unwrap();
    assert!(!d.isotropic);
    let leaves: Vec<_> = d.certificate.leaves().into_iter().cloned().collect();
    assert_eq!(leaves.len(), 2);
    for l in &leaves {
        let Certificate::Leaf { field, entries, .. } = l else { panic!() };
        assert_eq!(field, "F3");
        assert_eq!(entries, &["1", "1"]);
    }
    recheck_leaves(&d.certificate);

    // over F3, -1 is not a square, so <1, 2> is isotropic and so is <1, 2, 3, 6>
    let q = form("Q3", "1, 2, 3, 6");
    let d = decide_isotropy(&q).unwrap();
    assert!(d.isotropic);
    assert!(certify_witness(&q, d.witness.as_ref().unwrap(), 8).unwrap());
    let q = form("Q3", "1, 1, 3, 3");
    let d = decide_isotropy(&q).unwrap();
    assert!(!d.isotropic);
    for l in d.certificate.leaves() {
        let Certificate::Leaf { entries, .. } = l else { panic!() };
        assert_eq!(entries, &["1", "1"]);
    }
    recheck_leaves(&d.certificate);

    let q = form("F3((x))((y))", "1, y, x, x*y, 1");
    let d = decide_isotropy(&q).unwrap();
    assert!(!d.isotropic);
    recheck_leaves(&d.certificate);
}

#[test]
fn ratfun_examples() {
    let d = decide_ratfun(&form("F3(t)", "1, -t")).unwrap();
    assert!(!d.isotropic);
    let q = form("F5(t)", "1, 1, 1");
    let d = decide_ratfun(&q).unwrap();
    assert!(d.isotropic);
    let w: Vec<String> = d.witness.as_ref().unwrap().iter().map(|x| q.tower.format(x)).collect();
    assert_eq!(w, ["1", "2", "0"]);
    let d = decide_ratfun(&form("F3(t)", "1, 1, t, t")).unwrap();
    assert!(!d.isotropic);
    assert!(matches!(d.certificate, Certificate::LocalObstruction { .. }));
}

#[test]
fn ratfun_witnesses_certify() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let t = tower("F3(t)");
    for _ in 0..60 {
        let r = rng.gen_range(2..=5);
        let entries: Vec<String> = (0..r)
            .map(|_| format!("{}*t^{} + {}", rng.gen_range(1..3), rng.gen_range(0..3), rng.gen_range(0..3)))
            .collect();
        let Ok(q) = DiagonalForm::parse(&t, &entries.join(",")) else { continue };
        let d = decide_ratfun(&q).unwrap();
        if let Some(w) = &d.witness {
            assert!(certify_witness(&q, w, 8).unwrap());
        }
        if !d.isotropic {
            assert!(r <= 4);
        }
    }
}

#[test]
fn certify_examples() {
    let q = form("F3", "1, -1");
    let one = q.tower.one();
    assert!(certify_witness(&q, &[one.clone(), one.clone()], 8).unwrap());
    let q = form("F3", "1, 1, 1");
    assert!(certify_witness(&q, &[one.clone(), one.clone(), one.clone()], 8).unwrap());
    let q = form("F3", "1, 1");
    assert!(!certify_witness(&q, &[one.clone(), one], 8).unwrap());
}

#[test]
fn truncated_witness_needs_hensel_margin() {
    // <1, -(1+t)>: the root of 1+t is an infinite series
    let t = Tower::parse_descriptor("F5((t))", 12).unwrap();
    let q = DiagonalForm::parse(&t, "1, -1 - t").unwrap();
    let d = decide_isotropy(&q).unwrap();
    let w = d.witness.unwrap();
    assert!(certify_witness(&q, &w, 8).unwrap());
    // a vector that is only a residue zero also passes: (1+t)^(1/2) = 1 + ...
    let rough = vec![t.one(), t.one()];
    assert!(certify_witness(&q, &rough, 8).unwrap());
    // but not a non-zero of the residue form
    let bad = vec![t.one(), t.zero()];
    assert!(!certify_witness(&q, &bad, 8).unwrap());
}

fn random_unit(field: &FiniteField, rng: &mut ChaCha8Rng, deg: usize) -> Vec<Elem> {
    let mut c = vec![Elem::Fin(field.random_nonzero(rng))];
    for _ in 0..deg {
        c.push(Elem::Fin(field.random(rng)));
    }
    c
}

fn random_form(t: &Tower, rank: usize, rng: &mut ChaCha8Rng) -> DiagonalForm {
    let Tower::Laurent { base, .. } = t else { panic!() };
    let field = t.bottom().unwrap();
    let entries = (0..rank)
        .map(|_| {
            let v = rng.gen_range(-2..=2);
            let deg = rng.gen_range(0..=2);
            Elem::Ser(Series::from_coeffs(base, v, random_unit(&field, rng, deg), None).unwrap())
        })
        .collect();
    DiagonalForm::new(t.clone(), entries).unwrap()
}

#[test]
fn every_node_obeys_residue_rule_and_witnesses_certify() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for d in ["F3((t))", "F5((t))"] {
        let t = tower(d);
        for _ in 0..150 {
            let q = random_form(&t, rng.gen_range(1..=6), &mut rng);
            let (dec, trace) = decide_isotropy_traced(&q).unwrap();
            if dec.isotropic {
                assert!(certify_witness(&q, dec.witness.as_ref().unwrap(), 8).unwrap());
            } else {
                recheck_leaves(&dec.certificate);
            }
            for node in trace {
                if let Some((a, b)) = node.parts {
                    assert_eq!(node.isotropic, a || b);
                }
                if let Some(w) = &node.witness {
                    assert!(certify_witness(&node.form, w, 8).unwrap());
                }
            }
        }
    }
}

#[test]
fn isometry_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for d in ["F3((t))", "F5((t))", "F9((t))"] {
        let t = tower(d);
        for _ in 0..500 {
            let q = random_form(&t, rng.gen_range(1..=5), &mut rng);
            let base = decide_isotropy(&q).unwrap().isotropic;
            let mut entries = q.entries.clone();
            entries.shuffle(&mut rng);
            let i = rng.gen_range(0..entries.len());
            let c = random_form(&t, 1, &mut rng).entries[0].clone();
            entries[i] = t.mul(&entries[i], &t.mul(&c, &c).unwrap()).unwrap();
            let q2 = DiagonalForm::new(t.clone(), entries).unwrap();
            assert_eq!(decide_isotropy(&q2).unwrap().isotropic, base);
        }
    }
}

#[test]
fn rank_three_over_finite_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for d in ["F3", "F5", "F9"] {
        let t = tower(d);
        let f = t.bottom().unwrap();
        for _ in 0..500 {
            let entries = (0..3).map(|_| Elem::Fin(f.random_nonzero(&mut rng))).collect();
            let q = DiagonalForm::new(t.clone(), entries).unwrap();
            let dec = decide_isotropy(&q).unwrap();
            assert!(dec.isotropic);
            assert!(certify_witness(&q, dec.witness.as_ref().unwrap(), 8).unwrap());
        }
    }
}

#[test]
fn u_invariant_of_laurent_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for d in ["F3((t))", "F5((t))", "F9((t))"] {
        let t = tower(d);
        let s = t.format(&t.non_square_constant().unwrap());
        let q = DiagonalForm::parse(&t, &format!("1, -({s}), t, -({s})*t")).unwrap();
        let dec = decide_isotropy(&q).unwrap();
        assert!(!dec.isotropic);
        recheck_leaves(&dec.certificate);
        // <1, s, t, s*t> is the same form exactly when -1 is a square
        let q = DiagonalForm::parse(&t, &format!("1, {s}, t, ({s})*t")).unwrap();
        let dec = decide_isotropy(&q).unwrap();
        let f = t.bottom().unwrap();
        let minus_one_square = f.is_square(&f.from_int(-1)).unwrap();
        assert_eq!(dec.isotropic, !minus_one_square);
        if dec.isotropic {
            assert!(certify_witness(&q, dec.witness.as_ref().unwrap(), 8).unwrap());
        }
        for _ in 0..200 {
            let q = random_form(&t, 5, &mut rng);
            let dec = decide_isotropy(&q).unwrap();
            assert!(dec.isotropic);
            assert!(certify_witness(&q, dec.witness.as_ref().unwrap(), 8).unwrap());
        }
    }
}

#[test]
fn certificate_json_is_stable() {
    let d = decide_isotropy(&form("F3((t))", "1, 1, t, t")).unwrap();
    let json = d.certificate.to_json();
    assert_eq!(
        json,
        r#"{"kind":"split","field":"F3((t))","uniformizer":"t","classes":["1","1","t*(1)","t*(1)"],"first":{"kind":"leaf","field":"F3","entries":["1","1"],"reason":"-a1/a2 is not a square"},"second":{"kind":"leaf","field":"F3","entries":["1","1"],"reason":"-a1/a2 is not a square"}}"#
    );
    let back: Certificate = serde_json::from_str(&json).unwrap();
    assert_eq!(back, d.certificate);
}
