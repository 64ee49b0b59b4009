use proptest::prelude::*;
use qflg::fields::{Elem, FiniteField, Poly, Series, Tower};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f(p: u64, n: usize) -> Tower {
    Tower::finite(p, n).unwrap()
}

fn laurent(p: u64, prec: usize) -> Tower {
    Tower::laurent(f(p, 1), "t", prec)
}

/// Exhaustive: does some b in F satisfy b^2 = a?
fn has_root_exhaustive(field: &FiniteField, a: &qflg::fields::Fe) -> bool {
    field.elements().any(|b| field.mul(&b, &b) == *a)
}

/// Depth-first coefficient search for b with b^2 = a through `n` unit coefficients.
fn has_series_root(t: &Tower, a: &Elem, n: usize) -> bool {
    let Tower::Laurent { base, .. } = t else { panic!() };
    let Tower::Finite(field) = &**base else { panic!() };
    let Elem::Ser(s) = a else { panic!() };
    if s.valuation().rem_euclid(2) != 0 {
        return false;
    }
    let coeff = |i: usize| match s.unit_part().get(i) {
        Some(Elem::Fin(c)) => c.clone(),
        _ => field.zero(),
    };
    fn dfs(field: &FiniteField, target: &dyn Fn(usize) -> qflg::fields::Fe, b: &mut Vec<qflg::fields::Fe>, n: usize) -> bool {
        let k = b.len();
        if k == n {
            return true;
        }
        for c in field.elements() {
            if k == 0 && c.is_zero() {
                continue;
            }
            b.push(c);
            // coefficient k of b^2
            let mut sum = field.zero();
            for i in 0..=k {
                sum = field.add(&sum, &field.mul(&b[i], &b[k - i]));
            }
            if sum == target(k) && dfs(field, target, b, n) {
                return true;
            }
            b.pop();
        }
        false
    }
    dfs(field, &coeff, &mut Vec::new(), n)
}

fn random_series(t: &Tower, rng: &mut ChaCha8Rng) -> Elem {
    let Tower::Laurent { base, .. } = t else { panic!() };
    let Tower::Finite(field) = &**base else { panic!() };
    let v = rng.gen_range(-3..=3);
    let len = rng.gen_range(1..=6);
    let mut coeffs = vec![Elem::Fin(field.random_nonzero(rng))];
    for _ in 1..len {
        coeffs.push(Elem::Fin(field.random(rng)));
    }
    Elem::Ser(Series::from_coeffs(base, v, coeffs, None).unwrap())
}

#[test]
fn is_square_examples() {
    let f5 = f(5, 1);
    assert!(f5.is_square(&f5.one()).unwrap());
    let f3 = f(3, 1);
    assert!(!f3.is_square(&f3.from_int(2)).unwrap());
    let t = laurent(3, 16);
    assert!(t.is_square(&t.parse_elem("t^2").unwrap()).unwrap());
    assert!(!t.is_square(&t.parse_elem("t").unwrap()).unwrap());
    assert!(matches!(f3.is_square(&f3.zero()), Err(qflg::Error::ZeroInput)));
}

#[test]
fn is_square_matches_search_finite() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (p, n) in [(3, 1), (5, 1), (3, 2), (7, 1)] {
        let field = FiniteField::new(p, n).unwrap();
        let t = Tower::Finite(field.clone());
        for _ in 0..500 {
            let a = field.random_nonzero(&mut rng);
            assert_eq!(t.is_square(&Elem::Fin(a.clone())).unwrap(), has_root_exhaustive(&field, &a));
        }
    }
}

#[test]
fn is_square_matches_search_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for p in [3, 5] {
        let t = laurent(p, 16);
        for _ in 0..500 {
            let a = random_series(&t, &mut rng);
            assert_eq!(t.is_square(&a).unwrap(), has_series_root(&t, &a, 8), "{}", t.format(&a));
        }
    }
}

#[test]
fn square_class_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for t in [laurent(3, 16), laurent(5, 16)] {
        for _ in 0..200 {
            let a = random_series(&t, &mut rng);
            let c = random_series(&t, &mut rng);
            let ac2 = t.mul(&a, &t.mul(&c, &c).unwrap()).unwrap();
            assert_eq!(t.is_square(&a).unwrap(), t.is_square(&ac2).unwrap());
        }
    }
    let q = Tower::padic(3, 12).unwrap();
    for _ in 0..200 {
        let a = q.from_int(rng.gen_range(1..10_000));
        let c = q.from_int(rng.gen_range(1..10_000));
        let ac2 = q.mul(&a, &q.mul(&c, &c).unwrap()).unwrap();
        assert_eq!(q.is_square(&a).unwrap(), q.is_square(&ac2).unwrap());
    }
}

#[test]
fn series_sqrt_examples() {
    let t = laurent(3, 4);
    let one = t.one();
    assert_eq!(t.sqrt(&one).unwrap(), one);
    let f = t.parse_elem("1 + t").unwrap();
    let g = t.sqrt(&f).unwrap();
    let g2 = t.mul(&g, &g).unwrap();
    let Elem::Ser(s) = &g2 else { panic!() };
    assert_eq!(s.precision(), Some(4));
    let d = t.sub(&g2, &f).unwrap();
    assert!(t.is_zero(&d).is_err(), "difference must be O(t^4)");
    assert!(matches!(t.sqrt(&t.parse_elem("t").unwrap()), Err(qflg::Error::NotASquare)));
}

#[test]
fn series_sqrt_agrees_and_is_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let base = laurent(5, 32);
    let Tower::Laurent { base: inner, .. } = &base else { panic!() };
    for _ in 0..200 {
        let c = random_series(&base, &mut rng);
        let a = base.mul(&c, &c).unwrap();
        let Elem::Ser(sa) = &a else { panic!() };
        let r8 = sa.sqrt(inner, 8).unwrap();
        let r16 = sa.sqrt(inner, 16).unwrap();
        let sq = r16.mul(&r16, inner).unwrap();
        for i in 0..16 {
            let want = sa.unit_part().get(i).cloned().unwrap_or(base.residue_field().unwrap().zero());
            let got = sq.unit_part().get(i).cloned().unwrap_or(base.residue_field().unwrap().zero());
            assert_eq!(want, got);
        }
        for i in 0..r8.unit_part().len().min(8) {
            assert_eq!(r8.unit_part()[i], r16.unit_part()[i]);
        }
    }
}

#[test]
fn padic_sqrt_resquares() {
    let q = Tower::padic(3, 10).unwrap();
    for n in [1i64, 4, 7, 10, 13, 9 * 7] {
        let a = q.from_int(n);
        let r = q.sqrt(&a).unwrap();
        let back = q.mul(&r, &r).unwrap();
        let d = q.sub(&back, &a).unwrap();
        assert!(q.is_zero(&d).is_err() || q.is_zero(&d).unwrap());
    }
}

#[test]
fn poly_factor_examples() {
    let f3 = FiniteField::new(3, 1).unwrap();
    let fac = Poly::from_ints(&f3, &[-1, 0, 1]).factor(&f3).unwrap();
    let factors: Vec<String> = fac.factors.iter().map(|(p, e)| format!("{}^{e}", p.format(&f3, "t"))).collect();
    assert_eq!(factors, ["t + 1^1", "t + 2^1"]);
    let f5 = FiniteField::new(5, 1).unwrap();
    let t = Poly::x(&f5).factor(&f5).unwrap();
    assert_eq!(t.factors, vec![(Poly::x(&f5), 1)]);
    let irr = Poly::from_ints(&f3, &[1, 0, 1]).factor(&f3).unwrap();
    assert_eq!(irr.factors.len(), 1);
    assert!(irr.factors[0].0.is_irreducible(&f3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn poly_factor_round_trip(p in prop::sample::select(vec![3u64, 5]), coeffs in prop::collection::vec(0i64..5, 1..=13)) {
        let field = FiniteField::new(p, 1).unwrap();
        let poly = Poly::from_ints(&field, &coeffs);
        prop_assume!(!poly.is_zero());
        let fac = poly.factor(&field).unwrap();
        prop_assert_eq!(fac.expand(&field), poly);
        for (g, _) in &fac.factors {
            prop_assert!(g.is_irreducible(&field));
        }
    }

    #[test]
    fn literal_round_trip(a in -20i64..20, b in -3i64..4, c in 0i64..3) {
        let t = Tower::laurent(Tower::laurent(f(3, 1), "x", 8), "y", 8);
        let e = t.parse_elem(&format!("{a}*x^{b}*y^{c} + y^{}", c + 1)).unwrap();
        if !t.is_zero(&e).unwrap() {
            let again = t.parse_elem(&t.format(&e)).unwrap();
            prop_assert_eq!(again, e);
        }
    }
}
