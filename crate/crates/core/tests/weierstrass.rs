use qflg::fields::{Elem, FiniteField, Tower};
use qflg::weierstrass::*;
use qflg::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f3x(n: usize) -> Dvr {
    Dvr::parse("F3[[x]]", n).unwrap()
}

fn poly(r: &Dvr, s: &str) -> APoly {
    r.parse_poly(s).unwrap()
}

fn dist(r: &Dvr, s: &str) -> DistinguishedPoly {
    DistinguishedPoly::new(r, poly(r, s)).unwrap()
}

#[test]
fn ring_descriptors() {
    assert_eq!(f3x(8).name(), "F3[[x]]");
    assert_eq!(Dvr::parse("Z5", 8).unwrap().name(), "Z5");
    assert_eq!(Dvr::parse("F9[[x]]", 8).unwrap().residue_field().order(), 9);
    assert!(Dvr::parse("Q3", 8).is_err());
}

#[test]
fn divide_examples() {
    let r = f3x(8);
    let (q, rem) = w_divide(&r, &YSeries::exact(poly(&r, "y^3")), &dist(&r, "y^2 - x")).unwrap();
    assert_eq!(r.format_poly(&q.coeffs), "y");
    assert_eq!(r.format_poly(&rem), "x*y");
    let p = dist(&r, "y^2 + x*y + x");
    let (q, rem) = w_divide(&r, &YSeries::exact(p.coeffs().clone()), &p).unwrap();
    assert_eq!(r.format_poly(&q.coeffs), "1");
    assert!(rem.is_empty());
    let (q, rem) = w_divide(&r, &YSeries::exact(poly(&r, "x")), &dist(&r, "y")).unwrap();
    assert!(q.coeffs.is_empty());
    assert_eq!(r.format_poly(&rem), "x");
    let short = YSeries::truncated(poly(&r, "y^3"), 9);
    assert!(matches!(w_divide(&r, &short, &dist(&r, "y^2 - x")), Err(Error::InsufficientPrecision(_))));
}

#[test]
fn prepare_examples() {
    let r = f3x(8);
    let p = w_prepare(&r, &YSeries::exact(poly(&r, "y^2 + x*y + x"))).unwrap();
    assert_eq!((p.n, r.format_poly(&p.unit), p.dist.format(&r)), (0, "1".into(), "y^2 + x*y + x".into()));
    let p = w_prepare(&r, &YSeries::exact(poly(&r, "x*y + x"))).unwrap();
    assert_eq!((p.n, r.format_poly(&p.unit), p.dist.format(&r)), (1, "y + 1".into(), "1".into()));
    let p = w_prepare(&r, &YSeries::exact(poly(&r, "(1 + x)*y^2"))).unwrap();
    assert_eq!((p.n, r.format_poly(&p.unit), p.dist.format(&r)), (0, "(1 + x)".into(), "y^2".into()));
    assert!(matches!(w_prepare(&r, &YSeries::exact(vec![])), Err(Error::ZeroInput)));
}

#[test]
fn prepare_enforces_input_rows() {
    let r = f3x(8);
    let f = poly(&r, "x + x*y + y^2");
    assert!(matches!(w_prepare(&r, &YSeries::truncated(f.clone(), 9)), Err(Error::InsufficientPrecision(_))));
    assert!(w_prepare(&r, &YSeries::truncated(f, 10)).is_ok());
}

#[test]
fn monicize_examples() {
    let r = f3x(8);
    let (u, uf) = monicize(&r, &poly(&r, "2*y + 2*x")).unwrap();
    assert_eq!(r.format(&u), "2");
    assert_eq!(uf.format(&r), "y + x");
    let (u, uf) = monicize(&r, &poly(&r, "y")).unwrap();
    assert_eq!((r.format(&u), uf.format(&r)), ("1".into(), "y".into()));
    assert!(matches!(monicize(&r, &poly(&r, "x*y + 1")), Err(Error::NotDivisorOfDistinguished(_))));
    assert!(matches!(monicize(&r, &poly(&r, "y + 1")), Err(Error::NotDivisorOfDistinguished(_))));
}

fn resquare(r: &Dvr, g: &YSeries) -> APoly {
    r.poly_mul_trunc(&g.coeffs, &g.coeffs, r.precision()).unwrap()
}

#[test]
fn square_normalize_examples() {
    let r = f3x(16);
    let f = poly(&r, "1 + x + y");
    let (l, g) = square_normalize(&r, &YSeries::exact(f.clone())).unwrap();
    assert_eq!(r.format(&l), "1");
    assert!(r.poly_eq(&resquare(&r, &g), &f));
    let (l, g) = square_normalize(&r, &YSeries::exact(poly(&r, "2 + x"))).unwrap();
    assert_eq!(r.format(&l), "2");
    assert!(r.poly_eq(&resquare(&r, &g), &poly(&r, "1 + 2*x")));
    let (l, g) = square_normalize(&r, &YSeries::exact(poly(&r, "1"))).unwrap();
    assert_eq!((r.format(&l), r.format_poly(&g.coeffs)), ("1".into(), "1".into()));
    assert!(matches!(square_normalize(&r, &YSeries::exact(poly(&r, "x + y"))), Err(Error::NotAUnit)));
    assert!(matches!(
        square_normalize(&f3x(6), &YSeries::exact(poly(&r, "1"))),
        Err(Error::InsufficientPrecision(_))
    ));
}

#[test]
fn square_normalize_padic() {
    let r = Dvr::parse("Z3", 16).unwrap();
    let f = poly(&r, "5 + 3*y + 9*y^2");
    let (l, g) = square_normalize(&r, &YSeries::exact(f.clone())).unwrap();
    assert_eq!(r.format(&l), "2");
    let lg2 = r.poly_scale(&resquare(&r, &g), &l).unwrap();
    assert!(r.poly_eq(&lg2, &f));
}

#[test]
fn normalize_examples() {
    let r = f3x(8);
    let nf = normalize_form(&r, &[vec![(poly(&r, "x^3*y^2"), 1)]]).unwrap();
    let c = &nf.coeffs[0];
    assert_eq!((r.format(&c.lambda), c.n, c.factors.len()), ("1".into(), 1, 0));
    assert_eq!(nf.records[0].format(&r), "(x*y)^2");
    let nf = normalize_form(&r, &[vec![(poly(&r, "1 + x"), 1), (poly(&r, "y^2 - x"), 1)]]).unwrap();
    let j = serde_json::to_string(&nf.coeffs[0].to_json(&r)).unwrap();
    assert_eq!(j, r#"{"lambda":"1","n":0,"factors":[{"poly":"y^2 + 2*x","exp":1,"irreducible":"proved"}]}"#);
    let nf = normalize_form(&r, &[vec![(poly(&r, "2"), 1)]]).unwrap();
    let c = &nf.coeffs[0];
    assert_eq!((r.format(&c.lambda), c.n, c.factors.len()), ("2".into(), 0, 0));
}

#[test]
fn irreducibility_status() {
    let r = f3x(8);
    let check = |s: &str| irreducibility(&r, &dist(&r, s));
    assert_eq!(check("y + x").unwrap(), Irreducibility::Proved);
    assert_eq!(check("y^3 + x*y + x").unwrap(), Irreducibility::Proved);
    // slope 1, residual z^2 + 1 irreducible over F3
    assert_eq!(check("y^2 + x^2").unwrap(), Irreducibility::Proved);
    assert!(matches!(check("y^2 - x^2"), Err(Error::ReducibleFactor(_))));
    assert!(matches!(check("y^2 + x*y + x^3"), Err(Error::ReducibleFactor(_))));
    assert!(matches!(check("y^2 + x*y"), Err(Error::ReducibleFactor(_))));
    // residual (z + 1)^2 has a repeated factor
    assert_eq!(check("y^2 + 2*x*y + x^2 + x^3").unwrap(), Irreducibility::Asserted);
}

fn random_elem(r: &Dvr, rng: &mut ChaCha8Rng, min_val: i64) -> Elem {
    let t = r.field();
    if r.is_padic() {
        let p = r.residue_field().characteristic() as i64;
        let k: i64 = rng.gen_range(0..p.pow(4));
        return t.mul(&t.from_int(k), &t.pow(&r.uniformizer(), min_val).unwrap()).unwrap();
    }
    let field = r.residue_field();
    let mut acc = t.zero();
    for i in min_val..min_val + 4 {
        let c = t.lift_from_bottom(&field.random(rng)).unwrap();
        acc = t.add(&acc, &t.mul(&c, &t.pow(&r.uniformizer(), i).unwrap()).unwrap()).unwrap();
    }
    acc
}

fn rings(n: usize) -> Vec<Dvr> {
    vec![
        Dvr::power_series(FiniteField::prime(3).unwrap(), "x", n),
        Dvr::power_series(FiniteField::prime(5).unwrap(), "x", n),
        Dvr::padic_integers(3, n).unwrap(),
    ]
}

#[test]
fn preparation_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for r in rings(16) {
        for _ in 0..100 {
            let deg = rng.gen_range(0..=4);
            let m = rng.gen_range(0..=deg);
            let n = rng.gen_range(0..=2);
            let mut f: APoly = (0..=deg).map(|j| random_elem(&r, &mut rng, if j < m { 1 } else { 0 })).collect();
            let unit = r.from_int(rng.gen_range(1..r.residue_field().characteristic() as i64));
            f[m] = r.add(&f[m], &r.mul(&unit, &r.one()).unwrap()).unwrap();
            if !r.is_unit(&f[m]) {
                f[m] = r.add(&f[m], &r.one()).unwrap();
            }
            let xn = r.field().pow(&r.uniformizer(), n).unwrap();
            let f = r.poly_scale(&f, &xn).unwrap();
            let prep = w_prepare(&r, &YSeries::exact(f.clone())).unwrap();
            assert_eq!(prep.n as i64, n);
            assert_eq!(prep.dist.degree(), m);
            assert!(r.is_unit(&prep.unit[0]));
            assert!(r.poly_eq(&prep.expand(&r).unwrap(), &f), "{}", r.format_poly(&f));
        }
    }
}

#[test]
fn division_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for r in rings(16) {
        for _ in 0..100 {
            let m = rng.gen_range(0..=3);
            let mut pc: APoly = (0..m).map(|_| random_elem(&r, &mut rng, 1)).collect();
            pc.push(r.one());
            let p = DistinguishedPoly::new(&r, pc).unwrap();
            let dg = rng.gen_range(0..=6);
            let g: APoly = (0..=dg).map(|_| random_elem(&r, &mut rng, 0)).collect();
            let (q, rem) = w_divide(&r, &YSeries::exact(g.clone()), &p).unwrap();
            assert!(rem.len() <= m);
            let back = r.poly_add(&r.poly_mul(&q.coeffs, p.coeffs()).unwrap(), &rem).unwrap();
            assert!(r.poly_eq(&back, &g));
        }
    }
}

#[test]
fn square_certificates_resquare() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for r in rings(16) {
        for _ in 0..100 {
            let d = rng.gen_range(0..=4);
            let mut f: APoly = (0..=d).map(|_| random_elem(&r, &mut rng, 0)).collect();
            if !r.is_unit(&f[0]) {
                f[0] = r.add(&f[0], &r.one()).unwrap();
            }
            let (l, g) = square_normalize(&r, &YSeries::exact(f.clone())).unwrap();
            let back = r.poly_scale(&resquare(&r, &g), &l).unwrap();
            let mut ft = f.clone();
            ft.truncate(16);
            assert!(r.poly_eq(&back, &ft));
        }
    }
}

fn random_dist(r: &Dvr, rng: &mut ChaCha8Rng) -> APoly {
    // Eisenstein, hence irreducible
    let m = rng.gen_range(1..=3);
    let mut c: APoly = (0..m).map(|_| random_elem(r, rng, 1)).collect();
    let x = r.uniformizer();
    c[0] = r.mul(&x, &r.from_int(rng.gen_range(1..3))).unwrap();
    c.push(r.one());
    c
}

#[test]
fn normalized_entries_reconstruct_and_are_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let r = f3x(16);
    for _ in 0..60 {
        let mut entry = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            entry.push((random_dist(&r, &mut rng), rng.gen_range(1..=3)));
        }
        entry.push((r.poly_trim(vec![r.add(&r.from_int(rng.gen_range(1..3)), &random_elem(&r, &mut rng, 1)).unwrap()]), 1));
        entry.push((poly(&r, &format!("x^{}", rng.gen_range(0..4))), 1));
        let mut original = vec![r.one()];
        for (f, e) in &entry {
            original = r.poly_mul(&original, &r.poly_pow(f, *e).unwrap()).unwrap();
        }
        let nf = normalize_form(&r, &[entry]).unwrap();
        let c = &nf.coeffs[0];
        let root = nf.records[0].root(&r).unwrap();
        let sq = r.poly_mul_trunc(&root, &root, 16).unwrap();
        let back = r.poly_mul_trunc(&c.reconstruct(&r).unwrap(), &sq, 16).unwrap();
        let mut ot = original.clone();
        ot.truncate(16);
        assert!(r.poly_eq(&back, &ot));
        let mut renormal = vec![(vec![c.lambda.clone()], 1), (poly(&r, &format!("x^{}", c.n)), 1)];
        renormal.extend(c.factors.iter().map(|(p, e, _)| (p.coeffs().clone(), *e)));
        let again = normalize_form(&r, &[renormal]).unwrap();
        assert_eq!(again.coeffs[0].to_json(&r), c.to_json(&r));
    }
}

#[test]
fn normalization_preserves_gauss_isotropy() {
    use qflg::springer::{decide_isotropy, DiagonalForm};
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let r = f3x(16);
    let gauss = Tower::laurent(Tower::laurent(Tower::finite(3, 1).unwrap(), "y", 16), "x", 16);
    let embed = |p: &APoly| gauss.parse_elem(&r.format_poly(p)).unwrap();
    for _ in 0..200 {
        let rank = rng.gen_range(1..=4);
        let mut entries = Vec::new();
        let mut originals = Vec::new();
        for _ in 0..rank {
            let mut entry = vec![(r.poly_trim(vec![r.from_int(rng.gen_range(1..3))]), 1)];
            for _ in 0..rng.gen_range(0..=2) {
                entry.push((random_dist(&r, &mut rng), rng.gen_range(1..=2)));
            }
            entry.push((poly(&r, &format!("x^{}", rng.gen_range(0..3))), 1));
            let mut o = vec![r.one()];
            for (f, e) in &entry {
                o = r.poly_mul(&o, &r.poly_pow(f, *e).unwrap()).unwrap();
            }
            originals.push(embed(&o));
            entries.push(entry);
        }
        let nf = normalize_form(&r, &entries).unwrap();
        let normalized: Vec<Elem> = nf.coeffs.iter().map(|c| embed(&c.reconstruct(&r).unwrap())).collect();
        let before = decide_isotropy(&DiagonalForm::new(gauss.clone(), originals).unwrap()).unwrap();
        let after = decide_isotropy(&DiagonalForm::new(gauss.clone(), normalized).unwrap()).unwrap();
        assert_eq!(before.isotropic, after.isotropic);
    }
}
