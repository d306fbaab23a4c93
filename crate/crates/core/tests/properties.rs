use distenergy::constructions::integer_grid;
use distenergy::energy::{
    at_least, bipartite_spectrum, energy, energy_bruteforce, holder_lower_bound, isosceles_count, multiplicity_spectrum,
    MultiplicitySpectrum,
};
use distenergy::expansion::{decompose, expansion_energy, expansion_energy_bruteforce, image_spectrum};
use distenergy::extraction::{extract_subset, sampling_plan, verify_max_pair_multiplicity, SamplingVariant};
use distenergy::polynomial::{BivariatePolynomial, UnivariatePolynomial};
use distenergy::{sqdist, Caps, Point, PointSet, Rational};
use proptest::collection::{btree_map, vec};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| Rational::new(n, d))
}

fn point() -> impl Strategy<Value = Point> {
    (rational(), rational()).prop_map(|(x, y)| Point::new(x, y))
}

fn small_int_point() -> impl Strategy<Value = Point> {
    (-3i64..=3, -3i64..=3).prop_map(|(x, y)| Point::new(x, y))
}

fn pointset(max: usize) -> impl Strategy<Value = PointSet> {
    vec(small_int_point(), 0..=max).prop_map(|v| PointSet::new(v, "prop"))
}

fn polynomial(max_deg: u32) -> impl Strategy<Value = BivariatePolynomial> {
    btree_map((0..=max_deg, 0..=max_deg), -4i64..=4, 1..6).prop_map(move |m| {
        BivariatePolynomial::from_terms(m.into_iter().filter(|((i, j), _)| i + j <= max_deg).map(|(k, c)| (k, Rational::from(c))))
    })
}

fn int_set(max: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::btree_set(-6i64..=6, 1..=max).prop_map(|s| s.into_iter().map(Rational::from).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sqdist_is_symmetric_and_rigid(p in point(), q in point(), dx in rational(), dy in rational(), s in rational()) {
        let d = sqdist(&p, &q);
        prop_assert_eq!(&d, &sqdist(&q, &p));
        prop_assert_eq!(&d, &sqdist(&p.translate(&dx, &dy), &q.translate(&dx, &dy)));
        let flip = |a: &Point| Point::new(-a.x.clone(), a.y.clone());
        prop_assert_eq!(&d, &sqdist(&flip(&p), &flip(&q)));
        let scale = |a: &Point| Point::new(&a.x * &s, &a.y * &s);
        prop_assert_eq!(&d * &s.square(), sqdist(&scale(&p), &scale(&q)));
    }

    #[test]
    fn spectrum_total_counts_ordered_pairs(p in pointset(25)) {
        let n = p.len() as u64;
        prop_assert_eq!(multiplicity_spectrum(&p).total(), n * n.saturating_sub(1));
    }

    #[test]
    fn bipartite_total(p in pointset(12), q in pointset(12)) {
        let common = p.points().iter().filter(|x| q.contains(x)).count() as u64;
        prop_assert_eq!(bipartite_spectrum(&p, &q).total(), (p.len() * q.len()) as u64 - common);
    }

    #[test]
    fn energy_matches_tuple_count(p in pointset(8), d in 1u32..=3) {
        let s = multiplicity_spectrum(&p);
        prop_assert_eq!(energy(&s, d).unwrap(), energy_bruteforce(&p, d, &Caps::default()).unwrap());
    }

    #[test]
    fn holder_bound_and_monotone(p in pointset(30), d in 1u32..=4) {
        let s = multiplicity_spectrum(&p);
        let e = energy(&s, d).unwrap();
        prop_assert!(at_least(&e, &holder_lower_bound(p.len() as u64, s.distinct() as u64, d).unwrap()));
        prop_assert!(energy(&s, d + 1).unwrap() >= e);
    }

    #[test]
    fn spectrum_roundtrips_through_counts(p in pointset(15)) {
        let s = multiplicity_spectrum(&p);
        let rebuilt = MultiplicitySpectrum::from_counts(s.entries().iter().map(|(k, &m)| (k.clone(), m)));
        prop_assert_eq!(rebuilt, s);
    }

    #[test]
    fn isosceles_count_bounded_by_triples(p in pointset(15)) {
        let n = p.len() as u64;
        prop_assert!(isosceles_count(&p) <= n * n.saturating_sub(1) * n.saturating_sub(2) / 6);
    }

    #[test]
    fn rational_text_roundtrip(r in rational()) {
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
    }

    #[test]
    fn polynomial_text_roundtrip(f in polynomial(4)) {
        prop_assert_eq!(f.to_string().parse::<BivariatePolynomial>().unwrap(), f);
    }

    #[test]
    fn product_divides_exactly(f in polynomial(3), g in polynomial(3)) {
        prop_assume!(!g.is_zero());
        prop_assert_eq!((&f * &g).div_exact(&g), Some(f));
    }

    #[test]
    fn translation_composes(f in polynomial(3), a in rational(), b in rational(), c in rational(), d in rational()) {
        prop_assert_eq!(f.translate(&a, &b).translate(&c, &d), f.translate(&(&a + &c), &(&b + &d)));
    }

    #[test]
    fn compositions_decompose(inner in polynomial(2), outer in vec(-3i64..=3, 3..=4)) {
        prop_assume!(!inner.is_constant());
        prop_assume!(*outer.last().unwrap() != 0);
        let f = UnivariatePolynomial::from_integers(&outer).apply(&inner);
        let d = decompose(&f, 12).unwrap();
        prop_assert!(d.is_some_and(|d| d.outer.degree() >= 2 && d.outer.apply(&d.inner) == f));
    }

    #[test]
    fn expansion_energy_matches_quadruples(f in polynomial(3), a in int_set(6), b in int_set(6)) {
        let e = expansion_energy(&image_spectrum(&f, &a, &b));
        prop_assert_eq!(e, expansion_energy_bruteforce(&f, &a, &b, &Caps::default()).unwrap().into());
    }

    #[test]
    fn extraction_respects_pair_bound(side in 4usize..=20, seed in 0u64..1000, e3 in any::<bool>()) {
        let n = side * side;
        let variant = if e3 { SamplingVariant::PlaneE3 } else { SamplingVariant::PlaneE5 };
        let grid = integer_grid(n);
        let plan = sampling_plan(n as u64, variant, &Rational::one(), seed).unwrap();
        let r = extract_subset(&grid, variant.max_pairs(), &plan).unwrap();
        prop_assert!(verify_max_pair_multiplicity(&r.subset, variant.max_pairs()));
        prop_assert_eq!(isosceles_count(&r.subset), 0);
    }
}
