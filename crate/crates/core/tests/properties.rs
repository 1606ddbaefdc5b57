use chebvar::algebra::{parse_poly, resultant, squarefree_part, to_text, univariate_gcd};
use chebvar::chebyshev::cheb1_in;
use chebvar::dynamics::{iterate_orbit, jordan_curve_data, AngleSample, OrbitStatus};
use chebvar::invariants::induced_morphism;
use chebvar::{rat, QPoly, Rational, C64};
use proptest::prelude::*;

const VARS: [&str; 2] = ["p", "q"];

fn poly() -> impl Strategy<Value = QPoly> {
    prop::collection::vec(((0u32..4, 0u32..4), -9i64..=9, 1i64..=4), 0..6).prop_map(|terms| {
        QPoly::from_terms(&VARS, terms.into_iter().map(|((a, b), n, d)| (vec![a, b], rat(n, d))))
    })
}

fn nonconstant_in_q() -> impl Strategy<Value = QPoly> {
    (poly(), 1u32..3, 1i64..=5).prop_map(|(f, e, c)| f.add(&QPoly::from_terms(&VARS, [(vec![0, e + 3], rat(c, 1))])))
}

fn point() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-6i64..=6, 1i64..=3), 2).prop_map(|v| v.into_iter().map(|(n, d)| rat(n, d)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn substitution_commutes_with_evaluation(f in poly(), g in poly(), h in poly(), x in point()) {
        let composed = f.substitute(&[("p", &g), ("q", &h)]);
        let inner = [g.evaluate(&x), h.evaluate(&x)];
        prop_assert_eq!(composed.evaluate(&x), f.evaluate(&inner));
    }

    #[test]
    fn resultant_antisymmetry(f in nonconstant_in_q(), g in nonconstant_in_q()) {
        let fg = resultant(&f, &g, "q").unwrap();
        let gf = resultant(&g, &f, "q").unwrap();
        let sign = if (f.degree_in("q") * g.degree_in("q")) % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(fg, gf.scale_int(sign));
    }

    #[test]
    fn resultant_vanishes_on_common_factor(f in nonconstant_in_q(), g in nonconstant_in_q(), h in nonconstant_in_q()) {
        let r = resultant(&f.mul(&h), &g.mul(&h), "q").unwrap();
        prop_assert!(r.is_zero());
    }

    #[test]
    fn text_round_trip(f in poly()) {
        let back: QPoly = parse_poly(&to_text(&f), Some(&VARS)).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn complex_evaluation_matches_exact(f in poly(), x in point()) {
        let exact: f64 = num_traits::ToPrimitive::to_f64(&f.evaluate(&x)).unwrap();
        let z: Vec<C64> = x.iter().map(|v| C64::new(num_traits::ToPrimitive::to_f64(v).unwrap(), 0.0)).collect();
        let approx = f.evaluate_complex(&z);
        prop_assert!((approx.re - exact).abs() <= 1e-9 * (1.0 + exact.abs()));
        prop_assert!(approx.im == 0.0);
    }

    #[test]
    fn squarefree_part_drops_repeats(roots in prop::collection::vec(-5i64..=5, 1..5)) {
        let mut f = QPoly::constant(&["t"], rat(1, 1));
        for r in &roots {
            let lin = parse_poly::<Rational>(&format!("t - ({r})"), Some(&["t"])).unwrap();
            f = f.mul(&lin.pow(2));
        }
        let sf = squarefree_part(&f, "t").unwrap();
        let mut distinct = roots.clone();
        distinct.sort();
        distinct.dedup();
        prop_assert_eq!(sf.degree_in("t") as usize, distinct.len());
        let g = univariate_gcd(&f, &sf, "t").unwrap();
        prop_assert_eq!(g, sf);
    }

    #[test]
    fn chebyshev_composition(j in 1u32..6, k in 1u32..6) {
        let tj = cheb1_in(j, "t");
        let tk = cheb1_in(k, "t");
        prop_assert_eq!(tj.substitute(&[("t", &tk)]), cheb1_in(j * k, "t"));
    }

    #[test]
    fn angles_are_canonical(a in -100.0f64..100.0, b in -100.0f64..100.0) {
        let s = AngleSample::new(&[a, b]);
        for x in s.angles {
            prop_assert!((0.0..std::f64::consts::TAU).contains(&x));
        }
    }

    #[test]
    fn jordan_arcs_lie_on_their_curves(n in 2usize..200) {
        for pt in jordan_curve_data(n).unwrap() {
            let (p, q) = (pt.p, pt.q);
            let residual = match pt.arc_id {
                1 => (p * p * p - q * q) / (1.0 + p.abs().powi(3) + q * q),
                _ => (27.0 + 8.0 * q - 18.0 * p - p * p) / (27.0 + 8.0 * q.abs() + 18.0 * p.abs() + p * p),
            };
            prop_assert!(residual.abs() < 1e-12, "{:?}", pt);
        }
    }

    #[test]
    fn orbit_record_invariants(p in -12.0f64..12.0, q in -30.0f64..30.0, d in 2u32..4) {
        let g = induced_morphism(2, d).unwrap().map.compile::<f64>();
        let rec = iterate_orbit(&g, &[C64::new(p, 0.0), C64::new(q, 0.0)], 64, 1e6).unwrap();
        let norm = |z: &Vec<C64>| z.iter().map(|c| c.norm()).fold(0.0, f64::max);
        match rec.status {
            OrbitStatus::Escaped => {
                let last = rec.iterates.last().unwrap();
                prop_assert!(rec.non_finite || norm(last) > 1e6);
                prop_assert_eq!(rec.escape_index, Some(rec.iterates.len() - 1));
            }
            OrbitStatus::BoundedHorizon => {
                prop_assert_eq!(rec.iterates.len(), 64);
                prop_assert!(rec.iterates.iter().all(|z| norm(z) <= 1e6));
            }
        }
    }
}
