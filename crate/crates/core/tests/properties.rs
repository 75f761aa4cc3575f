use std::f64::consts::PI;

use exoflex::bricard::{classify_quad, vertex_link, Pairing};
use exoflex::cli::Scenario;
use exoflex::configspace::{diagonals, recover_state, y_bounds, Component};
use exoflex::elliptic::EllipticModulus;
use exoflex::numeric::{wrap_centered, TWO_PI_SQ};
use exoflex::octa::{build, normalize_variant};
use exoflex::sphere::{dist, triangle_area, OracleOptions};
use exoflex::volume::{
    closed_form_real, decomposition_volume, derivative_and_q, eps2_gap, sigma_distance, AreaFunctions, Decomposition,
};
use exoflex::{AntipodeMask, ExoticParams, FlexState, Sign, SpherePoint, VertexId};
use proptest::prelude::*;

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

/// Valid families, `p₂` of either sign when `any_p2`.
fn family(any_p2: bool) -> impl Strategy<Value = ExoticParams> {
    (0.15f64..0.85, 0.05f64..0.95, 0.15f64..0.85, 0.05f64..0.95, sign(), sign(), sign(), sign()).prop_filter_map(
        "valid family",
        move |(p2, r1, q2, r2, s1, s2, s3, s4)| {
            let p2 = if any_p2 { p2 * s2.value() } else { p2 };
            let p = ExoticParams::new(p2.abs() * r1 * s1.value(), p2, q2.abs() * r2 * s3.value(), q2 * s4.value());
            (p.validate().is_empty() && p.p2 * p.p2 + p.q2 * p.q2 < 0.95).then_some(p)
        },
    )
}

/// A fraction in `(0, 1)`, kept away from the branch points at the ends.
fn interior() -> impl Strategy<Value = f64> {
    0.01f64..0.99
}

fn state(p: &ExoticParams, t: f64, s: [Sign; 4]) -> FlexState {
    let (lo, hi) = p.theta_bounds();
    FlexState::with_signs(lo + (hi - lo) * t, s)
}

fn point() -> impl Strategy<Value = SpherePoint> {
    prop::array::uniform4(-1.0f64..1.0).prop_filter_map("nonzero", |x| {
        let n = x.iter().map(|v| v * v).sum::<f64>();
        (n > 0.05).then(|| SpherePoint::new(x[0], x[1], x[2], x[3]).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dist_symmetric_and_supplementary(u in point(), v in point()) {
        prop_assert!((dist(&u, &v) - dist(&v, &u)).abs() < 1e-12);
        prop_assert!((dist(&u, &v) + dist(&v, &u.antipode()) - PI).abs() < 1e-12);
    }

    #[test]
    fn triangle_area_permutation_invariant(a in point(), b in point(), c in point()) {
        let (x, y, z) = (b.dot(&c), c.dot(&a), a.dot(&b));
        if let Ok(area) = triangle_area(x, y, z) {
            for (u, v, w) in [(y, z, x), (z, x, y), (y, x, z), (x, z, y), (z, y, x)] {
                prop_assert!((triangle_area(u, v, w).unwrap() - area).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn edge_lengths_independent_of_state(p in family(true), t in 0.0f64..=1.0, u in 0.0f64..=1.0,
                                         s in prop::array::uniform4(sign()), r in prop::array::uniform4(sign())) {
        let a = build(&p, &state(&p, t, s)).unwrap().edge_lengths();
        let b = build(&p, &state(&p, u, r)).unwrap().edge_lengths();
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn flipping_all_signs_is_a_half_turn(p in family(true), t in interior(), s in prop::array::uniform4(sign())) {
        let st = state(&p, t, s);
        let a = build(&p, &st).unwrap();
        let b = build(&p, &st.flipped()).unwrap();
        for v in VertexId::ALL {
            let [x1, x2, x3, x4] = a[v].coords();
            let turned = SpherePoint::new(x1, -x2, x3, -x4).unwrap();
            prop_assert!(turned.max_abs_diff(&b[v]) < 1e-12);
        }
    }

    #[test]
    fn four_sign_choices_are_distinct(p in family(true), t in interior()) {
        let octa: Vec<_> = [Sign::Plus, Sign::Minus]
            .into_iter()
            .flat_map(|d| [Sign::Plus, Sign::Minus].map(move |e| (d, e)))
            .map(|(d2, e2)| build(&p, &state(&p, t, [Sign::Plus, d2, Sign::Plus, e2])).unwrap())
            .collect();
        for i in 0..4 {
            for j in 0..i {
                prop_assert!(octa[i].max_vertex_diff(&octa[j]) > 1e-6);
            }
        }
    }

    #[test]
    fn biquadratic_residuals_vanish(p in family(true), t in interior(), s in prop::array::uniform4(sign())) {
        let o = build(&p, &state(&p, t, s)).unwrap();
        for v in VertexId::ALL {
            for r in vertex_link(&o, v).unwrap().residuals() {
                prop_assert!(r.abs() < 1e-9, "{v} {r}");
            }
        }
    }

    #[test]
    fn quad_class_rotates_with_pairing(sides in prop::array::uniform4(0.1f64..3.0), pick in 0usize..4) {
        let mut s = sides;
        match pick {
            0 => s[2] = s[0],
            1 => s[1] = s[0],
            2 => s[3] = PI - s[0],
            _ => {}
        }
        let c = classify_quad(s, 1e-9);
        let r = classify_quad([s[1], s[2], s[3], s[0]], 1e-9);
        let relabeled = match c.pairing {
            Pairing::AbCd => Pairing::BcDa,
            Pairing::BcDa => Pairing::AbCd,
            other => other,
        };
        prop_assert_eq!(r.kind, c.kind);
        prop_assert_eq!(r.pairing, relabeled);
    }

    #[test]
    fn diagonals_recover_the_state(p in family(true), t in interior(), s in prop::array::uniform4(sign())) {
        let st = state(&p, t, [Sign::Plus, s[1], s[2], s[3]]);
        let o = build(&p, &st).unwrap();
        let r = recover_state(&p, &diagonals(&o), Component::of_state(&st), 1e-9).unwrap();
        prop_assert_eq!(r.state.signs(), st.signs());
        prop_assert!((r.state.theta - st.theta).abs() < 1e-10);
    }

    #[test]
    fn areas_stay_inside_bounds(p in family(false), t in interior()) {
        let (lo, hi) = y_bounds(&p).unwrap();
        let a = AreaFunctions::new(&p);
        for j in [1, 2] {
            let v = a.area(j, lo + (hi - lo) * t).unwrap();
            prop_assert!(v > 0.0 && v < 2.0 * PI, "A{j} = {v}");
        }
    }

    #[test]
    fn eps2_gap_holds(p in family(true), t in interior()) {
        let (lo, hi) = y_bounds(&p).unwrap();
        let (lhs, rhs) = eps2_gap(&p, lo + (hi - lo) * t).unwrap();
        prop_assert!(wrap_centered(lhs - rhs, TWO_PI_SQ).abs() < 1e-9);
    }

    #[test]
    fn quartic_matches_derivatives(p in family(true), t in interior()) {
        let (lo, hi) = y_bounds(&p).unwrap();
        let y = lo + (hi - lo) * t;
        let q = derivative_and_q(&p).unwrap();
        let (direct, from_a) = (q.eval(y), q.from_derivatives(y).unwrap());
        prop_assert!((direct - from_a).abs() <= 1e-8 * direct.abs().max(1.0), "{direct} {from_a}");
        prop_assert!((q.c3_plus_c0() - q.expanded_c3_plus_c0()).abs() < 1e-12);
    }

    #[test]
    fn normalized_variants_rebuild_antipode_substitution(p in family(true), t in interior(),
                                                         s in prop::array::uniform4(sign()), bits in 0u8..64) {
        let mask = AntipodeMask::from_bits(bits).unwrap();
        let st = state(&p, t, s);
        let direct = build(&p, &st).unwrap().antipode_variant(mask).unwrap();
        let nv = normalize_variant(&p, mask);
        prop_assert!(nv.rebuild(&st).unwrap().max_vertex_diff(&direct) < 1e-10);
    }

    #[test]
    fn jacobi_identities(k in 0.0f64..0.999, u in -20.0f64..20.0) {
        let m = EllipticModulus::new(k).unwrap();
        let j = m.jacobi(u);
        prop_assert!((j.sn * j.sn + j.cn * j.cn - 1.0).abs() < 1e-12);
        prop_assert!((j.dn * j.dn + k * k * j.sn * j.sn - 1.0).abs() < 1e-12);
        prop_assert!(j.dn >= m.k_prime - 1e-12 && j.dn <= 1.0 + 1e-12);
        let shifted = m.jacobi(u + 4.0 * m.quarter_period);
        prop_assert!((shifted.sn - j.sn).abs() < 1e-9 && (shifted.cn - j.cn).abs() < 1e-9);
    }

    #[test]
    fn scenario_round_trips(p in family(true), samples in 8usize..4096, seed in any::<u64>(), fit in 1e-14f64..1e-3) {
        let mut s = Scenario { params: p.as_array(), samples, seed, ..Scenario::default() };
        s.set_tolerance(&format!("fit={fit:e}")).unwrap();
        prop_assert_eq!(Scenario::from_toml(&s.to_toml()).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn variant_closed_form_matches_sampling(p in family(false), t in interior(), s in prop::array::uniform4(sign()),
                                            bits in 0u8..64, seed in any::<u64>()) {
        let mask = AntipodeMask::from_bits(bits).unwrap();
        let st = state(&p, t, s);
        let direct = build(&p, &st).unwrap().antipode_variant(mask).unwrap();
        let nv = normalize_variant(&p, mask);
        let closed = nv.volume_factor() * closed_form_real(&nv.params, &nv.state(&st)).unwrap();
        let opts = OracleOptions::seeded(400_000, seed);
        let sampled = decomposition_volume(&direct, Decomposition::ApexSum, &opts).unwrap();
        prop_assert!(sigma_distance(&sampled, closed) < 5.0, "{closed} {sampled:?}");
    }

    #[test]
    fn sampled_volume_flips_under_odd_permutation(a in point(), b in point(), c in point(), d in point(), seed in any::<u64>()) {
        let opts = OracleOptions::seeded(200_000, seed);
        let (v, e) = exoflex::sphere::tetra_volume_oriented([a, b, c, d], &opts).unwrap();
        let (w, f) = exoflex::sphere::tetra_volume_oriented([b, a, c, d], &opts).unwrap();
        let sum = wrap_centered(v.representative() + w.representative(), TWO_PI_SQ);
        prop_assert!(sum.abs() <= 1e-12 + 4.0 * (e + f), "{sum} {e} {f}");
    }
}
