use super::*;
use crate::covering::CurvePoint;
use crate::exactmath::rational::rat;

fn c2_7823() -> GenusOneModel {
    GenusOneModel::deg2(&[1, 0, 1], &[-3, 28, -2, -4, 10])
}
fn c3_7823() -> GenusOneModel {
    GenusOneModel::deg3(&[1, 1, 1, -5, 8, 1, -7, -4, 0, -8])
}
fn c4_7823() -> GenusOneModel {
    GenusOneModel::deg4(&[0, 2, 1, 1, 0, 0, 1, 1, 0, -2], &[1, 0, 1, -1, 2, -1, 2, -1, -1, 1])
}
fn c2_120267() -> GenusOneModel {
    GenusOneModel::deg2(&[0, 0, 1], &[-5, -171, 78, 216, -106])
}
fn c3_120267() -> GenusOneModel {
    GenusOneModel::deg3(&[0, 7, -6, 10, 0, 12, -17, -9, 9, -12])
}
fn c4_120267() -> GenusOneModel {
    GenusOneModel::deg4(&[0, 1, 1, 3, 0, 1, -4, 1, 6, 2], &[0, 0, 3, 3, -1, 1, 0, -9, 4, 1])
}
fn e_7823() -> WeierstrassCurve {
    WeierstrassCurve::from_i64([0, 0, 0, 0, 7823])
}
fn e_120267() -> WeierstrassCurve {
    WeierstrassCurve::from_i64([0, 0, 1, -41079, -2440008])
}

fn pt(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x, 1)).collect()
}

fn c4_twist() -> GenusOneModel {
    GenusOneModel::deg4(&[3, 17, 1, 7, -5, 11, 6, 5, 0, 9], &[10, 7, -1, -1, 4, -1, -13, 14, -30, 18])
}
fn c4_twist_first() -> GenusOneModel {
    GenusOneModel::deg4(&[3, 3, 4, 6, 3, -3, 2, 6, -28, 11], &[4, 1, -7, 9, -4, -8, 38, 31, 14, 16])
}
fn c4_twist_second() -> GenusOneModel {
    GenusOneModel::deg4(&[2, 4, 10, 3, -3, -2, -6, -5, -10, -21], &[14, 1, 11, -11, 2, 25, 15, -2, -24, 12])
}
fn e_twist() -> WeierstrassCurve {
    WeierstrassCurve::from_i64([1, -1, 1, -12738471055, -557083080312803])
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn minimal_model_of_mordell_curve() {
    let (e, u) = minimal_weierstrass(&rat(0, 1), &rat(-6759072, 1)).unwrap();
    assert_eq!(e, e_7823());
    assert_eq!(u, rat(1, 1));
}

#[test]
fn minimal_model_recovers_normalized_equation() {
    let e = e_120267();
    let (m, u) = minimal_weierstrass(&e.c4(), &e.c6()).unwrap();
    assert_eq!(m, e);
    assert_eq!(u, rat(1, 1));
    // Scaling by u = 6 and by u = 1/5 is undone.
    for (s, expect) in [(rat(6, 1), rat(6, 1)), (rat(1, 5), rat(1, 5))] {
        let c4 = e.c4() * num_traits::pow(s.clone(), 4);
        let c6 = e.c6() * num_traits::pow(s.clone(), 6);
        let (m, u) = minimal_weierstrass(&c4, &c6).unwrap();
        assert_eq!(m, e);
        assert_eq!(u, expect);
    }
}

#[test]
fn minimal_model_of_twisted_curve_is_normalized() {
    let e = e_twist();
    let (m, u) = minimal_weierstrass(&(e.c4() * rat(81, 1)), &(e.c6() * rat(729, 1))).unwrap();
    assert_eq!(m, e);
    assert_eq!(u, rat(3, 1));
}

#[test]
fn minimal_model_keeps_congruence_and_discriminant_conditions_together() {
    // Dividing by 2 satisfies the congruence at 2 but leaves c4^3 - c6^2 not divisible by 64.
    let (c4, c6) = (rat(29008, 1), rat(-4849984, 1));
    let (m, u) = minimal_weierstrass(&c4, &c6).unwrap();
    assert_eq!(u, rat(1, 1));
    assert_eq!((m.c4(), m.c6()), (c4, c6));
}

#[test]
fn kraus_failure_is_an_input_error() {
    assert!(matches!(curve_from_c4c6(&BigInt::from(1), &BigInt::from(2)), Err(Error::Input(_))));
    assert!(matches!(minimal_weierstrass(&rat(1, 1), &rat(1, 1)), Err(Error::Input(_))));
}

#[test]
fn shift_between_identical_curves_is_trivial() {
    let iso = weierstrass_shift(&e_120267(), &e_120267()).unwrap();
    assert_eq!((iso.u, iso.r, iso.s, iso.t), (rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)));
}

#[test]
fn shift_inverts_a_known_substitution() {
    let iso = WeierstrassIso { u: rat(2, 1), r: rat(3, 1), s: rat(-1, 1), t: rat(5, 2) };
    let to = iso.apply(&e_120267());
    assert_eq!(weierstrass_shift(&e_120267(), &to).unwrap(), iso);
    // u = -2 gives the same target up to the automorphism -1, so some shift reproduces it.
    let neg = WeierstrassIso { u: rat(-2, 1), ..iso };
    let to = neg.apply(&e_120267());
    assert_eq!(weierstrass_shift(&e_120267(), &to).unwrap().apply(&e_120267()), to);
}

#[test]
fn shift_of_nonisomorphic_curves_is_an_input_error() {
    assert!(matches!(weierstrass_shift(&e_7823(), &e_120267()), Err(Error::Input(_))));
    // Same j-invariant, different twist.
    let twist = WeierstrassCurve::from_i64([0, 0, 0, 0, -7823]);
    assert!(matches!(weierstrass_shift(&e_7823(), &twist), Err(Error::Input(_))));
}

#[test]
fn shifts_of_the_published_models() {
    let cases = [
        (c2_7823(), e_7823(), -1),
        (c3_7823(), e_7823(), 1),
        (c4_7823(), e_7823(), -2),
        (c2_120267(), e_120267(), 26),
        (c3_120267(), e_120267(), 110),
        (c4_120267(), e_120267(), 23),
        (c4_twist(), e_twist(), -37802),
    ];
    for (m, e, r) in cases {
        let iso = model_shift(&m, &e).unwrap();
        assert_eq!(iso.r, rat(r, 1));
        assert!(iso.s.is_integer() && iso.t.is_integer());
    }
}

#[test]
fn twist_companions_share_the_jacobian_with_integral_shifts() {
    for m in [c4_twist_first(), c4_twist_second()] {
        let iso = model_shift(&m, &e_twist()).unwrap();
        assert!(iso.r.is_integer() && iso.s.is_integer() && iso.t.is_integer());
        assert_eq!(iso.u.abs(), rat(1, 1));
    }
}

#[test]
fn naive_heights() {
    assert_eq!(naive_height(4, &pt(&[1, 0, 0, 0])).unwrap(), 0.0);
    assert!(close(naive_height(3, &pt(&[10445, -32922, 16423])).unwrap(), 32922f64.ln(), 1e-12));
    let h = naive_height(4, &pt(&[116, 207, 474, -332])).unwrap();
    assert!(close(h, 474f64.ln(), 1e-12));
    assert!(265f64.ln() <= h && h <= 1570f64.ln());
    // Degree 2 uses x1, x2 only after weighted scaling.
    let q = vec![rat(2, 7), rat(3, 7), rat(37, 49)];
    assert!(close(naive_height(2, &q).unwrap(), 3f64.ln(), 1e-12));
    let x = CurvePoint::Affine { x: rat(-106, 9), y: rat(0, 1) };
    assert!(close(naive_height_x(&x), 106f64.ln(), 1e-12));
    assert_eq!(naive_height_x(&CurvePoint::Infinity), 0.0);
}

#[test]
fn bounds_for_the_mordell_curve_coverings() {
    let expected = [(c2_7823(), -1.94921, -0.92414), (c3_7823(), -2.91485, -1.41177), (c4_7823(), -3.66288, -2.43592)];
    for (m, b1, b2) in expected {
        let r = height_bounds(&m, &e_7823(), &HeightOptions::default()).unwrap();
        assert!(close(r.b1, b1, 1e-4) && close(r.b2, b2, 1e-4), "{} {}", r.b1, r.b2);
        assert_eq!(r.primes.iter().map(|a| a.p).collect::<Vec<_>>(), vec![2, 3, 7823]);
        assert!(r.primes.iter().all(|a| a.distances == vec![0]));
        assert!(r.b1 <= r.b2);
    }
}

#[test]
fn bounds_for_the_rank_two_double_cover() {
    let r = height_bounds(&c2_120267(), &e_120267(), &HeightOptions::default()).unwrap();
    assert!(close(r.b1, -3.06805, 1e-4) && close(r.b2, 1.21943, 1e-4));
    let json = r.to_json();
    assert_eq!(r.primes.iter().map(|a| a.p).collect::<Vec<_>>(), vec![3, 7, 83]);
    assert_eq!(json["primes"].as_array().unwrap().len(), 3);
    for row in [(&[1, 1, 3][..], [0, 1, 0], -1.68305), (&[2, 3, 37][..], [0, 0, 1], -0.30284)] {
        let rep = point_report(&c2_120267(), &pt(row.0), &r).unwrap();
        let got: Vec<i64> = [7u64, 83].iter().map(|&p| rep.contribution(p).unwrap()).collect();
        assert_eq!(rep.contribution(3).unwrap(), row.1[0] as i64);
        assert_eq!(got, vec![row.1[1] as i64, row.1[2] as i64]);
        assert!(close(rep.difference, row.2, 1e-4));
        assert!(r.b1 <= rep.difference && rep.difference <= r.b2);
    }
}

#[test]
fn ignored_primes_are_left_out() {
    let all = height_bounds(&c2_7823(), &e_7823(), &HeightOptions::default()).unwrap();
    let some = height_bounds(&c2_7823(), &e_7823(), &HeightOptions { ignore_primes: vec![3], digits: 0 }).unwrap();
    assert_eq!(some.primes.len(), 2);
    assert!(close(all.b1, some.b1, 1e-12));
}

#[test]
fn wrong_minimal_curve_is_rejected() {
    assert!(matches!(height_bounds(&c2_7823(), &e_120267(), &HeightOptions::default()), Err(Error::Domain(_))));
    let scaled = WeierstrassCurve::from_i64([0, 0, 0, 0, 7823 * 64]);
    assert!(height_bounds(&c2_7823(), &scaled, &HeightOptions::default()).is_err());
}

#[test]
fn window_and_generator_bound() {
    let (lo, hi) = search_window(77.6177737686381, -3.68142697058737, 0.742473019266345, -3.66288, -2.43592, 4);
    assert!(close(lo, 264.85, 0.05) && close(hi, 1570.44, 0.05), "{lo} {hi}");
    assert!(close(generator_lower_bound(-9.29236, 8.73555112306773, 4), 65.60332, 1e-3));
}

#[test]
fn point_report_rejects_points_off_the_model() {
    let r = height_bounds(&c2_7823(), &e_7823(), &HeightOptions::default()).unwrap();
    assert!(matches!(point_report(&c2_7823(), &pt(&[1, 1, 1]), &r), Err(Error::Input(_))));
}

#[test]
fn cubic_search_finds_the_table_points() {
    let pts = search_points(&c3_120267(), 40).unwrap();
    for p in [[1, 0, 0], [1, -1, -1], [2, -3, 1], [2, 18, 15], [1, -6, 20]] {
        assert!(pts.contains(&p.iter().map(|&x| BigInt::from(x)).collect()), "{p:?}");
    }
    for p in &pts {
        let q: Vec<Rational> = p.iter().map(|x| Rational::from_integer(x.clone())).collect();
        assert!(c3_120267().contains(&q));
    }
}

#[test]
fn double_cover_search_finds_the_table_points() {
    let pts = search_points(&c2_120267(), 800).unwrap();
    for p in [[1, 1, 3], [2, 3, 37], [-6, 1, 178], [-27, 1, 871]] {
        let v: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
        assert!(pts.contains(&v), "{p:?}");
    }
    assert!(pts.iter().all(|p| p[0].abs() <= BigInt::from(800) && p[1].abs() <= BigInt::from(800)));
}

/// Every point of P^3(Q) of height at most h on the model, by exhaustive enumeration.
fn brute_force_deg4(m: &GenusOneModel, h: i64) -> Vec<Vec<BigInt>> {
    let mut out = Vec::new();
    for a in 0..=h {
        for b in -h..=h {
            for c in -h..=h {
                for d in -h..=h {
                    let v = [a, b, c, d];
                    let lead = v.iter().find(|&&x| x != 0);
                    if lead.map_or(true, |&x| x < 0) {
                        continue;
                    }
                    if v.iter().fold(0i64, |g, &x| num_integer::gcd(g, x)) != 1 {
                        continue;
                    }
                    if m.contains(&pt(&v)) {
                        out.push(v.iter().map(|&x| BigInt::from(x)).collect());
                    }
                }
            }
        }
    }
    out.sort();
    out
}

#[test]
fn quadric_intersection_search_is_complete() {
    for m in [c4_7823(), c4_120267()] {
        let h = 12;
        assert_eq!(search_points(&m, h as u64).unwrap(), brute_force_deg4(&m, h));
    }
}

#[test]
fn search_on_real_insoluble_model_is_empty() {
    let m = GenusOneModel::deg2(&[0, 0, 0], &[-1, 0, -1, 0, -1]);
    assert!(search_points(&m, 300).unwrap().is_empty());
    let m = GenusOneModel::deg4(&[1, 0, 0, 0, 1, 0, 0, 1, 0, 1], &[1, 0, 0, 0, -1, 0, 0, 2, 0, -3]);
    assert!(search_points(&m, 50).unwrap().is_empty());
}
