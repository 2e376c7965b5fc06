use super::*;
use crate::heights::model_shift;
use crate::models::{apply, mat_from_i64, Transformation, WeierstrassCurve};

struct Case {
    model: GenusOneModel,
    curve: WeierstrassCurve,
    delta: f64,
    epsilon: f64,
}

fn e_7823() -> WeierstrassCurve {
    WeierstrassCurve::from_i64([0, 0, 0, 0, 7823])
}
fn e_120267() -> WeierstrassCurve {
    WeierstrassCurve::from_i64([0, 0, 1, -41079, -2440008])
}
fn e_twist() -> WeierstrassCurve {
    WeierstrassCurve::from_i64([1, -1, 1, -12738471055, -557083080312803])
}

fn published() -> Vec<Case> {
    let c = |model, curve, delta, epsilon| Case { model, curve, delta, epsilon };
    vec![
        c(GenusOneModel::deg2(&[1, 0, 1], &[-3, 28, -2, -4, 10]), e_7823(), 2432.85234808033, 40.3085657668952),
        c(GenusOneModel::deg3(&[1, 1, 1, -5, 8, 1, -7, -4, 0, -8]), e_7823(), 39391482.5461577, 4772.60007752629),
        c(
            GenusOneModel::deg4(&[0, 2, 1, 1, 0, 0, 1, 1, 0, -2], &[1, 0, 1, -1, 2, -1, 2, -1, -1, 1]),
            e_7823(),
            5322605580516.10,
            290574539.795749,
        ),
        c(GenusOneModel::deg2(&[0, 0, 1], &[-5, -171, 78, 216, -106]), e_120267(), 213671.613980717, 23133.0204561585),
        c(GenusOneModel::deg3(&[0, 7, -6, 10, 0, 12, -17, -9, 9, -12]), e_120267(), 81415185143.0446, 323095714.930505),
        c(
            GenusOneModel::deg4(&[0, 1, 1, 3, 0, 1, -4, 1, 6, 2], &[0, 0, 3, 3, -1, 1, 0, -9, 4, 1]),
            e_120267(),
            1474348448128668255.0,
            27971735621467.6,
        ),
        c(
            GenusOneModel::deg4(&[3, 17, 1, 7, -5, 11, 6, 5, 0, 9], &[10, 7, -1, -1, 4, -1, -13, 14, -30, 18]),
            e_twist(),
            58937229886421092237949354547584415.667,
            5651842748943718038658452564426710.83,
        ),
        c(
            GenusOneModel::deg4(&[3, 3, 4, 6, 3, -3, 2, 6, -28, 11], &[4, 1, -7, 9, -4, -8, 38, 31, 14, 16]),
            e_twist(),
            178199482704834663586827454064400000.46,
            9444738605534077340271210291799317.07,
        ),
        c(
            GenusOneModel::deg4(&[2, 4, 10, 3, -3, -2, -6, -5, -10, -21], &[14, 1, 11, -11, 2, 25, 15, -2, -24, 12]),
            e_twist(),
            308549962966716863880129425818056524.23,
            16208124387092338049459016177006062.23,
        ),
    ]
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn published_extrema_of_all_models() {
    for case in published() {
        let r = model_shift(&case.model, &case.curve).unwrap().r;
        let b = delta_epsilon_real(&case.model, &r, 10).unwrap();
        assert!(rel(b.delta_inf, case.delta) < 1e-6, "delta {} vs {}", b.delta_inf, case.delta);
        assert!(rel(b.epsilon_inf, case.epsilon) < 1e-6, "epsilon {} vs {}", b.epsilon_inf, case.epsilon);
        assert!(b.critical_points.iter().any(|c| rel(c.value, b.delta_inf) < 1e-9));
        assert!(b.critical_points.iter().any(|c| rel(c.value, b.epsilon_inf) < 1e-9));
    }
}

#[test]
fn sampled_ratios_lie_between_the_extrema() {
    for case in published() {
        let r = model_shift(&case.model, &case.curve).unwrap().r;
        let b = delta_epsilon_real(&case.model, &r, 10).unwrap();
        let a = audit(&case.model, &b, 2000, 1e-6).unwrap();
        assert!(a.samples >= 1000);
        assert_eq!(a.outside, 0, "{a:?}");
    }
}

#[test]
fn signed_permutations_preserve_the_extrema() {
    let cases = published();
    let c3 = &cases[1];
    let swap = Transformation::Deg3 { mu: rat(1, 1), n: mat_from_i64(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 1]]) };
    let c4 = &cases[2];
    let perm4 = Transformation::Deg4 {
        m: mat_from_i64(&[&[0, 1], &[1, 0]]),
        n: mat_from_i64(&[&[0, 0, 1, 0], &[1, 0, 0, 0], &[0, -1, 0, 0], &[0, 0, 0, 1]]),
    };
    for (case, g) in [(c3, swap), (c4, perm4)] {
        let moved = apply(&g, &case.model).unwrap();
        let r = model_shift(&moved, &case.curve).unwrap().r;
        let b = delta_epsilon_real(&moved, &r, 10).unwrap();
        assert!(rel(b.delta_inf, case.delta) < 1e-6 && rel(b.epsilon_inf, case.epsilon) < 1e-6);
    }
}

#[test]
fn rational_points_give_ratios_inside_the_bounds() {
    let cases = published();
    let pts: [(usize, &[i64]); 4] = [(1, &[10445, -32922, 16423]), (2, &[116, 207, 474, -332]), (4, &[1, 0, 0]), (5, &[-2, 5, 2, 7])];
    for (i, p) in pts {
        let case = &cases[i];
        let r = model_shift(&case.model, &case.curve).unwrap().r;
        let b = delta_epsilon_real(&case.model, &r, 10).unwrap();
        let rf = RatioFunction::new(&covering_polynomials(&case.model), &r);
        let q: Vec<Rational> = p.iter().map(|&x| rat(x, 1)).collect();
        let v = rf.value_exact(&q);
        assert!(b.epsilon_inf * (1.0 - 1e-9) <= v && v <= b.delta_inf * (1.0 + 1e-9), "{v}");
    }
}

#[test]
fn real_insoluble_model_is_a_domain_error() {
    let m = GenusOneModel::deg2(&[0, 0, 0], &[-1, 0, -1, 0, -1]);
    assert!(matches!(delta_epsilon_real(&m, &rat(0, 1), 6), Err(Error::Domain(_))));
}

#[test]
fn json_report_carries_the_shift() {
    let case = &published()[0];
    let b = delta_epsilon_real(&case.model, &rat(-1, 1), 6).unwrap();
    let j = b.to_json();
    assert_eq!(j["r"], serde_json::json!("-1"));
    assert!(j["critical_points"].as_array().is_some_and(|a| !a.is_empty()));
}
