use super::*;

fn c2_120267() -> GenusOneModel {
    GenusOneModel::deg2(&[0, 0, 1], &[-5, -171, 78, 216, -106])
}

fn c3_120267() -> GenusOneModel {
    GenusOneModel::deg3(&[0, 7, -6, 10, 0, 12, -17, -9, 9, -12])
}

fn c4_120267() -> GenusOneModel {
    GenusOneModel::deg4(&[0, 1, 1, 3, 0, 1, -4, 1, 6, 2], &[0, 0, 3, 3, -1, 1, 0, -9, 4, 1])
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

fn dist(m: &GenusOneModel, p: u64) -> Vec<u32> {
    tamagawa_distances(m, p, Chart::Full).unwrap().distances
}

#[test]
fn published_distances_of_the_rank_two_curve() {
    assert_eq!(dist(&c2_120267(), 3), vec![0, 0, 1, 1]);
    assert_eq!(dist(&c2_120267(), 7), vec![0, 0, 1, 1]);
    assert_eq!(dist(&c2_120267(), 23), vec![0]);
    assert_eq!(dist(&c2_120267(), 83), vec![0, 0, 1]);
    assert_eq!(dist(&c3_120267(), 3), vec![2, 3, 3, 4]);
    assert_eq!(dist(&c3_120267(), 7), vec![1, 1, 1, 2]);
    assert_eq!(dist(&c3_120267(), 23), vec![0]);
    assert_eq!(dist(&c3_120267(), 83), vec![0, 1, 2]);
    assert_eq!(dist(&c4_120267(), 3), vec![2, 4, 6, 8]);
    assert_eq!(dist(&c4_120267(), 7), vec![1, 2, 3, 4]);
    assert_eq!(dist(&c4_120267(), 23), vec![0]);
    assert_eq!(dist(&c4_120267(), 83), vec![1, 2, 2]);
}

#[test]
fn published_distances_of_the_twists() {
    let m = c4_twist();
    assert_eq!(dist(&m, 2), vec![0]);
    assert_eq!(dist(&m, 5), vec![6]);
    assert_eq!(dist(&m, 7), vec![1, 1]);
    assert_eq!(dist(&m, 11), vec![0]);
    assert_eq!(dist(&m, 2351), vec![4, 4]);
    for m in [c4_twist_first(), c4_twist_second()] {
        assert_eq!(dist(&m, 7), vec![1, 1]);
        assert_eq!(dist(&m, 2351), vec![0, 4]);
    }
}

#[test]
fn local_contribution_doubles_extremes() {
    let a = TamagawaDistances { p: 3, distances: vec![2, 3, 3, 4] };
    let c = local_contribution(&a).unwrap();
    assert_eq!((c.delta_exp, c.epsilon_exp), (4, 8));
    assert!(local_contribution(&TamagawaDistances { p: 3, distances: vec![] }).is_err());
}

#[test]
fn good_reduction_gives_zero() {
    let m = c3_120267();
    for p in [5, 11, 13] {
        assert_eq!(dist(&m, p), vec![0]);
    }
}
