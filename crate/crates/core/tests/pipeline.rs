use heisdistort_core::bounds::{construction_beta, figure2};
use heisdistort_core::construction::{build_map, eval_map, make_params, phi, read_map, sample_e_alpha, write_map};
use heisdistort_core::dimension::{estimate_dim, MetricSel, PointCloud};
use heisdistort_core::rng::trial_rng;
use heisdistort_core::subgroups::HorizontalSubgroup;
use heisdistort_core::{Error, HPoint};
use rand::Rng;

fn random_point(rng: &mut impl Rng) -> HPoint {
    HPoint::h1(rng.gen_range(-0.2..1.2), rng.gen_range(-0.2..1.2), rng.gen_range(-0.5..3.0))
}

#[test]
fn saved_map_evaluates_like_the_original() {
    let q = make_params(6.0, 1.2, 2, 2).unwrap();
    let map = build_map(&q, 11);
    let mut bytes = Vec::new();
    write_map(&map, &mut bytes, 1_000_000).unwrap();
    let file = read_map(bytes.as_slice()).unwrap();
    assert_eq!(file.params, q);
    assert_eq!(file.seed, 11);
    for (m, level) in file.levels.iter().enumerate() {
        assert_eq!(level.len() as u64, map.ball_count(m as u32 + 1));
    }
    let back = file.to_map();
    let mut rng = trial_rng(11, 0);
    for _ in 0..200 {
        let p = random_point(&mut rng);
        assert_eq!(eval_map(&map, &p), eval_map(&back, &p));
    }
}

#[test]
fn saving_respects_the_ball_limit() {
    let q = make_params(6.0, 1.2, 2, 2).unwrap();
    let mut bytes = Vec::new();
    assert!(matches!(write_map(&build_map(&q, 1), &mut bytes, 10), Err(Error::Format(_))));
    assert!(read_map(&b"not a map"[..]).is_err());
}

#[test]
fn column_coordinates_match_the_vertical_projection() {
    let v = HorizontalSubgroup::x_axis();
    let mut rng = trial_rng(3, 0);
    for _ in 0..500 {
        let p = random_point(&mut rng);
        let (_, y, tp) = phi(&p);
        let w = v.proj_vert(&p).into_point();
        assert_eq!(w.z()[0], 0.0);
        assert!((w.z()[1] - y).abs() < 1e-12);
        assert!((w.t() - tp).abs() < 1e-12, "{} {tp}", w.t());
    }
}

#[test]
fn construction_curve_meets_its_parameters() {
    let q = make_params(6.0, 1.2, 3, 2).unwrap();
    assert_eq!(q.beta_c, construction_beta(6.0, 1.2).unwrap());
    assert!((4.0 * q.sigma.powf(q.beta_c) - 1.0).abs() < 1e-12);
    let series = figure2(6.0, 11).unwrap();
    let cons = series.iter().find(|s| s.formula.id() == "construction").unwrap();
    let at = cons.points.iter().find(|(a, _)| (a - 1.2).abs() < 1e-12).unwrap();
    assert!((at.1 - q.beta_c).abs() < 1e-12);
}

#[test]
fn base_points_form_a_one_dimensional_set() {
    let q = make_params(6.0, 1.2, 7, 2).unwrap();
    let pts: Vec<HPoint> = sample_e_alpha(&q, 20_000, 5).into_iter().map(|(_, a)| a.into_point()).collect();
    let cloud = PointCloud::from_hpoints(&pts, MetricSel::EuclideanAmbient).unwrap();
    let est = estimate_dim(&cloud, 0.1, 0.005, 6).unwrap();
    assert!((est.value - 1.0).abs() < 0.15, "{est:?}");
}
