//! Pareto, saturation and sweep properties.

use dnnscope::cost::{report, PlatformSpec};
use dnnscope::dse::{
    attach_accuracy, check_constraints, dominance_witnesses, find_saturation, pareto_front, sweep,
    AccuracyTable, ConstraintSet, CsvPoint, Grid, MetaValue, Objective, Status,
};
use dnnscope::zoo::{squeezenet, Family, PoolPlacement};
use proptest::prelude::*;

fn cloud(points: &[(f64, f64, f64)]) -> Vec<CsvPoint> {
    points
        .iter()
        .map(|&(a, b, c)| {
            [("a", a), ("b", b), ("c", c)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

/// Brute-force front: points no other point dominates.
fn brute_force(points: &[(f64, f64, f64)]) -> Vec<usize> {
    let key = |p: &(f64, f64, f64)| [p.0, -p.1, p.2];
    (0..points.len())
        .filter(|&i| {
            !(0..points.len()).any(|j| {
                let (x, y) = (key(&points[j]), key(&points[i]));
                x.iter().zip(&y).all(|(a, b)| a <= b) && x.iter().zip(&y).any(|(a, b)| a < b)
            })
        })
        .collect()
}

fn small() -> impl Strategy<Value = f64> {
    (0u8..12).prop_map(|v| v as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn front_matches_brute_force(pts in prop::collection::vec((small(), small(), small()), 1..60)) {
        let objectives = Objective::parse_list("a:min,b:max,c:min").unwrap();
        let data = cloud(&pts);
        let front = pareto_front(&data, &objectives).unwrap();
        let mut sorted = front.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, brute_force(&pts));
        prop_assert!(front.windows(2).all(|w| pts[w[0]].0 <= pts[w[1]].0));

        let sub: Vec<CsvPoint> = front.iter().map(|&i| data[i].clone()).collect();
        let again = pareto_front(&sub, &objectives).unwrap();
        prop_assert_eq!(again, (0..sub.len()).collect::<Vec<_>>());

        let witness = dominance_witnesses(&data, &objectives, &front).unwrap();
        for (i, w) in witness.iter().enumerate() {
            prop_assert_eq!(w.is_none(), front.contains(&i));
        }
    }

    #[test]
    fn saturation_survives_flat_appends(
        errors in prop::collection::vec(0.0f64..0.5, 1..10),
        extra in prop::collection::vec(-1.0f64..1.0, 1..5),
    ) {
        let eps = 0.005;
        let mut rows: Vec<CsvPoint> = errors
            .iter()
            .enumerate()
            .map(|(i, e)| [("x".to_string(), i.to_string()), ("top5_error".to_string(), e.to_string())].into_iter().collect())
            .collect();
        if let Some(s) = find_saturation(&rows, "x", eps).unwrap() {
            let base = errors[s];
            for (k, d) in extra.iter().enumerate() {
                let e = base + d * eps;
                rows.push([("x".to_string(), (errors.len() + k).to_string()), ("top5_error".to_string(), e.to_string())].into_iter().collect());
            }
            prop_assert_eq!(find_saturation(&rows, "x", eps).unwrap(), Some(s));
        }
    }
}

fn p_grid() -> Grid {
    [("p".to_string(), [0.5, 0.675, 0.75, 0.825, 1.0].map(MetaValue::from).to_vec())]
        .into_iter()
        .collect()
}

#[test]
fn p_sweep_is_monotone_and_deterministic() {
    let platform = PlatformSpec::default();
    let a = sweep(Family::SqueezeNet, &p_grid(), &platform, 100).unwrap();
    let b = sweep(Family::SqueezeNet, &p_grid(), &platform, 100).unwrap();
    assert_eq!(a.len(), 5);
    assert!(a.windows(2).all(|w| w[0].metrics.total_params < w[1].metrics.total_params));
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn flat_accuracy_table_saturates_at_half() {
    let mut points = sweep(Family::SqueezeNet, &p_grid(), &PlatformSpec::default(), 100).unwrap();
    let table = AccuracyTable::from_csv("p,top5_error\n0.5,0.15\n0.675,0.15\n0.75,0.15\n0.825,0.15\n1.0,0.15\n".as_bytes()).unwrap();
    let unmatched = attach_accuracy(&mut points, &table).unwrap();
    assert!(unmatched.is_empty());
    assert!(points.iter().all(|p| p.top5_error == Some(0.15)));
    let s = find_saturation(&points, "total_params", 0.005).unwrap().unwrap();
    assert_eq!(points[s].metaparams["p"], MetaValue::Number(0.5));

    let mut untouched = points.clone();
    assert!(attach_accuracy(&mut untouched, &AccuracyTable::default()).unwrap().is_empty());
    assert_eq!(untouched, points);

    let extra = AccuracyTable::from_csv("p,top5_error\n0.9,0.2\n".as_bytes()).unwrap();
    let unmatched = attach_accuracy(&mut untouched, &extra).unwrap();
    assert_eq!(unmatched.len(), 1);
}

#[test]
fn squeezenet_does_not_fit_8192kb() {
    let platform = PlatformSpec::default();
    let g = squeezenet(0.5, PoolPlacement::default()).unwrap();
    let point = dnnscope::dse::DesignPoint {
        metaparams: Default::default(),
        metrics: report(&g, &platform).unwrap(),
        top5_error: None,
    };
    let c = ConstraintSet {
        max_onchip_bytes: Some(8192 * 1024),
        ..Default::default()
    };
    let r = check_constraints(&point, &c);
    assert!(!r.passed);
    assert_eq!(r.results[0].status, Status::Fail);
    assert!(point.metrics.storage_bytes < 8192 * 1024);
}
