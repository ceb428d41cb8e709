//! Properties of the graph IR, the cost model and the generators.

use dnnscope::cost::{layer_macs, layer_params, model_macs, model_params, peak_activation_bytes, storage_bytes};
use dnnscope::ir::{ArchGraph, ConvSpec, LayerSpec, TensorShape};
use dnnscope::verify::random_graph;
use dnnscope::zoo::{
    fire_stages, place_downsampling, split_expand, squeezenet, Downsampling, Family, FamilyConfig,
    PoolPlacement, FIRE_STAGES,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fuzz(seed: u64, layers: usize) -> ArchGraph {
    random_graph(&mut ChaCha8Rng::seed_from_u64(seed), layers)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn descriptor_round_trips(seed in any::<u64>(), layers in 1usize..12) {
        let g = fuzz(seed, layers);
        let text = g.to_descriptor();
        let back = ArchGraph::from_descriptor(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.to_descriptor(), text);
    }

    #[test]
    fn shape_inference_is_total_and_deterministic(seed in any::<u64>(), layers in 1usize..12) {
        let g = fuzz(seed, layers);
        prop_assert!(g.validate().is_ok());
        let a = g.infer_shapes().unwrap();
        let b = g.infer_shapes().unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn lowering_preserves_cost_and_is_idempotent(seed in any::<u64>(), layers in 1usize..12) {
        let g = fuzz(seed, layers);
        let l = g.lower_fc().unwrap();
        prop_assert_eq!(model_params(&l).unwrap(), model_params(&g).unwrap());
        prop_assert_eq!(model_macs(&l).unwrap(), model_macs(&g).unwrap());
        prop_assert_eq!(l.infer_shapes().unwrap(), g.infer_shapes().unwrap());
        prop_assert_eq!(l.lower_fc().unwrap(), l.clone());
    }

    #[test]
    fn storage_is_four_bytes_per_param(seed in any::<u64>()) {
        let g = fuzz(seed, 8);
        prop_assert_eq!(storage_bytes(&g, 32).unwrap(), 4 * model_params(&g).unwrap());
    }

    #[test]
    fn peak_covers_every_single_tensor(seed in any::<u64>()) {
        let g = fuzz(seed, 8);
        let shapes = g.infer_shapes().unwrap();
        let largest = shapes.values().map(|s| s.elements() * 4).max().unwrap();
        prop_assert!(peak_activation_bytes(&g, 4).unwrap() >= largest);
    }

    #[test]
    fn grouping_divides_conv_cost(k in 1usize..4, c_mul in 1usize..5, f_mul in 1usize..5, g in 1usize..5, hw in 4usize..10) {
        let (c, f) = (g * c_mul, g * f_mul);
        let input = TensorShape::new(hw, hw, c);
        let dense = LayerSpec::Conv(ConvSpec::square(k, f).with_bias(false));
        let grouped = LayerSpec::Conv(ConvSpec::square(k, f).with_bias(false).with_groups(g));
        let g = g as u64;
        prop_assert_eq!(layer_params(&dense, input).unwrap(), g * layer_params(&grouped, input).unwrap());
        prop_assert_eq!(layer_macs(&dense, input).unwrap(), g * layer_macs(&grouped, input).unwrap());
    }

    #[test]
    fn squeezenet_params_grow_with_p(a in 0.05f64..=1.0, b in 0.05f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let pl = PoolPlacement::default();
        let small = model_params(&squeezenet(lo, pl).unwrap()).unwrap();
        let large = model_params(&squeezenet(hi, pl).unwrap()).unwrap();
        prop_assert!(small <= large);
    }

    #[test]
    fn even_placement_is_strictly_increasing(l in 2usize..40, p_frac in 0.0f64..1.0) {
        let p = 1 + ((l - 2) as f64 * p_frac) as usize;
        for strategy in [Downsampling::Early, Downsampling::Even, Downsampling::Late] {
            let pos = place_downsampling(l, PoolPlacement { strategy, pool_count: p }).unwrap();
            prop_assert_eq!(pos.len(), p);
            prop_assert!(pos.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(pos.iter().all(|&x| (1..=l).contains(&x)));
        }
    }
}

#[test]
fn p_derivative_matches_per_stage_formula() {
    let pl = PoolPlacement::default();
    let delta = model_params(&squeezenet(1.0, pl).unwrap()).unwrap()
        - model_params(&squeezenet(0.5, pl).unwrap()).unwrap();
    // Each 1x1 expand filter that becomes 3x3 gains 8 taps per squeeze channel.
    let expected: u64 = FIRE_STAGES
        .iter()
        .map(|&(s, e)| {
            let (_, e3_half) = split_expand(0.5, e);
            let (_, e3_full) = split_expand(1.0, e);
            8 * s as u64 * (e3_full - e3_half) as u64
        })
        .sum();
    assert_eq!(delta, expected);
    assert_eq!(delta, 491_520);
    assert_eq!(fire_stages(0.5).len(), 8);
}

#[test]
fn every_generator_output_validates() {
    for family in Family::ALL {
        let g = family.build(&FamilyConfig::default()).unwrap();
        g.validate().unwrap();
        g.infer_shapes().unwrap();
    }
}

#[test]
fn mobilenet_has_only_a_head_fc_and_no_pools() {
    let g = dnnscope::zoo::mobilenet_like(1.0).unwrap();
    let fcs: Vec<&str> = g
        .nodes()
        .iter()
        .filter(|n| matches!(n.layer, LayerSpec::FullyConnected(_)))
        .map(|n| n.id.as_str())
        .collect();
    assert_eq!(fcs, [g.sink().unwrap().id.as_str()]);
    assert!(!g.nodes().iter().any(|n| matches!(n.layer, LayerSpec::Pool(_))));
}

#[test]
fn malformed_descriptor_reports_line() {
    let text = "{\n  \"name\": \"x\",\n  \"nodes\": [\n    {\"id\": \"a\", \"op\": \"wat\"}\n  ]\n}\n";
    let err = ArchGraph::from_descriptor(text).unwrap_err();
    assert_eq!(err.line(), Some(4));
}
