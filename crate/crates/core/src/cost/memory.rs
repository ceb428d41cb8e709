use crate::ir::{ArchGraph, ShapedGraph};

use super::CostError;

/// Peak bytes of simultaneously live activations for one image.
///
/// Nodes run in topological order. While a node executes, its inputs and
/// its output are live; an output is freed once its last consumer has run.
/// The sink's output is never freed.
pub fn peak_activation_bytes_shaped(shaped: &ShapedGraph<'_>, word_bytes: u64) -> u64 {
    let n = shaped.graph().nodes().len();
    let order = shaped.order();
    let mut step_of = vec![0usize; n];
    for (step, &i) in order.iter().enumerate() {
        step_of[i] = step;
    }
    let mut last_use = vec![None; n];
    for &i in order {
        for &p in shaped.predecessors(i) {
            let s = step_of[i];
            last_use[p] = Some(last_use[p].map_or(s, |cur: usize| cur.max(s)));
        }
    }

    let size = |i: usize| shaped.output_shape(i).elements() * word_bytes;
    let mut live = 0u64;
    let mut peak = 0u64;
    for (step, &i) in order.iter().enumerate() {
        live += size(i);
        peak = peak.max(live);
        let mut freed = std::collections::HashSet::new();
        for &p in shaped.predecessors(i) {
            if last_use[p] == Some(step) && freed.insert(p) {
                live -= size(p);
            }
        }
    }
    peak
}

pub fn peak_activation_bytes(graph: &ArchGraph, word_bytes: u64) -> Result<u64, CostError> {
    Ok(peak_activation_bytes_shaped(&graph.shaped()?, word_bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{ConvSpec, GraphBuilder, LayerSpec, TensorShape};

    #[test]
    fn relu_keeps_input_and_output_live() {
        let mut b = GraphBuilder::new("x");
        let i = b.input("in", TensorShape::new(10, 10, 10));
        b.then("relu", LayerSpec::Relu, &i);
        assert_eq!(peak_activation_bytes(&b.build(), 4).unwrap(), 8000);
    }

    #[test]
    fn diamond_keeps_branch_point_live() {
        // in(1 ch) -> s(2 ch) -> {e1(3 ch), e3(5 ch)} -> cat(8 ch), on 1x1.
        // step in:  1
        // step s:   1 + 2 = 3, free in -> 2
        // step e1:  2 + 3 = 5 (s still needed by e3)
        // step e3:  5 + 5 = 10, free s -> 8
        // step cat: 8 + 8 = 16
        let mut b = GraphBuilder::new("fire");
        let i = b.input("in", TensorShape::new(1, 1, 1));
        let s = b.then("s", LayerSpec::Conv(ConvSpec::square(1, 2)), &i);
        let e1 = b.then("e1", LayerSpec::Conv(ConvSpec::square(1, 3)), &s);
        let e3 = b.then("e3", LayerSpec::Conv(ConvSpec::square(3, 5)), &s);
        b.add("cat", LayerSpec::Concat, &[&e1, &e3]);
        assert_eq!(peak_activation_bytes(&b.build(), 1).unwrap(), 16);
    }
}
