use std::collections::{HashMap, HashSet};
use std::fmt;

use super::graph::ArchGraph;
use super::layer::{BindError, LayerSpec};
use super::shape::TensorShape;

/// One broken invariant, optionally attributed to a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub node: Option<String>,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    DuplicateId,
    MissingInput,
    MultipleInputs,
    InputHasPredecessors,
    UnknownPredecessor(String),
    Arity { expected: &'static str, found: usize },
    Cycle,
    Unreachable,
    SinkCount(usize),
    Layer(BindError),
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::DuplicateId => write!(f, "duplicate id"),
            ViolationKind::MissingInput => write!(f, "missing Input"),
            ViolationKind::MultipleInputs => write!(f, "more than one Input node"),
            ViolationKind::InputHasPredecessors => write!(f, "Input node must not have predecessors"),
            ViolationKind::UnknownPredecessor(p) => write!(f, "unknown predecessor `{p}`"),
            ViolationKind::Arity { expected, found } => {
                write!(f, "expected {expected} predecessor(s), found {found}")
            }
            ViolationKind::Cycle => write!(f, "graph contains a cycle"),
            ViolationKind::Unreachable => write!(f, "not reachable from Input"),
            ViolationKind::SinkCount(n) => write!(f, "expected exactly one sink node, found {n}"),
            ViolationKind::Layer(e) => write!(f, "{e}"),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            Some(id) => write!(f, "node `{id}`: {}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

/// Result of binding every node: shapes for nodes that could be bound and
/// the violations found on the way.
pub(crate) struct Binding {
    pub order: Vec<usize>,
    pub shapes: Vec<Option<TensorShape>>,
    pub violations: Vec<Violation>,
}

fn at(node: &str, kind: ViolationKind) -> Violation {
    Violation {
        node: Some(node.to_string()),
        kind,
    }
}

/// Structural checks followed by shape propagation. Propagation is skipped
/// downstream of any node that fails to bind so one fault is reported once.
pub(crate) fn bind(graph: &ArchGraph) -> Binding {
    let nodes = graph.nodes();
    let mut violations = Vec::new();

    let mut seen = HashSet::new();
    for n in nodes {
        if !seen.insert(n.id.as_str()) {
            violations.push(at(&n.id, ViolationKind::DuplicateId));
        }
    }

    let inputs: Vec<_> = nodes
        .iter()
        .filter(|n| matches!(n.layer, LayerSpec::Input(_)))
        .collect();
    match inputs.len() {
        0 => violations.push(Violation {
            node: None,
            kind: ViolationKind::MissingInput,
        }),
        1 => {}
        _ => {
            for n in &inputs[1..] {
                violations.push(at(&n.id, ViolationKind::MultipleInputs));
            }
        }
    }

    let index: HashMap<&str, usize> = graph.id_index();
    for n in nodes {
        for p in &n.inputs {
            if !index.contains_key(p.as_str()) {
                violations.push(at(&n.id, ViolationKind::UnknownPredecessor(p.clone())));
            }
        }
        let found = n.inputs.len();
        match n.layer {
            LayerSpec::Input(_) if found != 0 => {
                violations.push(at(&n.id, ViolationKind::InputHasPredecessors))
            }
            LayerSpec::Input(_) => {}
            LayerSpec::Concat if found < 2 => violations.push(at(
                &n.id,
                ViolationKind::Arity {
                    expected: "at least 2",
                    found,
                },
            )),
            LayerSpec::Concat => {}
            _ if found != 1 => violations.push(at(
                &n.id,
                ViolationKind::Arity {
                    expected: "exactly 1",
                    found,
                },
            )),
            _ => {}
        }
    }

    let preds = graph.predecessor_indices();
    let order = match graph.topo_order() {
        Some(order) => order,
        None => {
            violations.push(Violation {
                node: None,
                kind: ViolationKind::Cycle,
            });
            return Binding {
                order: Vec::new(),
                shapes: vec![None; nodes.len()],
                violations,
            };
        }
    };

    // Reachability from the Input node(s).
    let mut reachable = vec![false; nodes.len()];
    for &i in &order {
        reachable[i] = matches!(nodes[i].layer, LayerSpec::Input(_))
            || (!preds[i].is_empty() && preds[i].iter().any(|&p| reachable[p]));
    }
    for (i, n) in nodes.iter().enumerate() {
        if !reachable[i] {
            violations.push(at(&n.id, ViolationKind::Unreachable));
        }
    }

    let mut has_succ = vec![false; nodes.len()];
    for ps in &preds {
        for &p in ps {
            has_succ[p] = true;
        }
    }
    let sinks = has_succ.iter().filter(|s| !**s).count();
    if sinks != 1 && !nodes.is_empty() {
        violations.push(Violation {
            node: None,
            kind: ViolationKind::SinkCount(sinks),
        });
    }

    let mut shapes: Vec<Option<TensorShape>> = vec![None; nodes.len()];
    for &i in &order {
        let n = &nodes[i];
        if let Err(e) = n.layer.check_params() {
            violations.push(at(&n.id, ViolationKind::Layer(e)));
            continue;
        }
        let arity_ok = match n.layer {
            LayerSpec::Input(_) => n.inputs.is_empty(),
            LayerSpec::Concat => n.inputs.len() >= 2,
            _ => n.inputs.len() == 1,
        };
        if !arity_ok || preds[i].len() != n.inputs.len() {
            continue;
        }
        let in_shapes: Option<Vec<TensorShape>> = preds[i].iter().map(|&p| shapes[p]).collect();
        let Some(in_shapes) = in_shapes else { continue };
        match n.layer.output_shape(&in_shapes) {
            Ok(s) => shapes[i] = Some(s),
            Err(e) => violations.push(at(&n.id, ViolationKind::Layer(e))),
        }
    }

    Binding {
        order,
        shapes,
        violations,
    }
}

impl ArchGraph {
    /// Every structural, divisibility and shape violation, with node ids.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let b = bind(self);
        if b.violations.is_empty() {
            Ok(())
        } else {
            Err(b.violations)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{ConvSpec, GraphBuilder, LayerSpec, ShuffleSpec, TensorShape};

    #[test]
    fn single_input_is_valid() {
        let mut b = GraphBuilder::new("x");
        b.input("in", TensorShape::new(4, 4, 3));
        assert_eq!(b.build().validate(), Ok(()));
    }

    #[test]
    fn groups_must_divide_filters() {
        let mut b = GraphBuilder::new("x");
        let i = b.input("in", TensorShape::new(4, 4, 6));
        b.then("c", LayerSpec::Conv(ConvSpec::square(3, 8).with_groups(3)), &i);
        let v = b.build().validate().unwrap_err();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].node.as_deref(), Some("c"));
        assert!(v[0].to_string().contains("groups must divide filters"));
    }

    #[test]
    fn shuffle_groups_must_divide_channels() {
        let mut b = GraphBuilder::new("x");
        let i = b.input("in", TensorShape::new(4, 4, 6));
        b.then("s", LayerSpec::Shuffle(ShuffleSpec { groups: 4 }), &i);
        let v = b.build().validate().unwrap_err();
        assert!(v[0].to_string().contains("groups must divide input channels"));
    }

    #[test]
    fn structural_faults_are_all_reported() {
        let mut b = GraphBuilder::new("x");
        let i = b.input("in", TensorShape::new(4, 4, 6));
        b.then("a", LayerSpec::Relu, &i);
        b.then("a", LayerSpec::Relu, &i);
        b.add("cat", LayerSpec::Concat, &["a"]);
        b.then("dangling", LayerSpec::Relu, "nowhere");
        let v = b.build().validate().unwrap_err();
        let kinds: Vec<_> = v.iter().map(|v| v.kind.clone()).collect();
        assert!(kinds.contains(&ViolationKind::DuplicateId));
        assert!(kinds.contains(&ViolationKind::UnknownPredecessor("nowhere".into())));
        assert!(kinds.contains(&ViolationKind::Arity {
            expected: "at least 2",
            found: 1
        }));
        assert!(kinds.contains(&ViolationKind::Unreachable));
    }

    #[test]
    fn cycle_is_reported() {
        let mut b = GraphBuilder::new("x");
        b.input("in", TensorShape::new(4, 4, 6));
        b.add("a", LayerSpec::Concat, &["in", "b"]);
        b.then("b", LayerSpec::Relu, "a");
        let v = b.build().validate().unwrap_err();
        assert!(v.iter().any(|v| v.kind == ViolationKind::Cycle));
    }

    #[test]
    fn concat_spatial_mismatch() {
        let mut b = GraphBuilder::new("x");
        let i = b.input("in", TensorShape::new(8, 8, 2));
        let p = b.then("p", LayerSpec::Pool(crate::ir::PoolSpec::max(2, 2)), &i);
        let r = b.then("r", LayerSpec::Relu, &i);
        b.add("cat", LayerSpec::Concat, &[&p, &r]);
        let v = b.build().validate().unwrap_err();
        assert!(v[0].to_string().contains("concat inputs disagree"));
    }

    #[test]
    fn two_sinks_rejected() {
        let mut b = GraphBuilder::new("x");
        let i = b.input("in", TensorShape::new(8, 8, 2));
        b.then("a", LayerSpec::Relu, &i);
        b.then("b", LayerSpec::Relu, &i);
        let v = b.build().validate().unwrap_err();
        assert!(v.iter().any(|v| v.kind == ViolationKind::SinkCount(2)));
    }
}
