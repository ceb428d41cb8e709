use std::collections::HashMap;

use super::layer::LayerSpec;
use super::shape::TensorShape;

/// A node in an [`ArchGraph`]: an id, its layer, and its predecessors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub layer: LayerSpec,
    pub inputs: Vec<String>,
}

/// Directed acyclic graph of typed layers with a single input and a single
/// sink. Construction does not check invariants; see [`ArchGraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchGraph {
    name: String,
    nodes: Vec<Node>,
}

impl ArchGraph {
    pub fn new(name: impl Into<String>, nodes: Vec<Node>) -> Self {
        Self {
            name: name.into(),
            nodes,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn into_parts(self) -> (String, Vec<Node>) {
        (self.name, self.nodes)
    }

    pub(crate) fn id_index(&self) -> HashMap<&str, usize> {
        let mut map = HashMap::with_capacity(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            map.entry(n.id.as_str()).or_insert(i);
        }
        map
    }

    /// Predecessor indices per node. Unknown ids are dropped.
    pub(crate) fn predecessor_indices(&self) -> Vec<Vec<usize>> {
        let index = self.id_index();
        self.nodes
            .iter()
            .map(|n| {
                n.inputs
                    .iter()
                    .filter_map(|p| index.get(p.as_str()).copied())
                    .collect()
            })
            .collect()
    }

    /// Kahn's algorithm, preferring declaration order among ready nodes.
    /// Returns `None` when the graph has a cycle.
    pub(crate) fn topo_order(&self) -> Option<Vec<usize>> {
        let preds = self.predecessor_indices();
        let n = self.nodes.len();
        let mut indegree: Vec<usize> = preds.iter().map(Vec::len).collect();
        let mut succs = vec![Vec::new(); n];
        for (i, ps) in preds.iter().enumerate() {
            for &p in ps {
                succs[p].push(i);
            }
        }
        let mut ready: std::collections::BTreeSet<usize> =
            (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for &s in &succs[i] {
                indegree[s] -= 1;
                if indegree[s] == 0 {
                    ready.insert(s);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// The unique node without successors, if the graph is valid.
    pub fn sink(&self) -> Option<&Node> {
        let mut has_succ = vec![false; self.nodes.len()];
        for ps in self.predecessor_indices() {
            for p in ps {
                has_succ[p] = true;
            }
        }
        let mut sinks = has_succ.iter().enumerate().filter(|(_, s)| !**s);
        match (sinks.next(), sinks.next()) {
            (Some((i, _)), None) => Some(&self.nodes[i]),
            _ => None,
        }
    }

    pub fn input_shape(&self) -> Option<TensorShape> {
        self.nodes.iter().find_map(|n| match n.layer {
            LayerSpec::Input(s) => Some(s),
            _ => None,
        })
    }
}

/// Incremental construction of a graph. Used by the model generators.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    name: String,
    nodes: Vec<Node>,
}

impl GraphBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            nodes: Vec::new(),
        }
    }

    pub fn input(&mut self, id: impl Into<String>, shape: TensorShape) -> String {
        self.add(id, LayerSpec::Input(shape), &[])
    }

    /// Appends a node and returns its id.
    pub fn add(&mut self, id: impl Into<String>, layer: LayerSpec, inputs: &[&str]) -> String {
        let id = id.into();
        self.nodes.push(Node {
            id: id.clone(),
            layer,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
        });
        id
    }

    /// Appends a single-input node fed by `prev`.
    pub fn then(&mut self, id: impl Into<String>, layer: LayerSpec, prev: &str) -> String {
        self.add(id, layer, &[prev])
    }

    pub fn build(self) -> ArchGraph {
        ArchGraph::new(self.name, self.nodes)
    }
}
