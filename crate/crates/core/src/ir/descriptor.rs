//! JSON architecture descriptors.
//!
//! ```json
//! {"name": "tiny", "nodes": [
//!   {"id": "data", "op": "input", "params": {"height": 8, "width": 8, "channels": 3}, "inputs": []},
//!   {"id": "conv1", "op": "conv", "params": {"kernel_h": 3, "kernel_w": 3, "filters": 16}, "inputs": ["data"]}
//! ]}
//! ```
//!
//! Unknown keys are rejected at every level. Conv `groups`/`stride` default to
//! 1, `pad` to 0 and `bias` to true; pool `ceil_mode` defaults to false.

use std::collections::HashSet;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use super::graph::{ArchGraph, Node};
use super::layer::{ConvSpec, FullyConnectedSpec, LayerSpec, PoolSpec, ShuffleSpec};
use super::shape::TensorShape;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: node `{id}` (#{index}): {message}")]
    Node {
        line: usize,
        index: usize,
        id: String,
        message: String,
    },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("missing Input node")]
    MissingInput,
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. }
            | ParseError::Node { line, .. }
            | ParseError::DuplicateId { line, .. } => Some(*line),
            ParseError::MissingInput => None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DocIn<'a> {
    name: String,
    #[serde(borrow)]
    nodes: Vec<&'a RawValue>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeIn<'a> {
    id: String,
    op: String,
    #[serde(borrow, default)]
    params: Option<&'a RawValue>,
    #[serde(default)]
    inputs: Vec<String>,
}

#[derive(Serialize)]
struct DocOut<'a> {
    name: &'a str,
    nodes: Vec<NodeOut<'a>>,
}

#[derive(Serialize)]
struct NodeOut<'a> {
    id: &'a str,
    op: &'static str,
    params: serde_json::Value,
    inputs: &'a [String],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

fn line_of(source: &str, fragment: &str) -> usize {
    let offset = (fragment.as_ptr() as usize).saturating_sub(source.as_ptr() as usize);
    source[..offset.min(source.len())]
        .bytes()
        .filter(|&b| b == b'\n')
        .count()
        + 1
}

fn params<T: DeserializeOwned>(raw: Option<&RawValue>) -> Result<T, (usize, String)> {
    let text = raw.map_or("{}", RawValue::get);
    serde_json::from_str(text).map_err(|e| (e.line(), e.to_string()))
}

fn layer_from(op: &str, raw: Option<&RawValue>) -> Result<LayerSpec, (usize, String)> {
    Ok(match op {
        "input" => LayerSpec::Input(params::<TensorShape>(raw)?),
        "conv" => LayerSpec::Conv(params::<ConvSpec>(raw)?),
        "fc" => LayerSpec::FullyConnected(params::<FullyConnectedSpec>(raw)?),
        "pool" => LayerSpec::Pool(params::<PoolSpec>(raw)?),
        "shuffle" => LayerSpec::Shuffle(params::<ShuffleSpec>(raw)?),
        "gap" | "relu" | "concat" => {
            params::<NoParams>(raw)?;
            match op {
                "gap" => LayerSpec::GlobalAvgPool,
                "relu" => LayerSpec::Relu,
                _ => LayerSpec::Concat,
            }
        }
        other => return Err((0, format!("unknown op tag `{other}`"))),
    })
}

fn params_json(layer: &LayerSpec) -> serde_json::Value {
    let v = match layer {
        LayerSpec::Input(s) => serde_json::to_value(s),
        LayerSpec::Conv(c) => serde_json::to_value(c),
        LayerSpec::FullyConnected(fc) => serde_json::to_value(fc),
        LayerSpec::Pool(p) => serde_json::to_value(p),
        LayerSpec::Shuffle(s) => serde_json::to_value(s),
        LayerSpec::GlobalAvgPool | LayerSpec::Relu | LayerSpec::Concat => {
            serde_json::to_value(NoParams {})
        }
    };
    v.expect("layer params serialize")
}

impl ArchGraph {
    /// Pretty-printed JSON descriptor with a fixed key order.
    pub fn to_descriptor(&self) -> String {
        let doc = DocOut {
            name: self.name(),
            nodes: self
                .nodes()
                .iter()
                .map(|n| NodeOut {
                    id: &n.id,
                    op: n.layer.tag(),
                    params: params_json(&n.layer),
                    inputs: &n.inputs,
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("descriptor serializes");
        s.push('\n');
        s
    }

    /// Parses a descriptor. Structural checks beyond id uniqueness and the
    /// presence of an Input node are left to [`ArchGraph::validate`].
    pub fn from_descriptor(text: &str) -> Result<ArchGraph, ParseError> {
        let doc: DocIn<'_> = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut seen = HashSet::new();
        let mut nodes = Vec::with_capacity(doc.nodes.len());
        for (index, raw) in doc.nodes.into_iter().enumerate() {
            let node_line = line_of(text, raw.get());
            let n: NodeIn<'_> = serde_json::from_str(raw.get()).map_err(|e| ParseError::Syntax {
                line: node_line + e.line() - 1,
                column: e.column(),
                message: e.to_string(),
            })?;
            let layer = layer_from(&n.op, n.params).map_err(|(rel, message)| ParseError::Node {
                line: match (rel, n.params) {
                    (0, _) | (_, None) => node_line,
                    (rel, Some(r)) => line_of(text, r.get()) + rel - 1,
                },
                index,
                id: n.id.clone(),
                message,
            })?;
            if !seen.insert(n.id.clone()) {
                return Err(ParseError::DuplicateId { line: node_line, id: n.id });
            }
            nodes.push(Node {
                id: n.id,
                layer,
                inputs: n.inputs,
            });
        }
        if !nodes.iter().any(|n| matches!(n.layer, LayerSpec::Input(_))) {
            return Err(ParseError::MissingInput);
        }
        Ok(ArchGraph::new(doc.name, nodes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = r#"{
  "name": "tiny",
  "nodes": [
    {"id": "data", "op": "input", "params": {"height": 8, "width": 8, "channels": 3}, "inputs": []},
    {"id": "c1", "op": "conv", "params": {"kernel_h": 3, "kernel_w": 3, "filters": 4, "pad": 1}, "inputs": ["data"]},
    {"id": "r1", "op": "relu", "inputs": ["c1"]}
  ]
}"#;

    #[test]
    fn parses_with_defaults() {
        let g = ArchGraph::from_descriptor(TINY).unwrap();
        assert_eq!(g.nodes().len(), 3);
        match g.node("c1").unwrap().layer {
            LayerSpec::Conv(c) => {
                assert_eq!((c.groups, c.stride, c.pad, c.bias), (1, 1, 1, true))
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(ArchGraph::from_descriptor(&g.to_descriptor()).unwrap(), g);
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let text = TINY.replace("\"r1\"", "\"c1\"");
        let err = ArchGraph::from_descriptor(&text).unwrap_err();
        assert!(matches!(err, ParseError::DuplicateId { ref id, .. } if id == "c1"));
        assert!(err.to_string().contains("duplicate id"));
    }

    #[test]
    fn empty_node_list_is_missing_input() {
        let err = ArchGraph::from_descriptor(r#"{"name": "e", "nodes": []}"#).unwrap_err();
        assert_eq!(err, ParseError::MissingInput);
        assert!(err.to_string().contains("missing Input"));
    }

    #[test]
    fn unknown_keys_and_tags_are_rejected_with_lines() {
        let text = TINY.replace("\"pad\": 1", "\"padding\": 1");
        let err = ArchGraph::from_descriptor(&text).unwrap_err();
        assert_eq!(err.line(), Some(5));
        assert!(err.to_string().contains("padding"), "{err}");

        let text = TINY.replace("\"relu\"", "\"lrn\"");
        let err = ArchGraph::from_descriptor(&text).unwrap_err();
        assert!(err.to_string().contains("unknown op tag `lrn`"));

        let text = TINY.replace("\"name\": \"tiny\"", "\"name\": \"tiny\", \"extra\": 1");
        assert!(matches!(
            ArchGraph::from_descriptor(&text),
            Err(ParseError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn malformed_json_reports_line() {
        let text = "{\n  \"name\": \"x\",\n  \"nodes\": [\n    {\"id\": }\n  ]\n}";
        match ArchGraph::from_descriptor(text) {
            Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }
}
