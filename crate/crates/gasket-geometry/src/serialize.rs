use serde_json::{json, Value};

use crate::ApproxGraph;

impl ApproxGraph {
    /// JSON document of the graph: spec, integer vertex coordinates, edge
    /// triples and boundary indices. Conductances of the exact-rational
    /// schemes are emitted as `"p/q"` strings; otherwise as round-trip floats.
    pub fn to_json_value(&self) -> Value {
        let rational = self.scheme.rational_conductance(self.spec.dimension);
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|e| {
                let c: Value = match rational {
                    Some((p, q)) => {
                        if q == 1 {
                            json!(format!("{p}"))
                        } else {
                            json!(format!("{p}/{q}"))
                        }
                    }
                    None => json!(e.conductance),
                };
                json!([e.u, e.v, c])
            })
            .collect();
        json!({
            "spec": {
                "family": self.spec.family.as_str(),
                "dimension": self.spec.dimension,
                "side": self.spec.side,
                "level": self.spec.level,
            },
            "scheme": self.scheme.name(),
            "vertices": self.vertices.iter().map(|v| v.coords.clone()).collect::<Vec<_>>(),
            "edges": edges,
            "boundary": self.boundary,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("graph JSON")
    }
}
