//! Circuit JSON interchange format.
//!
//! ```json
//! {"inputs":[{"id":0,"kind":"qbit"}],
//!  "ops":[{"op":"gate","name":"H","params":[],"controls":[],"targets":[0]},
//!         {"op":"init","wire":1,"value":0},
//!         {"op":"measure","qwire":0,"bwire":2},
//!         {"op":"discard","wire":1}],
//!  "outputs":[{"id":2,"kind":"bit"}]}
//! ```
//!
//! Field order is fixed as listed; writers emit exactly this shape. Inverted
//! S/T gates are spelled `Sdg`/`Tdg` in the `name` field.

use serde::{Deserialize, Serialize};

use super::{CircOp, Circuit, Polarity, WireId, WireKind};
use crate::qnum::GateName;

#[derive(Serialize, Deserialize)]
struct WireJson {
    id: WireId,
    kind: WireKind,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum OpJson {
    Gate {
        name: String,
        params: Vec<f64>,
        controls: Vec<(WireId, Polarity)>,
        targets: Vec<WireId>,
    },
    Init {
        wire: WireId,
        value: u8,
    },
    Measure {
        qwire: WireId,
        bwire: WireId,
    },
    Discard {
        wire: WireId,
    },
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    inputs: Vec<WireJson>,
    ops: Vec<OpJson>,
    outputs: Vec<WireJson>,
}

fn gate_name_to_json(name: GateName, dagger: bool) -> String {
    if dagger {
        format!("{name}dg")
    } else {
        name.to_string()
    }
}

fn gate_name_from_json(s: &str) -> Result<(GateName, bool), String> {
    let (base, dagger) = match s.strip_suffix("dg") {
        Some(base) => (base, true),
        None => (s, false),
    };
    let name: GateName = base.parse().map_err(|e| format!("{e}"))?;
    Ok((name, dagger))
}

impl Circuit {
    pub fn to_json(&self) -> String {
        let doc = CircuitJson {
            inputs: self
                .inputs
                .iter()
                .map(|(id, kind)| WireJson { id: *id, kind: *kind })
                .collect(),
            ops: self
                .ops
                .iter()
                .map(|op| match op {
                    CircOp::Gate {
                        name,
                        dagger,
                        params,
                        controls,
                        targets,
                    } => OpJson::Gate {
                        name: gate_name_to_json(*name, *dagger),
                        params: params.clone(),
                        controls: controls.clone(),
                        targets: targets.clone(),
                    },
                    CircOp::Init { wire, value } => OpJson::Init {
                        wire: *wire,
                        value: u8::from(*value),
                    },
                    CircOp::Measure { qwire, bwire } => OpJson::Measure {
                        qwire: *qwire,
                        bwire: *bwire,
                    },
                    CircOp::Discard { wire } => OpJson::Discard { wire: *wire },
                })
                .collect(),
            outputs: self
                .outputs
                .iter()
                .map(|(id, kind)| WireJson { id: *id, kind: *kind })
                .collect(),
        };
        serde_json::to_string(&doc).expect("circuit serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Circuit, String> {
        let doc: CircuitJson = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let mut ops = Vec::with_capacity(doc.ops.len());
        for op in doc.ops {
            ops.push(match op {
                OpJson::Gate {
                    name,
                    params,
                    controls,
                    targets,
                } => {
                    let (name, dagger) = gate_name_from_json(&name)?;
                    CircOp::Gate {
                        name,
                        dagger,
                        params,
                        controls,
                        targets,
                    }
                }
                OpJson::Init { wire, value } => match value {
                    0 => CircOp::Init { wire, value: false },
                    1 => CircOp::Init { wire, value: true },
                    other => return Err(format!("init value must be 0 or 1, got {other}")),
                },
                OpJson::Measure { qwire, bwire } => CircOp::Measure { qwire, bwire },
                OpJson::Discard { wire } => CircOp::Discard { wire },
            });
        }
        let circuit = Circuit {
            inputs: doc.inputs.into_iter().map(|w| (w.id, w.kind)).collect(),
            ops,
            outputs: doc.outputs.into_iter().map(|w| (w.id, w.kind)).collect(),
        };
        circuit.validate().map_err(|e| e.to_string())?;
        Ok(circuit)
    }
}
