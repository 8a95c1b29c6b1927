//! Per-kind JSON schema fragments and runnable example configurations.

use serde_json::{json, Value};

use super::config::Kind;
use crate::error::Result;

fn space() -> Value {
    json!({
        "type": "object",
        "required": ["d", "l"],
        "additionalProperties": false,
        "properties": {
            "d": { "type": "integer", "minimum": 2, "description": "alphabet size" },
            "l": { "type": "integer", "minimum": 1, "description": "string length" }
        }
    })
}

fn group() -> Value {
    json!({
        "type": "object",
        "required": ["generators"],
        "additionalProperties": false,
        "properties": {
            "generators": {
                "type": "array",
                "items": {
                    "type": "string",
                    "description": "\"rotation\", \"translations\", \"translation:<s>\" or \"digit_perm:<p0>,<p1>,...\""
                }
            }
        }
    })
}

fn tagged(tag: &str, variants: &[(&str, Value)]) -> Value {
    let one_of: Vec<Value> = variants
        .iter()
        .map(|(name, props)| {
            let mut properties = props.as_object().cloned().unwrap_or_default();
            properties.insert(tag.to_string(), json!({ "const": name }));
            json!({ "type": "object", "required": [tag], "additionalProperties": false, "properties": properties })
        })
        .collect();
    json!({ "oneOf": one_of })
}

fn operators() -> Value {
    json!({
        "type": "object",
        "required": ["crossover", "mutation"],
        "additionalProperties": false,
        "properties": {
            "crossover": tagged("kind", &[
                ("uniform", json!({})),
                ("one_point", json!({})),
                ("none", json!({})),
                ("masks", json!({ "masks": { "type": "array", "items": { "type": "array", "prefixItems": [{ "type": "integer" }, { "type": "number" }] } } })),
            ]),
            "mutation": {
                "type": "object",
                "required": ["q"],
                "additionalProperties": false,
                "properties": { "q": { "type": "number", "minimum": 0, "maximum": 1 } }
            },
            "order": { "enum": ["crossover_then_mutation", "mutation_then_crossover"] }
        }
    })
}

fn fitness() -> Value {
    json!({
        "type": "object",
        "required": ["objective"],
        "additionalProperties": false,
        "properties": {
            "objective": tagged("kind", &[
                ("onemax", json!({ "offset": { "type": "number" } })),
                ("constant", json!({ "value": { "type": "number" } })),
                ("table", json!({ "values": { "type": "array", "items": { "type": "number" } } })),
                ("expr", json!({ "source": { "type": "string", "description": "variables x0, x1, ... (x = x0)" } })),
            ]),
            "decoder": tagged("kind", &[
                ("digits", json!({})),
                ("integer", json!({})),
                ("affine", json!({ "lo": { "type": "number" }, "hi": { "type": "number" } })),
            ]),
            "scaling": tagged("kind", &[
                ("identity", json!({})),
                ("power", json!({ "alpha": { "type": "number" } })),
                ("exponential", json!({ "beta": { "type": "number" } })),
                ("linear_offset", json!({ "c": { "type": "number" } })),
            ])
        }
    })
}

fn start() -> Value {
    tagged("kind", &[
        ("uniform", json!({})),
        ("vertex", json!({ "genome": { "type": "integer" } })),
        ("vector", json!({ "p": { "type": "array", "items": { "type": "number" } } })),
        ("random", json!({})),
    ])
}

fn integrator() -> Value {
    json!({
        "type": "object",
        "additionalProperties": false,
        "properties": {
            "method": { "enum": ["rk45", "rk4"], "default": "rk45" },
            "h": { "type": "number", "default": 1e-3 },
            "abs_tol": { "type": "number", "default": 1e-9 },
            "rel_tol": { "type": "number", "default": 1e-7 },
            "max_time": { "type": "number", "default": 1e4 },
            "max_steps": { "type": "integer", "default": 1000000 }
        }
    })
}

fn terms() -> Value {
    json!({
        "type": "array",
        "items": {
            "type": "object",
            "required": ["coef", "powers"],
            "additionalProperties": false,
            "properties": { "coef": { "type": "number" }, "powers": { "type": "array", "items": { "type": "integer" } } }
        }
    })
}

fn numbers() -> Value {
    json!({ "type": "array", "items": { "type": "number" } })
}

fn rows() -> Value {
    json!({ "type": "array", "items": numbers() })
}

fn flow() -> Value {
    json!({
        "type": "object",
        "required": ["system"],
        "additionalProperties": false,
        "properties": {
            "system": { "enum": ["gradient", "quotient", "projected", "exit", "double_bracket"] },
            "objective": tagged("preset", &[
                ("double_well", json!({ "dim": { "type": "integer", "default": 1 } })),
                ("sphere_quadratic", json!({ "coefficients": numbers() })),
                ("linear", json!({ "coefficients": numbers() })),
                ("constant", json!({ "dim": { "type": "integer" }, "value": { "type": "number" } })),
                ("polynomial", json!({ "dim": { "type": "integer" }, "terms": terms() })),
                ("dense", json!({ "dim": { "type": "integer" }, "degree": { "type": "integer" }, "coefficients": numbers() })),
            ]),
            "constraint": tagged("preset", &[
                ("circle", json!({})),
                ("sphere", json!({ "dim": { "type": "integer" }, "radius": { "type": "number", "default": 1 } })),
                ("affine", json!({ "a": rows(), "b": numbers() })),
                ("polynomial", json!({ "dim": { "type": "integer" }, "components": { "type": "array", "items": terms() } })),
            ]),
            "x0": numbers(),
            "direction": numbers(),
            "integrator": integrator(),
            "exit": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "step": { "type": "number", "default": 0.01 },
                    "horizon": { "type": "number", "default": 10 },
                    "tol": { "type": "number", "default": 1e-6 }
                }
            },
            "matrix": {
                "type": "object",
                "required": ["a"],
                "additionalProperties": false,
                "properties": { "a": rows(), "n": numbers() }
            }
        }
    })
}

fn kind_block(kind: Kind) -> (Vec<&'static str>, Value) {
    let uint = json!({ "type": "integer", "minimum": 0 });
    match kind {
        Kind::Orbits => (
            vec!["space", "group"],
            json!({ "type": "object", "additionalProperties": false, "properties": { "points": { "type": "array", "items": uint } } }),
        ),
        Kind::Schema => (
            vec!["space"],
            json!({ "type": "object", "additionalProperties": false, "properties": { "masks": { "type": "array", "items": uint } } }),
        ),
        Kind::Coverage => (
            vec!["space"],
            json!({ "type": "object", "additionalProperties": false, "properties": { "masks": { "type": "array", "items": uint } } }),
        ),
        Kind::Mix => (
            vec!["space", "operators", "fitness"],
            json!({ "type": "object", "additionalProperties": false, "properties": { "population": start() } }),
        ),
        Kind::Evolve => (
            vec!["space", "operators", "fitness"],
            json!({
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "steps": { "type": "integer", "default": 100 },
                    "tol": { "type": "number", "default": 0 },
                    "start": start(),
                    "fixed_point": { "type": "boolean", "default": false }
                }
            }),
        ),
        Kind::Sample => (
            vec!["space", "operators", "fitness"],
            json!({
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "mu": { "type": "integer", "minimum": 1, "default": 1000 },
                    "steps": { "type": "integer", "default": 1 },
                    "runs": { "type": "integer", "minimum": 1, "default": 20 },
                    "start": start()
                }
            }),
        ),
        Kind::Flow => (vec!["flow"], flow()),
        Kind::Spectrum => (
            vec!["spectrum"],
            tagged("target", &[
                ("mutation", json!({})),
                ("mixing", json!({})),
                ("ea_map", json!({ "start": start() })),
                ("matrix", json!({ "rows": rows() })),
                ("dft", json!({ "vector": numbers() })),
            ]),
        ),
        Kind::Jsr => (
            vec!["jsr"],
            json!({
                "type": "object",
                "required": ["matrices", "depth"],
                "additionalProperties": false,
                "properties": {
                    "matrices": { "type": "array", "items": rows() },
                    "depth": { "type": "integer", "minimum": 1, "maximum": 12 }
                }
            }),
        ),
    }
}

/// JSON schema of a configuration of the given kind.
pub fn schema(kind: Kind) -> Value {
    let (needs, block) = kind_block(kind);
    let mut required = vec!["kind"];
    required.extend(needs.iter().copied().filter(|n| *n != kind.name()));
    let mut properties = serde_json::Map::new();
    properties.insert("kind".into(), json!({ "const": kind.name() }));
    properties.insert("seed".into(), json!({ "type": "integer", "minimum": 0, "default": 0 }));
    properties.insert("output".into(), json!({ "type": "string", "description": "output root; OUT_DIR overrides" }));
    for name in needs {
        let v = match name {
            "space" => space(),
            "group" => group(),
            "operators" => operators(),
            "fitness" => fitness(),
            _ => continue,
        };
        properties.insert(name.into(), v);
    }
    if matches!(kind, Kind::Spectrum) {
        properties.insert("space".into(), space());
        properties.insert("operators".into(), operators());
        properties.insert("fitness".into(), fitness());
    }
    properties.insert(kind.name().into(), block);
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": format!("evodyn {} experiment", kind.name()),
        "type": "object",
        "required": required,
        "additionalProperties": false,
        "properties": properties
    })
}

/// A runnable configuration for the kind.
pub fn example(kind: Kind) -> &'static str {
    match kind {
        Kind::Orbits => include_str!("../../../../configs/orbits_rotation.json"),
        Kind::Schema => include_str!("../../../../configs/schema_masks.json"),
        Kind::Coverage => include_str!("../../../../configs/coverage_digits.json"),
        Kind::Mix => include_str!("../../../../configs/mix_onemax.json"),
        Kind::Evolve => include_str!("../../../../configs/evolve_mutation_only.json"),
        Kind::Sample => include_str!("../../../../configs/sample_onemax.json"),
        Kind::Flow => include_str!("../../../../configs/flow_double_well.json"),
        Kind::Spectrum => include_str!("../../../../configs/spectrum_ea_map.json"),
        Kind::Jsr => include_str!("../../../../configs/jsr_shear.json"),
    }
}

/// Text printed by `describe <kind>`.
pub fn describe(name: &str) -> Result<String> {
    let kind = Kind::parse(name)?;
    let schema = serde_json::to_string_pretty(&schema(kind))?;
    Ok(format!("# schema\n{schema}\n\n# example\n{}", example(kind)))
}
