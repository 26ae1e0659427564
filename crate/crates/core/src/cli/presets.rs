//! Ready-made experiments.

use serde_json::json;

use crate::cli::config::ExperimentConfig;

fn build(v: serde_json::Value) -> ExperimentConfig {
    serde_json::from_value(v).expect("preset is a valid config")
}

/// All presets as `(name, config)`, in a fixed order.
pub fn presets() -> Vec<(&'static str, ExperimentConfig)> {
    vec![
        (
            "full-shift-dim",
            build(json!({
                "name": "full-shift-dim",
                "systems": { "X": { "kind": "full", "alphabet": 2 } },
                "covers": { "U": { "kind": "symbols" } },
                "task": "dimension",
                "params": { "system": "X", "cover": "U", "n_max": 16 }
            })),
        ),
        (
            "golden-mean",
            build(json!({
                "name": "golden-mean",
                "systems": { "X": { "kind": "golden_mean" } },
                "covers": { "U": { "kind": "symbols" } },
                "task": "dimension",
                "params": { "system": "X", "cover": "U", "n_max": 20 }
            })),
        ),
        (
            "xor-chain",
            build(json!({
                "name": "xor-chain",
                "systems": { "X": { "kind": "full", "alphabet": 2 } },
                "codes": { "xor": { "kind": "xor" } },
                "covers": { "U": { "kind": "symbols" } },
                "task": "dimension",
                "params": { "system": "X", "factor": { "code": "xor", "codomain": "X" }, "cover": "U", "n_max": 16 }
            })),
        ),
        (
            "squares-freebits-dim",
            build(json!({
                "name": "squares-freebits-dim",
                "systems": { "X": { "kind": "free_bits", "support": { "kind": "power", "p": 2.0, "label": "squares" } } },
                "covers": { "U": { "kind": "symbols" } },
                "task": "dimension",
                "params": { "system": "X", "cover": "U", "n_max": 64 }
            })),
        ),
        (
            "folner-dependence",
            build(json!({
                "name": "folner-dependence",
                "systems": { "X": { "kind": "free_bits", "support": {
                    "kind": "blocks",
                    "blocks": [ { "from": 0, "to": 48 }, { "from": 2048, "to": 2096 } ],
                    "label": "two blocks"
                } } },
                "covers": { "U": { "kind": "symbols" } },
                "task": "construct",
                "params": {
                    "construction": "minimizing_subsequence",
                    "system": "X", "cover": "U", "n_max": 4095, "alpha": 0.3, "start": 64
                },
                "budget": { "max_patterns": 65536 }
            })),
        ),
        (
            "full-shift-construct",
            build(json!({
                "name": "full-shift-construct",
                "systems": { "X": { "kind": "full", "alphabet": 2 } },
                "covers": { "U": { "kind": "standard", "a1": ["0"], "a2": ["1"] } },
                "task": "construct",
                "params": { "construction": "thm", "system": "X", "cover": "U", "n_max": 14 }
            })),
        ),
        (
            "full-vs-fixedpoint",
            build(json!({
                "name": "full-vs-fixedpoint",
                "systems": {
                    "X": { "kind": "full", "alphabet": 2 },
                    "P": { "kind": "fixed_point" }
                },
                "codes": { "collapse": { "kind": "trivial" } },
                "task": "joining",
                "params": { "x": "X", "y": "P", "z": "P", "pi_x": "collapse", "pi_y": "collapse",
                            "mode": { "kind": "search", "window": 2 } }
            })),
        ),
        (
            "full-vs-full",
            build(json!({
                "name": "full-vs-full",
                "systems": {
                    "X": { "kind": "full", "alphabet": 2 },
                    "P": { "kind": "fixed_point" }
                },
                "codes": { "collapse": { "kind": "trivial" } },
                "task": "joining",
                "params": { "x": "X", "y": "X", "z": "P", "pi_x": "collapse", "pi_y": "collapse",
                            "mode": { "kind": "search", "window": 1 } }
            })),
        ),
        (
            "folner-boxes",
            build(json!({
                "name": "folner-boxes",
                "task": "folner",
                "params": { "k": [0, 2], "n_max": 16 }
            })),
        ),
    ]
}

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    presets()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, c)| c)
}
