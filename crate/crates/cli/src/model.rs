//! Construct library systems from config descriptions.

use std::path::Path;

use aaqc::clocksim::{gate_cnot, gate_h, gate_phase, gate_x, ClockCircuit, Gate};
use aaqc::floquet::FloquetSystem;
use aaqc::models;
use aaqc::numerics::{c64, CMatrix, CVector};

use crate::config::{CustomMatrixFile, GateConfig, ModelConfig};
use crate::error::CliError;

/// A system ready to scan or evolve, with the passage endpoints attached.
pub struct BuiltModel {
    pub system: FloquetSystem,
    pub psi0: CVector,
    pub target: CVector,
}

pub fn parse_gates(gates: &[GateConfig]) -> Result<Vec<Gate>, CliError> {
    gates
        .iter()
        .map(|g| {
            match (&g.gate, &g.matrix) {
                (Some(name), None) => {
                    let t = &g.targets;
                    let need = |k: usize| -> Result<(), CliError> {
                        if t.len() == k {
                            Ok(())
                        } else {
                            Err(CliError::config(
                                "BadGate",
                                format!("gate {name} needs {k} target(s), got {}", t.len()),
                            ))
                        }
                    };
                    match name.to_ascii_uppercase().as_str() {
                        "X" => {
                            need(1)?;
                            Ok(gate_x(t[0]))
                        }
                        "H" => {
                            need(1)?;
                            Ok(gate_h(t[0]))
                        }
                        "CNOT" => {
                            need(2)?;
                            Ok(gate_cnot(t[0], t[1]))
                        }
                        "PHASE" => {
                            need(1)?;
                            let theta = g.theta.ok_or_else(|| {
                                CliError::config("BadGate", "PHASE needs a theta".to_string())
                            })?;
                            Ok(gate_phase(theta, t[0]))
                        }
                        other => Err(CliError::config(
                            "BadGate",
                            format!("unknown gate name {other}; use X, H, CNOT, PHASE or a matrix"),
                        )),
                    }
                }
                (None, Some(rows)) => {
                    let m = matrix_from_rows(rows)?;
                    Gate::new(m, g.targets.clone()).map_err(CliError::config_from_core)
                }
                _ => Err(CliError::config(
                    "BadGate",
                    "each gate entry needs exactly one of `gate` or `matrix`".to_string(),
                )),
            }
        })
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::config(
            "BadMatrix",
            "matrix must be square and non-empty".to_string(),
        ));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| c64(rows[i][j][0], rows[i][j][1])))
}

pub fn build_circuit(n: usize, gates: &[GateConfig]) -> Result<ClockCircuit, CliError> {
    let parsed = parse_gates(gates)?;
    ClockCircuit::new(n, parsed).map_err(CliError::config_from_core)
}

pub fn build_model(cfg: &ModelConfig, base_dir: &Path) -> Result<BuiltModel, CliError> {
    match cfg {
        ModelConfig::TwoLevel { e2, a2, t } => {
            if !(*a2 > 0.0 && *a2 < 1.0) {
                // a2 at the endpoints leaves one level untouched
                return Err(CliError::config(
                    "DegenerateChoice",
                    format!("a2 must lie strictly inside (0, 1), got {a2}"),
                ));
            }
            let system = models::two_level_system(
                *e2,
                c64(a2.sqrt(), 0.0),
                c64((1.0 - a2).sqrt(), 0.0),
                *t,
            )
            .map_err(CliError::config_from_core)?;
            Ok(BuiltModel {
                system,
                psi0: CVector::basis(2, 0),
                target: CVector::basis(2, 1),
            })
        }
        ModelConfig::GroverOptimal { e_p, t } => {
            let r = 1.0 / 2.0f64.sqrt();
            let system = models::two_level_system(*e_p, c64(r, 0.0), c64(r, 0.0), *t)
                .map_err(CliError::config_from_core)?;
            Ok(BuiltModel {
                system,
                psi0: CVector::basis(2, 0),
                target: CVector::basis(2, 1),
            })
        }
        ModelConfig::GroverFair {
            n,
            a2,
            alpha,
            e_p,
            t,
            theta,
        } => {
            if !(*a2 > 0.0 && *a2 < 1.0) {
                return Err(CliError::config(
                    "DegenerateChoice",
                    format!("a2 must lie strictly inside (0, 1), got {a2}"),
                ));
            }
            let system = models::fair_grover_effective(
                *n,
                a2.sqrt(),
                (1.0 - a2).sqrt(),
                *alpha,
                *e_p,
                *t,
                *theta,
            )
            .map_err(CliError::config_from_core)?;
            Ok(BuiltModel {
                system,
                psi0: CVector::basis(3, 0),
                target: CVector::basis(3, 1),
            })
        }
        ModelConfig::ClockSim { n, gates, e_p, t } => {
            let circuit = build_circuit(*n, gates)?;
            let composed = aaqc::clocksim::compose_circuit_aaqc(&circuit, *e_p, *t)
                .map_err(CliError::config_from_core)?;
            let system = composed.floquet_system().map_err(CliError::config_from_core)?;
            Ok(BuiltModel {
                system,
                psi0: composed.minus.clone(),
                target: composed.plus.clone(),
            })
        }
        ModelConfig::Custom { matrix_file } => {
            let path = base_dir.join(matrix_file);
            let text = std::fs::read_to_string(&path).map_err(|e| {
                CliError::config("BadConfig", format!("cannot read {}: {e}", path.display()))
            })?;
            let file: CustomMatrixFile = serde_json::from_str(&text).map_err(|e| {
                CliError::config("BadConfig", format!("bad matrix file {}: {e}", path.display()))
            })?;
            let h0 = matrix_from_rows(&file.h0)?;
            let dim = h0.rows;
            let v = CVector::new(file.v.iter().map(|z| c64(z[0], z[1])).collect());
            let system =
                FloquetSystem::new(h0, v, file.t).map_err(CliError::config_from_core)?;
            let start = file.start_index;
            let target = file.target_index.unwrap_or((start + 1) % dim);
            if start >= dim || target >= dim {
                return Err(CliError::config(
                    "IndexOutOfRange",
                    format!("state indices ({start}, {target}) exceed dimension {dim}"),
                ));
            }
            let ed = system.h0_eigendecomposition();
            Ok(BuiltModel {
                psi0: ed.vector(start),
                target: ed.vector(target),
                system,
            })
        }
    }
}
