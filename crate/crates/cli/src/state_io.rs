//! Data and result files.
//!
//! A data spec is a basis string (`|01⟩`, `|01>` or `01`) or a path to a JSON
//! file holding either `[[re, im], ...]` or a result object
//! `{"qubits": n, "amplitudes": [[re, im], ...]}`.

use std::path::Path;

use num_complex::Complex64 as C64;
use qfhe_core::{QfheError, StateVector};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Norm tolerance for amplitude files.
pub const LOAD_TOLERANCE: f64 = 1e-9;

#[derive(Serialize, Deserialize)]
pub struct StateFile {
    pub qubits: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AmplitudeInput {
    Bare(Vec<[f64; 2]>),
    Wrapped(StateFile),
}

pub fn parse_bits(text: &str) -> Option<Vec<bool>> {
    let inner = text
        .trim()
        .trim_start_matches('|')
        .trim_end_matches('⟩')
        .trim_end_matches('>');
    inner
        .chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

fn is_basis_spec(text: &str) -> bool {
    let t = text.trim();
    t.starts_with('|') || (!t.is_empty() && t.chars().all(|c| c == '0' || c == '1'))
}

pub fn load_data(spec: &str) -> Result<StateVector, CliError> {
    if is_basis_spec(spec) {
        let bits = parse_bits(spec)
            .filter(|b| !b.is_empty())
            .ok_or_else(|| CliError::usage(format!("bad basis string {spec:?}")))?;
        return Ok(StateVector::basis(&bits)?);
    }
    let text = std::fs::read_to_string(spec).map_err(|e| CliError::io(spec, e))?;
    let amps = match serde_json::from_str::<AmplitudeInput>(&text).map_err(QfheError::from)? {
        AmplitudeInput::Bare(a) => a,
        AmplitudeInput::Wrapped(f) => f.amplitudes,
    };
    let amps: Vec<C64> = amps.iter().map(|[re, im]| C64::new(*re, *im)).collect();
    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (norm_sqr - 1.0).abs() > LOAD_TOLERANCE {
        return Err(CliError::usage(format!(
            "amplitudes in {spec} have squared norm {norm_sqr}, not 1 within {LOAD_TOLERANCE:e}"
        )));
    }
    let norm = norm_sqr.sqrt();
    Ok(StateVector::from_amplitudes(
        amps.into_iter().map(|a| a / norm).collect(),
    )?)
}

pub fn state_file(state: &StateVector) -> StateFile {
    StateFile {
        qubits: state.num_qubits(),
        amplitudes: state
            .canonical_phase()
            .amplitudes()
            .iter()
            .map(|a| [a.re, a.im])
            .collect(),
    }
}

pub fn write_state(path: &Path, state: &StateVector) -> Result<(), CliError> {
    let text = serde_json::to_string(&state_file(state)).expect("state serializes");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path.display(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_forms() {
        assert_eq!(parse_bits("|01⟩"), Some(vec![false, true]));
        assert_eq!(parse_bits("|10>"), Some(vec![true, false]));
        assert_eq!(parse_bits("1"), Some(vec![true]));
        assert_eq!(parse_bits("|2>"), None);
        assert!(is_basis_spec("|0>"));
        assert!(!is_basis_spec("data.json"));
    }
}
