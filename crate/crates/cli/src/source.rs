use std::fs;

use ddpath::circuit::{parse_qasm, transpile, Circuit, GateSet, Generator};
use ddpath::simpath::SimulationPath;
use ddpath::tn::ContractionPlan;

use crate::error::CliError;

/// Resolves a circuit source: `name:n`, `transpile(<source>)` or a QASM file.
pub fn load_circuit(spec: &str) -> Result<Circuit, CliError> {
    let spec = spec.trim();
    if let Some(inner) = spec.strip_prefix("transpile(").and_then(|s| s.strip_suffix(')')) {
        return Ok(transpile(&load_circuit(inner)?, &GateSet::default())?);
    }
    if let Some((name, n)) = spec.split_once(':') {
        if let Ok(g) = name.parse::<Generator>() {
            let n: usize = n
                .parse()
                .map_err(|_| CliError::input("circuit", format!("bad qubit count in '{spec}'")))?;
            return Ok(g.build(n)?);
        }
    }
    let src = fs::read_to_string(spec).map_err(|e| CliError::io(&format!("reading '{spec}'"), e))?;
    Ok(parse_qasm(&src)?)
}

/// Reads a path file holding either `{"gate_count", "path"}` or a
/// contraction plan `{"pairs"}`.
pub fn load_path(file: &str, gate_count: usize) -> Result<SimulationPath, CliError> {
    let text = fs::read_to_string(file).map_err(|e| CliError::io(&format!("reading '{file}'"), e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::input("path", format!("'{file}': {e}")))?;
    if value.get("pairs").is_some() {
        let plan = ContractionPlan::from_json(&text)?;
        return Ok(SimulationPath::new(gate_count, plan.pairs));
    }
    Ok(SimulationPath::from_json(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_and_transpile_specs() {
        assert_eq!(load_circuit("ghz:3").unwrap().len(), 3);
        let t = load_circuit("transpile(qft:3)").unwrap();
        assert_eq!(t.len(), 21);
        assert!(load_circuit("ghz:x").is_err());
        assert!(load_circuit("no/such/file.qasm").is_err());
    }
}
