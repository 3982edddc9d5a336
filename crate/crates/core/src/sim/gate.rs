use std::fmt;

use crate::{Error, Result};

/// One gate of the ansatz gate set. Angles are in radians.
///
/// * `RotZ(θ) = exp(-iθZ/2)`
/// * `RotX(θ) = exp(-iθX/2)`
/// * `ZZRot(θ) = exp(-iθ Z⊗Z/2)`: phase `e^{-iθ/2}` when the two bits agree,
///   `e^{+iθ/2}` when they differ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp {
    Hadamard(usize),
    RotX(f64, usize),
    RotZ(f64, usize),
    CNot { control: usize, target: usize },
    ZZRot(f64, usize, usize),
}

impl GateOp {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            GateOp::Hadamard(q) | GateOp::RotX(_, q) | GateOp::RotZ(_, q) => vec![q],
            GateOp::CNot { control, target } => vec![control, target],
            GateOp::ZZRot(_, a, b) => vec![a, b],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, GateOp::CNot { .. } | GateOp::ZZRot(..))
    }

    pub fn inverse(&self) -> GateOp {
        match *self {
            GateOp::RotX(t, q) => GateOp::RotX(-t, q),
            GateOp::RotZ(t, q) => GateOp::RotZ(-t, q),
            GateOp::ZZRot(t, a, b) => GateOp::ZZRot(-t, a, b),
            g @ (GateOp::Hadamard(_) | GateOp::CNot { .. }) => g,
        }
    }

    /// Checks that targets are distinct and below `num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= num_qubits) {
            return Err(Error::domain(format!(
                "gate {self} targets qubit {q} of a {num_qubits}-qubit register"
            )));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::domain(format!("gate {self} repeats a target")));
        }
        if let GateOp::RotX(t, _) | GateOp::RotZ(t, _) | GateOp::ZZRot(t, ..) = *self {
            if !t.is_finite() {
                return Err(Error::domain("rotation angle is not finite"));
            }
        }
        Ok(())
    }

    /// `CNOT(a,b) RZ(θ, b) CNOT(a,b)`, which equals `ZZRot(θ, a, b)`.
    pub fn zz_decomposition(theta: f64, a: usize, b: usize) -> [GateOp; 3] {
        [
            GateOp::CNot { control: a, target: b },
            GateOp::RotZ(theta, b),
            GateOp::CNot { control: a, target: b },
        ]
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GateOp::Hadamard(q) => write!(f, "H {q}"),
            GateOp::RotX(t, q) => write!(f, "RX {t} {q}"),
            GateOp::RotZ(t, q) => write!(f, "RZ {t} {q}"),
            GateOp::CNot { control, target } => write!(f, "CNOT {control} {target}"),
            GateOp::ZZRot(t, a, b) => write!(f, "ZZ {t} {a} {b}"),
        }
    }
}

/// One gate per line; `#` starts a comment.
pub fn format_program(gates: &[GateOp]) -> String {
    let mut s = String::new();
    for g in gates {
        s.push_str(&g.to_string());
        s.push('\n');
    }
    s
}

pub fn parse_program(text: &str) -> Result<Vec<GateOp>> {
    let mut gates = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |what: &str| Error::parse(format!("line {}: {what}: `{line}`", lineno + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        let qubit = |s: &str| s.parse::<usize>().map_err(|_| err("bad qubit index"));
        let angle = |s: &str| s.parse::<f64>().map_err(|_| err("bad angle"));
        let gate = match fields.as_slice() {
            ["H", q] => GateOp::Hadamard(qubit(q)?),
            ["RX", t, q] => GateOp::RotX(angle(t)?, qubit(q)?),
            ["RZ", t, q] => GateOp::RotZ(angle(t)?, qubit(q)?),
            ["CNOT", c, t] => GateOp::CNot {
                control: qubit(c)?,
                target: qubit(t)?,
            },
            ["ZZ", t, a, b] => GateOp::ZZRot(angle(t)?, qubit(a)?, qubit(b)?),
            _ => return Err(err("unrecognised gate")),
        };
        gates.push(gate);
    }
    Ok(gates)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn program_text_round_trip() {
        let text = "H 3\nRZ 0.42 5\nCNOT 1 2\nZZ 0.1 1 2\nRX -1.5707963267948966 0\n";
        let gates = parse_program(text).unwrap();
        assert_eq!(gates.len(), 5);
        assert_eq!(gates[1], GateOp::RotZ(0.42, 5));
        assert_eq!(format_program(&gates), text);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let e = parse_program("H 0\nFOO 1\n").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        assert!(parse_program("RZ x 1").is_err());
    }

    #[test]
    fn validation() {
        assert!(GateOp::CNot { control: 1, target: 1 }.validate(3).is_err());
        assert!(GateOp::Hadamard(3).validate(3).is_err());
        assert!(GateOp::ZZRot(0.1, 0, 2).validate(3).is_ok());
    }
}
