//! Circuit files: one instruction per line, `#` starts a comment.
//!
//! ```text
//! WIRES 2        # must come first
//! H 0
//! T 1            # also X, Z, S
//! A 3 0          # A(n) = diag(1, e^{inπ/4}), n in 0..8
//! CNOT 0 1       # control, target
//! ```

use crate::compile::Circuit;
use crate::error::{Error, Result};
use crate::simcore::{Angle8, Gate};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn number(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse().map_err(|_| parse_err(line, format!("expected {what}, got {tok:?}")))
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let op = toks[0].to_ascii_uppercase();
        let args = &toks[1..];
        let expect = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(parse_err(line, format!("{op} takes {n} argument(s), got {}", args.len())))
            }
        };
        if op == "WIRES" {
            expect(1)?;
            if circuit.is_some() {
                return Err(parse_err(line, "WIRES given twice"));
            }
            let n = number(args[0], line, "a wire count")?;
            circuit = Some(Circuit::new(n).map_err(|e| parse_err(line, e.to_string()))?);
            continue;
        }
        let c = circuit.as_mut().ok_or_else(|| parse_err(line, "the first instruction must be WIRES n"))?;
        let gate = match op.as_str() {
            "H" | "X" | "Z" | "S" | "T" => {
                expect(1)?;
                let w = number(args[0], line, "a wire")?;
                match op.as_str() {
                    "H" => Gate::H(w),
                    "X" => Gate::X(w),
                    "Z" => Gate::Z(w),
                    "S" => Gate::S(w),
                    _ => Gate::t(w),
                }
            }
            "A" => {
                expect(2)?;
                let n = number(args[0], line, "an angle index")?;
                if n >= 8 {
                    return Err(parse_err(line, format!("angle index must be below 8, got {n}")));
                }
                Gate::A(Angle8::new(n as i64), number(args[1], line, "a wire")?)
            }
            "CNOT" => {
                expect(2)?;
                Gate::Cnot {
                    control: number(args[0], line, "a control wire")?,
                    target: number(args[1], line, "a target wire")?,
                }
            }
            _ => return Err(parse_err(line, format!("unknown instruction {:?}", toks[0]))),
        };
        c.push(gate).map_err(|e| parse_err(line, e.to_string()))?;
    }
    circuit.ok_or_else(|| parse_err(text.lines().count().max(1), "missing WIRES line"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::party_rng;

    #[test]
    fn parses_every_instruction() {
        let c = parse_circuit("# demo\nWIRES 3\nH 0\nx 1 # lower case is fine\nZ 2\nS 0\nT 1\nA 5 2\nCNOT 2 0\n\n")
            .unwrap();
        assert_eq!(c.num_wires(), 3);
        assert_eq!(c.size(), 7);
        assert_eq!(c.gates()[5], Gate::A(Angle8::new(5), 2));
        assert_eq!(c.gates()[6], Gate::Cnot { control: 2, target: 0 });
    }

    #[test]
    fn display_round_trips() {
        let mut rng = party_rng(3, 0);
        for _ in 0..20 {
            let c = Circuit::random(3, 12, &mut rng).unwrap();
            assert_eq!(parse_circuit(&c.to_string()).unwrap(), c);
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("WIRES 2\nCNOT 0\n", 2),
            ("H 0\n", 1),
            ("WIRES 2\n\nH 5\n", 3),
            ("WIRES 1\nFOO 0\n", 2),
            ("WIRES 1\nA 8 0\n", 2),
            ("WIRES 2\nWIRES 2\n", 2),
            ("WIRES 2\nCNOT 1 1\n", 2),
            ("WIRES x\n", 1),
            ("WIRES 0\n", 1),
            ("# nothing\n", 1),
        ];
        for (text, line) in cases {
            match parse_circuit(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
