//! Line-oriented experiment descriptions and the result CSV schema.
//!
//! ```text
//! registers 3 1 0        # input answer work
//! gate h 0               # gates accumulate into the current unitary
//! query                  # oracle call; starts the next unitary
//! oracle 00 01 ...       # 2^a entries, hex
//! modified 1 05          # (step, input) pair of the modified set
//! modified_oracle ...    # table the modified points answer from
//! accept 4               # optional accept qubit
//! ```

use std::collections::BTreeSet;

use crate::circuit::{Circuit, Gate};
use crate::experiment::QueryExperiment;
use crate::state::OracleTable;
use crate::QsimError;

/// A parsed experiment file.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub experiment: QueryExperiment,
    pub table: OracleTable,
    pub modified_table: Option<OracleTable>,
    pub accept_qubit: Option<usize>,
}

pub fn parse_experiment(text: &str) -> Result<ExperimentSpec, QsimError> {
    let mut registers: Option<(usize, usize, usize)> = None;
    let mut circuits = vec![Circuit::identity()];
    let mut table_entries: Option<Vec<u64>> = None;
    let mut modified_entries: Option<Vec<u64>> = None;
    let mut modified_set: BTreeSet<(usize, u64)> = BTreeSet::new();
    let mut accept_qubit = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| QsimError::Parse {
            line: lineno + 1,
            reason,
        };
        let mut words = line.split_whitespace();
        let keyword = words.next().unwrap();
        let rest: Vec<&str> = words.collect();
        match keyword {
            "registers" => {
                if rest.len() != 3 {
                    return Err(err("registers needs three widths".into()));
                }
                let vals: Vec<usize> = rest
                    .iter()
                    .map(|w| w.parse().map_err(|_| err(format!("bad width {w}"))))
                    .collect::<Result<_, _>>()?;
                registers = Some((vals[0], vals[1], vals[2]));
            }
            "gate" => {
                let gate = parse_gate(&rest).map_err(err)?;
                circuits.last_mut().unwrap().gates.push(gate);
            }
            "query" => circuits.push(Circuit::identity()),
            "oracle" | "modified_oracle" => {
                let entries: Vec<u64> = rest
                    .iter()
                    .map(|w| {
                        u64::from_str_radix(w, 16).map_err(|_| err(format!("bad hex entry {w}")))
                    })
                    .collect::<Result<_, _>>()?;
                if keyword == "oracle" {
                    table_entries = Some(entries);
                } else {
                    modified_entries = Some(entries);
                }
            }
            "modified" => {
                if rest.len() != 2 {
                    return Err(err("modified needs a step and an input".into()));
                }
                let step: usize = rest[0]
                    .parse()
                    .map_err(|_| err(format!("bad step {}", rest[0])))?;
                let input = u64::from_str_radix(rest[1], 16)
                    .map_err(|_| err(format!("bad hex input {}", rest[1])))?;
                modified_set.insert((step, input));
            }
            "accept" => {
                accept_qubit = Some(
                    rest[0]
                        .parse()
                        .map_err(|_| err(format!("bad qubit {}", rest[0])))?,
                );
            }
            other => return Err(err(format!("unknown keyword {other}"))),
        }
    }

    let (a, b, w) = registers.ok_or(QsimError::Parse {
        line: 0,
        reason: "missing registers line".into(),
    })?;
    let entries = table_entries.ok_or(QsimError::Parse {
        line: 0,
        reason: "missing oracle table".into(),
    })?;
    let table = OracleTable::new(a, b, entries)?;
    let modified_table = modified_entries
        .map(|e| OracleTable::new(a, b, e))
        .transpose()?;
    let experiment = QueryExperiment {
        input_bits: a,
        answer_bits: b,
        work_bits: w,
        unitaries: circuits,
        modified_set,
    };
    experiment.validate()?;
    Ok(ExperimentSpec {
        experiment,
        table,
        modified_table,
        accept_qubit,
    })
}

fn parse_gate(words: &[&str]) -> Result<Gate, String> {
    match words {
        ["h", q] => Ok(Gate::H(parse_qubit(q)?)),
        ["s", q] => Ok(Gate::S(parse_qubit(q)?)),
        ["t", q] => Ok(Gate::T(parse_qubit(q)?)),
        ["cnot", c, t] => Ok(Gate::Cnot {
            control: parse_qubit(c)?,
            target: parse_qubit(t)?,
        }),
        _ => Err(format!("unknown gate {words:?}")),
    }
}

fn parse_qubit(w: &str) -> Result<usize, String> {
    w.parse().map_err(|_| format!("bad qubit index {w}"))
}

/// Header of the bound-check result CSV.
pub fn csv_header() -> &'static str {
    "experiment,eps_sum,distance,ratio,bound,pass"
}

/// One result row; blank ratio when the query mass was zero.
pub fn csv_row(
    experiment: &str,
    eps_sum: f64,
    distance: f64,
    ratio: Option<f64>,
    bound: f64,
    pass: bool,
) -> String {
    let ratio = ratio.map(|r| format!("{r:.6}")).unwrap_or_default();
    format!(
        "{experiment},{eps_sum:.6},{distance:.6},{ratio},{bound:.6},{}",
        u8::from(pass)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# single-query fourier probe
registers 3 1 0
gate h 0
gate h 1
gate h 2
query
oracle 0 0 0 0 0 0 0 0
modified 1 5
modified_oracle 0 0 0 0 0 1 0 0
accept 3
";

    #[test]
    fn sample_file_parses() {
        let spec = parse_experiment(SAMPLE).unwrap();
        assert_eq!(spec.experiment.step_count(), 1);
        assert_eq!(spec.experiment.unitaries[0].gates.len(), 3);
        assert!(spec.experiment.modified_set.contains(&(1, 5)));
        assert_eq!(spec.modified_table.as_ref().unwrap().get(5), 1);
        assert_eq!(spec.accept_qubit, Some(3));
    }

    #[test]
    fn malformed_lines_are_rejected_with_position() {
        let bad = SAMPLE.replace("gate h 1", "gate hh 1");
        match parse_experiment(&bad) {
            Err(QsimError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected a parse error, got {other:?}"),
        }
        assert!(parse_experiment("registers 3 1 0\noracle 0\n").is_err());
        assert!(parse_experiment(&SAMPLE.replace("oracle 0 0 0 0 0 0 0 0", "oracle 0 0")).is_err());
    }

    #[test]
    fn csv_rows_are_stable() {
        assert_eq!(csv_header(), "experiment,eps_sum,distance,ratio,bound,pass");
        let row = csv_row("bbbv-0", 0.125, 0.5, Some(1.414), 2.0, true);
        assert_eq!(row, "bbbv-0,0.125000,0.500000,1.414000,2.000000,1");
        let row = csv_row("bv-1", 0.0, 0.0, None, 0.1, true);
        assert_eq!(row, "bv-1,0.000000,0.000000,,0.100000,1");
    }
}
