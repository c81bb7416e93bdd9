//! The shared plain-text exchange format: one sequence per line, entries
//! "+1"/"-1" separated by single spaces; partially filled states may also
//! contain "0".

use crate::game::SequenceSet;
use crate::radar::PhaseCode;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("line {line}, entry {column}: unrecognized symbol {token:?}")]
    BadSymbol {
        line: usize,
        column: usize,
        token: String,
    },
    #[error("line {line} has {got} entries, expected {want}")]
    RaggedLine {
        line: usize,
        got: usize,
        want: usize,
    },
    #[error("no sequences in input")]
    Empty,
    #[error("zeros are not allowed in a completed sequence (line {line}, entry {column})")]
    ZeroEntry { line: usize, column: usize },
    #[error("expected a single sequence, found {0} lines")]
    NotAVector(usize),
}

/// Parse a matrix of symbols; `allow_zero` admits vacant cells.
pub fn parse_matrix(text: &str, allow_zero: bool) -> Result<Vec<Vec<i8>>, TextError> {
    let mut rows: Vec<Vec<i8>> = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for (ci, token) in line.split_whitespace().enumerate() {
            let value = match token {
                "+1" | "1" => 1i8,
                "-1" => -1,
                "0" => {
                    if !allow_zero {
                        return Err(TextError::ZeroEntry {
                            line: li + 1,
                            column: ci + 1,
                        });
                    }
                    0
                }
                other => {
                    return Err(TextError::BadSymbol {
                        line: li + 1,
                        column: ci + 1,
                        token: other.to_string(),
                    })
                }
            };
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(TextError::RaggedLine {
                    line: li + 1,
                    got: row.len(),
                    want: first.len(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() || rows[0].is_empty() {
        return Err(TextError::Empty);
    }
    Ok(rows)
}

pub fn parse_sequence_set(text: &str) -> Result<SequenceSet, TextError> {
    Ok(SequenceSet::from_rows(&parse_matrix(text, false)?))
}

pub fn parse_phase_code(text: &str) -> Result<PhaseCode, TextError> {
    let rows = parse_matrix(text, false)?;
    if rows.len() != 1 {
        return Err(TextError::NotAVector(rows.len()));
    }
    PhaseCode::new(rows.into_iter().next().expect("one row")).map_err(|_| TextError::NotAVector(1))
}

fn format_row(row: &[i8]) -> String {
    row.iter()
        .map(|&e| match e {
            1 => "+1",
            -1 => "-1",
            _ => "0",
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn format_sequence_set(set: &SequenceSet) -> String {
    let mut out = String::new();
    for i in 0..set.rows() {
        out.push_str(&format_row(set.row(i)));
        out.push('\n');
    }
    out
}

pub fn format_phase_code(code: &PhaseCode) -> String {
    let mut out = format_row(code.entries());
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_set() {
        let set = SequenceSet::from_rows(&[vec![1, -1, 1], vec![-1, -1, 1]]);
        let text = format_sequence_set(&set);
        assert_eq!(text, "+1 -1 +1\n-1 -1 +1\n");
        assert_eq!(parse_sequence_set(&text).unwrap(), set);
    }

    #[test]
    fn roundtrip_code() {
        let code = PhaseCode::new(vec![1, 1, -1]).unwrap();
        let text = format_phase_code(&code);
        assert_eq!(parse_phase_code(&text).unwrap(), code);
    }

    #[test]
    fn rejects_malformed() {
        let err = parse_sequence_set("+1 2 -1\n").unwrap_err();
        match err {
            TextError::BadSymbol {
                line,
                column,
                token,
            } => {
                assert_eq!((line, column), (1, 2));
                assert_eq!(token, "2");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_sequence_set("+1 -1\n+1\n").is_err());
        assert!(parse_sequence_set("").is_err());
        assert!(parse_sequence_set("+1 0 -1\n").is_err());
        assert!(parse_matrix("+1 0 -1\n", true).is_ok());
        assert!(parse_phase_code("+1 -1\n+1 -1\n").is_err());
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let text = "# header\n\n+1 -1\n";
        let set = parse_sequence_set(text).unwrap();
        assert_eq!(set.rows(), 1);
        assert_eq!(set.row(0), &[1, -1]);
    }
}
