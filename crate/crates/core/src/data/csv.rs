//! Comma-separated embeddings: a header line, then `d` float columns and one
//! integer label column per row.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::EmbeddingSet;
use crate::error::{Error, Result};

/// Parses CSV text. `n_classes` defaults to `1 + max label` (1 for an empty set).
pub fn parse_csv(text: &str, n_classes: Option<usize>) -> Result<EmbeddingSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header_len = reader.headers().map_err(|e| csv_error(1, &e))?.len();
    if text.trim().is_empty() || header_len < 2 {
        return Err(Error::Csv {
            line: 1,
            message: "header must name at least one feature column and the label column".into(),
        });
    }
    let d = header_len - 1;

    let mut x = Vec::new();
    let mut y = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            csv_error(line, &e)
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != header_len {
            return Err(Error::Csv {
                line,
                message: format!("expected {header_len} fields, found {}", record.len()),
            });
        }
        for (col, cell) in record.iter().take(d).enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Csv {
                line,
                message: format!("column {col}: {cell:?} is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Csv {
                    line,
                    message: format!("column {col}: non-finite value {cell:?}"),
                });
            }
            x.push(v);
        }
        let cell = &record[d];
        let label: usize = cell.parse().map_err(|_| Error::Csv {
            line,
            message: format!("label {cell:?} is not a non-negative integer"),
        })?;
        if let Some(c) = n_classes {
            if label >= c {
                return Err(Error::Csv {
                    line,
                    message: format!("label {label} out of range for {c} classes"),
                });
            }
        }
        y.push(label);
    }

    let n_classes = n_classes.unwrap_or_else(|| y.iter().max().map_or(1, |m| m + 1));
    EmbeddingSet::new("", d, n_classes, x, y)
}

fn csv_error(line: u64, e: &csv::Error) -> Error {
    Error::Csv {
        line,
        message: e.to_string(),
    }
}

pub fn load_csv(path: impl AsRef<Path>, n_classes: Option<usize>) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(parse_csv(&text, n_classes)?.with_name(name))
}

/// Renders a set as CSV with header `x0,…,x{d-1},label`. Floats use the
/// shortest representation that parses back to the same `f64`.
pub fn to_csv(set: &EmbeddingSet) -> String {
    let mut out = String::new();
    for i in 0..set.dim() {
        let _ = write!(out, "x{i},");
    }
    out.push_str("label\n");
    for (row, label) in set.rows().zip(set.labels()) {
        for v in row {
            let _ = write!(out, "{v},");
        }
        let _ = writeln!(out, "{label}");
    }
    out
}

pub fn save_csv(set: &EmbeddingSet, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_csv(set))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::data::emb;

    #[test]
    fn header_only_is_empty() {
        let set = parse_csv("a,b,label\n", None).unwrap();
        assert!(set.is_empty());
        assert_eq!(set.dim(), 2);
    }

    #[test]
    fn single_row() {
        let set = parse_csv("a,b,label\n1.0,2.0,0\n", None).unwrap();
        assert_eq!(set.row(0), &[1.0, 2.0]);
        assert_eq!(set.labels(), &[0]);
        assert_eq!(set.n_classes(), 1);
    }

    #[test]
    fn class_count_override() {
        let set = parse_csv("a,label\n1,0\n2,1\n", Some(4)).unwrap();
        assert_eq!(set.n_classes(), 4);
        assert!(parse_csv("a,label\n1,5\n", Some(4)).is_err());
    }

    #[test]
    fn ragged_row_reports_line() {
        let err = parse_csv("a,b,label\n1,2,0\n1,0\n", None).unwrap_err();
        assert!(matches!(err, Error::Csv { line: 3, .. }), "{err}");
    }

    #[test]
    fn non_numeric_reports_line() {
        let err = parse_csv("a,b,label\n1,2,0\n3,4,1\n1,x,0\n", None).unwrap_err();
        assert!(matches!(err, Error::Csv { line: 4, .. }), "{err}");
        assert!(err.to_string().contains("line 4"));
        assert!(matches!(
            parse_csv("a,label\n1,-1\n", None),
            Err(Error::Csv { line: 2, .. })
        ));
        assert!(matches!(
            parse_csv("a,label\nnan,0\n", None),
            Err(Error::Csv { line: 2, .. })
        ));
    }

    #[test]
    fn empty_text_rejected() {
        assert!(parse_csv("", None).is_err());
        assert!(parse_csv("label\n", None).is_err());
    }

    #[test]
    fn csv_through_emb_is_f32_quantized() {
        let text = "a,b,label\n0.1,-2.5,1\n3.3333333333,1e-3,0\n7,8,2\n";
        let parsed = parse_csv(text, None).unwrap();
        let back = emb::decode(&emb::encode(&parsed).unwrap()).unwrap();
        assert_eq!(back.labels(), parsed.labels());
        for (a, b) in back.features().iter().zip(parsed.features()) {
            assert_eq!(*a, *b as f32 as f64);
            assert!((a - b).abs() <= b.abs() * f32::EPSILON as f64);
        }
    }

    proptest! {
        #[test]
        fn to_csv_round_trips(
            rows in prop::collection::vec((prop::collection::vec(-1e3f64..1e3, 3), 0usize..4), 0..8)
        ) {
            let x: Vec<f64> = rows.iter().flat_map(|(r, _)| r.iter().copied()).collect();
            let y: Vec<usize> = rows.iter().map(|(_, l)| *l).collect();
            let set = EmbeddingSet::new("", 3, 4, x, y).unwrap();
            prop_assert_eq!(parse_csv(&to_csv(&set), Some(4)).unwrap(), set);
        }

        #[test]
        fn parse_never_panics(text in ".{0,200}") {
            let _ = parse_csv(&text, None);
        }
    }
}
