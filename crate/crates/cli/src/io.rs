//! Matrix files: headerless CSV, or MatrixMarket `array real` (general or symmetric).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use shortop::DenseMatrix;

use crate::error::{CliError, Result};

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn number(path: &Path, line: usize, field: &str) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("`{}` is not a number", field.trim())))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(path, line, format!("non-finite entry `{}`", field.trim())))
    }
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if text.trim_start().starts_with("%%MatrixMarket") {
        parse_matrix_market(path, &text)
    } else {
        parse_csv(path, &text)
    }
}

fn parse_csv(path: &Path, text: &str) -> Result<DenseMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .map(|f| number(path, line, f))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(
                    path,
                    line,
                    format!("expected {} columns, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(path, 1, "empty matrix"));
    }
    let cols = rows[0].len();
    Ok(DenseMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

fn parse_matrix_market(path: &Path, text: &str) -> Result<DenseMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, banner) = lines.next().ok_or_else(|| parse_err(path, 1, "missing banner"))?;
    let words: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[1] != "matrix" || words[2] != "array" || words[3] != "real" {
        return Err(parse_err(
            path,
            1,
            "only `matrix array real` MatrixMarket files are supported",
        ));
    }
    let symmetric = match words[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(path, 1, format!("unsupported symmetry `{other}`"))),
    };
    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (size_line, size) = body.next().ok_or_else(|| parse_err(path, 2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|w| w.parse().map_err(|_| parse_err(path, size_line, "bad size line")))
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(parse_err(path, size_line, "size line must hold `rows cols`"));
    };
    if symmetric && rows != cols {
        return Err(parse_err(path, size_line, "symmetric storage needs a square matrix"));
    }
    // column-major; symmetric files list only the lower triangle
    let slots: Vec<(usize, usize)> = (0..cols)
        .flat_map(|j| (if symmetric { j } else { 0 }..rows).map(move |i| (i, j)))
        .collect();
    let mut m = DenseMatrix::zeros(rows, cols);
    let mut filled = 0;
    for (line, entry) in body {
        let &(i, j) = slots
            .get(filled)
            .ok_or_else(|| parse_err(path, line, "more entries than the declared size"))?;
        let v = number(path, line, entry)?;
        m[(i, j)] = v;
        if symmetric {
            m[(j, i)] = v;
        }
        filled += 1;
    }
    if filled != slots.len() {
        return Err(parse_err(
            path,
            0,
            format!("expected {} entries, found {filled}", slots.len()),
        ));
    }
    Ok(m)
}

/// Debug formatting of `f64` is the shortest string that parses back to
/// the same value, so written matrices reload exactly.
pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn write_output(out: Option<&PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("t")
    }

    #[test]
    fn csv_basic() {
        let m = parse_csv(p(), "1, 2\n3,4.5\n\n").unwrap();
        assert_eq!(m, DenseMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.5]));
    }

    #[test]
    fn csv_ragged_and_garbage() {
        assert!(matches!(
            parse_csv(p(), "1,2\n3\n"),
            Err(CliError::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_csv(p(), "1,x\n"), Err(CliError::Parse { line: 1, .. })));
        assert!(matches!(parse_csv(p(), "1,NaN\n"), Err(CliError::Parse { .. })));
        assert!(matches!(parse_csv(p(), ""), Err(CliError::Parse { .. })));
    }

    #[test]
    fn matrix_market_general_and_symmetric() {
        let g = "%%MatrixMarket matrix array real general\n% comment\n2 3\n1\n2\n3\n4\n5\n6\n";
        let m = parse_matrix_market(p(), g).unwrap();
        assert_eq!(m, DenseMatrix::from_row_slice(2, 3, &[1.0, 3.0, 5.0, 2.0, 4.0, 6.0]));

        let s = "%%MatrixMarket matrix array real symmetric\n2 2\n2\n1\n1\n";
        let m = parse_matrix_market(p(), s).unwrap();
        assert_eq!(m, DenseMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]));

        assert!(parse_matrix_market(p(), "%%MatrixMarket matrix array real general\n2 2\n1\n").is_err());
        assert!(parse_matrix_market(p(), "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1\n").is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let vals = [
            0.1,
            -1.0 / 3.0,
            1e-300,
            6.02e23,
            f64::MIN_POSITIVE,
            0.0,
            -0.0,
            2.0f64.sqrt(),
        ];
        let m = DenseMatrix::from_row_slice(2, 4, &vals);
        let back = parse_csv(p(), &format_matrix(&m)).unwrap();
        assert_eq!(back, m);
    }
}
