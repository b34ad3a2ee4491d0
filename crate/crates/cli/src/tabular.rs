use std::path::Path;

use anyhow::{bail, Context};

/// Numeric CSV rows. A first row that does not parse is taken as a header.
pub fn numeric_rows(path: &Path) -> anyhow::Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: malformed CSV", path.display()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        match record.iter().map(str::parse::<f64>).collect::<Result<Vec<_>, _>>() {
            Ok(row) if row.iter().all(|v| v.is_finite()) => rows.push(row),
            _ if i == 0 => continue,
            _ => bail!("{}: line {}: expected numbers, got `{}`", path.display(), i + 1, record.as_slice()),
        }
    }
    Ok(rows)
}

/// Rows of exactly `width` values.
pub fn fixed_rows(path: &Path, width: usize) -> anyhow::Result<Vec<Vec<f64>>> {
    let rows = numeric_rows(path)?;
    if rows.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
        bail!("{}: row {} has {} values, expected {width}", path.display(), i + 1, r.len());
    }
    Ok(rows)
}

/// First column of every row.
pub fn column(path: &Path) -> anyhow::Result<Vec<f64>> {
    let values: Vec<f64> = numeric_rows(path)?.into_iter().filter_map(|r| r.first().copied()).collect();
    if values.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn header_is_optional() {
        assert_eq!(column(file("x\n1\n2.5\n").path()).unwrap(), vec![1.0, 2.5]);
        assert_eq!(column(file("1\n2.5\n").path()).unwrap(), vec![1.0, 2.5]);
    }

    #[test]
    fn bad_cells_and_widths_are_errors() {
        assert!(column(file("x\n1\nabc\n").path()).is_err());
        assert!(fixed_rows(file("1,2\n3\n").path(), 2).is_err());
        assert!(column(file("x\n").path()).is_err());
    }
}
