use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Numeric rows of a CSV file with a header row.
pub fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: malformed CSV", path.display()))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .with_context(|| format!("{}: row {} is not numeric", path.display(), i + 2))?;
        if row.iter().any(|x| !x.is_finite()) {
            bail!("{}: row {} has a non-finite value", path.display(), i + 2);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Rows of exactly `width` columns.
pub fn read_matrix(path: &Path, width: usize) -> Result<Vec<Vec<f64>>> {
    let rows = read_rows(path)?;
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
        bail!("{}: row {} has {} columns, expected {width}", path.display(), i + 2, r.len());
    }
    Ok(rows)
}

pub struct Table {
    wtr: csv::Writer<Box<dyn Write>>,
}

impl Table {
    pub fn stdout(header: &[String]) -> Result<Self> {
        Self::new(Box::new(std::io::stdout().lock()), header)
    }

    pub fn file(path: &Path, header: &[String]) -> Result<Self> {
        let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
        Self::new(Box::new(std::io::BufWriter::new(f)), header)
    }

    fn new(out: Box<dyn Write>, header: &[String]) -> Result<Self> {
        let mut wtr = csv::WriterBuilder::new().from_writer(out);
        wtr.write_record(header)?;
        Ok(Self { wtr })
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) -> Result<()> {
        self.wtr.write_record(fields.into_iter().collect::<Vec<_>>())?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.wtr.flush()?;
        Ok(())
    }
}

pub fn coord_header(d: usize) -> Vec<String> {
    (1..=d).map(|j| format!("x{j}")).collect()
}
