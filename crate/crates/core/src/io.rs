//! File formats: grid functions as CSV plus a JSON layout sidecar, kernels
//! as JSON, and the tabulated kernel export.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::pow2;
use crate::haar::{GridFunction, GridLayout};
use crate::kernel::{KernelSpec, LambdaSeq, Window};

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

fn json_error(path: &Path) -> impl Fn(serde_json::Error) -> Error + '_ {
    move |source| {
        if source.is_io() {
            Error::io(path, source.into())
        } else {
            Error::Json { path: path.to_path_buf(), source }
        }
    }
}

/// Writes `value` as pretty JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(json_error(path))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_reader(open(path)?).map_err(json_error(path))
}

/// Floats in CSV output: 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Layout sidecar of a grid-function CSV: same stem, `.json` extension.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

#[derive(Debug, Serialize, Deserialize)]
struct GridRow {
    cell_index: usize,
    value: f64,
}

/// Writes `cell_index,value` rows and the `{ "Jd", "Jr" }` sidecar.
pub fn write_grid_function(path: &Path, f: &GridFunction) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["cell_index", "value"]).map_err(csv_error(path))?;
    for (c, v) in f.values().iter().enumerate() {
        w.write_record([c.to_string(), format_float(*v)]).map_err(csv_error(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    write_json(&sidecar_path(path), &f.layout())
}

/// Reads a grid function; every cell must appear exactly once.
pub fn read_grid_function(path: &Path) -> Result<GridFunction> {
    let sidecar = sidecar_path(path);
    let raw: GridLayout = read_json(&sidecar)?;
    let layout = GridLayout::new(raw.jd, raw.jr)?;
    let n = layout.cells();
    let mut values = vec![None; n];
    let mut reader = csv::Reader::from_reader(open(path)?);
    for row in reader.deserialize::<GridRow>() {
        let row = row.map_err(csv_error(path))?;
        let slot = values.get_mut(row.cell_index).ok_or_else(|| {
            Error::LayoutMismatch(format!("cell {} outside a grid of {n} cells", row.cell_index))
        })?;
        if slot.replace(row.value).is_some() {
            return Err(Error::LayoutMismatch(format!("cell {} listed twice", row.cell_index)));
        }
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(c, v)| v.ok_or_else(|| Error::LayoutMismatch(format!("cell {c} missing"))))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(layout, values)
}

/// On-disk kernel. `mu` holds `1 - Λ_j` at full precision and `sigma` a
/// declared stability parameter; both are optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelFile {
    pub j_lo: i32,
    pub j_hi: i32,
    pub lambda: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl From<&KernelSpec> for KernelFile {
    fn from(k: &KernelSpec) -> Self {
        let w = k.window();
        let seq = k.lambda_seq();
        Self {
            j_lo: w.lo,
            j_hi: w.hi,
            lambda: seq.values().to_vec(),
            mu: Some(seq.complements().to_vec()),
            sigma: k.sigma(),
        }
    }
}

impl KernelFile {
    pub fn into_kernel(self) -> Result<KernelSpec> {
        let window = Window::new(self.j_lo, self.j_hi)?;
        let seq = match self.mu {
            Some(mu) => LambdaSeq::from_parts(window, self.lambda, mu)?,
            None => LambdaSeq::new(window, self.lambda)?,
        };
        let k = KernelSpec::from_sequence(seq, false)?;
        Ok(match self.sigma {
            Some(s) => k.with_sigma(s),
            None => k,
        })
    }
}

pub fn write_kernel(path: &Path, k: &KernelSpec) -> Result<()> {
    write_json(path, &KernelFile::from(k))
}

pub fn read_kernel(path: &Path) -> Result<KernelSpec> {
    read_json::<KernelFile>(path)?.into_kernel()
}

/// Columns of the tabulated kernel export.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelColumn {
    Lambda,
    Alpha,
    K,
    Stab,
}

impl KernelColumn {
    pub const ALL: [KernelColumn; 4] = [Self::Lambda, Self::Alpha, Self::K, Self::Stab];

    fn header(self) -> &'static str {
        match self {
            Self::Lambda => "lambda",
            Self::Alpha => "alpha",
            Self::K => "k",
            Self::Stab => "stab",
        }
    }
}

/// Indices covering the windows of all three sequences.
pub fn table_range(k: &KernelSpec) -> Window {
    let w = k.window();
    Window { lo: w.lo.min(-w.hi - 1), hi: (w.hi + 1).max(-w.lo) }
}

/// CSV table `j,<columns>` over [`table_range`].
pub fn write_kernel_table<W: Write>(out: W, k: &KernelSpec, columns: &[KernelColumn]) -> Result<()> {
    let alpha = k.alpha_seq();
    let mut w = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| Error::Csv { path: PathBuf::from("<table>"), source: e };
    let mut header = vec!["j"];
    header.extend(columns.iter().map(|c| c.header()));
    w.write_record(&header).map_err(to_err)?;
    for j in table_range(k).indices() {
        let mut record = vec![j.to_string()];
        for c in columns {
            let v = match c {
                KernelColumn::Lambda => k.lambda(j),
                KernelColumn::Alpha => alpha.get(j),
                KernelColumn::K => k.k(j),
                KernelColumn::Stab => k.k(j) * pow2(2 * j),
            };
            record.push(format_float(v));
        }
        w.write_record(&record).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io("<table>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::HaarIndex;
    use crate::kernel::{gaussian, DEFAULT_WINDOW};

    #[test]
    fn grid_function_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u0.csv");
        let l = GridLayout::new(2, 3).unwrap();
        let f = 0.1 * &GridFunction::haar(l, HaarIndex::new(1, 3)).unwrap();
        write_grid_function(&path, &f).unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("u0.json")).unwrap(), "{\n  \"Jd\": 2,\n  \"Jr\": 3\n}\n");
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("cell_index,value\n0,"));
        assert_eq!(read_grid_function(&path).unwrap(), f);
    }

    #[test]
    fn grid_function_rejects_gaps() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "cell_index,value\n0,1\n2,1\n").unwrap();
        std::fs::write(sidecar_path(&path), "{\"Jd\":1,\"Jr\":0}").unwrap();
        assert!(matches!(read_grid_function(&path), Err(Error::LayoutMismatch(_))));
        let missing = dir.path().join("none.csv");
        assert!(read_grid_function(&missing).unwrap_err().is_io());
    }

    #[test]
    fn kernel_json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.json");
        let k = gaussian(1.0, DEFAULT_WINDOW).unwrap();
        write_kernel(&path, &k).unwrap();
        assert_eq!(read_kernel(&path).unwrap(), k);
        std::fs::write(&path, r#"{"j_lo": -1, "j_hi": 1, "lambda": [1.0, 0.5, 0.0]}"#).unwrap();
        let plain = read_kernel(&path).unwrap();
        assert_eq!(plain.lambda(0), 0.5);
        assert_eq!(plain.sigma(), None);
    }

    #[test]
    fn kernel_table() {
        let k = crate::kernel::step(Window::new(-2, 1).unwrap()).unwrap();
        let mut out = Vec::new();
        write_kernel_table(&mut out, &k, &KernelColumn::ALL).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("j,lambda,alpha,k,stab"));
        assert_eq!(lines.count(), 5);
    }
}
