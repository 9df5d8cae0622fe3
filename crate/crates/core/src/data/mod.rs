//! Labelled data sets and their preparation.

mod folds;
mod idx;
mod manifest;
mod mnist;
mod tabular;

use std::path::{Path, PathBuf};

pub use folds::{make_folds, FoldPlan};
pub use idx::{read_idx_images, read_idx_labels, IdxImages};
pub use manifest::{digest_path, sha256_hex, Manifest, ManifestEntry, MANIFEST_FILE};
pub use mnist::{max_pool_2x2, prepare_mnist, MNIST_PER_CLASS};
pub use tabular::{load_sonar, parse_csv_rows, prepare_iris, CsvTable};

use crate::error::{Error, Result};

/// Environment variable that overrides the data directory.
pub const DATA_DIR_ENV: &str = "QSVM_DATA_DIR";

/// Binary classification data: `N` rows of `d` features with ±1 labels.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmDataset {
    name: String,
    provenance: String,
    d: usize,
    x: Vec<f64>,
    y: Vec<i8>,
}

impl SvmDataset {
    pub fn new(
        name: impl Into<String>,
        rows: Vec<Vec<f64>>,
        y: Vec<i8>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::invalid(format!(
                "row {i} has {} features, expected {d}",
                r.len()
            )));
        }
        let x = rows.into_iter().flatten().collect();
        Self::from_flat(name, d, x, y, provenance)
    }

    /// Row-major feature matrix with `d` columns.
    pub fn from_flat(
        name: impl Into<String>,
        d: usize,
        x: Vec<f64>,
        y: Vec<i8>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("data set has no features"));
        }
        if x.len() != d * y.len() {
            return Err(Error::DimensionMismatch {
                expected: d * y.len(),
                actual: x.len(),
            });
        }
        if y.len() < 2 {
            return Err(Error::invalid("need at least two data points"));
        }
        if let Some(i) = y.iter().position(|&l| l != 1 && l != -1) {
            return Err(Error::invalid(format!("label {i} is {}, expected ±1", y[i])));
        }
        if !(y.contains(&1) && y.contains(&-1)) {
            return Err(Error::invalid("both classes must be present"));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "feature ({}, {}) is not finite",
                i / d,
                i % d
            )));
        }
        Ok(Self {
            name: name.into(),
            provenance: provenance.into(),
            d,
            x,
            y,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.x.chunks_exact(self.d)
    }

    pub fn labels(&self) -> &[i8] {
        &self.y
    }

    pub fn label(&self, i: usize) -> f64 {
        f64::from(self.y[i])
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.y.iter().filter(|&&l| l == 1).count();
        (pos, self.y.len() - pos)
    }

    /// Linear-kernel Gram matrix `K_ij = ⟨xⁱ, xʲ⟩`, row-major `N×N`.
    pub fn gram(&self) -> Vec<f64> {
        let n = self.n();
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = dot(self.row(i), self.row(j));
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        k
    }

    /// The rows at `indices`, in that order. Fails if the selection loses a
    /// class.
    pub fn subset(&self, indices: &[usize], tag: &str) -> Result<Self> {
        let mut x = Vec::with_capacity(indices.len() * self.d);
        let mut y = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n() {
                return Err(Error::IndexOutOfRange { index: i, len: self.n() });
            }
            x.extend_from_slice(self.row(i));
            y.push(self.y[i]);
        }
        Self::from_flat(
            self.name.clone(),
            self.d,
            x,
            y,
            format!("{}; {tag}", self.provenance),
        )
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Data directory: `$QSVM_DATA_DIR` if set, otherwise `data/` in the
/// workspace.
pub fn default_data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

/// Names accepted by [`load_dataset`].
pub const DATASET_NAMES: [&str; 3] = ["iris", "sonar", "mnist"];

/// Loads and prepares one of the benchmark data sets from `dir`, verifying
/// checksums listed in the manifest. MNIST uses the full training files when
/// they have been fetched and the vendored 4/7 subset otherwise.
pub fn load_dataset(name: &str, dir: &Path) -> Result<SvmDataset> {
    let manifest = Manifest::load(dir)?;
    let read = |rel: &str| -> Result<Vec<u8>> {
        let path = dir.join(rel);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        manifest.verify(dir, rel, &bytes)?;
        Ok(bytes)
    };
    match name {
        "iris" => {
            let table = parse_csv_rows(std::str::from_utf8(&read("iris.data")?).map_err(|e| {
                Error::invalid(format!("iris.data is not UTF-8: {e}"))
            })?)?;
            prepare_iris(&table)
        }
        "sonar" => {
            let text = String::from_utf8(read("sonar.all-data")?)
                .map_err(|e| Error::invalid(format!("sonar.all-data is not UTF-8: {e}")))?;
            load_sonar(&parse_csv_rows(&text)?)
        }
        "mnist" => {
            let full = dir.join("mnist/train-images-idx3-ubyte").exists()
                && dir.join("mnist/train-labels-idx1-ubyte").exists();
            let (img, lab, source) = if full {
                ("mnist/train-images-idx3-ubyte", "mnist/train-labels-idx1-ubyte", "full training set")
            } else {
                (
                    "mnist/subset-images-idx3-ubyte",
                    "mnist/subset-labels-idx1-ubyte",
                    "vendored 4/7 subset",
                )
            };
            let images = read_idx_images(&read(img)?)?;
            let labels = read_idx_labels(&read(lab)?)?;
            let mut ds = prepare_mnist(&images, &labels)?;
            ds.provenance = format!("{}; source: {source}", ds.provenance);
            Ok(ds)
        }
        other => Err(Error::invalid(format!(
            "unknown data set `{other}` (expected one of {})",
            DATASET_NAMES.join(", ")
        ))),
    }
}
