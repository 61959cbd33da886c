//! Dataset files: a JSON manifest naming the feature schema and one CSV per product.
//!
//! ```json
//! {"name": "aeeem", "features": ["wmc", "cbo"],
//!  "products": [{"product_id": "eclipse", "project_id": "eclipse", "csv_path": "eclipse.csv"}]}
//! ```
//!
//! Each CSV has the header `name,<features...>,loc,defects`. Relative CSV
//! paths are resolved against the manifest's directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use costbench_core::dataset::{Dataset, InstanceRecord, Product};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::LoadError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub name: String,
    pub features: Vec<String>,
    pub products: Vec<ProductEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntry {
    pub product_id: String,
    pub project_id: String,
    pub csv_path: PathBuf,
}

/// SHA-256 digests of every file a dataset was read from, keyed by the path
/// as written in the manifest (the manifest itself is keyed `manifest`).
pub type Checksums = BTreeMap<String, String>;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn read(path: &Path) -> Result<Vec<u8>, LoadError> {
    fs::read(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_dataset(manifest_path: &Path) -> Result<Dataset, LoadError> {
    load_dataset_with_checksums(manifest_path).map(|(ds, _)| ds)
}

pub fn load_dataset_with_checksums(manifest_path: &Path) -> Result<(Dataset, Checksums), LoadError> {
    let bytes = read(manifest_path)?;
    let manifest: DatasetManifest = serde_json::from_slice(&bytes).map_err(|e| LoadError::Manifest {
        path: manifest_path.to_path_buf(),
        msg: e.to_string(),
    })?;
    let mut checksums = Checksums::new();
    checksums.insert("manifest".into(), sha256_hex(&bytes));

    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut products = Vec::with_capacity(manifest.products.len());
    for entry in &manifest.products {
        let path = base.join(&entry.csv_path);
        let bytes = read(&path)?;
        checksums.insert(entry.csv_path.display().to_string(), sha256_hex(&bytes));
        let instances = parse_product_csv(&path, &bytes, &manifest.features)?;
        products.push(Product::new(&entry.product_id, &entry.project_id, instances)?);
    }
    log::info!(
        "loaded dataset `{}`: {} products, {} instances",
        manifest.name,
        products.len(),
        products.iter().map(Product::len).sum::<usize>()
    );
    Ok((Dataset::new(manifest.name, manifest.features, products)?, checksums))
}

fn expected_header(features: &[String]) -> Vec<String> {
    std::iter::once("name".to_string())
        .chain(features.iter().cloned())
        .chain(["loc".to_string(), "defects".to_string()])
        .collect()
}

fn parse_product_csv(path: &Path, bytes: &[u8], features: &[String]) -> Result<Vec<InstanceRecord>, LoadError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(bytes);
    let row_err = |row: u64, msg: String| LoadError::Row {
        path: path.to_path_buf(),
        row,
        msg,
    };
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| row_err(1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let expected = expected_header(features);
    if header != expected {
        return Err(LoadError::Header {
            path: path.to_path_buf(),
            expected,
            found: header,
        });
    }

    let k = features.len();
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| row_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let row = record.position().map_or(0, |p| p.line());
        if record.len() != k + 3 {
            return Err(row_err(
                row,
                format!("expected {} columns, found {}", k + 3, record.len()),
            ));
        }
        let mut values = Vec::with_capacity(k);
        for (j, cell) in record.iter().skip(1).take(k).enumerate() {
            match cell.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(row_err(
                        row,
                        format!("feature `{}` is not a finite number: `{cell}`", features[j]),
                    ))
                }
            }
        }
        let count = |col: usize, what: &str| -> Result<u64, LoadError> {
            let cell = record[col].trim();
            match cell.parse::<i128>() {
                Ok(v) if v < 0 => Err(row_err(row, format!("negative {what}: {v}"))),
                Ok(v) => u64::try_from(v).map_err(|_| row_err(row, format!("{what} out of range: {v}"))),
                Err(_) => Err(row_err(row, format!("{what} is not an integer: `{cell}`"))),
            }
        };
        out.push(InstanceRecord {
            name: record[0].to_string(),
            features: values,
            size_loc: count(k + 1, "size")?,
            defect_count: count(k + 2, "defect count")?,
        });
    }
    Ok(out)
}

/// Writes `ds` as `manifest.json` plus `<product_id>.csv` files into `dir`.
pub fn write_dataset(ds: &Dataset, dir: &Path) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut entries = Vec::new();
    for p in ds.products() {
        let file = PathBuf::from(format!("{}.csv", p.product_id()));
        let mut w = csv::Writer::from_path(dir.join(&file))?;
        w.write_record(expected_header(ds.feature_schema()))?;
        for inst in p.instances() {
            let mut row = vec![inst.name.clone()];
            row.extend(inst.features.iter().map(f64::to_string));
            row.push(inst.size_loc.to_string());
            row.push(inst.defect_count.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        entries.push(ProductEntry {
            product_id: p.product_id().to_string(),
            project_id: p.project_id().to_string(),
            csv_path: file,
        });
    }
    let manifest = DatasetManifest {
        name: ds.name().to_string(),
        features: ds.feature_schema().to_vec(),
        products: entries,
    };
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_vec_pretty(&manifest)?)?;
    Ok(path)
}
