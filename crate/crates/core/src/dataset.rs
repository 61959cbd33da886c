//! Multi-product defect datasets with binary and defect-count label views.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default for [`validate_dataset`]: products with fewer defective instances are flagged.
pub const DEFAULT_MIN_DEFECTIVE: usize = 5;

/// One code entity (typically a class).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub name: String,
    pub features: Vec<f64>,
    pub size_loc: u64,
    pub defect_count: u64,
}

impl InstanceRecord {
    pub fn is_defective(&self) -> bool {
        self.defect_count > 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMode {
    Binary,
    DefectCounts,
}

impl LabelMode {
    pub fn as_str(self) -> &'static str {
        match self {
            LabelMode::Binary => "binary",
            LabelMode::DefectCounts => "defect_counts",
        }
    }

    pub fn other(self) -> LabelMode {
        match self {
            LabelMode::Binary => LabelMode::DefectCounts,
            LabelMode::DefectCounts => LabelMode::Binary,
        }
    }
}

/// Weight an instance contributes to tp/fn and to found-defect totals.
pub fn defect_weight(instance: &InstanceRecord, mode: LabelMode) -> f64 {
    match mode {
        LabelMode::Binary => {
            if instance.is_defective() {
                1.0
            } else {
                0.0
            }
        }
        LabelMode::DefectCounts => instance.defect_count as f64,
    }
}

/// One release of a project.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Product {
    product_id: String,
    project_id: String,
    instances: Vec<InstanceRecord>,
}

impl Product {
    /// Fails on an empty instance list or duplicate instance names.
    pub fn new(
        product_id: impl Into<String>,
        project_id: impl Into<String>,
        instances: Vec<InstanceRecord>,
    ) -> Result<Self> {
        let product_id = product_id.into();
        if instances.is_empty() {
            return Err(Error::Dataset(format!("product `{product_id}` has no instances")));
        }
        let mut seen = BTreeSet::new();
        for inst in &instances {
            if !seen.insert(inst.name.as_str()) {
                return Err(Error::Dataset(format!(
                    "product `{product_id}` has duplicate instance `{}`",
                    inst.name
                )));
            }
        }
        Ok(Self {
            product_id,
            project_id: project_id.into(),
            instances,
        })
    }

    pub fn product_id(&self) -> &str {
        &self.product_id
    }

    pub fn project_id(&self) -> &str {
        &self.project_id
    }

    pub fn instances(&self) -> &[InstanceRecord] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn defective_count(&self) -> usize {
        self.instances.iter().filter(|i| i.is_defective()).count()
    }

    pub fn total_loc(&self) -> u64 {
        self.instances.iter().map(|i| i.size_loc).sum()
    }

    pub fn total_defect_weight(&self, mode: LabelMode) -> f64 {
        self.instances.iter().map(|i| defect_weight(i, mode)).sum()
    }

    /// The product with labels removed. Data treatments and learners only ever
    /// see targets through this view.
    pub fn unlabeled(&self) -> TargetView {
        TargetView {
            product_id: self.product_id.clone(),
            names: self.instances.iter().map(|i| i.name.clone()).collect(),
            features: self.instances.iter().map(|i| i.features.clone()).collect(),
            sizes: self.instances.iter().map(|i| i.size_loc).collect(),
        }
    }
}

/// Label-stripped view of a target product: feature values and sizes only.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetView {
    pub product_id: String,
    pub names: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub sizes: Vec<u64>,
}

impl TargetView {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    name: String,
    feature_schema: Vec<String>,
    products: Vec<Product>,
}

impl Dataset {
    /// Checks that every instance matches the schema length and product ids are unique.
    pub fn new(name: impl Into<String>, feature_schema: Vec<String>, products: Vec<Product>) -> Result<Self> {
        let name = name.into();
        let mut ids = BTreeSet::new();
        for p in &products {
            if !ids.insert(p.product_id.as_str()) {
                return Err(Error::Dataset(format!(
                    "dataset `{name}` has duplicate product id `{}`",
                    p.product_id
                )));
            }
            for inst in &p.instances {
                if inst.features.len() != feature_schema.len() {
                    return Err(Error::Dataset(format!(
                        "instance `{}` of product `{}` has {} features, schema has {}",
                        inst.name,
                        p.product_id,
                        inst.features.len(),
                        feature_schema.len()
                    )));
                }
            }
        }
        Ok(Self {
            name,
            feature_schema,
            products,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn feature_schema(&self) -> &[String] {
        &self.feature_schema
    }

    pub fn products(&self) -> &[Product] {
        &self.products
    }

    pub fn product(&self, product_id: &str) -> Option<&Product> {
        self.products.iter().find(|p| p.product_id == product_id)
    }

    pub fn instance_count(&self) -> usize {
        self.products.iter().map(Product::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    TooFewDefective {
        product_id: String,
        defective: usize,
        required: usize,
    },
    ZeroSizeInstances {
        product_id: String,
        count: usize,
    },
}

/// Reports products unusable for analysis. An empty list means the dataset
/// can be used as-is.
///
/// Zero-size instances are also reported; metrics treat them as free to review.
pub fn validate_dataset(ds: &Dataset, min_defective: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    for p in ds.products() {
        let defective = p.defective_count();
        if defective < min_defective {
            out.push(Violation::TooFewDefective {
                product_id: p.product_id.clone(),
                defective,
                required: min_defective,
            });
        }
        let zero = p.instances.iter().filter(|i| i.size_loc == 0).count();
        if zero > 0 {
            out.push(Violation::ZeroSizeInstances {
                product_id: p.product_id.clone(),
                count: zero,
            });
        }
    }
    out
}
