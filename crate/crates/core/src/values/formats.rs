//! Storage-format correctness and data-form classification.

use serde::{Deserialize, Serialize};

use crate::config::DataForm;
use crate::series::{Cell, Dataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureFormat {
    pub feature: String,
    /// Correct data format: no violations among non-missing cells.
    pub cdf: bool,
    pub violations: usize,
    /// Every cell missing, so `cdf` holds vacuously.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormatCheck {
    pub features: Vec<FeatureFormat>,
    pub pcdf: f64,
}

pub fn check_formats(ds: &Dataset) -> FormatCheck {
    let features: Vec<FeatureFormat> = ds
        .features
        .iter()
        .map(|f| {
            let violations = ds.violations_for(&f.schema.name).count();
            FeatureFormat {
                feature: f.schema.name.clone(),
                cdf: violations == 0,
                violations,
                degenerate: violations == 0 && f.series.present_count() == 0,
            }
        })
        .collect();
    let good = features.iter().filter(|f| f.cdf).count();
    let pcdf = if features.is_empty() {
        1.0
    } else {
        good as f64 / features.len() as f64
    };
    FormatCheck { features, pcdf }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormDistribution {
    pub psd: f64,
    pub pud: f64,
    pub pssd: f64,
}

impl FormDistribution {
    pub const ALL_STRUCTURED: FormDistribution = FormDistribution {
        psd: 1.0,
        pud: 0.0,
        pssd: 0.0,
    };

    pub fn of_form(form: DataForm) -> Self {
        match form {
            DataForm::Structured => Self::ALL_STRUCTURED,
            DataForm::Unstructured => FormDistribution {
                psd: 0.0,
                pud: 1.0,
                pssd: 0.0,
            },
            DataForm::SemiStructured => FormDistribution {
                psd: 0.0,
                pud: 0.0,
                pssd: 1.0,
            },
        }
    }

    /// Distribution from data volumes per form.
    pub fn from_volumes(structured: usize, unstructured: usize, semi: usize) -> Self {
        let total = structured + unstructured + semi;
        if total == 0 {
            return Self::ALL_STRUCTURED;
        }
        let t = total as f64;
        let pud = unstructured as f64 / t;
        let pssd = semi as f64 / t;
        FormDistribution {
            psd: 1.0 - pud - pssd,
            pud,
            pssd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellForm {
    Structured,
    Payload,
    FreeText,
}

/// Nested key-value (JSON object or array) or markup payload.
pub fn is_payload(text: &str) -> bool {
    let t = text.trim();
    if (t.starts_with('{') && t.ends_with('}')) || (t.starts_with('[') && t.ends_with(']')) {
        return serde_json::from_str::<serde_json::Value>(t).is_ok_and(|v| !v.is_number());
    }
    t.starts_with('<') && t.ends_with('>') && (t.contains("</") || t.ends_with("/>"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureForm {
    pub feature: String,
    pub declared: DataForm,
    pub form: DataForm,
    pub payload_cells: usize,
    pub free_text_cells: usize,
    pub observed_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormClassification {
    pub features: Vec<FeatureForm>,
    pub distribution: FormDistribution,
}

/// Share of observed cells above which a feature's form is overridden.
pub const FORM_MAJORITY: f64 = 0.5;

/// Assigns each feature a data form and weighs forms by cell volume.
///
/// A feature keeps its declared form unless more than half of its observed
/// cells are payloads (semi-structured) or free text that failed its declared
/// format (unstructured).
pub fn classify_forms(ds: &Dataset) -> FormClassification {
    let mut volumes = [0usize; 3];
    let features = ds
        .features
        .iter()
        .map(|f| {
            let mut payload = 0;
            let mut free = 0;
            let mut observed = 0;
            for cell in &f.series.values {
                if let Cell::Cat(t) = cell {
                    observed += 1;
                    if is_payload(t) {
                        payload += 1;
                    }
                } else if let Cell::Num(_) = cell {
                    observed += 1;
                }
            }
            for v in ds.violations_for(&f.schema.name) {
                observed += 1;
                if is_payload(&v.text) {
                    payload += 1;
                } else {
                    free += 1;
                }
            }
            let form = if payload as f64 > FORM_MAJORITY * observed as f64 {
                DataForm::SemiStructured
            } else if free as f64 > FORM_MAJORITY * observed as f64 {
                DataForm::Unstructured
            } else {
                f.schema.expected_form
            };
            let slot = match form {
                DataForm::Structured => 0,
                DataForm::Unstructured => 1,
                DataForm::SemiStructured => 2,
            };
            volumes[slot] += f.series.len();
            FeatureForm {
                feature: f.schema.name.clone(),
                declared: f.schema.expected_form,
                form,
                payload_cells: payload,
                free_text_cells: free,
                observed_cells: observed,
            }
        })
        .collect();
    FormClassification {
        features,
        distribution: FormDistribution::from_volumes(volumes[0], volumes[1], volumes[2]),
    }
}
