//! The JSON barcode document.

use anyhow::{bail, Result};
use bgph_core::{Bar, Barcode, Bigrade, Grade};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const VERSION: &str = "bgph-barcode/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grading {
    Degree,
    Bigraded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<isize>,
    /// `[-i, 2j]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bidegree: Option<[i64; 2]>,
    pub birth: f64,
    /// `None` for an infinite bar.
    pub death: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub input_sha256: String,
    pub input_format: String,
    pub points: usize,
    pub mode: String,
    pub field: u32,
    pub max_vertices: usize,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarcodeDocument {
    pub version: String,
    pub grading: Grading,
    pub grid: Vec<f64>,
    pub bars: Vec<BarRecord>,
    pub provenance: Provenance,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl BarcodeDocument {
    pub fn new(grading: Grading, grid: Vec<f64>, barcode: &Barcode, provenance: Provenance) -> Self {
        let bars = barcode
            .bars()
            .iter()
            .map(|b| {
                let (degree, bidegree) = match b.grade {
                    Grade::Degree(p) => (Some(p), None),
                    Grade::Bigrade(g) => {
                        let (a, c) = g.display();
                        (None, Some([a, c]))
                    }
                };
                BarRecord {
                    degree,
                    bidegree,
                    birth: b.birth,
                    death: b.death.is_finite().then_some(b.death),
                }
            })
            .collect();
        BarcodeDocument {
            version: VERSION.to_string(),
            grading,
            grid,
            bars,
            provenance,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: BarcodeDocument = serde_json::from_str(text)?;
        if doc.version != VERSION {
            bail!("unsupported document version {:?}", doc.version);
        }
        doc.barcode()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    /// The bars as a core barcode, checking each record against the grading.
    pub fn barcode(&self) -> Result<Barcode> {
        let mut bars = Vec::with_capacity(self.bars.len());
        for (k, r) in self.bars.iter().enumerate() {
            let grade = match (self.grading, r.degree, r.bidegree) {
                (Grading::Degree, Some(p), None) => Grade::Degree(p),
                (Grading::Bigraded, None, Some([a, b])) => Grade::Bigrade(Bigrade::from_display(a, b)?),
                _ => bail!("bar {k} does not match the {:?} grading", self.grading),
            };
            let death = r.death.unwrap_or(f64::INFINITY);
            if !(r.birth < death) {
                bail!("bar {k} has birth {} not before death {}", r.birth, death);
            }
            bars.push(Bar::new(grade, r.birth, death));
        }
        Ok(Barcode::new(bars))
    }
}
