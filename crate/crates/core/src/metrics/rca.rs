use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{MatrixMeta, OccurrenceMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    Raw,
    Log10,
}

/// Balassa index per (entity, technology). `None` marks cells whose entity
/// or technology total is zero, or, after a log transform, a zero index.
#[derive(Debug, Clone, PartialEq)]
pub struct RcaMatrix {
    entities: Vec<String>,
    technologies: Vec<String>,
    values: Vec<Option<f64>>,
    transform: Transform,
    meta: MatrixMeta,
}

impl RcaMatrix {
    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn technologies(&self) -> &[String] {
        &self.technologies
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    pub fn meta(&self) -> &MatrixMeta {
        &self.meta
    }

    pub fn get(&self, entity: usize, technology: usize) -> Option<f64> {
        self.values[entity * self.technologies.len() + technology]
    }

    pub fn row(&self, entity: usize) -> &[Option<f64>] {
        let n = self.technologies.len();
        &self.values[entity * n..(entity + 1) * n]
    }

    pub fn entity_index(&self, label: &str) -> Option<usize> {
        self.entities.iter().position(|e| e == label)
    }
}

/// Revealed comparative advantage:
/// `RCA_ct = (X_ct / X_c·) / (X_·t / X_··)`.
pub fn rca(x: &OccurrenceMatrix) -> Result<RcaMatrix> {
    let total = x.total();
    if total <= 0.0 {
        return Err(Error::NoData);
    }
    let (rows, cols) = (x.row_sums(), x.col_sums());
    let n = x.technologies().len();
    let mut values = vec![None; x.entities().len() * n];
    for (e, &row_sum) in rows.iter().enumerate() {
        if row_sum <= 0.0 {
            continue;
        }
        let out = &mut values[e * n..(e + 1) * n];
        for (t, &col_sum) in cols.iter().enumerate() {
            if col_sum > 0.0 {
                out[t] = Some(0.0);
            }
        }
        for &(t, v) in x.row(e) {
            // One rounding step over exact products keeps integer cases exact.
            out[t as usize] = Some(v * total / (row_sum * cols[t as usize]));
        }
    }
    Ok(RcaMatrix {
        entities: x.entities().to_vec(),
        technologies: x.technologies().to_vec(),
        values,
        transform: Transform::Raw,
        meta: x.meta().clone(),
    })
}

/// `log10` of every positive index; zeros and missing cells become missing.
pub fn log10_rca(r: &RcaMatrix) -> RcaMatrix {
    let values = match r.transform {
        Transform::Log10 => r.values.clone(),
        Transform::Raw => r
            .values
            .iter()
            .map(|v| v.filter(|&x| x > 0.0).map(f64::log10))
            .collect(),
    };
    RcaMatrix {
        values,
        transform: Transform::Log10,
        ..r.clone()
    }
}

/// Specialisation indicator `M_ct ∈ {0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryRcaMatrix {
    entities: Vec<String>,
    technologies: Vec<String>,
    values: Vec<bool>,
}

impl BinaryRcaMatrix {
    pub fn from_rows<S: AsRef<str>>(entities: &[S], technologies: &[S], rows: &[Vec<bool>]) -> Result<Self> {
        if rows.len() != entities.len() || rows.iter().any(|r| r.len() != technologies.len()) {
            return Err(Error::LabelMismatch("binary rows do not match label counts".into()));
        }
        Ok(BinaryRcaMatrix {
            entities: entities.iter().map(|s| s.as_ref().to_string()).collect(),
            technologies: technologies.iter().map(|s| s.as_ref().to_string()).collect(),
            values: rows.concat(),
        })
    }

    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn technologies(&self) -> &[String] {
        &self.technologies
    }

    pub fn get(&self, entity: usize, technology: usize) -> bool {
        self.values[entity * self.technologies.len() + technology]
    }

    pub fn row(&self, entity: usize) -> &[bool] {
        let n = self.technologies.len();
        &self.values[entity * n..(entity + 1) * n]
    }

    pub fn entity_index(&self, label: &str) -> Option<usize> {
        self.entities.iter().position(|e| e == label)
    }

    /// Technologies the entity is specialised in.
    pub fn specialised(&self, entity: &str) -> BTreeSet<String> {
        match self.entity_index(entity) {
            Some(e) => self
                .row(e)
                .iter()
                .zip(&self.technologies)
                .filter(|(&m, _)| m)
                .map(|(_, t)| t.clone())
                .collect(),
            None => BTreeSet::new(),
        }
    }

    pub fn transpose(&self) -> BinaryRcaMatrix {
        let (ne, nt) = (self.entities.len(), self.technologies.len());
        let mut values = vec![false; ne * nt];
        for e in 0..ne {
            for t in 0..nt {
                values[t * ne + e] = self.get(e, t);
            }
        }
        BinaryRcaMatrix {
            entities: self.technologies.clone(),
            technologies: self.entities.clone(),
            values,
        }
    }
}

/// `M_ct = 1` iff the raw index is at least `threshold`; missing cells are 0.
/// A log-transformed input is compared against `log10(threshold)`.
pub fn binarize(r: &RcaMatrix, threshold: f64) -> BinaryRcaMatrix {
    let cut = match r.transform {
        Transform::Raw => threshold,
        Transform::Log10 => threshold.log10(),
    };
    BinaryRcaMatrix {
        entities: r.entities.clone(),
        technologies: r.technologies.clone(),
        values: r.values.iter().map(|v| v.is_some_and(|x| x >= cut)).collect(),
    }
}
