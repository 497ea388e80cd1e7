use serde::{Deserialize, Serialize};

use super::rca::BinaryRcaMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexityAxis {
    Entity,
    Technology,
}

/// Method-of-reflections values for one axis at one depth.
///
/// Labels follow the source matrix. Rows or columns without any
/// specialisation are excluded from the iteration and carry `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityVector {
    pub axis: ComplexityAxis,
    pub depth: usize,
    pub labels: Vec<String>,
    pub values: Vec<Option<f64>>,
    /// Excluded labels of both axes, in label order.
    pub excluded: Vec<String>,
}

impl ComplexityVector {
    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).and_then(|i| self.values[i])
    }

    pub fn max(&self) -> Option<f64> {
        self.values.iter().flatten().copied().reduce(f64::max)
    }
}

/// Runs the reflections recurrence
///
/// ```text
/// k_c,0 = Σ_t M_ct              k_t,0 = Σ_c M_ct
/// k_c,N = Σ_t M_ct k_t,N-1 / k_c,0
/// k_t,N = Σ_c M_ct k_c,N-1 / k_t,0
/// ```
///
/// and returns the requested axis at depth `steps`.
pub fn method_of_reflections(m: &BinaryRcaMatrix, axis: ComplexityAxis, steps: usize) -> Result<ComplexityVector> {
    let (ne, nt) = (m.entities().len(), m.technologies().len());
    let diversity: Vec<usize> = (0..ne).map(|e| m.row(e).iter().filter(|&&b| b).count()).collect();
    let mut ubiquity = vec![0usize; nt];
    for e in 0..ne {
        for (t, &b) in m.row(e).iter().enumerate() {
            ubiquity[t] += usize::from(b);
        }
    }
    let entities: Vec<usize> = (0..ne).filter(|&e| diversity[e] > 0).collect();
    let technologies: Vec<usize> = (0..nt).filter(|&t| ubiquity[t] > 0).collect();
    if entities.is_empty() || technologies.is_empty() {
        return Err(Error::Degenerate(
            "no specialisation left after removing empty rows and columns".into(),
        ));
    }

    // Adjacency lists over the retained rows and columns.
    let entity_techs: Vec<Vec<usize>> = entities
        .iter()
        .map(|&e| (0..nt).filter(|&t| m.get(e, t)).collect())
        .collect();
    let tech_entities: Vec<Vec<usize>> = technologies
        .iter()
        .map(|&t| (0..ne).filter(|&e| m.get(e, t)).collect())
        .collect();

    let mut kc: Vec<f64> = (0..ne).map(|e| diversity[e] as f64).collect();
    let mut kt: Vec<f64> = (0..nt).map(|t| ubiquity[t] as f64).collect();
    for _ in 0..steps {
        let mut next_c = vec![0.0; ne];
        for (&e, techs) in entities.iter().zip(&entity_techs) {
            next_c[e] = techs.iter().map(|&t| kt[t]).sum::<f64>() / diversity[e] as f64;
        }
        let mut next_t = vec![0.0; nt];
        for (&t, ents) in technologies.iter().zip(&tech_entities) {
            next_t[t] = ents.iter().map(|&e| kc[e]).sum::<f64>() / ubiquity[t] as f64;
        }
        kc = next_c;
        kt = next_t;
    }

    let excluded = (0..ne)
        .filter(|&e| diversity[e] == 0)
        .map(|e| m.entities()[e].clone())
        .chain(
            (0..nt)
                .filter(|&t| ubiquity[t] == 0)
                .map(|t| m.technologies()[t].clone()),
        )
        .collect();
    let (labels, values) = match axis {
        ComplexityAxis::Entity => (
            m.entities().to_vec(),
            (0..ne).map(|e| (diversity[e] > 0).then_some(kc[e])).collect(),
        ),
        ComplexityAxis::Technology => (
            m.technologies().to_vec(),
            (0..nt).map(|t| (ubiquity[t] > 0).then_some(kt[t])).collect(),
        ),
    };
    Ok(ComplexityVector {
        axis,
        depth: steps,
        labels,
        values,
        excluded,
    })
}

/// Entity complexity (MORc) at `steps` reflections.
pub fn country_complexity(m: &BinaryRcaMatrix, steps: usize) -> Result<ComplexityVector> {
    method_of_reflections(m, ComplexityAxis::Entity, steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<bool>]) -> BinaryRcaMatrix {
        let e: Vec<String> = (0..rows.len()).map(|i| format!("c{i}")).collect();
        let t: Vec<String> = (0..rows[0].len()).map(|i| format!("t{i}")).collect();
        BinaryRcaMatrix::from_rows(&e, &t, rows).unwrap()
    }

    fn vals(v: &ComplexityVector) -> Vec<f64> {
        v.values.iter().map(|x| x.unwrap()).collect()
    }

    #[test]
    fn hand_iteration() {
        let mat = m(&[vec![true, true], vec![false, true]]);
        let k = |axis, n| vals(&method_of_reflections(&mat, axis, n).unwrap());
        assert_eq!(k(ComplexityAxis::Entity, 0), [2.0, 1.0]);
        assert_eq!(k(ComplexityAxis::Technology, 0), [1.0, 2.0]);
        assert_eq!(k(ComplexityAxis::Entity, 1), [1.5, 2.0]);
        assert_eq!(k(ComplexityAxis::Technology, 1), [2.0, 1.5]);
        assert_eq!(k(ComplexityAxis::Technology, 2), [1.5, 1.75]);
        assert_eq!(vals(&country_complexity(&mat, 1).unwrap()), [1.5, 2.0]);
    }

    #[test]
    fn identity_is_all_ones() {
        let id: Vec<Vec<bool>> = (0..4).map(|i| (0..4).map(|j| i == j).collect()).collect();
        for n in 0..5 {
            for axis in [ComplexityAxis::Entity, ComplexityAxis::Technology] {
                assert!(vals(&method_of_reflections(&m(&id), axis, n).unwrap())
                    .iter()
                    .all(|&v| v == 1.0));
            }
        }
    }

    #[test]
    fn all_ones_is_uniform() {
        let full = m(&vec![vec![true; 5]; 3]);
        for n in 0..5 {
            let c = vals(&method_of_reflections(&full, ComplexityAxis::Entity, n).unwrap());
            let t = vals(&method_of_reflections(&full, ComplexityAxis::Technology, n).unwrap());
            assert!(c.iter().all(|&v| v == c[0]));
            assert!(t.iter().all(|&v| v == t[0]));
        }
    }

    #[test]
    fn empty_rows_and_columns_are_excluded() {
        let mat = m(&[
            vec![true, false, true],
            vec![false, false, false],
            vec![false, false, true],
        ]);
        let k = method_of_reflections(&mat, ComplexityAxis::Technology, 2).unwrap();
        assert_eq!(k.values[1], None);
        assert_eq!(k.excluded, ["c1", "t1"]);
        let c = method_of_reflections(&mat, ComplexityAxis::Entity, 1).unwrap();
        assert_eq!(c.values[1], None);
        assert_eq!(c.get("c0"), Some(1.5));
    }

    #[test]
    fn all_zero_is_degenerate() {
        let mat = m(&[vec![false, false]]);
        assert!(matches!(
            method_of_reflections(&mat, ComplexityAxis::Entity, 1),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn transpose_duality() {
        let mat = m(&[
            vec![true, true, false],
            vec![false, true, true],
            vec![true, false, false],
        ]);
        for n in 0..5 {
            assert_eq!(
                method_of_reflections(&mat, ComplexityAxis::Entity, n).unwrap().values,
                method_of_reflections(&mat.transpose(), ComplexityAxis::Technology, n)
                    .unwrap()
                    .values
            );
        }
    }
}
