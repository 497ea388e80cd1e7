use crate::error::{Error, Result};
use crate::matrix::{CooccurrenceMatrix, MatrixMeta};

/// Association-strength relatedness between technologies.
///
/// Values are observed over expected co-occurrence: `1` means the pair
/// co-occurs exactly as often as under independence.
#[derive(Debug, Clone, PartialEq)]
pub struct RelatednessMatrix {
    technologies: Vec<String>,
    values: Vec<f64>,
    observed: Vec<bool>,
    meta: MatrixMeta,
}

impl RelatednessMatrix {
    pub fn technologies(&self) -> &[String] {
        &self.technologies
    }

    pub fn len(&self) -> usize {
        self.technologies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.technologies.is_empty()
    }

    pub fn meta(&self) -> &MatrixMeta {
        &self.meta
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.technologies.len() + j]
    }

    /// Whether the technology occurs at least once.
    pub fn observed(&self, i: usize) -> bool {
        self.observed[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.technologies.iter().position(|t| t == label)
    }

    /// Sum of a technology's relatedness to all others.
    pub fn weighted_degree(&self, i: usize) -> f64 {
        let n = self.technologies.len();
        self.values[i * n..(i + 1) * n].iter().sum()
    }

    /// Upper-triangle entries `(i, j, φ_ij)` with `i < j`, row-major.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.technologies.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j, self.get(i, j))))
    }

    /// Builds a matrix from a dense symmetric table, for callers that carry
    /// relatedness from elsewhere. Every technology counts as observed.
    pub fn from_dense<S: AsRef<str>>(technologies: &[S], values: &[Vec<f64>]) -> Result<Self> {
        let n = technologies.len();
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(Error::LabelMismatch("relatedness table is not square".into()));
        }
        for (i, row) in values.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(Error::Config("relatedness diagonal must be zero".into()));
            }
            for (j, &v) in row.iter().enumerate() {
                if !(v.is_finite() && v >= 0.0) || v != values[j][i] {
                    return Err(Error::Config("relatedness must be symmetric and nonnegative".into()));
                }
            }
        }
        Ok(RelatednessMatrix {
            technologies: technologies.iter().map(|s| s.as_ref().to_string()).collect(),
            values: values.concat(),
            observed: vec![true; n],
            meta: MatrixMeta::default(),
        })
    }
}

/// `φ_ij = c_ij · T / (s_i · s_j)` off the diagonal, `0` on it and wherever
/// a marginal is zero.
pub fn association_strength(c: &CooccurrenceMatrix) -> Result<RelatednessMatrix> {
    if c.total() == 0 {
        return Err(Error::NoData);
    }
    let n = c.len();
    let total = c.total() as f64;
    let s = c.occurrence();
    let mut values = vec![0.0; n * n];
    for (i, j, count) in c.pairs() {
        if s[i] == 0 || s[j] == 0 {
            continue;
        }
        let phi = count as f64 * total / (s[i] as f64 * s[j] as f64);
        values[i * n + j] = phi;
        values[j * n + i] = phi;
    }
    Ok(RelatednessMatrix {
        technologies: c.technologies().to_vec(),
        values,
        observed: s.iter().map(|&x| x > 0).collect(),
        meta: c.meta().clone(),
    })
}

/// Mean relatedness over all unordered pairs of observed technologies.
/// With `positive_only`, only pairs that co-occur at least once enter.
pub fn overall_relatedness(phi: &RelatednessMatrix, positive_only: bool) -> Option<f64> {
    let present = (0..phi.len()).filter(|&i| phi.observed(i)).count();
    if present < 2 {
        return None;
    }
    let (sum, count) = phi
        .pairs()
        .filter(|&(i, j, v)| phi.observed(i) && phi.observed(j) && (!positive_only || v > 0.0))
        .fold((0.0, 0usize), |(s, n), (_, _, v)| (s + v, n + 1));
    (count > 0).then(|| sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::CooccurrenceBuilder;

    fn hand_matrix() -> CooccurrenceMatrix {
        let mut b = CooccurrenceBuilder::new();
        b.add(&["a", "b"]);
        b.add(&["a", "b"]);
        b.add(&["a", "c"]);
        b.finish("P1", "all")
    }

    #[test]
    fn hand_computation() {
        let phi = association_strength(&hand_matrix()).unwrap();
        // 2 * 6 / (3 * 2), 1 * 6 / (3 * 1)
        assert_eq!(phi.get(0, 1), 2.0);
        assert_eq!(phi.get(0, 2), 2.0);
        assert_eq!(phi.get(1, 2), 0.0);
        assert_eq!(phi.get(1, 0), 2.0);
        assert_eq!(phi.get(0, 0), 0.0);
    }

    #[test]
    fn independence_baseline_is_one() {
        // s = (4, 4, 4, 4), T = 16, expected pair count 4 * 4 / 16 = 1.
        let pairs = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j, 1)));
        let c =
            CooccurrenceMatrix::from_parts(&["a", "b", "c", "d"], vec![4; 4], pairs, MatrixMeta::default()).unwrap();
        let phi = association_strength(&c).unwrap();
        assert!(phi.pairs().all(|(_, _, v)| v == 1.0));
        assert_eq!(overall_relatedness(&phi, false), Some(1.0));
    }

    #[test]
    fn zero_marginal_pairs_are_zero() {
        let c = CooccurrenceMatrix::from_parts(&["a", "b", "c"], vec![2, 2, 0], [(0, 1, 1)], MatrixMeta::default())
            .unwrap();
        let phi = association_strength(&c).unwrap();
        assert_eq!(phi.get(0, 2), 0.0);
        assert!(!phi.observed(2));
        // Only the observed pair (a, b) enters the mean: 1 * 4 / 4.
        assert_eq!(overall_relatedness(&phi, false), Some(1.0));
    }

    #[test]
    fn empty_matrix_is_an_error() {
        let c = CooccurrenceBuilder::new().finish("P1", "all");
        assert!(matches!(association_strength(&c), Err(Error::NoData)));
    }

    #[test]
    fn overall_examples() {
        let single = RelatednessMatrix::from_dense(&["a", "b"], &[vec![0.0, 2.5], vec![2.5, 0.0]]).unwrap();
        assert_eq!(overall_relatedness(&single, false), Some(2.5));
        let three = RelatednessMatrix::from_dense(
            &["a", "b", "c"],
            &[vec![0.0, 2.0, 1.0], vec![2.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]],
        )
        .unwrap();
        assert_eq!(overall_relatedness(&three, false), Some(1.0));
        assert_eq!(overall_relatedness(&three, true), Some(1.5));
        let one = RelatednessMatrix::from_dense(&["a"], &[vec![0.0]]).unwrap();
        assert_eq!(overall_relatedness(&one, false), None);
    }

    #[test]
    fn from_dense_validates() {
        assert!(RelatednessMatrix::from_dense(&["a", "b"], &[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(RelatednessMatrix::from_dense(&["a", "b"], &[vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn weighted_degree_sums_row() {
        let phi = association_strength(&hand_matrix()).unwrap();
        assert_eq!(phi.weighted_degree(0), 4.0);
        assert_eq!(phi.weighted_degree(2), 2.0);
    }
}
