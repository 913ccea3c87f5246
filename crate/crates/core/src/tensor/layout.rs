use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One labeled tensor factor of a Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

impl Factor {
    pub fn new(label: impl Into<String>, dim: usize) -> Self {
        Factor {
            label: label.into(),
            dim,
        }
    }
}

/// Ordered tensor factorization `H = H_1 ⊗ H_2 ⊗ … ⊗ H_k`.
///
/// Linear indices follow the row-major convention: the leftmost factor is the
/// most significant digit. An empty layout is the trivial one-dimensional space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Factor>", into = "Vec<Factor>")]
pub struct SubsystemLayout {
    factors: Vec<Factor>,
    total_dim: usize,
}

impl TryFrom<Vec<Factor>> for SubsystemLayout {
    type Error = Error;
    fn try_from(factors: Vec<Factor>) -> Result<Self> {
        SubsystemLayout::from_factors(factors)
    }
}

impl From<SubsystemLayout> for Vec<Factor> {
    fn from(l: SubsystemLayout) -> Self {
        l.factors
    }
}

impl SubsystemLayout {
    pub fn from_factors(factors: Vec<Factor>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut total_dim = 1usize;
        for f in &factors {
            if f.dim == 0 {
                return Err(Error::InvalidDimension {
                    label: f.label.clone(),
                    dim: f.dim,
                });
            }
            if !seen.insert(f.label.as_str()) {
                return Err(Error::LabelCollision(f.label.clone()));
            }
            total_dim = total_dim.checked_mul(f.dim).ok_or_else(|| Error::Capacity {
                what: "layout dimension".into(),
                required: usize::MAX,
                cap: usize::MAX,
            })?;
        }
        Ok(SubsystemLayout { factors, total_dim })
    }

    /// Build from `(label, dim)` pairs.
    pub fn new<S: Into<String>>(pairs: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        Self::from_factors(pairs.into_iter().map(|(l, d)| Factor::new(l, d)).collect())
    }

    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::from_factors(vec![Factor::new(label, dim)])
    }

    pub fn trivial() -> Self {
        SubsystemLayout {
            factors: Vec::new(),
            total_dim: 1,
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn labels(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.label.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.label == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|i| self.factors[i].dim)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Product of the dims of `labels`.
    pub fn dim_of_set(&self, labels: &[&str]) -> Result<usize> {
        labels.iter().try_fold(1usize, |acc, l| Ok(acc * self.dim_of(l)?))
    }

    /// Concatenate `self` then `other`; labels must be disjoint.
    pub fn concat(&self, other: &SubsystemLayout) -> Result<Self> {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Self::from_factors(factors)
    }

    /// Sub-layout with the given labels, in the original relative order.
    pub fn select(&self, keep: &[&str]) -> Result<Self> {
        for l in keep {
            if !self.contains(l) {
                return Err(Error::UnknownLabel(l.to_string()));
            }
        }
        Ok(SubsystemLayout {
            factors: self
                .factors
                .iter()
                .filter(|f| keep.contains(&f.label.as_str()))
                .cloned()
                .collect(),
            total_dim: self
                .factors
                .iter()
                .filter(|f| keep.contains(&f.label.as_str()))
                .map(|f| f.dim)
                .product(),
        })
    }

    /// Layout reordered to `order`, which must be a permutation of the labels.
    pub fn reordered(&self, order: &[&str]) -> Result<Self> {
        let perm = self.permutation_to(order)?;
        Ok(SubsystemLayout {
            factors: perm.iter().map(|&i| self.factors[i].clone()).collect(),
            total_dim: self.total_dim,
        })
    }

    /// Positions (in `self`) of each label of `order`.
    pub fn permutation_to(&self, order: &[&str]) -> Result<Vec<usize>> {
        let describe = || format!("{:?} vs {:?}", order, self.labels());
        if order.len() != self.factors.len() {
            return Err(Error::NotPermutation(describe()));
        }
        let mut used = vec![false; self.factors.len()];
        let mut perm = Vec::with_capacity(order.len());
        for l in order {
            let i = self
                .position(l)
                .ok_or_else(|| Error::NotPermutation(describe()))?;
            if used[i] {
                return Err(Error::NotPermutation(describe()));
            }
            used[i] = true;
            perm.push(i);
        }
        Ok(perm)
    }

    /// Replace a contiguous run of factors `[start, start + count)` by one factor.
    pub fn merged(&self, start: usize, count: usize, label: impl Into<String>) -> Result<Self> {
        if count == 0 || start + count > self.factors.len() {
            return Err(Error::ShapeMismatch(format!(
                "cannot merge factors {start}..{} of a {}-factor layout",
                start + count,
                self.factors.len()
            )));
        }
        let dim = self.factors[start..start + count].iter().map(|f| f.dim).product();
        let mut factors = self.factors[..start].to_vec();
        factors.push(Factor::new(label, dim));
        factors.extend_from_slice(&self.factors[start + count..]);
        Self::from_factors(factors)
    }

    pub fn relabeled(&self, from: &str, to: &str) -> Result<Self> {
        let i = self
            .position(from)
            .ok_or_else(|| Error::UnknownLabel(from.to_string()))?;
        let mut factors = self.factors.clone();
        factors[i].label = to.to_string();
        Self::from_factors(factors)
    }

    /// Replace the factor `label` by `replacement`, keeping its position.
    pub fn replaced(&self, label: &str, replacement: Factor) -> Result<Self> {
        let i = self
            .position(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        let mut factors = self.factors.clone();
        factors[i] = replacement;
        Self::from_factors(factors)
    }

    /// Row-major digits of a linear index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (k, f) in self.factors.iter().enumerate().rev() {
            out[k] = index % f.dim;
            index /= f.dim;
        }
        out
    }

    pub fn linear_index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&d, f)| acc * f.dim + d)
    }

}

impl fmt::Display for SubsystemLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|x| format!("{}:{}", x.label, x.dim))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Composite label for the `n`-copy group of `label`.
pub fn grouped_label(label: &str, n: usize) -> String {
    format!("{label}^{n}")
}

/// Index map taking each linear index under `layout` to the linear index of the
/// same basis vector under the factor order `perm` (positions into `layout`).
pub(crate) fn permutation_index_map(layout: &SubsystemLayout, perm: &[usize]) -> Vec<usize> {
    let dims = layout.dims();
    let new_dims: Vec<usize> = perm.iter().map(|&i| dims[i]).collect();
    // stride of each old factor inside the new ordering
    let mut new_stride_of_old = vec![0usize; dims.len()];
    let mut s = 1usize;
    for (pos, &old) in perm.iter().enumerate().rev() {
        new_stride_of_old[old] = s;
        s *= new_dims[pos];
    }
    let total = layout.total_dim();
    let mut map = Vec::with_capacity(total);
    let mut digits = vec![0usize; dims.len()];
    let mut current = 0usize;
    for _ in 0..total {
        map.push(current);
        // increment the row-major odometer, updating `current` incrementally
        for k in (0..dims.len()).rev() {
            digits[k] += 1;
            current += new_stride_of_old[k];
            if digits[k] < dims[k] {
                break;
            }
            current -= new_stride_of_old[k] * dims[k];
            digits[k] = 0;
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_zero_dims() {
        assert_eq!(
            SubsystemLayout::new([("A", 2), ("A", 3)]),
            Err(Error::LabelCollision("A".into()))
        );
        assert!(matches!(
            SubsystemLayout::new([("A", 0)]),
            Err(Error::InvalidDimension { .. })
        ));
    }

    #[test]
    fn total_dim_is_product() {
        let l = SubsystemLayout::new([("A", 2), ("B", 3), ("C", 5)]).unwrap();
        assert_eq!(l.total_dim(), 30);
        assert_eq!(SubsystemLayout::trivial().total_dim(), 1);
    }

    #[test]
    fn digits_roundtrip() {
        let l = SubsystemLayout::new([("A", 2), ("B", 3), ("C", 4)]).unwrap();
        for i in 0..l.total_dim() {
            assert_eq!(l.linear_index(&l.digits(i)), i);
        }
        assert_eq!(l.digits(1 * 12 + 2 * 4 + 3), vec![1, 2, 3]);
    }

    #[test]
    fn index_map_matches_digit_shuffle() {
        let l = SubsystemLayout::new([("A", 2), ("B", 3), ("C", 4)]).unwrap();
        let perm = vec![2, 0, 1];
        let reordered = l.reordered(&["C", "A", "B"]).unwrap();
        let map = permutation_index_map(&l, &perm);
        for i in 0..l.total_dim() {
            let d = l.digits(i);
            let nd: Vec<usize> = perm.iter().map(|&p| d[p]).collect();
            assert_eq!(map[i], reordered.linear_index(&nd));
        }
    }

    #[test]
    fn merge_and_select() {
        let l = SubsystemLayout::new([("A", 2), ("B", 3), ("C", 4)]).unwrap();
        let m = l.merged(1, 2, "BC").unwrap();
        assert_eq!(m.dims(), vec![2, 12]);
        let s = l.select(&["C", "A"]).unwrap();
        assert_eq!(s.labels(), vec!["A", "C"]);
        assert_eq!(l.select(&["Z"]), Err(Error::UnknownLabel("Z".into())));
    }
}
