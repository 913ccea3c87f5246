use nalgebra::{Complex, DMatrix};

use super::layout::{permutation_index_map, Factor, SubsystemLayout};
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = Complex { re: 0.0, im: 0.0 };
pub const ONE: C64 = Complex { re: 1.0, im: 0.0 };

/// A linear map between two labeled spaces, stored as a dense matrix.
///
/// Most operators are square with `rows == cols`; isometries such as `W: A^n → F`
/// carry distinct row and column layouts.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    rows: SubsystemLayout,
    cols: SubsystemLayout,
    entries: CMatrix,
}

impl Operator {
    /// Square operator on `layout`.
    pub fn new(layout: SubsystemLayout, entries: CMatrix) -> Result<Self> {
        Self::map(layout.clone(), layout, entries)
    }

    /// Operator from `cols` to `rows`.
    pub fn map(rows: SubsystemLayout, cols: SubsystemLayout, entries: CMatrix) -> Result<Self> {
        if entries.nrows() != rows.total_dim() || entries.ncols() != cols.total_dim() {
            return Err(Error::ShapeMismatch(format!(
                "entries are {}x{}, layouts need {}x{}",
                entries.nrows(),
                entries.ncols(),
                rows.total_dim(),
                cols.total_dim()
            )));
        }
        Ok(Operator {
            rows,
            cols,
            entries,
        })
    }

    pub fn identity(layout: SubsystemLayout) -> Self {
        let d = layout.total_dim();
        Operator {
            rows: layout.clone(),
            cols: layout,
            entries: CMatrix::identity(d, d),
        }
    }

    pub fn zeros(layout: SubsystemLayout) -> Self {
        let d = layout.total_dim();
        Operator {
            rows: layout.clone(),
            cols: layout,
            entries: CMatrix::zeros(d, d),
        }
    }

    pub fn from_real_diagonal(layout: SubsystemLayout, diag: &[f64]) -> Result<Self> {
        let d = layout.total_dim();
        if diag.len() != d {
            return Err(Error::ShapeMismatch(format!(
                "diagonal of length {} for dimension {d}",
                diag.len()
            )));
        }
        let mut m = CMatrix::zeros(d, d);
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        Ok(Operator {
            rows: layout.clone(),
            cols: layout,
            entries: m,
        })
    }

    /// Rank-one operator |u⟩⟨v|.
    pub fn outer(layout: SubsystemLayout, u: &[C64], v: &[C64]) -> Result<Self> {
        let d = layout.total_dim();
        if u.len() != d || v.len() != d {
            return Err(Error::ShapeMismatch("outer product vector length".into()));
        }
        let m = CMatrix::from_fn(d, d, |i, j| u[i] * v[j].conj());
        Self::new(layout, m)
    }

    /// The row layout; for square operators this is "the" layout.
    pub fn layout(&self) -> &SubsystemLayout {
        &self.rows
    }

    pub fn row_layout(&self) -> &SubsystemLayout {
        &self.rows
    }

    pub fn col_layout(&self) -> &SubsystemLayout {
        &self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn dagger(&self) -> Operator {
        Operator {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            entries: self.entries.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn scale(&self, s: f64) -> Operator {
        Operator {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: &self.entries * C64::new(s, 0.0),
        }
    }

    fn check_same_shape(&self, other: &Operator, what: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{what}: [{}]x[{}] vs [{}]x[{}]",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_same_shape(other, "add")?;
        Ok(Operator {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same_shape(other, "sub")?;
        Ok(Operator {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: &self.entries - &other.entries,
        })
    }

    /// Operator composition `self ∘ other`.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "compose: input [{}] vs output [{}]",
                self.cols, other.rows
            )));
        }
        Ok(Operator {
            rows: self.rows.clone(),
            cols: other.cols.clone(),
            entries: &self.entries * &other.entries,
        })
    }

    /// Largest entrywise modulus of `self - other` (layouts must agree in shape).
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }

    /// max |A_ij - conj(A_ji)|.
    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.entries)
    }

    /// Relabel one factor (both row and column layouts for square operators).
    pub fn relabeled(&self, from: &str, to: &str) -> Result<Operator> {
        let rows = if self.rows.contains(from) {
            self.rows.relabeled(from, to)?
        } else {
            self.rows.clone()
        };
        let cols = if self.cols.contains(from) {
            self.cols.relabeled(from, to)?
        } else {
            self.cols.clone()
        };
        if !self.rows.contains(from) && !self.cols.contains(from) {
            return Err(Error::UnknownLabel(from.to_string()));
        }
        Ok(Operator {
            rows,
            cols,
            entries: self.entries.clone(),
        })
    }

    /// Reinterpret with new layouts of identical total dimensions.
    pub fn with_layouts(self, rows: SubsystemLayout, cols: SubsystemLayout) -> Result<Operator> {
        Operator::map(rows, cols, self.entries)
    }

    /// Merge a contiguous run of factors (in both layouts of a square operator).
    pub fn merged(&self, start: usize, count: usize, label: &str) -> Result<Operator> {
        require_square(self, "merge")?;
        let l = self.rows.merged(start, count, label)?;
        Ok(Operator {
            rows: l.clone(),
            cols: l,
            entries: self.entries.clone(),
        })
    }
}

pub(crate) fn require_square(op: &Operator, what: &str) -> Result<()> {
    if !op.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "{what} needs a square operator, got [{}]x[{}]",
            op.rows, op.cols
        )));
    }
    Ok(())
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub(crate) fn hermiticity_deviation(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Tensor product `a ⊗ b`; the result layout is `a`'s factors followed by `b`'s.
pub fn kron(a: &Operator, b: &Operator) -> Result<Operator> {
    let rows = a.rows.concat(&b.rows)?;
    let cols = a.cols.concat(&b.cols)?;
    Ok(Operator {
        rows,
        cols,
        entries: a.entries.kronecker(&b.entries),
    })
}

/// Trace out every factor not listed in `keep`.
pub fn partial_trace(op: &Operator, keep: &[&str]) -> Result<Operator> {
    require_square(op, "partial_trace")?;
    let layout = op.layout();
    for l in keep {
        if !layout.contains(l) {
            return Err(Error::UnknownLabel(l.to_string()));
        }
    }
    let kept = layout.select(keep)?;
    let k_dim = kept.total_dim();
    let t_dim = layout.total_dim() / k_dim;
    if t_dim == 1 {
        return Ok(op.clone());
    }
    let groups = kept_traced_indices(layout, keep);
    let d = layout.total_dim();
    let data = op.entries.as_slice();
    let mut out = CMatrix::zeros(k_dim, k_dim);
    for t in 0..t_dim {
        let block = &groups[t * k_dim..(t + 1) * k_dim];
        for (b, &cb) in block.iter().enumerate() {
            let col = &data[cb * d..(cb + 1) * d];
            let mut out_col = out.column_mut(b);
            for (a, &ra) in block.iter().enumerate() {
                out_col[a] += col[ra];
            }
        }
    }
    Operator::new(kept, out)
}

/// `groups[t * K + k]` is the full linear index of (kept index k, traced index t).
pub(crate) fn kept_traced_indices(layout: &SubsystemLayout, keep: &[&str]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..layout.len())
        .filter(|&i| keep.contains(&layout.factors()[i].label.as_str()))
        .collect();
    let k_dim: usize = perm.iter().map(|&i| layout.factors()[i].dim).product();
    perm.extend((0..layout.len()).filter(|&i| !keep.contains(&layout.factors()[i].label.as_str())));
    let t_dim = layout.total_dim() / k_dim;
    let map = permutation_index_map(layout, &perm);
    let mut groups = vec![0usize; layout.total_dim()];
    for (full, &m) in map.iter().enumerate() {
        let (k, t) = (m / t_dim, m % t_dim);
        groups[t * k_dim + k] = full;
    }
    groups
}

/// Reorder the factors of a square operator to `new_order`.
///
/// This is a pure index relabeling: entries are moved, never recomputed, so
/// applying the inverse order restores the original bit for bit.
pub fn permute_subsystems(op: &Operator, new_order: &[&str]) -> Result<Operator> {
    require_square(op, "permute_subsystems")?;
    let perm = op.rows.permutation_to(new_order)?;
    let new_layout = op.rows.reordered(new_order)?;
    let map = permutation_index_map(&op.rows, &perm);
    let d = op.dim();
    let mut out = CMatrix::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            out[(map[i], map[j])] = op.entries[(i, j)];
        }
    }
    Operator::new(new_layout, out)
}

/// `x σ x†`; `x` may be rectangular, mapping `σ`'s layout to another one.
pub fn conjugate_apply(x: &Operator, sigma: &Operator) -> Result<Operator> {
    require_square(sigma, "conjugate_apply")?;
    if x.cols != sigma.rows {
        return Err(Error::ShapeMismatch(format!(
            "conjugate_apply: map input [{}] vs state [{}]",
            x.cols, sigma.rows
        )));
    }
    let entries = &x.entries * &sigma.entries * x.entries.adjoint();
    Operator::new(x.rows.clone(), entries)
}

/// Locate `labels` as a contiguous, ordered run of factors.
pub(crate) fn contiguous_run(layout: &SubsystemLayout, labels: &[&str]) -> Result<usize> {
    let start = layout
        .position(labels.first().ok_or_else(|| Error::ShapeMismatch("empty label run".into()))?)
        .ok_or_else(|| Error::UnknownLabel(labels[0].to_string()))?;
    for (k, l) in labels.iter().enumerate() {
        match layout.position(l) {
            Some(p) if p == start + k => {}
            Some(_) => {
                return Err(Error::ShapeMismatch(format!(
                    "labels {labels:?} are not a contiguous ordered run of [{layout}]"
                )))
            }
            None => return Err(Error::UnknownLabel(l.to_string())),
        }
    }
    Ok(start)
}

/// `(x ⊗ 1) m` where `x` acts on the middle index of rows split as
/// `(left, mid_in, right)`.
pub(crate) fn left_mul_block(
    m: &CMatrix,
    left: usize,
    mid_in: usize,
    right: usize,
    x: &CMatrix,
) -> CMatrix {
    debug_assert_eq!(m.nrows(), left * mid_in * right);
    debug_assert_eq!(x.ncols(), mid_in);
    let mid_out = x.nrows();
    let rows_in = m.nrows();
    let rows_out = left * mid_out * right;
    let cols = m.ncols();
    let mut out = CMatrix::zeros(rows_out, cols);
    let src = m.as_slice();
    let dst = out.as_mut_slice();
    for c in 0..cols {
        let col_in = &src[c * rows_in..(c + 1) * rows_in];
        let col_out = &mut dst[c * rows_out..(c + 1) * rows_out];
        for l in 0..left {
            let bin = &col_in[l * mid_in * right..(l + 1) * mid_in * right];
            let bout = &mut col_out[l * mid_out * right..(l + 1) * mid_out * right];
            for k in 0..mid_in {
                let row_in = &bin[k * right..(k + 1) * right];
                if row_in.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                    continue;
                }
                for i in 0..mid_out {
                    let xik = x[(i, k)];
                    if xik.re == 0.0 && xik.im == 0.0 {
                        continue;
                    }
                    let row_out = &mut bout[i * right..(i + 1) * right];
                    for (o, v) in row_out.iter_mut().zip(row_in) {
                        *o += xik * v;
                    }
                }
            }
        }
    }
    out
}

/// Output layout and block split for applying `x` to the run `labels` of `layout`.
fn local_geometry(
    layout: &SubsystemLayout,
    labels: &[&str],
    x: &Operator,
) -> Result<(SubsystemLayout, usize, usize, usize)> {
    let start = contiguous_run(layout, labels)?;
    let run = SubsystemLayout::from_factors(layout.factors()[start..start + labels.len()].to_vec())?;
    if run != x.cols {
        return Err(Error::ShapeMismatch(format!(
            "local map expects [{}], found [{}]",
            x.cols, run
        )));
    }
    let left: usize = layout.factors()[..start].iter().map(|f| f.dim).product();
    let right: usize = layout.factors()[start + labels.len()..]
        .iter()
        .map(|f| f.dim)
        .product();
    let mut factors: Vec<Factor> = layout.factors()[..start].to_vec();
    factors.extend(x.rows.factors().iter().cloned());
    factors.extend_from_slice(&layout.factors()[start + labels.len()..]);
    Ok((SubsystemLayout::from_factors(factors)?, left, run.total_dim(), right))
}

/// `(x ⊗ 1) σ (x ⊗ 1)†` with `x` acting on the contiguous factors `labels`.
///
/// Costs `O(dim(x) · D²)` rather than the `O(D³)` of a dense conjugation.
pub fn conjugate_local(sigma: &Operator, labels: &[&str], x: &Operator) -> Result<Operator> {
    require_square(sigma, "conjugate_local")?;
    let (out_layout, left, mid, right) = local_geometry(sigma.layout(), labels, x)?;
    let once = left_mul_block(&sigma.entries, left, mid, right, &x.entries);
    let twice = left_mul_block(&once.adjoint(), left, mid, right, &x.entries);
    Operator::new(out_layout, twice.adjoint())
}

/// `(x ⊗ 1) |v⟩` for a vector over `layout`; returns the new layout and vector.
pub(crate) fn apply_local_vector(
    layout: &SubsystemLayout,
    v: &[C64],
    labels: &[&str],
    x: &Operator,
) -> Result<(SubsystemLayout, Vec<C64>)> {
    let (out_layout, left, mid, right) = local_geometry(layout, labels, x)?;
    let m = CMatrix::from_column_slice(v.len(), 1, v);
    let out = left_mul_block(&m, left, mid, right, &x.entries);
    Ok((out_layout, out.as_slice().to_vec()))
}
