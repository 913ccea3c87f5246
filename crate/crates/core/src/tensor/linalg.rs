//! Spectral routines on Hermitian and general complex matrices.
//!
//! The Hermitian eigensolver comes from `nalgebra`. Singular value
//! decompositions use one-sided Jacobi rotations, which keep full accuracy on
//! the highly degenerate spectra of n-copy states where the bidiagonal solver
//! can stall far above machine precision.

use nalgebra::SymmetricEigen;

use super::operator::{hermiticity_deviation, require_square, CMatrix, Operator, C64};
use crate::error::{Error, Result};

/// Maximum |A - A†| entry accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues below `SUPPORT_CUTOFF × λ_max` count as exactly zero.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Max `|U U† − 1|` entry accepted as unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// Most negative eigenvalue (relative to max(1, λ_max)) accepted as PSD.
pub const PSD_TOL: f64 = 1e-10;

fn symmetrized(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub(crate) fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(symmetrized(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = symmetrized(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `V diag(f) V†`.
pub(crate) fn reconstruct(vectors: &CMatrix, values: &[f64]) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, &f) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(f);
    }
    scaled * vectors.adjoint()
}

/// Spectral decomposition of a Hermitian operator.
///
/// Returns ascending eigenvalues and the unitary whose columns are the
/// corresponding eigenvectors.
pub fn eig_hermitian(op: &Operator) -> Result<(Vec<f64>, Operator)> {
    require_square(op, "eig_hermitian")?;
    let deviation = op.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let (values, vectors) = eigh(op.entries());
    Ok((values, Operator::new(op.layout().clone(), vectors)?))
}

fn check_psd(values: &[f64]) -> Result<f64> {
    let max = values.last().copied().unwrap_or(0.0).max(0.0);
    if let Some(&min) = values.first() {
        if min < -PSD_TOL * max.max(1.0) {
            return Err(Error::NotPositive { eigenvalue: min });
        }
    }
    Ok(max)
}

/// `M^p` for PSD `M` on a raw matrix; eigenvalues under the support cutoff are
/// zero (p > 0), excluded (p < 0, pseudo-inverse), and give the support
/// projector for p = 0.
pub(crate) fn psd_power(m: &CMatrix, p: f64) -> Result<CMatrix> {
    let (values, vectors) = eigh(m);
    let max = check_psd(&values)?;
    let cut = SUPPORT_CUTOFF * max;
    let mapped: Vec<f64> = values
        .iter()
        .map(|&l| if l <= cut || l <= 0.0 { 0.0 } else { l.powf(p) })
        .collect();
    Ok(reconstruct(&vectors, &mapped))
}

pub fn matrix_power_psd(op: &Operator, p: f64) -> Result<Operator> {
    require_square(op, "matrix_power_psd")?;
    let deviation = op.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Operator::new(op.layout().clone(), psd_power(op.entries(), p)?)
}

/// Numerical rank: eigenvalues above the support cutoff.
pub(crate) fn support_rank(values: &[f64]) -> usize {
    let max = values.iter().copied().fold(0.0, f64::max);
    values.iter().filter(|&&l| l > SUPPORT_CUTOFF * max && l > 0.0).count()
}

/// Thin singular value decomposition `m = u diag(s) v†`, `s` descending.
///
/// `u` is `rows × r` and `v` is `cols × r` with `r = min(rows, cols)`. Columns of
/// `u` belonging to zero singular values are zero.
#[derive(Debug, Clone)]
pub(crate) struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD.
pub(crate) fn svd(m: &CMatrix) -> Svd {
    if m.nrows() < m.ncols() {
        let t = svd(&m.adjoint());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = CMatrix::identity(cols, cols);
    let tol = f64::EPSILON * (rows as f64).sqrt();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // rotate a_p against e^{-iφ} a_q, whose overlap with a_p is real
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let xp = mat[(i, p)];
                        let xq = mat[(i, q)] * phase.conj();
                        mat[(i, p)] = xp * c - xq * sn;
                        mat[(i, q)] = (xp * sn + xq * c) * phase;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let u = CMatrix::from_fn(rows, cols, |i, k| {
        let j = order[k];
        if norms[j] > 0.0 {
            a[(i, j)] / norms[j]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let v = CMatrix::from_fn(cols, cols, |i, k| v[(i, order[k])]);
    Svd { u, s, v }
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns `q` inside `C^{q.nrows()}`.
pub(crate) fn orthogonal_complement(q: &CMatrix) -> CMatrix {
    let d = q.nrows();
    let proj = CMatrix::identity(d, d) - q * q.adjoint();
    let (values, vectors) = eigh(&proj);
    let keep: Vec<usize> = (0..d).filter(|&i| values[i] > 0.5).collect();
    CMatrix::from_fn(d, keep.len(), |i, j| vectors[(i, keep[j])])
}

/// Singular values, descending (no Hermitian assumption).
pub fn singular_values(op: &Operator) -> Vec<f64> {
    svd(op.entries()).s
}

/// Trace norm ‖X‖₁, the sum of singular values.
///
/// Hermitian inputs go through the eigenvalue route (|λ| summed); anything else
/// through a singular value decomposition.
pub fn trace_norm(op: &Operator) -> f64 {
    trace_norm_matrix(op.entries())
}

pub(crate) fn trace_norm_matrix(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    if m.is_square() && hermiticity_deviation(m) <= HERMITIAN_TOL * scale {
        eigvalsh(m).iter().map(|l| l.abs()).sum()
    } else {
        svd(m).s.iter().sum()
    }
}

/// ‖P P† − N N†‖₁ without forming the (possibly huge) row-space operator.
///
/// When the row dimension exceeds the combined column count, a thin QR of
/// `[P | N] = Q R` reduces the problem to the spectrum of `R J R†` with
/// `J = diag(1, …, 1, −1, …, −1)`.
pub fn trace_norm_gram_difference(pos: &CMatrix, neg: &CMatrix) -> Result<f64> {
    if pos.nrows() != neg.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "gram difference rows {} vs {}",
            pos.nrows(),
            neg.nrows()
        )));
    }
    let rows = pos.nrows();
    let (kp, kn) = (pos.ncols(), neg.ncols());
    if rows <= kp + kn {
        let d = pos * pos.adjoint() - neg * neg.adjoint();
        return Ok(eigvalsh(&d).iter().map(|l| l.abs()).sum());
    }
    let mut y = CMatrix::zeros(rows, kp + kn);
    y.columns_mut(0, kp).copy_from(pos);
    y.columns_mut(kp, kn).copy_from(neg);
    let r = y.qr().r();
    let mut rj = r.clone();
    for j in kp..kp + kn {
        rj.column_mut(j).neg_mut();
    }
    let core = rj * r.adjoint();
    Ok(eigvalsh(&core).iter().map(|l| l.abs()).sum())
}

/// ‖ |u⟩⟨u| − |v⟩⟨v| ‖₁ for vectors of arbitrary norm, from their Gram matrix.
///
/// Uses `(a + b)² − 4|⟨u,v⟩|² = (a − b)² + 4a‖v − (⟨u,v⟩/a) u‖²` so nearly equal
/// vectors do not lose half their digits to cancellation.
pub fn pure_pair_trace_norm(u: &[C64], v: &[C64]) -> f64 {
    let a: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    let b: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if a == 0.0 {
        return b;
    }
    let o: C64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
    let c = o / a;
    let resid: f64 = u.iter().zip(v).map(|(x, y)| (y - c * x).norm_sqr()).sum();
    ((a - b).powi(2) + 4.0 * a * resid).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_normal, seeded_rng};
    use crate::tensor::layout::SubsystemLayout;
    use crate::tensor::operator::{max_abs_diff, ONE, ZERO};

    fn random_matrix(r: usize, c: usize, seed: u64) -> CMatrix {
        let mut rng = seeded_rng(seed);
        CMatrix::from_fn(r, c, |_, _| complex_normal(&mut rng))
    }

    fn random_hermitian(d: usize, seed: u64) -> CMatrix {
        let g = random_matrix(d, d, seed);
        (&g + g.adjoint()) * C64::new(0.5, 0.0)
    }

    fn random_psd(d: usize, seed: u64) -> CMatrix {
        let g = random_matrix(d, d, seed);
        &g * g.adjoint()
    }

    fn op(m: CMatrix) -> Operator {
        let d = m.nrows();
        Operator::new(SubsystemLayout::single("A", d).unwrap(), m).unwrap()
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&op(CMatrix::zeros(3, 3))), 0.0);
        let d = Operator::from_real_diagonal(SubsystemLayout::single("A", 2).unwrap(), &[0.5, -0.5]).unwrap();
        assert!((trace_norm(&d) - 1.0).abs() < 1e-15);
    }

    fn svd_residual(m: &CMatrix) -> (f64, f64) {
        let d = svd(m);
        let sigma = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d.s.len(), d.s.iter().map(|&x| C64::new(x, 0.0))));
        let rec = &d.u * sigma * d.v.adjoint();
        let r = max_abs_diff(&rec, m);
        let vv = max_abs_diff(&(d.v.adjoint() * &d.v), &CMatrix::identity(d.v.ncols(), d.v.ncols()));
        (r, vv)
    }

    #[test]
    fn jacobi_svd_reconstructs_rectangular_inputs() {
        for (r, c, seed) in [(5, 3, 1), (3, 5, 2), (6, 6, 3), (1, 4, 4)] {
            let m = random_matrix(r, c, seed);
            let (res, vv) = svd_residual(&m);
            assert!(res < 1e-13 && vv < 1e-13, "{r}x{c}: {res} {vv}");
            let d = svd(&m);
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn jacobi_svd_on_degenerate_kronecker_power() {
        // a unitary times the third tensor power of a Hermitian matrix
        let h = random_hermitian(4, 7);
        let p = &h * h.adjoint();
        let k2 = p.kronecker(&p);
        let k3 = k2.kronecker(&p);
        let q = random_matrix(64, 64, 8).qr().q();
        let m = q * k3;
        let (res, vv) = svd_residual(&m);
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(res < 1e-13 * scale, "{res}");
        assert!(vv < 1e-12);
    }

    #[test]
    fn eigh_on_degenerate_kronecker_power() {
        let h = random_hermitian(8, 11);
        let p = &h * h.adjoint();
        let k3 = p.kronecker(&p).kronecker(&p);
        let d = k3.nrows();
        let (values, vectors) = eigh(&k3);
        let scale = k3.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(max_abs_diff(&reconstruct(&vectors, &values), &k3) < 1e-12 * scale);
        assert!(max_abs_diff(&(vectors.adjoint() * &vectors), &CMatrix::identity(d, d)) < 1e-12);
    }

    #[test]
    fn complement_is_orthogonal() {
        let q = random_matrix(6, 2, 9).qr().q();
        let c = orthogonal_complement(&q);
        assert_eq!(c.ncols(), 4);
        assert!(max_abs_diff(&(q.adjoint() * &c), &CMatrix::zeros(2, 4)) < 1e-12);
        assert!(max_abs_diff(&(c.adjoint() * &c), &CMatrix::identity(4, 4)) < 1e-12);
    }

    #[test]
    fn trace_norm_hermitian_matches_svd_path() {
        for seed in 0..10 {
            let a = random_psd(6, seed);
            let b = random_psd(6, seed + 100);
            let a = &a / a.trace();
            let b = &b / b.trace();
            let diff = op(&a - &b);
            let via_eig = trace_norm(&diff);
            let via_svd: f64 = singular_values(&diff).iter().sum();
            assert!((via_eig - via_svd).abs() < 1e-10);
        }
    }

    #[test]
    fn eig_examples() {
        let l = SubsystemLayout::single("A", 2).unwrap();
        let (v, _) = eig_hermitian(&Operator::from_real_diagonal(l.clone(), &[0.75, 0.25]).unwrap()).unwrap();
        assert!((v[0] - 0.25).abs() < 1e-15 && (v[1] - 0.75).abs() < 1e-15);
        let x = Operator::new(l.clone(), CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])).unwrap();
        let (v, _) = eig_hermitian(&x).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
        let nh = Operator::new(l, CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])).unwrap();
        assert!(matches!(eig_hermitian(&nh), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_reconstruction_residual() {
        for seed in 0..5 {
            let h = op(random_hermitian(12, seed));
            let (values, vecs) = eig_hermitian(&h).unwrap();
            assert!(values.windows(2).all(|w| w[0] <= w[1]));
            let rec = reconstruct(vecs.entries(), &values);
            assert!(max_abs_diff(&rec, h.entries()) < 1e-10);
            let u = vecs.entries();
            let id = CMatrix::identity(12, 12);
            assert!(max_abs_diff(&(u.adjoint() * u), &id) < 1e-10);
        }
    }

    #[test]
    fn psd_power_examples() {
        let l = SubsystemLayout::single("A", 2).unwrap();
        let id = Operator::identity(l.clone());
        for p in [-1.5, 0.0, 0.3, 2.0] {
            assert!(matrix_power_psd(&id, p).unwrap().max_abs_diff(&id) < 1e-14);
        }
        let d = Operator::from_real_diagonal(l.clone(), &[4.0, 9.0]).unwrap();
        let half = matrix_power_psd(&d, 0.5).unwrap();
        assert!(half.max_abs_diff(&Operator::from_real_diagonal(l.clone(), &[2.0, 3.0]).unwrap()) < 1e-14);
        let neg = Operator::from_real_diagonal(l, &[1.0, -0.1]).unwrap();
        assert!(matches!(matrix_power_psd(&neg, 0.5), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn psd_square_matches_direct_product() {
        for seed in 0..5 {
            let m = random_psd(7, seed);
            let sq = psd_power(&m, 2.0).unwrap();
            let direct = &m * &m;
            let scale = direct.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(max_abs_diff(&sq, &direct) < 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn negative_power_is_pseudo_inverse_on_support() {
        let l = SubsystemLayout::single("A", 3).unwrap();
        let d = Operator::from_real_diagonal(l.clone(), &[0.5, 0.0, 0.25]).unwrap();
        let inv = matrix_power_psd(&d, -1.0).unwrap();
        let expect = Operator::from_real_diagonal(l, &[2.0, 0.0, 4.0]).unwrap();
        assert!(inv.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn gram_difference_matches_direct() {
        for (rows, kp, kn) in [(40, 3, 5), (6, 4, 4), (30, 1, 0), (25, 0, 2)] {
            let p = random_matrix(rows, kp, rows as u64 + 1);
            let n = random_matrix(rows, kn, rows as u64 + 2);
            let direct = trace_norm_matrix(&(&p * p.adjoint() - &n * n.adjoint()));
            let fast = trace_norm_gram_difference(&p, &n).unwrap();
            assert!((direct - fast).abs() < 1e-9 * direct.max(1.0), "{rows} {kp} {kn}: {direct} vs {fast}");
        }
    }

    #[test]
    fn pure_pair_matches_dense() {
        let mut rng = seeded_rng(11);
        for _ in 0..5 {
            let u: Vec<C64> = (0..5).map(|_| complex_normal(&mut rng)).collect();
            let v: Vec<C64> = (0..5).map(|_| complex_normal(&mut rng) * 0.3).collect();
            let uu = CMatrix::from_fn(5, 5, |i, j| u[i] * u[j].conj());
            let vv = CMatrix::from_fn(5, 5, |i, j| v[i] * v[j].conj());
            let dense = trace_norm_matrix(&(uu - vv));
            assert!((dense - pure_pair_trace_norm(&u, &v)).abs() < 1e-10);
        }
    }
}
