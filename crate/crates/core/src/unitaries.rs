//! Haar unitaries, Heisenberg–Weyl sets, partial isometries and the Uhlmann
//! alignment unitary.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::{complex_normal, seeded_rng, SeededRng};
use crate::states::PureState;
use crate::tensor::linalg::{orthogonal_complement, svd};
use crate::tensor::operator::{max_abs_diff, ZERO};
use crate::tensor::{conjugate_local, CMatrix, Operator, SubsystemLayout, C64, UNITARY_TOL};

/// Haar-random `dim × dim` unitary from an explicit generator.
///
/// QR of a complex Ginibre matrix, with the columns of `Q` rephased by
/// `R_ii / |R_ii|` so the distribution is exactly Haar.
pub fn haar_matrix_with(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let n = d.norm();
        let phase = if n > 0.0 { d / n } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_matrix(dim: usize, seed: u64) -> CMatrix {
    haar_matrix_with(dim, &mut seeded_rng(seed))
}

/// Haar-random unitary on `layout`, deterministic per seed.
pub fn haar_unitary(layout: SubsystemLayout, seed: u64) -> Operator {
    let d = layout.total_dim();
    Operator::new(layout, haar_matrix(d, seed)).expect("square by construction")
}

/// Largest `|U U† − 1|` entry.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    max_abs_diff(&(u * u.adjoint()), &CMatrix::identity(n, n))
}

/// The `d²` clock-and-shift unitaries `V_(a,b) = X^a Z^b`, row-major in `(a, b)`.
///
/// `X|k⟩ = |k+1 mod d⟩`, `Z|k⟩ = ω^k |k⟩` with `ω = e^{2πi/d}`, so
/// `V_(a,b)|k⟩ = ω^{bk} |k+a⟩`. Members are stored as their index pairs and
/// applied as monomial matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct HWSet {
    d: usize,
    /// `ω^j` for `j < d`.
    roots: Vec<C64>,
}

/// The Heisenberg–Weyl set on dimension `d ≥ 1`; `d = 1` is the single
/// trivial operator.
pub fn heisenberg_weyl(d: usize) -> Result<HWSet> {
    if d == 0 {
        return Err(Error::InvalidParameter("Heisenberg-Weyl dimension must be at least 1".into()));
    }
    let roots = (0..d)
        .map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / d as f64))
        .collect();
    Ok(HWSet { d, roots })
}

impl HWSet {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.d * self.d
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `(a, b)` of member `i`.
    pub fn shift(&self, i: usize) -> (usize, usize) {
        (i / self.d, i % self.d)
    }

    /// Dense matrix of member `i`.
    pub fn matrix(&self, i: usize) -> CMatrix {
        let (a, b) = self.shift(i);
        let d = self.d;
        let mut m = CMatrix::zeros(d, d);
        for k in 0..d {
            m[((k + a) % d, k)] = self.roots[(b * k) % d];
        }
        m
    }

    pub fn operator(&self, layout: SubsystemLayout, i: usize) -> Result<Operator> {
        if layout.total_dim() != self.d {
            return Err(Error::ShapeMismatch(format!(
                "Heisenberg-Weyl operator of dimension {} on [{layout}]",
                self.d
            )));
        }
        Operator::new(layout, self.matrix(i))
    }

    pub fn matrices(&self) -> Vec<CMatrix> {
        (0..self.len()).map(|i| self.matrix(i)).collect()
    }
}

/// `(1/M) Σ_{i<M} (V_i ⊗ 1) σ (V_i ⊗ 1)†` over the first `M` members, acting on
/// the first factor of `sigma`.
pub fn twirl(hw: &HWSet, m: usize, sigma: &Operator) -> Result<Operator> {
    if m == 0 || m > hw.len() {
        return Err(Error::InvalidParameter(format!(
            "twirl size {m} outside 1..={}",
            hw.len()
        )));
    }
    let first = sigma.layout().factors().first().map(|f| f.dim);
    if first != Some(hw.d) || !sigma.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "twirl of dimension {} on [{}]",
            hw.d,
            sigma.layout()
        )));
    }
    let d = hw.d;
    let rest = sigma.dim() / d;
    let src = sigma.entries();
    let mut out = CMatrix::zeros(sigma.dim(), sigma.dim());
    let w = 1.0 / m as f64;
    for i in 0..m {
        let (a, b) = hw.shift(i);
        for kc in 0..d {
            let oc = (kc + a) % d;
            for kr in 0..d {
                let orow = (kr + a) % d;
                // ω^{b(kr − kc)}
                let phase = hw.roots[(b * (kr + d - kc)) % d] * w;
                for rc in 0..rest {
                    let sc = kc * rest + rc;
                    let dc = oc * rest + rc;
                    for rr in 0..rest {
                        out[(orow * rest + rr, dc)] += phase * src[(kr * rest + rr, sc)];
                    }
                }
            }
        }
    }
    Operator::new(sigma.layout().clone(), out)
}

/// A full-rank partial isometry `w : source → target`, `w w† = 1_target`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialIsometry {
    w: Operator,
}

impl PartialIsometry {
    pub fn new(w: Operator) -> Result<Self> {
        let (f, a) = (w.row_layout().total_dim(), w.col_layout().total_dim());
        if f > a {
            return Err(Error::InvalidParameter(format!(
                "partial isometry target dimension {f} exceeds source dimension {a}"
            )));
        }
        let dev = max_abs_diff(&(w.entries() * w.entries().adjoint()), &CMatrix::identity(f, f));
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(PartialIsometry { w })
    }

    /// First `dim(target)` rows of a seeded Haar unitary on `source`.
    pub fn haar(source: SubsystemLayout, target: SubsystemLayout, seed: u64) -> Result<Self> {
        let (a, f) = (source.total_dim(), target.total_dim());
        if f > a {
            return Err(Error::InvalidParameter(format!(
                "partial isometry target dimension {f} exceeds source dimension {a}"
            )));
        }
        let u = haar_matrix(a, seed);
        let w = u.rows(0, f).into_owned();
        Ok(PartialIsometry {
            w: Operator::map(target, source, w)?,
        })
    }

    /// Projection onto the first `dim(target)` basis vectors of `source`.
    pub fn canonical(source: SubsystemLayout, target: SubsystemLayout) -> Result<Self> {
        let (a, f) = (source.total_dim(), target.total_dim());
        if f > a {
            return Err(Error::InvalidParameter(format!(
                "partial isometry target dimension {f} exceeds source dimension {a}"
            )));
        }
        let w = CMatrix::from_fn(f, a, |i, j| if i == j { C64::new(1.0, 0.0) } else { ZERO });
        Ok(PartialIsometry {
            w: Operator::map(target, source, w)?,
        })
    }

    pub fn operator(&self) -> &Operator {
        &self.w
    }

    pub fn matrix(&self) -> &CMatrix {
        self.w.entries()
    }

    pub fn source(&self) -> &SubsystemLayout {
        self.w.col_layout()
    }

    pub fn target(&self) -> &SubsystemLayout {
        self.w.row_layout()
    }

    /// `w† w`, the rank-`dim(target)` projector on the source.
    pub fn projector(&self) -> Operator {
        let p = self.w.entries().adjoint() * self.w.entries();
        Operator::new(self.source().clone(), p).expect("square")
    }

    /// `w u` for a unitary `u` on the source: again a partial isometry.
    pub fn after(&self, u: &Operator) -> Result<Self> {
        if u.row_layout() != self.source() || u.col_layout() != self.source() {
            return Err(Error::ShapeMismatch(format!(
                "partial isometry on [{}] after operator on [{}]",
                self.source(),
                u.row_layout()
            )));
        }
        Ok(PartialIsometry {
            w: self.w.compose(u)?,
        })
    }
}

/// Convenience constructor matching [`PartialIsometry::haar`].
pub fn make_partial_isometry(source: SubsystemLayout, target: SubsystemLayout, seed: u64) -> Result<PartialIsometry> {
    PartialIsometry::haar(source, target, seed)
}

/// `T_W(σ) = (dim source / dim target) · (w ⊗ 1) σ (w ⊗ 1)†`, with `w` acting on
/// the source factors of `sigma` (a contiguous run).
pub fn apply_t_w(iso: &PartialIsometry, sigma: &Operator) -> Result<Operator> {
    let labels = iso.source().labels();
    let c = iso.source().total_dim() as f64 / iso.target().total_dim() as f64;
    Ok(conjugate_local(sigma, &labels, &iso.w)?.scale(c))
}

/// `w† v w + (1 − w† w)`, the unitary on the source acting as `v` on the range
/// of `w†` and trivially on its complement.
///
/// The defining relation `V w† = w† v` is checked before returning.
pub fn embed_unitary(iso: &PartialIsometry, v_f: &Operator) -> Result<Operator> {
    if v_f.row_layout() != iso.target() || v_f.col_layout() != iso.target() {
        return Err(Error::ShapeMismatch(format!(
            "embedding operator on [{}] through an isometry onto [{}]",
            v_f.row_layout(),
            iso.target()
        )));
    }
    let dev = unitarity_deviation(v_f.entries());
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let w = iso.matrix();
    let a = w.ncols();
    let wd = w.adjoint();
    let proj = &wd * w;
    let v = &wd * v_f.entries() * w + CMatrix::identity(a, a) - proj;
    let check = max_abs_diff(&(&v * &wd), &(&wd * v_f.entries()));
    if check > UNITARY_TOL {
        return Err(Error::InvalidParameter(format!(
            "embedded unitary violates V w† = w† v by {check:.3e}"
        )));
    }
    Operator::new(iso.source().clone(), v)
}

/// Multiply by a global phase so the largest-magnitude entry (first in
/// row-major order among ties within 1e-12) is real and positive.
fn fix_global_phase(v: &mut CMatrix) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let (rows, cols) = v.shape();
    let pivot = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .find(|&(i, j)| v[(i, j)].norm() >= max - 1e-12)
        .expect("max entry exists");
    let z = v[pivot];
    let phase = z.conj() / z.norm();
    *v *= phase;
}

/// Unitary `V` on `act_on` maximizing `|⟨target| (V ⊗ 1) |source⟩|`.
///
/// With both states reshaped as `act_on × rest` matrices `M_t`, `M_s`, `V` is
/// the polar factor of `M_t M_s†`. The achieved overlap equals its nuclear
/// norm. When `M_t M_s†` is rank deficient, the complement of its column space
/// is reached from the complement of its row space through the polar factor of
/// their overlap, so coinciding complements are mapped by the identity.
pub fn uhlmann_unitary(target: &PureState, source: &PureState, act_on: &[&str]) -> Result<Operator> {
    if target.layout() != source.layout() {
        return Err(Error::ShapeMismatch(format!(
            "Uhlmann alignment between [{}] and [{}]",
            target.layout(),
            source.layout()
        )));
    }
    let (kept, mt) = target.split_matrix(act_on)?;
    let (_, ms) = source.split_matrix(act_on)?;
    let y = &mt * ms.adjoint();
    let k = y.nrows();
    let dec = svd(&y);
    let top = dec.s.first().copied().unwrap_or(0.0);
    let cut = 1e-12 * top.max(1e-300);
    let rank = dec.s.iter().filter(|&&s| s > cut).count();
    let p = dec.u.columns(0, rank);
    let q = dec.v.columns(0, rank);
    let mut v = p * q.adjoint();
    if rank < k {
        // complements of the column and row spaces, matched by the polar factor
        // of their overlap
        let pc = orthogonal_complement(&p.into_owned());
        let qc = orthogonal_complement(&q.into_owned());
        let c = svd(&(pc.adjoint() * &qc));
        v += pc * (c.u * c.v.adjoint()) * qc.adjoint();
    }
    fix_global_phase(&mut v);
    Operator::new(kept, v)
}

/// `|⟨target| (v ⊗ 1) |source⟩|` with `v` on `act_on`.
pub fn aligned_overlap(target: &PureState, source: &PureState, act_on: &[&str], v: &Operator) -> Result<f64> {
    let (kept, mt) = target.split_matrix(act_on)?;
    let (_, ms) = source.split_matrix(act_on)?;
    if v.row_layout() != &kept || v.col_layout() != &kept {
        return Err(Error::ShapeMismatch(format!(
            "alignment unitary on [{}], expected [{kept}]",
            v.row_layout()
        )));
    }
    // ⟨t|(V ⊗ 1)|s⟩ = Tr[M_t† V M_s]
    Ok((mt.adjoint() * v.entries() * ms).trace().norm())
}

/// Nuclear norm of `M_t M_s†`, the optimal alignment overlap.
pub fn optimal_overlap(target: &PureState, source: &PureState, act_on: &[&str]) -> Result<f64> {
    let (_, mt) = target.split_matrix(act_on)?;
    let (_, ms) = source.split_matrix(act_on)?;
    Ok(svd(&(mt * ms.adjoint())).s.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{maximally_mixed, random_density, random_pure};
    use crate::tensor::{kron, partial_trace, pure_pair_trace_norm};
    use proptest::prelude::*;

    fn lay(p: &[(&str, usize)]) -> SubsystemLayout {
        SubsystemLayout::new(p.iter().map(|&(l, d)| (l, d))).unwrap()
    }

    #[test]
    fn haar_is_unitary_and_seeded() {
        for d in [1, 2, 5, 16] {
            let u = haar_matrix(d, 7);
            assert!(unitarity_deviation(&u) < 1e-10);
            assert!(max_abs_diff(&(u.adjoint() * &u), &CMatrix::identity(d, d)) < 1e-10);
            assert_eq!(u, haar_matrix(d, 7));
        }
        assert!((haar_matrix(1, 3)[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert_ne!(haar_matrix(3, 1), haar_matrix(3, 2));
    }

    #[test]
    fn haar_first_moment() {
        let n = 2000;
        let mean: f64 = (0..n).map(|s| haar_matrix(2, s)[(0, 0)].norm_sqr()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.05, "mean {mean}");
        // phases of the (0,0) entry are uniform: E[U_00^2] = 0
        let m2: C64 = (0..n).map(|s| haar_matrix(2, s)[(0, 0)].powi(2)).sum::<C64>() / n as f64;
        assert!(m2.norm() < 0.05);
    }

    #[test]
    fn qubit_hw_order() {
        let hw = heisenberg_weyl(2).unwrap();
        let m = hw.matrices();
        let c = |r: f64| C64::new(r, 0.0);
        let i = CMatrix::identity(2, 2);
        let z = CMatrix::from_row_slice(2, 2, &[c(1.0), ZERO, ZERO, c(-1.0)]);
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, c(1.0), c(1.0), ZERO]);
        assert!(max_abs_diff(&m[0], &i) < 1e-15);
        assert!(max_abs_diff(&m[1], &z) < 1e-15);
        assert!(max_abs_diff(&m[2], &x) < 1e-15);
        assert!(max_abs_diff(&m[3], &(&x * &z)) < 1e-15);
    }

    #[test]
    fn hw_orthogonal_basis() {
        for d in [1, 2, 3, 4] {
            let m = heisenberg_weyl(d).unwrap().matrices();
            assert_eq!(m.len(), d * d);
            for (i, a) in m.iter().enumerate() {
                assert!(unitarity_deviation(a) < 1e-12);
                for (j, b) in m.iter().enumerate() {
                    let t = (a.adjoint() * b).trace();
                    let expect = if i == j { d as f64 } else { 0.0 };
                    assert!((t - C64::new(expect, 0.0)).norm() < 1e-12, "d {d} ({i},{j})");
                }
            }
        }
        assert!(heisenberg_weyl(0).is_err());
    }

    fn dense_twirl(hw: &HWSet, m: usize, sigma: &Operator) -> CMatrix {
        let rest = sigma.dim() / hw.dim();
        let mut acc = CMatrix::zeros(sigma.dim(), sigma.dim());
        for i in 0..m {
            let v = hw.matrix(i).kronecker(&CMatrix::identity(rest, rest));
            acc += &v * sigma.entries() * v.adjoint();
        }
        acc / C64::new(m as f64, 0.0)
    }

    #[test]
    fn twirl_matches_dense_sum() {
        let hw = heisenberg_weyl(3).unwrap();
        let sigma = random_density(lay(&[("F", 3), ("B", 2)]), 4, 5).unwrap();
        for m in [1, 2, 5, 9] {
            let t = twirl(&hw, m, sigma.op()).unwrap();
            assert!(max_abs_diff(t.entries(), &dense_twirl(&hw, m, sigma.op())) < 1e-13);
        }
        assert!(twirl(&hw, 0, sigma.op()).is_err());
        assert!(twirl(&hw, 10, sigma.op()).is_err());
    }

    #[test]
    fn full_twirl_depolarizes() {
        for d in [2, 3, 4] {
            let hw = heisenberg_weyl(d).unwrap();
            let sigma = random_density(lay(&[("F", d), ("R", 3)]), 3, d as u64).unwrap();
            let t = twirl(&hw, d * d, sigma.op()).unwrap();
            let expect = kron(
                maximally_mixed(lay(&[("F", d)])).op(),
                &partial_trace(sigma.op(), &["R"]).unwrap(),
            )
            .unwrap();
            assert!(t.max_abs_diff(&expect) < 1e-10);
        }
    }

    #[test]
    fn twirl_by_identity_is_noop_and_pair_depolarizes_plus() {
        let hw = heisenberg_weyl(2).unwrap();
        let sigma = random_density(lay(&[("F", 2), ("B", 2)]), 2, 9).unwrap();
        assert!(twirl(&hw, 1, sigma.op()).unwrap().max_abs_diff(sigma.op()) < 1e-15);
        let h = 0.5;
        let plus = Operator::new(
            lay(&[("F", 2)]),
            CMatrix::from_element(2, 2, C64::new(h, 0.0)),
        )
        .unwrap();
        let x = kron(&plus, &Operator::identity(lay(&[("B", 2)]))).unwrap();
        let t = twirl(&hw, 2, &x).unwrap();
        let expect = kron(
            &Operator::identity(lay(&[("F", 2)])).scale(0.5),
            &Operator::identity(lay(&[("B", 2)])),
        )
        .unwrap();
        assert!(t.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn partial_isometry_contracts() {
        for (a, f) in [(4, 2), (8, 2), (8, 4), (3, 3)] {
            let iso = make_partial_isometry(lay(&[("A", a)]), lay(&[("F", f)]), 11).unwrap();
            let w = iso.matrix();
            assert!(max_abs_diff(&(w * w.adjoint()), &CMatrix::identity(f, f)) < 1e-10);
            let p = iso.projector();
            let p2 = p.compose(&p).unwrap();
            assert!(p2.max_abs_diff(&p) < 1e-10);
            assert!((p.trace().re - f as f64).abs() < 1e-9);
        }
        let full = make_partial_isometry(lay(&[("A", 3)]), lay(&[("F", 3)]), 4).unwrap();
        assert!(unitarity_deviation(full.matrix()) < 1e-10);
        assert_eq!(full.matrix(), &haar_matrix(3, 4));
        assert!(make_partial_isometry(lay(&[("A", 2)]), lay(&[("F", 4)]), 1).is_err());
        let can = PartialIsometry::canonical(lay(&[("A", 4)]), lay(&[("F", 2)])).unwrap();
        assert_eq!(can.matrix()[(1, 1)], C64::new(1.0, 0.0));
        assert!(PartialIsometry::new(Operator::map(lay(&[("F", 1)]), lay(&[("A", 2)]), CMatrix::from_element(1, 2, C64::new(1.0, 0.0))).unwrap()).is_err());
    }

    #[test]
    fn t_w_examples() {
        let iso = make_partial_isometry(lay(&[("A", 8)]), lay(&[("F", 4)]), 2).unwrap();
        let tau = random_density(lay(&[("B", 2)]), 2, 3).unwrap();
        let pi = maximally_mixed(lay(&[("A", 8)])).kron(&tau).unwrap();
        let out = apply_t_w(&iso, pi.op()).unwrap();
        let expect = maximally_mixed(lay(&[("F", 4)])).kron(&tau).unwrap();
        assert!(out.max_abs_diff(expect.op()) < 1e-12);
        assert_eq!(out.layout().labels(), vec!["F", "B"]);

        let sigma = random_density(lay(&[("A", 8), ("B", 2)]), 5, 8).unwrap();
        let out = apply_t_w(&iso, sigma.op()).unwrap();
        let proj = kron(&iso.projector(), &Operator::identity(lay(&[("B", 2)]))).unwrap();
        let direct = 2.0 * proj.compose(sigma.op()).unwrap().trace().re;
        assert!((out.trace().re - direct).abs() < 1e-10);

        let unit = make_partial_isometry(lay(&[("A", 4)]), lay(&[("F", 4)]), 6).unwrap();
        let s = random_density(lay(&[("A", 4)]), 2, 1).unwrap();
        assert!((apply_t_w(&unit, s.op()).unwrap().trace().re - 1.0).abs() < 1e-12);
        let wrong = random_density(lay(&[("C", 8)]), 2, 1).unwrap();
        assert!(apply_t_w(&iso, wrong.op()).is_err());
    }

    #[test]
    fn embedding_contracts() {
        let iso = make_partial_isometry(lay(&[("A", 8)]), lay(&[("F", 4)]), 5).unwrap();
        let id = embed_unitary(&iso, &Operator::identity(lay(&[("F", 4)]))).unwrap();
        assert!(id.max_abs_diff(&Operator::identity(lay(&[("A", 8)]))) < 1e-12);
        let hw = heisenberg_weyl(4).unwrap();
        let proj = iso.projector();
        let comp = Operator::identity(lay(&[("A", 8)])).sub(&proj).unwrap();
        for i in 0..16 {
            let vf = hw.operator(lay(&[("F", 4)]), i).unwrap();
            let v = embed_unitary(&iso, &vf).unwrap();
            assert!(unitarity_deviation(v.entries()) < 1e-10);
            let wd = iso.matrix().adjoint();
            assert!(max_abs_diff(&(v.entries() * &wd), &(&wd * vf.entries())) < 1e-10);
            let lhs = v.compose(&comp).unwrap();
            let rhs = comp.compose(&v).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        }
        let sq = make_partial_isometry(lay(&[("A", 3)]), lay(&[("F", 3)]), 5).unwrap();
        let vf = haar_unitary(lay(&[("F", 3)]), 9);
        let v = embed_unitary(&sq, &vf).unwrap();
        let direct = sq.matrix().adjoint() * vf.entries() * sq.matrix();
        assert!(max_abs_diff(v.entries(), &direct) < 1e-12);
        let bad = Operator::identity(lay(&[("F", 3)])).scale(2.0);
        assert!(matches!(embed_unitary(&sq, &bad), Err(Error::NotUnitary { .. })));
    }

    fn two_by_two_pair(seed: u64) -> (PureState, PureState) {
        let l = lay(&[("A", 2), ("R", 2)]);
        (random_pure(l.clone(), seed), random_pure(l, seed + 1000))
    }

    #[test]
    fn uhlmann_identical_states() {
        let (t, _) = two_by_two_pair(1);
        let v = uhlmann_unitary(&t, &t, &["A"]).unwrap();
        assert!((aligned_overlap(&t, &t, &["A"], &v).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn uhlmann_orthogonal_complements() {
        let t = PureState::basis(lay(&[("A", 2), ("R", 2)]), 0).unwrap();
        let s = PureState::basis(lay(&[("A", 2), ("R", 2)]), 3).unwrap();
        let v = uhlmann_unitary(&t, &s, &["A"]).unwrap();
        assert!(unitarity_deviation(v.entries()) < 1e-12);
        assert!(aligned_overlap(&t, &s, &["A"], &v).unwrap() < 1e-12);
        // complement of the (here empty) singular subspace mapped by the identity
        assert!(v.max_abs_diff(&Operator::identity(lay(&[("A", 2)]))) < 1e-12);
    }

    #[test]
    fn uhlmann_beats_random_search() {
        for seed in 0..3 {
            let (t, s) = two_by_two_pair(seed);
            let v = uhlmann_unitary(&t, &s, &["A"]).unwrap();
            let achieved = aligned_overlap(&t, &s, &["A"], &v).unwrap();
            let mut rng = seeded_rng(500 + seed);
            let mut best_random = 0.0f64;
            for _ in 0..10_000 {
                let u = Operator::new(lay(&[("A", 2)]), haar_matrix_with(2, &mut rng)).unwrap();
                best_random = best_random.max(aligned_overlap(&t, &s, &["A"], &u).unwrap());
            }
            assert!(achieved >= best_random - 1e-12, "{achieved} < {best_random}");
            assert!(achieved - best_random < 1e-2);
        }
    }

    #[test]
    fn uhlmann_phase_is_fixed() {
        let (t, s) = two_by_two_pair(4);
        let v = uhlmann_unitary(&t, &s, &["A"]).unwrap();
        let max = v.entries().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pivot = v.entries().transpose().iter().copied().find(|z| z.norm() >= max - 1e-12).unwrap();
        assert!(pivot.im.abs() < 1e-15 && pivot.re > 0.0);
    }

    #[test]
    fn uhlmann_rank_deficient_is_unitary() {
        // rank-1 overlap matrix on a 3-dim act_on space
        let l = lay(&[("A", 3), ("R", 2)]);
        let t = PureState::basis(l.clone(), 0).unwrap();
        let s = random_pure(l, 3);
        let v = uhlmann_unitary(&t, &s, &["A"]).unwrap();
        assert!(unitarity_deviation(v.entries()) < 1e-10);
        let achieved = aligned_overlap(&t, &s, &["A"], &v).unwrap();
        assert!((achieved - optimal_overlap(&t, &s, &["A"]).unwrap()).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn uhlmann_achieves_nuclear_norm_and_fvdg(seed in 0u64..100_000, da in 1usize..4, dr in 1usize..4) {
            let l = lay(&[("A", da), ("B", 2), ("R", dr)]);
            let t = random_pure(l.clone(), seed);
            let s = random_pure(l, seed ^ 0x5555);
            let v = uhlmann_unitary(&t, &s, &["A", "B"]).unwrap();
            prop_assert!(unitarity_deviation(v.entries()) < 1e-10);
            let achieved = aligned_overlap(&t, &s, &["A", "B"], &v).unwrap();
            let nuclear = optimal_overlap(&t, &s, &["A", "B"]).unwrap();
            prop_assert!((achieved - nuclear).abs() < 1e-10);
            let (_, vec) = crate::tensor::operator::apply_local_vector(s.layout(), s.amplitudes(), &["A", "B"], &v).unwrap();
            let dist = pure_pair_trace_norm(t.amplitudes(), &vec);
            // compared squared: at overlap 1 both sides are square roots of rounding noise
            prop_assert!((dist * dist - 4.0 * (1.0 - achieved * achieved)).abs() < 1e-9);
            if dist > 1e-4 {
                prop_assert!((dist - 2.0 * (1.0 - achieved * achieved).sqrt()).abs() < 1e-9);
            }
        }

        #[test]
        fn t_w_fixes_maximally_mixed(seed in 0u64..100_000, which in 0usize..3) {
            let (a, f) = [(4, 2), (8, 2), (8, 4)][which];
            let iso = make_partial_isometry(lay(&[("A", a)]), lay(&[("F", f)]), seed).unwrap();
            let out = apply_t_w(&iso, maximally_mixed(lay(&[("A", a)])).op()).unwrap();
            prop_assert!(out.max_abs_diff(maximally_mixed(lay(&[("F", f)])).op()) < 1e-12);
        }
    }
}
