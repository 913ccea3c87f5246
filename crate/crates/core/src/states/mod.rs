//! Quantum states over labeled layouts.
//!
//! [`DensityOperator`] and [`PureState`] validate their invariants on
//! construction. Operations that are valid by construction (partial traces of
//! valid states, tensor powers, twirl averages) go through a crate-internal
//! trusted constructor so large intermediate states are not re-diagonalized.

pub mod format;
pub mod hexfloat;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{complex_normal, seeded_rng};
use crate::tensor::layout::permutation_index_map;
use crate::tensor::linalg::{eigh, eigvalsh, support_rank, HERMITIAN_TOL};
use crate::tensor::operator::{kept_traced_indices, CMatrix, C64, ONE, ZERO};
use crate::tensor::{grouped_label, kron, partial_trace, permute_subsystems, Factor, Operator, SubsystemLayout};

/// Maximum size for dense states built by n-copy constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCap {
    pub max_density_dim: usize,
    pub max_pure_len: usize,
}

impl Default for ResourceCap {
    fn default() -> Self {
        ResourceCap {
            max_density_dim: 4096,
            max_pure_len: 1 << 20,
        }
    }
}

/// Hermitian, PSD, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: Operator,
}

pub const STATE_TOL: f64 = 1e-10;

impl DensityOperator {
    pub fn new(op: Operator) -> Result<Self> {
        if !op.is_square() {
            return Err(Error::InvalidState("density operator must be square".into()));
        }
        let deviation = op.hermiticity_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        if let Some(&min) = eigvalsh(op.entries()).first() {
            if min < -STATE_TOL {
                return Err(Error::NotPositive { eigenvalue: min });
            }
        }
        Ok(DensityOperator { op })
    }

    /// Skip validation; for states that are valid by construction.
    pub(crate) fn trusted(op: Operator) -> Self {
        DensityOperator { op }
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_op(self) -> Operator {
        self.op
    }

    pub fn layout(&self) -> &SubsystemLayout {
        self.op.layout()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(self.op.entries())
    }

    pub fn purity(&self) -> f64 {
        let m = self.op.entries();
        m.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn marginal(&self, keep: &[&str]) -> Result<DensityOperator> {
        Ok(DensityOperator::trusted(partial_trace(&self.op, keep)?))
    }

    pub fn permuted(&self, order: &[&str]) -> Result<DensityOperator> {
        Ok(DensityOperator::trusted(permute_subsystems(&self.op, order)?))
    }

    pub fn kron(&self, other: &DensityOperator) -> Result<DensityOperator> {
        Ok(DensityOperator::trusted(kron(&self.op, &other.op)?))
    }

    pub fn relabeled(&self, from: &str, to: &str) -> Result<DensityOperator> {
        Ok(DensityOperator::trusted(self.op.relabeled(from, to)?))
    }

    pub fn from_pure(psi: &PureState) -> DensityOperator {
        let a = &psi.amplitudes;
        let op = Operator::outer(psi.layout.clone(), a, a).expect("layout matches amplitudes");
        DensityOperator::trusted(op)
    }
}

/// Unit vector over a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: SubsystemLayout,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(layout: SubsystemLayout, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} amplitudes for dimension {}",
                amplitudes.len(),
                layout.total_dim()
            )));
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("state norm is {norm}")));
        }
        Ok(PureState { layout, amplitudes })
    }

    /// Scale `amplitudes` to unit norm; returns the state and its squared norm.
    pub fn normalized(layout: SubsystemLayout, mut amplitudes: Vec<C64>) -> Result<(Self, f64)> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::ShapeMismatch("amplitude count".into()));
        }
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        for a in &mut amplitudes {
            *a /= n;
        }
        Ok((PureState { layout, amplitudes }, n * n))
    }

    pub(crate) fn trusted(layout: SubsystemLayout, amplitudes: Vec<C64>) -> Self {
        PureState { layout, amplitudes }
    }

    pub fn basis(layout: SubsystemLayout, index: usize) -> Result<Self> {
        let mut a = vec![ZERO; layout.total_dim()];
        *a.get_mut(index)
            .ok_or_else(|| Error::InvalidParameter(format!("basis index {index} out of range")))? = ONE;
        Ok(PureState {
            layout,
            amplitudes: a,
        })
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn kron(&self, other: &PureState) -> Result<PureState> {
        let layout = self.layout.concat(&other.layout)?;
        let mut amps = Vec::with_capacity(layout.total_dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        Ok(PureState {
            layout,
            amplitudes: amps,
        })
    }

    pub fn permuted(&self, order: &[&str]) -> Result<PureState> {
        let perm = self.layout.permutation_to(order)?;
        let layout = self.layout.reordered(order)?;
        let map = permutation_index_map(&self.layout, &perm);
        let mut amps = vec![ZERO; self.amplitudes.len()];
        for (i, &m) in map.iter().enumerate() {
            amps[m] = self.amplitudes[i];
        }
        Ok(PureState {
            layout,
            amplitudes: amps,
        })
    }

    /// `|ψ⟩` reshaped as a `dim(keep) × dim(rest)` matrix.
    pub(crate) fn split_matrix(&self, keep: &[&str]) -> Result<(SubsystemLayout, CMatrix)> {
        let kept = self.layout.select(keep)?;
        let k = kept.total_dim();
        let t = self.layout.total_dim() / k;
        let groups = kept_traced_indices(&self.layout, keep);
        let m = CMatrix::from_fn(k, t, |i, j| self.amplitudes[groups[j * k + i]]);
        Ok((kept, m))
    }

    /// Reduced state on `keep`, computed as `M M†` from the reshaped vector.
    pub fn marginal(&self, keep: &[&str]) -> Result<DensityOperator> {
        let (kept, m) = self.split_matrix(keep)?;
        Ok(DensityOperator::trusted(Operator::new(kept, &m * m.adjoint())?))
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `1 / d` on every diagonal entry.
pub fn maximally_mixed(layout: SubsystemLayout) -> DensityOperator {
    let d = layout.total_dim();
    let diag = vec![1.0 / d as f64; d];
    DensityOperator::trusted(Operator::from_real_diagonal(layout, &diag).expect("diagonal length"))
}

/// Minimal purification: the environment dimension is the numerical rank of `rho`.
pub fn purify(rho: &DensityOperator, env_label: &str) -> Result<PureState> {
    if rho.layout().contains(env_label) {
        return Err(Error::LabelCollision(env_label.to_string()));
    }
    let (values, vectors) = eigh(rho.op().entries());
    let rank = support_rank(&values).max(1);
    let d = values.len();
    // largest `rank` eigenpairs, largest first
    let picked: Vec<usize> = (0..d).rev().take(rank).collect();
    let layout = rho.layout().concat(&SubsystemLayout::single(env_label, rank)?)?;
    let mut amps = vec![ZERO; d * rank];
    for (k, &col) in picked.iter().enumerate() {
        let s = values[col].max(0.0).sqrt();
        for i in 0..d {
            amps[i * rank + k] = vectors[(i, col)] * s;
        }
    }
    // renormalize away eigenvalues dropped below the cutoff
    let (psi, _) = PureState::normalized(layout, amps)?;
    Ok(psi)
}

struct CopyPlan {
    copies_layout: SubsystemLayout,
    order: Vec<String>,
    grouped: SubsystemLayout,
}

fn copy_plan(layout: &SubsystemLayout, n: usize) -> Result<CopyPlan> {
    let mut copies = Vec::with_capacity(layout.len() * n);
    for c in 0..n {
        for f in layout.factors() {
            copies.push(Factor::new(format!("{}#{c}", f.label), f.dim));
        }
    }
    let order = layout
        .factors()
        .iter()
        .flat_map(|f| (0..n).map(move |c| format!("{}#{c}", f.label)))
        .collect();
    let grouped = SubsystemLayout::from_factors(
        layout
            .factors()
            .iter()
            .map(|f| Factor::new(grouped_label(&f.label, n), f.dim.pow(n as u32)))
            .collect(),
    )?;
    Ok(CopyPlan {
        copies_layout: SubsystemLayout::from_factors(copies)?,
        order,
        grouped,
    })
}

fn checked_power(d: usize, n: usize) -> Option<usize> {
    (0..n).try_fold(1usize, |acc, _| acc.checked_mul(d))
}

/// `ρ^{⊗n}` regrouped so that copies of each label form one composite factor
/// `label^n` (e.g. `A^n B^n R^n`).
pub fn n_copies_grouped(rho: &DensityOperator, n: usize, cap: &ResourceCap) -> Result<DensityOperator> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let d = rho.layout().total_dim();
    let total = checked_power(d, n).unwrap_or(usize::MAX);
    if total > cap.max_density_dim {
        return Err(Error::Capacity {
            what: format!("{n}-copy density matrix dimension"),
            required: total,
            cap: cap.max_density_dim,
        });
    }
    let plan = copy_plan(rho.layout(), n)?;
    let mut m = rho.op().entries().clone();
    for _ in 1..n {
        m = m.kronecker(rho.op().entries());
    }
    let copies = Operator::new(plan.copies_layout, m)?;
    let order: Vec<&str> = plan.order.iter().map(String::as_str).collect();
    let permuted = permute_subsystems(&copies, &order)?;
    Ok(DensityOperator::trusted(Operator::new(
        plan.grouped,
        permuted.into_entries(),
    )?))
}

/// Pure-state analogue of [`n_copies_grouped`].
pub fn pure_n_copies_grouped(psi: &PureState, n: usize, cap: &ResourceCap) -> Result<PureState> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let d = psi.layout().total_dim();
    let total = checked_power(d, n).unwrap_or(usize::MAX);
    if total > cap.max_pure_len {
        return Err(Error::Capacity {
            what: format!("{n}-copy pure state length"),
            required: total,
            cap: cap.max_pure_len,
        });
    }
    let plan = copy_plan(psi.layout(), n)?;
    let mut amps = psi.amplitudes.clone();
    for _ in 1..n {
        let mut next = Vec::with_capacity(amps.len() * d);
        for a in &amps {
            for b in &psi.amplitudes {
                next.push(a * b);
            }
        }
        amps = next;
    }
    let copies = PureState::trusted(plan.copies_layout, amps);
    let order: Vec<&str> = plan.order.iter().map(String::as_str).collect();
    let permuted = copies.permuted(&order)?;
    Ok(PureState::trusted(plan.grouped, permuted.amplitudes))
}

/// Haar-random pure state, deterministic per seed.
pub fn random_pure(layout: SubsystemLayout, seed: u64) -> PureState {
    let mut rng = seeded_rng(seed);
    let amps: Vec<C64> = (0..layout.total_dim()).map(|_| complex_normal(&mut rng)).collect();
    PureState::normalized(layout, amps).expect("gaussian vector is nonzero").0
}

/// Random density operator of the given rank: the marginal of a seeded random
/// pure state on `layout ⊗ ancilla(rank)`.
pub fn random_density(layout: SubsystemLayout, rank: usize, seed: u64) -> Result<DensityOperator> {
    if rank == 0 || rank > layout.total_dim() {
        return Err(Error::InvalidParameter(format!(
            "rank {rank} outside 1..={}",
            layout.total_dim()
        )));
    }
    let anc = unique_label(&layout, "anc");
    let full = layout.concat(&SubsystemLayout::single(anc, rank)?)?;
    let labels: Vec<String> = layout.labels().iter().map(|s| s.to_string()).collect();
    let keep: Vec<&str> = labels.iter().map(String::as_str).collect();
    random_pure(full, seed).marginal(&keep)
}

pub(crate) fn unique_label(layout: &SubsystemLayout, base: &str) -> String {
    let mut label = base.to_string();
    while layout.contains(&label) {
        label.push('_');
    }
    label
}

/// Named reference states on qubits `A`, `B`, `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Builtin {
    /// (|000⟩ + |111⟩)/√2; I(A;R|B) = 1.
    Ghz,
    /// Φ^{AR} ⊗ π^B; I(A;R|B) = 2.
    MaxEntangledAR,
    /// diag(3/4, 1/4)^A ⊗ ½(|00⟩⟨00| + |11⟩⟨11|)^{BR}; I(A;R|B) = 0.
    Product,
}

impl Builtin {
    pub fn parse(name: &str) -> Option<Builtin> {
        match name {
            "ghz" => Some(Builtin::Ghz),
            "max-entangled-AR" => Some(Builtin::MaxEntangledAR),
            "product" => Some(Builtin::Product),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Ghz => "ghz",
            Builtin::MaxEntangledAR => "max-entangled-AR",
            Builtin::Product => "product",
        }
    }

    pub fn state(self) -> DensityOperator {
        let abr = SubsystemLayout::new([("A", 2), ("B", 2), ("R", 2)]).expect("static layout");
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Builtin::Ghz => {
                let mut a = vec![ZERO; 8];
                a[0] = C64::new(h, 0.0);
                a[7] = C64::new(h, 0.0);
                PureState::trusted(abr, a).to_density()
            }
            Builtin::MaxEntangledAR => {
                let ar = SubsystemLayout::new([("A", 2), ("R", 2)]).expect("static layout");
                let mut a = vec![ZERO; 4];
                a[0] = C64::new(h, 0.0);
                a[3] = C64::new(h, 0.0);
                let phi = PureState::trusted(ar, a).to_density();
                let pi_b = maximally_mixed(SubsystemLayout::single("B", 2).expect("static"));
                phi.kron(&pi_b)
                    .and_then(|s| s.permuted(&["A", "B", "R"]))
                    .expect("static layout")
            }
            Builtin::Product => {
                let a = Operator::from_real_diagonal(SubsystemLayout::single("A", 2).expect("static"), &[0.75, 0.25])
                    .expect("static");
                let br = Operator::from_real_diagonal(
                    SubsystemLayout::new([("B", 2), ("R", 2)]).expect("static"),
                    &[0.5, 0.0, 0.0, 0.5],
                )
                .expect("static");
                DensityOperator::trusted(kron(&a, &br).expect("static"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::operator::max_abs_diff;
    use crate::tensor::trace_norm;

    fn lay(p: &[(&str, usize)]) -> SubsystemLayout {
        SubsystemLayout::new(p.iter().map(|&(l, d)| (l, d))).unwrap()
    }

    #[test]
    fn maximally_mixed_examples() {
        for d in [2usize, 4, 5] {
            let pi = maximally_mixed(SubsystemLayout::single("A", d).unwrap());
            assert!((pi.op().trace().re - 1.0).abs() < 1e-15);
            assert!((pi.purity() - 1.0 / d as f64).abs() < 1e-15);
            for i in 0..d {
                assert_eq!(pi.op().entries()[(i, i)].re, 1.0 / d as f64);
            }
        }
    }

    #[test]
    fn density_validation() {
        let l = lay(&[("A", 2)]);
        assert!(DensityOperator::new(Operator::from_real_diagonal(l.clone(), &[0.5, 0.5]).unwrap()).is_ok());
        assert!(DensityOperator::new(Operator::from_real_diagonal(l.clone(), &[0.6, 0.6]).unwrap()).is_err());
        assert!(matches!(
            DensityOperator::new(Operator::from_real_diagonal(l, &[1.2, -0.2]).unwrap()),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn purify_pure_state() {
        let rho = DensityOperator::new(Operator::from_real_diagonal(lay(&[("A", 2)]), &[1.0, 0.0]).unwrap()).unwrap();
        let psi = purify(&rho, "E").unwrap();
        assert_eq!(psi.layout().dim_of("E").unwrap(), 1);
        assert!((psi.amplitudes()[0].norm() - 1.0).abs() < 1e-14);
        assert!(psi.amplitudes()[1].norm() < 1e-14);
    }

    #[test]
    fn purify_maximally_mixed_is_max_entangled() {
        let pi = maximally_mixed(lay(&[("A", 2)]));
        let psi = purify(&pi, "E").unwrap();
        assert_eq!(psi.layout().dim_of("E").unwrap(), 2);
        let back = psi.marginal(&["A"]).unwrap();
        assert!(back.op().max_abs_diff(pi.op()) < 1e-14);
        let env = psi.marginal(&["E"]).unwrap();
        assert!((env.eigenvalues()[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn purify_rank_three() {
        let rho = random_density(lay(&[("A", 2), ("B", 2)]), 3, 17).unwrap();
        let psi = purify(&rho, "E").unwrap();
        assert_eq!(psi.layout().dim_of("E").unwrap(), 3);
        let rank_oracle = rho.eigenvalues().iter().filter(|&&l| l > 1e-12).count();
        assert_eq!(rank_oracle, 3);
        let back = psi.marginal(&["A", "B"]).unwrap();
        assert!(trace_norm(&back.op().sub(rho.op()).unwrap()) < 1e-9);
    }

    #[test]
    fn purify_rejects_existing_label() {
        let pi = maximally_mixed(lay(&[("A", 2)]));
        assert!(matches!(purify(&pi, "A"), Err(Error::LabelCollision(_))));
    }

    #[test]
    fn random_density_contracts() {
        let l = lay(&[("A", 2), ("B", 2)]);
        let pure = random_density(l.clone(), 1, 1).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-10);
        let full = random_density(l.clone(), 4, 2).unwrap();
        assert!(full.eigenvalues()[0] > 0.0);
        let a = random_density(l.clone(), 2, 99).unwrap();
        let b = random_density(l.clone(), 2, 99).unwrap();
        assert_eq!(a, b);
        assert!(random_density(l.clone(), 5, 1).is_err());
        assert!(random_density(l, 0, 1).is_err());
        assert!(DensityOperator::new(full.into_op()).is_ok());
    }

    #[test]
    fn one_copy_is_relabeling() {
        let rho = random_density(lay(&[("A", 2), ("B", 3)]), 2, 5).unwrap();
        let one = n_copies_grouped(&rho, 1, &ResourceCap::default()).unwrap();
        assert_eq!(one.layout().labels(), vec!["A^1", "B^1"]);
        assert_eq!(one.op().entries(), rho.op().entries());
    }

    #[test]
    fn two_copies_of_product_state() {
        let ra = random_density(lay(&[("A", 2)]), 2, 1).unwrap();
        let sb = random_density(lay(&[("B", 2)]), 2, 2).unwrap();
        let rho = ra.kron(&sb).unwrap();
        let two = n_copies_grouped(&rho, 2, &ResourceCap::default()).unwrap();
        let expect = kron(
            &Operator::new(lay(&[("A^2", 4)]), ra.op().entries().kronecker(ra.op().entries())).unwrap(),
            &Operator::new(lay(&[("B^2", 4)]), sb.op().entries().kronecker(sb.op().entries())).unwrap(),
        )
        .unwrap();
        assert!(two.op().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn two_copies_match_permutation_matrix_oracle() {
        let rho = random_density(lay(&[("A", 2), ("B", 3)]), 4, 8).unwrap();
        let two = n_copies_grouped(&rho, 2, &ResourceCap::default()).unwrap();
        // ρ⊗ρ on A1 B1 A2 B2 → A1 A2 B1 B2 via an explicit permutation matrix
        let (da, db) = (2usize, 3usize);
        let d = da * db * da * db;
        let mut p = CMatrix::zeros(d, d);
        for a1 in 0..da {
            for b1 in 0..db {
                for a2 in 0..da {
                    for b2 in 0..db {
                        let from = ((a1 * db + b1) * da + a2) * db + b2;
                        let to = ((a1 * da + a2) * db + b1) * db + b2;
                        p[(to, from)] = ONE;
                    }
                }
            }
        }
        let rr = rho.op().entries().kronecker(rho.op().entries());
        let oracle = &p * rr * p.transpose();
        assert!(max_abs_diff(two.op().entries(), &oracle) < 1e-12);
    }

    #[test]
    fn n_copies_respects_cap() {
        let rho = maximally_mixed(lay(&[("A", 4)]));
        let cap = ResourceCap {
            max_density_dim: 16,
            max_pure_len: 16,
        };
        assert!(n_copies_grouped(&rho, 2, &cap).is_ok());
        assert!(matches!(n_copies_grouped(&rho, 3, &cap), Err(Error::Capacity { .. })));
        let psi = purify(&rho, "E").unwrap();
        assert!(matches!(pure_n_copies_grouped(&psi, 2, &cap), Err(Error::Capacity { .. })));
    }

    #[test]
    fn pure_copies_agree_with_density_copies() {
        let rho = random_density(lay(&[("A", 2), ("B", 2), ("R", 2)]), 2, 4).unwrap();
        let psi = purify(&rho, "E").unwrap();
        let cap = ResourceCap::default();
        let psi2 = pure_n_copies_grouped(&psi, 2, &cap).unwrap();
        assert_eq!(psi2.layout().labels(), vec!["A^2", "B^2", "R^2", "E^2"]);
        let via_pure = psi2.marginal(&["A^2", "B^2", "R^2"]).unwrap();
        let via_density = n_copies_grouped(&rho, 2, &cap).unwrap();
        assert!(via_pure.op().max_abs_diff(via_density.op()) < 1e-12);
    }

    #[test]
    fn builtins_are_valid() {
        for b in [Builtin::Ghz, Builtin::MaxEntangledAR, Builtin::Product] {
            let s = b.state();
            assert_eq!(s.layout().labels(), vec!["A", "B", "R"]);
            assert!(DensityOperator::new(s.into_op()).is_ok());
            assert_eq!(Builtin::parse(b.name()), Some(b));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn purification_recovers_input(seed in any::<u64>(), rank in 1usize..=6) {
                let rho = random_density(lay(&[("A", 2), ("B", 3)]), rank, seed).unwrap();
                let psi = purify(&rho, "E").unwrap();
                let back = psi.marginal(&["A", "B"]).unwrap();
                prop_assert!(trace_norm(&back.op().sub(rho.op()).unwrap()) < 1e-9);
            }

            #[test]
            fn schmidt_symmetry(seed in any::<u64>()) {
                let l = lay(&[("A", 2), ("B", 2), ("R", 2), ("E", 2)]);
                let psi = random_pure(l, seed);
                let ab = psi.marginal(&["A", "B"]).unwrap().eigenvalues();
                let re = psi.marginal(&["R", "E"]).unwrap().eigenvalues();
                for (x, y) in ab.iter().zip(&re) {
                    prop_assert!((x - y).abs() < 1e-9);
                }
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn copies_spectrum_is_products(seed in any::<u64>(), n in 1usize..=3) {
                let rho = random_density(lay(&[("A", 2), ("B", 2)]), 3, seed).unwrap();
                let rn = n_copies_grouped(&rho, n, &ResourceCap::default()).unwrap();
                prop_assert!((rn.op().trace().re - 1.0).abs() < 1e-12);
                let base = rho.eigenvalues();
                let mut products = vec![1.0f64];
                for _ in 0..n {
                    products = products.iter().flat_map(|p| base.iter().map(move |b| p * b)).collect();
                }
                products.sort_by(f64::total_cmp);
                for (x, y) in rn.eigenvalues().iter().zip(&products) {
                    prop_assert!((x - y).abs() < 1e-9);
                }
            }
        }
    }
}
