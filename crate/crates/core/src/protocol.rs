//! The deconstruction / conditional-erasure construction and its measured errors.
//!
//! For `n` copies of `ρ^{ABR}` with purification `Ψ^{ABRE}`:
//!
//! 1. a partial isometry `W : A^n → F` and the best of several Haar unitaries
//!    `U` on `A^n`, scored by the measured decoupling errors `ε` and `ϑ`;
//! 2. the Uhlmann unitary `V_U` on `A^n B^n` aligning `Ψ^{⊗n}` with the
//!    normalized `W† W U Ψ^{⊗n}`;
//! 3. `Υ = (1/M) Σ_i (V_i V_U) ρ^{⊗n} (V_i V_U)†`, with `V_i` the embedded
//!    Heisenberg–Weyl unitaries on `F`;
//! 4. the trace-norm errors of `Υ` against the product target.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{auto_m, auto_sizes, bound_report, tripartite_entropies, xi, BoundReport, Clamp, Entropies, ExpBase, Sizes};
use crate::entropy::EntropyParams;
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::states::{n_copies_grouped, pure_n_copies_grouped, purify, DensityOperator, PureState, ResourceCap};
use crate::tensor::linalg::eigvalsh;
use crate::tensor::operator::apply_local_vector;
use crate::tensor::{
    conjugate_local, grouped_label, kron, partial_trace, pure_pair_trace_norm, trace_norm, trace_norm_gram_difference,
    Operator, SubsystemLayout, C64,
};
use crate::unitaries::{
    apply_t_w, embed_unitary, haar_unitary, heisenberg_weyl, twirl, uhlmann_unitary, PartialIsometry,
};

/// Default number of Haar candidates for `U`.
pub const DEFAULT_U_CANDIDATES: usize = 8;
pub const DEFAULT_DELTA: f64 = 0.1;
pub const DEFAULT_ALPHA: f64 = 2.0;

/// Label of the compressed register.
pub const F_LABEL: &str = "F";

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    /// State on `A`, `B`, `R` (in that order).
    pub rho: DensityOperator,
    pub n: usize,
    pub alpha: f64,
    pub delta: f64,
    /// `log₂|F|`; automatic when `None`.
    pub log2_f: Option<f64>,
    /// `log₂ M`; automatic when `None`.
    pub log2_m: Option<f64>,
    pub num_u_candidates: usize,
    pub seed: u64,
    pub base: ExpBase,
    pub cap: ResourceCap,
}

impl ProtocolConfig {
    pub fn new(rho: DensityOperator, n: usize, seed: u64) -> Self {
        ProtocolConfig {
            rho,
            n,
            alpha: DEFAULT_ALPHA,
            delta: DEFAULT_DELTA,
            log2_f: None,
            log2_m: None,
            num_u_candidates: DEFAULT_U_CANDIDATES,
            seed,
            base: ExpBase::Two,
            cap: ResourceCap::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.rho.layout().labels() != ["A", "B", "R"] {
            return Err(Error::InvalidState(format!(
                "protocol input must live on A, B, R, found [{}]",
                self.rho.layout()
            )));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (1, 2], got {}", self.alpha)));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta must be >= 0, got {}", self.delta)));
        }
        if self.num_u_candidates == 0 {
            return Err(Error::InvalidParameter("num_u_candidates must be positive".into()));
        }
        Ok(())
    }
}

/// `(|F|, M)` for a bit count that must name an integer dimension.
fn dim_from_bits(bits: f64, what: &str) -> Result<usize> {
    if !(bits >= 0.0) || bits > 62.0 {
        return Err(Error::InvalidParameter(format!("{what} = {bits} bits is out of range")));
    }
    let d = bits.exp2().round();
    if (d.log2() - bits).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "{what} = {bits} bits is not the logarithm of an integer"
        )));
    }
    Ok(d as usize)
}

/// Sizes for `config`: the automatic rule where a size is not supplied.
pub fn choose_sizes(config: &ProtocolConfig, ent: &Entropies) -> Result<Sizes> {
    let dims = ent.dims;
    let auto = auto_sizes(config.n, dims, ent.h_tilde_a_given_b, ent.h_alpha_a_given_br, config.delta)?;
    let dim_an = dims.a.checked_pow(config.n as u32).ok_or_else(|| Error::Capacity {
        what: "A^n dimension".into(),
        required: usize::MAX,
        cap: usize::MAX,
    })?;
    let (dim_f, f_clamp) = match config.log2_f {
        None => (auto.dim_f, auto.f_clamp),
        Some(bits) => {
            let max_bits = config.n as f64 * (dims.a as f64).log2();
            let d = if (bits - max_bits).abs() < 1e-9 { dim_an } else { dim_from_bits(bits, "log2_F")? };
            if d > dim_an {
                return Err(Error::InvalidParameter(format!("|F| = {d} exceeds |A^n| = {dim_an}")));
            }
            (d, Clamp::Free)
        }
    };
    let (m, m_clamp) = match (config.log2_m, config.log2_f) {
        (None, None) => (auto.m, auto.m_clamp),
        (None, Some(_)) => auto_m(dim_f, config.n, dims, ent.h_alpha_a_given_br, config.delta)?,
        (Some(bits), _) => {
            let m = dim_from_bits(bits, "log2_M")?;
            if m == 0 || m > dim_f * dim_f {
                return Err(Error::InvalidParameter(format!("M = {m} must lie in 1..=|F|^2 = {}", dim_f * dim_f)));
            }
            (m, Clamp::Free)
        }
    };
    Ok(Sizes {
        dim_f,
        m,
        log2_f: (dim_f as f64).log2(),
        log2_m: (m as f64).log2(),
        f_clamp,
        m_clamp,
    })
}

/// Scores of one Haar candidate for `U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub seed: u64,
    pub eps: f64,
    pub theta: f64,
}

impl Candidate {
    pub fn score(&self) -> f64 {
        self.eps.max(self.theta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRun {
    pub upsilon: DensityOperator,
    /// `τ = W† π^F W` on `A^n`.
    pub tau: Operator,
    pub sizes: Sizes,
    pub entropies: Entropies,
    pub bounds: BoundReport,
    pub candidates: Vec<Candidate>,
    pub best_candidate: usize,
    pub eps_emp: f64,
    pub theta_emp: f64,
    /// `‖normalized W†·T_W[U Ψ^{⊗n}] − V_U Ψ^{⊗n}‖₁`.
    pub uhlmann_distance: f64,
    /// The same distance before normalizing the first state.
    pub uhlmann_distance_unnormalized: f64,
    /// Squared norm of `W†·T_W[U Ψ^{⊗n}]` before normalization.
    pub target_norm_sq: f64,
    pub erasure_err: f64,
    pub marginal_err: f64,
    pub decon_err: f64,
    /// `‖Υ − τ ⊗ (ρ^{BR})^{⊗n}‖₁`.
    pub product_err: f64,
    /// Erasure error with `τ` replaced by the marginal `Υ^{A^n}`.
    pub erasure_err_marginal_tau: f64,
    /// `Ξ(ε) + ϑ`.
    pub chain_bound: f64,
    /// `2 Ξ(ε) + 2 ϑ`.
    pub chain_bound_erasure: f64,
    pub upsilon_trace: f64,
    pub upsilon_min_eigenvalue: f64,
}

/// `‖Υ − τ ⊗ Υ^{rest}‖₁` and the marginal `Υ^{rest}`, where `τ` lives on the
/// first factor of `Υ`.
fn product_distance(upsilon: &DensityOperator, tau: &Operator) -> Result<(f64, Operator)> {
    let labels = upsilon.layout().labels();
    let marg = partial_trace(upsilon.op(), &labels[1..])?;
    let product = kron(tau, &marg)?;
    Ok((trace_norm(&upsilon.op().sub(&product)?), marg))
}

/// `‖Υ − τ ⊗ Υ^{B^nR^n}‖₁` and `‖Υ^{B^nR^n} − reference‖₁`.
pub fn erasure_error(upsilon: &DensityOperator, tau: &Operator, reference: &Operator) -> Result<(f64, f64)> {
    let (erasure, marg) = product_distance(upsilon, tau)?;
    Ok((erasure, trace_norm(&marg.sub(reference)?)))
}

/// `‖Υ − R(Υ^{B^nR^n})‖₁` for the recovery map `R(X) = W† π^F W ⊗ X`.
pub fn deconstruction_error(upsilon: &DensityOperator, iso: &PartialIsometry) -> Result<f64> {
    Ok(product_distance(upsilon, &recovery_state(iso))?.0)
}

/// `W† π^F W`.
pub fn recovery_state(iso: &PartialIsometry) -> Operator {
    iso.projector().scale(1.0 / iso.target().total_dim() as f64)
}

struct Prepared {
    psi_n: PureState,
    rho_n: DensityOperator,
    /// `(ρ^{BR})^{⊗n}` on `B^n R^n`.
    rho_br_n: Operator,
    labels: [String; 4],
}

fn prepare(config: &ProtocolConfig) -> Result<Prepared> {
    let psi = purify(&config.rho, "E")?;
    let psi_n = pure_n_copies_grouped(&psi, config.n, &config.cap)?;
    let rho_n = n_copies_grouped(&config.rho, config.n, &config.cap)?;
    let labels = ["A", "B", "R", "E"].map(|l| grouped_label(l, config.n));
    let rho_br_n = partial_trace(rho_n.op(), &[&labels[1], &labels[2]])?;
    Ok(Prepared {
        psi_n,
        rho_n,
        rho_br_n,
        labels,
    })
}

/// `ε` and `ϑ` of one candidate `U`.
fn score_candidate(
    prep: &Prepared,
    w: &PartialIsometry,
    u: &Operator,
    m: usize,
    pi_f_rho_br: &Operator,
) -> Result<(f64, f64)> {
    let [a, _, r, e] = prep.labels.each_ref().map(String::as_str);
    let wu = w.after(u)?;
    let c = w.source().total_dim() as f64 / w.target().total_dim() as f64;
    // Tr_F T_W[U ρ^{ARE}] against ρ^{RE}, both as Gram matrices over R^n E^n
    let (layout, phi) = apply_local_vector(prep.psi_n.layout(), prep.psi_n.amplitudes(), &[a], wu.operator())?;
    let phi = PureState::trusted(layout, phi);
    let (_, m_phi) = phi.split_matrix(&[r, e])?;
    let (_, m_psi) = prep.psi_n.split_matrix(&[r, e])?;
    let eps = trace_norm_gram_difference(&(m_phi * C64::new(c.sqrt(), 0.0)), &m_psi)?;
    let tw = apply_t_w(&wu, prep.rho_n.op())?;
    let twirled = twirl(&heisenberg_weyl(w.target().total_dim())?, m, &tw)?;
    let theta = trace_norm(&twirled.sub(pi_f_rho_br)?);
    Ok((eps, theta))
}

pub fn run_protocol(config: &ProtocolConfig) -> Result<ProtocolRun> {
    config.validate()?;
    let params = EntropyParams::new(config.alpha)?;
    let ent = tripartite_entropies(&config.rho, &params)?;
    run_protocol_with(config, &ent)
}

/// [`run_protocol`] with precomputed entropies of `config.rho` at `config.alpha`.
pub fn run_protocol_with(config: &ProtocolConfig, ent: &Entropies) -> Result<ProtocolRun> {
    config.validate()?;
    let sizes = choose_sizes(config, ent)?;
    let prep = prepare(config)?;
    let [a, b, _, _] = prep.labels.each_ref().map(String::as_str);
    let an_layout = prep.rho_n.layout().select(&[a])?;
    let f_layout = SubsystemLayout::single(F_LABEL, sizes.dim_f)?;
    let w = PartialIsometry::haar(an_layout.clone(), f_layout.clone(), derive_seed(config.seed, &[1]))?;
    let pi_f = Operator::identity(f_layout.clone()).scale(1.0 / sizes.dim_f as f64);
    let pi_f_rho_br = kron(&pi_f, &prep.rho_br_n)?;

    let seeds: Vec<u64> = (0..config.num_u_candidates)
        .map(|i| derive_seed(config.seed, &[2, i as u64]))
        .collect();
    let scored: Vec<Result<Candidate>> = seeds
        .par_iter()
        .map(|&seed| {
            let u = haar_unitary(an_layout.clone(), seed);
            let (eps, theta) = score_candidate(&prep, &w, &u, sizes.m, &pi_f_rho_br)?;
            Ok(Candidate { seed, eps, theta })
        })
        .collect();
    let candidates = scored.into_iter().collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.score() < candidates[best].score() {
            best = i;
        }
    }
    let chosen = candidates[best];
    let u = haar_unitary(an_layout.clone(), chosen.seed);

    // Uhlmann step
    let c = an_layout.total_dim() as f64 / sizes.dim_f as f64;
    let x = w.projector().compose(&u)?.scale(c.sqrt());
    let (layout, raw) = apply_local_vector(prep.psi_n.layout(), prep.psi_n.amplitudes(), &[a], &x)?;
    let raw_target = PureState::trusted(layout.clone(), raw.clone());
    let (target, target_norm_sq) = PureState::normalized(layout, raw)?;
    let v_u = uhlmann_unitary(&target, &prep.psi_n, &[a, b])?;
    let (_, aligned) = apply_local_vector(prep.psi_n.layout(), prep.psi_n.amplitudes(), &[a, b], &v_u)?;
    let uhlmann_distance = pure_pair_trace_norm(target.amplitudes(), &aligned);
    let uhlmann_distance_unnormalized = pure_pair_trace_norm(raw_target.amplitudes(), &aligned);

    // Υ
    let rotated = conjugate_local(prep.rho_n.op(), &[a, b], &v_u)?;
    let hw = heisenberg_weyl(sizes.dim_f)?;
    let embedded: Vec<Operator> = (0..sizes.m)
        .map(|i| embed_unitary(&w, &hw.operator(f_layout.clone(), i)?))
        .collect::<Result<_>>()?;
    let terms: Vec<Operator> = embedded
        .par_iter()
        .map(|v| conjugate_local(&rotated, &[a], v))
        .collect::<Result<_>>()?;
    let mut sum = terms[0].entries().clone();
    for t in &terms[1..] {
        sum += t.entries();
    }
    let upsilon_op = Operator::new(rotated.layout().clone(), sum / C64::new(sizes.m as f64, 0.0))?;
    let spectrum = eigvalsh(upsilon_op.entries());
    let upsilon_trace = upsilon_op.trace().re;
    let upsilon_min_eigenvalue = spectrum.first().copied().unwrap_or(0.0);
    let upsilon = DensityOperator::trusted(upsilon_op);

    let tau = recovery_state(&w);
    let (erasure_err, marginal_err) = erasure_error(&upsilon, &tau, &prep.rho_br_n)?;
    let decon_err = deconstruction_error(&upsilon, &w)?;
    let product_err = trace_norm(&upsilon.op().sub(&kron(&tau, &prep.rho_br_n)?)?);
    let upsilon_a = partial_trace(upsilon.op(), &[a])?;
    let (erasure_err_marginal_tau, _) = erasure_error(&upsilon, &upsilon_a, &prep.rho_br_n)?;

    let bounds = bound_report(ent, config.n, config.delta, sizes.log2_f, sizes.log2_m, config.base)?;
    let xi_eps = xi(chosen.eps)?;
    Ok(ProtocolRun {
        upsilon,
        tau,
        sizes,
        entropies: *ent,
        bounds,
        candidates,
        best_candidate: best,
        eps_emp: chosen.eps,
        theta_emp: chosen.theta,
        uhlmann_distance,
        uhlmann_distance_unnormalized,
        target_norm_sq,
        erasure_err,
        marginal_err,
        decon_err,
        product_err,
        erasure_err_marginal_tau,
        chain_bound: xi_eps + chosen.theta,
        chain_bound_erasure: 2.0 * xi_eps + 2.0 * chosen.theta,
        upsilon_trace,
        upsilon_min_eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{random_density, Builtin};
    use proptest::prelude::*;

    fn abr(a: usize, b: usize, r: usize) -> SubsystemLayout {
        SubsystemLayout::new([("A", a), ("B", b), ("R", r)]).unwrap()
    }

    fn random_abr(seed: u64) -> DensityOperator {
        random_density(abr(2, 2, 2), 8, seed).unwrap()
    }

    fn diag_state(layout: SubsystemLayout, diag: &[f64]) -> DensityOperator {
        DensityOperator::new(Operator::from_real_diagonal(layout, diag).unwrap()).unwrap()
    }

    // eigenvalue sum of the difference, independent of the singular value path
    fn eig_trace_norm(op: &Operator) -> f64 {
        eigvalsh(op.entries()).iter().map(|x| x.abs()).sum()
    }

    #[test]
    fn already_product_input_has_no_error() {
        // pure |0⟩ on A, classical correlations on BR
        let br = diag_state(SubsystemLayout::new([("B", 2), ("R", 2)]).unwrap(), &[0.5, 0.0, 0.0, 0.5]);
        let a = diag_state(SubsystemLayout::single("A", 2).unwrap(), &[1.0, 0.0]);
        let rho = a.kron(&br).unwrap();
        let mut cfg = ProtocolConfig::new(rho, 1, 11);
        cfg.log2_f = Some(0.0);
        cfg.log2_m = Some(0.0);
        let run = run_protocol(&cfg).unwrap();
        assert_eq!((run.sizes.dim_f, run.sizes.m), (1, 1));
        assert!(run.erasure_err <= 1e-9, "{}", run.erasure_err);
        assert!(run.marginal_err <= 1e-9);
        assert!(run.decon_err <= 1e-9);
        assert!(run.product_err <= 1e-9);
        assert!(run.uhlmann_distance <= 1e-9);
    }

    #[test]
    fn classical_correlation_erasure_matches_deconstruction() {
        let rho = diag_state(abr(2, 1, 2), &[0.5, 0.0, 0.0, 0.5]);
        let mut cfg = ProtocolConfig::new(rho, 1, 3);
        cfg.log2_f = Some(0.0);
        let run = run_protocol(&cfg).unwrap();
        assert_eq!(run.sizes.dim_f, 1);
        assert!(run.erasure_err > 1e-3, "{}", run.erasure_err);
        assert!((run.erasure_err - run.decon_err).abs() <= 1e-12);
    }

    #[test]
    fn chain_inequality_on_random_two_copy_run() {
        let cfg = ProtocolConfig::new(random_abr(5), 2, 99);
        let run = run_protocol(&cfg).unwrap();
        assert_eq!(run.candidates.len(), DEFAULT_U_CANDIDATES);
        let xe = xi(run.eps_emp).unwrap();
        assert!(run.erasure_err <= 2.0 * xe + 2.0 * run.theta_emp + 1e-9);
        assert!(run.marginal_err <= xe + run.theta_emp + 1e-9);
        assert!(run.product_err <= xe + run.theta_emp + 1e-9);
        assert!(run.uhlmann_distance <= xe + 1e-9);
        assert!((run.chain_bound - (xe + run.theta_emp)).abs() < 1e-15);
        assert_eq!(run.erasure_err, run.decon_err);
    }

    #[test]
    fn explicit_small_sizes_keep_the_chain() {
        for seed in 0..4 {
            let mut cfg = ProtocolConfig::new(random_abr(100 + seed), 2, seed);
            cfg.log2_f = Some(1.0);
            cfg.log2_m = Some(1.0);
            let run = run_protocol(&cfg).unwrap();
            assert_eq!((run.sizes.dim_f, run.sizes.m), (2, 2));
            let xe = xi(run.eps_emp).unwrap();
            assert!(run.erasure_err <= 2.0 * xe + 2.0 * run.theta_emp + 1e-9);
            assert!(run.marginal_err <= xe + run.theta_emp + 1e-9);
            assert!(run.uhlmann_distance <= xe + 1e-9);
        }
    }

    #[test]
    fn best_candidate_minimizes_the_score() {
        let run = run_protocol(&ProtocolConfig::new(random_abr(8), 1, 4)).unwrap();
        let best = run.candidates[run.best_candidate];
        assert_eq!(best.eps, run.eps_emp);
        for (i, c) in run.candidates.iter().enumerate() {
            assert!(best.score() <= c.score());
            if i < run.best_candidate {
                assert!(best.score() < c.score());
            }
        }
    }

    #[test]
    fn upsilon_is_a_state() {
        let run = run_protocol(&ProtocolConfig::new(Builtin::Ghz.state(), 2, 1)).unwrap();
        assert!((run.upsilon_trace - 1.0).abs() < 1e-9);
        assert!(run.upsilon_min_eigenvalue > -1e-9);
        assert!(run.upsilon.op().hermiticity_deviation() < 1e-9);
        assert_eq!(run.upsilon.layout().labels(), vec!["A^2", "B^2", "R^2"]);
    }

    #[test]
    fn full_sizes_make_theta_vanish() {
        // |F| = |A|^n and M = |F|²: the twirl depolarizes F exactly
        let mut cfg = ProtocolConfig::new(random_abr(21), 1, 2);
        cfg.log2_f = Some(1.0);
        cfg.log2_m = Some(2.0);
        let run = run_protocol(&cfg).unwrap();
        assert!(run.theta_emp < 1e-9, "{}", run.theta_emp);
        let xe = xi(run.eps_emp).unwrap();
        assert!(run.product_err <= xe + 1e-9);
    }

    #[test]
    fn runs_are_reproducible() {
        let cfg = ProtocolConfig::new(random_abr(1), 1, 77);
        let a = run_protocol(&cfg).unwrap();
        let b = run_protocol(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn size_validation() {
        let rho = random_abr(2);
        let params = EntropyParams::new(2.0).unwrap();
        let ent = tripartite_entropies(&rho, &params).unwrap();
        let mut cfg = ProtocolConfig::new(rho, 1, 0);
        cfg.log2_f = Some(2.0);
        assert!(matches!(choose_sizes(&cfg, &ent), Err(Error::InvalidParameter(_))));
        cfg.log2_f = Some(0.5);
        assert!(choose_sizes(&cfg, &ent).is_err());
        cfg.log2_f = Some(1.0);
        cfg.log2_m = Some(3.0);
        assert!(choose_sizes(&cfg, &ent).is_err());
        cfg.log2_m = Some(2.0);
        let s = choose_sizes(&cfg, &ent).unwrap();
        assert_eq!((s.dim_f, s.m), (2, 4));
        cfg.alpha = 1.0;
        assert!(run_protocol_with(&cfg, &ent).is_err());
    }

    #[test]
    fn auto_sizes_for_pure_product_clamp_to_full() {
        // H̃(A|B) = log|A| for a maximally mixed A, δ = 0
        let a = diag_state(SubsystemLayout::single("A", 2).unwrap(), &[0.5, 0.5]);
        let br = diag_state(SubsystemLayout::new([("B", 2), ("R", 2)]).unwrap(), &[1.0, 0.0, 0.0, 0.0]);
        let rho = a.kron(&br).unwrap();
        let ent = tripartite_entropies(&rho, &EntropyParams::new(2.0).unwrap()).unwrap();
        let mut cfg = ProtocolConfig::new(rho, 1, 0);
        cfg.delta = 0.0;
        let s = choose_sizes(&cfg, &ent).unwrap();
        assert_eq!(s.dim_f, 2);
        assert_eq!(s.log2_f, 1.0);
    }

    #[test]
    fn erasure_error_examples() {
        let l = abr(2, 2, 2);
        let tau_a = Operator::from_real_diagonal(SubsystemLayout::single("A", 2).unwrap(), &[1.0, 0.0]).unwrap();
        let br = random_density(SubsystemLayout::new([("B", 2), ("R", 2)]).unwrap(), 4, 3).unwrap();
        let prod = DensityOperator::new(kron(&tau_a, br.op()).unwrap()).unwrap();
        let (e, m) = erasure_error(&prod, &tau_a, br.op()).unwrap();
        assert!(e < 1e-12 && m < 1e-12);
        let orth = Operator::from_real_diagonal(SubsystemLayout::single("A", 2).unwrap(), &[0.0, 1.0]).unwrap();
        let (e, _) = erasure_error(&prod, &orth, br.op()).unwrap();
        assert!((e - 2.0).abs() < 1e-9);
        let rho = random_density(l, 8, 4).unwrap();
        let (e, m) = erasure_error(&rho, &tau_a, br.op()).unwrap();
        let marg = partial_trace(rho.op(), &["B", "R"]).unwrap();
        let diff = rho.op().sub(&kron(&tau_a, &marg).unwrap()).unwrap();
        assert!((e - eig_trace_norm(&diff)).abs() < 1e-10);
        assert!((m - eig_trace_norm(&marg.sub(br.op()).unwrap())).abs() < 1e-10);
    }

    #[test]
    fn deconstruction_error_examples() {
        let a = SubsystemLayout::single("A", 4).unwrap();
        let iso = PartialIsometry::haar(a, SubsystemLayout::single("F", 2).unwrap(), 9).unwrap();
        let tau = recovery_state(&iso);
        assert!((tau.trace().re - 1.0).abs() < 1e-12);
        let sigma = random_density(SubsystemLayout::new([("B", 2)]).unwrap(), 2, 1).unwrap();
        let ups = DensityOperator::new(kron(&tau, sigma.op()).unwrap()).unwrap();
        assert!(deconstruction_error(&ups, &iso).unwrap() < 1e-12);
        let other = random_density(SubsystemLayout::new([("A", 4), ("B", 2)]).unwrap(), 3, 2).unwrap();
        let d = deconstruction_error(&other, &iso).unwrap();
        let (e, _) = erasure_error(&other, &tau, sigma.op()).unwrap();
        assert_eq!(d, e);
        assert!((0.0..=2.0).contains(&d));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn single_copy_errors_are_bounded(state_seed in 0u64..1000, seed in 0u64..1000, bits in 0usize..2) {
            let mut cfg = ProtocolConfig::new(random_abr(state_seed), 1, seed);
            cfg.log2_f = Some(bits as f64);
            cfg.num_u_candidates = 3;
            let run = run_protocol(&cfg).unwrap();
            for v in [run.erasure_err, run.marginal_err, run.decon_err, run.product_err, run.eps_emp, run.theta_emp] {
                prop_assert!((-1e-12..=2.0 + 1e-9).contains(&v));
            }
            let xe = xi(run.eps_emp).unwrap();
            prop_assert!(run.erasure_err <= 2.0 * xe + 2.0 * run.theta_emp + 1e-9);
            prop_assert!(run.uhlmann_distance <= xe + 1e-9);
        }
    }
}
