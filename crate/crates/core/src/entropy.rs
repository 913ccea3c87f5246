//! Von Neumann and sandwiched Rényi entropies.
//!
//! The Rényi conditional entropy is the optimized sandwiched one,
//! `H_α(A|C)_ρ = −min_σ D̃_α(ρ^{AC} ‖ 1_A ⊗ σ^C)`. Orders `α ∈ (1/2, 2]` are
//! accepted so the dual parameter `α/(2α − 1)` of any order in `(1, 2]` can be
//! evaluated by the same code.

use crate::error::{Error, Result};
use crate::states::DensityOperator;
use crate::tensor::linalg::{eigh, eigvalsh, psd_power, reconstruct};
use crate::tensor::{partial_trace, CMatrix, Operator, SubsystemLayout, C64, SUPPORT_CUTOFF};

/// Order and optimizer settings for Rényi quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyParams {
    alpha: f64,
    tolerance: f64,
    max_iterations: usize,
}

impl EntropyParams {
    pub const DEFAULT_TOLERANCE: f64 = 1e-10;
    pub const DEFAULT_MAX_ITERATIONS: usize = 20_000;

    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(EntropyParams {
            alpha,
            tolerance: Self::DEFAULT_TOLERANCE,
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
        })
    }

    pub fn von_neumann() -> Self {
        EntropyParams {
            alpha: 1.0,
            tolerance: Self::DEFAULT_TOLERANCE,
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tolerance}")));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Result<Self> {
        if max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be positive".into()));
        }
        self.max_iterations = max_iterations;
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    /// Parameters for the dual order, same optimizer settings.
    pub fn dual(&self) -> Self {
        EntropyParams {
            alpha: dual_alpha(self.alpha),
            ..*self
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.5 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must lie in (1/2, 2], got {alpha}")))
    }
}

/// `α̃ = α / (2α − 1)`, so that `1/α + 1/α̃ = 2`. Defined for `α > 1/2`.
pub fn dual_alpha(alpha: f64) -> f64 {
    alpha / (2.0 * alpha - 1.0)
}

fn shannon_bits(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(0.0, f64::max);
    values
        .iter()
        .filter(|&&l| l > SUPPORT_CUTOFF * max && l > 0.0)
        .map(|&l| -l * l.log2())
        .sum()
}

fn renyi_bits(values: &[f64], alpha: f64) -> f64 {
    if alpha == 1.0 {
        return shannon_bits(values);
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    let q: f64 = values
        .iter()
        .filter(|&&l| l > SUPPORT_CUTOFF * max && l > 0.0)
        .map(|&l| l.powf(alpha))
        .sum();
    q.log2() / (1.0 - alpha)
}

/// `−Σ λ log₂ λ` over eigenvalues above the support cutoff.
pub fn von_neumann(rho: &DensityOperator) -> f64 {
    shannon_bits(&rho.eigenvalues())
}

/// `log₂ Tr ρ^α / (1 − α)`; von Neumann at `α = 1`.
pub fn renyi_entropy(rho: &DensityOperator, alpha: f64) -> Result<f64> {
    if alpha != 1.0 {
        check_alpha(alpha)?;
    }
    Ok(renyi_bits(&rho.eigenvalues(), alpha))
}

/// Check that every set exists in `layout` and that the sets are pairwise
/// disjoint (and free of repeats).
fn check_disjoint(layout: &SubsystemLayout, sets: &[&[&str]]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for set in sets {
        for &l in *set {
            if !layout.contains(l) {
                return Err(Error::UnknownLabel(l.to_string()));
            }
            if seen.contains(&l) {
                return Err(Error::LabelCollision(l.to_string()));
            }
            seen.push(l);
        }
    }
    Ok(())
}

fn joined<'a>(sets: &[&[&'a str]]) -> Vec<&'a str> {
    sets.iter().flat_map(|s| s.iter().copied()).collect()
}

fn marginal_entropy(rho: &DensityOperator, keep: &[&str]) -> Result<f64> {
    if keep.is_empty() {
        return Ok(0.0);
    }
    Ok(shannon_bits(&eigvalsh(partial_trace(rho.op(), keep)?.entries())))
}

/// `H(A|B) = H(AB) − H(B)`.
pub fn conditional_entropy(rho: &DensityOperator, a: &[&str], b: &[&str]) -> Result<f64> {
    check_disjoint(rho.layout(), &[a, b])?;
    Ok(marginal_entropy(rho, &joined(&[a, b]))? - marginal_entropy(rho, b)?)
}

/// `I(A;R|B) = H(A|B) − H(A|RB)`.
pub fn cmi(rho: &DensityOperator, a: &[&str], r: &[&str], b: &[&str]) -> Result<f64> {
    check_disjoint(rho.layout(), &[a, r, b])?;
    let h_ab = marginal_entropy(rho, &joined(&[a, b]))?;
    let h_b = marginal_entropy(rho, b)?;
    let h_arb = marginal_entropy(rho, &joined(&[a, r, b]))?;
    let h_rb = marginal_entropy(rho, &joined(&[r, b]))?;
    Ok((h_ab - h_b) - (h_arb - h_rb))
}

/// `Σ μ^α` over the spectrum of `X` above the support cutoff.
fn spectral_power_sum(x: &CMatrix, alpha: f64) -> f64 {
    let values = eigvalsh(x);
    let max = values.last().copied().unwrap_or(0.0).max(0.0);
    values
        .iter()
        .filter(|&&l| l > SUPPORT_CUTOFF * max && l > 0.0)
        .map(|&l| l.powf(alpha))
        .sum()
}

/// Sandwiched Rényi divergence `D̃_α(ρ‖σ)` in bits, `σ` any PSD operator on the
/// same layout.
///
/// Returns `+∞` when the divergence is infinite: for `α ≥ 1` when the support
/// of `ρ` leaks out of the support of `σ`, for `α < 1` when they are
/// orthogonal. At `α = 1` this is the Umegaki relative entropy.
pub fn sandwiched_divergence(rho: &DensityOperator, sigma: &Operator, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if sigma.layout() != rho.layout() || !sigma.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "divergence between [{}] and [{}]",
            rho.layout(),
            sigma.row_layout()
        )));
    }
    let deviation = sigma.hermiticity_deviation();
    if deviation > crate::tensor::HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let r = rho.op().entries();
    let s = sigma.entries();
    if alpha >= 1.0 {
        let proj = psd_power(s, 0.0)?;
        let leak = (r.trace() - (&proj * r).trace()).re;
        if leak > 1e-10 {
            return Ok(f64::INFINITY);
        }
    }
    if alpha == 1.0 {
        let (lr, vr) = eigh(r);
        let (ls, vs) = eigh(s);
        let log = |vals: &[f64]| -> Vec<f64> {
            let max = vals.last().copied().unwrap_or(0.0).max(0.0);
            vals.iter()
                .map(|&l| if l > SUPPORT_CUTOFF * max && l > 0.0 { l.log2() } else { 0.0 })
                .collect()
        };
        let log_r = reconstruct(&vr, &log(&lr));
        let log_s = reconstruct(&vs, &log(&ls));
        return Ok((r * (log_r - log_s)).trace().re);
    }
    let gamma = (1.0 - alpha) / (2.0 * alpha);
    let sg = psd_power(s, gamma)?;
    let q = spectral_power_sum(&(&sg * r * &sg), alpha);
    if q <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(q.log2() / (alpha - 1.0))
}

/// How the conditioning-state optimization finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Minimizer {
    /// No conditioning system, or `σ^C` trivial: closed form.
    ClosedForm,
    FixedPoint,
    /// Derivative-free search over a Cholesky factor of `σ`.
    Simplex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenyiOutcome {
    /// `H_α(A|C)` in bits.
    pub value: f64,
    /// The optimizing conditioning state on `C`.
    pub sigma: Operator,
    pub iterations: usize,
    /// `‖T(σ)/Tr T(σ) − σ‖₁` at the returned `σ` (zero for closed forms).
    pub residual: f64,
    pub method: Minimizer,
}

/// `ρ^{AC}` restricted to `1_A ⊗ supp(ρ^C)`, stored as a `(dA·r) × (dA·r)`
/// matrix with the `A` index most significant.
struct Problem {
    rho: CMatrix,
    d_a: usize,
    r: usize,
    alpha: f64,
    /// Columns span `supp(ρ^C)` inside the full `C` space.
    support: CMatrix,
    c_layout: SubsystemLayout,
}

/// Sum of the diagonal `r × r` blocks of a `(dA·r) × (dA·r)` matrix.
fn trace_out_a(x: &CMatrix, d_a: usize, r: usize) -> CMatrix {
    let mut out = CMatrix::zeros(r, r);
    for a in 0..d_a {
        out += x.view((a * r, a * r), (r, r));
    }
    out
}

/// `(1 ⊗ s) x (1 ⊗ s)` for Hermitian `s`, blockwise.
fn sandwich_blocks(x: &CMatrix, s: &CMatrix, d_a: usize, r: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d_a * r, d_a * r);
    for i in 0..d_a {
        for j in 0..d_a {
            let block = s * x.view((i * r, j * r), (r, r)) * s;
            out.view_mut((i * r, j * r), (r, r)).copy_from(&block);
        }
    }
    out
}

fn power_from_eig(values: &[f64], vectors: &CMatrix, p: f64) -> CMatrix {
    let mapped: Vec<f64> = values.iter().map(|&l| l.max(0.0).powf(p)).collect();
    reconstruct(vectors, &mapped)
}

fn normalized(m: CMatrix) -> CMatrix {
    let t = m.trace().re;
    let h = (&m + m.adjoint()) * C64::new(0.5 / t, 0.0);
    h
}

struct Evaluation {
    /// `D̃_α(ρ ‖ 1 ⊗ σ)`.
    divergence: f64,
    /// `Tr_A[(σ^γ ρ σ^γ)^α]`.
    t: CMatrix,
}

impl Problem {
    fn gamma(&self) -> f64 {
        (1.0 - self.alpha) / (2.0 * self.alpha)
    }

    /// Requires `σ` full rank on the compressed space.
    fn evaluate(&self, sigma_values: &[f64], sigma_vectors: &CMatrix) -> Evaluation {
        let sg = power_from_eig(sigma_values, sigma_vectors, self.gamma());
        let x = sandwich_blocks(&self.rho, &sg, self.d_a, self.r);
        let (mu, w) = eigh(&x);
        let max = mu.last().copied().unwrap_or(0.0).max(0.0);
        let powered: Vec<f64> = mu
            .iter()
            .map(|&l| if l > SUPPORT_CUTOFF * max && l > 0.0 { l.powf(self.alpha) } else { 0.0 })
            .collect();
        let q: f64 = powered.iter().sum();
        let t = trace_out_a(&reconstruct(&w, &powered), self.d_a, self.r);
        Evaluation {
            divergence: q.log2() / (self.alpha - 1.0),
            t,
        }
    }

    fn divergence_of(&self, sigma: &CMatrix) -> f64 {
        let (values, vectors) = eigh(sigma);
        if values.first().map_or(true, |&l| l <= 0.0) {
            return f64::INFINITY;
        }
        let d = self.evaluate(&values, &vectors).divergence;
        if d.is_finite() {
            d
        } else {
            f64::INFINITY
        }
    }

    fn residual(&self, sigma: &CMatrix, t: &CMatrix) -> f64 {
        let diff = t * C64::new(1.0 / t.trace().re, 0.0) - sigma;
        eigvalsh(&diff).iter().map(|l| l.abs()).sum()
    }

    fn expand(&self, sigma: &CMatrix) -> Result<Operator> {
        let full = &self.support * sigma * self.support.adjoint();
        Operator::new(self.c_layout.clone(), full)
    }
}

struct Minimum {
    sigma: CMatrix,
    divergence: f64,
    iterations: usize,
    residual: f64,
    method: Minimizer,
}

/// Iterate `σ ← normalize((σ^{(α−1)/2} T(σ) σ^{(α−1)/2})^{1/α})`, whose fixed
/// points are exactly the stationary points `σ ∝ T(σ)`.
///
/// Returns the last iterate and a flag telling whether it converged; the
/// iteration is abandoned as stalled once the objective stops decreasing.
fn fixed_point(p: &Problem, start: &CMatrix, params: &EntropyParams) -> (Minimum, bool) {
    let half = (p.alpha - 1.0) / 2.0;
    let mut sigma = start.clone();
    let mut best: Option<Minimum> = None;
    let mut best_residual = f64::INFINITY;
    let mut since_progress = 0usize;
    let mut rises = 0usize;
    for it in 0..params.max_iterations {
        let (values, vectors) = eigh(&sigma);
        if values.first().map_or(true, |&l| l <= 0.0) {
            break;
        }
        let ev = p.evaluate(&values, &vectors);
        if !ev.divergence.is_finite() {
            break;
        }
        let residual = p.residual(&sigma, &ev.t);
        let current = Minimum {
            sigma: sigma.clone(),
            divergence: ev.divergence,
            iterations: it + 1,
            residual,
            method: Minimizer::FixedPoint,
        };
        if residual < params.tolerance {
            return (current, true);
        }
        if residual < best_residual {
            best_residual = residual;
            since_progress = 0;
        } else {
            since_progress += 1;
        }
        match &best {
            Some(b) if ev.divergence > b.divergence + 1e-9 * b.divergence.abs().max(1.0) => rises += 1,
            _ => {}
        }
        if best.as_ref().map_or(true, |b| ev.divergence <= b.divergence) {
            best = Some(current);
        }
        if rises > 3 || since_progress > 50 {
            break;
        }
        let sh = power_from_eig(&values, &vectors, half);
        sigma = match psd_power(&(&sh * &ev.t * &sh), 1.0 / p.alpha) {
            Ok(m) => normalized(m),
            Err(_) => break,
        };
    }
    let b = best.unwrap_or(Minimum {
        sigma: start.clone(),
        divergence: p.divergence_of(start),
        iterations: 0,
        residual: f64::INFINITY,
        method: Minimizer::FixedPoint,
    });
    (b, false)
}

/// Real parameter vector of a lower-triangular factor with real diagonal.
fn cholesky_params(sigma: &CMatrix) -> Vec<f64> {
    let r = sigma.nrows();
    let l = sigma
        .clone()
        .cholesky()
        .map(|c| c.l())
        .unwrap_or_else(|| CMatrix::identity(r, r) * C64::new((1.0 / r as f64).sqrt(), 0.0));
    let mut x = Vec::with_capacity(r * r);
    for i in 0..r {
        x.push(l[(i, i)].re);
    }
    for i in 0..r {
        for j in 0..i {
            x.push(l[(i, j)].re);
            x.push(l[(i, j)].im);
        }
    }
    x
}

fn from_cholesky_params(x: &[f64], r: usize) -> CMatrix {
    let mut l = CMatrix::zeros(r, r);
    for i in 0..r {
        l[(i, i)] = C64::new(x[i], 0.0);
    }
    let mut k = r;
    for i in 0..r {
        for j in 0..i {
            l[(i, j)] = C64::new(x[k], x[k + 1]);
            k += 2;
        }
    }
    let s = &l * l.adjoint();
    let t = s.trace().re;
    if t > 0.0 {
        s * C64::new(1.0 / t, 0.0)
    } else {
        s
    }
}

struct SimplexResult {
    x: Vec<f64>,
    value: f64,
    size: f64,
    iterations: usize,
    converged: bool,
}

/// Nelder–Mead with the standard coefficients (1, 2, 1/2, 1/2).
fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    tolerance: f64,
    max_iterations: usize,
) -> SimplexResult {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += if v[i].abs() > 1e-8 { step * v[i].abs().max(0.1) } else { step };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let size_of = |s: &[Vec<f64>]| -> f64 {
        s[1..]
            .iter()
            .map(|v| v.iter().zip(&s[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    };
    let mut it = 0;
    let mut converged = false;
    while it < max_iterations {
        it += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        let spread = values[n] - values[0];
        if spread.abs() <= tolerance && size_of(&simplex) <= tolerance.sqrt() {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect()
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let (xc, fc) = if fr < values[n] {
                let x = along(-0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = along(0.5);
                let v = f(&x);
                (x, v)
            };
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    let shrunk: Vec<f64> = best.iter().zip(&simplex[i]).map(|(b, v)| b + 0.5 * (v - b)).collect();
                    values[i] = f(&shrunk);
                    simplex[i] = shrunk;
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    SimplexResult {
        x: simplex[best].clone(),
        value: values[best],
        size: size_of(&simplex),
        iterations: it,
        converged,
    }
}

fn simplex_search(p: &Problem, start: &CMatrix, params: &EntropyParams) -> (Minimum, bool) {
    let x0 = cholesky_params(start);
    let res = nelder_mead(
        |x| p.divergence_of(&from_cholesky_params(x, p.r)),
        &x0,
        0.05,
        params.tolerance,
        params.max_iterations,
    );
    let sigma = from_cholesky_params(&res.x, p.r);
    let (values, vectors) = eigh(&sigma);
    let residual = if values.first().map_or(false, |&l| l > 0.0) {
        p.residual(&sigma, &p.evaluate(&values, &vectors).t)
    } else {
        f64::INFINITY
    };
    let min = Minimum {
        sigma,
        divergence: res.value,
        iterations: res.iterations,
        residual,
        method: Minimizer::Simplex,
    };
    if !res.converged {
        return (
            Minimum {
                residual: res.size,
                ..min
            },
            false,
        );
    }
    (min, true)
}

fn minimize(p: &Problem, params: &EntropyParams, allow_fixed_point: bool) -> Result<Minimum> {
    let start = normalized(trace_out_a(&p.rho, p.d_a, p.r));
    let mut best: Option<Minimum> = None;
    if allow_fixed_point {
        let (m, ok) = fixed_point(p, &start, params);
        if ok {
            return Ok(m);
        }
        best = Some(m);
    }
    let from = best.as_ref().map_or(&start, |b| &b.sigma).clone();
    let (m, ok) = simplex_search(p, &from, params);
    if ok {
        return Ok(match best {
            Some(b) if b.divergence < m.divergence => b,
            _ => m,
        });
    }
    let overall = match best {
        Some(b) if b.divergence < m.divergence => b,
        _ => m,
    };
    Err(Error::NonConvergence {
        best: -overall.divergence,
        step: overall.residual,
        iterations: overall.iterations,
    })
}

fn build_problem(rho: &DensityOperator, a: &[&str], c: &[&str], alpha: f64) -> Result<Problem> {
    let ac = joined(&[a, c]);
    let marg = partial_trace(rho.op(), &ac)?;
    let ordered = crate::tensor::permute_subsystems(&marg, &ac)?;
    let d_a = ordered.layout().dim_of_set(a)?;
    let c_layout = ordered.layout().select(c)?;
    let rc = c_layout.total_dim();
    let m = ordered.into_entries();
    let rho_c = trace_out_a(&m, d_a, rc);
    let (values, vectors) = eigh(&rho_c);
    let max = values.last().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<usize> = (0..rc).filter(|&i| values[i] > SUPPORT_CUTOFF * max).collect();
    let r = keep.len();
    let support = CMatrix::from_fn(rc, r, |i, j| vectors[(i, keep[j])]);
    let lift = CMatrix::identity(d_a, d_a).kronecker(&support);
    let compressed = lift.adjoint() * &m * &lift;
    Ok(Problem {
        rho: (&compressed + compressed.adjoint()) * C64::new(0.5, 0.0),
        d_a,
        r,
        alpha,
        support,
        c_layout,
    })
}

/// Optimized sandwiched Rényi conditional entropy `H_α(A|C)`, with the
/// optimizer diagnostics.
pub fn renyi_conditional_detailed(
    rho: &DensityOperator,
    a: &[&str],
    c: &[&str],
    params: &EntropyParams,
) -> Result<RenyiOutcome> {
    check_disjoint(rho.layout(), &[a, c])?;
    if a.is_empty() {
        return Err(Error::InvalidParameter("conditional entropy needs a non-empty A".into()));
    }
    let alpha = params.alpha;
    let c_layout = rho.layout().select(c)?;
    if alpha == 1.0 {
        let value = conditional_entropy(rho, a, c)?;
        let sigma = if c.is_empty() {
            Operator::identity(c_layout)
        } else {
            partial_trace(rho.op(), c)?
        };
        return Ok(RenyiOutcome {
            value,
            sigma,
            iterations: 0,
            residual: 0.0,
            method: Minimizer::ClosedForm,
        });
    }
    let problem = build_problem(rho, a, c, alpha)?;
    if problem.r <= 1 {
        // σ is forced to the single support direction
        let sigma = CMatrix::identity(problem.r, problem.r);
        let value = if problem.r == 0 {
            0.0
        } else {
            -problem.divergence_of(&sigma)
        };
        return Ok(RenyiOutcome {
            value,
            sigma: problem.expand(&sigma)?,
            iterations: 0,
            residual: 0.0,
            method: Minimizer::ClosedForm,
        });
    }
    let m = minimize(&problem, params, true)?;
    Ok(RenyiOutcome {
        value: -m.divergence,
        sigma: problem.expand(&m.sigma)?,
        iterations: m.iterations,
        residual: m.residual,
        method: m.method,
    })
}

/// Optimized sandwiched Rényi conditional entropy `H_α(A|C)` in bits; the von
/// Neumann conditional entropy at `α = 1`.
pub fn renyi_conditional(rho: &DensityOperator, a: &[&str], c: &[&str], params: &EntropyParams) -> Result<f64> {
    renyi_conditional_detailed(rho, a, c, params).map(|o| o.value)
}
