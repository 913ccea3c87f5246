//! Closed-form error bounds, size choices and rates.
//!
//! Entropies and sizes are in bits. `exp{·}` in the bounds is evaluated in
//! base 2 by default; [`ExpBase::Natural`] is available for sensitivity checks.

use serde::{Deserialize, Serialize};

use crate::entropy::{cmi, dual_alpha, renyi_conditional, EntropyParams};
use crate::error::{Error, Result};
use crate::states::{purify, DensityOperator};

/// A bound above this is vacuous: no two states are farther apart in trace norm.
pub const TRIVIAL_TRACE_DISTANCE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpBase {
    #[default]
    Two,
    Natural,
}

impl ExpBase {
    pub fn parse(s: &str) -> Option<ExpBase> {
        match s {
            "2" | "two" | "base2" => Some(ExpBase::Two),
            "e" | "natural" => Some(ExpBase::Natural),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExpBase::Two => "two",
            ExpBase::Natural => "natural",
        }
    }

    pub fn pow(self, x: f64) -> f64 {
        match self {
            ExpBase::Two => x.exp2(),
            ExpBase::Natural => x.exp(),
        }
    }
}

/// Dimensions of the subsystems `A`, `B`, `R` and of the purifying `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
    pub r: usize,
    pub e: usize,
}

/// `Ξ(ε) = √(ε (2 + ε + 2√(1+ε)))`.
pub fn xi(eps: f64) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("Xi needs eps >= 0, got {eps}")));
    }
    Ok((eps * (2.0 + eps + 2.0 * (1.0 + eps).sqrt())).sqrt())
}

/// `(α − 1) / (2α)`.
pub fn decay_factor(alpha: f64) -> f64 {
    (alpha - 1.0) / (2.0 * alpha)
}

fn log2_succ(n: usize) -> f64 {
    ((n + 1) as f64).log2()
}

/// Exponent of the ε_n bound: `k [|R||E| log(n+1) − n H_α(A|RE) − log|F|]`.
pub fn epsilon_exponent(alpha: f64, n: usize, dim_r: usize, dim_e: usize, h_a_re: f64, log2_f: f64) -> f64 {
    decay_factor(alpha) * ((dim_r * dim_e) as f64 * log2_succ(n) - n as f64 * h_a_re - log2_f)
}

/// Exponent of the ϑ_n bound: `k [|B||R| log(n+1) − n H_α(A|BR) − log M + log|F|]`.
pub fn theta_exponent(
    alpha: f64,
    n: usize,
    dim_b: usize,
    dim_r: usize,
    h_a_br: f64,
    log2_m: f64,
    log2_f: f64,
) -> f64 {
    decay_factor(alpha) * ((dim_b * dim_r) as f64 * log2_succ(n) - n as f64 * h_a_br - log2_m + log2_f)
}

/// `ε_n = 8 · 2^{k [|R||E| log(n+1) − n H_α(A|RE) − log|F|]}`.
pub fn epsilon_n(alpha: f64, n: usize, dim_r: usize, dim_e: usize, h_a_re: f64, log2_f: f64) -> f64 {
    8.0 * epsilon_exponent(alpha, n, dim_r, dim_e, h_a_re, log2_f).exp2()
}

/// `ε_n` written through the dual entropy, `H_α(A|RE) = −H_α̃(A|B)`.
pub fn epsilon_n_dual(alpha: f64, n: usize, dim_r: usize, dim_e: usize, h_tilde_a_b: f64, log2_f: f64) -> f64 {
    epsilon_n(alpha, n, dim_r, dim_e, -h_tilde_a_b, log2_f)
}

pub fn theta_n(alpha: f64, n: usize, dim_b: usize, dim_r: usize, h_a_br: f64, log2_m: f64, log2_f: f64) -> f64 {
    8.0 * theta_exponent(alpha, n, dim_b, dim_r, h_a_br, log2_m, log2_f).exp2()
}

/// `H_α̃(A|B) − H_α(A|BR) + (|E|+|B|)|R| log(n+1)/n + δ` bits per copy.
pub fn rate_formula(delta: f64, n: usize, dims: Dims, h_tilde_a_b: f64, h_a_br: f64) -> f64 {
    h_tilde_a_b - h_a_br + ((dims.e + dims.b) * dims.r) as f64 * log2_succ(n) / n as f64 + delta
}

/// `I(A;R|B)`, the optimal asymptotic rate.
pub fn asymptotic_target(rho: &DensityOperator) -> Result<f64> {
    cmi(rho, &["A"], &["R"], &["B"])
}

/// The entropies every bound and size formula needs, for a state on `A`, `B`, `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entropies {
    pub alpha: f64,
    pub alpha_tilde: f64,
    pub dims: Dims,
    /// `H_α̃(A|B)`.
    pub h_tilde_a_given_b: f64,
    /// `H_α(A|BR)`.
    pub h_alpha_a_given_br: f64,
    /// `H_α(A|RE)` on a minimal purification.
    pub h_alpha_a_given_re: f64,
    pub cmi: f64,
}

/// Entropies of `rho` on `A`, `B`, `R` at order `params.alpha()`. `E` is the
/// minimal purifying system, of dimension rank ρ.
pub fn tripartite_entropies(rho: &DensityOperator, params: &EntropyParams) -> Result<Entropies> {
    let l = rho.layout();
    if l.labels() != ["A", "B", "R"] {
        return Err(Error::InvalidState(format!("expected a state on A, B, R, found [{l}]")));
    }
    let psi = purify(rho, "E")?;
    let dims = Dims {
        a: l.dim_of("A")?,
        b: l.dim_of("B")?,
        r: l.dim_of("R")?,
        e: psi.layout().dim_of("E")?,
    };
    let rho_are = psi.marginal(&["A", "R", "E"])?;
    Ok(Entropies {
        alpha: params.alpha(),
        alpha_tilde: dual_alpha(params.alpha()),
        dims,
        h_tilde_a_given_b: renyi_conditional(rho, &["A"], &["B"], &params.dual())?,
        h_alpha_a_given_br: renyi_conditional(rho, &["A"], &["B", "R"], params)?,
        h_alpha_a_given_re: renyi_conditional(&rho_are, &["A"], &["R", "E"], params)?,
        cmi: cmi(rho, &["A"], &["R"], &["B"])?,
    })
}

/// Where a size sits relative to its allowed range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clamp {
    Low,
    Free,
    High,
}

/// Integer sizes `|F|` and `M` for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sizes {
    pub dim_f: usize,
    pub m: usize,
    pub log2_f: f64,
    pub log2_m: f64,
    pub f_clamp: Clamp,
    pub m_clamp: Clamp,
}

/// `n H_α̃(A|B) + |R||E| log(n+1) + n δ/2`.
fn raw_log2_f(n: usize, dims: Dims, h_tilde: f64, delta: f64) -> f64 {
    n as f64 * h_tilde + (dims.r * dims.e) as f64 * log2_succ(n) + n as f64 * delta / 2.0
}

/// `−n H_α(A|BR) + |B||R| log(n+1) + n δ/2`.
fn raw_log2_m_over_f(n: usize, dims: Dims, h_br: f64, delta: f64) -> f64 {
    -(n as f64) * h_br + (dims.b * dims.r) as f64 * log2_succ(n) + n as f64 * delta / 2.0
}

// guards ⌈x⌉ against x landing a rounding error above an integer
fn ceil_bits(x: f64) -> f64 {
    (x - 1e-9).ceil()
}

/// Automatic sizes: `log|F| = ⌈n H_α̃(A|B) + |R||E| log(n+1) + nδ/2⌉` clamped to
/// `[0, n log|A|]`, then `M = ⌈|F| · 2^{⌈−n H_α(A|BR) + |B||R| log(n+1) + nδ/2⌉}⌉`
/// clamped to `[1, |F|²]`.
pub fn auto_sizes(n: usize, dims: Dims, h_tilde_a_b: f64, h_a_br: f64, delta: f64) -> Result<Sizes> {
    let dim_an = checked_pow(dims.a, n)?;
    let max_bits = n as f64 * (dims.a as f64).log2();
    let kf = ceil_bits(raw_log2_f(n, dims, h_tilde_a_b, delta));
    let (dim_f, f_clamp) = if kf <= 0.0 {
        (1, if kf < 0.0 { Clamp::Low } else { Clamp::Free })
    } else if kf >= max_bits - 1e-12 {
        (dim_an, if kf > max_bits + 1e-12 { Clamp::High } else { Clamp::Free })
    } else {
        (1usize << kf as u32, Clamp::Free)
    };
    let (m, m_clamp) = auto_m(dim_f, n, dims, h_a_br, delta)?;
    Ok(Sizes {
        dim_f,
        m,
        log2_f: (dim_f as f64).log2(),
        log2_m: (m as f64).log2(),
        f_clamp,
        m_clamp,
    })
}

/// Automatic `M` for a given `|F|`, clamped to `[1, |F|²]`.
pub fn auto_m(dim_f: usize, n: usize, dims: Dims, h_a_br: f64, delta: f64) -> Result<(usize, Clamp)> {
    let km = ceil_bits(raw_log2_m_over_f(n, dims, h_a_br, delta));
    let cap = dim_f.checked_mul(dim_f).ok_or_else(|| Error::Capacity {
        what: "twirl size |F|^2".into(),
        required: usize::MAX,
        cap: usize::MAX,
    })?;
    let target = dim_f as f64 * km.exp2();
    Ok(if target > cap as f64 {
        (cap, Clamp::High)
    } else if target < 1.0 {
        (1, Clamp::Low)
    } else {
        (target.ceil() as usize, Clamp::Free)
    })
}

/// The same clamped size formulas without the ceilings, as real bit counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousSizes {
    pub log2_f: f64,
    pub log2_m: f64,
    pub f_clamp: Clamp,
    pub m_clamp: Clamp,
}

pub fn continuous_sizes(n: usize, dims: Dims, h_tilde_a_b: f64, h_a_br: f64, delta: f64) -> ContinuousSizes {
    let max_bits = n as f64 * (dims.a as f64).log2();
    let raw_f = raw_log2_f(n, dims, h_tilde_a_b, delta);
    let (log2_f, f_clamp) = if raw_f < 0.0 {
        (0.0, Clamp::Low)
    } else if raw_f > max_bits {
        (max_bits, Clamp::High)
    } else {
        (raw_f, Clamp::Free)
    };
    let raw_m = log2_f + raw_log2_m_over_f(n, dims, h_a_br, delta);
    let (log2_m, m_clamp) = if raw_m < 0.0 {
        (0.0, Clamp::Low)
    } else if raw_m > 2.0 * log2_f {
        (2.0 * log2_f, Clamp::High)
    } else {
        (raw_m, Clamp::Free)
    };
    ContinuousSizes {
        log2_f,
        log2_m,
        f_clamp,
        m_clamp,
    }
}

/// The integer automatic sizes of [`auto_sizes`] as bit counts, without
/// building the dimensions (so any `n` works).
pub fn auto_size_bits(n: usize, dims: Dims, h_tilde_a_b: f64, h_a_br: f64, delta: f64) -> ContinuousSizes {
    let max_bits = n as f64 * (dims.a as f64).log2();
    let kf = ceil_bits(raw_log2_f(n, dims, h_tilde_a_b, delta));
    let (log2_f, f_clamp) = if kf <= 0.0 {
        (0.0, if kf < 0.0 { Clamp::Low } else { Clamp::Free })
    } else if kf >= max_bits - 1e-12 {
        (max_bits, if kf > max_bits + 1e-12 { Clamp::High } else { Clamp::Free })
    } else {
        (kf, Clamp::Free)
    };
    let raw_m = log2_f + ceil_bits(raw_log2_m_over_f(n, dims, h_a_br, delta));
    let (log2_m, m_clamp) = if raw_m < 0.0 {
        (0.0, Clamp::Low)
    } else if raw_m > 2.0 * log2_f {
        (2.0 * log2_f, Clamp::High)
    } else {
        (raw_m, Clamp::Free)
    };
    ContinuousSizes {
        log2_f,
        log2_m,
        f_clamp,
        m_clamp,
    }
}

fn checked_pow(base: usize, n: usize) -> Result<usize> {
    base.checked_pow(n as u32).ok_or_else(|| Error::Capacity {
        what: format!("dimension {base}^{n}"),
        required: usize::MAX,
        cap: usize::MAX,
    })
}

/// Every closed-form quantity at one parameter point.
/// Non-finite values serialize as `"inf"`, `"-inf"` or `"nan"`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    #[serde(serialize_with = "crate::sentinel::sentinel")]
    pub alpha: f64,
    #[serde(serialize_with = "crate::sentinel::sentinel")]
    pub alpha_tilde: f64,
    pub n: usize,
    #[serde(serialize_with = "crate::sentinel::sentinel")]
    pub delta: f64,
    pub dims: Dims,
    #[serde(serialize_with = "crate::sentinel::sentinel")]
    pub log2_f: f64,
    #[serde(serialize_with = "crate::sentinel::sentinel")]
    pub log2_m: f64,
    #[serde(serialize_with = "crate::sentinel::sentinel")]
    pub h_tilde_a_given_b: f64,
    #[serde(serialize_with = "crate::sentinel::sentinel")]
    pub h_alpha_a_given_br: f64,
    #[serde(serialize_with = "crate::sentinel::sentinel")]
    pub h_alpha_a_given_re: f64,
    #[serde(serialize_with = "crate::sentinel::sentinel")]
    pub eps_bound: f64,
    #[serde(serialize_with = "crate::sentinel::sentinel")]
    pub theta_bound: f64,
    /// `2 Ξ(ε_n) + 2 ϑ_n`.
    #[serde(serialize_with = "crate::sentinel::sentinel")]
    pub chain_bound_erasure: f64,
    /// `log M / n`.
    #[serde(serialize_with = "crate::sentinel::sentinel")]
    pub rate: f64,
    #[serde(serialize_with = "crate::sentinel::sentinel")]
    pub rate_formula: f64,
    #[serde(serialize_with = "crate::sentinel::sentinel")]
    pub cmi_target: f64,
    /// Either bound exceeds 2.
    pub vacuous: bool,
    pub base: ExpBase,
}

pub fn bound_report(ent: &Entropies, n: usize, delta: f64, log2_f: f64, log2_m: f64, base: ExpBase) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let d = ent.dims;
    let eps_bound = 8.0 * base.pow(epsilon_exponent(ent.alpha, n, d.r, d.e, ent.h_alpha_a_given_re, log2_f));
    let theta_bound = 8.0 * base.pow(theta_exponent(ent.alpha, n, d.b, d.r, ent.h_alpha_a_given_br, log2_m, log2_f));
    Ok(BoundReport {
        alpha: ent.alpha,
        alpha_tilde: ent.alpha_tilde,
        n,
        delta,
        dims: d,
        log2_f,
        log2_m,
        h_tilde_a_given_b: ent.h_tilde_a_given_b,
        h_alpha_a_given_br: ent.h_alpha_a_given_br,
        h_alpha_a_given_re: ent.h_alpha_a_given_re,
        eps_bound,
        theta_bound,
        chain_bound_erasure: 2.0 * xi(eps_bound)? + 2.0 * theta_bound,
        rate: log2_m / n as f64,
        rate_formula: rate_formula(delta, n, d, ent.h_tilde_a_given_b, ent.h_alpha_a_given_br),
        cmi_target: ent.cmi,
        vacuous: eps_bound > TRIVIAL_TRACE_DISTANCE || theta_bound > TRIVIAL_TRACE_DISTANCE,
        base,
    })
}

/// `log₂(ε_n ϑ_n / 64)` under continuous automatic sizes.
///
/// `log|F|` cancels between the two exponents, leaving
/// `k [(|R||E| + |B||R|) log(n+1) − n (H_α(A|RE) + H_α(A|BR)) − log M]`.
pub fn product_exponent(ent: &Entropies, n: usize, delta: f64) -> f64 {
    let d = ent.dims;
    let s = continuous_sizes(n, d, ent.h_tilde_a_given_b, ent.h_alpha_a_given_br, delta);
    epsilon_exponent(ent.alpha, n, d.r, d.e, ent.h_alpha_a_given_re, s.log2_f)
        + theta_exponent(ent.alpha, n, d.b, d.r, ent.h_alpha_a_given_br, s.log2_m, s.log2_f)
}

/// `ε_n ϑ_n` under continuous automatic sizes.
pub fn bound_product(ent: &Entropies, n: usize, delta: f64) -> f64 {
    let d = ent.dims;
    let s = continuous_sizes(n, d, ent.h_tilde_a_given_b, ent.h_alpha_a_given_br, delta);
    epsilon_n(ent.alpha, n, d.r, d.e, ent.h_alpha_a_given_re, s.log2_f)
        * theta_n(ent.alpha, n, d.b, d.r, ent.h_alpha_a_given_br, s.log2_m, s.log2_f)
}

/// Large-`n` behavior of `log₂(ε_n ϑ_n)`: once the clamping pattern of the
/// sizes stops changing it equals `k (c log₂(n+1) − λ n) + const`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayAnalysis {
    /// First `n` from which the clamping pattern is final.
    pub stable_from: usize,
    pub f_clamp: Clamp,
    pub m_clamp: Clamp,
    /// Coefficient `c` of `log₂(n+1)`.
    pub log_coefficient: f64,
    /// Slope `λ` of the linear term.
    pub slope: f64,
    /// Crossover: the product decreases strictly for every `n ≥ n0`.
    /// `None` when `λ ≤ 0` and there is no decay.
    pub n0: Option<usize>,
}

/// Smallest `n ≥ 1` with `log₂(m+1)/m < t` for all `m ≥ n` (the left side is
/// decreasing in `m`).
fn ell_below(t: f64) -> usize {
    let ell = |m: usize| log2_succ(m) / m as f64;
    if t > 1.0 {
        return 1;
    }
    if t <= 0.0 {
        return usize::MAX;
    }
    let (mut lo, mut hi) = (1usize, 2usize);
    while ell(hi) >= t {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ell(mid) < t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// First `n` from which `a + b log₂(n+1)/n` keeps a fixed sign.
fn sign_settles(a: f64, b: f64) -> usize {
    if b == 0.0 || a == 0.0 {
        return 1;
    }
    ell_below((a / b).abs())
}

pub fn decay_analysis(ent: &Entropies, delta: f64) -> DecayAnalysis {
    let d = ent.dims;
    let (ht, h) = (ent.h_tilde_a_given_b, ent.h_alpha_a_given_br);
    let la = (d.a as f64).log2();
    let re = (d.r * d.e) as f64;
    let br = (d.b * d.r) as f64;
    // every clamp condition reads a + b·log(n+1)/n ≷ 0 for some regime of F
    let conditions = [
        (ht + delta / 2.0 - la, re),
        (ht + delta / 2.0, re),
        (-h - ht, br - re),
        (-h + delta / 2.0 - la, br),
        (-h + delta / 2.0, br),
        (ht - h + delta, re + br),
        (la - h + delta / 2.0, br),
    ];
    let stable_from = conditions.iter().map(|&(a, b)| sign_settles(a, b)).max().unwrap_or(1);
    let s = continuous_sizes(stable_from.max(1), d, ht, h, delta);
    // log M = λ_M n + c_M log(n+1) in the final regime
    let (lambda_m, c_m) = match (s.f_clamp, s.m_clamp) {
        (_, Clamp::Low) => (0.0, 0.0),
        (Clamp::Free, Clamp::Free) => (ht - h + delta, re + br),
        (Clamp::High, Clamp::Free) => (la - h + delta / 2.0, br),
        (Clamp::Low, Clamp::Free) => (-h + delta / 2.0, br),
        (Clamp::Free, Clamp::High) => (2.0 * ht + delta, 2.0 * re),
        (Clamp::High, Clamp::High) => (2.0 * la, 0.0),
        (Clamp::Low, Clamp::High) => (0.0, 0.0),
    };
    let c = re + br - c_m;
    let slope = ent.h_alpha_a_given_re + h + lambda_m;
    let n0 = if slope > 0.0 {
        let turn = if c > 0.0 {
            (c / (slope * std::f64::consts::LN_2) - 1.0).ceil().max(1.0) as usize
        } else {
            1
        };
        Some(turn.max(stable_from))
    } else {
        None
    };
    DecayAnalysis {
        stable_from,
        f_clamp: s.f_clamp,
        m_clamp: s.m_clamp,
        log_coefficient: c,
        slope,
        n0,
    }
}
