//! Per-run records and their CSV / JSON encodings.
//!
//! CSV columns, in order:
//!
//! `run_id, seed, n, dimA, dimB, dimR, dimE, alpha, delta, log2_F, log2_M,
//! eps_emp, eps_bound, theta_emp, theta_bound, erasure_err, marginal_err,
//! decon_err, chain_bound_emp, chain_bound_theory, rate, rate_formula,
//! cmi_target, vacuous_flag, duration_ms, error`
//!
//! `chain_bound_emp` is `2Ξ(eps_emp) + 2 theta_emp` and `chain_bound_theory` is
//! `2Ξ(eps_bound) + 2 theta_bound`. Non-finite numbers are written as `inf`,
//! `-inf` or `nan`, in JSON as strings. Failed runs keep their identifying
//! fields, leave the measured ones empty (`null` in JSON) and carry the message
//! in `error`.

use std::io::Write;

use serde::Serialize;

use crate::bounds::Clamp;
use crate::error::{Error, Result};
use crate::protocol::ProtocolRun;
use crate::sentinel::{num, sentinel, sentinel_vec};

pub const CSV_COLUMNS: [&str; 26] = [
    "run_id",
    "seed",
    "n",
    "dimA",
    "dimB",
    "dimR",
    "dimE",
    "alpha",
    "delta",
    "log2_F",
    "log2_M",
    "eps_emp",
    "eps_bound",
    "theta_emp",
    "theta_bound",
    "erasure_err",
    "marginal_err",
    "decon_err",
    "chain_bound_emp",
    "chain_bound_theory",
    "rate",
    "rate_formula",
    "cmi_target",
    "vacuous_flag",
    "duration_ms",
    "error",
];

/// Measured and closed-form quantities of a completed run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunValues {
    pub dim_a: usize,
    pub dim_b: usize,
    pub dim_r: usize,
    pub dim_e: usize,
    #[serde(serialize_with = "sentinel")]
    pub log2_f: f64,
    #[serde(serialize_with = "sentinel")]
    pub log2_m: f64,
    pub dim_f: usize,
    pub m: usize,
    pub f_clamp: Clamp,
    pub m_clamp: Clamp,
    #[serde(serialize_with = "sentinel")]
    pub eps_emp: f64,
    #[serde(serialize_with = "sentinel")]
    pub eps_bound: f64,
    #[serde(serialize_with = "sentinel")]
    pub theta_emp: f64,
    #[serde(serialize_with = "sentinel")]
    pub theta_bound: f64,
    #[serde(serialize_with = "sentinel")]
    pub erasure_err: f64,
    #[serde(serialize_with = "sentinel")]
    pub marginal_err: f64,
    #[serde(serialize_with = "sentinel")]
    pub decon_err: f64,
    #[serde(serialize_with = "sentinel")]
    pub product_err: f64,
    #[serde(serialize_with = "sentinel")]
    pub erasure_err_marginal_tau: f64,
    #[serde(serialize_with = "sentinel")]
    pub uhlmann_distance: f64,
    #[serde(serialize_with = "sentinel")]
    pub uhlmann_distance_unnormalized: f64,
    #[serde(serialize_with = "sentinel")]
    pub target_norm_sq: f64,
    #[serde(serialize_with = "sentinel")]
    pub chain_bound_emp: f64,
    #[serde(serialize_with = "sentinel")]
    pub chain_bound_theory: f64,
    #[serde(serialize_with = "sentinel")]
    pub h_tilde_a_given_b: f64,
    #[serde(serialize_with = "sentinel")]
    pub h_alpha_a_given_br: f64,
    #[serde(serialize_with = "sentinel")]
    pub h_alpha_a_given_re: f64,
    #[serde(serialize_with = "sentinel")]
    pub rate: f64,
    #[serde(serialize_with = "sentinel")]
    pub rate_formula: f64,
    #[serde(serialize_with = "sentinel")]
    pub cmi_target: f64,
    pub vacuous: bool,
    pub best_candidate: usize,
    #[serde(serialize_with = "sentinel_vec")]
    pub eps_candidates: Vec<f64>,
    #[serde(serialize_with = "sentinel_vec")]
    pub theta_candidates: Vec<f64>,
}

impl RunValues {
    pub fn from_run(run: &ProtocolRun) -> Self {
        let b = &run.bounds;
        RunValues {
            dim_a: b.dims.a,
            dim_b: b.dims.b,
            dim_r: b.dims.r,
            dim_e: b.dims.e,
            log2_f: run.sizes.log2_f,
            log2_m: run.sizes.log2_m,
            dim_f: run.sizes.dim_f,
            m: run.sizes.m,
            f_clamp: run.sizes.f_clamp,
            m_clamp: run.sizes.m_clamp,
            eps_emp: run.eps_emp,
            eps_bound: b.eps_bound,
            theta_emp: run.theta_emp,
            theta_bound: b.theta_bound,
            erasure_err: run.erasure_err,
            marginal_err: run.marginal_err,
            decon_err: run.decon_err,
            product_err: run.product_err,
            erasure_err_marginal_tau: run.erasure_err_marginal_tau,
            uhlmann_distance: run.uhlmann_distance,
            uhlmann_distance_unnormalized: run.uhlmann_distance_unnormalized,
            target_norm_sq: run.target_norm_sq,
            chain_bound_emp: run.chain_bound_erasure,
            chain_bound_theory: b.chain_bound_erasure,
            h_tilde_a_given_b: b.h_tilde_a_given_b,
            h_alpha_a_given_br: b.h_alpha_a_given_br,
            h_alpha_a_given_re: b.h_alpha_a_given_re,
            rate: b.rate,
            rate_formula: b.rate_formula,
            cmi_target: b.cmi_target,
            vacuous: b.vacuous,
            best_candidate: run.best_candidate,
            eps_candidates: run.candidates.iter().map(|c| c.eps).collect(),
            theta_candidates: run.candidates.iter().map(|c| c.theta).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub run_id: usize,
    pub seed: u64,
    pub state: String,
    pub n: usize,
    #[serde(serialize_with = "sentinel")]
    pub alpha: f64,
    #[serde(serialize_with = "sentinel")]
    pub delta: f64,
    pub num_u_candidates: usize,
    pub base: String,
    /// Requested `log₂|F|`, when not automatic.
    pub log2_f_requested: Option<f64>,
    pub log2_m_requested: Option<f64>,
    pub values: Option<RunValues>,
    pub duration_ms: u64,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn csv_row(&self) -> Vec<String> {
        let v = self.values.as_ref();
        let opt = |f: &dyn Fn(&RunValues) -> String| v.map(f).unwrap_or_default();
        let mut row = vec![self.run_id.to_string(), self.seed.to_string(), self.n.to_string()];
        row.push(opt(&|v| v.dim_a.to_string()));
        row.push(opt(&|v| v.dim_b.to_string()));
        row.push(opt(&|v| v.dim_r.to_string()));
        row.push(opt(&|v| v.dim_e.to_string()));
        row.push(num(self.alpha));
        row.push(num(self.delta));
        let fields: [fn(&RunValues) -> f64; 14] = [
            |v| v.log2_f,
            |v| v.log2_m,
            |v| v.eps_emp,
            |v| v.eps_bound,
            |v| v.theta_emp,
            |v| v.theta_bound,
            |v| v.erasure_err,
            |v| v.marginal_err,
            |v| v.decon_err,
            |v| v.chain_bound_emp,
            |v| v.chain_bound_theory,
            |v| v.rate,
            |v| v.rate_formula,
            |v| v.cmi_target,
        ];
        for f in &fields {
            row.push(opt(&|v| num(f(v))));
        }
        row.push(opt(&|v| v.vacuous.to_string()));
        row.push(self.duration_ms.to_string());
        row.push(self.error.clone().unwrap_or_default());
        row
    }
}

pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in records {
        w.write_record(r.csv_row()).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(records: &[RunRecord], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, records).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Records rendered in `format` as bytes.
pub fn render(records: &[RunRecord], format: super::OutputFormat) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        super::OutputFormat::Csv => write_csv(records, &mut buf)?,
        super::OutputFormat::Json => write_json(records, &mut buf)?,
    }
    Ok(buf)
}
