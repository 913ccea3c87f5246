//! Seeded sweeps over `(n, α, sample)`.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{SizeMode, StateSource, SweepConfig};
use super::record::{RunRecord, RunValues};
use crate::error::{Error, Result};
use crate::protocol::{run_protocol, ProtocolConfig};
use crate::rng::derive_seed;
use crate::states::format::read_state_file;
use crate::states::{random_density, DensityOperator};
use crate::tensor::SubsystemLayout;

/// One grid point and sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkItem {
    pub run_id: usize,
    pub n_index: usize,
    pub alpha_index: usize,
    pub sample: usize,
    pub seed: u64,
}

/// Work items in grid order: `n` outermost, then `α`, then the sample index.
pub fn work_items(config: &SweepConfig) -> Vec<WorkItem> {
    let mut items = Vec::with_capacity(config.n_list.len() * config.alpha_list.len() * config.samples);
    for ni in 0..config.n_list.len() {
        for ai in 0..config.alpha_list.len() {
            for sample in 0..config.samples {
                items.push(WorkItem {
                    run_id: items.len(),
                    n_index: ni,
                    alpha_index: ai,
                    sample,
                    seed: derive_seed(config.master_seed, &[ni as u64, ai as u64, sample as u64]),
                });
            }
        }
    }
    items
}

/// Seeded random state for the `random` source.
pub fn random_qubit_state(rank: usize, seed: u64) -> Result<DensityOperator> {
    random_density(SubsystemLayout::new([("A", 2), ("B", 2), ("R", 2)])?, rank, seed)
}

fn load_state(source: &StateSource) -> Option<Result<DensityOperator>> {
    match source {
        StateSource::Builtin(b) => Some(Ok(b.state())),
        StateSource::Random { rank, seed: Some(s) } => Some(random_qubit_state(*rank, *s)),
        StateSource::Random { seed: None, .. } => None,
        StateSource::File(p) => Some(read_input(p)),
    }
}

fn read_input(path: &Path) -> Result<DensityOperator> {
    read_state_file(path)
        .map(|s| s.into_density())
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run_item(config: &SweepConfig, shared: &Option<Result<DensityOperator>>, item: WorkItem) -> RunRecord {
    let start = Instant::now();
    let n = config.n_list[item.n_index];
    let alpha = config.alpha_list[item.alpha_index];
    let (log2_f, log2_m) = match config.sizes {
        SizeMode::Auto => (None, None),
        SizeMode::Explicit { log2_f, log2_m } => (Some(log2_f), log2_m),
    };
    let outcome = (|| {
        let rho = match (shared, &config.state) {
            (Some(r), _) => r.clone()?,
            (None, StateSource::Random { rank, .. }) => random_qubit_state(*rank, derive_seed(item.seed, &[0]))?,
            (None, _) => unreachable!("only unseeded random sources are loaded per record"),
        };
        let mut pc = ProtocolConfig::new(rho, n, item.seed);
        pc.alpha = alpha;
        pc.delta = config.delta;
        pc.log2_f = log2_f;
        pc.log2_m = log2_m;
        pc.num_u_candidates = config.num_u_candidates;
        pc.base = config.base;
        run_protocol(&pc)
    })();
    let duration_ms = if config.timing { start.elapsed().as_millis() as u64 } else { 0 };
    let (values, error) = match outcome {
        Ok(run) => (Some(RunValues::from_run(&run)), None),
        Err(e) => (None, Some(e.to_string())),
    };
    RunRecord {
        run_id: item.run_id,
        seed: item.seed,
        state: config.state.to_string(),
        n,
        alpha,
        delta: config.delta,
        num_u_candidates: config.num_u_candidates,
        base: config.base.name().to_string(),
        log2_f_requested: log2_f,
        log2_m_requested: log2_m,
        values,
        duration_ms,
        error,
    }
}

/// Run every work item in parallel; records come back in grid order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<RunRecord>> {
    run_sweep_with(config, true)
}

/// [`run_sweep`] with parallel execution switchable off.
pub fn run_sweep_with(config: &SweepConfig, parallel: bool) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let shared = load_state(&config.state);
    let items = work_items(config);
    Ok(if parallel {
        items.par_iter().map(|&it| run_item(config, &shared, it)).collect()
    } else {
        items.iter().map(|&it| run_item(config, &shared, it)).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{render, OutputFormat};

    fn small() -> SweepConfig {
        SweepConfig {
            state: StateSource::Random { rank: 4, seed: None },
            n_list: vec![1, 2],
            alpha_list: vec![1.5, 2.0],
            samples: 3,
            num_u_candidates: 2,
            master_seed: 5,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn single_point_gives_one_record() {
        let recs = run_sweep(&SweepConfig::default()).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].error.is_none());
    }

    #[test]
    fn grid_order_and_count() {
        let recs = run_sweep(&small()).unwrap();
        assert_eq!(recs.len(), 12);
        let order: Vec<(usize, f64)> = recs.iter().map(|r| (r.n, r.alpha)).collect();
        assert_eq!(order[0], (1, 1.5));
        assert_eq!(order[3], (1, 2.0));
        assert_eq!(order[6], (2, 1.5));
        assert!(recs.iter().enumerate().all(|(i, r)| r.run_id == i));
    }

    #[test]
    fn parallel_and_serial_outputs_match() {
        let cfg = small();
        let a = render(&run_sweep_with(&cfg, true).unwrap(), OutputFormat::Csv).unwrap();
        let b = render(&run_sweep_with(&cfg, false).unwrap(), OutputFormat::Csv).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn record_reproducible_in_isolation() {
        let cfg = small();
        let recs = run_sweep(&cfg).unwrap();
        let item = work_items(&cfg)[7];
        let alone = run_item(&cfg, &None, item);
        assert_eq!(alone, recs[7]);
    }

    #[test]
    fn failures_become_error_records() {
        let cfg = SweepConfig {
            state: StateSource::File("/nonexistent/state.txt".into()),
            samples: 2,
            ..SweepConfig::default()
        };
        let recs = run_sweep(&cfg).unwrap();
        assert_eq!(recs.len(), 2);
        assert!(recs.iter().all(|r| r.error.is_some() && r.values.is_none()));
        let cfg = SweepConfig {
            n_list: vec![1, 12],
            ..SweepConfig::default()
        };
        let recs = run_sweep(&cfg).unwrap();
        assert!(recs[0].error.is_none());
        assert!(recs[1].error.as_deref().unwrap().contains("cap"));
    }
}
