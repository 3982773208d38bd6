//! Grid execution: run every uncached point of a sweep, append the records
//! in grid order, and refresh the CSV summary.

use rayon::prelude::*;

use crate::experiments::{Experiment, RunContext};
use crate::record::{cache_key, code_version, csv_sibling, ExperimentRecord, Params, RecordStore};
use crate::LabError;

#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub executed: usize,
    pub skipped_cached: usize,
    pub failed: usize,
    /// Records produced by this invocation (cached points excluded).
    pub new_records: Vec<ExperimentRecord>,
}

/// Run the grid points that are not already cached; failures become records
/// with the error field set and the run continues.
pub fn run_sweep(
    experiment: &dyn Experiment,
    points: Vec<Params>,
    store: &mut RecordStore,
    ctx: &RunContext,
) -> Result<SweepOutcome, LabError> {
    let mut outcome = SweepOutcome::default();
    let mut pending = Vec::new();
    for params in points {
        let key = cache_key(experiment.name(), &params, code_version());
        if store.contains(&key) {
            outcome.skipped_cached += 1;
        } else {
            pending.push(params);
        }
    }

    // Points are independent; results are collected in grid order so the
    // appended file is deterministic.
    let results: Vec<ExperimentRecord> = pending
        .into_par_iter()
        .map(|params| match experiment.run(&params, ctx) {
            Ok(rec) => rec,
            Err(err) => {
                let mut rec = ExperimentRecord::new(experiment.name(), params);
                rec.error = Some(err.to_string());
                rec
            }
        })
        .collect();

    for rec in results {
        if rec.error.is_some() {
            outcome.failed += 1;
        }
        outcome.executed += 1;
        store.append(rec.clone())?;
        outcome.new_records.push(rec);
    }

    crate::record::write_csv(&csv_sibling(store.path()), store.records())?;
    Ok(outcome)
}
