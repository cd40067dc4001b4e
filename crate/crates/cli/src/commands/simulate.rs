//! `simulate`: integrate a model and print the trajectory as CSV
//! (header `t,x1,..,xn`, rows on a uniform output grid).

use crate::args::SimulateArgs;
use crate::emit;
use crate::fail::{CliResult, Failure, Located};
use crate::modelfile::{self, ResolvedModel};
use delaylab::chaintrick::{reduce_exponential_kernel, reduced_initial_state};
use delaylab::stepper::integrate;
use delaylab::{History64, IntegratorOptions64, System64};

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    const LOC: &str = "simulate";
    let resolved = modelfile::resolve(&args.source, &[], LOC)?;
    let run = modelfile::resolve_run(
        &resolved.options,
        args.step,
        args.t_end,
        args.output_points,
        LOC,
    )?;
    let span = modelfile::default_span(&resolved.model);

    let (sys, history): (System64, History64) = match &resolved.model {
        ResolvedModel::Named(spec) => {
            let sys = spec.system.clone().ok_or_else(|| {
                Failure::config(
                    LOC,
                    format!(
                        "model '{}' has no simulable right-hand side (spectral-only); \
                         use analyze",
                        spec.name
                    ),
                )
            })?;
            let history = match &resolved.history {
                Some(h) => modelfile::build_history(h, span, LOC)?,
                None => spec.default_history.clone(),
            };
            (sys, history)
        }
        ResolvedModel::Linear(lm) => {
            let history = match &resolved.history {
                Some(h) => modelfile::build_history(h, span, LOC)?,
                None => History64::constant(span, &vec![1.0; lm.dim]).at(LOC)?,
            };
            (lm.system(), history)
        }
        ResolvedModel::Lv {
            model,
            reduced_state,
        } => {
            let n = model.species();
            let state0 = if *reduced_state {
                let values = resolved
                    .history
                    .as_ref()
                    .and_then(|h| h.constant.as_ref())
                    .ok_or_else(|| {
                        Failure::config(
                            LOC,
                            "a reduced-state model carries its initial state as a \
                             'constant' history",
                        )
                    })?;
                if values.len() != 2 * n {
                    return Err(Failure::config(
                        LOC,
                        format!(
                            "reduced state needs 2n = {} components, got {}",
                            2 * n,
                            values.len()
                        ),
                    ));
                }
                values.clone()
            } else {
                let hist_n = match &resolved.history {
                    Some(h) => modelfile::build_history(h, span, LOC)?,
                    None => modelfile::default_lv_history(model, LOC)?,
                };
                reduced_initial_state(model, &hist_n).at("simulate: kernel integration")?
            };
            // The reduced system is an ODE: a zero-length span carries the
            // initial state.
            let history = History64::constant(0.0, &state0).at(LOC)?;
            (reduce_exponential_kernel(model), history)
        }
    };

    let opts = IntegratorOptions64::new(run.step, run.t_end);
    let tr = integrate(&sys, &history, &opts).at("simulate: integration")?;

    let dim = tr.dimension();
    let mut out = String::with_capacity(run.output_points * (dim + 1) * 24);
    out.push('t');
    for i in 1..=dim {
        out.push_str(&format!(",x{i}"));
    }
    out.push('\n');
    let mut row = vec![0.0; dim + 1];
    let mut state = vec![0.0; dim];
    let last = (run.output_points - 1) as f64;
    for i in 0..run.output_points {
        let t = run.t_end * (i as f64) / last;
        tr.eval_into(t, &mut state).at("simulate: output grid")?;
        row[0] = t;
        row[1..].copy_from_slice(&state);
        emit::csv_row(&row, &mut out);
    }
    emit::write_out(args.out.as_deref(), &out, LOC)
}
