//! `sweep`: rebuild the characteristic function across a delay range, track
//! the rightmost root, and report stability switches. CSV carries the
//! `(tau, max_re)` samples; the JSON document carries the switch events and
//! any per-point warnings.

use crate::args::SweepArgs;
use crate::emit::{self, Json};
use crate::fail::{CliResult, Failure, Located};
use crate::modelfile::{self, ResolvedModel};
use delaylab::spectral::{linearize_at, stability_switch_scan, SwitchDirection};
use delaylab::zoo::make_model;
use delaylab::{Error, QuasiPolynomial64};

type Builder = Box<dyn Fn(f64) -> delaylab::Result<QuasiPolynomial64> + Sync>;

pub fn run(args: &SweepArgs) -> CliResult<()> {
    const LOC: &str = "sweep";
    if !(args.tau_min >= 0.0) {
        return Err(Failure::config(LOC, "tau_min must be >= 0"));
    }
    let vary = args.vary.clone().unwrap_or_else(|| "tau".to_string());
    // The varied parameter needs no base value on the command line; seed it
    // with the range start so the model resolves.
    let resolved = modelfile::resolve(&args.source, &[(&vary, args.tau_min)], LOC)?;
    let window = modelfile::resolve_window(&resolved.options, &args.window, LOC)?;

    let builder: Builder = match &resolved.model {
        ResolvedModel::Named(spec) => {
            if !spec.parameters.contains_key(&vary) {
                return Err(Failure::config(
                    LOC,
                    format!("model '{}' has no parameter '{vary}'", spec.name),
                ));
            }
            if args.vary_delay.is_some() {
                return Err(Failure::config(
                    LOC,
                    "--vary-delay applies to inline linear models; use --vary here",
                ));
            }
            // Validate the index once against the base spec; per-tau specs
            // keep the same list for delay parameters.
            modelfile::choose_steady_state(spec, args.steady_state, LOC)?;
            let name = spec.name;
            let base = spec.parameters.clone();
            let index = args.steady_state;
            Box::new(move |tau| {
                let mut params = base.clone();
                params.insert(vary.clone(), tau);
                let spec = make_model(name, &params)?;
                if let Some(q) = spec.char_fun {
                    return Ok(q);
                }
                let states = &spec.steady_states;
                let idx = match index {
                    Some(i) if i < states.len() => i,
                    Some(i) => {
                        return Err(Error::invalid(format!(
                            "steady-state index {i} out of range at this parameter value"
                        )))
                    }
                    None => states
                        .iter()
                        .rposition(|(x, _)| x.iter().all(|&v| v > 0.0))
                        .unwrap_or(states.len() - 1),
                };
                let anchor = states[idx].0.clone();
                let sys = spec
                    .system
                    .as_ref()
                    .expect("zoo models without a characteristic function carry a system");
                linearize_at(sys, &anchor)
            })
        }
        ResolvedModel::Linear(lm) => {
            if args.vary.is_some() {
                return Err(Failure::config(
                    LOC,
                    "--vary names a model parameter; inline linear models take --vary-delay",
                ));
            }
            if lm.delayed.is_empty() {
                return Err(Failure::config(
                    LOC,
                    "the inline linear model has no delayed blocks to vary",
                ));
            }
            let idx = args.vary_delay.unwrap_or(0);
            if idx >= lm.delayed.len() {
                return Err(Failure::config(
                    LOC,
                    format!(
                        "--vary-delay {idx} out of range; the model has {} delayed blocks",
                        lm.delayed.len()
                    ),
                ));
            }
            let lm = lm.clone();
            Box::new(move |tau| {
                let mut copy = lm.clone();
                copy.delayed[idx].0 = tau;
                copy.char_fun()
            })
        }
        ResolvedModel::Lv { .. } => {
            return Err(Failure::config(
                LOC,
                "sweep varies a discrete delay; the exponential-kernel model has none \
                 (its memory parameter is kernel_rate)",
            ))
        }
    };

    let outcome = stability_switch_scan(builder, args.tau_min, args.tau_max, args.grid, &window)
        .at("sweep: scan")?;

    // CSV: evaluated grid points only; skipped points surface as warnings.
    let mut csv = String::from("tau,max_re\n");
    for s in &outcome.samples {
        if let Some(sigma) = s.sigma {
            emit::csv_row(&[s.tau, sigma], &mut csv);
        }
    }

    let events: Vec<Json> = outcome
        .events
        .iter()
        .map(|ev| {
            Json::obj(vec![
                ("tau_star", Json::Num(ev.tau_star)),
                (
                    "direction",
                    Json::str(match ev.direction {
                        SwitchDirection::Destabilizing => "destabilizing",
                        SwitchDirection::Stabilizing => "stabilizing",
                    }),
                ),
                ("crossing_frequency", Json::Num(ev.crossing_frequency)),
            ])
        })
        .collect();
    let doc = Json::obj(vec![
        ("tau_min", Json::Num(args.tau_min)),
        ("tau_max", Json::Num(args.tau_max)),
        ("grid", Json::Int(args.grid as i64)),
        ("window", emit::window(&window)),
        ("events", Json::Arr(events)),
        (
            "warnings",
            Json::Arr(outcome.warnings.iter().map(Json::str).collect()),
        ),
    ]);

    emit::write_out(args.out.as_deref(), &csv, LOC)?;
    emit::write_out(args.events_out.as_deref(), &doc.render(), LOC)
}
