//! `reduce`: collapse an exponential-kernel model to its equivalent `2n` ODE
//! system. The output is itself a model file: `simulate` reads it back and
//! reproduces the reduced trajectory, because the initial state is written
//! with 17 significant digits (lossless for f64).

use crate::args::ReduceArgs;
use crate::emit::{self, Json};
use crate::fail::{CliResult, Failure, Located};
use crate::modelfile::{self, ResolvedModel};
use delaylab::chaintrick::{duplicated_steady_state, lv_steady_state, reduced_initial_state};
use delaylab::LotkaVolterraDistributed64;

pub fn run(args: &ReduceArgs) -> CliResult<()> {
    const LOC: &str = "reduce";
    let source = crate::args::ModelSource {
        model: None,
        model_file: Some(args.model_file.clone()),
        params: Vec::new(),
    };
    let resolved = modelfile::resolve(&source, &[], LOC)?;
    let model: &LotkaVolterraDistributed64 = match &resolved.model {
        ResolvedModel::Lv {
            model,
            reduced_state,
        } => {
            if *reduced_state {
                return Err(Failure::config(
                    LOC,
                    "the model file already carries a reduced state",
                ));
            }
            model
        }
        _ => {
            return Err(Failure::config(
                LOC,
                "reduce applies to inline lv_distributed models",
            ))
        }
    };

    let n = model.species();
    let x_star = lv_steady_state(model).at("reduce: steady state")?;
    let dup = duplicated_steady_state(model).at("reduce: steady state")?;
    let history = match &resolved.history {
        Some(h) => modelfile::build_history(h, -1.0, LOC)?,
        None => modelfile::default_lv_history(model, LOC)?,
    };
    let state0 = reduced_initial_state(model, &history).at("reduce: kernel integration")?;

    let run = modelfile::resolve_run(&resolved.options, None, None, None, LOC)?;
    let window = modelfile::resolve_window(
        &resolved.options,
        &crate::args::WindowArgs {
            re_min: None,
            re_max: None,
            im_max: None,
        },
        LOC,
    )?;

    let lv = Json::obj(vec![
        ("growth", Json::nums(model.growth_rates())),
        ("interactions", Json::num_rows(model.interactions())),
        ("kernel_weights", Json::num_rows(model.kernel_weights())),
        ("kernel_rate", Json::Num(model.alpha())),
        ("reduced_state", Json::Bool(true)),
    ]);
    let doc = Json::obj(vec![
        ("schema_version", Json::Int(1)),
        ("model", Json::obj(vec![("lv_distributed", lv)])),
        ("params", Json::Obj(Vec::new())),
        (
            "history",
            Json::obj(vec![
                ("span_start", Json::Num(0.0)),
                ("constant", Json::nums(&state0)),
            ]),
        ),
        (
            "options",
            Json::obj(vec![
                ("step", Json::Num(run.step)),
                ("t_end", Json::Num(run.t_end)),
                ("output_points", Json::Int(run.output_points as i64)),
                ("window", emit::window(&window)),
            ]),
        ),
        (
            "reduced",
            Json::obj(vec![
                ("dimension", Json::Int(2 * n as i64)),
                (
                    "state_layout",
                    Json::str("x1..xn, then the kernel averages z1..zn"),
                ),
                (
                    "ode",
                    Json::str(
                        "x_i' = x_i (growth_i + sum_j interactions_ij x_j + \
                         sum_j kernel_weights_ij z_j); z_j' = kernel_rate (x_j - z_j)",
                    ),
                ),
                ("steady_state", Json::nums(&x_star)),
                ("reduced_steady_state", Json::nums(&dup)),
            ]),
        ),
    ]);
    emit::write_out(args.out.as_deref(), &doc.render(), LOC)
}
