//! `analyze`: locate characteristic roots in a window and report the
//! stability reading as JSON.

use crate::args::AnalyzeArgs;
use crate::emit::{self, Json};
use crate::fail::{CliResult, Located};
use crate::modelfile::{self, ResolvedModel};
use delaylab::chaintrick::{duplicated_steady_state, reduce_exponential_kernel};
use delaylab::spectral::{linearize_at, rightmost_root};
use delaylab::QuasiPolynomial64;

pub fn run(args: &AnalyzeArgs) -> CliResult<()> {
    const LOC: &str = "analyze";
    let resolved = modelfile::resolve(&args.source, &[], LOC)?;
    let window = modelfile::resolve_window(&resolved.options, &args.window, LOC)?;

    let (q, label, steady): (QuasiPolynomial64, String, Json) = match &resolved.model {
        ResolvedModel::Named(spec) => {
            let (idx, state, note) =
                modelfile::choose_steady_state(spec, args.steady_state, LOC)?;
            let q = match &spec.char_fun {
                Some(q) => q.clone(),
                None => {
                    let sys = spec.system.as_ref().expect(
                        "zoo models without a characteristic function carry a system",
                    );
                    linearize_at(sys, &state).at("analyze: linearization")?
                }
            };
            let steady = Json::obj(vec![
                ("index", Json::Int(idx as i64)),
                ("state", Json::nums(&state)),
                ("note", Json::str(&note)),
            ]);
            (q, spec.name.to_string(), steady)
        }
        ResolvedModel::Linear(lm) => {
            let q = lm.char_fun().at("analyze: characteristic function")?;
            let steady = Json::obj(vec![
                ("state", Json::nums(&vec![0.0; lm.dim])),
                ("note", Json::str("origin")),
            ]);
            (q, "inline linear".to_string(), steady)
        }
        ResolvedModel::Lv { model, .. } => {
            let sys = reduce_exponential_kernel(model);
            let dup = duplicated_steady_state(model).at("analyze: steady state")?;
            let q = linearize_at(&sys, &dup).at("analyze: linearization")?;
            let steady = Json::obj(vec![
                ("state", Json::nums(&dup)),
                ("note", Json::str("reduced coexistence state (x*, x*)")),
            ]);
            (q, "inline lv_distributed (reduced)".to_string(), steady)
        }
    };

    let rep = rightmost_root(&q, &window).at("analyze: root location")?;
    let doc = Json::obj(vec![
        ("model", Json::str(label)),
        ("window", emit::window(&window)),
        ("steady_state", steady),
        ("neutral", Json::Bool(rep.neutral)),
        ("right_edge_clear", Json::Bool(rep.right_edge_clear)),
        ("max_re", Json::Num(rep.max_re)),
        (
            "rightmost",
            Json::Arr(rep.rightmost.iter().map(|z| emit::complex(z.re, z.im)).collect()),
        ),
        (
            "roots",
            Json::Arr(rep.roots.iter().map(|z| emit::complex(z.re, z.im)).collect()),
        ),
        ("verdict", emit::verdict(&rep.verdict)),
    ]);
    emit::write_out(args.out.as_deref(), &doc.render(), LOC)
}
