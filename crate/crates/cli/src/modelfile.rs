//! The JSON model-file schema (schema_version 1) and its resolution into
//! runnable objects.
//!
//! A file names a built-in model or defines one inline:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "model": "hutchinson",
//!   "params": {"gamma": 1.0, "k": 1.0, "tau": 1.4},
//!   "history": {"span_start": -1.4, "constant": [0.5]},
//!   "options": {"step": 1e-3, "t_end": 100.0, "output_points": 1001}
//! }
//! ```
//!
//! Inline forms: `{"linear": {"matrix": A0, "delayed": [{"tau": t, "matrix":
//! Aj}]}}` for `x'(t) = A0 x(t) + sum_j Aj x(t - tau_j)`, and
//! `{"lv_distributed": {...}}` for Lotka-Volterra growth laws with
//! exponentially fading memory. Unknown fields are schema errors.

use crate::args::{ModelSource, WindowArgs};
use crate::fail::{CliResult, Failure, Located};
use delaylab::chaintrick::lv_steady_state;
use delaylab::history::HistoryPiece;
use delaylab::system::Rhs;
use delaylab::zoo::make_model;
use delaylab::{
    Error, History64, LotkaVolterraDistributed64, ModelSpec64, QuasiPolynomial64, RootWindow64,
    System64,
};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: u32,
    pub model: ModelRef,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub history: Option<HistorySpec>,
    #[serde(default)]
    pub options: Option<OptionsSpec>,
    /// Informational block written by `reduce`; accepted and ignored here so
    /// a reduced file feeds straight back into `simulate`.
    #[serde(default)]
    #[allow(dead_code)]
    pub reduced: Option<serde_json::Value>,
}

#[derive(Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    Named(String),
    Inline(InlineModel),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineModel {
    #[serde(default)]
    pub linear: Option<LinearSpec>,
    #[serde(default)]
    pub lv_distributed: Option<LvSpec>,
}

/// `x'(t) = A0 x(t) + sum_j Aj x(t - tau_j)`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearSpec {
    pub matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub delayed: Vec<DelayedBlock>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelayedBlock {
    pub tau: f64,
    pub matrix: Vec<Vec<f64>>,
}

/// `x_i' = x_i (growth_i + sum_j interactions_ij x_j + sum_j kernel_weights_ij z_j)`
/// where `z_j` averages `x_j` against the kernel
/// `kernel_rate * e^(-kernel_rate * s)` over the past.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LvSpec {
    pub growth: Vec<f64>,
    pub interactions: Vec<Vec<f64>>,
    pub kernel_weights: Vec<Vec<f64>>,
    pub kernel_rate: f64,
    /// Set by `reduce`: the file's constant history is already the initial
    /// state of the reduced `2n` system, not an `n`-component history.
    #[serde(default)]
    pub reduced_state: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistorySpec {
    #[serde(default)]
    pub span_start: Option<f64>,
    #[serde(default)]
    pub constant: Option<Vec<f64>>,
    #[serde(default)]
    pub polynomial: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub pieces: Option<Vec<PieceSpec>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub start: f64,
    pub end: f64,
    pub coeffs: Vec<Vec<f64>>,
}

#[derive(Deserialize, Clone, Default)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub output_points: Option<usize>,
    #[serde(default)]
    pub window: Option<WindowSpec>,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_max: f64,
}

/// A model source resolved to runnable form.
pub struct Resolved {
    pub model: ResolvedModel,
    pub history: Option<HistorySpec>,
    pub options: OptionsSpec,
}

pub enum ResolvedModel {
    Named(ModelSpec64),
    Linear(LinearModel),
    Lv {
        model: LotkaVolterraDistributed64,
        reduced_state: bool,
    },
}

/// Inline linear model with zero delays folded into the instantaneous matrix
/// and duplicate delays merged, so the delay list is strictly increasing.
#[derive(Clone)]
pub struct LinearModel {
    pub dim: usize,
    pub a0: Vec<Vec<f64>>,
    pub delayed: Vec<(f64, Vec<Vec<f64>>)>,
}

impl LinearModel {
    fn from_spec(ls: &LinearSpec, location: &str) -> CliResult<LinearModel> {
        let dim = ls.matrix.len();
        check_square(&ls.matrix, dim, "matrix", location)?;
        let mut a0 = ls.matrix.clone();
        let mut delayed: Vec<(f64, Vec<Vec<f64>>)> = Vec::new();
        for (k, block) in ls.delayed.iter().enumerate() {
            check_square(&block.matrix, dim, &format!("delayed[{k}].matrix"), location)?;
            if !block.tau.is_finite() || block.tau < 0.0 {
                return Err(Failure::config(
                    location,
                    format!("delayed[{k}].tau must be >= 0 and finite, got {}", block.tau),
                ));
            }
            if block.tau <= 1e-12 {
                add_into(&mut a0, &block.matrix);
            } else if let Some((_, m)) = delayed
                .iter_mut()
                .find(|(t, _)| (*t - block.tau).abs() <= 1e-12 * t.max(1.0))
            {
                add_into(m, &block.matrix);
            } else {
                delayed.push((block.tau, block.matrix.clone()));
            }
        }
        delayed.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(LinearModel { dim, a0, delayed })
    }

    pub fn tau_max(&self) -> f64 {
        self.delayed.last().map_or(0.0, |(t, _)| *t)
    }

    pub fn system(&self) -> System64 {
        let dim = self.dim;
        let a0 = self.a0.clone();
        let mats: Vec<Vec<Vec<f64>>> = self.delayed.iter().map(|(_, m)| m.clone()).collect();
        let taus: Vec<f64> = self.delayed.iter().map(|(t, _)| *t).collect();
        let rhs: Rhs<f64> = Arc::new(move |_t, x, delayed, dx| {
            for i in 0..dim {
                let mut acc = 0.0;
                for j in 0..dim {
                    acc += a0[i][j] * x[j];
                }
                for (k, m) in mats.iter().enumerate() {
                    for j in 0..dim {
                        acc += m[i][j] * delayed[k][j];
                    }
                }
                dx[i] = acc;
            }
        });
        System64::new(dim, taus, rhs).expect("delays are positive, sorted, and merged")
    }

    /// Exact characteristic function `det(zI - A0 - sum_j Aj e^(-tau_j z))`,
    /// expanded by hand so no finite-difference noise enters the
    /// coefficients. Dimensions 1 and 2 only (determinant expansion).
    pub fn char_fun(&self) -> delaylab::Result<QuasiPolynomial64> {
        // Entry (r, c) as a list of (delay, coefficient) pairs; the delay-free
        // pair rides along and is folded into the base by the constructor.
        let entry = |r: usize, c: usize| -> Vec<(f64, f64)> {
            let mut v = vec![(0.0, self.a0[r][c])];
            for (tau, m) in &self.delayed {
                v.push((*tau, m[r][c]));
            }
            v
        };
        match self.dim {
            1 => {
                let mut terms = Vec::new();
                for (t, c) in entry(0, 0) {
                    if c != 0.0 {
                        terms.push((t, vec![-c]));
                    }
                }
                QuasiPolynomial64::new(vec![0.0, 1.0], terms)
            }
            2 => {
                // (z - m00)(z - m11) - m01 m10: products of delayed entries
                // land on summed delays; the constructor merges duplicates.
                let (m00, m01) = (entry(0, 0), entry(0, 1));
                let (m10, m11) = (entry(1, 0), entry(1, 1));
                let mut terms: Vec<(f64, Vec<f64>)> = Vec::new();
                for &(t, c) in m00.iter().chain(m11.iter()) {
                    if c != 0.0 {
                        terms.push((t, vec![0.0, -c]));
                    }
                }
                for &(ta, ca) in &m00 {
                    for &(tb, cb) in &m11 {
                        if ca * cb != 0.0 {
                            terms.push((ta + tb, vec![ca * cb]));
                        }
                    }
                }
                for &(ta, ca) in &m01 {
                    for &(tb, cb) in &m10 {
                        if ca * cb != 0.0 {
                            terms.push((ta + tb, vec![-ca * cb]));
                        }
                    }
                }
                QuasiPolynomial64::new(vec![0.0, 0.0, 1.0], terms)
            }
            d => Err(Error::UnsupportedDimension {
                dim: d,
                what: "characteristic determinant expansion",
            }),
        }
    }
}

fn check_square(m: &[Vec<f64>], dim: usize, what: &str, location: &str) -> CliResult<()> {
    if dim == 0 || m.len() != dim || m.iter().any(|row| row.len() != dim) {
        return Err(Failure::config(
            location,
            format!("{what} must be a nonempty square matrix of dimension {dim}"),
        ));
    }
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Failure::config(location, format!("{what} has a non-finite entry")));
    }
    Ok(())
}

fn add_into(acc: &mut [Vec<f64>], m: &[Vec<f64>]) {
    for (ar, mr) in acc.iter_mut().zip(m) {
        for (a, b) in ar.iter_mut().zip(mr) {
            *a += *b;
        }
    }
}

fn parse_cli_params(items: &[String], location: &str) -> CliResult<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    for item in items {
        let (k, v) = item.split_once('=').ok_or_else(|| {
            Failure::config(location, format!("expected --param key=value, got '{item}'"))
        })?;
        let value: f64 = v.trim().parse().map_err(|_| {
            Failure::config(
                location,
                format!("parameter '{k}': cannot parse '{v}' as a number"),
            )
        })?;
        map.insert(k.trim().to_string(), value);
    }
    Ok(map)
}

/// Resolves a model source. `fill` supplies lowest-precedence defaults for
/// named-model parameters (the sweep seeds its varied key this way).
pub fn resolve(source: &ModelSource, fill: &[(&str, f64)], location: &str) -> CliResult<Resolved> {
    let cli_params = parse_cli_params(&source.params, location)?;

    if let Some(path) = &source.model_file {
        let file = load_model_file(path, location)?;
        let mut params = file.params;
        params.extend(cli_params);
        match file.model {
            ModelRef::Named(name) => {
                apply_fill(&mut params, fill);
                let spec = make_model(&name, &params).at(location)?;
                Ok(Resolved {
                    model: ResolvedModel::Named(spec),
                    history: file.history,
                    options: file.options.unwrap_or_default(),
                })
            }
            ModelRef::Inline(inline) => {
                if !params.is_empty() {
                    return Err(Failure::config(
                        location,
                        "params apply to named models; inline definitions carry their \
                         coefficients directly",
                    ));
                }
                let model = build_inline(&inline, location)?;
                Ok(Resolved {
                    model,
                    history: file.history,
                    options: file.options.unwrap_or_default(),
                })
            }
        }
    } else if let Some(name) = &source.model {
        let mut params = cli_params;
        apply_fill(&mut params, fill);
        let spec = make_model(name, &params).at(location)?;
        Ok(Resolved {
            model: ResolvedModel::Named(spec),
            history: None,
            options: OptionsSpec::default(),
        })
    } else {
        Err(Failure::config(
            location,
            "pass --model <name> or --model-file <path>",
        ))
    }
}

fn apply_fill(params: &mut BTreeMap<String, f64>, fill: &[(&str, f64)]) {
    for (key, value) in fill {
        params.entry((*key).to_string()).or_insert(*value);
    }
}

pub fn load_model_file(path: &Path, location: &str) -> CliResult<ModelFile> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Failure::config(location, format!("model file {}: {e}", path.display()))
    })?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| {
        Failure::config(location, format!("model file {}: {e}", path.display()))
    })?;
    if file.schema_version != 1 {
        return Err(Failure::config(
            location,
            format!(
                "model file {}: unsupported schema_version {} (expected 1)",
                path.display(),
                file.schema_version
            ),
        ));
    }
    Ok(file)
}

fn build_inline(inline: &InlineModel, location: &str) -> CliResult<ResolvedModel> {
    match (&inline.linear, &inline.lv_distributed) {
        (Some(ls), None) => Ok(ResolvedModel::Linear(LinearModel::from_spec(ls, location)?)),
        (None, Some(lv)) => {
            let model = LotkaVolterraDistributed64::new(
                lv.growth.clone(),
                lv.interactions.clone(),
                lv.kernel_weights.clone(),
                lv.kernel_rate,
            )
            .at(location)?;
            Ok(ResolvedModel::Lv {
                model,
                reduced_state: lv.reduced_state,
            })
        }
        _ => Err(Failure::config(
            location,
            "inline model must define exactly one of 'linear' or 'lv_distributed'",
        )),
    }
}

/// Builds a history from its file description. `default_span` is used when
/// `span_start` is omitted (the model's `-tau_max`).
pub fn build_history(
    spec: &HistorySpec,
    default_span: f64,
    location: &str,
) -> CliResult<History64> {
    let forms = [
        spec.constant.is_some(),
        spec.polynomial.is_some(),
        spec.pieces.is_some(),
    ];
    if forms.iter().filter(|&&f| f).count() != 1 {
        return Err(Failure::config(
            location,
            "history must define exactly one of 'constant', 'polynomial', 'pieces'",
        ));
    }
    if let Some(values) = &spec.constant {
        let span = spec.span_start.unwrap_or(default_span);
        return History64::constant(span, values).at(location);
    }
    if let Some(coeffs) = &spec.polynomial {
        let span = spec.span_start.unwrap_or(default_span);
        return History64::polynomial(span, coeffs.clone()).at(location);
    }
    let pieces = spec.pieces.as_ref().expect("one form is present");
    if spec.span_start.is_some() {
        return Err(Failure::config(
            location,
            "'pieces' carry their own span; drop 'span_start'",
        ));
    }
    let pieces: Vec<HistoryPiece<f64>> = pieces
        .iter()
        .map(|p| HistoryPiece {
            start: p.start,
            end: p.end,
            coeffs: p.coeffs.clone(),
        })
        .collect();
    History64::new(pieces).at(location)
}

/// Integration settings after precedence: flag, then file option, then
/// default (step 1e-3, t_end 50, output_points 1001).
pub struct RunSettings {
    pub step: f64,
    pub t_end: f64,
    pub output_points: usize,
}

pub fn resolve_run(
    opts: &OptionsSpec,
    step: Option<f64>,
    t_end: Option<f64>,
    output_points: Option<usize>,
    location: &str,
) -> CliResult<RunSettings> {
    let settings = RunSettings {
        step: step.or(opts.step).unwrap_or(1e-3),
        t_end: t_end.or(opts.t_end).unwrap_or(50.0),
        output_points: output_points.or(opts.output_points).unwrap_or(1001),
    };
    if settings.output_points < 2 {
        return Err(Failure::config(location, "output_points must be at least 2"));
    }
    Ok(settings)
}

/// Window precedence per field: flag, then file window, then [-5, 1] x [0, 50].
pub fn resolve_window(
    opts: &OptionsSpec,
    flags: &WindowArgs,
    location: &str,
) -> CliResult<RootWindow64> {
    let base = opts.window.map_or(RootWindow64::standard(), |w| RootWindow64 {
        re_min: w.re_min,
        re_max: w.re_max,
        im_max: w.im_max,
    });
    RootWindow64::new(
        flags.re_min.unwrap_or(base.re_min),
        flags.re_max.unwrap_or(base.re_max),
        flags.im_max.unwrap_or(base.im_max),
    )
    .at(location)
}

/// Picks the steady state to linearize at: an explicit index, else the last
/// all-positive entry (the zoo lists the distinguished positive equilibrium
/// last among the positives), else the last listed.
pub fn choose_steady_state(
    spec: &ModelSpec64,
    index: Option<usize>,
    location: &str,
) -> CliResult<(usize, Vec<f64>, String)> {
    let states = &spec.steady_states;
    let idx = match index {
        Some(i) => {
            if i >= states.len() {
                return Err(Failure::config(
                    location,
                    format!(
                        "steady-state index {i} out of range; model '{}' lists {}",
                        spec.name,
                        states.len()
                    ),
                ));
            }
            i
        }
        None => states
            .iter()
            .rposition(|(x, _)| x.iter().all(|&v| v > 0.0))
            .unwrap_or(states.len() - 1),
    };
    let (state, note) = &states[idx];
    Ok((idx, state.clone(), note.clone()))
}

/// `-tau_max` of the resolved model: the default history span start.
pub fn default_span(model: &ResolvedModel) -> f64 {
    match model {
        ResolvedModel::Named(spec) => spec
            .system
            .as_ref()
            .and_then(|s| s.tau_max())
            .map_or(0.0, |t| -t),
        ResolvedModel::Linear(lm) => -lm.tau_max(),
        // The kernel has unbounded memory; any span works because the history
        // is frozen at its earliest value further back. One unit is the
        // conventional default.
        ResolvedModel::Lv { .. } => -1.0,
    }
}

/// Default history: constant at half the positive steady state (the zoo's own
/// default covers named models; this covers inline ones).
pub fn default_lv_history(
    model: &LotkaVolterraDistributed64,
    location: &str,
) -> CliResult<History64> {
    let x_star = lv_steady_state(model).at(location)?;
    let halved: Vec<f64> = x_star.iter().map(|v| 0.5 * v).collect();
    History64::constant(-1.0, &halved).at(location)
}
