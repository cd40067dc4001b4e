//! `check`: the model's closed-form, delay-robust stability criterion, as a
//! JSON verdict. Covers the models that have one; everything else is pointed
//! at `analyze` or `oscillation`.

use crate::args::CheckArgs;
use crate::emit::{self, Json};
use crate::fail::{CliResult, Failure, Located};
use crate::modelfile::{self, ResolvedModel};
use delaylab::criteria::{
    competition_delay_independent_test, cooperative_absolute_test, hutchinson_global_test,
    stepan_discrete,
};
use delaylab::verdict::Verdict;
use delaylab::ModelSpec64;

pub fn run(args: &CheckArgs) -> CliResult<()> {
    const LOC: &str = "check";
    let resolved = modelfile::resolve(&args.source, &[], LOC)?;
    let spec = match &resolved.model {
        ResolvedModel::Named(spec) => spec,
        _ => {
            return Err(Failure::config(
                LOC,
                "check applies to named models (hutchinson, cooperative, competition, \
                 damped_secondorder)",
            ))
        }
    };
    let p = &spec.parameters;
    let get = |k: &str| p[k];

    let (verdict, extra): (Verdict, Vec<(&str, Json)>) = match spec.name {
        "hutchinson" => (
            hutchinson_global_test(get("gamma"), get("tau")).at(LOC)?,
            Vec::new(),
        ),
        "cooperative" => (
            cooperative_absolute_test(
                (get("r1"), get("r2")),
                (get("k1"), get("k2")),
                (get("alpha1"), get("alpha2")),
            )
            .at(LOC)?,
            Vec::new(),
        ),
        "damped_secondorder" => (
            stepan_discrete(get("a0"), get("a1"), &[get("b")], &[get("tau")]).at(LOC)?,
            Vec::new(),
        ),
        "competition" => competition_check(spec, args.probe_box.as_deref())?,
        other => {
            return Err(Failure::config(
                LOC,
                format!(
                    "model '{other}' has no closed-form delay-robust test; use analyze \
                     for root location, or oscillation for the scalar delay equation"
                ),
            ))
        }
    };

    let mut pairs = vec![
        ("model", Json::str(spec.name)),
        (
            "params",
            Json::Obj(p.iter().map(|(k, v)| (k.clone(), Json::Num(*v))).collect()),
        ),
    ];
    pairs.extend(extra);
    pairs.push(("verdict", emit::verdict(&verdict)));
    emit::write_out(args.out.as_deref(), &Json::obj(pairs).render(), LOC)
}

/// Builds the competition test inputs from the parametric family
/// `b_i(x) = b_i x`, `m_i(x1, x2) = x_i (const + self x_i + cross x_other)`.
fn competition_check(
    spec: &ModelSpec64,
    probe_box: Option<&str>,
) -> CliResult<(Verdict, Vec<(&'static str, Json)>)> {
    const LOC: &str = "check: competition";
    let p = &spec.parameters;
    let (b1, b2) = (p["b1"], p["b2"]);
    let (c1, s1, x12) = (p["m1_const"], p["m1_self"], p["m1_cross"]);
    let (c2, x21, s2) = (p["m2_const"], p["m2_cross"], p["m2_self"]);

    // Interior balance: self and cross crowding absorb the birth surplus.
    let det = s1 * s2 - x12 * x21;
    let (r1, r2) = (b1 - c1, b2 - c2);
    if det.abs() < 1e-12 {
        return Err(Failure::numeric(LOC, "interior balance is singular"));
    }
    let star = ((r1 * s2 - x12 * r2) / det, (s1 * r2 - x21 * r1) / det);
    if !(star.0 > 0.0 && star.1 > 0.0) {
        return Err(Failure::numeric(
            LOC,
            format!(
                "no positive coexistence state: balance solves to ({}, {})",
                star.0, star.1
            ),
        ));
    }
    let boundary = (r1 / s1, r2 / s2);
    if !(boundary.0 > 0.0 && boundary.1 > 0.0) {
        return Err(Failure::numeric(
            LOC,
            "a single-species equilibrium is not positive (birth rate below baseline \
             mortality)",
        ));
    }
    let probe = match probe_box {
        Some(text) => parse_pair(text, LOC)?,
        None => (
            3.0 * star.0.max(boundary.0),
            3.0 * star.1.max(boundary.1),
        ),
    };

    let verdict = competition_delay_independent_test(
        move |x| b1 * x,
        move |x| b2 * x,
        move |x1, x2| x1 * (c1 + s1 * x1 + x12 * x2),
        move |x1, x2| x2 * (c2 + x21 * x1 + s2 * x2),
        star,
        boundary,
        probe,
    )
    .at(LOC)?;
    let extra = vec![
        ("coexistence_state", Json::nums(&[star.0, star.1])),
        ("boundary_equilibria", Json::nums(&[boundary.0, boundary.1])),
        ("probe_box", Json::nums(&[probe.0, probe.1])),
    ];
    Ok((verdict, extra))
}

fn parse_pair(text: &str, location: &str) -> CliResult<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').collect();
    let parsed: Option<(f64, f64)> = match parts.as_slice() {
        [a, b] => a.trim().parse().ok().zip(b.trim().parse().ok()),
        _ => None,
    };
    parsed.ok_or_else(|| {
        Failure::config(location, format!("expected --probe-box x1,x2, got '{text}'"))
    })
}
