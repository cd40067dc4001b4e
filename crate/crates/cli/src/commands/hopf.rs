//! `hopf`: first pure-imaginary crossing of `x'(t) + a x(t) + b x(t - tau) = 0`
//! and the delay family it generates, as JSON.

use crate::args::HopfArgs;
use crate::emit::{self, Json};
use crate::fail::{CliResult, Located};
use delaylab::spectral::hopf_point_scalar;

pub fn run(args: &HopfArgs) -> CliResult<()> {
    const LOC: &str = "hopf";
    let hp = hopf_point_scalar(args.a, args.b).at(LOC)?;
    let family: Vec<Json> = (0..args.family.max(1))
        .map(|k| Json::Num(hp.crossing_delay(k)))
        .collect();
    let doc = Json::obj(vec![
        ("a", Json::Num(args.a)),
        ("b", Json::Num(args.b)),
        ("omega0", Json::Num(hp.omega)),
        ("tau0", Json::Num(hp.tau0)),
        ("spacing", Json::Num(hp.spacing)),
        ("period", Json::Num(hp.period)),
        ("family", Json::Arr(family)),
    ]);
    emit::write_out(args.out.as_deref(), &doc.render(), LOC)
}
