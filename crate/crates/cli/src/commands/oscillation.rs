//! `oscillation`: the closed-form dichotomy for `x'(t) + a x(t - tau) = 0`,
//! as a JSON verdict. The justification states the deciding quantity.

use crate::args::OscillationArgs;
use crate::emit::{self, Json};
use crate::fail::{CliResult, Located};
use delaylab::criteria::oscillation_test_linear;

pub fn run(args: &OscillationArgs) -> CliResult<()> {
    const LOC: &str = "oscillation";
    let v = oscillation_test_linear(args.a, args.tau).at(LOC)?;
    let product = args.a * std::f64::consts::E * args.tau;
    let doc = Json::obj(vec![
        ("a", Json::Num(args.a)),
        ("tau", Json::Num(args.tau)),
        ("product", Json::Num(product)),
        ("verdict", emit::verdict(&v)),
    ]);
    emit::write_out(args.out.as_deref(), &doc.render(), LOC)
}
