//! Analysis verdicts: what was concluded, from what, and how firmly.

use std::fmt;

/// Conclusion of a stability or oscillation analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictTag {
    /// Attracts all admissible (positive) solutions.
    GloballyStable,
    /// The linearization at the examined equilibrium is exponentially stable.
    LocallyStable,
    /// Stable for every delay value in the stated family.
    AbsolutelyStableInDelays,
    /// A growing mode exists.
    Unstable,
    /// The solution oscillates about the reference.
    Oscillatory,
    /// The solution stays on one side of the reference.
    Nonoscillatory,
    /// The applied test is inconclusive; never a claim of instability.
    Unknown,
}

impl VerdictTag {
    /// Stable machine-readable name.
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictTag::GloballyStable => "GloballyStable",
            VerdictTag::LocallyStable => "LocallyStable",
            VerdictTag::AbsolutelyStableInDelays => "AbsolutelyStableInDelays",
            VerdictTag::Unstable => "Unstable",
            VerdictTag::Oscillatory => "Oscillatory",
            VerdictTag::Nonoscillatory => "Nonoscillatory",
            VerdictTag::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for VerdictTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Certainty {
    /// A sufficient criterion with checked hypotheses.
    ProvedByCriterion,
    /// Computation (root location, simulation, finite differences).
    NumericEvidence,
}

impl Certainty {
    pub fn as_str(self) -> &'static str {
        match self {
            Certainty::ProvedByCriterion => "proved-by-criterion",
            Certainty::NumericEvidence => "numeric-evidence",
        }
    }
}

impl fmt::Display for Certainty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A conclusion plus the provenance needed to audit it.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub tag: VerdictTag,
    /// Which criterion or computation produced the tag, with the deciding
    /// quantities (e.g. "linear-oscillation: a*e*tau = 1.35 > 1").
    pub justification: String,
    pub certainty: Certainty,
}

impl Verdict {
    pub fn proved(tag: VerdictTag, justification: impl Into<String>) -> Self {
        Verdict {
            tag,
            justification: justification.into(),
            certainty: Certainty::ProvedByCriterion,
        }
    }

    pub fn numeric(tag: VerdictTag, justification: impl Into<String>) -> Self {
        Verdict {
            tag,
            justification: justification.into(),
            certainty: Certainty::NumericEvidence,
        }
    }

    /// Inconclusive outcome naming the hypothesis or measurement that failed.
    pub fn unknown(reason: impl Into<String>) -> Self {
        Verdict {
            tag: VerdictTag::Unknown,
            justification: reason.into(),
            certainty: Certainty::NumericEvidence,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}): {}", self.tag, self.certainty, self.justification)
    }
}
