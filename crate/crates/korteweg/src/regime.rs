//! Admissible parameter regions for the two constitutive families.
//!
//! Global-in-time control of the specific volume is available only when the
//! exponent triple (α, β, γ) lies in certain regions. Each family has its own
//! case list; [`classify`] evaluates every inequality of every case and
//! reports a signed slack per inequality, so callers can see not only whether
//! a triple is admissible but how far from each boundary it sits.
//!
//! The quadratic sign conditions behind the sharper cases are exposed as
//! [`f1`], [`f2`], [`f1p`], [`f2p`] (Kazhikhov family) and [`f3`], [`f4`],
//! [`f3p`], [`f4p`] (density-dependent family). The two sets are the same
//! polynomials; they are kept as separately written functions and the test
//! suite asserts their pointwise equality.

use crate::model::ModelKind;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Absolute tolerance for equality-type conditions (e.g. α = (β+3)/2).
/// Kept tight so the classifier does not blur region boundaries.
pub const EQ_TOL: f64 = 1e-12;

/// Quadratic sign condition from the corner estimate of the Kazhikhov family
/// (coefficient of the quartic slope term, non-flux route).
pub fn f1(alpha: f64, beta: f64) -> f64 {
    (beta + 5.0) * (alpha + beta + 7.0) / 6.0 + (alpha + 1.0) * (beta + 5.0) / 2.0
        - (alpha + beta + 6.0) * (alpha + beta + 7.0) / 3.0
}

/// Companion cubic-slope coefficient of [`f1`].
pub fn f2(m: f64, alpha: f64, beta: f64) -> f64 {
    -m * (2.0 * alpha + 3.0) + 2.0 * m * (alpha + beta + 6.0) / 3.0 + m * (alpha + beta + 5.0)
        - m * (beta + 5.0) / 3.0
}

/// Flux-route variant of [`f1`] (square of the half exponent in the last term).
pub fn f1p(alpha: f64, beta: f64) -> f64 {
    let h = (alpha + beta + 6.0) / 2.0;
    (beta + 5.0) * (alpha + beta + 7.0) / 6.0 + (alpha + 1.0) * (beta + 5.0) / 2.0 - h * h
}

/// Companion cubic-slope coefficient of [`f1p`].
pub fn f2p(m: f64, alpha: f64, beta: f64) -> f64 {
    m * (alpha + beta + 5.0) - 2.0 * m * (alpha + 1.0) - m * (beta + 5.0) / 3.0
}

/// Density-dependent-family analogue of [`f1`].
pub fn f3(alpha: f64, beta: f64) -> f64 {
    (beta + 5.0) * (alpha + beta + 7.0) / 6.0 + (alpha + 1.0) * (beta + 5.0) / 2.0
        - (alpha + beta + 6.0) * (alpha + beta + 7.0) / 3.0
}

/// Density-dependent-family analogue of [`f2`].
pub fn f4(m: f64, alpha: f64, beta: f64) -> f64 {
    -m * (2.0 * alpha + 3.0) + 2.0 * m * (alpha + beta + 6.0) / 3.0 + m * (alpha + beta + 5.0)
        - m * (beta + 5.0) / 3.0
}

/// Density-dependent-family analogue of [`f1p`].
pub fn f3p(alpha: f64, beta: f64) -> f64 {
    let h = (alpha + beta + 6.0) / 2.0;
    (beta + 5.0) * (alpha + beta + 7.0) / 6.0 + (alpha + 1.0) * (beta + 5.0) / 2.0 - h * h
}

/// Density-dependent-family analogue of [`f2p`].
pub fn f4p(m: f64, alpha: f64, beta: f64) -> f64 {
    m * (alpha + beta + 5.0) - 2.0 * m * (alpha + 1.0) - m * (beta + 5.0) / 3.0
}

/// Case label within a family's admissibility statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum CaseLabel {
    I,
    II,
    III,
    IV,
    V,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::I => "i",
            CaseLabel::II => "ii",
            CaseLabel::III => "iii",
            CaseLabel::IV => "iv",
            CaseLabel::V => "v",
        }
    }

    /// Cases defined for a family.
    pub fn all(kind: ModelKind) -> &'static [CaseLabel] {
        match kind {
            ModelKind::Kazhikhov => &[CaseLabel::I, CaseLabel::II, CaseLabel::III],
            ModelKind::DensityDependent => &[
                CaseLabel::I,
                CaseLabel::II,
                CaseLabel::III,
                CaseLabel::IV,
                CaseLabel::V,
            ],
        }
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single inequality of a case with its signed slack.
///
/// Slack convention: `slack = satisfied side − bound`, so a positive slack
/// means strictly satisfied and a slack of exactly 0 on a strict inequality
/// means not matched.
#[derive(Debug, Clone, Serialize)]
pub struct InequalitySlack {
    pub label: &'static str,
    pub slack: f64,
    pub strict: bool,
}

impl InequalitySlack {
    pub fn satisfied(&self) -> bool {
        if self.strict {
            self.slack > 0.0
        } else {
            self.slack >= 0.0
        }
    }
}

/// Verdict for one case: all inequality slacks plus satisfiability of the
/// square-root bounds at this β.
#[derive(Debug, Clone, Serialize)]
pub struct CaseVerdict {
    pub case: CaseLabel,
    /// False when a bound contains a square root whose radicand is negative
    /// at this β; the case is then empty at this β, not an error.
    pub satisfiable: bool,
    pub matched: bool,
    pub slacks: Vec<InequalitySlack>,
}

impl CaseVerdict {
    /// Smallest slack across the case's inequalities (the binding one).
    pub fn slack_min(&self) -> f64 {
        self.slacks
            .iter()
            .map(|s| s.slack)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Full classification of a triple against one family's case list.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeVerdict {
    pub kind: ModelKind,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub cases: Vec<CaseVerdict>,
}

impl RegimeVerdict {
    pub fn matched_cases(&self) -> Vec<CaseLabel> {
        self.cases
            .iter()
            .filter(|c| c.matched)
            .map(|c| c.case)
            .collect()
    }

    pub fn is_matched(&self) -> bool {
        self.cases.iter().any(|c| c.matched)
    }

    pub fn case(&self, label: CaseLabel) -> Option<&CaseVerdict> {
        self.cases.iter().find(|c| c.case == label)
    }
}

struct CaseBuilder {
    case: CaseLabel,
    satisfiable: bool,
    slacks: Vec<InequalitySlack>,
}

impl CaseBuilder {
    fn new(case: CaseLabel) -> Self {
        CaseBuilder {
            case,
            satisfiable: true,
            slacks: Vec::new(),
        }
    }

    fn ge(mut self, label: &'static str, value: f64, bound: f64) -> Self {
        self.slacks.push(InequalitySlack {
            label,
            slack: value - bound,
            strict: false,
        });
        self
    }

    fn gt(mut self, label: &'static str, value: f64, bound: f64) -> Self {
        self.slacks.push(InequalitySlack {
            label,
            slack: value - bound,
            strict: true,
        });
        self
    }

    fn le(mut self, label: &'static str, value: f64, bound: f64) -> Self {
        self.slacks.push(InequalitySlack {
            label,
            slack: bound - value,
            strict: false,
        });
        self
    }

    fn lt(mut self, label: &'static str, value: f64, bound: f64) -> Self {
        self.slacks.push(InequalitySlack {
            label,
            slack: bound - value,
            strict: true,
        });
        self
    }

    /// Equality within EQ_TOL, reported as slack = EQ_TOL − |value − target|.
    fn eq(mut self, label: &'static str, value: f64, target: f64) -> Self {
        self.slacks.push(InequalitySlack {
            label,
            slack: EQ_TOL - (value - target).abs(),
            strict: false,
        });
        self
    }

    /// Record the radicand of a square-root bound; negative means the case is
    /// empty at this β.
    fn radicand(mut self, label: &'static str, value: f64) -> Self {
        self.slacks.push(InequalitySlack {
            label,
            slack: value,
            strict: false,
        });
        if !(value >= 0.0) {
            self.satisfiable = false;
        }
        self
    }

    fn finish(self) -> CaseVerdict {
        let matched = self.satisfiable && self.slacks.iter().all(|s| s.satisfied());
        CaseVerdict {
            case: self.case,
            satisfiable: self.satisfiable,
            matched,
            slacks: self.slacks,
        }
    }
}

/// Radicand of the √(−2(β+2)(β+5)) bound.
fn rad_pair(beta: f64) -> f64 {
    -2.0 * (beta + 2.0) * (beta + 5.0)
}

/// Radicand of the √(−2β² − 22β − 59) bound.
fn rad_quad(beta: f64) -> f64 {
    -2.0 * beta * beta - 22.0 * beta - 59.0
}

fn case_common_i(alpha: f64, beta: f64, gamma: f64) -> CaseVerdict {
    let _ = alpha; // unconstrained in case i
    CaseBuilder::new(CaseLabel::I)
        .ge("beta_lower", beta, -3.0)
        .le("beta_upper", beta, -2.0)
        .ge("gamma", gamma, 1.0)
        .finish()
}

fn classify_kazhikhov(alpha: f64, beta: f64, gamma: f64) -> Vec<CaseVerdict> {
    let mut out = Vec::with_capacity(3);
    out.push(case_common_i(alpha, beta, gamma));

    // case ii: (β+2−√(−2(β+2)(β+5)))/2 < α ≤ β+3, (−7−√3)/2 ≤ β < −3, γ > −β−2
    {
        let s = rad_pair(beta);
        let mut b = CaseBuilder::new(CaseLabel::II).radicand("radicand", s);
        if s >= 0.0 {
            b = b.gt("alpha_lower", alpha, (beta + 2.0 - s.sqrt()) / 2.0);
        }
        out.push(
            b.le("alpha_upper", alpha, beta + 3.0)
                .ge("beta_lower", beta, (-7.0 - 3.0f64.sqrt()) / 2.0)
                .lt("beta_upper", beta, -3.0)
                .gt("gamma", gamma, -beta - 2.0)
                .finish(),
        );
    }

    // case iii: (−3−√(−2β²−22β−59))/2 < α ≤ β+3, −5 ≤ β ≤ −14/3, γ > −β−2
    {
        let s = rad_quad(beta);
        let mut b = CaseBuilder::new(CaseLabel::III).radicand("radicand", s);
        if s >= 0.0 {
            b = b.gt("alpha_lower", alpha, (-3.0 - s.sqrt()) / 2.0);
        }
        out.push(
            b.le("alpha_upper", alpha, beta + 3.0)
                .ge("beta_lower", beta, -5.0)
                .le("beta_upper", beta, -14.0 / 3.0)
                .gt("gamma", gamma, -beta - 2.0)
                .finish(),
        );
    }
    out
}

fn classify_density_dependent(alpha: f64, beta: f64, gamma: f64) -> Vec<CaseVerdict> {
    let mut out = Vec::with_capacity(5);
    out.push(case_common_i(alpha, beta, gamma));

    // case ii: α = (β+3)/2, β < −3, γ > −β−2
    out.push(
        CaseBuilder::new(CaseLabel::II)
            .eq("alpha_eq", alpha, (beta + 3.0) / 2.0)
            .lt("beta_upper", beta, -3.0)
            .gt("gamma", gamma, -beta - 2.0)
            .finish(),
    );

    // case iii: (β+2−√(−2(β+2)(β+5)))/2 < α ≤ (β+4)/3, −4 ≤ β < −3, γ > −β−2
    {
        let s = rad_pair(beta);
        let mut b = CaseBuilder::new(CaseLabel::III).radicand("radicand", s);
        if s >= 0.0 {
            b = b.gt("alpha_lower", alpha, (beta + 2.0 - s.sqrt()) / 2.0);
        }
        out.push(
            b.le("alpha_upper", alpha, (beta + 4.0) / 3.0)
                .ge("beta_lower", beta, -4.0)
                .lt("beta_upper", beta, -3.0)
                .gt("gamma", gamma, -beta - 2.0)
                .finish(),
        );
    }

    // case iv: (β+2−√s)/2 < α < (β+2+√s)/2, −5 ≤ β < −4, γ > −β−2
    {
        let s = rad_pair(beta);
        let mut b = CaseBuilder::new(CaseLabel::IV).radicand("radicand", s);
        if s >= 0.0 {
            b = b
                .gt("alpha_lower", alpha, (beta + 2.0 - s.sqrt()) / 2.0)
                .lt("alpha_upper", alpha, (beta + 2.0 + s.sqrt()) / 2.0);
        }
        out.push(
            b.ge("beta_lower", beta, -5.0)
                .lt("beta_upper", beta, -4.0)
                .gt("gamma", gamma, -beta - 2.0)
                .finish(),
        );
    }

    // case v: (−3−√s)/2 < α < (−3+√s)/2, (−11−√3)/2 ≤ β ≤ (−11+√3)/2, γ > −β−2
    {
        let s = rad_quad(beta);
        let mut b = CaseBuilder::new(CaseLabel::V).radicand("radicand", s);
        if s >= 0.0 {
            b = b
                .gt("alpha_lower", alpha, (-3.0 - s.sqrt()) / 2.0)
                .lt("alpha_upper", alpha, (-3.0 + s.sqrt()) / 2.0);
        }
        out.push(
            b.ge("beta_lower", beta, (-11.0 - 3.0f64.sqrt()) / 2.0)
                .le("beta_upper", beta, (-11.0 + 3.0f64.sqrt()) / 2.0)
                .gt("gamma", gamma, -beta - 2.0)
                .finish(),
        );
    }
    out
}

/// Classify an (α, β, γ) triple against one family's admissibility cases.
pub fn classify(alpha: f64, beta: f64, gamma: f64, kind: ModelKind) -> Result<RegimeVerdict> {
    for (name, x) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
        if x.is_nan() {
            return Err(Error::domain(format!("{name} is NaN")));
        }
    }
    let cases = match kind {
        ModelKind::Kazhikhov => classify_kazhikhov(alpha, beta, gamma),
        ModelKind::DensityDependent => classify_density_dependent(alpha, beta, gamma),
    };
    Ok(RegimeVerdict {
        kind,
        alpha,
        beta,
        gamma,
        cases,
    })
}

/// Row-major raster of verdicts: β varies along rows (outer), α along
/// columns (inner). `resolution` is the sample count per axis; 1 is allowed
/// only for a degenerate (point) range.
pub fn sweep_regions(
    alpha_range: (f64, f64),
    beta_range: (f64, f64),
    gamma: f64,
    kind: ModelKind,
    resolution: (usize, usize),
) -> Result<Vec<RegimeVerdict>> {
    let (n_alpha, n_beta) = resolution;
    for (name, (lo, hi)) in [("alpha", alpha_range), ("beta", beta_range)] {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!("{name} range must be finite")));
        }
        if hi < lo {
            return Err(Error::domain(format!("{name} range is empty ({lo} > {hi})")));
        }
    }
    for (name, n, (lo, hi)) in [
        ("alpha", n_alpha, alpha_range),
        ("beta", n_beta, beta_range),
    ] {
        if n == 0 {
            return Err(Error::domain(format!("{name} resolution must be >= 1")));
        }
        if n == 1 && lo != hi {
            return Err(Error::domain(format!(
                "{name} resolution 1 requires a degenerate range"
            )));
        }
    }
    let sample = |lo: f64, hi: f64, n: usize, i: usize| {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    let betas: Vec<f64> = (0..n_beta)
        .map(|j| sample(beta_range.0, beta_range.1, n_beta, j))
        .collect();
    let rows: Vec<Vec<RegimeVerdict>> = betas
        .par_iter()
        .map(|&beta| {
            (0..n_alpha)
                .map(|i| {
                    let alpha = sample(alpha_range.0, alpha_range.1, n_alpha, i);
                    classify(alpha, beta, gamma, kind).expect("finite inputs")
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}
