//! Sufficient conditions for k-order contraction and their consequences,
//! each reported as a [`Certificate`] with a rate and a worst-case witness.

mod control;
mod grid;
mod linear;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::Matrix;
use crate::measures::Norm;

pub use crate::domain::{BoxDomain, DEFAULT_GRID_COUNT, GRID_CAP};
pub use control::{control_check, ControlProblem};
pub use grid::{
    check_bendixson, check_gas, certify_nonlinear_grid, certify_scaled_l1, equilibrium_census, EquilibriumCensus,
    CLUSTER_RADIUS,
};
pub use linear::{certify_diagonal, certify_lti, certify_ltv, certify_row_rule, row_sums};

/// A sampled supremum must be at most `−CERTIFY_TOL` for success.
pub const CERTIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "LTI_MEASURE")]
    LtiMeasure,
    #[serde(rename = "NONLINEAR_GRID")]
    NonlinearGrid,
    #[serde(rename = "DIAGONAL")]
    Diagonal,
    #[serde(rename = "ROW_RULE_NM1")]
    RowRuleNm1,
    #[serde(rename = "SCALED_L1_COOPERATIVE")]
    ScaledL1Cooperative,
    #[serde(rename = "BENDIXSON")]
    Bendixson,
    #[serde(rename = "GAS_2CONTRACTION")]
    Gas2Contraction,
    #[serde(rename = "CONTROL_2CONTRACTION")]
    Control2Contraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Certified,
    NotCertified,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Witness {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    /// 1-based index tuple.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    /// 1-based row/column index, or 0-based sample index where noted by `condition`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    /// Quantity attaining the supremum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub counts: Vec<usize>,
    pub samples: usize,
    pub exhaustive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionFailure {
    pub condition: String,
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub rule: Rule,
    pub k: usize,
    /// `None` when the conclusion holds for every `L_p` norm at once.
    pub norm: Option<Norm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<Matrix>,
    pub eta: f64,
    pub verdict: Verdict,
    pub witness: Witness,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridMeta>,
    /// `eta / max v_i` for the scaled-L1 rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective_rate: Option<f64>,
    /// Which of the two Bendixson branches succeeded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equilibria: Option<Vec<Vec<f64>>>,
    /// Newton seeds that failed to converge to an equilibrium inside the box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped_seeds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failures: Option<Vec<ConditionFailure>>,
}

impl Certificate {
    pub(crate) fn new(rule: Rule, k: usize, norm: Option<Norm>, sup: f64, witness: Witness) -> Self {
        Certificate {
            rule,
            k,
            norm,
            scaling: None,
            eta: -sup,
            verdict: verdict_for(sup),
            witness,
            grid: None,
            effective_rate: None,
            branch: None,
            equilibria: None,
            skipped_seeds: None,
            failures: None,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

pub(crate) fn verdict_for(sup: f64) -> Verdict {
    if sup <= -CERTIFY_TOL {
        Verdict::Certified
    } else {
        Verdict::NotCertified
    }
}

/// Evaluates `f` on every item in parallel; errors and results come back in item order.
pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    let out: Vec<Result<R>> = items.par_iter().map(f).collect();
    out.into_iter().collect()
}

/// Index and value of the largest entry; ties resolve to the smallest index.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        match best {
            Some((_, b)) if !(v > b) => {}
            _ => best = Some((i, v)),
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_prefers_first() {
        assert_eq!(argmax([1.0, 3.0, 3.0, 2.0]), Some((1, 3.0)));
        assert_eq!(argmax(Vec::<f64>::new()), None);
    }

    #[test]
    fn rule_names() {
        let names: Vec<String> = [Rule::RowRuleNm1, Rule::Gas2Contraction, Rule::Control2Contraction]
            .iter()
            .map(|r| serde_json::to_string(r).unwrap())
            .collect();
        assert_eq!(names, vec!["\"ROW_RULE_NM1\"", "\"GAS_2CONTRACTION\"", "\"CONTROL_2CONTRACTION\""]);
        assert_eq!(serde_json::to_string(&Verdict::NotCertified).unwrap(), "\"NOT_CERTIFIED\"");
    }
}
