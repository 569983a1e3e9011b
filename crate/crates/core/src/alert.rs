//! Alert timing.
//!
//! For an alert of type i planned for period t' and a realization j, the
//! certain equivalent is
//! `PV(q_i, t' - t) + U⁻¹(Σ_{τ ∈ W} P(H = τ | j) · U(PV(v_j, τ - t)))`,
//! where W holds the arrival times the alert fails to cover. The scan
//! evaluates `Σ_j P(j) · U(CE)` for every alert type and every t' in
//! `[t, T]` and returns the minimizer.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inference::BeliefState;
use crate::projection::{first_passage, FirstPassageDistribution, ProjectionError, StateDistribution};
use crate::transition::TransitionModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlertError {
    #[error("invalid cost model field `{field}`: {reason}")]
    InvalidCostModel { field: String, reason: String },
    #[error("horizon {horizon} must be after the current period {period}")]
    HorizonNotAfterPeriod { period: u32, horizon: u32 },
    #[error("alert time {time} is outside [{period}, {horizon}]")]
    AlertTimeOutOfRange { time: u32, period: u32, horizon: u32 },
    #[error("no alert type with index {0}")]
    UnknownAlertType(usize),
    #[error("no realization with index {0}")]
    UnknownRealization(usize),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

impl AlertError {
    pub fn code(&self) -> &'static str {
        match self {
            AlertError::InvalidCostModel { .. } => "InvalidCostModel",
            AlertError::HorizonNotAfterPeriod { .. } => "HorizonNotAfterPeriod",
            AlertError::AlertTimeOutOfRange { .. } => "AlertTimeOutOfRange",
            AlertError::UnknownAlertType(_) => "UnknownAlertType",
            AlertError::UnknownRealization(_) => "UnknownRealization",
            AlertError::Projection(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Disutility {
    #[default]
    Linear,
    /// Constant absolute risk aversion: `U(x) = (e^{γx} - 1) / γ`.
    Exponential { gamma: f64 },
}

impl Disutility {
    pub fn u(&self, x: f64) -> f64 {
        match *self {
            Disutility::Linear => x,
            Disutility::Exponential { gamma } => (gamma * x).exp_m1() / gamma,
        }
    }

    pub fn u_inv(&self, y: f64) -> f64 {
        match *self {
            Disutility::Linear => y,
            Disutility::Exponential { gamma } => (gamma * y).ln_1p() / gamma,
        }
    }
}

/// Which arrival times count as failures of an alert issued at t'.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FailureWindow {
    /// Every arrival from the next period up to t' + l: a crisis that comes
    /// before the alert, or too soon after it, defeats the response.
    #[default]
    Cumulative,
    /// Only arrivals in [t', t' + l].
    AlertWindow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlertType {
    pub id: String,
    /// Fixed cost q_i of issuing the alert; must be positive.
    pub cost: f64,
    /// Minimum lead time per realization j; `None` if the alert never enables
    /// an adequate response to that realization.
    pub lead_times: Vec<Option<u32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub alert_types: Vec<AlertType>,
    /// Failure cost v_j per realization.
    pub failure_costs: Vec<f64>,
    pub daily_discount_rate: f64,
    pub periods_per_day: u32,
    pub disutility: Disutility,
    /// Absolute last period T considered by the scan.
    pub horizon: u32,
    #[serde(default)]
    pub failure_window: FailureWindow,
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> AlertError {
    AlertError::InvalidCostModel { field: field.into(), reason: reason.into() }
}

impl CostModel {
    pub fn validate(&self) -> Result<(), AlertError> {
        if self.alert_types.is_empty() {
            return Err(invalid("alert_types", "at least one alert type is required"));
        }
        for (i, a) in self.alert_types.iter().enumerate() {
            if !(a.cost > 0.0 && a.cost.is_finite()) {
                return Err(invalid(format!("alert_types[{i}].cost"), "alert costs must be greater than 0"));
            }
            if a.lead_times.len() != self.failure_costs.len() {
                return Err(invalid(format!("alert_types[{i}].lead_times"), "one entry per realization"));
            }
        }
        if let Some(j) = self.failure_costs.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(invalid(format!("failure_costs[{j}]"), "failure costs must be finite and nonnegative"));
        }
        if !(self.daily_discount_rate > -1.0 && self.daily_discount_rate.is_finite()) {
            return Err(invalid("daily_discount_rate", "must exceed -1"));
        }
        if self.periods_per_day == 0 {
            return Err(invalid("periods_per_day", "must be at least 1"));
        }
        if let Disutility::Exponential { gamma } = self.disutility {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(invalid("disutility.gamma", "risk coefficient must be positive"));
            }
        }
        Ok(())
    }

    /// Per-period rate r with (1 + r)^periods_per_day = 1 + daily rate.
    pub fn per_period_rate(&self) -> f64 {
        ((self.daily_discount_rate.ln_1p()) / f64::from(self.periods_per_day)).exp_m1()
    }

    /// (1 + r)^-periods.
    pub fn discount(&self, periods: u32) -> f64 {
        (-(f64::from(periods)) * self.daily_discount_rate.ln_1p() / f64::from(self.periods_per_day)).exp()
    }

    /// Largest failure cost among realizations the alert can answer.
    pub fn associated_failure_cost(&self, alert: usize) -> f64 {
        self.alert_types[alert]
            .lead_times
            .iter()
            .zip(&self.failure_costs)
            .filter(|(l, _)| l.is_some())
            .map(|(_, v)| *v)
            .fold(0.0, f64::max)
    }

    /// Multiplies every alert and failure cost by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.failure_costs.iter_mut().for_each(|v| *v *= factor);
        out.alert_types.iter_mut().for_each(|a| a.cost *= factor);
        out
    }
}

/// Present value of `cost` incurred `periods` periods from now.
pub fn present_value(cost: f64, periods: u32, cost_model: &CostModel) -> f64 {
    cost * cost_model.discount(periods)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertainEquivalent {
    pub value: f64,
    /// The lead-time window ran past the horizon and was cut at T.
    pub truncated: bool,
}

/// Inclusive range of failing arrival times, already clipped to `[t+1, T]`.
fn failure_window(cm: &CostModel, lead: Option<u32>, t: u32, t_alert: u32) -> (u32, u32, bool) {
    let horizon = cm.horizon;
    let lo = match cm.failure_window {
        FailureWindow::Cumulative => t + 1,
        FailureWindow::AlertWindow => t_alert.max(t + 1),
    };
    let (hi, truncated) = match lead {
        Some(l) => {
            let end = t_alert.saturating_add(l);
            (end.min(horizon), end > horizon)
        }
        None => (horizon, false),
    };
    (lo, hi, truncated)
}

/// Certain equivalent of alert `alert` at period `t_alert` under realization `j`.
/// The decision period is the origin of `passage`.
pub fn certain_equivalent(
    cost_model: &CostModel,
    alert: usize,
    t_alert: u32,
    j: usize,
    passage: &FirstPassageDistribution,
) -> Result<CertainEquivalent, AlertError> {
    let a = cost_model.alert_types.get(alert).ok_or(AlertError::UnknownAlertType(alert))?;
    let v = *cost_model.failure_costs.get(j).ok_or(AlertError::UnknownRealization(j))?;
    let t = passage.origin;
    if t_alert < t || t_alert > cost_model.horizon {
        return Err(AlertError::AlertTimeOutOfRange { time: t_alert, period: t, horizon: cost_model.horizon });
    }
    let (lo, hi, truncated) = failure_window(cost_model, a.lead_times[j], t, t_alert);
    let u = &cost_model.disutility;
    let mut expected = 0.0;
    for tau in lo..=hi {
        let p = passage.at(tau);
        if p > 0.0 {
            expected += p * u.u(present_value(v, tau - t, cost_model));
        }
    }
    Ok(CertainEquivalent {
        value: present_value(a.cost, t_alert - t, cost_model) + u.u_inv(expected),
        truncated,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlertRecommendation {
    pub period: u32,
    pub alert_type: String,
    pub alert_index: usize,
    pub tau: u32,
    pub issue_now: bool,
    pub alert_types: Vec<String>,
    /// `surface[i][k]`: expected disutility of alert i issued at period `period + k`.
    pub surface: Vec<Vec<f64>>,
    /// Certain equivalents of the chosen (alert, time) for every realization.
    pub per_j_ce: Vec<f64>,
    /// Some lead-time window was cut at the horizon.
    pub lead_time_beyond_horizon: bool,
}

impl AlertRecommendation {
    pub fn candidate_times(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.surface.first().map_or(0, Vec::len) as u32).map(move |k| self.period + k)
    }

    /// Best candidate time for one alert type, earliest on ties.
    pub fn best_time_for(&self, alert: usize) -> u32 {
        let row = &self.surface[alert];
        let mut best = 0;
        for k in 1..row.len() {
            if row[k] < row[best] {
                best = k;
            }
        }
        self.period + best as u32
    }

    /// Scan surface as CSV: `period,alert_type,tau,expected_disutility`.
    pub fn scan_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["period", "alert_type", "tau", "expected_disutility"])?;
        self.write_scan_rows(&mut w)?;
        crate::csvout::finish(w)
    }

    pub fn write_scan_rows<W: std::io::Write>(&self, w: &mut csv::Writer<W>) -> Result<(), csv::Error> {
        for (i, row) in self.surface.iter().enumerate() {
            for (k, d) in row.iter().enumerate() {
                w.serialize((self.period, &self.alert_types[i], self.period + k as u32, d))?;
            }
        }
        Ok(())
    }
}

/// Scans every alert type and time given P(D) and per-realization passages
/// (all with origin `t`). Ties go to the earliest time, then to the alert
/// with the larger associated failure cost.
pub fn recommend_from_passages(
    p_d: &[f64],
    passages: &[FirstPassageDistribution],
    cost_model: &CostModel,
    t: u32,
) -> Result<AlertRecommendation, AlertError> {
    cost_model.validate()?;
    if cost_model.horizon <= t {
        return Err(AlertError::HorizonNotAfterPeriod { period: t, horizon: cost_model.horizon });
    }
    if p_d.len() != cost_model.failure_costs.len() || passages.len() != p_d.len() {
        return Err(ProjectionError::DimensionMismatch { expected: cost_model.failure_costs.len(), found: passages.len() }.into());
    }
    let u = cost_model.disutility;
    let n_times = (cost_model.horizon - t + 1) as usize;
    let mut surface = vec![vec![0.0; n_times]; cost_model.alert_types.len()];
    let mut any_truncated = false;
    for (i, row) in surface.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            let t_alert = t + k as u32;
            let mut total = 0.0;
            for (j, (&w, fp)) in p_d.iter().zip(passages).enumerate() {
                if w == 0.0 {
                    continue;
                }
                let ce = certain_equivalent(cost_model, i, t_alert, j, fp)?;
                any_truncated |= ce.truncated;
                total += w * u.u(ce.value);
            }
            *cell = total;
        }
    }

    let mut best = (0usize, 0usize);
    for k in 0..n_times {
        for i in 0..surface.len() {
            let (bi, bk) = best;
            let (val, cur) = (surface[i][k], surface[bi][bk]);
            let better = val < cur
                || (val == cur
                    && k == bk
                    && cost_model.associated_failure_cost(i) > cost_model.associated_failure_cost(bi));
            if better {
                best = (i, k);
            }
        }
    }
    let (bi, bk) = best;
    let tau = t + bk as u32;
    let per_j_ce = passages
        .iter()
        .enumerate()
        .map(|(j, fp)| certain_equivalent(cost_model, bi, tau, j, fp).map(|c| c.value))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AlertRecommendation {
        period: t,
        alert_type: cost_model.alert_types[bi].id.clone(),
        alert_index: bi,
        tau,
        issue_now: tau == t,
        alert_types: cost_model.alert_types.iter().map(|a| a.id.clone()).collect(),
        surface,
        per_j_ce,
        lead_time_beyond_horizon: any_truncated,
    })
}

/// Per-realization first-passage distributions from the current belief,
/// each started from P(X_t | D = j, signals).
pub fn passages_for_belief(
    belief: &BeliefState,
    models: &[TransitionModel],
    horizon: u32,
) -> Result<Vec<FirstPassageDistribution>, ProjectionError> {
    if models.len() != belief.n_d {
        return Err(ProjectionError::DimensionMismatch { expected: belief.n_d, found: models.len() });
    }
    (0..belief.n_d)
        .map(|j| {
            let start = StateDistribution { period: belief.period, probs: belief.state_given_d(j) };
            let mut fp = first_passage(&start, &models[j], horizon)?;
            fp.conditioning = crate::projection::Conditioning::Realization(j);
            Ok(fp)
        })
        .collect()
}

/// Optimal alert type and time for the current belief.
pub fn recommend_alert(
    belief: &BeliefState,
    models: &[TransitionModel],
    cost_model: &CostModel,
) -> Result<AlertRecommendation, AlertError> {
    if cost_model.horizon <= belief.period {
        return Err(AlertError::HorizonNotAfterPeriod { period: belief.period, horizon: cost_model.horizon });
    }
    let passages = passages_for_belief(belief, models, cost_model.horizon)?;
    recommend_from_passages(&belief.p_d, &passages, cost_model, belief.period)
}
