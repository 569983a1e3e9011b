//! Analyst sessions, what-if branches and scripted replay.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alert::{passages_for_belief, recommend_from_passages, AlertRecommendation, CostModel};
use crate::inference::{advance_belief_joint, init_belief, BeliefState, Observation};
use crate::network::Evidence;
use crate::projection::{first_passage, marginal_attack_distribution, AttackDistribution, FirstPassageDistribution};
use crate::scenario::{check_observation, Scenario};
use crate::Result;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SessionError {
    #[error("session `{0}` not found")]
    NotFound(String),
    #[error("scenario `{0}` not found")]
    ScenarioNotFound(String),
    #[error("{path}: {message}")]
    InvalidOverride { path: String, message: String },
    #[error("{path}: {message}")]
    InvalidObservation { path: String, message: String },
    #[error("session belongs to scenario {expected}, not {found}")]
    ScenarioMismatch { expected: String, found: String },
    #[error("projection horizon {horizon} must be after period {period}")]
    InvalidHorizon { period: u32, horizon: u32 },
    #[error("{path}: {message}")]
    Corrupt { path: String, message: String },
}

impl SessionError {
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::NotFound(_) => "SessionNotFound",
            SessionError::ScenarioNotFound(_) => "ScenarioNotFound",
            SessionError::InvalidOverride { .. } => "InvalidOverride",
            SessionError::InvalidObservation { .. } => "InvalidObservation",
            SessionError::ScenarioMismatch { .. } => "ScenarioMismatch",
            SessionError::InvalidHorizon { .. } => "InvalidHorizon",
            SessionError::Corrupt { .. } => "CorruptSession",
        }
    }

    pub fn path(&self) -> Option<&str> {
        match self {
            SessionError::InvalidOverride { path, .. }
            | SessionError::InvalidObservation { path, .. }
            | SessionError::Corrupt { path, .. } => Some(path),
            _ => None,
        }
    }
}

fn bad_override(path: impl Into<String>, message: impl Into<String>) -> SessionError {
    SessionError::InvalidOverride { path: path.into(), message: message.into() }
}

pub(crate) fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecommendationRecord {
    pub period: u32,
    pub alert_type: String,
    pub tau: u32,
    pub issue_now: bool,
}

impl From<&AlertRecommendation> for RecommendationRecord {
    fn from(r: &AlertRecommendation) -> Self {
        Self { period: r.period, alert_type: r.alert_type.clone(), tau: r.tau, issue_now: r.issue_now }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub scenario_hash: String,
    #[serde(default)]
    pub parent: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
    pub prior_d: Vec<f64>,
    pub cost_model: CostModel,
    pub belief: BeliefState,
    pub observations: Vec<Observation>,
    pub recommendations: Vec<RecommendationRecord>,
    pub created_at: u64,
    pub updated_at: u64,
}

impl Session {
    /// Fresh session at period 0 with the scenario's prior and cost model.
    pub fn new(scenario: &Scenario) -> Result<Self> {
        Ok(start(scenario, scenario.prior_d.clone(), scenario.cost_model.clone(), None, None)?.0)
    }

    pub fn period(&self) -> u32 {
        self.belief.period
    }
}

/// Point forecast that the crisis hits `target` within `days`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub target: String,
    pub days: u32,
    pub probability: f64,
}

/// Everything the analyst sees after a period is processed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOutput {
    pub period: u32,
    pub pi: Vec<f64>,
    pub p_d: Vec<f64>,
    pub p_r: Vec<f64>,
    pub attack: AttackDistribution,
    pub projections: Vec<Projection>,
    /// Absent once the period reaches the cost-model horizon.
    pub recommendation: Option<AlertRecommendation>,
}

/// Projections, attack distribution and recommendation for a belief.
/// `horizon` is absolute; by default it covers both the cost-model horizon
/// and the longest projection span.
pub fn evaluate(scenario: &Scenario, belief: &BeliefState, cost_model: &CostModel, horizon: Option<u32>) -> Result<StepOutput> {
    let t = belief.period;
    let ppd = scenario.periods_per_day();
    let longest = scenario.projection_days.iter().max().copied().unwrap_or(1) * ppd;
    let horizon = horizon.unwrap_or(cost_model.horizon.max(t + longest));
    if horizon <= t {
        return Err(SessionError::InvalidHorizon { period: t, horizon }.into());
    }
    let passages = passages_for_belief(belief, &scenario.models, horizon)?;
    let attack = marginal_attack_distribution(&belief.p_d, &passages, &scenario.realizations)?;
    let mut projections = Vec::new();
    for &days in &scenario.projection_days {
        let until = t + days * ppd;
        if until > horizon {
            continue;
        }
        for (ti, target) in attack.targets.iter().enumerate() {
            projections.push(Projection { target: target.clone(), days, probability: attack.cumulative(ti, until) });
        }
    }
    let recommendation = if cost_model.horizon > t {
        Some(recommend_from_passages(&belief.p_d, &passages, cost_model, t)?)
    } else {
        None
    };
    Ok(StepOutput {
        period: t,
        pi: belief.pi.clone(),
        p_d: belief.p_d.clone(),
        p_r: belief.p_r.clone(),
        attack,
        projections,
        recommendation,
    })
}

fn start(
    scenario: &Scenario,
    prior_d: Vec<f64>,
    cost_model: CostModel,
    parent: Option<String>,
    description: Option<String>,
) -> Result<(Session, StepOutput)> {
    let belief = init_belief(&scenario.p0, &prior_d, &scenario.r_space.prior)?;
    let out = evaluate(scenario, &belief, &cost_model, None)?;
    let now = now_unix();
    let session = Session {
        id: uuid::Uuid::new_v4().to_string(),
        scenario_hash: scenario.hash.clone(),
        parent,
        description,
        prior_d,
        cost_model,
        belief,
        observations: Vec::new(),
        recommendations: out.recommendation.iter().map(RecommendationRecord::from).collect(),
        created_at: now,
        updated_at: now,
    };
    Ok((session, out))
}

/// Advances a session by one period. Several observations for the same
/// period are treated as simultaneous.
pub fn step_session(scenario: &Scenario, session: &Session, observations: &[Observation]) -> Result<(Session, StepOutput)> {
    if session.scenario_hash != scenario.hash {
        return Err(SessionError::ScenarioMismatch { expected: session.scenario_hash.clone(), found: scenario.hash.clone() }.into());
    }
    for (k, o) in observations.iter().enumerate() {
        check_observation(o, &scenario.signals, &scenario.r_space)
            .map_err(|(field, message)| SessionError::InvalidObservation { path: format!("observations[{k}].{field}"), message })?;
    }
    let belief = advance_belief_joint(&session.belief, &scenario.models, &scenario.signals, observations)?;
    let out = evaluate(scenario, &belief, &session.cost_model, None)?;
    let mut next = session.clone();
    next.belief = belief;
    next.observations.extend_from_slice(observations);
    next.recommendations.extend(out.recommendation.iter().map(RecommendationRecord::from));
    next.updated_at = now_unix();
    Ok((next, out))
}

/// Splits an observation log into per-period groups.
pub fn group_by_period(observations: &[Observation]) -> Vec<&[Observation]> {
    observations.chunk_by(|a, b| a.period == b.period).collect()
}

/// Hypothetical changes applied to a branch.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default)]
    pub description: Option<String>,
    /// Keep the parent's observations up to this period (default: all of them).
    #[serde(default)]
    pub at_period: Option<u32>,
    /// Hypothetical observations applied after `at_period`.
    #[serde(default)]
    pub observations: Vec<Observation>,
    /// Multiplies every alert and failure cost.
    #[serde(default)]
    pub cost_scale: Option<f64>,
    /// Replaces the cost model outright (applied before `cost_scale`).
    #[serde(default)]
    pub cost_model: Option<CostModel>,
    /// Re-derives P(D) from the crisis network under this evidence.
    #[serde(default)]
    pub evidence: Option<Evidence>,
}

impl Overrides {
    fn summary(&self) -> String {
        let mut parts = Vec::new();
        if let Some(p) = self.at_period {
            parts.push(format!("from period {p}"));
        }
        for o in &self.observations {
            parts.push(format!("{} {} at {}", o.signal, o.value, o.period));
        }
        if let Some(s) = self.cost_scale {
            parts.push(format!("costs x{s}"));
        }
        if self.cost_model.is_some() {
            parts.push("cost model replaced".into());
        }
        if self.evidence.is_some() {
            parts.push("crisis evidence replaced".into());
        }
        if parts.is_empty() {
            "copy".into()
        } else {
            parts.join("; ")
        }
    }
}

/// Effective inputs of a branch: prior, cost model and observation log.
pub fn branch_inputs(scenario: &Scenario, parent: &Session, overrides: &Overrides) -> Result<(Vec<f64>, CostModel, Vec<Observation>)> {
    let at = overrides.at_period.unwrap_or(parent.period());
    if at > parent.period() {
        return Err(bad_override("at_period", format!("parent is only at period {}", parent.period())).into());
    }
    let mut cost_model = overrides.cost_model.clone().unwrap_or_else(|| parent.cost_model.clone());
    if let Some(scale) = overrides.cost_scale {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(bad_override("cost_scale", "must be positive").into());
        }
        cost_model = cost_model.scaled(scale);
    }
    cost_model.validate().map_err(|e| bad_override("cost_model", e.to_string()))?;
    if cost_model.failure_costs.len() != scenario.realizations.len() {
        return Err(bad_override("cost_model.failure_costs", "one entry per realization").into());
    }
    let prior_d = match &overrides.evidence {
        Some(ev) => scenario.prior_under_evidence(ev).map_err(|e| bad_override("evidence", e.to_string()))?,
        None => parent.prior_d.clone(),
    };
    let mut observations: Vec<Observation> = parent.observations.iter().filter(|o| o.period <= at).cloned().collect();
    for (k, o) in overrides.observations.iter().enumerate() {
        let last = observations.last().map_or(0, |l| l.period);
        if o.period != last && o.period != last + 1 {
            return Err(bad_override(format!("observations[{k}].period"), format!("expected {} or {}", last, last + 1)).into());
        }
        if o.period <= at {
            return Err(bad_override(format!("observations[{k}].period"), format!("must be after period {at}")).into());
        }
        observations.push(o.clone());
    }
    Ok((prior_d, cost_model, observations))
}

/// Rebuilds a session from its effective inputs.
pub fn rebuild(
    scenario: &Scenario,
    prior_d: Vec<f64>,
    cost_model: CostModel,
    observations: &[Observation],
    parent: Option<String>,
    description: Option<String>,
) -> Result<Session> {
    let (mut session, _) = start(scenario, prior_d, cost_model, parent, description)?;
    for group in group_by_period(observations) {
        session = step_session(scenario, &session, group)?.0;
    }
    session.updated_at = session.created_at;
    Ok(session)
}

/// Deep-copied branch with overrides applied. The parent is not touched.
pub fn what_if(scenario: &Scenario, parent: &Session, overrides: &Overrides) -> Result<Session> {
    let (prior_d, cost_model, observations) = branch_inputs(scenario, parent, overrides)?;
    let description = overrides.description.clone().unwrap_or_else(|| overrides.summary());
    rebuild(scenario, prior_d, cost_model, &observations, Some(parent.id.clone()), Some(description))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueEvent {
    pub period: u32,
    pub alert_type: String,
}

/// Results of running a scenario's script from period 0.
#[derive(Debug, Clone)]
pub struct ReplayData {
    /// First passage per realization from p0, up to the report horizon.
    pub initial_passages: Vec<FirstPassageDistribution>,
    /// Attack distribution at period 0 under the scenario prior.
    pub initial_attack: AttackDistribution,
    /// One entry per period, starting at 0.
    pub outputs: Vec<StepOutput>,
    pub first_issue: Option<IssueEvent>,
    pub session: Session,
}

/// Replays the scenario's scripted observations.
pub fn replay(scenario: &Scenario) -> Result<ReplayData> {
    let mut initial_passages = Vec::with_capacity(scenario.models.len());
    for (j, m) in scenario.models.iter().enumerate() {
        let mut fp = first_passage(&scenario.p0, m, scenario.first_passage_horizon)?;
        fp.conditioning = crate::projection::Conditioning::Realization(j);
        initial_passages.push(fp);
    }
    let initial_attack = marginal_attack_distribution(&scenario.prior_d, &initial_passages, &scenario.realizations)?;

    let (mut session, out) = start(scenario, scenario.prior_d.clone(), scenario.cost_model.clone(), None, None)?;
    let mut outputs = vec![out];
    for group in group_by_period(&scenario.script) {
        let (next, out) = step_session(scenario, &session, group)?;
        session = next;
        outputs.push(out);
    }
    let first_issue = outputs.iter().find_map(|o| {
        o.recommendation
            .as_ref()
            .filter(|r| r.issue_now)
            .map(|r| IssueEvent { period: r.period, alert_type: r.alert_type.clone() })
    });
    Ok(ReplayData { initial_passages, initial_attack, outputs, first_issue, session })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplaySummary {
    pub scenario: String,
    pub scenario_hash: String,
    pub periods: u32,
    pub first_issue: Option<IssueEvent>,
    pub recommendations: Vec<RecommendationRecord>,
    pub files: Vec<String>,
}

fn write_csv<F>(dir: &Path, name: &str, header: &[&str], body: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<std::fs::File>) -> std::result::Result<(), csv::Error>,
{
    let mut w = csv::Writer::from_path(dir.join(name))?;
    w.write_record(header)?;
    body(&mut w)?;
    w.flush()?;
    Ok(name.to_string())
}

fn write_period_tables(
    scenario: &Scenario,
    outputs: &[StepOutput],
    recommendations: &[RecommendationRecord],
    out: &Path,
    files: &mut Vec<String>,
) -> Result<()> {
    let real = &scenario.realizations;
    files.push(write_csv(out, "posterior_d.csv", &["period", "realization", "target", "immediacy", "probability"], |w| {
        for o in outputs {
            for (r, p) in real.iter().zip(&o.p_d) {
                w.serialize((o.period, r.label(), &r.target, &r.immediacy, p))?;
            }
        }
        Ok(())
    })?);

    files.push(write_csv(out, "posterior_r.csv", &["period", "credibility", "probability"], |w| {
        for o in outputs {
            for (r, p) in o.p_r.iter().enumerate() {
                w.serialize((o.period, scenario.r_space.label(r), p))?;
            }
        }
        Ok(())
    })?);

    files.push(write_csv(out, "projections.csv", &["period", "target", "days", "probability"], |w| {
        for o in outputs {
            for p in &o.projections {
                w.serialize((o.period, &p.target, p.days, p.probability))?;
            }
        }
        Ok(())
    })?);

    files.push(write_csv(out, "pi.csv", &["period", "raster", "pi"], |w| {
        for o in outputs {
            for (id, p) in scenario.graph.ids().iter().zip(&o.pi) {
                w.serialize((o.period, id, p))?;
            }
        }
        Ok(())
    })?);

    files.push(write_csv(out, "scan.csv", &["period", "alert_type", "tau", "expected_disutility"], |w| {
        for rec in outputs.iter().filter_map(|o| o.recommendation.as_ref()) {
            rec.write_scan_rows(w)?;
        }
        Ok(())
    })?);

    files.push(write_csv(out, "recommendations.csv", &["period", "alert_type", "tau", "issue_now"], |w| {
        for r in recommendations {
            w.serialize((r.period, &r.alert_type, r.tau, r.issue_now))?;
        }
        Ok(())
    })?);

    Ok(())
}

/// Per-period outputs of a session, recomputed from its own prior, cost
/// model and observation log.
pub fn session_outputs(scenario: &Scenario, session: &Session) -> Result<Vec<StepOutput>> {
    let (mut current, out) = start(scenario, session.prior_d.clone(), session.cost_model.clone(), None, None)?;
    current.scenario_hash = session.scenario_hash.clone();
    let mut outputs = vec![out];
    for group in group_by_period(&session.observations) {
        let (next, out) = step_session(scenario, &current, group)?;
        current = next;
        outputs.push(out);
    }
    Ok(outputs)
}

/// Writes a session's per-period tables and its snapshot into `out`.
pub fn export_session(scenario: &Scenario, session: &Session, out: &Path) -> Result<Vec<String>> {
    let outputs = session_outputs(scenario, session)?;
    std::fs::create_dir_all(out)?;
    let mut files = Vec::new();
    write_period_tables(scenario, &outputs, &session.recommendations, out, &mut files)?;
    std::fs::write(out.join("session.json"), serde_json::to_string_pretty(session)? + "\n")?;
    files.push("session.json".into());
    Ok(files)
}

/// Replays the script and writes the report bundle into `out`.
pub fn run_replay(scenario: &Scenario, out: &Path) -> Result<ReplaySummary> {
    let data = replay(scenario)?;
    std::fs::create_dir_all(out)?;
    let real = &scenario.realizations;
    let mut files = Vec::new();

    files.push(write_csv(out, "first_passage.csv", &["realization", "target", "immediacy", "tau", "probability", "cumulative"], |w| {
        for (r, fp) in real.iter().zip(&data.initial_passages) {
            let mut cum = 0.0;
            for (k, p) in fp.probs.iter().enumerate() {
                cum += p;
                w.serialize((r.label(), &r.target, &r.immediacy, fp.origin + 1 + k as u32, p, cum))?;
            }
        }
        Ok(())
    })?);

    files.push(write_csv(out, "attack_distribution.csv", &["target", "tau", "probability", "cumulative"], |w| {
        let a = &data.initial_attack;
        for (ti, target) in a.targets.iter().enumerate() {
            let mut cum = 0.0;
            for (k, p) in a.probs[ti].iter().enumerate() {
                cum += p;
                w.serialize((target, a.origin + 1 + k as u32, p, cum))?;
            }
        }
        Ok(())
    })?);

    write_period_tables(scenario, &data.outputs, &data.session.recommendations, out, &mut files)?;

    files.push("summary.json".into());
    let summary = ReplaySummary {
        scenario: scenario.name().to_string(),
        scenario_hash: scenario.hash.clone(),
        periods: data.session.period(),
        first_issue: data.first_issue.clone(),
        recommendations: data.session.recommendations.clone(),
        files,
    };
    std::fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(summary)
}
