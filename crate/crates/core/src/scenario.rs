//! Scenario documents: parsing, validation and compilation into engine inputs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::alert::{AlertType, CostModel, Disutility, FailureWindow};
use crate::graph::{load_raster_graph, GraphData, RasterGraph, RasterId};
use crate::inference::{Observation, RSpace, SignalModel, SignalRegistry, SourceModel};
use crate::network::{build_network, ConditionalTable, CrisisNetwork, DiscreteVariable, Evidence};
use crate::projection::StateDistribution;
use crate::transition::{build_transition_matrix, DRealization, TransitionModel};

/// Major schema version this loader understands.
pub const SCHEMA_MAJOR: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("schema version `{found}` is not supported (expected {SCHEMA_MAJOR}.x)")]
    SchemaVersionMismatch { found: String },
    #[error("{path}: {message}")]
    Validation { path: String, message: String },
    #[error("{path}: {message}")]
    Component { path: String, code: &'static str, message: String },
}

impl ScenarioError {
    pub fn code(&self) -> &'static str {
        match self {
            ScenarioError::SchemaVersionMismatch { .. } => "SchemaVersionMismatch",
            ScenarioError::Validation { .. } => "ValidationError",
            ScenarioError::Component { code, .. } => code,
        }
    }

    pub fn path(&self) -> Option<&str> {
        match self {
            ScenarioError::SchemaVersionMismatch { .. } => Some("schema_version"),
            ScenarioError::Validation { path, .. } | ScenarioError::Component { path, .. } => Some(path),
        }
    }
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation { path: path.into(), message: message.into() }
}

macro_rules! component {
    ($path:expr) => {
        |e| ScenarioError::Component { path: $path.into(), code: e.code(), message: e.to_string() }
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub period_hours: f64,
    pub periods_per_day: u32,
    #[serde(default)]
    pub start_label: String,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrappingSetDoc {
    pub target: String,
    pub rasters: Vec<RasterId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImmediacyDoc {
    pub label: String,
    pub holding: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrisisNetworkDoc {
    pub variables: Vec<DiscreteVariable>,
    pub edges: Vec<(String, String)>,
    pub tables: Vec<ConditionalTable>,
    #[serde(default)]
    pub evidence: Evidence,
    /// Variable whose outcomes are the realization labels `TARGET/IMMEDIACY`.
    pub d_variable: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalDoc {
    pub id: String,
    pub values: Vec<String>,
    /// Sources whose functionality the likelihood depends on.
    #[serde(default)]
    pub sources: Vec<String>,
    /// Class name to member raster ids.
    #[serde(default)]
    pub classes: BTreeMap<String, Vec<RasterId>>,
    pub default_class: String,
    /// Class name to source-outcome key to a distribution over `values`.
    /// Keys are comma-joined outcomes of `sources` in order; `*` matches any.
    pub likelihood: BTreeMap<String, BTreeMap<String, Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlertTypeDoc {
    pub id: String,
    pub cost: f64,
    /// Keyed by target (every immediacy) or by realization label.
    #[serde(default)]
    pub lead_times: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostModelDoc {
    pub alert_types: Vec<AlertTypeDoc>,
    /// Keyed by target or by realization label.
    pub failure_costs: BTreeMap<String, f64>,
    pub daily_discount_rate: f64,
    pub periods_per_day: u32,
    #[serde(default)]
    pub disutility: Disutility,
    pub horizon: u32,
    #[serde(default)]
    pub failure_window: FailureWindow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    #[serde(default = "default_projection_days")]
    pub projection_days: Vec<u32>,
    /// Horizon of the first-passage export; defaults to the cost-model horizon.
    #[serde(default)]
    pub first_passage_horizon: Option<u32>,
}

fn default_projection_days() -> Vec<u32> {
    vec![2, 4, 7]
}

impl Default for ReportDoc {
    fn default() -> Self {
        Self { projection_days: default_projection_days(), first_passage_horizon: None }
    }
}

/// A scenario file as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDoc {
    pub schema_version: String,
    pub metadata: Metadata,
    pub graph: GraphData,
    pub trapping_sets: Vec<TrappingSetDoc>,
    pub immediacy: Vec<ImmediacyDoc>,
    /// Keyed by target (split evenly across immediacy) or by realization label.
    #[serde(default)]
    pub canonical_prior: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    pub crisis_network: Option<CrisisNetworkDoc>,
    pub sources: Vec<SourceModel>,
    pub signals: Vec<SignalDoc>,
    /// Raster id (as a string key) to probability.
    pub p0: BTreeMap<String, f64>,
    pub cost_model: CostModelDoc,
    #[serde(default)]
    pub script: Vec<Observation>,
    #[serde(default)]
    pub report: ReportDoc,
}

/// A validated scenario with every derived artifact built.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub doc: ScenarioDoc,
    /// Hex SHA-256 of the source text.
    pub hash: String,
    pub graph: RasterGraph,
    pub targets: Vec<String>,
    pub trapping: Vec<Vec<RasterId>>,
    pub realizations: Vec<DRealization>,
    pub models: Vec<TransitionModel>,
    pub network: Option<CrisisNetwork>,
    pub prior_d: Vec<f64>,
    pub r_space: RSpace,
    pub signals: SignalRegistry,
    pub p0: StateDistribution,
    pub cost_model: CostModel,
    pub script: Vec<Observation>,
    pub projection_days: Vec<u32>,
    pub first_passage_horizon: u32,
    pub warnings: Vec<String>,
}

impl Scenario {
    pub fn name(&self) -> &str {
        &self.doc.metadata.name
    }

    pub fn periods_per_day(&self) -> u32 {
        self.doc.metadata.periods_per_day
    }

    pub fn target_index(&self, target: &str) -> Option<usize> {
        self.targets.iter().position(|t| t == target)
    }

    pub fn realization_index(&self, label: &str) -> Option<usize> {
        self.realizations.iter().position(|r| r.label() == label)
    }

    /// P(D) implied by the crisis network under alternative evidence.
    pub fn prior_under_evidence(&self, evidence: &Evidence) -> Result<Vec<f64>, ScenarioError> {
        let (net, doc) = match (&self.network, &self.doc.crisis_network) {
            (Some(n), Some(d)) => (n, d),
            _ => return Err(invalid("crisis_network", "scenario has no crisis network")),
        };
        network_prior(net, &doc.d_variable, evidence, &self.realizations)
    }
}

/// SHA-256 of a scenario's text, hex encoded.
pub fn scenario_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn load_scenario(path: &std::path::Path) -> crate::Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    Ok(load_scenario_str(&text)?)
}

/// Parses, validates and compiles a scenario document.
pub fn load_scenario_str(text: &str) -> Result<Scenario, ScenarioError> {
    let value: Value = serde_json::from_str(text).map_err(|e| invalid("", format!("not valid JSON: {e}")))?;
    check_version(&value)?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ScenarioDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        invalid(if path == "." { String::new() } else { path }, e.into_inner().to_string())
    })?;
    compile(doc, scenario_hash(text))
}

fn check_version(value: &Value) -> Result<(), ScenarioError> {
    let found = match value.get("schema_version") {
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
        None => return Err(invalid("schema_version", "missing")),
    };
    let major = found.split('.').next().and_then(|m| m.parse::<u32>().ok());
    if major != Some(SCHEMA_MAJOR) {
        return Err(ScenarioError::SchemaVersionMismatch { found });
    }
    Ok(())
}

/// Resolves a key that names either a target or a realization label.
fn keyed_realizations(key: &str, realizations: &[DRealization]) -> Vec<usize> {
    let by_label: Vec<usize> = realizations.iter().filter(|r| r.label() == key).map(|r| r.index).collect();
    if !by_label.is_empty() {
        return by_label;
    }
    realizations.iter().filter(|r| r.target == key).map(|r| r.index).collect()
}

fn network_prior(
    net: &CrisisNetwork,
    d_variable: &str,
    evidence: &Evidence,
    realizations: &[DRealization],
) -> Result<Vec<f64>, ScenarioError> {
    let post = net.posterior_query(&[d_variable], evidence).map_err(component!("crisis_network"))?;
    let mut prior = vec![0.0; realizations.len()];
    for (o, p) in post.outcomes[0].iter().zip(&post.probs) {
        match realizations.iter().find(|r| &r.label() == o) {
            Some(r) => prior[r.index] = *p,
            None if *p == 0.0 => {}
            None => {
                return Err(invalid(
                    format!("crisis_network.d_variable.{o}"),
                    format!("outcome `{o}` is not a realization label"),
                ))
            }
        }
    }
    Ok(prior)
}

fn compile(doc: ScenarioDoc, hash: String) -> Result<Scenario, ScenarioError> {
    let mut warnings = Vec::new();
    let md = &doc.metadata;
    if md.periods_per_day == 0 {
        return Err(invalid("metadata.periods_per_day", "must be at least 1"));
    }
    if !(md.period_hours > 0.0) {
        return Err(invalid("metadata.period_hours", "must be positive"));
    }

    let graph = load_raster_graph(&doc.graph).map_err(component!("graph"))?;

    if doc.trapping_sets.is_empty() {
        return Err(invalid("trapping_sets", "at least one target is required"));
    }
    let mut targets = Vec::new();
    let mut trapping = Vec::new();
    for (i, ts) in doc.trapping_sets.iter().enumerate() {
        if targets.contains(&ts.target) {
            return Err(invalid(format!("trapping_sets[{i}].target"), format!("duplicate target `{}`", ts.target)));
        }
        if ts.rasters.is_empty() {
            return Err(invalid(format!("trapping_sets[{i}].rasters"), "trapping set is empty"));
        }
        if let Some(bad) = ts.rasters.iter().find(|id| graph.index_of(**id).is_none()) {
            return Err(invalid(format!("trapping_sets[{i}].rasters"), format!("unknown raster {bad}")));
        }
        targets.push(ts.target.clone());
        trapping.push(ts.rasters.clone());
    }

    if doc.immediacy.is_empty() {
        return Err(invalid("immediacy", "at least one immediacy level is required"));
    }
    let mut realizations = Vec::new();
    for target in &targets {
        for (mi, imm) in doc.immediacy.iter().enumerate() {
            if doc.immediacy[..mi].iter().any(|o| o.label == imm.label) {
                return Err(invalid(format!("immediacy[{mi}].label"), format!("duplicate label `{}`", imm.label)));
            }
            realizations.push(DRealization {
                index: realizations.len(),
                target: target.clone(),
                immediacy: imm.label.clone(),
                holding: imm.holding,
            });
        }
    }

    let mut models = Vec::with_capacity(realizations.len());
    for r in &realizations {
        let ti = targets.iter().position(|t| *t == r.target).unwrap();
        let mi = doc.immediacy.iter().position(|m| m.label == r.immediacy).unwrap();
        let model = build_transition_matrix(&graph, &trapping[ti], r.holding).map_err(|e| match e {
            crate::transition::TransitionError::InvalidHolding(_) => invalid(format!("immediacy[{mi}].holding"), e.to_string()),
            e => ScenarioError::Component { path: format!("trapping_sets[{ti}]"), code: "TransitionError", message: e.to_string() },
        })?;
        for w in model.warnings() {
            warnings.push(format!("{}: {w:?}", r.label()));
        }
        models.push(model);
    }

    let canonical = match &doc.canonical_prior {
        None => None,
        Some(map) => {
            let mut prior = vec![0.0; realizations.len()];
            let mut covered = vec![false; realizations.len()];
            for (key, &p) in map {
                let hit = keyed_realizations(key, &realizations);
                if hit.is_empty() {
                    return Err(invalid(format!("canonical_prior.{key}"), format!("undefined target or realization `{key}`")));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(format!("canonical_prior.{key}"), "probability outside [0, 1]"));
                }
                for &j in &hit {
                    prior[j] = p / hit.len() as f64;
                    covered[j] = true;
                }
            }
            if let Some(j) = covered.iter().position(|c| !c) {
                return Err(invalid("canonical_prior", format!("no entry for `{}`", realizations[j].label())));
            }
            let total: f64 = prior.iter().sum();
            if (total - 1.0).abs() > 1e-6 {
                return Err(invalid("canonical_prior", format!("sums to {total}")));
            }
            Some(prior)
        }
    };

    let (network, prior_d) = match &doc.crisis_network {
        Some(cn) => {
            let net = build_network(cn.variables.clone(), cn.edges.clone(), cn.tables.clone()).map_err(component!("crisis_network"))?;
            let prior = network_prior(&net, &cn.d_variable, &cn.evidence, &realizations)?;
            if let Some(canon) = &canonical {
                for (j, (a, b)) in prior.iter().zip(canon).enumerate() {
                    if (a - b).abs() > 1e-6 {
                        return Err(invalid(
                            format!("canonical_prior.{}", realizations[j].label()),
                            format!("crisis network gives {a}, canonical vector says {b}"),
                        ));
                    }
                }
            }
            (Some(net), prior)
        }
        None => match canonical {
            Some(p) => (None, p),
            None => return Err(invalid("canonical_prior", "either a crisis network or a canonical prior is required")),
        },
    };

    let r_space = RSpace::new(doc.sources.clone()).map_err(component!("sources"))?;

    let mut models_s = Vec::new();
    for (si, s) in doc.signals.iter().enumerate() {
        models_s.push(compile_signal(si, s, &graph, &r_space)?);
    }
    let signals = SignalRegistry::new(models_s);

    let mut p0 = vec![0.0; graph.len()];
    for (key, &p) in &doc.p0 {
        let idx = key
            .trim()
            .parse::<RasterId>()
            .ok()
            .and_then(|id| graph.index_of(id))
            .ok_or_else(|| invalid(format!("p0.{key}"), format!("unknown raster `{key}`")))?;
        p0[idx] = p;
    }
    let p0 = StateDistribution::new(0, p0).map_err(component!("p0"))?;

    let cost_model = compile_costs(&doc.cost_model, &realizations, md.periods_per_day)?;

    for (k, o) in doc.script.iter().enumerate() {
        let path = format!("script[{k}]");
        if o.period != k as u32 + 1 {
            return Err(invalid(format!("{path}.period"), format!("expected period {}, found {}", k + 1, o.period)));
        }
        check_observation(o, &signals, &r_space).map_err(|(field, msg)| invalid(format!("{path}.{field}"), msg))?;
    }

    if doc.report.projection_days.contains(&0) {
        return Err(invalid("report.projection_days", "projection spans must be at least one day"));
    }
    let first_passage_horizon = doc.report.first_passage_horizon.unwrap_or(cost_model.horizon);
    if first_passage_horizon == 0 {
        return Err(invalid("report.first_passage_horizon", "must be positive"));
    }

    Ok(Scenario {
        graph,
        targets,
        trapping,
        realizations,
        models,
        network,
        prior_d,
        r_space,
        signals,
        p0,
        cost_model,
        script: doc.script.clone(),
        projection_days: doc.report.projection_days.clone(),
        first_passage_horizon,
        warnings,
        hash,
        doc,
    })
}

/// Checks an observation against the registered signals and sources.
/// On failure returns the offending field and a message.
pub fn check_observation(o: &Observation, signals: &SignalRegistry, r_space: &RSpace) -> Result<(), (&'static str, String)> {
    let model = signals.get(&o.signal).ok_or(("signal", format!("unregistered signal type `{}`", o.signal)))?;
    if model.value_index(&o.value).is_none() {
        return Err(("value", format!("`{}` is not a value of `{}`", o.value, o.signal)));
    }
    if let Some(s) = o.sources.iter().find(|s| r_space.source_index(s).is_none()) {
        return Err(("sources", format!("undefined source `{s}`")));
    }
    Ok(())
}

fn compile_signal(si: usize, s: &SignalDoc, graph: &RasterGraph, r_space: &RSpace) -> Result<SignalModel, ScenarioError> {
    let base = format!("signals[{si}]");
    if s.values.is_empty() {
        return Err(invalid(format!("{base}.values"), "no signal values"));
    }
    let mut src = Vec::new();
    for (k, id) in s.sources.iter().enumerate() {
        src.push(
            r_space
                .source_index(id)
                .ok_or_else(|| invalid(format!("{base}.sources[{k}]"), format!("undefined source `{id}`")))?,
        );
    }
    let mut class_names: Vec<String> = s.classes.keys().cloned().collect();
    if !class_names.contains(&s.default_class) {
        class_names.push(s.default_class.clone());
    }
    let default = class_names.iter().position(|c| *c == s.default_class).unwrap();
    let mut class_of = vec![default; graph.len()];
    let mut assigned = BTreeSet::new();
    for (ci, (name, ids)) in s.classes.iter().enumerate() {
        for id in ids {
            let idx = graph
                .index_of(*id)
                .ok_or_else(|| invalid(format!("{base}.classes.{name}"), format!("unknown raster {id}")))?;
            if !assigned.insert(idx) {
                return Err(invalid(format!("{base}.classes.{name}"), format!("raster {id} is in more than one class")));
            }
            class_of[idx] = ci;
        }
    }
    let mut table = Vec::with_capacity(class_names.len());
    for name in &class_names {
        let entries = s
            .likelihood
            .get(name)
            .ok_or_else(|| invalid(format!("{base}.likelihood"), format!("no likelihood for class `{name}`")))?;
        let mut per_r = Vec::with_capacity(r_space.len());
        for r in 0..r_space.len() {
            let key = r_space.outcomes_of(r, &src).join(",");
            let row = entries.get(&key).or_else(|| entries.get("*")).ok_or_else(|| {
                invalid(format!("{base}.likelihood.{name}"), format!("no entry for `{key}` and no `*` fallback"))
            })?;
            per_r.push(row.clone());
        }
        table.push(per_r);
    }
    for name in s.likelihood.keys() {
        if !class_names.contains(name) {
            return Err(invalid(format!("{base}.likelihood.{name}"), format!("undefined class `{name}`")));
        }
    }
    SignalModel::new(&s.id, s.values.clone(), class_names, class_of, table).map_err(component!(format!("{base}.likelihood")))
}

fn compile_costs(doc: &CostModelDoc, realizations: &[DRealization], periods_per_day: u32) -> Result<CostModel, ScenarioError> {
    let n = realizations.len();
    let mut failure_costs = vec![None; n];
    for (key, &v) in &doc.failure_costs {
        let hit = keyed_realizations(key, realizations);
        if hit.is_empty() {
            return Err(invalid(format!("cost_model.failure_costs.{key}"), format!("undefined target or realization `{key}`")));
        }
        for j in hit {
            failure_costs[j] = Some(v);
        }
    }
    let failure_costs = failure_costs
        .iter()
        .enumerate()
        .map(|(j, v)| v.ok_or_else(|| invalid("cost_model.failure_costs", format!("no failure cost for `{}`", realizations[j].label()))))
        .collect::<Result<Vec<_>, _>>()?;
    let mut alert_types = Vec::new();
    for (i, a) in doc.alert_types.iter().enumerate() {
        if doc.alert_types[..i].iter().any(|b| b.id == a.id) {
            return Err(invalid(format!("cost_model.alert_types[{i}].id"), format!("duplicate alert type `{}`", a.id)));
        }
        let mut lead_times = vec![None; n];
        for (key, &l) in &a.lead_times {
            let hit = keyed_realizations(key, realizations);
            if hit.is_empty() {
                return Err(invalid(
                    format!("cost_model.alert_types[{i}].lead_times.{key}"),
                    format!("undefined target or realization `{key}`"),
                ));
            }
            for j in hit {
                lead_times[j] = Some(l);
            }
        }
        alert_types.push(AlertType { id: a.id.clone(), cost: a.cost, lead_times });
    }
    if doc.periods_per_day != periods_per_day {
        return Err(invalid("cost_model.periods_per_day", "must match metadata.periods_per_day"));
    }
    let cm = CostModel {
        alert_types,
        failure_costs,
        daily_discount_rate: doc.daily_discount_rate,
        periods_per_day: doc.periods_per_day,
        disutility: doc.disutility,
        horizon: doc.horizon,
        failure_window: doc.failure_window,
    };
    cm.validate().map_err(|e| match e {
        crate::alert::AlertError::InvalidCostModel { field, reason } => invalid(format!("cost_model.{field}"), reason),
        e => ScenarioError::Component { path: "cost_model".into(), code: e.code(), message: e.to_string() },
    })?;
    if cm.horizon == 0 {
        return Err(invalid("cost_model.horizon", "must be positive"));
    }
    Ok(cm)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::shortest_hops;
    use crate::projection::first_passage;

    pub(crate) const PEARL: &str = include_str!("../../../scenarios/pearl_harbor.json");
    pub(crate) const TOY: &str = include_str!("../../../scenarios/two_raster.json");

    pub(crate) fn pearl() -> Scenario {
        load_scenario_str(PEARL).unwrap()
    }

    fn edit(text: &str, f: impl FnOnce(&mut Value)) -> String {
        let mut v: Value = serde_json::from_str(text).unwrap();
        f(&mut v);
        v.to_string()
    }

    #[test]
    fn pearl_harbor_loads() {
        let s = pearl();
        assert_eq!(s.realizations.len(), 12);
        assert_eq!(s.cost_model.alert_types.len(), 6);
        assert_eq!(s.graph.len(), 260);
        assert_eq!(s.p0.probs[s.graph.index_of(191).unwrap()], 1.0);
        assert_eq!(s.graph.blocked_ids(), vec![85, 86]);
        assert_eq!(s.r_space.prior.len(), 4);
        let oahu = s.realization_index("OAHU/IMMEDIATE").unwrap();
        assert_eq!(s.cost_model.failure_costs[oahu], 1.0);
        assert_eq!(s.cost_model.alert_types[0].lead_times[oahu], Some(4));
        let kra = s.realization_index("SINGAPORE_KRA/DELAYED").unwrap();
        assert_eq!(s.cost_model.alert_types[4].lead_times[kra], Some(14));
        assert_eq!(s.cost_model.alert_types[4].cost, 1e-6);
        assert!(s.warnings.is_empty(), "{:?}", s.warnings);
    }

    #[test]
    fn crisis_network_reproduces_the_canonical_vector() {
        let s = pearl();
        let net = s.network.as_ref().unwrap();
        assert_eq!(net.variables().len(), 7);
        let canon = s.doc.canonical_prior.as_ref().unwrap();
        for r in &s.realizations {
            assert!((s.prior_d[r.index] - canon[&r.target] / 2.0).abs() < 1e-6, "{}", r.label());
        }
    }

    #[test]
    fn crisis_network_follows_its_documented_logic() {
        let s = pearl();
        let net = s.network.as_ref().unwrap();
        let mut ev = Evidence::new();
        ev.insert("perceives_threat".into(), "NO".into());
        let post = net.posterior_query(&["objective", "priority"], &ev).unwrap();
        for (a, oa) in post.outcomes[0].iter().enumerate() {
            for (b, ob) in post.outcomes[1].iter().enumerate() {
                let p = post.probs[a * post.outcomes[1].len() + b];
                if oa != ob {
                    assert_eq!(p, 0.0, "priority {ob} with objective {oa}");
                }
            }
        }
        let mut ev = Evidence::new();
        ev.insert("action_unpredicted".into(), "YES".into());
        let t = net.posterior_query(&["target"], &ev).unwrap();
        for (o, p) in t.outcomes[0].iter().zip(&t.probs) {
            if !o.starts_with("OAHU/") && !o.starts_with("KURILES/") && !o.starts_with("MANILA_BAY/") {
                assert!(*p < 1e-6, "{o}: {p}");
            }
        }
    }

    #[test]
    fn sasebo_is_nine_hops_from_oahu() {
        let s = pearl();
        let oahu = s.target_index("OAHU").unwrap();
        assert_eq!(shortest_hops(&s.graph, 191, &s.trapping[oahu]).unwrap(), 9);
    }

    #[test]
    fn every_realization_absorbs() {
        let s = pearl();
        for (j, m) in s.models.iter().enumerate() {
            let fp = first_passage(&s.p0, m, 2000).unwrap();
            assert!(fp.residual < 1e-6, "{}: {}", s.realizations[j].label(), fp.residual);
        }
    }

    #[test]
    fn minimal_scenario_loads() {
        let s = load_scenario_str(TOY).unwrap();
        assert_eq!(s.realizations.len(), 2);
        assert!(s.network.is_none());
    }

    #[test]
    fn undefined_label_is_named() {
        let text = edit(PEARL, |v| {
            v["cost_model"]["alert_types"][0]["lead_times"]["HAWAII"] = 3.into();
        });
        let err = load_scenario_str(&text).unwrap_err();
        assert_eq!(err.code(), "ValidationError");
        assert_eq!(err.path(), Some("cost_model.alert_types[0].lead_times.HAWAII"));
        assert!(err.to_string().contains("HAWAII"));
    }

    #[test]
    fn unknown_major_version_is_rejected() {
        let text = edit(TOY, |v| v["schema_version"] = "2.0".into());
        assert!(matches!(load_scenario_str(&text), Err(ScenarioError::SchemaVersionMismatch { .. })));
        let text = edit(TOY, |v| v["schema_version"] = "1.3".into());
        assert!(load_scenario_str(&text).is_ok());
    }

    #[test]
    fn parse_errors_carry_a_path() {
        let text = edit(TOY, |v| v["cost_model"]["horizon"] = "soon".into());
        let err = load_scenario_str(&text).unwrap_err();
        assert_eq!(err.path(), Some("cost_model.horizon"));
    }

    #[test]
    fn inconsistent_canonical_prior_is_rejected() {
        let text = edit(PEARL, |v| {
            let shift = 0.2 - v["canonical_prior"]["OAHU"].as_f64().unwrap();
            let manila = v["canonical_prior"]["MANILA_BAY"].as_f64().unwrap();
            v["canonical_prior"]["OAHU"] = 0.2.into();
            v["canonical_prior"]["MANILA_BAY"] = (manila - shift).into();
        });
        let err = load_scenario_str(&text).unwrap_err();
        assert!(err.path().unwrap().starts_with("canonical_prior."), "{err}");
    }

    #[test]
    fn bad_script_is_rejected() {
        let text = edit(TOY, |v| v["script"][0]["value"] = "LOUD".into());
        assert_eq!(load_scenario_str(&text).unwrap_err().path(), Some("script[0].value"));
    }
}
