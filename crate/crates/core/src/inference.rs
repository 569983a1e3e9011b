//! Exact filtering over the static variables (D, R) and the moving state X.
//!
//! The belief keeps one weight and one conditional state vector per (j, r)
//! pair. Each observation propagates every conditional vector through P_j,
//! weights it by the signal likelihood under r, and moves the normalizer into
//! the pair's weight. Weights are updated in log space.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::projection::StateDistribution;
use crate::transition::TransitionModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferenceError {
    #[error("observation at period {period} has zero likelihood under every hypothesis")]
    ImpossibleObservation { period: u32 },
    #[error("signal type `{0}` is not registered")]
    UnregisteredSignalType(String),
    #[error("signal `{signal}` has no value `{value}`")]
    UnknownSignalValue { signal: String, value: String },
    #[error("expected an observation for period {expected}, got {found}")]
    NonConsecutivePeriod { expected: u32, found: u32 },
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch { what: &'static str, expected: usize, found: usize },
    #[error("{what} does not sum to 1 (sum {sum})")]
    Unnormalized { what: String, sum: f64 },
    #[error("source `{source_id}` is invalid: {reason}")]
    InvalidSource { source_id: String, reason: String },
    #[error("no observations supplied")]
    EmptyObservation,
}

impl InferenceError {
    pub fn code(&self) -> &'static str {
        match self {
            InferenceError::ImpossibleObservation { .. } => "ImpossibleObservation",
            InferenceError::UnregisteredSignalType(_) => "UnregisteredSignalType",
            InferenceError::UnknownSignalValue { .. } => "UnknownSignalValue",
            InferenceError::NonConsecutivePeriod { .. } => "NonConsecutivePeriod",
            InferenceError::DimensionMismatch { .. } => "DimensionMismatch",
            InferenceError::Unnormalized { .. } => "Unnormalized",
            InferenceError::InvalidSource { .. } => "InvalidSource",
            InferenceError::EmptyObservation => "EmptyObservation",
        }
    }
}

fn check_sum(what: impl FnOnce() -> String, v: &[f64], tol: f64) -> Result<(), InferenceError> {
    let sum: f64 = v.iter().sum();
    if v.iter().any(|p| !(0.0..=1.0).contains(p)) || (sum - 1.0).abs() > tol {
        return Err(InferenceError::Unnormalized { what: what(), sum });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    pub id: String,
    pub outcomes: Vec<String>,
    pub prior: Vec<f64>,
}

/// Joint realizations of the credibility vector R, first source varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RSpace {
    pub sources: Vec<SourceModel>,
    pub combos: Vec<Vec<usize>>,
    pub prior: Vec<f64>,
}

impl RSpace {
    pub fn new(sources: Vec<SourceModel>) -> Result<Self, InferenceError> {
        for s in &sources {
            if s.outcomes.is_empty() || s.outcomes.len() != s.prior.len() {
                return Err(InferenceError::InvalidSource {
                    source_id: s.id.clone(),
                    reason: "needs one prior entry per outcome".into(),
                });
            }
            check_sum(|| format!("prior of source `{}`", s.id), &s.prior, 1e-12)?;
        }
        let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
        let mut prior = vec![1.0];
        for s in &sources {
            let mut nc = Vec::with_capacity(combos.len() * s.outcomes.len());
            let mut np = Vec::with_capacity(combos.len() * s.outcomes.len());
            for (c, p) in combos.iter().zip(&prior) {
                for (o, q) in s.prior.iter().enumerate() {
                    let mut cc = c.clone();
                    cc.push(o);
                    nc.push(cc);
                    np.push(p * q);
                }
            }
            combos = nc;
            prior = np;
        }
        Ok(Self { sources, combos, prior })
    }

    pub fn len(&self) -> usize {
        self.combos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.combos.is_empty()
    }

    pub fn source_index(&self, id: &str) -> Option<usize> {
        self.sources.iter().position(|s| s.id == id)
    }

    /// Outcome labels of the given sources under realization `r`.
    pub fn outcomes_of(&self, r: usize, sources: &[usize]) -> Vec<&str> {
        sources.iter().map(|&s| self.sources[s].outcomes[self.combos[r][s]].as_str()).collect()
    }

    pub fn label(&self, r: usize) -> String {
        self.sources
            .iter()
            .zip(&self.combos[r])
            .map(|(s, &o)| format!("{}={}", s.id, s.outcomes[o]))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Likelihood table `P(value | class(state), r)` for one signal type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalModel {
    pub id: String,
    pub values: Vec<String>,
    pub class_names: Vec<String>,
    /// Class index for every state index.
    pub class_of: Vec<usize>,
    n_r: usize,
    /// Flattened `[class][r][value]`.
    table: Vec<f64>,
}

impl SignalModel {
    /// `table[class][r]` is a distribution over `values`.
    pub fn new(
        id: &str,
        values: Vec<String>,
        class_names: Vec<String>,
        class_of: Vec<usize>,
        table: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self, InferenceError> {
        if table.len() != class_names.len() {
            return Err(InferenceError::DimensionMismatch {
                what: "likelihood classes",
                expected: class_names.len(),
                found: table.len(),
            });
        }
        if let Some(&bad) = class_of.iter().find(|&&c| c >= class_names.len()) {
            return Err(InferenceError::DimensionMismatch { what: "state class", expected: class_names.len(), found: bad });
        }
        let n_r = table.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(class_names.len() * n_r * values.len());
        for (c, per_r) in table.iter().enumerate() {
            if per_r.len() != n_r {
                return Err(InferenceError::DimensionMismatch { what: "credibility realizations", expected: n_r, found: per_r.len() });
            }
            for (r, row) in per_r.iter().enumerate() {
                if row.len() != values.len() {
                    return Err(InferenceError::DimensionMismatch { what: "signal values", expected: values.len(), found: row.len() });
                }
                check_sum(|| format!("likelihood of `{id}` for class `{}` and r={r}", class_names[c]), row, 1e-12)?;
                flat.extend_from_slice(row);
            }
        }
        Ok(Self { id: id.to_string(), values, class_names, class_of, n_r, table: flat })
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn value_index(&self, value: &str) -> Option<usize> {
        self.values.iter().position(|v| v == value)
    }

    pub fn likelihood(&self, state: usize, r: usize, value: usize) -> f64 {
        let c = self.class_of[state];
        self.table[(c * self.n_r + r) * self.values.len() + value]
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SignalRegistry {
    pub models: Vec<SignalModel>,
}

impl SignalRegistry {
    pub fn new(models: Vec<SignalModel>) -> Self {
        Self { models }
    }

    pub fn get(&self, id: &str) -> Option<&SignalModel> {
        self.models.iter().find(|m| m.id == id)
    }
}

/// One intelligence signal reported for a period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub period: u32,
    pub signal: String,
    pub value: String,
    #[serde(default)]
    pub sources: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefState {
    pub period: u32,
    pub n_d: usize,
    pub n_r: usize,
    /// `weights[j * n_r + r] = P(D = j, R = r | signals)`.
    pub weights: Vec<f64>,
    /// `conditionals[j * n_r + r] = P(X_t | D = j, R = r, signals)`.
    pub conditionals: Vec<Vec<f64>>,
    pub log_likelihood: f64,
    pub pi: Vec<f64>,
    pub p_d: Vec<f64>,
    pub p_r: Vec<f64>,
}

impl BeliefState {
    /// Assembles a belief and computes its marginals.
    pub fn from_parts(period: u32, n_d: usize, n_r: usize, weights: Vec<f64>, conditionals: Vec<Vec<f64>>, log_likelihood: f64) -> Self {
        let mut b = Self { period, n_d, n_r, weights, conditionals, log_likelihood, pi: Vec::new(), p_d: Vec::new(), p_r: Vec::new() };
        b.refresh_marginals();
        b
    }

    pub fn n_states(&self) -> usize {
        self.conditionals.first().map_or(0, Vec::len)
    }

    pub fn weight(&self, j: usize, r: usize) -> f64 {
        self.weights[j * self.n_r + r]
    }

    pub fn conditional(&self, j: usize, r: usize) -> &[f64] {
        &self.conditionals[j * self.n_r + r]
    }

    /// P(X_t | D = j, signals).
    pub fn state_given_d(&self, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n_states()];
        let wj: f64 = (0..self.n_r).map(|r| self.weight(j, r)).sum();
        if wj <= 0.0 {
            // impossible realization; any valid vector will do, it carries no weight
            return self.conditional(j, 0).to_vec();
        }
        for r in 0..self.n_r {
            let w = self.weight(j, r) / wj;
            for (o, c) in out.iter_mut().zip(self.conditional(j, r)) {
                *o += w * c;
            }
        }
        out
    }

    /// Recomputes π_t, P(D | signals) and P(R | signals) from the joint.
    pub fn refresh_marginals(&mut self) {
        let n = self.n_states();
        let mut pi = vec![0.0; n];
        let mut p_d = vec![0.0; self.n_d];
        let mut p_r = vec![0.0; self.n_r];
        for j in 0..self.n_d {
            for r in 0..self.n_r {
                let w = self.weight(j, r);
                p_d[j] += w;
                p_r[r] += w;
                for (p, c) in pi.iter_mut().zip(self.conditional(j, r)) {
                    *p += w * c;
                }
            }
        }
        self.pi = pi;
        self.p_d = p_d;
        self.p_r = p_r;
    }

    /// Marginals (π_t, P(D | signals), P(R | signals)).
    pub fn marginals(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.pi, &self.p_d, &self.p_r)
    }

    pub fn state_distribution(&self) -> StateDistribution {
        StateDistribution { period: self.period, probs: self.pi.clone() }
    }

    /// Snapshot of the joint weights: `period,j,r,weight`.
    pub fn weights_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["period", "j", "r", "weight"])?;
        for j in 0..self.n_d {
            for r in 0..self.n_r {
                w.serialize((self.period, j, r, self.weight(j, r)))?;
            }
        }
        crate::csvout::finish(w)
    }

    /// Snapshot of π_t: `period,raster,pi`.
    pub fn pi_csv(&self, raster_ids: &[u32]) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["period", "raster", "pi"])?;
        for (id, p) in raster_ids.iter().zip(&self.pi) {
            w.serialize((self.period, id, p))?;
        }
        crate::csvout::finish(w)
    }
}

/// Belief before any signal: weights = prior_D ⊗ prior_R, every conditional = p0.
pub fn init_belief(p0: &StateDistribution, prior_d: &[f64], prior_r: &[f64]) -> Result<BeliefState, InferenceError> {
    check_sum(|| "prior over D".into(), prior_d, 1e-9)?;
    check_sum(|| "prior over R".into(), prior_r, 1e-9)?;
    check_sum(|| "initial state distribution".into(), &p0.probs, 1e-10)?;
    let (n_d, n_r) = (prior_d.len(), prior_r.len());
    let mut weights = Vec::with_capacity(n_d * n_r);
    for pd in prior_d {
        for pr in prior_r {
            weights.push(pd * pr);
        }
    }
    let conditionals = vec![p0.probs.clone(); n_d * n_r];
    Ok(BeliefState::from_parts(p0.period, n_d, n_r, weights, conditionals, 0.0))
}

/// Advances the belief by one period with a single observation.
pub fn advance_belief(
    belief: &BeliefState,
    models: &[TransitionModel],
    signals: &SignalRegistry,
    obs: &Observation,
) -> Result<BeliefState, InferenceError> {
    advance_belief_joint(belief, models, signals, std::slice::from_ref(obs))
}

/// Advances the belief by one period; simultaneous observations multiply.
pub fn advance_belief_joint(
    belief: &BeliefState,
    models: &[TransitionModel],
    signals: &SignalRegistry,
    observations: &[Observation],
) -> Result<BeliefState, InferenceError> {
    let expected = belief.period + 1;
    if observations.is_empty() {
        return Err(InferenceError::EmptyObservation);
    }
    if let Some(o) = observations.iter().find(|o| o.period != expected) {
        return Err(InferenceError::NonConsecutivePeriod { expected, found: o.period });
    }
    if models.len() != belief.n_d {
        return Err(InferenceError::DimensionMismatch { what: "transition models", expected: belief.n_d, found: models.len() });
    }
    let n = belief.n_states();
    if let Some(m) = models.iter().find(|m| m.len() != n) {
        return Err(InferenceError::DimensionMismatch { what: "transition model size", expected: n, found: m.len() });
    }
    let mut resolved = Vec::with_capacity(observations.len());
    for o in observations {
        let model = signals.get(&o.signal).ok_or_else(|| InferenceError::UnregisteredSignalType(o.signal.clone()))?;
        let v = model.value_index(&o.value).ok_or_else(|| InferenceError::UnknownSignalValue {
            signal: o.signal.clone(),
            value: o.value.clone(),
        })?;
        if model.class_of.len() != n {
            return Err(InferenceError::DimensionMismatch { what: "signal state classes", expected: n, found: model.class_of.len() });
        }
        if model.n_r() != belief.n_r {
            return Err(InferenceError::DimensionMismatch { what: "signal credibility realizations", expected: belief.n_r, found: model.n_r() });
        }
        resolved.push((model, v));
    }

    let mut log_w = Vec::with_capacity(belief.weights.len());
    let mut conditionals = Vec::with_capacity(belief.conditionals.len());
    let mut prop = vec![0.0; n];
    for j in 0..belief.n_d {
        for r in 0..belief.n_r {
            models[j].propagate_into(belief.conditional(j, r), &mut prop);
            let mut post: Vec<f64> = prop
                .iter()
                .enumerate()
                .map(|(x, &p)| resolved.iter().fold(p, |acc, (m, v)| acc * m.likelihood(x, r, *v)))
                .collect();
            let z: f64 = post.iter().sum();
            let w = belief.weight(j, r);
            if z > 0.0 && w > 0.0 {
                post.iter_mut().for_each(|p| *p /= z);
                log_w.push(w.ln() + z.ln());
            } else {
                // the pair is ruled out; keep the prediction so the vector stays a distribution
                let s: f64 = prop.iter().sum();
                post = prop.iter().map(|p| p / s).collect();
                log_w.push(f64::NEG_INFINITY);
            }
            conditionals.push(post);
        }
    }
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(InferenceError::ImpossibleObservation { period: expected });
    }
    let scaled: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = scaled.iter().sum();
    let weights = scaled.iter().map(|s| s / total).collect();
    // the old weights sum to one, so the new normalizer is P(S_t | S_1..S_{t-1})
    let log_likelihood = belief.log_likelihood + max + total.ln();
    Ok(BeliefState::from_parts(expected, belief.n_d, belief.n_r, weights, conditionals, log_likelihood))
}
