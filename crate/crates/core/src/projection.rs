//! First-passage projections.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::transition::{DRealization, TransitionModel};

/// Per-step probabilities below this are reported as exactly zero.
pub const CLAMP: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectionError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("horizon {horizon} must be after the origin period {origin}")]
    HorizonNotAfterOrigin { origin: u32, horizon: u32 },
    #[error("distributions disagree on origin or horizon")]
    InconsistentHorizons,
    #[error("invalid state distribution: {0}")]
    InvalidDistribution(String),
}

impl ProjectionError {
    pub fn code(&self) -> &'static str {
        match self {
            ProjectionError::DimensionMismatch { .. } => "DimensionMismatch",
            ProjectionError::HorizonNotAfterOrigin { .. } => "HorizonNotAfterOrigin",
            ProjectionError::InconsistentHorizons => "InconsistentHorizons",
            ProjectionError::InvalidDistribution(_) => "InvalidDistribution",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDistribution {
    pub period: u32,
    pub probs: Vec<f64>,
}

impl StateDistribution {
    pub fn new(period: u32, probs: Vec<f64>) -> Result<Self, ProjectionError> {
        if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(ProjectionError::InvalidDistribution("negative or non-finite entry".into()));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > 1e-10 {
            return Err(ProjectionError::InvalidDistribution(format!("entries sum to {s}")));
        }
        Ok(Self { period, probs })
    }

    pub fn point_mass(period: u32, n: usize, at: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Self { period, probs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conditioning {
    Realization(usize),
    Marginal,
}

/// P(H = τ) for τ in `origin+1 ..= horizon`, plus the transient mass left at the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstPassageDistribution {
    pub origin: u32,
    pub horizon: u32,
    pub probs: Vec<f64>,
    pub residual: f64,
    pub conditioning: Conditioning,
}

impl FirstPassageDistribution {
    /// P(H = τ); zero outside the covered range.
    pub fn at(&self, tau: u32) -> f64 {
        if tau <= self.origin || tau > self.horizon {
            return 0.0;
        }
        self.probs[(tau - self.origin - 1) as usize]
    }

    /// P(H ≤ τ).
    pub fn cumulative(&self, tau: u32) -> f64 {
        if tau <= self.origin {
            return 0.0;
        }
        let k = ((tau - self.origin) as usize).min(self.probs.len());
        self.probs[..k].iter().sum()
    }

    /// P(origin < H ≤ origin + steps).
    pub fn within(&self, steps: u32) -> f64 {
        self.cumulative(self.origin + steps)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Mass entering the trapping set at each step, with trapping mass already
/// present at the origin removed before the first step.
pub fn first_passage(
    start: &StateDistribution,
    model: &TransitionModel,
    horizon: u32,
) -> Result<FirstPassageDistribution, ProjectionError> {
    if start.probs.len() != model.len() {
        return Err(ProjectionError::DimensionMismatch { expected: model.len(), found: start.probs.len() });
    }
    if horizon <= start.period {
        return Err(ProjectionError::HorizonNotAfterOrigin { origin: start.period, horizon });
    }
    let mut x = start.probs.clone();
    for &t in model.trapping() {
        x[t] = 0.0;
    }
    let mut next = vec![0.0; x.len()];
    let steps = (horizon - start.period) as usize;
    let mut probs = Vec::with_capacity(steps);
    for _ in 0..steps {
        model.propagate_into(&x, &mut next);
        let mut inflow = 0.0;
        for &t in model.trapping() {
            inflow += next[t];
            next[t] = 0.0;
        }
        probs.push(if inflow < CLAMP { 0.0 } else { inflow });
        std::mem::swap(&mut x, &mut next);
    }
    Ok(FirstPassageDistribution {
        origin: start.period,
        horizon,
        probs,
        residual: x.iter().sum(),
        conditioning: Conditioning::Marginal,
    })
}

/// Joint distribution of (target, first-passage time) under a belief over D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackDistribution {
    pub origin: u32,
    pub horizon: u32,
    pub targets: Vec<String>,
    /// `probs[target][τ - origin - 1]`.
    pub probs: Vec<Vec<f64>>,
}

impl AttackDistribution {
    pub fn target_index(&self, target: &str) -> Option<usize> {
        self.targets.iter().position(|t| t == target)
    }

    /// P(attack on `target` at some τ ≤ `tau`).
    pub fn cumulative(&self, target: usize, tau: u32) -> f64 {
        if tau <= self.origin {
            return 0.0;
        }
        let k = ((tau - self.origin) as usize).min(self.probs[target].len());
        self.probs[target][..k].iter().sum()
    }

    pub fn cumulative_series(&self, target: usize) -> Vec<f64> {
        let mut acc = 0.0;
        self.probs[target]
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect()
    }
}

/// Weighted sum of per-realization first-passage distributions, grouped by target.
pub fn marginal_attack_distribution(
    weights: &[f64],
    passages: &[FirstPassageDistribution],
    realizations: &[DRealization],
) -> Result<AttackDistribution, ProjectionError> {
    if weights.len() != passages.len() || weights.len() != realizations.len() {
        return Err(ProjectionError::DimensionMismatch { expected: realizations.len(), found: passages.len() });
    }
    let first = passages.first().ok_or(ProjectionError::DimensionMismatch { expected: 1, found: 0 })?;
    if passages.iter().any(|p| p.origin != first.origin || p.horizon != first.horizon) {
        return Err(ProjectionError::InconsistentHorizons);
    }
    let mut targets: Vec<String> = Vec::new();
    for r in realizations {
        if !targets.contains(&r.target) {
            targets.push(r.target.clone());
        }
    }
    let len = first.probs.len();
    let mut probs = vec![vec![0.0; len]; targets.len()];
    for ((w, p), r) in weights.iter().zip(passages).zip(realizations) {
        let ti = targets.iter().position(|t| *t == r.target).unwrap();
        for (acc, x) in probs[ti].iter_mut().zip(&p.probs) {
            *acc += w * x;
        }
    }
    Ok(AttackDistribution { origin: first.origin, horizon: first.horizon, targets, probs })
}
