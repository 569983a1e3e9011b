//! Flat-file persistence: validated scenario texts keyed by hash, and per
//! session an append-only event log plus the latest snapshot.
//!
//! Layout under the data directory:
//!
//! ```text
//! scenarios/<sha256>.json
//! sessions/<id>/events.jsonl
//! sessions/<id>/snapshot.json
//! ```

use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::alert::CostModel;
use crate::inference::Observation;
use crate::scenario::{load_scenario_str, scenario_hash, Scenario};
use crate::session::{branch_inputs, now_unix, rebuild, step_session, what_if, Overrides, Session, SessionError, StepOutput};
use crate::Result;

/// Environment variable naming the data directory.
pub const DATA_DIR_ENV: &str = "SENTINEL_DATA_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Created {
        session_id: String,
        scenario_hash: String,
        parent: Option<String>,
        description: Option<String>,
        prior_d: Vec<f64>,
        cost_model: CostModel,
        /// Observations replayed when the session was created (branches only).
        observations: Vec<Observation>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        overrides: Option<Overrides>,
        at: u64,
    },
    Observed {
        observations: Vec<Observation>,
        at: u64,
    },
}

#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
}

impl Store {
    /// Opens (and creates if needed) a data directory.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(root.join("scenarios"))?;
        fs::create_dir_all(root.join("sessions"))?;
        Ok(Self { root })
    }

    /// `$SENTINEL_DATA_DIR`, or `./sentinel-data`.
    pub fn default_root() -> PathBuf {
        std::env::var_os(DATA_DIR_ENV).map_or_else(|| PathBuf::from("sentinel-data"), PathBuf::from)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn scenario_path(&self, hash: &str) -> Result<PathBuf> {
        if !(hash.len() == 64 && hash.chars().all(|c| c.is_ascii_hexdigit())) {
            return Err(SessionError::ScenarioNotFound(hash.to_string()).into());
        }
        Ok(self.root.join("scenarios").join(format!("{hash}.json")))
    }

    fn session_dir(&self, id: &str) -> Result<PathBuf> {
        if !valid_id(id) {
            return Err(SessionError::NotFound(id.to_string()).into());
        }
        Ok(self.root.join("sessions").join(id))
    }

    /// Validates a scenario and stores its text under its hash.
    pub fn put_scenario(&self, text: &str) -> Result<Scenario> {
        let scenario = load_scenario_str(text)?;
        let path = self.scenario_path(&scenario.hash)?;
        if !path.exists() {
            write_atomic(&path, text.as_bytes())?;
        }
        Ok(scenario)
    }

    pub fn scenario_text(&self, hash: &str) -> Result<String> {
        let path = self.scenario_path(hash)?;
        fs::read_to_string(&path).map_err(|_| SessionError::ScenarioNotFound(hash.to_string()).into())
    }

    pub fn load_scenario(&self, hash: &str) -> Result<Scenario> {
        let text = self.scenario_text(hash)?;
        if scenario_hash(&text) != hash {
            return Err(SessionError::Corrupt { path: format!("scenarios/{hash}.json"), message: "content does not match its hash".into() }.into());
        }
        Ok(load_scenario_str(&text)?)
    }

    pub fn list_sessions(&self) -> Result<Vec<String>> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(self.root.join("sessions"))? {
            let entry = entry?;
            if entry.path().join("snapshot.json").exists() {
                ids.push(entry.file_name().to_string_lossy().into_owned());
            }
        }
        ids.sort();
        Ok(ids)
    }

    fn append(&self, id: &str, event: &Event) -> Result<()> {
        let dir = self.session_dir(id)?;
        fs::create_dir_all(&dir)?;
        let mut f = OpenOptions::new().create(true).append(true).open(dir.join("events.jsonl"))?;
        let mut line = serde_json::to_string(event)?;
        line.push('\n');
        f.write_all(line.as_bytes())?;
        f.sync_data()?;
        Ok(())
    }

    pub fn save_snapshot(&self, session: &Session) -> Result<()> {
        let dir = self.session_dir(&session.id)?;
        fs::create_dir_all(&dir)?;
        write_atomic(&dir.join("snapshot.json"), serde_json::to_string(session)?.as_bytes())
    }

    /// Latest snapshot of a session.
    pub fn load_session(&self, id: &str) -> Result<Session> {
        let path = self.session_dir(id)?.join("snapshot.json");
        let text = fs::read_to_string(&path).map_err(|_| SessionError::NotFound(id.to_string()))?;
        serde_json::from_str(&text)
            .map_err(|e| SessionError::Corrupt { path: format!("sessions/{id}/snapshot.json"), message: e.to_string() }.into())
    }

    pub fn events(&self, id: &str) -> Result<Vec<Event>> {
        let path = self.session_dir(id)?.join("events.jsonl");
        let f = fs::File::open(&path).map_err(|_| SessionError::NotFound(id.to_string()))?;
        let mut out = Vec::new();
        for (n, line) in BufReader::new(f).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(serde_json::from_str(&line).map_err(|e| SessionError::Corrupt {
                path: format!("sessions/{id}/events.jsonl:{}", n + 1),
                message: e.to_string(),
            })?);
        }
        Ok(out)
    }

    /// Reconstructs a session from its event log alone.
    pub fn replay_events(&self, id: &str, scenario: &Scenario) -> Result<Session> {
        let events = self.events(id)?;
        let corrupt = |m: &str| SessionError::Corrupt { path: format!("sessions/{id}/events.jsonl"), message: m.into() };
        let mut iter = events.into_iter();
        let mut session = match iter.next() {
            Some(Event::Created { session_id, scenario_hash, parent, description, prior_d, cost_model, observations, at, .. }) => {
                if scenario_hash != scenario.hash {
                    return Err(SessionError::ScenarioMismatch { expected: scenario_hash, found: scenario.hash.clone() }.into());
                }
                let mut s = rebuild(scenario, prior_d, cost_model, &observations, parent, description)?;
                s.id = session_id;
                s.created_at = at;
                s.updated_at = at;
                s
            }
            _ => return Err(corrupt("log does not start with a creation event").into()),
        };
        for e in iter {
            match e {
                Event::Observed { observations, at } => {
                    session = step_session(scenario, &session, &observations)?.0;
                    session.updated_at = at;
                }
                Event::Created { .. } => return Err(corrupt("repeated creation event").into()),
            }
        }
        Ok(session)
    }

    pub fn create_session(&self, scenario: &Scenario) -> Result<Session> {
        let session = Session::new(scenario)?;
        self.append(
            &session.id,
            &Event::Created {
                session_id: session.id.clone(),
                scenario_hash: scenario.hash.clone(),
                parent: None,
                description: None,
                prior_d: session.prior_d.clone(),
                cost_model: session.cost_model.clone(),
                observations: Vec::new(),
                overrides: None,
                at: session.created_at,
            },
        )?;
        self.save_snapshot(&session)?;
        Ok(session)
    }

    /// Steps a stored session and persists the result.
    pub fn observe(&self, scenario: &Scenario, id: &str, observations: &[Observation]) -> Result<(Session, StepOutput)> {
        let session = self.load_session(id)?;
        let (mut next, out) = step_session(scenario, &session, observations)?;
        let at = now_unix();
        next.updated_at = at;
        self.append(id, &Event::Observed { observations: observations.to_vec(), at })?;
        self.save_snapshot(&next)?;
        Ok((next, out))
    }

    /// Creates and persists a what-if branch of a stored session.
    pub fn branch(&self, scenario: &Scenario, id: &str, overrides: &Overrides) -> Result<Session> {
        let parent = self.load_session(id)?;
        let (prior_d, cost_model, observations) = branch_inputs(scenario, &parent, overrides)?;
        let branch = what_if(scenario, &parent, overrides)?;
        self.append(
            &branch.id,
            &Event::Created {
                session_id: branch.id.clone(),
                scenario_hash: scenario.hash.clone(),
                parent: Some(parent.id.clone()),
                description: branch.description.clone(),
                prior_d,
                cost_model,
                observations,
                overrides: Some(overrides.clone()),
                at: branch.created_at,
            },
        )?;
        self.save_snapshot(&branch)?;
        Ok(branch)
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
