//! JSON-over-HTTP session service.
//!
//! Every mutation of a session is serialized behind a per-session lock.
//! Reads go straight to the latest snapshot, which the store replaces
//! atomically, so they never see a half-written session.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sentinel_core::store::Event;
use sentinel_core::{evaluate, Error, Observation, Overrides, Scenario, Session, Store};

use crate::{classify, from_value, parse_json, ErrorBody, ErrorKind};

/// Longest projection a client may request, in periods past the current one.
pub const MAX_PROJECTION_SPAN: u32 = 5000;

pub struct ApiError(pub ErrorBody);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(ErrorBody::from(&e))
    }
}

impl From<ErrorBody> for ApiError {
    fn from(e: ErrorBody) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match (self.0.code.as_str(), classify(&self.0.code)) {
            ("InvalidJson", _) => StatusCode::BAD_REQUEST,
            (_, ErrorKind::NotFound) => StatusCode::NOT_FOUND,
            (_, ErrorKind::Internal) => StatusCode::INTERNAL_SERVER_ERROR,
            (_, ErrorKind::Invalid) => StatusCode::UNPROCESSABLE_ENTITY,
        };
        (status, Json(self.0)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub struct AppState {
    store: Store,
    scenarios: Mutex<HashMap<String, Arc<Scenario>>>,
    locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

impl AppState {
    pub fn new(store: Store) -> Self {
        Self { store, scenarios: Mutex::default(), locks: Mutex::default() }
    }

    fn scenario(&self, hash: &str) -> ApiResult<Arc<Scenario>> {
        if let Some(s) = self.scenarios.lock().unwrap().get(hash) {
            return Ok(s.clone());
        }
        let s = Arc::new(self.store.load_scenario(hash)?);
        self.scenarios.lock().unwrap().insert(hash.to_string(), s.clone());
        Ok(s)
    }

    fn session_lock(&self, id: &str) -> Arc<tokio::sync::Mutex<()>> {
        self.locks.lock().unwrap().entry(id.to_string()).or_default().clone()
    }

    fn session_with_scenario(&self, id: &str) -> ApiResult<(Session, Arc<Scenario>)> {
        let session = self.store.load_session(id)?;
        let scenario = self.scenario(&session.scenario_hash)?;
        Ok((session, scenario))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/scenarios", post(post_scenario))
        .route("/sessions", post(post_session).get(list_sessions))
        .route("/sessions/{id}/observations", post(post_observations))
        .route("/sessions/{id}/belief", get(get_belief))
        .route("/sessions/{id}/projection", get(get_projection))
        .route("/sessions/{id}/recommendation", get(get_recommendation))
        .route("/sessions/{id}/branches", post(post_branch))
        .route("/sessions/{id}/history", get(get_history))
        .with_state(state)
}

/// Public view of a session without its belief arrays.
#[derive(Debug, Serialize)]
pub struct SessionView<'a> {
    pub id: &'a str,
    pub scenario_id: &'a str,
    pub parent: Option<&'a str>,
    pub description: Option<&'a str>,
    pub period: u32,
    pub created_at: u64,
    pub updated_at: u64,
}

impl<'a> From<&'a Session> for SessionView<'a> {
    fn from(s: &'a Session) -> Self {
        Self {
            id: &s.id,
            scenario_id: &s.scenario_hash,
            parent: s.parent.as_deref(),
            description: s.description.as_deref(),
            period: s.period(),
            created_at: s.created_at,
            updated_at: s.updated_at,
        }
    }
}

pub fn scenario_summary(s: &Scenario) -> Value {
    json!({
        "scenario_id": s.hash,
        "name": s.name(),
        "periods_per_day": s.periods_per_day(),
        "targets": s.targets,
        "realizations": s.realizations.iter().map(|r| r.label()).collect::<Vec<_>>(),
        "alert_types": s.cost_model.alert_types.iter().map(|a| &a.id).collect::<Vec<_>>(),
        "script_periods": s.script.last().map_or(0, |o| o.period),
        "warnings": s.warnings,
    })
}

async fn post_scenario(State(st): State<Arc<AppState>>, body: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let text = std::str::from_utf8(&body).map_err(|e| ErrorBody::new("InvalidJson", e.to_string(), None))?;
    let scenario = st.store.put_scenario(text)?;
    let summary = scenario_summary(&scenario);
    st.scenarios.lock().unwrap().insert(scenario.hash.clone(), Arc::new(scenario));
    Ok((StatusCode::CREATED, Json(summary)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewSession {
    scenario_id: String,
}

async fn post_session(State(st): State<Arc<AppState>>, body: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let req: NewSession = parse_json(&body)?;
    let scenario = st.scenario(&req.scenario_id)?;
    let session = st.store.create_session(&scenario)?;
    let output = evaluate(&scenario, &session.belief, &session.cost_model, None)?;
    Ok((StatusCode::CREATED, Json(json!({ "session": SessionView::from(&session), "output": output }))))
}

async fn list_sessions(State(st): State<Arc<AppState>>) -> ApiResult<Json<Value>> {
    Ok(Json(json!({ "sessions": st.store.list_sessions()? })))
}

/// Accepts either one observation or an array of them.
pub fn observations_from(value: Value) -> Result<Vec<Observation>, ErrorBody> {
    match value {
        Value::Array(_) => from_value(value, "observations"),
        other => Ok(vec![from_value(other, "observation")?]),
    }
}

async fn post_observations(State(st): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<Value>> {
    let observations = observations_from(parse_json(&body)?)?;
    let lock = st.session_lock(&id);
    let _guard = lock.lock().await;
    let (session, scenario) = st.session_with_scenario(&id)?;
    let (next, output) = st.store.observe(&scenario, &session.id, &observations)?;
    Ok(Json(json!({ "session": SessionView::from(&next), "output": output })))
}

async fn get_belief(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let (session, scenario) = st.session_with_scenario(&id)?;
    let b = &session.belief;
    Ok(Json(json!({
        "session_id": session.id,
        "period": b.period,
        "rasters": scenario.graph.ids(),
        "pi": b.pi,
        "realizations": scenario.realizations.iter().map(|r| r.label()).collect::<Vec<_>>(),
        "p_d": b.p_d,
        "credibility": (0..scenario.r_space.len()).map(|r| scenario.r_space.label(r)).collect::<Vec<_>>(),
        "p_r": b.p_r,
    })))
}

async fn get_projection(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult<Json<Value>> {
    let horizon = match q.get("horizon") {
        Some(h) => Some(h.parse::<u32>().map_err(|e| ErrorBody::new("InvalidHorizon", e.to_string(), Some("horizon".into())))?),
        None => None,
    };
    let (session, scenario) = st.session_with_scenario(&id)?;
    let t = session.period();
    if let Some(h) = horizon {
        if h <= t || h - t > MAX_PROJECTION_SPAN {
            return Err(ErrorBody::new(
                "InvalidHorizon",
                format!("horizon must be in ({t}, {}]", t + MAX_PROJECTION_SPAN),
                Some("horizon".into()),
            )
            .into());
        }
    }
    let out = evaluate(&scenario, &session.belief, &session.cost_model, horizon)?;
    Ok(Json(json!({
        "session_id": session.id,
        "period": t,
        "horizon": out.attack.horizon,
        "attack": out.attack,
        "projections": out.projections,
    })))
}

async fn get_recommendation(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let (session, scenario) = st.session_with_scenario(&id)?;
    let out = evaluate(&scenario, &session.belief, &session.cost_model, None)?;
    Ok(Json(json!({ "session_id": session.id, "period": session.period(), "recommendation": out.recommendation })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchRequest {
    #[serde(default)]
    overrides: Overrides,
}

async fn post_branch(State(st): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let req: BranchRequest = parse_json(&body)?;
    // the parent is only read, but a concurrent observation must not slip in
    // between loading it and recording the branch inputs
    let lock = st.session_lock(&id);
    let _guard = lock.lock().await;
    let (parent, scenario) = st.session_with_scenario(&id)?;
    let branch = st.store.branch(&scenario, &parent.id, &req.overrides)?;
    let output = evaluate(&scenario, &branch.belief, &branch.cost_model, None)?;
    Ok((StatusCode::CREATED, Json(json!({ "session": SessionView::from(&branch), "output": output }))))
}

async fn get_history(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    // log and snapshot are two files; hold the writer lock so they agree
    let lock = st.session_lock(&id);
    let _guard = lock.lock().await;
    let session = st.store.load_session(&id)?;
    let events: Vec<Event> = st.store.events(&id)?;
    Ok(Json(json!({
        "session": SessionView::from(&session),
        "observations": session.observations,
        "recommendations": session.recommendations,
        "events": events,
    })))
}
