//! The operations behind each CLI subcommand, shared with the C API.
//!
//! Every function returns a [`Report`] whose exit code carries the verdict,
//! or an [`InputError`] for anything that maps to exit code 2.

use std::time::Duration;

use thiserror::Error;

use crate::demo::{run_demo, DemoParams};
use crate::lattice::{make_echo_strategy, make_relay_strategy, run, LatticeScenario};
use crate::report::{
    format_run, format_search, format_token, format_token_run, format_validation, Report, EXIT_OK,
};
use crate::scenario::{ScenarioDocument, TaskKind};
use crate::search::{decide_feasible_with, SearchBounds};
use crate::task::validate_summoning;
use crate::token::{plan_run, token_feasible, TokenTask, TokenVerdict, Window};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct InputError(pub String);

fn input<E: ToString>(e: E) -> InputError {
    InputError(e.to_string())
}

/// Relay site for original tasks: the given one or `D/2`.
pub fn relay_site(doc: &ScenarioDocument, relay: Option<i64>) -> i64 {
    relay.unwrap_or_else(|| doc.original().map_or(0, |t| t.d() / 2))
}

pub fn lattice_for(
    doc: &ScenarioDocument,
    relay: Option<i64>,
) -> Result<LatticeScenario, InputError> {
    match doc.kind() {
        TaskKind::Refined => Ok(LatticeScenario::refined(doc.refined().unwrap())),
        TaskKind::Original => {
            LatticeScenario::original(doc.original().unwrap(), relay_site(doc, relay))
                .map_err(input)
        }
        TaskKind::Summoning => Err(InputError(
            "summoning tasks have no lattice scenario; use `token`".into(),
        )),
    }
}

/// The token task and its window: the document's or the enclosing box.
pub fn token_setup(doc: &ScenarioDocument) -> Result<(TokenTask, Window), InputError> {
    let task = doc
        .summoning()
        .ok_or_else(|| InputError("token model needs a summoning task".into()))?;
    let window = doc.window.unwrap_or_else(|| Window::enclosing(&task));
    Ok((TokenTask::new(task).map_err(input)?, window))
}

pub fn validate(doc: &ScenarioDocument) -> Result<Report, InputError> {
    if let Some(task) = doc.summoning() {
        let report = validate_summoning(&task).map_err(input)?;
        return Ok(format_validation(&task, &report));
    }
    let mut r = Report::new(EXIT_OK);
    r.say(format!("{} task: valid", doc.kind().as_str()));
    if let Some(t) = doc.refined() {
        let [b0, a0, a1, b1] = t.layout();
        r.line(format!(
            "layout=B0:{b0},A0:{a0},A1:{a1},B1:{b1} deadline={}",
            t.deadline()
        ));
    }
    if let Some(t) = doc.original() {
        r.line(format!(
            "L={} R={} T={}",
            t.lab_l(),
            t.lab_r(),
            t.deadline()
        ));
    }
    r.line("verdict=valid");
    Ok(r)
}

/// Runs the built-in strategy for one pattern: echo for the bit task, the
/// relay agent for the two-lab task, the solved token plan for summoning.
pub fn run_pattern(
    doc: &ScenarioDocument,
    pattern: &str,
    relay: Option<i64>,
) -> Result<Report, InputError> {
    let p = doc.parse_pattern(pattern).ok_or_else(|| {
        InputError(format!(
            "'{pattern}' is not an admissible pattern for this task"
        ))
    })?;
    if doc.kind() == TaskKind::Summoning {
        let (task, window) = token_setup(doc)?;
        return match token_feasible(&task, window).map_err(input)? {
            TokenVerdict::Feasible(plan) => {
                let tr = plan_run(&task, window, &plan, p).map_err(input)?;
                Ok(format_token_run(&tr, &p.to_set_string()))
            }
            v @ TokenVerdict::Infeasible => Ok(format_token(&v)),
        };
    }
    let sc = lattice_for(doc, relay)?;
    let strategy = match doc.kind() {
        TaskKind::Refined => make_echo_strategy(&doc.refined().unwrap()),
        _ => {
            make_relay_strategy(&doc.original().unwrap(), relay_site(doc, relay)).map_err(input)?
        }
    };
    let tr = run(&sc, &strategy, p).map_err(input)?;
    let verdict = sc
        .task()
        .success_predicate(p, &tr.deliveries)
        .map_err(input)?;
    Ok(format_run(&tr, sc.task(), &verdict))
}

/// Exhaustive search. Bit tasks without `states` search the 16 local
/// response maps; otherwise all transducers with `states` (default 1).
pub fn search(
    doc: &ScenarioDocument,
    relay: Option<i64>,
    budget: Option<Duration>,
    workers: usize,
) -> Result<Report, InputError> {
    let sc = lattice_for(doc, relay)?;
    let a = sc.alphabet().size();
    let bounds = match (doc.kind(), doc.states) {
        (TaskKind::Refined, None) => SearchBounds::local_response(a),
        (_, s) => SearchBounds::new(s.unwrap_or(1), a),
    }
    .map_err(input)?;
    let bounds = match budget {
        Some(b) => bounds.with_budget(b),
        None => bounds,
    };
    let result = decide_feasible_with(&sc, &bounds, workers).map_err(input)?;
    Ok(format_search(&result, sc.task()))
}

pub fn token(doc: &ScenarioDocument) -> Result<Report, InputError> {
    let (task, window) = token_setup(doc)?;
    Ok(format_token(&token_feasible(&task, window).map_err(input)?))
}

pub fn demo(name: &str, params: &DemoParams) -> Result<Report, InputError> {
    run_demo(name, params).map_err(input)
}
