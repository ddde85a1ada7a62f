//! Flat `key = value` scenario files.
//!
//! ```text
//! # two-wing bit task
//! task = refined
//! promise = at_least_one
//! D = 8
//! eps = 1
//! states = 2
//! alphabet = 3
//! ```
//!
//! One pair per line, `#` starts a comment. Keys are case-sensitive.
//!
//! | key        | value                       | tasks              |
//! |------------|-----------------------------|--------------------|
//! | `task`     | `summoning|refined|original`| all, required      |
//! | `mode`     | `single|multiple`           | summoning, required|
//! | `start`    | `t,x`                       | summoning, required|
//! | `pair`     | `ct,cx -> rt,rx`, repeated  | summoning, ≥ 1     |
//! | `window`   | `xmin,xmax,tmax`            | summoning          |
//! | `promise`  | `exactly_one|at_least_one`  | refined, required  |
//! | `D`        | integer                     | refined, original  |
//! | `eps`      | integer                     | refined, required  |
//! | `states`   | integer                     | refined, original  |
//! | `alphabet` | integer, incl. silence      | refined, original  |

use std::fmt;

use thiserror::Error;

use crate::geometry::Point;
use crate::task::{
    CallMode, CallPattern, CallReturnPair, GoverningTask, OriginalSignalTask, Promise,
    RefinedBitTask, SummoningTask, TaskError, MAX_PAIRS,
};
use crate::token::Window;

/// Largest `D`, `eps`, coordinate magnitude or window extent accepted.
pub const MAX_EXTENT: i64 = 100_000;
/// Largest `states` accepted.
pub const MAX_STATES: i64 = 8;
/// Largest `alphabet` accepted.
pub const MAX_ALPHABET: i64 = 16;

/// A parse failure. `line` is 1-based; 0 means the document as a whole.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

fn err<T>(line: usize, reason: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        reason: reason.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskKind {
    Summoning,
    Refined,
    Original,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Summoning => "summoning",
            TaskKind::Refined => "refined",
            TaskKind::Original => "original",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaskSpec {
    Summoning {
        mode: CallMode,
        start: (i64, i64),
        pairs: Vec<((i64, i64), (i64, i64))>,
    },
    Refined {
        promise: Promise,
        d: i64,
        eps: i64,
    },
    Original {
        d: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioDocument {
    pub task: TaskSpec,
    pub window: Option<Window>,
    pub states: Option<u8>,
    pub alphabet: Option<usize>,
}

impl ScenarioDocument {
    pub fn kind(&self) -> TaskKind {
        match self.task {
            TaskSpec::Summoning { .. } => TaskKind::Summoning,
            TaskSpec::Refined { .. } => TaskKind::Refined,
            TaskSpec::Original { .. } => TaskKind::Original,
        }
    }

    pub fn summoning(&self) -> Option<SummoningTask> {
        let TaskSpec::Summoning { mode, start, pairs } = &self.task else {
            return None;
        };
        let pairs = pairs
            .iter()
            .map(|&((ct, cx), (rt, rx))| {
                CallReturnPair::new(Point::line(ct, cx), Point::line(rt, rx)).expect("1-D points")
            })
            .collect();
        Some(
            SummoningTask::new(Point::line(start.0, start.1), pairs, *mode)
                .expect("checked at parse time"),
        )
    }

    pub fn refined(&self) -> Option<RefinedBitTask> {
        match self.task {
            TaskSpec::Refined { promise, d, eps } => {
                Some(RefinedBitTask::new(d, eps, promise).expect("checked at parse time"))
            }
            _ => None,
        }
    }

    pub fn original(&self) -> Option<OriginalSignalTask> {
        match self.task {
            TaskSpec::Original { d } => {
                Some(OriginalSignalTask::new(d).expect("checked at parse time"))
            }
            _ => None,
        }
    }

    pub fn governing(&self) -> GoverningTask {
        match self.kind() {
            TaskKind::Summoning => GoverningTask::Summoning(self.summoning().unwrap()),
            TaskKind::Refined => GoverningTask::Refined(self.refined().unwrap()),
            TaskKind::Original => GoverningTask::Original(self.original().unwrap()),
        }
    }

    /// Parses a pattern written as the task prints it: `{1,2}` for summoning
    /// and signalling tasks, `(0,1)` for the bit task. Braces, brackets and
    /// spaces are optional.
    pub fn parse_pattern(&self, spec: &str) -> Option<CallPattern> {
        let items: Vec<&str> = spec
            .trim()
            .trim_start_matches(['{', '(', '['])
            .trim_end_matches(['}', ')', ']'])
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        let pattern = match self.kind() {
            TaskKind::Refined => {
                if items.len() != 2 {
                    return None;
                }
                let mut p = CallPattern(0);
                for (i, b) in items.iter().enumerate() {
                    match *b {
                        "0" => {}
                        "1" => p.0 |= 1 << i,
                        _ => return None,
                    }
                }
                p
            }
            _ => {
                let mut p = CallPattern(0);
                for s in items {
                    let i: usize = s.parse().ok()?;
                    if !(1..=MAX_PAIRS).contains(&i) || p.contains(i - 1) {
                        return None;
                    }
                    p.0 |= 1 << (i - 1);
                }
                p
            }
        };
        self.governing()
            .admissible_patterns()
            .contains(&pattern)
            .then_some(pattern)
    }
}

fn parse_int(line: usize, key: &str, s: &str) -> Result<i64, ParseError> {
    let s = s.trim();
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return err(line, format!("{key}: malformed integer '{s}'"));
    }
    match s.parse::<i64>() {
        Ok(v) if v.abs() <= MAX_EXTENT => Ok(v),
        _ => err(line, format!("{key}: |value| must be ≤ {MAX_EXTENT}")),
    }
}

fn parse_ints<const N: usize>(line: usize, key: &str, s: &str) -> Result<[i64; N], ParseError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return err(
            line,
            format!("{key}: expected {N} comma-separated integers"),
        );
    }
    let mut out = [0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_int(line, key, p)?;
    }
    Ok(out)
}

const KEYS: [&str; 10] = [
    "task", "mode", "promise", "D", "eps", "start", "pair", "window", "states", "alphabet",
];

fn applies(kind: TaskKind, key: &str) -> bool {
    match key {
        "task" => true,
        "mode" | "start" | "pair" | "window" => kind == TaskKind::Summoning,
        "promise" | "eps" => kind == TaskKind::Refined,
        "D" | "states" | "alphabet" => kind != TaskKind::Summoning,
        _ => false,
    }
}

fn required(kind: TaskKind) -> &'static [&'static str] {
    match kind {
        TaskKind::Summoning => &["mode", "start", "pair"],
        TaskKind::Refined => &["promise", "D", "eps"],
        TaskKind::Original => &["D"],
    }
}

fn invariant_error(line: usize, e: TaskError) -> ParseError {
    match e {
        TaskError::Invariant { invariant, .. } => ParseError {
            line,
            reason: invariant.to_string(),
        },
        other => ParseError {
            line,
            reason: other.to_string(),
        },
    }
}

/// Parses and validates a scenario document. Never panics.
pub fn parse_scenario(text: &str) -> Result<ScenarioDocument, ParseError> {
    let mut entries: Vec<(usize, &str, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return err(line, "expected 'key = value'");
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return err(line, format!("unknown key '{k}'"));
        }
        if k != "pair" {
            if let Some(&(first, ..)) = entries.iter().find(|e| e.1 == k) {
                return err(line, format!("duplicate key '{k}' (first on line {first})"));
            }
        }
        entries.push((line, k, v));
    }
    let get = |k: &str| entries.iter().find(|e| e.1 == k).map(|&(l, _, v)| (l, v));

    let Some((task_line, task_value)) = get("task") else {
        return err(0, "missing key 'task'");
    };
    let kind = match task_value {
        "summoning" => TaskKind::Summoning,
        "refined" => TaskKind::Refined,
        "original" => TaskKind::Original,
        other => {
            return err(
                task_line,
                format!("task: expected summoning|refined|original, got '{other}'"),
            )
        }
    };
    for &(line, k, _) in &entries {
        if !applies(kind, k) {
            return err(
                line,
                format!("key '{k}' does not apply to {} tasks", kind.as_str()),
            );
        }
    }
    for k in required(kind) {
        if get(k).is_none() {
            return err(0, format!("missing key '{k}'"));
        }
    }

    let mut d_line = 0;
    let mut d = 0;
    if let Some((line, v)) = get("D") {
        d = parse_int(line, "D", v)?;
        if d < 1 {
            return err(line, "D must be ≥ 1");
        }
        d_line = line;
    }

    let task = match kind {
        TaskKind::Summoning => {
            let (line, v) = get("mode").unwrap();
            let mode = match v {
                "single" => CallMode::SingleGuaranteed,
                "multiple" => CallMode::MultiplePossible,
                other => {
                    return err(
                        line,
                        format!("mode: expected single|multiple, got '{other}'"),
                    )
                }
            };
            let (line, v) = get("start").unwrap();
            let [st, sx] = parse_ints::<2>(line, "start", v)?;
            let mut pairs = Vec::new();
            for &(line, _, v) in entries.iter().filter(|e| e.1 == "pair") {
                let Some((c, r)) = v.split_once("->") else {
                    return err(line, "pair: expected 'ct,cx -> rt,rx'");
                };
                let [ct, cx] = parse_ints::<2>(line, "pair", c)?;
                let [rt, rx] = parse_ints::<2>(line, "pair", r)?;
                if pairs.contains(&((ct, cx), (rt, rx))) {
                    return err(line, "pairs must be distinct");
                }
                if pairs.len() == MAX_PAIRS {
                    return err(line, format!("at most {MAX_PAIRS} pairs"));
                }
                pairs.push(((ct, cx), (rt, rx)));
            }
            TaskSpec::Summoning {
                mode,
                start: (st, sx),
                pairs,
            }
        }
        TaskKind::Refined => {
            let (line, v) = get("promise").unwrap();
            let promise = match v {
                "exactly_one" => Promise::ExactlyOne,
                "at_least_one" => Promise::AtLeastOne,
                other => {
                    return err(
                        line,
                        format!("promise: expected exactly_one|at_least_one, got '{other}'"),
                    )
                }
            };
            let (eps_line, v) = get("eps").unwrap();
            let eps = parse_int(eps_line, "eps", v)?;
            if eps < 1 {
                return err(eps_line, "eps must be ≥ 1");
            }
            RefinedBitTask::new(d, eps, promise).map_err(|e| invariant_error(d_line, e))?;
            TaskSpec::Refined { promise, d, eps }
        }
        TaskKind::Original => {
            OriginalSignalTask::new(d).map_err(|e| invariant_error(d_line, e))?;
            TaskSpec::Original { d }
        }
    };

    let window = match get("window") {
        None => None,
        Some((line, v)) => {
            let [x_min, x_max, t_max] = parse_ints::<3>(line, "window", v)?;
            if x_min > x_max {
                return err(line, "window: xmin must be ≤ xmax");
            }
            if t_max < 0 {
                return err(line, "window: tmax must be ≥ 0");
            }
            Some(Window {
                x_min,
                x_max,
                t_max,
            })
        }
    };
    let states = match get("states") {
        None => None,
        Some((line, v)) => {
            let s = parse_int(line, "states", v)?;
            if !(1..=MAX_STATES).contains(&s) {
                return err(line, format!("states must be in 1..={MAX_STATES}"));
            }
            Some(s as u8)
        }
    };
    let alphabet = match get("alphabet") {
        None => None,
        Some((line, v)) => {
            let a = parse_int(line, "alphabet", v)?;
            let expected = if kind == TaskKind::Refined { 3 } else { 2 };
            if !(2..=MAX_ALPHABET).contains(&a) {
                return err(line, format!("alphabet must be in 2..={MAX_ALPHABET}"));
            }
            if a != expected {
                return err(
                    line,
                    format!("alphabet must be {expected} for {} tasks", kind.as_str()),
                );
            }
            Some(a as usize)
        }
    };

    Ok(ScenarioDocument {
        task,
        window,
        states,
        alphabet,
    })
}

/// Canonical text form; [`parse_scenario`] reads it back unchanged.
pub fn format_scenario(doc: &ScenarioDocument) -> String {
    doc.to_string()
}

impl fmt::Display for ScenarioDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "task = {}", self.kind().as_str())?;
        match &self.task {
            TaskSpec::Summoning { mode, start, pairs } => {
                writeln!(f, "mode = {}", mode.as_str())?;
                writeln!(f, "start = {},{}", start.0, start.1)?;
                for ((ct, cx), (rt, rx)) in pairs {
                    writeln!(f, "pair = {ct},{cx} -> {rt},{rx}")?;
                }
            }
            TaskSpec::Refined { promise, d, eps } => {
                writeln!(f, "promise = {}", promise.as_str())?;
                writeln!(f, "D = {d}")?;
                writeln!(f, "eps = {eps}")?;
            }
            TaskSpec::Original { d } => writeln!(f, "D = {d}")?,
        }
        if let Some(w) = self.window {
            writeln!(f, "window = {},{},{}", w.x_min, w.x_max, w.t_max)?;
        }
        if let Some(s) = self.states {
            writeln!(f, "states = {s}")?;
        }
        if let Some(a) = self.alphabet {
            writeln!(f, "alphabet = {a}")?;
        }
        Ok(())
    }
}

/// One-line form of a summoning task, used in sweep reports.
pub fn summoning_line(task: &SummoningTask) -> String {
    let mut out = format!(
        "task=summoning mode={} start={},{}",
        task.mode().as_str(),
        task.start().t(),
        task.start().x()
    );
    for p in task.pairs() {
        out.push_str(&format!(
            " pair={},{}->{},{}",
            p.call.t(),
            p.call.x(),
            p.ret.t(),
            p.ret.x()
        ));
    }
    out
}
