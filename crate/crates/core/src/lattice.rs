//! Synchronous 1+1-D lattice dynamics.
//!
//! Time advances in integer steps and every message moves exactly one site
//! per step along a directed track. At each step:
//!
//! 1. symbols arrive at sites (recorded as `move`, or `deliver` at observers);
//! 2. input injections for the current call pattern fire;
//! 3. agents read what arrived this step and emit with zero processing delay.
//!
//! Emissions depart at `t` and arrive next door at `t + 1`, so relaying is
//! instantaneous without ever being superluminal. Sites without an agent pass
//! messages through; observer sites absorb them.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::symbol::{bit, Alphabet, Symbol};
use crate::task::{
    CallPattern, Delivery, GoverningTask, OriginalSignalTask, RefinedBitTask, TaskError, Violation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("alphabet mismatch: strategy uses {strategy} symbols, scenario has {scenario}")]
    AlphabetMismatch { strategy: usize, scenario: usize },
    #[error("strategy has {strategy} agents, scenario has {scenario}")]
    AgentCountMismatch { strategy: usize, scenario: usize },
    #[error("pattern {0} is not admissible for this scenario")]
    InadmissiblePattern(String),
    #[error("invalid transducer: {0}")]
    InvalidTransducer(String),
    #[error("relay site {site} must lie strictly between 0 and {d}")]
    RelaySite { site: i64, d: i64 },
    #[error(transparent)]
    Task(#[from] TaskError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Left,
    Right,
}

impl Dir {
    pub fn as_str(self) -> &'static str {
        match self {
            Dir::Left => "L",
            Dir::Right => "R",
        }
    }
}

/// Which tracks and external ports an agent reads and writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Interface {
    /// Reads symbols arriving from the left neighbour.
    pub in_left: bool,
    /// Reads symbols arriving from the right neighbour.
    pub in_right: bool,
    pub ext_in: bool,
    pub out_left: bool,
    pub out_right: bool,
    pub ext_out: bool,
}

impl Interface {
    pub const FULL: Interface = Interface {
        in_left: true,
        in_right: true,
        ext_in: true,
        out_left: true,
        out_right: true,
        ext_out: true,
    };

    /// Both tracks in and out, no external ports.
    pub const TRACKS: Interface = Interface {
        in_left: true,
        in_right: true,
        ext_in: false,
        out_left: true,
        out_right: true,
        ext_out: false,
    };

    /// Reads and writes only the track on one side.
    pub fn one_side(side: Dir) -> Self {
        Interface {
            in_left: side == Dir::Left,
            in_right: side == Dir::Right,
            out_left: side == Dir::Left,
            out_right: side == Dir::Right,
            ..Interface::default()
        }
    }

    fn input_count(&self) -> u32 {
        u32::from(self.in_left) + u32::from(self.in_right) + u32::from(self.ext_in)
    }

    fn output_count(&self) -> u32 {
        u32::from(self.out_left) + u32::from(self.out_right) + u32::from(self.ext_out)
    }
}

/// What an agent does in one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Transition {
    pub next: u8,
    pub emit_left: Symbol,
    pub emit_right: Symbol,
    pub output: Symbol,
}

/// The inputs an agent sees in one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StepInput {
    pub state: u8,
    pub from_left: Symbol,
    pub from_right: Symbol,
    pub ext: Symbol,
}

/// State count and interface of one agent; fixes the transition table layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AgentShape {
    pub states: u8,
    pub interface: Interface,
}

impl AgentShape {
    /// Number of table entries: `states * A^(active inputs)`.
    pub fn entry_count(&self, alphabet: usize) -> u128 {
        u128::from(self.states) * (alphabet as u128).pow(self.interface.input_count())
    }

    /// Number of distinct transitions: `states * A^(active outputs)`.
    pub fn choice_count(&self, alphabet: usize) -> u128 {
        u128::from(self.states) * (alphabet as u128).pow(self.interface.output_count())
    }

    /// Table position of an input; inactive inputs are ignored.
    pub fn entry_index(&self, alphabet: usize, input: StepInput) -> usize {
        let i = &self.interface;
        let mut idx = usize::from(input.state);
        for (active, s) in [
            (i.in_left, input.from_left),
            (i.in_right, input.from_right),
            (i.ext_in, input.ext),
        ] {
            if active {
                idx = idx * alphabet + usize::from(s.0);
            }
        }
        idx
    }

    pub fn entry_input(&self, alphabet: usize, mut idx: usize) -> StepInput {
        let i = &self.interface;
        let mut take = |active: bool| {
            if active {
                let s = Symbol((idx % alphabet) as u8);
                idx /= alphabet;
                s
            } else {
                Symbol::SILENCE
            }
        };
        let ext = take(i.ext_in);
        let from_right = take(i.in_right);
        let from_left = take(i.in_left);
        StepInput {
            state: idx as u8,
            from_left,
            from_right,
            ext,
        }
    }

    /// Decodes the `c`-th transition in canonical order
    /// (next state, then left, right and external outputs).
    pub fn decode_choice(&self, alphabet: usize, mut c: u32) -> Transition {
        let i = &self.interface;
        let a = alphabet as u32;
        let mut take = |active: bool| {
            if active {
                let s = Symbol((c % a) as u8);
                c /= a;
                s
            } else {
                Symbol::SILENCE
            }
        };
        let output = take(i.ext_out);
        let emit_right = take(i.out_right);
        let emit_left = take(i.out_left);
        Transition {
            next: c as u8,
            emit_left,
            emit_right,
            output,
        }
    }

    pub fn encode_choice(&self, alphabet: usize, t: Transition) -> u32 {
        let i = &self.interface;
        let a = alphabet as u32;
        let mut c = u32::from(t.next);
        for (active, s) in [
            (i.out_left, t.emit_left),
            (i.out_right, t.emit_right),
            (i.ext_out, t.output),
        ] {
            if active {
                c = c * a + u32::from(s.0);
            }
        }
        c
    }
}

/// Deterministic finite-state transducer for one agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transducer {
    shape: AgentShape,
    alphabet: usize,
    table: Vec<Transition>,
}

impl Transducer {
    /// Builds the table by evaluating `f` on every entry. Outputs on ports the
    /// interface does not declare must be silent.
    pub fn from_fn<F>(shape: AgentShape, alphabet: usize, mut f: F) -> Result<Self, LatticeError>
    where
        F: FnMut(StepInput) -> Transition,
    {
        let n = shape.entry_count(alphabet);
        if shape.states == 0 || n > 1 << 20 {
            return Err(LatticeError::InvalidTransducer(format!(
                "{} states over {alphabet} symbols is out of range",
                shape.states
            )));
        }
        let table = (0..n as usize)
            .map(|e| f(shape.entry_input(alphabet, e)))
            .collect();
        Self::from_table(shape, alphabet, table)
    }

    pub fn from_table(
        shape: AgentShape,
        alphabet: usize,
        table: Vec<Transition>,
    ) -> Result<Self, LatticeError> {
        if table.len() as u128 != shape.entry_count(alphabet) {
            return Err(LatticeError::InvalidTransducer(format!(
                "table has {} entries, shape needs {}",
                table.len(),
                shape.entry_count(alphabet)
            )));
        }
        for (e, t) in table.iter().enumerate() {
            let ok = t.next < shape.states
                && shape.decode_choice(alphabet, shape.encode_choice(alphabet, *t)) == *t
                && [t.emit_left, t.emit_right, t.output]
                    .iter()
                    .all(|s| usize::from(s.0) < alphabet);
            if !ok {
                return Err(LatticeError::InvalidTransducer(format!(
                    "entry {e} has an out-of-range transition {t:?}"
                )));
            }
        }
        Ok(Transducer {
            shape,
            alphabet,
            table,
        })
    }

    pub fn shape(&self) -> AgentShape {
        self.shape
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn table(&self) -> &[Transition] {
        &self.table
    }

    pub fn step(&self, input: StepInput) -> Transition {
        self.table[self.shape.entry_index(self.alphabet, input)]
    }

    /// Transducer that reads everything and never emits.
    pub fn absorbing(interface: Interface, alphabet: usize) -> Self {
        let shape = AgentShape {
            states: 1,
            interface,
        };
        Self::from_fn(shape, alphabet, |_| Transition::default()).expect("single state table")
    }
}

/// One transducer per scenario agent, in the scenario's agent order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Strategy {
    pub agents: Vec<Transducer>,
}

impl Strategy {
    pub fn new(agents: Vec<Transducer>) -> Self {
        Strategy { agents }
    }

    /// Every agent absorbs everything.
    pub fn absorbing(scenario: &LatticeScenario) -> Self {
        Strategy {
            agents: scenario
                .agents
                .iter()
                .map(|a| Transducer::absorbing(a.interface, scenario.alphabet.size()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentSlot {
    pub site: i64,
    pub label: String,
    /// Ports the agent may use; strategy search enumerates over these.
    pub interface: Interface,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observer {
    pub site: i64,
    pub label: String,
}

/// An external input at `(x, t)`. At an agent site it feeds the agent's
/// external port; elsewhere it is broadcast along both tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Injection {
    pub t: i64,
    pub x: i64,
    pub symbol: Symbol,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeScenario {
    x_min: i64,
    x_max: i64,
    t_max: i64,
    alphabet: Alphabet,
    agents: Vec<AgentSlot>,
    observers: Vec<Observer>,
    inputs: Vec<(CallPattern, Vec<Injection>)>,
    task: GoverningTask,
}

/// Largest lattice accepted, in sites and in steps.
const MAX_EXTENT: i64 = 1 << 16;

impl LatticeScenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x_min: i64,
        x_max: i64,
        t_max: i64,
        alphabet: Alphabet,
        agents: Vec<AgentSlot>,
        observers: Vec<Observer>,
        inputs: Vec<(CallPattern, Vec<Injection>)>,
        task: GoverningTask,
    ) -> Result<Self, LatticeError> {
        let bad = |m: String| Err(LatticeError::InvalidScenario(m));
        if x_min > x_max || x_max.saturating_sub(x_min) >= MAX_EXTENT {
            return bad(format!("spatial extent [{x_min}, {x_max}] out of range"));
        }
        if !(0..MAX_EXTENT).contains(&t_max) {
            return bad(format!("horizon {t_max} out of range"));
        }
        if alphabet.size() > 255 {
            return bad("alphabet too large".into());
        }
        let inside = |x: i64| (x_min..=x_max).contains(&x);
        for (i, a) in agents.iter().enumerate() {
            if !inside(a.site) {
                return bad(format!(
                    "agent {} at x={} outside [{x_min}, {x_max}]",
                    a.label, a.site
                ));
            }
            if agents[..i].iter().any(|b| b.site == a.site) {
                return bad(format!("two agents share site x={}", a.site));
            }
        }
        for o in &observers {
            if !inside(o.site) {
                return bad(format!(
                    "observer {} at x={} outside [{x_min}, {x_max}]",
                    o.label, o.site
                ));
            }
        }
        for (p, injections) in &inputs {
            for inj in injections {
                if !inside(inj.x) || !(0..=t_max).contains(&inj.t) {
                    return bad(format!(
                        "input at t={} x={} outside the lattice",
                        inj.t, inj.x
                    ));
                }
                if inj.symbol.is_silence() || !alphabet.contains(inj.symbol) {
                    return bad(format!("input symbol {} not in the alphabet", inj.symbol));
                }
            }
            if inputs.iter().filter(|(q, _)| q == p).count() > 1 {
                return bad(format!(
                    "pattern {} has two input maps",
                    task.format_pattern(*p)
                ));
            }
        }
        for p in task.admissible_patterns() {
            if !inputs.iter().any(|(q, _)| *q == p) {
                return bad(format!(
                    "pattern {} has no input events",
                    task.format_pattern(p)
                ));
            }
        }
        Ok(LatticeScenario {
            x_min,
            x_max,
            t_max,
            alphabet,
            agents,
            observers,
            inputs,
            task,
        })
    }

    /// The two-wing bit task: `A_i` read and write toward their own `B_i`.
    ///
    /// Tracks pointing at the other wing are left out of the agents'
    /// interfaces: a symbol sent across needs `D ≥ 2 eps` steps, which is never
    /// before the deadline, so those ports cannot change any verdict.
    pub fn refined(task: RefinedBitTask) -> Self {
        let agents = vec![
            AgentSlot {
                site: task.a_site(0),
                label: "A_0".into(),
                interface: Interface::one_side(Dir::Left),
            },
            AgentSlot {
                site: task.a_site(1),
                label: "A_1".into(),
                interface: Interface::one_side(Dir::Right),
            },
        ];
        let observers = vec![
            Observer {
                site: task.b_site(0),
                label: "B_0".into(),
            },
            Observer {
                site: task.b_site(1),
                label: "B_1".into(),
            },
        ];
        let inputs = [CallPattern(0b10), CallPattern(0b01), CallPattern(0b11)]
            .into_iter()
            .map(|p| {
                let inj = (0..2)
                    .map(|w| Injection {
                        t: 0,
                        x: task.b_site(w),
                        symbol: bit::encode(p.contains(w)),
                    })
                    .collect();
                (p, inj)
            })
            .collect();
        LatticeScenario::new(
            task.b_site(0),
            task.b_site(1),
            task.deadline(),
            Alphabet::bits(),
            agents,
            observers,
            inputs,
            GoverningTask::Refined(task),
        )
        .expect("refined layout is valid by construction")
    }

    /// Two labs with an agent at each and a relay agent at `relay_site`.
    /// Requests arrive as external inputs at the submitting lab at `t = 0`.
    pub fn original(task: OriginalSignalTask, relay_site: i64) -> Result<Self, LatticeError> {
        let d = task.d();
        if relay_site <= 0 || relay_site >= d {
            return Err(LatticeError::RelaySite {
                site: relay_site,
                d,
            });
        }
        let sig = Alphabet::signal().lookup("sig").expect("signal symbol");
        let endpoint = |side: Dir| Interface {
            ext_in: true,
            ..Interface::one_side(side)
        };
        let agents = vec![
            AgentSlot {
                site: task.lab_l(),
                label: "L".into(),
                interface: endpoint(Dir::Right),
            },
            AgentSlot {
                site: relay_site,
                label: "relay".into(),
                interface: Interface::TRACKS,
            },
            AgentSlot {
                site: task.lab_r(),
                label: "R".into(),
                interface: endpoint(Dir::Left),
            },
        ];
        let observers = vec![
            Observer {
                site: task.lab_l(),
                label: "L".into(),
            },
            Observer {
                site: task.lab_r(),
                label: "R".into(),
            },
        ];
        let inputs = task
            .admissible_patterns()
            .into_iter()
            .map(|p| {
                let mut inj = Vec::new();
                if p.contains(0) {
                    inj.push(Injection {
                        t: 0,
                        x: task.lab_l(),
                        symbol: sig,
                    });
                }
                if p.contains(1) {
                    inj.push(Injection {
                        t: 0,
                        x: task.lab_r(),
                        symbol: sig,
                    });
                }
                (p, inj)
            })
            .collect();
        LatticeScenario::new(
            0,
            d,
            task.deadline(),
            Alphabet::signal(),
            agents,
            observers,
            inputs,
            GoverningTask::Original(task),
        )
    }

    pub fn x_range(&self) -> (i64, i64) {
        (self.x_min, self.x_max)
    }

    pub fn t_max(&self) -> i64 {
        self.t_max
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn agents(&self) -> &[AgentSlot] {
        &self.agents
    }

    pub fn observers(&self) -> &[Observer] {
        &self.observers
    }

    pub fn task(&self) -> &GoverningTask {
        &self.task
    }

    pub fn admissible_patterns(&self) -> Vec<CallPattern> {
        self.task.admissible_patterns()
    }

    pub fn format_pattern(&self, p: CallPattern) -> String {
        self.task.format_pattern(p)
    }

    pub fn injections(&self, p: CallPattern) -> Option<&[Injection]> {
        self.inputs
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, v)| v.as_slice())
    }

    /// Same scenario with the injections for `p` replaced.
    pub fn with_injections(
        &self,
        p: CallPattern,
        injections: Vec<Injection>,
    ) -> Result<Self, LatticeError> {
        let mut inputs = self.inputs.clone();
        match inputs.iter_mut().find(|(q, _)| *q == p) {
            Some(slot) => slot.1 = injections,
            None => inputs.push((p, injections)),
        }
        LatticeScenario::new(
            self.x_min,
            self.x_max,
            self.t_max,
            self.alphabet.clone(),
            self.agents.clone(),
            self.observers.clone(),
            inputs,
            self.task.clone(),
        )
    }

    /// Same scenario with a different governing task (and thus adversary).
    pub fn with_task(&self, task: GoverningTask) -> Result<Self, LatticeError> {
        LatticeScenario::new(
            self.x_min,
            self.x_max,
            self.t_max,
            self.alphabet.clone(),
            self.agents.clone(),
            self.observers.clone(),
            self.inputs.clone(),
            task,
        )
    }

    fn check_pattern(&self, p: CallPattern) -> Result<&[Injection], LatticeError> {
        if !self.admissible_patterns().contains(&p) {
            return Err(LatticeError::InadmissiblePattern(self.format_pattern(p)));
        }
        Ok(self.injections(p).expect("validated at construction"))
    }

    fn check_strategy(&self, strategy: &Strategy) -> Result<(), LatticeError> {
        if strategy.agents.len() != self.agents.len() {
            return Err(LatticeError::AgentCountMismatch {
                strategy: strategy.agents.len(),
                scenario: self.agents.len(),
            });
        }
        for t in &strategy.agents {
            if t.alphabet != self.alphabet.size() {
                return Err(LatticeError::AlphabetMismatch {
                    strategy: t.alphabet,
                    scenario: self.alphabet.size(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    Emit,
    Move,
    Deliver,
    Output,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Emit => "emit",
            EventKind::Move => "move",
            EventKind::Deliver => "deliver",
            EventKind::Output => "output",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub t: i64,
    pub x: i64,
    pub kind: EventKind,
    pub symbol: Symbol,
    /// Travel direction; `None` for external outputs.
    pub dir: Option<Dir>,
}

/// Full history of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub pattern: CallPattern,
    pub events: Vec<Event>,
    /// `states[t][k]`: state of agent `k` at the start of step `t`.
    pub states: Vec<Vec<u8>>,
    pub agent_sites: Vec<i64>,
    pub deliveries: Vec<Delivery>,
    alphabet: Alphabet,
}

/// Everything a transcript records at one spacetime point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointView {
    pub events: Vec<Event>,
    pub agent_state: Option<u8>,
}

impl Transcript {
    /// One line per event:
    /// `t=<int> x=<int> kind=<emit|move|deliver|output> sym=<symbol> dir=<L|R|->`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let _ = writeln!(
                out,
                "t={} x={} kind={} sym={} dir={}",
                e.t,
                e.x,
                e.kind.as_str(),
                self.alphabet.name(e.symbol),
                e.dir.map_or("-", Dir::as_str)
            );
        }
        out
    }

    pub fn at(&self, t: i64, x: i64) -> PointView {
        let events = self
            .events
            .iter()
            .filter(|e| e.t == t && e.x == x)
            .copied()
            .collect();
        let agent_state = self.agent_sites.iter().position(|&s| s == x).and_then(|k| {
            usize::try_from(t)
                .ok()
                .and_then(|t| self.states.get(t))
                .map(|row| row[k])
        });
        PointView {
            events,
            agent_state,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
}

/// A table entry the engine needed but the lookup could not supply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Missing {
    pub agent: usize,
    pub entry: usize,
}

/// Source of agent transitions for the engine.
pub(crate) trait TransitionSource {
    fn shape(&self, agent: usize) -> AgentShape;
    fn lookup(&self, agent: usize, entry: usize) -> Option<Transition>;
}

impl TransitionSource for Strategy {
    fn shape(&self, agent: usize) -> AgentShape {
        self.agents[agent].shape
    }

    fn lookup(&self, agent: usize, entry: usize) -> Option<Transition> {
        Some(self.agents[agent].table[entry])
    }
}

pub(crate) struct RunOutput {
    pub events: Vec<Event>,
    pub states: Vec<Vec<u8>>,
    pub deliveries: Vec<Delivery>,
}

/// The simulation core. With `record` off only deliveries are collected.
pub(crate) fn simulate<S: TransitionSource>(
    scenario: &LatticeScenario,
    source: &S,
    injections: &[Injection],
    record: bool,
) -> Result<RunOutput, Missing> {
    let width = (scenario.x_max - scenario.x_min + 1) as usize;
    let a = scenario.alphabet.size();
    let idx = |x: i64| (x - scenario.x_min) as usize;
    let site = |i: usize| scenario.x_min + i as i64;

    let mut agent_at = vec![None; width];
    for (k, slot) in scenario.agents.iter().enumerate() {
        agent_at[idx(slot.site)] = Some(k);
    }
    let mut observer = vec![false; width];
    for o in &scenario.observers {
        observer[idx(o.site)] = true;
    }

    let mut from_left = vec![Symbol::SILENCE; width];
    let mut from_right = vec![Symbol::SILENCE; width];
    let mut next_from_left = vec![Symbol::SILENCE; width];
    let mut next_from_right = vec![Symbol::SILENCE; width];
    let mut states = vec![0u8; scenario.agents.len()];
    let mut ext = vec![Symbol::SILENCE; scenario.agents.len()];
    let mut broadcast = vec![Symbol::SILENCE; width];

    let mut out = RunOutput {
        events: Vec::new(),
        states: Vec::new(),
        deliveries: Vec::new(),
    };

    for t in 0..=scenario.t_max {
        for i in 0..width {
            for (s, dir) in [(from_left[i], Dir::Right), (from_right[i], Dir::Left)] {
                if s.is_silence() {
                    continue;
                }
                let x = site(i);
                let kind = if observer[i] {
                    out.deliveries.push(Delivery { t, x, symbol: s });
                    EventKind::Deliver
                } else {
                    EventKind::Move
                };
                if record {
                    out.events.push(Event {
                        t,
                        x,
                        kind,
                        symbol: s,
                        dir: Some(dir),
                    });
                }
            }
        }

        ext.fill(Symbol::SILENCE);
        broadcast.fill(Symbol::SILENCE);
        for inj in injections.iter().filter(|inj| inj.t == t) {
            let i = idx(inj.x);
            match agent_at[i] {
                Some(k) => ext[k] = inj.symbol,
                None => broadcast[i] = inj.symbol,
            }
        }
        if record {
            out.states.push(states.clone());
        }

        let last = t == scenario.t_max;
        next_from_left.fill(Symbol::SILENCE);
        next_from_right.fill(Symbol::SILENCE);
        for i in 0..width {
            let x = site(i);
            let (go_left, go_right) = match agent_at[i] {
                Some(_) if last => (Symbol::SILENCE, Symbol::SILENCE),
                Some(k) => {
                    let shape = source.shape(k);
                    let input = StepInput {
                        state: states[k],
                        from_left: from_left[i],
                        from_right: from_right[i],
                        ext: ext[k],
                    };
                    let entry = shape.entry_index(a, input);
                    let tr = source.lookup(k, entry).ok_or(Missing { agent: k, entry })?;
                    states[k] = tr.next;
                    if record && !tr.output.is_silence() {
                        out.events.push(Event {
                            t,
                            x,
                            kind: EventKind::Output,
                            symbol: tr.output,
                            dir: None,
                        });
                    }
                    (tr.emit_left, tr.emit_right)
                }
                None if !broadcast[i].is_silence() => (broadcast[i], broadcast[i]),
                None if observer[i] => (Symbol::SILENCE, Symbol::SILENCE),
                None => {
                    // pass-through; not an emission
                    if i > 0 {
                        next_from_right[i - 1] = from_right[i];
                    }
                    if i + 1 < width {
                        next_from_left[i + 1] = from_left[i];
                    }
                    continue;
                }
            };
            if i > 0 && !go_left.is_silence() {
                next_from_right[i - 1] = go_left;
                if record {
                    out.events.push(Event {
                        t,
                        x,
                        kind: EventKind::Emit,
                        symbol: go_left,
                        dir: Some(Dir::Left),
                    });
                }
            }
            if i + 1 < width && !go_right.is_silence() {
                next_from_left[i + 1] = go_right;
                if record {
                    out.events.push(Event {
                        t,
                        x,
                        kind: EventKind::Emit,
                        symbol: go_right,
                        dir: Some(Dir::Right),
                    });
                }
            }
        }
        std::mem::swap(&mut from_left, &mut next_from_left);
        std::mem::swap(&mut from_right, &mut next_from_right);
    }
    Ok(out)
}

/// Runs `strategy` against one admissible call pattern.
pub fn run(
    scenario: &LatticeScenario,
    strategy: &Strategy,
    pattern: CallPattern,
) -> Result<Transcript, LatticeError> {
    scenario.check_strategy(strategy)?;
    let injections = scenario.check_pattern(pattern)?;
    let out = simulate(scenario, strategy, injections, true).expect("complete tables never miss");
    Ok(Transcript {
        pattern,
        events: out.events,
        states: out.states,
        agent_sites: scenario.agents.iter().map(|a| a.site).collect(),
        deliveries: out.deliveries,
        alphabet: scenario.alphabet.clone(),
    })
}

/// Result of checking a strategy against the whole adversary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Failing patterns in canonical order, with what went wrong.
    Failure(Vec<(CallPattern, Violation)>),
}

impl Outcome {
    pub fn is_success(&self) -> bool {
        matches!(self, Outcome::Success)
    }
}

/// Success iff the task predicate holds for every admissible pattern.
pub fn guaranteed_success(
    scenario: &LatticeScenario,
    strategy: &Strategy,
) -> Result<Outcome, LatticeError> {
    scenario.check_strategy(strategy)?;
    let mut failures = Vec::new();
    for p in scenario.admissible_patterns() {
        let injections = scenario.check_pattern(p)?;
        let out =
            simulate(scenario, strategy, injections, false).expect("complete tables never miss");
        if let Err(v) = scenario.task.success_predicate(p, &out.deliveries)? {
            failures.push((p, v));
        }
    }
    Ok(if failures.is_empty() {
        Outcome::Success
    } else {
        Outcome::Failure(failures)
    })
}

/// Strategy for [`LatticeScenario::original`] with the same `relay_site`.
///
/// Each lab fires its signal toward the other lab when its request arrives.
/// The relay forwards the first signal to reach it and absorbs every later
/// one; on a tie it forwards the signal coming from `L`.
pub fn make_relay_strategy(
    task: &OriginalSignalTask,
    relay_site: i64,
) -> Result<Strategy, LatticeError> {
    let scenario = LatticeScenario::original(*task, relay_site)?;
    let a = scenario.alphabet.size();
    let slots = scenario.agents();
    let endpoint = |slot: &AgentSlot, toward: Dir| {
        let shape = AgentShape {
            states: 1,
            interface: slot.interface,
        };
        Transducer::from_fn(shape, a, |input| {
            let mut t = Transition::default();
            if !input.ext.is_silence() {
                match toward {
                    Dir::Right => t.emit_right = input.ext,
                    Dir::Left => t.emit_left = input.ext,
                }
            }
            t
        })
    };
    let relay_shape = AgentShape {
        states: 2,
        interface: slots[1].interface,
    };
    let relay = Transducer::from_fn(relay_shape, a, |input| {
        let mut t = Transition {
            next: input.state,
            ..Transition::default()
        };
        if input.state == 0 {
            if !input.from_left.is_silence() {
                t.emit_right = input.from_left;
                t.next = 1;
            } else if !input.from_right.is_silence() {
                t.emit_left = input.from_right;
                t.next = 1;
            }
        }
        t
    })?;
    Ok(Strategy::new(vec![
        endpoint(&slots[0], Dir::Right)?,
        relay,
        endpoint(&slots[2], Dir::Left)?,
    ]))
}

/// Each `A_i` sends its input bit straight back to `B_i`.
pub fn make_echo_strategy(task: &RefinedBitTask) -> Strategy {
    let scenario = LatticeScenario::refined(*task);
    let a = scenario.alphabet.size();
    let agents = scenario
        .agents()
        .iter()
        .map(|slot| {
            let shape = AgentShape {
                states: 1,
                interface: slot.interface,
            };
            Transducer::from_fn(shape, a, |input| Transition {
                emit_left: input.from_left,
                emit_right: input.from_right,
                ..Transition::default()
            })
            .expect("one-state table")
        })
        .collect();
    Strategy::new(agents)
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
