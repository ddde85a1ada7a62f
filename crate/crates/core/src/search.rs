//! Exhaustive strategy search over bounded transducers.
//!
//! The canonical strategy space is the product, over agents and then over
//! table entries, of each entry's allowed transitions. A strategy's canonical
//! index is its mixed-radix position in that product with agent 0, entry 0 as
//! the most significant digit.
//!
//! [`decide_feasible`] does not walk that product one table at a time. It
//! grows tables lazily: the simulator runs every admissible pattern and, the
//! first time it reads an entry that has not been fixed yet, the search
//! branches over that entry's choices. Each leaf is a behaviour class: every
//! full table agreeing with it on the entries it fixed produces the same
//! transcripts. Classes partition the canonical space, so judging one member
//! judges them all. A class is reported under its lowest canonical index
//! (unfixed entries at their first choice).

use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{
    guaranteed_success, simulate, AgentShape, Interface, LatticeError, LatticeScenario, Missing,
    Strategy, Transducer, Transition, TransitionSource,
};
use crate::symbol::{bit, Symbol};
use crate::task::{CallPattern, Delivery, Promise, RefinedBitTask, Violation};

/// Most strategies [`enumerate_strategies`] will materialise.
pub const MAX_MATERIALIZED: u128 = 1 << 20;
/// Most table entries allowed per agent.
const MAX_ENTRIES: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("rejected input: {0}")]
    Rejected(String),
    #[error("search space too large: {required} strategies required, limit {limit}")]
    Resource { required: String, limit: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Which transducers are searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyClass {
    /// Every table with at most `states` states over the agent's interface.
    Transducers,
    /// One state; silence in gives silence out, a symbol in gives a symbol
    /// out on the same track. For the bit task this is the space of maps
    /// `{0,1} -> {0,1}`, one per wing.
    LocalResponse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub states: u8,
    /// Alphabet size including silence; must match the scenario.
    pub alphabet: usize,
    pub class: StrategyClass,
    pub budget: Option<Duration>,
}

impl SearchBounds {
    pub fn new(states: u8, alphabet: usize) -> Result<Self, SearchError> {
        if states < 1 {
            return Err(SearchError::Rejected("S must be ≥ 1".into()));
        }
        if alphabet < 2 {
            return Err(SearchError::Rejected("A must be ≥ 2".into()));
        }
        Ok(SearchBounds {
            states,
            alphabet,
            class: StrategyClass::Transducers,
            budget: None,
        })
    }

    pub fn local_response(alphabet: usize) -> Result<Self, SearchError> {
        Ok(SearchBounds {
            class: StrategyClass::LocalResponse,
            ..Self::new(1, alphabet)?
        })
    }

    pub fn with_budget(self, budget: Duration) -> Self {
        SearchBounds {
            budget: Some(budget),
            ..self
        }
    }
}

/// A strategy that fails, and the first pattern it fails on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub index: u128,
    pub pattern: CallPattern,
    pub violation: Violation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchStats {
    /// Size of the canonical strategy space.
    pub space: u128,
    /// Behaviour classes evaluated.
    pub classes: u64,
    /// Behaviour classes that succeed on every pattern.
    pub winners: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeasibilityResult {
    Feasible {
        witness: Strategy,
        index: u128,
        stats: SearchStats,
    },
    /// One certificate per behaviour class, ordered by canonical index.
    Infeasible {
        certificates: Vec<Certificate>,
        stats: SearchStats,
    },
    /// The budget ran out; nothing is claimed.
    Exhausted {
        budget: Duration,
        stats: SearchStats,
    },
}

impl FeasibilityResult {
    pub fn stats(&self) -> SearchStats {
        match self {
            FeasibilityResult::Feasible { stats, .. }
            | FeasibilityResult::Infeasible { stats, .. }
            | FeasibilityResult::Exhausted { stats, .. } => *stats,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible { .. })
    }
}

#[derive(Debug, Clone)]
enum Domain {
    All(u32),
    Only(Vec<u32>),
}

impl Domain {
    fn len(&self) -> u32 {
        match self {
            Domain::All(n) => *n,
            Domain::Only(v) => v.len() as u32,
        }
    }

    fn choice(&self, digit: u32) -> u32 {
        match self {
            Domain::All(_) => digit,
            Domain::Only(v) => v[digit as usize],
        }
    }
}

#[derive(Debug, Clone)]
struct AgentSpace {
    shape: AgentShape,
    domains: Vec<Domain>,
}

/// The canonical product space for a scenario under some bounds.
#[derive(Debug, Clone)]
pub struct StrategySpace {
    alphabet: usize,
    agents: Vec<AgentSpace>,
    size: Option<u128>,
}

impl StrategySpace {
    pub fn new(scenario: &LatticeScenario, bounds: &SearchBounds) -> Result<Self, SearchError> {
        let a = scenario.alphabet().size();
        if bounds.alphabet != a {
            return Err(SearchError::Rejected(format!(
                "bounds alphabet {} does not match scenario alphabet {a}",
                bounds.alphabet
            )));
        }
        let mut agents = Vec::new();
        for slot in scenario.agents() {
            let shape = AgentShape {
                states: bounds.states,
                interface: slot.interface,
            };
            let entries = shape.entry_count(a);
            let choices = shape.choice_count(a);
            if entries > MAX_ENTRIES || choices > u128::from(u32::MAX) {
                return Err(SearchError::Resource {
                    required: format!("{choices}^{entries}"),
                    limit: format!("{MAX_ENTRIES} entries of < 2^32 choices"),
                });
            }
            let domains = match bounds.class {
                StrategyClass::Transducers => vec![Domain::All(choices as u32); entries as usize],
                StrategyClass::LocalResponse => local_domains(&slot.interface, shape, a)?,
            };
            agents.push(AgentSpace { shape, domains });
        }
        let size = agents
            .iter()
            .flat_map(|ag| ag.domains.iter())
            .try_fold(1u128, |acc, d| acc.checked_mul(u128::from(d.len())));
        Ok(StrategySpace {
            alphabet: a,
            agents,
            size,
        })
    }

    /// Number of strategies, or `None` if it exceeds `u128`.
    pub fn size(&self) -> Option<u128> {
        self.size
    }

    fn digits_to_index(&self, digits: impl Iterator<Item = u32>) -> u128 {
        let radices = self
            .agents
            .iter()
            .flat_map(|ag| ag.domains.iter().map(Domain::len));
        radices
            .zip(digits)
            .fold(0u128, |acc, (r, d)| acc * u128::from(r) + u128::from(d))
    }

    fn strategy_from_digits(&self, digits: &[Vec<u32>]) -> Strategy {
        let agents = self
            .agents
            .iter()
            .zip(digits)
            .map(|(ag, ds)| {
                let table = ag
                    .domains
                    .iter()
                    .zip(ds)
                    .map(|(dom, &d)| ag.shape.decode_choice(self.alphabet, dom.choice(d)))
                    .collect();
                Transducer::from_table(ag.shape, self.alphabet, table)
                    .expect("domains are in range")
            })
            .collect();
        Strategy::new(agents)
    }

    /// The strategy at a canonical index.
    pub fn strategy_at(&self, mut index: u128) -> Option<Strategy> {
        if index >= self.size? {
            return None;
        }
        let mut digits: Vec<Vec<u32>> = self
            .agents
            .iter()
            .map(|ag| vec![0; ag.domains.len()])
            .collect();
        for (k, ag) in self.agents.iter().enumerate().rev() {
            for (e, dom) in ag.domains.iter().enumerate().rev() {
                let r = u128::from(dom.len());
                digits[k][e] = (index % r) as u32;
                index /= r;
            }
        }
        Some(self.strategy_from_digits(&digits))
    }
}

fn local_domains(
    iface: &Interface,
    shape: AgentShape,
    a: usize,
) -> Result<Vec<Domain>, SearchError> {
    let ins = [iface.in_left, iface.in_right, iface.ext_in];
    let outs = [iface.out_left, iface.out_right, iface.ext_out];
    if ins.iter().filter(|b| **b).count() != 1 || outs.iter().filter(|b| **b).count() != 1 {
        return Err(SearchError::Rejected(
            "local-response strategies need exactly one input and one output port".into(),
        ));
    }
    let emit = |s: Symbol| {
        let t = Transition {
            next: 0,
            emit_left: if iface.out_left { s } else { Symbol::SILENCE },
            emit_right: if iface.out_right { s } else { Symbol::SILENCE },
            output: if iface.ext_out { s } else { Symbol::SILENCE },
        };
        shape.encode_choice(a, t)
    };
    let speaking: Vec<u32> = (1..a).map(|s| emit(Symbol(s as u8))).collect();
    Ok((0..a)
        .map(|s| {
            if s == 0 {
                Domain::Only(vec![emit(Symbol::SILENCE)])
            } else {
                Domain::Only(speaking.clone())
            }
        })
        .collect())
}

/// Every strategy in canonical order. Refuses spaces above
/// [`MAX_MATERIALIZED`].
pub fn enumerate_strategies(
    scenario: &LatticeScenario,
    bounds: &SearchBounds,
) -> Result<Vec<Strategy>, SearchError> {
    let space = StrategySpace::new(scenario, bounds)?;
    let size = match space.size {
        Some(n) if n <= MAX_MATERIALIZED => n,
        other => {
            return Err(SearchError::Resource {
                required: other.map_or_else(|| "more than 2^128".into(), |n| n.to_string()),
                limit: MAX_MATERIALIZED.to_string(),
            })
        }
    };
    let mut digits: Vec<Vec<u32>> = space
        .agents
        .iter()
        .map(|ag| vec![0; ag.domains.len()])
        .collect();
    let mut out = Vec::with_capacity(size as usize);
    for _ in 0..size {
        out.push(space.strategy_from_digits(&digits));
        // increment, least significant digit last
        'carry: for (k, ag) in space.agents.iter().enumerate().rev() {
            for (e, dom) in ag.domains.iter().enumerate().rev() {
                digits[k][e] += 1;
                if digits[k][e] < dom.len() {
                    break 'carry;
                }
                digits[k][e] = 0;
            }
        }
    }
    Ok(out)
}

/// Partially fixed tables; `None` entries have not been read yet.
#[derive(Clone)]
struct Partial<'a> {
    space: &'a StrategySpace,
    digits: Vec<Vec<Option<u32>>>,
}

impl TransitionSource for Partial<'_> {
    fn shape(&self, agent: usize) -> AgentShape {
        self.space.agents[agent].shape
    }

    fn lookup(&self, agent: usize, entry: usize) -> Option<Transition> {
        let ag = &self.space.agents[agent];
        self.digits[agent][entry].map(|d| {
            ag.shape
                .decode_choice(self.space.alphabet, ag.domains[entry].choice(d))
        })
    }
}

impl Partial<'_> {
    fn representative_index(&self) -> u128 {
        self.space
            .digits_to_index(self.digits.iter().flatten().map(|d| d.unwrap_or(0)))
    }
}

#[derive(Debug, Clone)]
struct Leaf {
    index: u128,
    failure: Option<(CallPattern, Violation)>,
}

enum Step<'a> {
    Leaf(Leaf),
    Branch(Vec<Partial<'a>>),
}

struct Explorer<'a> {
    scenario: &'a LatticeScenario,
    patterns: Vec<CallPattern>,
    deadline: Option<Instant>,
}

struct OutOfTime;

impl<'a> Explorer<'a> {
    fn expand(&self, node: &Partial<'a>) -> Result<Step<'a>, SearchError> {
        let mut failure = None;
        for &p in &self.patterns {
            let inj = self.scenario.injections(p).expect("validated scenario");
            match simulate(self.scenario, node, inj, false) {
                Ok(out) => {
                    if failure.is_none() {
                        if let Err(v) = self.judge(p, &out.deliveries)? {
                            failure = Some((p, v));
                        }
                    }
                }
                Err(Missing { agent, entry }) => {
                    let n = node.space.agents[agent].domains[entry].len();
                    let children = (0..n)
                        .map(|d| {
                            let mut child = node.clone();
                            child.digits[agent][entry] = Some(d);
                            child
                        })
                        .collect();
                    return Ok(Step::Branch(children));
                }
            }
        }
        Ok(Step::Leaf(Leaf {
            index: node.representative_index(),
            failure,
        }))
    }

    fn judge(&self, p: CallPattern, d: &[Delivery]) -> Result<Result<(), Violation>, SearchError> {
        Ok(self
            .scenario
            .task()
            .success_predicate(p, d)
            .map_err(LatticeError::from)?)
    }

    fn walk(
        &self,
        node: Partial<'a>,
        leaves: &mut Vec<Leaf>,
    ) -> Result<Result<(), OutOfTime>, SearchError> {
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            if self.deadline.is_some_and(|d| Instant::now() >= d) {
                return Ok(Err(OutOfTime));
            }
            match self.expand(&n)? {
                Step::Leaf(l) => leaves.push(l),
                Step::Branch(children) => stack.extend(children.into_iter().rev()),
            }
        }
        Ok(Ok(()))
    }
}

/// [`decide_feasible_with`] on a single worker.
pub fn decide_feasible(
    scenario: &LatticeScenario,
    bounds: &SearchBounds,
) -> Result<FeasibilityResult, SearchError> {
    decide_feasible_with(scenario, bounds, 1)
}

/// Exhaustive feasibility decision. The verdict and witness do not depend on
/// `workers`.
pub fn decide_feasible_with(
    scenario: &LatticeScenario,
    bounds: &SearchBounds,
    workers: usize,
) -> Result<FeasibilityResult, SearchError> {
    let patterns = scenario.admissible_patterns();
    if patterns.is_empty() {
        return Err(SearchError::Rejected(
            "task has no admissible call patterns".into(),
        ));
    }
    let space = StrategySpace::new(scenario, bounds)?;
    let Some(space_size) = space.size else {
        return Err(SearchError::Resource {
            required: "more than 2^128".into(),
            limit: "2^128".into(),
        });
    };
    let explorer = Explorer {
        scenario,
        patterns,
        deadline: bounds.budget.map(|b| Instant::now() + b),
    };
    let root = Partial {
        space: &space,
        digits: space
            .agents
            .iter()
            .map(|ag| vec![None; ag.domains.len()])
            .collect(),
    };

    // Split the tree into an ordered frontier of subtrees.
    let workers = workers.max(1);
    let target = if workers == 1 { 1 } else { workers * 8 };
    let mut leaves = Vec::new();
    let mut frontier = vec![root];
    while frontier.len() < target {
        let mut next = Vec::new();
        let mut grew = false;
        for node in frontier {
            match explorer.expand(&node)? {
                Step::Leaf(l) => leaves.push(l),
                Step::Branch(children) => {
                    grew = true;
                    next.extend(children);
                }
            }
        }
        frontier = next;
        if !grew {
            break;
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SearchError::Rejected(format!("cannot start {workers} workers: {e}")))?;
    let parts: Vec<Result<(Vec<Leaf>, bool), SearchError>> = pool.install(|| {
        frontier
            .into_par_iter()
            .map(|node| {
                let mut out = Vec::new();
                let done = explorer.walk(node, &mut out)?.is_ok();
                Ok((out, done))
            })
            .collect()
    });
    let mut complete = true;
    for part in parts {
        let (mut l, done) = part?;
        complete &= done;
        leaves.append(&mut l);
    }
    leaves.sort_by_key(|l| l.index);

    let winners = leaves.iter().filter(|l| l.failure.is_none()).count() as u64;
    let stats = SearchStats {
        space: space_size,
        classes: leaves.len() as u64,
        winners,
    };
    if !complete {
        return Ok(FeasibilityResult::Exhausted {
            budget: bounds.budget.unwrap_or_default(),
            stats,
        });
    }
    if let Some(first) = leaves.iter().find(|l| l.failure.is_none()) {
        let witness = space.strategy_at(first.index).expect("index within space");
        debug_assert!(guaranteed_success(scenario, &witness)?.is_success());
        return Ok(FeasibilityResult::Feasible {
            witness,
            index: first.index,
            stats,
        });
    }
    let certificates = leaves
        .into_iter()
        .map(|l| {
            let (pattern, violation) = l.failure.expect("no winners");
            Certificate {
                index: l.index,
                pattern,
                violation,
            }
        })
        .collect();
    Ok(FeasibilityResult::Infeasible {
        certificates,
        stats,
    })
}

/// The representative strategy of a certificate or witness index.
pub fn strategy_at(
    scenario: &LatticeScenario,
    bounds: &SearchBounds,
    index: u128,
) -> Result<Option<Strategy>, SearchError> {
    Ok(StrategySpace::new(scenario, bounds)?.strategy_at(index))
}

/// A pair of response maps, one per wing: `maps[i][b]` is what `A_i` returns
/// on receiving bit `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalResponse {
    pub maps: [[bool; 2]; 2],
}

impl LocalResponse {
    pub const ECHO: LocalResponse = LocalResponse {
        maps: [[false, true], [false, true]],
    };

    pub fn all() -> impl Iterator<Item = LocalResponse> {
        (0u8..16).map(|bits| LocalResponse {
            maps: [
                [bits & 8 != 0, bits & 4 != 0],
                [bits & 2 != 0, bits & 1 != 0],
            ],
        })
    }

    pub fn is_echo(&self) -> bool {
        *self == Self::ECHO
    }

    pub fn name(&self) -> String {
        if self.is_echo() {
            return "echo".into();
        }
        let f = |m: [bool; 2]| format!("{}{}", u8::from(m[0]), u8::from(m[1]));
        format!("A0:{}/A1:{}", f(self.maps[0]), f(self.maps[1]))
    }
}

/// All winning response-map pairs for the two-wing bit task, judged
/// directly on the outputs each wing would return, without the lattice.
///
/// No signal can cross between wings before the deadline (`D + eps > eps`),
/// so every strategy's output at `B_i` is a function of `B_i`'s own bit.
pub fn refined_local_search(promise: Promise) -> Vec<LocalResponse> {
    let task = RefinedBitTask::new(2, 1, promise).expect("fixed layout");
    LocalResponse::all()
        .filter(|lr| {
            task.admissible_patterns().into_iter().all(|p| {
                let deliveries: Vec<Delivery> = (0..2)
                    .map(|w| Delivery {
                        t: task.deadline(),
                        x: task.b_site(w),
                        symbol: bit::encode(lr.maps[w][usize::from(p.contains(w))]),
                    })
                    .collect();
                task.judge(p, &deliveries).expect("well-formed").is_ok()
            })
        })
        .collect()
}
