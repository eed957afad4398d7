//! Integer-time state space of an automaton: the finite interval MDP.
//!
//! States pair a location with an integer clock valuation. Time advances in
//! unit ticks; each clock saturates one above the largest constant it is ever
//! compared with, and a clock compared with nothing stays at zero. A discrete
//! step follows an enabled edge; outcomes that lead to the same state are
//! merged by adding their bounds.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use crate::lang::{ClockFormula, CompiledQuery};
use crate::model::{prob_to_f64, Action, ClockAtom, ClockConstraint, Ipta, Prob};

/// Marker for the time-step choice in [`Imdp::choice_action`].
pub const TICK: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExploreError {
    #[error("state space exceeds the limit of {limit} states")]
    StateLimit { limit: usize },
    #[error("the query's formula clock brings the clock count to {0}; at most 64 are supported")]
    TooManyClocks(usize),
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub state_limit: usize,
    /// Stop exploring at states whose value the query already decides: target
    /// states, states violating the left side of an until, and states in
    /// locations from which no target location is reachable even ignoring time.
    pub reduce: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            state_limit: 10_000_000,
            reduce: true,
        }
    }
}

/// Per-clock saturation point and the constants that determine it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClockCeilings {
    /// Largest constant compared against each clock, `None` if never compared.
    pub max_constant: Vec<Option<u32>>,
}

impl ClockCeilings {
    /// `k(x)`: 0 for clocks that no constraint mentions.
    pub fn k(&self, clock: usize) -> u32 {
        self.max_constant[clock].unwrap_or(0)
    }

    /// Saturation value of a clock valuation component.
    pub fn cap(&self, clock: usize) -> u32 {
        match self.max_constant[clock] {
            Some(k) => k + 1,
            None => 0,
        }
    }
}

fn note_atom(max: &mut [Option<u32>], a: &ClockAtom) {
    let mut bump = |i: usize, b: u32| {
        max[i] = Some(max[i].map_or(b, |m| m.max(b)));
    };
    match *a {
        ClockAtom::Single { clock, bound, .. } => bump(clock.index(), bound),
        ClockAtom::Diagonal {
            clock,
            other,
            bound,
            ..
        } => {
            bump(clock.index(), bound);
            bump(other.index(), bound);
        }
    }
}

/// Clock ceilings of the model plus the query's formula clock, if any.
pub fn ceilings(m: &Ipta, q: Option<&CompiledQuery>) -> ClockCeilings {
    let extra = usize::from(q.is_some_and(|q| q.formula_clock.is_some()));
    let mut max = vec![None; m.clocks.len() + extra];
    let constraints = m.invariants.iter().chain(m.edges.iter().map(|e| &e.guard));
    for c in constraints {
        for a in c.atoms() {
            note_atom(&mut max, a);
        }
    }
    if let Some(q) = q {
        let mut atoms = Vec::new();
        for f in q.target.iter().chain(q.left.iter().flatten()) {
            f.atoms(&mut atoms);
        }
        for a in &atoms {
            note_atom(&mut max, a);
        }
    }
    ClockCeilings { max_constant: max }
}

/// Finite interval MDP in compressed sparse row layout.
#[derive(Clone, Debug, Default)]
pub struct Imdp {
    pub clock_names: Vec<String>,
    pub variable_names: Vec<String>,
    /// Location (index into `location_values`) of every state.
    pub state_loc: Vec<u32>,
    /// Clock valuations, `clock_names.len()` entries per state.
    pub state_clocks: Vec<u32>,
    pub location_values: Vec<Vec<i64>>,
    pub initial: Vec<u32>,
    /// Choices of state `s` are `choice_start[s]..choice_start[s+1]`.
    pub choice_start: Vec<u32>,
    /// Index into `actions`, or [`TICK`].
    pub choice_action: Vec<u32>,
    pub actions: Vec<String>,
    /// Transitions of choice `c` are `trans_start[c]..trans_start[c+1]`.
    pub trans_start: Vec<u32>,
    pub trans_target: Vec<u32>,
    /// Index into `bounds` / `bounds_f64`.
    pub trans_bound: Vec<u32>,
    pub bounds: Vec<(Prob, Prob)>,
    pub bounds_f64: Vec<(f64, f64)>,
    /// Atomic propositions per location, by index into `label_names`.
    pub label_names: Vec<String>,
    pub location_labels: Vec<Vec<u32>>,
    /// Query target / until-left membership, when built for a query.
    pub target: Option<Vec<bool>>,
    pub left: Option<Vec<bool>>,
    /// States left unexpanded because the query decides their value.
    pub absorbing: Vec<bool>,
    /// States without any outgoing step that are not absorbing.
    pub timelocks: Vec<u32>,
    /// The model or query uses strict clock comparisons.
    pub strict_constraints: bool,
}

/// One choice of [`Imdp::from_choices`]: the source state and the
/// `(target, lower, upper)` bounds of its outcomes.
pub type ChoiceSpec = (u32, Vec<(u32, Prob, Prob)>);

impl Imdp {
    /// An interval MDP given directly by its choices. `choices` lists, per
    /// state in increasing order, the outcomes `(target, lower, upper)` of each
    /// choice; states without choices are dead ends. There are no clocks and
    /// every state is its own location.
    pub fn from_choices(
        num_states: usize,
        initial: Vec<u32>,
        choices: &[ChoiceSpec],
    ) -> Imdp {
        let mut m = Imdp {
            state_loc: (0..num_states as u32).collect(),
            location_values: (0..num_states as i64).map(|s| vec![s]).collect(),
            variable_names: vec!["state".to_string()],
            location_labels: vec![Vec::new(); num_states],
            initial,
            actions: vec!["step".to_string()],
            absorbing: vec![false; num_states],
            ..Imdp::default()
        };
        let mut bounds = BoundTable::default();
        m.choice_start.push(0);
        m.trans_start.push(0);
        let mut it = choices.iter().peekable();
        for s in 0..num_states as u32 {
            while let Some((_, outcomes)) = it.next_if(|(src, _)| *src == s) {
                m.choice_action.push(0);
                for (t, lo, hi) in outcomes {
                    m.trans_target.push(*t);
                    m.trans_bound.push(bounds.intern(lo.clone(), hi.clone()));
                }
                m.trans_start.push(m.trans_target.len() as u32);
            }
            m.choice_start.push(m.choice_action.len() as u32);
            if m.choice_start[s as usize] == m.choice_start[s as usize + 1] {
                m.timelocks.push(s);
            }
        }
        assert!(it.next().is_none(), "choices must be listed by increasing state");
        m.bounds_f64 = bounds
            .pairs
            .iter()
            .map(|(l, u)| (prob_to_f64(l), prob_to_f64(u)))
            .collect();
        m.bounds = bounds.pairs;
        m
    }

    pub fn num_states(&self) -> usize {
        self.state_loc.len()
    }

    pub fn num_choices(&self) -> usize {
        self.choice_action.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.trans_target.len()
    }

    pub fn num_clocks(&self) -> usize {
        self.clock_names.len()
    }

    pub fn choices(&self, s: usize) -> std::ops::Range<usize> {
        self.choice_start[s] as usize..self.choice_start[s + 1] as usize
    }

    pub fn transitions(&self, c: usize) -> std::ops::Range<usize> {
        self.trans_start[c] as usize..self.trans_start[c + 1] as usize
    }

    pub fn clocks_of(&self, s: usize) -> &[u32] {
        let k = self.num_clocks();
        &self.state_clocks[s * k..(s + 1) * k]
    }

    pub fn action_name(&self, c: usize) -> &str {
        match self.choice_action[c] {
            TICK => "tick",
            a => &self.actions[a as usize],
        }
    }

    /// States carrying an atomic proposition.
    pub fn states_with_label(&self, name: &str) -> Vec<bool> {
        let Some(li) = self.label_names.iter().position(|n| n == name) else {
            return vec![false; self.num_states()];
        };
        let li = li as u32;
        self.state_loc
            .iter()
            .map(|&l| self.location_labels[l as usize].contains(&li))
            .collect()
    }

    /// Human-readable description of a state.
    pub fn describe_state(&self, s: usize) -> String {
        let loc = &self.location_values[self.state_loc[s] as usize];
        let mut parts: Vec<String> = self
            .variable_names
            .iter()
            .zip(loc)
            .map(|(n, v)| format!("{n}={v}"))
            .collect();
        for (n, v) in self.clock_names.iter().zip(self.clocks_of(s)) {
            parts.push(format!("{n}={v}"));
        }
        format!("({})", parts.join(","))
    }

    /// Textual transition list; identical input gives identical bytes.
    pub fn export(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "imdp {} {} {}",
            self.num_states(),
            self.num_choices(),
            self.num_transitions()
        );
        let shown: Vec<(String, String)> = self
            .bounds
            .iter()
            .map(|(l, u)| (crate::model::fmt_prob(l), crate::model::fmt_prob(u)))
            .collect();
        for s in 0..self.num_states() {
            for (k, c) in self.choices(s).enumerate() {
                let action = self.action_name(c);
                for t in self.transitions(c) {
                    let (lo, hi) = &shown[self.trans_bound[t] as usize];
                    let _ = writeln!(
                        out,
                        "{s} {k}:{action} {lo} {hi} {}",
                        self.trans_target[t]
                    );
                }
            }
        }
        let mut sections: Vec<(String, Vec<bool>)> = vec![("init".to_string(), {
            let mut v = vec![false; self.num_states()];
            for &i in &self.initial {
                v[i as usize] = true;
            }
            v
        })];
        for n in &self.label_names {
            sections.push((n.clone(), self.states_with_label(n)));
        }
        if let Some(t) = &self.target {
            sections.push(("target".to_string(), t.clone()));
        }
        if let Some(l) = &self.left {
            sections.push(("left".to_string(), l.clone()));
        }
        for (name, member) in sections {
            let _ = write!(out, "label {name}:");
            for (s, _) in member.iter().enumerate().filter(|(_, m)| **m) {
                let _ = write!(out, " {s}");
            }
            out.push('\n');
        }
        out
    }
}

/// Counts recovered from an exported transition list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExportSummary {
    pub states: usize,
    pub choices: usize,
    pub transitions: usize,
    pub labels: Vec<(String, Vec<u32>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ExportParseError {
    pub line: usize,
    pub message: String,
}

/// Reads back the output of [`Imdp::export`], checking it against its header.
pub fn read_export(text: &str) -> Result<ExportSummary, ExportParseError> {
    let err = |line: usize, message: &str| ExportParseError {
        line,
        message: message.to_string(),
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != "imdp" {
        return Err(err(1, "expected `imdp <states> <choices> <transitions>`"));
    }
    let num = |s: &str, line: usize| s.parse::<usize>().map_err(|_| err(line, "bad number"));
    let (states, choices, transitions) = (num(h[1], 1)?, num(h[2], 1)?, num(h[3], 1)?);
    let mut seen_choices = BTreeSet::new();
    let mut count = 0usize;
    let mut labels = Vec::new();
    for (i, line) in lines {
        let n = i + 1;
        if let Some(rest) = line.strip_prefix("label ") {
            let (name, ids) = rest.split_once(':').ok_or_else(|| err(n, "missing `:`"))?;
            let ids = ids
                .split_whitespace()
                .map(|x| x.parse::<u32>().map_err(|_| err(n, "bad state id")))
                .collect::<Result<Vec<_>, _>>()?;
            labels.push((name.to_string(), ids));
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 {
            return Err(err(n, "expected `src choice lower upper dst`"));
        }
        let src = num(f[0], n)?;
        let dst = num(f[4], n)?;
        if src >= states || dst >= states {
            return Err(err(n, "state id out of range"));
        }
        let (k, _) = f[1].split_once(':').ok_or_else(|| err(n, "bad choice label"))?;
        seen_choices.insert((src, num(k, n)?));
        for p in [f[2], f[3]] {
            if p.split('/').any(|x| x.parse::<i64>().is_err()) {
                return Err(err(n, "bad probability"));
            }
        }
        count += 1;
    }
    if count != transitions || seen_choices.len() != choices {
        return Err(err(1, "header counts do not match the body"));
    }
    Ok(ExportSummary {
        states,
        choices,
        transitions,
        labels,
    })
}

/// Hash index from packed state keys to state ids.
enum StateIndex {
    Narrow(FxHashMap<u64, u32>, Vec<u32>),
    Packed(FxHashMap<u128, u32>, Vec<u32>),
    Wide(FxHashMap<Box<[u32]>, u32>),
}

fn insert_or_get<K: std::hash::Hash + Eq>(map: &mut FxHashMap<K, u32>, key: K, fresh: u32) -> (u32, bool) {
    match map.entry(key) {
        std::collections::hash_map::Entry::Occupied(e) => (*e.get(), false),
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(fresh);
            (fresh, true)
        }
    }
}

impl StateIndex {
    fn new(widths: &[u32]) -> Self {
        let mut shifts = Vec::with_capacity(widths.len());
        let mut total = 0;
        for w in widths {
            shifts.push(total);
            total += w;
        }
        if total <= 64 {
            StateIndex::Narrow(FxHashMap::default(), shifts)
        } else if total <= 128 {
            StateIndex::Packed(FxHashMap::default(), shifts)
        } else {
            StateIndex::Wide(FxHashMap::default())
        }
    }

    /// Returns the id of `key`, inserting `fresh` if it is new.
    fn get_or_insert(&mut self, key: &[u32], fresh: u32) -> (u32, bool) {
        match self {
            StateIndex::Narrow(map, shifts) => {
                let packed = key.iter().zip(shifts.iter()).fold(0u64, |acc, (v, s)| acc | (*v as u64) << s);
                insert_or_get(map, packed, fresh)
            }
            StateIndex::Packed(map, shifts) => {
                let packed = key.iter().zip(shifts.iter()).fold(0u128, |acc, (v, s)| acc | (*v as u128) << s);
                insert_or_get(map, packed, fresh)
            }
            StateIndex::Wide(map) => match map.get(key) {
                Some(&id) => (id, false),
                None => {
                    map.insert(key.into(), fresh);
                    (fresh, true)
                }
            },
        }
    }
}

fn bit_width(max: u32) -> u32 {
    32 - max.leading_zeros()
}

/// Interning table for (lower, upper) bound pairs.
#[derive(Default)]
struct BoundTable {
    pairs: Vec<(Prob, Prob)>,
    index: FxHashMap<(Prob, Prob), u32>,
    sums: FxHashMap<Vec<u32>, u32>,
}

impl BoundTable {
    fn intern(&mut self, lo: Prob, hi: Prob) -> u32 {
        if let Some(&i) = self.index.get(&(lo.clone(), hi.clone())) {
            return i;
        }
        let i = self.pairs.len() as u32;
        self.pairs.push((lo.clone(), hi.clone()));
        self.index.insert((lo, hi), i);
        i
    }

    /// Bounds of several merged outcomes: lowers and uppers add, uppers cap at 1.
    fn sum(&mut self, ids: &[u32]) -> u32 {
        if let [single] = ids {
            return *single;
        }
        let mut key = ids.to_vec();
        key.sort_unstable();
        if let Some(&i) = self.sums.get(&key) {
            return i;
        }
        let mut lo = Prob::zero();
        let mut hi = Prob::zero();
        for &i in &key {
            lo += &self.pairs[i as usize].0;
            hi += &self.pairs[i as usize].1;
        }
        if hi > Prob::one() {
            hi = Prob::one();
        }
        let i = self.intern(lo, hi);
        self.sums.insert(key, i);
        i
    }
}

struct EdgePlan {
    guard: ClockConstraint,
    action: u32,
    /// (reset mask, target location, bound id) per outcome.
    outcomes: Vec<(u64, u32, u32)>,
}

/// Locations from which some target location is reachable in the untimed graph.
fn may_reach_target(m: &Ipta, target: &[ClockFormula], left: Option<&[ClockFormula]>) -> Vec<bool> {
    let n = m.locations.len();
    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
    for e in &m.edges {
        for o in e.distribution.outcomes() {
            preds[o.target.index()].push(e.source.0);
        }
    }
    let mut ok = vec![false; n];
    let mut queue = VecDeque::new();
    for (l, f) in target.iter().enumerate() {
        if *f != ClockFormula::Const(false) {
            ok[l] = true;
            queue.push_back(l);
        }
    }
    while let Some(l) = queue.pop_front() {
        for &p in &preds[l] {
            let p = p as usize;
            let passable = left.is_none_or(|lf| lf[p] != ClockFormula::Const(false));
            if !ok[p] && passable {
                ok[p] = true;
                queue.push_back(p);
            }
        }
    }
    ok
}

/// Builds the reachable integer-time state space of `m`.
///
/// With a query, the target and until-left predicates are evaluated on every
/// state and the formula clock is appended as an extra clock that starts at
/// zero and is never reset.
pub fn build_imdp(
    m: &Ipta,
    q: Option<&CompiledQuery>,
    opts: &BuildOptions,
) -> Result<Imdp, ExploreError> {
    let ceil = ceilings(m, q);
    let nsys = m.clocks.len();
    let nclocks = ceil.max_constant.len();
    if nclocks > crate::model::clock::MAX_CLOCKS {
        return Err(ExploreError::TooManyClocks(nclocks));
    }
    let caps: Vec<u32> = (0..nclocks).map(|i| ceil.cap(i)).collect();
    let nlocs = m.locations.len();

    let mut action_names: Vec<String> = Vec::new();
    let mut action_index: FxHashMap<&Action, u32> = FxHashMap::default();
    let mut bounds = BoundTable::default();
    let mut plans: Vec<Vec<EdgePlan>> = (0..nlocs).map(|_| Vec::new()).collect();
    for e in &m.edges {
        let a = *action_index.entry(&e.action).or_insert_with(|| {
            action_names.push(e.action.to_string());
            (action_names.len() - 1) as u32
        });
        let outcomes = e
            .distribution
            .entries()
            .iter()
            .map(|en| {
                (
                    en.outcome.resets.0,
                    en.outcome.target.0,
                    bounds.intern(en.lower.clone(), en.upper.clone()),
                )
            })
            .collect();
        plans[e.source.index()].push(EdgePlan {
            guard: e.guard.clone(),
            action: a,
            outcomes,
        });
    }
    let point = bounds.intern(Prob::one(), Prob::one());

    let reduce = opts.reduce && q.is_some();
    let live_locs = match (reduce, q) {
        (true, Some(q)) => may_reach_target(m, &q.target, q.left.as_deref()),
        _ => vec![true; nlocs],
    };

    let mut widths = vec![bit_width(nlocs.saturating_sub(1) as u32)];
    widths.extend(caps.iter().map(|&c| bit_width(c)));
    let mut index = StateIndex::new(&widths);

    let mut imdp = Imdp {
        clock_names: {
            let mut names = m.clocks.clone();
            if let Some(z) = q.and_then(|q| q.formula_clock.clone()) {
                names.push(z);
            }
            names
        },
        variable_names: m.variables.clone(),
        location_values: m.locations.iter().map(|l| l.values.clone()).collect(),
        actions: action_names,
        strict_constraints: m.has_strict_constraints(),
        ..Imdp::default()
    };
    if let Some(q) = q {
        let mut atoms = Vec::new();
        for f in q.target.iter().chain(q.left.iter().flatten()) {
            f.atoms(&mut atoms);
        }
        imdp.strict_constraints |= atoms.iter().any(|a| a.op().is_strict());
    }
    let mut target_bits = Vec::new();
    let mut left_bits = Vec::new();

    let mut key = vec![0u32; nclocks + 1];
    // Adds a state if new; returns its id.
    let mut add_state = |loc: u32,
                         clocks: &[u32],
                         imdp: &mut Imdp,
                         key: &mut Vec<u32>|
     -> Result<u32, ExploreError> {
        key[0] = loc;
        key[1..].copy_from_slice(clocks);
        let fresh = imdp.state_loc.len() as u32;
        let (id, new) = index.get_or_insert(key, fresh);
        if new {
            if imdp.state_loc.len() >= opts.state_limit {
                return Err(ExploreError::StateLimit {
                    limit: opts.state_limit,
                });
            }
            imdp.state_loc.push(loc);
            imdp.state_clocks.extend_from_slice(clocks);
        }
        Ok(id)
    };

    let zero = vec![0u32; nclocks];
    for &l in &m.initial {
        if m.invariants[l.index()].satisfied_by(&zero) {
            let id = add_state(l.0, &zero, &mut imdp, &mut key)?;
            if !imdp.initial.contains(&id) {
                imdp.initial.push(id);
            }
        }
    }

    let mut v = vec![0u32; nclocks];
    let mut succ = vec![0u32; nclocks];
    // (successor, bound id) per outcome of the edge being expanded.
    let mut outcomes: Vec<(u32, u32)> = Vec::new();
    let mut merged: Vec<u32> = Vec::new();
    imdp.choice_start.push(0);
    imdp.trans_start.push(0);
    // States are expanded in id order, which is breadth-first discovery order.
    let mut s = 0usize;
    while s < imdp.state_loc.len() {
        let loc = imdp.state_loc[s] as usize;
        v.copy_from_slice(imdp.clocks_of(s));
        s += 1;
        let (is_target, in_left) = match q {
            Some(q) => (
                q.target[loc].holds(&v),
                q.left.as_ref().is_none_or(|l| l[loc].holds(&v)),
            ),
            None => (false, true),
        };
        if q.is_some() {
            target_bits.push(is_target);
            left_bits.push(in_left);
        }
        let absorb = reduce && (is_target || !in_left || !live_locs[loc]);
        imdp.absorbing.push(absorb);
        if absorb {
            imdp.choice_start.push(imdp.choice_action.len() as u32);
            continue;
        }

        // Time step.
        for i in 0..nclocks {
            succ[i] = (v[i] + 1).min(caps[i]);
        }
        if m.invariants[loc].satisfied_by(&succ) {
            let t = add_state(loc as u32, &succ, &mut imdp, &mut key)?;
            imdp.choice_action.push(TICK);
            imdp.trans_target.push(t);
            imdp.trans_bound.push(point);
            imdp.trans_start.push(imdp.trans_target.len() as u32);
        }

        // Discrete steps.
        'edges: for plan in &plans[loc] {
            if !plan.guard.satisfied_by(&v) {
                continue;
            }
            outcomes.clear();
            for &(resets, target, bound) in &plan.outcomes {
                for i in 0..nclocks {
                    let reset = i < nsys && resets & (1u64 << i) != 0;
                    succ[i] = if reset { 0 } else { v[i] };
                }
                if !m.invariants[target as usize].satisfied_by(&succ) {
                    continue 'edges;
                }
                let t = add_state(target, &succ, &mut imdp, &mut key)?;
                outcomes.push((t, bound));
            }
            imdp.choice_action.push(plan.action);
            for i in 0..outcomes.len() {
                let t = outcomes[i].0;
                if outcomes[..i].iter().any(|o| o.0 == t) {
                    continue;
                }
                merged.clear();
                merged.extend(outcomes[i..].iter().filter(|o| o.0 == t).map(|o| o.1));
                imdp.trans_target.push(t);
                imdp.trans_bound.push(bounds.sum(&merged));
            }
            imdp.trans_start.push(imdp.trans_target.len() as u32);
        }
        let end = imdp.choice_action.len() as u32;
        if end == *imdp.choice_start.last().unwrap() {
            imdp.timelocks.push(s as u32 - 1);
        }
        imdp.choice_start.push(end);
    }

    if q.is_some() {
        imdp.target = Some(target_bits);
        imdp.left = Some(left_bits);
    }
    let mut label_names: BTreeSet<&String> = BTreeSet::new();
    for ls in &m.labels {
        label_names.extend(ls.iter());
    }
    imdp.label_names = label_names.into_iter().cloned().collect();
    imdp.location_labels = m
        .labels
        .iter()
        .map(|ls| {
            ls.iter()
                .map(|n| imdp.label_names.iter().position(|x| x == n).unwrap() as u32)
                .collect()
        })
        .collect();
    imdp.bounds_f64 = bounds
        .pairs
        .iter()
        .map(|(l, u)| (prob_to_f64(l), prob_to_f64(u)))
        .collect();
    imdp.bounds = bounds.pairs;
    Ok(imdp)
}
