//! Exact search for a label renaming that makes one machine identical to
//! another.
//!
//! A renaming is a bijection over state labels plus, for every state pair,
//! a bijection over outcome labels. Because a state's outcomes are unique,
//! the outcome bijection exists iff both states reach the same multiset of
//! (mapped) targets, so the search only has to find a state bijection that
//! preserves the edge-multiplicity matrix and the initial state. It is a
//! backtracking search in VF2 style with degree and self-loop pruning.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::fsm::{Fsm, Outcome, StateLabel};

pub const MAX_STATES: usize = 64;
pub const MAX_SEARCH_NODES: u64 = 10_000_000;

/// Maps input labels (`b`) onto ground-truth labels (`a`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsmRenaming {
    pub states: BTreeMap<String, String>,
    /// Keyed by the input-side state label.
    pub outcomes: BTreeMap<String, BTreeMap<String, String>>,
}

impl FsmRenaming {
    pub fn is_identity(&self) -> bool {
        self.states.iter().all(|(k, v)| k == v)
            && self.outcomes.values().all(|m| m.iter().all(|(k, v)| k == v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RenamingSearch {
    Found(FsmRenaming),
    NotFound,
    /// The state cap or the node budget was exceeded before a decision.
    LimitExceeded,
}

/// Renaming of `b` onto `a`, if one exists within the search limits.
pub fn find_renaming(a: &Fsm, b: &Fsm) -> Option<FsmRenaming> {
    match search_renaming(a, b) {
        RenamingSearch::Found(r) => Some(r),
        _ => None,
    }
}

pub fn search_renaming(a: &Fsm, b: &Fsm) -> RenamingSearch {
    search_with_budget(a, b, MAX_SEARCH_NODES)
}

pub(crate) fn search_with_budget(a: &Fsm, b: &Fsm, budget: u64) -> RenamingSearch {
    if a.states.len() != b.states.len() || a.edge_count() != b.edge_count() {
        return RenamingSearch::NotFound;
    }
    if a.states.len() > MAX_STATES {
        return RenamingSearch::LimitExceeded;
    }
    let (Some(ga), Some(gb)) = (Graph::new(a), Graph::new(b)) else {
        return RenamingSearch::NotFound;
    };

    let order = gb.search_order();
    let mut search = Search {
        a: &ga,
        b: &gb,
        order: &order,
        b_to_a: vec![usize::MAX; gb.n],
        a_used: vec![false; ga.n],
        nodes: 0,
        budget,
    };
    match search.extend(0) {
        Step::Found => RenamingSearch::Found(build_renaming(a, b, &ga, &gb, &search.b_to_a)),
        Step::Dead => RenamingSearch::NotFound,
        Step::Exhausted => RenamingSearch::LimitExceeded,
    }
}

/// Rewrites `b` through the renaming: state names, targets, outcomes and the
/// initial state. Labels without an entry are kept.
pub fn apply_renaming(b: &Fsm, renaming: &FsmRenaming) -> Fsm {
    let state = |l: &StateLabel| -> StateLabel {
        renaming
            .states
            .get(l.as_str())
            .map(|s| StateLabel::new(s.as_str()))
            .unwrap_or_else(|| l.clone())
    };
    let mut out = b.clone();
    out.initial_state = state(&b.initial_state);
    for node in &mut out.states {
        let outcome_map = renaming.outcomes.get(node.name.as_str());
        for t in &mut node.transitions {
            if let Some(o) = outcome_map.and_then(|m| m.get(t.outcome.as_str())) {
                t.outcome = Outcome::new(o.as_str());
            }
            t.to = state(&t.to);
        }
        node.name = state(&node.name);
    }
    out
}

struct Graph<'f> {
    n: usize,
    labels: Vec<&'f str>,
    index: HashMap<&'f str, usize>,
    adj: Vec<Vec<u32>>,
    out_deg: Vec<u32>,
    in_deg: Vec<u32>,
    initial: usize,
    /// Successor lists in declaration order.
    succ: Vec<Vec<usize>>,
}

impl<'f> Graph<'f> {
    fn new(fsm: &'f Fsm) -> Option<Self> {
        let n = fsm.states.len();
        let labels: Vec<&str> = fsm.states.iter().map(|s| s.name.as_str()).collect();
        let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        let initial = *index.get(fsm.initial_state.as_str())?;
        let mut adj = vec![vec![0u32; n]; n];
        let mut out_deg = vec![0u32; n];
        let mut in_deg = vec![0u32; n];
        let mut succ = vec![Vec::new(); n];
        for (i, s) in fsm.states.iter().enumerate() {
            for t in &s.transitions {
                let j = *index.get(t.to.as_str())?;
                adj[i][j] += 1;
                out_deg[i] += 1;
                in_deg[j] += 1;
                succ[i].push(j);
            }
        }
        Some(Self {
            n,
            labels,
            index,
            adj,
            out_deg,
            in_deg,
            initial,
            succ,
        })
    }

    fn signature(&self, i: usize) -> (u32, u32, u32) {
        (self.out_deg[i], self.in_deg[i], self.adj[i][i])
    }

    /// Breadth-first from the initial state, then the unreached states in
    /// declaration order, so each assigned state tends to touch earlier ones.
    fn search_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        let mut next_root = 0;
        loop {
            while let Some(i) = queue.pop_front() {
                order.push(i);
                for &j in &self.succ[i] {
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
            while next_root < self.n && seen[next_root] {
                next_root += 1;
            }
            if next_root == self.n {
                break;
            }
            seen[next_root] = true;
            queue.push_back(next_root);
        }
        order
    }
}

enum Step {
    Found,
    Dead,
    Exhausted,
}

struct Search<'s, 'f> {
    a: &'s Graph<'f>,
    b: &'s Graph<'f>,
    order: &'s [usize],
    b_to_a: Vec<usize>,
    a_used: Vec<bool>,
    nodes: u64,
    budget: u64,
}

impl Search<'_, '_> {
    fn extend(&mut self, depth: usize) -> Step {
        if depth == self.order.len() {
            return Step::Found;
        }
        let s = self.order[depth];
        for t in self.candidates(s) {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Step::Exhausted;
            }
            if !self.consistent(depth, s, t) {
                continue;
            }
            self.b_to_a[s] = t;
            self.a_used[t] = true;
            match self.extend(depth + 1) {
                Step::Dead => {}
                done => return done,
            }
            self.b_to_a[s] = usize::MAX;
            self.a_used[t] = false;
        }
        Step::Dead
    }

    /// Unused states of `a` with a matching signature; a same-label state
    /// first so identical machines map to themselves.
    fn candidates(&self, s: usize) -> Vec<usize> {
        let (a, b) = (self.a, self.b);
        if s == b.initial {
            return if self.a_used[a.initial] { Vec::new() } else { vec![a.initial] };
        }
        let sig = b.signature(s);
        let mut out: Vec<usize> = (0..a.n)
            .filter(|&t| !self.a_used[t] && t != a.initial && a.signature(t) == sig)
            .collect();
        if let Some(&same) = a.index.get(b.labels[s]) {
            if let Some(pos) = out.iter().position(|&t| t == same) {
                out.remove(pos);
                out.insert(0, same);
            }
        }
        out
    }

    fn consistent(&self, depth: usize, s: usize, t: usize) -> bool {
        let (a, b) = (self.a, self.b);
        if a.signature(t) != b.signature(s) {
            return false;
        }
        self.order[..depth].iter().all(|&u| {
            let m = self.b_to_a[u];
            b.adj[s][u] == a.adj[t][m] && b.adj[u][s] == a.adj[m][t]
        })
    }
}

fn build_renaming(a: &Fsm, b: &Fsm, ga: &Graph, gb: &Graph, b_to_a: &[usize]) -> FsmRenaming {
    let mut renaming = FsmRenaming::default();
    for (i, &j) in b_to_a.iter().enumerate() {
        renaming.states.insert(gb.labels[i].to_owned(), ga.labels[j].to_owned());
    }
    for (i, b_state) in b.states.iter().enumerate() {
        let a_state = &a.states[b_to_a[i]];
        // Group outcomes by (mapped) target, then pair equal labels first and
        // the rest in sorted order.
        let mut by_target: BTreeMap<usize, (Vec<&str>, Vec<&str>)> = BTreeMap::new();
        for t in &b_state.transitions {
            let target = b_to_a[gb.index[t.to.as_str()]];
            by_target.entry(target).or_default().0.push(t.outcome.as_str());
        }
        for t in &a_state.transitions {
            by_target.entry(ga.index[t.to.as_str()]).or_default().1.push(t.outcome.as_str());
        }
        let mut map = BTreeMap::new();
        for (_, (mut from_b, mut from_a)) in by_target {
            from_b.sort_unstable();
            from_a.sort_unstable();
            let common: Vec<&str> = from_b.iter().copied().filter(|o| from_a.contains(o)).collect();
            for o in &common {
                map.insert(o.to_string(), o.to_string());
            }
            from_b.retain(|o| !common.contains(o));
            from_a.retain(|o| !common.contains(o));
            for (ob, oa) in from_b.iter().zip(&from_a) {
                map.insert(ob.to_string(), oa.to_string());
            }
        }
        if !map.is_empty() {
            renaming.outcomes.insert(b_state.name.to_string(), map);
        }
    }
    renaming
}
