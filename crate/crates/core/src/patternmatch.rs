//! Matching pattern diagrams against walks inside Morse sets.
//!
//! The matcher works on the product of a Morse set's domains with the
//! down-sets of the pattern diagram. Crossing an edge consumes some of the
//! edge's extremum events: every forced event of a pattern variable must be
//! consumed (a hard reversal the data has to contain), optional events may
//! be consumed or skipped, and events of variables the pattern does not
//! mention are free. Consuming an event requires it to be available: all of
//! its pattern predecessors already consumed, respecting per-gene chain
//! order.
//!
//! A cyclic match is a simple cycle of domains (no domain revisited within
//! one period) that consumes the whole pattern exactly once per period; the
//! consumed sequence is then a single linear extension read from the period
//! boundary, and every rotation is covered by anchoring the search at each
//! domain of the set in turn. Restricting witnesses to simple cycles is
//! what makes the worked rejection example reject: on walks free to revisit
//! domains, optional events could be consumed on one pass and skipped on
//! another. An open (path) match is a product path from an empty down-set
//! to the full one, with no simplicity restriction.

use crate::dynamics::{EdgeEvent, MorseSet, Stg};
use crate::error::{Error, Result};
use crate::network::RegulatoryNetwork;
use crate::timeseries::{ExtremeKind, PatternDiagram};
use serde::Serialize;
use std::collections::HashMap;

/// Restriction of an STG to one Morse set, with per-edge event options.
#[derive(Debug, Clone)]
pub struct EventLabeledSubgraph {
    /// Global domain indices, ascending.
    pub domains: Vec<u32>,
    /// Per local domain: coordinates and `I`/`D`/`*` label string.
    pub coords: Vec<Vec<u8>>,
    pub labels: Vec<String>,
    /// Edges as (local from, local to, events).
    pub edges: Vec<(u32, u32, Vec<EdgeEvent>)>,
    pub n_vars: usize,
}

impl EventLabeledSubgraph {
    pub fn local_index(&self, global: u32) -> Option<u32> {
        self.domains.binary_search(&global).ok().map(|i| i as u32)
    }

    pub fn events_between(&self, from: u32, to: u32) -> Option<&[EdgeEvent]> {
        self.edges
            .iter()
            .find(|&&(u, v, _)| u == from && v == to)
            .map(|(_, _, e)| e.as_slice())
    }
}

/// Restrict `stg` to one Morse set and attach edge events.
pub fn label_events(stg: &Stg, set: &MorseSet) -> EventLabeledSubgraph {
    let domains = set.domains.clone();
    let local: HashMap<u32, u32> = domains
        .iter()
        .enumerate()
        .map(|(i, &d)| (d, i as u32))
        .collect();
    let mut edges = Vec::new();
    for &d in &domains {
        for v in stg.successors(d) {
            if let Some(&lv) = local.get(&v) {
                edges.push((local[&d], lv, stg.edge_events(d, v)));
            }
        }
    }
    edges.sort_by_key(|&(u, v, _)| (u, v));
    EventLabeledSubgraph {
        coords: domains.iter().map(|&d| stg.coords(d)).collect(),
        labels: domains.iter().map(|&d| stg.label_string(d)).collect(),
        edges,
        domains,
        n_vars: stg.n_vars(),
    }
}

/// Outcome of a cycle or path match.
#[derive(Debug, Clone, Serialize)]
pub struct MatchResult {
    pub matched: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    /// Walk through the Morse set as domain coordinate vectors. Closed for
    /// cycle matches (first and last entries coincide).
    pub walk: Vec<Vec<u8>>,
    /// The matched linear extension: pattern event indices in consumed
    /// order, starting at the period boundary for cycle matches.
    pub extension: Vec<usize>,
}

impl MatchResult {
    fn no() -> MatchResult {
        MatchResult {
            matched: false,
            witness: None,
        }
    }
}

/// Pattern compiled against a network: per event its variable, kind and
/// predecessor mask.
struct Compiled {
    var: Vec<usize>,
    kind: Vec<ExtremeKind>,
    preds: Vec<u64>,
    full: u64,
}

fn compile(net: &RegulatoryNetwork, pd: &PatternDiagram) -> Result<Compiled> {
    let mut var = Vec::with_capacity(pd.len());
    for e in pd.events() {
        let v = net
            .node_index(&e.gene)
            .map_err(|_| Error::UnknownPatternVariable(e.gene.clone()))?;
        var.push(v);
    }
    let kind = pd.events().iter().map(|e| e.kind).collect();
    let preds = (0..pd.len()).map(|e| pd.preds(e)).collect();
    let full = if pd.len() == 64 {
        u64::MAX
    } else {
        (1u64 << pd.len()) - 1
    };
    Ok(Compiled {
        var,
        kind,
        preds,
        full,
    })
}

/// One way of traversing an edge: the resulting down-set, the events
/// consumed in order, and the position in `consumed` right after which the
/// pattern wrapped (cycle mode only).
#[derive(Debug, Clone, PartialEq, Eq)]
struct Traversal {
    mask: u64,
    consumed: Vec<usize>,
    wrap: Option<usize>,
}

/// All ways to traverse an edge from down-set `start`: consume every forced
/// event of a pattern variable, any subset of the optional ones, in any
/// order consistent with availability. `wrapping` resets a completed
/// pattern to the empty down-set (cycle mode).
fn traversals(
    events: &[EdgeEvent],
    pattern_vars: &[bool],
    c: &Compiled,
    start: u64,
    wrapping: bool,
) -> Vec<Traversal> {
    let relevant: Vec<&EdgeEvent> = events.iter().filter(|e| pattern_vars[e.var]).collect();
    let mut out: Vec<Traversal> = Vec::new();
    let mut consumed_order: Vec<usize> = Vec::new();

    fn rec(
        relevant: &[&EdgeEvent],
        used: u32,
        mask: u64,
        wrap: Option<usize>,
        c: &Compiled,
        wrapping: bool,
        consumed_order: &mut Vec<usize>,
        out: &mut Vec<Traversal>,
    ) {
        // May stop once every forced event has been consumed.
        if relevant
            .iter()
            .enumerate()
            .all(|(i, e)| !e.forced || used >> i & 1 == 1)
        {
            let t = Traversal {
                mask,
                consumed: consumed_order.clone(),
                wrap,
            };
            if !out.contains(&t) {
                out.push(t);
            }
        }
        for (i, e) in relevant.iter().enumerate() {
            if used >> i & 1 == 1 {
                continue;
            }
            // Pattern events this edge event can consume: same variable and
            // kind, not yet consumed, all predecessors consumed.
            for p in 0..c.var.len() {
                if c.var[p] == e.var
                    && c.kind[p] == e.kind
                    && mask >> p & 1 == 0
                    && c.preds[p] & !mask == 0
                {
                    let mut m2 = mask | 1 << p;
                    let mut w2 = wrap;
                    if m2 == c.full && wrapping {
                        debug_assert!(w2.is_none(), "double wrap on one edge");
                        w2 = Some(consumed_order.len() + 1);
                        m2 = 0;
                    }
                    consumed_order.push(p);
                    rec(relevant, used | 1 << i, m2, w2, c, wrapping, consumed_order, out);
                    consumed_order.pop();
                }
            }
        }
    }
    rec(
        &relevant,
        0,
        start,
        None,
        c,
        wrapping,
        &mut consumed_order,
        &mut out,
    );
    out
}

fn pattern_var_flags(net: &RegulatoryNetwork, c: &Compiled) -> Vec<bool> {
    let mut flags = vec![false; net.node_count()];
    for &v in &c.var {
        flags[v] = true;
    }
    flags
}

/// Step budget for the simple-cycle search; exceeding it is an error rather
/// than a silent wrong answer.
const CYCLE_SEARCH_BUDGET: u64 = 50_000_000;

struct CycleSearch<'a> {
    g: &'a EventLabeledSubgraph,
    c: &'a Compiled,
    flags: &'a [bool],
    /// Outgoing edges per local domain as indices into `g.edges`.
    out: Vec<Vec<usize>>,
    budget: u64,
}

impl<'a> CycleSearch<'a> {
    /// DFS for a simple cycle through `start` that consumes the pattern from
    /// the empty down-set to full exactly at the closing edge.
    fn from(&mut self, start: u32) -> Result<Option<Witness>> {
        let words = (self.g.domains.len() + 63) / 64;
        let mut visited = vec![0u64; words];
        visited[start as usize / 64] |= 1 << (start as usize % 64);
        let mut walk: Vec<u32> = vec![start];
        let mut consumed: Vec<usize> = Vec::new();
        let found = self.dfs(start, start, 0, &mut visited, &mut walk, &mut consumed)?;
        if found {
            let mut coords: Vec<Vec<u8>> = walk
                .iter()
                .map(|&d| self.g.coords[d as usize].clone())
                .collect();
            coords.push(self.g.coords[start as usize].clone());
            Ok(Some(Witness {
                walk: coords,
                extension: consumed.clone(),
            }))
        } else {
            Ok(None)
        }
    }

    fn dfs(
        &mut self,
        start: u32,
        d: u32,
        mask: u64,
        visited: &mut [u64],
        walk: &mut Vec<u32>,
        consumed: &mut Vec<usize>,
    ) -> Result<bool> {
        if self.budget == 0 {
            return Err(Error::Spec(
                "pattern-match cycle search exceeded its step budget".into(),
            ));
        }
        self.budget -= 1;
        for &eidx in &self.out[d as usize].clone() {
            let (_, v, ref events) = self.g.edges[eidx];
            let closing = v == start;
            if !closing {
                let w = (v as usize / 64, v as usize % 64);
                if visited[w.0] >> w.1 & 1 == 1 {
                    continue;
                }
            }
            for t in traversals(events, self.flags, self.c, mask, false) {
                if closing {
                    if t.mask == self.c.full {
                        consumed.extend_from_slice(&t.consumed);
                        return Ok(true);
                    }
                    continue;
                }
                let w = (v as usize / 64, v as usize % 64);
                visited[w.0] |= 1 << w.1;
                walk.push(v);
                let before = consumed.len();
                consumed.extend_from_slice(&t.consumed);
                if self.dfs(start, v, t.mask, visited, walk, consumed)? {
                    return Ok(true);
                }
                consumed.truncate(before);
                walk.pop();
                visited[w.0] &= !(1u64 << w.1);
            }
        }
        Ok(false)
    }
}

/// Does a simple cycle in the Morse set realize the pattern cyclically,
/// consuming each pattern event exactly once per period?
pub fn match_cycle(
    net: &RegulatoryNetwork,
    g: &EventLabeledSubgraph,
    pd: &PatternDiagram,
) -> Result<MatchResult> {
    let c = compile(net, pd)?;
    if pd.is_empty() {
        // A cyclic reading needs at least one event to anchor a period.
        return Ok(MatchResult::no());
    }
    let flags = pattern_var_flags(net, &c);

    // Fast reject: every pattern (variable, kind) must be offered somewhere.
    for p in 0..c.var.len() {
        let offered = g.edges.iter().any(|(_, _, events)| {
            events
                .iter()
                .any(|e| e.var == c.var[p] && e.kind == c.kind[p])
        });
        if !offered {
            return Ok(MatchResult::no());
        }
    }

    let mut out: Vec<Vec<usize>> = vec![Vec::new(); g.domains.len()];
    for (i, (u, _, _)) in g.edges.iter().enumerate() {
        out[*u as usize].push(i);
    }
    let mut search = CycleSearch {
        g,
        c: &c,
        flags: &flags,
        out,
        budget: CYCLE_SEARCH_BUDGET,
    };
    // Anchor the period boundary at every domain in turn; that covers every
    // rotation of every linear extension.
    for start in 0..g.domains.len() as u32 {
        if let Some(witness) = search.from(start)? {
            return Ok(MatchResult {
                matched: true,
                witness: Some(witness),
            });
        }
    }
    Ok(MatchResult::no())
}

/// Does an open walk in the Morse set realize the pattern linearly?
pub fn match_path(
    net: &RegulatoryNetwork,
    g: &EventLabeledSubgraph,
    pd: &PatternDiagram,
) -> Result<MatchResult> {
    let c = compile(net, pd)?;
    if pd.is_empty() {
        return Ok(MatchResult {
            matched: true,
            witness: Some(Witness {
                walk: g.coords.first().map(|c| vec![c.clone()]).unwrap_or_default(),
                extension: Vec::new(),
            }),
        });
    }
    let flags = pattern_var_flags(net, &c);
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); g.domains.len()];
    for (i, (u, _, _)) in g.edges.iter().enumerate() {
        out[*u as usize].push(i);
    }

    // Lazy BFS over (domain, down-set) states.
    #[allow(clippy::type_complexity)]
    let mut parent: HashMap<(u32, u64), ((u32, u64), Vec<usize>)> = HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    for d in 0..g.domains.len() as u32 {
        let s = (d, 0u64);
        if parent.insert(s, (s, Vec::new())).is_none() {
            queue.push_back(s);
        }
    }
    let mut target: Option<(u32, u64)> = None;
    'bfs: while let Some((d, mask)) = queue.pop_front() {
        if mask == c.full {
            target = Some((d, mask));
            break 'bfs;
        }
        for &eidx in &out[d as usize] {
            let (_, v, ref events) = g.edges[eidx];
            for t in traversals(events, &flags, &c, mask, false) {
                let next = (v, t.mask);
                if !parent.contains_key(&next) {
                    parent.insert(next, ((d, mask), t.consumed.clone()));
                    queue.push_back(next);
                }
            }
        }
    }
    let Some(end) = target else {
        return Ok(MatchResult::no());
    };
    let mut states = Vec::new();
    let mut consumed_rev: Vec<Vec<usize>> = Vec::new();
    let mut cur = end;
    loop {
        let (prev, consumed) = parent[&cur].clone();
        if prev == cur {
            states.push(cur);
            break;
        }
        states.push(cur);
        consumed_rev.push(consumed);
        cur = prev;
    }
    states.reverse();
    consumed_rev.reverse();
    let walk = states
        .iter()
        .map(|&(d, _)| g.coords[d as usize].clone())
        .collect();
    let extension = consumed_rev.into_iter().flatten().collect();
    Ok(MatchResult {
        matched: true,
        witness: Some(Witness { walk, extension }),
    })
}
