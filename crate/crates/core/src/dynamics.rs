//! State transition graphs and Morse graphs for one parameter-graph node.
//!
//! Thresholds cut phase space into rectangular domains, one integer
//! coordinate per variable (`0..=out_degree`). For a fixed parameter the
//! production band of every node is constant on each domain, so each
//! variable flows monotonically toward the band of its target value:
//! strictly up, strictly down, or toward a target inside the current band.
//! Crossing edges connect adjacent domains along the flow; a domain whose
//! every coordinate is attracting gets a self-edge.
//!
//! The Morse graph is the condensation of the state transition graph
//! restricted to recurrent components, ordered by reachability and
//! annotated: a singleton with a self-edge is a fixed point, a cycle
//! spanning at least two coordinate values in every dimension is a full
//! cycle, anything else is a partial cycle over the spanning variables.

use crate::error::{Error, Result};
use crate::network::RegulatoryNetwork;
use crate::paramgraph::ParameterGraph;
use crate::timeseries::ExtremeKind;
use serde::{Deserialize, Serialize};

/// Per-domain, per-variable flow direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignLabel {
    /// All flow in this coordinate points up (`I`).
    Increasing,
    /// All flow points down (`D`).
    Decreasing,
    /// The target lies inside the domain; both continuations occur (`*`).
    Both,
}

impl SignLabel {
    pub fn glyph(self) -> char {
        match self {
            SignLabel::Increasing => 'I',
            SignLabel::Decreasing => 'D',
            SignLabel::Both => '*',
        }
    }
}

/// One extremum event carried by a state-transition-graph edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEvent {
    pub var: usize,
    pub kind: ExtremeKind,
    /// Forced events come from a hard I-to-D or D-to-I reversal; optional
    /// ones involve a `*` endpoint and may or may not occur.
    pub forced: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stg {
    /// Domain coordinate radix per variable: out-degree + 1.
    radices: Vec<u8>,
    n_vars: usize,
    n_domains: u32,
    /// Flow direction per (domain, variable): -1 down, 0 attracting, +1 up.
    dirs: Vec<i8>,
    /// Crossing edges (u, v), lexicographically sorted.
    edges: Vec<(u32, u32)>,
    /// Domains whose flow is attracting in every coordinate.
    self_edges: Vec<u32>,
    /// Whether each variable regulates itself (self-edges may carry events
    /// for the moving coordinate only in that case).
    self_regulating: Vec<bool>,
}

impl Stg {
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_domains(&self) -> u32 {
        self.n_domains
    }

    pub fn radices(&self) -> &[u8] {
        &self.radices
    }

    pub fn coords(&self, domain: u32) -> Vec<u8> {
        let mut rest = domain;
        self.radices
            .iter()
            .map(|&r| {
                let c = (rest % r as u32) as u8;
                rest /= r as u32;
                c
            })
            .collect()
    }

    pub fn domain_index(&self, coords: &[u8]) -> u32 {
        let mut idx = 0u32;
        for (&c, &r) in coords.iter().zip(&self.radices).rev() {
            idx = idx * r as u32 + c as u32;
        }
        idx
    }

    pub fn direction(&self, domain: u32, var: usize) -> i8 {
        self.dirs[domain as usize * self.n_vars + var]
    }

    pub fn sign_label(&self, domain: u32, var: usize) -> SignLabel {
        match self.direction(domain, var) {
            1 => SignLabel::Increasing,
            -1 => SignLabel::Decreasing,
            _ => SignLabel::Both,
        }
    }

    /// Label string like `D*D` for one domain.
    pub fn label_string(&self, domain: u32) -> String {
        (0..self.n_vars)
            .map(|v| self.sign_label(domain, v).glyph())
            .collect()
    }

    /// Crossing edges, sorted lexicographically.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn self_edges(&self) -> &[u32] {
        &self.self_edges
    }

    pub fn has_self_edge(&self, domain: u32) -> bool {
        self.self_edges.binary_search(&domain).is_ok()
    }

    /// Successors of a domain (crossing edges only).
    pub fn successors(&self, domain: u32) -> Vec<u32> {
        let start = self.edges.partition_point(|&(u, _)| u < domain);
        self.edges[start..]
            .iter()
            .take_while(|&&(u, _)| u == domain)
            .map(|&(_, v)| v)
            .collect()
    }

    /// The coordinate that changes across a crossing edge.
    pub fn moving_coordinate(&self, u: u32, v: u32) -> usize {
        let cu = self.coords(u);
        let cv = self.coords(v);
        (0..self.n_vars)
            .find(|&i| cu[i] != cv[i])
            .expect("edge endpoints differ in one coordinate")
    }

    /// Extremum events carried by the crossing edge `u -> v`.
    ///
    /// A variable reversing from increasing to decreasing emits a forced
    /// maximum (symmetrically a forced minimum); transitions through `*`
    /// emit optional events the matcher may consume or skip. The moving
    /// coordinate emits nothing unless it regulates itself.
    pub fn edge_events(&self, u: u32, v: u32) -> Vec<EdgeEvent> {
        let moving = self.moving_coordinate(u, v);
        let mut events = Vec::new();
        for var in 0..self.n_vars {
            if var == moving && !self.self_regulating[var] {
                continue;
            }
            let a = self.direction(u, var);
            let b = self.direction(v, var);
            // Maximum: I or * before, D or * after; forced only on a hard
            // reversal. Symmetric for minimum. A *-to-* pair offers both.
            if a >= 0 && b <= 0 {
                events.push(EdgeEvent {
                    var,
                    kind: ExtremeKind::Max,
                    forced: a == 1 && b == -1,
                });
            }
            if a <= 0 && b >= 0 {
                events.push(EdgeEvent {
                    var,
                    kind: ExtremeKind::Min,
                    forced: a == -1 && b == 1,
                });
            }
        }
        events
    }
}

/// Build the state transition graph for parameter index `k`.
pub fn build_stg(net: &RegulatoryNetwork, pg: &ParameterGraph, k: u64) -> Result<Stg> {
    let tuple = pg.index_to_tuple(k)?;
    let n = net.node_count();
    let radices: Vec<u8> = (0..n).map(|i| net.out_degree(i) as u8 + 1).collect();
    let n_domains: u32 = radices.iter().map(|&r| r as u32).product();

    // Per node: in-edge descriptors (source, activating, ascending threshold
    // position of this edge among the source's thresholds) and its band map.
    struct NodeCtx<'a> {
        ins: Vec<(usize, bool, u8)>,
        band: &'a [u8],
    }
    let mut ctx: Vec<NodeCtx> = Vec::with_capacity(n);
    for i in 0..n {
        let fg = pg.factor(i);
        let fidx = tuple[i] as usize;
        let band = fg.logic_band(fidx);
        let ins = net
            .in_edges(i)
            .iter()
            .map(|e| {
                let j = e.source;
                let slot = net.out_slot(j, i).expect("in-edge has an out slot");
                let pos = pg.factor(j).order(tuple[j] as usize).position_of_slot(slot) as u8;
                (j, e.sign == crate::network::Sign::Activating, pos)
            })
            .collect();
        ctx.push(NodeCtx { ins, band });
    }

    let mut dirs = vec![0i8; n_domains as usize * n];
    let mut coords = vec![0u8; n];
    for d in 0..n_domains {
        {
            let mut rest = d;
            for (c, &r) in coords.iter_mut().zip(&radices) {
                *c = (rest % r as u32) as u8;
                rest /= r as u32;
            }
        }
        for (i, c) in ctx.iter().enumerate() {
            let mut state = 0usize;
            for (bit, &(j, activating, pos)) in c.ins.iter().enumerate() {
                let above = coords[j] >= pos;
                if above == activating {
                    state |= 1 << bit;
                }
            }
            let band = c.band[state] as i8;
            let level = coords[i] as i8;
            dirs[d as usize * n + i] = (band - level).signum();
        }
    }

    // Strides for stepping one domain along a coordinate.
    let mut strides = vec![1u32; n];
    for i in 1..n {
        strides[i] = strides[i - 1] * radices[i - 1] as u32;
    }

    let mut edges = Vec::new();
    let mut self_edges = Vec::new();
    for d in 0..n_domains {
        let base = d as usize * n;
        let mut attracting = true;
        for i in 0..n {
            match dirs[base + i] {
                1 => {
                    attracting = false;
                    let up = d + strides[i];
                    if dirs[up as usize * n + i] == -1 {
                        return Err(Error::InternalConsistency(format!(
                            "opposing flow across the wall between domains {d} and {up} \
                             in coordinate {i}"
                        )));
                    }
                    edges.push((d, up));
                }
                -1 => {
                    attracting = false;
                    edges.push((d, d - strides[i]));
                }
                _ => {}
            }
        }
        if attracting {
            self_edges.push(d);
        }
    }
    edges.sort_unstable();

    let self_regulating = (0..n).map(|i| net.edge_sign(i, i).is_some()).collect();
    Ok(Stg {
        radices,
        n_vars: n,
        n_domains,
        dirs,
        edges,
        self_edges,
        self_regulating,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Annotation {
    /// Singleton attracting domain, identified by its coordinates.
    FixedPoint(Vec<u8>),
    /// Cycle crossing thresholds in every variable.
    FullCycle,
    /// Cycle crossing thresholds only in the listed variables.
    PartialCycle(Vec<usize>),
}

impl Annotation {
    pub fn display(&self, net: &RegulatoryNetwork) -> String {
        match self {
            Annotation::FixedPoint(coords) => {
                let digits: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
                format!("FP({})", digits.join(""))
            }
            Annotation::FullCycle => "FC".to_string(),
            Annotation::PartialCycle(vars) => {
                let names: Vec<&str> = vars.iter().map(|&v| net.name(v)).collect();
                format!("PC{{{}}}", names.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseSet {
    /// Domain indices, ascending.
    pub domains: Vec<u32>,
    pub annotation: Annotation,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseGraph {
    /// Morse sets in topological order (ancestors before descendants),
    /// ties broken by smallest domain index.
    pub sets: Vec<MorseSet>,
    /// Cover edges of the reachability order between Morse sets.
    pub edges: Vec<(usize, usize)>,
}

impl MorseGraph {
    pub fn stable_sets(&self) -> impl Iterator<Item = &MorseSet> {
        self.sets.iter().filter(|s| s.stable)
    }
}

/// Condense the STG to its annotated Morse graph.
pub fn morse_graph(stg: &Stg) -> MorseGraph {
    let n = stg.n_domains() as usize;
    // Iterative Tarjan SCC.
    let mut index = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut comp_of = vec![usize::MAX; n];
    let mut comps: Vec<Vec<u32>> = Vec::new();
    let mut counter = 0u32;

    #[derive(Clone, Copy)]
    struct Frame {
        v: u32,
        succ_pos: usize,
    }
    let mut call: Vec<Frame> = Vec::new();
    for root in 0..n as u32 {
        if index[root as usize] != u32::MAX {
            continue;
        }
        call.push(Frame {
            v: root,
            succ_pos: 0,
        });
        index[root as usize] = counter;
        low[root as usize] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root as usize] = true;
        while let Some(frame) = call.last_mut() {
            let v = frame.v;
            let succs = stg.successors(v);
            if frame.succ_pos < succs.len() {
                let w = succs[frame.succ_pos];
                frame.succ_pos += 1;
                if index[w as usize] == u32::MAX {
                    index[w as usize] = counter;
                    low[w as usize] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    call.push(Frame { v: w, succ_pos: 0 });
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
            } else {
                call.pop();
                if let Some(parent) = call.last() {
                    let p = parent.v as usize;
                    low[p] = low[p].min(low[v as usize]);
                }
                if low[v as usize] == index[v as usize] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w as usize] = false;
                        comp_of[w as usize] = comps.len();
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }

    // Tarjan emits components in reverse topological order.
    let n_comps = comps.len();
    let mut comp_succ: Vec<Vec<usize>> = vec![Vec::new(); n_comps];
    for &(u, v) in stg.edges() {
        let (cu, cv) = (comp_of[u as usize], comp_of[v as usize]);
        if cu != cv {
            comp_succ[cu].push(cv);
        }
    }
    for s in comp_succ.iter_mut() {
        s.sort_unstable();
        s.dedup();
    }

    let recurrent: Vec<bool> = comps
        .iter()
        .map(|c| c.len() > 1 || stg.has_self_edge(c[0]))
        .collect();

    // Reachability от each recurrent component to every other component.
    let mut reach: Vec<Vec<bool>> = vec![Vec::new(); n_comps];
    for c in 0..n_comps {
        if !recurrent[c] {
            continue;
        }
        let mut seen = vec![false; n_comps];
        let mut dfs = vec![c];
        while let Some(x) = dfs.pop() {
            for &y in &comp_succ[x] {
                if !seen[y] {
                    seen[y] = true;
                    dfs.push(y);
                }
            }
        }
        reach[c] = seen;
    }

    // Morse sets in topological order: reverse of Tarjan emission order,
    // ties already deterministic.
    let morse_comps: Vec<usize> = (0..n_comps).rev().filter(|&c| recurrent[c]).collect();
    let mut sets = Vec::with_capacity(morse_comps.len());
    for &c in &morse_comps {
        let domains = comps[c].clone();
        let stable = !morse_comps
            .iter()
            .any(|&c2| c2 != c && reach[c][c2]);
        let annotation = annotate(stg, &domains);
        sets.push(MorseSet {
            domains,
            annotation,
            stable,
        });
    }

    // Cover edges of the reachability order restricted to Morse sets.
    let mut edges = Vec::new();
    for (a_pos, &a) in morse_comps.iter().enumerate() {
        for (b_pos, &b) in morse_comps.iter().enumerate() {
            if a == b || !reach[a][b] {
                continue;
            }
            let has_mid = morse_comps
                .iter()
                .any(|&c| c != a && c != b && reach[a][c] && reach[c][b]);
            if !has_mid {
                edges.push((a_pos, b_pos));
            }
        }
    }
    edges.sort_unstable();
    MorseGraph { sets, edges }
}

fn annotate(stg: &Stg, domains: &[u32]) -> Annotation {
    if domains.len() == 1 && stg.has_self_edge(domains[0]) {
        return Annotation::FixedPoint(stg.coords(domains[0]));
    }
    let n = stg.n_vars();
    let mut lo = vec![u8::MAX; n];
    let mut hi = vec![0u8; n];
    for &d in domains {
        let c = stg.coords(d);
        for i in 0..n {
            lo[i] = lo[i].min(c[i]);
            hi[i] = hi[i].max(c[i]);
        }
    }
    let spanning: Vec<usize> = (0..n).filter(|&i| hi[i] > lo[i]).collect();
    if spanning.len() == n {
        Annotation::FullCycle
    } else {
        Annotation::PartialCycle(spanning)
    }
}

/// Coordinates of every stable fixed point in the Morse graph.
pub fn stable_fixed_points(mg: &MorseGraph) -> Vec<Vec<u8>> {
    mg.sets
        .iter()
        .filter(|s| s.stable)
        .filter_map(|s| match &s.annotation {
            Annotation::FixedPoint(c) => Some(c.clone()),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_network;
    use crate::paramgraph::{EnumerationGuards, ParameterGraph};

    const TOGGLE: &str = "X1 : (~X2)\nX2 : (~X1)\n";
    const THREE_NODE: &str = "X : (Y)(~Z)\nY : (~X)\nZ : (~Y)\n";

    fn pg_for(text: &str) -> (crate::network::RegulatoryNetwork, ParameterGraph) {
        let net = parse_network(text).unwrap();
        let pg = ParameterGraph::build(&net, EnumerationGuards::default()).unwrap();
        (net, pg)
    }

    /// Parameter index from per-node (ascending threshold target order, band map).
    fn find_param(
        net: &crate::network::RegulatoryNetwork,
        pg: &ParameterGraph,
        spec: &[(&str, Vec<&str>, Vec<u8>)],
    ) -> u64 {
        let mut tuple = vec![0u32; net.node_count()];
        for (name, order_names, band) in spec {
            let i = net.node_index(name).unwrap();
            let order: Vec<usize> = order_names
                .iter()
                .map(|t| net.node_index(t).unwrap())
                .collect();
            let idx = pg
                .factor(i)
                .find(net, &order, band)
                .unwrap_or_else(|| panic!("factor parameter for {name} not found"));
            tuple[i] = idx as u32;
        }
        pg.tuple_to_index(&tuple).unwrap()
    }

    /// The worked toggle-switch parameter: X1 crosses its threshold as X2
    /// moves, X2 is pinned below its own threshold.
    fn toggle_eq4(net: &crate::network::RegulatoryNetwork, pg: &ParameterGraph) -> u64 {
        find_param(
            net,
            pg,
            &[
                ("X1", vec!["X2"], vec![0, 1]),
                ("X2", vec!["X1"], vec![0, 0]),
            ],
        )
    }

    #[test]
    fn toggle_stg_matches_worked_example() {
        let (net, pg) = pg_for(TOGGLE);
        let k = toggle_eq4(&net, &pg);
        let stg = build_stg(&net, &pg, k).unwrap();
        assert_eq!(stg.n_domains(), 4);
        let d = |x1: u8, x2: u8| stg.domain_index(&[x1, x2]);
        let mut expect = vec![
            (d(0, 0), d(1, 0)),
            (d(0, 1), d(0, 0)),
            (d(1, 1), d(0, 1)),
            (d(1, 1), d(1, 0)),
        ];
        expect.sort_unstable();
        assert_eq!(stg.edges(), &expect[..]);
        assert_eq!(stg.self_edges(), &[d(1, 0)]);
    }

    #[test]
    fn toggle_morse_graph_is_single_stable_fp() {
        let (net, pg) = pg_for(TOGGLE);
        let k = toggle_eq4(&net, &pg);
        let stg = build_stg(&net, &pg, k).unwrap();
        let mg = morse_graph(&stg);
        assert_eq!(mg.sets.len(), 1);
        assert!(mg.sets[0].stable);
        assert_eq!(mg.sets[0].annotation, Annotation::FixedPoint(vec![1, 0]));
        assert_eq!(stable_fixed_points(&mg), vec![vec![1, 0]]);
        assert!(mg.edges.is_empty());
    }

    /// The three-node full-cycle parameter: X responds to its Z input, Y's
    /// thresholds are split by its production values, Z straddles its one
    /// threshold.
    fn three_node_fc(net: &crate::network::RegulatoryNetwork, pg: &ParameterGraph) -> u64 {
        // X bands over states (bit0 = Y-edge active, bit1 = Z-edge active):
        // ll=0, hl=0, lh=1, hh=1. Y order theta_XY < theta_ZY, bands l->1, h->2.
        // Z bands l->0, h->1.
        find_param(
            net,
            pg,
            &[
                ("X", vec!["Y"], vec![0, 0, 1, 1]),
                ("Y", vec!["X", "Z"], vec![1, 2]),
                ("Z", vec!["X"], vec![0, 1]),
            ],
        )
    }

    fn three_node_pc(net: &crate::network::RegulatoryNetwork, pg: &ParameterGraph) -> u64 {
        find_param(
            net,
            pg,
            &[
                ("X", vec!["Y"], vec![0, 1, 0, 1]),
                ("Y", vec!["Z", "X"], vec![0, 2]),
                ("Z", vec!["X"], vec![0, 0]),
            ],
        )
    }

    fn three_node_fp(net: &crate::network::RegulatoryNetwork, pg: &ParameterGraph) -> u64 {
        find_param(
            net,
            pg,
            &[
                ("X", vec!["Y"], vec![0, 1, 1, 1]),
                ("Y", vec!["Z", "X"], vec![0, 2]),
                ("Z", vec!["X"], vec![0, 0]),
            ],
        )
    }

    #[test]
    fn three_node_full_cycle() {
        let (net, pg) = pg_for(THREE_NODE);
        let k = three_node_fc(&net, &pg);
        let stg = build_stg(&net, &pg, k).unwrap();
        let mg = morse_graph(&stg);
        assert_eq!(mg.sets.len(), 1);
        let set = &mg.sets[0];
        assert!(set.stable);
        assert_eq!(set.annotation, Annotation::FullCycle);
        // The six-domain cycle drawn in the worked example.
        let cycle: Vec<u32> = [[1u8, 1, 0], [1, 1, 1], [0, 1, 1], [0, 2, 1], [0, 2, 0], [1, 2, 0]]
            .iter()
            .map(|c| stg.domain_index(c))
            .collect();
        for d in cycle {
            assert!(set.domains.contains(&d));
        }
        assert_eq!(set.domains.len(), 6);
    }

    #[test]
    fn three_node_partial_cycles() {
        let (net, pg) = pg_for(THREE_NODE);
        let k = three_node_pc(&net, &pg);
        let stg = build_stg(&net, &pg, k).unwrap();
        let mg = morse_graph(&stg);
        assert_eq!(mg.sets.len(), 2);
        let xy = vec![
            net.node_index("X").unwrap(),
            net.node_index("Y").unwrap(),
        ];
        assert_eq!(mg.sets[0].annotation, Annotation::PartialCycle(xy.clone()));
        assert!(!mg.sets[0].stable);
        assert_eq!(mg.sets[1].annotation, Annotation::PartialCycle(xy));
        assert!(mg.sets[1].stable);
        assert_eq!(mg.edges, vec![(0, 1)]);
        // The stable cycle stays in the Z = 0 slab.
        assert!(mg.sets[1]
            .domains
            .iter()
            .all(|&d| stg.coords(d)[2] == 0));
    }

    #[test]
    fn three_node_fp_with_unstable_pc() {
        let (net, pg) = pg_for(THREE_NODE);
        let k = three_node_fp(&net, &pg);
        let stg = build_stg(&net, &pg, k).unwrap();
        // The worked example: domain (100) has only a self-edge.
        let d100 = stg.domain_index(&[1, 0, 0]);
        assert!(stg.has_self_edge(d100));
        assert!(stg.successors(d100).is_empty());
        let mg = morse_graph(&stg);
        assert_eq!(mg.sets.len(), 2);
        assert!(matches!(
            mg.sets[0].annotation,
            Annotation::PartialCycle(_)
        ));
        assert!(!mg.sets[0].stable);
        assert_eq!(
            mg.sets[1].annotation,
            Annotation::FixedPoint(vec![1, 0, 0])
        );
        assert!(mg.sets[1].stable);
        assert_eq!(stable_fixed_points(&mg), vec![vec![1, 0, 0]]);
        assert_eq!(mg.edges, vec![(0, 1)]);
    }

    #[test]
    fn constant_zero_logic_flows_to_origin() {
        let (net, pg) = pg_for(THREE_NODE);
        let k = find_param(
            &net,
            &pg,
            &[
                ("X", vec!["Y"], vec![0, 0, 0, 0]),
                ("Y", vec!["X", "Z"], vec![0, 0]),
                ("Z", vec!["X"], vec![0, 0]),
            ],
        );
        let stg = build_stg(&net, &pg, k).unwrap();
        assert_eq!(stg.self_edges(), &[0]);
        let mg = morse_graph(&stg);
        assert_eq!(mg.sets.len(), 1);
        assert_eq!(
            mg.sets[0].annotation,
            Annotation::FixedPoint(vec![0, 0, 0])
        );
        // Every domain reaches the single Morse set.
        for d in 0..stg.n_domains() {
            let mut seen = std::collections::HashSet::new();
            let mut stack = vec![d];
            let mut reached = false;
            while let Some(x) = stack.pop() {
                if x == 0 {
                    reached = true;
                    break;
                }
                for s in stg.successors(x) {
                    if seen.insert(s) {
                        stack.push(s);
                    }
                }
            }
            assert!(reached || d == 0, "domain {d} drains to the origin");
        }
    }

    #[test]
    fn deterministic_rebuild() {
        let (net, pg) = pg_for(THREE_NODE);
        for k in [0u64, 31, 97, 215] {
            let a = build_stg(&net, &pg, k).unwrap();
            let b = build_stg(&net, &pg, k).unwrap();
            assert_eq!(a, b);
            assert_eq!(morse_graph(&a), morse_graph(&b));
        }
    }

    #[test]
    fn white_wall_raises_internal_error() {
        // A self-repressor whose logic puts the target across its own
        // threshold flows toward the wall from both sides.
        let net = parse_network("X : (~X)\n").unwrap();
        let pg = ParameterGraph::build(&net, EnumerationGuards::default()).unwrap();
        // Factor parameters: bands [0,0], [0,1], [1,1]; the middle one is
        // the contradictory wall.
        let err = build_stg(&net, &pg, 1).unwrap_err();
        assert!(matches!(err, Error::InternalConsistency(_)), "{err}");
        assert!(build_stg(&net, &pg, 0).is_ok());
        assert!(build_stg(&net, &pg, 2).is_ok());
    }

    #[test]
    fn every_domain_reaches_a_morse_set() {
        let (net, pg) = pg_for(THREE_NODE);
        for k in 0..pg.size() {
            let stg = build_stg(&net, &pg, k).unwrap();
            let mg = morse_graph(&stg);
            let in_morse: std::collections::HashSet<u32> = mg
                .sets
                .iter()
                .flat_map(|s| s.domains.iter().copied())
                .collect();
            for d in 0..stg.n_domains() {
                let mut seen = std::collections::HashSet::new();
                let mut stack = vec![d];
                let mut ok = false;
                while let Some(x) = stack.pop() {
                    if in_morse.contains(&x) {
                        ok = true;
                        break;
                    }
                    for s in stg.successors(x) {
                        if seen.insert(s) {
                            stack.push(s);
                        }
                    }
                }
                assert!(ok, "k={k} domain {d}");
            }
        }
    }
}
