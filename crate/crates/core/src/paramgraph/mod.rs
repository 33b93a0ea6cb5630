//! Factor parameters, factor graphs, and the parameter graph.
//!
//! For each network node the inequality classes of its real parameters are
//! enumerated combinatorially. A node with `n` in-edges and `m` out-edges has
//!
//! * an *order parameter*: the ascending order of its `m` output thresholds
//!   (a permutation of its out-edge slots), and
//! * a *logic parameter*: a monotone map from the `2^n` input activation
//!   states to output bands `0..=m`, where the band of a state counts how
//!   many of the node's thresholds lie below the interaction value there.
//!
//! A logic parameter is kept only if it is *realizable*: positive reals
//! `l_e < h_e` per in-edge and ordered thresholds must exist that induce
//! exactly that band assignment. For interaction functions that are a pure
//! product of singleton groups (or a single sum group) the question reduces
//! to strict linear feasibility over the per-edge increments `d_e = h_e -
//! l_e` (in log space for products): the band classes must be separable by
//! their subset sums. Mixed product-of-sums interactions fall back to
//! randomized log-space sampling and are flagged as not certified.
//!
//! The factor graph of a node connects factor parameters that differ by a
//! single inequality change: either one band value moved by one at one
//! activation state (same order), or two thresholds adjacent in the order
//! swapped with no input value between them (same logic). The parameter
//! graph is the product of all factor graphs under a mixed-radix index with
//! node 0 least significant.

mod simplex;

pub use simplex::{max_margin, strictly_feasible, Feasibility};

use crate::error::{Error, Result};
use crate::network::RegulatoryNetwork;
use itertools::Itertools;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

/// Seed for the sampling fallback so that enumeration stays deterministic.
const SAMPLE_SEED: u64 = 0x6d77_7061_7261;
const SAMPLE_COUNT: usize = 1_000_000;

/// Monotone band assignment over the `2^n` input activation states.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogicParameter {
    /// `band[state]` = number of the node's thresholds below the interaction
    /// value at that activation state. Bit `e` of `state` marks in-edge `e`
    /// (flattened declaration order) active.
    pub band: Vec<u8>,
}

impl LogicParameter {
    pub fn is_monotone(&self) -> bool {
        let n_states = self.band.len();
        for u in 0..n_states {
            let mut bit = 1usize;
            while bit < n_states {
                if u & bit != 0 && self.band[u] < self.band[u & !bit] {
                    return false;
                }
                bit <<= 1;
            }
        }
        true
    }
}

/// Ascending order of a node's output thresholds: `perm[pos]` is the
/// out-edge slot whose threshold sits at ascending position `pos`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderParameter {
    pub perm: Vec<u8>,
}

impl OrderParameter {
    /// Ascending threshold position (1-based) of an out-edge slot.
    pub fn position_of_slot(&self, slot: usize) -> usize {
        self.perm.iter().position(|&s| s as usize == slot).unwrap() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorParameter {
    pub order: OrderParameter,
    pub logic: LogicParameter,
}

/// Clb2-style partition of a (1-in, 3-out) factor graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RestrictionLabel {
    On,
    Off,
    IntHigh,
    IntLow,
    Wt,
}

impl RestrictionLabel {
    /// Discrete level the node is pinned to under this label, if any.
    pub fn level(self) -> Option<u8> {
        match self {
            RestrictionLabel::On => Some(3),
            RestrictionLabel::IntHigh => Some(2),
            RestrictionLabel::IntLow => Some(1),
            RestrictionLabel::Off => Some(0),
            RestrictionLabel::Wt => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RestrictionLabel::On => "ON",
            RestrictionLabel::Off => "OFF",
            RestrictionLabel::IntHigh => "INT_H",
            RestrictionLabel::IntLow => "INT_L",
            RestrictionLabel::Wt => "WT",
        }
    }
}

impl std::str::FromStr for RestrictionLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ON" => Ok(RestrictionLabel::On),
            "OFF" => Ok(RestrictionLabel::Off),
            "INT_H" => Ok(RestrictionLabel::IntHigh),
            "INT_L" => Ok(RestrictionLabel::IntLow),
            "WT" => Ok(RestrictionLabel::Wt),
            other => Err(Error::Spec(format!("unknown restriction label `{other}`"))),
        }
    }
}

impl std::fmt::Display for RestrictionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Limits on per-node enumeration; the logic space explodes combinatorially
/// past a handful of edges.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationGuards {
    pub max_in: usize,
    pub max_out: usize,
}

impl Default for EnumerationGuards {
    fn default() -> Self {
        EnumerationGuards {
            max_in: 4,
            max_out: 4,
        }
    }
}

/// All factor parameters of one node with single-inequality-change adjacency.
///
/// Parameters are indexed `order_rank * logic_count + logic_rank`, orders in
/// lexicographic permutation order and logics in lexicographic band-map
/// order, so enumeration is deterministic.
#[derive(Debug, Clone)]
pub struct FactorGraph {
    pub node: usize,
    n_in: usize,
    m_out: usize,
    orders: Vec<OrderParameter>,
    logics: Arc<LogicSet>,
    /// Within-order logic-graph adjacency (band maps one unit apart).
    logic_adj: Vec<Vec<u32>>,
    /// Order pairs one adjacent transposition apart, with the swapped
    /// ascending position `k` (edges exist for logics with no band `k + 1`).
    order_swaps: Vec<(u32, u32, u8)>,
    /// Logic ranks lacking band value `k + 1`, per swap position `k`.
    logic_without_band: Vec<Vec<u32>>,
    /// False when the logic set came from the sampling fallback.
    pub certified: bool,
}

#[derive(Debug)]
struct LogicSet {
    bands: Vec<Vec<u8>>,
    rank: HashMap<Vec<u8>, u32>,
    certified: bool,
}

impl FactorGraph {
    pub fn len(&self) -> usize {
        self.orders.len() * self.logics.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_inputs(&self) -> usize {
        self.n_in
    }

    pub fn n_outputs(&self) -> usize {
        self.m_out
    }

    pub fn order_count(&self) -> usize {
        self.orders.len()
    }

    pub fn logic_count(&self) -> usize {
        self.logics.bands.len()
    }

    pub fn param(&self, idx: usize) -> FactorParameter {
        let l = self.logic_count();
        FactorParameter {
            order: self.orders[idx / l].clone(),
            logic: LogicParameter {
                band: self.logics.bands[idx % l].clone(),
            },
        }
    }

    pub fn order_rank(&self, idx: usize) -> usize {
        idx / self.logic_count()
    }

    pub fn logic_band(&self, idx: usize) -> &[u8] {
        &self.logics.bands[idx % self.logic_count()]
    }

    pub fn order(&self, idx: usize) -> &OrderParameter {
        &self.orders[idx / self.logic_count()]
    }

    /// Neighbors of a factor parameter under single-inequality-change
    /// adjacency, in ascending index order.
    pub fn neighbors(&self, idx: usize) -> Vec<u32> {
        let l = self.logic_count() as u32;
        let (o, lr) = ((idx as u32) / l, (idx as u32) % l);
        let mut out: Vec<u32> = self.logic_adj[lr as usize]
            .iter()
            .map(|&nl| o * l + nl)
            .collect();
        for &(a, b, k) in &self.order_swaps {
            let other = if a == o {
                b
            } else if b == o {
                a
            } else {
                continue;
            };
            if self.logic_without_band[k as usize].binary_search(&lr).is_ok() {
                out.push(other * l + lr);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn edge_count(&self) -> usize {
        let within: usize = self.logic_adj.iter().map(|v| v.len()).sum::<usize>() / 2
            * self.orders.len();
        let cross: usize = self
            .order_swaps
            .iter()
            .map(|&(_, _, k)| self.logic_without_band[k as usize].len())
            .sum();
        within + cross
    }

    /// Factor parameter index for the given ascending-threshold target order
    /// and band map, if enumerated.
    pub fn find(
        &self,
        net: &RegulatoryNetwork,
        order_targets: &[usize],
        band: &[u8],
    ) -> Option<usize> {
        let perm: Option<Vec<u8>> = order_targets
            .iter()
            .map(|&t| net.out_slot(self.node, t).map(|s| s as u8))
            .collect();
        let perm = perm?;
        let o = self.orders.iter().position(|p| p.perm == perm)?;
        let lr = *self.logics.rank.get(band)? as usize;
        Some(o * self.logic_count() + lr)
    }
}

/// Group sizes of a node's interaction function.
fn group_sizes(net: &RegulatoryNetwork, i: usize) -> Vec<usize> {
    net.groups(i).iter().map(|g| g.len()).collect()
}

fn logic_cache() -> &'static Mutex<HashMap<(Vec<usize>, usize), Arc<LogicSet>>> {
    static CACHE: OnceLock<Mutex<HashMap<(Vec<usize>, usize), Arc<LogicSet>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn logic_set_for(groups: &[usize], m: usize) -> Arc<LogicSet> {
    // A single sum group and a pure product of singletons induce the same
    // band classes (subset sums, in log space for products), so both share
    // the exact enumeration keyed only by the edge count.
    let n: usize = groups.iter().sum();
    let exact = groups.len() == 1 || groups.iter().all(|&g| g == 1);
    let key = if exact {
        (vec![1; n], m)
    } else {
        (groups.to_vec(), m)
    };
    if let Some(hit) = logic_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let set = if exact {
        enumerate_logic_exact(n, m)
    } else {
        enumerate_logic_sampled(groups, m)
    };
    let set = Arc::new(set);
    logic_cache()
        .lock()
        .unwrap()
        .insert(key, set.clone());
    set
}

/// Strict-feasibility rows over the per-edge increments `d_e` for a band
/// assignment on the first `assigned` states. Rows encode `d_e > 0` and
/// `D(U) < D(V)` for `U`, `V` in consecutive nonempty band classes.
fn class_separation_rows(band: &[u8], assigned: usize, n: usize, m: usize) -> Vec<Vec<f64>> {
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
    for u in 0..assigned {
        classes[band[u] as usize].push(u);
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut seen: BTreeSet<Vec<i8>> = BTreeSet::new();
    for e in 0..n {
        let mut r = vec![0i8; n];
        r[e] = 1;
        if seen.insert(r.clone()) {
            rows.push(r.iter().map(|&c| c as f64).collect());
        }
    }
    let nonempty: Vec<usize> = (0..=m).filter(|&b| !classes[b].is_empty()).collect();
    for w in nonempty.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        for &u in &classes[lo] {
            for &v in &classes[hi] {
                if u & !v == 0 {
                    // u subset of v: separation follows from d > 0.
                    continue;
                }
                let mut r = vec![0i8; n];
                for e in 0..n {
                    let in_u = u >> e & 1 == 1;
                    let in_v = v >> e & 1 == 1;
                    r[e] = (in_v as i8) - (in_u as i8);
                }
                if seen.insert(r.clone()) {
                    rows.push(r.iter().map(|&c| c as f64).collect());
                }
            }
        }
    }
    rows
}

fn separable(band: &[u8], assigned: usize, n: usize, m: usize) -> bool {
    let rows = class_separation_rows(band, assigned, n, m);
    strictly_feasible(&rows, n)
}

/// Exact realizable logic enumeration for subset-sum interaction values.
fn enumerate_logic_exact(n: usize, m: usize) -> LogicSet {
    let n_states = 1usize << n;
    let mut bands = vec![0u8; n_states];
    let mut out: Vec<Vec<u8>> = Vec::new();
    // DFS in state index order (all subsets of a state precede it), pruning
    // by monotonicity; leaves get the separation feasibility check.
    fn rec(u: usize, n_states: usize, n: usize, m: usize, bands: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if u == n_states {
            if separable(bands, n_states, n, m) {
                out.push(bands.clone());
            }
            return;
        }
        let mut lo = 0u8;
        let mut bit = 1usize;
        while bit < n_states {
            if u & bit != 0 {
                lo = lo.max(bands[u & !bit]);
            }
            bit <<= 1;
        }
        for v in lo..=(m as u8) {
            bands[u] = v;
            rec(u + 1, n_states, n, m, bands, out);
        }
    }
    rec(0, n_states, n, m, &mut bands, &mut out);
    let rank = out
        .iter()
        .enumerate()
        .map(|(i, b)| (b.clone(), i as u32))
        .collect();
    LogicSet {
        bands: out,
        rank,
        certified: true,
    }
}

/// Sampling fallback for mixed product-of-sums interactions: classify
/// log-uniform random parameter tuples and keep the observed band maps.
fn enumerate_logic_sampled(groups: &[usize], m: usize) -> LogicSet {
    let set = sample_logic_classes(groups, m, SAMPLE_COUNT, SAMPLE_SEED);
    let bands: Vec<Vec<u8>> = set.into_iter().collect();
    let rank = bands
        .iter()
        .enumerate()
        .map(|(i, b)| (b.clone(), i as u32))
        .collect();
    LogicSet {
        bands,
        rank,
        certified: false,
    }
}

/// Observed band-map classes from random positive parameters, log-uniform in
/// `[1e-3, 1e3]`. Also serves as the independent enumeration oracle in tests.
pub fn sample_logic_classes(
    groups: &[usize],
    m: usize,
    samples: usize,
    seed: u64,
) -> BTreeSet<Vec<u8>> {
    let n: usize = groups.iter().sum();
    let n_states = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut low = vec![0.0f64; n];
    let mut high = vec![0.0f64; n];
    let mut thresholds = vec![0.0f64; m];
    let mut band = vec![0u8; n_states];
    let draw = |rng: &mut ChaCha8Rng| 10f64.powf(rng.gen_range(-3.0..3.0));
    for _ in 0..samples {
        for e in 0..n {
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            low[e] = a.min(b);
            high[e] = a.max(b);
        }
        for t in thresholds.iter_mut() {
            *t = draw(&mut rng);
        }
        thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (u, band_u) in band.iter_mut().enumerate() {
            let mut value = 1.0f64;
            let mut e0 = 0usize;
            for &gs in groups {
                let mut sum = 0.0f64;
                for e in e0..e0 + gs {
                    sum += if u >> e & 1 == 1 { high[e] } else { low[e] };
                }
                value *= sum;
                e0 += gs;
            }
            *band_u = thresholds.iter().take_while(|&&t| t < value).count() as u8;
        }
        seen.insert(band.clone());
    }
    seen
}

/// True iff the (order, logic) pair admits a strict real witness. Total on
/// any input: non-monotone or misshapen band maps simply return false.
pub fn check_realizable(
    net: &RegulatoryNetwork,
    i: usize,
    order: &OrderParameter,
    logic: &LogicParameter,
) -> bool {
    let n = net.in_degree(i);
    let m = net.out_degree(i);
    if logic.band.len() != 1 << n || order.perm.len() != m {
        return false;
    }
    {
        let mut slots: Vec<u8> = order.perm.clone();
        slots.sort_unstable();
        if slots != (0..m as u8).collect::<Vec<_>>() {
            return false;
        }
    }
    if logic.band.iter().any(|&b| b as usize > m) || !logic.is_monotone() {
        return false;
    }
    let set = logic_set_for(&group_sizes(net, i), m);
    set.rank.contains_key(&logic.band)
}

/// Enumerate every realizable factor parameter of node `i`, with adjacency.
pub fn enumerate_factor_parameters(
    net: &RegulatoryNetwork,
    i: usize,
    guards: EnumerationGuards,
) -> Result<FactorGraph> {
    if i >= net.node_count() {
        return Err(Error::NodeIndexOutOfRange {
            index: i,
            count: net.node_count(),
        });
    }
    let n = net.in_degree(i);
    let m = net.out_degree(i);
    if n > guards.max_in {
        return Err(Error::EnumerationGuard {
            node: net.name(i).to_string(),
            what: "in-edges",
            actual: n,
            max: guards.max_in,
        });
    }
    if m > guards.max_out {
        return Err(Error::EnumerationGuard {
            node: net.name(i).to_string(),
            what: "out-edges",
            actual: m,
            max: guards.max_out,
        });
    }

    if m == 0 {
        // Sink: one virtual state, one trivial factor parameter.
        let bands = vec![vec![0u8; 1 << n]];
        let rank = bands
            .iter()
            .enumerate()
            .map(|(r, b)| (b.clone(), r as u32))
            .collect();
        return Ok(FactorGraph {
            node: i,
            n_in: n,
            m_out: 0,
            orders: vec![OrderParameter { perm: Vec::new() }],
            logics: Arc::new(LogicSet {
                bands,
                rank,
                certified: true,
            }),
            logic_adj: vec![Vec::new()],
            order_swaps: Vec::new(),
            logic_without_band: Vec::new(),
            certified: true,
        });
    }

    let logics = logic_set_for(&group_sizes(net, i), m);
    let orders: Vec<OrderParameter> = (0..m as u8)
        .permutations(m)
        .map(|perm| OrderParameter { perm })
        .collect();

    // Within-order logic adjacency: band maps one unit apart at one state.
    let mut logic_adj: Vec<Vec<u32>> = vec![Vec::new(); logics.bands.len()];
    for (r, band) in logics.bands.iter().enumerate() {
        let mut cand = band.clone();
        for s in 0..band.len() {
            if band[s] < m as u8 {
                cand[s] = band[s] + 1;
                if let Some(&r2) = logics.rank.get(&cand) {
                    logic_adj[r].push(r2);
                    logic_adj[r2 as usize].push(r as u32);
                }
                cand[s] = band[s];
            }
        }
    }
    for adj in logic_adj.iter_mut() {
        adj.sort_unstable();
    }

    // Order adjacency: adjacent transposition at ascending positions
    // (k, k+1); valid for logics with no input value in band k+1.
    let order_rank: HashMap<Vec<u8>, u32> = orders
        .iter()
        .enumerate()
        .map(|(r, o)| (o.perm.clone(), r as u32))
        .collect();
    let mut order_swaps = Vec::new();
    for (a, o) in orders.iter().enumerate() {
        for k in 0..m.saturating_sub(1) {
            let mut q = o.perm.clone();
            q.swap(k, k + 1);
            let b = order_rank[&q];
            if (a as u32) < b {
                order_swaps.push((a as u32, b, k as u8));
            }
        }
    }
    let logic_without_band: Vec<Vec<u32>> = (0..m.saturating_sub(1))
        .map(|k| {
            logics
                .bands
                .iter()
                .enumerate()
                .filter(|(_, band)| band.iter().all(|&b| b != (k + 1) as u8))
                .map(|(r, _)| r as u32)
                .collect()
        })
        .collect();

    let certified = logics.certified;
    Ok(FactorGraph {
        node: i,
        n_in: n,
        m_out: m,
        orders,
        logics,
        logic_adj,
        order_swaps,
        logic_without_band,
        certified,
    })
}

/// Product of all factor graphs under a mixed-radix index, node 0 least
/// significant.
#[derive(Debug, Clone)]
pub struct ParameterGraph {
    factors: Vec<FactorGraph>,
    sizes: Vec<u64>,
    size: u64,
    fingerprint: String,
}

impl ParameterGraph {
    pub fn build(net: &RegulatoryNetwork, guards: EnumerationGuards) -> Result<ParameterGraph> {
        let mut factors = Vec::with_capacity(net.node_count());
        for i in 0..net.node_count() {
            factors.push(enumerate_factor_parameters(net, i, guards)?);
        }
        let sizes: Vec<u64> = factors.iter().map(|f| f.len() as u64).collect();
        let mut size: u64 = 1;
        for &s in &sizes {
            size = size.checked_mul(s).ok_or_else(|| {
                Error::InternalConsistency("parameter graph size overflows u64".into())
            })?;
        }
        Ok(ParameterGraph {
            factors,
            sizes,
            size,
            fingerprint: net.fingerprint(),
        })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn factor(&self, node: usize) -> &FactorGraph {
        &self.factors[node]
    }

    pub fn factor_sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn network_fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn index_to_tuple(&self, k: u64) -> Result<Vec<u32>> {
        if k >= self.size {
            return Err(Error::ParameterOutOfRange {
                index: k,
                size: self.size,
            });
        }
        let mut rest = k;
        let mut tuple = Vec::with_capacity(self.sizes.len());
        for &s in &self.sizes {
            tuple.push((rest % s) as u32);
            rest /= s;
        }
        Ok(tuple)
    }

    pub fn tuple_to_index(&self, tuple: &[u32]) -> Result<u64> {
        if tuple.len() != self.sizes.len() {
            return Err(Error::InternalConsistency(format!(
                "tuple length {} != node count {}",
                tuple.len(),
                self.sizes.len()
            )));
        }
        let mut k = 0u64;
        for (i, (&f, &s)) in tuple.iter().zip(&self.sizes).enumerate().rev() {
            if f as u64 >= s {
                return Err(Error::ParameterOutOfRange {
                    index: f as u64,
                    size: s,
                });
            }
            let _ = i;
            k = k * s + f as u64;
        }
        Ok(k)
    }

    /// Factor coordinates of all nodes except `excluded`.
    pub fn remainder_of(&self, k: u64, excluded: usize) -> Result<Vec<u32>> {
        if excluded >= self.sizes.len() {
            return Err(Error::NodeIndexOutOfRange {
                index: excluded,
                count: self.sizes.len(),
            });
        }
        let mut tuple = self.index_to_tuple(k)?;
        tuple.remove(excluded);
        Ok(tuple)
    }

    /// Size of the remainder space when `excluded` is dropped.
    pub fn remainder_size(&self, excluded: usize) -> u64 {
        self.size / self.sizes[excluded]
    }

    /// True iff parameter indices `a` and `b` are adjacent: they differ in
    /// exactly one factor coordinate, and those factor parameters are
    /// adjacent in that node's factor graph.
    pub fn adjacent(&self, a: u64, b: u64) -> Result<bool> {
        let ta = self.index_to_tuple(a)?;
        let tb = self.index_to_tuple(b)?;
        let diffs: Vec<usize> = (0..ta.len()).filter(|&i| ta[i] != tb[i]).collect();
        if diffs.len() != 1 {
            return Ok(false);
        }
        let i = diffs[0];
        Ok(self.factors[i]
            .neighbors(ta[i] as usize)
            .contains(&tb[i]))
    }
}

/// Partition labels over a (1-in, 3-out) node's factor parameters, aligned
/// with factor-parameter index order.
pub fn clb2_restriction_sets(
    pg: &ParameterGraph,
    net: &RegulatoryNetwork,
    node: usize,
) -> Result<Vec<RestrictionLabel>> {
    let fg = pg.factor(node);
    if fg.n_inputs() != 1 || fg.n_outputs() != 3 {
        return Err(Error::ShapeMismatch {
            node: net.name(node).to_string(),
            ins: fg.n_inputs(),
            outs: fg.n_outputs(),
            expected: "restriction sets require exactly 1 in-edge and 3 out-edges",
        });
    }
    Ok((0..fg.len())
        .map(|idx| {
            let band = fg.logic_band(idx);
            match (band[0], band[1]) {
                (3, 3) => RestrictionLabel::On,
                (0, 0) => RestrictionLabel::Off,
                (2, 2) => RestrictionLabel::IntHigh,
                (1, 1) => RestrictionLabel::IntLow,
                _ => RestrictionLabel::Wt,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_network;

    const TOGGLE: &str = "X1 : (~X2)\nX2 : (~X1)\n";
    const THREE_NODE: &str = "X : (Y)(~Z)\nY : (~X)\nZ : (~Y)\n";
    const MINI_WAVEPOOL: &str = "\
Swi4 : (~Nrm1)(~Clb2)(Swi4)(Swi5)
Nrm1 : (Swi4)
Ndd1 : (Swi4)(Clb2)
Swi5 : (~Clb2)(Ndd1)
Clb2 : (Ndd1)
";

    fn fg(net_text: &str, node: &str) -> FactorGraph {
        let net = parse_network(net_text).unwrap();
        let i = net.node_index(node).unwrap();
        enumerate_factor_parameters(&net, i, EnumerationGuards::default()).unwrap()
    }

    #[test]
    fn one_in_one_out_is_a_path_of_three() {
        let f = fg(TOGGLE, "X1");
        assert_eq!(f.len(), 3);
        // l<h<t, l<t<h, t<l<h i.e. bands [0,0], [0,1], [1,1].
        assert_eq!(f.logic_band(0), &[0, 0]);
        assert_eq!(f.logic_band(1), &[0, 1]);
        assert_eq!(f.logic_band(2), &[1, 1]);
        assert_eq!(f.neighbors(0), vec![1]);
        assert_eq!(f.neighbors(1), vec![0, 2]);
        assert_eq!(f.neighbors(2), vec![1]);
    }

    #[test]
    fn y_node_is_twelve_with_two_logic_graphs() {
        let f = fg(THREE_NODE, "Y");
        assert_eq!(f.order_count(), 2);
        assert_eq!(f.logic_count(), 6);
        assert_eq!(f.len(), 12);
        // Each copy of the logic graph has 6 edges; exactly the three band
        // maps without a value in band 1 bridge the two orders.
        assert_eq!(f.edge_count(), 6 + 6 + 3);
        let bridges: Vec<&[u8]> = (0..f.logic_count())
            .filter(|&l| f.neighbors(l).iter().any(|&n| n as usize >= f.logic_count()))
            .map(|l| f.logic_band(l))
            .collect();
        assert_eq!(bridges, vec![&[0u8, 0][..], &[0, 2], &[2, 2]]);
    }

    #[test]
    fn x_node_has_six_logic_parameters() {
        let f = fg(THREE_NODE, "X");
        assert_eq!(f.len(), 6);
        assert_eq!(f.logic_count(), 6);
    }

    #[test]
    fn clb2_node_has_sixty() {
        let f = fg(MINI_WAVEPOOL, "Clb2");
        assert_eq!(f.order_count(), 6);
        assert_eq!(f.logic_count(), 10);
        assert_eq!(f.len(), 60);
    }

    #[test]
    fn factor_graphs_are_connected() {
        for (net, node) in [
            (THREE_NODE, "X"),
            (THREE_NODE, "Y"),
            (THREE_NODE, "Z"),
            (MINI_WAVEPOOL, "Clb2"),
        ] {
            let f = fg(net, node);
            let mut seen = vec![false; f.len()];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for &v in &f.neighbors(u) {
                    if !seen[v as usize] {
                        seen[v as usize] = true;
                        stack.push(v as usize);
                    }
                }
            }
            assert!(seen.into_iter().all(|s| s), "{node} factor graph connected");
        }
    }

    #[test]
    fn adjacency_is_symmetric_and_irreflexive() {
        let f = fg(THREE_NODE, "Y");
        for u in 0..f.len() {
            for &v in &f.neighbors(u) {
                assert_ne!(u as u32, v);
                assert!(f.neighbors(v as usize).contains(&(u as u32)));
            }
        }
    }

    #[test]
    fn pg_sizes_small_networks() {
        let toggle = parse_network(TOGGLE).unwrap();
        let pg = ParameterGraph::build(&toggle, EnumerationGuards::default()).unwrap();
        assert_eq!(pg.size(), 9);

        let three = parse_network(THREE_NODE).unwrap();
        let pg = ParameterGraph::build(&three, EnumerationGuards::default()).unwrap();
        assert_eq!(pg.factor_sizes(), &[6, 12, 3]);
        assert_eq!(pg.size(), 216);
    }

    #[test]
    fn index_tuple_round_trip() {
        let net = parse_network(THREE_NODE).unwrap();
        let pg = ParameterGraph::build(&net, EnumerationGuards::default()).unwrap();
        assert_eq!(pg.index_to_tuple(0).unwrap(), vec![0, 0, 0]);
        assert_eq!(pg.index_to_tuple(215).unwrap(), vec![5, 11, 2]);
        assert_eq!(pg.tuple_to_index(&[5, 11, 2]).unwrap(), 215);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10_000 {
            let k = rng.gen_range(0..pg.size());
            let t = pg.index_to_tuple(k).unwrap();
            assert_eq!(pg.tuple_to_index(&t).unwrap(), k);
        }
        assert!(pg.index_to_tuple(216).is_err());
        assert!(pg.tuple_to_index(&[6, 0, 0]).is_err());
    }

    #[test]
    fn remainder_drops_one_coordinate() {
        let net = parse_network(THREE_NODE).unwrap();
        let pg = ParameterGraph::build(&net, EnumerationGuards::default()).unwrap();
        let z = net.node_index("Z").unwrap();
        // Parameters differing only in Z collapse to equal remainders.
        let a = pg.tuple_to_index(&[4, 7, 0]).unwrap();
        let b = pg.tuple_to_index(&[4, 7, 2]).unwrap();
        assert_eq!(pg.remainder_of(a, z).unwrap(), pg.remainder_of(b, z).unwrap());
        assert_eq!(pg.remainder_of(a, z).unwrap(), vec![4, 7]);
        assert_eq!(pg.remainder_size(z), 72);
    }

    #[test]
    fn one_node_remainder_is_empty() {
        let net = parse_network("X : (~X)\n").unwrap();
        let pg = ParameterGraph::build(&net, EnumerationGuards::default()).unwrap();
        assert_eq!(pg.remainder_of(0, 0).unwrap(), Vec::<u32>::new());
    }

    #[test]
    fn guards_reject_oversized_nodes() {
        let net = parse_network(
            "A : (B)(C)(D)(E)(A)\nB : (A)\nC : (A)\nD : (A)\nE : (A)\n",
        )
        .unwrap();
        let err = ParameterGraph::build(&net, EnumerationGuards::default()).unwrap_err();
        assert!(matches!(err, Error::EnumerationGuard { .. }), "{err}");
    }

    #[test]
    fn enumerated_parameters_all_pass_check_realizable() {
        let net = parse_network(THREE_NODE).unwrap();
        for i in 0..net.node_count() {
            let f = enumerate_factor_parameters(&net, i, EnumerationGuards::default()).unwrap();
            for idx in 0..f.len() {
                let p = f.param(idx);
                assert!(check_realizable(&net, i, &p.order, &p.logic));
            }
        }
    }

    #[test]
    fn non_monotone_band_map_is_rejected() {
        let net = parse_network(THREE_NODE).unwrap();
        let x = net.node_index("X").unwrap();
        let order = OrderParameter { perm: vec![0] };
        let logic = LogicParameter {
            band: vec![1, 0, 0, 1],
        };
        assert!(!check_realizable(&net, x, &order, &logic));
    }

    #[test]
    fn constant_band_map_is_realizable() {
        let net = parse_network(MINI_WAVEPOOL).unwrap();
        let s = net.node_index("Swi4").unwrap();
        let order = OrderParameter {
            perm: vec![0, 1, 2],
        };
        let logic = LogicParameter {
            band: vec![0; 16],
        };
        assert!(check_realizable(&net, s, &order, &logic));
    }

    #[test]
    fn sampling_oracle_agrees_on_small_nodes() {
        // Set equality between the exact enumeration and the log-space
        // sampling oracle for every shape up to 2 inputs and 3 outputs.
        for (n, m) in [(1usize, 1usize), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)] {
            let exact = enumerate_logic_exact(n, m);
            let sampled = sample_logic_classes(&vec![1; n], m, 200_000, 42);
            let exact_set: BTreeSet<Vec<u8>> = exact.bands.iter().cloned().collect();
            assert_eq!(exact_set, sampled, "shape ({n},{m})");
        }
    }

    #[test]
    fn two_in_two_out_count_fixed_by_oracle() {
        // Brute-force sampling oracle pins the (2-in product, 2-out) logic
        // count at 20; the enumeration must return exactly those classes.
        let sampled = sample_logic_classes(&[1, 1], 2, 500_000, 7);
        let exact = enumerate_logic_exact(2, 2);
        assert_eq!(exact.bands.len(), 20);
        assert_eq!(
            exact.bands.iter().cloned().collect::<BTreeSet<_>>(),
            sampled
        );
    }

    #[test]
    fn realizability_prunes_non_threshold_logic() {
        // With 4 product inputs and one output the 168 monotone maps prune
        // to the 150 linearly separable ones.
        let set = enumerate_logic_exact(4, 1);
        assert_eq!(set.bands.len(), 150);
        // The classic non-separable majority-of-pairs map is excluded.
        let mut band = vec![0u8; 16];
        for u in 0..16usize {
            let a = u & 0b0011 == 0b0011;
            let b = u & 0b1100 == 0b1100;
            band[u] = (a || b) as u8;
        }
        assert!(!set.rank.contains_key(&band));
    }

    #[test]
    fn clb2_restriction_partition() {
        let net = parse_network(MINI_WAVEPOOL).unwrap();
        let pg = ParameterGraph::build(&net, EnumerationGuards::default()).unwrap();
        let c = net.node_index("Clb2").unwrap();
        let labels = clb2_restriction_sets(&pg, &net, c).unwrap();
        assert_eq!(labels.len(), 60);
        let count = |l: RestrictionLabel| labels.iter().filter(|&&x| x == l).count();
        assert_eq!(count(RestrictionLabel::Wt), 36);
        assert_eq!(count(RestrictionLabel::On), 6);
        assert_eq!(count(RestrictionLabel::Off), 6);
        assert_eq!(count(RestrictionLabel::IntHigh), 6);
        assert_eq!(count(RestrictionLabel::IntLow), 6);
        // WT labels are exactly the band maps with a threshold strictly
        // between the low and high values.
        let f = pg.factor(c);
        for idx in 0..f.len() {
            let band = f.logic_band(idx);
            assert_eq!(
                labels[idx] == RestrictionLabel::Wt,
                band[0] < band[1],
                "factor {idx}"
            );
        }
        let n = net.node_index("Nrm1").unwrap();
        assert!(clb2_restriction_sets(&pg, &net, n).is_err());
    }

    #[test]
    fn parameter_node_degree_sums_factor_degrees() {
        let net = parse_network(THREE_NODE).unwrap();
        let pg = ParameterGraph::build(&net, EnumerationGuards::default()).unwrap();
        let k = pg.tuple_to_index(&[3, 5, 1]).unwrap();
        let tuple = pg.index_to_tuple(k).unwrap();
        let expected: usize = (0..3)
            .map(|i| pg.factor(i).neighbors(tuple[i] as usize).len())
            .sum();
        let mut degree = 0usize;
        for i in 0..3 {
            for &nb in &pg.factor(i).neighbors(tuple[i] as usize) {
                let mut t2 = tuple.clone();
                t2[i] = nb;
                let k2 = pg.tuple_to_index(&t2).unwrap();
                assert!(pg.adjacent(k, k2).unwrap());
                degree += 1;
            }
        }
        assert_eq!(degree, expected);
        // Differing in two coordinates is never adjacent.
        let other = pg.tuple_to_index(&[4, 6, 1]).unwrap();
        assert!(!pg.adjacent(k, other).unwrap());
    }

    #[test]
    fn sink_node_gets_one_virtual_parameter() {
        let net = parse_network("A : (~A)\nB : (A)\n").unwrap();
        let b = net.node_index("B").unwrap();
        let f = enumerate_factor_parameters(&net, b, EnumerationGuards::default()).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.n_outputs(), 0);
        assert!(f.neighbors(0).is_empty());
    }
}
