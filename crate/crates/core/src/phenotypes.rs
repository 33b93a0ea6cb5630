//! Phenotype queries over shards of the parameter graph.
//!
//! Three kinds of query run per parameter: wild-type cycling (a stable
//! cycle spanning every pattern variable matches the pattern), mutant
//! cycling (a stable partial cycle oscillating in the pattern variables
//! with the distinguished node pinned at the labeled level matches), and
//! checkpoint fixed points (a stable fixed point hits one of the listed
//! coordinate tuples). Permissibility filters parameters by the
//! distinguished node's restriction label before any dynamics run.
//!
//! Sweeps write newline-delimited match records plus a manifest binding
//! them to the network fingerprint, spec hash and index range; shards over
//! disjoint contiguous ranges merge deterministically, so any partition of
//! the index range produces byte-identical merged output.

use crate::dynamics::{build_stg, morse_graph, Annotation};
use crate::error::{Error, Result};
use crate::network::{hex_string, RegulatoryNetwork};
use crate::paramgraph::{clb2_restriction_sets, ParameterGraph, RestrictionLabel};
use crate::patternmatch::{label_events, match_cycle};
use crate::timeseries::{PatternDiagram, PatternRecord};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PhenotypeKind {
    WtCycling,
    MutantCycling,
    CheckpointFp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Permissibility {
    #[default]
    Restricted,
    Relaxed,
}

/// Declarative description of one phenotype query.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhenotypeSpec {
    /// Identifier carried into match records (e.g. "WT", "ON", "SAC").
    pub id: String,
    pub kind: PhenotypeKind,
    /// Pattern diagram for the cycling kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternRecord>,
    /// Distinguished node whose restriction label gates permissibility.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<String>,
    /// Restriction label: ON/OFF/INT_H/INT_L for mutant cycling, WT for
    /// wild-type cycling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<RestrictionLabel>,
    /// Fixed-point coordinate tuples for checkpoint queries; a coordinate
    /// of -1 means "not low" and expands to every nonzero level.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fp_tuples: Vec<Vec<i16>>,
    #[serde(default)]
    pub permissibility: Permissibility,
}

impl PhenotypeSpec {
    /// Content hash used to bind sweep results to the spec that made them.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_string(self).expect("spec serializes").as_bytes());
        hex_string(&h.finalize())[..16].to_string()
    }
}

/// Everything a worker needs, resolved once per sweep.
struct ResolvedSpec {
    kind: PhenotypeKind,
    pattern: Option<PatternDiagram>,
    pattern_vars: Vec<usize>,
    node: Option<usize>,
    /// Permissible factor-parameter indices of the distinguished node.
    permissible: Option<HashSet<u32>>,
    /// Level the distinguished node must hold inside a mutant-cycling set.
    level: Option<u8>,
    fp_tuples: Vec<Vec<u8>>,
}

fn resolve(
    net: &RegulatoryNetwork,
    pg: &ParameterGraph,
    spec: &PhenotypeSpec,
) -> Result<ResolvedSpec> {
    let node = spec
        .node
        .as_ref()
        .map(|n| net.node_index(n))
        .transpose()?;
    let pattern = spec
        .pattern
        .as_ref()
        .map(|p| PatternDiagram::from_record(p.clone()))
        .transpose()?;
    let pattern_vars = match &pattern {
        Some(p) => {
            let mut vars = Vec::new();
            for g in p.genes() {
                let v = net
                    .node_index(&g)
                    .map_err(|_| Error::UnknownPatternVariable(g.clone()))?;
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            vars
        }
        None => Vec::new(),
    };

    match spec.kind {
        PhenotypeKind::WtCycling | PhenotypeKind::MutantCycling => {
            if pattern.is_none() {
                return Err(Error::Spec(format!(
                    "cycling phenotype `{}` needs a pattern",
                    spec.id
                )));
            }
        }
        PhenotypeKind::CheckpointFp => {
            if spec.fp_tuples.is_empty() {
                return Err(Error::Spec(format!(
                    "checkpoint phenotype `{}` needs at least one FP tuple",
                    spec.id
                )));
            }
        }
    }
    if spec.kind == PhenotypeKind::MutantCycling {
        let Some(l) = spec.label else {
            return Err(Error::Spec(format!(
                "mutant cycling `{}` needs a restriction label",
                spec.id
            )));
        };
        if l == RestrictionLabel::Wt {
            return Err(Error::Spec(
                "mutant cycling takes ON/OFF/INT_H/INT_L, not WT".into(),
            ));
        }
        if spec.node.is_none() {
            return Err(Error::Spec(format!(
                "mutant cycling `{}` needs a distinguished node",
                spec.id
            )));
        }
    }

    // Permissible factor set of the distinguished node.
    let permissible = match (node, spec.label, spec.permissibility) {
        (Some(n), Some(label), Permissibility::Restricted) => {
            let labels = clb2_restriction_sets(pg, net, n)?;
            Some(
                labels
                    .iter()
                    .enumerate()
                    .filter(|(_, &l)| l == label)
                    .map(|(i, _)| i as u32)
                    .collect(),
            )
        }
        _ => None, // relaxed or no distinguished node: all parameters
    };
    let level = if spec.kind == PhenotypeKind::MutantCycling {
        spec.label.and_then(|l| l.level())
    } else {
        None
    };

    // Expand FP tuples; -1 means "not low".
    let mut fp_tuples: Vec<Vec<u8>> = Vec::new();
    for t in &spec.fp_tuples {
        if t.len() != net.node_count() {
            return Err(Error::Spec(format!(
                "FP tuple {:?} has {} coordinates, network has {} nodes",
                t,
                t.len(),
                net.node_count()
            )));
        }
        let mut expansions: Vec<Vec<u8>> = vec![Vec::new()];
        for (i, &c) in t.iter().enumerate() {
            let m = net.out_degree(i) as i16;
            let choices: Vec<u8> = if c == -1 {
                (1..=m as u8).collect()
            } else if c >= 0 && c <= m {
                vec![c as u8]
            } else {
                return Err(Error::Spec(format!(
                    "FP coordinate {c} out of range for node {}",
                    net.name(i)
                )));
            };
            expansions = expansions
                .into_iter()
                .flat_map(|prefix| {
                    choices.iter().map(move |&c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        fp_tuples.extend(expansions);
    }
    fp_tuples.sort_unstable();
    fp_tuples.dedup();

    Ok(ResolvedSpec {
        kind: spec.kind,
        pattern,
        pattern_vars,
        node,
        permissible,
        level,
        fp_tuples,
    })
}

/// One match: parameter, phenotype, Morse set and its annotation, plus a
/// digest of the witness for spot-checking.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub param: u64,
    pub phenotype: String,
    pub morse_set: usize,
    pub annotation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_digest: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardManifest {
    pub network_fingerprint: String,
    pub spec_hash: String,
    pub phenotype: String,
    /// Half-open index range [start, end).
    pub range: (u64, u64),
    pub engine_version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepResult {
    pub manifest: ShardManifest,
    pub records: Vec<MatchRecord>,
}

pub fn engine_version() -> String {
    format!("regdyn {}", env!("CARGO_PKG_VERSION"))
}

fn witness_digest(w: &impl Serialize) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_string(w).expect("witness serializes").as_bytes());
    hex_string(&h.finalize())[..16].to_string()
}

/// Evaluate one parameter against the resolved spec.
fn evaluate(
    net: &RegulatoryNetwork,
    pg: &ParameterGraph,
    r: &ResolvedSpec,
    spec_id: &str,
    k: u64,
) -> Result<Vec<MatchRecord>> {
    if let (Some(node), Some(perm)) = (r.node, r.permissible.as_ref()) {
        let tuple = pg.index_to_tuple(k)?;
        if !perm.contains(&tuple[node]) {
            return Ok(Vec::new());
        }
    }
    let stg = build_stg(net, pg, k)?;
    let mg = morse_graph(&stg);
    let mut out = Vec::new();
    for (si, set) in mg.sets.iter().enumerate() {
        if !set.stable {
            continue;
        }
        match r.kind {
            PhenotypeKind::CheckpointFp => {
                if let Annotation::FixedPoint(coords) = &set.annotation {
                    if r.fp_tuples.binary_search(coords).is_ok() {
                        out.push(MatchRecord {
                            param: k,
                            phenotype: spec_id.to_string(),
                            morse_set: si,
                            annotation: set.annotation.display(net),
                            witness_digest: None,
                        });
                    }
                }
            }
            PhenotypeKind::WtCycling | PhenotypeKind::MutantCycling => {
                let spanning: &[usize] = match &set.annotation {
                    Annotation::FullCycle => &[],
                    Annotation::PartialCycle(vars) => vars.as_slice(),
                    Annotation::FixedPoint(_) => continue,
                };
                let is_full = matches!(set.annotation, Annotation::FullCycle);
                // The cycle must oscillate in every pattern variable.
                if !is_full && !r.pattern_vars.iter().all(|v| spanning.contains(v)) {
                    continue;
                }
                if r.kind == PhenotypeKind::MutantCycling {
                    let node = r.node.expect("validated");
                    let level = r.level.expect("validated");
                    // The distinguished node must be pinned, not cycling.
                    if is_full || spanning.contains(&node) {
                        continue;
                    }
                    let pinned = set
                        .domains
                        .iter()
                        .all(|&d| stg.coords(d)[node] == level);
                    if !pinned {
                        continue;
                    }
                }
                let labeled = label_events(&stg, set);
                let pd = r.pattern.as_ref().expect("validated");
                let result = match_cycle(net, &labeled, pd)?;
                if result.matched {
                    out.push(MatchRecord {
                        param: k,
                        phenotype: spec_id.to_string(),
                        morse_set: si,
                        annotation: set.annotation.display(net),
                        witness_digest: result.witness.as_ref().map(witness_digest),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Sweep the half-open range `[range.0, range.1)` with `workers` threads.
pub fn run_sweep(
    net: &RegulatoryNetwork,
    pg: &ParameterGraph,
    spec: &PhenotypeSpec,
    range: (u64, u64),
    workers: usize,
) -> Result<SweepResult> {
    if range.0 > range.1 || range.1 > pg.size() {
        return Err(Error::Spec(format!(
            "range {}..{} outside parameter graph of size {}",
            range.0,
            range.1,
            pg.size()
        )));
    }
    let resolved = resolve(net, pg, spec)?;
    let workers = workers.max(1);
    let total = range.1 - range.0;
    let chunk = total.div_ceil(workers as u64).max(1);

    let mut records: Vec<MatchRecord> = Vec::new();
    let results: Vec<Result<Vec<MatchRecord>>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers as u64 {
            let lo = range.0 + w * chunk;
            let hi = (lo + chunk).min(range.1);
            let resolved = &resolved;
            handles.push(scope.spawn(move || -> Result<Vec<MatchRecord>> {
                let mut out = Vec::new();
                let mut k = lo;
                while k < hi {
                    out.extend(evaluate(net, pg, resolved, &spec.id, k)?);
                    k += 1;
                }
                Ok(out)
            }));
        }
        handles.into_iter().map(|h| h.join().expect("worker")).collect()
    });
    for r in results {
        records.extend(r?);
    }
    records.sort_by(|a, b| (a.param, a.morse_set).cmp(&(b.param, b.morse_set)));

    Ok(SweepResult {
        manifest: ShardManifest {
            network_fingerprint: pg.network_fingerprint().to_string(),
            spec_hash: spec.hash(),
            phenotype: spec.id.clone(),
            range,
            engine_version: engine_version(),
        },
        records,
    })
}

/// Write a shard: the manifest line, then one record per line.
pub fn write_shard(result: &SweepResult, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        f,
        "{}",
        serde_json::to_string(&serde_json::json!({ "manifest": result.manifest }))?
    )?;
    for r in &result.records {
        writeln!(f, "{}", serde_json::to_string(r)?)?;
    }
    Ok(())
}

pub fn read_shard(path: &Path) -> Result<SweepResult> {
    let f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut lines = f.lines();
    let head = lines
        .next()
        .ok_or_else(|| Error::ShardCoverage(format!("{}: empty shard", path.display())))??;
    #[derive(Deserialize)]
    struct Head {
        manifest: ShardManifest,
    }
    let head: Head = serde_json::from_str(&head)?;
    let mut records = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(SweepResult {
        manifest: head.manifest,
        records,
    })
}

/// Merge shards covering disjoint contiguous ranges into one result.
pub fn merge_shards(mut shards: Vec<SweepResult>) -> Result<SweepResult> {
    if shards.is_empty() {
        return Err(Error::ShardCoverage("nothing to merge".into()));
    }
    let fp = shards[0].manifest.network_fingerprint.clone();
    let spec = shards[0].manifest.spec_hash.clone();
    for s in &shards {
        if s.manifest.network_fingerprint != fp {
            return Err(Error::FingerprintMismatch(
                "shards come from different networks".into(),
            ));
        }
        if s.manifest.spec_hash != spec {
            return Err(Error::FingerprintMismatch(
                "shards come from different phenotype specs".into(),
            ));
        }
    }
    shards.sort_by_key(|s| s.manifest.range.0);
    for w in shards.windows(2) {
        let (a, b) = (&w[0].manifest.range, &w[1].manifest.range);
        if a.1 > b.0 {
            return Err(Error::ShardCoverage(format!(
                "ranges {a:?} and {b:?} overlap"
            )));
        }
        if a.1 < b.0 {
            return Err(Error::ShardCoverage(format!(
                "gap between ranges {a:?} and {b:?}"
            )));
        }
    }
    let range = (
        shards[0].manifest.range.0,
        shards.last().unwrap().manifest.range.1,
    );
    let mut manifest = shards[0].manifest.clone();
    manifest.range = range;
    let mut records = Vec::new();
    for s in shards {
        records.extend(s.records);
    }
    records.sort_by(|a, b| (a.param, a.morse_set).cmp(&(b.param, b.morse_set)));
    Ok(SweepResult { manifest, records })
}

/// Remainder-space summary: per phenotype, the set of remainder-parameter
/// indices with a match; intersections; percentages against the first
/// wild-type entry.
#[derive(Debug, Clone, Serialize)]
pub struct MpgSummary {
    pub excluded_node: String,
    pub remainder_space: u64,
    pub phenotypes: Vec<MpgEntry>,
    /// Intersection over every listed phenotype.
    pub full_intersection: u64,
    /// Cardinality of each nonempty sub-intersection, keyed by the sorted
    /// phenotype id list.
    pub subsets: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MpgEntry {
    pub phenotype: String,
    pub mpg_count: u64,
    /// |this ∩ baseline| / |baseline| * 100, against the first entry.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub percent_of_baseline: Option<f64>,
}

fn remainder_sets(
    results: &[SweepResult],
    pg: &ParameterGraph,
    excluded: usize,
) -> Result<Vec<(String, HashSet<u64>)>> {
    let mut out = Vec::new();
    for r in results {
        if r.manifest.network_fingerprint != pg.network_fingerprint() {
            return Err(Error::FingerprintMismatch(format!(
                "result `{}` does not match this parameter graph",
                r.manifest.phenotype
            )));
        }
        let mut set = HashSet::new();
        for rec in &r.records {
            set.insert(remainder_index(pg, rec.param, excluded)?);
        }
        out.push((r.manifest.phenotype.clone(), set));
    }
    Ok(out)
}

/// Mixed-radix index of the remainder tuple (all coordinates except
/// `excluded`, least-significant node first).
pub fn remainder_index(pg: &ParameterGraph, k: u64, excluded: usize) -> Result<u64> {
    let tuple = pg.remainder_of(k, excluded)?;
    let sizes: Vec<u64> = pg
        .factor_sizes()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != excluded)
        .map(|(_, &s)| s)
        .collect();
    let mut idx = 0u64;
    for (f, s) in tuple.iter().zip(&sizes).rev() {
        idx = idx * s + *f as u64;
    }
    Ok(idx)
}

/// Project match sets through the remainder map and intersect.
pub fn mpg_intersect(
    results: &[SweepResult],
    net: &RegulatoryNetwork,
    pg: &ParameterGraph,
    excluded: usize,
) -> Result<MpgSummary> {
    let sets = remainder_sets(results, pg, excluded)?;
    summarize(sets, net, pg, excluded)
}

/// K-way coexistence over the given sweeps (first entry is the baseline).
pub fn coexistence_query(
    results: &[SweepResult],
    net: &RegulatoryNetwork,
    pg: &ParameterGraph,
    excluded: usize,
) -> Result<MpgSummary> {
    if results.len() < 2 {
        return Err(Error::Spec(
            "coexistence needs at least two sweep results".into(),
        ));
    }
    let sets = remainder_sets(results, pg, excluded)?;
    summarize(sets, net, pg, excluded)
}

fn summarize(
    sets: Vec<(String, HashSet<u64>)>,
    net: &RegulatoryNetwork,
    pg: &ParameterGraph,
    excluded: usize,
) -> Result<MpgSummary> {
    let baseline = sets.first().map(|(_, s)| s.clone()).unwrap_or_default();
    let phenotypes: Vec<MpgEntry> = sets
        .iter()
        .map(|(id, s)| MpgEntry {
            phenotype: id.clone(),
            mpg_count: s.len() as u64,
            percent_of_baseline: if baseline.is_empty() {
                None
            } else {
                Some(100.0 * s.intersection(&baseline).count() as f64 / baseline.len() as f64)
            },
        })
        .collect();

    let mut subsets = BTreeMap::new();
    let n = sets.len();
    for mask in 1u32..(1 << n) {
        let ids: Vec<&str> = (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| sets[i].0.as_str())
            .collect();
        let mut iter = (0..n).filter(|&i| mask >> i & 1 == 1);
        let first = iter.next().unwrap();
        let mut acc: HashSet<u64> = sets[first].1.clone();
        for i in iter {
            acc = acc.intersection(&sets[i].1).copied().collect();
        }
        subsets.insert(ids.join("&"), acc.len() as u64);
    }
    let full = *subsets
        .get(
            &sets
                .iter()
                .map(|(id, _)| id.as_str())
                .collect::<Vec<_>>()
                .join("&"),
        )
        .unwrap_or(&0);

    Ok(MpgSummary {
        excluded_node: net.name(excluded).to_string(),
        remainder_space: pg.remainder_size(excluded),
        phenotypes,
        full_intersection: full,
        subsets,
    })
}
