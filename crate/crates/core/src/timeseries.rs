//! Time-series ingestion, noise-robust extrema, and pattern diagrams.
//!
//! At noise level `eps` (fraction of a gene's global range), extrema of the
//! sampled curve that cannot be erased by a perturbation bounded within
//! `±eps * range` survive; each survivor is assigned the maximal interval
//! around it on which the linearly interpolated curve stays on the extremal
//! side of the certification level (`value + 2*eps*range` for a minimum,
//! mirrored for a maximum). Any perturbation bounded by the noise band then
//! must attain an extremum of the same kind inside the interval.
//!
//! Comparability of two extrema is decided by interval disjointness (closed
//! intervals; touching counts as overlap), except within a single gene where
//! the chain order of events is always known. The resulting strict partial
//! order, transitively closed, is the pattern diagram.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremeKind {
    Min,
    Max,
}

impl ExtremeKind {
    pub fn flip(self) -> ExtremeKind {
        match self {
            ExtremeKind::Min => ExtremeKind::Max,
            ExtremeKind::Max => ExtremeKind::Min,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ExtremeKind::Min => "min",
            ExtremeKind::Max => "max",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub genes: Vec<String>,
    /// One value row per gene, aligned with `times`.
    pub values: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn gene_index(&self, gene: &str) -> Result<usize> {
        self.genes
            .iter()
            .position(|g| g == gene)
            .ok_or_else(|| Error::TimeSeries(format!("no gene `{gene}` in series")))
    }

    /// Restrict to the named genes, optionally renaming through a proxy map
    /// (`column name -> node name`).
    pub fn select(&self, picks: &[(String, String)]) -> Result<TimeSeries> {
        let mut genes = Vec::new();
        let mut values = Vec::new();
        for (col, name) in picks {
            let gi = self.gene_index(col)?;
            genes.push(name.clone());
            values.push(self.values[gi].clone());
        }
        Ok(TimeSeries {
            times: self.times.clone(),
            genes,
            values,
        })
    }
}

/// Parse a `time,<gene>,<gene>,...` CSV.
pub fn load_csv(path: &Path) -> Result<TimeSeries> {
    let file = std::fs::File::open(path)?;
    load_csv_reader(std::io::BufReader::new(file))
}

pub fn load_csv_reader<R: BufRead>(reader: R) -> Result<TimeSeries> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::TimeSeries("empty file".into()))??;
    let mut cols = header.split(',').map(str::trim);
    match cols.next() {
        Some("time") => {}
        other => {
            return Err(Error::TimeSeries(format!(
                "header must start with `time`, got {other:?}"
            )))
        }
    }
    let genes: Vec<String> = cols.map(str::to_string).collect();
    if genes.is_empty() {
        return Err(Error::TimeSeries("no gene columns".into()));
    }
    let mut times = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); genes.len()];
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != genes.len() + 1 {
            return Err(Error::TimeSeries(format!(
                "row {}: expected {} fields, got {}",
                lineno + 2,
                genes.len() + 1,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            let v: f64 = s
                .parse()
                .map_err(|_| Error::TimeSeries(format!("row {}: bad number `{s}`", lineno + 2)))?;
            if !v.is_finite() {
                return Err(Error::TimeSeries(format!(
                    "row {}: non-finite value",
                    lineno + 2
                )));
            }
            Ok(v)
        };
        let t = parse(fields[0])?;
        if let Some(&last) = times.last() {
            if t <= last {
                return Err(Error::TimeSeries(format!(
                    "row {}: time column must increase strictly ({last} then {t})",
                    lineno + 2
                )));
            }
        }
        times.push(t);
        for (g, f) in fields[1..].iter().enumerate() {
            values[g].push(parse(f)?);
        }
    }
    if times.len() < 3 {
        return Err(Error::TimeSeries(format!(
            "need at least 3 samples, got {}",
            times.len()
        )));
    }
    Ok(TimeSeries {
        times,
        genes,
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalInterval {
    pub gene: String,
    pub kind: ExtremeKind,
    /// Representative extremum time (a sample point).
    pub time: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub epsilon: f64,
}

impl ExtremalInterval {
    pub fn overlaps(&self, other: &ExtremalInterval) -> bool {
        self.t_lo <= other.t_hi && other.t_lo <= self.t_hi
    }
}

/// Alternating raw extrema of a sampled curve, endpoints included and
/// classified by first/last movement. Returns sample indices.
fn raw_extrema(y: &[f64]) -> Vec<(usize, ExtremeKind)> {
    // Compress plateaus, keeping the first index of each run.
    let mut kept: Vec<usize> = vec![0];
    for i in 1..y.len() {
        if y[i] != y[*kept.last().unwrap()] {
            kept.push(i);
        }
    }
    if kept.len() < 2 {
        return Vec::new(); // constant series
    }
    let mut events = Vec::new();
    let first_up = y[kept[1]] > y[kept[0]];
    events.push((
        kept[0],
        if first_up {
            ExtremeKind::Min
        } else {
            ExtremeKind::Max
        },
    ));
    for w in 1..kept.len() - 1 {
        let a = y[kept[w - 1]];
        let b = y[kept[w]];
        let c = y[kept[w + 1]];
        if b > a && b > c {
            events.push((kept[w], ExtremeKind::Max));
        } else if b < a && b < c {
            events.push((kept[w], ExtremeKind::Min));
        }
    }
    let last = *kept.last().unwrap();
    let prev = kept[kept.len() - 2];
    let last_up = y[last] > y[prev];
    events.push((
        y.len() - 1,
        if last_up {
            ExtremeKind::Max
        } else {
            ExtremeKind::Min
        },
    ));
    events
}

/// Merge away extrema whose prominence falls below `2 * eps * range`,
/// smallest gap first. Endpoint events are absorbed in place: the endpoint
/// survives with flipped kind when its wiggle partner is removed.
fn prune(events: &mut Vec<(usize, ExtremeKind)>, y: &[f64], threshold: f64) {
    loop {
        if events.len() <= 2 {
            return;
        }
        let mut best: Option<(usize, f64)> = None;
        for i in 0..events.len() - 1 {
            let gap = (y[events[i].0] - y[events[i + 1].0]).abs();
            if gap < threshold && best.map_or(true, |(_, g)| gap < g) {
                best = Some((i, gap));
            }
        }
        let Some((i, _)) = best else { return };
        if i == 0 {
            let kind = events[0].1.flip();
            events.remove(1);
            events[0].1 = kind;
        } else if i + 1 == events.len() - 1 {
            let kind = events[events.len() - 1].1.flip();
            let n = events.len();
            events.remove(n - 2);
            let n = events.len();
            events[n - 1].1 = kind;
        } else {
            events.drain(i..=i + 1);
        }
    }
}

/// Crossing time of level `level` on the interpolated curve, scanning from
/// sample `from` in direction `step` (±1); series endpoint if never crossed.
fn crossing(times: &[f64], y: &[f64], from: usize, step: isize, level: f64, below: bool) -> f64 {
    // `below`: the curve near the extremum is below `level` (minimum case).
    let n = y.len() as isize;
    let mut i = from as isize;
    loop {
        let j = i + step;
        if j < 0 || j >= n {
            return times[i as usize];
        }
        let (a, b) = (y[i as usize], y[j as usize]);
        let crossed = if below { b >= level } else { b <= level };
        if crossed {
            let (ta, tb) = (times[i as usize], times[j as usize]);
            if (b - a).abs() < f64::EPSILON {
                return tb;
            }
            let s = (level - a) / (b - a);
            return ta + s * (tb - ta);
        }
        i = j;
    }
}

/// Extremal intervals of one gene at noise fraction `eps`.
pub fn extremal_intervals(ts: &TimeSeries, gene: &str, eps: f64) -> Result<Vec<ExtremalInterval>> {
    if !(0.0..0.5).contains(&eps) || eps <= 0.0 {
        return Err(Error::TimeSeries(format!(
            "noise fraction must lie in (0, 0.5), got {eps}"
        )));
    }
    let gi = ts.gene_index(gene)?;
    let y = &ts.values[gi];
    let lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if range == 0.0 {
        return Ok(Vec::new());
    }
    let band = eps * range;
    let mut events = raw_extrema(y);
    prune(&mut events, y, 2.0 * band);
    Ok(events
        .into_iter()
        .map(|(idx, kind)| {
            let value = y[idx];
            let (level, below) = match kind {
                ExtremeKind::Min => (value + 2.0 * band, true),
                ExtremeKind::Max => (value - 2.0 * band, false),
            };
            let t_lo = crossing(&ts.times, y, idx, -1, level, below);
            let t_hi = crossing(&ts.times, y, idx, 1, level, below);
            ExtremalInterval {
                gene: gene.to_string(),
                kind,
                time: ts.times[idx],
                t_lo,
                t_hi,
                epsilon: eps,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatternEvent {
    pub gene: String,
    pub kind: ExtremeKind,
    /// Occurrence ordinal of this (gene, kind) pair, 0-based in time order.
    pub ordinal: usize,
}

impl std::fmt::Display for PatternEvent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}_{}", self.gene, self.kind.as_str())?;
        if self.ordinal > 0 {
            write!(f, "[{}]", self.ordinal)?;
        }
        Ok(())
    }
}

/// Strict partial order of extremum events; at most 64 events.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternDiagram {
    events: Vec<PatternEvent>,
    /// `order[a] & (1 << b) != 0` iff event `a` precedes event `b`;
    /// transitively closed.
    below: Vec<u64>,
}

/// Serialized form: events plus cover relations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternRecord {
    pub events: Vec<PatternEvent>,
    pub covers: Vec<(usize, usize)>,
}

impl PatternDiagram {
    pub fn events(&self) -> &[PatternEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// True iff event `a` strictly precedes event `b`.
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.below[a] >> b & 1 == 1
    }

    /// Predecessor mask of event `e`.
    pub fn preds(&self, e: usize) -> u64 {
        (0..self.events.len())
            .filter(|&a| self.precedes(a, e))
            .fold(0u64, |m, a| m | 1 << a)
    }

    pub fn from_events_and_relation(
        events: Vec<PatternEvent>,
        mut relation: Vec<(usize, usize)>,
    ) -> Result<PatternDiagram> {
        if events.len() > 64 {
            return Err(Error::Spec(format!(
                "pattern diagrams are limited to 64 events, got {}",
                events.len()
            )));
        }
        let n = events.len();
        let mut below = vec![0u64; n];
        relation.sort_unstable();
        relation.dedup();
        for &(a, b) in &relation {
            if a >= n || b >= n {
                return Err(Error::Spec(format!("cover ({a},{b}) out of range")));
            }
            below[a] |= 1 << b;
        }
        // Transitive closure.
        for mid in 0..n {
            for a in 0..n {
                if below[a] >> mid & 1 == 1 {
                    below[a] |= below[mid];
                }
            }
        }
        for (a, row) in below.iter().enumerate() {
            if row >> a & 1 == 1 {
                return Err(Error::Spec(format!("event {a} precedes itself")));
            }
        }
        Ok(PatternDiagram { events, below })
    }

    /// Cover relations (transitive reduction), sorted.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.events.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.precedes(a, b)
                    && !(0..n).any(|c| self.precedes(a, c) && self.precedes(c, b))
                {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn to_record(&self) -> PatternRecord {
        PatternRecord {
            events: self.events.clone(),
            covers: self.covers(),
        }
    }

    pub fn from_record(rec: PatternRecord) -> Result<PatternDiagram> {
        PatternDiagram::from_events_and_relation(rec.events, rec.covers)
    }

    /// Genes mentioned by the pattern, in first-appearance order.
    pub fn genes(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in &self.events {
            if !out.contains(&e.gene) {
                out.push(e.gene.clone());
            }
        }
        out
    }
}

/// Build the pattern diagram for a set of extremal intervals (any genes,
/// each gene's intervals in time order).
pub fn build_pattern_diagram(intervals: &[ExtremalInterval]) -> Result<PatternDiagram> {
    // Stable event list: sort by representative time, then by gene
    // first-appearance order for reproducibility.
    let mut gene_rank: BTreeMap<&str, usize> = BTreeMap::new();
    for iv in intervals {
        let next = gene_rank.len();
        gene_rank.entry(iv.gene.as_str()).or_insert(next);
    }
    let mut idx: Vec<usize> = (0..intervals.len()).collect();
    idx.sort_by(|&a, &b| {
        intervals[a]
            .time
            .partial_cmp(&intervals[b].time)
            .unwrap()
            .then_with(|| gene_rank[intervals[a].gene.as_str()].cmp(&gene_rank[intervals[b].gene.as_str()]))
    });
    let ordered: Vec<&ExtremalInterval> = idx.iter().map(|&i| &intervals[i]).collect();

    let mut counts: BTreeMap<(String, ExtremeKind), usize> = BTreeMap::new();
    let events: Vec<PatternEvent> = ordered
        .iter()
        .map(|iv| {
            let c = counts.entry((iv.gene.clone(), iv.kind)).or_insert(0);
            let ev = PatternEvent {
                gene: iv.gene.clone(),
                kind: iv.kind,
                ordinal: *c,
            };
            *c += 1;
            ev
        })
        .collect();

    let n = events.len();
    let mut relation = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let (ia, ib) = (ordered[a], ordered[b]);
            if ia.gene == ib.gene {
                if a < b {
                    relation.push((a, b)); // chain order within one gene
                }
            } else if ia.t_hi < ib.t_lo {
                relation.push((a, b)); // strictly disjoint intervals
            }
        }
    }
    PatternDiagram::from_events_and_relation(events, relation)
}

/// Enumerate linear extensions in lexicographic (event index) order, up to
/// `cap`; the flag reports whether enumeration was cut short.
pub fn linear_extensions(pd: &PatternDiagram, cap: usize) -> (Vec<Vec<usize>>, bool) {
    let n = pd.len();
    let full: u64 = if n == 64 { u64::MAX } else { (1 << n) - 1 };
    let preds: Vec<u64> = (0..n).map(|e| pd.preds(e)).collect();
    let mut out = Vec::new();
    let mut capped = false;
    let mut prefix = Vec::with_capacity(n);
    fn rec(
        consumed: u64,
        full: u64,
        preds: &[u64],
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
        capped: &mut bool,
    ) {
        if *capped {
            return;
        }
        if consumed == full {
            if out.len() == cap {
                *capped = true;
            } else {
                out.push(prefix.clone());
            }
            return;
        }
        for e in 0..preds.len() {
            if consumed >> e & 1 == 0 && preds[e] & !consumed == 0 {
                prefix.push(e);
                rec(consumed | 1 << e, full, preds, prefix, out, cap, capped);
                prefix.pop();
                if *capped {
                    return;
                }
            }
        }
    }
    rec(0, full, &preds, &mut prefix, &mut out, cap, &mut capped);
    (out, capped)
}
