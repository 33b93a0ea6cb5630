//! Regulatory network description: parsing, validation, canonical form.
//!
//! A network is declared one node per line:
//!
//! ```text
//! S : (S)(W)(~N)(~C)
//! N : (S)
//! ```
//!
//! The right-hand side is a product of parenthesized sum-groups; each group is
//! a `+`-separated list of node names, `~` marking repression. The production
//! rate of a node is the product over its groups of the sum of step-function
//! contributions within each group.
//!
//! Node indices follow declaration order. The canonical out-edge order of a
//! source node lists its targets in the order they are first reachable while
//! reading the file top to bottom (left to right within a line); this fixes
//! the mapping between out-edge slots and threshold labels for every
//! downstream computation.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Activating,
    Repressing,
}

/// One in-edge of a node: where it comes from and how it acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InEdge {
    pub source: usize,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegulatoryNetwork {
    names: Vec<String>,
    /// Per target node: sum-groups of in-edges, in declaration order.
    interaction: Vec<Vec<Vec<InEdge>>>,
    /// Per source node: target indices in canonical out-edge order.
    out_order: Vec<Vec<usize>>,
}

impl RegulatoryNetwork {
    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    /// Sum-groups of in-edges of node `i`.
    pub fn groups(&self, i: usize) -> &[Vec<InEdge>] {
        &self.interaction[i]
    }

    /// In-edges of node `i`, flattened in declaration order.
    pub fn in_edges(&self, i: usize) -> Vec<InEdge> {
        self.interaction[i].iter().flatten().copied().collect()
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.interaction[i].iter().map(|g| g.len()).sum()
    }

    /// Targets of node `i` in canonical out-edge order.
    pub fn out_order(&self, i: usize) -> &[usize] {
        &self.out_order[i]
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out_order[i].len()
    }

    /// All edges as (source, target, sign), grouped by target in declaration order.
    pub fn edges(&self) -> Vec<(usize, usize, Sign)> {
        let mut out = Vec::new();
        for (target, groups) in self.interaction.iter().enumerate() {
            for g in groups {
                for e in g {
                    out.push((e.source, target, e.sign));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        (0..self.node_count()).map(|i| self.in_degree(i)).sum()
    }

    /// Sign of the edge `source -> target`, if present.
    pub fn edge_sign(&self, source: usize, target: usize) -> Option<Sign> {
        self.interaction[target]
            .iter()
            .flatten()
            .find(|e| e.source == source)
            .map(|e| e.sign)
    }

    /// Out-edge slot of `source -> target` within the canonical out order.
    pub fn out_slot(&self, source: usize, target: usize) -> Option<usize> {
        self.out_order[source].iter().position(|&t| t == target)
    }

    /// Canonical text form; parsing it back yields an identical network.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        for (i, groups) in self.interaction.iter().enumerate() {
            s.push_str(&self.names[i]);
            s.push_str(" : ");
            for g in groups {
                s.push('(');
                for (k, e) in g.iter().enumerate() {
                    if k > 0 {
                        s.push_str(" + ");
                    }
                    if e.sign == Sign::Repressing {
                        s.push('~');
                    }
                    s.push_str(&self.names[e.source]);
                }
                s.push(')');
            }
            s.push('\n');
        }
        s
    }

    /// SHA-256 of the canonical serialization, used to tie sweep results to
    /// the network they were computed from.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.serialize().as_bytes());
        hex_string(&h.finalize())
    }
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Number of discrete states of node `i`: out-degree + 1.
pub fn node_state_count(net: &RegulatoryNetwork, i: usize) -> Result<usize> {
    if i >= net.node_count() {
        return Err(Error::NodeIndexOutOfRange {
            index: i,
            count: net.node_count(),
        });
    }
    Ok(net.out_degree(i) + 1)
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parse and validate a network description.
pub fn parse_network(text: &str) -> Result<RegulatoryNetwork> {
    struct Decl<'a> {
        line_no: usize,
        name: &'a str,
        expr: &'a str,
    }

    let mut decls: Vec<Decl> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, expr) = line.split_once(':').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: "expected `Name : <expr>`".into(),
        })?;
        let name = name.trim();
        if !valid_name(name) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("invalid node name `{name}`"),
            });
        }
        if decls.iter().any(|d| d.name == name) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate declaration of node `{name}`"),
            });
        }
        decls.push(Decl {
            line_no,
            name,
            expr: expr.trim(),
        });
    }

    let names: Vec<String> = decls.iter().map(|d| d.name.to_string()).collect();
    let index_of = |name: &str, line: usize| -> Result<usize> {
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Parse {
                line,
                msg: format!("unknown node name `{name}`"),
            })
    };

    let mut interaction: Vec<Vec<Vec<InEdge>>> = Vec::with_capacity(decls.len());
    for d in &decls {
        if d.expr.is_empty() {
            return Err(Error::Parse {
                line: d.line_no,
                msg: format!("empty expression for node `{}`", d.name),
            });
        }
        let mut groups: Vec<Vec<InEdge>> = Vec::new();
        let mut rest = d.expr;
        while !rest.is_empty() {
            rest = rest.trim_start();
            if rest.is_empty() {
                break;
            }
            if !rest.starts_with('(') {
                return Err(Error::Parse {
                    line: d.line_no,
                    msg: format!("expected `(` in expression for `{}`", d.name),
                });
            }
            let close = rest.find(')').ok_or_else(|| Error::Parse {
                line: d.line_no,
                msg: "unbalanced parentheses".into(),
            })?;
            let body = &rest[1..close];
            rest = &rest[close + 1..];
            let mut group = Vec::new();
            for term in body.split('+') {
                let term = term.trim();
                if term.is_empty() {
                    return Err(Error::Parse {
                        line: d.line_no,
                        msg: "empty term in sum-group".into(),
                    });
                }
                let (sign, name) = match term.strip_prefix('~') {
                    Some(n) => (Sign::Repressing, n.trim()),
                    None => (Sign::Activating, term),
                };
                if !valid_name(name) {
                    return Err(Error::Parse {
                        line: d.line_no,
                        msg: format!("invalid term `{term}`"),
                    });
                }
                let source = index_of(name, d.line_no)?;
                group.push(InEdge { source, sign });
            }
            groups.push(group);
        }
        if groups.is_empty() || groups.iter().all(|g| g.is_empty()) {
            return Err(Error::Parse {
                line: d.line_no,
                msg: format!("empty expression for node `{}`", d.name),
            });
        }
        // At most one edge per ordered (source, target) pair.
        let mut seen = std::collections::HashSet::new();
        for e in groups.iter().flatten() {
            if !seen.insert(e.source) {
                return Err(Error::Parse {
                    line: d.line_no,
                    msg: format!(
                        "duplicate edge {} -> {}",
                        names[e.source], d.name
                    ),
                });
            }
        }
        interaction.push(groups);
    }

    // Constant-input nodes have no defined production band; reject them.
    for (i, groups) in interaction.iter().enumerate() {
        if groups.iter().map(|g| g.len()).sum::<usize>() == 0 {
            return Err(Error::Parse {
                line: decls[i].line_no,
                msg: format!("node `{}` has no in-edges", names[i]),
            });
        }
    }

    // Canonical out-edge order: first mention reading top to bottom.
    let mut out_order: Vec<Vec<usize>> = vec![Vec::new(); names.len()];
    for (target, groups) in interaction.iter().enumerate() {
        for e in groups.iter().flatten() {
            if !out_order[e.source].contains(&target) {
                out_order[e.source].push(target);
            }
        }
    }

    Ok(RegulatoryNetwork {
        names,
        interaction,
        out_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TOGGLE: &str = "X1 : (~X2)\nX2 : (~X1)\n";
    pub(crate) const THREE_NODE: &str = "X : (Y)(~Z)\nY : (~X)\nZ : (~Y)\n";
    pub(crate) const MINI_WAVEPOOL: &str = "\
Swi4 : (~Nrm1)(~Clb2)(Swi4)(Swi5)
Nrm1 : (Swi4)
Ndd1 : (Swi4)(Clb2)
Swi5 : (~Clb2)(Ndd1)
Clb2 : (Ndd1)
";

    #[test]
    fn toggle_switch_parses() {
        let net = parse_network(TOGGLE).unwrap();
        assert_eq!(net.node_count(), 2);
        assert_eq!(net.edge_count(), 2);
        assert_eq!(net.edge_sign(1, 0), Some(Sign::Repressing));
        assert_eq!(net.edge_sign(0, 1), Some(Sign::Repressing));
        assert_eq!(node_state_count(&net, 0).unwrap(), 2);
    }

    #[test]
    fn one_node_self_repressor() {
        let net = parse_network("X : (~X)\n").unwrap();
        assert_eq!(net.node_count(), 1);
        assert_eq!(net.edge_count(), 1);
        assert_eq!(net.edge_sign(0, 0), Some(Sign::Repressing));
    }

    #[test]
    fn mini_wavepool_structure() {
        let net = parse_network(MINI_WAVEPOOL).unwrap();
        assert_eq!(net.node_count(), 5);
        assert_eq!(net.edge_count(), 10);
        let s = net.node_index("Swi4").unwrap();
        // Four in-edges, each its own product group.
        assert_eq!(net.groups(s).len(), 4);
        assert!(net.groups(s).iter().all(|g| g.len() == 1));
        assert_eq!(net.in_degree(s), 4);
        // State counts: 3 out-edges for Swi4 and Clb2, 2 for Ndd1, 1 each for
        // Nrm1 and Swi5.
        let states: Vec<usize> = (0..5).map(|i| node_state_count(&net, i).unwrap()).collect();
        assert_eq!(states, vec![4, 2, 3, 2, 4]);
        // Clb2 thresholds map to Swi4, Ndd1, Swi5 in file-mention order.
        let c = net.node_index("Clb2").unwrap();
        let order: Vec<&str> = net.out_order(c).iter().map(|&t| net.name(t)).collect();
        assert_eq!(order, vec!["Swi4", "Ndd1", "Swi5"]);
    }

    #[test]
    fn degree_sums_match_edge_count() {
        let net = parse_network(MINI_WAVEPOOL).unwrap();
        let in_sum: usize = (0..5).map(|i| net.in_degree(i)).sum();
        let out_sum: usize = (0..5).map(|i| net.out_degree(i)).sum();
        assert_eq!(in_sum, net.edge_count());
        assert_eq!(out_sum, net.edge_count());
    }

    #[test]
    fn round_trip_is_identical() {
        for text in [TOGGLE, THREE_NODE, MINI_WAVEPOOL, "A : (B + ~C)(A)\nB : (A)\nC : (B)\n"] {
            let net = parse_network(text).unwrap();
            let again = parse_network(&net.serialize()).unwrap();
            assert_eq!(net, again);
            assert_eq!(net.fingerprint(), again.fingerprint());
        }
    }

    #[test]
    fn rejects_unknown_node() {
        let err = parse_network("X : (Q)\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        assert!(err.to_string().contains("unknown node name"));
    }

    #[test]
    fn rejects_duplicate_edge() {
        let err = parse_network("X : (Y)(Y)\nY : (X)\n").unwrap_err();
        assert!(err.to_string().contains("duplicate edge"));
    }

    #[test]
    fn rejects_duplicate_declaration() {
        let err = parse_network("X : (X)\nX : (X)\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_empty_expression() {
        let err = parse_network("X :\n").unwrap_err();
        assert!(err.to_string().contains("empty expression"));
    }

    #[test]
    fn node_state_count_range_check() {
        let net = parse_network(TOGGLE).unwrap();
        assert!(node_state_count(&net, 7).is_err());
    }
}
