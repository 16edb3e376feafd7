//! Labeled action graphs: free actions of A and B on a common finite vertex
//! set, with u-cycle analysis and the structural property checks used by
//! the tower construction.
//!
//! Edges are implicit. Vertex `p` has one outgoing edge `p → p∘g` for every
//! nonidentity element `g` of either factor, and the component `A(p)` is the
//! A-orbit of `p`. Freeness of both actions is exactly the requirement that
//! every such component is a copy of the Cayley graph of its factor.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::actions::{cycles, ActionDefect, ActionTables};
use crate::group::lcm;
use crate::word::{Factor, FreeProduct, Syllable, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid action graph: {0}")]
    Invalid(ActionDefect),
    #[error("cycle analysis needs a nonempty word")]
    EmptyWord,
    #[error("path is malformed: {0}")]
    BadPath(String),
    #[error("malformed graph file: {0}")]
    BadFile(String),
}

/// A path given by its start vertex and the labels of its edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathRef {
    pub start: usize,
    pub labels: Vec<Syllable>,
}

impl PathRef {
    pub fn empty_at(start: usize) -> Self {
        PathRef { start, labels: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// A directed edge, identified by its origin and label.
pub type Edge = (usize, Syllable);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionGraph {
    tables: ActionTables,
}

/// Cycle data of one word on one graph.
#[derive(Debug, Clone)]
pub struct WordCycles {
    /// Vertex sets of the cycles of p ↦ p∘w, in canonical order.
    pub cycles: Vec<Vec<usize>>,
    pub lengths: Vec<u64>,
    pub max_len: u64,
    /// Every length divides the maximal one.
    pub lengths_divide_max: bool,
    /// No cycle has near edges.
    pub no_near_edges: bool,
}

impl WordCycles {
    /// Indices into `cycles` of the cycles of maximal length.
    pub fn maximal(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.cycles.len()).filter(|&i| self.lengths[i] == self.max_len)
    }

    pub fn order(&self) -> u64 {
        self.lengths.iter().copied().fold(1, lcm)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub free: bool,
    pub p3u: bool,
    pub p3v: bool,
    pub p4: bool,
    pub p5u: bool,
    pub p5v: bool,
    pub p6: bool,
    pub max_u_len: u64,
    pub max_v_len: u64,
    pub u_lengths: Vec<u64>,
    pub v_lengths: Vec<u64>,
}

impl ActionGraph {
    /// Validates the tables; freeness is enforced when `require_free`.
    pub fn from_actions(fp: &FreeProduct, tables: ActionTables, require_free: bool) -> Result<Self, GraphError> {
        if tables.degree == 0 {
            return Err(GraphError::Invalid(ActionDefect::Shape("no vertices".into())));
        }
        match tables.defects(fp, require_free).into_iter().next() {
            Some(d) => Err(GraphError::Invalid(d)),
            None => Ok(ActionGraph { tables }),
        }
    }

    pub fn tables(&self) -> &ActionTables {
        &self.tables
    }

    pub fn into_tables(self) -> ActionTables {
        self.tables
    }

    pub fn vertex_count(&self) -> usize {
        self.tables.degree
    }

    pub fn act_word(&self, p: usize, w: &Word) -> usize {
        self.tables.act_word(p, w)
    }

    /// Cycle type of p ↦ p∘w; lengths count periods of w, not edges.
    pub fn cycle_lengths(&self, w: &Word) -> Result<Vec<u64>, GraphError> {
        if w.is_empty() {
            return Err(GraphError::EmptyWord);
        }
        Ok(cycles(&self.tables.word_perm(w)).iter().map(|c| c.len() as u64).collect())
    }

    pub fn image_order(&self, w: &Word) -> Result<u64, GraphError> {
        Ok(self.cycle_lengths(w)?.into_iter().fold(1, lcm))
    }

    pub fn a_orbit(&self, p: usize) -> Vec<usize> {
        self.orbit(p, Factor::A)
    }

    pub fn b_orbit(&self, p: usize) -> Vec<usize> {
        self.orbit(p, Factor::B)
    }

    pub fn orbit(&self, p: usize, factor: Factor) -> Vec<usize> {
        let mut o: Vec<usize> = self.tables.table(factor).iter().map(|row| row[p]).collect();
        o.sort_unstable();
        o.dedup();
        o
    }

    /// Orbit identifier (smallest member) for every vertex.
    fn orbit_ids(&self, factor: Factor) -> Vec<usize> {
        (0..self.vertex_count())
            .map(|p| self.tables.table(factor).iter().map(|row| row[p]).min().unwrap())
            .collect()
    }

    /// The closed edge path of the w-cycle through phase-0 vertex `start`.
    pub fn cycle_edges(&self, w: &Word, start: usize, periods: u64) -> Vec<Edge> {
        let mut edges = Vec::with_capacity(periods as usize * w.len());
        let mut x = start;
        for _ in 0..periods {
            for &s in w.syllables() {
                edges.push((x, s));
                x = self.tables.act(x, s);
            }
        }
        edges
    }

    /// Edges of a path, in order.
    pub fn path_edges(&self, path: &PathRef) -> Result<Vec<Edge>, GraphError> {
        if path.start >= self.vertex_count() {
            return Err(GraphError::BadPath(format!("start {} out of range", path.start)));
        }
        let mut x = path.start;
        let mut edges = Vec::with_capacity(path.len());
        for &s in &path.labels {
            let rows = self.tables.table(s.factor);
            if s.element == 0 || s.element >= rows.len() {
                return Err(GraphError::BadPath(format!("label {s} is not a nonidentity element")));
            }
            edges.push((x, s));
            x = self.tables.act(x, s);
        }
        Ok(edges)
    }

    pub fn path_end(&self, path: &PathRef) -> usize {
        path.labels.iter().fold(path.start, |x, &s| self.tables.act(x, s))
    }

    /// Full cycle analysis of a nonempty word.
    pub fn word_cycles(&self, w: &Word) -> Result<WordCycles, GraphError> {
        if w.is_empty() {
            return Err(GraphError::EmptyWord);
        }
        let cycles = cycles(&self.tables.word_perm(w));
        let lengths: Vec<u64> = cycles.iter().map(|c| c.len() as u64).collect();
        let max_len = lengths.iter().copied().max().unwrap_or(1);
        let lengths_divide_max = lengths.iter().all(|l| max_len % l == 0);
        let ids = [self.orbit_ids(Factor::A), self.orbit_ids(Factor::B)];
        let no_near_edges = cycles.iter().all(|c| {
            let edges = self.cycle_edges(w, c[0], c.len() as u64);
            no_repeated_orbit(&edges, &ids)
        });
        Ok(WordCycles { cycles, lengths, max_len, lengths_divide_max, no_near_edges })
    }

    /// True when no w-cycle has two edges in one A- or B-component.
    pub fn near_edges_free(&self, w: &Word) -> Result<bool, GraphError> {
        Ok(self.word_cycles(w)?.no_near_edges)
    }

    /// Per-cycle near-edge verdicts, in canonical cycle order.
    pub fn near_edges_per_cycle(&self, w: &Word) -> Result<Vec<bool>, GraphError> {
        if w.is_empty() {
            return Err(GraphError::EmptyWord);
        }
        let ids = [self.orbit_ids(Factor::A), self.orbit_ids(Factor::B)];
        Ok(cycles(&self.tables.word_perm(w))
            .iter()
            .map(|c| no_repeated_orbit(&self.cycle_edges(w, c[0], c.len() as u64), &ids))
            .collect())
    }

    /// Whether the path occurs as a contiguous run of the given w-cycle's
    /// closed edge path.
    pub fn cycle_contains(&self, w: &Word, cycle: &[usize], path: &[Edge]) -> bool {
        if path.is_empty() {
            return true;
        }
        let edges = self.cycle_edges(w, cycle[0], cycle.len() as u64);
        contains_cyclic(&edges, path)
    }

    /// Checks properties 3)–6) of the tower construction for the pair (u, v).
    pub fn property_report(&self, u: &Word, v: &Word, path: Option<&PathRef>) -> Result<PropertyReport, GraphError> {
        let uc = self.word_cycles(u)?;
        let vc = self.word_cycles(v)?;
        let p4 = match path {
            None => true,
            Some(path) => {
                let edges = self.path_edges(path)?;
                uc.maximal().any(|i| self.cycle_contains(u, &uc.cycles[i], &edges))
                    && vc.maximal().all(|i| self.cycle_contains(v, &vc.cycles[i], &edges))
            }
        };
        Ok(PropertyReport {
            free: true,
            p3u: uc.lengths_divide_max,
            p3v: vc.lengths_divide_max,
            p4,
            p5u: uc.no_near_edges,
            p5v: vc.no_near_edges,
            p6: uc.max_len == vc.max_len,
            max_u_len: uc.max_len,
            max_v_len: vc.max_len,
            u_lengths: uc.lengths,
            v_lengths: vc.lengths,
        })
    }

    /// Deterministic DOT rendering; highlighted path edges are drawn bold red.
    pub fn to_dot(&self, highlight: Option<&PathRef>) -> String {
        let marked: BTreeMap<Edge, usize> = highlight
            .and_then(|p| self.path_edges(p).ok())
            .unwrap_or_default()
            .into_iter()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        let mut out = String::from("digraph G {\n");
        for p in 0..self.vertex_count() {
            let _ = writeln!(out, "  v{p};");
        }
        for factor in [Factor::A, Factor::B] {
            for (element, row) in self.tables.table(factor).iter().enumerate().skip(1) {
                for (p, &q) in row.iter().enumerate() {
                    let s = Syllable { factor, element };
                    let style = match marked.get(&(p, s)) {
                        Some(_) => ", color=red, penwidth=2",
                        None => "",
                    };
                    let _ = writeln!(out, "  v{p} -> v{q} [label=\"{s}\"{style}];");
                }
            }
        }
        out.push_str("}\n");
        out
    }

    /// `V |A| |B|`, then |A| rows and |B| rows of V vertex indices.
    pub fn to_text(&self) -> String {
        let t = &self.tables;
        let mut out = format!("{} {} {}\n", t.degree, t.a.len(), t.b.len());
        t.write_rows(&mut out, Factor::A);
        t.write_rows(&mut out, Factor::B);
        out
    }

    pub fn from_text(fp: &FreeProduct, text: &str) -> Result<Self, GraphError> {
        let bad = |s: &str| GraphError::BadFile(s.to_string());
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header: Vec<usize> = parse_row(lines.next().ok_or_else(|| bad("missing header"))?)?;
        let [v, na, nb] = header[..] else {
            return Err(bad("header must be `V |A| |B|`"));
        };
        if na != fp.a().size() || nb != fp.b().size() {
            return Err(bad("factor orders do not match the groups"));
        }
        let mut take = |n: usize| -> Result<Vec<Vec<usize>>, GraphError> {
            (0..n).map(|_| parse_row(lines.next().ok_or_else(|| bad("missing row"))?)).collect()
        };
        let a = take(na)?;
        let b = take(nb)?;
        if lines.next().is_some() {
            return Err(bad("trailing data"));
        }
        Self::from_actions(fp, ActionTables { degree: v, a, b }, true)
    }
}

fn parse_row(line: &str) -> Result<Vec<usize>, GraphError> {
    line.split_whitespace()
        .map(|t| t.parse().map_err(|_| GraphError::BadFile(format!("bad integer {t:?}"))))
        .collect()
}

fn no_repeated_orbit(edges: &[Edge], ids: &[Vec<usize>; 2]) -> bool {
    let mut seen = [std::collections::HashSet::new(), std::collections::HashSet::new()];
    edges.iter().all(|&(x, s)| {
        let k = s.factor as usize;
        seen[k].insert(ids[k][x])
    })
}

/// Occurrence of `needle` as a contiguous run of the cyclic sequence `hay`.
fn contains_cyclic(hay: &[Edge], needle: &[Edge]) -> bool {
    let n = hay.len();
    (0..n).any(|i| hay[i] == needle[0] && needle.iter().enumerate().all(|(j, e)| hay[(i + j) % n] == *e))
}
