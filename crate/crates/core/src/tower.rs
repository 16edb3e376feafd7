//! The inductive tower of action graphs Γ₀, Γ₁, … built by cyclic-copy
//! surgery, stopping as soon as some intermediate graph separates the orders
//! of u and its rival word.
//!
//! Stage n carries a path Rₙ of n edges that lies on a chosen maximal
//! u-cycle. A step takes t copies of Γₙ (t = length of that cycle), cuts the
//! edges of the factor component containing the next cycle edge at the end
//! of Rₙ, and reconnects them from copy k into copy k+1. The chosen u-cycle
//! then runs through all copies and grows t-fold; every other u-cycle either
//! keeps its length or grows t-fold as well. When the rival's maximal cycles
//! do not all pass the extended path, a second surgery on the other factor
//! follows.

use thiserror::Error;

use crate::actions::ActionTables;
use crate::certificate::{Certificate, Provenance};
use crate::graph::{ActionGraph, GraphError, PathRef, WordCycles};
use crate::search::{Budget, CandidateStream};
use crate::word::{Factor, FreeProduct, Syllable, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error("u must be cyclically reduced of length at least 2")]
    NotHyperbolic,
    #[error("budget exhausted after {examined} candidates ({spent} vertex units)")]
    BudgetExhausted { examined: usize, spent: u64 },
    #[error("next graph would have {needed} vertices, over the limit {limit}")]
    TooLarge { needed: u64, limit: u64 },
    #[error("tower invariant violated at stage {stage}: {detail}")]
    Breach { stage: usize, detail: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The word whose orders are compared with u's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rival {
    /// Only u's cycle structure is tracked.
    None,
    /// A hyperbolic word tracked with the full set of properties.
    Tracked(Word),
    /// A word (typically a factor element) compared by image order only.
    OrderOnly(Word),
}

impl Rival {
    fn word(&self) -> Option<&Word> {
        match self {
            Rival::None => None,
            Rival::Tracked(v) | Rival::OrderOnly(v) => Some(v),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TowerState {
    pub graph: ActionGraph,
    /// Rₙ, lying on the chosen maximal u-cycle.
    pub path: PathRef,
    pub n: usize,
    /// Position of `path.start` within u, i.e. Rₙ starts after reading u[..phase].
    pub phase: usize,
    /// Phase-0 vertex of the chosen maximal u-cycle.
    pub cycle_base: usize,
    /// Length of the chosen cycle in u-periods.
    pub t: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurgeryRecord {
    pub copies: usize,
    pub anchor: usize,
    pub side: Factor,
    pub vertices_before: usize,
    pub vertices_after: usize,
    pub max_u_before: u64,
    pub max_u_after: u64,
}

#[derive(Debug, Clone)]
pub enum StepOutcome {
    Advanced { state: TowerState, surgeries: Vec<SurgeryRecord> },
    Separated(Certificate),
}

#[derive(Debug, Clone)]
pub enum Gamma0Outcome {
    Ready { state: TowerState, examined: usize },
    Separated { certificate: Certificate, examined: usize },
}

/// Rebuilds `graph` from `copies` copies, rerouting the `side`-component of
/// `anchor` cyclically through the copies.
///
/// With x_k the copy-k image of x, and ∘ the old action, the new action of a
/// nonidentity g in the side factor is
/// - x_k ∘ g = (x∘g)_k for x outside the component of `anchor`,
/// - q_k ∘ g = (q∘g)_{k+1} for the anchor q,
/// - (q∘c)_k ∘ g = q_{k−1} if cg = 1, else (q∘cg)_k,
///
/// copy indices taken mod `copies`. The other factor acts copywise.
pub fn cyclic_copy_surgery(
    fp: &FreeProduct,
    graph: &ActionGraph,
    copies: usize,
    anchor: usize,
    side: Factor,
) -> Result<ActionGraph, GraphError> {
    let v = graph.vertex_count();
    if copies == 0 || anchor >= v {
        return Err(GraphError::BadPath(format!("bad surgery parameters ({copies} copies, anchor {anchor})")));
    }
    let old = graph.tables();
    let group = fp.factor(side);
    // position of each vertex in the anchor's component: q∘c has position c
    let mut position = vec![usize::MAX; v];
    for c in group.elements() {
        position[old.table(side)[c][anchor]] = c;
    }
    let copywise = |rows: &[Vec<usize>]| -> Vec<Vec<usize>> {
        rows.iter()
            .map(|row| (0..copies * v).map(|x| (x / v) * v + row[x % v]).collect())
            .collect()
    };
    let side_rows: Vec<Vec<usize>> = group
        .elements()
        .map(|g| {
            (0..copies * v)
                .map(|x| {
                    let (k, y) = (x / v, x % v);
                    if g == 0 {
                        return x;
                    }
                    match position[y] {
                        usize::MAX => k * v + old.table(side)[g][y],
                        0 => ((k + 1) % copies) * v + old.table(side)[g][y],
                        c => match group.mul(c, g) {
                            0 => ((k + copies - 1) % copies) * v + anchor,
                            cg => k * v + old.table(side)[cg][anchor],
                        },
                    }
                })
                .collect()
        })
        .collect();
    let other_rows = copywise(old.table(side.other()));
    let (a, b) = match side {
        Factor::A => (side_rows, other_rows),
        Factor::B => (other_rows, side_rows),
    };
    ActionGraph::from_actions(fp, ActionTables { degree: copies * v, a, b }, true)
}

/// Runs the tower for a fixed word u against a rival.
pub struct Tower<'a> {
    fp: &'a FreeProduct,
    u: Word,
    rival: Rival,
    max_vertices: u64,
}

impl<'a> Tower<'a> {
    pub fn new(fp: &'a FreeProduct, u: Word, rival: Rival, max_vertices: u64) -> Result<Self, TowerError> {
        if u.len() < 2 || !u.is_cyclically_reduced() {
            return Err(TowerError::NotHyperbolic);
        }
        if let Rival::Tracked(v) = &rival {
            if v.len() < 2 || !v.is_cyclically_reduced() {
                return Err(TowerError::NotHyperbolic);
            }
        }
        Ok(Tower { fp, u, rival, max_vertices })
    }

    pub fn u(&self) -> &Word {
        &self.u
    }

    pub fn rival(&self) -> &Rival {
        &self.rival
    }

    pub fn set_max_vertices(&mut self, max_vertices: u64) {
        self.max_vertices = max_vertices;
    }

    /// Orders of u and the rival differ on this graph.
    fn separation(&self, graph: &ActionGraph, uc: &WordCycles, provenance: Provenance) -> Option<Certificate> {
        let v = self.rival.word()?;
        let cert = Certificate::from_tables(graph.tables().clone(), &self.u, v, provenance);
        debug_assert_eq!(cert.u_order, uc.order());
        (cert.u_order != cert.v_order).then_some(cert)
    }

    /// Properties 3) and 5) for u and a tracked rival, plus 6) when tracked.
    fn structural_defect(&self, graph: &ActionGraph, uc: &WordCycles) -> Result<Option<String>, GraphError> {
        if !uc.lengths_divide_max {
            return Ok(Some("u-cycle lengths do not divide the maximum".into()));
        }
        if !uc.no_near_edges {
            return Ok(Some("a u-cycle has near edges".into()));
        }
        if let Rival::Tracked(v) = &self.rival {
            let vc = graph.word_cycles(v)?;
            if !vc.lengths_divide_max {
                return Ok(Some("v-cycle lengths do not divide the maximum".into()));
            }
            if !vc.no_near_edges {
                return Ok(Some("a v-cycle has near edges".into()));
            }
            if vc.max_len != uc.max_len {
                return Ok(Some("maximal u- and v-cycle lengths differ".into()));
            }
        }
        Ok(None)
    }

    /// Scans candidates for a first graph Γ₀ satisfying 3), 5) and 6),
    /// returning early with a certificate if a candidate already separates.
    pub fn init_gamma0(
        &self,
        stream: &mut CandidateStream<'_>,
        budget: &mut Budget,
    ) -> Result<Gamma0Outcome, TowerError> {
        let mut examined = 0;
        for cand in stream {
            if !budget.charge(cand.tables.degree as u64) {
                break;
            }
            examined += 1;
            let graph = ActionGraph::from_actions(self.fp, cand.tables, true)?;
            let uc = graph.word_cycles(&self.u)?;
            if let Some(certificate) = self.separation(&graph, &uc, cand.provenance) {
                return Ok(Gamma0Outcome::Separated { certificate, examined });
            }
            if self.structural_defect(&graph, &uc)?.is_none() {
                let i = uc.maximal().next().expect("some cycle is maximal");
                let q = uc.cycles[i][0];
                let state = TowerState { path: PathRef::empty_at(q), n: 0, phase: 0, cycle_base: q, t: uc.max_len, graph };
                return Ok(Gamma0Outcome::Ready { state, examined });
            }
        }
        Err(TowerError::BudgetExhausted { examined, spent: budget.spent })
    }

    /// Γ₀ search over a fresh candidate stream.
    pub fn init_gamma0_with(&self, budget: u64, max_degree: usize, seed: u64) -> Result<Gamma0Outcome, TowerError> {
        let mut stream = CandidateStream::new(self.fp, max_degree, seed);
        self.init_gamma0(&mut stream, &mut Budget::new(budget))
    }

    fn surgery(
        &self,
        graph: &ActionGraph,
        copies: u64,
        anchor: usize,
        side: Factor,
        max_u_before: u64,
        stage: usize,
    ) -> Result<(ActionGraph, WordCycles, SurgeryRecord), TowerError> {
        let needed = copies.saturating_mul(graph.vertex_count() as u64);
        if needed > self.max_vertices {
            return Err(TowerError::TooLarge { needed, limit: self.max_vertices });
        }
        let next = cyclic_copy_surgery(self.fp, graph, copies as usize, anchor, side)
            .map_err(|e| TowerError::Breach { stage, detail: format!("surgery lost freeness: {e}") })?;
        let uc = next.word_cycles(&self.u)?;
        let record = SurgeryRecord {
            copies: copies as usize,
            anchor,
            side,
            vertices_before: graph.vertex_count(),
            vertices_after: next.vertex_count(),
            max_u_before,
            max_u_after: uc.max_len,
        };
        Ok((next, uc, record))
    }

    /// One stage Γₙ → Γₙ₊₁.
    pub fn step(&self, state: &TowerState) -> Result<StepOutcome, TowerError> {
        let stage = state.n + 1;
        let provenance = Provenance::TowerStage(stage);
        let ulen = self.u.len();
        let syl = self.u.syllables();
        let q = state.graph.path_end(&state.path);
        let label = syl[(state.phase + state.n) % ulen];

        let (k1, uc1, rec1) = self.surgery(&state.graph, state.t, q, label.factor, state.t, stage)?;
        let mut surgeries = vec![rec1];
        if let Some(cert) = self.separation(&k1, &uc1, provenance) {
            return Ok(StepOutcome::Separated(cert));
        }
        if let Some(detail) = self.structural_defect(&k1, &uc1)? {
            return Err(TowerError::Breach { stage, detail });
        }
        let mut extended = state.path.clone();
        extended.labels.push(label);

        let mut graph = k1;
        if let Rival::Tracked(v) = &self.rival {
            let vc = graph.word_cycles(v)?;
            let edges = graph.path_edges(&extended)?;
            let all_pass = vc.maximal().all(|i| graph.cycle_contains(v, &vc.cycles[i], &edges));
            if !all_pass {
                let anchor = graph.path_end(&extended);
                let next_label = syl[(state.phase + state.n + 1) % ulen];
                let (k2, uc2, rec2) =
                    self.surgery(&graph, uc1.max_len, anchor, next_label.factor, uc1.max_len, stage)?;
                surgeries.push(rec2);
                if let Some(cert) = self.separation(&k2, &uc2, provenance) {
                    return Ok(StepOutcome::Separated(cert));
                }
                if let Some(detail) = self.structural_defect(&k2, &uc2)? {
                    return Err(TowerError::Breach { stage, detail });
                }
                graph = k2;
            }
        }
        let state = self.settle(graph, extended, state.phase, stage)?;
        Ok(StepOutcome::Advanced { state, surgeries })
    }

    /// Locates the chosen cycle through the new path and checks property 4.
    fn settle(&self, graph: ActionGraph, path: PathRef, phase: usize, stage: usize) -> Result<TowerState, TowerError> {
        let breach = |detail: &str| TowerError::Breach { stage, detail: detail.to_string() };
        let mut base = path.start;
        for s in self.u.syllables()[..phase].iter().rev() {
            let inv = Syllable { factor: s.factor, element: self.fp.factor(s.factor).inv(s.element) };
            base = graph.tables().act(base, inv);
        }
        let uc = graph.word_cycles(&self.u)?;
        let idx = uc.cycles.iter().position(|c| c.contains(&base)).expect("every vertex lies on a cycle");
        let t = uc.lengths[idx];
        if t != uc.max_len {
            return Err(breach("the cycle through the path is not maximal"));
        }
        let edges = graph.path_edges(&path)?;
        if !graph.cycle_contains(&self.u, &uc.cycles[idx], &edges) {
            return Err(breach("the path left the chosen u-cycle"));
        }
        if let Rival::Tracked(v) = &self.rival {
            let vc = graph.word_cycles(v)?;
            if !vc.maximal().all(|i| graph.cycle_contains(v, &vc.cycles[i], &edges)) {
                return Err(breach("a maximal v-cycle misses the path"));
            }
        }
        Ok(TowerState { graph, path, n: stage, phase, cycle_base: base, t })
    }
}
