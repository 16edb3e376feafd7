//! Deterministic stream of free-action candidates for the separator and the
//! Γ₀ search, plus the budget they draw on.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::actions::{regular_on_direct_product, regular_via, ActionTables};
use crate::certificate::Provenance;
use crate::group::{lcm, FiniteGroup};
use crate::word::FreeProduct;

/// Push-through candidates use catalog groups up to this order.
const PUSH_THROUGH_MAX_ORDER: usize = 48;
/// At most this many homomorphism pairs per catalog group.
const PUSH_THROUGH_PAIRS_PER_GROUP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("degree {degree} is not a positive multiple of lcm(|A|,|B|) = {step}")]
    BadDegree { degree: usize, step: usize },
}

/// Candidate-vertex units available to a search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub limit: u64,
    pub spent: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, spent: 0 }
    }

    pub fn remaining(&self) -> u64 {
        self.limit.saturating_sub(self.spent)
    }

    /// Spends `units` if that many remain.
    pub fn charge(&mut self, units: u64) -> bool {
        if units <= self.remaining() {
            self.spent += units;
            true
        } else {
            false
        }
    }
}

/// A free-action pair whose A- and B-orbits are regular blocks glued by
/// seeded shuffles of the vertex set.
pub fn random_candidate(fp: &FreeProduct, degree: usize, seed: u64) -> Result<ActionTables, SearchError> {
    let (na, nb) = (fp.a().size(), fp.b().size());
    let step = lcm(na as u64, nb as u64) as usize;
    if degree == 0 || !degree.is_multiple_of(step) {
        return Err(SearchError::BadDegree { degree, step });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks = |group: &FiniteGroup| -> Vec<Vec<usize>> {
        let n = group.size();
        let mut order: Vec<usize> = (0..degree).collect();
        order.shuffle(&mut rng);
        let mut rows = vec![vec![0; degree]; n];
        for block in order.chunks(n) {
            for (pos, &x) in block.iter().enumerate() {
                for (g, row) in rows.iter_mut().enumerate() {
                    row[x] = block[group.mul(pos, g)];
                }
            }
        }
        rows
    };
    let a = blocks(fp.a());
    let b = blocks(fp.b());
    Ok(ActionTables { degree, a, b })
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub tables: ActionTables,
    pub provenance: Provenance,
    pub label: String,
}

enum Phase {
    Regular,
    PushThrough { groups: Vec<(String, FiniteGroup)>, group: usize, pairs: Vec<(Vec<usize>, Vec<usize>)>, pair: usize },
    Random { round: u64, degree: usize },
}

/// Free actions in canonical order: the regular action on A×B, regular
/// actions of small catalog groups pulled back along injective
/// homomorphisms, then seeded random free actions of growing degree.
/// The random phase never ends; callers stop on their budget.
pub struct CandidateStream<'a> {
    fp: &'a FreeProduct,
    max_degree: usize,
    seed: u64,
    phase: Phase,
    step: usize,
}

impl<'a> CandidateStream<'a> {
    pub fn new(fp: &'a FreeProduct, max_degree: usize, seed: u64) -> Self {
        let step = lcm(fp.a().size() as u64, fp.b().size() as u64) as usize;
        CandidateStream { fp, max_degree, seed, phase: Phase::Regular, step }
    }

    fn catalog(&self) -> Vec<(String, FiniteGroup)> {
        let cap = self.max_degree.min(PUSH_THROUGH_MAX_ORDER);
        let mut out = Vec::new();
        for s in 2..=cap {
            out.push((format!("C{s}"), FiniteGroup::cyclic(s)));
            if s % 2 == 0 && s >= 4 {
                out.push((format!("D{s}"), FiniteGroup::dihedral(s)));
            }
            if s == 24 {
                out.push(("S4".to_string(), FiniteGroup::symmetric(4)));
            }
        }
        out
    }

    fn pairs_for(&self, group: &FiniteGroup) -> Vec<(Vec<usize>, Vec<usize>)> {
        if !group.size().is_multiple_of(self.fp.a().size()) || !group.size().is_multiple_of(self.fp.b().size()) {
            return Vec::new();
        }
        let ha = self.fp.a().homomorphisms_into(group, true);
        let hb = self.fp.b().homomorphisms_into(group, true);
        let mut out = Vec::new();
        'outer: for x in &ha {
            for y in &hb {
                if out.len() == PUSH_THROUGH_PAIRS_PER_GROUP {
                    break 'outer;
                }
                out.push((x.clone(), y.clone()));
            }
        }
        out
    }
}

impl Iterator for CandidateStream<'_> {
    type Item = Candidate;

    fn next(&mut self) -> Option<Candidate> {
        loop {
            match &mut self.phase {
                Phase::Regular => {
                    let groups = self.catalog();
                    self.phase = Phase::PushThrough { groups, group: 0, pairs: Vec::new(), pair: 0 };
                    let tables = regular_on_direct_product(self.fp);
                    if tables.degree <= self.max_degree {
                        return Some(Candidate { tables, provenance: Provenance::Gamma0, label: "regular A×B".into() });
                    }
                }
                Phase::PushThrough { groups, group, pairs, pair } => {
                    if *pair < pairs.len() {
                        let (name, target) = &groups[*group - 1];
                        let (ia, ib) = &pairs[*pair];
                        *pair += 1;
                        let tables = regular_via(self.fp, target, ia, ib);
                        let label = format!("{name} pair {}", *pair - 1);
                        return Some(Candidate { tables, provenance: Provenance::Gamma0, label });
                    }
                    if *group < groups.len() {
                        let g = groups[*group].1.clone();
                        *group += 1;
                        *pair = 0;
                        let fresh = self.pairs_for(&g);
                        if let Phase::PushThrough { pairs, .. } = &mut self.phase {
                            *pairs = fresh;
                        }
                        continue;
                    }
                    self.phase = Phase::Random { round: 0, degree: self.step };
                }
                Phase::Random { round, degree } => {
                    if self.step > self.max_degree {
                        return None;
                    }
                    let (r, d) = (*round, *degree);
                    if d + self.step > self.max_degree {
                        *degree = self.step;
                        *round += 1;
                    } else {
                        *degree += self.step;
                    }
                    let seed = self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (r << 20) ^ d as u64;
                    let tables = random_candidate(self.fp, d, seed).expect("degree is a multiple of the step");
                    let label = format!("random degree {d} round {r}");
                    return Some(Candidate { tables, provenance: Provenance::Random, label });
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2c3() -> FreeProduct {
        FreeProduct::new(FiniteGroup::cyclic(2), FiniteGroup::cyclic(3))
    }

    #[test]
    fn random_candidates_are_free_and_deterministic() {
        let fp = c2c3();
        let t = random_candidate(&fp, 6, 0).unwrap();
        assert!(t.defects(&fp, true).is_empty());
        assert_eq!(t, random_candidate(&fp, 6, 0).unwrap());
        let big = random_candidate(&fp, 36, 11).unwrap();
        assert!(big.defects(&fp, true).is_empty());
        assert_ne!(big, random_candidate(&fp, 36, 12).unwrap());
    }

    #[test]
    fn random_candidate_degree_must_divide() {
        let fp = FreeProduct::new(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2));
        assert_eq!(random_candidate(&fp, 3, 0), Err(SearchError::BadDegree { degree: 3, step: 2 }));
    }

    #[test]
    fn stream_is_free_and_reproducible() {
        let fp = c2c3();
        let first: Vec<Candidate> = CandidateStream::new(&fp, 24, 5).take(200).collect();
        let again: Vec<Candidate> = CandidateStream::new(&fp, 24, 5).take(200).collect();
        assert_eq!(first.len(), 200);
        assert_eq!(first[0].label, "regular A×B");
        for (x, y) in first.iter().zip(&again) {
            assert_eq!(x.tables, y.tables);
            assert!(x.tables.degree <= 24);
            assert!(x.tables.defects(&fp, true).is_empty(), "{}", x.label);
        }
        assert!(first.iter().any(|c| c.provenance == Provenance::Random));
    }

    #[test]
    fn budget_accounting() {
        let mut b = Budget::new(10);
        assert!(b.charge(6));
        assert!(!b.charge(6));
        assert_eq!(b.remaining(), 4);
    }
}
