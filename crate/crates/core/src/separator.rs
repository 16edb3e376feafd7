//! The top-level driver: decides which construction applies to a pair of
//! words and returns either a verified certificate or a typed refusal.

use std::fmt;

use thiserror::Error;

use crate::actions::ActionTables;
use crate::cartesian::power_separation_certificate;
use crate::group::{QuotientMap, QuotientRecord};
use crate::search::{Budget, CandidateStream};
use crate::tower::{Gamma0Outcome, Rival, StepOutcome, Tower, TowerError};
use crate::word::{Factor, FreeProduct, Word};

pub use crate::certificate::{
    verify_certificate, Certificate, CertificateError, Provenance, VerificationFailure, VerificationReport,
};
pub use crate::search::random_candidate;

/// Tower graphs never exceed this many vertices.
const TOWER_VERTEX_CAP: u64 = 1 << 18;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparatorConfig {
    /// Candidate-vertex units the searches may spend.
    pub budget: u64,
    /// Largest degree of a searched candidate.
    pub max_degree: usize,
    pub seed: u64,
    pub tower_steps: usize,
}

impl Default for SeparatorConfig {
    fn default() -> Self {
        SeparatorConfig { budget: 1_000_000, max_degree: 96, seed: 0, tower_steps: 4 }
    }
}

/// What a failed search tried.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub candidates: usize,
    pub budget_spent: u64,
    pub tower_stages: usize,
    /// Why the tower or the power route stopped, if it did.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refusal {
    /// v or v⁻¹ equals c⁻¹uc.
    ConjugatePair { conjugator: Word, inverted: bool },
    /// u and v lie in one factor and no quotient of it separates them.
    FactorPairInseparable { factor: Factor, examined: Vec<QuotientRecord> },
    /// Nothing found within the budget. Says nothing about separability.
    BudgetExhausted(SearchStats),
}

impl Refusal {
    pub fn tag(&self) -> &'static str {
        match self {
            Refusal::ConjugatePair { .. } => "conjugate-pair",
            Refusal::FactorPairInseparable { .. } => "factor-pair-inseparable",
            Refusal::BudgetExhausted(_) => "budget-exhausted",
        }
    }
}

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Refusal::ConjugatePair { conjugator, inverted } => {
                let target = if *inverted { "v^-1" } else { "v" };
                write!(f, "conjugate-pair: c^-1 u c = {target} with c = {conjugator}")
            }
            Refusal::FactorPairInseparable { factor, examined } => {
                writeln!(f, "factor-pair-inseparable: no quotient of {factor} separates the orders")?;
                for r in examined {
                    writeln!(f, "  kernel {:?}: orders {} and {}", r.kernel, r.order_g, r.order_h)?;
                }
                Ok(())
            }
            Refusal::BudgetExhausted(s) => {
                write!(
                    f,
                    "budget-exhausted: {} candidates, {} units spent, {} tower stages",
                    s.candidates, s.budget_spent, s.tower_stages
                )?;
                for n in &s.notes {
                    write!(f, "\n  {n}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Separated(Certificate),
    Refused(Refusal),
}

impl Outcome {
    /// `certificate` or the refusal tag.
    pub fn class(&self) -> &'static str {
        match self {
            Outcome::Separated(_) => "certificate",
            Outcome::Refused(r) => r.tag(),
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Outcome::Separated(c) => Some(c),
            Outcome::Refused(_) => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparatorError {
    #[error("{0} is the identity; its order is degenerate")]
    IdentityInput(char),
    #[error("internal check failed: {0}")]
    Breach(String),
}

/// Finds a finite action in which u and v have different orders, or says
/// why none was produced.
pub fn separate_orders(
    fp: &FreeProduct,
    u: &Word,
    v: &Word,
    config: &SeparatorConfig,
) -> Result<Outcome, SeparatorError> {
    if u.is_empty() {
        return Err(SeparatorError::IdentityInput('u'));
    }
    if v.is_empty() {
        return Err(SeparatorError::IdentityInput('v'));
    }
    if let Some(conjugator) = fp.conjugate_test(u, v) {
        return Ok(Outcome::Refused(Refusal::ConjugatePair { conjugator, inverted: false }));
    }
    if let Some(conjugator) = fp.conjugate_test(u, &fp.invert(v)) {
        return Ok(Outcome::Refused(Refusal::ConjugatePair { conjugator, inverted: true }));
    }
    let (ur, _) = fp.cyclic_reduce(u);
    let (vr, _) = fp.cyclic_reduce(v);
    let found = match (ur.len(), vr.len()) {
        (1, 1) => return factor_case(fp, u, v, &ur, &vr),
        (1, _) => mixed_case(fp, &vr, &ur, config),
        (_, 1) => mixed_case(fp, &ur, &vr, config),
        _ => hyperbolic_case(fp, &ur, &vr, config)?,
    };
    match found {
        Ok(tables_and_prov) => finalize(fp, u, v, tables_and_prov).map(Outcome::Separated),
        Err(stats) => Ok(Outcome::Refused(Refusal::BudgetExhausted(stats))),
    }
}

type Found = Result<(ActionTables, Provenance), SearchStats>;

/// Recomputes the orders on the original words and re-verifies.
fn finalize(fp: &FreeProduct, u: &Word, v: &Word, (tables, provenance): (ActionTables, Provenance)) -> Result<Certificate, SeparatorError> {
    let cert = Certificate::from_tables(tables, u, v, provenance);
    let report = verify_certificate(fp, u, v, &cert);
    if !report.passed() {
        let detail: Vec<String> = report.failures.iter().map(|f| f.to_string()).collect();
        return Err(SeparatorError::Breach(format!("{provenance} certificate rejected: {}", detail.join("; "))));
    }
    Ok(cert)
}

/// Regular action of a factor quotient, with the other factor acting trivially.
fn retraction_tables(fp: &FreeProduct, factor: Factor, q: &QuotientMap) -> ActionTables {
    let n = q.target.size();
    let rows: Vec<Vec<usize>> = fp.factor(factor).elements().map(|g| (0..n).map(|x| q.target.mul(x, q.project(g))).collect()).collect();
    let trivial = vec![(0..n).collect::<Vec<usize>>(); fp.factor(factor.other()).size()];
    match factor {
        Factor::A => ActionTables { degree: n, a: rows, b: trivial },
        Factor::B => ActionTables { degree: n, a: trivial, b: rows },
    }
}

fn factor_case(fp: &FreeProduct, u: &Word, v: &Word, ur: &Word, vr: &Word) -> Result<Outcome, SeparatorError> {
    let (su, sv) = (ur.syllables()[0], vr.syllables()[0]);
    let group = fp.factor(su.factor);
    let map = if su.factor == sv.factor {
        let sweep = group
            .factor_quotient_sweep(su.element, sv.element)
            .map_err(|e| SeparatorError::Breach(format!("factor sweep: {e}")))?;
        match sweep.separating {
            Some(q) => q,
            None => {
                return Ok(Outcome::Refused(Refusal::FactorPairInseparable {
                    factor: su.factor,
                    examined: sweep.examined,
                }))
            }
        }
    } else {
        // killing v's factor leaves u with its full order and v with order 1
        group.quotient_map(&[0].into_iter().collect()).map_err(|e| SeparatorError::Breach(e.to_string()))?
    };
    let tables = retraction_tables(fp, su.factor, &map);
    finalize(fp, u, v, (tables, Provenance::FactorQuotient)).map(Outcome::Separated)
}

/// Runs Γ₀ search, the tower, then the rest of the candidate stream.
fn tower_then_stream(fp: &FreeProduct, u: &Word, rival: Rival, config: &SeparatorConfig) -> Found {
    let rival_word = match &rival {
        Rival::Tracked(v) | Rival::OrderOnly(v) => v.clone(),
        Rival::None => unreachable!("the driver always has a rival"),
    };
    let mut stats = SearchStats::default();
    let mut budget = Budget::new(config.budget);
    let mut stream = CandidateStream::new(fp, config.max_degree, config.seed);
    match Tower::new(fp, u.clone(), rival, TOWER_VERTEX_CAP.min(config.budget)) {
        Ok(mut tower) => match tower.init_gamma0(&mut stream, &mut budget) {
            Ok(Gamma0Outcome::Separated { certificate, .. }) => {
                return Ok((certificate.tables, certificate.provenance));
            }
            Ok(Gamma0Outcome::Ready { mut state, examined }) => {
                stats.candidates += examined;
                for _ in 0..config.tower_steps {
                    tower.set_max_vertices(TOWER_VERTEX_CAP.min(budget.remaining()));
                    match tower.step(&state) {
                        Ok(StepOutcome::Separated(cert)) => return Ok((cert.tables, cert.provenance)),
                        Ok(StepOutcome::Advanced { state: next, .. }) => {
                            budget.charge(next.graph.vertex_count() as u64);
                            stats.tower_stages += 1;
                            state = next;
                        }
                        Err(e) => {
                            stats.notes.push(format!("tower stopped: {e}"));
                            break;
                        }
                    }
                }
            }
            Err(TowerError::BudgetExhausted { examined, .. }) => {
                stats.candidates += examined;
                stats.notes.push("no Γ₀ candidate within budget".into());
            }
            Err(e) => stats.notes.push(format!("Γ₀ search stopped: {e}")),
        },
        Err(e) => stats.notes.push(format!("tower unavailable: {e}")),
    }
    for cand in stream {
        if !budget.charge(cand.tables.degree as u64) {
            break;
        }
        stats.candidates += 1;
        if cand.tables.image_order(u) != cand.tables.image_order(&rival_word) {
            return Ok((cand.tables, cand.provenance));
        }
    }
    stats.budget_spent = budget.spent;
    Err(stats)
}

/// `h` hyperbolic, `f` a factor element (both cyclically reduced). On a free
/// action f has its true order, so any growth of h's order separates.
fn mixed_case(fp: &FreeProduct, h: &Word, f: &Word, config: &SeparatorConfig) -> Found {
    tower_then_stream(fp, h, Rival::OrderOnly(f.clone()), config)
}

fn hyperbolic_case(fp: &FreeProduct, ur: &Word, vr: &Word, config: &SeparatorConfig) -> Result<Found, SeparatorError> {
    let mut notes = Vec::new();
    match common_root(fp, ur, vr) {
        Ok(Some((w, k, l))) => match power_separation_certificate(fp, &w, k, l, config.budget, config.seed) {
            Ok(sep) => return Ok(Ok((sep.certificate.tables, Provenance::PPower))),
            Err(e) => notes.push(format!("power route failed: {e}")),
        },
        Ok(None) => {}
        Err(e) => return Err(e),
    }
    Ok(tower_then_stream(fp, ur, Rival::Tracked(vr.clone()), config).map_err(|mut s| {
        notes.append(&mut s.notes);
        s.notes = notes;
        s
    }))
}

/// When u^q and v^q (q the least exponent putting both in the Cartesian
/// subgroup) are conjugate to powers of one root, returns that root in the
/// Cartesian subgroup and the coprime exponents (up to sign and conjugation).
fn common_root(fp: &FreeProduct, ur: &Word, vr: &Word) -> Result<Option<(Word, u64, u64)>, SeparatorError> {
    let q = crate::group::lcm(fp.power_entering_cartesian(ur), fp.power_entering_cartesian(vr));
    let uq = fp.pow(ur, q);
    let vq = fp.pow(vr, q);
    if fp.conjugate_test(&uq, &vq).is_some() || fp.conjugate_test(&uq, &fp.invert(&vq)).is_some() {
        return Err(SeparatorError::Breach(format!("u^{q} is conjugate to v^±{q} although u and v are not")));
    }
    let breach = |e: crate::word::WordError| SeparatorError::Breach(format!("root extraction: {e}"));
    let (w1, k) = fp.extract_root(&uq).map_err(breach)?;
    let (w2, l) = fp.extract_root(&vq).map_err(breach)?;
    if fp.conjugate_test(&w1, &w2).is_none() && fp.conjugate_test(&w1, &fp.invert(&w2)).is_none() {
        return Ok(None);
    }
    // u^q ~ w1^k and v^q ~ w1^(±l): only the exponents matter for orders
    let r = fp.power_entering_cartesian(&w1);
    let (k, l) = (k / r, l / r);
    let g = num_integer::gcd(k, l);
    let root = fp.pow(&w1, r * g);
    Ok(Some((root, k / g, l / g)))
}
