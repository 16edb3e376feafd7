//! Brute-force ground truth at tiny scale: every homomorphism pair into
//! Sym(d), and conjugacy by exhaustive conjugator search.

use thiserror::Error;

use crate::actions::ActionTables;
use crate::group::FiniteGroup;
use crate::word::{Factor, FreeProduct, Syllable, Word};

pub const MAX_DEGREE: usize = 8;
pub const MAX_FACTOR_ORDER: usize = 6;
pub const MAX_CONJUGATOR_LEN: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("degree {0} exceeds {MAX_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("factor order {0} exceeds {MAX_FACTOR_ORDER}")]
    FactorTooLarge(usize),
    #[error("conjugator length {0} exceeds {MAX_CONJUGATOR_LEN}")]
    ConjugatorTooLong(usize),
}

/// Actions of A and B on {0..degree}, not necessarily free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomPair {
    pub degree: usize,
    pub a: Vec<Vec<usize>>,
    pub b: Vec<Vec<usize>>,
}

impl HomPair {
    fn word_perm(&self, w: &Word) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.degree).collect();
        for s in w.syllables() {
            let row = match s.factor {
                Factor::A => &self.a[s.element],
                Factor::B => &self.b[s.element],
            };
            perm.iter_mut().for_each(|x| *x = row[*x]);
        }
        perm
    }

    /// Order of the image of w, by composing its permutation with itself
    /// until the identity comes back.
    pub fn order(&self, w: &Word) -> u64 {
        let perm = self.word_perm(w);
        let mut power = perm.clone();
        let mut k = 1;
        while power.iter().enumerate().any(|(i, &x)| i != x) {
            power = power.iter().map(|&x| perm[x]).collect();
            k += 1;
        }
        k
    }

    pub fn into_tables(self) -> ActionTables {
        ActionTables { degree: self.degree, a: self.a, b: self.b }
    }
}

/// All permutations of {0..d} in lexicographic order.
fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..d).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..d).rev().find(|&i| p[i - 1] < p[i]) else { return out };
        let j = (i..d).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Every homomorphism `group` → Sym(d), as one permutation per element.
///
/// Elements are assigned in index order; each assignment is closed under
/// products with the elements already fixed, and a clash prunes the branch.
pub fn homomorphisms_to_sym(group: &FiniteGroup, d: usize) -> Result<Vec<Vec<Vec<usize>>>, OracleError> {
    if d > MAX_DEGREE {
        return Err(OracleError::DegreeTooLarge(d));
    }
    if group.size() > MAX_FACTOR_ORDER {
        return Err(OracleError::FactorTooLarge(group.size()));
    }
    let perms = permutations(d);
    let mut start: Vec<Option<Vec<usize>>> = vec![None; group.size()];
    start[0] = Some((0..d).collect());
    let mut out = Vec::new();
    extend(group, &perms, start, &mut out);
    Ok(out)
}

fn extend(group: &FiniteGroup, perms: &[Vec<usize>], assigned: Vec<Option<Vec<usize>>>, out: &mut Vec<Vec<Vec<usize>>>) {
    let Some(g) = assigned.iter().position(Option::is_none) else {
        out.push(assigned.into_iter().map(Option::unwrap).collect());
        return;
    };
    for p in perms {
        let mut next = assigned.clone();
        next[g] = Some(p.clone());
        if close(group, &mut next) {
            extend(group, perms, next, out);
        }
    }
}

/// Saturates the partial assignment under P_{xy} = P_x then P_y; false on a clash.
fn close(group: &FiniteGroup, assigned: &mut [Option<Vec<usize>>]) -> bool {
    loop {
        let mut changed = false;
        for x in group.elements() {
            for y in group.elements() {
                let (Some(px), Some(py)) = (&assigned[x], &assigned[y]) else { continue };
                let composed: Vec<usize> = px.iter().map(|&i| py[i]).collect();
                let z = group.mul(x, y);
                match &assigned[z] {
                    Some(pz) if *pz != composed => return false,
                    Some(_) => {}
                    None => {
                        assigned[z] = Some(composed);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

/// Every pair of homomorphisms A → Sym(d), B → Sym(d), A's choice varying slowest.
pub fn enumerate_pairs(fp: &FreeProduct, d: usize) -> Result<impl Iterator<Item = HomPair>, OracleError> {
    let ha = homomorphisms_to_sym(fp.a(), d)?;
    let hb = homomorphisms_to_sym(fp.b(), d)?;
    Ok(ha.into_iter().flat_map(move |a| hb.clone().into_iter().map(move |b| HomPair { degree: d, a: a.clone(), b })))
}

/// Smallest degree d ≤ `dmax` with a pair giving u and v different orders,
/// together with the first such pair.
pub fn min_separating_degree(fp: &FreeProduct, u: &Word, v: &Word, dmax: usize) -> Result<Option<(usize, HomPair)>, OracleError> {
    if dmax > MAX_DEGREE {
        return Err(OracleError::DegreeTooLarge(dmax));
    }
    for d in 1..=dmax {
        if let Some(pair) = enumerate_pairs(fp, d)?.find(|p| p.order(u) != p.order(v)) {
            return Ok(Some((d, pair)));
        }
    }
    Ok(None)
}

/// Every normal form of syllable length at most `len`, shortest first.
pub fn words_up_to(fp: &FreeProduct, len: usize) -> Vec<Word> {
    let mut layer: Vec<Vec<Syllable>> = vec![Vec::new()];
    let mut out = vec![Word::empty()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &layer {
            for factor in [Factor::A, Factor::B] {
                if w.last().is_some_and(|s| s.factor == factor) {
                    continue;
                }
                for element in 1..fp.factor(factor).size() {
                    let mut x = w.clone();
                    x.push(Syllable { factor, element });
                    next.push(x);
                }
            }
        }
        out.extend(next.iter().map(|x| fp.normalize(x).expect("alternating nonidentity syllables")));
        layer = next;
    }
    out
}

/// True iff g⁻¹ug = v for some g of syllable length at most `max_len`.
pub fn brute_conjugacy(fp: &FreeProduct, u: &Word, v: &Word, max_len: usize) -> Result<bool, OracleError> {
    if max_len > MAX_CONJUGATOR_LEN {
        return Err(OracleError::ConjugatorTooLong(max_len));
    }
    Ok(words_up_to(fp, max_len).iter().any(|g| fp.conjugate(u, g) == *v))
}
