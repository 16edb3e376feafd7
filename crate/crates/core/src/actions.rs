//! Permutation helpers and the pair-of-actions table shared by action
//! graphs, certificates and the search.

use crate::group::{lcm, FiniteGroup};
use crate::word::{Factor, FreeProduct, Syllable, Word};

pub fn is_permutation(map: &[usize]) -> bool {
    let mut seen = vec![false; map.len()];
    map.iter().all(|&x| x < map.len() && !std::mem::replace(&mut seen[x], true))
}

/// Cycles of a permutation, each starting at its smallest point, listed in
/// increasing order of that point.
pub fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push(x);
            x = perm[x];
        }
        out.push(cycle);
    }
    out
}

pub fn cycle_lengths(perm: &[usize]) -> Vec<u64> {
    cycles(perm).iter().map(|c| c.len() as u64).collect()
}

pub fn order_of(perm: &[usize]) -> u64 {
    cycle_lengths(perm).into_iter().fold(1, lcm)
}

/// Right actions of A and B on `0..degree`: `a[g][p]` is `p∘g`.
///
/// Nothing is assumed about the tables; [`ActionTables::defects`] reports
/// every way they fail to define a homomorphism A∗B → Sym(degree).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionTables {
    pub degree: usize,
    pub a: Vec<Vec<usize>>,
    pub b: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionDefect {
    Shape(String),
    NotPermutation { factor: Factor, element: usize },
    IdentityNotTrivial { factor: Factor },
    ActionLaw { factor: Factor, g: usize, h: usize, vertex: usize },
    FixedPoint { factor: Factor, element: usize, vertex: usize },
}

impl std::fmt::Display for ActionDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ActionDefect::Shape(s) => write!(f, "malformed tables: {s}"),
            ActionDefect::NotPermutation { factor, element } => {
                write!(f, "{factor}{element} does not act as a permutation")
            }
            ActionDefect::IdentityNotTrivial { factor } => write!(f, "identity of {factor} moves a point"),
            ActionDefect::ActionLaw { factor, g, h, vertex } => {
                write!(f, "action law fails in {factor} for ({g}, {h}) at vertex {vertex}")
            }
            ActionDefect::FixedPoint { factor, element, vertex } => {
                write!(f, "{factor}{element} fixes vertex {vertex}")
            }
        }
    }
}

impl ActionTables {
    pub fn table(&self, factor: Factor) -> &[Vec<usize>] {
        match factor {
            Factor::A => &self.a,
            Factor::B => &self.b,
        }
    }

    #[inline]
    pub fn act(&self, p: usize, s: Syllable) -> usize {
        self.table(s.factor)[s.element][p]
    }

    pub fn act_word(&self, p: usize, w: &Word) -> usize {
        w.syllables().iter().fold(p, |x, &s| self.act(x, s))
    }

    /// The permutation p ↦ p∘w.
    pub fn word_perm(&self, w: &Word) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.degree).collect();
        for &s in w.syllables() {
            let row = &self.table(s.factor)[s.element];
            for x in perm.iter_mut() {
                *x = row[*x];
            }
        }
        perm
    }

    pub fn image_order(&self, w: &Word) -> u64 {
        order_of(&self.word_perm(w))
    }

    /// Every defect, checked exhaustively; empty means the tables define an
    /// action of A∗B (free on both factors when `require_free`).
    pub fn defects(&self, fp: &FreeProduct, require_free: bool) -> Vec<ActionDefect> {
        let mut out = Vec::new();
        for factor in [Factor::A, Factor::B] {
            let group = fp.factor(factor);
            let rows = self.table(factor);
            if rows.len() != group.size() {
                out.push(ActionDefect::Shape(format!(
                    "{factor} has {} rows, expected {}",
                    rows.len(),
                    group.size()
                )));
                continue;
            }
            if let Some(row) = rows.iter().position(|r| r.len() != self.degree) {
                out.push(ActionDefect::Shape(format!("{factor}{row} row has wrong length")));
                continue;
            }
            let mut bijective = true;
            for (element, row) in rows.iter().enumerate() {
                if !is_permutation(row) {
                    out.push(ActionDefect::NotPermutation { factor, element });
                    bijective = false;
                }
            }
            if rows[0].iter().enumerate().any(|(p, &x)| p != x) {
                out.push(ActionDefect::IdentityNotTrivial { factor });
            }
            if !bijective {
                continue;
            }
            if let Some(d) = action_law_violation(group, rows, factor) {
                out.push(d);
            }
            if require_free {
                for (element, row) in rows.iter().enumerate().skip(1) {
                    if let Some(vertex) = row.iter().enumerate().position(|(p, &x)| p == x) {
                        out.push(ActionDefect::FixedPoint { factor, element, vertex });
                        break;
                    }
                }
            }
        }
        out
    }

    /// One line `ACTION_X` header followed by the rows of each factor.
    pub(crate) fn write_rows(&self, out: &mut String, factor: Factor) {
        for row in self.table(factor) {
            let line: Vec<String> = row.iter().map(usize::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
}

fn action_law_violation(group: &FiniteGroup, rows: &[Vec<usize>], factor: Factor) -> Option<ActionDefect> {
    for g in group.elements() {
        for h in group.elements() {
            let gh = &rows[group.mul(g, h)];
            let (rg, rh) = (&rows[g], &rows[h]);
            if let Some(vertex) = (0..rg.len()).find(|&p| rh[rg[p]] != gh[p]) {
                return Some(ActionDefect::ActionLaw { factor, g, h, vertex });
            }
        }
    }
    None
}

/// Right regular action of `target` pulled back along homomorphisms
/// `img_a: A → target`, `img_b: B → target`.
pub fn regular_via(fp: &FreeProduct, target: &FiniteGroup, img_a: &[usize], img_b: &[usize]) -> ActionTables {
    let row = |img: usize| target.elements().map(|x| target.mul(x, img)).collect::<Vec<_>>();
    ActionTables {
        degree: target.size(),
        a: fp.a().elements().map(|g| row(img_a[g])).collect(),
        b: fp.b().elements().map(|g| row(img_b[g])).collect(),
    }
}

/// Right multiplication on A×B, vertex `(α, β)` at index `α + |A|·β`.
pub fn regular_on_direct_product(fp: &FreeProduct) -> ActionTables {
    let (na, nb) = (fp.a().size(), fp.b().size());
    let a = fp
        .a()
        .elements()
        .map(|g| (0..na * nb).map(|v| fp.a().mul(v % na, g) + na * (v / na)).collect())
        .collect();
    let b = fp
        .b()
        .elements()
        .map(|g| (0..na * nb).map(|v| v % na + na * fp.b().mul(v / na, g)).collect())
        .collect();
    ActionTables { degree: na * nb, a, b }
}
