//! The Cartesian subgroup C = ker(A∗B → A×B) as a free group on the
//! commutators [a,b] = a⁻¹b⁻¹ab (a, b nonidentity), and the coset action
//! that separates proper powers of a common root.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::actions::{order_of, ActionTables};
use crate::certificate::{Certificate, Provenance};
use crate::group::{is_prime, valuation, FiniteGroup};
use crate::word::{Factor, FreeProduct, Syllable, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CartesianError {
    #[error("word {0} is not in the Cartesian subgroup")]
    NotInCartesian(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the word must be nonempty")]
    EmptyWord,
    #[error("exponents ({k}, {l}) must be coprime, distinct, with one above 1")]
    BadExponents { k: u64, l: u64 },
    #[error("the root must be cyclically reduced")]
    NotCyclicallyReduced,
    #[error("no homomorphism onto a {p}-group found within budget")]
    HomNotFound { p: u64 },
    #[error("coset enumeration exceeded {bound} cosets")]
    CosetOverflow { bound: usize },
    #[error("power certificate failed its own checks: {0}")]
    Breach(String),
}

/// A basis commutator c_{a,b} or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub a: usize,
    pub b: usize,
    pub inverse: bool,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{},{}{}", self.a, self.b, if self.inverse { "^-1" } else { "" })
    }
}

/// A freely reduced word in the commutator basis of C.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreeWordC(Vec<Letter>);

impl FreeWordC {
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = FreeWordC::default();
        for l in letters {
            w.push(l);
        }
        w
    }

    fn push(&mut self, l: Letter) {
        match self.0.last() {
            Some(top) if top.a == l.a && top.b == l.b && top.inverse != l.inverse => {
                self.0.pop();
            }
            _ => self.0.push(l),
        }
    }

    pub fn concat(&self, other: &FreeWordC) -> FreeWordC {
        Self::reduce(self.0.iter().chain(&other.0).copied())
    }
}

impl fmt::Display for FreeWordC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(Letter::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Index of c_{a,b} in the basis: `(a−1)(|B|−1) + (b−1)`.
pub fn basis_index(fp: &FreeProduct, a: usize, b: usize) -> usize {
    (a - 1) * (fp.b().size() - 1) + (b - 1)
}

pub fn basis_rank(fp: &FreeProduct) -> usize {
    (fp.a().size() - 1) * (fp.b().size() - 1)
}

/// Rewrites an element of C in the commutator basis.
///
/// Uses the Schreier transversal {αβ : α ∈ A, β ∈ B} for C in A∗B. While
/// reading w the current coset is tracked as (α, β); appending a B-syllable
/// only moves β, and appending an A-syllable a' contributes the Schreier
/// generator αβa'(αa'β)⁻¹ = c_{α⁻¹,β⁻¹} · c_{(αa')⁻¹,β⁻¹}⁻¹, where factors with
/// an identity index are trivial.
pub fn rs_rewrite(fp: &FreeProduct, w: &Word) -> Result<FreeWordC, CartesianError> {
    if !fp.in_cartesian(w) {
        return Err(CartesianError::NotInCartesian(w.to_string()));
    }
    Ok(rewrite_unchecked(fp, w))
}

fn rewrite_unchecked(fp: &FreeProduct, w: &Word) -> FreeWordC {
    let (ga, gb) = (fp.a(), fp.b());
    let (mut alpha, mut beta) = (0usize, 0usize);
    let mut out = FreeWordC::default();
    for s in w.syllables() {
        match s.factor {
            Factor::B => beta = gb.mul(beta, s.element),
            Factor::A => {
                let next = ga.mul(alpha, s.element);
                if beta != 0 {
                    let bi = gb.inv(beta);
                    if alpha != 0 {
                        out.push(Letter { a: ga.inv(alpha), b: bi, inverse: false });
                    }
                    if next != 0 {
                        out.push(Letter { a: ga.inv(next), b: bi, inverse: true });
                    }
                }
                alpha = next;
            }
        }
    }
    out
}

/// Substitutes a⁻¹b⁻¹ab for each c_{a,b} and normalizes.
pub fn expand(fp: &FreeProduct, fw: &FreeWordC) -> Word {
    let mut raw = Vec::with_capacity(4 * fw.0.len());
    for l in &fw.0 {
        let (ai, bi) = (fp.a().inv(l.a), fp.b().inv(l.b));
        if l.inverse {
            raw.extend([Syllable::b(bi), Syllable::a(ai), Syllable::b(l.b), Syllable::a(l.a)]);
        } else {
            raw.extend([Syllable::a(ai), Syllable::b(bi), Syllable::a(l.a), Syllable::b(l.b)]);
        }
    }
    fp.normalize(&raw).expect("basis letters carry valid element indices")
}

/// Signed exponent sums per basis generator.
pub fn abelianize(fp: &FreeProduct, fw: &FreeWordC) -> Vec<i64> {
    let mut v = vec![0i64; basis_rank(fp)];
    for l in &fw.0 {
        v[basis_index(fp, l.a, l.b)] += if l.inverse { -1 } else { 1 };
    }
    v
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomRoute {
    /// ψ(c_j) = 1 in Z/p^m for one basis coordinate j, all others 0.
    Abelianized { coordinate: usize, m: u32 },
    /// Generator images found by search in a small p-group.
    Catalog { group: String, tried: u64 },
}

/// A homomorphism ψ from C to a finite p-group, given on the basis.
#[derive(Debug, Clone)]
pub struct HomDescriptor {
    pub target: FiniteGroup,
    pub images: Vec<usize>,
    pub p: u64,
    pub route: HomRoute,
}

impl HomDescriptor {
    pub fn eval(&self, fp: &FreeProduct, fw: &FreeWordC) -> usize {
        fw.0.iter().fold(0, |acc, l| {
            let x = self.images[basis_index(fp, l.a, l.b)];
            let x = if l.inverse { self.target.inv(x) } else { x };
            self.target.mul(acc, x)
        })
    }
}

/// Heisenberg group of unitriangular 3×3 matrices over Z/p; (x, y, z) at
/// index x + p·y + p²·z with (x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy').
pub fn heisenberg(p: usize) -> FiniteGroup {
    let n = p * p * p;
    let rows: Vec<Vec<usize>> = (0..n)
        .map(|g| {
            let (x, y, z) = (g % p, g / p % p, g / (p * p));
            (0..n)
                .map(|h| {
                    let (x2, y2, z2) = (h % p, h / p % p, h / (p * p));
                    (x + x2) % p + p * ((y + y2) % p) + p * p * ((z + z2 + x * y2) % p)
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_table(&rows).expect("Heisenberg table is a group")
}

/// Small p-groups tried when the abelianized image vanishes.
fn p_group_catalog(p: u64) -> Vec<(String, FiniteGroup)> {
    let p = p as usize;
    let mut out = vec![
        (format!("C{p}xC{p}"), FiniteGroup::cyclic(p).direct_product(&FiniteGroup::cyclic(p))),
        (format!("C{}", p * p), FiniteGroup::cyclic(p * p)),
        (format!("C{}", p * p * p), FiniteGroup::cyclic(p * p * p)),
    ];
    out.push((format!("Heis({p})"), heisenberg(p)));
    out
}

/// ψ: C → p-group with ψ(w) of order at least p^`min_exponent`.
///
/// Route 1 reads off a nonzero abelianized coordinate e_j and maps c_j to a
/// generator of Z/p^m with m = v_p(e_j) + min_exponent, so ψ(w) has order
/// exactly p^min_exponent. Route 2 searches generator images in a catalog of
/// groups of order p², p³ within `budget` assignments.
pub fn p_separating_hom(
    fp: &FreeProduct,
    w: &Word,
    p: u64,
    min_exponent: u32,
    budget: u64,
    seed: u64,
) -> Result<Option<HomDescriptor>, CartesianError> {
    if !is_prime(p) {
        return Err(CartesianError::NotPrime(p));
    }
    if w.is_empty() {
        return Err(CartesianError::EmptyWord);
    }
    let fw = rs_rewrite(fp, w)?;
    let vector = abelianize(fp, &fw);
    let rank = vector.len();
    let best = vector
        .iter()
        .enumerate()
        .filter(|(_, &e)| e != 0)
        .min_by_key(|(_, &e)| valuation(e.unsigned_abs(), p));
    if let Some((j, &e)) = best {
        let m = valuation(e.unsigned_abs(), p) + min_exponent.max(1);
        let target = FiniteGroup::cyclic(p.pow(m) as usize);
        let mut images = vec![0; rank];
        images[j] = 1;
        return Ok(Some(HomDescriptor { target, images, p, route: HomRoute::Abelianized { coordinate: j, m } }));
    }
    let threshold = p.pow(min_exponent.max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spent = 0u64;
    for (name, target) in p_group_catalog(p) {
        let size = target.size() as u64;
        let total = size.checked_pow(rank as u32);
        let mut images = vec![0usize; rank];
        let mut tried = 0u64;
        let exhaustive = total.is_some_and(|t| t <= budget.saturating_sub(spent));
        loop {
            if spent >= budget {
                return Ok(None);
            }
            if exhaustive {
                if tried == total.unwrap() {
                    break;
                }
                let mut code = tried;
                for x in images.iter_mut() {
                    *x = (code % size) as usize;
                    code /= size;
                }
            } else {
                images.iter_mut().for_each(|x| *x = rng.gen_range(0..target.size()));
            }
            tried += 1;
            spent += 1;
            let hom = HomDescriptor {
                target: target.clone(),
                images: images.clone(),
                p,
                route: HomRoute::Catalog { group: name.clone(), tried },
            };
            let image = hom.eval(fp, &fw);
            if image != 0 && target.element_order_unchecked(image) >= threshold {
                return Ok(Some(hom));
            }
        }
    }
    Ok(None)
}

/// Outcome of [`power_separation_certificate`].
#[derive(Debug, Clone)]
pub struct PowerSeparation {
    pub certificate: Certificate,
    pub hom: HomDescriptor,
    pub prime: u64,
    /// Order of the image of the root w in the coset action.
    pub root_order: u64,
}

/// Separates u = w^k from v = w^l for a root w ∈ C and coprime k ≠ l.
///
/// Picks the smallest prime p dividing k·l, builds ψ: C → P with ψ(w) of
/// order p^(v_p(k)+1), and lets A∗B act on the right cosets of N = ker ψ.
/// Cosets are enumerated breadth-first from N itself, with Ng = Nh decided
/// by g h⁻¹ ∈ C and ψ(g h⁻¹) = 1. The resulting action has kernel the core
/// of N, and the image of w has p-power order.
pub fn power_separation_certificate(
    fp: &FreeProduct,
    w: &Word,
    k: u64,
    l: u64,
    budget: u64,
    seed: u64,
) -> Result<PowerSeparation, CartesianError> {
    if w.is_empty() {
        return Err(CartesianError::EmptyWord);
    }
    if !w.is_cyclically_reduced() {
        return Err(CartesianError::NotCyclicallyReduced);
    }
    if !fp.in_cartesian(w) {
        return Err(CartesianError::NotInCartesian(w.to_string()));
    }
    if k == 0 || l == 0 || k == l || k.gcd(&l) != 1 || k.max(l) < 2 {
        return Err(CartesianError::BadExponents { k, l });
    }
    let prime = (2..).find(|&d| (k * l).is_multiple_of(d) && is_prime(d)).unwrap();
    let u = fp.pow(w, k);
    let v = fp.pow(w, l);
    // the order argument already works at the first exponent; a few raises
    // guard against anything the checks below reject
    for exponent in (valuation(k, prime) + 1..).take(4) {
        let hom = p_separating_hom(fp, w, prime, exponent, budget, seed)?
            .ok_or(CartesianError::HomNotFound { p: prime })?;
        let tables = coset_action(fp, &hom)?;
        let root_order = order_of(&tables.word_perm(w));
        let certificate = Certificate::from_tables(tables, &u, &v, Provenance::PPower);
        let p_power = root_order > 1 && {
            let mut x = root_order;
            while x.is_multiple_of(prime) {
                x /= prime;
            }
            x == 1
        };
        if p_power && certificate.u_order != certificate.v_order {
            return Ok(PowerSeparation { certificate, hom, prime, root_order });
        }
    }
    Err(CartesianError::Breach(format!("orders of w^{k} and w^{l} did not separate")))
}

/// Right action of A∗B on the cosets N\G of N = ker ψ.
pub fn coset_action(fp: &FreeProduct, hom: &HomDescriptor) -> Result<ActionTables, CartesianError> {
    let bound = fp.a().size() * fp.b().size() * hom.target.size();
    let mut reps: Vec<Word> = vec![Word::empty()];
    // cosets grouped by their image in A×B; N ≤ C so this is a coarser invariant
    let mut by_projection: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::from([((0, 0), vec![0])]);
    let generators: Vec<Syllable> = fp
        .a()
        .elements()
        .skip(1)
        .map(Syllable::a)
        .chain(fp.b().elements().skip(1).map(Syllable::b))
        .collect();
    let mut images: BTreeMap<(Syllable, usize), usize> = BTreeMap::new();
    let mut next = 0;
    while next < reps.len() {
        for &s in &generators {
            let g = fp.mul(&reps[next], &fp.normalize(&[s]).expect("valid generator"));
            let key = fp.project_to_direct_product(&g);
            let bucket = by_projection.entry(key).or_default();
            let found = bucket.iter().copied().find(|&i| {
                let diff = fp.mul(&g, &fp.invert(&reps[i]));
                hom.eval(fp, &rewrite_unchecked(fp, &diff)) == 0
            });
            let target = match found {
                Some(i) => i,
                None => {
                    if reps.len() == bound {
                        return Err(CartesianError::CosetOverflow { bound });
                    }
                    bucket.push(reps.len());
                    reps.push(g);
                    reps.len() - 1
                }
            };
            images.insert((s, next), target);
        }
        next += 1;
    }
    let degree = reps.len();
    let rows = |factor: Factor, size: usize| -> Vec<Vec<usize>> {
        (0..size)
            .map(|e| {
                if e == 0 {
                    (0..degree).collect()
                } else {
                    (0..degree).map(|i| images[&(Syllable { factor, element: e }, i)]).collect()
                }
            })
            .collect()
    };
    Ok(ActionTables { degree, a: rows(Factor::A, fp.a().size()), b: rows(Factor::B, fp.b().size()) })
}
