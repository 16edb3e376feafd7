//! Finite groups given by full multiplication tables.
//!
//! Every group stores its identity at index 0. Named families (cyclic,
//! dihedral, symmetric and direct products of these) are generated here;
//! anything else arrives as a raw table and is validated exhaustively.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

/// Largest group for which normal subgroups and factor quotients are enumerated.
pub const DEFAULT_SIZE_BOUND: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group table is empty")]
    Empty,
    #[error("row {row} has {len} entries, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("table entry {value} at ({row}, {col}) is out of range")]
    EntryOutOfRange { row: usize, col: usize, value: usize },
    #[error("element 0 is not a two-sided identity (fails at {0})")]
    MissingIdentity(usize),
    #[error("element {0} has no inverse")]
    MissingInverse(usize),
    #[error("row {0} is not a permutation of the elements")]
    NotLatin(usize),
    #[error("associativity fails for ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("element {index} out of range for group of order {size}")]
    ElementOutOfRange { index: usize, size: usize },
    #[error("group of order {size} exceeds the enumeration bound {bound}")]
    TooLarge { size: usize, bound: usize },
    #[error("element set is not a subgroup")]
    NotSubgroup,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("elements {0} and {1} are conjugate up to inversion")]
    ConjugatePair(usize, usize),
    #[error("cannot parse group spec {0:?}")]
    BadSpec(String),
    #[error("malformed group file: {0}")]
    BadFile(String),
}

/// A finite group stored as its multiplication table.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    size: usize,
    table: Vec<usize>,
    inverses: Vec<usize>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup(order {})", self.size)
    }
}

impl FiniteGroup {
    /// Validates a raw table (rows indexed by the left factor) against the group axioms.
    pub fn from_table(rows: &[Vec<usize>]) -> Result<Self, GroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        let mut table = Vec::with_capacity(n * n);
        for (row, entries) in rows.iter().enumerate() {
            if entries.len() != n {
                return Err(GroupError::Ragged { row, len: entries.len(), expected: n });
            }
            for (col, &value) in entries.iter().enumerate() {
                if value >= n {
                    return Err(GroupError::EntryOutOfRange { row, col, value });
                }
            }
            table.extend_from_slice(entries);
        }
        for g in 0..n {
            if table[g] != g || table[g * n] != g {
                return Err(GroupError::MissingIdentity(g));
            }
        }
        let mut inverses = vec![usize::MAX; n];
        for g in 0..n {
            let right = (0..n).filter(|&h| table[g * n + h] == 0).collect::<Vec<_>>();
            match right.as_slice() {
                [h] if table[*h * n + g] == 0 => inverses[g] = *h,
                _ => return Err(GroupError::MissingInverse(g)),
            }
        }
        for g in 0..n {
            let mut seen = vec![false; n];
            for h in 0..n {
                let x = table[g * n + h];
                if seen[x] {
                    return Err(GroupError::NotLatin(g));
                }
                seen[x] = true;
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a * n + b];
                for c in 0..n {
                    if table[ab * n + c] != table[a * n + table[b * n + c]] {
                        return Err(GroupError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(FiniteGroup { size: n, table, inverses })
    }

    /// Builds a group from a product closure known to satisfy the axioms.
    fn from_fn(n: usize, mul: impl Fn(usize, usize) -> usize) -> Self {
        let mut table = Vec::with_capacity(n * n);
        for g in 0..n {
            for h in 0..n {
                table.push(mul(g, h));
            }
        }
        let inverses = (0..n)
            .map(|g| (0..n).find(|&h| table[g * n + h] == 0).expect("group closure has inverses"))
            .collect();
        FiniteGroup { size: n, table, inverses }
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// Z/n with element k standing for k.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "cyclic group needs positive order");
        Self::from_fn(n, |g, h| (g + h) % n)
    }

    /// Dihedral group of order `order` = 2m; element `i + m*j` is r^i s^j.
    pub fn dihedral(order: usize) -> Self {
        assert!(order >= 2 && order.is_multiple_of(2), "dihedral order must be even");
        let m = order / 2;
        Self::from_fn(order, |g, h| {
            let (i, j) = (g % m, g / m);
            let (k, l) = (h % m, h / m);
            let rot = if j == 0 { (i + k) % m } else { (i + m - k) % m };
            rot + m * ((j + l) % 2)
        })
    }

    /// Symmetric group on n points, elements in lexicographic order of their
    /// one-line images (identity first). The product `g*h` applies g first.
    pub fn symmetric(n: usize) -> Self {
        let perms = permutations(n);
        let index = |p: &[usize]| perms.binary_search_by(|q| q.as_slice().cmp(p)).unwrap();
        let lookup: Vec<Vec<usize>> = perms.clone();
        Self::from_fn(perms.len(), |g, h| {
            let composed: Vec<usize> = (0..n).map(|x| lookup[h][lookup[g][x]]).collect();
            index(&composed)
        })
    }

    /// Element `(g, h)` is stored at `g + |self| * h`.
    pub fn direct_product(&self, other: &FiniteGroup) -> Self {
        let n = self.size;
        Self::from_fn(n * other.size, |x, y| {
            self.mul(x % n, y % n) + n * other.mul(x / n, y / n)
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.size + h]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn pow(&self, g: usize, k: u64) -> usize {
        let mut acc = 0;
        for _ in 0..k % self.element_order_unchecked(g) {
            acc = self.mul(acc, g);
        }
        acc
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.size).map(<[usize]>::to_vec).collect()
    }

    pub fn check(&self, g: usize) -> Result<(), GroupError> {
        if g < self.size {
            Ok(())
        } else {
            Err(GroupError::ElementOutOfRange { index: g, size: self.size })
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|g| self.elements().all(|h| self.mul(g, h) == self.mul(h, g)))
    }

    pub fn element_order(&self, g: usize) -> Result<u64, GroupError> {
        self.check(g)?;
        Ok(self.element_order_unchecked(g))
    }

    pub(crate) fn element_order_unchecked(&self, g: usize) -> u64 {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// `c⁻¹ g c`
    pub fn conjugate(&self, g: usize, c: usize) -> usize {
        self.mul(self.mul(self.inv(c), g), c)
    }

    /// Returns the first (smallest index) c with c⁻¹gc = h.
    pub fn are_conjugate_in(&self, g: usize, h: usize) -> Result<Option<usize>, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.elements().find(|&c| self.conjugate(g, c) == h))
    }

    /// Conjugacy classes, each sorted, listed by smallest member.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size];
        let mut classes = Vec::new();
        for g in self.elements() {
            if seen[g] {
                continue;
            }
            let class: BTreeSet<usize> = self.elements().map(|c| self.conjugate(g, c)).collect();
            for &x in &class {
                seen[x] = true;
            }
            classes.push(class.into_iter().collect());
        }
        classes
    }

    /// Closure of `seed ∪ {0}` under the product; finite, so this is a subgroup.
    pub fn subgroup_generated(&self, seed: &[usize]) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::from([0]);
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in seed {
                let y = self.mul(x, g);
                if set.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        set
    }

    pub fn is_subgroup(&self, set: &BTreeSet<usize>) -> bool {
        set.contains(&0)
            && set.iter().all(|&g| g < self.size)
            && set.iter().all(|&g| set.iter().all(|&h| set.contains(&self.mul(g, h))))
    }

    pub fn is_normal(&self, set: &BTreeSet<usize>) -> bool {
        self.is_subgroup(set)
            && set.iter().all(|&g| self.elements().all(|c| set.contains(&self.conjugate(g, c))))
    }

    /// All normal subgroups, sorted by size and then lexicographically by
    /// their sorted element lists.
    ///
    /// Every normal subgroup is a union of conjugacy classes containing the
    /// identity that is closed under the product. Candidates are produced by
    /// repeatedly adjoining one class to an already-found normal subgroup and
    /// closing, which reaches every such union.
    pub fn normal_subgroups(&self) -> Result<Vec<BTreeSet<usize>>, GroupError> {
        self.normal_subgroups_bounded(DEFAULT_SIZE_BOUND)
    }

    pub fn normal_subgroups_bounded(&self, bound: usize) -> Result<Vec<BTreeSet<usize>>, GroupError> {
        if self.size > bound {
            return Err(GroupError::TooLarge { size: self.size, bound });
        }
        let classes = self.conjugacy_classes();
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue: VecDeque<BTreeSet<usize>> = VecDeque::new();
        let trivial = BTreeSet::from([0]);
        found.insert(vec![0]);
        queue.push_back(trivial);
        while let Some(n) = queue.pop_front() {
            for class in &classes {
                if n.contains(&class[0]) {
                    continue;
                }
                let mut seed: Vec<usize> = n.iter().copied().collect();
                seed.extend_from_slice(class);
                let closed = self.subgroup_generated(&seed);
                let key: Vec<usize> = closed.iter().copied().collect();
                if found.insert(key) {
                    queue.push_back(closed);
                }
            }
        }
        let mut all: Vec<Vec<usize>> = found.into_iter().collect();
        all.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        Ok(all.into_iter().map(|v| v.into_iter().collect()).collect())
    }

    /// Cosets gN of a normal subgroup, listed by smallest representative.
    pub fn quotient_map(&self, kernel: &BTreeSet<usize>) -> Result<QuotientMap, GroupError> {
        if !self.is_subgroup(kernel) {
            return Err(GroupError::NotSubgroup);
        }
        if !self.is_normal(kernel) {
            return Err(GroupError::NotNormal);
        }
        let mut projection = vec![usize::MAX; self.size];
        let mut reps = Vec::new();
        for g in self.elements() {
            if projection[g] != usize::MAX {
                continue;
            }
            let idx = reps.len();
            reps.push(g);
            for &k in kernel {
                projection[self.mul(g, k)] = idx;
            }
        }
        let target = Self::from_fn(reps.len(), |i, j| projection[self.mul(reps[i], reps[j])]);
        Ok(QuotientMap { kernel: kernel.clone(), target, projection })
    }

    /// Searches the quotients of this group for one in which `g` and `h`
    /// have images of different orders.
    ///
    /// Kernels are tried in the order of [`FiniteGroup::normal_subgroups`].
    /// Returns `Ok(None)` when no quotient separates them.
    pub fn separate_in_factor(&self, g: usize, h: usize) -> Result<Option<QuotientMap>, GroupError> {
        Ok(self.factor_quotient_sweep(g, h)?.separating)
    }

    /// The full sweep behind [`FiniteGroup::separate_in_factor`], keeping
    /// every examined quotient for use as a witness.
    pub fn factor_quotient_sweep(&self, g: usize, h: usize) -> Result<QuotientSweep, GroupError> {
        self.check(g)?;
        self.check(h)?;
        if self.are_conjugate_in(g, h)?.is_some() || self.are_conjugate_in(g, self.inv(h))?.is_some() {
            return Err(GroupError::ConjugatePair(g, h));
        }
        let mut examined = Vec::new();
        for kernel in self.normal_subgroups()? {
            let q = self.quotient_map(&kernel)?;
            let og = q.target.element_order_unchecked(q.project(g));
            let oh = q.target.element_order_unchecked(q.project(h));
            examined.push(QuotientRecord { kernel: kernel.iter().copied().collect(), order_g: og, order_h: oh });
            if og != oh {
                return Ok(QuotientSweep { examined, separating: Some(q) });
            }
        }
        Ok(QuotientSweep { examined, separating: None })
    }

    /// Some homomorphisms from `self` into `target`, built by assigning
    /// images to a generating set and closing. Only those that are
    /// injective when `injective` is set. Deterministic order.
    pub fn homomorphisms_into(&self, target: &FiniteGroup, injective: bool) -> Vec<Vec<usize>> {
        let gens = self.generating_set();
        let mut out = Vec::new();
        let mut choice = vec![0usize; gens.len()];
        loop {
            if let Some(map) = self.extend_hom(target, &gens, &choice) {
                let ok = !injective || {
                    let distinct: BTreeSet<usize> = map.iter().copied().collect();
                    distinct.len() == self.size
                };
                if ok {
                    out.push(map);
                }
            }
            // odometer over generator images
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return out;
                }
                choice[i] += 1;
                if choice[i] < target.size {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    fn extend_hom(&self, target: &FiniteGroup, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
        let mut map = vec![usize::MAX; self.size];
        map[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (&g, &img) in gens.iter().zip(images) {
                let y = self.mul(x, g);
                let want = target.mul(map[x], img);
                if map[y] == usize::MAX {
                    map[y] = want;
                    queue.push_back(y);
                } else if map[y] != want {
                    return None;
                }
            }
        }
        let hom = self
            .elements()
            .all(|x| self.elements().all(|y| map[self.mul(x, y)] == target.mul(map[x], map[y])));
        hom.then_some(map)
    }

    /// Greedy generating set: smallest elements not yet in the span.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = BTreeSet::from([0]);
        for g in self.elements() {
            if !span.contains(&g) {
                gens.push(g);
                span = self.subgroup_generated(&gens);
            }
        }
        gens
    }

    /// Text format: first line n, then n rows of n indices.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.size);
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(usize::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GroupError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| GroupError::BadFile("missing order line".into()))?
            .parse()
            .map_err(|_| GroupError::BadFile("order is not an integer".into()))?;
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let line = lines.next().ok_or_else(|| GroupError::BadFile(format!("missing row {i}")))?;
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| GroupError::BadFile(format!("bad entry {t:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        if lines.next().is_some() {
            return Err(GroupError::BadFile("trailing data after table".into()));
        }
        Self::from_table(&rows)
    }
}

/// One quotient examined by a factor sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientRecord {
    pub kernel: Vec<usize>,
    pub order_g: u64,
    pub order_h: u64,
}

#[derive(Debug, Clone)]
pub struct QuotientSweep {
    pub examined: Vec<QuotientRecord>,
    pub separating: Option<QuotientMap>,
}

/// Projection of a finite group onto its quotient by a normal subgroup.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    pub kernel: BTreeSet<usize>,
    pub target: FiniteGroup,
    pub projection: Vec<usize>,
}

impl QuotientMap {
    pub fn project(&self, g: usize) -> usize {
        self.projection[g]
    }
}

/// A named group family or a product of them, e.g. `C2`, `D8`, `S3`, `C2xC3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Product(Vec<GroupSpec>),
}

impl GroupSpec {
    pub fn build(&self) -> FiniteGroup {
        match self {
            GroupSpec::Cyclic(n) => FiniteGroup::cyclic(*n),
            GroupSpec::Dihedral(n) => FiniteGroup::dihedral(*n),
            GroupSpec::Symmetric(n) => FiniteGroup::symmetric(*n),
            GroupSpec::Product(parts) => parts
                .iter()
                .map(GroupSpec::build)
                .reduce(|acc, g| acc.direct_product(&g))
                .unwrap_or_else(FiniteGroup::trivial),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GroupError::BadSpec(s.to_string());
        let parts: Vec<&str> = s.trim().split('x').collect();
        if parts.len() > 1 {
            let specs = parts.iter().map(|p| p.parse()).collect::<Result<Vec<GroupSpec>, _>>()?;
            return Ok(GroupSpec::Product(specs));
        }
        let mut chars = parts[0].chars();
        let head = chars.next();
        let n: usize = chars.as_str().parse().map_err(|_| bad())?;
        match head {
            Some('C') if n >= 1 => Ok(GroupSpec::Cyclic(n)),
            Some('D') if n >= 2 && n.is_multiple_of(2) => Ok(GroupSpec::Dihedral(n)),
            Some('S') if (1..=6).contains(&n) => Ok(GroupSpec::Symmetric(n)),
            _ => Err(bad()),
        }
    }
}

/// Builds a group from a spec string.
pub fn make_group(spec: &str) -> Result<FiniteGroup, GroupError> {
    Ok(spec.parse::<GroupSpec>()?.build())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                current.push(x);
                rec(n, current, used, out);
                current.pop();
                used[x] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut out);
    out
}

/// p-adic valuation of a nonzero integer.
pub(crate) fn valuation(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x != 0 && x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

pub(crate) fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}
