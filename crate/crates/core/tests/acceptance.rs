//! End-to-end acceptance checks. Each criterion prints one line and the
//! process exits nonzero if any fails.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ordsep::actions::regular_via;
use ordsep::cartesian::{abelianize, basis_rank, expand, rs_rewrite, FreeWordC, Letter};
use ordsep::graph::WordCycles;
use ordsep::oracle::{brute_conjugacy, enumerate_pairs, min_separating_degree, words_up_to};
use ordsep::separator::{separate_orders, verify_certificate, Certificate, Outcome, Provenance, Refusal, SeparatorConfig};
use ordsep::tower::{Rival, StepOutcome, Tower, TowerState};
use ordsep::{ActionGraph, Factor, FiniteGroup, FreeProduct, PathRef, Word};

type Perm = Vec<usize>;

/// x ↦ q(p(x)): p first.
fn then(p: &Perm, q: &Perm) -> Perm {
    p.iter().map(|&x| q[x]).collect()
}

fn is_identity(p: &Perm) -> bool {
    p.iter().enumerate().all(|(i, &x)| i == x)
}

fn power_order(p: &Perm) -> u64 {
    let mut q = p.clone();
    let mut k = 1;
    while !is_identity(&q) {
        q = then(&q, p);
        k += 1;
    }
    k
}

fn closure(gens: &[Perm]) -> Vec<Perm> {
    let id: Perm = (0..gens[0].len()).collect();
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut order = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = then(&x, g);
            if seen.insert(y.clone()) {
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    order
}

/// The dihedral group of order 2m as permutations of the m-gon, with
/// a ↦ reflection x ↦ −x and b ↦ x ↦ 1 − x. Then ab is a rotation by one step.
fn polygon_generators(m: usize) -> (Perm, Perm) {
    let s = (0..m).map(|x| (m - x) % m).collect();
    let t = (0..m).map(|x| (m + 1 - x) % m).collect();
    (s, t)
}

/// Right regular action of a permutation group on its own elements.
fn regular_rows(elements: &[Perm], g: &Perm) -> Perm {
    elements.iter().map(|x| elements.iter().position(|y| *y == then(x, g)).unwrap()).collect()
}

fn fold(a: &[Perm], b: &[Perm], w: &Word) -> Perm {
    let mut p: Perm = (0..a[0].len()).collect();
    for s in w.syllables() {
        let row = match s.factor {
            Factor::A => &a[s.element],
            Factor::B => &b[s.element],
        };
        p = then(&p, row);
    }
    p
}

struct Check {
    pass: bool,
    detail: String,
}

fn criterion(n: u32, name: &str, limit: Duration, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let check = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or_else(|_| Check {
        pass: false,
        detail: "panicked".into(),
    });
    let elapsed = start.elapsed();
    let pass = check.pass && elapsed < limit;
    println!(
        "acceptance {n} [{}] {name}: {} ({:.2}s of {}s)",
        if pass { "PASS" } else { "FAIL" },
        check.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn c2c2() -> FreeProduct {
    FreeProduct::new(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2))
}

fn c2c3() -> FreeProduct {
    FreeProduct::new(FiniteGroup::cyclic(2), FiniteGroup::cyclic(3))
}

fn separate(fp: &FreeProduct, u: &Word, v: &Word) -> Outcome {
    separate_orders(fp, u, v, &SeparatorConfig::default()).expect("driver error")
}

fn power_case() -> Check {
    let fp = c2c2();
    let u = fp.parse_word("a b").unwrap();
    let v = fp.pow(&u, 3);
    // oracle: 12-point regular action of the dihedral group of order 12
    let (s, t) = polygon_generators(6);
    let elements = closure(&[s.clone(), t.clone()]);
    let id: Perm = (0..12).collect();
    let (ra, rb) = (vec![id.clone(), regular_rows(&elements, &s)], vec![id, regular_rows(&elements, &t)]);
    let oracle = (elements.len(), power_order(&fold(&ra, &rb, &u)), power_order(&fold(&ra, &rb, &v)));
    let Outcome::Separated(cert) = separate(&fp, &u, &v) else {
        return Check { pass: false, detail: "no certificate".into() };
    };
    let verified = verify_certificate(&fp, &u, &v, &cert).passed();
    let pass = oracle == (12, 6, 2)
        && verified
        && cert.u_order != cert.v_order
        && cert.provenance == Provenance::PPower
        && cert.degree() <= 16
        && (cert.degree(), cert.u_order, cert.v_order) == oracle;
    Check {
        pass,
        detail: format!(
            "orders ({}, {}) at degree {} via {}; oracle {:?}",
            cert.u_order, cert.v_order, cert.degree(), cert.provenance, oracle
        ),
    }
}

fn cartesian_power_case() -> Check {
    let fp = c2c2();
    let ab = fp.parse_word("a b").unwrap();
    let (u, v) = (fp.pow(&ab, 4), fp.pow(&ab, 2));
    // oracle: the dihedral group of order 16 from its multiplication table
    let (s, t) = polygon_generators(8);
    let elements = closure(&[s.clone(), t.clone()]);
    let index = |p: &Perm| elements.iter().position(|y| y == p).unwrap();
    let table: Vec<Vec<usize>> = elements.iter().map(|x| elements.iter().map(|y| index(&then(x, y))).collect()).collect();
    let d16 = FiniteGroup::from_table(&table).expect("valid table");
    let right = |g: usize| -> Perm { (0..16).map(|x| d16.mul(x, g)).collect() };
    let id: Perm = (0..16).collect();
    let (ra, rb) = (vec![id.clone(), right(index(&s))], vec![id, right(index(&t))]);
    let oracle = (power_order(&fold(&ra, &rb, &u)), power_order(&fold(&ra, &rb, &v)));

    let Outcome::Separated(cert) = separate(&fp, &u, &v) else {
        return Check { pass: false, detail: "no certificate".into() };
    };
    let image = closure(&[cert.tables.a[1].clone(), cert.tables.b[1].clone()]);
    let transitive = image.iter().map(|g| g[0]).collect::<BTreeSet<_>>().len() == cert.degree();
    let pass = oracle == (2, 4)
        && (cert.u_order, cert.v_order) == oracle
        && cert.degree() == 16
        && image.len() == 16
        && transitive
        && verify_certificate(&fp, &u, &v, &cert).passed();
    Check {
        pass,
        detail: format!(
            "orders ({}, {}) on {} cosets, image of order {} acting regularly: {transitive}; oracle {:?}",
            cert.u_order,
            cert.v_order,
            cert.degree(),
            image.len(),
            oracle
        ),
    }
}

fn mixed_case() -> Check {
    let fp = c2c2();
    let u = fp.parse_word("a b").unwrap();
    let v = fp.parse_word("a").unwrap();
    let witness = (1..=8).find_map(|d| {
        enumerate_pairs(&fp, d).unwrap().find(|p| p.order(&u) == 4 && p.order(&v) == 2).map(|_| d)
    });
    let Outcome::Separated(cert) = separate(&fp, &u, &v) else {
        return Check { pass: false, detail: "no certificate".into() };
    };
    let pass = cert.v_order == 2 && cert.u_order != 2 && witness.is_some() && verify_certificate(&fp, &u, &v, &cert).passed();
    Check {
        pass,
        detail: format!(
            "orders ({}, {}) at degree {} via {}; (4, 2) witness at degree {:?}",
            cert.u_order,
            cert.v_order,
            cert.degree(),
            cert.provenance,
            witness
        ),
    }
}

fn refusals() -> Check {
    let fp = c2c2();
    let u = fp.parse_word("a b").unwrap();
    let v = fp.parse_word("b a").unwrap();
    let conj_ok = match separate(&fp, &u, &v) {
        Outcome::Refused(Refusal::ConjugatePair { conjugator, inverted }) => {
            let target = if inverted { fp.invert(&v) } else { v.clone() };
            fp.conjugate(&u, &conjugator) == target && conjugator.len() <= 2
        }
        _ => false,
    };
    let brute = brute_conjugacy(&fp, &u, &v, 2).unwrap();

    let c5 = FreeProduct::new(FiniteGroup::cyclic(5), FiniteGroup::cyclic(2));
    let (x, y) = (c5.parse_word("A1").unwrap(), c5.parse_word("A2").unwrap());
    let kernels: Vec<Vec<usize>> =
        c5.a().normal_subgroups().unwrap().into_iter().map(|k| k.into_iter().collect()).collect();
    let factor_ok = match separate(&c5, &x, &y) {
        Outcome::Refused(Refusal::FactorPairInseparable { factor, examined }) => {
            factor == Factor::A
                && examined.iter().map(|r| r.kernel.clone()).collect::<Vec<_>>() == kernels
                && examined.iter().all(|r| r.order_g == r.order_h)
        }
        _ => false,
    };
    Check {
        pass: conj_ok && brute && factor_ok && kernels.len() == 2,
        detail: format!("conjugate-pair verified {conj_ok} (brute {brute}); C5 sweep over {} kernels {factor_ok}", kernels.len()),
    }
}

/// Rechecks a certificate from first principles.
fn independently_valid(fp: &FreeProduct, u: &Word, v: &Word, cert: &Certificate) -> bool {
    let d = cert.tables.degree;
    for (group, rows) in [(fp.a(), &cert.tables.a), (fp.b(), &cert.tables.b)] {
        if rows.len() != group.size() || rows.iter().any(|r| r.len() != d) {
            return false;
        }
        if rows.iter().any(|r| r.iter().collect::<BTreeSet<_>>().len() != d || r.iter().any(|&x| x >= d)) {
            return false;
        }
        if !is_identity(&rows[0]) {
            return false;
        }
        for g in group.elements() {
            for h in group.elements() {
                if then(&rows[g], &rows[h]) != rows[group.mul(g, h)] {
                    return false;
                }
            }
        }
    }
    let uo = power_order(&fold(&cert.tables.a, &cert.tables.b, u));
    let vo = power_order(&fold(&cert.tables.a, &cert.tables.b, v));
    uo == cert.u_order && vo == cert.v_order && uo != vo
}

fn soundness_fuzz() -> Check {
    let mut pool = Vec::new();
    for (fp, u, v) in [(c2c2(), "a b", "a b a b a b"), (c2c2(), "a b", "a"), (c2c3(), "a b", "a B2 a b a b")] {
        let (u, v) = (fp.parse_word(u).unwrap(), fp.parse_word(v).unwrap());
        let cert = separate(&fp, &u, &v).certificate().cloned().expect("certificate");
        pool.push((fp, u, v, cert));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut rejected, mut false_accepts, mut disagreements) = (0, 0, 0);
    for _ in 0..100 {
        let (fp, u, v, cert) = &pool[rng.gen_range(0..pool.len())];
        let mut bad = cert.clone();
        let d = bad.degree();
        let rows = if rng.gen_bool(0.5) { &mut bad.tables.a } else { &mut bad.tables.b };
        let (g, x) = (rng.gen_range(0..rows.len()), rng.gen_range(0..d));
        let old = rows[g][x];
        rows[g][x] = (old + rng.gen_range(1..d)) % d;
        let accepted = verify_certificate(fp, u, v, &bad).passed();
        let valid = independently_valid(fp, u, v, &bad);
        if accepted != valid {
            disagreements += 1;
        }
        if accepted && !valid {
            false_accepts += 1;
        }
        if !accepted {
            rejected += 1;
        }
    }
    let originals_pass = pool.iter().all(|(fp, u, v, c)| verify_certificate(fp, u, v, c).passed() && independently_valid(fp, u, v, c));
    Check {
        pass: false_accepts == 0 && disagreements == 0 && originals_pass,
        detail: format!("{rejected}/100 mutations rejected, {false_accepts} false accepts, {disagreements} disagreements with the independent check"),
    }
}

fn tower_invariants() -> Check {
    let fp = c2c2();
    let u = fp.parse_word("a b").unwrap();
    let d8 = ActionGraph::from_actions(&fp, regular_via(&fp, &FiniteGroup::dihedral(8), &[0, 4], &[0, 5]), true).unwrap();
    let uc = d8.word_cycles(&u).unwrap();
    let q = uc.cycles[uc.maximal().next().unwrap()][0];
    let mut state = TowerState { path: PathRef::empty_at(q), n: 0, phase: 0, cycle_base: q, t: uc.max_len, graph: d8 };
    let tower = Tower::new(&fp, u.clone(), Rival::None, 1 << 20).unwrap();
    let mut problems = Vec::new();
    let mut sizes = vec![(state.graph.vertex_count(), state.t)];
    for _ in 0..3 {
        let before = state.graph.word_cycles(&u).unwrap();
        let (v_before, t) = (state.graph.vertex_count(), state.t);
        let StepOutcome::Advanced { state: next, surgeries } = tower.step(&state).unwrap() else {
            problems.push("unexpected separation".to_string());
            break;
        };
        let after: WordCycles = next.graph.word_cycles(&u).unwrap();
        let n = next.n;
        if !next.graph.tables().defects(&fp, true).is_empty() {
            problems.push(format!("stage {n}: action not free"));
        }
        if !after.lengths_divide_max {
            problems.push(format!("stage {n}: property 3"));
        }
        if !after.no_near_edges {
            problems.push(format!("stage {n}: property 5"));
        }
        let edges = next.graph.path_edges(&next.path).unwrap();
        if next.path.len() != n || !after.maximal().any(|i| next.graph.cycle_contains(&u, &after.cycles[i], &edges)) {
            problems.push(format!("stage {n}: property 4"));
        }
        let copies: usize = surgeries.iter().map(|s| s.copies).product();
        if next.graph.vertex_count() != v_before * copies || surgeries.iter().any(|s| s.vertices_after != s.vertices_before * s.copies) {
            problems.push(format!("stage {n}: vertex count"));
        }
        if after.max_len != t * before.max_len {
            problems.push(format!("stage {n}: max u-cycle {} is not {t}·{}", after.max_len, before.max_len));
        }
        let old: BTreeSet<u64> = before.lengths.iter().copied().collect();
        if after.lengths.iter().any(|&l| !old.contains(&l) && !(l % t == 0 && old.contains(&(l / t)))) {
            problems.push(format!("stage {n}: a u-cycle length neither kept nor multiplied by t"));
        }
        state = next;
        sizes.push((state.graph.vertex_count(), state.t));
    }
    Check {
        pass: problems.is_empty() && state.path.len() == 3,
        detail: format!("(vertices, max u-cycle) per stage {sizes:?}; {}", if problems.is_empty() { "no violations".to_string() } else { problems.join(", ") }),
    }
}

fn rs_round_trip() -> Check {
    let fp = c2c3();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rank = basis_rank(&fp);
    let mut failures = 0;
    let random_fw = |rng: &mut ChaCha8Rng| {
        let len = rng.gen_range(0..=10);
        FreeWordC::reduce((0..len).map(|_| Letter {
            a: rng.gen_range(1..fp.a().size()),
            b: rng.gen_range(1..fp.b().size()),
            inverse: rng.gen_bool(0.5),
        }))
    };
    // exponent sums straight from the letters
    let exponent_sum = |fw: &FreeWordC| {
        let mut e = vec![0i64; rank];
        for l in fw.letters() {
            e[(l.a - 1) * (fp.b().size() - 1) + (l.b - 1)] += if l.inverse { -1 } else { 1 };
        }
        e
    };
    for _ in 0..500 {
        let (x, y) = (random_fw(&mut rng), random_fw(&mut rng));
        let (wx, wy) = (expand(&fp, &x), expand(&fp, &y));
        let rx = rs_rewrite(&fp, &wx).unwrap();
        let ry = rs_rewrite(&fp, &wy).unwrap();
        let rxy = rs_rewrite(&fp, &fp.mul(&wx, &wy)).unwrap();
        let sum: Vec<i64> = exponent_sum(&x).iter().zip(exponent_sum(&y)).map(|(p, q)| p + q).collect();
        let ok = expand(&fp, &rx) == wx
            && rx == x
            && ry == y
            && abelianize(&fp, &rx) == exponent_sum(&x)
            && abelianize(&fp, &rxy) == sum
            && rxy == x.concat(&y);
        if !ok {
            failures += 1;
        }
    }
    Check { pass: failures == 0, detail: format!("500 products of rank-{rank} basis letters, {failures} failures") }
}

fn conjugacy_agreement() -> Check {
    let fp = c2c3();
    let words = words_up_to(&fp, 5);
    let (mut pairs, mut mismatches, mut positives) = (0, 0, 0);
    for u in &words {
        for v in &words {
            for target in [v.clone(), fp.invert(v)] {
                pairs += 1;
                let fast = fp.conjugate_test(u, &target);
                let brute = brute_conjugacy(&fp, u, &target, 4).unwrap();
                let sound = fast.as_ref().is_none_or(|c| fp.conjugate(u, c) == target);
                if fast.is_some() != brute || !sound {
                    mismatches += 1;
                }
                positives += usize::from(brute);
            }
        }
    }
    Check {
        pass: mismatches == 0,
        detail: format!("{} words, {pairs} ordered pairs with inverses, {positives} conjugate, {mismatches} mismatches", words.len()),
    }
}

fn oracle_completeness() -> Check {
    let fp = c2c2();
    let words: Vec<Word> = words_up_to(&fp, 4).into_iter().filter(|w| !w.is_empty() && w.is_cyclically_reduced()).collect();
    let (mut checked, mut separable, mut failures) = (0, 0, Vec::new());
    for u in &words {
        for v in &words {
            if fp.conjugate_test(u, v).is_some() || fp.conjugate_test(u, &fp.invert(v)).is_some() {
                continue;
            }
            checked += 1;
            if min_separating_degree(&fp, u, v, 8).unwrap().is_none() {
                continue;
            }
            separable += 1;
            match separate(&fp, u, v) {
                Outcome::Separated(c) if verify_certificate(&fp, u, v, &c).passed() => {}
                other => failures.push(format!("({u}, {v}) -> {}", other.class())),
            }
        }
    }
    Check {
        pass: failures.is_empty() && checked > 0,
        detail: format!("{checked} non-conjugate pairs, {separable} separable at degree <= 8, failures: {failures:?}"),
    }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        criterion(1, "power case ab vs (ab)^3", secs(10), power_case),
        criterion(2, "power case (ab)^4 vs (ab)^2", secs(10), cartesian_power_case),
        criterion(3, "mixed case ab vs a", secs(30), mixed_case),
        criterion(4, "refusals", secs(5), refusals),
        criterion(5, "soundness fuzz", secs(60), soundness_fuzz),
        criterion(6, "tower invariants", secs(60), tower_invariants),
        criterion(7, "rewriting round trip", secs(30), rs_round_trip),
        criterion(8, "conjugacy agreement", secs(300), conjugacy_agreement),
        criterion(9, "oracle completeness", secs(300), oracle_completeness),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
