//! Acceptance gate: one test per criterion, each printing a pass/fail
//! line. Run with `cargo test -p fgcs --test acceptance -- --nocapture`.
//!
//! Expected values tagged as derived are recomputed here by independent
//! oracles (definitional quantifiers, exhaustive generators) before being
//! asserted.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fgcs::fixtures;
use fgcs::miner::{self, MinerConfig};
use fgcs::morphism::{poset_fn_to_am, am_to_poset_fn, AMRelation, ScottMap};
use fgcs::poset::{all_posets, monotone_maps, FinPoset};
use fgcs::ray::{self, Rat};
use fgcs::set::{Subset, DEFAULT_CAP};
use fgcs::space::{FGCSpace, Mode, WAY_BELOW_ORACLE_CAP};
use fgcs::subclass;

fn sweep() -> Vec<FinPoset> {
    let mut out = Vec::new();
    // Counts are produced and asserted by the generator itself.
    let expected = [1usize, 3, 19, 219];
    for n in 1..=4 {
        let posets = all_posets(n).expect("generator");
        assert_eq!(posets.len(), expected[n - 1], "labeled poset count at size {n}");
        out.extend(posets);
    }
    out
}

#[test]
fn criterion_1_representation_roundtrip() {
    let started = Instant::now();
    let posets = sweep();
    let mut checked = 0usize;
    for p in &posets {
        let out = p.roundtrip(DEFAULT_CAP).expect("within cap");
        assert!(out.report.ok, "roundtrip failed:\n{}", out.report.render_human());
        // The correspondence is a bijection: as many regular opens as
        // elements.
        assert_eq!(out.regular_count, p.size());
        checked += 1;
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 30, "runtime bound: {elapsed:?}");
    println!(
        "[PASS] criterion 1: representation roundtrip exact on {checked} posets \
         (219 at size 4) in {elapsed:?}"
    );
}

#[test]
fn criterion_2_oracle_agreement() {
    let started = Instant::now();
    let mut spaces: Vec<FGCSpace> = sweep()
        .iter()
        .map(|p| p.to_fgcs(DEFAULT_CAP).expect("derived"))
        .collect();
    let seed = 20_260_809u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..500 {
        spaces.push(miner::random_valid_space(&mut rng, 6, DEFAULT_CAP));
    }
    let mut subset_checks = 0usize;
    let mut pair_checks = 0usize;
    let mut oracle_skips = 0usize;
    for x in &spaces {
        for bits in 0..x.universe().subset_count() {
            let s = Subset::from_bits(x.universe(), bits);
            let fast = x.is_regular_open(&s, Mode::Fast).unwrap();
            let oracle = x.is_regular_open(&s, Mode::Oracle).unwrap();
            assert_eq!(fast, oracle, "regularity modes disagree at {s}");
            subset_checks += 1;
        }
        let regulars = x.regular_opens(DEFAULT_CAP).unwrap();
        if regulars.len() > WAY_BELOW_ORACLE_CAP {
            oracle_skips += 1;
            continue;
        }
        let fast = x.way_below_matrix(Mode::Fast, DEFAULT_CAP).unwrap();
        let oracle = x.way_below_matrix(Mode::Oracle, DEFAULT_CAP).unwrap();
        for i in 0..regulars.len() {
            for j in 0..regulars.len() {
                assert_eq!(
                    fast[i][j], oracle[i][j],
                    "way-below modes disagree between {} and {}",
                    regulars.members().members()[i],
                    regulars.members().members()[j]
                );
                pair_checks += 1;
            }
        }
    }
    println!(
        "[PASS] criterion 2: exact mode agreement on {} spaces (seed {seed}): \
         {subset_checks} regularity checks, {pair_checks} way-below pairs, \
         {oracle_skips} way-below oracles skipped above {WAY_BELOW_ORACLE_CAP} regulars; {:?}",
        spaces.len(),
        started.elapsed()
    );
}

#[test]
fn criterion_3a_l_domain_iff_locally_consistent() {
    let mut live = 0usize;
    for p in sweep() {
        let flags = p.classify().flags;
        let derived = p.to_fgcs(DEFAULT_CAP).unwrap();
        let locally = subclass::is_locally_consistent(&derived, DEFAULT_CAP).unwrap().ok;
        assert_eq!(
            flags.l_domain, locally,
            "L-domain flag and local consistency split on {:?}",
            p.pairs()
        );
        if locally {
            live += 1;
        }
    }
    println!(
        "[PASS] criterion 3a: L-domain flag matches local consistency on all 242 posets \
         ({live} positives)"
    );
}

#[test]
fn criterion_3b_bounded_complete_iff_subset_closed() {
    // The subset-closure condition quantifies every finite subset of
    // every hull, the empty set included, so a derived family (whose
    // members all have greatest elements) can only satisfy it vacuously.
    // The equivalence with the bounded-complete flag is asserted here
    // exactly as stated; the diamond order is the smallest witness that
    // it does not hold (bounded complete, yet {a,b} sits inside a hull
    // with no greatest element and the empty set is never a member).
    let mut mismatches = Vec::new();
    for p in sweep() {
        let flags = p.classify().flags;
        let derived = p.to_fgcs(DEFAULT_CAP).unwrap();
        let report = subclass::is_consistent(&derived, DEFAULT_CAP).unwrap();
        if flags.bounded_complete != report.ok {
            let witness = report
                .violations
                .first()
                .map(|v| v.render())
                .unwrap_or_else(|| "(no violation)".into());
            mismatches.push(format!(
                "poset {:?} on {} elements: bounded-complete={} subset-closed={} first witness {}",
                p.pairs()
                    .iter()
                    .map(|&(i, j)| format!("{}<={}", p.elements().label(i), p.elements().label(j)))
                    .collect::<Vec<_>>(),
                p.size(),
                flags.bounded_complete,
                report.ok,
                witness
            ));
        }
    }
    if mismatches.is_empty() {
        println!("[PASS] criterion 3b: bounded-complete flag matches subset-closure on all 242 posets");
    } else {
        println!(
            "[FAIL] criterion 3b: bounded-complete flag diverges from subset-closure on {} of 242 \
             posets. Subset-closure quantifies every finite subset of every hull, the empty set \
             included, and members of a derived family always have greatest elements, so every \
             bounded complete poset diverges; the diamond also fails on the bounded incomparable \
             pair. First witnesses:\n  {}",
            mismatches.len(),
            mismatches[..mismatches.len().min(3)].join("\n  ")
        );
    }
    assert!(
        mismatches.is_empty(),
        "bounded-complete flag and subset-closure disagree on {} posets",
        mismatches.len()
    );
}

#[test]
fn criterion_3c_mine_run_is_clean() {
    let started = Instant::now();
    // Non-vacuous fixture side: a subset-closed space is locally
    // consistent and its regular opens are bounded complete.
    for x in [fixtures::point_with_empty(), fixtures::chain2()] {
        if subclass::is_consistent(&x, DEFAULT_CAP).unwrap().ok {
            assert!(subclass::is_locally_consistent(&x, DEFAULT_CAP).unwrap().ok);
            assert!(subclass::verify_subclass_theorems(&x, DEFAULT_CAP).unwrap().ok);
        }
    }
    let cfg = MinerConfig::new(42, 1000, 5);
    let outcome = miner::mine(&cfg, DEFAULT_CAP);
    assert_eq!(outcome.candidates, 1000);
    assert!(
        outcome.ok(),
        "mine run found violations: {:#?}",
        outcome.violations
    );
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 300, "runtime bound: {elapsed:?}");
    println!(
        "[PASS] criterion 3c: seed-42 mine run of 1000 instances clean \
         ({} survivors, {} oracle skips) in {elapsed:?}",
        outcome.surviving_spaces, outcome.oracle_skips
    );
}

#[test]
fn criterion_4_morphism_calculus() {
    let started = Instant::now();
    let posets: Vec<FinPoset> = (1..=3).flat_map(|n| all_posets(n).unwrap()).collect();
    assert_eq!(posets.len(), 23);
    let spaces: Vec<Arc<FGCSpace>> =
        posets.iter().map(|p| Arc::new(p.to_fgcs(DEFAULT_CAP).unwrap())).collect();

    // Conversion round trips over every monotone map between the
    // regular-open posets of every pair of derived spaces.
    let mut scott_maps = 0usize;
    for a in &spaces {
        for b in &spaces {
            let ra = a.regular_opens(DEFAULT_CAP).unwrap();
            let rb = b.regular_opens(DEFAULT_CAP).unwrap();
            let pa = fgcs::poset::inclusion_poset(ra.members()).unwrap();
            let pb = fgcs::poset::inclusion_poset(rb.members()).unwrap();
            for map in monotone_maps(&pa, &pb) {
                let phi =
                    ScottMap::from_table(a, b, map.table().to_vec(), DEFAULT_CAP).unwrap();
                let mut theta = AMRelation::from_scott(&phi).unwrap();
                let report = theta.validate(DEFAULT_CAP).unwrap();
                assert!(report.ok, "induced relation invalid:\n{}", report.render_human());
                let back = theta.to_scott(DEFAULT_CAP).unwrap();
                assert_eq!(back.table(), map.table(), "function roundtrip");
                let theta_again = AMRelation::from_scott(&back).unwrap();
                assert_eq!(theta_again.pairs(), theta.pairs(), "relation roundtrip");
                scott_maps += 1;
            }
        }
    }

    // Conversion round trips between poset functions and relations.
    let mut poset_maps = 0usize;
    for p in &posets {
        for q in &posets {
            for f in monotone_maps(p, q) {
                let mut theta = poset_fn_to_am(&f, DEFAULT_CAP).unwrap();
                assert!(theta.validate(DEFAULT_CAP).unwrap().ok);
                let back = am_to_poset_fn(&theta, p, q, DEFAULT_CAP).unwrap();
                assert_eq!(back.table(), f.table(), "poset function roundtrip");
                let theta_again = poset_fn_to_am(&back, DEFAULT_CAP).unwrap();
                assert_eq!(theta_again.pairs(), theta.pairs(), "relation roundtrip");
                poset_maps += 1;
            }
        }
    }

    // Category laws on seeded random composable triples, plus the
    // functor checks (identity, composition, conversion roundtrip).
    let seed = 42u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triples = 0usize;
    while triples < 100 {
        let a = Arc::new(miner::random_valid_space(&mut rng, 6, DEFAULT_CAP));
        let b = Arc::new(miner::random_valid_space(&mut rng, 6, DEFAULT_CAP));
        let c = Arc::new(miner::random_valid_space(&mut rng, 6, DEFAULT_CAP));
        let Some(t1) = random_relation(&mut rng, &a, &b) else { continue };
        let Some(t2) = random_relation(&mut rng, &b, &c) else { continue };
        let Some(t3) = random_relation(&mut rng, &c, &a) else { continue };

        let mut inner = AMRelation::compose(&t1, &t2).unwrap();
        assert!(inner.validate(DEFAULT_CAP).unwrap().ok, "composite validates");
        let left = AMRelation::compose(&inner, &t3).unwrap();
        let mut inner2 = AMRelation::compose(&t2, &t3).unwrap();
        assert!(inner2.validate(DEFAULT_CAP).unwrap().ok);
        let right = AMRelation::compose(&t1, &inner2).unwrap();
        assert_eq!(left.pairs(), right.pairs(), "associativity");

        let mut id_a = AMRelation::identity(&a).unwrap();
        assert!(id_a.validate(DEFAULT_CAP).unwrap().ok);
        let mut id_b = AMRelation::identity(&b).unwrap();
        assert!(id_b.validate(DEFAULT_CAP).unwrap().ok);
        assert_eq!(AMRelation::compose(&id_a, &t1).unwrap().pairs(), t1.pairs());
        assert_eq!(AMRelation::compose(&t1, &id_b).unwrap().pairs(), t1.pairs());

        let functor = fgcs::morphism::check_functor_laws(
            &[(t1.clone(), t2.clone())],
            DEFAULT_CAP,
        )
        .unwrap();
        assert!(functor.ok, "functor laws:\n{}", functor.render_human());
        triples += 1;
    }

    let elapsed = started.elapsed();
    println!(
        "[PASS] criterion 4: {scott_maps} function conversions and {poset_maps} poset-function \
         conversions roundtrip exactly over all 23x23 poset pairs; category and functor laws \
         hold on 100 seeded random triples (seed {seed}); {elapsed:?}"
    );
}

fn random_relation<R: Rng>(
    rng: &mut R,
    a: &Arc<FGCSpace>,
    b: &Arc<FGCSpace>,
) -> Option<AMRelation> {
    let ra = a.regular_opens(DEFAULT_CAP).ok()?.len();
    let rb = b.regular_opens(DEFAULT_CAP).ok()?.len();
    if ra == 0 || rb == 0 {
        return None;
    }
    for _ in 0..40 {
        let table: Vec<usize> = (0..ra).map(|_| rng.gen_range(0..rb)).collect();
        if let Ok(phi) = ScottMap::from_table(a, b, table, DEFAULT_CAP) {
            let mut theta = AMRelation::from_scott(&phi).ok()?;
            if theta.validate(DEFAULT_CAP).ok()?.ok {
                return Some(theta);
            }
        }
    }
    None
}

#[test]
fn criterion_5_ray_exemplar() {
    let one = Rat::from_integer(1.into());
    let three = Rat::from_integer(3.into());
    let zero = Rat::from_integer(0.into());
    let two = Rat::from_integer(2.into());

    let hull = ray::ray_hull(&[one.clone(), three.clone()]).unwrap();
    assert_eq!(hull, ray::RayOpen::Ray(one.clone()));
    assert_eq!(hull.to_string(), "(1,inf)");

    assert_eq!(ray::ray_sigma(&[zero.clone()], &[]).unwrap(), ray::RaySigma::Empty);
    assert_eq!(
        ray::ray_sigma(&[zero.clone()], &[two.clone(), three.clone()]).unwrap(),
        ray::RaySigma::MinEquals(two.clone())
    );

    let seed = 42u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut interpolations = 0usize;
    for _ in 0..1000 {
        let a = Rat::new(rng.gen_range(-1000i64..1000).into(), rng.gen_range(1i64..1000).into());
        let b = Rat::new(rng.gen_range(-1000i64..1000).into(), rng.gen_range(1i64..1000).into());
        let u = ray::RayOpen::Ray(a.clone());
        let w = ray::RayOpen::Ray(b.clone());
        assert!(!ray::ray_way_below(&u, &u), "irreflexivity at {u}");
        if ray::ray_way_below(&u, &w) {
            let mid = ray::RayOpen::Ray((&a + &b) / Rat::from_integer(2.into()));
            assert!(ray::ray_way_below(&u, &mid) && ray::ray_way_below(&mid, &w));
            interpolations += 1;
        }
    }
    assert!(interpolations > 100);
    println!(
        "[PASS] criterion 5: ray hull, family sups, irreflexivity and midpoint interpolation \
         exact on 1000 seeded pairs (seed {seed}, {interpolations} interpolations)"
    );
}

#[test]
fn criterion_6_negative_fixtures() {
    // Flat space: not locally consistent, witnessed at the pair with an
    // empty finite subset under the top member.
    let flat = fixtures::flat();
    let report = subclass::is_locally_consistent(&flat, DEFAULT_CAP).unwrap();
    assert!(!report.ok);
    let v = &report.violations[0];
    assert_eq!(v.rule, "f-sup-missing");
    assert_eq!(v.witnesses[0].render(), "F={a,b}");
    assert_eq!(v.witnesses[1].render(), "M={}");
    assert_eq!(subclass::replay(&flat, v), Some(true));

    // The M-shaped order: an L-domain whose derived family is not
    // subset-closed (the bounded incomparable pair is the witness).
    let m = fixtures::m_poset();
    let m_flags = m.classify().flags;
    assert!(m_flags.l_domain);
    assert!(!m_flags.bounded_complete);
    let m_space = m.to_fgcs(DEFAULT_CAP).unwrap();
    assert!(subclass::is_locally_consistent(&m_space, DEFAULT_CAP).unwrap().ok);
    let bc = subclass::is_consistent(&m_space, DEFAULT_CAP).unwrap();
    assert!(!bc.ok);
    assert!(bc
        .violations
        .iter()
        .any(|v| v.witnesses[0].render() == "F={t1}" && v.witnesses[1].render() == "M={a,b}"));

    // Two tops without a bottom: neither an L-domain nor bounded
    // complete, and the derived space is neither locally consistent nor
    // subset-closed.
    let two = fixtures::two_top();
    let two_flags = two.classify().flags;
    assert!(!two_flags.l_domain);
    assert!(!two_flags.bounded_complete);
    let two_space = two.to_fgcs(DEFAULT_CAP).unwrap();
    assert!(!subclass::is_locally_consistent(&two_space, DEFAULT_CAP).unwrap().ok);
    assert!(!subclass::is_consistent(&two_space, DEFAULT_CAP).unwrap().ok);

    println!(
        "[PASS] criterion 6: negative fixtures report the expected flags and witnesses \
         (flat: F={{a,b}}, M={{}}; M-shape: L-domain without subset-closure at ({{t1}}, {{a,b}}); \
         two-top: neither)"
    );
}

#[test]
fn determinism_of_the_mine_stream() {
    // Identical configurations must generate identical outcomes; the
    // check also pins the stream against accidental generator edits.
    let cfg = MinerConfig {
        seed: 7,
        count: 50,
        max_n: 4,
        targets: BTreeSet::from_iter(miner::Target::all()),
    };
    let a = miner::mine(&cfg, DEFAULT_CAP);
    let b = miner::mine(&cfg, DEFAULT_CAP);
    assert_eq!(a, b);
}
