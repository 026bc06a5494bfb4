//! Acceptance gate: ten end-to-end verifications, each with an explicit
//! scope and a wall-clock bound, printing one line apiece when run with
//! `--nocapture`. Every check compares the library against an oracle
//! written independently in this file or against pinned counts.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::Arc;
use std::time::Instant;

use catsym_core::cat::{ArrId, CategoryBuilder, FiniteCategory, ObjId};
use catsym_core::comma::{build_arrow_category, LevelCaps, LevelTower};
use catsym_core::finset::{build_model, check_set_claims, ClaimMode, FinSetCaps};
use catsym_core::internal::{
    build_e, check_action_laws, check_internal_adjunction, orbit_arr, orbit_obj,
};
use catsym_core::samples;
use catsym_core::symmetry::{
    check_imc, check_psc, check_sec, classify, lift_categories, search_cocc, search_psc, Budget,
    CoccStructure, PscStructure, SearchOutcome,
};
use catsym_core::functor::{check_naturality, vertical_compose};

// ===== CANDIDATE TABLE CORPUS =====
//
// Raw composition tables over at most 2 objects and 4 arrows. Identities
// are designated structurally (that is what the builder's input format
// requires); the one-object slice up to 3 arrows leaves the identity
// rows free so that tables violating the identity laws are present too.

#[derive(Debug)]
struct RawTable<'a> {
    n_obj: usize,
    dom: &'a [usize],
    cod: &'a [usize],
    ident: &'a [usize],
    entries: &'a [((usize, usize), usize)],
}

struct Shape {
    n_obj: usize,
    dom: Vec<usize>,
    cod: Vec<usize>,
    ident: Vec<usize>,
    forced: Vec<((usize, usize), usize)>,
    free: Vec<((usize, usize), Vec<usize>)>,
}

fn shapes() -> Vec<Shape> {
    let mut out = Vec::new();

    // One object, identity rows forced to obey the laws.
    for a in 1..=4 {
        let mut forced = Vec::new();
        let mut free = Vec::new();
        for g in 0..a {
            for f in 0..a {
                if g == 0 {
                    forced.push(((g, f), f));
                } else if f == 0 {
                    forced.push(((g, f), g));
                } else {
                    free.push(((g, f), (0..a).collect()));
                }
            }
        }
        out.push(Shape {
            n_obj: 1,
            dom: vec![0; a],
            cod: vec![0; a],
            ident: vec![0],
            forced,
            free,
        });
    }

    // One object, every row free, so identity-law violations occur.
    for a in 1..=3 {
        let mut free = Vec::new();
        for g in 0..a {
            for f in 0..a {
                free.push(((g, f), (0..a).collect()));
            }
        }
        out.push(Shape {
            n_obj: 1,
            dom: vec![0; a],
            cod: vec![0; a],
            ident: vec![0],
            forced: Vec::new(),
            free,
        });
    }

    // Two objects, up to two extra arrows with every endpoint choice,
    // identity rows forced.
    let ends = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let mut extras: Vec<Vec<(usize, usize)>> = vec![vec![]];
    extras.extend(ends.iter().map(|&e| vec![e]));
    for &e1 in &ends {
        for &e2 in &ends {
            extras.push(vec![e1, e2]);
        }
    }
    for extra in extras {
        let mut dom = vec![0, 1];
        let mut cod = vec![0, 1];
        for &(d, c) in &extra {
            dom.push(d);
            cod.push(c);
        }
        let a = dom.len();
        let mut forced = Vec::new();
        let mut free = Vec::new();
        for g in 0..a {
            for f in 0..a {
                if dom[g] != cod[f] {
                    continue;
                }
                if g < 2 {
                    forced.push(((g, f), f));
                } else if f < 2 {
                    forced.push(((g, f), g));
                } else {
                    let choices: Vec<usize> =
                        (0..a).filter(|&h| dom[h] == dom[f] && cod[h] == cod[g]).collect();
                    free.push(((g, f), choices));
                }
            }
        }
        out.push(Shape { n_obj: 2, dom, cod, ident: vec![0, 1], forced, free });
    }

    out
}

/// Streams every candidate of every shape through the callback.
fn for_each_candidate(mut visit: impl FnMut(&RawTable)) {
    for shape in shapes() {
        if shape.free.iter().any(|(_, cs)| cs.is_empty()) {
            continue;
        }
        let mut pick = vec![0usize; shape.free.len()];
        let mut entries = shape.forced.clone();
        let base = entries.len();
        entries.extend(shape.free.iter().map(|(slot, _)| (*slot, 0)));
        'tables: loop {
            for (i, &p) in pick.iter().enumerate() {
                entries[base + i].1 = shape.free[i].1[p];
            }
            visit(&RawTable {
                n_obj: shape.n_obj,
                dom: &shape.dom,
                cod: &shape.cod,
                ident: &shape.ident,
                entries: &entries,
            });
            let mut i = 0;
            loop {
                if i == pick.len() {
                    break 'tables;
                }
                pick[i] += 1;
                if pick[i] < shape.free[i].1.len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
        }
    }
}

/// Independent checker: identity laws plus associativity, written against
/// the raw table without going through the library.
fn brute_force_ok(t: &RawTable) -> bool {
    let a = t.dom.len();
    let mut comp = [[usize::MAX; 4]; 4];
    for &((g, f), h) in t.entries {
        comp[g][f] = h;
    }
    for f in 0..a {
        if comp[f][t.ident[t.dom[f]]] != f {
            return false;
        }
        if comp[t.ident[t.cod[f]]][f] != f {
            return false;
        }
    }
    for f in 0..a {
        for g in 0..a {
            if t.dom[g] != t.cod[f] {
                continue;
            }
            let gf = comp[g][f];
            for h in 0..a {
                if t.dom[h] != t.cod[g] {
                    continue;
                }
                if comp[h][gf] != comp[comp[h][g]][f] {
                    return false;
                }
            }
        }
    }
    true
}

fn build_from_table(t: &RawTable) -> Result<FiniteCategory, catsym_core::cat::CatError> {
    let mut b = CategoryBuilder::new();
    let objs: Vec<ObjId> = (0..t.n_obj).map(|i| b.object(&format!("o{i}"))).collect();
    let arrs: Vec<ArrId> = (0..t.dom.len())
        .map(|k| b.arrow(&format!("m{k}"), objs[t.dom[k]], objs[t.cod[k]]))
        .collect();
    for (o, &k) in t.ident.iter().enumerate() {
        b.identity(objs[o], arrs[k]);
    }
    for &((g, f), h) in t.entries {
        b.composite(arrs[g], arrs[f], arrs[h]);
    }
    b.build()
}

/// Every valid category in the corpus, pre-filtered by the independent
/// checker whose agreement with the builder is itself the first check.
fn valid_corpus() -> Vec<Arc<FiniteCategory>> {
    let mut cats = Vec::new();
    for_each_candidate(|t| {
        if brute_force_ok(t) {
            cats.push(Arc::new(build_from_table(t).expect("checkers agree")));
        }
    });
    cats
}

// ===== LADDER =====

struct Ladder {
    psc: Option<PscStructure>,
    cocc: Option<CoccStructure>,
    sec: bool,
    imc: bool,
}

/// Full bottom-up pass: duality search, closure search, then the two
/// derived law checks, with missing lower layers read as failures above.
fn ladder(cat: &Arc<FiniteCategory>) -> Ladder {
    let budget = Budget::default();
    let psc = match search_psc(cat, budget) {
        SearchOutcome::Found(p) => Some(p),
        SearchOutcome::AbsentProven => None,
        SearchOutcome::BudgetExhausted => panic!("duality search ran out of budget"),
    };
    let Some(psc) = psc else {
        return Ladder { psc: None, cocc: None, sec: false, imc: false };
    };
    let cocc = match search_cocc(&psc, LevelCaps::default(), budget).expect("level fits caps") {
        SearchOutcome::Found(c) => Some(c),
        SearchOutcome::AbsentProven => None,
        SearchOutcome::BudgetExhausted => panic!("closure search ran out of budget"),
    };
    let (sec, imc) = match &cocc {
        Some(c) => (check_sec(c).is_ok(), check_imc(c, budget).holds()),
        None => (false, false),
    };
    Ladder { psc: Some(psc), cocc, sec, imc }
}

/// Independent invertibility scan straight off the composition table.
fn every_arrow_invertible(cat: &FiniteCategory) -> bool {
    cat.arrows().all(|f| {
        let (a, b) = (cat.dom(f), cat.cod(f));
        cat.hom(b, a)
            .iter()
            .any(|&g| cat.comp(g, f) == cat.identity(a) && cat.comp(f, g) == cat.identity(b))
    })
}

/// Commuting-square count straight off the composition table.
fn count_commuting_squares(cat: &FiniteCategory) -> usize {
    let mut n = 0;
    for f in cat.arrows() {
        for g in cat.arrows() {
            for &h1 in cat.hom(cat.dom(f), cat.dom(g)) {
                for &h2 in cat.hom(cat.cod(f), cat.cod(g)) {
                    if cat.comp(h2, f) == cat.comp(g, h1) {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    p.to_str().unwrap().to_string()
}

// ===== THE TEN CHECKS =====

#[test]
fn a01_builder_agrees_with_brute_force_on_every_candidate_table() {
    let t0 = Instant::now();
    let (mut total, mut accepted, mut rejected) = (0u64, 0u64, 0u64);
    for_each_candidate(|t| {
        total += 1;
        let brute = brute_force_ok(t);
        let lib = build_from_table(t).is_ok();
        assert_eq!(lib, brute, "checkers disagree on {t:?}");
        if lib {
            accepted += 1;
        } else {
            rejected += 1;
        }
    });
    assert!(accepted > 0 && rejected > 0, "corpus must exercise both verdicts");
    let s = t0.elapsed().as_secs_f64();
    assert!(s < 10.0, "took {s:.2}s, bound is 10s");
    println!("acceptance 01 axiom oracle: PASS ({total} tables, {accepted} accepted, {s:.2}s)");
}

#[test]
fn a02_arrow_category_counts_match_independent_enumeration() {
    let t0 = Instant::now();

    let interval = Arc::new(samples::interval2());
    let c2 = build_arrow_category(&interval, LevelCaps::default()).unwrap();
    assert_eq!(c2.cat().n_objects(), 3);
    assert_eq!(c2.cat().n_arrows(), 6);
    assert_eq!(interval.n_arrows(), 3);
    assert_eq!(count_commuting_squares(&interval), 6);

    let mut tower = LevelTower::new(interval.clone(), LevelCaps::default());
    let c3 = tower.category(3).unwrap();
    assert_eq!(c3.n_objects(), 6);
    assert_eq!(c3.n_arrows(), count_commuting_squares(c2.cat()));

    let group = Arc::new(samples::cyclic2());
    let c2g = build_arrow_category(&group, LevelCaps::default()).unwrap();
    assert_eq!(c2g.cat().n_objects(), 2);
    assert_eq!(c2g.cat().n_arrows(), 8);
    assert_eq!(count_commuting_squares(&group), 8);

    let s = t0.elapsed().as_secs_f64();
    assert!(s < 1.0, "took {s:.2}s, bound is 1s");
    println!("acceptance 02 level counts: PASS (3/6, 6, 2/8, {s:.2}s)");
}

#[test]
fn a03_projection_transformations_are_natural_and_compose_to_the_diagonal() {
    let t0 = Instant::now();
    let cats = valid_corpus();
    for cat in &cats {
        let level = build_arrow_category(cat, LevelCaps::default()).unwrap();
        let sigma = level.sigma_transf();
        let sigma_inv = level.sigma_inv_transf();
        check_naturality(&sigma).unwrap();
        check_naturality(&sigma_inv).unwrap();
        let both = vertical_compose(&sigma_inv, &sigma).unwrap();
        for o in level.cat().objects() {
            let f = level.j_inv(o);
            assert_eq!(
                both.component(o),
                level.diagonal_square(f),
                "composite at J({}) is not the diagonal square",
                cat.arr_name(f)
            );
        }
    }
    let s = t0.elapsed().as_secs_f64();
    assert!(s < 30.0, "took {s:.2}s, bound is 30s");
    println!("acceptance 03 projection laws: PASS ({} categories, {s:.2}s)", cats.len());
}

#[test]
fn a04_set_model_claims_hold_exhaustively_and_under_sampling() {
    let t0 = Instant::now();

    let r2 = check_set_claims(2, ClaimMode::Exhaustive, FinSetCaps::default()).unwrap();
    assert!(r2.all_verified(), "{:?}", r2.lines());

    let sampled = ClaimMode::Sampled { samples: 1000, seed: 0xC45 };
    let r3 = check_set_claims(3, sampled, FinSetCaps::default()).unwrap();
    assert!(r3.all_verified(), "{:?}", r3.lines());

    let s = t0.elapsed().as_secs_f64();
    assert!(s < 60.0, "took {s:.2}s, bound is 60s");
    println!("acceptance 04 set-model claims: PASS (ground 2 exhaustive, ground 3 sampled, {s:.2}s)");
}

#[test]
fn a05_adjunction_suite_passes_on_the_three_reference_structures() {
    let t0 = Instant::now();

    let terminal = Arc::new(samples::terminal());
    let psc_t = search_psc(&terminal, Budget::default()).found().unwrap();
    check_internal_adjunction(&psc_t).unwrap();

    let group = Arc::new(samples::cyclic2());
    let psc_g = search_psc(&group, Budget::default()).found().unwrap();
    check_internal_adjunction(&psc_g).unwrap();

    let model = build_model(2, FinSetCaps::default()).unwrap();
    check_internal_adjunction(model.psc()).unwrap();

    let s = t0.elapsed().as_secs_f64();
    assert!(s < 30.0, "took {s:.2}s, bound is 30s");
    println!("acceptance 05 adjunction suite: PASS (terminal, order-2 group, set model, {s:.2}s)");
}

#[test]
fn a06_iteration_monoid_acts_lawfully_with_isomorphism_invariant_orbits() {
    let t0 = Instant::now();

    let group = Arc::new(samples::cyclic2());
    let psc_g = search_psc(&group, Budget::default()).found().unwrap();
    let model = build_model(1, FinSetCaps::default()).unwrap();

    for (cat, psc) in [(&group, &psc_g), (model.cat(), model.psc())] {
        let e = build_e(psc).unwrap();
        check_action_laws(&e, cat, 4).unwrap();
        for a in cat.objects() {
            let orbit = orbit_obj(&e, a, 4);
            for w in orbit.points.windows(2) {
                assert!(
                    cat.isomorphic(w[0], w[1]),
                    "orbit of {} leaves its isomorphism class",
                    cat.obj_name(a)
                );
            }
        }
        for f in cat.arrows() {
            let orbit = orbit_arr(&e, f, 4);
            for w in orbit.points.windows(2) {
                assert!(
                    cat.equal_up_to_iso(w[0], w[1]).is_some(),
                    "orbit of {} leaves its isomorphism class",
                    cat.arr_name(f)
                );
            }
        }
    }

    let s = t0.elapsed().as_secs_f64();
    assert!(s < 10.0, "took {s:.2}s, bound is 10s");
    println!("acceptance 06 monoid action: PASS (splittings to 4, orbits invariant, {s:.2}s)");
}

#[test]
fn a07_implosion_verdict_matches_the_invertibility_oracle_corpus_wide() {
    let t0 = Instant::now();
    let cats = valid_corpus();
    let mut imploded = 0u64;
    for cat in &cats {
        let l = ladder(cat);
        let oracle = every_arrow_invertible(cat);
        assert_eq!(
            l.imc, oracle,
            "search verdict and invertibility disagree on a {}-object {}-arrow category",
            cat.n_objects(),
            cat.n_arrows()
        );
        if l.imc {
            imploded += 1;
        }
    }
    assert!(imploded > 0, "corpus must contain imploded categories");
    let s = t0.elapsed().as_secs_f64();
    assert!(s < 60.0, "took {s:.2}s, bound is 60s");
    println!(
        "acceptance 07 implosion oracle: PASS ({} categories, {imploded} imploded, {s:.2}s)",
        cats.len()
    );
}

#[test]
fn a08_duality_relabelings_invert_each_other_componentwise() {
    let t0 = Instant::now();

    let mut pscs: Vec<PscStructure> = Vec::new();
    for cat in valid_corpus() {
        if let Some(psc) = search_psc(&cat, Budget::default()).found() {
            check_psc(&psc).unwrap();
            pscs.push(psc);
        }
    }
    pscs.push(build_model(1, FinSetCaps::default()).unwrap().psc().clone());
    pscs.push(build_model(2, FinSetCaps::default()).unwrap().psc().clone());
    assert!(!pscs.is_empty());

    for psc in &pscs {
        let lifted = lift_categories(psc);
        let n_obj = lifted.arrow_side.n_objects();
        let n_arr = lifted.arrow_side.n_arrows();
        for i in 0..n_obj {
            let o = ObjId(i as u32);
            assert_eq!(lifted.d_inv.apply_obj(lifted.d.apply_obj(o)), o);
            assert_eq!(lifted.d.apply_obj(lifted.d_inv.apply_obj(o)), o);
        }
        for i in 0..n_arr {
            let f = ArrId(i as u32);
            assert_eq!(lifted.d_inv.apply_arr(lifted.d.apply_arr(f)), f);
            assert_eq!(lifted.d.apply_arr(lifted.d_inv.apply_arr(f)), f);
        }
    }

    let s = t0.elapsed().as_secs_f64();
    assert!(s < 5.0, "took {s:.2}s, bound is 5s");
    println!("acceptance 08 relabeling inverses: PASS ({} structures, {s:.2}s)", pscs.len());
}

#[test]
fn a09_levels_of_symmetric_bases_keep_their_symmetry_and_the_interval_has_none() {
    let t0 = Instant::now();

    let level_then_search = |path: &str| -> (Option<i32>, String) {
        let level = Command::new(env!("CARGO_BIN_EXE_catsym"))
            .args(["level", path, "--n", "2"])
            .output()
            .unwrap();
        assert!(level.status.success(), "level build failed for {path}");
        let mut child = Command::new(env!("CARGO_BIN_EXE_catsym"))
            .args(["search-psc", "-"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        child.stdin.as_mut().unwrap().write_all(&level.stdout).unwrap();
        let out = child.wait_with_output().unwrap();
        (out.status.code(), String::from_utf8(out.stdout).unwrap())
    };

    let (code, out) = level_then_search(&fixture("terminal.cat"));
    assert_eq!(code, Some(0), "{out}");
    assert!(out.contains("verdict.psc: FOUND"));

    let (code, out) = level_then_search(&fixture("group2.cat"));
    assert_eq!(code, Some(0), "{out}");
    assert!(out.contains("verdict.psc: FOUND"));

    let base = Command::new(env!("CARGO_BIN_EXE_catsym"))
        .args(["search-psc", &fixture("interval2.cat")])
        .output()
        .unwrap();
    assert_eq!(base.status.code(), Some(1));
    let text = String::from_utf8(base.stdout).unwrap();
    assert!(text.contains("verdict.psc: ABSENT"), "{text}");

    let s = t0.elapsed().as_secs_f64();
    assert!(s < 120.0, "took {s:.2}s, bound is 120s");
    println!("acceptance 09 level propagation: PASS (terminal and group found, interval absent, {s:.2}s)");
}

#[test]
fn a10_hierarchy_verdicts_are_monotone_everywhere() {
    let t0 = Instant::now();

    let mut structures = 0u64;
    let mut check = |name: &str, psc: bool, cocc: bool, sec: bool, imc: bool| {
        structures += 1;
        assert!(!imc || sec, "{name}: implosion without the retraction law");
        assert!(!sec || cocc, "{name}: retraction law without closure");
        assert!(!cocc || psc, "{name}: closure without duality");
    };

    let mut fixtures: Vec<(String, Arc<FiniteCategory>)> = vec![
        ("terminal".into(), Arc::new(samples::terminal())),
        ("interval2".into(), Arc::new(samples::interval2())),
        ("cyclic2".into(), Arc::new(samples::cyclic2())),
        ("indiscrete2".into(), Arc::new(samples::indiscrete2())),
        ("idempotent".into(), Arc::new(samples::idempotent_monoid())),
        ("discrete2".into(), Arc::new(samples::discrete(2))),
    ];
    for (i, cat) in valid_corpus().into_iter().enumerate() {
        fixtures.push((format!("table{i}"), cat));
    }

    for (name, cat) in &fixtures {
        let l = ladder(cat);
        check(name, l.psc.is_some(), l.cocc.is_some(), l.sec, l.imc);
        if let Some(cocc) = &l.cocc {
            assert!(
                classify(cocc, Budget::default()).is_monotone(),
                "{name}: classifier output is not monotone"
            );
        }
    }

    for n in [1, 2] {
        let r = check_set_claims(n, ClaimMode::Exhaustive, FinSetCaps::default()).unwrap();
        check(
            &format!("finset{n}"),
            r.hom_law.verified() && r.representability.verified(),
            r.te_functoriality.verified() && r.te_naturality.verified(),
            r.sec_identity.verified(),
            !r.imc_refuted.verified(),
        );
    }

    let s = t0.elapsed().as_secs_f64();
    assert!(s < 60.0, "took {s:.2}s, bound is 60s");
    println!("acceptance 10 hierarchy monotone: PASS ({structures} structures, {s:.2}s)");
}
