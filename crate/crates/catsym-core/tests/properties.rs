//! Law checks over randomly generated inputs: the category kernel, the
//! level construction, the set-model formulas, the iteration monoid, and
//! the file format.

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use catsym_core::cat::{ArrId, CategoryBuilder, FiniteCategory, ObjId};
use catsym_core::comma::{build_arrow_category, LevelCaps};
use catsym_core::finset::{compose_maps, graph_of, projection_map, star_relational, Elem, SetObj};
use catsym_core::format::parse_category_file;
use catsym_core::functor::{check_functor, check_naturality, compose_functors, Functor};
use catsym_core::internal::{act_arr, act_obj, build_e, ics_compose, IcsElement};
use catsym_core::samples;
use catsym_core::symmetry::{
    check_sec, derive_tau, search_cocc, search_psc, Budget, SearchOutcome,
};

// ===== GENERATORS =====

/// The one-object group of order `k`.
fn cyclic(k: usize) -> FiniteCategory {
    let mut b = CategoryBuilder::new();
    let x = b.object("x");
    let g: Vec<ArrId> = (0..k).map(|i| b.arrow(&format!("g{i}"), x, x)).collect();
    b.identity(x, g[0]);
    for i in 0..k {
        for j in 0..k {
            b.composite(g[i], g[j], g[(i + j) % k]);
        }
    }
    b.build().unwrap()
}

/// The group of order `k` with an absorbing element adjoined.
fn zero_monoid(k: usize) -> FiniteCategory {
    let mut b = CategoryBuilder::new();
    let x = b.object("x");
    let g: Vec<ArrId> = (0..k).map(|i| b.arrow(&format!("g{i}"), x, x)).collect();
    let z = b.arrow("z", x, x);
    b.identity(x, g[0]);
    for i in 0..k {
        for j in 0..k {
            b.composite(g[i], g[j], g[(i + j) % k]);
        }
        b.composite(z, g[i], z);
        b.composite(g[i], z, z);
    }
    b.composite(z, z, z);
    b.build().unwrap()
}

fn pool(idx: usize) -> Arc<FiniteCategory> {
    Arc::new(match idx % 10 {
        0 => samples::terminal(),
        1 => samples::interval2(),
        2 => samples::cyclic2(),
        3 => samples::indiscrete2(),
        4 => samples::idempotent_monoid(),
        5 => samples::discrete(3),
        6 => cyclic(4),
        7 => cyclic(5),
        8 => zero_monoid(3),
        _ => zero_monoid(4),
    })
}

fn any_pool() -> impl Strategy<Value = Arc<FiniteCategory>> {
    (0usize..10).prop_map(pool)
}

/// Pool members small enough for structure searches.
fn search_pool() -> impl Strategy<Value = Arc<FiniteCategory>> {
    prop_oneof![
        Just(Arc::new(samples::terminal())),
        Just(Arc::new(samples::cyclic2())),
        Just(Arc::new(samples::idempotent_monoid())),
        Just(Arc::new(cyclic(3))),
        Just(Arc::new(cyclic(4))),
        Just(Arc::new(zero_monoid(2))),
    ]
}

fn subset(n: u8, mask: u8) -> SetObj {
    (0..n).filter(|i| mask >> i & 1 == 1).map(Elem::Int).collect()
}

/// A function out of `a`, with targets picked from `b` by index.
fn map_from_picks(a: &SetObj, b: &SetObj, picks: &[usize]) -> BTreeMap<Elem, Elem> {
    let targets: Vec<&Elem> = b.iter().collect();
    a.iter()
        .zip(picks.iter())
        .map(|(x, &i)| (x.clone(), targets[i % targets.len()].clone()))
        .collect()
}

// ===== CATEGORY KERNEL =====

proptest! {
    #[test]
    fn isomorphism_discovery_is_symmetric(cat in any_pool(), i in 0usize..16, j in 0usize..16) {
        let a = ObjId((i % cat.n_objects()) as u32);
        let b = ObjId((j % cat.n_objects()) as u32);
        prop_assert_eq!(
            cat.find_isomorphisms(a, b).is_empty(),
            cat.find_isomorphisms(b, a).is_empty()
        );
    }

    #[test]
    fn equality_up_to_iso_is_an_equivalence(
        cat in any_pool(),
        i in 0usize..32, j in 0usize..32, k in 0usize..32,
    ) {
        let f = ArrId((i % cat.n_arrows()) as u32);
        let g = ArrId((j % cat.n_arrows()) as u32);
        let h = ArrId((k % cat.n_arrows()) as u32);
        prop_assert!(cat.equal_up_to_iso(f, f).is_some());
        prop_assert_eq!(
            cat.equal_up_to_iso(f, g).is_some(),
            cat.equal_up_to_iso(g, f).is_some()
        );
        if cat.equal_up_to_iso(f, g).is_some() && cat.equal_up_to_iso(g, h).is_some() {
            prop_assert!(cat.equal_up_to_iso(f, h).is_some());
        }
    }

    #[test]
    fn lawful_functors_compose_to_lawful_functors(
        k in 2usize..=6, j1 in 0usize..6, j2 in 0usize..6,
    ) {
        let cat = Arc::new(cyclic(k));
        let power = |j: usize| {
            let arr_map = (0..k).map(|i| ArrId(((i * j) % k) as u32)).collect();
            Functor::new(cat.clone(), cat.clone(), vec![ObjId(0)], arr_map).unwrap()
        };
        let f = power(j1 % k);
        let g = power(j2 % k);
        check_functor(&f).unwrap();
        check_functor(&g).unwrap();
        check_functor(&compose_functors(&g, &f).unwrap()).unwrap();
    }
}

// ===== LEVEL CONSTRUCTION =====

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn levels_are_exactly_the_commuting_squares(cat in any_pool()) {
        let level = build_arrow_category(&cat, LevelCaps::default()).unwrap();
        let lcat = level.cat();
        prop_assert_eq!(lcat.n_objects(), cat.n_arrows());

        let mut squares = 0usize;
        for f in cat.arrows() {
            for g in cat.arrows() {
                for &h1 in cat.hom(cat.dom(f), cat.dom(g)) {
                    for &h2 in cat.hom(cat.cod(f), cat.cod(g)) {
                        if cat.comp(h2, f) == cat.comp(g, h1) {
                            squares += 1;
                            prop_assert!(
                                level.square(level.j(f), level.j(g), h1, h2).is_some()
                            );
                        }
                    }
                }
            }
        }
        prop_assert_eq!(lcat.n_arrows(), squares);

        for s in lcat.arrows() {
            let (h1, h2) = level.square_components(s);
            let f = level.j_inv(lcat.dom(s));
            let g = level.j_inv(lcat.cod(s));
            prop_assert_eq!(cat.comp(h2, f), cat.comp(g, h1));
        }
    }

    #[test]
    fn projections_retract_the_diagonal(cat in any_pool()) {
        let level = build_arrow_category(&cat, LevelCaps::default()).unwrap();
        let first = compose_functors(&level.fst(), &level.diagonal()).unwrap();
        let second = compose_functors(&level.snd(), &level.diagonal()).unwrap();
        for a in cat.objects() {
            prop_assert_eq!(first.apply_obj(a), a);
            prop_assert_eq!(second.apply_obj(a), a);
        }
        for f in cat.arrows() {
            prop_assert_eq!(first.apply_arr(f), f);
            prop_assert_eq!(second.apply_arr(f), f);
        }
        check_naturality(&level.psi_transf()).unwrap();
        check_naturality(&level.sigma_transf()).unwrap();
        check_naturality(&level.sigma_inv_transf()).unwrap();
    }
}

// ===== SET-MODEL FORMULAS =====

proptest! {
    #[test]
    fn relational_star_composes_graphs(
        n in 1u8..=3,
        ma in 0u8..8, mb in 0u8..8, mc in 0u8..8,
        pf in proptest::collection::vec(0usize..8, 8),
        pg in proptest::collection::vec(0usize..8, 8),
    ) {
        let a = subset(n, ma);
        let b = subset(n, mb);
        let c = subset(n, mc);
        prop_assume!(b.len() > 0 || a.is_empty());
        prop_assume!(c.len() > 0 || b.is_empty());
        let f = map_from_picks(&a, &b, &pf);
        let g = map_from_picks(&b, &c, &pg);
        prop_assert_eq!(
            graph_of(&compose_maps(&g, &f)),
            star_relational(&graph_of(&g), &graph_of(&f))
        );
    }

    #[test]
    fn diagonal_graphs_project_bijectively(n in 1u8..=3, mask in 0u8..8) {
        let a = subset(n, mask);
        let id_map: BTreeMap<Elem, Elem> = a.iter().map(|x| (x.clone(), x.clone())).collect();
        let rho = projection_map(&id_map, &a);
        let values: SetObj = rho.values().cloned().collect();
        prop_assert_eq!(rho.len(), a.len());
        prop_assert_eq!(values, a);
    }
}

// ===== ITERATION MONOID =====

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iterate_sums_split(cat in search_pool(), n in 0u64..=4, m in 0u64..=4, t in 0usize..32) {
        let psc = match search_psc(&cat, Budget::default()) {
            SearchOutcome::Found(p) => p,
            _ => return Err(TestCaseError::reject("no duality structure")),
        };
        let e = build_e(&psc).unwrap();
        let joint = ics_compose(IcsElement(n), IcsElement(m)).unwrap();
        let a = ObjId((t % cat.n_objects()) as u32);
        let f = ArrId((t % cat.n_arrows()) as u32);
        prop_assert_eq!(act_obj(&e, joint, a), act_obj(&e, IcsElement(n), act_obj(&e, IcsElement(m), a)));
        prop_assert_eq!(act_arr(&e, joint, f), act_arr(&e, IcsElement(n), act_arr(&e, IcsElement(m), f)));
    }

    #[test]
    fn iterate_composition_is_addition(n in 0u64..1 << 62, m in 0u64..1 << 62) {
        prop_assert_eq!(ics_compose(IcsElement(n), IcsElement(m)), Some(IcsElement(n + m)));
        prop_assert_eq!(
            ics_compose(IcsElement(n), IcsElement(m)),
            ics_compose(IcsElement(m), IcsElement(n))
        );
    }
}

// ===== STRUCTURE LAWS =====

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn duality_values_respect_composition(cat in search_pool()) {
        let psc = match search_psc(&cat, Budget::default()) {
            SearchOutcome::Found(p) => p,
            _ => return Err(TestCaseError::reject("no duality structure")),
        };
        for f in cat.arrows() {
            for g in cat.arrows() {
                if cat.dom(g) != cat.cod(f) {
                    continue;
                }
                prop_assert_eq!(
                    psc.star(psc.btop(g), psc.btop(f)),
                    Some(psc.btop(cat.comp(g, f)))
                );
            }
        }
    }

    #[test]
    fn retraction_components_rebuild_each_arrow(cat in search_pool()) {
        let psc = match search_psc(&cat, Budget::default()) {
            SearchOutcome::Found(p) => p,
            _ => return Err(TestCaseError::reject("no duality structure")),
        };
        let cocc = match search_cocc(&psc, LevelCaps::default(), Budget::default()).unwrap() {
            SearchOutcome::Found(c) => c,
            _ => return Err(TestCaseError::reject("no closure structure")),
        };
        prop_assume!(check_sec(&cocc).is_ok());
        let (tau, tau_inv) = derive_tau(&cocc).unwrap();
        check_naturality(&tau).unwrap();
        check_naturality(&tau_inv).unwrap();
        let level = cocc.level().clone();
        for o in level.cat().objects() {
            prop_assert_eq!(
                cocc.psc().cat().comp(tau_inv.component(o), tau.component(o)),
                level.j_inv(o)
            );
        }
    }
}

// ===== FILE FORMAT =====

#[derive(Debug, Clone)]
struct GeneratedFile {
    text: String,
}

fn file_strategy() -> impl Strategy<Value = GeneratedFile> {
    let names = ["a", "b", "c", "f", "g", "h", "k", "m", "p", "q"];
    (
        1usize..=3,
        proptest::collection::vec((0usize..3, 0usize..3), 0..=4),
        proptest::collection::vec((0usize..4, 0usize..4, 0usize..4), 0..=4),
        any::<bool>(),
        any::<u64>(),
    )
        .prop_map(move |(n_obj, arrow_ends, composites, with_psc, salt)| {
            let objects: Vec<&str> = names[..n_obj].to_vec();
            let arrows: Vec<(String, &str, &str)> = arrow_ends
                .iter()
                .enumerate()
                .map(|(i, &(d, c))| {
                    (format!("{}{}", names[3 + i], i), objects[d % n_obj], objects[c % n_obj])
                })
                .collect();
            let mut text = String::new();
            if salt % 3 == 0 {
                text.push_str("# generated\n\n");
            }
            text.push_str(&format!("objects: {}\n", objects.join(" ")));
            for (name, d, c) in &arrows {
                text.push_str(&format!("arrow: {name} : {d} -> {c}\n"));
            }
            if !arrows.is_empty() {
                let mut seen = std::collections::BTreeSet::new();
                for &(g, f, h) in &composites {
                    let (g, f, h) = (g % arrows.len(), f % arrows.len(), h % arrows.len());
                    if seen.insert((g, f)) {
                        text.push_str(&format!(
                            "compose: {} . {} = {}\n",
                            arrows[g].0, arrows[f].0, arrows[h].0
                        ));
                    }
                }
                if with_psc {
                    for (name, _, _) in &arrows {
                        text.push_str(&format!(
                            "psc.btop: {name} -> {}\n",
                            objects[(salt as usize) % n_obj]
                        ));
                    }
                    text.push_str(&format!("psc.iso: {} = {}\n", objects[0], arrows[0].0));
                }
            }
            GeneratedFile { text }
        })
}

proptest! {
    #[test]
    fn printing_is_a_retraction_of_parsing(file in file_strategy()) {
        let parsed = parse_category_file(&file.text).unwrap();
        let printed = catsym_core::format::print_category_file(&parsed);
        let reparsed = parse_category_file(&printed).unwrap();
        prop_assert_eq!(catsym_core::format::print_category_file(&reparsed), printed);
    }

    #[test]
    fn corrupted_input_reports_errors_without_panicking(
        file in file_strategy(),
        pos in any::<usize>(),
        byte in 0x20u8..0x7f,
        delete in any::<bool>(),
    ) {
        let mut bytes = file.text.into_bytes();
        if bytes.is_empty() {
            return Err(TestCaseError::reject("empty file"));
        }
        let at = pos % bytes.len();
        if delete {
            bytes.remove(at);
        } else {
            bytes[at] = byte;
        }
        let corrupted = String::from_utf8(bytes).unwrap();
        if let Err(e) = parse_category_file(&corrupted) {
            let rendered = format!("{e}");
            prop_assert!(!rendered.is_empty());
        }
    }
}

// ===== TOKENIZED ROUND TRIP =====

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tokenizing_preserves_the_whole_table(cat in any_pool()) {
        let (file, back_map) = catsym_core::format::tokenize_category(&cat);
        let named = cat.n_objects() + cat.arrows().filter(|&f| !cat.is_identity(f)).count();
        prop_assert_eq!(back_map.len(), named);
        let text = catsym_core::format::print_category_file(&file);
        let lowered = parse_category_file(&text).unwrap().lower(LevelCaps::default()).unwrap();
        prop_assert_eq!(lowered.cat.n_objects(), cat.n_objects());
        prop_assert_eq!(lowered.cat.n_arrows(), cat.n_arrows());
        for a in cat.objects() {
            for b in cat.objects() {
                prop_assert_eq!(
                    lowered.cat.hom(a, b).len(),
                    cat.hom(a, b).len(),
                    "hom sizes differ at ({:?}, {:?})", a, b
                );
            }
        }
    }
}
