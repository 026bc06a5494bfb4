//! The endofunctor induced by a duality structure, its adjunction with the
//! identity, and the additive monoid acting by iterating it.
//!
//! [`build_e`] turns a duality structure into the endofunctor sending each
//! object to its identity's value and each arrow to its conjugate through
//! the representability isomorphisms. Iterating that endofunctor gives an
//! action of the natural numbers under addition; [`act_obj`]/[`act_arr`]
//! evaluate the action with cycle acceleration, so astronomically large
//! exponents stay cheap, and [`orbit_obj`]/[`orbit_arr`] report the
//! visited points together with the detected cycle.

use std::collections::HashMap;
use std::fmt;

use crate::cat::{ArrId, FiniteCategory, ObjId};
use crate::functor::{check_naturality, Functor, NatTransf};
use crate::symmetry::{PscStructure, SymmetryError};

/// Builds the endofunctor `a -> btop(id_a)`, `f -> iso_inv(cod f) . f . iso(dom f)`.
///
/// Only representability is required of the structure: every `iso(a)` must
/// be an isomorphism `btop(id_a) -> a`. The functor laws then hold by
/// conjugation, which is re-verified in debug builds.
pub fn build_e(psc: &PscStructure) -> Result<Functor, SymmetryError> {
    let cat = psc.cat().as_ref();
    let mut inv = Vec::with_capacity(cat.n_objects());
    for a in cat.objects() {
        let u = psc.iso(a);
        let ok = cat.dom(u) == psc.btop(cat.identity(a)) && cat.cod(u) == a;
        match (ok, psc.iso_inv(a)) {
            (true, Some(v)) => inv.push(v),
            _ => return Err(SymmetryError::NotRepresentable { obj: cat.obj_name(a).to_string() }),
        }
    }

    let obj_map: Vec<ObjId> = cat.objects().map(|a| psc.btop(cat.identity(a))).collect();
    let arr_map: Vec<ArrId> = cat
        .arrows()
        .map(|f| {
            let conj = cat.comp(f, psc.iso(cat.dom(f)));
            cat.comp(inv[cat.cod(f).idx()], conj)
        })
        .collect();
    let e = Functor::new(psc.cat().clone(), psc.cat().clone(), obj_map, arr_map)
        .expect("conjugation maps are total");
    debug_assert_eq!(crate::functor::check_functor(&e), Ok(()));
    Ok(e)
}

/// A finite selection of objects and arrows, transformed elementwise by a
/// functor.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Diagram {
    pub objects: Vec<ObjId>,
    pub arrows: Vec<ArrId>,
}

/// Applies an endofunctor to every object and arrow of the diagram.
pub fn transform_diagram(e: &Functor, d: &Diagram) -> Diagram {
    Diagram {
        objects: d.objects.iter().map(|&a| e.apply_obj(a)).collect(),
        arrows: d.arrows.iter().map(|&f| e.apply_arr(f)).collect(),
    }
}

/// The unit of the adjunction between the identity and the induced
/// endofunctor: `iso_inv(a) : a -> btop(id_a)` componentwise.
pub fn adjunction_unit(psc: &PscStructure, e: &Functor) -> Result<NatTransf, SymmetryError> {
    let cat = psc.cat();
    let mut components = Vec::with_capacity(cat.n_objects());
    for a in cat.objects() {
        components.push(psc.iso_inv(a).ok_or_else(|| SymmetryError::NotRepresentable {
            obj: cat.obj_name(a).to_string(),
        })?);
    }
    NatTransf::new(Functor::identity(cat.clone()), e.clone(), components)
        .map_err(|err| SymmetryError::ShapeMismatch { detail: err.to_string() })
}

/// The counit: `iso(a) : btop(id_a) -> a` componentwise.
pub fn adjunction_counit(psc: &PscStructure, e: &Functor) -> Result<NatTransf, SymmetryError> {
    let cat = psc.cat();
    let components = cat.objects().map(|a| psc.iso(a)).collect();
    NatTransf::new(e.clone(), Functor::identity(cat.clone()), components)
        .map_err(|err| SymmetryError::ShapeMismatch { detail: err.to_string() })
}

/// Verifies that the representability family makes the induced
/// endofunctor a right adjoint of the identity.
///
/// Checked exhaustively: naturality of unit and counit, both triangle
/// identities pointwise, and the universal property that every arrow
/// `k : a -> b` factors as `counit(b) . m` for exactly one
/// `m : a -> btop(id_b)`.
pub fn check_internal_adjunction(psc: &PscStructure) -> Result<(), SymmetryError> {
    let cat = psc.cat().as_ref();
    let e = build_e(psc)?;
    let unit = adjunction_unit(psc, &e)?;
    let counit = adjunction_counit(psc, &e)?;
    check_naturality(&unit).map_err(|err| SymmetryError::AdjunctionFails {
        witness: format!("unit not natural: {err}"),
    })?;
    check_naturality(&counit).map_err(|err| SymmetryError::AdjunctionFails {
        witness: format!("counit not natural: {err}"),
    })?;

    for a in cat.objects() {
        if cat.comp(counit.component(a), unit.component(a)) != cat.identity(a) {
            return Err(SymmetryError::AdjunctionFails {
                witness: format!("counit . unit is not the identity at {}", cat.obj_name(a)),
            });
        }
        let lhs = cat.comp(e.apply_arr(counit.component(a)), unit.component(e.apply_obj(a)));
        if lhs != cat.identity(e.apply_obj(a)) {
            return Err(SymmetryError::AdjunctionFails {
                witness: format!(
                    "triangle through the functor fails at {}",
                    cat.obj_name(a)
                ),
            });
        }
    }

    for k in cat.arrows() {
        let (a, b) = (cat.dom(k), cat.cod(k));
        let eps = counit.component(b);
        let factored = cat.comp(unit.component(b), k);
        if cat.comp(eps, factored) != k {
            return Err(SymmetryError::AdjunctionFails {
                witness: format!("{} does not factor through the counit", cat.arr_name(k)),
            });
        }
        let solutions = cat
            .hom(a, e.apply_obj(b))
            .iter()
            .filter(|&&m| cat.comp(eps, m) == k)
            .count();
        if solutions != 1 {
            return Err(SymmetryError::AdjunctionFails {
                witness: format!(
                    "{} has {} factorizations through the counit instead of 1",
                    cat.arr_name(k),
                    solutions
                ),
            });
        }
    }
    Ok(())
}

/// An element of the additive monoid acting by functor iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IcsElement(pub u64);

impl fmt::Display for IcsElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g_{}", self.0)
    }
}

/// Monoid operation `g_n . g_m = g_{n+m}`; `None` on overflow.
pub fn ics_compose(a: IcsElement, b: IcsElement) -> Option<IcsElement> {
    a.0.checked_add(b.0).map(IcsElement)
}

/// Iterates `step` from `start` `n` times, shortcutting through the first
/// cycle found. Terminates after at most one pass over the distinct
/// values even when `n` is enormous.
fn iterate_with_cycles(step: impl Fn(u32) -> u32, start: u32, n: u64) -> u32 {
    let mut seen: HashMap<u32, u64> = HashMap::new();
    let mut seq: Vec<u32> = Vec::new();
    let mut cur = start;
    let mut i: u64 = 0;
    while i < n {
        if let Some(&j) = seen.get(&cur) {
            let cycle = i - j;
            return seq[(j + (n - j) % cycle) as usize];
        }
        seen.insert(cur, i);
        seq.push(cur);
        cur = step(cur);
        i += 1;
    }
    cur
}

/// The action of `g_n` on an object: `n`-fold application of the functor.
pub fn act_obj(e: &Functor, n: IcsElement, a: ObjId) -> ObjId {
    ObjId(iterate_with_cycles(|i| e.apply_obj(ObjId(i)).0, a.0, n.0))
}

/// The action of `g_n` on an arrow.
pub fn act_arr(e: &Functor, n: IcsElement, f: ArrId) -> ArrId {
    ArrId(iterate_with_cycles(|i| e.apply_arr(ArrId(i)).0, f.0, n.0))
}

/// An orbit prefix under functor iteration: `depth + 1` points starting
/// at the seed, plus the first cycle visible in that prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitReport<T> {
    pub points: Vec<T>,
    /// `(start, len)`: the point at `start` recurs `len` steps later.
    pub cycle: Option<(usize, usize)>,
}

fn orbit_generic<T: Copy + Eq + std::hash::Hash>(
    step: impl Fn(T) -> T,
    seed: T,
    depth: usize,
) -> OrbitReport<T> {
    let mut points = Vec::with_capacity(depth + 1);
    let mut first: HashMap<T, usize> = HashMap::new();
    let mut cycle = None;
    let mut cur = seed;
    for i in 0..=depth {
        if cycle.is_none() {
            if let Some(&j) = first.get(&cur) {
                cycle = Some((j, i - j));
            } else {
                first.insert(cur, i);
            }
        }
        points.push(cur);
        if i < depth {
            cur = step(cur);
        }
    }
    OrbitReport { points, cycle }
}

/// The orbit of an object under the endofunctor.
pub fn orbit_obj(e: &Functor, seed: ObjId, depth: usize) -> OrbitReport<ObjId> {
    orbit_generic(|a| e.apply_obj(a), seed, depth)
}

/// The orbit of an arrow under the endofunctor.
pub fn orbit_arr(e: &Functor, seed: ArrId, depth: usize) -> OrbitReport<ArrId> {
    orbit_generic(|f| e.apply_arr(f), seed, depth)
}

/// Checks the action laws on every object and arrow for all splittings
/// `n = p + q` with `n <= bound`: acting by `g_0` is the identity and
/// acting by a sum is acting twice.
pub fn check_action_laws(e: &Functor, cat: &FiniteCategory, bound: u64) -> Result<(), String> {
    for a in cat.objects() {
        if act_obj(e, IcsElement(0), a) != a {
            return Err(format!("g_0 moves object {}", cat.obj_name(a)));
        }
    }
    for f in cat.arrows() {
        if act_arr(e, IcsElement(0), f) != f {
            return Err(format!("g_0 moves arrow {}", cat.arr_name(f)));
        }
    }
    for n in 0..=bound {
        for p in 0..=n {
            let q = n - p;
            for a in cat.objects() {
                let joint = act_obj(e, IcsElement(n), a);
                let staged = act_obj(e, IcsElement(p), act_obj(e, IcsElement(q), a));
                if joint != staged {
                    return Err(format!(
                        "g_{n} and g_{p} . g_{q} disagree on object {}",
                        cat.obj_name(a)
                    ));
                }
            }
            for f in cat.arrows() {
                let joint = act_arr(e, IcsElement(n), f);
                let staged = act_arr(e, IcsElement(p), act_arr(e, IcsElement(q), f));
                if joint != staged {
                    return Err(format!(
                        "g_{n} and g_{p} . g_{q} disagree on arrow {}",
                        cat.arr_name(f)
                    ));
                }
            }
        }
    }
    Ok(())
}
