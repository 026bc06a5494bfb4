//! Finite categories with explicit composition tables.
//!
//! A category here is fully materialized: object and arrow sets, a total
//! identity assignment, and a composition table that must cover every
//! composable pair. [`CategoryBuilder::build`] checks every axiom by
//! exhaustive scan (closure, identity laws, associativity, typing of all
//! table entries) and only then hands out an immutable [`FiniteCategory`].
//! All search-style queries resolve ties toward the lowest id so results
//! are reproducible.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

/// Index of an object within its category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjId(pub u32);

/// Index of an arrow within its category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrId(pub u32);

impl ObjId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl ArrId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ObjId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}

impl fmt::Display for ArrId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// Which side of an arrow an identity was composed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

/// Violations detected while validating or querying a category.
///
/// Witness fields carry arrow/object names rather than bare indices so a
/// failure can be reported against the caller's own vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatError {
    #[error("no composite recorded for {g} . {f}")]
    MissingComposite { g: String, f: String },
    #[error("identity law fails for {arrow} ({side} identity)")]
    IdentityLawViolation { arrow: String, side: Side },
    #[error("associativity fails at {h} . {g} . {f}")]
    AssociativityViolation { h: String, g: String, f: String },
    #[error("type mismatch: {detail}")]
    TypeMismatch { detail: String },
    #[error("{g} . {f} is not composable")]
    NotComposable { g: String, f: String },
    #[error("duplicate name {name}")]
    DuplicateName { name: String },
}

/// Mutable staging area for a category; [`build`](CategoryBuilder::build)
/// validates and freezes it.
#[derive(Debug, Clone, Default)]
pub struct CategoryBuilder {
    obj_names: Vec<String>,
    arr_names: Vec<String>,
    dom: Vec<ObjId>,
    cod: Vec<ObjId>,
    identity: Vec<Option<ArrId>>,
    comp: BTreeMap<(ArrId, ArrId), ArrId>,
}

impl CategoryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object(&mut self, name: &str) -> ObjId {
        let id = ObjId(self.obj_names.len() as u32);
        self.obj_names.push(name.to_string());
        self.identity.push(None);
        id
    }

    pub fn arrow(&mut self, name: &str, dom: ObjId, cod: ObjId) -> ArrId {
        let id = ArrId(self.arr_names.len() as u32);
        self.arr_names.push(name.to_string());
        self.dom.push(dom);
        self.cod.push(cod);
        id
    }

    /// Designates an existing arrow as the identity of `obj`.
    pub fn identity(&mut self, obj: ObjId, arr: ArrId) {
        self.identity[obj.idx()] = Some(arr);
    }

    /// Records `h` as the composite `g . f`.
    pub fn composite(&mut self, g: ArrId, f: ArrId, h: ArrId) {
        self.comp.insert((g, f), h);
    }

    pub fn has_composite(&self, g: ArrId, f: ArrId) -> bool {
        self.comp.contains_key(&(g, f))
    }

    /// The identity arrow already assigned to `obj`.
    ///
    /// Panics if none has been assigned yet; call after
    /// [`auto_identities`](Self::auto_identities) or explicit
    /// [`identity`](Self::identity) calls.
    pub fn identity_of(&self, obj: ObjId) -> ArrId {
        self.identity[obj.idx()].expect("identity assigned")
    }

    /// Adds an `id_<object>` arrow for every object that has no identity yet.
    pub fn auto_identities(&mut self) {
        for i in 0..self.obj_names.len() {
            if self.identity[i].is_none() {
                let name = format!("id_{}", self.obj_names[i]);
                let obj = ObjId(i as u32);
                let arr = self.arrow(&name, obj, obj);
                self.identity[i] = Some(arr);
            }
        }
    }

    /// Fills in every composite that involves an identity on either side.
    pub fn infer_identity_composites(&mut self) {
        let ids: Vec<ArrId> = self.identity.iter().map(|i| i.expect("identity assigned")).collect();
        for f in 0..self.arr_names.len() {
            let f = ArrId(f as u32);
            let (a, b) = (self.dom[f.idx()], self.cod[f.idx()]);
            self.comp.entry((f, ids[a.idx()])).or_insert(f);
            self.comp.entry((ids[b.idx()], f)).or_insert(f);
        }
    }

    fn name(&self, f: ArrId) -> String {
        self.arr_names[f.idx()].clone()
    }

    /// Validates every category axiom and freezes the result.
    ///
    /// Scans run in id order and stop at the first violation, so the
    /// reported witness is deterministic. Checks are ordered: name
    /// uniqueness, identity assignment and typing, identity laws on stored
    /// entries, table closure, entry typing, associativity. The empty
    /// category is valid.
    pub fn build(self) -> Result<FiniteCategory, CatError> {
        let n_obj = self.obj_names.len();
        let n_arr = self.arr_names.len();

        let mut seen = HashMap::new();
        for name in self.obj_names.iter().chain(self.arr_names.iter()) {
            if seen.insert(name.clone(), ()).is_some() {
                return Err(CatError::DuplicateName { name: name.clone() });
            }
        }

        let mut identity = Vec::with_capacity(n_obj);
        for (i, slot) in self.identity.iter().enumerate() {
            let id = slot.ok_or_else(|| CatError::TypeMismatch {
                detail: format!("object {} has no identity arrow", self.obj_names[i]),
            })?;
            if self.dom[id.idx()] != ObjId(i as u32) || self.cod[id.idx()] != ObjId(i as u32) {
                return Err(CatError::TypeMismatch {
                    detail: format!(
                        "identity of {} must be an endo-arrow on it",
                        self.obj_names[i]
                    ),
                });
            }
            identity.push(id);
        }

        // Identity laws on entries that are present; a wrong entry is more
        // informative than the generic typing failure it also causes.
        for f in (0..n_arr).map(|i| ArrId(i as u32)) {
            let right = identity[self.dom[f.idx()].idx()];
            if let Some(&h) = self.comp.get(&(f, right)) {
                if h != f {
                    return Err(CatError::IdentityLawViolation {
                        arrow: self.name(f),
                        side: Side::Right,
                    });
                }
            }
            let left = identity[self.cod[f.idx()].idx()];
            if let Some(&h) = self.comp.get(&(left, f)) {
                if h != f {
                    return Err(CatError::IdentityLawViolation {
                        arrow: self.name(f),
                        side: Side::Left,
                    });
                }
            }
        }

        // Closure: every composable pair needs an entry.
        for f in (0..n_arr).map(|i| ArrId(i as u32)) {
            for g in (0..n_arr).map(|i| ArrId(i as u32)) {
                if self.dom[g.idx()] == self.cod[f.idx()] && !self.comp.contains_key(&(g, f)) {
                    return Err(CatError::MissingComposite {
                        g: self.name(g),
                        f: self.name(f),
                    });
                }
            }
        }

        for (&(g, f), &h) in &self.comp {
            if g.idx() >= n_arr || f.idx() >= n_arr || h.idx() >= n_arr {
                return Err(CatError::TypeMismatch {
                    detail: format!("composition entry ({g}, {f}) -> {h} is out of range"),
                });
            }
            if self.dom[g.idx()] != self.cod[f.idx()] {
                return Err(CatError::TypeMismatch {
                    detail: format!(
                        "entry for {} . {} but the pair is not composable",
                        self.name(g),
                        self.name(f)
                    ),
                });
            }
            if self.dom[h.idx()] != self.dom[f.idx()] || self.cod[h.idx()] != self.cod[g.idx()] {
                return Err(CatError::TypeMismatch {
                    detail: format!(
                        "composite {} of {} . {} has the wrong endpoints",
                        self.name(h),
                        self.name(g),
                        self.name(f)
                    ),
                });
            }
        }

        // Associativity: h . (g . f) = (h . g) . f over every composable triple.
        for f in (0..n_arr).map(|i| ArrId(i as u32)) {
            for g in (0..n_arr).map(|i| ArrId(i as u32)) {
                if self.dom[g.idx()] != self.cod[f.idx()] {
                    continue;
                }
                let gf = self.comp[&(g, f)];
                for h in (0..n_arr).map(|i| ArrId(i as u32)) {
                    if self.dom[h.idx()] != self.cod[g.idx()] {
                        continue;
                    }
                    let hg = self.comp[&(h, g)];
                    if self.comp[&(h, gf)] != self.comp[&(hg, f)] {
                        return Err(CatError::AssociativityViolation {
                            h: self.name(h),
                            g: self.name(g),
                            f: self.name(f),
                        });
                    }
                }
            }
        }

        let mut by_hom: BTreeMap<(ObjId, ObjId), Vec<ArrId>> = BTreeMap::new();
        for f in (0..n_arr).map(|i| ArrId(i as u32)) {
            by_hom.entry((self.dom[f.idx()], self.cod[f.idx()])).or_default().push(f);
        }

        Ok(FiniteCategory {
            obj_names: self.obj_names,
            arr_names: self.arr_names,
            dom: self.dom,
            cod: self.cod,
            identity,
            comp: self.comp,
            by_hom,
        })
    }
}

/// A validated finite category. Immutable after construction, so shared
/// references may be read concurrently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteCategory {
    obj_names: Vec<String>,
    arr_names: Vec<String>,
    dom: Vec<ObjId>,
    cod: Vec<ObjId>,
    identity: Vec<ArrId>,
    comp: BTreeMap<(ArrId, ArrId), ArrId>,
    by_hom: BTreeMap<(ObjId, ObjId), Vec<ArrId>>,
}

impl FiniteCategory {
    pub fn n_objects(&self) -> usize {
        self.obj_names.len()
    }

    pub fn n_arrows(&self) -> usize {
        self.arr_names.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> {
        (0..self.obj_names.len() as u32).map(ObjId)
    }

    pub fn arrows(&self) -> impl Iterator<Item = ArrId> {
        (0..self.arr_names.len() as u32).map(ArrId)
    }

    pub fn obj_name(&self, a: ObjId) -> &str {
        &self.obj_names[a.idx()]
    }

    pub fn arr_name(&self, f: ArrId) -> &str {
        &self.arr_names[f.idx()]
    }

    pub fn obj_by_name(&self, name: &str) -> Option<ObjId> {
        self.obj_names.iter().position(|n| n == name).map(|i| ObjId(i as u32))
    }

    pub fn arr_by_name(&self, name: &str) -> Option<ArrId> {
        self.arr_names.iter().position(|n| n == name).map(|i| ArrId(i as u32))
    }

    pub fn dom(&self, f: ArrId) -> ObjId {
        self.dom[f.idx()]
    }

    pub fn cod(&self, f: ArrId) -> ObjId {
        self.cod[f.idx()]
    }

    pub fn identity(&self, a: ObjId) -> ArrId {
        self.identity[a.idx()]
    }

    pub fn is_identity(&self, f: ArrId) -> bool {
        self.identity[self.dom(f).idx()] == f && self.dom(f) == self.cod(f)
    }

    /// Arrows from `a` to `b`, in ascending id order.
    pub fn hom(&self, a: ObjId, b: ObjId) -> &[ArrId] {
        self.by_hom.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The composite `g . f` (apply `f` first).
    pub fn compose(&self, g: ArrId, f: ArrId) -> Result<ArrId, CatError> {
        if self.dom(g) != self.cod(f) {
            return Err(CatError::NotComposable {
                g: self.arr_name(g).to_string(),
                f: self.arr_name(f).to_string(),
            });
        }
        Ok(self.comp[&(g, f)])
    }

    /// Composite for pairs already known to be composable.
    pub fn comp(&self, g: ArrId, f: ArrId) -> ArrId {
        self.comp[&(g, f)]
    }

    /// The two-sided inverse of `f`, if it has one. Inverses are unique.
    pub fn inverse(&self, f: ArrId) -> Option<ArrId> {
        let (a, b) = (self.dom(f), self.cod(f));
        self.hom(b, a)
            .iter()
            .copied()
            .find(|&v| self.comp(v, f) == self.identity(a) && self.comp(f, v) == self.identity(b))
    }

    pub fn is_iso(&self, f: ArrId) -> bool {
        self.inverse(f).is_some()
    }

    /// All invertible arrows from `a` to `b`, in ascending id order.
    pub fn find_isomorphisms(&self, a: ObjId, b: ObjId) -> Vec<ArrId> {
        self.hom(a, b).iter().copied().filter(|&u| self.is_iso(u)).collect()
    }

    pub fn isomorphic(&self, a: ObjId, b: ObjId) -> bool {
        self.hom(a, b).iter().any(|&u| self.is_iso(u))
    }

    /// Searches for invertible `(is1, is2)` with `k . is1 = is2 . h`, i.e. a
    /// change of endpoints carrying `h` onto `k`. Returns the lowest such
    /// pair in lexicographic `(is1, is2)` order, or `None`.
    pub fn equal_up_to_iso(&self, h: ArrId, k: ArrId) -> Option<(ArrId, ArrId)> {
        for &is1 in &self.find_isomorphisms(self.dom(h), self.dom(k)) {
            for &is2 in &self.find_isomorphisms(self.cod(h), self.cod(k)) {
                if self.comp(k, is1) == self.comp(is2, h) {
                    return Some((is1, is2));
                }
            }
        }
        None
    }

    /// Full subcategory on one representative per isomorphism class (the
    /// lowest object id in each class), re-indexed densely.
    pub fn skeleton(&self) -> (FiniteCategory, SkeletonMaps) {
        let mut rep = Vec::with_capacity(self.n_objects());
        for a in self.objects() {
            let r = self
                .objects()
                .find(|&b| self.isomorphic(a, b))
                .expect("object is isomorphic to itself");
            rep.push(r);
        }

        let mut builder = CategoryBuilder::new();
        let mut obj_to_new: Vec<Option<ObjId>> = vec![None; self.n_objects()];
        for a in self.objects() {
            if rep[a.idx()] == a {
                obj_to_new[a.idx()] = Some(builder.object(self.obj_name(a)));
            }
        }
        let mut arr_to_new: Vec<Option<ArrId>> = vec![None; self.n_arrows()];
        for f in self.arrows() {
            if let (Some(d), Some(c)) = (obj_to_new[self.dom(f).idx()], obj_to_new[self.cod(f).idx()]) {
                arr_to_new[f.idx()] = Some(builder.arrow(self.arr_name(f), d, c));
            }
        }
        for a in self.objects() {
            if let Some(na) = obj_to_new[a.idx()] {
                builder.identity(na, arr_to_new[self.identity(a).idx()].unwrap());
            }
        }
        for (&(g, f), &h) in &self.comp {
            if let (Some(ng), Some(nf)) = (arr_to_new[g.idx()], arr_to_new[f.idx()]) {
                builder.composite(ng, nf, arr_to_new[h.idx()].unwrap());
            }
        }
        let cat = builder.build().expect("a full subcategory of a category is a category");
        (cat, SkeletonMaps { rep, obj_to_new, arr_to_new })
    }
}

/// How the skeleton relates back to the original category.
#[derive(Debug, Clone)]
pub struct SkeletonMaps {
    /// For each original object, the (original id of the) chosen class
    /// representative.
    pub rep: Vec<ObjId>,
    /// Original object id to skeleton object id; `None` for non-representatives.
    pub obj_to_new: Vec<Option<ObjId>>,
    /// Original arrow id to skeleton arrow id; `None` for dropped arrows.
    pub arr_to_new: Vec<Option<ArrId>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn empty_category_is_valid() {
        let cat = CategoryBuilder::new().build().unwrap();
        assert_eq!(cat.n_objects(), 0);
        assert_eq!(cat.n_arrows(), 0);
    }

    #[test]
    fn interval_composes_and_has_no_cross_isomorphisms() {
        let cat = samples::interval2();
        let a = cat.obj_by_name("a").unwrap();
        let b = cat.obj_by_name("b").unwrap();
        let f = cat.arr_by_name("f").unwrap();
        assert_eq!(cat.compose(f, cat.identity(a)).unwrap(), f);
        assert_eq!(cat.compose(cat.identity(b), f).unwrap(), f);
        assert!(cat.find_isomorphisms(a, b).is_empty());
        assert_eq!(cat.equal_up_to_iso(cat.identity(a), cat.identity(b)), None);
    }

    #[test]
    fn non_composable_pair_is_rejected() {
        let cat = samples::interval2();
        let f = cat.arr_by_name("f").unwrap();
        let err = cat.compose(f, f).unwrap_err();
        assert!(matches!(err, CatError::NotComposable { .. }));
    }

    #[test]
    fn order_two_group_composes_to_identity() {
        let cat = samples::cyclic2();
        let g = cat.arr_by_name("g").unwrap();
        let x = cat.obj_by_name("x").unwrap();
        assert_eq!(cat.compose(g, g).unwrap(), cat.identity(x));
        assert_eq!(cat.find_isomorphisms(x, x), vec![cat.identity(x), g]);
    }

    #[test]
    fn group_arrows_coincide_up_to_iso_with_lowest_witness() {
        let cat = samples::cyclic2();
        let x = cat.obj_by_name("x").unwrap();
        let e = cat.identity(x);
        let g = cat.arr_by_name("g").unwrap();
        // g . is1 = is2 . e; the scan hits is1 = e first, forcing is2 = g.
        assert_eq!(cat.equal_up_to_iso(e, g), Some((e, g)));
    }

    #[test]
    fn wrong_identity_entry_reports_the_identity_law() {
        let mut b = CategoryBuilder::new();
        let a = b.object("a");
        let bb = b.object("b");
        b.auto_identities();
        let ida = b.identity_of(a);
        let f = b.arrow("f", a, bb);
        b.infer_identity_composites();
        // Overwrite f . id_a with id_a: both an identity-law and a typing
        // violation; the identity law must win.
        b.composite(f, ida, ida);
        let err = b.build().unwrap_err();
        assert_eq!(
            err,
            CatError::IdentityLawViolation { arrow: "f".into(), side: Side::Right }
        );
    }

    #[test]
    fn missing_composite_is_reported() {
        let mut b = CategoryBuilder::new();
        let a = b.object("a");
        let bb = b.object("b");
        let c = b.object("c");
        b.auto_identities();
        let f = b.arrow("f", a, bb);
        let g = b.arrow("g", bb, c);
        let _h = b.arrow("h", a, c);
        b.infer_identity_composites();
        // g . f never recorded.
        let err = b.build().unwrap_err();
        assert_eq!(err, CatError::MissingComposite { g: "g".into(), f: "f".into() });
        let _ = (f, g);
    }

    #[test]
    fn associativity_violation_is_reported_with_witness() {
        // One object, arrows {id, s, t}: force s . s = t, t . s = id, s . t = id,
        // t . t = s. Then s.(s.s) = s.t = id but (s.s).s = t.s = id; tweak one
        // entry to break the triple (s, s, s).
        let mut b = CategoryBuilder::new();
        let x = b.object("x");
        b.auto_identities();
        let idx = b.identity_of(x);
        let s = b.arrow("s", x, x);
        let t = b.arrow("t", x, x);
        b.infer_identity_composites();
        b.composite(s, s, t);
        b.composite(s, t, idx);
        b.composite(t, s, s);
        b.composite(t, t, idx);
        let err = b.build().unwrap_err();
        assert!(matches!(err, CatError::AssociativityViolation { .. }));
    }

    #[test]
    fn skeleton_collapses_isomorphic_objects() {
        let cat = samples::indiscrete2();
        let (sk, maps) = cat.skeleton();
        assert_eq!(sk.n_objects(), 1);
        assert_eq!(sk.n_arrows(), 1);
        assert_eq!(maps.rep, vec![ObjId(0), ObjId(0)]);
    }

    #[test]
    fn skeleton_of_group_is_the_group() {
        let cat = samples::cyclic2();
        let (sk, _) = cat.skeleton();
        assert_eq!(sk.n_objects(), 1);
        assert_eq!(sk.n_arrows(), 2);
    }
}
