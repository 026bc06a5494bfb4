//! Functors and natural transformations between finite categories.
//!
//! A [`Functor`] stores its object and arrow maps as dense vectors indexed
//! by the source category; [`check_functor`] then verifies typing, identity
//! preservation, and composition preservation by exhaustive scan. The same
//! split applies to [`NatTransf`] and [`check_naturality`]: construction
//! only fixes the shape, the laws are checked explicitly.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::cat::{ArrId, FiniteCategory, ObjId};

/// Ways a claimed functor can fail its laws.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctorError {
    #[error("map shape does not match the source category")]
    ShapeMismatch,
    #[error("image of {arrow} does not run between the images of its endpoints")]
    ArrowTypeMismatch { arrow: String },
    #[error("identity of {obj} is not sent to an identity")]
    IdentityNotPreserved { obj: String },
    #[error("image of the composite {g} . {f} differs from the composite of the images")]
    CompositionNotPreserved { g: String, f: String },
}

/// Ways a claimed natural transformation can fail.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NaturalityError {
    #[error("the two functors do not share source and target")]
    ShapeMismatch,
    #[error("component at {obj} does not run from the first image to the second")]
    ComponentTypeMismatch { obj: String },
    #[error("naturality square fails at {arrow}")]
    SquareFails { arrow: String },
    #[error("component at {obj} is not invertible")]
    ComponentNotIso { obj: String },
}

/// A functor between two finite categories, given by total object and
/// arrow maps.
#[derive(Clone)]
pub struct Functor {
    source: Arc<FiniteCategory>,
    target: Arc<FiniteCategory>,
    obj_map: Vec<ObjId>,
    arr_map: Vec<ArrId>,
}

impl fmt::Debug for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Functor")
            .field("obj_map", &self.obj_map)
            .field("arr_map", &self.arr_map)
            .finish()
    }
}

impl Functor {
    /// Wraps the maps after a shape check; the functor laws are left to
    /// [`check_functor`].
    pub fn new(
        source: Arc<FiniteCategory>,
        target: Arc<FiniteCategory>,
        obj_map: Vec<ObjId>,
        arr_map: Vec<ArrId>,
    ) -> Result<Self, FunctorError> {
        if obj_map.len() != source.n_objects() || arr_map.len() != source.n_arrows() {
            return Err(FunctorError::ShapeMismatch);
        }
        if obj_map.iter().any(|o| o.idx() >= target.n_objects())
            || arr_map.iter().any(|a| a.idx() >= target.n_arrows())
        {
            return Err(FunctorError::ShapeMismatch);
        }
        Ok(Self { source, target, obj_map, arr_map })
    }

    pub fn identity(cat: Arc<FiniteCategory>) -> Self {
        let obj_map = cat.objects().collect();
        let arr_map = cat.arrows().collect();
        Self { source: cat.clone(), target: cat, obj_map, arr_map }
    }

    pub fn source(&self) -> &Arc<FiniteCategory> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteCategory> {
        &self.target
    }

    pub fn apply_obj(&self, a: ObjId) -> ObjId {
        self.obj_map[a.idx()]
    }

    pub fn apply_arr(&self, f: ArrId) -> ArrId {
        self.arr_map[f.idx()]
    }

    pub fn obj_map(&self) -> &[ObjId] {
        &self.obj_map
    }

    pub fn arr_map(&self) -> &[ArrId] {
        &self.arr_map
    }

    /// True when the object and arrow maps are bijections.
    pub fn is_bijective(&self) -> bool {
        let mut obj_seen = vec![false; self.target.n_objects()];
        for &o in &self.obj_map {
            if std::mem::replace(&mut obj_seen[o.idx()], true) {
                return false;
            }
        }
        let mut arr_seen = vec![false; self.target.n_arrows()];
        for &a in &self.arr_map {
            if std::mem::replace(&mut arr_seen[a.idx()], true) {
                return false;
            }
        }
        obj_seen.iter().all(|&s| s) && arr_seen.iter().all(|&s| s)
    }
}

/// True when the two handles denote the same category, either literally the
/// same allocation or structurally equal.
pub fn same_category(a: &Arc<FiniteCategory>, b: &Arc<FiniteCategory>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Verifies the functor laws: arrow images are typed by the object images,
/// identities map to identities, and the map commutes with composition.
/// Scans run in id order, so the first reported witness is deterministic.
pub fn check_functor(f: &Functor) -> Result<(), FunctorError> {
    let src = f.source.as_ref();
    let tgt = f.target.as_ref();
    for u in src.arrows() {
        let fu = f.apply_arr(u);
        if tgt.dom(fu) != f.apply_obj(src.dom(u)) || tgt.cod(fu) != f.apply_obj(src.cod(u)) {
            return Err(FunctorError::ArrowTypeMismatch { arrow: src.arr_name(u).to_string() });
        }
    }
    for a in src.objects() {
        if f.apply_arr(src.identity(a)) != tgt.identity(f.apply_obj(a)) {
            return Err(FunctorError::IdentityNotPreserved { obj: src.obj_name(a).to_string() });
        }
    }
    for u in src.arrows() {
        for v in src.arrows() {
            if src.dom(v) != src.cod(u) {
                continue;
            }
            let lhs = f.apply_arr(src.comp(v, u));
            let rhs = tgt.comp(f.apply_arr(v), f.apply_arr(u));
            if lhs != rhs {
                return Err(FunctorError::CompositionNotPreserved {
                    g: src.arr_name(v).to_string(),
                    f: src.arr_name(u).to_string(),
                });
            }
        }
    }
    Ok(())
}

/// The composite functor `g . f` (apply `f` first).
pub fn compose_functors(g: &Functor, f: &Functor) -> Result<Functor, FunctorError> {
    if !same_category(f.target(), g.source()) {
        return Err(FunctorError::ShapeMismatch);
    }
    let obj_map = f.obj_map.iter().map(|&o| g.apply_obj(o)).collect();
    let arr_map = f.arr_map.iter().map(|&a| g.apply_arr(a)).collect();
    Functor::new(f.source.clone(), g.target.clone(), obj_map, arr_map)
}

/// A natural transformation between two parallel functors, one component
/// arrow per source object.
#[derive(Clone)]
pub struct NatTransf {
    from: Functor,
    to: Functor,
    components: Vec<ArrId>,
}

impl fmt::Debug for NatTransf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NatTransf").field("components", &self.components).finish()
    }
}

impl NatTransf {
    pub fn new(from: Functor, to: Functor, components: Vec<ArrId>) -> Result<Self, NaturalityError> {
        if !same_category(from.source(), to.source()) || !same_category(from.target(), to.target())
        {
            return Err(NaturalityError::ShapeMismatch);
        }
        if components.len() != from.source().n_objects() {
            return Err(NaturalityError::ShapeMismatch);
        }
        Ok(Self { from, to, components })
    }

    pub fn from_functor(&self) -> &Functor {
        &self.from
    }

    pub fn to_functor(&self) -> &Functor {
        &self.to
    }

    pub fn component(&self, a: ObjId) -> ArrId {
        self.components[a.idx()]
    }

    pub fn components(&self) -> &[ArrId] {
        &self.components
    }
}

/// Verifies component typing and every naturality square
/// `to(u) . component(a) = component(b) . from(u)` for `u : a -> b`.
pub fn check_naturality(t: &NatTransf) -> Result<(), NaturalityError> {
    let src = t.from.source().as_ref();
    let tgt = t.from.target().as_ref();
    for a in src.objects() {
        let c = t.component(a);
        if tgt.dom(c) != t.from.apply_obj(a) || tgt.cod(c) != t.to.apply_obj(a) {
            return Err(NaturalityError::ComponentTypeMismatch {
                obj: src.obj_name(a).to_string(),
            });
        }
    }
    for u in src.arrows() {
        let (a, b) = (src.dom(u), src.cod(u));
        let lhs = tgt.comp(t.to.apply_arr(u), t.component(a));
        let rhs = tgt.comp(t.component(b), t.from.apply_arr(u));
        if lhs != rhs {
            return Err(NaturalityError::SquareFails { arrow: src.arr_name(u).to_string() });
        }
    }
    Ok(())
}

/// Like [`check_naturality`] but additionally requires every component to
/// be invertible.
pub fn check_natural_iso(t: &NatTransf) -> Result<(), NaturalityError> {
    check_naturality(t)?;
    let src = t.from.source().as_ref();
    let tgt = t.from.target().as_ref();
    for a in src.objects() {
        if !tgt.is_iso(t.component(a)) {
            return Err(NaturalityError::ComponentNotIso { obj: src.obj_name(a).to_string() });
        }
    }
    Ok(())
}

/// The inverse transformation of a natural isomorphism, taking each
/// component to its inverse.
pub fn invert_natural_iso(t: &NatTransf) -> Result<NatTransf, NaturalityError> {
    check_natural_iso(t)?;
    let tgt = t.from.target().clone();
    let components = t
        .components
        .iter()
        .map(|&c| tgt.inverse(c).expect("checked invertible"))
        .collect();
    NatTransf::new(t.to.clone(), t.from.clone(), components)
}

/// Componentwise composite of `beta : G -> H` after `alpha : F -> G`.
pub fn vertical_compose(beta: &NatTransf, alpha: &NatTransf) -> Result<NatTransf, NaturalityError> {
    if !same_category(alpha.from.source(), beta.from.source())
        || !same_category(alpha.from.target(), beta.from.target())
    {
        return Err(NaturalityError::ShapeMismatch);
    }
    let tgt = alpha.from.target().as_ref();
    let components = alpha
        .components
        .iter()
        .zip(beta.components.iter())
        .map(|(&a, &b)| tgt.comp(b, a))
        .collect();
    NatTransf::new(alpha.from.clone(), beta.to.clone(), components)
}
