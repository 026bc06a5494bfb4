//! The internal-symmetry hierarchy over a finite category.
//!
//! Four nested layers of structure are modeled, each with a checker that
//! certifies its laws or returns a concrete witness:
//!
//! - [`PscStructure`] equips a category with a duality `btop` sending each
//!   arrow to an object, a `star` table making `btop` a homomorphism from
//!   composition to `star`, and a representability family `iso(a)` of
//!   isomorphisms `btop(id_a) -> a`. The checker additionally enforces
//!   endpoint coherence: arrows sharing a duality value must also share
//!   the duality values of their endpoint identities, otherwise the value
//!   could not stand for one arrow-like entity.
//! - [`CoccStructure`] adds a functor `te` from the arrow category back to
//!   the base whose object part is forced to be `btop`, together with the
//!   requirement that `iso` is natural as a transformation `te . diagonal
//!   -> Id`.
//! - [`check_sec`] verifies that the transformation derived from `te`
//!   retracts onto the canonical one: `tau_inv . tau = psi`, equivalently
//!   `te((f;f)) = iso_inv(cod f) . f . iso(dom f)` for every arrow.
//! - [`check_imc`] searches for a natural family of invertible components
//!   `J(f) -> J(id_btop(f))`; such a family exists exactly when every
//!   arrow of the base is invertible.
//!
//! Bounded backtracking searchers ([`search_psc`], [`search_cocc`]) either
//! find the lexicographically least structure, prove none exists, or
//! report an exhausted budget; they never silently give up.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::cat::{ArrId, CategoryBuilder, FiniteCategory, ObjId};
use crate::comma::{build_arrow_category, ArrowCategory, CommaError, LevelCaps};
use crate::functor::{
    check_functor, check_natural_iso, compose_functors, Functor, FunctorError, NatTransf,
    NaturalityError,
};

/// Violations of the layered structure laws, each carrying a witness in
/// the category's own vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetryError {
    #[error("structure shape mismatch: {detail}")]
    ShapeMismatch { detail: String },
    #[error("star table has no entry for the values of {g} . {f}")]
    StarMissing { g: String, f: String },
    #[error("star entry for the values of {g} . {f} disagrees with the value of the composite")]
    StarMismatch { g: String, f: String },
    #[error("star entry ({x}, {y}) mentions an object outside the duality image")]
    StarOutsideImage { x: String, y: String },
    #[error("no valid representability isomorphism at {obj}")]
    NotRepresentable { obj: String },
    #[error("arrows {f} and {g} share a duality value but not their endpoint values")]
    EndpointIncoherent { f: String, g: String },
    #[error("te is not a functor: {0}")]
    TeNotFunctor(#[from] FunctorError),
    #[error("iso family is not natural for te: {0}")]
    PhiNotNatural(#[from] NaturalityError),
    #[error("te square map is missing a value for components ({h1};{h2})")]
    TeIncomplete { h1: String, h2: String },
    #[error("retraction law fails at {witness}")]
    SecFails { witness: String },
    #[error("adjunction law fails: {witness}")]
    AdjunctionFails { witness: String },
}

/// Node allowance for the backtracking searchers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_nodes: 2_000_000 }
    }
}

/// Result of a bounded exhaustive search.
#[derive(Debug, Clone)]
pub enum SearchOutcome<T> {
    /// The lexicographically least witness, by the searcher's fixed
    /// assignment order.
    Found(T),
    /// The whole space was scanned and no witness exists.
    AbsentProven,
    /// The node budget ran out before the space was covered.
    BudgetExhausted,
}

impl<T> SearchOutcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_absent_proven(&self) -> bool {
        matches!(self, SearchOutcome::AbsentProven)
    }
}

/// Duality structure on a finite category: an object value per arrow, a
/// star table over the value image, and a representability isomorphism
/// per object.
#[derive(Debug, Clone)]
pub struct PscStructure {
    cat: Arc<FiniteCategory>,
    btop: Vec<ObjId>,
    star: BTreeMap<(ObjId, ObjId), ObjId>,
    iso: Vec<ArrId>,
}

impl PscStructure {
    pub fn new(
        cat: Arc<FiniteCategory>,
        btop: Vec<ObjId>,
        star: BTreeMap<(ObjId, ObjId), ObjId>,
        iso: Vec<ArrId>,
    ) -> Result<Self, SymmetryError> {
        if btop.len() != cat.n_arrows() {
            return Err(SymmetryError::ShapeMismatch {
                detail: format!("btop covers {} arrows, category has {}", btop.len(), cat.n_arrows()),
            });
        }
        if iso.len() != cat.n_objects() {
            return Err(SymmetryError::ShapeMismatch {
                detail: format!("iso covers {} objects, category has {}", iso.len(), cat.n_objects()),
            });
        }
        if btop.iter().any(|o| o.idx() >= cat.n_objects())
            || iso.iter().any(|a| a.idx() >= cat.n_arrows())
        {
            return Err(SymmetryError::ShapeMismatch { detail: "index out of range".into() });
        }
        for (&(x, y), &z) in &star {
            if [x, y, z].iter().any(|o| o.idx() >= cat.n_objects()) {
                return Err(SymmetryError::ShapeMismatch {
                    detail: "star entry index out of range".into(),
                });
            }
        }
        Ok(Self { cat, btop, star, iso })
    }

    pub fn cat(&self) -> &Arc<FiniteCategory> {
        &self.cat
    }

    /// The object value assigned to an arrow.
    pub fn btop(&self, f: ArrId) -> ObjId {
        self.btop[f.idx()]
    }

    pub fn btop_map(&self) -> &[ObjId] {
        &self.btop
    }

    pub fn star(&self, x: ObjId, y: ObjId) -> Option<ObjId> {
        self.star.get(&(x, y)).copied()
    }

    pub fn star_table(&self) -> &BTreeMap<(ObjId, ObjId), ObjId> {
        &self.star
    }

    /// The representability isomorphism `btop(id_a) -> a`.
    pub fn iso(&self, a: ObjId) -> ArrId {
        self.iso[a.idx()]
    }

    pub fn iso_map(&self) -> &[ArrId] {
        &self.iso
    }

    /// Inverse of the representability isomorphism, if it is invertible.
    pub fn iso_inv(&self, a: ObjId) -> Option<ArrId> {
        self.cat.inverse(self.iso[a.idx()])
    }

    /// All objects that occur as duality values.
    pub fn image(&self) -> BTreeSet<ObjId> {
        self.btop.iter().copied().collect()
    }
}

/// Verifies the duality laws.
///
/// Checked in order: representability of every object, star entries stay
/// inside the duality image, the homomorphism law
/// `btop(g . f) = star(btop(g), btop(f))` over every composable pair
/// (missing entries are an error), and endpoint coherence. Scans run in id
/// order so the first witness is deterministic.
pub fn check_psc(s: &PscStructure) -> Result<(), SymmetryError> {
    let cat = s.cat.as_ref();

    for a in cat.objects() {
        let u = s.iso(a);
        if cat.dom(u) != s.btop(cat.identity(a)) || cat.cod(u) != a || !cat.is_iso(u) {
            return Err(SymmetryError::NotRepresentable { obj: cat.obj_name(a).to_string() });
        }
    }

    let image = s.image();
    for (&(x, y), &z) in &s.star {
        if !image.contains(&x) || !image.contains(&y) || !image.contains(&z) {
            return Err(SymmetryError::StarOutsideImage {
                x: cat.obj_name(x).to_string(),
                y: cat.obj_name(y).to_string(),
            });
        }
    }

    for f in cat.arrows() {
        for g in cat.arrows() {
            if cat.dom(g) != cat.cod(f) {
                continue;
            }
            let expected = s.btop(cat.comp(g, f));
            match s.star(s.btop(g), s.btop(f)) {
                None => {
                    return Err(SymmetryError::StarMissing {
                        g: cat.arr_name(g).to_string(),
                        f: cat.arr_name(f).to_string(),
                    })
                }
                Some(z) if z != expected => {
                    return Err(SymmetryError::StarMismatch {
                        g: cat.arr_name(g).to_string(),
                        f: cat.arr_name(f).to_string(),
                    })
                }
                Some(_) => {}
            }
        }
    }

    for f in cat.arrows() {
        for g in cat.arrows() {
            if g.0 <= f.0 || s.btop(f) != s.btop(g) {
                continue;
            }
            let dv_f = s.btop(cat.identity(cat.dom(f)));
            let dv_g = s.btop(cat.identity(cat.dom(g)));
            let cv_f = s.btop(cat.identity(cat.cod(f)));
            let cv_g = s.btop(cat.identity(cat.cod(g)));
            if dv_f != dv_g || cv_f != cv_g {
                return Err(SymmetryError::EndpointIncoherent {
                    f: cat.arr_name(f).to_string(),
                    g: cat.arr_name(g).to_string(),
                });
            }
        }
    }

    Ok(())
}

/// Backtracking search for a duality structure.
///
/// Arrows are assigned in a fixed order (identities by object, then the
/// remaining arrows by id) and candidate values are tried in ascending
/// object order, so a found structure is the lexicographically least one.
/// Identity values are restricted to objects isomorphic to the identity's
/// object, which representability requires; other arrows range over all
/// objects, pruned by star consistency and endpoint coherence. The star
/// table and iso family of a found structure are derived: star entries
/// come from composites and `iso(a)` is the lowest-id isomorphism.
pub fn search_psc(cat: &Arc<FiniteCategory>, budget: Budget) -> SearchOutcome<PscStructure> {
    let mut order: Vec<ArrId> = cat.objects().map(|a| cat.identity(a)).collect();
    let mut rest: Vec<ArrId> = cat.arrows().filter(|&f| !cat.is_identity(f)).collect();
    order.append(&mut rest);

    let candidates: Vec<Vec<ObjId>> = order
        .iter()
        .map(|&f| {
            if cat.is_identity(f) {
                let a = cat.dom(f);
                cat.objects().filter(|&r| cat.isomorphic(r, a)).collect()
            } else {
                cat.objects().collect()
            }
        })
        .collect();

    let mut search = PscSearch {
        cat: cat.as_ref(),
        order,
        candidates,
        assign: vec![None; cat.n_arrows()],
        nodes: 0,
        max_nodes: budget.max_nodes,
        out_of_budget: false,
    };
    match search.run(0) {
        Some(btop) => {
            let mut star = BTreeMap::new();
            for f in cat.arrows() {
                for g in cat.arrows() {
                    if cat.dom(g) == cat.cod(f) {
                        star.insert((btop[g.idx()], btop[f.idx()]), btop[cat.comp(g, f).idx()]);
                    }
                }
            }
            let iso = cat
                .objects()
                .map(|a| cat.find_isomorphisms(btop[cat.identity(a).idx()], a)[0])
                .collect();
            let s = PscStructure::new(cat.clone(), btop, star, iso)
                .expect("search output has the right shape");
            debug_assert_eq!(check_psc(&s), Ok(()));
            SearchOutcome::Found(s)
        }
        None if search.out_of_budget => SearchOutcome::BudgetExhausted,
        None => SearchOutcome::AbsentProven,
    }
}

struct PscSearch<'a> {
    cat: &'a FiniteCategory,
    order: Vec<ArrId>,
    candidates: Vec<Vec<ObjId>>,
    assign: Vec<Option<ObjId>>,
    nodes: u64,
    max_nodes: u64,
    out_of_budget: bool,
}

impl PscSearch<'_> {
    fn run(&mut self, pos: usize) -> Option<Vec<ObjId>> {
        if pos == self.order.len() {
            return Some(self.assign.iter().map(|v| v.unwrap()).collect());
        }
        let f = self.order[pos];
        for i in 0..self.candidates[pos].len() {
            let v = self.candidates[pos][i];
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                self.out_of_budget = true;
                return None;
            }
            self.assign[f.idx()] = Some(v);
            if self.consistent() {
                if let Some(done) = self.run(pos + 1) {
                    return Some(done);
                }
                if self.out_of_budget {
                    return None;
                }
            }
            self.assign[f.idx()] = None;
        }
        None
    }

    /// Star single-valuedness and endpoint coherence over the arrows
    /// assigned so far. Identities are assigned first, so endpoint values
    /// are always available.
    fn consistent(&self) -> bool {
        let cat = self.cat;
        let value = |f: ArrId| self.assign[f.idx()];

        let mut star: HashMap<(ObjId, ObjId), ObjId> = HashMap::new();
        for f in cat.arrows() {
            for g in cat.arrows() {
                if cat.dom(g) != cat.cod(f) {
                    continue;
                }
                if let (Some(vg), Some(vf), Some(vc)) =
                    (value(g), value(f), value(cat.comp(g, f)))
                {
                    if *star.entry((vg, vf)).or_insert(vc) != vc {
                        return false;
                    }
                }
            }
        }

        let endpoint = |f: ArrId, pick: fn(&FiniteCategory, ArrId) -> ObjId| {
            value(cat.identity(pick(cat, f)))
        };
        for f in cat.arrows() {
            for g in cat.arrows() {
                if g.0 <= f.0 {
                    continue;
                }
                if let (Some(vf), Some(vg)) = (value(f), value(g)) {
                    if vf != vg {
                        continue;
                    }
                    let dm = (endpoint(f, FiniteCategory::dom), endpoint(g, FiniteCategory::dom));
                    let cm = (endpoint(f, FiniteCategory::cod), endpoint(g, FiniteCategory::cod));
                    if let ((Some(a), Some(b)), (Some(c), Some(d))) = (dm, cm) {
                        if a != b || c != d {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Duality structure plus a functor `te` from the arrow category to the
/// base whose object part is the duality.
#[derive(Debug, Clone)]
pub struct CoccStructure {
    psc: PscStructure,
    level: Arc<ArrowCategory>,
    te: Functor,
}

impl CoccStructure {
    /// Wraps a per-square arrow map for `te`; the object part is derived
    /// from the duality and is not a degree of freedom.
    pub fn new(
        psc: PscStructure,
        level: Arc<ArrowCategory>,
        te_squares: Vec<ArrId>,
    ) -> Result<Self, SymmetryError> {
        let lcat = level.cat();
        if te_squares.len() != lcat.n_arrows() {
            return Err(SymmetryError::ShapeMismatch {
                detail: format!(
                    "te covers {} squares, arrow category has {}",
                    te_squares.len(),
                    lcat.n_arrows()
                ),
            });
        }
        let obj_map: Vec<ObjId> = lcat.objects().map(|o| psc.btop(level.j_inv(o))).collect();
        let te = Functor::new(lcat.clone(), psc.cat().clone(), obj_map, te_squares)
            .map_err(|_| SymmetryError::ShapeMismatch { detail: "te square out of range".into() })?;
        Ok(Self { psc, level, te })
    }

    /// Builds the square map from bindings keyed by component pairs: a
    /// binding `(h1, h2) -> k` applies to every square with those
    /// components. Every square must be covered.
    pub fn from_component_bindings(
        psc: PscStructure,
        level: Arc<ArrowCategory>,
        bindings: &BTreeMap<(ArrId, ArrId), ArrId>,
    ) -> Result<Self, SymmetryError> {
        let cat = psc.cat().clone();
        let mut te_squares = Vec::with_capacity(level.cat().n_arrows());
        for s in level.cat().arrows() {
            let (h1, h2) = level.square_components(s);
            match bindings.get(&(h1, h2)) {
                Some(&k) => te_squares.push(k),
                None => {
                    return Err(SymmetryError::TeIncomplete {
                        h1: cat.arr_name(h1).to_string(),
                        h2: cat.arr_name(h2).to_string(),
                    })
                }
            }
        }
        Self::new(psc, level, te_squares)
    }

    pub fn psc(&self) -> &PscStructure {
        &self.psc
    }

    pub fn level(&self) -> &Arc<ArrowCategory> {
        &self.level
    }

    pub fn te(&self) -> &Functor {
        &self.te
    }

    pub fn te_square(&self, s: ArrId) -> ArrId {
        self.te.apply_arr(s)
    }

    /// The representability family read as a transformation
    /// `te . diagonal -> Id`.
    pub fn phi(&self) -> NatTransf {
        let from = compose_functors(&self.te, &self.level.diagonal())
            .expect("te composes with the diagonal");
        let to = Functor::identity(self.psc.cat().clone());
        let components = self.psc.cat().objects().map(|a| self.psc.iso(a)).collect();
        NatTransf::new(from, to, components).expect("phi has the right shape")
    }
}

/// Verifies the arrow-category layer: `te` is a functor and the
/// representability family is natural (and invertible) for it.
pub fn check_cocc(c: &CoccStructure) -> Result<(), SymmetryError> {
    check_functor(c.te())?;
    check_natural_iso(&c.phi())?;
    Ok(())
}

/// The transformations derived from `te` along the two retractions of the
/// arrow category: `tau : fst -> te` with `tau(J(f)) = te(sigma) . iso_inv(dom f)`,
/// and `tau_inv : te -> snd` with `tau_inv(J(f)) = iso(cod f) . te(sigma_inv)`.
pub fn derive_tau(c: &CoccStructure) -> Result<(NatTransf, NatTransf), SymmetryError> {
    let cat = c.psc.cat().as_ref();
    let level = c.level.as_ref();
    let mut tau = Vec::with_capacity(level.cat().n_objects());
    let mut tau_inv = Vec::with_capacity(level.cat().n_objects());
    for o in level.cat().objects() {
        let f = level.j_inv(o);
        let (a, b) = (cat.dom(f), cat.cod(f));
        let inv_a = c.psc.iso_inv(a).ok_or_else(|| SymmetryError::NotRepresentable {
            obj: cat.obj_name(a).to_string(),
        })?;
        let t = cat
            .compose(c.te_square(level.sigma(o)), inv_a)
            .map_err(|e| SymmetryError::ShapeMismatch { detail: e.to_string() })?;
        let ti = cat
            .compose(c.psc.iso(b), c.te_square(level.sigma_inv(o)))
            .map_err(|e| SymmetryError::ShapeMismatch { detail: e.to_string() })?;
        tau.push(t);
        tau_inv.push(ti);
    }
    let tau = NatTransf::new(level.fst(), c.te.clone(), tau)
        .map_err(|e| SymmetryError::ShapeMismatch { detail: e.to_string() })?;
    let tau_inv = NatTransf::new(c.te.clone(), level.snd(), tau_inv)
        .map_err(|e| SymmetryError::ShapeMismatch { detail: e.to_string() })?;
    Ok((tau, tau_inv))
}

/// The image of `f` under the square action along its own diagonal
/// square, conjugated back through the representability maps:
/// `iso(cod f) . te((f;f)) . iso_inv(dom f)`. On any valid arrow-category
/// layer this is isomorphic to `f`; under the retraction identity it is
/// `f` itself.
pub fn derived_arrow(c: &CoccStructure, f: ArrId) -> Result<ArrId, SymmetryError> {
    let cat = c.psc.cat().as_ref();
    let (a, b) = (cat.dom(f), cat.cod(f));
    let inv_a = c.psc.iso_inv(a).ok_or_else(|| SymmetryError::NotRepresentable {
        obj: cat.obj_name(a).to_string(),
    })?;
    let mid = cat
        .compose(c.te_square(c.level.diagonal_square(f)), inv_a)
        .map_err(shape)?;
    cat.compose(c.psc.iso(b), mid).map_err(shape)
}

/// Verifies the retraction layer through both of its formulations: the
/// pointwise identity `tau_inv . tau = psi` over level objects, and the
/// equation `te((f;f)) = iso_inv(cod f) . f . iso(dom f)` over base
/// arrows. On a valid arrow-category layer the two agree; checking both
/// keeps the verdict honest for structures fed in directly.
pub fn check_sec(c: &CoccStructure) -> Result<(), SymmetryError> {
    let cat = c.psc.cat().as_ref();
    let level = c.level.as_ref();
    let (tau, tau_inv) = derive_tau(c)?;
    for o in level.cat().objects() {
        let lhs = cat
            .compose(tau_inv.component(o), tau.component(o))
            .map_err(|e| SymmetryError::ShapeMismatch { detail: e.to_string() })?;
        if lhs != level.psi(o) {
            return Err(SymmetryError::SecFails {
                witness: level.cat().obj_name(o).to_string(),
            });
        }
    }
    for f in cat.arrows() {
        let (a, b) = (cat.dom(f), cat.cod(f));
        let inv_b = c.psc.iso_inv(b).ok_or_else(|| SymmetryError::NotRepresentable {
            obj: cat.obj_name(b).to_string(),
        })?;
        let rhs = cat
            .compose(inv_b, cat.compose(f, c.psc.iso(a)).map_err(shape)?)
            .map_err(shape)?;
        if c.te_square(level.diagonal_square(f)) != rhs {
            return Err(SymmetryError::SecFails { witness: cat.arr_name(f).to_string() });
        }
    }
    Ok(())
}

fn shape(e: crate::cat::CatError) -> SymmetryError {
    SymmetryError::ShapeMismatch { detail: e.to_string() }
}

/// Outcome of the invertible-components search.
#[derive(Debug, Clone)]
pub enum ImcOutcome {
    /// A natural family of invertible components `Id -> diagonal . te`.
    Holds { eta: NatTransf },
    Fails { reason: String },
    BudgetExhausted,
}

impl ImcOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, ImcOutcome::Holds { .. })
    }
}

/// Searches for a natural isomorphism from the identity of the arrow
/// category to `diagonal . te`.
///
/// The component at `J(f)` must be an invertible square
/// `J(f) -> J(id_btop(f))`, which forces both components invertible and
/// hence `f` itself invertible; objects standing for non-invertible
/// arrows therefore admit no candidates and the search fails fast with
/// that witness. Candidates are tried in ascending order with naturality
/// checked incrementally, so a found family is the least one.
pub fn check_imc(c: &CoccStructure, budget: Budget) -> ImcOutcome {
    let cat = c.psc.cat().as_ref();
    let level = c.level.as_ref();
    let lcat = level.cat().clone();

    let after = match compose_functors(&level.diagonal(), &c.te) {
        Ok(f) => f,
        Err(e) => return ImcOutcome::Fails { reason: e.to_string() },
    };

    let mut candidates: Vec<Vec<ArrId>> = Vec::with_capacity(lcat.n_objects());
    for o in lcat.objects() {
        let f = level.j_inv(o);
        let v = c.psc.btop(f);
        let target = level.j(cat.identity(v));
        let mut cands = Vec::new();
        for &is2 in &cat.find_isomorphisms(cat.cod(f), v) {
            let is1 = cat.comp(is2, f);
            if !cat.is_iso(is1) {
                continue;
            }
            if let Some(sq) = level.square(o, target, is1, is2) {
                cands.push(sq);
            }
        }
        if cands.is_empty() {
            return ImcOutcome::Fails {
                reason: format!(
                    "no invertible component exists at J({})",
                    cat.arr_name(f)
                ),
            };
        }
        candidates.push(cands);
    }

    let mut search = ImcSearch {
        lcat: lcat.as_ref(),
        after: &after,
        candidates,
        assign: vec![None; lcat.n_objects()],
        nodes: 0,
        max_nodes: budget.max_nodes,
        out_of_budget: false,
    };
    match search.run(0) {
        Some(components) => {
            let eta = NatTransf::new(Functor::identity(lcat.clone()), after.clone(), components)
                .expect("eta has the right shape");
            debug_assert_eq!(check_natural_iso(&eta), Ok(()));
            ImcOutcome::Holds { eta }
        }
        None if search.out_of_budget => ImcOutcome::BudgetExhausted,
        None => ImcOutcome::Fails {
            reason: "no assignment of invertible components is natural".to_string(),
        },
    }
}

struct ImcSearch<'a> {
    lcat: &'a FiniteCategory,
    after: &'a Functor,
    candidates: Vec<Vec<ArrId>>,
    assign: Vec<Option<ArrId>>,
    nodes: u64,
    max_nodes: u64,
    out_of_budget: bool,
}

impl ImcSearch<'_> {
    fn run(&mut self, pos: usize) -> Option<Vec<ArrId>> {
        if pos == self.assign.len() {
            return Some(self.assign.iter().map(|v| v.unwrap()).collect());
        }
        for i in 0..self.candidates[pos].len() {
            let sq = self.candidates[pos][i];
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                self.out_of_budget = true;
                return None;
            }
            self.assign[pos] = Some(sq);
            if self.natural_so_far(pos) {
                if let Some(done) = self.run(pos + 1) {
                    return Some(done);
                }
                if self.out_of_budget {
                    return None;
                }
            }
            self.assign[pos] = None;
        }
        None
    }

    /// Naturality squares between `pos` and every object assigned so far.
    fn natural_so_far(&self, pos: usize) -> bool {
        let lcat = self.lcat;
        for u in lcat.arrows() {
            let (o, p) = (lcat.dom(u), lcat.cod(u));
            if o.idx().max(p.idx()) > pos {
                continue;
            }
            let (eo, ep) = (self.assign[o.idx()].unwrap(), self.assign[p.idx()].unwrap());
            if lcat.comp(self.after.apply_arr(u), eo) != lcat.comp(ep, u) {
                return false;
            }
        }
        true
    }
}

/// First arrow with no inverse, scanning in id order.
pub fn first_non_invertible(cat: &FiniteCategory) -> Option<ArrId> {
    cat.arrows().find(|&f| !cat.is_iso(f))
}

/// Backtracking search for the square map of an arrow-category layer over
/// a given duality structure.
///
/// Identity squares and diagonal squares are forced (by functoriality and
/// by naturality of the representability family); the remaining squares
/// are assigned in id order from the typed hom-set candidates, pruned by
/// functoriality over every composable pair assigned so far.
pub fn search_cocc(
    psc: &PscStructure,
    caps: LevelCaps,
    budget: Budget,
) -> Result<SearchOutcome<CoccStructure>, CommaError> {
    let level = Arc::new(build_arrow_category(psc.cat(), caps)?);
    let cat = psc.cat().as_ref();
    let lcat = level.cat().clone();

    let mut forced: Vec<Option<ArrId>> = vec![None; lcat.n_arrows()];
    for o in lcat.objects() {
        let f = level.j_inv(o);
        forced[lcat.identity(o).idx()] = Some(cat.identity(psc.btop(f)));
    }
    let mut representable = true;
    for u in cat.arrows() {
        let (a, b) = (cat.dom(u), cat.cod(u));
        let (iso_a, inv_b) = match (psc.iso(a), psc.iso_inv(b)) {
            (ia, Some(ib)) => (ia, ib),
            _ => {
                representable = false;
                break;
            }
        };
        let Ok(mid) = cat.compose(u, iso_a) else {
            representable = false;
            break;
        };
        let Ok(val) = cat.compose(inv_b, mid) else {
            representable = false;
            break;
        };
        let slot = &mut forced[level.diagonal_square(u).idx()];
        if slot.is_some() && *slot != Some(val) {
            return Ok(SearchOutcome::AbsentProven);
        }
        *slot = Some(val);
    }
    if !representable {
        return Ok(SearchOutcome::AbsentProven);
    }

    let mut candidates: Vec<Vec<ArrId>> = Vec::with_capacity(lcat.n_arrows());
    for s in lcat.arrows() {
        match forced[s.idx()] {
            Some(v) => candidates.push(vec![v]),
            None => {
                let (src, dst) = (lcat.dom(s), lcat.cod(s));
                let from = psc.btop(level.j_inv(src));
                let to = psc.btop(level.j_inv(dst));
                candidates.push(cat.hom(from, to).to_vec());
            }
        }
    }

    let mut search = CoccSearch {
        lcat: lcat.as_ref(),
        cat,
        candidates,
        assign: vec![None; lcat.n_arrows()],
        nodes: 0,
        max_nodes: budget.max_nodes,
        out_of_budget: false,
    };
    match search.run(0) {
        Some(te_squares) => {
            let c = CoccStructure::new(psc.clone(), level, te_squares)
                .expect("search output has the right shape");
            debug_assert_eq!(check_cocc(&c), Ok(()));
            Ok(SearchOutcome::Found(c))
        }
        None if search.out_of_budget => Ok(SearchOutcome::BudgetExhausted),
        None => Ok(SearchOutcome::AbsentProven),
    }
}

struct CoccSearch<'a> {
    lcat: &'a FiniteCategory,
    cat: &'a FiniteCategory,
    candidates: Vec<Vec<ArrId>>,
    assign: Vec<Option<ArrId>>,
    nodes: u64,
    max_nodes: u64,
    out_of_budget: bool,
}

impl CoccSearch<'_> {
    fn run(&mut self, pos: usize) -> Option<Vec<ArrId>> {
        if pos == self.assign.len() {
            return Some(self.assign.iter().map(|v| v.unwrap()).collect());
        }
        for i in 0..self.candidates[pos].len() {
            let v = self.candidates[pos][i];
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                self.out_of_budget = true;
                return None;
            }
            self.assign[pos] = Some(v);
            if self.functorial_so_far() {
                if let Some(done) = self.run(pos + 1) {
                    return Some(done);
                }
                if self.out_of_budget {
                    return None;
                }
            }
            self.assign[pos] = None;
        }
        None
    }

    /// Composition preservation over every fully assigned composable pair.
    fn functorial_so_far(&self) -> bool {
        let lcat = self.lcat;
        for u in lcat.arrows() {
            for v in lcat.arrows() {
                if lcat.dom(v) != lcat.cod(u) {
                    continue;
                }
                if let (Some(tu), Some(tv), Some(tc)) = (
                    self.assign[u.idx()],
                    self.assign[v.idx()],
                    self.assign[lcat.comp(v, u).idx()],
                ) {
                    match self.cat.compose(tv, tu) {
                        Ok(c) if c == tc => {}
                        _ => return false,
                    }
                }
            }
        }
        true
    }
}

/// The two relabelings induced by a duality structure, connected by
/// functors that are isomorphisms of categories.
#[derive(Debug, Clone)]
pub struct LiftedCategories {
    /// The base with objects renamed to their identity arrows.
    pub arrow_side: Arc<FiniteCategory>,
    /// The base with names decorated by their duality values.
    pub value_side: Arc<FiniteCategory>,
    /// Base to arrow side.
    pub m: Functor,
    /// Arrow side to value side.
    pub d: Functor,
    /// Value side back to arrow side.
    pub d_inv: Functor,
    /// Base straight to value side, `d . m`.
    pub t: Functor,
}

/// Relabels the base category two ways: once with objects standing for
/// their identity arrows, and once with every name decorated by its
/// duality value. Arrows of the value side are kept one per base arrow
/// (distinct arrows sharing a value stay distinct), which is what makes
/// `d` invertible.
pub fn lift_categories(psc: &PscStructure) -> LiftedCategories {
    let cat = psc.cat().as_ref();

    let mut ab = CategoryBuilder::new();
    for a in cat.objects() {
        ab.object(&format!("<{}>", cat.arr_name(cat.identity(a))));
    }
    let mut vb = CategoryBuilder::new();
    for a in cat.objects() {
        vb.object(&format!(
            "<{}~{}>",
            cat.obj_name(a),
            cat.obj_name(psc.btop(cat.identity(a)))
        ));
    }
    for f in cat.arrows() {
        let (d, c) = (ObjId(cat.dom(f).0), ObjId(cat.cod(f).0));
        ab.arrow(cat.arr_name(f), d, c);
        vb.arrow(&format!("{}~{}", cat.arr_name(f), cat.obj_name(psc.btop(f))), d, c);
    }
    for a in cat.objects() {
        ab.identity(ObjId(a.0), ArrId(cat.identity(a).0));
        vb.identity(ObjId(a.0), ArrId(cat.identity(a).0));
    }
    for f in cat.arrows() {
        for g in cat.arrows() {
            if cat.dom(g) == cat.cod(f) {
                let h = ArrId(cat.comp(g, f).0);
                ab.composite(ArrId(g.0), ArrId(f.0), h);
                vb.composite(ArrId(g.0), ArrId(f.0), h);
            }
        }
    }
    let arrow_side = Arc::new(ab.build().expect("relabeling preserves the axioms"));
    let value_side = Arc::new(vb.build().expect("relabeling preserves the axioms"));

    let relabel = |src: &Arc<FiniteCategory>, dst: &Arc<FiniteCategory>| {
        Functor::new(
            src.clone(),
            dst.clone(),
            src.objects().collect(),
            src.arrows().collect(),
        )
        .expect("relabelings have identical shapes")
    };
    let m = relabel(psc.cat(), &arrow_side);
    let d = relabel(&arrow_side, &value_side);
    let d_inv = relabel(&value_side, &arrow_side);
    let t = compose_functors(&d, &m).expect("t composes");

    LiftedCategories { arrow_side, value_side, m, d, d_inv, t }
}

/// Verdict for one layer of the hierarchy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayerVerdict {
    Pass,
    Fail { reason: String },
    /// The check could not finish within its budget.
    Unknown { reason: String },
}

impl LayerVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, LayerVerdict::Pass)
    }

    pub fn mark(&self) -> char {
        match self {
            LayerVerdict::Pass => '+',
            LayerVerdict::Fail { .. } => '-',
            LayerVerdict::Unknown { .. } => '?',
        }
    }
}

/// Results of checking all four layers, gated so that a failed layer
/// fails everything above it.
#[derive(Debug, Clone)]
pub struct HierarchyVerdict {
    pub psc: LayerVerdict,
    pub cocc: LayerVerdict,
    pub sec: LayerVerdict,
    pub imc: LayerVerdict,
    /// Set when the invertible-components search disagrees with the
    /// all-arrows-invertible scan; this would indicate a checker defect
    /// and is surfaced rather than swallowed.
    pub cross_check: Option<String>,
}

impl HierarchyVerdict {
    pub fn summary(&self) -> String {
        format!(
            "PSC{} CoCC{} SEC{} IMC{}",
            self.psc.mark(),
            self.cocc.mark(),
            self.sec.mark(),
            self.imc.mark()
        )
    }

    /// Each layer passes only if the one below does.
    pub fn is_monotone(&self) -> bool {
        let ranks = [&self.psc, &self.cocc, &self.sec, &self.imc];
        ranks.windows(2).all(|w| w[1].passed() <= w[0].passed())
    }
}

fn gated(reason: &str) -> LayerVerdict {
    LayerVerdict::Fail { reason: format!("layer below failed: {reason}") }
}

/// Checks every layer of a full structure, from duality up to invertible
/// components.
pub fn classify(c: &CoccStructure, budget: Budget) -> HierarchyVerdict {
    let psc = match check_psc(c.psc()) {
        Ok(()) => LayerVerdict::Pass,
        Err(e) => LayerVerdict::Fail { reason: e.to_string() },
    };
    let cocc = match &psc {
        LayerVerdict::Pass => match check_cocc(c) {
            Ok(()) => LayerVerdict::Pass,
            Err(e) => LayerVerdict::Fail { reason: e.to_string() },
        },
        LayerVerdict::Fail { reason } | LayerVerdict::Unknown { reason } => gated(reason),
    };
    let sec = match &cocc {
        LayerVerdict::Pass => match check_sec(c) {
            Ok(()) => LayerVerdict::Pass,
            Err(e) => LayerVerdict::Fail { reason: e.to_string() },
        },
        LayerVerdict::Fail { reason } | LayerVerdict::Unknown { reason } => gated(reason),
    };
    let (imc, cross_check) = match &sec {
        LayerVerdict::Pass => match check_imc(c, budget) {
            ImcOutcome::Holds { .. } => {
                let cross = first_non_invertible(c.psc().cat()).map(|f| {
                    format!(
                        "components found although {} is not invertible",
                        c.psc().cat().arr_name(f)
                    )
                });
                (LayerVerdict::Pass, cross)
            }
            ImcOutcome::Fails { reason } => {
                let cross = if first_non_invertible(c.psc().cat()).is_none() {
                    Some("every arrow is invertible yet no components were found".to_string())
                } else {
                    None
                };
                (LayerVerdict::Fail { reason }, cross)
            }
            ImcOutcome::BudgetExhausted => (
                LayerVerdict::Unknown { reason: "component search budget exhausted".into() },
                None,
            ),
        },
        LayerVerdict::Fail { reason } | LayerVerdict::Unknown { reason } => (gated(reason), None),
    };
    HierarchyVerdict { psc, cocc, sec, imc, cross_check }
}

/// Classifies when only the duality layer is present: the upper layers
/// fail for lack of structure.
pub fn classify_psc_only(psc: &PscStructure) -> HierarchyVerdict {
    let base = match check_psc(psc) {
        Ok(()) => LayerVerdict::Pass,
        Err(e) => LayerVerdict::Fail { reason: e.to_string() },
    };
    let missing = LayerVerdict::Fail { reason: "no te structure provided".into() };
    HierarchyVerdict {
        psc: base,
        cocc: missing.clone(),
        sec: missing.clone(),
        imc: missing,
        cross_check: None,
    }
}
