//! Arrow categories and iterated towers of them.
//!
//! For a finite category `C`, the arrow category has one object `J(f)` per
//! arrow `f` of `C`, and an arrow `(h1;h2) : J(f) -> J(g)` for every
//! commuting square `g . h1 = h2 . f`. Composition is componentwise. The
//! construction is materialized eagerly and re-validated through
//! [`CategoryBuilder`], with size caps so a tower over a growing base
//! fails loudly instead of exhausting memory.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::cat::{ArrId, CategoryBuilder, FiniteCategory, ObjId};
use crate::functor::{compose_functors, Functor, NatTransf};

/// Hard limits on a single materialized level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelCaps {
    pub max_objects: usize,
    pub max_arrows: usize,
}

impl Default for LevelCaps {
    fn default() -> Self {
        Self { max_objects: 500, max_arrows: 5000 }
    }
}

/// Failure to materialize a level.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommaError {
    /// The level needs more than `limit` of `what`; `reached` is where the
    /// enumeration stopped, so the true requirement is at least that.
    #[error("arrow category needs more than {limit} {what} (stopped at {reached})")]
    CapExceeded { what: &'static str, limit: usize, reached: usize },
}

/// An arrow category together with the correspondences back to its base.
#[derive(Debug, Clone)]
pub struct ArrowCategory {
    cat: Arc<FiniteCategory>,
    base: Arc<FiniteCategory>,
    /// Square arrow id -> its two components.
    components: Vec<(ArrId, ArrId)>,
    /// `(src object, dst object, h1, h2)` -> square arrow id.
    square_by: HashMap<(ObjId, ObjId, ArrId, ArrId), ArrId>,
}

/// Materializes the arrow category of `base`.
///
/// Objects are enumerated in base-arrow order, so `J` is the map
/// `ArrId(i) -> ObjId(i)`. Squares are enumerated by source object, then
/// target object, then both components in ascending id order.
pub fn build_arrow_category(
    base: &Arc<FiniteCategory>,
    caps: LevelCaps,
) -> Result<ArrowCategory, CommaError> {
    if base.n_arrows() > caps.max_objects {
        return Err(CommaError::CapExceeded {
            what: "objects",
            limit: caps.max_objects,
            reached: base.n_arrows(),
        });
    }

    let mut squares: Vec<(ObjId, ObjId, ArrId, ArrId)> = Vec::new();
    for f in base.arrows() {
        for g in base.arrows() {
            for &h1 in base.hom(base.dom(f), base.dom(g)) {
                for &h2 in base.hom(base.cod(f), base.cod(g)) {
                    if base.comp(g, h1) == base.comp(h2, f) {
                        if squares.len() >= caps.max_arrows {
                            return Err(CommaError::CapExceeded {
                                what: "arrows",
                                limit: caps.max_arrows,
                                reached: squares.len() + 1,
                            });
                        }
                        squares.push((ObjId(f.0), ObjId(g.0), h1, h2));
                    }
                }
            }
        }
    }

    // Component pairs are not unique across squares; suffix repeats with an
    // occurrence counter so arrow names stay distinct.
    let mut pair_total: HashMap<(ArrId, ArrId), usize> = HashMap::new();
    for &(_, _, h1, h2) in &squares {
        *pair_total.entry((h1, h2)).or_insert(0) += 1;
    }

    let mut builder = CategoryBuilder::new();
    for f in base.arrows() {
        builder.object(&format!("J({})", base.arr_name(f)));
    }

    let mut pair_seen: HashMap<(ArrId, ArrId), usize> = HashMap::new();
    let mut components = Vec::with_capacity(squares.len());
    let mut square_by = HashMap::with_capacity(squares.len());
    for &(src, dst, h1, h2) in &squares {
        let occurrence = pair_seen.entry((h1, h2)).or_insert(0);
        let name = if pair_total[&(h1, h2)] == 1 {
            format!("({};{})", base.arr_name(h1), base.arr_name(h2))
        } else {
            format!("({};{})#{}", base.arr_name(h1), base.arr_name(h2), occurrence)
        };
        *occurrence += 1;
        let id = builder.arrow(&name, src, dst);
        components.push((h1, h2));
        square_by.insert((src, dst, h1, h2), id);
    }

    for f in base.arrows() {
        let o = ObjId(f.0);
        let id_square = square_by[&(o, o, base.identity(base.dom(f)), base.identity(base.cod(f)))];
        builder.identity(o, id_square);
    }

    for (i, &(src_u, mid_u, u1, u2)) in squares.iter().enumerate() {
        for (k, &(mid_v, dst_v, v1, v2)) in squares.iter().enumerate() {
            if mid_u != mid_v {
                continue;
            }
            let c1 = base.comp(v1, u1);
            let c2 = base.comp(v2, u2);
            let composite = square_by[&(src_u, dst_v, c1, c2)];
            builder.composite(ArrId(k as u32), ArrId(i as u32), composite);
        }
    }

    let cat = builder.build().expect("arrow category construction satisfies the axioms");
    Ok(ArrowCategory { cat: Arc::new(cat), base: base.clone(), components, square_by })
}

impl ArrowCategory {
    pub fn cat(&self) -> &Arc<FiniteCategory> {
        &self.cat
    }

    pub fn base(&self) -> &Arc<FiniteCategory> {
        &self.base
    }

    /// The object `J(f)` standing for the base arrow `f`.
    pub fn j(&self, f: ArrId) -> ObjId {
        ObjId(f.0)
    }

    /// The base arrow a level object stands for.
    pub fn j_inv(&self, o: ObjId) -> ArrId {
        ArrId(o.0)
    }

    /// The square `(h1;h2) : src -> dst` if that square commutes.
    pub fn square(&self, src: ObjId, dst: ObjId, h1: ArrId, h2: ArrId) -> Option<ArrId> {
        self.square_by.get(&(src, dst, h1, h2)).copied()
    }

    /// Both components of a square arrow.
    pub fn square_components(&self, s: ArrId) -> (ArrId, ArrId) {
        self.components[s.idx()]
    }

    /// First projection to the base: `J(f) -> dom f`, `(h1;h2) -> h1`.
    pub fn fst(&self) -> Functor {
        let obj_map = self.cat.objects().map(|o| self.base.dom(self.j_inv(o))).collect();
        let arr_map = self.components.iter().map(|&(h1, _)| h1).collect();
        Functor::new(self.cat.clone(), self.base.clone(), obj_map, arr_map)
            .expect("projection maps are total")
    }

    /// Second projection to the base: `J(f) -> cod f`, `(h1;h2) -> h2`.
    pub fn snd(&self) -> Functor {
        let obj_map = self.cat.objects().map(|o| self.base.cod(self.j_inv(o))).collect();
        let arr_map = self.components.iter().map(|&(_, h2)| h2).collect();
        Functor::new(self.cat.clone(), self.base.clone(), obj_map, arr_map)
            .expect("projection maps are total")
    }

    /// The base arrow `f` read as the component at `J(f)` of the canonical
    /// transformation from [`fst`](Self::fst) to [`snd`](Self::snd).
    pub fn psi(&self, o: ObjId) -> ArrId {
        self.j_inv(o)
    }

    /// The canonical transformation `fst -> snd`, whose naturality square
    /// at `(h1;h2) : J(f) -> J(g)` is exactly `g . h1 = h2 . f`.
    pub fn psi_transf(&self) -> NatTransf {
        let components = self.cat.objects().map(|o| self.psi(o)).collect();
        NatTransf::new(self.fst(), self.snd(), components).expect("psi has the right shape")
    }

    /// The diagonal embedding of the base: `a -> J(id_a)`, `f -> (f;f)`.
    pub fn diagonal(&self) -> Functor {
        let obj_map: Vec<ObjId> =
            self.base.objects().map(|a| self.j(self.base.identity(a))).collect();
        let arr_map = self.base.arrows().map(|f| self.diagonal_square(f)).collect();
        Functor::new(self.base.clone(), self.cat.clone(), obj_map, arr_map)
            .expect("diagonal maps are total")
    }

    /// The square `(f;f) : J(id_{dom f}) -> J(id_{cod f})`.
    pub fn diagonal_square(&self, f: ArrId) -> ArrId {
        let src = self.j(self.base.identity(self.base.dom(f)));
        let dst = self.j(self.base.identity(self.base.cod(f)));
        self.square(src, dst, f, f).expect("diagonal square always commutes")
    }

    /// The square `(id_{dom f};f) : J(id_{dom f}) -> J(f)`, the component
    /// at `J(f)` of a transformation from `diagonal . fst` to the identity.
    pub fn sigma(&self, o: ObjId) -> ArrId {
        let f = self.j_inv(o);
        let a = self.base.dom(f);
        let src = self.j(self.base.identity(a));
        self.square(src, o, self.base.identity(a), f).expect("sigma square always commutes")
    }

    /// The square `(f;id_{cod f}) : J(f) -> J(id_{cod f})`, the component
    /// at `J(f)` of a transformation from the identity to `diagonal . snd`.
    pub fn sigma_inv(&self, o: ObjId) -> ArrId {
        let f = self.j_inv(o);
        let b = self.base.cod(f);
        let dst = self.j(self.base.identity(b));
        self.square(o, dst, f, self.base.identity(b)).expect("sigma_inv square always commutes")
    }

    /// `sigma` as a natural transformation `diagonal . fst -> Id`.
    pub fn sigma_transf(&self) -> NatTransf {
        let from = compose_functors(&self.diagonal(), &self.fst()).expect("tower composable");
        let to = Functor::identity(self.cat.clone());
        let components = self.cat.objects().map(|o| self.sigma(o)).collect();
        NatTransf::new(from, to, components).expect("sigma has the right shape")
    }

    /// `sigma_inv` as a natural transformation `Id -> diagonal . snd`.
    pub fn sigma_inv_transf(&self) -> NatTransf {
        let from = Functor::identity(self.cat.clone());
        let to = compose_functors(&self.diagonal(), &self.snd()).expect("tower composable");
        let components = self.cat.objects().map(|o| self.sigma_inv(o)).collect();
        NatTransf::new(from, to, components).expect("sigma_inv has the right shape")
    }
}

/// Lazily built tower `C, arrow(C), arrow(arrow(C)), ...` with shared caps.
#[derive(Debug)]
pub struct LevelTower {
    base: Arc<FiniteCategory>,
    caps: LevelCaps,
    levels: Vec<Arc<ArrowCategory>>,
}

impl LevelTower {
    pub fn new(base: Arc<FiniteCategory>, caps: LevelCaps) -> Self {
        Self { base, caps, levels: Vec::new() }
    }

    pub fn base(&self) -> &Arc<FiniteCategory> {
        &self.base
    }

    /// The arrow category sitting at level `n` of the tower; `n = 2` is the
    /// arrow category of the base. Levels are memoized.
    pub fn level(&mut self, n: usize) -> Result<&Arc<ArrowCategory>, CommaError> {
        assert!(n >= 2, "level numbering starts at the base, which is level 1");
        while self.levels.len() < n - 1 {
            let below = match self.levels.last() {
                None => self.base.clone(),
                Some(ac) => ac.cat().clone(),
            };
            let next = build_arrow_category(&below, self.caps)?;
            self.levels.push(Arc::new(next));
        }
        Ok(&self.levels[n - 2])
    }

    /// The category at level `n`; level 1 is the base itself.
    pub fn category(&mut self, n: usize) -> Result<Arc<FiniteCategory>, CommaError> {
        if n <= 1 {
            return Ok(self.base.clone());
        }
        Ok(self.level(n)?.cat().clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::{check_functor, check_naturality};
    use crate::samples;

    fn arrow_cat(base: FiniteCategory) -> ArrowCategory {
        build_arrow_category(&Arc::new(base), LevelCaps::default()).unwrap()
    }

    #[test]
    fn interval_level_two_has_three_objects_and_six_squares() {
        let ac = arrow_cat(samples::interval2());
        assert_eq!(ac.cat().n_objects(), 3);
        assert_eq!(ac.cat().n_arrows(), 6);
    }

    #[test]
    fn interval_level_three_has_six_objects() {
        let mut tower = LevelTower::new(Arc::new(samples::interval2()), LevelCaps::default());
        assert_eq!(tower.category(3).unwrap().n_objects(), 6);
    }

    #[test]
    fn group_level_two_has_two_objects_and_eight_squares() {
        let ac = arrow_cat(samples::cyclic2());
        assert_eq!(ac.cat().n_objects(), 2);
        assert_eq!(ac.cat().n_arrows(), 8);
    }

    #[test]
    fn terminal_level_two_is_terminal() {
        let ac = arrow_cat(samples::terminal());
        assert_eq!(ac.cat().n_objects(), 1);
        assert_eq!(ac.cat().n_arrows(), 1);
    }

    #[test]
    fn projections_and_diagonal_are_functors() {
        for base in [samples::interval2(), samples::cyclic2(), samples::indiscrete2()] {
            let ac = arrow_cat(base);
            assert_eq!(check_functor(&ac.fst()), Ok(()));
            assert_eq!(check_functor(&ac.snd()), Ok(()));
            assert_eq!(check_functor(&ac.diagonal()), Ok(()));
        }
    }

    #[test]
    fn psi_sigma_and_sigma_inv_are_natural() {
        for base in [samples::interval2(), samples::cyclic2(), samples::idempotent_monoid()] {
            let ac = arrow_cat(base);
            assert_eq!(check_naturality(&ac.psi_transf()), Ok(()));
            assert_eq!(check_naturality(&ac.sigma_transf()), Ok(()));
            assert_eq!(check_naturality(&ac.sigma_inv_transf()), Ok(()));
        }
    }

    #[test]
    fn sigma_inv_after_sigma_is_the_diagonal_square() {
        for base in [samples::interval2(), samples::cyclic2(), samples::idempotent_monoid()] {
            let ac = arrow_cat(base);
            for o in ac.cat().objects() {
                let composite = ac.cat().comp(ac.sigma_inv(o), ac.sigma(o));
                assert_eq!(composite, ac.diagonal_square(ac.j_inv(o)));
            }
        }
    }

    #[test]
    fn diagonal_lands_on_identity_objects() {
        let ac = arrow_cat(samples::interval2());
        let base = ac.base().clone();
        let diag = ac.diagonal();
        for a in base.objects() {
            let o = diag.apply_obj(a);
            assert_eq!(ac.j_inv(o), base.identity(a));
        }
    }

    #[test]
    fn growing_tower_hits_the_arrow_cap() {
        let caps = LevelCaps { max_objects: 500, max_arrows: 200 };
        let mut tower = LevelTower::new(Arc::new(samples::cyclic2()), caps);
        assert!(tower.category(3).is_ok());
        let err = tower.category(4).unwrap_err();
        assert!(matches!(err, CommaError::CapExceeded { what: "arrows", .. }));
    }

    #[test]
    fn empty_base_gives_empty_level() {
        let empty = CategoryBuilder::new().build().unwrap();
        let ac = arrow_cat(empty);
        assert_eq!(ac.cat().n_objects(), 0);
        assert_eq!(ac.cat().n_arrows(), 0);
    }
}
