//! Small ready-made categories used throughout the tests, the command-line
//! fixtures, and the documentation examples.
//!
//! Identities are allocated before the other arrows, so identity arrows sit
//! at the low ids and tie-breaking scans visit them first.

use crate::cat::{CategoryBuilder, FiniteCategory};

/// One object, one (identity) arrow.
pub fn terminal() -> FiniteCategory {
    let mut b = CategoryBuilder::new();
    b.object("star");
    b.auto_identities();
    b.infer_identity_composites();
    b.build().expect("terminal category is valid")
}

/// `n` objects with only their identity arrows.
pub fn discrete(n: usize) -> FiniteCategory {
    let mut b = CategoryBuilder::new();
    for i in 0..n {
        b.object(&format!("d{i}"));
    }
    b.auto_identities();
    b.infer_identity_composites();
    b.build().expect("discrete category is valid")
}

/// Two objects `a`, `b` and a single non-identity arrow `f : a -> b`.
pub fn interval2() -> FiniteCategory {
    let mut b = CategoryBuilder::new();
    let a = b.object("a");
    let bb = b.object("b");
    b.auto_identities();
    b.arrow("f", a, bb);
    b.infer_identity_composites();
    b.build().expect("interval category is valid")
}

/// Two objects with exactly one arrow in each direction; both objects are
/// isomorphic, so the skeleton is the terminal category.
pub fn indiscrete2() -> FiniteCategory {
    let mut b = CategoryBuilder::new();
    let a = b.object("a");
    let bb = b.object("b");
    b.auto_identities();
    let u = b.arrow("u", a, bb);
    let v = b.arrow("v", bb, a);
    b.infer_identity_composites();
    b.composite(v, u, b.identity_of(a));
    b.composite(u, v, b.identity_of(bb));
    b.build().expect("indiscrete category is valid")
}

/// The order-two group as a one-object category: arrows `id_x` and `g` with
/// `g . g = id_x`. Every arrow is invertible.
pub fn cyclic2() -> FiniteCategory {
    let mut b = CategoryBuilder::new();
    let x = b.object("x");
    b.auto_identities();
    let g = b.arrow("g", x, x);
    b.infer_identity_composites();
    b.composite(g, g, b.identity_of(x));
    b.build().expect("order-two group is valid")
}

/// One object, arrows `id_x` and `m` with `m . m = m`. The non-identity
/// arrow is not invertible.
pub fn idempotent_monoid() -> FiniteCategory {
    let mut b = CategoryBuilder::new();
    let x = b.object("x");
    b.auto_identities();
    let m = b.arrow("m", x, x);
    b.infer_identity_composites();
    b.composite(m, m, m);
    b.build().expect("idempotent monoid is valid")
}
