#!/usr/bin/env python3
"""Smoke test for the catsym_py extension module.

Run `cargo build -p catsym-py` first; this script imports the cdylib
straight out of the cargo target directory (staged under a temp dir with
the module name Python expects) and exercises the public surface against
the shipped fixture files.
"""

import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "crates" / "catsym-cli" / "fixtures"

FAILURES = []
TOTAL = 0


def check(label, cond):
    global TOTAL
    TOTAL += 1
    print(f"{'ok  ' if cond else 'FAIL'} {label}")
    if not cond:
        FAILURES.append(label)


def raises(exc, fn):
    """Returns the exception message, or None if nothing was raised."""
    try:
        fn()
    except exc as e:
        return str(e)
    return None


def load_module():
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("debug", "release")
        for name in ("libcatsym_py.so", "libcatsym_py.dylib", "catsym_py.dll")
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit("extension not built; run `cargo build -p catsym-py` first")
    newest = max(built, key=lambda p: p.stat().st_mtime)
    stage = Path(tempfile.mkdtemp(prefix="catsym-py-"))
    suffix = ".pyd" if newest.suffix == ".dll" else ".so"
    shutil.copy2(newest, stage / f"catsym_py{suffix}")
    sys.path.insert(0, str(stage))
    import catsym_py

    return catsym_py


def main():
    mod = load_module()
    print(f"loaded {mod.__file__}\n")

    g2 = mod.Category.parse((FIXTURES / "group2.cat").read_text())
    check("group2 parses to one object and two arrows", (g2.n_objects, g2.n_arrows) == (1, 2))
    check("group2 arrow names", set(g2.arrows()) == {"id_x", "g"})
    check("group2 generator squares to the identity", g2.compose("g", "g") == "id_x")
    check("group2 endpoints", g2.dom("g") == "x" and g2.cod("g") == "x")
    check("group2 identity lookup", g2.identity("x") == "id_x")
    check("group2 generator is invertible", g2.is_iso("g"))
    check("group2 has no non-invertible arrow", g2.first_non_invertible() is None)
    check("unknown arrow raises KeyError", raises(KeyError, lambda: g2.dom("nope")) is not None)

    check("group2 carries a declared duality", g2.has_declared_duality())
    d = g2.duality()
    check("duality value of the generator", d.btop("g") == "x")
    check("duality star table", d.star("x", "x") == "x")
    check("duality representability witness", d.iso("x") == "id_x")
    check("declared duality is coherent", d.is_coherent())
    check("duality prints its sections", "psc.btop: g -> x" in d.sections())

    v = g2.classify()
    check("group2 passes every layer", all(v[k] == "PASS" for k in ("psc", "cocc", "sec", "imc")))
    check("group2 summary", v["summary"] == "PSC+ CoCC+ SEC+ IMC+")

    check("endofunctor fixes the object", g2.apply_e("x") == "x")
    check("endofunctor fixes the generator", g2.apply_e("g", n=5) == "g")
    points, cycle = g2.orbit("x", depth=3)
    check("object orbit is constant", all(p == "x" for p in points) and cycle == (0, 1))

    lvl = g2.level(2)
    check("group2 level 2 counts", (lvl.n_objects, lvl.n_arrows) == (2, 8))

    roundtrip = mod.Category.parse(g2.to_text())
    check(
        "printing then parsing preserves the category",
        (roundtrip.n_objects, roundtrip.n_arrows) == (1, 2) and roundtrip.has_declared_duality(),
    )

    iv = mod.Category.parse((FIXTURES / "interval2.cat").read_text())
    check("interval parses to two objects and three arrows", (iv.n_objects, iv.n_arrows) == (2, 3))
    check("interval admits no duality", iv.duality() is None)
    vi = iv.classify()
    check("interval fails the duality layer", vi["psc"].startswith("FAIL"))
    check("interval upper layers are absent", vi["cocc"] == "ABSENT" and vi["imc"] == "ABSENT")
    check("interval summary", vi["summary"] == "PSC- CoCC- SEC- IMC-")
    msg = raises(ValueError, lambda: iv.apply_e("f"))
    check("apply_e without a duality reports the absence", msg is not None and "NoPscStructure" in msg)
    check("interval level 2 counts", (iv.level(2).n_objects, iv.level(2).n_arrows) == (3, 6))
    check("interval level 3 object count", iv.level(3).n_objects == 6)

    check(
        "malformed input raises ValueError",
        raises(ValueError, lambda: mod.Category.parse("objects: a\narrow: f : a -> zzz\n"))
        is not None,
    )

    claim_keys = (
        "hom_law",
        "representability",
        "te_functoriality",
        "te_naturality",
        "sec_identity",
        "rho_naturality",
        "imc_refuted",
    )
    r1 = mod.set_claims(1)
    check("ground 1 claims all verify", all(r1[k].startswith("verified") for k in claim_keys))
    check("ground 1 all_verified flag", r1["all_verified"] == "true")
    r2 = mod.set_claims(2, samples=100, seed=3)
    check("ground 2 sampled claims all verify", r2["all_verified"] == "true")

    print()
    if FAILURES:
        print(f"{len(FAILURES)} of {TOTAL} checks failed")
        return 1
    print(f"all {TOTAL} checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
