"""Smoke test for the pyweldlab extension.

Build first with `cargo build -p weldlab-py --release` (or without
--release), or install the module with maturin from crates/py.
"""

import importlib
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    try:
        return importlib.import_module("pyweldlab")
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = os.path.join(ROOT, "target", profile, "libpyweldlab.so")
        if os.path.exists(lib):
            tmp = tempfile.mkdtemp()
            shutil.copy(lib, os.path.join(tmp, "pyweldlab.so"))
            sys.path.insert(0, tmp)
            return importlib.import_module("pyweldlab")
    sys.exit("pyweldlab not built; run `cargo build -p weldlab-py` first")


def main():
    wl = load()

    g = wl.Graph.sample(3, "g1", seed=7)
    assert g.n == 812 and len(g) == 812 and g.k == 3, g
    assert g.is_bipartite()
    census = g.census()
    assert (census["roots"], census["weld"], census["antenna"]) == (28, 224, 392)

    again = wl.Graph.from_text(g.to_text())
    assert again.n == g.n and again.weld_flags() is None

    bits, queries = g.mark(seed=1)
    assert bits == g.weld_flags() and queries > 0

    v = g.final_test("quantum", eps=0.1, seed=3)
    assert v["accept"], v

    bad = wl.Graph.sample(4, "g2", seed=3)
    assert not bad.is_bipartite()
    v = bad.final_test("parity", seed=3)
    assert not v["accept"] and v["reason"], v

    s = wl.walk_schedule(4)
    assert s["p_star"] >= 1 / 8, s
    rows = wl.walk_sweep(2, 1.0, 0.5)
    assert len(rows) == 3 and rows[0] == (0.0, 1.0, 0.0)

    game = wl.play_game("C", 8, 4, trials=200, seed=1)
    assert 0.0 <= game["win_prob"] <= 1.0
    d = wl.distinguish(6, 2, trials=50, strategy="constant")
    assert d["advantage"] == 0.0

    try:
        wl.Graph.sample(3, "g3")
    except ValueError:
        pass
    else:
        raise AssertionError("bad variant accepted")

    print("pyweldlab smoke test ok:", g, wl.walk_schedule(3)["modeled_queries"], "modeled queries at k=3")


if __name__ == "__main__":
    main()
