#!/usr/bin/env python3
"""Smoke test for the detbell_py extension module.

Builds nothing itself: it locates the compiled cdylib under target/
(release preferred), copies it next to a temp dir under the importable
name, and exercises the main surface. Build first with:

    cargo build -p detbell-py --release
"""

import json
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def locate_extension():
    candidates = []
    for profile in ("release", "debug"):
        for stem in ("libdetbell_py.so", "detbell_py.so", "libdetbell_py.dylib", "detbell_py.pyd"):
            p = ROOT / "target" / profile / stem
            if p.exists():
                candidates.append(p)
    if not candidates:
        sys.exit("extension not built; run: cargo build -p detbell-py [--release]")
    return candidates[0]


def main():
    src = locate_extension()
    tmp = pathlib.Path(tempfile.mkdtemp(prefix="detbell-py-"))
    shutil.copy(src, tmp / "detbell_py.so")
    sys.path.insert(0, str(tmp))
    import detbell_py as db

    # counting functions return exact Python ints
    assert [db.bell(n) for n in range(10)] == [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147]
    assert db.bell_nk(4, 1) == 11 and db.bell_nk(4, 2) == 3
    assert db.stirling2(4, 2) == 7
    assert db.opp_count(3) == 26
    assert db.term_count("main", 4) == 15
    assert db.term_count("char2", 5, 2) == 2**5 - 5
    assert db.bell(30) == 846749014511809332450147  # arbitrary precision survives the boundary

    # exact matrices and every formula
    m = db.Matrix([["5", "-2"], ["-1", "3"]], "Z")
    assert m.n == 2 and m.domain == "Z"
    assert m.det() == "13"
    assert m.det("main") == "13"
    assert m.det("intree") == "13"
    assert m.per("ryser") == "17"
    assert m.per("glynn") == "17"
    comparison = m.compare()
    assert all(agrees for (_, agrees) in comparison.values()), comparison

    q = db.Matrix([["1/2", "1/3"], ["1", "2"]], "Q")
    assert q.det() == "2/3"

    f2 = db.Matrix.parse("2 F2\n1 1\n0 1\n")
    assert f2.det("char2") == "1"

    # decomposition round trip through the JSON interchange format
    doc = db.decompose_json("char2", 4, "F2")
    parsed = json.loads(doc)
    assert len(parsed["terms"]) == 12
    valid, witness = db.verify_decomposition(doc)
    assert valid and witness is None
    parsed["terms"][0]["coeff"] = "0"
    try:
        db.verify_decomposition(json.dumps(parsed))
        raise AssertionError("zero coefficient must be rejected")
    except ValueError:
        pass

    # rank bounds and flattenings
    assert db.lower_bound_general(4) == 7
    assert [db.lower_bound_fq(4, q) for q in (2, 3, 4, 5)] == [9, 8, 8, 7]
    assert db.flattening_rank(4, 2, "F2") == 6
    assert db.flattening_rank(4, 2, "Q") == 6

    # Waring decomposition over Q
    count, valid = db.waring_summary(3)
    assert count == 20 and valid

    # tiling volume equals the determinant
    volume, vertices, edges = m.tile_report()
    assert (volume, vertices, edges) == ("13", 6, 6)

    # the GF(2) search machinery at toy size, plus the 11-tuple filters
    result = db.search_f2(3)
    assert result["outcome"] == "no_solution"
    fixture = json.loads(
        (ROOT / "crates" / "detbell" / "tests" / "data" / "candidate_11_tuple.json").read_text()
    )["matrices"]
    assert db.lemma_filter_check(fixture)
    assert db.pair_contraction_check(fixture) == 11

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
