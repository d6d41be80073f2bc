import json

import pytest

from tsspic import surfaces
from tsspic.model import parse_tss, surface_to_dict

SHIPPED = ["sphere-equator", "cyl1", "cyl2", "torus-2-parallel", "torus-2k-parallel", "genus2-separating"]


def doc(closed, leaves, curves):
    """Build a TSS JSON string from terse tuples.

    leaves: (id, genus, sign, volume[, free_boundary]); curves: (id, period, neg, pos)
    """
    out = {"closed": closed, "leaves": [], "curves": []}
    for lf in leaves:
        d = {"id": lf[0], "genus": lf[1], "sign": lf[2], "volume": lf[3]}
        if len(lf) > 4:
            d["free_boundary"] = lf[4]
        out["leaves"].append(d)
    for c in curves:
        out["curves"].append({"id": c[0], "period": c[1], "neg": c[2], "pos": c[3]})
    return json.dumps(out)


def cyl1(period="1", vols=("-1", "1")):
    return parse_tss(doc(False, [("A", 0, "-", vols[0], 1), ("B", 0, "+", vols[1], 1)],
                         [("Z", period, "A", "B")]))


def relabel(s, prefix="x"):
    """Same surface with every id renamed and the lists reversed."""
    d = surface_to_dict(s)
    ren = {lf["id"]: prefix + lf["id"] for lf in d["leaves"]}
    for lf in d["leaves"]:
        lf["id"] = ren[lf["id"]]
    for c in d["curves"]:
        c["id"] = prefix + c["id"]
        c["neg"], c["pos"] = ren[c["neg"]], ren[c["pos"]]
    d["leaves"].reverse()
    d["curves"].reverse()
    return parse_tss(json.dumps(d))


@pytest.fixture(params=SHIPPED)
def shipped(request):
    return surfaces.shipped_example(request.param)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
