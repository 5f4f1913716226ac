import json
import os
import sys

import forge

fixtures = os.environ["FORGE_FIXTURES"]


def load(name):
    with open(os.path.join(fixtures, name)) as f:
        return json.load(f)


def main():
    model = load("p2_model.json")
    seed = load("p2_seed_n1.json")

    table = forge.qc_reconstruct(model, seed, beta_cap=[3])
    values = {(tuple(e["beta"]), e["insertions"].get("T2", 0)): e["value"] for e in table}
    assert values[((1,), 2)] == "1"
    assert values[((2,), 5)] == "1"
    assert values[((3,), 8)] == "12"

    phi = forge.qc_potential(model, table, beta_cap=[3])
    assert all(c["pass"] for c in forge.qc_wdvv(model, phi))
    assert all(c["pass"] for c in forge.qc_euler(model, phi))

    fts = forge.qc_to_fts(model, phi)
    rep = forge.check_fts(fts)
    assert all(c["pass"] for c in rep["conditions"])
    assert rep["hypotheses"]["GC"] and rep["hypotheses"]["IC"] and rep["hypotheses"]["EC"]

    pmhs = load("pmhs_rank4.json")
    weight = forge.hodge_weight(pmhs)
    assert len(weight["6"]) == 4  # top step is everything
    assert all(c["pass"] for c in forge.hodge_pmhs(pmhs))
    assert forge.hodge_cone(pmhs, [[1], [3]])

    out = forge.vphs_to_frobenius(pmhs, order=3)
    assert out["h2_generated"]
    assert all(c["pass"] for c in out["axioms"])
    assert out["germ"]["dim"] == 4

    germ = forge.universal_unfold(load("fts_rank2.json"), order=3)
    assert germ["germ"]["dim"] == 2
    assert all(c["pass"] for c in germ["axioms"])

    try:
        forge.qc_reconstruct(model, [], beta_cap=[2])
    except forge.ForgeError:
        pass
    else:
        raise AssertionError("expected ForgeError for an empty seed")

    print("python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
