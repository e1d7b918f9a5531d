import json
import math

import pytest

import doi


def test_version():
    assert doi.__version__ == "0.1.0"


def test_network_and_pagerank():
    g = doi.Network(3, [(0, 1, 1.0), (1, 2, 1.0)])
    assert len(g) == 3
    assert g.degree(1) == 2
    pr = doi.pagerank(g)
    assert math.isclose(sum(pr), 1.0, abs_tol=1e-10)
    assert pr[1] > pr[0]
    assert pr[0] == pytest.approx(pr[2])


def test_generators_are_seeded():
    a = doi.erdos_renyi(100, 0.05, 3)
    b = doi.erdos_renyi(100, 0.05, 3)
    assert a.edges() == b.edges()
    assert len(doi.barabasi_albert(50, 5, 2, 1)) == 50


def test_inverse_distance():
    g = doi.inverse_distance_network([0.5, 1.0], 0.5)
    assert g.weight(0, 1) == pytest.approx(2.0)


def test_ht_enumeration_small():
    # Two units without interference: HT is unbiased over the four assignments.
    y1, y0 = [3.0, 5.0], [1.0, 2.0]
    total = 0.0
    for z in ([0, 0], [0, 1], [1, 0], [1, 1]):
        y = [y1[i] if z[i] else y0[i] for i in range(2)]
        total += 0.25 * doi.ht_e_ate(y, [float(v) for v in z], 0.5)["estimate"]
    assert total == pytest.approx(2.5)


def test_summarize():
    s = doi.summarize([1.0, 2.0, 3.0, 4.0])
    assert s["mean"] == 2.5
    assert s["q2.5"] == pytest.approx(1.075)
    assert s["q97.5"] == pytest.approx(3.925)


def test_simulate_scenario_one():
    d = doi.simulate(1, doi.erdos_renyi(60, 0.05, 1), seed=2)
    assert d["x"].shape == (60, 2)
    assert len(d["y"]) == 60
    assert d["e_ate"] == pytest.approx(5.0)


def test_fit_and_run(tmp_path):
    net = doi.erdos_renyi(80, 0.04, 5)
    d = doi.simulate(1, net, seed=6)
    with open(tmp_path / "data.csv", "w") as f:
        f.write("unit_id,stratum,treatment,outcome,x1,x2\n")
        for i in range(80):
            f.write(f"{i},0,{d['z'][i]:g},{float(d['y'][i])!r},1,{float(d['x'][i, 1])!r}\n")
    with open(tmp_path / "edges.csv", "w") as f:
        f.write("src,dst,w\n")
        for i, j, w in net.edges():
            f.write(f"{i},{j},{w}\n")
    cfg = {
        "command": "fit",
        "seed": 3,
        "out": "res",
        "data": {"path": "data.csv", "edges": "edges.csv"},
        "chain": {"burn_in": 50, "keep": 50},
    }
    res = doi.fit(cfg, str(tmp_path))
    assert set(res) == {"e_ate", "e_ase"}
    assert len(res["e_ate"]["draws"]) == 50
    assert res["e_ate"]["q2.5"] <= res["e_ate"]["q97.5"]
    doi.run(json.dumps(cfg), str(tmp_path))
    assert (tmp_path / "res" / "summary.csv").exists()


def test_config_errors_raise():
    with pytest.raises(ValueError, match="priors.beta_var"):
        doi.fit({"command": "fit", "seed": 1, "data": {"path": "x.csv"}, "priors": {"beta_var": -1}})
