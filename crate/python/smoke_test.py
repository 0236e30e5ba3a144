"""Smoke test for the equibench Python extension.

Build and install the module first, e.g.

    pip install maturin
    maturin develop -m crates/python/Cargo.toml

then run `python python/smoke_test.py`.
"""

import math

import equibench as eb


def main():
    relations = eb.list_relations()
    assert len(relations) == 21
    assert relations[0][0] == "line"
    assert eb.eval_relation("parabola", [0.5]) == [1.0]

    d = eb.generate("line", 500, msnr=3.0, seed=1)
    assert len(d.x) == len(d.y) == 500
    assert abs(d.achieved_ratio - 3.0) / 3.0 < 0.2

    s = eb.generate("spike", 200, ssnr=10.47, seed=1)
    assert abs(s.achieved_ratio - 10.47) < 1e-9

    eps = [yi - xi for xi, yi in zip(d.x, d.y)]
    pair = eb.make_msnr_equal_pair("line", "cubic", d.x, eps)
    assert abs(pair.achieved_ratio_1 - pair.achieved_ratio_2) < 1e-9 * pair.achieved_ratio_1

    assert set(eb.list_measures()) >= {"pcor", "mi", "mic", "hhg"}
    assert abs(eb.score("pcor", d.x, d.x) - 1.0) < 1e-12
    mi = eb.Measure("mi", k=8)
    assert "k=8" in mi.params
    assert mi.score(d.x, d.y) > 0.2

    t = eb.permutation_test(eb.Measure("dcor"), d.x, d.y, permutations=50, seed=2)
    assert t.reject and t.statistic > t.critical_value

    p = eb.estimate_power(eb.Measure("pcor"), "line", msnr=3.0, n=100, reps=30,
                          permutations=50, seed=3)
    assert p.reps_completed == 30 and 0.9 <= p.power <= 1.0

    cfg = 'seed = 4\nn = 60\nmeasures = ["pcor", "scor"]\nrelations = ["line", "sine_low"]\n[score]\nreps = 3\n'
    rows, spreads = eb.run_equitability(cfg)
    assert len(rows) == 2 * 2 * 3
    assert [m for m, *_ in spreads] == ["pcor", "scor"]
    assert all(math.isfinite(v) for _, v, _, _ in spreads)

    for bad in (lambda: eb.score("nosuch", [1.0], [1.0]),
                lambda: eb.generate("line", 10, msnr=0.5)):
        try:
            bad()
        except (KeyError, ValueError):
            pass
        else:
            raise AssertionError("expected an error")

    print("equibench smoke test passed")


if __name__ == "__main__":
    main()
