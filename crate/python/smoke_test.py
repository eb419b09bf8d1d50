"""Smoke test for the opuc_py extension module.

Build and install first:
    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/opuc_py-*.whl
"""

import json
import math

import opuc_py as op


def close(a, b, rtol=1e-12):
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def main():
    poisson = op.Measure('{"kind":"alpha_defined","generator":{"name":"poisson","r":0.5}}')
    alphas = poisson.alphas(4)
    assert close(alphas[0].real, 0.5) and all(abs(a) == 0 for a in alphas[1:])
    assert close(poisson.moments(3)[2].real, 0.25)

    zh = op.Measure('{"kind":"alpha_defined","generator":{"name":"zhedanov","p":0.5,"theta0":1.0}}')
    engine = op.BetaEngine(zh, 3, 20)
    for n in range(1, 21):
        assert close(engine.beta(1, n), engine.monic_norm(n + 1))
        assert engine.beta(3, n) <= engine.bound_3_7(3, n) * (1 + 1e-15)
    assert close(op.beta(zh, 2, 10), engine.beta(2, 10))
    assert close(op.gap_distance(zh, 0, list(range(2, 13))), engine.beta(2, 10))

    pair = op.Measure('{"kind":"atomic","atoms":[[0.0,0.5],[3.14159,0.5]]}')
    assert pair.rank == 2

    try:
        op.Measure('{"kind":"alpha_defined","generator":{"name":"zhedanov","p":1.5,"theta0":1}}')
    except ValueError as e:
        assert "out-of-range" in str(e) and "generator.p" in str(e)
    else:
        raise AssertionError("out-of-range p accepted")

    f = op.find_min_degree(op.Measure('{"kind":"alpha_defined","generator":{"name":"zhedanov","p":0.6,"theta0":1.0}}'), 1, 0.1)
    assert f is not None and f > 0
    assert op.find_min_degree(op.Measure('{"kind":"alpha_defined","generator":{"name":"lebesgue"}}'), 1, 0.1, n_max=20) is None

    assert op.lambda_intervals('{"construction":"cor43","t":2,"t_tilde":2,"c":1,"count":2,"s":null}') is not None
    assert op.floor_pow(10, 1.5) == 31

    report = json.loads(op.run_bound_table(zh, 3, 10))
    assert all(v["pass"] for v in report["verdicts"])
    report = json.loads(op.run_thm_3_3(op.Measure('{"kind":"alpha_defined","generator":{"name":"zhedanov","p":0.6,"theta0":1.0}}')))
    assert report["outcome"] == "decreasing-below-tol"
    lam = json.loads(op.run_lambda('{"construction":"thm12","s":1.5,"count":4}'))
    assert lam["rows"][0]["lo"] == 1 and math.isfinite(lam["rows"][0]["ratio"])

    print("opuc_py smoke test passed")


if __name__ == "__main__":
    main()
