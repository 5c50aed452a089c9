"""Smoke test for the midscale extension module.

    pip install --no-build-isolation -e crates/midscale-py
    python python/smoke_test.py
"""

import json
import math
from fractions import Fraction

import midscale


def check_matrix():
    m = midscale.SymmetricMatrix.from_rows([[2.0, 1.0], [1.0, 3.0]])
    assert m.dim == 2
    assert m.upper == [2.0, 1.0, 3.0]
    assert m.to_rows() == [[2.0, 1.0], [1.0, 3.0]]
    assert math.isclose(m.trace_power(2), 4 + 9 + 2)
    ev = m.eigenvalues()
    assert math.isclose(sum(ev), 5.0) and ev[0] >= ev[1]
    try:
        midscale.SymmetricMatrix(2, [1.0])
    except ValueError:
        pass
    else:
        raise AssertionError("bad length accepted")


def check_samplers():
    z = midscale.sample_goe(4, 7)
    assert z.dim == 4
    assert z.upper == midscale.sample_goe(4, 7).upper
    y = midscale.sample_wishart(50, 3, 7)
    x = midscale.normalize_wishart(y, 50)
    assert math.isclose(x.upper[0], math.sqrt(50) * (y.upper[0] - 1.0))


def check_moments():
    m = midscale.moment(1)
    assert m["validity"] == "n >= p + 22"
    text, value = midscale.moment_value(1, 100, 5)
    assert Fraction(text) == Fraction(7075, 3496)
    assert math.isclose(value, 7075 / 3496)
    try:
        midscale.moment(9)
    except ValueError:
        pass
    else:
        raise AssertionError("capacity not enforced")
    parts = midscale.enumerate_partitions(4)
    assert len(parts) == 5 and [4] in parts
    dump = json.loads(midscale.zonal_dump_json(2))
    assert dump["partitions"] == [[2], [1, 1]]
    inv = midscale.expected_powersum_inv_wishart([1])
    assert "display" in inv


def check_gtransform():
    g = midscale.GApprox(1000, 3, 0)
    assert math.isclose(g.classifier(), 3**3 / 1000)
    t = midscale.SymmetricMatrix.identity(3).scale(0.1)
    lm, ph = midscale.log_psi_k(t, g)
    assert math.isfinite(lm) and math.isfinite(ph)
    lm, ph = midscale.log_psi_nw(t, 1000)
    assert math.isfinite(lm)
    assert math.isfinite(midscale.log_cnp_exact(1000, 3))

    cfg = midscale.McmcConfig(n_chains=4, burn_in=300, kernel="spectral", seed=11)
    h = midscale.estimate_hellinger_sq(g, 2000, cfg)
    assert 0.0 <= h.mean < 0.05 and h.stderr > 0 and h.n_samples >= 2000
    kl = midscale.estimate_kl_bound(g, 2000, cfg)
    assert abs(kl["l1_norm"].mean - 1.0) < 0.05
    f = midscale.fk_unnormalized(midscale.SymmetricMatrix.identity(1).scale(0.0),
                                 midscale.GApprox(100, 1, 0), 2000)
    assert f.mean > 0
    chains = midscale.sample_symmetric_t(200, 2, cfg, 5)
    assert len(chains) == 4 and all(len(c) == 5 for c in chains)


def check_cli():
    out = midscale.run_cli(["moments", "--k", "1", "--eval", "100,5"])
    lines = out.splitlines()
    assert lines[0].startswith("kind,k,exact,")
    assert lines[1].endswith(",7075/3496,2.0237414187643021e0")
    try:
        midscale.run_cli(["moments", "--k", "9"])
    except ValueError as e:
        assert "capacity" in str(e)
    else:
        raise AssertionError("expected ValueError")
    assert "[mcmc]" in midscale.DEFAULTS_TOML


if __name__ == "__main__":
    for check in (check_matrix, check_samplers, check_moments, check_gtransform, check_cli):
        check()
        print(f"{check.__name__}: ok")
