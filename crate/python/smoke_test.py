"""Smoke test of the Python bindings: build with

    pip install --no-build-isolation ./crates/py

then run ``python python/smoke_test.py`` (or ``pytest python``).
"""

import math

import laxforge


def test_symmetric_state():
    s = laxforge.ParticleState(0.0, [1, -1], [0, 0], 1)
    assert s.coulomb_sums() == [0.5, -0.5]
    assert all(abs(c) < 1e-12 for c in s.first_integrals())
    _, pdot, udot = s.rates()
    assert pdot == [0.5, -0.5] and udot == -1
    _, b1 = s.governing_fields(0.0)
    assert abs(b1 - 0.25) < 1e-12
    pair = laxforge.build_lax(s)
    assert [c.real for c in pair["Lplus"]] == [-1.0, 0.0, 1.0]
    assert [c.real for c in pair["Bd"]] == [-1.0]
    assert pair["degree_audit"]


def test_trajectory_identities():
    s = laxforge.init_state(3, [complex(-1.2, 0.4), complex(0, -0.8), complex(1.2, 0.4)])
    tr = laxforge.integrate(s, 1.0)
    assert len(tr) > 2 and tr.times[-1] == 1.0
    assert tr.max_first_integral_drift() < 1e-8
    assert tr.compatibility(20) < 1e-7
    res = tr.check_identities(nt=10, nx=10)
    assert res["conservation_law"] < 1e-6 and res["second_governing"] < 1e-6
    assert res["constraint_diagonal"] < 1e-8
    assert max(v for k, v in res.items() if k.startswith("zero_curvature")) < 1e-6


def test_hastings_mcleod():
    hm = laxforge.solve_hastings_mcleod()
    q, qp, _, _ = hm(0.0)
    assert abs(q - 0.3670615515480784) < 1e-8
    assert abs(hm(4.0)[0] / laxforge.airy_ai(4.0) - 1) < 1e-3
    assert abs(hm(-6.0)[0] / math.sqrt(3) - 1) < 1e-2
    assert hm.invariants()["ode_residual"] < 1e-8
    s = hm.particles(1, 0.0)
    assert abs(s.q[0] + qp / q) < 1e-12


def test_errors():
    try:
        laxforge.ParticleState(0.0, [1, 1], [0, 0], 0)
    except laxforge.LaxforgeError:
        pass
    else:
        raise AssertionError("collision not reported")


if __name__ == "__main__":
    for name, f in list(globals().items()):
        if name.startswith("test_"):
            f()
            print(f"{name}: ok")
