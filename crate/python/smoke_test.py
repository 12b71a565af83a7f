"""Smoke test for the pybeurling extension.

Build and install first:  pip install --no-build-isolation -e crates/python
"""

import math

import pybeurling as pb


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    w = pb.Weight.power(0.5)
    close(w.value(3), 2.0, 1e-15)
    assert pb.Weight.from_json(w.to_json()).value(-8) == w.value(8)

    f = pb.Series.alpha_minus(1) * pb.Series.polynomial([1, 2j, -1])
    close(abs(f.eval(1)), 0.0, 1e-15)
    g = f.divide_by_root(1)
    assert g.max_coeff_diff(pb.Series({0: 1, 1: 2j, 2: -1})) < 1e-14
    try:
        pb.Series.polynomial([1, 1]).divide_by_root(1)
    except ValueError:
        pass
    else:
        raise AssertionError("division by a non-root must fail")

    value, tail = pb.CircleSet([0.0]).carleson_integral()
    close(value, 2.0, 1e-12)
    assert tail == 0.0

    atw = pb.CircleSet([0.0]).atw_check()
    close(atw["c1"], 1.0, 0.05)

    assert pb.tail_bound(0.0, 3, 0.5) >= 0.5**3 / 0.5
    v, _ = pb.en_monomial_norm(64, 5, w)
    assert v <= 3 * w.value(5)

    seq = pb.ditkin_sequence(pb.Series.alpha_minus(1).pow(2), pb.Weight.power(1.0), 1.0, [1, 16, 256])
    assert seq[-1]["norm"]["value"] < seq[0]["norm"]["value"] / 100

    gens = [pb.Series.alpha_minus(1).pow(2) * pb.Series.alpha_minus(-1)]
    h0, h1 = pb.hull(gens, 0), pb.hull(gens, 1)
    assert len(h0) == 2 and len(h1) == 1
    assert pb.jet_membership(gens[0], [h0, h1], 1.0)["pass"]

    for taylor, direct in pb.inner_eval([(0.0, 0.2)], 200, [0.3, 0.5j, -0.7 + 0.1j]):
        close(taylor, direct, 1e-10)

    rank, norms, overflow = pb.model_power_norms([(0.0, 2 * math.pi * 0.01)], 96, 120)
    assert overflow is None and rank > 0
    assert pb.growth_fit(norms)["verdict"] == "subexp_sqrt"

    q = pb.quotient_inverse_norms(pb.CircleSet([0.0]), 0.0, 20)
    assert all(abs(r["estimate"] - 1.0) < 1e-9 for r in q["rows"])
    c = pb.interpolation_constant(pb.CircleSet([0.0, math.pi]), 0.0, 0.0, 200)
    assert not c["diverging"]

    try:
        pb.CircleSet([1.0, 1.0])
    except ValueError:
        pass
    else:
        raise AssertionError("repeated points must be rejected")

    print("pybeurling smoke test passed")


if __name__ == "__main__":
    main()
