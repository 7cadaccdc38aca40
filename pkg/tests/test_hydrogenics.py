import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from rydtriad.errors import AccuracyError, CapacityError, ConfigurationError
from rydtriad.hydrogenics import (EnergyModel, OrbitalState, energy_level, laguerre_coefficients,
                                  laguerre_eval, radial_integral_closed, radial_integral_quadrature,
                                  radial_moment_quadrature, radial_wavefunction)


def sympy_messiah(p, k):
    """Coefficients of (p+k)! L_p^{(k)}(x), the Messiah-normalized Laguerre polynomial."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(sympy.factorial(p + k) * sympy.assoc_laguerre(p, k, x), x)
    return [int(c) for c in reversed(poly.all_coeffs())]


@pytest.mark.parametrize("p,k", [(0, 0), (1, 1), (3, 2), (5, 7), (10, 3), (17, 21), (40, 1)])
def test_laguerre_matches_sympy(p, k):
    assert list(laguerre_coefficients(p, k)) == sympy_messiah(p, k)


def test_laguerre_eval_exact_small():
    # L_1^1(x) = 4 - 2x in Messiah's normalization
    assert laguerre_eval(1, 1, 0.5) == 3.0
    c = sympy_messiah(6, 3)
    x = Fraction(0.37)
    assert laguerre_eval(6, 3, 0.37) == float(sum(cs * x**s for s, cs in enumerate(c)))


def test_laguerre_capacity():
    laguerre_coefficients(150, 50)
    with pytest.raises(CapacityError):
        laguerre_coefficients(150, 51)


def test_orbital_validation():
    with pytest.raises(ValueError):
        OrbitalState(3, 3)
    with pytest.raises(ValueError):
        OrbitalState(3, 1, 2)
    assert OrbitalState(42, 2, -1).label == "42d(m=-1)"


def test_ground_state_wavefunction():
    r = np.array([0.0, 0.3, 1.0, 4.0])
    assert np.allclose(radial_wavefunction((1, 0), r), 2 * np.exp(-r), rtol=1e-14)
    # 2p: (1/sqrt(24)) r e^{-r/2}
    assert math.isclose(radial_wavefunction((2, 1), 1.7), 1.7 * math.exp(-0.85) / math.sqrt(24), rel_tol=1e-14)


def test_scalar_and_array_agree():
    r = np.linspace(0.0, 200.0, 7)
    arr = radial_wavefunction((9, 4), r)
    assert arr.shape == r.shape
    assert all(radial_wavefunction((9, 4), float(x)) == v for x, v in zip(r, arr))


def _sample_nl(nmax=60):
    out = []
    for n in (1, 2, 3, 5, 8, 13, 21, 30, 42, 51, 60):
        if n > nmax:
            continue
        for l in sorted({l for l in (0, 1, 2, n // 2, n - 1) if l < n}):
            out.append((n, l))
    return out


@pytest.mark.parametrize("n,l", _sample_nl())
def test_normalization(n, l):
    assert abs(radial_moment_quadrature((n, l), (n, l), power=2) - 1.0) <= 1e-10


@pytest.mark.parametrize("a,b", [((5, 1), (7, 1)), ((30, 0), (31, 0)), ((42, 2), (44, 2)), ((12, 5), (40, 5))])
def test_orthogonality(a, b):
    assert abs(radial_moment_quadrature(a, b, power=2)) <= 1e-9


@pytest.mark.parametrize("n,l", [(1, 0), (4, 2), (20, 1), (42, 0), (42, 2)])
def test_mean_radius(n, l):
    expected = 0.5 * (3 * n * n - l * (l + 1))
    assert math.isclose(radial_moment_quadrature((n, l), (n, l), power=3), expected, rel_tol=1e-10)


def test_known_small_integrals():
    # <1s| r |2p> radial factor: 2^7 sqrt(6) / 3^5 * ... ; compare with the textbook 1.29026
    assert math.isclose(radial_integral_closed(1, 0, 2, 1).value, 128 * math.sqrt(6) / 243, rel_tol=1e-14)
    # <n l | r | n l+1> diagonal-in-n value: -3/2 n sqrt(n^2 - (l+1)^2)
    for n, l in [(5, 0), (42, 0), (42, 1), (60, 3)]:
        assert math.isclose(abs(radial_integral_closed(n, l, n, l + 1).value),
                            1.5 * n * math.sqrt(n * n - (l + 1) ** 2), rel_tol=1e-12)


def test_closed_vs_quadrature_seeded():
    rng = np.random.default_rng(7)
    done = 0
    while done < 100:
        n, n2 = rng.integers(1, 51, size=2)
        l = int(rng.integers(0, n))
        l2 = l + int(rng.choice([-1, 1]))
        if not 0 <= l2 < n2:
            continue
        c = radial_integral_closed(int(n), l, int(n2), l2).value
        q = radial_integral_quadrature(int(n), l, int(n2), l2).value
        scale = max(abs(c), 1e-300)
        assert abs(c - q) <= 1e-9 * scale, (n, l, n2, l2, c, q)
        done += 1


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 60), st.integers(1, 60), st.data())
def test_symmetry(n, n2, data):
    l = data.draw(st.integers(0, n - 1))
    l2 = data.draw(st.integers(0, n2 - 1))
    assert radial_integral_closed(n, l, n2, l2).value == radial_integral_closed(n2, l2, n, l).value


@pytest.mark.parametrize("Z", [2.0, 3.0, 37.0])
def test_z_scaling(Z):
    base = radial_integral_closed(6, 1, 8, 2).value
    ri = radial_integral_closed(6, 1, 8, 2, Z=Z)
    assert ri.value == base
    assert math.isclose(ri.bohr, base / Z, rel_tol=1e-15)
    q = radial_moment_quadrature((6, 1), (8, 2), Z=Z)
    assert math.isclose(q, base / Z, rel_tol=1e-9)


def test_closed_form_bit_budget():
    with pytest.raises(CapacityError):
        radial_integral_closed(60, 0, 60, 1, max_bits=256)


def test_quadrature_accuracy_error():
    with pytest.raises(AccuracyError) as exc:
        radial_moment_quadrature((40, 0), (41, 1), order=4, max_refine=0)
    assert exc.value.estimate > 0


def test_energy_models():
    h = EnergyModel.hydrogenic()
    assert energy_level(42, 0, h) == energy_level(42, 3, h) == -0.5 / 42**2
    rb = EnergyModel.rubidium()
    assert math.isclose(rb.effective_n(42, 0), 42 - 3.1311804)
    assert energy_level(42, 1, rb) < energy_level(42, 2, rb) < energy_level(42, 3, rb)
    partial = EnergyModel.quantum_defect({0: 3.13})
    with pytest.raises(ConfigurationError):
        energy_level(42, 1, partial)
    assert EnergyModel.from_dict(rb.to_dict()) == rb
