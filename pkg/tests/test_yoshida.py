from fractions import Fraction
import itertools
import json

import numpy as np
import pytest

from yflift import yoshida as yo
from yflift.errors import DomainError, TruncationError
from yflift.gauss import GQ

LIPSCHITZ = [(GQ(1, 0), GQ(0, 0)), (GQ(-1, 0), GQ(0, 0)), (GQ(0, 1), GQ(0, 0)), (GQ(0, -1), GQ(0, 0)),
             (GQ(0, 0), GQ(1, 0)), (GQ(0, 0), GQ(-1, 0)), (GQ(0, 0), GQ(0, 1)), (GQ(0, 0), GQ(0, -1))]


@pytest.mark.parametrize("k1,k2", [(0, 0), (1, 0), (1, 1), (2, 1)])
def test_kernel_equivariance_lipschitz_units(k1, k2):
    x1 = (GQ(1, 2), GQ(Fraction(1, 2), -1))
    x2 = (GQ(-1, 1), GQ(3, Fraction(1, 3)))
    for a, b in itertools.islice(itertools.product(LIPSCHITZ, repeat=2), 0, 64, 5):
        assert yo.equivariance_holds(k1, k2, a, b, x1, x2)


def test_known_coefficients(expansion):
    assert expansion.exact
    got = {T: expansion[T] for T in [(1, 0, 1), (1, 1, 1), (2, 1, 2), (2, 2, 2), (1, 1, 3)]}
    assert got == {(1, 0, 1): 0, (1, 1, 1): -24, (2, 1, 2): 8, (2, 2, 2): 24, (1, 1, 3): 16}


def test_gl2_covariance(expansion):
    units = [((1, 1), (0, 1)), ((0, 1), (1, 0)), ((1, 0), (1, 1)), ((-1, 0), (0, 1)), ((2, 1), (1, 1))]
    checked = 0
    for T, v in expansion.nonzero().items():
        for u in units:
            T2 = yo.gl2_action(T, u)
            if expansion.covers(T2):
                det = u[0][0] * u[1][1] - u[0][1] * u[1][0]
                assert expansion[T2] == det ** expansion.weight * v
                checked += 1
    assert checked > 100


def test_singular_indices_vanish(expansion):
    for a in range(expansion.bound + 1):
        for c in range(expansion.bound + 1):
            for b in range(-2 * expansion.bound, 2 * expansion.bound + 1):
                if b * b == 4 * a * c and expansion.covers((a, b, c)):
                    assert expansion[(a, b, c)] == 0


def test_coefficient_outside_range(expansion):
    with pytest.raises(TruncationError):
        expansion[(expansion.bound + 1, 0, 1)]


def test_single_coefficient_agrees(worked, expansion):
    for T in [(1, 1, 1), (2, 1, 3), (3, -2, 4)]:
        assert yo.fourier_coefficient(worked.fdag, T) == expansion[T]


def test_json_round_trip(expansion, tmp_path):
    path = tmp_path / "lift.json"
    expansion.dump(path)
    again = yo.SiegelFourierExpansion.load(path)
    assert again.coeffs == expansion.coeffs
    assert json.loads(path.read_text())["k1"] == 0


def test_conjugated_lattice_lift_vanishes(worked):
    Z = yo.lift_conjugated_lattice(worked.fdag, 3, 6, 12)
    assert Z.exact and not Z.nonzero()


def test_threads_do_not_change_result(worked, expansion):
    E = yo.fourier_expansion(worked.fdag, 6, threads=3)
    for T, v in E.coeffs.items():
        assert expansion[T] == v


def test_evaluation_domain(expansion):
    with pytest.raises(DomainError):
        yo.evaluate(expansion, [[1j, 0], [0, -1j]])


def test_translation_invariance(expansion):
    Z = np.array([[0.1 + 0.9j, 0.2 + 0.1j], [0.2 + 0.1j, -0.3 + 1.1j]])
    M = np.eye(4)
    M[0, 2], M[0, 3], M[1, 2] = 1, 2, 2
    a = yo.evaluate(expansion, Z)
    b = yo.siegel_slash(expansion, M, Z)
    assert abs(a.value - b.value) < 1e-9 + a.tail


def test_vector_valued_kernel_expansion_runs(worked):
    """k = (1, 0) pipeline: a nonzero vector-valued lift on the same class sets."""
    from yflift import autoforms as af
    from yflift.cli import Instance, InstanceConfig
    inst = Instance(InstanceConfig(k1=1, k2=0, N2=11, N1=11).validate())
    S = inst.space(1, 1)
    fs = af.newforms(S)
    S0 = inst.space(1, 0)
    g = af.newforms(S0)[0]
    fd = af.stabilize(fs[0], g, 11, 11, S, {(1, 1): S, (1, 0): S0})
    E = yo.fourier_expansion(fd, 4)
    assert not E.exact
    assert len(E.nonzero()) > 0
