import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlocal import linalg
from qlocal.errors import ValidationError
from qlocal.linalg import I2, SIGMA_X, SIGMA_Y, SIGMA_Z
from qlocal.quantum import (
    DichotomicObservable,
    MotherPovm,
    Povm,
    QuantumState,
    basis_state,
    bloch_observable,
    coarse_grain,
    difference_operator,
    sharp_to_povm,
    singlet_state,
    verify_norm_identity,
    wings_commute,
)
from qlocal.sampling import (
    random_bloch_observable,
    random_mother_povm,
    random_pure_state,
    random_two_outcome_povm,
    random_unit_vector,
    random_unitary,
)


def unsharp(eta, axis=SIGMA_Z):
    return Povm.two_outcome((I2 + eta * axis) / 2, (I2 - eta * axis) / 2)


class TestStates:
    def test_singlet_norm(self):
        assert abs(np.linalg.norm(singlet_state().vector) - 1) < 1e-15

    def test_singlet_zz(self):
        assert abs(singlet_state().expect(np.kron(SIGMA_Z, SIGMA_Z)) + 1) < 1e-15

    def test_singlet_analytic(self, rng):
        psi = singlet_state()
        for _ in range(20):
            n, m = random_unit_vector(rng), random_unit_vector(rng)
            op = np.kron(bloch_observable(n).matrix, bloch_observable(m).matrix)
            assert abs(psi.expect(op).real + n @ m) < 1e-12

    def test_unnormalized_rejected(self):
        with pytest.raises(ValidationError, match="normalized"):
            QuantumState.pure([1, 1])

    def test_mixed_validation(self):
        with pytest.raises(ValidationError, match="trace"):
            QuantumState.mixed(np.eye(2))
        with pytest.raises(ValidationError, match="semidefinite"):
            QuantumState.mixed(np.diag([1.5, -0.5]))
        with pytest.raises(ValidationError, match="Hermitian"):
            QuantumState.mixed(np.array([[0.5, 0.5], [0, 0.5]]))

    def test_immutable(self):
        psi = singlet_state()
        with pytest.raises(ValueError):
            psi.vector[0] = 1


class TestBlochObservable:
    def test_axes(self):
        np.testing.assert_array_equal(bloch_observable([0, 0, 1]).matrix, SIGMA_Z)
        np.testing.assert_array_equal(bloch_observable([1, 0, 0]).matrix, SIGMA_X)

    def test_diagonal_axis(self):
        r = 1 / np.sqrt(2)
        obs = bloch_observable([r, 0, r])
        np.testing.assert_allclose(obs.matrix, (SIGMA_X + SIGMA_Z) * r, atol=1e-15)
        np.testing.assert_allclose(linalg.eigvalsh(obs.matrix), [-1, 1], atol=1e-12)

    def test_non_unit(self):
        with pytest.raises(ValidationError, match="unit"):
            bloch_observable([1, 1, 0])

    def test_non_dichotomic_matrix(self):
        with pytest.raises(ValidationError, match="spectrum"):
            DichotomicObservable(np.diag([1, 0.5]))


class TestSharpToPovm:
    def test_sigma_z(self):
        p = sharp_to_povm(DichotomicObservable(SIGMA_Z))
        np.testing.assert_allclose(p.effect(1), np.diag([1, 0]), atol=1e-15)
        np.testing.assert_allclose(p.effect(-1), np.diag([0, 1]), atol=1e-15)

    def test_sigma_x(self):
        p = sharp_to_povm(DichotomicObservable(SIGMA_X))
        np.testing.assert_allclose(p.effect(1), (I2 + SIGMA_X) / 2, atol=1e-12)
        np.testing.assert_allclose(p.effect(-1), (I2 - SIGMA_X) / 2, atol=1e-12)

    def test_projectors(self, rng):
        for _ in range(20):
            p = sharp_to_povm(random_bloch_observable(rng))
            for _, e in p.effects:
                assert np.max(np.abs(e @ e - e)) <= 1e-9

    def test_round_trip(self, rng):
        for _ in range(20):
            obs = random_bloch_observable(rng)
            d = difference_operator(sharp_to_povm(obs))
            assert np.max(np.abs(d.matrix - obs.matrix)) <= 1e-9

    def test_raw_matrix_outside_spectrum(self):
        with pytest.raises(ValidationError):
            sharp_to_povm(np.diag([2.0, -1.0]))


class TestPovm:
    def test_sum_rule(self):
        with pytest.raises(ValidationError, match="identity"):
            Povm.two_outcome(np.diag([1, 0]), np.diag([0, 0.5]))

    def test_positivity(self):
        with pytest.raises(ValidationError, match="semidefinite"):
            Povm.two_outcome(np.diag([1.2, 0]), np.diag([-0.2, 1]))

    def test_duplicate_labels(self):
        with pytest.raises(ValidationError, match="duplicate"):
            Povm(((1, I2 / 2), (1, I2 / 2)))


class TestDifferenceOperator:
    def test_sharp(self):
        d = difference_operator(sharp_to_povm(DichotomicObservable(SIGMA_Z)))
        np.testing.assert_allclose(d.matrix, SIGMA_Z, atol=1e-15)

    def test_trivial(self):
        d = difference_operator(Povm.two_outcome(I2 / 2, I2 / 2))
        assert np.max(np.abs(d.matrix)) == 0

    def test_unsharp(self):
        d = difference_operator(unsharp(0.7))
        np.testing.assert_allclose(d.matrix, 0.7 * SIGMA_Z, atol=1e-15)
        assert abs(linalg.operator_norm(d.matrix) - 0.7) < 1e-12

    def test_wrong_labels(self):
        with pytest.raises(ValidationError, match="labelled"):
            difference_operator(Povm(((0, I2 / 2), (1, I2 / 2))))

    def test_wrong_count(self):
        with pytest.raises(ValidationError):
            difference_operator(Povm(((1, I2),)))


class TestNormIdentity:
    def test_eigenstate(self):
        r = verify_norm_identity(sharp_to_povm(DichotomicObservable(SIGMA_Z)), basis_state(0, 2))
        assert r.lhs == pytest.approx(1, abs=1e-15) and r.rhs == pytest.approx(1, abs=1e-15)
        assert abs(r.inner_product) < 1e-15

    def test_trivial(self, rng):
        r = verify_norm_identity(Povm.two_outcome(I2 / 2, I2 / 2), random_pure_state(rng, 2))
        assert abs(r.lhs) < 1e-15 and abs(r.rhs) < 1e-15

    def test_random_unsharp(self, rng):
        for _ in range(50):
            p = random_two_outcome_povm(rng, 2)
            r = verify_norm_identity(p, random_pure_state(rng, 2))
            assert abs(r.lhs - r.rhs) <= 1e-10
            assert r.lhs <= 1 + 1e-9

    def test_needs_pure(self):
        with pytest.raises(ValidationError):
            verify_norm_identity(unsharp(0.5), QuantumState.maximally_mixed(2))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_norm_identity_property(dim, seed):
    rng = np.random.default_rng(seed)
    r = verify_norm_identity(random_two_outcome_povm(rng, dim), random_pure_state(rng, dim))
    assert abs(r.lhs - r.rhs) <= 1e-10
    assert r.lhs <= 1 + 1e-9
    assert r.inner_product >= -1e-10


class TestCoarseGrain:
    def test_product_projectors(self):
        p0, p1 = np.diag([1, 0]), np.diag([0, 1])
        joint = [np.kron(a, b) for a in (p0, p1) for b in (p0, p1)]
        mother = MotherPovm(Povm(tuple(enumerate(joint))), ((0, 1), (2, 3)), ((0, 2), (1, 3)))
        pa, pb = coarse_grain(mother)
        np.testing.assert_allclose(pa.effect(1), np.kron(p0, I2))
        np.testing.assert_allclose(pa.effect(-1), np.kron(p1, I2))
        np.testing.assert_allclose(pb.effect(1), np.kron(I2, p0))
        np.testing.assert_allclose(pb.effect(-1), np.kron(I2, p1))
        np.testing.assert_allclose(difference_operator(pa).matrix, np.kron(SIGMA_Z, I2))

    def test_single_cell(self, rng):
        mother = random_mother_povm(rng, 2)
        whole = MotherPovm(mother.povm, ((0, 1, 2, 3),), ((3, 2, 1, 0),))
        pa, pb = coarse_grain(whole)
        assert len(pa.effects) == 1
        np.testing.assert_allclose(pa.effects[0][1], np.eye(2), atol=1e-9)

    def test_bad_partition(self, rng):
        mother = random_mother_povm(rng, 2)
        with pytest.raises(ValidationError, match="disjoint"):
            MotherPovm(mother.povm, ((0, 1), (1, 2, 3)), ((0,), (1, 2, 3)))
        with pytest.raises(ValidationError, match="disjoint"):
            MotherPovm(mother.povm, ((0, 1),), ((0, 1, 2, 3),))

    def test_random_marginals(self, rng):
        for _ in range(30):
            pa, pb = coarse_grain(random_mother_povm(rng, int(rng.integers(2, 4))))
            for p in (pa, pb):
                total = sum(e for _, e in p.effects)
                assert np.max(np.abs(total - np.eye(p.dim))) <= 1e-9
                for _, e in p.effects:
                    assert linalg.is_positive_semidefinite(e)

    def test_joint_without_commuting(self):
        """Two unsharp qubit POVMs along x and z from one four-outcome mother POVM."""
        eta = 0.5
        effects = []
        for sx in (1, -1):
            for sz in (1, -1):
                effects.append((len(effects), (I2 + eta * (sx * SIGMA_X + sz * SIGMA_Z)) / 4))
        mother = MotherPovm(Povm(tuple(effects)), ((0, 1), (2, 3)), ((0, 2), (1, 3)))
        pa, pb = coarse_grain(mother)
        np.testing.assert_allclose(difference_operator(pa).matrix, eta * SIGMA_X, atol=1e-15)
        np.testing.assert_allclose(difference_operator(pb).matrix, eta * SIGMA_Z, atol=1e-15)
        ok, resid = wings_commute([pa], [pb])
        assert not ok and resid > 0.1


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_coarse_grain_property(dim, n_effects, seed):
    rng = np.random.default_rng(seed)
    pa, pb = coarse_grain(random_mother_povm(rng, dim, n_effects))
    for p in (pa, pb):
        assert np.max(np.abs(sum(e for _, e in p.effects) - np.eye(dim))) <= 1e-9


class TestWingsCommute:
    def test_tensor(self, rng):
        a = [Povm.two_outcome(np.kron(e, I2), np.kron(I2 - e, I2)) for e in [(I2 + 0.3 * SIGMA_X) / 2]]
        b = [Povm.two_outcome(np.kron(I2, e), np.kron(I2, I2 - e)) for e in [(I2 + 0.8 * SIGMA_Y) / 2]]
        ok, resid = wings_commute(a, b)
        assert ok and resid <= 1e-12

    def test_same_qubit(self):
        ok, _ = wings_commute([sharp_to_povm(DichotomicObservable(SIGMA_X))],
                              [sharp_to_povm(DichotomicObservable(SIGMA_Y))])
        assert not ok

    def test_shared_eigenbasis(self, rng):
        u = random_unitary(rng, 4)
        def diag_povm():
            lam = rng.uniform(0, 1, 4)
            e = (u * lam) @ u.conj().T
            return Povm.two_outcome(e, np.eye(4) - e)
        ok, resid = wings_commute([diag_povm(), diag_povm()], [diag_povm(), diag_povm()])
        assert ok, resid
