import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fockquant.bosonization import (
    FermionVector,
    GrassmannPoly,
    _embedding,
    bosonize,
    car_residual,
    conjugate_operator,
    debosonize,
    fermion_basis,
    fermion_inner,
    grassmann_derivative,
    grassmann_ladder,
    hard_core_indices,
    is_hard_core,
    jordan_wigner_ladder,
    permutation_sign,
    super_ccr_residual,
)
from fockquant.errors import DimensionError, DomainError
from fockquant.fock import FockVector, fock_basis, inner_product
from fockquant.quantization import OperatorMatrix


def brute_sign(seq):
    """Oracle: parity by counting transpositions in a bubble sort."""
    seq = list(seq)
    if len(set(seq)) < len(seq):
        return 0
    swaps = 0
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                swaps += 1
    return (-1) ** swaps


def fermion_vectors(d):
    basis = fermion_basis(d)
    coeff = st.builds(complex, st.integers(-4, 4), st.integers(-4, 4))
    return st.lists(coeff, min_size=len(basis), max_size=len(basis)).map(lambda c: FermionVector.from_array(d, c))


def random_grassmann(rng, d):
    return GrassmannPoly(d, {s: complex(*rng.integers(-3, 4, size=2)) for s in fermion_basis(d) if rng.random() < 0.5})


class TestFermionVector:
    @pytest.mark.parametrize("seq", list(itertools.permutations(range(4))) + [(0, 0), (2, 1, 2)])
    def test_permutation_sign(self, seq):
        assert permutation_sign(seq) == brute_sign(seq)

    def test_from_table_sign(self):
        f = FermionVector.from_table(3, {(1, 0): 2.0, (2,): 1.0})
        assert dict(f.coeffs) == {(2,): 1.0, (0, 1): -2.0}

    def test_from_table_rejects_inconsistency(self):
        with pytest.raises(DomainError):
            FermionVector.from_table(2, {(0, 1): 1.0, (1, 0): 1.0})
        with pytest.raises(DomainError):
            FermionVector.from_table(2, {(1, 1): 1.0})

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_full_antisymmetric_table(self, n):
        # every ordering of every n-subset of 4 modes, signed by brute force
        d = 4
        rng = np.random.default_rng(n)
        base = {s: complex(rng.normal(), rng.normal()) for s in itertools.combinations(range(d), n)}
        table = {p: brute_sign(p) * v for s, v in base.items() for p in itertools.permutations(s)}
        f = FermionVector.from_table(d, table)
        assert dict(f.coeffs) == pytest.approx(base)
        for key, v in table.items():
            assert f.value(key) == pytest.approx(v)

    def test_value_repeated_index(self):
        assert FermionVector(2, {(0, 1): 1.0}).value((1, 1)) == 0

    def test_rejects_unsorted_keys(self):
        with pytest.raises(DomainError):
            FermionVector(3, {(1, 0): 1.0})
        with pytest.raises(DimensionError):
            FermionVector(2, {(0, 2): 1.0})


class TestBosonize:
    def test_example(self):
        psi = bosonize(FermionVector(2, {(0, 1): 1.0, (): 0.5}), 2)
        assert psi.as_dict() == {(0, 0): 0.5, (1, 1): 1.0}

    def test_cutoff_too_small(self):
        with pytest.raises(DimensionError):
            bosonize(FermionVector(3, {(0, 1, 2): 1.0}), 2)

    def test_debosonize_outside_domain(self):
        psi = FockVector.basis_vector((2, 0), 3)
        with pytest.raises(DomainError, match=r"\(2, 0\)"):
            debosonize(psi)

    @pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
    def test_isometry_exhaustive(self, d):
        for s in fermion_basis(d):
            for t in fermion_basis(d):
                f, g = FermionVector(d, {s: 1.0}), FermionVector(d, {t: 1.0})
                assert inner_product(bosonize(f, d), bosonize(g, d)) == fermion_inner(f, g)
                assert debosonize(bosonize(f, d)).coeffs == f.coeffs
        w = _embedding(d, d)
        assert np.array_equal(w.T @ w, np.eye(2**d))

    @given(fermion_vectors(3))
    def test_round_trip(self, f):
        psi = bosonize(f, 4)
        assert is_hard_core(psi)
        assert psi.norm() == pytest.approx(f.norm())
        assert dict(debosonize(psi).coeffs) == dict(f.coeffs)

    def test_hard_core_count(self):
        for d in (2, 3, 4):
            assert len(hard_core_indices(d, d)) == 2**d
            assert len(hard_core_indices(d, 1)) == d + 1

    def test_conjugate_number_operator(self):
        d = 3
        number = sum(np.diag([a[i] for a in fock_basis(d, d).labels]) for i in range(d))
        got = conjugate_operator(OperatorMatrix(d, d, number))
        assert np.array_equal(np.diag(got).real, [len(s) for s in fermion_basis(d)])

    def test_conjugate_needs_room(self):
        with pytest.raises(DimensionError):
            conjugate_operator(OperatorMatrix.identity(3, 2))


class TestGrassmann:
    def test_anticommutation(self):
        for d in range(1, 6):
            xi = [GrassmannPoly.generator(i, d) for i in range(d)]
            for i in range(d):
                for j in range(d):
                    assert xi[i] * xi[j] + xi[j] * xi[i] == GrassmannPoly(d)

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_associative_on_basis(self, d):
        basis = fermion_basis(d)
        mono = [GrassmannPoly(d, {s: 1.0}) for s in basis]
        for a, b, c in itertools.product(mono, repeat=3):
            assert (a * b) * c == a * (b * c)

    def test_unit(self):
        rng = np.random.default_rng(2)
        g = random_grassmann(rng, 3)
        assert GrassmannPoly.one(3) * g == g == g * GrassmannPoly.one(3)

    def test_derivative_examples(self):
        x1, x2 = GrassmannPoly.generator(0, 2), GrassmannPoly.generator(1, 2)
        assert grassmann_derivative(x1 * x2, 0) == x2
        assert grassmann_derivative(x1 * x2, 1) == -x1
        assert grassmann_derivative(x2, 0) == GrassmannPoly(2)

    def test_left_right_duality(self):
        d = 4
        for s in fermion_basis(d):
            g = GrassmannPoly(d, {s: 1.0})
            for i in s:
                left = grassmann_derivative(g, i, "left")
                right = grassmann_derivative(g, i, "right")
                assert right == left * (-1) ** (len(s) - 1)

    def test_leibniz(self):
        rng = np.random.default_rng(4)
        d = 4
        for _ in range(20):
            s = fermion_basis(d)[rng.integers(2**d)]
            a, b = GrassmannPoly(d, {s: 1.0}), random_grassmann(rng, d)
            for i in range(d):
                lhs = grassmann_derivative(a * b, i)
                rhs = grassmann_derivative(a, i) * b + a * grassmann_derivative(b, i) * (-1) ** len(s)
                assert lhs == rhs

    def test_derivative_bounds(self):
        with pytest.raises(DimensionError):
            grassmann_derivative(GrassmannPoly.one(2), 2)


class TestCAR:
    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_residuals(self, d):
        res = super_ccr_residual(d)
        assert res["grassmann"] == 0.0
        assert res["jordan_wigner"] == 0.0
        assert res["bosonized"] == pytest.approx(2.0)

    def test_one_particle_block_is_fine(self):
        # on grades <= 1 the hard-core ladders never meet a doubly occupied state
        ann, cre = jordan_wigner_ladder(3)
        assert car_residual(ann, cre, 3, max_grade=1) == 0.0

    def test_grassmann_ladders_are_adjoint(self):
        ann, cre = grassmann_ladder(3)
        for a, c in zip(ann, cre):
            assert np.array_equal(a.conj().T, c)

    def test_needs_two_modes(self):
        with pytest.raises(DimensionError):
            super_ccr_residual(1)
