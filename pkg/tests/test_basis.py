"""Graded dimension oracles computed independently of the package."""

from voacert.graded_fock import (BasisState, StateVector, build_model,
                                 canonical_factors, heisenberg_spec,
                                 lattice_spec, virasoro_spec)


def partition_counts(n_max):
    """p(0..n_max) by the standard coin-style dynamic program."""
    p = [0] * (n_max + 1)
    p[0] = 1
    for part in range(1, n_max + 1):
        for n in range(part, n_max + 1):
            p[n] += p[n - part]
    return p


def euler_inverse(n_max):
    """Coefficients of 1/prod_{k>=1}(1-q^k), i.e. p(n) again, as a list."""
    return partition_counts(n_max)


def minimal_vacuum_dims(p, pp, n_max):
    """Vacuum character of the (p, pp) minimal model, by the alternating
    sum over the affine Weyl group divided by the Euler product."""
    numer = [0] * (n_max + 1)
    k = 0
    while True:
        hit = False
        for kk in (k, -k) if k else (0,):
            e1 = ((2 * p * pp * kk + p - pp) ** 2 - (p - pp) ** 2) \
                // (4 * p * pp)
            e2 = ((2 * p * pp * kk + p + pp) ** 2 - (p - pp) ** 2) \
                // (4 * p * pp)
            if e1 <= n_max:
                numer[e1] += 1
                hit = True
            if e2 <= n_max:
                numer[e2] -= 1
                hit = True
        if k and not hit:
            break
        k += 1
    euler = partition_counts(n_max)
    return [sum(numer[j] * euler[n - j] for j in range(n + 1))
            for n in range(n_max + 1)]


def test_heisenberg_dims_are_partition_numbers(heis8):
    p = partition_counts(8)
    assert [heis8.dim(n) for n in range(9)] == p


def test_ising_dims_match_minimal_model_character(ising8):
    expect = minimal_vacuum_dims(4, 3, 8)
    assert [ising8.dim(n) for n in range(9)] == expect


def test_c1_dims_match_free_field_character(c1_8):
    p = partition_counts(8)
    expect = [p[n] - (p[n - 1] if n else 0) for n in range(9)]
    assert [c1_8.dim(n) for n in range(9)] == expect


def test_lattice_dims_match_theta_over_eta(lat2_6):
    p = partition_counts(6)
    expect = []
    for n in range(7):
        total = 0
        m = 0
        while m * m <= n:
            total += p[n - m * m] * (2 if m else 1)
            m += 1
        expect.append(total)
    assert [lat2_6.dim(n) for n in range(7)] == expect
    # charge sectors: ground state of sector m sits at degree m^2
    assert lat2_6.basis.degree_of(BasisState(2, ())) == 4


def test_vacuum_and_positions(heis8):
    assert heis8.dim(0) == 1
    vac = heis8.vacuum
    assert heis8.basis.degree_of(vac) == 0
    for d in range(9):
        for i, st in enumerate(heis8.basis.states(d)):
            assert heis8.basis.position_of(st) == i
            assert heis8.basis.degree_of(st) == d


def test_canonical_factor_ordering():
    a = canonical_factors(((0, -1), (0, -3), (0, -1)))
    assert a == canonical_factors(((0, -3), (0, -1), (0, -1)))
    assert sorted(a) == [(0, -3), (0, -1), (0, -1)]


def test_state_vector_arithmetic(heis8):
    a = heis8.basis.states(1)[0]
    v = StateVector.basis(a)
    w = v + v
    assert w == v.copy().scale(2)
    assert (w - w).is_zero()


def test_conformal_state_degree_two(heis8, ising8, lat2_6):
    for model in (heis8, ising8, lat2_6):
        assert model.degree_of(model.nu) == 2
