import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from abspec.abmodel import ModelParams, enumerate_ab_spectrum
from abspec.extensions import BoundaryCondition, RescaledBC, rescale
from abspec.secular import Root, RootOutOfRangeError, SecularParams, find_roots, hinf_roots
from abspec.spectrum import (
    HINF,
    KernelError,
    Source,
    boundary_matrix,
    critical_eigenfunction,
    full_spectrum,
    stable_spectrum,
    sweep,
)
from abspec.spectrum import _unscale

P = ModelParams(0.3, 1.0)

# tinier parameters push the top root out of float range
param = st.one_of(st.just(0.0), st.floats(-4, 4).filter(lambda x: abs(x) >= 1e-50))
modulus = st.one_of(st.just(0.0), st.floats(1e-50, 3))


def by_lambda(records):
    return {round(r.lam, 9): r for r in records}


def test_ab_spectrum():
    recs = full_spectrum(BoundaryCondition(), P, 10.0, 5)
    assert [r.lam for r in recs] == pytest.approx([1, 1.6, 3, 3.6, 5, 5.6, 7, 7.6, 9, 9.6])
    table = by_lambda(recs)
    for k in range(5):
        landau = table[round(2 * k + 1.0, 9)]
        assert landau.multiplicity == 5 + 1 and landau.truncated
        assert landau.source is Source.STABLE_LANDAU
        shifted = table[round(2 * k + 1.6, 9)]
        # k from the sectors 1..k, one more from the critical sector m = 0
        assert shifted.multiplicity == k + 1
        assert 0 in shifted.sectors
        if k:
            assert shifted.sources == (Source.STABLE_SHIFTED, Source.CRITICAL_ENDPOINT)
            assert shifted.sectors == tuple(range(0, k + 1))


@pytest.mark.parametrize("p", [ModelParams(0.3, 1.0), ModelParams(0.7, 2.0), ModelParams(0.1, 0.5)], ids=str)
def test_lambda_zero_matches_enumeration(p):
    lam_max, m_cap = 11.5 * p.B, 4
    recs = full_spectrum(BoundaryCondition(), p, lam_max, m_cap)
    ours = Counter({round(r.lam, 9): r.multiplicity for r in recs})
    ref = Counter(round(lam, 9) for _, _, lam in enumerate_ab_spectrum(p, lam_max, -1 - m_cap, 40))
    assert ours == ref


def test_stable_spectrum():
    recs = stable_spectrum(P, 7.7, 3)
    landau = [r for r in recs if r.source is Source.STABLE_LANDAU]
    shifted = [r for r in recs if r.source is Source.STABLE_SHIFTED]
    assert [r.lam for r in landau] == [1.0, 3.0, 5.0, 7.0]
    assert all(r.sectors == (-2, -3, -4) for r in landau)
    assert [r.lam for r in shifted] == pytest.approx([3.6, 5.6, 7.6])
    assert [r.multiplicity for r in shifted] == [1, 2, 3]
    with pytest.raises(ValueError):
        stable_spectrum(P, 5.0, 0)


def test_hinf_spectrum():
    recs = full_spectrum(HINF, P, 8.0, 2)
    assert recs[0].lam == pytest.approx(-0.4)
    crit = sorted(r.lam for r in recs if Source.CRITICAL_ENDPOINT in r.sources)
    assert crit == pytest.approx([-0.4, 1.0, 1.6, 3.0, 3.6, 5.0, 5.6, 7.0, 7.6])
    assert by_lambda(recs)[-0.4].sectors == (-1,)
    assert 0 in by_lambda(recs)[1.0].sectors


def test_full_spectrum_validation():
    with pytest.raises(ValueError):
        full_spectrum(BoundaryCondition(), P, 0.5, 3)


@settings(max_examples=25, deadline=None)
@given(param, param, modulus)
def test_critical_part_is_finite_with_small_multiplicity(xi, eta, zeta):
    try:
        recs = full_spectrum(RescaledBC(xi, eta, zeta), P, 12.0, 2)
    except RootOutOfRangeError:
        assume(False)
    crit = [r for r in recs if r.z is not None]
    assert crit and all(math.isfinite(r.lam) for r in crit)
    for r in crit:
        n_crit = r.multiplicity - sum(
            s.multiplicity for s in stable_spectrum(P, 12.0, 2) if abs(s.lam - r.lam) < 1e-9
        )
        assert 1 <= n_crit <= 2


def test_rescaled_and_plain_agree():
    bc = BoundaryCondition(0.7, -0.4, 0.2 + 0.5j)
    a = full_spectrum(bc, ModelParams(0.3, 2.0), 20.0, 2)
    b = full_spectrum(rescale(bc, ModelParams(0.3, 2.0)), ModelParams(0.3, 2.0), 20.0, 2)
    assert [r.lam for r in a] == pytest.approx([r.lam for r in b], abs=1e-12)
    assert [r.sectors for r in a] == [r.sectors for r in b]


def test_unscale_round_trip():
    p = ModelParams(0.6, 1.7)
    rbc = RescaledBC(0.3, -1.1, 0.8)
    back = rescale(_unscale(rbc, p), p)
    assert (back.xi, back.eta, back.zeta) == pytest.approx((0.3, -1.1, 0.8))


# -- eigenfunctions ---------------------------------------------------------------


def _residual(root, bc, p):
    A = boundary_matrix(root.lam, bc, p)
    out = []
    for ef in critical_eigenfunction(root, bc, p):
        v = np.array([ef.mu, ef.nu])
        assert abs(np.linalg.norm(v) - 1.0) < 1e-14
        out.append(float(np.linalg.norm(A @ v)) / max(float(np.max(np.abs(A))), 1e-300))
    return max(out)


@pytest.mark.parametrize(
    "params", [(0.2, 0.1, 0.05), (1.3, -0.8, 0.6), (-2.0, 3.0, 1.5), (0.0, 0.4, 0.3), (4.0, 4.0, 0.01)]
)
@pytest.mark.parametrize("B", [1.0, 2.5])
def test_eigenfunction_residual(params, B):
    p = ModelParams(0.3, B)
    rbc = RescaledBC(*params)
    bc = _unscale(rbc, p)
    for root in find_roots(SecularParams(rbc, 0.3), p, -6.5):
        assert _residual(root, bc, p) <= 1e-9


def test_boundary_matrix_singular_only_at_roots():
    p = ModelParams(0.3, 1.0)
    bc = _unscale(RescaledBC(1.3, -0.8, 0.6), p)
    with pytest.raises(KernelError):
        critical_eigenfunction(Root.at(0.123, p.B), bc, p)
    with pytest.raises(TypeError):
        boundary_matrix(1.0, RescaledBC(0, 0, 0), p)


def test_decoupled_sectors():
    import mpmath as mp

    p = ModelParams(0.3, 1.0)
    xi, eta = 0.7, -0.5
    rbc = RescaledBC(xi, eta, 0.0)
    bc = _unscale(rbc, p)
    seen = set()
    for root in find_roots(SecularParams(rbc, 0.3), p, -4.5):
        (ef,) = critical_eigenfunction(root, bc, p)
        assert min(abs(ef.mu), abs(ef.nu)) < 1e-9, root
        z = root.z
        if abs(ef.mu) > abs(ef.nu):
            seen.add(-1)
            residual = mp.rgamma(z) + xi * mp.rgamma(z + 0.3 - 1)
        else:
            seen.add(0)
            residual = mp.rgamma(z + 0.3) + eta * mp.rgamma(z)
        assert abs(float(residual)) < 1e-12
    assert seen == {-1, 0}


def test_double_kernel_when_matrix_vanishes():
    # Lambda = 0 at a common AB level: a vanishes in both sectors only if both are roots
    p = ModelParams(0.5, 1.0)
    bc = BoundaryCondition()
    root = Root.at(-1.0, p.B)
    vecs = critical_eigenfunction(root, bc, p)
    assert len(vecs) in (1, 2)
    for ef in vecs:
        assert abs(ef.mu) ** 2 + abs(ef.nu) ** 2 == pytest.approx(1.0)


# -- sweeps -----------------------------------------------------------------------


@pytest.fixture(scope="module")
def fig_sweeps():
    return {
        d: sweep(d, (-5.0, 5.0, 201), P, (-6.0, 12.0))
        for d in [(0.95, 0.25, 0.25), (0.95, -0.25, 0.0)]
    }


def _at(table, i):
    out = []
    for b in table.branches:
        if i in b.t_index:
            out.append(b.lam[b.t_index.index(i)])
    return sorted(out)


def test_sweep_anchor_at_zero(fig_sweeps):
    for table in fig_sweeps.values():
        assert not table.failures
        i0 = min(range(len(table.t_values)), key=lambda i: abs(table.t_values[i]))
        assert table.t_values[i0] == 0.0
        assert _at(table, i0) == pytest.approx([1, 1.6, 3, 3.6, 5, 5.6, 7, 7.6, 9, 9.6, 11, 11.6])


def test_sweep_gap_bound(fig_sweeps):
    edges = sorted(r.lam for r in hinf_roots(0.3, 0.5 - 12.0 / 2, 1.0)) + [math.inf]
    edges = [-math.inf] + edges
    for table in fig_sweeps.values():
        for i in range(len(table.t_values)):
            lams = _at(table, i)
            for lo, hi in zip(edges, edges[1:]):
                assert sum(1 for lam in lams if lo + 1e-9 < lam < hi - 1e-9) <= 2


def test_sweep_continuity(fig_sweeps):
    for table in fig_sweeps.values():
        for b in table.branches:
            assert all(j - i == 1 for i, j in zip(b.t_index, b.t_index[1:]))
            dl = np.diff(b.lam)
            for k in range(1, len(dl) - 1):
                assert abs(dl[k]) <= 10 * max(abs(dl[k - 1]), abs(dl[k + 1])) + 1e-9


def test_sweep_decoupled_families(fig_sweeps):
    table = fig_sweeps[(0.95, -0.25, 0.0)]
    families = Counter()
    for b in table.branches:
        sectors = set(b.sectors)
        assert len(sectors) == 1 and len(next(iter(sectors))) == 1
        families[next(iter(sectors))] += 1
        dl = np.diff(b.lam)
        signs = set(np.sign(dl[np.abs(dl) > 1e-12]))
        assert len(signs) <= 1
    assert set(families) == {(-1,), (0,)}


def test_sweep_stable_levels(fig_sweeps):
    table = next(iter(fig_sweeps.values()))
    assert table.stable_levels == pytest.approx([1, 3, 3.6, 5, 5.6, 7, 7.6, 9, 9.6, 11, 11.6])


def test_sweep_two_steps_and_validation():
    table = sweep((1.0, 0.0, 0.0), (0.0, 1.0, 2), P, (-2.0, 4.0))
    assert table.t_values == [0.0, 1.0]
    assert all(len(b.lam) >= 1 for b in table.branches)
    with pytest.raises(ValueError):
        sweep((1.0, 0.0, 0.0), (0.0, 1.0, 1), P, (-2.0, 4.0))
    with pytest.raises(ValueError):
        sweep((1.0, 0.0, 0.0), (0.0, 1.0, 5), P, (4.0, 4.0))


def test_sweep_deterministic():
    a = sweep((0.95, 0.25, 0.25), (-2.0, 2.0, 21), P, (-3.0, 6.0))
    b = sweep((0.95, 0.25, 0.25), (-2.0, 2.0, 21), P, (-3.0, 6.0))
    assert [(x.t_index, x.lam) for x in a.branches] == [(x.t_index, x.lam) for x in b.branches]
