"""Alternative-basis sparsifier."""

import math

import pytest

from fmmlab.catalog import catalog
from fmmlab.growth import gamma21
from fmmlab.hm import compose_cob
from fmmlab.matrices import MatrixQ
from fmmlab.sparsify import core_additions, sparsify_cob


def _is_unit(rep) -> bool:
    return all(v.is_unit_or_zero() for M in rep.components() for row in M.data for v in row)


def _reconstructs(res, rep) -> bool:
    comp = compose_cob(res.cob, res.sparse)
    return comp.L == rep.L and comp.R == rep.R and comp.Pt == rep.Pt


def test_asopt_core():
    rep = catalog("asopt")
    res = sparsify_cob(rep)
    assert res.improved
    assert _is_unit(res.sparse)
    assert core_additions(res.sparse) <= 12
    assert gamma21(res.sparse) == pytest.approx(7 + 6 / math.sqrt(2), abs=1e-3)
    assert _reconstructs(res, rep)


def test_winograd_core():
    rep = catalog("winograd")
    res = sparsify_cob(rep)
    assert res.improved
    assert _is_unit(res.sparse)
    assert core_additions(res.sparse) <= 12
    assert gamma21(res.sparse) == pytest.approx(4 + 12 / math.sqrt(2), abs=1e-3)
    assert _reconstructs(res, rep)


def test_strassen_core():
    rep = catalog("strassen")
    res = sparsify_cob(rep)
    assert _is_unit(res.sparse)
    assert core_additions(res.sparse) <= 12
    assert _reconstructs(res, rep)


def test_conventional_returns_identity():
    rep = catalog("conventional")
    res = sparsify_cob(rep)
    assert not res.improved
    assert res.sparse is rep
    assert res.cob.L == MatrixQ.identity(4)
    assert _reconstructs(res, rep)


def test_sparsify_requires_exact():
    with pytest.raises(TypeError):
        sparsify_cob(catalog("asopt").to_float())


def test_core_additions_of_published_core():
    assert core_additions(catalog("schwartz_sparse")) == 12
