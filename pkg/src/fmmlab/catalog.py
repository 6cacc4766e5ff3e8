"""Catalog of 2x2 bilinear formulas shipped with the package.

Each entry is stored in the HM text format (see :mod:`fmmlab.hm`), with the
component rows laid out in the package's storage convention.  Everything
except ``cob_alternative`` (a change-of-basis triple) and
``schwartz_sparse`` (the sparse core it pairs with) satisfies the Brent
equations; the test suite re-checks this exactly.
"""

from __future__ import annotations

from .hm import HMRep, reads_hm
from .matrices import MatrixQ

__all__ = ["catalog", "catalog_names", "BRENT_VALID_NAMES"]


_STRASSEN = """
HM r=7 m=2 k=2 n=2
L
1 0 0 1
0 1 0 -1
-1 0 1 0
1 1 0 0
1 0 0 0
0 0 0 1
0 0 1 1
R
1 0 0 1
0 0 1 1
1 1 0 0
0 0 0 1
0 1 0 -1
-1 0 1 0
1 0 0 0
Pt
1 0 0 1
1 0 0 0
0 0 0 1
-1 0 1 0
0 0 1 1
1 1 0 0
0 1 0 -1"""

# The classical 7-product, 15-addition variant: products
#   m1 = a11 b11, m2 = a12 b21, m3 = (a11+a12-a21-a22) b22,
#   m4 = a22 (b11-b12-b21+b22), m5 = (a21+a22)(b12-b11),
#   m6 = (a21+a22-a11)(b11-b12+b22), m7 = (a11-a21)(b22-b12).
_WINOGRAD = """
HM r=7 m=2 k=2 n=2
L
1 0 0 0
0 1 0 0
1 1 -1 -1
0 0 0 1
0 0 1 1
-1 0 1 1
1 0 -1 0
R
1 0 0 0
0 0 1 0
0 0 0 1
1 -1 -1 1
-1 1 0 0
1 -1 0 1
0 -1 0 1
Pt
1 1 1 1
1 0 0 0
0 0 1 0
0 -1 0 0
0 0 1 1
0 1 1 1
0 1 0 1
"""

_POWERS = """
HM r=7 m=2 k=2 n=2
L
0 -1 1 0
1 1/2 -1/2 -1/4
0 0 1 -1/2
0 1 0 -1/2
0 0 1 1/2
1 -1/2 1/2 -1/4
0 1 0 1/2
R
1 0 0 -1
1 1/2 0 0
0 1/2 0 -1
1/2 1/4 -1 -1/2
0 1/2 0 1
1 -1/2 0 0
1/2 -1/4 1 -1/2
Pt
0 1 1 0
1/2 0 1 0
1/4 -1/2 -1/2 1
-1/2 1 0 0
1/4 1/2 1/2 1
1/2 0 -1 0
1/2 1 0 0"""

_POWROT = """
HM r=7 m=2 k=2 n=2
L
4/9 -8/9 -8/9 -4/9
0 5/9 0 10/9
8/9 -2/3 0 0
4/9 2/9 8/9 4/9
0 -10/9 0 0
4/9 -1/3 -8/9 2/3
-4/9 -2/9 8/9 4/9
R
-3/5 4/5 -4/5 -3/5
0 1/2 0 -1
-1 1/2 0 0
0 5/4 0 0
3/5 -3/10 4/5 -2/5
2/5 3/10 -4/5 -3/5
-3/5 -9/20 -4/5 -3/5
Pt
9/20 9/10 9/10 -9/20
0 27/40 0 -9/10
-9/8 -9/16 0 0
9/20 9/40 9/10 9/20
-27/40 27/80 9/10 -9/20
0 -9/8 0 0
9/20 -9/40 9/10 -9/20"""

_ASOPT = """
HM r=7 m=2 k=2 n=2
L
1/2*s3 1/2 1/2 1/6*s3
0 0 1 -1/3*s3
0 1 0 1/3*s3
0 0 0 -2/3*s3
-1/2*s3 -1/2 1/2 -1/2*s3
-1/2*s3 -1/2 1/2 1/6*s3
-1/2*s3 1/2 1/2 -1/6*s3
R
0 2/3*s3 0 0
-1 1/3*s3 0 0
0 1/3*s3 0 -1
1/2 -1/6*s3 1/2*s3 -1/2
-1/2 1/2*s3 -1/2*s3 -1/2
1/2 1/6*s3 1/2*s3 1/2
1/2 1/6*s3 -1/2*s3 -1/2
Pt
1/6*s3 1/2 1/2 1/2*s3
-1/3*s3 -1 0 0
1/3*s3 0 -1 0
1/6*s3 -1/2 -1/2 1/2*s3
1/2*s3 1/2 -1/2 1/2*s3
-1/6*s3 1/2 -1/2 1/2*s3
-2/3*s3 0 0 0"""

# Change-of-basis triple: each component of the sparse core below, right
# multiplied by the matching 4x4 here, reconstructs the asopt component.
_COB_ALTERNATIVE = """
HM r=4 m=2 k=2 n=2
L
0 0 0 2/3*s3
0 1 0 1/3*s3
0 0 1 -1/3*s3
-1/2*s3 -1/2 1/2 -1/2*s3
R
0 2/3*s3 0 0
1 -1/3*s3 0 0
0 1/3*s3 0 -1
-1/2 1/2*s3 -1/2*s3 -1/2
Pt
-2/3*s3 0 0 0
1/3*s3 0 -1 0
-1/3*s3 -1 0 0
1/2*s3 1/2 -1/2 1/2*s3"""

_SCHWARTZ_SPARSE = """
HM r=7 m=2 k=2 n=2
L
0 0 1 -1
0 0 1 0
0 1 0 0
-1 0 0 0
0 0 0 1
1 0 0 1
0 1 0 1
R
1 0 0 0
0 -1 0 0
0 0 1 0
0 0 1 -1
0 0 0 1
1 0 0 -1
0 1 0 1
Pt
0 -1 0 1
0 0 1 0
0 1 0 0
0 0 1 1
0 0 0 1
1 0 0 1
1 0 0 0
"""

_APPROX0695 = """
HM r=7 m=2 k=2 n=2
L
-167042/345665 295936/345665 -295936/345665 -167042/345665
-178623/345665 -51622047/176980480 295936/345665 167042/345665
0 -51622047/88490240 0 334084/345665
-1 289/512 0 0
0 289/256 0 0
-167042/345665 -24137569/88490240 -295936/345665 -167042/345665
-167042/345665 24137569/88490240 -295936/345665 167042/345665
R
-256/289 -1/2 1/2 -256/289
-345665/295936 0 0 0
-345665/591872 0 345665/334084 0
-178623/295936 -1 0 0
178623/591872 1/2 178623/334084 256/289
-289/1024 1/2 -1/2 256/289
-289/1024 1/2 1/2 -256/289
Pt
295936/345665 178623/345665 -178623/345665 295936/345665
295936/345665 -167042/345665 -178623/345665 51622047/176980480
0 1 0 289/512
0 0 1 -289/512
295936/345665 178623/345665 167042/345665 51622047/176980480
295936/345665 178623/345665 -178623/345665 -31906176129/102294717440
0 0 0 -345665/295936
"""

_APPROX0661 = """
HM r=7 m=2 k=2 n=2
L
33124/38165 19208/38165 -19208/38165 33124/38165
33124/38165 19208/38165 18957/38165 1857786/6449885
0 38416/38165 0 3715572/6449885
0 0 1 -98/169
0 0 0 196/169
33124/38165 19208/38165 -19208/38165 -1882384/6449885
33124/38165 -19208/38165 -19208/38165 1882384/6449885
R
-169/196 -1/2 1/2 -169/196
38165/33124 0 0 0
38165/66248 0 -38165/38416 0
18957/33124 1 0 0
18957/66248 1/2 18957/38416 169/196
-49/169 1/2 -1/2 169/196
-49/169 1/2 1/2 -169/196
Pt
-18957/38165 33124/38165 -33124/38165 -18957/38165
19208/38165 33124/38165 -1857786/6449885 -18957/38165
-1 0 -98/169 0
0 0 98/169 1
-18957/38165 33124/38165 -1857786/6449885 19208/38165
-18957/38165 33124/38165 359367849/1264177460 -18957/38165
0 0 38165/33124 0"""


def _conventional() -> HMRep:
    m = k = n = 2
    triples = [(i, j, l) for i in range(m) for j in range(k) for l in range(n)]
    L = MatrixQ.zeros(len(triples), m * k)
    R = MatrixQ.zeros(len(triples), k * n)
    Pt = MatrixQ.zeros(len(triples), m * n)
    from .coeff import Coefficient

    one = Coefficient(1)
    for q, (i, j, l) in enumerate(triples):
        L.data[q][i * k + j] = one
        R.data[q][j * n + l] = one
        Pt.data[q][l * m + i] = one
    return HMRep(m, k, n, len(triples), L, R, Pt, name="conventional")


_TEXTS = {
    "strassen": _STRASSEN,
    "winograd": _WINOGRAD,
    "powers": _POWERS,
    "powrot": _POWROT,
    "asopt": _ASOPT,
    "cob_alternative": _COB_ALTERNATIVE,
    "schwartz_sparse": _SCHWARTZ_SPARSE,
    "approx0695": _APPROX0695,
    "approx0661": _APPROX0661,
}

#: catalog entries that are matrix-multiplication formulas on their own
BRENT_VALID_NAMES = (
    "strassen",
    "winograd",
    "powers",
    "powrot",
    "asopt",
    "approx0695",
    "approx0661",
    "conventional",
)

_cache: dict[str, HMRep] = {}


def catalog_names() -> list[str]:
    return sorted(list(_TEXTS) + ["conventional"])


def catalog(name: str) -> HMRep:
    """Return the named formula (exact backend).  Raises KeyError for
    unknown names."""
    if name in _cache:
        return _cache[name]
    if name == "conventional":
        rep = _conventional()
    elif name in _TEXTS:
        rep = reads_hm(_TEXTS[name], name=name)
    else:
        raise KeyError(f"unknown catalog entry {name!r}; have {catalog_names()}")
    _cache[name] = rep
    return rep
