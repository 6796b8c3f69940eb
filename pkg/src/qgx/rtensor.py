"""R-matrix data for GL_q(n) and the numerical structure constants of the calculus.

Index conventions
-----------------
* R-type tensors (``R``, ``Rinv``, ``Rtilde``) are stored as ``(i, j, k, l)`` for
  ``R^{ij}_{kl}``: the upper (row) pair first, then the lower (column) pair; the first
  upper and first lower index belong to tensor factor 1.  As a matrix on V (x) V the row
  is ``i*n + j`` and the column ``k*n + l``.
* ``D`` is stored as ``(i, j)`` for ``D^i_j`` (row i, column j).
* Calculus constants use doubled indices ``I = (row, col)`` flattened row-major to
  ``row*n + col``.  Their keys list the lower indices, then the upper ones, in the order
  they are written: ``sigma[(i, j, k, l)]`` is sigma_{ij}^{kl}, ``C[(l, k, j)]`` is
  C_{lk}^{j}, ``sigma_tilde[(j, l, k, i)]`` is sigma~_{jl}^{ki}, ``C_tilde[(j, k, i)]`` is
  C~_{jk}^{i}.

All indices are 0-based in memory and 1-based in JSON and the text syntax.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .linalg import SingularMatrixError, SMat
from .qfield import LAMBDA, ONE, Q, ZERO, RatFunc, as_ratfunc, parse

__all__ = [
    "IndexedTensor",
    "RBundle",
    "StructureConstants",
    "ConsistencyError",
    "build_r",
    "check_ybe",
    "ybe_witness",
    "check_hecke",
    "hecke_witness",
    "second_inverse",
    "second_inverse_check",
    "r_inverse",
    "flip",
    "d_matrix",
    "derive_constants",
    "braid_residual",
]


class ConsistencyError(RuntimeError):
    """Two independent computations of the same quantity disagree."""


@dataclass(frozen=True)
class IndexedTensor:
    """Sparse multi-index array over Q(q).

    ``entries`` maps 0-based index tuples of length ``legs`` to nonzero values;
    absent entries are zero.
    """

    n: int
    legs: int
    entries: Mapping[tuple[int, ...], RatFunc] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for idx, v in self.entries.items():
            idx = tuple(idx)
            if len(idx) != self.legs or not all(0 <= a < self.n for a in idx):
                raise ValueError(f"index {idx} out of range for n={self.n}, legs={self.legs}")
            v = as_ratfunc(v)
            if not v.is_zero():
                clean[idx] = v
        object.__setattr__(self, "entries", clean)

    def __getitem__(self, idx) -> RatFunc:
        return self.entries.get(tuple(idx), ZERO)

    def __eq__(self, other):
        if not isinstance(other, IndexedTensor):
            return NotImplemented
        return (self.n, self.legs) == (other.n, other.legs) and self.entries == other.entries

    def __hash__(self):
        return hash((self.n, self.legs, frozenset(self.entries.items())))

    def __len__(self):
        return len(self.entries)

    def map(self, fn) -> "IndexedTensor":
        return IndexedTensor(self.n, self.legs, {k: fn(v) for k, v in self.entries.items()})

    # -- matrix views (4-leg R-type and 2-leg tensors) -------------------------------
    def to_matrix(self) -> SMat:
        n = self.n
        if self.legs == 4:
            return SMat.from_entries(n * n, n * n, ((i * n + j, k * n + l, v) for (i, j, k, l), v in self.entries.items()))
        if self.legs == 2:
            return SMat.from_entries(n, n, ((i, j, v) for (i, j), v in self.entries.items()))
        raise ValueError("matrix view needs 2 or 4 legs")

    @classmethod
    def from_matrix(cls, m: SMat, n: int, legs: int = 4) -> "IndexedTensor":
        if legs == 4 and m.nrows == n * n:
            return cls(n, 4, {(r // n, r % n, c // n, c % n): v for r, c, v in m.items()})
        if legs == 2 and m.nrows == n:
            return cls(n, 2, {(r, c): v for r, c, v in m.items()})
        raise ValueError("shape does not match n")

    # -- JSON -------------------------------------------------------------------------
    def to_json_obj(self) -> dict:
        entries = [{"idx": [a + 1 for a in idx], "val": str(self.entries[idx])} for idx in sorted(self.entries)]
        return {"n": self.n, "legs": self.legs, "entries": entries}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=1)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "IndexedTensor":
        n, legs = int(obj["n"]), int(obj["legs"])
        entries = {}
        for e in obj["entries"]:
            idx = tuple(int(a) - 1 for a in e["idx"])
            val = parse(e["val"]) if isinstance(e["val"], str) else as_ratfunc(e["val"])
            entries[idx] = entries.get(idx, ZERO) + val
        return cls(n, legs, entries)

    @classmethod
    def from_json(cls, text: str) -> "IndexedTensor":
        return cls.from_json_obj(json.loads(text))


def build_r(n: int) -> IndexedTensor:
    """The standard GL_q(n) R-matrix.

    ``R^{ii}_{ii} = q``, ``R^{ij}_{ij} = 1`` for i != j and ``R^{ij}_{ji} = q - q^-1`` for
    i > j.  With this choice the functionals l+ paired against T are upper triangular.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    e = {}
    for i in range(n):
        e[(i, i, i, i)] = Q
        for j in range(n):
            if i != j:
                e[(i, j, i, j)] = ONE
            if i > j:
                e[(i, j, j, i)] = LAMBDA
    return IndexedTensor(n, 4, e)


def _require_rtype(R: IndexedTensor) -> None:
    if R.legs != 4:
        raise ValueError("expected a 4-leg R-type tensor")


def flip(R: IndexedTensor) -> IndexedTensor:
    """R_{21}: ``(R_21)^{ij}_{kl} = R^{ji}_{lk}``."""
    _require_rtype(R)
    return IndexedTensor(R.n, 4, {(j, i, l, k): v for (i, j, k, l), v in R.entries.items()})


def r_inverse(R: IndexedTensor) -> IndexedTensor:
    _require_rtype(R)
    return IndexedTensor.from_matrix(R.to_matrix().inverse("R"), R.n)


def partial_transpose(R: IndexedTensor) -> IndexedTensor:
    """Transpose in the first tensor factor: ``(i, j, k, l) -> (k, j, i, l)``."""
    return IndexedTensor(R.n, 4, {(k, j, i, l): v for (i, j, k, l), v in R.entries.items()})


def second_inverse(R: IndexedTensor) -> IndexedTensor:
    """The tensor R~ with ``sum_{m,n} R^{mj}_{pn} R~^{in}_{mq} = delta^i_p delta^j_q``.

    Computed as ``((R^{t1})^{-1})^{t1}``; the same tensor then satisfies the contraction
    in the other order as well (see :func:`second_inverse_check`).
    """
    _require_rtype(R)
    pt = partial_transpose(R).to_matrix()
    try:
        inv = pt.inverse("partial transpose R^{t1}")
    except SingularMatrixError as exc:
        raise SingularMatrixError(
            "second inverse undefined: the linear system sum R^{mj}_{pn} X^{in}_{mq} = delta delta "
            "(partial transpose of R in the first factor) is singular",
            "R^{t1}",
        ) from exc
    return partial_transpose(IndexedTensor.from_matrix(inv, R.n))


def second_inverse_check(R: IndexedTensor, Rt: IndexedTensor) -> tuple[bool, bool]:
    """Evaluate both contraction orders; returns (R.Rt == id, Rt.R == id)."""
    n = R.n

    def contract(A, B):
        out = {}
        for (m, j, p, nn), a in A.entries.items():
            for (i, n2, m2, qq), b in B.entries.items():
                if n2 == nn and m2 == m:
                    key = (i, j, p, qq)
                    out[key] = out.get(key, ZERO) + a * b
        return out

    def is_id(d):
        for i, j, p, qq in itertools.product(range(n), repeat=4):
            want = ONE if (i == p and j == qq) else ZERO
            if d.get((i, j, p, qq), ZERO) != want:
                return False
        return True

    return is_id(contract(R, Rt)), is_id(contract(Rt, R))


def d_matrix(Rt: IndexedTensor) -> IndexedTensor:
    """``D^i_j = sum_m R~^{mi}_{jm}``."""
    n = Rt.n
    out = {}
    for (m, i, j, m2), v in Rt.entries.items():
        if m == m2:
            out[(i, j)] = out.get((i, j), ZERO) + v
    return IndexedTensor(n, 2, out)


# -- Yang-Baxter and Hecke ------------------------------------------------------------


def _perm23(n: int) -> SMat:
    m = SMat(n**3, n**3)
    for a, b, c in itertools.product(range(n), repeat=3):
        m.rows[(a * n + b) * n + c] = {(a * n + c) * n + b: ONE}
    return m


def ybe_witness(R: IndexedTensor) -> tuple[int, ...] | None:
    """First index tuple (1-based, rows then columns) where R12 R13 R23 != R23 R13 R12."""
    _require_rtype(R)
    n = R.n
    Rm = R.to_matrix()
    eye = SMat.identity(n)
    R12 = Rm.kron(eye)
    R23 = eye.kron(Rm)
    P = _perm23(n)
    R13 = P @ R12 @ P
    lhs = R12 @ R13 @ R23
    rhs = R23 @ R13 @ R12
    diff = lhs - rhs
    if diff.is_zero():
        return None
    r, c, _ = min(diff.items(), key=lambda t: (t[0], t[1]))
    return tuple(a + 1 for a in (r // (n * n), (r // n) % n, r % n, c // (n * n), (c // n) % n, c % n))


def check_ybe(R: IndexedTensor) -> bool:
    return ybe_witness(R) is None


def hecke_witness(R: IndexedTensor) -> tuple[int, int, int, int] | None:
    """First (1-based) index where ``R^{ij}_{pq} != (R^-1)^{ji}_{qp} + lambda d^i_q d^j_p``.

    Raises :class:`SingularMatrixError` if R is not invertible.
    """
    _require_rtype(R)
    n = R.n
    Rinv = r_inverse(R)
    for i, j, p, qq in itertools.product(range(n), repeat=4):
        rhs = Rinv[(j, i, qq, p)]
        if i == qq and j == p:
            rhs = rhs + LAMBDA
        if R[(i, j, p, qq)] != rhs:
            return (i + 1, j + 1, p + 1, qq + 1)
    return None


def check_hecke(R: IndexedTensor) -> bool:
    return hecke_witness(R) is None


# -- bundle -----------------------------------------------------------------------------


@dataclass(frozen=True)
class RBundle:
    """R together with everything derived from it by linear algebra."""

    n: int
    R: IndexedTensor
    Rinv: IndexedTensor
    Rtilde: IndexedTensor
    D: IndexedTensor
    Dinv: IndexedTensor
    lam: RatFunc

    @classmethod
    def from_r(cls, R: IndexedTensor, validate: bool = True) -> "RBundle":
        _require_rtype(R)
        Rinv = r_inverse(R)
        Rt = second_inverse(R)
        D = d_matrix(Rt)
        Dinv = IndexedTensor.from_matrix(D.to_matrix().inverse("D"), R.n, legs=2)
        b = cls(R.n, R, Rinv, Rt, D, Dinv, LAMBDA)
        if validate:
            b.validate()
        return b

    @classmethod
    def standard(cls, n: int) -> "RBundle":
        return cls.from_r(build_r(n))

    def validate(self) -> None:
        n = self.n
        eye = SMat.identity(n * n)
        if self.R.to_matrix() @ self.Rinv.to_matrix() != eye or self.Rinv.to_matrix() @ self.R.to_matrix() != eye:
            raise ConsistencyError("R * R^-1 != 1")
        if not all(second_inverse_check(self.R, self.Rtilde)):
            raise ConsistencyError("second inverse fails a contraction")
        w = ybe_witness(self.R)
        if w is not None:
            raise ConsistencyError(f"Yang-Baxter fails at {w}")
        w = hecke_witness(self.R)
        if w is not None:
            raise ConsistencyError(f"Hecke condition fails at {w}")

    # matrix helpers used throughout
    def mat(self, name: str) -> SMat:
        return {
            "R": self.R,
            "Rinv": self.Rinv,
            "R21": flip(self.R),
            "R21inv": flip(self.Rinv),
            "Rtilde": self.Rtilde,
        }[name].to_matrix()

    def d(self, i: int, j: int) -> RatFunc:
        return self.D[(i, j)]

    def dinv(self, i: int, j: int) -> RatFunc:
        return self.Dinv[(i, j)]


# -- structure constants ----------------------------------------------------------------


@dataclass(frozen=True)
class StructureConstants:
    """sigma, sigma~, C and C~ on doubled indices (see the module docstring for keys)."""

    n: int
    sigma: IndexedTensor
    sigma_tilde: IndexedTensor
    C: IndexedTensor
    C_tilde: IndexedTensor

    @property
    def dim(self) -> int:
        return self.n * self.n

    def sigma_matrix(self) -> SMat:
        """Rows (i, j), columns (k, l): entry sigma_{ij}^{kl}."""
        N = self.dim
        return SMat.from_entries(N * N, N * N, ((i * N + j, k * N + l, v) for (i, j, k, l), v in self.sigma.entries.items()))


def _sigma_inverse_tensor(sigma: IndexedTensor) -> IndexedTensor:
    N = sigma.n
    m = SMat.from_entries(N * N, N * N, ((i * N + j, k * N + l, v) for (i, j, k, l), v in sigma.entries.items()))
    inv = m.inverse("sigma")
    return IndexedTensor(N, 4, {(r // N, r % N, c // N, c % N): v for r, c, v in inv.items()})


def derive_constants(bundle: RBundle, engine) -> StructureConstants:
    """Compute sigma, C by pairing and sigma~, C~ from sigma^{-1}, cross-checked by pairing.

    ``engine`` is a :class:`qgx.hopfpair.PairingEngine` for the same bundle.
    """
    n = bundle.n
    N = n * n
    idx = range(N)
    fam = engine.functionals()
    F, chi, phi, chit = fam.f, fam.chi, fam.phi, fam.chi_tilde
    # sigma_{ij}^{kl} = <f^k_j, r^l_i>
    sigma = {}
    for i, j, k, l in itertools.product(idx, repeat=4):
        v = engine.pair(F[k][j], engine.r_elem(l, i))
        if not v.is_zero():
            sigma[(i, j, k, l)] = v
    sigma_t = IndexedTensor(N, 4, sigma)
    # C_{lk}^{j} = <chi_k, r^j_l>
    C = {}
    for l, k, j in itertools.product(idx, repeat=3):
        v = engine.pair(chi[k], engine.r_elem(j, l))
        if not v.is_zero():
            C[(l, k, j)] = v
    C_t = IndexedTensor(N, 3, C)
    # sigma~_{jl}^{ki} = (sigma^{-1})_{jl}^{ki}
    sinv = _sigma_inverse_tensor(sigma_t)
    # second route: sigma~_{jl}^{ki} = <phi^i_j, r^k_l>
    for j, l, k, i in itertools.product(idx, repeat=4):
        v = engine.pair(phi[i][j], engine.r_elem(k, l))
        if v != sinv[(j, l, k, i)]:
            raise ConsistencyError(
                f"sigma~ routes disagree at (j,l,k,i)={(j + 1, l + 1, k + 1, i + 1)}: "
                f"<phi,r> = {v}, sigma^-1 = {sinv[(j, l, k, i)]}"
            )
    # C~_{jk}^{i} = C_{sl}^{i} (sigma^{-1})_{kj}^{sl}, cross-checked against <chi~_k, r^i_j>
    Ct = {}
    for j, k, i in itertools.product(idx, repeat=3):
        acc = ZERO
        for s, l in itertools.product(idx, repeat=2):
            c = C_t[(s, l, i)]
            if not c.is_zero():
                acc = acc + c * sinv[(k, j, s, l)]
        direct = engine.pair(chit[k], engine.r_elem(i, j))
        if acc != direct:
            raise ConsistencyError(f"C~ routes disagree at (j,k,i)={(j + 1, k + 1, i + 1)}: {direct} vs {acc}")
        if not acc.is_zero():
            Ct[(j, k, i)] = acc
    return StructureConstants(n, sigma_t, sinv, C_t, IndexedTensor(N, 3, Ct))


def braid_residual(sc: StructureConstants) -> SMat:
    """``S12 S23 S12 - S23 S12 S23`` for the operator S[(i,j),(l,k)] = sigma_{ij}^{lk}.

    S is the map chi_i chi_j -> sigma_{ij}^{lk} chi_l chi_k read on tensor legs.
    """
    N = sc.dim
    S = SMat.from_entries(N * N, N * N, ((i * N + j, l * N + k, v) for (i, j, l, k), v in sc.sigma.entries.items()))
    eye = SMat.identity(N)
    S12 = S.kron(eye)
    S23 = eye.kron(S)
    return S12 @ S23 @ S12 - S23 @ S12 @ S23


def tensor_entries_eval(t: IndexedTensor, q0) -> dict:
    from .qfield import eval_at

    return {k: eval_at(v, q0) for k, v in t.entries.items()}


def iter_indices(n: int, legs: int) -> Iterable[tuple[int, ...]]:
    return itertools.product(range(n), repeat=legs)
