"""Systematic generator-matrix network codes over GF(q)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .galois import GaloisField, GfElement, field_new

CODEBOOK_CAP = 4096

PRESET_MATRICES = {
    # 2-user GF(2), BPSK
    "G2": (2, [[1, 0, 1, 1], [0, 1, 1, 1]]),
    # 2-user GF(4), QPSK
    "G1": (4, [[1, 0, 1, 1], [0, 1, 2, 1]]),
    # 3-user GF(2), BPSK
    "G3": (2, [[1, 0, 0, 1, 1, 1], [0, 1, 0, 1, 1, 0], [0, 0, 1, 1, 0, 1]]),
}


class CodeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class NetworkCode:
    """N x K systematic generator matrix G = [I | P] over GF(q).

    ``relay_of_parity[l]`` is the 1-based index of the terminal that forms and
    transmits parity column N + l.  The modulation order equals q.
    """

    field: GaloisField
    G: np.ndarray
    relay_of_parity: tuple[int, ...]
    name: str = "custom"
    _codebook: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        G = np.asarray(self.G, dtype=np.int64)
        object.__setattr__(self, "G", G)
        G.setflags(write=False)
        N, K = G.shape
        if K <= N:
            raise CodeError(f"need K > N, got N={N}, K={K}")
        if G.min() < 0 or G.max() >= self.field.q:
            raise CodeError(f"entries of G must be labels in GF({self.field.q})")
        if not np.array_equal(G[:, :N], np.eye(N, dtype=np.int64)):
            raise CodeError("G must be systematic (identity in the first N columns)")
        if len(self.relay_of_parity) != K - N:
            raise CodeError(f"relay_of_parity needs {K - N} entries")
        if any(not 1 <= r <= N for r in self.relay_of_parity):
            raise CodeError(f"relay indices must lie in [1, {N}]")

    @property
    def N(self) -> int:
        return self.G.shape[0]

    @property
    def K(self) -> int:
        return self.G.shape[1]

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def M(self) -> int:
        return self.field.q

    def parity_column(self, l: int) -> np.ndarray:
        """Coefficients of the l-th parity (0-based) over the N users."""
        return self.G[:, self.N + l]

    def foreign_sources(self, l: int) -> list[int]:
        """0-based users whose symbols the relay of parity l must detect."""
        relay = self.relay_of_parity[l] - 1
        col = self.parity_column(l)
        return [n for n in range(self.N) if n != relay and col[n] != 0]

    def encode_labels(self, u: np.ndarray) -> np.ndarray:
        """Vectorised encoding: u of shape (..., N) -> codewords (..., K)."""
        u = np.asarray(u, dtype=np.int64)
        mul, add = self.field.mul_table, self.field.add_table
        terms = mul[u[..., :, None], self.G]  # (..., N, K)
        c = terms[..., 0, :]
        for n in range(1, self.N):
            c = add[c, terms[..., n, :]]
        return c

    def codebook_labels(self, cap: int = CODEBOOK_CAP) -> tuple[np.ndarray, np.ndarray]:
        """(sources, codewords) of shapes (q^N, N) and (q^N, K), lexicographic order."""
        size = self.q**self.N
        if size > cap:
            raise CodeError(f"codebook of size {size} exceeds cap {cap}")
        if self._codebook:
            return self._codebook[0]
        sources = np.array(list(itertools.product(range(self.q), repeat=self.N)), dtype=np.int64)
        words = self.encode_labels(sources)
        sources.setflags(write=False)
        words.setflags(write=False)
        self._codebook.append((sources, words))
        return sources, words


def make_code(
    q: int,
    rows: Sequence[Sequence[int]],
    relay_of_parity: Sequence[int] | None = None,
    name: str = "custom",
) -> NetworkCode:
    G = np.array(rows, dtype=np.int64)
    if G.ndim != 2:
        raise CodeError("generator matrix must be a list of equal-length rows")
    N, K = G.shape
    if relay_of_parity is None:
        if K - N > N:
            raise CodeError("more parities than users: give relay_of_parity explicitly")
        relay_of_parity = list(range(1, K - N + 1))
    return NetworkCode(field_new(q), G, tuple(int(r) for r in relay_of_parity), name)


def preset_code(name: str) -> NetworkCode:
    try:
        q, rows = PRESET_MATRICES[name]
    except KeyError:
        raise CodeError(f"unknown preset {name!r}; choose from {sorted(PRESET_MATRICES)}") from None
    return make_code(q, rows, name=name)


def encode(u: Sequence[GfElement] | Sequence[int], code: NetworkCode) -> list[GfElement]:
    labels = [int(x) for x in u]
    if len(labels) != code.N:
        raise CodeError(f"source word has length {len(labels)}, expected {code.N}")
    for x in u:
        if isinstance(x, GfElement) and x.field is not code.field:
            raise CodeError("source symbols are not in the code's field")
    c = code.encode_labels(np.array(labels))
    return [code.field.element(x) for x in c]


def enumerate_codebook(code: NetworkCode, cap: int = CODEBOOK_CAP) -> list[list[GfElement]]:
    _, words = code.codebook_labels(cap)
    return [[code.field.element(x) for x in w] for w in words]
