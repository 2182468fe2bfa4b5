"""Liouville-space block labels and the block-sparse density state.

The operator basis is ``f^{(N, Nt)}_{r; rt} = |r>_N <rt|_Nt``. The generator
conserves ``N``, ``Nt`` and ``nu = r - rt``, so a density operator is stored
as a map from :class:`BlockLabel` to the coefficient vector of that block,
ordered by descending ``r``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .hilbert import KetLabel, check_ket


@dataclass(frozen=True, order=True)
class BlockLabel:
    """Invariant subspace ``(N, Nt, nu)`` of the generator."""

    N: int
    Ntilde: int
    nu: int

    def __post_init__(self):
        if self.N < 0 or self.Ntilde < 0:
            raise ValueError(f"N and Ntilde must be non-negative, got {self}")

    @property
    def r_min(self) -> int:
        return max(-self.N, self.nu - self.Ntilde)

    @property
    def r_max(self) -> int:
        return min(self.N, self.nu + self.Ntilde)

    @property
    def dim(self) -> int:
        if (self.N - self.Ntilde - self.nu) % 2:
            return 0
        return max(0, (self.r_max - self.r_min) // 2 + 1)

    @property
    def empty(self) -> bool:
        return self.dim == 0

    def r_values(self) -> np.ndarray:
        """Admissible ``r`` in storage order (descending)."""
        if self.empty:
            return np.zeros(0, dtype=int)
        return np.arange(self.r_max, self.r_min - 1, -2)

    def index(self, r: int) -> int:
        if self.empty or (r - self.r_max) % 2 or not self.r_min <= r <= self.r_max:
            raise ValueError(f"r={r} is not admissible in block {self}")
        return (self.r_max - r) // 2

    def adjoint(self) -> "BlockLabel":
        return BlockLabel(self.Ntilde, self.N, -self.nu)

    @property
    def is_diagonal(self) -> bool:
        return self.N == self.Ntilde and self.nu == 0

    @classmethod
    def of(cls, N: int, Ntilde: int, r: int, rtilde: int) -> "BlockLabel":
        check_ket(N, r)
        check_ket(Ntilde, rtilde)
        return cls(N, Ntilde, r - rtilde)


def blocks_up_to(nmax: int) -> Iterator[BlockLabel]:
    """All non-empty blocks with ``N, Nt <= nmax``."""
    for N in range(nmax + 1):
        for Nt in range(nmax + 1):
            for nu in range(-N - Nt, N + Nt + 1, 2):
                lab = BlockLabel(N, Nt, nu)
                if not lab.empty:
                    yield lab


@dataclass
class DensityState:
    """Density operator expanded in the ``f^{(N,Nt)}_{r;rt}`` basis.

    Both members of each Hermitian pair of blocks are stored explicitly.
    """

    blocks: dict[BlockLabel, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for lab, vec in self.blocks.items():
            vec = np.asarray(vec, dtype=complex)
            if vec.shape != (lab.dim,):
                raise ValueError(f"block {lab} needs {lab.dim} coefficients, got shape {vec.shape}")
            clean[lab] = vec
        self.blocks = dict(sorted(clean.items()))

    # construction -----------------------------------------------------
    @classmethod
    def from_elements(cls, elements: Iterable[tuple[int, int, int, int, complex]]) -> "DensityState":
        """Build from ``(N, Nt, r, rt, value)`` tuples; repeated entries add."""
        blocks: dict[BlockLabel, np.ndarray] = {}
        for N, Nt, r, rt, val in elements:
            lab = BlockLabel.of(N, Nt, r, rt)
            if lab not in blocks:
                blocks[lab] = np.zeros(lab.dim, dtype=complex)
            blocks[lab][lab.index(r)] += val
        return cls(blocks)

    @classmethod
    def from_fock_matrix(cls, rho: np.ndarray, nmax: int, atol: float = 0.0) -> "DensityState":
        """Decompose a matrix over ``|n1, n2>`` (``n1, n2 <= nmax``) into blocks.

        Row/column index is ``n1 * (nmax + 1) + n2``. Entries with modulus
        ``<= atol`` are dropped.
        """
        dim = (nmax + 1) ** 2
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix for nmax={nmax}, got {rho.shape}")
        rows, cols = np.nonzero(np.abs(rho) > atol)
        elems = []
        for i, j in zip(rows, cols):
            n1, n2 = divmod(int(i), nmax + 1)
            m1, m2 = divmod(int(j), nmax + 1)
            elems.append((n1 + n2, m1 + m2, n1 - n2, m1 - m2, rho[i, j]))
        return cls.from_elements(elems)

    @classmethod
    def from_records(cls, records) -> "DensityState":
        """Inverse of :meth:`to_records`."""
        elems = []
        for rec in records:
            if len(rec) != 6:
                raise ValueError(f"record must be [N, Ntilde, r, rtilde, re, im], got {rec!r}")
            N, Nt, r, rt, re, im = rec
            elems.append((int(N), int(Nt), int(r), int(rt), complex(float(re), float(im))))
        return cls.from_elements(elems)

    def to_records(self) -> list[list]:
        out = []
        for lab, vec in self.blocks.items():
            for r, c in zip(lab.r_values(), vec):
                out.append([lab.N, lab.Ntilde, int(r), int(r - lab.nu), float(c.real), float(c.imag)])
        return out

    # access -----------------------------------------------------------
    def __iter__(self):
        return iter(self.blocks.items())

    def copy(self) -> "DensityState":
        return DensityState({k: v.copy() for k, v in self.blocks.items()})

    def coefficient(self, N: int, Ntilde: int, r: int, rtilde: int) -> complex:
        lab = BlockLabel.of(N, Ntilde, r, rtilde)
        vec = self.blocks.get(lab)
        return 0j if vec is None else complex(vec[lab.index(r)])

    def elements(self) -> Iterator[tuple[int, int, int, int, complex]]:
        for lab, vec in self.blocks.items():
            for r, c in zip(lab.r_values(), vec):
                yield lab.N, lab.Ntilde, int(r), int(r - lab.nu), complex(c)

    @property
    def max_N(self) -> int:
        return max((max(lab.N, lab.Ntilde) for lab in self.blocks), default=0)

    def supported_N(self) -> list[int]:
        return sorted({n for lab in self.blocks for n in (lab.N, lab.Ntilde)})

    # scalar diagnostics ----------------------------------------------
    def trace(self) -> complex:
        return complex(sum(vec.sum() for lab, vec in self.blocks.items() if lab.is_diagonal))

    def purity(self) -> float:
        return float(sum(np.vdot(v, v).real for v in self.blocks.values()))

    def hermiticity_error(self) -> float:
        err = 0.0
        for lab, vec in self.blocks.items():
            other = self.blocks.get(lab.adjoint())
            partner = np.zeros_like(vec) if other is None else other
            err = max(err, float(np.max(np.abs(vec - partner.conj()), initial=0.0)))
        return err

    def distance(self, other: "DensityState") -> float:
        """Entrywise l1 distance between coefficient sets."""
        labels = set(self.blocks) | set(other.blocks)
        tot = 0.0
        for lab in labels:
            a = self.blocks.get(lab, np.zeros(lab.dim))
            b = other.blocks.get(lab, np.zeros(lab.dim))
            tot += float(np.abs(a - b).sum())
        return tot

    # dense reconstruction --------------------------------------------
    def kets(self) -> list[KetLabel]:
        return [KetLabel(N, int(r)) for N in self.supported_N() for r in range(N, -N - 1, -2)]

    def to_matrix(self, kets: list[KetLabel] | None = None) -> tuple[np.ndarray, list[KetLabel]]:
        """Dense operator on the span of the supported subspaces."""
        if kets is None:
            kets = self.kets()
        pos = {k: i for i, k in enumerate(kets)}
        rho = np.zeros((len(kets), len(kets)), dtype=complex)
        for N, Nt, r, rt, c in self.elements():
            rho[pos[KetLabel(N, r)], pos[KetLabel(Nt, rt)]] += c
        return rho, kets

    def min_eigenvalue(self) -> float:
        rho, _ = self.to_matrix()
        if rho.size == 0:
            return 0.0
        return float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
