"""Coordinate-space pictures ``rho(x, x~)`` of single-mode density matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import hermite_functions


@dataclass
class Grid:
    """``rho(x, x~)`` sampled on a square grid; ``values`` is the real part."""

    xmin: float
    xmax: float
    steps: int
    values: np.ndarray
    imag: np.ndarray | None = None

    def __post_init__(self):
        if not self.xmin < self.xmax:
            raise ValueError(f"need xmin < xmax, got {self.xmin}, {self.xmax}")
        if self.steps < 2:
            raise ValueError(f"need at least 2 steps, got {self.steps}")
        if self.values.shape != (self.steps, self.steps) or not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be a finite steps x steps array")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.xmin, self.xmax, self.steps)

    def diagonal(self) -> np.ndarray:
        return np.diag(self.values).copy()

    def diagonal_mass(self) -> float:
        return float(np.trapezoid(self.diagonal(), self.x))

    @property
    def too_narrow(self) -> bool:
        return self.diagonal_mass() < 0.99

    def diagonal_maxima(self, rel_floor: float = 1e-6) -> np.ndarray:
        """Positions of strict local maxima along ``x = x~``."""
        d = self.diagonal()
        inner = (d[1:-1] > d[:-2]) & (d[1:-1] > d[2:]) & (d[1:-1] > rel_floor * d.max())
        return self.x[1:-1][inner]

    def maxima(self, rel_floor: float = 1e-3) -> list[tuple[float, float]]:
        """Local maxima of the full grid (8-neighbourhood)."""
        v = self.values
        core = v[1:-1, 1:-1]
        mask = core > rel_floor * v.max()
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di or dj:
                    mask &= core > v[1 + di:v.shape[0] - 1 + di, 1 + dj:v.shape[1] - 1 + dj]
        x = self.x
        return [(float(x[i + 1]), float(x[j + 1])) for i, j in zip(*np.nonzero(mask))]

    def to_csv(self, path) -> None:
        from .evolution import fmt

        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# {fmt(self.xmin)} {fmt(self.xmax)} {self.steps}\n")
            for row in self.values:
                fh.write(",".join(fmt(v) for v in row) + "\n")

    @classmethod
    def read_csv(cls, path) -> "Grid":
        with open(path, encoding="utf-8") as fh:
            head = fh.readline().lstrip("#").split()
            vals = np.loadtxt(fh, delimiter=",", ndmin=2)
        return cls(float(head[0]), float(head[1]), int(head[2]), vals)


def density_grid(rho, xmin: float = -6.0, xmax: float = 6.0, steps: int = 241) -> Grid:
    """Evaluate ``sum_{nm} rho_nm <x|n><m|x~>`` on a ``steps x steps`` grid."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("rho must be a square matrix")
    if not np.allclose(rho, rho.conj().T, atol=1e-10):
        raise ValueError("rho must be Hermitian")
    x = np.linspace(xmin, xmax, steps)
    psi = hermite_functions(rho.shape[0] - 1, x)
    full = psi.T @ rho @ psi
    imag = full.imag if np.iscomplexobj(full) and np.any(full.imag) else None
    return Grid(xmin, xmax, steps, np.ascontiguousarray(full.real), imag)
