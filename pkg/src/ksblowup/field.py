"""Cell-centred finite-volume grids, discrete fields and energy functionals.

Interval grids cover ``[0, L]``.  Ball grids are radial: cell ``i`` is the shell
``[i h, (i+1) h]``, its volume is the exact shell volume and its centre sits at
``(i + 1/2) h`` so the coordinate singularity at ``r = 0`` is never evaluated.
Zero Neumann data is imposed by reflected ghost cells, which makes the face
flux through the outer boundary (and through ``r = 0``) vanish identically.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import KSError
from .exponents import DomainSpec, unit_ball_volume, unit_sphere_area

MIN_CELLS = 8


@dataclass(frozen=True, eq=False)
class Grid:
    spec: DomainSpec
    cells: int
    h: float
    centers: np.ndarray
    faces: np.ndarray
    face_areas: np.ndarray
    volumes: np.ndarray

    @property
    def measure(self) -> float:
        return self.spec.measure

    @property
    def dim(self) -> int:
        return self.spec.dim


def make_grid(spec: DomainSpec, cells: int) -> Grid:
    if cells < MIN_CELLS:
        raise KSError(f"grid needs at least {MIN_CELLS} cells, got {cells}")
    if spec.geometry == "interval":
        h = spec.length / cells
        faces = np.linspace(0.0, spec.length, cells + 1)
        areas = np.ones(cells + 1)
        volumes = np.full(cells, h)
    elif spec.geometry == "ball":
        n = spec.dim
        h = spec.radius / cells
        faces = np.linspace(0.0, spec.radius, cells + 1)
        areas = unit_sphere_area(n) * faces ** (n - 1)
        areas[0] = 0.0
        volumes = unit_ball_volume(n) * np.diff(faces ** n)
    else:
        raise KSError(f"geometry {spec.geometry!r} cannot be discretised")
    centers = 0.5 * (faces[:-1] + faces[1:])
    for arr in (centers, faces, areas, volumes):
        arr.setflags(write=False)
    return Grid(spec=spec, cells=cells, h=h, centers=centers, faces=faces,
                face_areas=areas, volumes=volumes)


@dataclass
class State:
    u: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def copy(self) -> "State":
        return State(self.u.copy(), self.v.copy(), self.t)


@dataclass(frozen=True)
class EnergySample:
    t: float
    phi: float
    u_max: float
    mass: float
    gradv_energy: float


@dataclass
class EnergySeries:
    samples: list[EnergySample]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples])

    def __len__(self) -> int:
        return len(self.samples)


def mass(u: np.ndarray, grid: Grid) -> float:
    return float(np.dot(u, grid.volumes))


def face_differences(w: np.ndarray, grid: Grid) -> np.ndarray:
    """One-sided gradients on the N-1 interior faces."""
    return np.diff(w) / grid.h


def cell_gradient(w: np.ndarray, grid: Grid) -> np.ndarray:
    """Centred cell gradient with reflected ghost cells at both ends.

    On a ball the inner ghost is the reflection through ``r = 0``, which is the
    same formula as the outer Neumann reflection.
    """
    padded = np.concatenate(([w[0]], w, [w[-1]]))
    return (padded[2:] - padded[:-2]) / (2.0 * grid.h)


def grad_norms(v: np.ndarray, grid: Grid, k: float) -> tuple[float, np.ndarray]:
    """``(int |grad v|^k, |grad v| per cell)`` using the centred stencil."""
    if k < 1:
        raise KSError(f"exponent k must be >= 1, got {k}")
    g = np.abs(cell_gradient(v, grid))
    return float(np.dot(g ** k, grid.volumes)), g


def p_energy(u: np.ndarray, alpha: float, p: float, grid: Grid) -> float:
    """(1/p) int (u + alpha)^p."""
    return float(np.dot((u + alpha) ** p, grid.volumes)) / p


def phi_measure(state: State, p: float, q: float, alpha: float, grid: Grid) -> float:
    """Phi = (1/p) int (u+alpha)^p + (1/q) int |grad v|^(2q)."""
    if p < 1 or q < 1:
        raise KSError(f"p and q must be >= 1, got p={p}, q={q}")
    gv, _ = grad_norms(state.v, grid, 2.0 * q)
    return p_energy(state.u, alpha, p, grid) + gv / q


def energy_sample(state: State, p: float, q: float, alpha: float, grid: Grid) -> EnergySample:
    gv, _ = grad_norms(state.v, grid, 2.0 * q)
    phi = p_energy(state.u, alpha, p, grid) + gv / q
    return EnergySample(t=state.t, phi=phi, u_max=float(np.max(state.u)),
                        mass=mass(state.u, grid), gradv_energy=gv)


def write_snapshot_csv(path: str | Path, state: State, grid: Grid) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "u", "v"])
        for x, u, v in zip(grid.centers, state.u, state.v):
            writer.writerow([repr(float(x)), repr(float(u)), repr(float(v))])


def read_snapshot_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or not {"x", "u", "v"} <= set(rows[0]):
        raise KSError(f"{path}: expected a CSV with columns x, u, v")
    cols = {k: np.array([float(r[k]) for r in rows]) for k in ("x", "u", "v")}
    return cols["x"], cols["u"], cols["v"]
