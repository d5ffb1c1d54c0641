"""Constant-sum couplings with prescribed marginals.

The elliptical construction closes a planar polygon with side lengths
sigma_i: unit vectors v_i with sum sigma_i v_i = 0 exist exactly when the
scale inequality holds, and the rank-2 scatter matrix sigma_i sigma_j
<v_i, v_j> has zero total mass, so row sums of joint draws collapse to the
sum of the locations with no moment assumptions.  Shared scalars (a mixing
draw W, a slash uniform U, a scale-mixture theta) are drawn once per joint
sample and applied to every component.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .families import Elliptical, UnivariateFamily
from .generators import CharacteristicGenerator, mixing_law
from .mixability import check_scale_inequality
from . import oracle

__all__ = [
    "PolygonInequalityError",
    "EquicorrelationPlan",
    "SampleBatch",
    "MatrixSampleBatch",
    "polygon_unit_vectors",
    "elliptical_jm_covariance",
    "sample_jm_elliptical",
    "sample_jm_slash",
    "sample_cm_scale_mixture",
    "sample_matrix_variate_cm",
    "transform_center",
    "psd_factor",
]

_FLOAT_FMT = "%.17g"


class PolygonInequalityError(ValueError):
    """No closed polygon exists: sum sigma_i < 2 max sigma_i."""


# ---------------------------------------------------------------------------
# Polygon construction
# ---------------------------------------------------------------------------

def _triangle_vectors(s1, s2, s3):
    # vertices (0,0), (s1,0), (x,y); edge vectors normalised
    x = (s1 * s1 + s3 * s3 - s2 * s2) / (2.0 * s1)
    y = math.sqrt(max(s3 * s3 - x * x, 0.0))
    p2 = np.array([x, y])
    v1 = np.array([1.0, 0.0])
    v2 = (p2 - np.array([s1, 0.0])) / s2
    v3 = -p2 / s3
    return np.vstack([v1, v2, v3])


def polygon_unit_vectors(sigmas) -> np.ndarray:
    """n planar unit vectors with sum sigma_i v_i = 0.

    n = 2 is antithetic, n = 3 closes a triangle by the law of cosines, and
    n >= 4 merges the two smallest sides (which preserves the polygon
    inequality) until a triangle remains, then assigns the merged direction
    to both original sides.  Deterministic for a fixed input order.
    """
    sig = np.asarray([float(s) for s in sigmas])
    n = sig.size
    if n < 2:
        raise PolygonInequalityError("need at least two sides")
    if np.any(sig <= 0):
        raise ValueError("sides must be positive")
    if not check_scale_inequality(sig):
        raise PolygonInequalityError(
            f"polygon inequality fails: sum={sig.sum()} < 2*max={2 * sig.max()}"
        )
    if n == 2:
        return np.array([[1.0, 0.0], [-1.0, 0.0]])
    if n == 3:
        return _triangle_vectors(sig[0], sig[1], sig[2])
    order = np.argsort(sig, kind="stable")
    i, j = sorted((int(order[0]), int(order[1])))
    reduced = [s for k, s in enumerate(sig) if k != j]
    reduced[i if i < j else i - 1] = sig[i] + sig[j]
    sub = polygon_unit_vectors(reduced)
    out = np.empty((n, 2))
    sub_iter = iter(range(n - 1))
    merged_row = None
    for k in range(n):
        if k == j:
            continue
        row = next(sub_iter)
        out[k] = sub[row]
        if k == i:
            merged_row = sub[row]
    out[j] = merged_row
    return out


def elliptical_jm_covariance(sigmas) -> np.ndarray:
    """Rank <= 2 PSD scatter matrix with diagonal sigma_i^2 and zero total
    entry sum, from the polygon unit vectors."""
    sig = np.asarray([float(s) for s in sigmas])
    vs = polygon_unit_vectors(sig)
    L = sig[:, None] * vs
    return L @ L.T


def psd_factor(M: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Factor L with L L^T = M via eigendecomposition.

    Eigenvalues below -1e-10 * trace are rejected; smaller negatives are
    numerical noise and are clipped to zero.
    """
    M = np.asarray(M, dtype=float)
    vals, vecs = np.linalg.eigh((M + M.T) / 2.0)
    floor = -1e-10 * max(np.trace(M), 1e-300)
    if np.any(vals < floor):
        raise ValueError(f"{name} is not positive semidefinite")
    vals = np.clip(vals, 0.0, None)
    return vecs * np.sqrt(vals)


# ---------------------------------------------------------------------------
# Equicorrelation plan (matrix-variate route)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquicorrelationPlan:
    """Phi = (1 - rho) I + rho e e^T with rho = -1/(n-1): unit diagonal,
    zero row sums, eigenvalues {0, n/(n-1)}."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")

    @property
    def rho(self) -> float:
        return -1.0 / (self.n - 1)

    @property
    def phi(self) -> np.ndarray:
        n = self.n
        return (1.0 - self.rho) * np.eye(n) + self.rho * np.ones((n, n))

    def factor(self) -> np.ndarray:
        return psd_factor(self.phi, "equicorrelation Phi")


# ---------------------------------------------------------------------------
# Sample batches
# ---------------------------------------------------------------------------

@dataclass
class SampleBatch:
    """N x n joint draws plus the metadata needed to replay and verify them."""

    data: np.ndarray
    seed: int
    joint_center: float
    kind: str
    metadata: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.data.shape[1]

    def row_sums(self) -> np.ndarray:
        return self.data.sum(axis=1)

    def write_csv(self, path, include_sum: bool = False) -> None:
        header = [f"X{i + 1}" for i in range(self.n)]
        if include_sum:
            header.append("S")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in self.data:
                cells = [_FLOAT_FMT % v for v in row]
                if include_sum:
                    cells.append(_FLOAT_FMT % row.sum())
                writer.writerow(cells)

    def sidecar(self) -> dict:
        return {
            "seed": self.seed,
            "joint_center": self.joint_center,
            "coupling": self.kind,
            "columns": self.n,
            "rows": int(self.data.shape[0]),
            **self.metadata,
        }

    def write_sidecar(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.sidecar(), fh, sort_keys=True, indent=2)
            fh.write("\n")


@dataclass
class MatrixSampleBatch:
    """Draws of n p-vectors: array of shape (N, p, n)."""

    data: np.ndarray
    seed: int
    kind: str
    metadata: dict = field(default_factory=dict)

    def column_sum_norms(self) -> np.ndarray:
        return np.linalg.norm(self.data.sum(axis=2), axis=1)


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

def _chunk_normals(rng, shape):
    return rng.standard_normal(shape)


def sample_jm_elliptical(mus, sigmas, g: CharacteristicGenerator, count: int, seed: int) -> SampleBatch:
    """Joint elliptical draws with row sums identically sum(mu).

    X = mu + sqrt(W) L z with L row i = sigma_i v_i and one shared mixing
    draw W per joint sample; each marginal is E_1(mu_i, sigma_i^2, psi).
    """
    mus = np.asarray([float(m) for m in mus])
    sig = np.asarray([float(s) for s in sigmas])
    if mus.size != sig.size:
        raise ValueError("mus and sigmas must have equal length")
    vs = polygon_unit_vectors(sig)
    L = sig[:, None] * vs  # (n, 2)
    rng = np.random.default_rng(seed)
    w = mixing_law(g).sample_with(rng, count)
    z = _chunk_normals(rng, (count, 2))
    data = mus[None, :] + np.sqrt(w)[:, None] * (z @ L.T)
    return SampleBatch(
        data=data,
        seed=seed,
        joint_center=float(mus.sum()),
        kind="elliptical",
        metadata={"generator": g.spec(), "sigmas": sig.tolist(), "mus": mus.tolist()},
    )


def sample_jm_slash(mus, sigmas, g: CharacteristicGenerator, q: float, count: int, seed: int) -> SampleBatch:
    """Slash-elliptical coupling: one shared U per joint draw divides a
    centered constant-sum elliptical vector, so sums stay at sum(mu)."""
    if q <= 0:
        raise ValueError("q must be positive")
    mus = np.asarray([float(m) for m in mus])
    sig = np.asarray([float(s) for s in sigmas])
    if mus.size != sig.size:
        raise ValueError("mus and sigmas must have equal length")
    vs = polygon_unit_vectors(sig)
    L = sig[:, None] * vs
    rng = np.random.default_rng(seed)
    w = mixing_law(g).sample_with(rng, count)
    z = _chunk_normals(rng, (count, 2))
    u = rng.uniform(size=count)
    centered = np.sqrt(w)[:, None] * (z @ L.T)
    data = mus[None, :] + centered / (u ** (1.0 / q))[:, None]
    return SampleBatch(
        data=data,
        seed=seed,
        joint_center=float(mus.sum()),
        kind="slash",
        metadata={
            "generator": g.spec(),
            "sigmas": sig.tolist(),
            "mus": mus.tolist(),
            "q": float(q),
        },
    )


def sample_cm_scale_mixture(
    base: UnivariateFamily,
    atoms,
    n: int,
    count: int,
    seed: int,
    ra_grid_m: int = 256,
    ra_restarts: int = 10,
) -> SampleBatch:
    """Scale mixture of a unimodal-symmetric base: one shared theta ~ H per
    joint draw scales a constant-sum n-tuple about the center.

    Elliptical bases get the exact polygon coupling conditionally on theta;
    other bases fall back to the rearrangement table at grid size ra_grid_m,
    whose residual row-sum spread is reported in the metadata.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not (base.symmetric and base.unimodal):
        raise ValueError("base must be unimodal and symmetric")
    atoms = [(float(v), float(p)) for v, p in atoms]
    if any(v <= 0 or p <= 0 for v, p in atoms):
        raise ValueError("H atoms need positive values and probabilities")
    probs = np.array([p for _, p in atoms])
    probs = probs / probs.sum()
    vals = np.array([v for v, _ in atoms])
    rng = np.random.default_rng(seed)
    theta = rng.choice(vals, p=probs, size=count)
    center = base.center
    meta: dict = {"base": base.spec(), "n": n, "H": [[v, p] for v, p in atoms]}
    if isinstance(base, Elliptical):
        vs = polygon_unit_vectors(np.ones(n))
        w = mixing_law(base.generator).sample_with(rng, count)
        z = _chunk_normals(rng, (count, 2))
        unit = z @ vs.T  # (count, n), sums to 0 per row
        data = center + (theta * np.sqrt(w) * base.sigma)[:, None] * unit
        meta["exact"] = True
    else:
        grid = oracle.discretize([base] * n, ra_grid_m)
        result = oracle.ra_minimize(grid, restarts=ra_restarts, seed=seed)
        table = result.apply(grid) - center  # centered rearrangement table
        rows = rng.integers(0, ra_grid_m, size=count)
        data = center + theta[:, None] * table[rows]
        meta["exact"] = False
        meta["ra_m"] = ra_grid_m
        meta["ra_spread"] = result.row_sum_spread
    return SampleBatch(
        data=data,
        seed=seed,
        joint_center=float(n * center),
        kind="scale_mixture",
        metadata=meta,
    )


def sample_matrix_variate_cm(
    p: int,
    sigma_p: np.ndarray,
    g: CharacteristicGenerator,
    n: int,
    count: int,
    seed: int,
) -> MatrixSampleBatch:
    """n identically distributed E_p(0, Sigma_p, psi) columns summing to the
    zero vector: X = sqrt(W) A G B^T with A A^T = Sigma_p and B B^T the
    equicorrelation matrix, whose zero row sums force X e = 0."""
    if p < 1:
        raise ValueError("p must be at least 1")
    plan = EquicorrelationPlan(n)
    A = psd_factor(np.asarray(sigma_p, dtype=float), "Sigma_p")
    if A.shape != (p, p):
        raise ValueError("Sigma_p must be p x p")
    B = plan.factor()  # (n, n)
    rng = np.random.default_rng(seed)
    w = mixing_law(g).sample_with(rng, count)
    gmat = _chunk_normals(rng, (count, p, n))
    data = np.sqrt(w)[:, None, None] * np.einsum("ij,kjl,ml->kim", A, gmat, B)
    return MatrixSampleBatch(
        data=data,
        seed=seed,
        kind="matrix_variate",
        metadata={"p": p, "n": n, "generator": g.spec(), "rho": plan.rho},
    )


def transform_center(f, C: float) -> float:
    """K = f(C): the constant value of f(sum) once the sum itself is
    constant at C."""
    return f(C)
