"""Discretized integral equations ``g_n(t) = int_{t sin(theta)}^{R} f_n(rho) K_n(t/rho) drho``.

Unknowns are ``f_n(t_k)`` on the punctured radial grid ``t_k = k h``,
``h = (R - epsilon)/M``, ``k = 1..M``. Two quadratures are available:

``"trapezoid"`` (default)
    Nodal rule: the product ``f_n K_n`` is interpolated linearly, giving
    weights ``h/2`` at the end nodes and ``h`` in between. Nodes at or beyond
    the kernel singularity get weight zero. The singular lower endpoint limits
    convergence of the rule itself to ``h^{1/2}``.
``"product"``
    Product integration: ``f_n`` is replaced by its piecewise-linear
    interpolant and the product with the exact kernel is integrated on every
    cell. The substitution ``rho = t sin(theta) + u^2`` removes the inverse
    square-root singularity at the lower limit, the kernel jump at
    ``rho = t`` falls on a grid node, and Gauss-Legendre rules are applied on
    pieces short enough to resolve the phase ``exp(i n psi)``. Below ``t_1``
    the first cell's interpolant is extended linearly. Second-order accurate.
"""

from dataclasses import dataclass, field
import math
from pathlib import Path
import struct

import numpy as np

from .errors import ConfigurationError, DomainError, RankDeficiencyError
from .forward import radial_grid
from .geometry import AcquisitionConfig
from .kernels import kernel_K

SCHEMES = ("product", "trapezoid")
GAUSS_POINTS = 8
PHASE_PER_PIECE = 1.0
MAGIC = b"BRTOPv1"
_HEADER = struct.Struct("<7sIIIdddb")


@dataclass
class SystemMatrix:
    n: int
    cfg: AcquisitionConfig
    M: int
    epsilon: float
    entries: np.ndarray
    scheme: str = "trapezoid"

    @property
    def h(self):
        return (self.cfg.R - self.epsilon) / self.M

    @property
    def radii(self):
        return radial_grid(self.M, self.cfg.R, self.epsilon)


@dataclass
class TruncatedOperator:
    """Rank-``r`` pseudoinverse ``V D_r^{-1} U^H`` of one system matrix."""

    n: int
    rank: int
    singular_values: np.ndarray
    pinv: np.ndarray
    u: np.ndarray = field(default=None, repr=False)
    vh: np.ndarray = field(default=None, repr=False)

    @property
    def condition_number(self):
        """``sigma_1 / sigma_r`` of the truncated matrix."""
        return self.singular_values[0] / self.singular_values[self.rank - 1]

    @property
    def full_condition_number(self):
        s = self.singular_values
        return np.inf if s[-1] == 0 else s[0] / s[-1]

    @property
    def truncation_error(self):
        """Spectral-norm distance ``sigma_{r+1}`` to the untruncated matrix."""
        s = self.singular_values
        return s[self.rank] if self.rank < len(s) else 0.0

    def low_rank(self):
        """The rank-``r`` approximation ``U D_r V^H`` (needs the factors, so not after a cache load)."""
        if self.u is None:
            raise ValueError("singular vectors are not available for this operator")
        r = self.rank
        return (self.u[:, :r] * self.singular_values[:r]) @ self.vh[:r]


def lower_index(i, sin_theta):
    """Largest ``l >= 0`` with ``t_l <= t_i sin(theta)`` on a uniform grid, robust to rounding."""
    return np.floor(np.asarray(i) * sin_theta + 1e-9).astype(int)


def _gauss_legendre():
    x, w = np.polynomial.legendre.leggauss(GAUSS_POINTS)
    return 0.5 * (x + 1), 0.5 * w


@dataclass
class QuadraturePlan:
    """Harmonic-independent part of the product-integration rule.

    Quadrature points carry the row index, the two hat-function columns they
    feed, ``2 rho / sqrt(rho + p)`` times the Gauss weight (the kernel modulus
    times the Jacobian of ``rho = p + u^2``), the hat-function values, the
    angle ``arcsin(p / rho)`` and whether ``rho < t_i``.
    """

    M: int
    theta: float
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    basis: np.ndarray
    asin: np.ndarray
    inner: np.ndarray


def quadrature_plan(cfg, M, epsilon, n_max):
    """Build the product-integration rule resolving phases up to harmonic ``|n_max|``."""
    t = radial_grid(M, cfg.R, epsilon)
    h = t[0]
    s = math.sin(cfg.theta)
    rows, lefts, a, b = [], [], [], []
    for i in range(M):
        p = t[i] * s
        start = int(np.searchsorted(t, p, side="right"))
        if start == 0:
            rows.append(i), lefts.append(0), a.append(p), b.append(t[0])
            start = 1
        k = np.arange(start - 1, M - 1)
        rows.extend([i] * len(k))
        lefts.extend(k)
        a.extend(np.maximum(t[k], p))
        b.extend(t[k + 1])
    rows = np.asarray(rows)
    lefts = np.asarray(lefts)
    a = np.asarray(a)
    b = np.asarray(b)
    p = t[rows] * s
    ua = np.sqrt(np.maximum(a - p, 0.0))
    ub = np.sqrt(b - p)
    phase = np.arcsin(np.minimum(p / a, 1.0)) - np.arcsin(p / b)
    pieces = np.maximum.reduce([
        np.ones_like(rows),
        np.ceil(abs(n_max) * phase / PHASE_PER_PIECE).astype(int),
        np.ceil((ub - ua) / (0.5 * np.sqrt(p))).astype(int),
    ])
    # split every cell into equal pieces in u, then place Gauss nodes on each
    cell = np.repeat(np.arange(len(rows)), pieces)
    offset = np.arange(len(cell)) - np.repeat(np.cumsum(pieces) - pieces, pieces)
    du = (ub - ua)[cell] / pieces[cell]
    x, w = _gauss_legendre()
    u = (ua[cell] + offset * du)[:, None] + du[:, None] * x[None, :]
    wu = du[:, None] * w[None, :]
    cell = np.broadcast_to(cell[:, None], u.shape).ravel()
    u = u.ravel()
    wu = wu.ravel()
    p = p[cell]
    rho = p + u * u
    left = lefts[cell]
    right = t[left + 1]
    phi_left = (right - rho) / h
    return QuadraturePlan(
        M=M,
        theta=cfg.theta,
        rows=rows[cell],
        cols=left,
        weights=wu * 2 * rho / np.sqrt(rho + p),
        basis=np.stack([phi_left, 1.0 - phi_left]),
        asin=np.arctan2(p, u * np.sqrt(rho + p)),
        inner=rho < t[rows[cell]],
    )


def _straight_part(M, h):
    """Exact integral of the linear interpolant over ``[t_i, t_M]`` (the ``1`` in the kernel)."""
    A = np.triu(np.full((M, M), h))
    A[np.diag_indices(M)] = h / 2
    A[:, -1] = h / 2
    A[-1, -1] = 0.0
    return A


def _product_entries(n, cfg, plan):
    th = cfg.theta
    sign = -1.0 if n % 2 else 1.0
    # phase factors of K^2 (all points) and K^1 (points with rho < t); their
    # common modulus and the Jacobian are folded into plan.weights
    phase = sign * np.exp(1j * n * (plan.asin + th))
    phase = phase + np.where(plan.inner, np.exp(1j * n * (th - plan.asin)), 0.0)
    val = phase * plan.weights
    M = plan.M
    flat = np.zeros(M * M, dtype=complex)
    for side in (0, 1):
        idx = plan.rows * M + plan.cols + side
        wv = val * plan.basis[side]
        flat += np.bincount(idx, weights=wv.real, minlength=M * M)
        flat += 1j * np.bincount(idx, weights=wv.imag, minlength=M * M)
    return flat.reshape(M, M)


def _trapezoid_entries(n, cfg, M, epsilon):
    t = radial_grid(M, cfg.R, epsilon)
    h = t[0]
    s = math.sin(cfg.theta)
    i = np.arange(1, M + 1)[:, None]
    k = np.arange(1, M + 1)[None, :]
    first = np.maximum(lower_index(i, s), 1)
    weight = np.where((k == first) | (k == M), h / 2, h)
    weight = np.where(k >= first, weight, 0.0)
    ratio = np.broadcast_to(t[:, None] / t[None, :], (M, M))
    # nodes at (or rounding-close to) the singular point contribute nothing
    ok = (weight > 0) & (ratio * s < 1 - 1e-9)
    entries = np.zeros((M, M), dtype=complex)
    entries[ok] = weight[ok] * kernel_K(ratio[ok], n, cfg.theta)
    return entries


def assemble(n, cfg, M, epsilon=0.001, scheme="trapezoid", plan=None):
    """System matrix ``A_n`` with ``(A_n F)_i`` approximating ``g_n(t_i)``.

    ``plan`` lets callers reuse one :func:`quadrature_plan` (built for the
    largest ``|n|`` they need) across harmonics.
    """
    if M < 2:
        raise DomainError(f"M must be at least 2, got {M}")
    if not (0 < epsilon < cfg.R):
        raise DomainError(f"epsilon must lie in (0, R), got {epsilon}")
    if scheme == "product":
        if plan is None:
            plan = quadrature_plan(cfg, M, epsilon, n)
        elif plan.M != M or plan.theta != cfg.theta:
            raise ConfigurationError("quadrature plan was built for a different grid")
        entries = _product_entries(n, cfg, plan) + _straight_part(M, (cfg.R - epsilon) / M)
    elif scheme == "trapezoid":
        entries = _trapezoid_entries(n, cfg, M, epsilon)
    else:
        raise DomainError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if cfg.chirality == -1:
        entries = entries.conj()
    return SystemMatrix(n=n, cfg=cfg, M=M, epsilon=epsilon, entries=entries, scheme=scheme)


def forward_apply(A, f):
    f = np.asarray(f)
    if f.shape[0] != A.M:
        raise DomainError(f"expected {A.M} samples, got {f.shape[0]}")
    return A.entries @ f


def truncated_svd(A, rank):
    """Rank-``rank`` TSVD of ``A``; raises :class:`RankDeficiencyError` if ``sigma_rank`` vanishes."""
    M = A.M if isinstance(A, SystemMatrix) else np.asarray(A).shape[1]
    n = A.n if isinstance(A, SystemMatrix) else 0
    mat = A.entries if isinstance(A, SystemMatrix) else np.asarray(A)
    if not (1 <= rank <= M):
        raise DomainError(f"rank must lie in [1, {M}], got {rank}")
    u, sv, vh = np.linalg.svd(mat)
    tiny = sv[0] * max(mat.shape) * np.finfo(float).eps
    if sv[rank - 1] <= tiny:
        usable = int(np.count_nonzero(sv > tiny))
        raise RankDeficiencyError(
            f"harmonic {n}: rank {rank} requested but only {usable} singular values are nonzero",
            usable_rank=usable, n=n)
    pinv = (vh[:rank].conj().T / sv[:rank]) @ u[:, :rank].conj().T
    return TruncatedOperator(n=n, rank=rank, singular_values=sv, pinv=pinv, u=u, vh=vh)


def solve(op, g):
    g = np.asarray(g)
    if g.shape[0] != op.pinv.shape[1]:
        raise DomainError(f"expected {op.pinv.shape[1]} data values, got {g.shape[0]}")
    return op.pinv @ g


def default_rank(M, rank_fraction=0.5):
    """Truncation rank ``floor(M * rank_fraction)``, at least 1."""
    return max(1, min(M, int(math.floor(M * rank_fraction + 1e-9))))


def write_cache(path, operators, cfg, M, N, epsilon):
    """Binary little-endian operator cache.

    Header: magic ``BRTOPv1``, u32 ``M, N, rank``, f64 ``R, theta, epsilon``,
    i8 chirality. Then per harmonic: u32 ``n``, ``M`` f64 singular values and
    the ``M x M`` pseudoinverse as interleaved (re, im) f64, row-major.
    """
    path = Path(path)
    ranks = {op.rank for op in operators}
    if len(ranks) != 1:
        raise ConfigurationError(f"operators must share one rank, got {sorted(ranks)}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, M, N, ranks.pop(), cfg.R, cfg.theta, epsilon, cfg.chirality))
        for op in operators:
            fh.write(struct.pack("<I", op.n))
            fh.write(np.ascontiguousarray(op.singular_values, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(op.pinv, dtype="<c16").tobytes())
    return path


@dataclass
class OperatorCache:
    cfg: AcquisitionConfig
    M: int
    N: int
    rank: int
    epsilon: float
    operators: list

    def metadata(self):
        return {"R": self.cfg.R, "theta": self.cfg.theta, "chirality": self.cfg.chirality,
                "M": self.M, "N": self.N, "epsilon": self.epsilon}


def read_cache(path):
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size or data[:7] != MAGIC:
        raise ConfigurationError(f"{path} is not an operator cache")
    magic, M, N, rank, R, theta, epsilon, chirality = _HEADER.unpack_from(data, 0)
    cfg = AcquisitionConfig(R=R, theta=theta, chirality=chirality)
    pos = _HEADER.size
    block = 4 + 8 * M + 16 * M * M
    count = N // 2 + 1
    if len(data) != pos + count * block:
        raise ConfigurationError(f"{path}: expected {count} operators of size {M}")
    operators = []
    for _ in range(count):
        (n,) = struct.unpack_from("<I", data, pos)
        sv = np.frombuffer(data, "<f8", M, pos + 4).astype(float)
        pinv = np.frombuffer(data, "<c16", M * M, pos + 4 + 8 * M).astype(complex).reshape(M, M)
        operators.append(TruncatedOperator(n=n, rank=rank, singular_values=sv, pinv=pinv))
        pos += block
    return OperatorCache(cfg=cfg, M=M, N=N, rank=rank, epsilon=epsilon, operators=operators)
