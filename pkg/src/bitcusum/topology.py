"""Sensor network graphs and doubly stochastic consensus weights.

The network is an undirected connected graph on N sensors, a subset of which
are secure (cannot be compromised). Consensus averaging uses a symmetric
weight matrix

    W = I - c * L,    c = 2 / (sigma_1(L)^2 + sigma_{N-1}(L)^2)

where L = D - A is the graph Laplacian and sigma_i are its singular values in
decreasing order. For a connected graph this W satisfies

    1^T W = 1^T,  W 1 = 1,  sigma_2(W) < 1,

which is what the averaging analysis needs: powers of W converge to the
projector J = (1/N) 11^T at geometric rate sigma_2(W).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DisconnectedGraph, DomainError, SpectralGapViolation

SPECTRAL_TOL = 1e-9


@dataclass(frozen=True)
class NetworkTopology:
    """Undirected graph on sensors 0..n-1 with a designated secure subset."""

    n_sensors: int
    edges: tuple[tuple[int, int], ...]
    secure: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.n_sensors < 2:
            raise DomainError("need at least 2 sensors")
        seen = set()
        canon = []
        for a, b in self.edges:
            if not (0 <= a < self.n_sensors and 0 <= b < self.n_sensors):
                raise DomainError(f"edge ({a}, {b}) references a sensor outside 0..{self.n_sensors - 1}")
            if a == b:
                raise DomainError(f"self-loop at sensor {a}")
            key = (min(a, b), max(a, b))
            if key in seen:
                continue
            seen.add(key)
            canon.append(key)
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        for j in self.secure:
            if not 0 <= j < self.n_sensors:
                raise DomainError(f"secure sensor {j} outside 0..{self.n_sensors - 1}")
        object.__setattr__(self, "secure", tuple(sorted(set(self.secure))))
        if not self._connected():
            raise DisconnectedGraph("graph is not connected")

    def _connected(self) -> bool:
        adj = [[] for _ in range(self.n_sensors)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n_sensors

    @property
    def insecure(self) -> tuple[int, ...]:
        sec = set(self.secure)
        return tuple(j for j in range(self.n_sensors) if j not in sec)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n_sensors, self.n_sensors))
        for i, j in self.edges:
            a[i, j] = 1.0
            a[j, i] = 1.0
        return a

    def laplacian(self) -> np.ndarray:
        a = self.adjacency()
        return np.diag(a.sum(axis=1)) - a


@dataclass(frozen=True)
class WeightMatrix:
    """Consensus weights with cached spectral data."""

    matrix: np.ndarray
    sigma2: float
    report: "ValidationReport" = field(repr=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ValidationReport:
    """Checks of the averaging conditions on a candidate weight matrix."""

    row_sum_error: float
    col_sum_error: float
    sigma2: float
    ok: bool
    messages: tuple[str, ...] = ()


def validate_condition1(w: np.ndarray, tol: float = SPECTRAL_TOL) -> ValidationReport:
    """Check 1^T W = 1^T, W 1 = 1 and sigma_2(W) strictly inside (0, 1).

    sigma_2(W) is the second largest singular value; for the symmetric W
    built here it equals the largest singular value of W - J.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DomainError("weight matrix must be square")
    n = w.shape[0]
    ones = np.ones(n)
    row_err = float(np.max(np.abs(w @ ones - ones)))
    col_err = float(np.max(np.abs(ones @ w - ones)))
    j = np.full((n, n), 1.0 / n)
    sig = float(np.linalg.svd(w - j, compute_uv=False)[0])
    msgs = []
    if row_err > tol:
        msgs.append(f"row sums deviate from 1 by {row_err:.3e}")
    if col_err > tol:
        msgs.append(f"column sums deviate from 1 by {col_err:.3e}")
    if not sig < 1.0 - tol:
        msgs.append(f"sigma_2(W) = {sig:.6f} is not strictly below 1")
    if not sig > 0.0:
        msgs.append("sigma_2(W) is zero")
    return ValidationReport(
        row_sum_error=row_err,
        col_sum_error=col_err,
        sigma2=sig,
        ok=not msgs,
        messages=tuple(msgs),
    )


def build_laplacian_weights(topology: NetworkTopology) -> WeightMatrix:
    """W = I - 2 L / (sigma_1(L)^2 + sigma_{N-1}(L)^2), validated."""
    lap = topology.laplacian()
    svals = np.linalg.svd(lap, compute_uv=False)
    c = 2.0 / (svals[0] ** 2 + svals[-2] ** 2)
    w = np.eye(topology.n_sensors) - c * lap
    report = validate_condition1(w)
    if not report.ok:
        # Unreachable for a connected graph with this c, kept as a guard.
        raise SpectralGapViolation("; ".join(report.messages))
    return WeightMatrix(matrix=w, sigma2=report.sigma2, report=report)


def ring_topology(n: int, secure: tuple[int, ...] = ()) -> NetworkTopology:
    """Cycle graph on n sensors."""
    edges = tuple((i, (i + 1) % n) for i in range(n))
    return NetworkTopology(n_sensors=n, edges=edges, secure=secure)


def mesh12_topology() -> NetworkTopology:
    """A 12-sensor mesh used by the demos: a ring plus a chord matching.

    The chords pair each sensor with one non-neighbour, chosen to make the
    consensus matrix mix as fast as the Laplacian weight rule allows on a
    3-regular 12-node graph (sigma2 about 0.903).
    """
    edges = [(i, (i + 1) % 12) for i in range(12)]
    edges += [(0, 8), (1, 5), (2, 9), (3, 7), (4, 10), (6, 11)]
    return NetworkTopology(n_sensors=12, edges=tuple(edges), secure=(0, 1, 2, 3))


def parse_topology_file(path: str) -> NetworkTopology:
    """Read a topology description.

    Line-oriented format, `#` starts a comment, sensors are 1-based:

        n_sensors 4
        edge 1 2
        edge 2 3
        secure 1 3
    """
    n = None
    edges: list[tuple[int, int]] = []
    secure: list[int] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            kind = parts[0]
            if kind not in ("n_sensors", "edge", "secure"):
                raise DomainError(f"{path}:{lineno}: unknown directive {kind!r}")
            try:
                values = [int(p) for p in parts[1:]]
            except ValueError as exc:
                raise DomainError(f"{path}:{lineno}: malformed line {line!r}") from exc
            if kind == "n_sensors":
                if len(values) != 1:
                    raise DomainError(f"{path}:{lineno}: malformed line {line!r}")
                n = values[0]
                continue
            if n is None:
                raise DomainError(f"{path}:{lineno}: n_sensors must come first")
            bad = [v for v in values if not 1 <= v <= n]
            if bad:
                raise DomainError(f"{path}:{lineno}: sensor {bad[0]} outside 1..{n}")
            if kind == "edge":
                if len(values) != 2:
                    raise DomainError(f"{path}:{lineno}: malformed line {line!r}")
                edges.append((values[0] - 1, values[1] - 1))
            else:
                secure.extend(v - 1 for v in values)
    if n is None:
        raise DomainError(f"{path}: missing n_sensors directive")
    try:
        return NetworkTopology(n_sensors=n, edges=tuple(edges), secure=tuple(secure))
    except DomainError as exc:
        raise DomainError(f"{path}: {exc}") from exc


def write_topology_file(path: str, topology: NetworkTopology) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"n_sensors {topology.n_sensors}\n")
        for a, b in topology.edges:
            fh.write(f"edge {a + 1} {b + 1}\n")
        if topology.secure:
            fh.write("secure " + " ".join(str(j + 1) for j in topology.secure) + "\n")
