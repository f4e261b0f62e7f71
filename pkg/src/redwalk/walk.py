"""The reduced random walk in the half-plane.

At step m the walk draws i uniformly from {1, 2, 3}. If i is a right
descent of the current element u the step is lazy; otherwise u becomes
u s_i and the walk crosses the line u(L_i). The limit point ζ lies on the
far side of every crossed line, so intersecting the corresponding
boundary arcs gives a certified bracket for ζ.

Angles are measured in the disk picture centered at the basepoint, with
∞ at angle 0.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from ._kernels_py import TWO_PI, endpoint_angle
from .errors import DescentAmbiguityError, DomainError, InternalInvariantError
from .hyperbolic import INF, Boundary, Isometry, Vertical, apply, line_through
from .triangle_group import GroupElement, TriangleConfig

__all__ = [
    "PRECISION_FLOOR",
    "WalkState",
    "WalkReport",
    "BatchSample",
    "EmpiricalCDF",
    "CouplingTable",
    "pack_params",
    "walk_stream",
    "run_walk",
    "walk_states",
    "batch_sample",
    "coupling_experiment",
    "bracket_estimate",
    "angle_of",
    "arc_contains",
    "write_trajectory_csv",
    "trajectory_rows",
    "thread_count",
]

# below this arc width double precision cannot separate crossed lines
PRECISION_FLOOR = 1e-12
BLOCK = 512
STATUS_NAMES = {kernels.OK: "converged", kernels.EXHAUSTED: "budget_exhausted",
                kernels.AMBIGUOUS: "ambiguous_descent", kernels.NONFINITE: "nonfinite"}


def thread_count(threads=None) -> int:
    if threads is None:
        threads = int(os.environ.get("REDWALK_THREADS", "0") or 0) or (os.cpu_count() or 1)
    return max(1, int(threads))


def walk_stream(seed: int, walk_index: int, domain: int = 0):
    """Philox bit generator keyed by (seed, walk index); step s uses raw draw s."""
    key = np.array([seed % (1 << 64), (walk_index + (domain << 63)) % (1 << 64)], dtype=np.uint64)
    return np.random.Philox(key=key)


def pack_params(config: TriangleConfig):
    gens, kinds, p1, p2, base, ends = [], [], [], [], [], []
    for i, L in enumerate(config.lines, 1):
        g = config.generator(i)
        gens.append((g.a, g.b, g.c, g.d))
        if isinstance(L, Vertical):
            kinds.append(0)
            p1.append(L.x)
            p2.append(0.0)
            ends.append(((L.x, 1.0), (1.0, 0.0)))
        else:
            kinds.append(1)
            p1.append(L.center)
            p2.append(L.radius)
            ends.append(((L.center - L.radius, 1.0), (L.center + L.radius, 1.0)))
        base.append(1.0 if config.base_side(i) > 0 else -1.0)
    return (tuple(gens), tuple(kinds), tuple(p1), tuple(p2), tuple(base), tuple(ends),
            config.z0.real, config.z0.imag)


def angle_of(b: Boundary, z0: complex) -> float:
    p, q = b.projective()
    return endpoint_angle(p, q, z0.real, z0.imag)


def boundary_of_angle(t: float, z0: complex) -> Boundary:
    t = t % TWO_PI
    s = math.sin(t / 2)
    if s == 0.0:
        return INF
    x = z0.real - z0.imag * math.cos(t / 2) / s
    return Boundary.computed(x)


def arc_contains(lo: float, hi: float, t: float, tol: float = 0.0) -> bool:
    """Whether angle t lies on the arc running counterclockwise from lo to hi."""
    return (t - lo + tol) % TWO_PI <= (hi - lo) + 2 * tol


def bracket_estimate(lo, hi, full, z0):
    """(estimate, unbounded_side) for a bracket; estimate is None for the full circle."""
    if full:
        return None, True
    k = math.ceil(lo / TWO_PI)
    unbounded = k * TWO_PI <= hi
    b = boundary_of_angle((lo + hi) / 2, z0)
    return b, unbounded


def _zeta_value(b: Boundary | None, unbounded: bool, lo: float, hi: float) -> float:
    if b is None:
        return math.nan
    if unbounded:
        # bracket straddles ∞: report the side the midpoint falls on
        return -math.inf if ((lo + hi) / 2) % TWO_PI < math.pi else math.inf
    return b.x


@dataclass
class WalkReport:
    seed: int
    walk_index: int
    status: str
    steps_taken: int
    moves: int
    bracket: tuple  # (lo, hi) disk angles, lo <= hi
    bracket_width: float
    full_circle: bool
    zeta_estimate: Boundary | None
    unbounded_side: bool
    element: tuple  # matrix entries (a, b, c, d)
    backend: str
    trajectory: list | None = None

    @property
    def flagged(self) -> bool:
        return self.status != "converged"

    @property
    def zeta(self) -> float:
        return _zeta_value(self.zeta_estimate, self.unbounded_side, *self.bracket)

    def to_json(self) -> dict:
        est = self.zeta_estimate
        return {
            "seed": self.seed,
            "walk_index": self.walk_index,
            "status": self.status,
            "steps_taken": self.steps_taken,
            "moves": self.moves,
            "bracket": list(self.bracket),
            "bracket_width": self.bracket_width,
            "full_circle": self.full_circle,
            "zeta_estimate": None if est is None else ("inf" if est.infinite else est.x),
            "unbounded_side": self.unbounded_side,
            "element": list(self.element),
            "backend": self.backend,
        }


def _check_status(status, seed, index):
    if status == kernels.AMBIGUOUS:
        raise DescentAmbiguityError(f"walk (seed={seed}, index={index}) hit an ambiguous descent test")
    if status == kernels.NONFINITE:
        raise InternalInvariantError(f"walk (seed={seed}, index={index}) produced non-finite geometry")


def _report(config, seed, index, out, backend, trajectory=None) -> WalkReport:
    status, steps, moves, full, lo, hi, a, b, c, d = out
    _check_status(status, seed, index)
    est, unbounded = bracket_estimate(lo, hi, full, config.z0)
    return WalkReport(seed, index, STATUS_NAMES[status], steps, moves, (lo, hi), hi - lo,
                      bool(full), est, unbounded, (a, b, c, d), backend, trajectory)


def run_walk(config: TriangleConfig, seed: int, max_steps: int, target_bracket_width: float = 1e-6,
             walk_index: int = 0, trajectory: bool = False, decimate: int = 1) -> WalkReport:
    """Run one seeded walk until its bracket is narrower than the target or the budget ends.

    Widths below PRECISION_FLOOR are not attempted. With ``trajectory`` the
    Python kernel is used and every ``decimate``-th step is kept.
    """
    if max_steps < 0:
        raise DomainError("max_steps must be nonnegative")
    target = max(float(target_bracket_width), PRECISION_FLOOR)
    params = pack_params(config)
    bg = walk_stream(seed, walk_index)
    if not trajectory:
        out = kernels.walk_one(params, bg, max_steps, target)
        return _report(config, seed, walk_index, out, kernels.BACKEND)
    trace = []
    out = kernels.python.walk_one(params, bg, max_steps, target, trace)
    rows = []
    z0 = config.z0
    for k, (step, r, lazy, a, b, c, d, lo, hi, full, _) in enumerate(trace):
        if k % max(1, decimate) and k != len(trace) - 1:
            continue
        z = apply(Isometry(a, b, c, d), z0)
        rows.append({"step": step, "index": r + 1, "re": z.real, "im": z.imag, "lazy": lazy,
                     "bracket_lo": lo, "bracket_hi": hi, "full": bool(full)})
    return _report(config, seed, walk_index, out, "python", rows)


# ---------------------------------------------------------------------------
# step-level states


def _round_sig(x: float) -> float:
    return float(f"{x:.9g}")


def line_fingerprint(e1: Boundary, e2: Boundary):
    """(model form, rounded ideal endpoints) identifying a crossed line."""
    pts = sorted(math.inf if e.infinite else _round_sig(e.x) for e in (e1, e2))
    form = "vertical" if math.isinf(pts[1]) else "semicircle"
    return (form, pts[0], pts[1])


@dataclass
class WalkState:
    step: int
    index: int
    lazy: bool
    z: complex
    element: GroupElement
    crossed: list = field(repr=False)
    bracket: tuple  # (lo, hi) or None for the full circle


def walk_states(config: TriangleConfig, seed: int, max_steps: int,
                target_bracket_width: float = 1e-6, walk_index: int = 0):
    """Every intermediate state of a walk, from the step-recording Python kernel."""
    target = max(float(target_bracket_width), PRECISION_FLOOR)
    trace = []
    out = kernels.python.walk_one(pack_params(config), walk_stream(seed, walk_index),
                                  max_steps, target, trace)
    _check_status(out[0], seed, walk_index)
    states = []
    word = []
    crossed = []
    z0 = config.z0
    for step, r, lazy, a, b, c, d, lo, hi, full, ends in trace:
        g = Isometry(a, b, c, d)
        z = apply(g, z0)
        if not lazy:
            word.append(r + 1)
            e1 = Boundary.from_projective(*ends[0])
            e2 = Boundary.from_projective(*ends[1])
            side = 1 if line_through(e1, e2).side_value(z) > 0 else -1
            crossed.append((line_fingerprint(e1, e2), side))
        states.append(WalkState(step, r + 1, lazy, z, GroupElement(g, tuple(word), len(word)),
                                list(crossed), None if full else (lo, hi)))
    return states


def trajectory_rows(report: WalkReport, config: TriangleConfig):
    """Header and rows: step, re, im, lazy, bracket_lo, bracket_hi.

    Bracket endpoints are boundary points of the extended real line, the
    arc running counterclockwise (in the basepoint disk) from lo to hi;
    they are empty while the bracket is still the full circle.
    """
    if report.trajectory is None:
        raise DomainError("report has no trajectory; rerun with trajectory=True")
    yield ["step", "re", "im", "lazy", "bracket_lo", "bracket_hi"]
    for row in report.trajectory:
        if row["full"]:
            lo_s = hi_s = ""
        else:
            lo_s, hi_s = (_fmt_boundary(boundary_of_angle(row[k], config.z0))
                          for k in ("bracket_lo", "bracket_hi"))
        yield [row["step"], repr(row["re"]), repr(row["im"]), int(row["lazy"]), lo_s, hi_s]


def write_trajectory_csv(report: WalkReport, path, config: TriangleConfig):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in trajectory_rows(report, config):
            w.writerow(row)


def _fmt_boundary(b: Boundary) -> str:
    return "inf" if b.infinite else repr(b.x)


# ---------------------------------------------------------------------------
# batches


class EmpiricalCDF:
    """Right-continuous step function of a finite sample (±inf allowed)."""

    def __init__(self, values):
        v = np.asarray(values, dtype=float)
        v = v[~np.isnan(v)]
        self.values = np.sort(v)
        self.n = len(self.values)

    def __call__(self, x) -> float:
        if self.n == 0:
            raise DomainError("empirical CDF of an empty sample")
        return float(np.searchsorted(self.values, float(x), side="right")) / self.n

    def evaluate(self, xs) -> np.ndarray:
        xs = np.asarray([float(x) for x in xs])
        return np.searchsorted(self.values, xs, side="right") / self.n

    def merged(self, other: "EmpiricalCDF") -> "EmpiricalCDF":
        return EmpiricalCDF(np.concatenate([self.values, other.values]))


@dataclass
class BatchSample:
    base_seed: int
    walk_offset: int
    n_walks: int
    zetas: np.ndarray  # per-walk estimates in walk order
    status_counts: dict
    n_unbounded: int
    backend: str

    @property
    def sorted(self) -> np.ndarray:
        return np.sort(self.zetas[~np.isnan(self.zetas)])

    @property
    def ecdf(self) -> EmpiricalCDF:
        return EmpiricalCDF(self.zetas)

    @property
    def n_exhausted(self) -> int:
        return self.status_counts.get("budget_exhausted", 0)


def _run_block(params, z0, base_seed, start, stop, budget, target):
    bgs = [walk_stream(base_seed, k) for k in range(start, stop)]
    outs = kernels.walk_batch(params, bgs, budget, target)
    zetas = np.empty(stop - start)
    statuses = []
    unbounded = 0
    for j, out in enumerate(outs):
        status, _, _, full, lo, hi = out[:6]
        _check_status(status, base_seed, start + j)
        est, unb = bracket_estimate(lo, hi, full, z0)
        unbounded += bool(unb and est is not None)
        zetas[j] = _zeta_value(est, unb, lo, hi)
        statuses.append(status)
    return zetas, statuses, unbounded


def batch_sample(config: TriangleConfig, base_seed: int, n_walks: int, per_walk_budget: int,
                 target_bracket_width: float = 1e-6, threads=None, walk_offset: int = 0) -> BatchSample:
    """Walks walk_offset .. walk_offset + n_walks - 1, each on its own Philox stream.

    Results do not depend on the thread count; disjoint index ranges
    concatenate to the sample of their union.
    """
    if n_walks < 1:
        raise DomainError("n_walks must be at least 1")
    target = max(float(target_bracket_width), PRECISION_FLOOR)
    params = pack_params(config)
    blocks = [(s, min(s + BLOCK, walk_offset + n_walks))
              for s in range(walk_offset, walk_offset + n_walks, BLOCK)]
    work = lambda blk: _run_block(params, config.z0, base_seed, blk[0], blk[1], per_walk_budget, target)
    nthreads = thread_count(threads)
    if nthreads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(nthreads) as ex:
            results = list(ex.map(work, blocks))
    else:
        results = [work(b) for b in blocks]
    zetas = np.concatenate([r[0] for r in results])
    counts = {}
    for r in results:
        for s in r[1]:
            name = STATUS_NAMES[s]
            counts[name] = counts.get(name, 0) + 1
    return BatchSample(base_seed, walk_offset, n_walks, zetas, counts,
                       sum(r[2] for r in results), kernels.BACKEND)


# ---------------------------------------------------------------------------
# coupling


@dataclass
class CouplingTable:
    m: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    C: float
    n_pairs: int

    @property
    def bound(self) -> np.ndarray:
        return 2.0 * ((self.C + 2.0) / 3.0) ** self.m

    def bound_violations(self, sigmas: float = 3.0):
        """Indices m where mean(m) exceeds the decay bound plus the sampling margin."""
        return [int(k) for k in self.m if self.mean[k] > self.bound[k] + sigmas * self.stderr[k]]

    def monotone_violations(self, sigmas: float = 3.0):
        """Indices m where mean(m+1) exceeds mean(m) beyond sampling noise."""
        out = []
        for k in range(len(self.m) - 1):
            noise = sigmas * math.hypot(self.stderr[k], self.stderr[k + 1])
            if self.mean[k + 1] > self.mean[k] + noise:
                out.append(k)
        return out

    def to_json(self) -> dict:
        return {"C": self.C, "n_pairs": self.n_pairs,
                "rows": [{"m": int(k), "mean": float(self.mean[k]), "stderr": float(self.stderr[k]),
                          "bound": float(self.bound[k])} for k in self.m]}


def coupling_experiment(config: TriangleConfig, seed: int, m_max: int, n_pairs: int,
                        threads=None, C: float | None = None) -> CouplingTable:
    """Mean chord distance E|X_m - Y_m| for pairs driven by one shared index stream.

    Works in the disk centered at the basepoint; X_0, Y_0 are uniform on
    the unit circle and X_{m+1} = τ_i(X_m) with the disk one-way reflections.
    """
    if n_pairs < 2:
        raise DomainError("need at least two pairs for a standard error")
    if C is None:
        from .triangle_group import contraction_constant
        C = contraction_constant(config).C
    circles = ([c.c.real for c in config.circles], [c.c.imag for c in config.circles],
               [c.r for c in config.circles])
    blocks = [(s, min(s + BLOCK, n_pairs)) for s in range(0, n_pairs, BLOCK)]

    def work(blk):
        bgs = [walk_stream(seed, k, domain=1) for k in range(*blk)]
        return np.asarray(kernels.coupling_batch(circles, bgs, m_max), dtype=float)

    nthreads = thread_count(threads)
    if nthreads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(nthreads) as ex:
            parts = list(ex.map(work, blocks))
    else:
        parts = [work(b) for b in blocks]
    d = np.concatenate(parts, axis=0)
    mean = d.mean(axis=0)
    stderr = d.std(axis=0, ddof=1) / math.sqrt(n_pairs)
    return CouplingTable(np.arange(m_max + 1), mean, stderr, float(C), n_pairs)
