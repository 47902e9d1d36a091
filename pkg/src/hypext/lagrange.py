"""Lagrangians of 3-graphs: evaluation, gradients and simplex maximization.

The polynomial ``L_G(x) = sum over edges of prod x_i`` is handled through a
"form" object.  :class:`EdgeForm` works from an explicit edge list; the
:class:`DesignComplementForm` evaluates ``K_n minus (H(D) + S)`` from the
design blocks and ``S`` alone, which keeps very large complements (billions
of triples) out of memory.

Floats only appear inside the optimizer.  Closed forms and certificates use
:class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, prod
from typing import Sequence

import numpy as np

from .errors import InvalidSize, PreconditionError
from .hcore import Hypergraph

# ---------------------------------------------------------------------------
# simplex points


@dataclass(frozen=True)
class SimplexPoint:
    weights: np.ndarray

    @classmethod
    def from_raw(cls, w) -> "SimplexPoint":
        a = np.asarray(w, dtype=float)
        if a.ndim != 1 or a.size == 0:
            raise InvalidSize("weights must be a non-empty vector")
        if np.any(a < 0):
            raise PreconditionError("weights must be non-negative")
        s = a.sum()
        if s <= 0:
            raise PreconditionError("weights must not all vanish")
        return cls(a / s)

    @classmethod
    def uniform(cls, n: int) -> "SimplexPoint":
        return cls(np.full(n, 1.0 / n))

    def __len__(self) -> int:
        return self.weights.size

    def distance_to_uniform(self) -> float:
        return float(np.max(np.abs(self.weights - 1.0 / self.weights.size)))


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort and threshold)."""
    n = v.size
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, n + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0)


# ---------------------------------------------------------------------------
# forms


class EdgeForm:
    """Multilinear edge polynomial from an explicit edge list."""

    def __init__(self, G: Hypergraph):
        self.n = G.n
        self.r = G.r
        self.edge_count = len(G)
        self.E = np.array(G.edges, dtype=np.int64).reshape(len(G), G.r)

    def value(self, x: np.ndarray) -> float:
        if not self.edge_count:
            return 0.0
        return float(np.prod(x[self.E], axis=1).sum())

    def values(self, X: np.ndarray, batch: int = 64) -> np.ndarray:
        """Row-wise values for a stack of points."""
        out = np.zeros(X.shape[0])
        if not self.edge_count:
            return out
        for i in range(0, X.shape[0], batch):
            out[i:i + batch] = np.prod(X[i:i + batch][:, self.E], axis=2).sum(axis=1)
        return out

    def gradient(self, x: np.ndarray) -> np.ndarray:
        g = np.zeros(self.n)
        if not self.edge_count:
            return g
        XE = x[self.E]
        for j in range(self.r):
            others = np.prod(np.delete(XE, j, axis=1), axis=1)
            np.add.at(g, self.E[:, j], others)
        return g

    def hessian(self, x: np.ndarray) -> np.ndarray:
        if self.r != 3:
            raise InvalidSize("hessian implemented for 3-graphs")
        Hm = np.zeros((self.n, self.n))
        if not self.edge_count:
            return Hm
        a, b, c = self.E[:, 0], self.E[:, 1], self.E[:, 2]
        for (i, j, k) in ((a, b, c), (a, c, b), (b, c, a)):
            np.add.at(Hm, (i, j), x[k])
            np.add.at(Hm, (j, i), x[k])
        return Hm


def _e2_e3(P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Elementary symmetric e2, e3 along the last axis via power sums."""
    p1 = P.sum(axis=-1)
    p2 = (P * P).sum(axis=-1)
    p3 = (P * P * P).sum(axis=-1)
    e2 = (p1 * p1 - p2) / 2
    e3 = (p1 ** 3 - 3 * p1 * p2 + 2 * p3) / 6
    return e2, e3


class DesignComplementForm:
    """``K_n^3`` minus the triples inside design blocks minus the 3-graph S.

    Assumes S is disjoint from the block triples, as in the construction.
    """

    def __init__(self, n: int, blocks: Sequence[Sequence[int]], S: Hypergraph | None = None):
        self.n = n
        self.r = 3
        self.B = np.array(blocks, dtype=np.int64)
        k = self.B.shape[1] if self.B.size else 2
        self.k = k
        s_edges = S.edges if S is not None else ()
        self.S = np.array(s_edges, dtype=np.int64).reshape(len(s_edges), 3)
        self.edge_count = comb(n, 3) - len(self.B) * comb(k, 3) - len(self.S)

    def value(self, x: np.ndarray) -> float:
        return float(self.values(x[None, :])[0])

    def values(self, X: np.ndarray, batch: int = 64, chunk: int = 1 << 16) -> np.ndarray:
        out = _e2_e3(X)[1]
        # vertex-major layout: gathering rows keeps each batch contiguous
        XT = np.ascontiguousarray(np.atleast_2d(X).T)
        for i in range(0, XT.shape[1], batch):
            Y = np.ascontiguousarray(XT[:, i:i + batch])
            acc = np.zeros(Y.shape[1])
            if self.k >= 3 and self.B.size:
                for c in range(0, len(self.B), chunk):
                    b = self.B[c:c + chunk]
                    cols = [Y[b[:, j]] for j in range(self.k)]
                    if self.k == 3:
                        acc += (cols[0] * cols[1] * cols[2]).sum(axis=0)
                        continue
                    p1 = sum(cols)
                    p2 = sum(v * v for v in cols)
                    p3 = sum(v * v * v for v in cols)
                    acc += ((p1 ** 3 - 3 * p1 * p2 + 2 * p3) / 6).sum(axis=0)
            if len(self.S):
                acc += (Y[self.S[:, 0]] * Y[self.S[:, 1]] * Y[self.S[:, 2]]).sum(axis=0)
            out[i:i + batch] -= acc
        return out

    def gradient(self, x: np.ndarray) -> np.ndarray:
        n = self.n
        p1 = x.sum()
        p2 = float(x @ x)
        g = ((p1 - x) ** 2 - (p2 - x * x)) / 2
        if self.k >= 3 and self.B.size:
            XB = x[self.B]
            q1 = XB.sum(axis=1, keepdims=True)
            q2 = (XB * XB).sum(axis=1, keepdims=True)
            inner = ((q1 - XB) ** 2 - (q2 - XB * XB)) / 2
            g -= np.bincount(self.B.ravel(), inner.ravel(), minlength=n)
        if len(self.S):
            XS = x[self.S]
            for j in range(3):
                g -= np.bincount(self.S[:, j], np.prod(np.delete(XS, j, axis=1), axis=1), minlength=n)
        return g

    def hessian(self, x: np.ndarray) -> np.ndarray:
        """Dense n x n Hessian; entry (i, j) sums x over the third vertices of edges through i and j."""
        n = self.n
        Hm = x.sum() - x[:, None] - x[None, :]
        np.fill_diagonal(Hm, 0.0)
        flat = Hm.ravel()
        if self.k >= 3 and self.B.size:
            XB = x[self.B]
            q1 = XB.sum(axis=1)
            for a, b in itertools.combinations(range(self.k), 2):
                i, j = self.B[:, a], self.B[:, b]
                w = q1 - XB[:, a] - XB[:, b]
                flat -= np.bincount(i * n + j, w, minlength=n * n)
                flat -= np.bincount(j * n + i, w, minlength=n * n)
        for a, b, c in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
            if len(self.S):
                i, j, w = self.S[:, a], self.S[:, b], x[self.S[:, c]]
                flat -= np.bincount(i * n + j, w, minlength=n * n)
                flat -= np.bincount(j * n + i, w, minlength=n * n)
        return Hm


def as_form(G):
    if isinstance(G, Hypergraph):
        return EdgeForm(G)
    return G


# ---------------------------------------------------------------------------
# evaluation


def _check_len(G, x) -> None:
    if len(x) != G.n:
        raise InvalidSize(f"weight vector has length {len(x)}, graph has {G.n} vertices")


def evaluate(G, x):
    """L_G(x).  Exact Fraction when every weight is int or Fraction, else float."""
    if isinstance(x, SimplexPoint):
        x = x.weights
    _check_len(G, x)
    if isinstance(G, Hypergraph) and all(isinstance(v, (int, Fraction)) for v in x):
        xs = [Fraction(v) for v in x]
        den = 1
        for v in xs:
            den = den * v.denominator // _gcd(den, v.denominator)
        nums = [v.numerator * (den // v.denominator) for v in xs]
        total = sum(prod(nums[i] for i in e) for e in G.edges)
        return Fraction(total, den ** G.r)
    return as_form(G).value(np.asarray(x, dtype=float))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def gradient(G, x):
    """Partial derivatives D_i = sum over link edges of the product of weights."""
    if isinstance(x, SimplexPoint):
        x = x.weights
    _check_len(G, x)
    if isinstance(G, Hypergraph) and all(isinstance(v, (int, Fraction)) for v in x):
        xs = [Fraction(v) for v in x]
        return [sum((prod(xs[j] for j in l) for l in G.links[i]), Fraction(0)) for i in range(G.n)]
    return as_form(G).gradient(np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# maximization


@dataclass(frozen=True)
class OptimizerConfig:
    starts: int = 32
    tol: float = 1e-10
    max_iter: int = 100_000
    seed: int = 0


@dataclass(frozen=True)
class OptimizerReport:
    best_value: float
    best_point: SimplexPoint
    starts: int
    iterations: int
    converged: bool
    first_order_residual: float

    def to_json(self) -> dict:
        return {
            "best_value": self.best_value,
            "best_point": [float(v) for v in self.best_point.weights],
            "starts": self.starts,
            "iterations": self.iterations,
            "converged": self.converged,
            "first_order_residual": self.first_order_residual,
            "distance_to_uniform": self.best_point.distance_to_uniform(),
        }


def kkt_residual(form, x: np.ndarray) -> float:
    g = form.gradient(x)
    return float(np.max(np.abs(x - project_simplex(x + g))))


def _polish(form, x: np.ndarray, floor: float = 0.0) -> np.ndarray | None:
    """Newton steps on the KKT system restricted to the support of x.

    Projected gradient ascent stalls around 1e-9 because function values stop
    resolving progress; a few Newton steps on ``grad_S = mu, sum x_S = 1``
    finish the job.  Returns None when the step leaves the simplex.
    """
    if not hasattr(form, "hessian"):
        return None
    S = np.nonzero(x > floor)[0]
    m = S.size
    y = np.zeros_like(x)
    y[S] = x[S]
    for _ in range(8):
        g = form.gradient(y)[S]
        H = form.hessian(y)[np.ix_(S, S)]
        J = np.zeros((m + 1, m + 1))
        J[:m, :m] = H
        J[:m, m] = -1.0
        J[m, :m] = 1.0
        mu = float(g.mean())
        rhs = np.concatenate([-(g - mu), [1.0 - y[S].sum()]])
        try:
            step = np.linalg.solve(J, rhs)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, rhs, rcond=None)[0]
        y[S] += step[:m]
        if np.any(y[S] < 0):
            return None
        if np.max(np.abs(step[:m])) < 1e-15:
            break
    return y / y.sum()


def _try_polish(form, x: np.ndarray, f: float, tol: float):
    # second attempt drops coordinates that are drifting to zero slowly
    for floor in (0.0, 1e-7):
        y = _polish(form, x, floor)
        if y is None:
            continue
        fy = form.value(y)
        ry = kkt_residual(form, y)
        if ry < tol and fy >= f - 64 * np.finfo(float).eps * abs(f):
            return y, fy, ry
    return None


# residual below which Newton polishing is attempted (every 25 iterations)
POLISH_BELOW = 1e-3


def _ascend(form, x: np.ndarray, cfg: OptimizerConfig) -> tuple[np.ndarray, float, int, bool, float]:
    f = form.value(x)
    step = 1.0
    res = np.inf
    it = 0
    polished_at = -1
    for it in range(1, cfg.max_iter + 1):
        g = form.gradient(x)
        res = float(np.max(np.abs(x - project_simplex(x + g))))
        if res < cfg.tol:
            return x, f, it, True, res
        if res < POLISH_BELOW and it - polished_at >= 25:
            polished_at = it
            done = _try_polish(form, x, f, cfg.tol)
            if done:
                return done[0], done[1], it, True, done[2]
        while True:
            y = project_simplex(x + step * g)
            fy = form.value(y)
            # Armijo along the projection arc, with slack for rounding in f
            if fy >= f + 1e-4 * float(g @ (y - x)) - 8 * np.finfo(float).eps * abs(f):
                break
            step *= 0.5
            if step < 1e-16:
                break
        if step < 1e-16:
            break
        x, f = y, fy
        step = min(step * 2.0, 4.0)
    done = _try_polish(form, x, f, cfg.tol) if res < 1e-4 else None
    if done:
        return done[0], done[1], it, True, done[2]
    return x, f, it, False, res


def _better(a: tuple[float, np.ndarray], b: tuple[float, np.ndarray]) -> bool:
    if a[0] != b[0]:
        return a[0] > b[0]
    return tuple(a[1]) < tuple(b[1])


def maximize(G, config: OptimizerConfig | None = None) -> OptimizerReport:
    """Multi-start projected gradient ascent; ``best_value`` is attained at ``best_point``."""
    cfg = config or OptimizerConfig()
    form = as_form(G)
    n = form.n
    if n < 1:
        raise InvalidSize("need at least one vertex")
    rng = np.random.default_rng(cfg.seed)
    starts = [np.full(n, 1.0 / n)]
    for i in range(1, cfg.starts):
        # alternate flat and sparse Dirichlet draws so faces get explored
        starts.append(rng.dirichlet(np.full(n, 1.0 if i % 2 else 0.3)))
    best = None
    total_iter = 0
    for x0 in starts:
        x, f, it, ok, res = _ascend(form, x0, cfg)
        total_iter += it
        cand = (f, x, ok, res)
        if best is None or _better(cand[:2], best[:2]):
            best = cand
    f, x, ok, res = best
    return OptimizerReport(f, SimplexPoint(x), len(starts), total_iter, ok, res)


# ---------------------------------------------------------------------------
# closed forms and certificates


def design_lagrangian(n: int, k: int, s: int) -> Fraction:
    """(1/6)(1 - (k+1)/n + (k-2s)/n^2) for ``K_n minus (H(D) + S)``."""
    return Fraction(1, 6) * (1 - Fraction(k + 1, n) + Fraction(k - 2 * s, n * n))


def design_hypothesis(n: int, k: int, s: int) -> bool:
    """Whether n is large enough for the closed form to be the true Lagrangian."""
    return n >= 18 * k + 3 ** 7 * s ** 3


@dataclass(frozen=True)
class ConcavityReport:
    points: int
    max_excess: float
    violations: int
    uniform_exact: bool
    hypothesis: bool

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.uniform_exact


def check_concavity_bound(G, n: int, k: int, s: int, sample_count: int = 10_000, seed: int = 0,
                          guard: float = 1e-12) -> ConcavityReport:
    """Test L(x) + (1/9) * sum (x_i - 1/n)^2 <= |G|/n^3 on sampled points.

    The sample is the uniform point, all n corners and ``sample_count``
    seeded Dirichlet(1) points.  ``max_excess`` is the largest left minus
    right side seen; a violation is an excess above ``guard``.
    """
    form = as_form(G)
    if form.n != n:
        raise InvalidSize("n does not match the graph")
    m = form.edge_count
    rhs = m / n ** 3
    rng = np.random.default_rng(seed)
    worst = -np.inf
    bad = 0
    blocks = [np.eye(n), rng.dirichlet(np.ones(n), size=sample_count), np.full((1, n), 1.0 / n)]
    for X in blocks:
        for i in range(0, X.shape[0], 256):
            Xi = X[i:i + 256]
            lhs = form.values(Xi) + ((Xi - 1.0 / n) ** 2).sum(axis=1) / 9
            ex = lhs - rhs
            worst = max(worst, float(ex.max()))
            bad += int((ex > guard).sum())
    # structured forms have no edge list to evaluate exactly; L(uniform) = m/n^3 by counting
    uniform_exact = True
    if isinstance(G, Hypergraph):
        uniform_exact = evaluate(G, [Fraction(1, n)] * n) == Fraction(m, n ** 3)
    return ConcavityReport(sample_count + n + 1, worst, bad, uniform_exact, design_hypothesis(n, k, s))


def fact_cubic_bound(G: Hypergraph, alpha_vec: Sequence, alpha) -> bool:
    """Exact check of L_G(alpha_vec) <= (alpha * n)^3 for zero-sum vectors in [-1, alpha]."""
    a = [Fraction(v) for v in alpha_vec]
    alpha = Fraction(alpha)
    _check_len(G, a)
    if sum(a) != 0:
        raise PreconditionError("entries must sum to zero")
    if any(v < -1 or v > alpha for v in a):
        raise PreconditionError("entries must lie in [-1, alpha]")
    return evaluate(G, a) <= (alpha * G.n) ** 3


@dataclass(frozen=True)
class BlowupBoundReport:
    holds: bool
    edges: int
    bound_numeric: float
    exact_weighted: Fraction
    complete: bool


def blowup_bound_check(G: Hypergraph, H: Hypergraph, witness_map: Sequence[int],
                       lam: Fraction | float | None = None, config: OptimizerConfig | None = None) -> BlowupBoundReport:
    """Check |H| <= lambda(G) * v(H)^r for H inside a blow-up of G.

    ``witness_map[v]`` is the vertex of G that v of H is mapped to.  The
    bound is checked against ``lam`` when given (exactly for a Fraction) or
    against the optimizer value with a relative guard of 1e-9.  The integer
    block sizes give an exact lower route: |H| <= L_G(sizes) always, with
    equality for complete blow-ups.
    """
    if len(witness_map) != H.n or any(not 0 <= w < G.n for w in witness_map):
        raise PreconditionError("witness map must send every vertex of H into V(G)")
    for e in H.edges:
        img = tuple(sorted(witness_map[v] for v in e))
        if len(set(img)) != len(img) or img not in G.edge_set:
            raise PreconditionError(f"edge {e} of H is not mapped onto an edge of G")
    sizes = [0] * G.n
    for w in witness_map:
        sizes[w] += 1
    weighted = evaluate(G, sizes)
    complete = weighted == len(H)
    v = H.n
    if isinstance(lam, Fraction):
        holds = len(H) <= weighted and Fraction(len(H)) <= lam * v ** G.r
        bound = float(lam * v ** G.r)
    else:
        if lam is None:
            lam = maximize(G, config).best_value
        bound = float(lam) * v ** G.r
        holds = len(H) <= weighted and len(H) <= bound * (1 + 1e-9) + 1e-9
    return BlowupBoundReport(holds, len(H), bound, Fraction(weighted), complete)
