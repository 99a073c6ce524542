"""QAOA expectation evaluation and variational parameter search.

Two evaluation routes are provided and must agree exactly:

* :func:`expectation_full` simulates the whole circuit and contracts the
  probability vector with the diagonal Hamiltonian.
* :func:`expectation_decomposed` splits the Hamiltonian into one subproblem
  per term, simulates each term's p-hop neighborhood subgraph independently
  (the term's light cone) and sums the per-term expectations.

The second route is the scalable one: subproblem sizes depend on local graph
structure, not on the total qubit count, and the evaluations are independent
so they can run in parallel.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .circuits import QaoaParams, build_qaoa_circuit
from .errors import CapacityError
from .graph import WeightGraph
from .simulator import QUBIT_LIMIT, probabilities, simulate

DEFAULT_GRID_SIZE = 64
DEFAULT_MAX_EVALS = 20000


def _spin_signs(n: int, qubits: tuple[int, ...]) -> np.ndarray:
    """Vector over basis states of prod_{q in qubits} z_q with z = 1 - 2*bit."""
    idx = np.arange(1 << n)
    signs = np.ones(1 << n)
    for q in qubits:
        signs *= 1.0 - 2.0 * ((idx >> q) & 1)
    return signs


def energy_table(g: WeightGraph) -> np.ndarray:
    """C(z) for every basis state (offset excluded), little-endian indexing."""
    table = np.zeros(1 << g.n)
    for u, v, w in g.edges:
        table += w * _spin_signs(g.n, (u, v))
    for i, w in g.nodes:
        if w != 0.0:
            table += w * _spin_signs(g.n, (i,))
    return table


def expectation_full(g: WeightGraph, params: QaoaParams) -> float:
    """<gamma,beta| H_C |gamma,beta> by full statevector simulation."""
    state = simulate(build_qaoa_circuit(g, params))
    return float(probabilities(state) @ energy_table(g))


@dataclass(frozen=True)
class TermSubproblem:
    """One Hamiltonian term with its light-cone subgraph.

    ``kind`` is "edge" or "node"; ``support`` holds original node ids and
    ``weight`` the term coefficient.  ``index_map[i]`` is the original id of
    subgraph node ``i``; the subgraph is the induced p-hop closed neighborhood
    of the support.
    """

    kind: str
    support: tuple[int, ...]
    weight: float
    subgraph: WeightGraph
    index_map: tuple[int, ...]

    def local_support(self) -> tuple[int, ...]:
        pos = {orig: i for i, orig in enumerate(self.index_map)}
        return tuple(pos[s] for s in self.support)

    def expectation(self, params: QaoaParams) -> float:
        state = simulate(build_qaoa_circuit(self.subgraph, params))
        signs = _spin_signs(self.subgraph.n, self.local_support())
        return self.weight * float(probabilities(state) @ signs)


def _p_hop_closure(g: WeightGraph, support, p: int) -> set[int]:
    adj = g.adjacency()
    frontier = set(support)
    seen = set(support)
    for _ in range(p):
        frontier = {v for u in frontier for v in adj[u]} - seen
        seen |= frontier
    return seen


def decompose(g: WeightGraph, p: int) -> list[TermSubproblem]:
    """One subproblem per Hamiltonian term, each with its p-hop light cone.

    Every edge and every nonzero-weight node contributes exactly one
    subproblem, so the terms partition H_C without overlap.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    subs: list[TermSubproblem] = []
    for u, v, w in g.edges:
        keep = _p_hop_closure(g, (u, v), p)
        sub, index_map = g.induced_subgraph(keep)
        subs.append(TermSubproblem("edge", (u, v), w, sub, tuple(index_map)))
    for i, w in g.nodes:
        if w != 0.0:
            keep = _p_hop_closure(g, (i,), p)
            sub, index_map = g.induced_subgraph(keep)
            subs.append(TermSubproblem("node", (i,), w, sub, tuple(index_map)))
    return subs


def expectation_decomposed(
    g: WeightGraph, params: QaoaParams, workers: int = 1
) -> float:
    """Sum of per-term expectations; equals :func:`expectation_full` exactly.

    Subproblems are independent; with ``workers > 1`` they are evaluated on a
    thread pool.  Results are reduced in subproblem index order either way, so
    the total is bitwise deterministic.
    """
    subs = decompose(g, params.p)
    for s in subs:
        if s.subgraph.n > QUBIT_LIMIT:
            raise CapacityError(
                f"{s.kind} term {s.support} has a {s.subgraph.n}-qubit light "
                f"cone, above the simulator limit of {QUBIT_LIMIT}"
            )
    if workers > 1 and len(subs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda s: s.expectation(params), subs))
    else:
        values = [s.expectation(params) for s in subs]
    return float(sum(values))


def interp_initialize(params: QaoaParams) -> QaoaParams:
    """Depth p+1 initialization interpolated from optimized depth-p angles.

    new_v[i] = ((i-1)/p) v[i-1] + ((p-i+1)/p) v[i] for i = 1..p+1 (1-based,
    out-of-range entries zero).
    """

    def stretch(v: tuple[float, ...]) -> tuple[float, ...]:
        p = len(v)
        padded = [0.0, *v, 0.0]
        return tuple(
            ((i - 1) / p) * padded[i - 1] + ((p - i + 1) / p) * padded[i]
            for i in range(1, p + 2)
        )

    return QaoaParams(gamma=stretch(params.gamma), beta=stretch(params.beta))


@dataclass
class OptimizationResult:
    params: QaoaParams
    energy: float
    converged: bool
    evaluations: int
    trace: list[tuple] = field(default_factory=list)

    def trace_rows(self) -> list[tuple]:
        """CSV-ready rows: (eval index, gamma..., beta..., energy)."""
        return [(i, *p.flat(), e) for i, (p, e) in enumerate(self.trace)]


def random_params(p: int, seed) -> QaoaParams:
    """Seeded draw from the optimizer's search box [0,pi) x [0,pi/2)."""
    rng = np.random.default_rng(seed)
    return QaoaParams(
        gamma=tuple(rng.uniform(0.0, np.pi, size=p)),
        beta=tuple(rng.uniform(0.0, np.pi / 2.0, size=p)),
    )


class _Objective:
    def __init__(self, g, evaluator, workers, max_evals):
        self.g = g
        self.evaluator = evaluator
        self.workers = workers
        self.max_evals = max_evals
        self.trace: list[tuple[QaoaParams, float]] = []
        self.best: tuple[QaoaParams, float] | None = None

    def exhausted(self) -> bool:
        return len(self.trace) >= self.max_evals

    def __call__(self, params: QaoaParams) -> float:
        if self.exhausted():
            raise _BudgetExhausted
        if self.evaluator == "full":
            e = expectation_full(self.g, params)
        else:
            e = expectation_decomposed(self.g, params, workers=self.workers)
        self.trace.append((params, e))
        if self.best is None or e < self.best[1]:
            self.best = (params, e)
        return e


class _BudgetExhausted(Exception):
    pass


def _grid_search(obj: _Objective, grid_size: int):
    gammas = np.linspace(0.0, np.pi, grid_size, endpoint=False)
    betas = np.linspace(0.0, np.pi / 2.0, grid_size, endpoint=False)
    for gm in gammas:
        for bt in betas:
            obj(QaoaParams(gamma=(gm,), beta=(bt,)))


def _simplex(obj: _Objective, start: QaoaParams, ftol: float) -> tuple[bool, QaoaParams]:
    def f(x):
        return obj(QaoaParams.from_flat(x))

    budget = max(1, obj.max_evals - len(obj.trace))
    res = minimize(
        f,
        np.asarray(start.flat()),
        method="Nelder-Mead",
        options={
            "xatol": 1e-8,
            "fatol": ftol,
            "maxfev": budget,
            "maxiter": 10 * budget,
        },
    )
    return bool(res.success), QaoaParams.from_flat(res.x)


def optimize(
    g: WeightGraph,
    p: int = 1,
    method: str = "grid+simplex",
    init: QaoaParams | str | None = None,
    seed=0,
    grid_size: int = DEFAULT_GRID_SIZE,
    max_evals: int = DEFAULT_MAX_EVALS,
    ftol: float = 1e-10,
    evaluator: str = "decomposed",
    workers: int = 1,
) -> OptimizationResult:
    """Minimize E_p over the variational angles.

    ``method`` is "grid", "simplex" or "grid+simplex".  The grid stage
    applies at p=1 (64x64 over [0,pi) x [0,pi/2) by default).  ``init`` may
    be explicit :class:`QaoaParams` of depth p, the string "random" (seeded
    draw at depth p), or "interp" / None: at p>1 this chains upward from the
    p=1 optimum, interpolating and simplex-refining at every depth.  The run
    is deterministic for a fixed seed.  If the evaluation budget runs out the
    best parameters so far are returned flagged as non-converged.
    """
    if method not in ("grid", "simplex", "grid+simplex"):
        raise ValueError(f"unknown method {method!r}")
    if evaluator not in ("full", "decomposed"):
        raise ValueError(f"unknown evaluator {evaluator!r}")
    if isinstance(init, QaoaParams) and init.p != p:
        raise ValueError(f"init has depth {init.p}, requested p={p}")
    obj = _Objective(g, evaluator, workers, max_evals)
    use_grid = "grid" in method and p == 1
    use_simplex = "simplex" in method
    converged = True
    try:
        if isinstance(init, QaoaParams) or init == "random" or p == 1:
            if isinstance(init, QaoaParams):
                obj(init)
            elif init == "random":
                obj(random_params(p, seed))
            if use_grid:
                _grid_search(obj, grid_size)
            if use_simplex and obj.best is not None:
                ok, _ = _simplex(obj, obj.best[0], ftol)
                converged = converged and ok
            elif use_simplex:
                ok, _ = _simplex(obj, random_params(p, seed), ftol)
                converged = converged and ok
        else:
            # Interp chain: optimize depth 1, then stretch and refine upward.
            inner = optimize(
                g, 1, method, None, seed, grid_size,
                max(1, max_evals - len(obj.trace)), ftol, evaluator, workers,
            )
            obj.trace.extend(inner.trace)
            converged = converged and inner.converged
            depth_params = inner.params
            for _ in range(p - 1):
                depth_params = interp_initialize(depth_params)
                obj(depth_params)
                if use_simplex:
                    ok, refined = _simplex(obj, depth_params, ftol)
                    converged = converged and ok
                    depth_params = refined
    except _BudgetExhausted:
        converged = False
    at_depth = [(pp, e) for pp, e in obj.trace if pp.p == p]
    if not at_depth:
        raise ValueError("optimizer made no depth-p evaluations; increase max_evals")
    best_params, best_energy = min(at_depth, key=lambda t: t[1])
    return OptimizationResult(
        params=best_params,
        energy=best_energy,
        converged=converged,
        evaluations=len(obj.trace),
        trace=obj.trace,
    )
