"""Monodromy runs: sample loops, accumulate the group and the solution lattice."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..criterion import GroupDescriptor, StrictlySmaller, criterion, expected_group, symmetric_closure_generates
from ..errors import BudgetExhausted, DimensionUnsupported, NumericalError, SignatureMismatch, SparseGaloisError
from ..lattice import IntMatrix, invariant_factors
from ..polytope import dot, lattice_mixed_volume
from ..tuples import ReductionData, SupportTuple, essential_vectors, max_on, normalize, reduction
from ..numerics.solve import solve_system
from ..numerics.system import SparseSystem, random_system
from ..numerics.track import TrackOptions
from .checks import necklace_blocks
from .loops import (
    Loop, LoopResult, check_facet_signature, facet_resultant_loop, random_loop, run_loop, trinomial_loop,
)
from .perm import PermutationGroup, order

MAX_ROOTS = 20


@dataclass
class RunConfig:
    budget: int = 400
    seed: int = 0
    stable_loops: int = 25
    newton_tol: float = 1e-12
    match_tol: float = 1e-4
    structured_every: int = 2  # every k-th loop is a trinomial or facet loop

    def track_options(self) -> TrackOptions:
        return TrackOptions(newton_tol=self.newton_tol)


@dataclass
class LoopRecord:
    index: int
    kind: str
    params: dict
    status: str  # "ok", "rejected" or "signature-mismatch"
    permutation: tuple | None = None
    winding: np.ndarray | None = None  # displacement over one traversal
    power_winding: np.ndarray | None = None  # integer winding of the identity power
    power: int = 1
    steps: int = 0
    grew: bool = False
    note: str = ""


@dataclass
class MonodromyRun:
    tuple: SupportTuple
    config: RunConfig
    base: SparseSystem
    z_base: np.ndarray
    reduction: ReductionData
    expected: GroupDescriptor
    verdict: object
    group: PermutationGroup
    records: list = field(default_factory=list)
    lattice_generators: list = field(default_factory=list)  # integer (roots x n) arrays
    lattice_status: str = "undecided"
    budget_exhausted: bool = False
    blocks: list = field(default_factory=list)
    order_history: list = field(default_factory=list)

    @property
    def degree(self) -> int:
        return self.z_base.shape[0]

    def order(self) -> int:
        return self.group.order()

    def identity_windings(self) -> list:
        return list(self.lattice_generators)

    @property
    def loops_used(self) -> int:
        return len(self.records)

    def reduced_lattice_vectors(self) -> list[tuple]:
        return [reduced_winding(w, self.blocks, self.reduction) for w in self.lattice_generators]


def reduced_winding(w: np.ndarray, blocks: list, red: ReductionData) -> tuple:
    """Winding of the reduced roots, one n-block per necklace, flattened."""
    lt = np.array(red.L.transpose().to_rows(), dtype=np.int64)
    out = []
    for b in blocks:
        out += [int(x) for x in lt @ np.asarray(w[b[0]], dtype=np.int64)]
    return tuple(out)


def loop_power(perm: tuple, disp: np.ndarray) -> tuple[int, np.ndarray]:
    """Order k of the permutation and the winding of the k-fold loop, per root."""
    k = order(perm)
    acc = np.zeros_like(disp)
    for i in range(len(perm)):
        j = i
        for _ in range(k):
            acc[i] += disp[j]
            j = perm[j]
    r = np.rint(acc)
    if np.max(np.abs(acc - r), initial=0.0) > 1e-6:
        raise NumericalError("loop power has a non-integral winding")
    return k, r.astype(int)


def _prepare(t: SupportTuple):
    if t.dim not in (1, 2):
        raise DimensionUnsupported("monodromy runs are available for n <= 2")
    nt = normalize(t)
    total = lattice_mixed_volume(*nt.sets)
    if total > MAX_ROOTS:
        raise DimensionUnsupported(f"mixed volume {total} exceeds {MAX_ROOTS}")
    return nt


def _structured_loops(t: SupportTuple, d_tilde: int):
    """Parameter choices for trinomial (n = 1) or facet (n = 2) loops."""
    if t.dim == 1:
        pts = [p[0] for p in t.sets[0].points]
        return [("trinomial", {"j": j, "turns": pts[j]}) for j in range(len(pts)) if pts[j] != 0]
    out = []
    data = essential_vectors(t)
    for r in data.in_E0():
        for j, s in enumerate(t.sets):
            top = max_on(s.points, r.gamma)
            for a in s.points:
                h = top - dot(r.gamma, a)
                if h > 0 and r.d * h <= d_tilde:
                    out.append(("facet", {"gamma": r.gamma, "j": j, "a": a, "h": h, "count": r.d * h}))
    return out


def _decide(run: MonodromyRun, vectors: list[tuple]) -> str:
    if isinstance(run.verdict, StrictlySmaller):
        return "deficient"
    if run.order() == run.expected.order:
        return "full"
    n, d = run.tuple.dim, run.expected.d
    if vectors and symmetric_closure_generates(vectors, n, d, run.reduction.dual_image):
        return "full"
    return "undecided"


def base_system(t: SupportTuple, rng: np.random.Generator, config: RunConfig, attempts: int = 10):
    last = None
    for _ in range(attempts):
        base = random_system(t, rng)
        try:
            roots = solve_system(base, config.newton_tol)
        except NumericalError as e:
            last = e
            continue
        return base, np.array([r.z for r in roots])
    raise last


def run_monodromy(t: SupportTuple, budget: int = 400, seed: int = 0, config: RunConfig | None = None,
                  raise_on_budget: bool = False) -> MonodromyRun:
    config = config or RunConfig(budget=budget, seed=seed)
    t = _prepare(t)
    rng = np.random.default_rng(config.seed)
    red = reduction(t)
    expected = expected_group(t)
    try:
        verdict = criterion(t)
    except SparseGaloisError as e:  # reducible tuples still admit a numerical run
        verdict = e
    base, z = base_system(t, rng, config)
    run = MonodromyRun(t, config, base, z, red, expected, verdict, PermutationGroup(z.shape[0]))
    run.blocks = necklace_blocks(z, red)
    structured = _structured_loops(t, z.shape[0])
    opts = config.track_options()
    stable = 0
    vectors: list[tuple] = []
    for k in range(config.budget):
        use_structured = structured and k % config.structured_every == 1
        if use_structured:
            kind, params = structured[(k // config.structured_every) % len(structured)]
            rec = _run_structured(run, k, kind, params, rng, opts)
        else:
            rec = _run_random(run, k, rng, opts)
        run.records.append(rec)
        if rec.power_winding is not None:
            run.lattice_generators.append(rec.power_winding)
            vectors.append(reduced_winding(rec.power_winding, run.blocks, red))
        stable = 0 if rec.grew else stable + 1
        run.order_history.append(run.order())
        if run.lattice_status == "undecided" and (rec.grew or rec.power_winding is not None):
            run.lattice_status = _decide(run, vectors)
        if stable >= config.stable_loops and run.lattice_status != "undecided":
            break
    else:
        run.budget_exhausted = True
        if raise_on_budget:
            raise BudgetExhausted(run)
    return run


def _run_random(run: MonodromyRun, k: int, rng, opts) -> LoopRecord:
    loop = random_loop(run.base, rng)
    return _execute(run, k, loop, opts)


def _run_structured(run: MonodromyRun, k: int, kind: str, params: dict, rng, opts) -> LoopRecord:
    if kind == "trinomial":
        loop = trinomial_loop(run.base, params["j"], params["turns"], rng)
        return _execute(run, k, loop, opts)
    loop = facet_resultant_loop(run.base, params["gamma"], params["j"], params["a"], rng, turns=params["h"])
    rec = _execute(run, k, loop, opts, accept=False)
    if rec.status != "ok":
        return rec
    res = LoopResult(loop, rec.permutation, rec.winding, rec.steps, 0.0)
    try:
        check_facet_signature(res, params["gamma"], params["count"])
    except SignatureMismatch as e:
        rec.status, rec.note = "signature-mismatch", str(e)
        return rec
    _accept(run, rec)
    return rec


def _execute(run: MonodromyRun, k: int, loop: Loop, opts, accept: bool = True) -> LoopRecord:
    rec = LoopRecord(k, loop.kind, dict(loop.params), "ok")
    try:
        res = run_loop(loop, run.z_base, opts, run.config.match_tol)
    except NumericalError as e:
        rec.status, rec.note = "rejected", f"{type(e).__name__}: {e}"
        return rec
    rec.permutation, rec.winding, rec.steps = res.permutation, res.displacement, res.steps
    if accept:
        _accept(run, rec)
    return rec


def _accept(run: MonodromyRun, rec: LoopRecord):
    try:
        rec.power, rec.power_winding = loop_power(rec.permutation, rec.winding)
    except NumericalError as e:
        rec.status, rec.note = "rejected", str(e)
        return
    rec.grew = run.group.add(rec.permutation)


# ---------------------------------------------------------------- trinomial lattice


@dataclass
class TrinomialLattice:
    vectors: list  # integer winding vectors, base-root order
    invariants: tuple
    spans: bool


def trinomial_solution_lattice(a_set, seed: int = 0, rounds: int = 4,
                               config: RunConfig | None = None) -> TrinomialLattice:
    """Solution-lattice generators from trinomial loops alone on a univariate support."""
    config = config or RunConfig(seed=seed)
    t = normalize(SupportTuple.of([a_set], 1) if not isinstance(a_set, SupportTuple) else a_set)
    rng = np.random.default_rng(seed)
    base, z = base_system(t, rng, config)
    pts = [p[0] for p in t.sets[0].points]
    opts = config.track_options()
    vectors = []
    for _ in range(rounds):
        for j, a_j in enumerate(pts):
            if a_j == 0:
                continue
            try:
                res = run_loop(trinomial_loop(base, j, a_j, rng), z, opts, config.match_tol)
                w = res.identity_winding()
            except NumericalError:
                continue
            if w is not None:
                vectors.append(tuple(int(x) for x in w[:, 0]))
    deg = z.shape[0]
    inv = invariant_factors(IntMatrix.from_columns(vectors, deg)) if vectors else ()
    spans = len(vectors) > 0 and len([s for s in inv if s]) == deg and all(s == 1 for s in inv if s)
    return TrinomialLattice(vectors, tuple(inv), spans)
