"""
Step 1: balance-equation transport between pmfs on a fixed graph.

For every ordered pair (p_i, p_j) we solve

    min sum(c * w)  subject to  Q w = p_j - p_i,  w >= 0

over the 2m bidirected columns of Q, with a simplex method so the plan is a
vertex solution supported on a forest. When several vertices are optimal,
further LPs restricted to the optimal face pick one canonically. The plan is
then priced by M_alpha = sum over used columns of w^alpha * length.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.optimize import linprog

from config import BALANCE_TOLERANCE, FLOW_FLOOR, NEGATIVE_FLOW_TOLERANCE
from exceptions import (
    InfeasibleTransportError,
    InvalidArgumentError,
    TransportError,
    TransportNumericError,
)
from graph_core import BidirectedIncidence, Graph
from pmf import Pmf

logger = logging.getLogger(__name__)

POLISH_THRESHOLD = 1e-13
REDUCED_COST_TOLERANCE = 1e-9
HIGHS_METHOD = "highs-ds"
HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


class LpObjective(str, Enum):
    UNIT = "unit"
    LENGTH = "length"


@dataclass(frozen=True)
class SolverStats:
    iterations: int
    residual: float
    status: str

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """Nonnegative flow over the bidirected columns, with its costs."""

    flows: np.ndarray
    objective_l1: float
    solver_stats: SolverStats
    cost_alpha: Optional[float] = None
    alpha: Optional[float] = None


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    values: np.ndarray
    alpha: float
    symmetrized: bool
    max_asymmetry: float
    raw_values: np.ndarray = field(repr=False)
    pair_stats: Dict[Tuple[int, int], SolverStats] = field(default_factory=dict, repr=False)

    @property
    def n_vectors(self) -> int:
        return self.values.shape[0]


def _validate_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise InvalidArgumentError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha


def _balance_residual(inc: BidirectedIncidence, flows: np.ndarray, demand: np.ndarray) -> float:
    if inc.column_count == 0:
        return float(np.abs(demand).max(initial=0.0))
    return float(np.abs(inc.matrix() @ flows - demand).max(initial=0.0))


def _cancel_antiparallel(flows: np.ndarray, m: int) -> np.ndarray:
    """Remove 2-cycles: subtract min(w[k], w[m+k]) from both directions."""
    common = np.minimum(flows[:m], flows[m:])
    flows = flows.copy()
    flows[:m] -= common
    flows[m:] -= common
    return flows


def _polish_on_support(inc: BidirectedIncidence, flows: np.ndarray, demand: np.ndarray) -> np.ndarray:
    """
    Re-solve the balance equation on the plan's support.

    A vertex plan uses linearly independent columns (a forest), so the
    restricted system has a unique solution. The original flows are kept if
    the re-solve does not improve the residual without going negative.
    """
    support = np.flatnonzero(flows > 0)
    if support.size == 0:
        return flows
    restricted = inc.matrix()[:, support].toarray()
    solution, *_ = np.linalg.lstsq(restricted, demand, rcond=None)
    if solution.min() < -NEGATIVE_FLOW_TOLERANCE:
        return flows
    polished = np.zeros_like(flows)
    polished[support] = np.maximum(solution, 0.0)
    if _balance_residual(inc, polished, demand) >= _balance_residual(inc, flows, demand):
        return flows
    return polished


def _zero_plan(columns: int, status: str = "trivial") -> TransportPlan:
    return TransportPlan(
        flows=np.zeros(columns),
        objective_l1=0.0,
        solver_stats=SolverStats(iterations=0, residual=0.0, status=status),
    )


def _check_pmfs(inc: BidirectedIncidence, p_i: Pmf, p_j: Pmf) -> np.ndarray:
    if p_i.size != inc.n or p_j.size != inc.n:
        raise InvalidArgumentError(f"pmfs of size {p_i.size}/{p_j.size} on a graph of {inc.n} nodes")
    return p_j.masses - p_i.masses


def _linprog_stage(
    inc: BidirectedIncidence,
    costs: np.ndarray,
    demand: np.ndarray,
    allowed: np.ndarray,
):
    bounds = [(0, None) if ok else (0, 0) for ok in allowed]
    return linprog(
        costs,
        A_eq=inc.matrix(),
        b_eq=demand,
        bounds=bounds,
        method=HIGHS_METHOD,
        options=HIGHS_OPTIONS,
    )


def _optimal_face(result, costs: np.ndarray, allowed: np.ndarray) -> np.ndarray:
    """
    Columns that may stay positive in an optimal plan: zero reduced cost.

    Every feasible flow supported on these columns is optimal, and fixing the
    others at zero cuts out a face of the polytope, so later stages still
    return vertices of the original problem.
    """
    marginals = getattr(getattr(result, "lower", None), "marginals", None)
    if marginals is None:
        return allowed & (np.asarray(result.x) > 0)
    tolerance = REDUCED_COST_TOLERANCE * max(1.0, float(np.abs(costs).max()))
    return allowed & (np.asarray(marginals) <= tolerance)


def tie_break_costs(inc: BidirectedIncidence) -> List[np.ndarray]:
    """
    Secondary objectives applied in order over the l1-optimal face: the
    graph's edge preference (when known), then the lowest edge index. Both
    directions of an edge share a cost.
    """
    stages = []
    if inc.edge_preference is not None:
        stages.append(np.asarray(inc.edge_preference, dtype=float))
    index = np.arange(1, inc.m + 1, dtype=float)
    stages.append(np.concatenate([index, index]))
    return stages


def _reversed(flows: np.ndarray, m: int) -> np.ndarray:
    return np.concatenate([flows[m:], flows[:m]])


def solve_balance_lp(
    inc: BidirectedIncidence,
    p_i: Pmf,
    p_j: Pmf,
    objective: LpObjective = LpObjective.UNIT,
) -> TransportPlan:
    """
    Minimum-l1 nonnegative flow moving p_i onto p_j (a vertex solution).

    The LP is always solved for the demand whose first nonzero entry is
    negative; the opposite pair gets the reversed plan, so the plan for
    p_j -> p_i is exactly the reversal of the plan for p_i -> p_j. Among
    several optimal vertices the plan is fixed by `tie_break_costs`.
    """
    demand = _check_pmfs(inc, p_i, p_j)
    if not demand.any():
        return _zero_plan(inc.column_count)
    if inc.column_count == 0:
        raise InfeasibleTransportError("graph has no edges but the pmfs differ")

    flipped = bool(demand[np.flatnonzero(demand)[0]] > 0)
    if flipped:
        demand = -demand

    objective = LpObjective(objective)
    costs = np.ones(inc.column_count) if objective is LpObjective.UNIT else np.asarray(inc.edge_lengths)

    allowed = np.ones(inc.column_count, dtype=bool)
    result = _linprog_stage(inc, costs, demand, allowed)
    iterations = int(getattr(result, "nit", 0) or 0)
    if result.status == 2:
        raise InfeasibleTransportError(
            f"balance equation infeasible: {result.message}",
            stats={"iterations": iterations, "status": int(result.status)},
        )
    if result.status != 0 or result.x is None:
        raise TransportNumericError(
            f"LP solver failed: {result.message}",
            stats={"iterations": iterations, "status": int(result.status)},
        )
    flows = np.asarray(result.x, dtype=float)

    stage_costs = costs
    for secondary in tie_break_costs(inc):
        allowed = _optimal_face(result, stage_costs, allowed)
        if np.count_nonzero(allowed) <= np.count_nonzero(flows > 0):
            break
        candidate = _linprog_stage(inc, secondary, demand, allowed)
        iterations += int(getattr(candidate, "nit", 0) or 0)
        if candidate.status != 0 or candidate.x is None:
            logger.debug(f"Tie-break stage failed ({candidate.message}); keeping the previous plan")
            break
        result, stage_costs = candidate, secondary
        flows = np.asarray(result.x, dtype=float)

    if flows.min() < -NEGATIVE_FLOW_TOLERANCE:
        raise TransportNumericError(
            f"solver returned negative flow {flows.min():.3g}",
            stats={"iterations": iterations, "min_flow": float(flows.min())},
        )
    flows = np.maximum(flows, 0.0)
    flows = _cancel_antiparallel(flows, inc.m)

    residual = _balance_residual(inc, flows, demand)
    if residual > POLISH_THRESHOLD:
        flows = _polish_on_support(inc, flows, demand)
        residual = _balance_residual(inc, flows, demand)
    if residual > BALANCE_TOLERANCE:
        raise TransportNumericError(
            f"balance residual {residual:.3g} exceeds {BALANCE_TOLERANCE:g}",
            stats={"iterations": iterations, "residual": residual},
        )
    if flipped:
        flows = _reversed(flows, inc.m)

    return TransportPlan(
        flows=flows,
        objective_l1=float(flows.sum()),
        solver_stats=SolverStats(iterations=iterations, residual=residual, status="optimal"),
    )


def transport_cost(
    plan: TransportPlan,
    edge_lengths: Sequence[float],
    alpha: float,
    floor: float = FLOW_FLOOR,
) -> float:
    """M_alpha: sum of w^alpha * length over used columns (0^alpha counts as 0)."""
    alpha = _validate_alpha(alpha)
    lengths = np.asarray(edge_lengths, dtype=float)
    if lengths.shape != plan.flows.shape:
        raise InvalidArgumentError(f"{lengths.size} lengths for {plan.flows.size} flow columns")
    used = plan.flows > floor
    return float(np.sum(plan.flows[used] ** alpha * lengths[used]))


def priced(plan: TransportPlan, edge_lengths: Sequence[float], alpha: float) -> TransportPlan:
    """Copy of the plan with cost_alpha filled in."""
    return replace(plan, cost_alpha=transport_cost(plan, edge_lengths, alpha), alpha=float(alpha))


def plan_support_edges(inc: BidirectedIncidence, plan: TransportPlan, floor: float = FLOW_FLOOR) -> List[Tuple[int, int, int]]:
    """Used directed columns as (tail, head, column)."""
    return [
        (int(inc.tails[k]), int(inc.heads[k]), int(k))
        for k in np.flatnonzero(plan.flows > floor)
    ]


def tree_flow_oracle(g: Graph, p_i: Pmf, p_j: Pmf) -> TransportPlan:
    """
    The unique cycle-free flow on a tree: the net flow across an edge is the
    demand surplus of the subtree it cuts off.
    """
    if not g.is_tree():
        raise InvalidArgumentError("tree_flow_oracle needs a tree (connected, n-1 edges)")
    m = g.edge_count
    if p_i.size != g.node_count or p_j.size != g.node_count:
        raise InvalidArgumentError("pmf size does not match the tree")
    demand = p_j.masses - p_i.masses
    if m == 0:
        return _zero_plan(0, status="tree-oracle")

    tree_edges = list(nx.bfs_edges(g.to_networkx(), 0))
    subtree = demand.copy()
    for parent, child in reversed(tree_edges):
        subtree[parent] += subtree[child]

    index = g.edge_index()
    flows = np.zeros(2 * m)
    for parent, child in tree_edges:
        surplus = subtree[child]
        k = index[(min(parent, child), max(parent, child))]
        low_to_high = (parent < child) == (surplus > 0)
        if surplus != 0:
            flows[k if low_to_high else m + k] = abs(surplus)

    residual = float(np.abs(demand - _signed_flow(g, flows)).max())
    return TransportPlan(
        flows=flows,
        objective_l1=float(flows.sum()),
        solver_stats=SolverStats(iterations=0, residual=residual, status="tree-oracle"),
    )


def _signed_flow(g: Graph, flows: np.ndarray) -> np.ndarray:
    """Net inflow per node for a flow over the bidirected columns."""
    m = g.edge_count
    inflow = np.zeros(g.node_count)
    for k, (u, v, _) in enumerate(g.edges):
        net = flows[k] - flows[m + k]
        inflow[v] += net
        inflow[u] -= net
    return inflow


def distance_matrix(
    inc: BidirectedIncidence,
    pmfs: Sequence[Pmf],
    alpha: float,
    objective: LpObjective = LpObjective.UNIT,
    workers: int = 1,
    verbose: bool = False,
) -> DistanceMatrix:
    """
    D_ij = M_alpha of the LP plan moving p_i onto p_j, for all ordered pairs,
    then symmetrized as (D + D^T) / 2. With `verbose` every pair's solver
    stats are logged at INFO.
    """
    alpha = _validate_alpha(alpha)
    count = len(pmfs)
    if count < 2:
        raise InvalidArgumentError(f"need at least 2 pmfs, got {count}")

    pairs = [(i, j) for i in range(count) for j in range(count) if i != j]

    def solve(pair):
        i, j = pair
        try:
            plan = solve_balance_lp(inc, pmfs[i], pmfs[j], objective)
        except TransportError as e:
            raise e.with_pair(pair) from e
        return pair, transport_cost(plan, inc.edge_lengths, alpha), plan.solver_stats

    logger.info(f"Solving {len(pairs)} transport problems on {inc.n} nodes / {inc.column_count} columns "
                f"(alpha={alpha}, workers={workers})")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve, pairs))
    else:
        results = [solve(pair) for pair in pairs]

    raw = np.zeros((count, count))
    pair_stats = {}
    for (i, j), cost, stats in results:
        raw[i, j] = cost
        pair_stats[(i, j)] = stats
        if verbose:
            logger.info(f"pair ({i}, {j}): M_alpha={cost:.6g}, {stats.iterations} iterations, "
                        f"residual {stats.residual:.2g}")

    max_asymmetry = float(np.abs(raw - raw.T).max())
    values = (raw + raw.T) / 2.0
    np.fill_diagonal(values, 0.0)
    raw.setflags(write=False)
    values.setflags(write=False)

    if max_asymmetry > 0:
        logger.info(f"Symmetrized distance matrix, max |D_ij - D_ji| = {max_asymmetry:.3g}")
    if not values.any():
        logger.warning("All transport costs are zero; eigenvector pmfs are indistinguishable")

    return DistanceMatrix(
        values=values,
        alpha=alpha,
        symmetrized=True,
        max_asymmetry=max_asymmetry,
        raw_values=raw,
        pair_stats=pair_stats,
    )
