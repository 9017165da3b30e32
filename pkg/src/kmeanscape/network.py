"""Stationary-point network: rates, fastest paths and growth to connectivity.

Minima are nodes; transition states are undirected multigraph edges.
Elementary rates use unit density of states, so a hop out of a minimum
over a barrier ``b`` at temperature ``T`` has rate ``exp(-b/T)``.
Set-to-set rates renormalise away intermediate nodes exactly (graph
transformation); fastest paths minimise the summed negative log branching
probability.
"""

import heapq
import logging
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import DatabaseError
from .transition import SurrogateParams, aligned_distance, attempt_connection

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RateParams:
    temperature: float = 1.0

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


class Network:
    """Immutable snapshot of a landscape database as a weighted graph."""

    def __init__(self, minima, transition_states):
        self.minima = {rec.id: rec for rec in minima}
        self.transition_states = {rec.id: rec for rec in transition_states}
        self.adjacency = defaultdict(list)
        for ts in transition_states:
            a, b = ts.connected
            self.adjacency[a].append((ts.id, b))
            self.adjacency[b].append((ts.id, a))

    @classmethod
    def from_db(cls, db):
        return cls(list(db.minima), list(db.transition_states))

    def components(self):
        """Connected components as sets of minimum ids, global first."""
        seen = set()
        comps = []
        for start in self.minima:
            if start in seen:
                continue
            comp = {start}
            queue = [start]
            while queue:
                node = queue.pop()
                for _, nbr in self.adjacency[node]:
                    if nbr not in comp:
                        comp.add(nbr)
                        queue.append(nbr)
            seen |= comp
            comps.append(comp)
        gm = self.global_minimum().id
        comps.sort(key=lambda c: (gm not in c, min(c)))
        return comps

    def global_minimum(self):
        if not self.minima:
            raise DatabaseError("network has no minima")
        return min(self.minima.values(), key=lambda r: (r.cost, r.id))


def elementary_rate(j_min, j_ts, p: RateParams, tol=1e-3) -> float:
    """Unit-prefactor rate over a single barrier."""
    barrier = j_ts - j_min
    if barrier < -tol:
        raise ValueError(f"transition state lies {-barrier:.3e} below its minimum")
    return math.exp(-max(barrier, 0.0) / p.temperature)


def branching(net: Network, min_id, p: RateParams):
    """Waiting time and branching probabilities out of one minimum.

    Parallel transition states between the same pair add their rates.
    """
    edges = net.adjacency[min_id]
    if not edges:
        raise ValueError(f"minimum {min_id} is isolated")
    j_min = net.minima[min_id].cost
    rates = defaultdict(float)
    for ts_id, nbr in edges:
        rates[nbr] += elementary_rate(j_min, net.transition_states[ts_id].cost, p)
    total = sum(rates.values())
    tau = 1.0 / total
    probs = {nbr: k / total for nbr, k in rates.items()}
    return tau, probs


def _reachable(net, targets):
    seen = set(targets)
    queue = list(targets)
    while queue:
        node = queue.pop()
        for _, nbr in net.adjacency[node]:
            if nbr not in seen:
                seen.add(nbr)
                queue.append(nbr)
    return seen


def overall_rate(net: Network, sources, sinks, p: RateParams) -> float:
    """Source-to-sink rate with intermediate minima renormalised away.

    Intermediates are removed one at a time (lowest-degree first),
    updating branching probabilities and waiting times exactly. Each
    source contributes its renormalised sink-hitting probability per unit
    renormalised waiting time, weighted by Boltzmann occupation within
    the source set.
    """
    sources = set(sources)
    sinks = set(sinks)
    if not sources or not sinks:
        raise ValueError("sources and sinks must be non-empty")
    if sources & sinks:
        raise ValueError("sources and sinks must be disjoint")
    missing = (sources | sinks) - set(net.minima)
    if missing:
        raise ValueError(f"unknown minima: {sorted(missing)}")
    reach = _reachable(net, sinks)
    if not sources <= reach:
        raise ValueError("sink set is unreachable from some source")

    # work on the subnetwork that can reach the sinks
    nodes = sorted(reach)
    index = {node: i for i, node in enumerate(nodes)}
    n = len(nodes)
    prob = np.zeros((n, n))
    tau = np.zeros(n)
    for node in nodes:
        if node in sinks:
            continue  # absorbing; row never used
        t, probs = branching(net, node, p)
        tau[index[node]] = t
        for nbr, q in probs.items():
            if nbr in index:
                prob[index[node], index[nbr]] = q

    active = set(range(n))
    sink_idx = {index[s] for s in sinks}
    source_idx = {index[s] for s in sources}
    interior = active - sink_idx - source_idx

    def degree(i):
        return int(np.count_nonzero(prob[i, sorted(active - {i})]))

    while interior:
        x = min(interior, key=lambda i: (degree(i), i))
        interior.remove(x)
        active.remove(x)
        others = np.array(sorted(active))
        gamma = prob[x, others].sum()  # 1 - P_xx, summed for stability
        if gamma <= 0.0 or not np.isfinite(gamma):
            raise FloatingPointError("branching mass vanished during node removal")
        row = prob[x, :] / gamma
        tx = tau[x] / gamma
        for i in others:
            pix = prob[i, x]
            if pix == 0.0:
                continue
            tau[i] += pix * tx
            prob[i, :] += pix * row
            prob[i, x] = 0.0
        prob[x, :] = 0.0
        prob[:, x] = 0.0

    js = np.array([net.minima[s].cost for s in sorted(sources)])
    logw = -js / p.temperature
    logw -= logw.max()
    w = np.exp(logw)
    w /= w.sum()

    rate = 0.0
    sink_cols = sorted(sink_idx)
    for weight, s in zip(w, sorted(sources)):
        i = index[s]
        p_sink = prob[i, sink_cols].sum()
        rate += weight * p_sink / tau[i]
    return float(rate)


@dataclass
class PathStep:
    kind: str  # "min" or "ts"
    id: int
    cost: float


@dataclass
class PathResult:
    steps: list
    total_weight: float


def fastest_path(net: Network, source, sink, p: RateParams) -> PathResult:
    """Dijkstra path minimising the summed -log branching probability.

    Parallel transition states contribute jointly to the hop probability;
    the reported transition state for each hop is the lowest-cost one.
    """
    if source not in net.minima or sink not in net.minima:
        raise ValueError("unknown endpoint")
    dist = {source: 0.0}
    prev = {}
    done = set()
    heap = [(0.0, source)]
    while heap:
        d, node = heapq.heappop(heap)
        if node in done:
            continue
        done.add(node)
        if node == sink:
            break
        if not net.adjacency[node]:
            continue
        _, probs = branching(net, node, p)
        for nbr, q in probs.items():
            if nbr in done:
                continue
            nd = d - math.log(q)
            if nd < dist.get(nbr, math.inf):
                dist[nbr] = nd
                prev[nbr] = node
                heapq.heappush(heap, (nd, nbr))
    if sink not in done:
        raise ValueError(f"minimum {sink} is unreachable from {source}")

    order = [sink]
    while order[-1] != source:
        order.append(prev[order[-1]])
    order.reverse()

    steps = []
    for i, node in enumerate(order):
        steps.append(PathStep("min", node, net.minima[node].cost))
        if i + 1 < len(order):
            nbr = order[i + 1]
            ts_ids = [ts_id for ts_id, other in net.adjacency[node] if other == nbr]
            best = min(ts_ids, key=lambda t: (net.transition_states[t].cost, t))
            steps.append(PathStep("ts", best, net.transition_states[best].cost))
    return PathResult(steps=steps, total_weight=dist[sink])


def select_next_pair(net: Network, exclude=frozenset()):
    """Next pair for a connection attempt, or None when fully connected.

    Picks the lowest-cost minimum outside the global minimum's component
    and its nearest (aligned centre distance) partner inside it. Pairs in
    ``exclude`` are skipped so a stalled search can move on.
    """
    comps = net.components()
    if len(comps) == 1:
        return None
    gm_comp = comps[0]
    outside = [net.minima[i] for c in comps[1:] for i in c]
    outside.sort(key=lambda r: (r.cost, r.id))
    inside = [net.minima[i] for i in sorted(gm_comp)]
    for u in outside:
        ranked = sorted(inside, key=lambda v: (aligned_distance(u.centres, v.centres), v.id))
        for v in ranked:
            if (u.id, v.id) not in exclude:
                return u.id, v.id
    return None


@dataclass
class GrowthReport:
    components: int
    attempted: int
    succeeded: int
    new_transition_states: int
    new_minima: int
    budget_exhausted: bool
    stalled: bool

    @property
    def connected(self):
        return self.components == 1


def grow_connected(points, db, budget, params=SurrogateParams()) -> GrowthReport:
    """Run connection attempts until one component remains or budget is spent."""
    attempted = succeeded = 0
    minima_before = len(db.minima)
    ts_before = len(db.transition_states)
    failed_pairs = set()
    stalled = False
    while True:
        net = Network.from_db(db)
        pair = select_next_pair(net, exclude=failed_pairs)
        if pair is None:
            stalled = len(net.components()) > 1
            break
        if attempted >= budget:
            break
        u, v = pair
        attempted += 1
        new_ts = attempt_connection(points, db.minima.get(u), db.minima.get(v), db, params)
        if new_ts:
            succeeded += 1
        else:
            failed_pairs.add(pair)
    n_comps = len(Network.from_db(db).components()) if len(db.minima) else 0
    return GrowthReport(
        components=n_comps,
        attempted=attempted,
        succeeded=succeeded,
        new_transition_states=len(db.transition_states) - ts_before,
        new_minima=len(db.minima) - minima_before,
        budget_exhausted=attempted >= budget and n_comps > 1 and not stalled,
        stalled=stalled,
    )


def suggest_temperature(net, sources, sinks, low=1e-6, high=1e-3, t_grid=None) -> float:
    """Scan temperatures until the overall rate lands inside [low, high]."""
    if t_grid is None:
        t_grid = np.geomspace(0.01, 100.0, 120)
    best_t, best_gap = None, math.inf
    for t in t_grid:
        try:
            rate = overall_rate(net, sources, sinks, RateParams(float(t)))
        except (ValueError, FloatingPointError):
            continue
        if rate <= 0.0:
            continue
        if low <= rate <= high:
            return float(t)
        target = math.sqrt(low * high)
        gap = abs(math.log(rate) - math.log(target))
        if gap < best_gap:
            best_t, best_gap = float(t), gap
    if best_t is None:
        raise ValueError("no usable temperature found")
    return best_t
