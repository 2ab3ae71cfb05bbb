"""Team-assessment analytics.

Pipelines for the measurement side of an exercise: proximity-rating
knowledge networks (link pruning against shorter indirect paths), network
similarity, least-squares trends, weighted workload scoring, interaction
network metrics, and trust-scale scoring.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from scipy import stats

SIMILARITY_SCALE_MAX = 9  # ratings on [1..9]; distance = 10 - rating

TLX_SUBSCALES = (
    "mental",
    "physical",
    "temporal",
    "performance",
    "effort",
    "frustration",
)
TLX_COMPARISONS = 15  # C(6,2)

TRUST_ITEMS = 13
TRUST_SCALE_MAX = 7


class AnalyticsError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Knowledge networks


@dataclass(frozen=True)
class SimilarityMatrix:
    """Pairwise concept similarity ratings on [1..9]; diagonal ignored."""

    concepts: tuple[str, ...]
    ratings: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "concepts", tuple(self.concepts))
        ratings = np.asarray(self.ratings, dtype=float)
        object.__setattr__(self, "ratings", ratings)
        n = len(self.concepts)
        if n < 2:
            raise AnalyticsError("need at least 2 concepts")
        if ratings.shape != (n, n):
            raise AnalyticsError(f"ratings must be {n}x{n}")
        off = ~np.eye(n, dtype=bool)
        if not np.allclose(ratings, ratings.T):
            raise AnalyticsError("ratings must be symmetric")
        if np.any(ratings[off] < 1) or np.any(ratings[off] > SIMILARITY_SCALE_MAX):
            raise AnalyticsError(f"ratings must lie in [1, {SIMILARITY_SCALE_MAX}]")


@dataclass(frozen=True)
class ProximityNet:
    """Pruned proximity network: links that no short indirect path beats."""

    nodes: tuple[str, ...]
    links: dict[tuple[str, str], float]  # key (a, b) with a < b
    q: int
    r: float

    def link_set(self) -> frozenset[tuple[str, str]]:
        return frozenset(self.links)


def to_distances(sim: SimilarityMatrix) -> np.ndarray:
    """d(i, j) = (scale max + 1) - rating(i, j); symmetric, positive."""
    d = (SIMILARITY_SCALE_MAX + 1) - sim.ratings.copy()
    np.fill_diagonal(d, 0.0)
    return d


def _compose_min(best: np.ndarray, d: np.ndarray, r: float) -> np.ndarray:
    """One more link: path weight under the Minkowski r-metric."""
    if math.isinf(r):
        # minimax composition
        stacked = np.maximum(best[:, :, None], d[None, :, :])
        return stacked.min(axis=1)
    powed = best**r
    dp = d**r
    stacked = (powed[:, :, None] + dp[None, :, :]) ** (1.0 / r)
    return stacked.min(axis=1)


def pfnet(
    d: np.ndarray,
    q: int,
    r: float,
    nodes: list[str] | None = None,
    tol: float = 1e-9,
) -> ProximityNet:
    """Prune the distance graph: keep link (i, j) iff no path of at most q
    links has a smaller r-metric weight than the direct distance.

    r may be any real >= 1, or math.inf for the maximum-link-weight metric.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if d.shape != (n, n):
        raise AnalyticsError("distance matrix must be square")
    if not (1 <= q <= max(1, n - 1)):
        raise AnalyticsError(f"q must lie in [1, {n - 1}]")
    if not (r >= 1):
        raise AnalyticsError("r must be >= 1 (or infinity)")
    if nodes is None:
        nodes = [f"c{i}" for i in range(n)]
    off = ~np.eye(n, dtype=bool)
    if np.any(d[off] <= 0):
        raise AnalyticsError("off-diagonal distances must be positive")

    work = d.copy()
    np.fill_diagonal(work, np.inf)  # paths never route "through" a stay-put step
    best = work.copy()  # min weight over paths of <= k links
    for _ in range(q - 1):
        best = np.minimum(best, _compose_min(best, work, r))

    links: dict[tuple[str, str], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            if d[i, j] <= best[i, j] + tol:
                a, b = nodes[i], nodes[j]
                key = (a, b) if a < b else (b, a)
                links[key] = float(d[i, j])
    return ProximityNet(tuple(nodes), links, q, r)


def net_similarity(a: ProximityNet, b: ProximityNet) -> float:
    """Jaccard index of the two link sets; 1.0 when both are empty."""
    if set(a.nodes) != set(b.nodes):
        raise AnalyticsError("networks have different node sets")
    la, lb = a.link_set(), b.link_set()
    union = la | lb
    if not union:
        return 1.0
    return len(la & lb) / len(union)


# ---------------------------------------------------------------------------
# Trend statistics


@dataclass(frozen=True)
class StatResult:
    statistic: float  # slope for trends, t for paired comparisons
    r_squared: float
    p_value: float
    n: int


def trend(series: list[tuple[float, float]]) -> StatResult:
    """Ordinary least squares over (x, y) pairs; two-sided p for the slope
    from the t distribution with n - 2 degrees of freedom."""
    if len(series) < 3:
        raise AnalyticsError("need at least 3 points")
    x = np.array([p[0] for p in series], dtype=float)
    y = np.array([p[1] for p in series], dtype=float)
    if np.ptp(x) == 0:
        raise AnalyticsError("x values are degenerate")
    if np.ptp(y) == 0:
        return StatResult(0.0, 0.0, 1.0, len(series))
    fit = stats.linregress(x, y)
    r2 = float(fit.rvalue**2)
    return StatResult(float(fit.slope), r2, float(fit.pvalue), len(series))


def paired_t(a: list[float], b: list[float]) -> StatResult:
    """Paired two-sided t test over elementwise differences."""
    if len(a) != len(b):
        raise AnalyticsError("paired lists must have equal length")
    if len(a) < 2:
        raise AnalyticsError("need at least 2 pairs")
    diffs = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    if np.all(diffs == diffs[0]):
        if diffs[0] == 0:
            return StatResult(0.0, 0.0, 1.0, len(a))
        # zero variance, nonzero mean: the statistic diverges
        return StatResult(math.copysign(math.inf, diffs[0]), 0.0, 0.0, len(a))
    res = stats.ttest_rel(a, b)
    return StatResult(float(res.statistic), 0.0, float(res.pvalue), len(a))


# ---------------------------------------------------------------------------
# Workload


@dataclass(frozen=True)
class TlxResponse:
    """Six subscale ratings in [0, 100] and pairwise-comparison win counts."""

    ratings: tuple[float, ...]
    pairwise_wins: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ratings", tuple(float(v) for v in self.ratings))
        object.__setattr__(
            self, "pairwise_wins", tuple(int(v) for v in self.pairwise_wins)
        )
        if len(self.ratings) != 6 or len(self.pairwise_wins) != 6:
            raise AnalyticsError("need exactly 6 ratings and 6 win counts")
        if any(not (0 <= v <= 100) for v in self.ratings):
            raise AnalyticsError("ratings must lie in [0, 100]")
        if any(w < 0 for w in self.pairwise_wins):
            raise AnalyticsError("win counts must be >= 0")
        if sum(self.pairwise_wins) != TLX_COMPARISONS:
            raise AnalyticsError(
                f"win counts must sum to {TLX_COMPARISONS}, got "
                f"{sum(self.pairwise_wins)}"
            )


def tlx_score(resp: TlxResponse) -> float:
    """Overall workload: win-weighted average of the six subscale ratings."""
    return sum(r * w for r, w in zip(resp.ratings, resp.pairwise_wins)) / TLX_COMPARISONS


# ---------------------------------------------------------------------------
# Interaction networks


@dataclass(frozen=True)
class InteractionEvent:
    source: str
    destination: str
    start_time: float
    duration_seconds: float
    kind: str  # "person-person" | "person-tool"
    source_group: str = ""
    dest_group: str = ""
    source_role: str = ""  # planner | leader | support
    dest_role: str = ""

    def __post_init__(self):
        if self.duration_seconds < 0:
            raise AnalyticsError("duration must be >= 0")
        if self.source == self.destination:
            raise AnalyticsError("source and destination must differ")
        if self.kind not in ("person-person", "person-tool"):
            raise AnalyticsError(f"unknown interaction kind {self.kind!r}")


@dataclass
class SnaMetrics:
    density: float
    weighted_degree: dict[str, float]
    betweenness: dict[str, float]
    cross_group_fraction: float


def _in_window(ev: InteractionEvent, window: tuple[float, float] | None) -> bool:
    return window is None or (window[0] <= ev.start_time < window[1])


def sna_metrics(
    events: list[InteractionEvent], window: tuple[float, float] | None = None
) -> SnaMetrics:
    """Metrics over the undirected person-person graph within the window.

    Edge weight sums interaction durations; betweenness uses unit edge
    lengths (unnormalized); density counts actors appearing in the window.
    """
    windowed = [ev for ev in events if _in_window(ev, window)]
    actors: set[str] = set()
    graph = nx.Graph()
    cross_weight = 0.0
    total_weight = 0.0
    for ev in windowed:
        actors.add(ev.source)
        if ev.kind != "person-person":
            continue
        actors.add(ev.destination)
        a, b = ev.source, ev.destination
        w = graph.get_edge_data(a, b, {}).get("weight", 0.0) + ev.duration_seconds
        graph.add_edge(a, b, weight=w)
        total_weight += ev.duration_seconds
        if ev.source_group != ev.dest_group:
            cross_weight += ev.duration_seconds

    n = len(actors)
    pairs = n * (n - 1) / 2
    density = graph.number_of_edges() / pairs if pairs else 0.0
    weighted_degree = {a: 0.0 for a in actors}
    for a, b, data in graph.edges(data=True):
        weighted_degree[a] += data["weight"]
        weighted_degree[b] += data["weight"]
    betweenness = {a: 0.0 for a in actors}
    betweenness.update(nx.betweenness_centrality(graph, normalized=False))
    cross = cross_weight / total_weight if total_weight else 0.0
    return SnaMetrics(density, weighted_degree, betweenness, cross)


def reliance_fraction(
    events: list[InteractionEvent], window: tuple[float, float] | None = None
) -> float:
    """Share of interaction time spent on tools or with support-role staff."""
    total = 0.0
    reliant = 0.0
    for ev in events:
        if not _in_window(ev, window):
            continue
        total += ev.duration_seconds
        if (
            ev.kind == "person-tool"
            or ev.source_role == "support"
            or ev.dest_role == "support"
        ):
            reliant += ev.duration_seconds
    return reliant / total if total else 0.0


def support_reliance_trend(
    events: list[InteractionEvent], windows: list[tuple[float, float]]
) -> StatResult:
    """Trend of the per-window reliance fraction over window index."""
    if len(windows) < 3:
        raise AnalyticsError("need at least 3 windows")
    series = [
        (float(i), reliance_fraction(events, w)) for i, w in enumerate(windows)
    ]
    return trend(series)


# ---------------------------------------------------------------------------
# Trust


@dataclass(frozen=True)
class TrustResponse:
    """13 items on [1..7]; reverse-coded items contribute 8 - value."""

    items: tuple[int, ...]
    reverse_coded: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(int(v) for v in self.items))
        object.__setattr__(
            self, "reverse_coded", tuple(bool(v) for v in self.reverse_coded)
        )
        if len(self.items) != TRUST_ITEMS:
            raise AnalyticsError(f"need exactly {TRUST_ITEMS} items")
        if len(self.reverse_coded) != TRUST_ITEMS:
            raise AnalyticsError(f"reverse-coded mask needs {TRUST_ITEMS} entries")
        if any(not (1 <= v <= TRUST_SCALE_MAX) for v in self.items):
            raise AnalyticsError(f"items must lie in [1, {TRUST_SCALE_MAX}]")


def trust_score(resp: TrustResponse) -> float:
    """Mean item score after reverse coding; lies in [1, 7]."""
    coded = [
        (TRUST_SCALE_MAX + 1 - v) if rev else v
        for v, rev in zip(resp.items, resp.reverse_coded)
    ]
    return sum(coded) / TRUST_ITEMS


# ---------------------------------------------------------------------------
# Tabular IO


def similarity_from_csv(text: str) -> SimilarityMatrix:
    """Header row lists concepts; each data row is 'concept,r1,r2,...'."""
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    concepts = [c.strip() for c in rows[0][1:]]
    n = len(concepts)
    ratings = np.zeros((n, n))
    for i, row in enumerate(rows[1 : n + 1]):
        ratings[i] = [float(v) for v in row[1 : n + 1]]
    return SimilarityMatrix(tuple(concepts), ratings)


def tlx_from_csv(text: str) -> list[TlxResponse]:
    """Columns: mental..frustration ratings then winsMental..winsFrustration."""
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for row in reader:
        ratings = [float(row[s]) for s in TLX_SUBSCALES]
        wins = [int(row["wins_" + s]) for s in TLX_SUBSCALES]
        out.append(TlxResponse(tuple(ratings), tuple(wins)))
    return out


def interactions_from_csv(text: str) -> list[InteractionEvent]:
    """Columns: timestamp, source, destination, durationSeconds, kind,
    sourceGroup, destGroup, sourceRole, destRole."""
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for row in reader:
        out.append(
            InteractionEvent(
                source=row["source"],
                destination=row["destination"],
                start_time=float(row["timestamp"]),
                duration_seconds=float(row["durationSeconds"]),
                kind=row["kind"],
                source_group=row.get("sourceGroup", ""),
                dest_group=row.get("destGroup", ""),
                source_role=row.get("sourceRole", ""),
                dest_role=row.get("destRole", ""),
            )
        )
    return out


def trust_from_csv(text: str) -> list[TrustResponse]:
    """Columns item1..item13; an optional first row of 0/1 flags named
    'reverse' marks reverse-coded items (default: none reversed)."""
    reader = csv.DictReader(io.StringIO(text))
    mask = [False] * TRUST_ITEMS
    responses = []
    for row in reader:
        values = [int(float(row[f"item{i + 1}"])) for i in range(TRUST_ITEMS)]
        if row.get("respondent", "") == "reverse":
            mask = [bool(v) for v in values]
            continue
        responses.append((row.get("respondent", ""), values))
    return [TrustResponse(tuple(v), tuple(mask)) for _, v in responses]
