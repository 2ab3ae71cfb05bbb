import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    betweenness_bruteforce,
    mst_union_bruteforce,
    ols_closed_form,
    pfnet_links_bruteforce,
)
from wargamer.analytics import (
    AnalyticsError,
    InteractionEvent,
    SimilarityMatrix,
    TlxResponse,
    TrustResponse,
    interactions_from_csv,
    net_similarity,
    paired_t,
    pfnet,
    reliance_fraction,
    similarity_from_csv,
    sna_metrics,
    support_reliance_trend,
    tlx_from_csv,
    to_distances,
    trend,
    trust_score,
    tlx_score,
)


def random_distance_matrix(rng, n, integer=False):
    if integer:
        vals = rng.integers(1, 10, size=(n, n)).astype(float)
    else:
        vals = rng.uniform(0.5, 10.0, size=(n, n))
    d = np.triu(vals, 1)
    d = d + d.T
    return d


class TestDistances:
    def sim(self, ratings):
        n = len(ratings)
        return SimilarityMatrix(tuple(f"c{i}" for i in range(n)), np.array(ratings))

    def test_max_similarity_min_distance(self):
        d = to_distances(self.sim([[0, 9], [9, 0]]))
        assert d[0, 1] == 1.0

    def test_min_similarity_max_distance(self):
        d = to_distances(self.sim([[0, 1], [1, 0]]))
        assert d[0, 1] == 9.0

    def test_symmetric(self):
        d = to_distances(self.sim([[0, 3, 7], [3, 0, 5], [7, 5, 0]]))
        assert np.array_equal(d, d.T)

    def test_asymmetric_ratings_rejected(self):
        with pytest.raises(AnalyticsError):
            self.sim([[0, 3, 7], [4, 0, 5], [7, 5, 0]])


class TestPfnet:
    def test_two_nodes_always_linked(self):
        net = pfnet(np.array([[0.0, 4.0], [4.0, 0.0]]), q=1, r=math.inf)
        assert net.link_set() == frozenset({("c0", "c1")})

    def test_q1_keeps_every_pair(self):
        rng = np.random.default_rng(0)
        d = random_distance_matrix(rng, 5)
        net = pfnet(d, q=1, r=2.0)
        assert len(net.links) == 10

    def test_four_node_worked_case(self):
        # d(a,b)=1, d(b,c)=1, d(a,c)=3, all pairs with d: 10
        # a-c pruned: path a-b-c has max weight 1 < 3; 10-links survive
        nodes = ["a", "b", "c", "d"]
        d = np.full((4, 4), 10.0)
        np.fill_diagonal(d, 0.0)
        d[0, 1] = d[1, 0] = 1.0
        d[1, 2] = d[2, 1] = 1.0
        d[0, 2] = d[2, 0] = 3.0
        net = pfnet(d, q=3, r=math.inf, nodes=nodes)
        assert net.link_set() == frozenset(
            {("a", "b"), ("b", "c"), ("a", "d"), ("b", "d"), ("c", "d")}
        )

    def test_link_weights_equal_distance_entries(self):
        rng = np.random.default_rng(1)
        d = random_distance_matrix(rng, 6)
        net = pfnet(d, q=5, r=1.0)
        nodes = list(net.nodes)
        for (a, b), w in net.links.items():
            i, j = nodes.index(a), nodes.index(b)
            assert w == d[i, j]

    @pytest.mark.parametrize("r", [1.0, 2.0, math.inf])
    @pytest.mark.parametrize("q", [1, 2, 5])
    def test_matches_all_paths_oracle(self, q, r):
        rng = np.random.default_rng(42)
        for case in range(20):
            n = int(rng.integers(3, 7))
            d = random_distance_matrix(rng, n, integer=(case % 2 == 0))
            qq = min(q, n - 1)
            net = pfnet(d, q=qq, r=r)
            got = {
                (int(a[1:]), int(b[1:])) for a, b in net.link_set()
            }
            assert got == pfnet_links_bruteforce(d.tolist(), qq, r)

    def test_union_of_msts(self):
        rng = np.random.default_rng(7)
        for _ in range(15):
            n = int(rng.integers(3, 7))
            d = random_distance_matrix(rng, n, integer=True)
            net = pfnet(d, q=n - 1, r=math.inf)
            got = {(int(a[1:]), int(b[1:])) for a, b in net.link_set()}
            assert got == mst_union_bruteforce(d.tolist())

    def test_monotone_in_q_and_r(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            n = int(rng.integers(4, 7))
            d = random_distance_matrix(rng, n)
            for r in (1.0, 2.0, math.inf):
                prev = None
                for q in range(1, n):
                    links = pfnet(d, q=q, r=r).link_set()
                    if prev is not None:
                        assert links <= prev
                    prev = links
            for q in (2, n - 1):
                l1 = pfnet(d, q=q, r=1.0).link_set()
                l2 = pfnet(d, q=q, r=2.0).link_set()
                linf = pfnet(d, q=q, r=math.inf).link_set()
                assert linf <= l2 <= l1

    def test_invalid_params_rejected(self):
        d = random_distance_matrix(np.random.default_rng(0), 4)
        with pytest.raises(AnalyticsError):
            pfnet(d, q=0, r=2.0)
        with pytest.raises(AnalyticsError):
            pfnet(d, q=2, r=0.5)


class TestNetSimilarity:
    def net(self, n, q=1):
        d = random_distance_matrix(np.random.default_rng(n), n)
        return pfnet(d, q=q, r=math.inf)

    def test_identical_networks(self):
        net = self.net(5)
        assert net_similarity(net, net) == 1.0

    def test_disjoint_link_sets(self):
        nodes = ["a", "b", "c", "d"]
        d1 = np.full((4, 4), 10.0)
        np.fill_diagonal(d1, 0)
        d1[0, 1] = d1[1, 0] = 1.0  # MST-ish: cheap a-b
        d2 = d1.copy()
        from wargamer.analytics import ProximityNet

        n1 = ProximityNet(tuple(nodes), {("a", "b"): 1.0}, 1, math.inf)
        n2 = ProximityNet(tuple(nodes), {("c", "d"): 1.0}, 1, math.inf)
        assert net_similarity(n1, n2) == 0.0

    def test_set_arithmetic_example(self):
        from wargamer.analytics import ProximityNet

        nodes = ("a", "b", "c", "d")
        n1 = ProximityNet(nodes, {("a", "b"): 1, ("b", "c"): 1}, 1, 1.0)
        n2 = ProximityNet(nodes, {("a", "b"): 1, ("c", "d"): 1}, 1, 1.0)
        assert net_similarity(n1, n2) == pytest.approx(1 / 3)

    def test_both_empty_is_one(self):
        from wargamer.analytics import ProximityNet

        n1 = ProximityNet(("a", "b"), {}, 1, 1.0)
        n2 = ProximityNet(("a", "b"), {}, 1, 1.0)
        assert net_similarity(n1, n2) == 1.0

    def test_symmetry_and_equality_iff_one(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            n = int(rng.integers(3, 7))
            d1 = random_distance_matrix(rng, n, integer=True)
            d2 = random_distance_matrix(rng, n, integer=True)
            a = pfnet(d1, q=n - 1, r=math.inf)
            b = pfnet(d2, q=n - 1, r=math.inf)
            assert net_similarity(a, b) == net_similarity(b, a)
            assert (net_similarity(a, b) == 1.0) == (a.link_set() == b.link_set())

    def test_node_set_mismatch_rejected(self):
        from wargamer.analytics import ProximityNet

        n1 = ProximityNet(("a", "b"), {}, 1, 1.0)
        n2 = ProximityNet(("a", "c"), {}, 1, 1.0)
        with pytest.raises(AnalyticsError):
            net_similarity(n1, n2)


class TestTrend:
    def test_collinear(self):
        res = trend([(1, 0.2), (2, 0.4), (3, 0.6)])
        assert res.statistic == pytest.approx(0.2)
        assert res.r_squared == pytest.approx(1.0, abs=1e-9)

    def test_constant_y(self):
        res = trend([(1, 5.0), (2, 5.0), (3, 5.0)])
        assert res.statistic == 0.0
        assert res.r_squared == 0.0
        assert res.p_value == 1.0

    def test_hand_computed_ols_case(self):
        points = [(1, 1), (2, 2), (3, 2), (4, 3)]
        slope, intercept, r2, t_stat, p = ols_closed_form(points)
        assert slope == pytest.approx(0.6)
        assert r2 == pytest.approx(0.9)
        res = trend(points)
        assert res.statistic == pytest.approx(slope, abs=1e-9)
        assert res.r_squared == pytest.approx(r2, abs=1e-9)
        assert res.p_value == pytest.approx(p, abs=1e-9)

    def test_degenerate_x_rejected(self):
        with pytest.raises(AnalyticsError):
            trend([(1, 2.0), (1, 3.0), (1, 4.0)])

    @given(
        st.lists(
            st.tuples(st.floats(0, 50, allow_nan=False),
                      st.floats(0, 50, allow_nan=False)),
            min_size=3, max_size=15,
        )
    )
    @settings(max_examples=40)
    def test_matches_closed_form(self, points):
        xs = {p[0] for p in points}
        ys = {p[1] for p in points}
        if len(xs) < 2 or len(ys) < 2:
            return
        slope, _, r2, _, p = ols_closed_form(points)
        res = trend(points)
        assert res.statistic == pytest.approx(slope, rel=1e-6, abs=1e-9)
        assert res.r_squared == pytest.approx(r2, rel=1e-6, abs=1e-9)
        assert res.p_value == pytest.approx(p, rel=1e-6, abs=1e-9)


class TestTlx:
    def test_constant_ratings(self):
        resp = TlxResponse((50.0,) * 6, (5, 4, 3, 2, 1, 0))
        assert tlx_score(resp) == pytest.approx(50.0)

    def test_worked_example(self):
        resp = TlxResponse((100, 80, 60, 40, 20, 0), (5, 4, 3, 2, 1, 0))
        assert tlx_score(resp) == pytest.approx(1100 / 15)

    def test_degenerate_weights(self):
        resp = TlxResponse((30, 99, 99, 99, 99, 99), (15, 0, 0, 0, 0, 0))
        assert tlx_score(resp) == pytest.approx(30.0)

    def test_bad_win_sum_rejected(self):
        with pytest.raises(AnalyticsError):
            TlxResponse((50.0,) * 6, (5, 4, 3, 2, 1, 1))

    @given(st.data())
    @settings(max_examples=100)
    def test_score_bounded_by_rating_range(self, data):
        ratings = tuple(
            data.draw(st.floats(0, 100, allow_nan=False)) for _ in range(6)
        )
        cuts = sorted(
            data.draw(st.lists(st.integers(0, 15), min_size=5, max_size=5))
        )
        wins = tuple(
            b - a for a, b in zip([0] + cuts, cuts + [15])
        )
        score = tlx_score(TlxResponse(ratings, wins))
        assert min(ratings) - 1e-9 <= score <= max(ratings) + 1e-9


def pp(src, dst, dur, sgroup="g1", dgroup="g1", srole="planner", drole="planner",
       t=0.0):
    return InteractionEvent(src, dst, t, dur, "person-person",
                            sgroup, dgroup, srole, drole)


def pt(src, tool, dur, srole="planner", t=0.0):
    return InteractionEvent(src, tool, t, dur, "person-tool",
                            source_role=srole)


class TestSna:
    def test_path_graph(self):
        metrics = sna_metrics([pp("a", "b", 60), pp("b", "c", 30)])
        assert metrics.density == pytest.approx(2 / 3)
        assert metrics.betweenness["b"] == pytest.approx(1.0)
        assert metrics.betweenness["a"] == 0.0
        assert metrics.weighted_degree["b"] == pytest.approx(90.0)

    def test_single_dyad_cross_group(self):
        same = sna_metrics([pp("a", "b", 10, "g1", "g1")])
        diff = sna_metrics([pp("a", "b", 10, "g1", "g2")])
        assert same.cross_group_fraction == 0.0
        assert diff.cross_group_fraction == 1.0

    def test_empty_window(self):
        metrics = sna_metrics([pp("a", "b", 10, t=5.0)], window=(100.0, 200.0))
        assert metrics.density == 0.0
        assert metrics.betweenness == {}

    def test_repeated_dyad_weights_sum(self):
        metrics = sna_metrics([pp("a", "b", 10), pp("a", "b", 15)])
        assert metrics.weighted_degree["a"] == pytest.approx(25.0)

    def test_betweenness_matches_bruteforce(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            n = int(rng.integers(3, 8))
            nodes = [f"p{i}" for i in range(n)]
            edges = [
                (nodes[i], nodes[j])
                for i in range(n)
                for j in range(i + 1, n)
                if rng.random() < 0.5
            ]
            events = [pp(a, b, 10) for a, b in edges]
            if not events:
                continue
            metrics = sna_metrics(events)
            expected = betweenness_bruteforce(
                {v for e in edges for v in e}, edges
            )
            for node, score in expected.items():
                assert metrics.betweenness[node] == pytest.approx(score)


class TestReliance:
    def test_declining_fractions(self):
        events = []
        # window i in [10i, 10(i+1)): tool time 6-2i of 10 total
        for i, tool_time in enumerate([6.0, 4.0, 2.0]):
            events.append(pt("a", "tool", tool_time, t=10.0 * i))
            events.append(pp("a", "b", 10.0 - tool_time, t=10.0 * i))
        windows = [(0.0, 10.0), (10.0, 20.0), (20.0, 30.0)]
        res = support_reliance_trend(events, windows)
        assert res.statistic == pytest.approx(-0.2)
        assert res.r_squared == pytest.approx(1.0, abs=1e-9)

    def test_constant_fractions(self):
        events = [pt("a", "tool", 5.0, t=10.0 * i) for i in range(3)]
        events += [pp("a", "b", 5.0, t=10.0 * i) for i in range(3)]
        windows = [(0.0, 10.0), (10.0, 20.0), (20.0, 30.0)]
        res = support_reliance_trend(events, windows)
        assert res.statistic == 0.0

    def test_no_support_interactions(self):
        events = [pp("a", "b", 5.0, t=10.0 * i) for i in range(3)]
        windows = [(0.0, 10.0), (10.0, 20.0), (20.0, 30.0)]
        res = support_reliance_trend(events, windows)
        assert res.statistic == 0.0

    def test_support_role_counts(self):
        assert reliance_fraction(
            [pp("a", "b", 5.0, drole="support"), pp("a", "c", 5.0)]
        ) == pytest.approx(0.5)


class TestTrust:
    def test_neutral_midpoint(self):
        resp = TrustResponse((4,) * 13, (False,) * 13)
        assert trust_score(resp) == pytest.approx(4.0)

    def test_reverse_coded_item(self):
        items = [4] * 13
        items[0] = 7
        mask = [False] * 13
        mask[0] = True
        resp = TrustResponse(tuple(items), tuple(mask))
        assert trust_score(resp) == pytest.approx((1 + 4 * 12) / 13)

    def test_wrong_item_count_rejected(self):
        with pytest.raises(AnalyticsError):
            TrustResponse((4,) * 12, (False,) * 12)

    def test_paired_t_identical(self):
        res = paired_t([3.0, 4.0, 5.0], [3.0, 4.0, 5.0])
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_paired_t_known_direction(self):
        res = paired_t([1.0, 2.0, 1.5, 1.8], [5.0, 6.0, 5.5, 6.2])
        assert res.statistic < -5
        assert res.p_value < 0.01

    def test_paired_t_length_mismatch(self):
        with pytest.raises(AnalyticsError):
            paired_t([1.0, 2.0], [1.0])


class TestCsvLoaders:
    def test_similarity_csv(self):
        text = "concept,a,b,c\na,0,8,3\nb,8,0,5\nc,3,5,0\n"
        sim = similarity_from_csv(text)
        assert sim.concepts == ("a", "b", "c")
        assert sim.ratings[0, 1] == 8.0

    def test_tlx_csv(self):
        header = ",".join(
            ["mental", "physical", "temporal", "performance", "effort",
             "frustration"]
            + ["wins_" + s for s in
               ["mental", "physical", "temporal", "performance", "effort",
                "frustration"]]
        )
        text = header + "\n100,80,60,40,20,0,5,4,3,2,1,0\n"
        responses = tlx_from_csv(text)
        assert len(responses) == 1
        assert tlx_score(responses[0]) == pytest.approx(1100 / 15)

    def test_interactions_csv(self):
        text = (
            "timestamp,source,destination,durationSeconds,kind,"
            "sourceGroup,destGroup,sourceRole,destRole\n"
            "0,a,b,60,person-person,g1,g2,planner,leader\n"
            "5,a,tool1,30,person-tool,g1,,planner,\n"
        )
        events = interactions_from_csv(text)
        assert len(events) == 2
        assert events[0].dest_group == "g2"
        assert events[1].kind == "person-tool"
