"""Regrasp graph construction and lexicographic shortest-path planning.

Paths are ordered by (handoff count, sum of 1 - edge quality): the plan
with the fewest handoffs always wins, quality only breaks ties. Node ids
break remaining ties deterministically.
"""

import heapq
from dataclasses import dataclass

import numpy as np

from .edges import check_regrasp
from .fixture import place_check

START = "start"
GOAL = "goal"


@dataclass
class RegraspGraph:
    edges: dict                    # node -> list of (node, handoff, weight)
    start_grasp: object            # the grasp at the start node
    in_air: list                   # InAirGrasp list, node i = in_air[i]
    fixture: object

    def neighbors(self, node):
        return self.edges.get(node, [])


@dataclass
class Plan:
    steps: list                    # ("pick", grasp) / ("handoff", a, b) / ("place", g, pose)
    regrasp_count: int
    total_weight: float

    def to_dict(self):
        steps = []
        for step in self.steps:
            kind = step[0]
            if kind == "pick":
                steps.append({"kind": "pick",
                              "grasp": step[1].object_in_gripper.to_dict()})
            elif kind == "handoff":
                steps.append({"kind": "handoff",
                              "from": step[1].object_in_gripper.to_dict(),
                              "to": step[2].object_in_gripper.to_dict()})
            else:
                steps.append({"kind": "place",
                              "grasp": step[1].object_in_gripper.to_dict(),
                              "goal": step[2].to_dict()})
        return {"steps": steps, "regrasp_count": self.regrasp_count,
                "total_weight": self.total_weight}


def build_graph(start_grasp, in_air, cache, gripper, fixture,
                place_ok=None, place_quality=None, mesh=None):
    """Online graph assembly: cached G-G edges plus start/goal edges.

    place_ok / place_quality may carry precomputed goal-side edges for the
    in-air set; otherwise they are evaluated here.
    """
    n = len(in_air)
    if place_ok is None:
        place_ok = np.zeros(n, dtype=bool)
        place_quality = np.zeros(n)
        for i, g in enumerate(in_air):
            place_ok[i], place_quality[i] = place_check(
                g.object_in_gripper, g.width, gripper, fixture)

    edges = {START: [], GOAL: []}
    ok_direct, q_direct = place_check(start_grasp.object_in_gripper,
                                      start_grasp.width, gripper, fixture)
    if ok_direct:
        edges[START].append((GOAL, 0, 1.0 - q_direct))
    for i, g in enumerate(in_air):
        feasible, quality = check_regrasp(start_grasp, g, gripper, mesh=mesh)
        if feasible:
            edges[START].append((i, 1, 1.0 - quality))
    for i in range(n):
        lst = []
        for j in range(n):
            if cache.feasible[i, j]:
                lst.append((j, 1, 1.0 - float(cache.quality[i, j])))
        if place_ok[i]:
            lst.append((GOAL, 0, 1.0 - float(place_quality[i])))
        edges[i] = lst
    return RegraspGraph(edges, start_grasp, list(in_air), fixture)


def _node_key(node):
    return (0, 0) if node == START else (2, 0) if node == GOAL else (1, node)


def shortest_path(graph):
    """Lexicographic Dijkstra from start to goal. Returns a Plan or None."""
    best = {}
    counter = 0
    heap = [((0, 0.0), (_node_key(START),), 0, START, (START,))]
    while heap:
        cost, _, _, node, path = heapq.heappop(heap)
        if node == GOAL:
            return _plan_from_path(graph, path, cost)
        if node in best and best[node] <= cost:
            continue
        best[node] = cost
        for nxt, handoff, weight in graph.neighbors(node):
            if nxt in path:
                continue
            ncost = (cost[0] + handoff, cost[1] + weight)
            if nxt in best and best[nxt] <= ncost:
                continue
            npath = path + (nxt,)
            counter += 1
            heapq.heappush(heap, (ncost, tuple(_node_key(p) for p in npath),
                                  counter, nxt, npath))
    return None


def _plan_from_path(graph, path, cost):
    steps = [("pick", graph.start_grasp)]
    hold = graph.start_grasp
    for node in path[1:]:
        if node == GOAL:
            steps.append(("place", hold, graph.fixture.seat_pose))
        else:
            nxt = graph.in_air[node]
            steps.append(("handoff", hold, nxt))
            hold = nxt
    return Plan(steps, regrasp_count=cost[0], total_weight=round(cost[1], 12))


def min_handoff_counts(start_feasible, start_place_ok, cache, place_ok_g,
                       max_handoffs=2):
    """Vectorized minimal handoff counts for many start grasps at once.

    start_feasible: (T, G) bool start-to-in-air feasibility;
    start_place_ok: (T,) bool direct placement; place_ok_g: (G,) goal-side
    edges. Returns an int array with -1 where no plan exists within
    max_handoffs (manipulability 0 either way).
    """
    t_count = len(start_place_ok)
    counts = np.full(t_count, -1, dtype=np.int64)
    counts[start_place_ok] = 0
    reachable = place_ok_g.copy()            # g can reach goal in 0 further handoffs
    for k in range(1, max_handoffs + 1):
        hit = start_feasible @ reachable > 0
        counts = np.where((counts < 0) & hit, k, counts)
        if k < max_handoffs:
            reachable = (cache.feasible @ reachable > 0) | reachable
    return counts
