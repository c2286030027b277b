"""Shared builders for test inputs."""
from __future__ import annotations

import random

from streamlens.network import ConversationGraph


def random_digraph(rng: random.Random, n: int, p: float, max_weight: int = 3) -> ConversationGraph:
    g = ConversationGraph(kind="mention")
    nodes = [f"a{i}" for i in range(n)]
    g.nodes.update(nodes)
    for u in nodes:
        for v in nodes:
            if u != v and rng.random() < p:
                g.add_edge(u, v, rng.randint(1, max_weight))
    return g
