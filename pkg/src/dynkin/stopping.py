"""Multi-period stopping games on finite event trees.

The filtration is the tree itself: a node is an information state at time
``t`` and a stopping rule is a set of nodes per player. The game stops at
the first node along the realised path where anyone's rule fires.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterator, Mapping, Sequence

import numpy as np

from .geometry import OrthantSpec, project_hyperplane, project_orthant
from .model import WeightSystem, mask_of

NodeId = Hashable


@dataclass(frozen=True, eq=False)
class Node:
    id: NodeId
    t: int
    X: np.ndarray
    children: tuple[tuple[NodeId, float], ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children


class EventTree:
    """Finite rooted tree with transition probabilities and an adapted payoff ``X``."""

    def __init__(self, nodes: Sequence[Node] | Mapping[NodeId, Node], root: NodeId, tol: float = 1e-9):
        if isinstance(nodes, Mapping):
            nodes = list(nodes.values())
        self.nodes: dict[NodeId, Node] = {}
        for n in nodes:
            X = np.array(n.X, dtype=float).reshape(-1)
            X.flags.writeable = False
            if n.id in self.nodes:
                raise ValueError(f"duplicate node id {n.id!r}")
            children = tuple((cid, float(p)) for cid, p in n.children)
            self.nodes[n.id] = Node(n.id, int(n.t), X, children)
        self.root = root
        self._validate(tol)
        self.T = max(n.t for n in self.nodes.values())
        self.m = self.nodes[root].X.size
        # parents before children
        self.order = sorted(self.nodes, key=lambda i: self.nodes[i].t)

    def _validate(self, tol: float) -> None:
        if self.root not in self.nodes:
            raise ValueError(f"root {self.root!r} is not a node")
        root = self.nodes[self.root]
        if root.t != 0:
            raise ValueError("the root must sit at time 0")
        m = root.X.size
        if m < 1:
            raise ValueError("payoff vectors must be non-empty")
        T = max(n.t for n in self.nodes.values())
        seen = {self.root}
        stack = [self.root]
        while stack:
            n = self.nodes[stack.pop()]
            if n.X.size != m or not np.all(np.isfinite(n.X)):
                raise ValueError(f"node {n.id!r}: X must be {m} finite numbers")
            if n.t < T and not n.children:
                raise ValueError(f"node {n.id!r} at time {n.t} < T = {T} has no children")
            if n.t == T and n.children:
                raise ValueError(f"node {n.id!r} at the horizon must be a leaf")
            total = 0.0
            for cid, p in n.children:
                if cid not in self.nodes:
                    raise ValueError(f"node {n.id!r}: unknown child {cid!r}")
                if cid in seen:
                    raise ValueError(f"node {cid!r} is reachable twice")
                if not p > 0:
                    raise ValueError(f"node {n.id!r}: transition probabilities must be > 0")
                if self.nodes[cid].t != n.t + 1:
                    raise ValueError(f"node {cid!r}: child time must be parent time + 1")
                total += p
                seen.add(cid)
                stack.append(cid)
            if n.children and abs(total - 1.0) > tol:
                raise ValueError(f"node {n.id!r}: transition probabilities sum to {total!r}")
        if seen != set(self.nodes):
            raise ValueError("every node must be reachable from the root")

    @classmethod
    def chain(cls, X_rows) -> "EventTree":
        """Deterministic tree with one node per time step."""
        rows = np.asarray(X_rows, dtype=float)
        T = rows.shape[0] - 1
        nodes = [
            Node(t, t, rows[t], ((t + 1, 1.0),) if t < T else ())
            for t in range(T + 1)
        ]
        return cls(nodes, 0)

    @property
    def leaves(self) -> frozenset:
        return frozenset(i for i, n in self.nodes.items() if n.is_leaf)

    @property
    def internal(self) -> list[NodeId]:
        return [i for i in self.order if not self.nodes[i].is_leaf]

    @property
    def is_chain(self) -> bool:
        return all(len(n.children) <= 1 for n in self.nodes.values())

    def path(self) -> list[NodeId]:
        if not self.is_chain:
            raise ValueError("the tree is not a chain")
        out = [self.root]
        while self.nodes[out[-1]].children:
            out.append(self.nodes[out[-1]].children[0][0])
        return out

    def expectation(self, node: NodeId, values: Mapping[NodeId, np.ndarray]) -> np.ndarray:
        return sum(p * values[c] for c, p in self.nodes[node].children)


@dataclass(frozen=True)
class StoppingRule:
    """For each player, the nodes where it stops if the game is still running.

    Use :func:`stopping_rule` to build one; it adds the leaves.
    """

    stops: tuple[frozenset, ...]

    @property
    def m(self) -> int:
        return len(self.stops)

    def stoppers(self, node: NodeId) -> int:
        return mask_of(k for k, s in enumerate(self.stops) if node in s)


def stopping_rule(tree: EventTree, sets: Sequence) -> StoppingRule:
    if len(sets) != tree.m:
        raise ValueError(f"need one node set per player ({tree.m})")
    leaves = tree.leaves
    stops = []
    for s in sets:
        s = frozenset(s)
        unknown = s - set(tree.nodes)
        if unknown:
            raise ValueError(f"unknown nodes in stopping rule: {sorted(map(repr, unknown))}")
        stops.append(s | leaves)
    return StoppingRule(tuple(stops))


@dataclass(frozen=True, eq=False)
class ValueProcess:
    U: dict
    active: dict

    def __getitem__(self, node: NodeId) -> np.ndarray:
        return self.U[node]


def value_process(tree: EventTree, w: WeightSystem) -> ValueProcess:
    """Backward induction: leaves pay ``X``; an internal node projects the
    expected child value onto its exercise orthant."""
    if w.m != tree.m:
        raise ValueError(f"tree has {tree.m} players but the weights have {w.m}")
    U: dict = {}
    active: dict = {}
    full = (1 << tree.m) - 1
    for nid in reversed(tree.order):
        node = tree.nodes[nid]
        if node.is_leaf:
            U[nid] = node.X.copy()
            active[nid] = full
        else:
            U[nid], active[nid] = project_orthant(
                tree.expectation(nid, U), OrthantSpec(node.X), w
            )
    return ValueProcess(U, active)


def equilibrium_stopping(tree: EventTree, vp: ValueProcess, tol: float = 1e-9) -> StoppingRule:
    """Each player stops at the first node where its value meets its exercise payoff."""
    sets = [
        {nid for nid, node in tree.nodes.items() if vp.U[nid][k] <= node.X[k] + tol}
        for k in range(tree.m)
    ]
    return stopping_rule(tree, sets)


def evaluate_stopping_profile(
    tree: EventTree, w: WeightSystem, s: StoppingRule, vp: ValueProcess
) -> np.ndarray:
    """Expected payoff at the root when everyone follows ``s``.

    When a node stops the game, exercisers get their ``X`` and the others
    get the hyperplane projection of the expected continuation value.
    """

    def visit(nid) -> np.ndarray:
        node = tree.nodes[nid]
        if node.is_leaf:
            return node.X.copy()
        E = s.stoppers(nid)
        if E:
            return project_hyperplane(tree.expectation(nid, vp.U), E, node.X, w)
        return sum(p * visit(c) for c, p in node.children)

    return visit(tree.root)


def evaluate_natural_variant(tree: EventTree, w: WeightSystem, s: StoppingRule) -> np.ndarray:
    """Payoff of the variant that settles non-exercisers against the terminal ``X``."""
    if not tree.is_chain:
        raise ValueError("the terminal-payoff variant is only defined on deterministic chains")
    path = tree.path()
    X_T = tree.nodes[path[-1]].X
    for nid in path[:-1]:
        E = s.stoppers(nid)
        if E:
            return project_hyperplane(X_T, E, tree.nodes[nid].X, w)
    return X_T.copy()


def stopping_strategies(tree: EventTree, node: NodeId | None = None) -> Iterator[frozenset]:
    """Every distinct stopping time, as the set of nodes where it fires.

    Two rules that stop on the same nodes of every path are the same
    strategy, so only nodes not below an earlier stop are listed.
    """
    nid = tree.root if node is None else node
    n = tree.nodes[nid]
    yield frozenset([nid])
    if n.is_leaf:
        return
    parts = [list(stopping_strategies(tree, c)) for c, _ in n.children]

    def combine(i: int, acc: frozenset) -> Iterator[frozenset]:
        if i == len(parts):
            yield acc
            return
        for p in parts[i]:
            yield from combine(i + 1, acc | p)

    yield from combine(0, frozenset())
