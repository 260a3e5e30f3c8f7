"""Persistent catenable paths.

A :class:`CatPath` is an immutable rope of edges: leaves hold single edges
and inner nodes join two paths whose endpoints meet.  Concatenation is O(1)
and never copies, so a path table can share structure freely; walking a
path costs time linear in its length.
"""
from __future__ import annotations

from ..errors import EndpointMismatch
from ..graph import PathWitness


class CatPath:
    __slots__ = ("start", "end", "weight", "hops", "_edge", "_left", "_right")

    def __init__(self, start, end, weight, hops, edge=None, left=None, right=None):
        self.start = start
        self.end = end
        self.weight = weight
        self.hops = hops
        self._edge = edge
        self._left = left
        self._right = right

    @classmethod
    def empty(cls, v: int) -> "CatPath":
        return cls(v, v, 0.0, 0)

    @classmethod
    def edge(cls, u: int, v: int, w: float = 1.0) -> "CatPath":
        return cls(u, v, float(w), 1, edge=(u, v, float(w)))

    @classmethod
    def from_vertices(cls, g, vertices) -> "CatPath":
        path = cls.empty(vertices[0])
        for a, b in zip(vertices, vertices[1:]):
            path = path + cls.edge(a, b, g.weight(a, b))
        return path

    def __add__(self, other: "CatPath") -> "CatPath":
        if self.end != other.start:
            raise EndpointMismatch(f"cannot join a path ending at {self.end} "
                                   f"with one starting at {other.start}")
        if not self.hops:
            return other
        if not other.hops:
            return self
        return CatPath(self.start, other.end, self.weight + other.weight,
                       self.hops + other.hops, left=self, right=other)

    def edges(self):
        """Yield ``(u, v, w)`` in path order, iteratively."""
        stack = [self]
        while stack:
            node = stack.pop()
            if node._edge is not None:
                yield node._edge
            elif node.hops:
                stack.append(node._right)
                stack.append(node._left)

    def vertices(self) -> list[int]:
        out = [self.start]
        out.extend(v for _, v, _ in self.edges())
        return out

    def witness(self) -> PathWitness:
        return PathWitness(tuple(self.vertices()), self.weight)

    def __len__(self):
        return self.hops

    def __eq__(self, other):
        if not isinstance(other, CatPath):
            return NotImplemented
        return (self.start, self.end, self.hops) == (other.start, other.end, other.hops) \
            and list(self.edges()) == list(other.edges())

    def __hash__(self):
        return hash((self.start, self.end, self.hops, self.weight))

    def __repr__(self):
        return f"CatPath({' '.join(map(str, self.vertices()))}, weight={self.weight:g})"


def concat(*parts: CatPath) -> CatPath:
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    return out
