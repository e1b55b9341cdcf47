"""Finitely generated group models with exact element arithmetic.

Four families: integer lattices Z^d, free groups (reduced words over signed
generator indices), the discrete Heisenberg group, and cyclic groups.  Each
model exposes multiplication, inversion, a symmetric generating set, word
lengths, and a canonical string encoding, so weighted sections and Cayley-ball
enumeration can be written once over the common interface.

Elements are plain hashable tuples/ints:
  - Z^d        : tuple of d ints
  - free group : tuple of nonzero signed ints, freely reduced
  - Heisenberg : (a, b, c) with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a*b')
  - cyclic n   : int in range(n)
"""

from __future__ import annotations

import numpy as np

BALL_CAP_DEFAULT = 2_000_000


class GroupError(ValueError):
    pass


class BallCapExceeded(GroupError):
    def __init__(self, cap):
        super().__init__(f"ball enumeration exceeded the configured cap of {cap} elements")


class GroupModel:
    family: str

    def identity(self):
        raise NotImplementedError

    def generators(self) -> list:
        """Symmetric, identity-free generating set, in a fixed deterministic order."""
        raise NotImplementedError

    def mul(self, x, y):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def word_length(self, x) -> int:
        raise NotImplementedError

    def encode(self, x) -> str:
        raise NotImplementedError

    def decode(self, text: str):
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, GroupModel) and self.descriptor() == other.descriptor()

    def __hash__(self):
        return hash(tuple(sorted(self.descriptor().items())))

    def __repr__(self):
        items = ", ".join(f"{k}={v}" for k, v in self.descriptor().items() if k != "family")
        return f"{type(self).__name__}({items})"


class ZdGroup(GroupModel):
    family = "integer-lattice"

    def __init__(self, d: int):
        if d < 1:
            raise GroupError("lattice dimension must be >= 1")
        self.d = d

    def identity(self):
        return (0,) * self.d

    def generators(self):
        gens = []
        for i in range(self.d):
            e = [0] * self.d
            e[i] = 1
            gens.append(tuple(e))
            e[i] = -1
            gens.append(tuple(e))
        return gens

    def mul(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def inv(self, x):
        return tuple(-a for a in x)

    def word_length(self, x):
        return int(sum(abs(a) for a in x))

    def encode(self, x):
        return " ".join(str(a) for a in x)

    def decode(self, text):
        parts = tuple(int(tok) for tok in text.split())
        if len(parts) != self.d:
            raise GroupError(f"expected {self.d} coordinates, got {len(parts)}")
        return parts

    def descriptor(self):
        return {"family": self.family, "d": self.d}


class FreeGroup(GroupModel):
    """Free group of finite rank; elements stored as freely reduced words.

    A word is a tuple of nonzero ints; +i is the i-th generator and -i its
    inverse (1-based), e.g. (1, -2, 1) for a b^-1 a.
    """

    family = "free-group"

    def __init__(self, rank: int):
        if rank < 1:
            raise GroupError("free group rank must be >= 1")
        self.rank = rank

    def identity(self):
        return ()

    def generators(self):
        return [(i,) for i in range(1, self.rank + 1)] + [(-i,) for i in range(1, self.rank + 1)]

    def check_word(self, w):
        for a, b in zip(w, w[1:]):
            if a == -b:
                raise GroupError(f"word {w} is not freely reduced")
        if any(x == 0 or abs(x) > self.rank for x in w):
            raise GroupError(f"word {w} has letters outside rank {self.rank}")
        return w

    def mul(self, x, y):
        x = list(x)
        for letter in y:
            if x and x[-1] == -letter:
                x.pop()
            else:
                x.append(letter)
        return tuple(x)

    def inv(self, x):
        return tuple(-a for a in reversed(x))

    def word_length(self, x):
        return len(x)

    def encode(self, x):
        return " ".join(f"{a:+d}" for a in x)

    def decode(self, text):
        word = tuple(int(tok) for tok in text.split())
        return self.check_word(word)

    def descriptor(self):
        return {"family": self.family, "rank": self.rank}


class HeisenbergGroup(GroupModel):
    """Discrete Heisenberg group: upper unitriangular 3x3 integer matrices."""

    family = "heisenberg"

    def __init__(self):
        self._length_cache: dict = {self.identity(): 0}
        self._cached_radius = 0

    def identity(self):
        return (0, 0, 0)

    def generators(self):
        return [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]

    def mul(self, x, y):
        return (x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[0] * y[1])

    def inv(self, x):
        return (-x[0], -x[1], -x[2] + x[0] * x[1])

    def word_length(self, x):
        # BFS-backed: lengths are grown on demand and cached.
        while x not in self._length_cache:
            if self._cached_radius > 64:
                raise GroupError(f"element {x} outside the enumerated radius")
            self._grow_lengths()
        return self._length_cache[x]

    def _grow_lengths(self):
        r = self._cached_radius
        frontier = [g for g, l in self._length_cache.items() if l == r]
        for z in frontier:
            for g in self.generators():
                w = self.mul(g, z)
                if w not in self._length_cache:
                    self._length_cache[w] = r + 1
        self._cached_radius = r + 1

    def encode(self, x):
        return " ".join(str(a) for a in x)

    def decode(self, text):
        parts = tuple(int(tok) for tok in text.split())
        if len(parts) != 3:
            raise GroupError("Heisenberg elements have 3 coordinates")
        return parts

    def descriptor(self):
        return {"family": self.family}


class CyclicGroup(GroupModel):
    family = "cyclic"

    def __init__(self, n: int):
        if n < 2:
            raise GroupError("cyclic order must be >= 2")
        self.n = n

    def identity(self):
        return 0

    def generators(self):
        if self.n == 2:
            return [1]
        return [1, self.n - 1]

    def mul(self, x, y):
        return (x + y) % self.n

    def inv(self, x):
        return (-x) % self.n

    def word_length(self, x):
        x %= self.n
        return min(x, self.n - x)

    def encode(self, x):
        return str(x % self.n)

    def decode(self, text):
        return int(text) % self.n

    def descriptor(self):
        return {"family": self.family, "n": self.n}


def group_from_descriptor(obj: dict) -> GroupModel:
    family = obj.get("family")
    if family == "integer-lattice":
        return ZdGroup(int(obj["d"]))
    if family == "free-group":
        return FreeGroup(int(obj["rank"]))
    if family == "heisenberg":
        return HeisenbergGroup()
    if family == "cyclic":
        return CyclicGroup(int(obj["n"]))
    raise GroupError(f"unknown group family {family!r}")


def ball(group: GroupModel, radius: int, cap: int = BALL_CAP_DEFAULT) -> list:
    """Exact enumeration of the radius-r ball around the identity, BFS order."""
    return enumerate_ball(group, radius, cap).elements


class BallTable:
    """A Cayley ball with index lookup and left-generator action arrays.

    ``action[g][i]`` is the index of g * elements[i], or ``len(elements)``
    (a padding slot) when the product leaves the ball.
    """

    def __init__(self, elements, index, action, radius):
        self.elements = elements
        self.index = index
        self.action = action
        self.radius = radius

    @property
    def size(self):
        return len(self.elements)


def enumerate_ball(group: GroupModel, radius: int, cap: int = BALL_CAP_DEFAULT) -> BallTable:
    if radius < 0:
        raise GroupError("radius must be nonnegative")
    gens = group.generators()
    elements = [group.identity()]
    index = {group.identity(): 0}
    layer_start = 0
    for _ in range(radius):
        layer_end = len(elements)
        for i in range(layer_start, layer_end):
            z = elements[i]
            for g in gens:
                w = group.mul(g, z)
                if w not in index:
                    index[w] = len(elements)
                    elements.append(w)
                    if len(elements) > cap:
                        raise BallCapExceeded(cap)
        layer_start = layer_end
        if layer_start == len(elements):
            break  # finite group exhausted
    n = len(elements)
    action = {}
    for g in gens:
        arr = np.full(n, n, dtype=np.int64)
        for i, z in enumerate(elements):
            j = index.get(group.mul(g, z))
            if j is not None:
                arr[i] = j
        action[g] = arr
    return BallTable(elements, index, action, radius)
