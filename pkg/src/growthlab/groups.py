"""Exact element arithmetic for the concrete group backends.

Elements are immutable coordinate tuples attached to a parent descriptor.
Backends: finite-or-free abelian groups, unitriangular integer matrix groups
with entries modulo m (m = 0 means plain integers), and flat direct products
of the two.  All arithmetic is exact; canonical coordinates make equality,
hashing and ordering trivial.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

from .errors import ParentMismatch

_BIAS = 1 << 63  # offset-binary sign handling for unbounded entries


def _encode_coords(coords: tuple[int, ...]) -> bytes:
    # Fixed-width per coordinate; byte-lexicographic order equals numeric
    # tuple order, so "minimal canonical encoding" is plain tuple order.
    return b"".join((c + _BIAS).to_bytes(8, "big") for c in coords)


class GroupDescriptor:
    """Common interface of the backends.  Instances are immutable and hashable."""

    arity: int
    structural_step: int

    def reduce(self, coords):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def identity_coords(self) -> tuple[int, ...]:
        raise NotImplementedError

    def is_abelian(self) -> bool:
        raise NotImplementedError

    def is_finite(self) -> bool:
        raise NotImplementedError

    def order(self) -> int | None:
        """Group order, or None when infinite."""
        raise NotImplementedError

    def iter_coords(self) -> Iterator[tuple[int, ...]]:
        """Enumerate the whole group (finite backends only)."""
        raise NotImplementedError

    def generator_coords(self) -> list[tuple[int, ...]]:
        """A standard finite generating set."""
        raise NotImplementedError

    def encode(self, coords) -> bytes:
        return _encode_coords(coords)

    # convenience wrappers over Element
    def identity(self) -> "Element":
        return Element(self, self.identity_coords())

    def element(self, coords) -> "Element":
        return Element(self, self.reduce(tuple(coords)))

    def generators(self) -> list["Element"]:
        return [Element(self, c) for c in self.generator_coords()]


def _reduce_mod(c: int, m: int) -> int:
    return c % m if m > 0 else c


@dataclass(frozen=True)
class FiniteAbelian(GroupDescriptor):
    """Direct sum of cyclic groups Z_{m_i}; modulus 0 denotes an infinite Z factor."""

    moduli: tuple[int, ...]

    def __post_init__(self):
        if len(self.moduli) == 0:
            raise ValueError("need at least one cyclic factor")
        if any(m < 0 for m in self.moduli):
            raise ValueError("moduli must be >= 0")

    @property
    def arity(self) -> int:
        return len(self.moduli)

    @property
    def structural_step(self) -> int:
        return 1

    def reduce(self, coords):
        if len(coords) != len(self.moduli):
            raise ValueError(f"expected {len(self.moduli)} coordinates")
        return tuple(_reduce_mod(c, m) for c, m in zip(coords, self.moduli))

    def mul(self, a, b):
        return tuple(_reduce_mod(x + y, m) for x, y, m in zip(a, b, self.moduli))

    def inv(self, a):
        return tuple(_reduce_mod(-x, m) for x, m in zip(a, self.moduli))

    def identity_coords(self):
        return (0,) * len(self.moduli)

    def is_abelian(self):
        return True

    def is_finite(self):
        return all(m > 0 for m in self.moduli)

    def order(self):
        if not self.is_finite():
            return None
        n = 1
        for m in self.moduli:
            n *= m
        return n

    def iter_coords(self):
        if not self.is_finite():
            raise ValueError("cannot enumerate an infinite group")
        def rec(i, prefix):
            if i == len(self.moduli):
                yield prefix
                return
            for c in range(self.moduli[i]):
                yield from rec(i + 1, prefix + (c,))
        yield from rec(0, ())

    def generator_coords(self):
        out = []
        for i, m in enumerate(self.moduli):
            if m == 1:
                continue
            c = [0] * len(self.moduli)
            c[i] = 1
            out.append(tuple(c))
        return out


@dataclass(frozen=True)
class Unitriangular(GroupDescriptor):
    """Upper unitriangular n x n matrices over Z_m (m = 0: over Z).

    Coordinates store the strictly-upper entries row-major:
    (0,1),(0,2),...,(0,n-1),(1,2),...,(n-2,n-1).
    """

    n: int
    modulus: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need n >= 2")
        if self.modulus < 0:
            raise ValueError("modulus must be >= 0")

    @cached_property
    def positions(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i in range(self.n) for j in range(i + 1, self.n))

    @cached_property
    def pos_index(self) -> dict[tuple[int, int], int]:
        return {p: k for k, p in enumerate(self.positions)}

    @property
    def arity(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def structural_step(self) -> int:
        return self.n - 1

    def reduce(self, coords):
        if len(coords) != self.arity:
            raise ValueError(f"expected {self.arity} coordinates")
        m = self.modulus
        return tuple(_reduce_mod(c, m) for c in coords)

    def mul(self, a, b):
        m = self.modulus
        idx = self.pos_index
        out = []
        for k, (i, j) in enumerate(self.positions):
            v = a[k] + b[k]
            for t in range(i + 1, j):
                v += a[idx[(i, t)]] * b[idx[(t, j)]]
            out.append(_reduce_mod(v, m))
        return tuple(out)

    def inv(self, a):
        # Solve (I + a)(I + e) = I entry by entry, shortest gaps first.
        m = self.modulus
        idx = self.pos_index
        e: dict[tuple[int, int], int] = {}
        for gap in range(1, self.n):
            for i in range(self.n - gap):
                j = i + gap
                v = -a[idx[(i, j)]]
                for t in range(i + 1, j):
                    v -= a[idx[(i, t)]] * e[(t, j)]
                e[(i, j)] = _reduce_mod(v, m)
        return tuple(e[p] for p in self.positions)

    def identity_coords(self):
        return (0,) * self.arity

    def is_abelian(self):
        return self.n == 2

    def is_finite(self):
        return self.modulus > 0

    def order(self):
        return self.modulus ** self.arity if self.modulus > 0 else None

    def iter_coords(self):
        if self.modulus == 0:
            raise ValueError("cannot enumerate an infinite group")
        def rec(k, prefix):
            if k == self.arity:
                yield prefix
                return
            for c in range(self.modulus):
                yield from rec(k + 1, prefix + (c,))
        yield from rec(0, ())

    def generator_coords(self):
        # Superdiagonal elementary matrices generate the whole group.
        if self.modulus == 1:
            return []
        out = []
        for i in range(self.n - 1):
            c = [0] * self.arity
            c[self.pos_index[(i, i + 1)]] = 1
            out.append(tuple(c))
        return out


@dataclass(frozen=True)
class DirectProduct(GroupDescriptor):
    """Flat direct product of abelian and unitriangular factors."""

    factors: tuple[GroupDescriptor, ...]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("product needs at least one factor")
        for f in self.factors:
            if isinstance(f, DirectProduct):
                raise ValueError("products must be flat")
            if not isinstance(f, (FiniteAbelian, Unitriangular)):
                raise ValueError(f"unsupported factor {f!r}")

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for f in self.factors:
            out.append(acc)
            acc += f.arity
        return tuple(out)

    @property
    def arity(self) -> int:
        return sum(f.arity for f in self.factors)

    @property
    def structural_step(self) -> int:
        return max(f.structural_step for f in self.factors)

    def _split(self, coords):
        for f, off in zip(self.factors, self.offsets):
            yield f, coords[off:off + f.arity]

    def reduce(self, coords):
        if len(coords) != self.arity:
            raise ValueError(f"expected {self.arity} coordinates")
        out: tuple[int, ...] = ()
        for f, part in self._split(tuple(coords)):
            out += f.reduce(part)
        return out

    def mul(self, a, b):
        out: tuple[int, ...] = ()
        for f, off in zip(self.factors, self.offsets):
            out += f.mul(a[off:off + f.arity], b[off:off + f.arity])
        return out

    def inv(self, a):
        out: tuple[int, ...] = ()
        for f, off in zip(self.factors, self.offsets):
            out += f.inv(a[off:off + f.arity])
        return out

    def identity_coords(self):
        return (0,) * self.arity

    def is_abelian(self):
        return all(f.is_abelian() for f in self.factors)

    def is_finite(self):
        return all(f.is_finite() for f in self.factors)

    def order(self):
        n = 1
        for f in self.factors:
            o = f.order()
            if o is None:
                return None
            n *= o
        return n

    def iter_coords(self):
        if not self.is_finite():
            raise ValueError("cannot enumerate an infinite group")
        def rec(i, prefix):
            if i == len(self.factors):
                yield prefix
                return
            for part in self.factors[i].iter_coords():
                yield from rec(i + 1, prefix + part)
        yield from rec(0, ())

    def generator_coords(self):
        out = []
        for f, off in zip(self.factors, self.offsets):
            pad_l, pad_r = off, self.arity - off - f.arity
            for c in f.generator_coords():
                out.append((0,) * pad_l + c + (0,) * pad_r)
        return out


class Element:
    """An immutable group element: a parent plus canonical coordinates."""

    __slots__ = ("parent", "coords")

    def __init__(self, parent, coords: tuple[int, ...]):
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, *a):
        raise AttributeError("Element is immutable")

    def __mul__(self, other: "Element") -> "Element":
        if self.parent != other.parent:
            raise ParentMismatch(f"{self.parent!r} vs {other.parent!r}")
        return Element(self.parent, self.parent.mul(self.coords, other.coords))

    def inv(self) -> "Element":
        return Element(self.parent, self.parent.inv(self.coords))

    def __pow__(self, k: int) -> "Element":
        p = self.parent
        if k < 0:
            return self.inv() ** (-k)
        acc = p.identity_coords()
        base = self.coords
        while k:
            if k & 1:
                acc = p.mul(acc, base)
            base = p.mul(base, base)
            k >>= 1
        return Element(p, acc)

    def is_identity(self) -> bool:
        return self.coords == self.parent.identity_coords()

    def encode(self) -> bytes:
        return self.parent.encode(self.coords)

    def __eq__(self, other):
        return (
            isinstance(other, Element)
            and self.parent == other.parent
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((self.parent, self.coords))

    def __lt__(self, other: "Element"):
        if self.parent != other.parent:
            raise ParentMismatch("cannot order elements of different parents")
        return self.coords < other.coords

    def __repr__(self):
        return f"Element{self.coords}"


def commutator(a: Element, b: Element) -> Element:
    """[a, b] = a^-1 b^-1 a b."""
    return a.inv() * b.inv() * a * b


def conjugate(a: Element, g: Element) -> Element:
    """g a g^-1."""
    return g * a * g.inv()


def heisenberg(modulus: int = 0) -> Unitriangular:
    """UT(3, Z_m); modulus 0 gives the integer Heisenberg group."""
    return Unitriangular(3, modulus)
