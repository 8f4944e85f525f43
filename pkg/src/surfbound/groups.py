"""Finite group backends for surface-kernel work.

Two element models share one informal protocol (mul, inv, identity,
element_order, contains, generates, elements, descriptor):

* PermutationGroup: elements are image tuples, eagerly enumerated by BFS
  over the generators (deterministic order), capped to keep memory sane.
* CyclicGroup / DihedralGroup: elements are arithmetic keys, so verifying
  a witness inside a dihedral group of order 4(g-1) costs a handful of
  big-int operations however large g gets.

Composition convention throughout: (x*y)[i] = x[y[i]], i.e. y acts first.
Left multiplication in the regular representation is then a homomorphism.
"""

import os
import re
from math import gcd, lcm

DEFAULT_ORDER_CAP = 10 ** 6


class OrderCapExceeded(RuntimeError):
    """Enumerating the group would exceed the configured order cap."""


def _order_cap(explicit):
    if explicit is not None:
        return explicit
    env = os.environ.get("SURFBOUND_ORDER_CAP")
    return int(env) if env else DEFAULT_ORDER_CAP


def perm_mul(x, y):
    return tuple(x[i] for i in y)


def perm_inv(x):
    out = [0] * len(x)
    for i, xi in enumerate(x):
        out[xi] = i
    return tuple(out)


def perm_order(x):
    seen = [False] * len(x)
    result = 1
    for start in range(len(x)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = x[i]
            length += 1
        result = lcm(result, length)
    return result


class PermutationGroup:
    def __init__(self, degree, generators, descriptor, order_cap=None):
        self.degree = degree
        self.descriptor = descriptor
        gens = []
        for g in generators:
            g = tuple(g)
            if sorted(g) != list(range(degree)):
                raise ValueError(f"not a permutation of 0..{degree - 1}: {g}")
            gens.append(g)
        self.generators = tuple(gens)
        self.identity = tuple(range(degree))
        cap = _order_cap(order_cap)
        # eager BFS closure; the visit order is the canonical enumeration
        elements = [self.identity]
        index = {self.identity: 0}
        head = 0
        while head < len(elements):
            e = elements[head]
            head += 1
            for g in self.generators:
                w = perm_mul(e, g)
                if w not in index:
                    if len(elements) >= cap:
                        raise OrderCapExceeded(
                            f"group {descriptor!r} exceeds order cap {cap}"
                        )
                    index[w] = len(elements)
                    elements.append(w)
        self.elements = tuple(elements)
        self.index = index

    @property
    def order(self):
        return len(self.elements)

    def mul(self, x, y):
        return perm_mul(x, y)

    def inv(self, x):
        return perm_inv(x)

    def element_order(self, x):
        return perm_order(x)

    def contains(self, x):
        return x in self.index

    def generates(self, xs):
        """Whether the given elements generate the whole group."""
        xs = [x for x in xs]
        for x in xs:
            if not self.contains(x):
                raise ValueError(f"element {x} not in group {self.descriptor!r}")
        closure = {self.identity}
        frontier = [self.identity]
        while frontier:
            if len(closure) == self.order:
                return True
            nxt = []
            for e in frontier:
                for g in xs:
                    w = perm_mul(e, g)
                    if w not in closure:
                        closure.add(w)
                        nxt.append(w)
            frontier = nxt
        return len(closure) == self.order

    def exponent(self):
        result = 1
        for e in self.elements:
            result = lcm(result, perm_order(e))
        return result

    def element_data(self, x):
        return list(x)

    def element_from_data(self, data):
        x = tuple(data)
        if not self.contains(x):
            raise ValueError(f"element {data} not in group {self.descriptor!r}")
        return x


class CyclicGroup:
    """C_n with elements 0..n-1 as exponent keys; never enumerated unless asked."""

    def __init__(self, n, order_cap=None):
        if n < 1:
            raise ValueError(f"cyclic order must be >= 1, got {n}")
        self.n = n
        self.descriptor = f"cyclic:{n}"
        self.identity = 0
        self.generators = (1 % n,)
        self._cap = _order_cap(order_cap)

    @property
    def order(self):
        return self.n

    def mul(self, x, y):
        return (x + y) % self.n

    def inv(self, x):
        return (-x) % self.n

    def element_order(self, x):
        return self.n // gcd(self.n, x)

    def contains(self, x):
        return isinstance(x, int) and 0 <= x < self.n

    def generates(self, xs):
        g = self.n
        for x in xs:
            if not self.contains(x):
                raise ValueError(f"element {x} not in {self.descriptor}")
            g = gcd(g, x)
        return g == 1

    @property
    def elements(self):
        if self.n > self._cap:
            raise OrderCapExceeded(f"{self.descriptor} exceeds order cap {self._cap}")
        return tuple(range(self.n))

    @property
    def index(self):
        return {k: k for k in self.elements}

    def exponent(self):
        return self.n

    def element_data(self, x):
        return x

    def element_from_data(self, data):
        if not self.contains(data):
            raise ValueError(f"element {data} not in {self.descriptor}")
        return data


class DihedralGroup:
    """D_n of order 2n, elements (i, e) standing for rotation^i * reflection^e.

    Multiplication key identity: (i,e)*(j,f) = (i + (-1)^e j mod n, e xor f).
    All operations are O(1) integer arithmetic, independent of n.
    """

    def __init__(self, n, order_cap=None):
        if n < 1:
            raise ValueError(f"dihedral parameter must be >= 1, got {n}")
        self.n = n
        self.descriptor = f"dihedral:{n}"
        self.identity = (0, 0)
        self.generators = ((1 % n, 0), (0, 1))
        self._cap = _order_cap(order_cap)

    @property
    def order(self):
        return 2 * self.n

    def mul(self, x, y):
        i, e = x
        j, f = y
        return ((i + j) % self.n if e == 0 else (i - j) % self.n, e ^ f)

    def inv(self, x):
        i, e = x
        return ((-i) % self.n, 0) if e == 0 else x

    def element_order(self, x):
        i, e = x
        return 2 if e else self.n // gcd(self.n, i)

    def contains(self, x):
        return (
            isinstance(x, tuple)
            and len(x) == 2
            and isinstance(x[0], int)
            and 0 <= x[0] < self.n
            and x[1] in (0, 1)
        )

    def generates(self, xs):
        # without a reflection only a rotation subgroup is reachable, always proper;
        # with one, the rotation part is generated by the rotation keys together
        # with differences of reflection keys
        rotations = []
        reflections = []
        for x in xs:
            if not self.contains(x):
                raise ValueError(f"element {x} not in {self.descriptor}")
            (rotations if x[1] == 0 else reflections).append(x[0])
        if not reflections:
            return False
        base = reflections[0]
        g = self.n
        for i in rotations:
            g = gcd(g, i)
        for j in reflections[1:]:
            g = gcd(g, j - base)
        return g == 1

    @property
    def elements(self):
        if 2 * self.n > self._cap:
            raise OrderCapExceeded(f"{self.descriptor} exceeds order cap {self._cap}")
        return tuple((i, e) for e in (0, 1) for i in range(self.n))

    @property
    def index(self):
        return {k: i for i, k in enumerate(self.elements)}

    def exponent(self):
        return lcm(self.n, 2)

    def element_data(self, x):
        return list(x)

    def element_from_data(self, data):
        x = (data[0], data[1])
        if not self.contains(x):
            raise ValueError(f"element {data} not in {self.descriptor}")
        return x


def _regular_group(keys, mul_fn, gen_keys, descriptor, order_cap=None):
    # left-regular representation: with (x*y)[i] = x[y[i]] this is a homomorphism
    index = {k: i for i, k in enumerate(keys)}
    gens = [tuple(index[mul_fn(g, k)] for k in keys) for g in gen_keys]
    return PermutationGroup(len(keys), gens, descriptor, order_cap)


def cyclic_perm(n, order_cap=None):
    if n < 1:
        raise ValueError(f"cyclic order must be >= 1, got {n}")
    rot = tuple((i + 1) % n for i in range(n))
    return PermutationGroup(n, [rot], f"C{n}", order_cap)


def dihedral_perm(n, order_cap=None):
    # the natural degree-n action is only faithful from n = 3 on
    if n < 3:
        raise ValueError(f"dihedral permutation model needs n >= 3, got {n}; use V4 or C2")
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return PermutationGroup(n, [rot, ref], f"D{n}", order_cap)


def klein_four(order_cap=None):
    return PermutationGroup(4, [(1, 0, 3, 2), (2, 3, 0, 1)], "V4", order_cap)


def quaternion8(order_cap=None):
    # keys (i, e) = a^i b^e with a^4 = 1, b^2 = a^2, b a b^-1 = a^-1
    def mul(x, y):
        i, e = x
        j, f = y
        if e == 0:
            return ((i + j) % 4, f)
        if f == 0:
            return ((i - j) % 4, 1)
        return ((i - j + 2) % 4, 0)

    keys = [(i, e) for e in (0, 1) for i in range(4)]
    return _regular_group(keys, mul, [(1, 0), (0, 1)], "Q8", order_cap)


def semidihedral16(order_cap=None):
    # keys (i, e) = a^i b^e with a^8 = b^2 = 1, b a b^-1 = a^3
    def mul(x, y):
        i, e = x
        j, f = y
        if e == 0:
            return ((i + j) % 8, f)
        return ((i + 3 * j) % 8, 1 ^ f)

    keys = [(i, e) for e in (0, 1) for i in range(8)]
    return _regular_group(keys, mul, [(1, 0), (0, 1)], "SD16", order_cap)


GL23_POINTS = tuple(
    (x, y) for x in range(3) for y in range(3) if (x, y) != (0, 0)
)


def _linear_perm_33(matrix, points):
    (a, b), (c, d) = matrix
    index = {v: i for i, v in enumerate(points)}
    images = []
    for x, y in points:
        w = ((a * x + b * y) % 3, (c * x + d * y) % 3)
        if w not in index:
            raise ValueError(f"matrix {matrix} is singular mod 3")
        images.append(index[w])
    return tuple(images)


def gl2_3(order_cap=None):
    """GL(2,3) acting on the 8 nonzero vectors of F_3^2 in lex order."""
    gens = [
        _linear_perm_33(((1, 1), (0, 1)), GL23_POINTS),
        _linear_perm_33(((1, 0), (1, 1)), GL23_POINTS),
        _linear_perm_33(((2, 0), (0, 1)), GL23_POINTS),
    ]
    return PermutationGroup(8, gens, "GL23", order_cap)


def symmetric(n, order_cap=None):
    if n < 2:
        raise ValueError(f"symmetric model needs n >= 2, got {n}")
    cycle = tuple((i + 1) % n for i in range(n))
    swap = tuple([1, 0] + list(range(2, n)))
    gens = [swap] if n == 2 else [swap, cycle]
    return PermutationGroup(n, gens, f"S{n}", order_cap)


def alternating(n, order_cap=None):
    if n < 3:
        raise ValueError(f"alternating model needs n >= 3, got {n}")
    three = tuple([1, 2, 0] + list(range(3, n)))
    if n % 2:
        big = tuple((i + 1) % n for i in range(n))
    else:
        big = tuple([0] + [(i % (n - 1)) + 1 for i in range(1, n)])
    gens = [three] if n == 3 else [three, big]
    return PermutationGroup(n, gens, f"A{n}", order_cap)


def direct_product(left, right, order_cap=None):
    """Direct product of two permutation groups, acting on the disjoint union."""
    d1, d2 = left.degree, right.degree
    gens = []
    for g in left.generators:
        gens.append(tuple(g) + tuple(d1 + i for i in range(d2)))
    for g in right.generators:
        gens.append(tuple(range(d1)) + tuple(d1 + gi for gi in g))
    return PermutationGroup(
        d1 + d2, gens, f"{left.descriptor}*{right.descriptor}", order_cap
    )


def affine33(matrices, order_cap=None):
    """(C3 x C3) extended by the linear maps given as 2x2 matrices over F_3.

    Acts on the 9 points of F_3^2 (point (x, y) is index 3x + y); generators
    are the two unit translations followed by the matrices.
    """
    points = [(x, y) for x in range(3) for y in range(3)]
    index = {v: i for i, v in enumerate(points)}
    t1 = tuple(index[((x + 1) % 3, y)] for x, y in points)
    t2 = tuple(index[(x, (y + 1) % 3)] for x, y in points)
    gens = [t1, t2]
    parts = []
    for m in matrices:
        (a, b), (c, d) = m
        images = []
        for x, y in points:
            images.append(index[((a * x + b * y) % 3, (c * x + d * y) % 3)])
        gens.append(tuple(images))
        parts.append(",".join(str(e % 3) for e in (a, b, c, d)))
    return PermutationGroup(9, gens, "aff9:" + ":".join(parts), order_cap)


_FIXED = {
    "V4": klein_four,
    "klein_four": klein_four,
    "Q8": quaternion8,
    "SD16": semidihedral16,
    "GL23": gl2_3,
}


def construct(descriptor, order_cap=None):
    """Build a group from its descriptor string.

    Grammar: C<n>, D<n> (n >= 3), S<n>, A<n>, V4 (alias klein_four), Q8,
    SD16, GL23, cyclic:<n> and dihedral:<n> (parametric backends, any n),
    aff9:<a,b,c,d>:..., perm:<degree>:<images>:..., and '*' for direct
    products of permutation groups.
    """
    descriptor = descriptor.strip()
    if "*" in descriptor:
        parts = descriptor.split("*")
        group = construct(parts[0], order_cap)
        for part in parts[1:]:
            group = direct_product(group, construct(part, order_cap), order_cap)
        return group
    if descriptor in _FIXED:
        return _FIXED[descriptor](order_cap)
    m = re.fullmatch(r"([CDSA])(\d+)", descriptor)
    if m:
        kind, n = m.group(1), int(m.group(2))
        if kind == "C":
            return cyclic_perm(n, order_cap)
        if kind == "D":
            return dihedral_perm(n, order_cap)
        if kind == "S":
            return symmetric(n, order_cap)
        return alternating(n, order_cap)
    m = re.fullmatch(r"cyclic:(\d+)", descriptor)
    if m:
        return CyclicGroup(int(m.group(1)), order_cap)
    m = re.fullmatch(r"dihedral:(\d+)", descriptor)
    if m:
        return DihedralGroup(int(m.group(1)), order_cap)
    if descriptor.startswith("aff9:"):
        matrices = []
        for part in descriptor[len("aff9:"):].split(":"):
            entries = [int(t) for t in part.split(",")]
            if len(entries) != 4:
                raise ValueError(f"bad aff9 matrix {part!r}")
            matrices.append(((entries[0], entries[1]), (entries[2], entries[3])))
        return affine33(matrices, order_cap)
    if descriptor.startswith("perm:"):
        parts = descriptor.split(":")
        if len(parts) < 3:
            raise ValueError(f"bad perm descriptor {descriptor!r}")
        degree = int(parts[1])
        gens = []
        for part in parts[2:]:
            gens.append(tuple(int(t) for t in part.split(",")))
        return PermutationGroup(degree, gens, descriptor, order_cap)
    raise ValueError(f"cannot parse group descriptor {descriptor!r}")
