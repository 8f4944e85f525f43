"""Exact integer and prime-field linear algebra.

Everything here works on plain Python ints (arbitrary precision), lists of
lists for matrices.  No floating point anywhere: these routines back the
homology computations, where a single rounding error would silently corrupt
a certificate.
"""

from math import gcd


def smith_normal_form(rows, ncols):
    """Diagonalize an integer matrix by unimodular row and column operations.

    Returns (diag, colmat) where diag is the list of diagonal entries
    d_1 | d_2 | ... (nonnegative, divisibility chain) and colmat is the
    accumulated n x n unimodular column transform V with U*A*V diagonal.
    Row transforms are not tracked; for presenting the cokernel
    Z^n / rowspace(A), the class of a row vector v has coordinates v*V.
    """
    a = [list(r) for r in rows]
    m = len(a)
    n = ncols
    for r in a:
        if len(r) != n:
            raise ValueError("ragged matrix")
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        # row[dst] += c * row[src]
        ra, rb = a[src], a[dst]
        for j in range(n):
            rb[j] += c * ra[j]

    def add_col(src, dst, c):
        for row in a:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    def negate_col(j):
        for row in a:
            row[j] = -row[j]
        for row in v:
            row[j] = -row[j]

    t = 0
    limit = min(m, n)
    while t < limit:
        # pick the nonzero pivot of least magnitude in the remaining block
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                e = a[i][j]
                if e != 0 and (piv is None or abs(e) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            # clear column t below the pivot
            dirty = False
            for i in range(t + 1, m):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    add_row(t, i, -q)
                    if a[i][t] != 0:
                        swap_rows(t, i)
                        dirty = True
            if dirty:
                continue
            # clear row t right of the pivot
            for j in range(t + 1, n):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    add_col(t, j, -q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
            if dirty:
                continue
            # pivot must divide every entry of the remaining block
            bad = None
            p = a[t][t]
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % p != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(bad, t, 1)
        t += 1

    diag = []
    for i in range(limit):
        d = a[i][i]
        if d < 0:
            negate_col(i)
            d = -d
        if d == 0:
            break
        diag.append(d)
    return diag, v


def cokernel_invariants(rows, ncols):
    """Invariants of Z^ncols / rowspace(rows): (free_rank, torsion divisors > 1)."""
    diag, _ = smith_normal_form(rows, ncols)
    torsion = tuple(d for d in diag if d > 1)
    return ncols - len(diag), torsion


def mat_mul_mod(x, y, p):
    rows = len(x)
    inner = len(y)
    cols = len(y[0]) if inner else 0
    out = []
    for i in range(rows):
        xi = x[i]
        row = []
        for j in range(cols):
            s = 0
            for t in range(inner):
                s += xi[t] * y[t][j]
            row.append(s % p)
        out.append(row)
    return out


def mat_vec_mod(m, vec, p):
    return tuple(sum(mi * vi for mi, vi in zip(row, vec)) % p for row in m)


def vec_mat_mod(vec, m, p):
    n = len(m[0])
    return tuple(sum(vec[i] * m[i][j] for i in range(len(vec))) % p for j in range(n))


def identity_matrix(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def rref_mod(rows, p):
    """Row-reduced echelon form over F_p. Returns (reduced rows, pivot column list)."""
    a = [[e % p for e in row] for row in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if a[i][c] % p:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [(e * inv) % p for e in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(e - f * g) % p for e, g in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return [tuple(row) for row in a[:r]], pivots

def nullspace_mod(rows, ncols, p):
    """Basis of {v : rows * v = 0} over F_p, one vector (length ncols) per free column."""
    if not rows:
        return [tuple(1 if i == j else 0 for i in range(ncols)) for j in range(ncols)]
    red, pivots = rref_mod(rows, p)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [0] * ncols
        vec[free] = 1
        for r, c in enumerate(pivots):
            vec[c] = (-red[r][free]) % p
        basis.append(tuple(vec))
    return basis


def invert_mod(matrix, p):
    """Inverse of a square matrix over F_p, or None if singular."""
    n = len(matrix)
    aug = [list(matrix[i]) + identity_matrix(n)[i] for i in range(n)]
    red, pivots = rref_mod(aug, p)
    if pivots != list(range(n)):
        return None
    return [list(row[n:]) for row in red]


def det_mod(matrix, p):
    a = [[e % p for e in row] for row in matrix]
    n = len(a)
    det = 1
    for c in range(n):
        piv = None
        for i in range(c, n):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = (det * a[c][c]) % p
        inv = pow(a[c][c], -1, p)
        for i in range(c + 1, n):
            if a[i][c]:
                f = (a[i][c] * inv) % p
                a[i] = [(e - f * g) % p for e, g in zip(a[i], a[c])]
    return det % p


def lcm(a, b):
    return a // gcd(a, b) * b


# smallest composite not caught by these witnesses is > 3.3 * 10^24
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_LIMIT = 3317044064679887385961981


def is_prime(n):
    """Deterministic Miller-Rabin, exact for every n below 3.3 * 10^24."""
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % small == 0:
            return n == small
    if n >= _MR_LIMIT:
        raise ValueError(f"{n} exceeds the deterministic witness range")
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True
