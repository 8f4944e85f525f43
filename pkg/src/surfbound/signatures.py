"""Exact arithmetic on cocompact Fuchsian signatures.

A signature (g; m_1, ..., m_k) records the orbit genus g and the elliptic
periods m_j >= 2 of a cocompact Fuchsian group, presented as

    < a_1, b_1, ..., a_g, b_g, c_1, ..., c_k |
      c_j^{m_j} = 1,  [a_1,b_1]...[a_g,b_g] c_1 ... c_k = 1 >.

All invariants here are exact: the normalized measure lives in units of pi
as a Fraction, genus bookkeeping is integer arithmetic, abelianizations come
from an integer Smith normal form.  No floating point is used anywhere.

The module also ships a plain-text table of the arithmetic signatures with
measure below pi; the loader re-verifies every row on load and refuses to
serve a table that does not reproduce its own stated invariants.
"""

from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from itertools import combinations_with_replacement
from math import gcd
import re

from .linalg import cokernel_invariants

FLAG_VERIFIED = "verified-by-literature"
FLAG_UNVERIFIED = "included-unverified"


class NotAdmissible(ValueError):
    """The signature has measure <= 0 and bounds no cocompact group."""


class NonIntegralGenus(ValueError):
    """An index that cannot correspond to a torsion-free kernel of this signature."""


class TableCorrupt(ValueError):
    """The signature data file failed parsing or self-verification."""


@dataclass(frozen=True, order=True)
class Signature:
    genus: int
    periods: tuple

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError(f"genus must be >= 0, got {self.genus}")
        for m in self.periods:
            if not isinstance(m, int) or m < 2:
                raise ValueError(f"periods must be integers >= 2, got {self.periods}")
        object.__setattr__(self, "periods", tuple(sorted(self.periods)))

    @property
    def generator_count(self):
        return 2 * self.genus + len(self.periods)

    def is_admissible(self):
        return measure(self) > 0

    def __str__(self):
        body = ",".join(str(m) for m in self.periods)
        if self.genus == 0:
            return f"({body})"
        return f"({self.genus};{body})" if body else f"({self.genus};)"


def measure(sig):
    """Normalized co-area of the signature, in units of pi (exact Fraction).

    measure/pi = 2*(2g - 2 + sum_j (1 - 1/m_j)); positive iff the signature
    is realized by a cocompact Fuchsian group.
    """
    total = Fraction(2 * sig.genus - 2)
    for m in sig.periods:
        total += 1 - Fraction(1, m)
    return 2 * total


@dataclass(frozen=True)
class MeasureClass:
    """The commensurability-invariant ratio q = measure/(4*pi) in lowest terms.

    For a surface kernel of index n the kernel genus is 1 + n*q, so the
    automorphism bound carried by the signature is (genus' - 1)/q = s/r
    where q = r/s reduced.
    """
    mu_over_pi: Fraction
    q: Fraction

    @property
    def r(self):
        return self.q.numerator

    @property
    def s(self):
        return self.q.denominator

    @property
    def s_over_r(self):
        return 1 / self.q


def measure_class(sig):
    mu = measure(sig)
    if mu <= 0:
        raise NotAdmissible(f"signature {sig} has measure {mu}*pi <= 0")
    return MeasureClass(mu_over_pi=mu, q=mu / 4)


def kernel_genus(sig, index):
    """Genus of a torsion-free kernel of the given index: 1 + index*q.

    Raises NonIntegralGenus when the index is incompatible with the
    signature (the would-be genus is not an integer).
    """
    if index < 1:
        raise ValueError(f"index must be >= 1, got {index}")
    g = 1 + index * measure_class(sig).q
    if g.denominator != 1:
        raise NonIntegralGenus(f"index {index} on {sig} gives genus {g}, not an integer")
    return int(g)


@dataclass(frozen=True)
class AbelianInvariants:
    """Abelianized signature group: free rank plus the torsion divisor chain."""
    free_rank: int
    torsion: tuple

    def hom_count_to_cyclic(self, n):
        """Number of homomorphisms (not necessarily onto) into a cyclic group of order n."""
        count = n ** self.free_rank
        for d in self.torsion:
            count *= gcd(d, n)
        return count

    def epi_count_to_cyclic(self, n):
        """Number of epimorphisms onto a cyclic group of order n (Moebius over divisors)."""
        total = 0
        for d in range(1, n + 1):
            if n % d:
                continue
            total += _moebius(n // d) * self.hom_count_to_cyclic(d)
        return total


def _moebius(n):
    if n == 1:
        return 1
    result = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    if n > 1:
        result = -result
    return result


def abelianization(sig):
    """Abelianization of the signature group via integer Smith normal form.

    Generators: 2g hyperbolic + k elliptic images; relations: m_j * c_j = 0
    and sum_j c_j = 0 (the commutators vanish).
    """
    g, k = sig.genus, len(sig.periods)
    ncols = 2 * g + k
    rows = []
    for j, m in enumerate(sig.periods):
        row = [0] * ncols
        row[2 * g + j] = m
        rows.append(row)
    long_row = [0] * (2 * g) + [1] * k
    rows.append(long_row)
    free_rank, torsion = cokernel_invariants(rows, ncols)
    return AbelianInvariants(free_rank=free_rank, torsion=torsion)


def enumerate_signatures(mu_bound, max_genus, max_periods, max_period):
    """All admissible signatures with 0 < measure < mu_bound (in units of pi).

    The bound is strict, exact, and the result is sorted in (genus, periods)
    normal-form order with no duplicates.
    """
    if mu_bound <= 0:
        return []
    found = []
    for g in range(max_genus + 1):
        for k in range(max_periods + 1):
            for periods in combinations_with_replacement(range(2, max_period + 1), k):
                sig = Signature(g, periods)
                mu = measure(sig)
                if 0 < mu < mu_bound:
                    found.append(sig)
    found.sort(key=lambda s: (s.genus, s.periods))
    return found


@dataclass(frozen=True)
class SignatureTableEntry:
    signature: Signature
    mu_over_pi: Fraction
    s_over_r: Fraction
    arithmeticity_flag: str


_ROW_RE = re.compile(
    r"^(?P<periods>\d+(?:\s+\d+)*)\s*\|\s*(?P<mu>\d+/\d+)\s*\|\s*"
    r"(?P<sr>\d+(?:/\d+)?)\s*\|\s*(?P<flag>verified-by-literature|included-unverified)$"
)


def _parse_table(text, origin):
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _ROW_RE.match(line)
        if m is None:
            raise TableCorrupt(f"{origin}:{lineno}: malformed row {raw!r}")
        periods = tuple(int(t) for t in m.group("periods").split())
        mu = Fraction(m.group("mu"))
        sr = Fraction(m.group("sr"))
        sig = Signature(0, periods)
        entry = SignatureTableEntry(sig, mu, sr, m.group("flag"))
        actual_mu = measure(sig)
        if actual_mu != mu:
            raise TableCorrupt(
                f"{origin}:{lineno}: row {sig} states measure {mu}*pi, recomputed {actual_mu}*pi"
            )
        actual_sr = measure_class(sig).s_over_r
        if actual_sr != sr:
            raise TableCorrupt(
                f"{origin}:{lineno}: row {sig} states s/r = {sr}, recomputed {actual_sr}"
            )
        entries.append(entry)
    if not entries:
        raise TableCorrupt(f"{origin}: no rows")
    return entries


def signature_table(path=None):
    """The embedded table of arithmetic signatures with measure below pi.

    Every row is re-verified on load (stated measure and s/r against exact
    recomputation); any mismatch raises TableCorrupt naming the row.
    """
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            return _parse_table(fh.read(), str(path))
    text = resources.files("surfbound.data").joinpath("signature_table.txt").read_text("utf-8")
    return _parse_table(text, "signature_table.txt")


def render_pi(frac):
    """Exact display of a rational multiple of pi: 1/21 -> 'pi/21', 14/15 -> '14pi/15'."""
    n, d = frac.numerator, frac.denominator
    num = "pi" if n == 1 else f"{n}pi"
    return num if d == 1 else f"{num}/{d}"


def render_ratio(frac):
    n, d = frac.numerator, frac.denominator
    return str(n) if d == 1 else f"{n}/{d}"


def parse_signature(text):
    """Parse CLI signature syntax: '2,3,7' is genus 0; 'g1p2' is (1; 2); 'g2' is (2;)."""
    text = text.strip()
    m = re.fullmatch(r"g(\d+)(?:p(.*))?", text)
    if m:
        genus = int(m.group(1))
        body = m.group(2) or ""
    else:
        genus = 0
        body = text
    if body:
        try:
            periods = tuple(int(t) for t in body.split(","))
        except ValueError:
            raise ValueError(f"cannot parse signature {text!r}")
    else:
        periods = ()
    if genus == 0 and not periods:
        raise ValueError(f"cannot parse signature {text!r}")
    return Signature(genus, periods)
