"""Exact first moments of decorated-tree observables under the growth law.

The expectation of F_tau on the size-(n+1) tree conditions on the size-n tree
as (1 + w/((1+alpha)n - 2)) F_tau + (1/((1+alpha)n - 2)) sum c(sigma,tau)
F_sigma over strictly smaller decorated trees sigma, where w is the weight of
tau.  Iterating from the seed value F_tau(S) down the child DAG yields exact
rational expectations for any n.

Three decorated trees have weight 1 and closed forms instead: the single
vertex with decoration 0 (value n), with decoration 1 (value n-2), and the
bare edge (value 2n-2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import PreconditionError
from .growth import AlphaLike, as_alpha
from .observables import count_F
from .trees import DecoratedTree, Tree, canonical_code

__all__ = [
    "weight",
    "precedes",
    "Reduction",
    "reduction_children",
    "RecurrenceSystem",
    "omega_normalizer",
    "exact_expectation",
    "expectation_curve",
    "ExponentReport",
    "gamma_exponent",
]


def weight(tau: DecoratedTree) -> int:
    """|ell| plus the number of loose leaves; 1 for the three base trees."""
    if tau.tree.n <= 2 and tau.total == 0:
        return 1
    return tau.total + len(tau.loose_leaves)


def is_base(tau: DecoratedTree) -> bool:
    return weight(tau) == 1


def _base_value(tau: DecoratedTree, n: int) -> int:
    if tau.tree.n == 1:
        return n if tau.ell == (0,) else n - 2
    return 2 * n - 2


def precedes(sigma: DecoratedTree, tau: DecoratedTree) -> bool:
    """Strict order: lower weight with no larger size; or equal weight and
    smaller size; or equal weight and size and smaller total decoration."""
    ws, wt = weight(sigma), weight(tau)
    ns, nt = sigma.tree.n, tau.tree.n
    if ws < wt and ns <= nt:
        return True
    if ws == wt and ns < nt:
        return True
    return ws == wt and ns == nt and sigma.total < tau.total


@dataclass(frozen=True)
class Reduction:
    child: DecoratedTree
    coefficient: Fraction


def reduction_children(tau: DecoratedTree, alpha: AlphaLike) -> list[Reduction]:
    """Children and coefficients of the one-step recurrence, merged over
    isomorphic children.

    Moves: decrement one positive decoration (coefficient l(l+alpha-1));
    remove a loose leaf v with neighbour u (coefficient
    deg(u)+l(u)+alpha-2); remove the loose leaf and also decrement l(u)
    (coefficient l(u)(l(u)+alpha-1), only when l(u) >= 1).
    """
    a = as_alpha(alpha).fraction
    if is_base(tau):
        raise PreconditionError("base trees have closed forms, not reductions")
    acc: dict[bytes, list] = {}

    def add(child: DecoratedTree, coeff: Fraction) -> None:
        if coeff == 0:
            return
        assert coeff > 0, "reduction coefficients are positive"
        assert precedes(child, tau), "children must precede the parent"
        code = canonical_code(child)
        if code in acc:
            acc[code][1] += coeff
        else:
            acc[code] = [child, coeff]

    for u, lu in enumerate(tau.ell):
        if lu >= 1:
            add(tau.ell_changed(u, lu - 1), lu * (lu + a - 1))
    for v in tau.loose_leaves:
        u = tau.tree.neighbors(v)[0]
        lu = tau.ell[u]
        dropped = tau.vertex_removed(v)
        u2 = u if u < v else u - 1
        add(dropped, tau.tree.degree(u) + lu + a - 2)
        if lu >= 1:
            add(dropped.ell_changed(u2, lu - 1), lu * (lu + a - 1))
    return [Reduction(child, coeff) for child, coeff in acc.values()]


def omega_normalizer(w, k: int, n: int, alpha: AlphaLike) -> Fraction:
    """prod_{m=k}^{n-1} (1 + w/((1+alpha)m - 2))^{-1}; equals 1 at n = k."""
    if n < k:
        raise PreconditionError("n must be at least k")
    a = as_alpha(alpha).fraction
    w = Fraction(w)
    num = 1
    den = 1
    for m in range(k, n):
        base = (1 + a) * m - 2
        term = base / (base + w)
        num *= term.numerator
        den *= term.denominator
    return Fraction(num, den)


class _Node:
    __slots__ = ("tree", "w", "children", "base")

    def __init__(self, tree: DecoratedTree, w: int, base: bool):
        self.tree = tree
        self.w = w
        self.base = base
        self.children: list[tuple[bytes, Fraction]] = []


class RecurrenceSystem:
    """Closed reduction DAG over canonical decorated trees for one alpha."""

    def __init__(self, alpha: AlphaLike):
        self.alpha = as_alpha(alpha)
        self.nodes: dict[bytes, _Node] = {}
        self.memo: dict[tuple[bytes, bytes, int], Fraction] = {}

    def add(self, tau: DecoratedTree) -> bytes:
        code = canonical_code(tau)
        if code in self.nodes:
            return code
        node = _Node(tau, weight(tau), is_base(tau))
        self.nodes[code] = node
        if not node.base:
            for red in reduction_children(tau, self.alpha):
                node.children.append((self.add(red.child), red.coefficient))
        return code

    def reductions(self, tau: DecoratedTree) -> list[Reduction]:
        code = self.add(tau)
        node = self.nodes[code]
        return [Reduction(self.nodes[c].tree, coeff) for c, coeff in node.children]

    # -- evaluation ----------------------------------------------------------

    def expectations(
        self, tau: DecoratedTree, seed: Tree, ns: Sequence[int]
    ) -> list[Fraction]:
        """E[F_tau(T_n^S)] for every n in ns, exact.

        One forward sweep over n evaluates the whole child closure.  Values
        are carried as integers V_n = E_n * prod_{m=k..n-1} D_m with
        D_m = (p+q)m - 2q, which keeps the sweep gcd-free; alpha = p/q.
        """
        k = seed.n
        if k < 2:
            raise PreconditionError("seed must have at least 2 vertices")
        if any(n < k for n in ns):
            raise PreconditionError("n must be at least the seed size")
        code = self.add(tau)
        seed_code = canonical_code(seed)
        want = sorted(set(ns))
        missing = [n for n in want if (code, seed_code, n) not in self.memo]
        if missing:
            self._sweep(code, seed, seed_code, max(missing))
        return [self.memo[(code, seed_code, n)] for n in ns]

    def _sweep(self, code: bytes, seed: Tree, seed_code: bytes, n_max: int) -> None:
        p, q = self.alpha.num, self.alpha.den
        k = seed.n
        # restrict to the closure of the target
        active: dict[bytes, _Node] = {}
        stack = [code]
        while stack:
            c = stack.pop()
            if c in active:
                continue
            node = self.nodes[c]
            active[c] = node
            stack.extend(cc for cc, _ in node.children)
        nonbase = {c: node for c, node in active.items() if not node.base}
        qcoeff: dict[bytes, list[tuple[bytes, int, bool]]] = {}
        for c, node in nonbase.items():
            lst = []
            for cc, coeff in node.children:
                scaled = coeff * q
                assert scaled.denominator == 1, "q*c(sigma,tau) must be integral"
                lst.append((cc, int(scaled), active[cc].base))
            qcoeff[c] = lst

        V = {c: count_F(node.tree, seed) for c, node in nonbase.items()}
        P = 1  # prod of D_m so far

        def record(n: int) -> None:
            node = active[code]
            if node.base:
                self.memo[(code, seed_code, n)] = Fraction(_base_value(node.tree, n))
            else:
                self.memo[(code, seed_code, n)] = Fraction(V[code], P)

        record(k)
        for m in range(k, n_max):
            D = (p + q) * m - 2 * q
            newV = {}
            for c, node in nonbase.items():
                acc = (D + q * node.w) * V[c]
                for cc, qc, base in qcoeff[c]:
                    if base:
                        acc += qc * _base_value(active[cc].tree, m) * P
                    else:
                        acc += qc * V[cc]
                newV[c] = acc
            V = newV
            P *= D
            record(m + 1)


def exact_expectation(
    tau: DecoratedTree, seed: Tree, alpha: AlphaLike, n: int,
    system: Optional[RecurrenceSystem] = None,
) -> Fraction:
    """E[F_tau(T_n^S)] as an exact rational."""
    sys_ = system if system is not None else RecurrenceSystem(alpha)
    return sys_.expectations(tau, seed, [n])[0]


def expectation_curve(
    tau: DecoratedTree, seed: Tree, alpha: AlphaLike, ns: Sequence[int],
    system: Optional[RecurrenceSystem] = None,
) -> list[Fraction]:
    sys_ = system if system is not None else RecurrenceSystem(alpha)
    return sys_.expectations(tau, seed, ns)


@dataclass(frozen=True)
class ExponentReport:
    power: Fraction
    log_power: int
    critical: bool


def gamma_exponent(tau: DecoratedTree, alpha: AlphaLike) -> ExponentReport:
    """Polynomial power max{1, w/(1+alpha)} and the logarithmic exponent.

    The log exponent is 0 below the critical weight 1+alpha; at and above it,
    it recurses over reduction children of equal weight (empty sup = 0), with
    a floor of 1 in the critical case.
    """
    a = as_alpha(alpha)
    af = a.fraction
    system = RecurrenceSystem(a)
    code = system.add(tau)
    memo: dict[bytes, int] = {}

    def g(c: bytes) -> int:
        if c in memo:
            return memo[c]
        node = system.nodes[c]
        w = node.w
        if w < 1 + af:
            memo[c] = 0
            return 0
        best = 0
        for cc, _coeff in node.children:
            if system.nodes[cc].w == w:
                best = max(best, g(cc) + 1)
        if w == 1 + af:
            best = max(1, best)
        memo[c] = best
        return best

    w = weight(tau)
    power = max(Fraction(1), Fraction(w) / (1 + af))
    return ExponentReport(power=power, log_power=g(code), critical=(w == 1 + af))
