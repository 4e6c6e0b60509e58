"""MSO formula ASTs, quantifier rank, and brute-force model checking.

First-order variables have lowercase-initial names, set variables
uppercase-initial.  Set quantifiers range over all 2^n vertex subsets, so
evaluation is exponential in n for genuinely second-order sentences; cost
is fine for the desk scale this package targets (n <= ~14 with
second-order depth <= 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

from msolimits.errors import InputError
from msolimits.graphs import Structure

QRank = int


@dataclass(frozen=True)
class Membership:
    x: str
    X: str


@dataclass(frozen=True)
class Edge:
    x: str
    y: str


@dataclass(frozen=True)
class Equal:
    x: str
    y: str


@dataclass(frozen=True)
class TrueConst:
    pass


@dataclass(frozen=True)
class FalseConst:
    pass


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ExistsFO:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ForallFO:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ExistsSO:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ForallSO:
    var: str
    body: "Formula"


Formula = Union[
    Membership,
    Edge,
    Equal,
    TrueConst,
    FalseConst,
    Not,
    And,
    Or,
    ExistsFO,
    ForallFO,
    ExistsSO,
    ForallSO,
]

_QUANTIFIERS = (ExistsFO, ForallFO, ExistsSO, ForallSO)


def implies(a: Formula, b: Formula) -> Formula:
    """Sugar: a -> b."""
    return Or(Not(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    """Sugar: a <-> b."""
    return And(implies(a, b), implies(b, a))


@lru_cache(maxsize=None)
def quantifier_rank(f: Formula) -> QRank:
    """Maximum depth of quantifier nesting, counting both orders."""
    if isinstance(f, (Membership, Edge, Equal, TrueConst, FalseConst)):
        return 0
    if isinstance(f, Not):
        return quantifier_rank(f.body)
    if isinstance(f, (And, Or)):
        return max(quantifier_rank(f.left), quantifier_rank(f.right))
    if isinstance(f, _QUANTIFIERS):
        return 1 + quantifier_rank(f.body)
    raise TypeError(f"not a formula node: {f!r}")


@lru_cache(maxsize=None)
def free_variables(f: Formula) -> tuple[frozenset[str], frozenset[str]]:
    """(free first-order names, free set names)."""
    if isinstance(f, Membership):
        return frozenset({f.x}), frozenset({f.X})
    if isinstance(f, (Edge, Equal)):
        return frozenset({f.x, f.y}), frozenset()
    if isinstance(f, (TrueConst, FalseConst)):
        return frozenset(), frozenset()
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, (And, Or)):
        lf, ls = free_variables(f.left)
        rf, rs = free_variables(f.right)
        return lf | rf, ls | rs
    if isinstance(f, (ExistsFO, ForallFO)):
        fo, so = free_variables(f.body)
        return fo - {f.var}, so
    if isinstance(f, (ExistsSO, ForallSO)):
        fo, so = free_variables(f.body)
        return fo, so - {f.var}
    raise TypeError(f"not a formula node: {f!r}")


def is_first_order(f: Formula) -> bool:
    if isinstance(f, (ExistsSO, ForallSO)):
        return False
    if isinstance(f, Not):
        return is_first_order(f.body)
    if isinstance(f, (And, Or)):
        return is_first_order(f.left) and is_first_order(f.right)
    if isinstance(f, (ExistsFO, ForallFO)):
        return is_first_order(f.body)
    return True


def _compile(f: Formula) -> Callable:
    """Compile to nested closures over (ctx, env); ctx = (n, edge set,
    subsets cache), env maps names to vertices or frozensets."""
    if isinstance(f, Membership):
        x, X = f.x, f.X
        return lambda ctx, env: env[x] in env[X]
    if isinstance(f, Edge):
        x, y = f.x, f.y
        return lambda ctx, env: (env[x], env[y]) in ctx[1] or (env[y], env[x]) in ctx[1]
    if isinstance(f, Equal):
        x, y = f.x, f.y
        return lambda ctx, env: env[x] == env[y]
    if isinstance(f, TrueConst):
        return lambda ctx, env: True
    if isinstance(f, FalseConst):
        return lambda ctx, env: False
    if isinstance(f, Not):
        body = _compile(f.body)
        return lambda ctx, env: not body(ctx, env)
    if isinstance(f, And):
        left, right = _compile(f.left), _compile(f.right)
        return lambda ctx, env: left(ctx, env) and right(ctx, env)
    if isinstance(f, Or):
        left, right = _compile(f.left), _compile(f.right)
        return lambda ctx, env: left(ctx, env) or right(ctx, env)
    if isinstance(f, (ExistsFO, ForallFO)):
        var, body = f.var, _compile(f.body)
        exists = isinstance(f, ExistsFO)

        def run_fo(ctx, env, body=body, var=var, exists=exists):
            had, old = var in env, env.get(var)
            try:
                for v in range(1, ctx[0] + 1):
                    env[var] = v
                    if body(ctx, env) == exists:
                        return exists
                return not exists
            finally:
                if had:
                    env[var] = old
                elif var in env:
                    del env[var]

        return run_fo
    if isinstance(f, (ExistsSO, ForallSO)):
        var, body = f.var, _compile(f.body)
        exists = isinstance(f, ExistsSO)

        def run_so(ctx, env, body=body, var=var, exists=exists):
            had, old = var in env, env.get(var)
            try:
                for U in ctx[2]():
                    env[var] = U
                    if body(ctx, env) == exists:
                        return exists
                return not exists
            finally:
                if had:
                    env[var] = old
                elif var in env:
                    del env[var]

        return run_so
    raise TypeError(f"not a formula node: {f!r}")


@lru_cache(maxsize=512)
def _compiled(f: Formula) -> Callable:
    return _compile(f)


def _subsets_cache(n: int):
    # Lazy on purpose: quantifiers short-circuit, and a counterexample
    # subset usually shows up at a low mask, so materializing all 2^n
    # frozensets up front would dominate the runtime.
    def subsets():
        if n > 22:
            raise InputError(
                f"set quantification over 2^{n} subsets exceeds the evaluation budget"
            )
        verts = list(range(1, n + 1))
        for mask in range(1 << n):
            yield frozenset(v for i, v in enumerate(verts) if mask >> i & 1)

    return subsets


def evaluate(s: Structure, f: Formula) -> bool:
    """Model checking by structural recursion; every free variable of f
    must be assigned in s."""
    free_fo, free_so = free_variables(f)
    missing = (free_fo - set(s.fo)) | (free_so - set(s.so))
    if missing:
        raise InputError(f"unassigned free variables: {sorted(missing)}")
    n = s.graph.n
    ctx = (n, s.graph.edges, _subsets_cache(n))
    env: dict = {}
    env.update(s.fo)
    env.update(s.so)
    return _compiled(f)(ctx, env)


# Shipped sentences.  The connectivity sentence is written with explicit
# parentheses so that its quantifier rank is 3 (the premise conjuncts are
# siblings, not nested).
CONNECTIVITY_SENTENCE = (
    "ALL X. (((ex x. x in X) & "
    "(all x. all y. ((x in X & E(x,y)) -> y in X))) -> all z. z in X)"
)
ISOLATED_VERTEX_SENTENCE = "ex x. all y. !E(x,y)"
