"""A_n-algebras, A_n-modules (left and right), morphisms, and relation checkers.

Operations are stored as a dict arity -> MultiMap; a missing arity means that
operation is identically zero (known zero everywhere, not merely untested).
Conventions, with homological grading and |m_k| = k-2, |f_k| = k-1:

  algebra relation, order m:
      sum_{r+s+t=m} (-1)^{r+st} m_{r+t+1} (1^r tensor m_s tensor 1^t) = 0
  right module (X tensor R^{k-1}): m_s means m_s^X exactly when r = 0
  left module (R^{k-1} tensor X): m_s means m_s^X exactly when t = 0
  module morphism f: X -> Y, order m:
      sum_{r+s+t=m} (-1)^{r+st} f_{r+t+1} (1^r tensor m_s tensor 1^t)
        = sum_{i+j=m} (-1)^{(i+1)j} m_{j+1}^Y (f_i tensor 1^j)
  algebra morphism, order m: same left side with m_s^A throughout, and
      sum over i_1+...+i_u=m of (-1)^v m_u^B (f_{i_1} tensor ... tensor f_{i_u})
      with v = sum_{w=1}^{u-1} (u-w)(i_w - 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from anbar.fastops import evaluate_terms, terms_zero_report, _terms_rows
from anbar.multimap import MultiMap, compose_tensor, mm_sum, mm_identity, zero_report
from anbar.linalg import LinearSolver


class AnAlgebra:
    """Operations m_1..m_order on a graded space; minimal means m_1 = 0."""

    def __init__(self, field, space, ops: dict, order: int, label=""):
        self.field = field
        self.space = space
        self.ops = {k: v for k, v in ops.items()
                    if v is not None and not (v.is_zero_map() and not v.cert)}
        self.order = order
        self.label = label
        for k, mm in self.ops.items():
            if mm.arity != k or mm.degree != k - 2:
                raise ValueError(f"m_{k} must have arity {k} and degree {k-2}")

    def op(self, k):
        return self.ops.get(k)

    @property
    def is_minimal(self) -> bool:
        return 1 not in self.ops

    def __repr__(self):
        return f"AnAlgebra({self.label or 'A'}: order={self.order} ops={sorted(self.ops)})"


class AnModule:
    """A_l-module over an AnAlgebra; side 'right' is X tensor R^{k-1}, 'left' is R^{k-1} tensor X."""

    def __init__(self, algebra: AnAlgebra, space, ops: dict, order: int, side="right", label=""):
        if side not in ("right", "left"):
            raise ValueError("side must be 'right' or 'left'")
        self.algebra = algebra
        self.field = algebra.field
        self.space = space
        self.side = side
        self.ops = {k: v for k, v in ops.items()
                    if v is not None and not (v.is_zero_map() and not v.cert)}
        self.order = order
        self.label = label
        R = algebra.space
        for k, mm in self.ops.items():
            want = (space,) + (R,) * (k - 1) if side == "right" else (R,) * (k - 1) + (space,)
            if mm.spaces != want or mm.degree != k - 2:
                raise ValueError(f"m_{k}^X has wrong shape or degree")

    def op(self, k):
        return self.ops.get(k)

    @property
    def is_minimal(self) -> bool:
        return 1 not in self.ops

    def input_spaces(self, m):
        R = self.algebra.space
        if self.side == "right":
            return (self.space,) + (R,) * (m - 1)
        return (R,) * (m - 1) + (self.space,)

    def __repr__(self):
        return f"AnModule({self.label or 'X'}: {self.side} order={self.order} ops={sorted(self.ops)})"


class AnMorphism:
    """Morphism of A_n-modules (kind 'module') or A_n-algebras (kind 'algebra')."""

    def __init__(self, source, target, comps: dict, order: int, kind="module", label=""):
        self.source = source
        self.target = target
        self.field = source.field
        self.kind = kind
        self.comps = {k: v for k, v in comps.items()
                      if v is not None and not (v.is_zero_map() and not v.cert)}
        self.order = order
        self.label = label
        for k, mm in self.comps.items():
            if mm.degree != k - 1 or mm.arity != k:
                raise ValueError(f"f_{k} must have arity {k} and degree {k-1}")

    def comp(self, k):
        return self.comps.get(k)

    def __repr__(self):
        return f"AnMorphism({self.label or 'f'}: {self.kind} order={self.order} comps={sorted(self.comps)})"


def identity_morphism(X, label="id"):
    f1 = mm_identity(X.field, X.space)
    return AnMorphism(X, X, {1: f1}, X.order,
                      kind="module" if isinstance(X, AnModule) else "algebra", label=label)


# -- relation residuals --------------------------------------------------------

@dataclass
class OrderCheck:
    order: int
    verdict: str               # pass | fail | unknown
    witness: tuple | None = None        # basis names of first failing tuple
    residual: dict | None = None        # target basis name -> scalar
    uncertified_nonzero: int = 0


@dataclass
class RelationReport:
    kind: str                  # algebra | module | morphism
    label: str
    orders: list = dc_field(default_factory=list)

    @property
    def verdict(self) -> str:
        vs = [o.verdict for o in self.orders]
        if "fail" in vs:
            return "fail"
        if "unknown" in vs:
            return "unknown"
        return "pass"

    def first_failure(self):
        for o in self.orders:
            if o.verdict == "fail":
                return o
        return None

    def __str__(self):
        parts = [f"{self.kind} {self.label or ''}: {self.verdict}"]
        for o in self.orders:
            line = f"  order {o.order}: {o.verdict}"
            if o.witness:
                line += f" witness={o.witness} residual={o.residual}"
            parts.append(line)
        return "\n".join(parts)


def _order_check(field, terms, sig, order) -> OrderCheck:
    verdict, key, residual, n_unc = terms_zero_report(field, terms, sig)
    if verdict == "fail":
        spaces, target, _ = sig
        names = tuple(sp.names[i] for sp, i in zip(spaces, key))
        val = {target.names[j]: c for j, c in residual.items()}
        return OrderCheck(order, "fail", names, val, n_unc)
    return OrderCheck(order, verdict, uncertified_nonzero=n_unc)


def _algebra_terms(alg: AnAlgebra, m: int):
    R = alg.space
    sig = ((R,) * m, R, m - 3)
    one, neg = alg.field.one(), alg.field.neg(alg.field.one())
    terms = []
    for s in range(1, m + 1):
        ms = alg.op(s)
        if ms is None:
            continue
        for r in range(0, m - s + 1):
            t = m - s - r
            outer = alg.op(r + t + 1)
            if outer is None:
                continue
            inners = [R] * r + [ms] + [R] * t
            sign = one if (r + s * t) % 2 == 0 else neg
            terms.append((sign, outer, inners))
    return terms, sig


def algebra_relation(alg: AnAlgebra, m: int) -> MultiMap:
    """The order-m Stasheff residual as a multimap R^{tensor m} -> R[m-3]."""
    terms, sig = _algebra_terms(alg, m)
    return evaluate_terms(alg.field, terms, sig, label=f"stasheff[{m}]")


def check_algebra(alg: AnAlgebra, upto: int) -> RelationReport:
    if upto > alg.order:
        raise ValueError(f"algebra only defined to order {alg.order}")
    rep = RelationReport("algebra", alg.label)
    for m in range(1, upto + 1):
        terms, sig = _algebra_terms(alg, m)
        rep.orders.append(_order_check(alg.field, terms, sig, m))
    return rep


def _module_terms(X: AnModule, m: int):
    alg = X.algebra
    R = alg.space
    sig = (X.input_spaces(m), X.space, m - 3)
    one, neg = X.field.one(), X.field.neg(X.field.one())
    terms = []
    for s in range(1, m + 1):
        for r in range(0, m - s + 1):
            t = m - s - r
            outer = X.op(r + t + 1)
            if outer is None:
                continue
            if X.side == "right":
                inner = X.op(s) if r == 0 else alg.op(s)
                if inner is None:
                    continue
                if r == 0:
                    inners = [inner] + [R] * t
                else:
                    inners = [X.space] + [R] * (r - 1) + [inner] + [R] * t
            else:
                inner = X.op(s) if t == 0 else alg.op(s)
                if inner is None:
                    continue
                if t == 0:
                    inners = [R] * r + [inner]
                else:
                    inners = [R] * r + [inner] + [R] * (t - 1) + [X.space]
            sign = one if (r + s * t) % 2 == 0 else neg
            terms.append((sign, outer, inners))
    return terms, sig


def module_relation(X: AnModule, m: int) -> MultiMap:
    """The order-m module relation residual on X's inputs."""
    terms, sig = _module_terms(X, m)
    return evaluate_terms(X.field, terms, sig, label=f"modrel[{m}]")


def _minimal_module_terms(X: AnModule, k: int):
    if X.side != "right" or not X.is_minimal or not X.algebra.is_minimal:
        raise ValueError("simplified relation needs a minimal right module over a minimal algebra")
    alg = X.algebra
    R = alg.space
    m = k + 1
    sig = (X.input_spaces(m), X.space, m - 3)
    one, neg = X.field.one(), X.field.neg(X.field.one())
    terms = []
    for s in range(1, m + 1):
        for r in range(0, m - s + 1):
            t = m - s - r
            if not 2 <= r + t + 1 <= k:
                continue
            outer = X.op(r + t + 1)
            if outer is None:
                continue
            inner = X.op(s) if r == 0 else alg.op(s)
            if inner is None:
                continue
            if r == 0:
                inners = [inner] + [R] * t
            else:
                inners = [X.space] + [R] * (r - 1) + [inner] + [R] * t
            sign = one if (r + s * t + 1) % 2 == 0 else neg
            terms.append((sign, outer, inners))
    return terms, sig


def minimal_module_relation(X: AnModule, k: int) -> MultiMap:
    """Simplified order-(k+1) relation for minimal right modules over a minimal algebra:

        sum_{2 <= r+t+1 <= k, r+s+t=k+1} (-1)^{r+st+1} m_{r+t+1}(1^r tensor m_s tensor 1^t) = 0.
    """
    terms, sig = _minimal_module_terms(X, k)
    return evaluate_terms(X.field, terms, sig, label=f"modrel28[{k}]")


def check_module(X: AnModule, upto: int) -> RelationReport:
    if upto > X.order:
        raise ValueError(f"module only defined to order {X.order}")
    rep = RelationReport("module", X.label)
    cross = (X.side == "right" and X.is_minimal and X.algebra.is_minimal)
    for m in range(1, upto + 1):
        terms, sig = _module_terms(X, m)
        if cross and 3 <= m:
            # the simplified minimal-case relation must be the negative of the
            # full one; a mismatch is a bug in one of the two evaluators
            alt_terms, _ = _minimal_module_terms(X, m - 1)
            if X.field.p is not None:
                diff = _terms_rows(X.field, terms + alt_terms, sig)
                mismatch = len(diff.keys) != 0
            else:
                res = evaluate_terms(X.field, terms, sig)
                alt = evaluate_terms(X.field, alt_terms, sig)
                diff = mm_sum(X.field, [(X.field.one(), res), (X.field.one(), alt)],
                              signature=sig)
                mismatch = bool(diff.table)
            if mismatch:
                raise AssertionError(f"minimal-case relation disagrees at order {m}")
        rep.orders.append(_order_check(X.field, terms, sig, m))
    return rep


def _compositions(m):
    """All ordered tuples (i_1,...,i_u) of positive integers summing to m."""
    if m == 0:
        yield ()
        return
    for first in range(1, m + 1):
        for rest in _compositions(m - first):
            yield (first,) + rest


def _morphism_terms(g: AnMorphism, m: int):
    field = g.field
    one, neg = field.one(), field.neg(field.one())
    if g.kind == "module":
        X, Y = g.source, g.target
        alg = X.algebra
        R = alg.space
        sig = (X.input_spaces(m), Y.space, m - 2)
        terms = []
        for s in range(1, m + 1):
            for r in range(0, m - s + 1):
                t = m - s - r
                outer = g.comp(r + t + 1)
                if outer is None:
                    continue
                inner = X.op(s) if r == 0 else alg.op(s)
                if inner is None:
                    continue
                if r == 0:
                    inners = [inner] + [R] * t
                else:
                    inners = [X.space] + [R] * (r - 1) + [inner] + [R] * t
                sign = one if (r + s * t) % 2 == 0 else neg
                terms.append((sign, outer, inners))
        for i in range(1, m + 1):
            j = m - i
            fi = g.comp(i)
            outer = Y.op(j + 1)
            if fi is None or outer is None:
                continue
            inners = [fi] + [R] * j
            sign = neg if ((i + 1) * j) % 2 == 0 else one  # minus the right side
            terms.append((sign, outer, inners))
        return terms, sig

    A, B = g.source, g.target
    RA, RB = A.space, B.space
    sig = ((RA,) * m, RB, m - 2)
    terms = []
    for s in range(1, m + 1):
        ms = A.op(s)
        if ms is None:
            continue
        for r in range(0, m - s + 1):
            t = m - s - r
            outer = g.comp(r + t + 1)
            if outer is None:
                continue
            inners = [RA] * r + [ms] + [RA] * t
            sign = one if (r + s * t) % 2 == 0 else neg
            terms.append((sign, outer, inners))
    for parts in _compositions(m):
        u = len(parts)
        outer = B.op(u)
        if outer is None:
            continue
        fs = [g.comp(i) for i in parts]
        if any(f is None for f in fs):
            continue
        v = sum((u - w) * (parts[w - 1] - 1) for w in range(1, u))
        sign = neg if v % 2 == 0 else one  # minus the right side
        terms.append((sign, outer, fs))
    return terms, sig


def morphism_relation(g: AnMorphism, m: int) -> MultiMap:
    terms, sig = _morphism_terms(g, m)
    return evaluate_terms(g.field, terms, sig, label=f"morrel[{m}]")


def check_morphism(g: AnMorphism, upto: int) -> RelationReport:
    if upto > g.order:
        raise ValueError(f"morphism only defined to order {g.order}")
    rep = RelationReport("morphism", g.label)
    for m in range(1, upto + 1):
        terms, sig = _morphism_terms(g, m)
        rep.orders.append(_order_check(g.field, terms, sig, m))
    return rep


# -- composition and inversion of module morphisms ------------------------------

def compose_morphisms(g: AnMorphism, h: AnMorphism, label="") -> AnMorphism:
    """g after h.  The component law

        (g h)_j = sum_k (-1)^{floor(k/2)+floor((j-k+1)/2)-floor(j/2)}
                    g_k (h_{j-k+1} tensor 1^{k-1})

    is the unique law compatible with the bar-construction matrices: it makes
    B(gh) = B(g) B(h) hold exactly (checked in the bar module's tests).
    """
    if g.kind != "module" or h.kind != "module":
        raise ValueError("composition implemented for module morphisms")
    if h.target is not g.source and h.target != g.source:
        raise ValueError("morphism targets do not match")
    field = g.field
    R = h.source.algebra.space
    order = min(g.order, h.order)
    comps = {}
    for j in range(1, order + 1):
        sig = (h.source.input_spaces(j), g.target.space, j - 1)
        terms = []
        for k in range(1, j + 1):
            gk = g.comp(k)
            hk = h.comp(j - k + 1)
            if gk is None or hk is None:
                continue
            e = (k // 2) + ((j - k + 1) // 2) - (j // 2)
            sign = field.one() if e % 2 == 0 else field.neg(field.one())
            terms.append((sign, compose_tensor(gk, [hk] + [R] * (k - 1))))
        comps[j] = mm_sum(field, terms, signature=sig)
    return AnMorphism(h.source, g.target, comps, order, kind="module",
                      label=label or f"{g.label}o{h.label}")


def invert_graded_map(mm: MultiMap) -> MultiMap:
    """Invert an arity-1 degree-0 map per degree; error if any block is singular."""
    if mm.arity != 1 or mm.degree != 0:
        raise ValueError("can only invert arity-1 degree-0 maps")
    src, tgt = mm.spaces[0], mm.target
    field = mm.field
    table = {}
    for d, rows in src.by_degree.items():
        cols = tgt.basis_in_degree(d)
        if len(cols) != len(rows):
            raise ValueError(f"not invertible: dim mismatch in degree {d}")
        if not rows:
            continue
        pos = {j: a for a, j in enumerate(cols)}
        mat = []
        for i in rows:
            v = mm.table.get((i,), {})
            mat.append([v.get(j, field.zero()) for j in cols])
        # columns of the inverse solve M x = e_a
        solver = LinearSolver(field, [[mat[b][a] for b in range(len(rows))] for a in range(len(cols))], len(rows))
        if solver.rank != len(rows):
            raise ValueError(f"not invertible in degree {d}")
        for a, j in enumerate(cols):
            e = [field.one() if b == a else field.zero() for b in range(len(cols))]
            x = solver.solve(e)
            table[(j,)] = {rows[b]: x[b] for b in range(len(rows)) if x[b]}
    out = MultiMap(field, (tgt,), src, 0, table, mm.cert, label=f"{mm.label}^-1")
    return out


def invert_morphism(g: AnMorphism, upto=None) -> AnMorphism:
    """Construct h with (g h)_1 = id and (g h)_j = 0 up to the given order.

    Exists whenever g_1 is invertible; built by the triangular recursion
    h_j = -g_1^{-1} (gh-without-h_j terms)_j.
    """
    if g.kind != "module":
        raise ValueError("inversion implemented for module morphisms")
    order = upto or g.order
    field = g.field
    Y, X = g.target, g.source
    R = X.algebra.space
    g1inv = invert_graded_map(g.comp(1))
    comps = {1: g1inv}
    for j in range(2, order + 1):
        sig = (Y.input_spaces(j), X.space, j - 1)
        terms = []
        for k in range(2, j + 1):
            gk = g.comp(k)
            hk = comps.get(j - k + 1)
            if gk is None or hk is None:
                continue
            e = (k // 2) + ((j - k + 1) // 2) - (j // 2)
            sign = field.one() if e % 2 == 0 else field.neg(field.one())
            terms.append((sign, compose_tensor(gk, [hk] + [R] * (k - 1))))
        partial = mm_sum(field, terms, signature=(Y.input_spaces(j), Y.space, j - 1))
        hj = compose_tensor(g1inv, [partial]).scaled(field.neg(field.one()))
        if hj.table:
            comps[j] = hj
    h = AnMorphism(Y, X, comps, order, kind="module", label=f"{g.label}^-1")
    return h
