"""Bar construction B_n(X, H, A), its Postnikov tower, and the lift theory.

Given a DGA A, its minimal homology algebra H (from homotopy transfer) and a
minimal right A_n-module X over H, the bar construction assembles the free
A-modules R_k = X (x) H^{(x)k} (x) A into a complex whose differential is a
lower-triangular block matrix of the building blocks

    M_{k,l} = sum_i (-1)^{i(l-1)} 1^i (x) m_l (x) 1^{k-l-i+2} : R_k -> R_{k-l+1}[l-2]

(first slot m_l^X, middle slots the algebra m_l, last slot the induced module
structure on A; l = 1 is the differential of A).  Block maps are stored as
lists of primitive tensor terms so that compositions can be evaluated with
exact window certificates; nothing derived-categorical is ever materialized.

The stages Y_k = B_k(X,H,A)[k] form the canonical Postnikov tower; the
attaching map i_k is a signed column of M_{k,j}.  The obstruction to
extending the tower one stage is read off two independent ways (an explicit
nullhomotopy of i_n D, and the simplified module-relation cochain) and both
must agree; this couples every sign convention in the package and is the
strongest internal consistency check we have.
"""

from dataclasses import dataclass
import itertools

import numpy as np

from .graded import GradedSpace
from .multimap import (MultiMap, mm_sum, compose_tensor, zero_report,
                       mm_equal_report)
from .fastops import terms_zero_report, evaluate_terms
from .structures import AnModule, AnMorphism
from .obstruction import phi_tilde_n, star_one, try_extend
from .linalg import rref_modp


# -- flattened tensor summands ---------------------------------------------------

class TensorSpace:
    """X (x) H^{(x)k} (x) A flattened to a graded space with tuple-named basis.

    Only tuples whose total degree lies in the window are kept; maps into the
    flattening therefore carry the standard window certificate.
    """

    def __init__(self, spaces, window, label=""):
        self.spaces = tuple(spaces)
        lo, hi = window
        degs = [sp.degrees for sp in self.spaces]
        sufmin = [0] * (len(degs) + 1)
        sufmax = [0] * (len(degs) + 1)
        for q in range(len(degs) - 1, -1, -1):
            sufmin[q] = sufmin[q + 1] + min(degs[q])
            sufmax[q] = sufmax[q + 1] + max(degs[q])
        tuples = []
        tdegs = []

        def dfs(prefix, total, q):
            if q == len(degs):
                tuples.append(prefix)
                tdegs.append(total)
                return
            for i, d in enumerate(degs[q]):
                t = total + d
                if t + sufmin[q + 1] > hi or t + sufmax[q + 1] < lo:
                    continue
                dfs(prefix + (i,), t, q + 1)

        dfs((), 0, 0)
        self.tuples = tuples
        self.index = {t: i for i, t in enumerate(tuples)}
        self.space = GradedSpace(list(zip(tuples, tdegs)), window, label=label)

    @property
    def dim(self):
        return len(self.tuples)

    def __repr__(self):
        return f"TensorSpace({self.space.label} dim={self.dim})"


def floor_sign(i: int, j: int) -> tuple:
    """Both sides of floor((i+1)/2) + floor(j/2) = floor((j-i)/2) + ij (mod 2).

    This parity identity is what lets every sign in the block matrices below
    be written as a single floor exponent; the two returned values are +-1
    and must always agree.
    """
    left = (-1) ** (((i + 1) // 2 + j // 2) % 2)
    right = (-1) ** (((j - i) // 2 + i * j) % 2)
    return left, right


def trivial_contraction(field, space: GradedSpace):
    """HomologyData of a zero-differential complex: the space is its homology.

    Used to run the bar construction with strict coefficients A = H, where
    window truncation creates no spurious homology and the exactness
    statements hold on the nose.
    """
    from .dga import HomologyData
    from .multimap import mm_identity
    ident = mm_identity(field, space)
    h = MultiMap(field, (space,), space, 1, {}, None, label="h")
    return HomologyData(space, ident, ident.copy(), h, space.window)


def bar_summand(X: AnModule, Amod: AnModule, k: int) -> TensorSpace:
    """R_k = X (x) H^{(x)k} (x) A on the algebra's window."""
    H = X.algebra.space
    A = Amod.space
    return TensorSpace((X.space,) + (H,) * k + (A,), H.window, label=f"R_{k}")


# -- primitive block terms -------------------------------------------------------

@dataclass(frozen=True)
class Term:
    """coef * 1^{pos} (x) op (x) 1^{rest} between bar summands."""
    coef: object
    pos: int
    op: MultiMap


def _materialize(field, slots, term: Term, T: TensorSpace, label="") -> MultiMap:
    """Term as a MultiMap from separate slots into the flattened target.

    Koszul signs for moving the operation past the first `pos` inputs are
    folded into the table; the window certificate records both the operation's
    own certificate (shifted to its slice) and the flattening truncation.
    """
    op, pos, coef = term.op, term.pos, term.coef
    a = op.arity
    if tuple(op.spaces) != tuple(slots[pos:pos + a]):
        raise ValueError("term does not fit the slots")
    pre, suf = slots[:pos], slots[pos + a:]
    if tuple(pre) + (op.target,) + tuple(suf) != T.spaces:
        raise ValueError("term target does not match the flattening")
    lo, hi = T.space.window
    zero, neg = field.zero(), field.neg(field.one())
    odd = op.degree % 2 != 0
    table = {}
    for ptup in itertools.product(*(range(s.dim) for s in pre)):
        pdeg = sum(s.degree(i) for s, i in zip(pre, ptup))
        c0 = field.mul(coef, neg) if (odd and pdeg % 2) else coef
        for key, val in op.table.items():
            kd = pdeg + op.key_degree(key) + op.degree
            for stup in itertools.product(*(range(s.dim) for s in suf)):
                outdeg = kd + sum(s.degree(i) for s, i in zip(suf, stup))
                if not lo <= outdeg <= hi:
                    continue
                fullkey = ptup + key + stup
                dst = table.setdefault(fullkey, {})
                for o, c in val.items():
                    flat = T.index[ptup + (o,) + stup]
                    v = field.add(dst.get(flat, zero), field.mul(c0, c))
                    if v:
                        dst[flat] = v
                    else:
                        dst.pop(flat, None)
                if not dst:
                    del table[fullkey]
    cert = [(pos + s, pos + e, clo, chi) for (s, e, clo, chi) in op.cert]
    cert.append((0, len(slots), lo - op.degree, hi - op.degree))
    return MultiMap(field, tuple(slots), T.space, op.degree, table,
                    tuple(cert), label or op.label)


def build_M(X: AnModule, Amod: AnModule, k: int, l: int) -> list:
    """The primitive terms of M_{k,l}: R_k -> R_{k-l+1}[l-2]."""
    if not 1 <= l <= k + 1:
        raise ValueError(f"M_{{{k},{l}}} needs 1 <= l <= k+1")
    field = X.field
    one, neg = field.one(), field.neg(field.one())
    alg = X.algebra
    terms = []
    for i in range(0, k + 3 - l):
        if i == 0:
            op = X.op(l)
        elif i == k + 2 - l:
            op = Amod.op(l)
        else:
            op = alg.op(l)
        if op is None:
            continue
        coef = one if (i * (l - 1)) % 2 == 0 else neg
        terms.append(Term(coef, i, op))
    return terms


def assemble_M(X: AnModule, Amod: AnModule, k: int, l: int,
               T: TensorSpace = None, label="") -> MultiMap:
    """M_{k,l} as a single MultiMap into the flattened target summand."""
    field = X.field
    T = T or bar_summand(X, Amod, k - l + 1)
    slots = bar_summand(X, Amod, k).spaces
    terms = build_M(X, Amod, k, l)
    mats = [(field.one(), _materialize(field, slots, t, T)) for t in terms]
    return mm_sum(field, mats, signature=(slots, T.space, l - 2),
                  label=label or f"M_{{{k},{l}}}")


def _scaled(field, terms, sign):
    if sign % 2 == 0:
        return list(terms)
    neg = field.neg(field.one())
    return [Term(field.mul(t.coef, neg), t.pos, t.op) for t in terms]


# -- block maps ------------------------------------------------------------------

@dataclass
class BlockMap:
    """Matrix of primitive-term lists between direct sums of bar summands.

    blocks[(i, j)] maps source summand j to target summand i; summand lists
    hold the TensorSpaces (index 0 = R_0 side).  Signs live in the term
    coefficients, never anywhere else.
    """
    field: object
    source: list     # list[TensorSpace]
    target: list     # list[TensorSpace]
    blocks: dict     # (i, j) -> list[Term]

    def entries(self, i, j):
        return self.blocks.get((i, j), [])

    def assemble(self, i, j, degree, label="") -> MultiMap:
        slots = self.source[j].spaces
        T = self.target[i]
        mats = [(self.field.one(), _materialize(self.field, slots, t, T))
                for t in self.entries(i, j)]
        return mm_sum(self.field, mats, signature=(slots, T.space, degree),
                      label=label)


def _composite_terms(field, products, singles, i, j, source, target):
    """Primitive terms of the (i, j) block of a signed sum of composites.

    products: list of (parity, N: BlockMap, M: BlockMap) meaning
    (-1)^parity N o M; singles: list of (parity, BlockMap).  Returns
    (terms, signature) for the fastops evaluators, or (None, None) when no
    block contributes at this position.
    """
    T = target[i]
    slots = source[j].spaces
    terms = []
    degree = None
    for par, N, M in products:
        for (ti, mid) in N.blocks:
            if ti != i or (mid, j) not in M.blocks:
                continue
            mid_slots = N.source[mid].spaces
            for e2 in N.blocks[(ti, mid)]:
                outer = _materialize(field, mid_slots,
                                     Term(e2.coef, e2.pos, e2.op), T)
                for e1 in _scaled(field, M.blocks[(mid, j)], par):
                    inners = list(slots[:e1.pos]) + [e1.op] \
                        + list(slots[e1.pos + e1.op.arity:])
                    terms.append((e1.coef, outer, inners))
                    degree = e1.op.degree + e2.op.degree
    for par, M in singles:
        for e in _scaled(field, M.entries(i, j), par):
            mat = _materialize(field, slots, Term(e.coef, e.pos, e.op), T)
            terms.append((field.one(), mat, list(slots)))
            degree = e.op.degree
    if degree is None:
        return None, None
    return terms, (slots, T.space, degree)


def _composite_check(field, products, singles, i, j, source, target):
    """zero_report for the (i, j) block of a signed sum of composites."""
    terms, sig = _composite_terms(field, products, singles, i, j,
                                  source, target)
    if terms is None:
        return None
    verdict, key, _, n_unc = terms_zero_report(field, terms, sig)
    return verdict, key, n_unc


def _composite_mm(field, products, singles, i, j, source, target,
                  label="") -> MultiMap:
    """The (i, j) block of a signed sum of composites as one MultiMap."""
    terms, sig = _composite_terms(field, products, singles, i, j,
                                  source, target)
    if terms is None:
        slots = source[j].spaces
        return mm_sum(field, [], signature=(slots, target[i].space, 0),
                      label=label)
    return evaluate_terms(field, terms, sig, label=label)


def blockwise_zero(field, products, singles, source, target) -> dict:
    """(i, j) -> (verdict, witness, n_uncertified) over all block positions."""
    out = {}
    for i in range(len(target)):
        for j in range(len(source)):
            rep = _composite_check(field, products, singles, i, j,
                                   source, target)
            if rep is not None:
                out[(i, j)] = rep
    return out


def _worst(reports) -> str:
    verdicts = [r[0] for r in reports.values()]
    if "fail" in verdicts:
        return "fail"
    if "unknown" in verdicts:
        return "unknown"
    return "pass"


# -- the bar construction ---------------------------------------------------------

@dataclass
class BarModule:
    """B_n(X, H, A) = (+)_{i<=n} R_i[-i] with its block differential."""
    X: AnModule
    Amod: AnModule
    n: int
    summands: list           # TensorSpaces R_0 .. R_n
    diff: BlockMap           # block (l-j+1, l) = (-1)^{l+floor((j-1)/2)} M_{l,j}

    def check_d_squared(self) -> dict:
        return blockwise_zero(self.X.field, [(0, self.diff, self.diff)], [],
                              self.summands, self.summands)


def bar_construction(X: AnModule, Amod: AnModule, n: int) -> BarModule:
    """The bar construction on an A_{n+1}-module X.

    The differential on the summand R_l is
    sum_{j=1}^{l+1} (-1)^{l + floor((j-1)/2)} M_{l,j}.
    """
    if X.order < n + 1:
        raise ValueError(f"bar construction B_{n} needs an A_{n + 1}-module")
    field = X.field
    summands = [bar_summand(X, Amod, k) for k in range(n + 1)]
    blocks = {}
    for l in range(n + 1):
        for j in range(1, l + 2):
            terms = _scaled(field, build_M(X, Amod, l, j), l + (j - 1) // 2)
            if terms:
                blocks[(l - j + 1, l)] = terms
    return BarModule(X, Amod, n, summands, BlockMap(field, summands, summands, blocks))


def bar_of_morphism(g: AnMorphism, Amod: AnModule, AmodT: AnModule, n: int):
    """B_n(g) as a BlockMap, entry (i,j) = (-1)^{floor((j-i+1)/2)} g_{j-i+1} (x) 1^{(x)i}.

    Returns (BlockMap, source BarModule, target BarModule); indices here are
    0-based summand indices, so entry (i-1, j-1) of the displayed matrix.
    """
    X, Y = g.source, g.target
    field = g.field
    bX = bar_construction(X, Amod, n)
    bY = bar_construction(Y, AmodT, n)
    blocks = {}
    for jj in range(1, n + 2):          # 1-based column
        for ii in range(1, jj + 1):     # 1-based row
            comp = g.comp(jj - ii + 1)
            if comp is None:
                continue
            terms = _scaled(field, [Term(field.one(), 0, comp)],
                            (jj - ii + 1) // 2)
            blocks[(ii - 1, jj - 1)] = terms
    bm = BlockMap(field, bX.summands, bY.summands, blocks)
    return bm, bX, bY


def check_chain_map(bm: BlockMap, bX: BarModule, bY: BarModule) -> dict:
    """Blockwise report for d' o B(g) - B(g) o d = 0."""
    return blockwise_zero(bm.field,
                          [(0, bY.diff, bm), (1, bm, bX.diff)], [],
                          bX.summands, bY.summands)


def check_functorial(bg: BlockMap, bh: BlockMap, bgh: BlockMap,
                     source, target) -> dict:
    """Blockwise report for B(g) o B(h) - B(g o h) = 0."""
    return blockwise_zero(bg.field, [(0, bg, bh)], [(1, bgh)], source, target)


# -- the canonical Postnikov tower -------------------------------------------------

@dataclass
class TowerStage:
    k: int
    summands: list       # R_0 .. R_k (Y_k = (+)_i R_i[i-k])
    dY: BlockMap         # entry (i,j) 0-based: (-1)^{k-j+floor((j-i)/2)} M_{j, j-i+1}
    i_k: BlockMap        # column R_k -> Y_{k-1}


@dataclass
class PostnikovTower:
    X: AnModule
    Amod: AnModule
    n: int
    stages: list                 # TowerStage for k = 1..n

    def stage(self, k) -> TowerStage:
        return self.stages[k - 1]


def _dY_blocks(X, Amod, k):
    """0-based block (i,j), i<=j<=k, of the differential on Y_k."""
    field = X.field
    blocks = {}
    for j1 in range(1, k + 2):           # paper's 1-based column index
        for i1 in range(1, j1 + 1):
            terms = _scaled(field, build_M(X, Amod, j1 - 1, j1 - i1 + 1),
                            k - j1 + 1 + (j1 - i1) // 2)
            if terms:
                blocks[(i1 - 1, j1 - 1)] = terms
    return blocks


def _ik_blocks(X, Amod, k):
    """Column vector i_k: R_k -> Y_{k-1}, entry into R_{k-j+1} is
    (-1)^{floor((j-1)/2)} M_{k,j} for j = 2..k+1."""
    field = X.field
    blocks = {}
    for j in range(2, k + 2):
        terms = _scaled(field, build_M(X, Amod, k, j), (j - 1) // 2)
        if terms:
            blocks[(k - j + 1, 0)] = terms
    return blocks


def build_tower(X: AnModule, Amod: AnModule, n: int,
                check=True) -> PostnikovTower:
    """Stages Y_k = B_k(X,H,A)[k] with attaching maps i_k, for k = 1..n.

    With check=True verifies, blockwise and with certificates: the inductive
    shape of the Y_k differential (its last column is i_k, its leading block
    is -dY_{k-1}), dY^2 = 0, and the chain-map identity
    dY_{k-1} o i_k = i_k o d.  Raises on any certified failure.
    """
    if X.order < n + 1:
        raise ValueError(f"an n-Postnikov tower needs an A_{n + 1}-module")
    field = X.field
    stages = []
    prev = None
    for k in range(1, n + 1):
        summands = [bar_summand(X, Amod, i) for i in range(k + 1)]
        dY = BlockMap(field, summands, summands, _dY_blocks(X, Amod, k))
        ik = BlockMap(field, [summands[k]], summands[:k],
                      _ik_blocks(X, Amod, k))
        stage = TowerStage(k, summands, dY, ik)
        if check:
            _check_stage(field, stage, prev, X, Amod)
        stages.append(stage)
        prev = stage
    return PostnikovTower(X, Amod, n, stages)


def _check_stage(field, stage, prev, X, Amod):
    k = stage.k
    # structural: last column of dY_k is i_k, leading block is -dY_{k-1}
    for (i, j), terms in stage.dY.blocks.items():
        if j == k and i < k:
            ref = stage.i_k.entries(i, 0)
            if [(t.coef, t.pos, t.op) for t in terms] != \
                    [(t.coef, t.pos, t.op) for t in ref]:
                raise AssertionError(f"stage {k}: dY last column != i_{k} at {i}")
        elif prev is not None and j < k:
            ref = _scaled(field, prev.dY.entries(i, j), 1)
            if [(t.coef, t.pos, t.op) for t in terms] != \
                    [(t.coef, t.pos, t.op) for t in ref]:
                raise AssertionError(f"stage {k}: dY block ({i},{j}) != -dY_{k-1}")
    rep = blockwise_zero(field, [(0, stage.dY, stage.dY)], [],
                         stage.summands, stage.summands)
    if _worst(rep) == "fail":
        bad = {p: r for p, r in rep.items() if r[0] == "fail"}
        raise AssertionError(f"stage {k}: dY^2 != 0 at {bad}")
    if prev is not None:
        # -dY_{k-1} i_k + i_k d = 0 <=> upper right block of dY_k^2 vanishes
        dR = BlockMap(field, [stage.summands[k]], [stage.summands[k]],
                      {(0, 0): build_M(X, Amod, k, 1)})
        rep = blockwise_zero(field, [(1, prev.dY, stage.i_k),
                                     (0, stage.i_k, dR)], [],
                             [stage.summands[k]], stage.summands[:k])
        if _worst(rep) == "fail":
            bad = {p: r for p, r in rep.items() if r[0] == "fail"}
            raise AssertionError(f"stage {k}: i_{k} is not a chain map: {bad}")


# -- homology-level checks ---------------------------------------------------------

def _flat_unary(field, bm: BlockMap, degree, src_flat, dst_flat) -> MultiMap:
    """A BlockMap as a unary map between manually flattened direct sums.

    src_flat / dst_flat are (space, index) pairs whose index keys are
    (summand, basis-tuple); summand shifts only affect the grading of the
    flat spaces, never the matrix entries.
    """
    space_s, index_s = src_flat
    space_t, index_t = dst_flat
    table = {}
    for (i, j), terms in bm.blocks.items():
        T = bm.target[i]
        mats = [_materialize(field, bm.source[j].spaces, t, T)
                for t in terms]
        for tup in bm.source[j].tuples:
            src = index_s.get((j,) + tup)
            if src is None:
                continue
            acc = table.setdefault((src,), {})
            for mat in mats:
                for o, c in mat.value(tup).items():
                    dst = index_t.get((i,) + T.tuples[o])
                    if dst is None:
                        continue
                    v = field.add(acc.get(dst, field.zero()), c)
                    if v:
                        acc[dst] = v
                    else:
                        acc.pop(dst, None)
            if not acc:
                del table[(src,)]
    return MultiMap(field, (space_s,), space_t, degree, table)


def _flatten_summands(summands, shift_of, label):
    """(space, index) for (+)_i summand_i with per-summand degree shifts."""
    basis = []
    index = {}
    for i, T in enumerate(summands):
        for tup in T.tuples:
            d = sum(sp.degree(q) for sp, q in zip(T.spaces, tup))
            index[(i,) + tup] = len(basis)
            basis.append(((i,) + tup, d + shift_of(i)))
    lo = min(d for _, d in basis)
    hi = max(d for _, d in basis)
    return GradedSpace(basis, (lo, hi), label=label), index


def flatten_stage(field, stage: TowerStage):
    """(space, index, dY as unary MultiMap) for Y_k = (+)_i R_i[i-k].

    The summand R_i contributes with degrees lowered by k - i; this is the
    unique shift making the block differential homogeneous of degree -1.
    """
    k = stage.k
    space, index = _flatten_summands(stage.summands, lambda i: i - k,
                                     f"Y_{k}")
    d = _flat_unary(field, stage.dY, -1, (space, index), (space, index))
    return space, index, d


def _dense(field, mm: MultiMap, d: int) -> np.ndarray:
    """mm restricted to source degree d as a dense matrix mod p."""
    if field.p is None:
        raise ValueError("homology-level checks need a prime field")
    cols = mm.spaces[0].basis_in_degree(d)
    rows = mm.target.basis_in_degree(d + mm.degree)
    pos = {j: a for a, j in enumerate(rows)}
    mat = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for b, i in enumerate(cols):
        for j, c in mm.value((i,)).items():
            mat[pos[j], b] = c
    return mat


def _rank_np(mat: np.ndarray, p: int) -> int:
    if mat.size == 0:
        return 0
    return len(rref_modp(mat, p)[1])


def _nullspace_np(mat: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning the kernel of mat over F_p."""
    nrows, ncols = mat.shape
    if ncols == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if nrows == 0 or not mat.any():
        return np.eye(ncols, dtype=np.int64)
    r, piv = rref_modp(mat, p)
    free = [c for c in range(ncols) if c not in piv]
    Z = np.zeros((ncols, len(free)), dtype=np.int64)
    for q, c in enumerate(free):
        Z[c, q] = 1
        for a, pc in enumerate(piv):
            Z[pc, q] = (-r[a, c]) % p
    return Z


def _rank_induced(p, F: np.ndarray, Z: np.ndarray, B: np.ndarray | None) -> int:
    """Rank of the map a chain map F induces on homology.

    Z spans the source cycles; B is the target differential whose image is
    the boundaries (None when the target carries no differential).
    """
    FZ = (F @ Z) % p
    if B is None or B.size == 0:
        return _rank_np(FZ, p)
    rb = _rank_np(B, p)
    return _rank_np(np.concatenate([FZ, B], axis=1), p) - rb


def _augmentation(field, X: AnModule, hdA, T0: TensorSpace) -> MultiMap:
    """R_0 = X (x) A -> X: the action through the projection A -> H(A)."""
    m2 = X.op(2)
    table = {}
    for flat, (ix, ja) in enumerate(T0.tuples):
        acc = {}
        for h, c in hdA.proj.value((ja,)).items():
            for y, c2 in m2.value((ix, h)).items():
                v = field.add(acc.get(y, field.zero()), field.mul(c, c2))
                if v:
                    acc[y] = v
                else:
                    acc.pop(y, None)
        if acc:
            table[(flat,)] = acc
    return MultiMap(field, (T0.space,), X.space, 0, table, label="aug")


def _single_flat(T: TensorSpace):
    """(space, index) of a one-summand flattening, keys prefixed by 0."""
    return T.space, {(0,) + tup: i for i, tup in enumerate(T.tuples)}


def _summand_complex(field, X, Amod, k, T=None):
    """R_k with its internal differential 1^{k+1} (x) d, flattened."""
    T = T or bar_summand(X, Amod, k)
    bm = BlockMap(field, [T], [T], {(0, 0): build_M(X, Amod, k, 1)})
    d_un = _flat_unary(field, bm, -1, _single_flat(T), _single_flat(T))
    return T, d_un


def check_bar_resolution(X: AnModule, Amod: AnModule, hdA, n: int,
                         degrees) -> dict:
    """Exactness of H(R_n) -> ... -> H(R_0) -> X -> 0 on the given degrees.

    Homology of each R_k is taken with respect to 1 (x) d; the connecting
    maps are induced by D = M_{k,2} and the augmentation is the module action
    through the projection of A onto its homology.  Everything reduces to
    matrix ranks at the chain level, so no homology basis is ever chosen.
    Returns a dict keyed by ("onto", d) for surjectivity onto X and (k, d)
    for exactness at H(R_k); every value should be True on honest interior
    degrees.
    """
    field = X.field
    p = field.p
    if p is None:
        raise ValueError("homology-level checks need a prime field")
    flats = [_summand_complex(field, X, Amod, k) for k in range(n + 1)]
    maps = [_augmentation(field, X, hdA, flats[0][0])]
    for k in range(1, n + 1):
        Tk, Tk1 = flats[k][0], flats[k - 1][0]
        bm = BlockMap(field, [Tk], [Tk1], {(0, 0): build_M(X, Amod, k, 2)})
        maps.append(_flat_unary(field, bm, 0, _single_flat(Tk),
                                _single_flat(Tk1)))
    out = {}
    for d in degrees:
        Z = [_nullspace_np(_dense(field, dk, d), p) for _, dk in flats]
        B = [_dense(field, dk, d + 1) for _, dk in flats]
        F = [_dense(field, f, d) for f in maps]
        # rank of each induced map on homology; the augmentation target X
        # carries no differential
        rk = [_rank_induced(p, F[0], Z[0], None)]
        rk += [_rank_induced(p, F[k], Z[k], B[k - 1]) for k in range(1, n + 1)]
        out[("onto", d)] = (rk[0] == len(X.space.basis_in_degree(d)))
        for k in range(1, n + 1):
            comp = (F[k - 1] @ F[k]) % p
            Bdst = None if k == 1 else B[k - 2]
            dim_h = Z[k - 1].shape[1] - _rank_np(B[k - 1], p)
            out[(k - 1, d)] = (_rank_induced(p, comp, Z[k], Bdst) == 0
                               and dim_h - rk[k - 1] == rk[k])
    return out


def check_class_sequence(tower: PostnikovTower, hdA, degrees,
                         stage: int | None = None) -> dict:
    """The exact sequence through which the top stage classifies the module.

    For Y = Y_k with k = stage (default the top stage): the inclusion of the
    first summand induces iota_*: H(R_0) -> H(Y) (raising degree by k); the
    projection onto the last summand induces pi_*: H(Y) -> H(R_k).  Checks,
    per listed degree d of H(R_0):

      ("ker", d):  ker iota_* = ker of the action map H(R_0) -> X
      ("im", d):   im iota_* = ker pi_*   (composite zero + rank count)

    so that H(Y) extends X by the syzygies the tower has resolved so far.
    """
    X, Amod = tower.X, tower.Amod
    field = X.field
    p = field.p
    if p is None:
        raise ValueError("homology-level checks need a prime field")
    k = stage if stage is not None else tower.n
    st = tower.stage(k)
    spaceY, indexY, dY = flatten_stage(field, st)
    T0, d0 = _summand_complex(field, X, Amod, 0, st.summands[0])
    Tk, dk = _summand_complex(field, X, Amod, k, st.summands[k])
    # inclusion of the first summand (degree shift -k inside Y_k) and
    # projection onto the last (no shift)
    iota = MultiMap(field, (T0.space,), spaceY, -k,
                    {(i,): {indexY[(0,) + tup]: field.one()}
                     for i, tup in enumerate(T0.tuples)}, label="iota")
    pi = MultiMap(field, (spaceY,), Tk.space, 0,
                  {(indexY[(k,) + tup],): {i: field.one()}
                   for i, tup in enumerate(Tk.tuples)}, label="pi")
    act = _augmentation(field, X, hdA, T0)
    out = {}
    for d in degrees:
        Z0 = _nullspace_np(_dense(field, d0, d), p)
        BY = _dense(field, dY, d - k + 1)
        ZY = _nullspace_np(_dense(field, dY, d - k), p)
        Bk = _dense(field, dk, d - k + 1)
        Fi = _dense(field, iota, d)
        Fa = _dense(field, act, d)
        Fp = _dense(field, pi, d - k)
        r_i = _rank_induced(p, Fi, Z0, BY)
        r_a = _rank_induced(p, Fa, Z0, None)
        # stacked map h -> (iota_* h, act_* h); boundary columns only on the
        # Y side
        nB = BY.shape[1]
        stacked = np.concatenate(
            [np.concatenate([(Fi @ Z0) % p, BY], axis=1),
             np.concatenate([(Fa @ Z0) % p,
                             np.zeros((Fa.shape[0], nB), dtype=np.int64)],
                            axis=1)], axis=0)
        r_st = _rank_np(stacked, p) - _rank_np(BY, p)
        out[("ker", d)] = (r_i == r_a == r_st)
        dim_hy = ZY.shape[1] - _rank_np(BY, p)
        r_pi = _rank_induced(p, Fp, ZY, Bk)
        comp = (Fp @ Fi) % p
        out[("im", d)] = (_rank_induced(p, comp, Z0, Bk) == 0
                          and r_i == dim_hy - r_pi)
    return out


# -- the lift obstruction, two ways -------------------------------------------------

@dataclass
class LiftReport:
    stage: int
    verdict: str              # extends | obstructed | unknown
    class_trivial: bool       # a different top operation would extend
    path_a: MultiMap          # homotopy route, reduced through H(A)
    path_b: MultiMap          # module-relation cochain, scaled
    component_reports: dict
    agreement: tuple


def _homotopy_column(X, Amod, K):
    """The nullhomotopy H_K: R_{K+1} -> Y_{K-1} behind the two-path identity.

    Entry into R_0 is the extra module operation on A itself; the rest are
    signed M_{K+1, K+3-i}.
    """
    field = X.field
    topA = Amod.op(K + 2)
    if topA is None:
        raise ValueError("lift needs the induced A-module operation of "
                         f"arity {K + 2}; transfer further")
    blocks = {(0, 0): _scaled(field, [Term(field.one(), 1, topA)],
                              (K - 1) // 2 + K + 1)}
    for i in range(2, K + 1):
        blocks[(i - 1, 0)] = _scaled(field, build_M(X, Amod, K + 1, K + 3 - i),
                                     (K - i) // 2)
    return blocks


def lift_obstruction(tower: PostnikovTower, hdA, stage: int | None = None,
                     check_class=True) -> LiftReport:
    """Obstruction to extending the tower one stage, computed two ways.

    Path A: the composite i_K D + dY H_K + H_K d collapses onto the first
    summand R_0 = X (x) A; reducing through the homology of A identifies it
    with a degree-(K-1) cochain X (x) H^{(x)K+1} (x) H -> X.  Path B is the
    order-(K+2) module-relation cochain of X extended by *1, with the sign
    the column H_K forces.  Any certified disagreement means a sign error
    somewhere in the package and raises immediately; the verdict itself is
    path B vanishing identically on certified entries.
    """
    X, Amod = tower.X, tower.Amod
    field = X.field
    K = stage if stage is not None else tower.n
    if X.order < K + 1:
        raise ValueError("lift at stage K needs an A_{K+1}-module")
    H = X.algebra.space
    src = [bar_summand(X, Amod, K + 1)]
    mids = [bar_summand(X, Amod, K)]
    tgt = [bar_summand(X, Amod, i) for i in range(K)]
    iK = BlockMap(field, mids, tgt, _ik_blocks(X, Amod, K))
    D = BlockMap(field, src, mids, {(0, 0): build_M(X, Amod, K + 1, 2)})
    dtop = BlockMap(field, src, src, {(0, 0): build_M(X, Amod, K + 1, 1)})
    dY = BlockMap(field, tgt, tgt, _dY_blocks(X, Amod, K - 1))
    Hk = BlockMap(field, src, tgt, _homotopy_column(X, Amod, K))
    products = [(0, iK, D), (0, dY, Hk), (0, Hk, dtop)]
    reports = {}
    for i in range(1, K):
        rep = _composite_check(field, products, [], i, 0, src, tgt)
        if rep is not None:
            reports[i] = rep
            if rep[0] == "fail":
                raise AssertionError(
                    f"lift stage {K}: component {i} of the homotopy "
                    f"composite is certified nonzero: {rep}")
    F = _composite_mm(field, products, [], 0, 0, src, tgt, label="lift_F")
    G = compose_tensor(F, [X.space] + [H] * (K + 1) + [hdA.f1])
    U = _augmentation(field, X, hdA, tgt[0])
    path_a = compose_tensor(U, [G], label="lift_pathA")
    coch = phi_tilde_n(X, K + 1)
    sign = field.one() if ((K - 1) // 2 + K + 1) % 2 == 0 \
        else field.neg(field.one())
    path_b = star_one(coch.gen, X).scaled(sign)
    path_b.label = "lift_pathB"
    agreement = mm_equal_report(path_a, path_b)
    if agreement[0] == "fail":
        raise AssertionError(
            f"lift stage {K}: the homotopy route and the module-relation "
            f"route disagree: {agreement}")
    verdict, _wit, _n_unc = zero_report(path_b)
    trivial = verdict == "pass"
    if check_class and verdict == "fail":
        trivial = try_extend(X, K + 1).status == "extended"
    return LiftReport(K, {"pass": "extends", "fail": "obstructed",
                          "unknown": "unknown"}[verdict],
                      trivial if verdict != "pass" else True,
                      path_a, path_b, reports, agreement)


# -- morphisms through the tower -----------------------------------------------------

def _bar_morphism_blocks(field, g: AnMorphism, n: int):
    """0-based blocks of B_n(g): entry (i, j) is the signed g_{j-i+1} (x) 1^i."""
    blocks = {}
    for jj in range(1, n + 2):
        for ii in range(1, jj + 1):
            comp = g.comp(jj - ii + 1)
            if comp is None:
                continue
            blocks[(ii - 1, jj - 1)] = _scaled(
                field, [Term(field.one(), 0, comp)], (jj - ii + 1) // 2)
    return blocks


def morphism_square_check(g: AnMorphism, Amod, AmodT, hdA, k: int):
    """Whether (g_1 .. g_k) commutes with the attaching maps up to homotopy.

    Builds Q = B_{k-1}(g) i_k - i_k' (g_1 (x) 1^{k+1}) + dY' H_k + H_k d with
    the canonical column H_k of signed g_{k-i+2} (x) 1^i; components past
    the first must vanish.  The first component reduced through H(A) is the
    obstruction to extending g with g_{k+1} = 0; the returned verdict is its
    vanishing, and it is cross-checked against the direct order-(k+1)
    morphism relation.  Returns (verdict, obstruction map, reports).
    """
    X, Y = g.source, g.target
    field = g.field
    H = X.algebra.space
    src = [bar_summand(X, Amod, k)]
    srcY = [bar_summand(Y, AmodT, k)]
    midsX = [bar_summand(X, Amod, i) for i in range(k)]
    tgt = [bar_summand(Y, AmodT, i) for i in range(k)]
    Bg = BlockMap(field, midsX, tgt, _bar_morphism_blocks(field, g, k - 1))
    ikX = BlockMap(field, src, midsX, _ik_blocks(X, Amod, k))
    ikY = BlockMap(field, srcY, tgt, _ik_blocks(Y, AmodT, k))
    g1t = BlockMap(field, src, srcY,
                   {(0, 0): [Term(field.one(), 0, g.comp(1))]})
    dYp = BlockMap(field, tgt, tgt, _dY_blocks(Y, AmodT, k - 1))
    dtop = BlockMap(field, src, src, {(0, 0): build_M(X, Amod, k, 1)})
    hcol = {}
    for i in range(2, k + 1):
        comp = g.comp(k - i + 2)
        if comp is None:
            continue
        hcol[(i - 1, 0)] = _scaled(field, [Term(field.one(), 0, comp)],
                                   (k - i + 2) // 2)
    Hk = BlockMap(field, src, tgt, hcol)
    products = [(0, Bg, ikX), (1, ikY, g1t), (0, dYp, Hk), (0, Hk, dtop)]
    reports = {}
    for i in range(1, k):
        rep = _composite_check(field, products, [], i, 0, src, tgt)
        if rep is not None:
            reports[i] = rep
            if rep[0] == "fail":
                raise AssertionError(
                    f"morphism square at order {k}: component {i} is "
                    f"certified nonzero: {rep}")
    Q = _composite_mm(field, products, [], 0, 0, src, tgt, label="square_Q")
    G = compose_tensor(Q, [X.space] + [H] * k + [hdA.f1])
    U = _augmentation(field, Y, hdA, tgt[0])
    obs = compose_tensor(U, [G], label="square_obs")
    verdict = zero_report(obs)[0]
    # cross-check: the same verdict must come out of the direct relation for
    # the candidate extension (g_1 .. g_k, g_{k+1} = 0)
    if X.order >= k + 1 and Y.order >= k + 1:
        gx = AnMorphism(X, Y, {q: g.comp(q) for q in range(1, k + 1)},
                        k + 1, kind=g.kind, label=g.label + "+0")
        direct = check_morphism_order(gx, k + 1)
        if {verdict, direct} == {"pass", "fail"}:
            raise AssertionError(
                f"morphism square at order {k}: homotopy verdict {verdict} "
                f"contradicts the direct relation verdict {direct}")
    return verdict, obs, reports


def check_morphism_order(g: AnMorphism, m: int) -> str:
    """Verdict of the single order-m morphism relation."""
    from .structures import _morphism_terms, _order_check
    terms, sig = _morphism_terms(g, m)
    return _order_check(g.field, terms, sig, m).verdict


def recover_top_component(g: AnMorphism, Amod, AmodT, k: int) -> MultiMap:
    """Read g_{k+1} back off the corner block of B_k(g).

    The (0, k) block is (-1)^{floor((k+1)/2)} g_{k+1} (x) 1; evaluating at a
    fixed basis element of the last (A) slot and projecting back recovers the
    unique representative, which must equal g_{k+1} on the nose.
    """
    X, Y = g.source, g.target
    field = g.field
    comp = g.comp(k + 1)
    sign = field.one() if ((k + 1) // 2) % 2 == 0 else field.neg(field.one())
    src = bar_summand(X, Amod, k)
    tgt = bar_summand(Y, AmodT, 0)
    blocks = _bar_morphism_blocks(field, g, k)
    terms = blocks.get((0, k))
    spaces = (X.space,) + (X.algebra.space,) * k
    if terms is None:
        return mm_sum(field, [], signature=(spaces, Y.space, k),
                      label="recovered_top")
    mat = _materialize(field, src.spaces, terms[0], tgt)
    A = Amod.space
    # pick, per A-degree, any basis element to divide back out
    table = {}
    for key, val in mat.table.items():
        xkey, a = key[:-1], key[-1]
        acc = table.setdefault(xkey, {})
        for o, c in val.items():
            y, a2 = tgt.tuples[o]
            if a2 != a:
                continue
            prev = acc.get(y)
            v = field.mul(sign, c)
            if prev is not None and prev != v:
                raise AssertionError("corner block is not of the form "
                                     "g (x) 1")
            acc[y] = v
    table = {key: {y: c for y, c in val.items() if c}
             for key, val in table.items()}
    table = {key: val for key, val in table.items() if val}
    out = MultiMap(field, spaces, Y.space, k, table,
                   cert=None if comp is None else comp.cert,
                   label="recovered_top")
    return out


def tower_morphism_roundtrip(g: AnMorphism, Amod, AmodT, k: int):
    """mm_equal_report between g_{k+1} and its recovery from B_k(g).

    Distinct top components give distinct corner blocks, so a certified pass
    here is exactly the faithfulness of the tower on order-(k+1) morphisms.
    """
    field = g.field
    rec = recover_top_component(g, Amod, AmodT, k)
    comp = g.comp(k + 1)
    if comp is None:
        comp = mm_sum(field, [], signature=(rec.spaces, rec.target, k),
                      label="g_top")
    return mm_equal_report(rec, comp)
