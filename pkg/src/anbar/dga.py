"""Differential graded algebras and modules, homology with contraction data,
and builders for the truncated-polynomial endomorphism DGA family.

The endomorphism model: for L = F_p[z]/z^n, the complete resolution P has
P_i = L for all integers i with d_i = multiplication by -z^{n-1} (i even) or
by z (i odd).  Full End(P) has infinite-dimensional pieces, so we take the
sub-DGA of 2-periodic endomorphisms: a degree-j element is a pair (q_0, q_1)
in L^2 acting on P_i as multiplication by q_{i mod 2}.  Pieces are then
2n-dimensional per degree and contain the homology generators.  The homology
answer is verified against the known one in tests, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

from anbar.graded import GradedSpace, direct_sum
from anbar.multimap import MultiMap, compose_tensor, mm_sum, mm_identity, zero_report
from anbar.linalg import LinearSolver, rref_modp, rref_frac


class Dga:
    """Unital DGA on a windowed graded space; d arity 1 degree -1, mu arity 2 degree 0."""

    def __init__(self, field, space, d: MultiMap, mu: MultiMap, unit: dict, label=""):
        self.field = field
        self.space = space
        self.d = d
        self.mu = mu
        self.unit = dict(unit)   # sparse vector in degree 0
        self.label = label

    def check(self):
        """Verdicts for d^2, Leibniz, associativity and unit laws (pass/fail/unknown)."""
        F, A = self.field, self.space
        one, neg = F.one(), F.neg(F.one())
        out = {}
        dd = compose_tensor(self.d, [self.d])
        out["d_squared"] = zero_report(dd)[0]
        leib = mm_sum(F, [
            (one, compose_tensor(self.d, [self.mu])),
            (neg, compose_tensor(self.mu, [self.d, A])),
            (neg, compose_tensor(self.mu, [A, self.d])),
        ])
        out["leibniz"] = zero_report(leib)[0]
        assoc = mm_sum(F, [
            (one, compose_tensor(self.mu, [self.mu, A])),
            (neg, compose_tensor(self.mu, [A, self.mu])),
        ])
        out["associative"] = zero_report(assoc)[0]
        out["unit"] = "pass" if self._unit_ok() else "fail"
        return out

    def as_algebra(self, order: int):
        """View as an A_order-algebra with m_1 = d and m_2 = mu."""
        from .structures import AnAlgebra
        return AnAlgebra(self.field, self.space, {1: self.d, 2: self.mu},
                         order=order, label=self.label or "dga")

    def _unit_ok(self):
        F = self.field
        for i in range(self.space.dim):
            left = {}
            right = {}
            for u, cu in self.unit.items():
                for j, c in self.mu.value((u, i)).items():
                    left[j] = F.add(left.get(j, F.zero()), F.mul(cu, c))
                for j, c in self.mu.value((i, u)).items():
                    right[j] = F.add(right.get(j, F.zero()), F.mul(cu, c))
            left = {j: c for j, c in left.items() if c}
            right = {j: c for j, c in right.items() if c}
            if left != {i: F.one()} or right != {i: F.one()}:
                return False
        return True


class DgModule:
    """Right DG module over a Dga: d degree -1 and a strict action M tensor A -> M."""

    def __init__(self, algebra: Dga, space, d: MultiMap, action: MultiMap, label=""):
        self.algebra = algebra
        self.field = algebra.field
        self.space = space
        self.d = d
        self.action = action
        self.label = label

    def check(self):
        F, M, A = self.field, self.space, self.algebra.space
        one, neg = F.one(), F.neg(F.one())
        out = {}
        out["d_squared"] = zero_report(compose_tensor(self.d, [self.d]))[0]
        leib = mm_sum(F, [
            (one, compose_tensor(self.d, [self.action])),
            (neg, compose_tensor(self.action, [self.d, A])),
            (neg, compose_tensor(self.action, [M, self.algebra.d])),
        ])
        out["leibniz"] = zero_report(leib)[0]
        assoc = mm_sum(F, [
            (one, compose_tensor(self.action, [self.action, A])),
            (neg, compose_tensor(self.action, [M, self.algebra.mu])),
        ])
        out["associative"] = zero_report(assoc)[0]
        ok = True
        for i in range(M.dim):
            v = {}
            for u, cu in self.algebra.unit.items():
                for j, c in self.action.value((i, u)).items():
                    v[j] = F.add(v.get(j, F.zero()), F.mul(cu, c))
            if {j: c for j, c in v.items() if c} != {i: F.one()}:
                ok = False
                break
        out["unit"] = "pass" if ok else "fail"
        return out


@dataclass
class HomologyData:
    """Homology basis plus the contraction needed for homotopy transfer.

    On the interior window: d h + h d = id - f1 proj, with side conditions
    h f1 = 0, h h = 0, proj h = 0 (the decomposition forces them).
    """
    H: GradedSpace
    proj: MultiMap      # A -> H, degree 0
    f1: MultiMap        # H -> A, degree 0, lands in cycles
    h: MultiMap         # A -> A, degree +1
    interior: tuple     # (lo, hi) degrees on which the decomposition is certified


def _rref(field, rows, ncols):
    if field.is_modular:
        import numpy as np
        a = np.array(rows, dtype=np.int64).reshape(len(rows), ncols)
        rr, piv = rref_modp(a, field.p)
        return [[int(x) for x in r] for r in rr], piv
    return rref_frac(rows, ncols)


def homology(field, space, d: MultiMap, label="H") -> HomologyData:
    """Per-degree decomposition A_k = B_k + R_k + C_k with B = im d, B + R = ker d.

    h inverts d on the image (h|_B = (d|_C)^-1, h|_R = h|_C = 0); deterministic
    via the fixed pivot rule of the row reducer.
    """
    lo, hi = space.window
    interior = (lo + 1, hi - 1)
    # local per-degree data
    kerbas = {}      # k -> list of dense vectors over basis_in_degree(k)
    pivcols = {}     # k -> pivot positions (local) spanning a complement of ker
    for k in range(lo + 1, hi + 1):
        cols = space.basis_in_degree(k)
        rows_idx = space.basis_in_degree(k - 1)
        pos = {j: a for a, j in enumerate(rows_idx)}
        mat = []
        for a, j in enumerate(rows_idx):
            mat.append([field.zero()] * len(cols))
        for b, i in enumerate(cols):
            for j, c in d.value((i,)).items():
                mat[pos[j]][b] = c
        solver = LinearSolver(field, mat if mat else [[field.zero()] * len(cols)], len(cols))
        kerbas[k] = solver.kernel_basis()
        pivcols[k] = list(solver.pivots)

    hbasis = []          # (name, degree)
    f1_table = {}
    proj_rows = {}       # filled after P inverse per degree
    h_table = {}
    hidx = 0
    deg_of_h = []
    for k in range(lo + 1, hi):
        cols = space.basis_in_degree(k)
        nloc = len(cols)
        if nloc == 0:
            continue
        up = space.basis_in_degree(k + 1)
        # boundaries: d of the pivot columns one degree up
        bvecs = []
        bsrc = []
        pos = {j: a for a, j in enumerate(cols)}
        for b in pivcols.get(k + 1, []):
            v = [field.zero()] * nloc
            for j, c in d.value((up[b],)).items():
                v[pos[j]] = c
            bvecs.append(v)
            bsrc.append(up[b])
        # representatives: kernel vectors extending the boundary span
        rvecs = []
        stack = [list(v) for v in bvecs]
        rank0 = _rank(field, stack, nloc)
        for z in kerbas.get(k, []):
            trial = stack + [list(z)]
            r = _rank(field, trial, nloc)
            if r > rank0:
                stack = trial
                rank0 = r
                rvecs.append(z)
        # complement of the kernel: unit vectors at d_k pivot columns
        cvecs_pos = pivcols.get(k, [])
        # change of basis P = [B | R | C] (columns)
        nb, nr = len(bvecs), len(rvecs)
        pcols = bvecs + rvecs + [
            [field.one() if a == cpos else field.zero() for a in range(nloc)] for cpos in cvecs_pos
        ]
        if len(pcols) != nloc:
            raise ValueError(f"decomposition failed in degree {k}")
        solver = LinearSolver(field, [[pcols[b][a] for b in range(nloc)] for a in range(nloc)], nloc)
        if solver.rank != nloc:
            raise ValueError(f"singular basis change in degree {k}")
        hnames = []
        for r in range(nr):
            hnames.append((f"h{k}_{r}" if nr > 1 else f"h{k}", k))
        hbasis.extend(hnames)
        for r, z in enumerate(rvecs):
            f1_table[(hidx + r,)] = {cols[a]: z[a] for a in range(nloc) if z[a]}
        for a in range(nloc):
            e = [field.one() if b == a else field.zero() for b in range(nloc)]
            x = solver.solve(e)   # coordinates of basis vector in (B, R, C)
            pr = {hidx + r: x[nb + r] for r in range(nr) if x[nb + r]}
            if pr:
                proj_rows[(cols[a],)] = pr
            hv = {}
            for b in range(nb):
                if x[b]:
                    hv[bsrc[b]] = field.add(hv.get(bsrc[b], field.zero()), x[b])
            hv = {j: c for j, c in hv.items() if c}
            if hv:
                h_table[(cols[a],)] = hv
        hidx += nr
    H = GradedSpace(hbasis, window=interior if hbasis else (0, 0), label=label)
    cert_in = ((0, 1, interior[0], interior[1]),)
    proj = MultiMap(field, (space,), H, 0, proj_rows, cert_in, label=f"proj_{label}")
    f1 = MultiMap(field, (H,), space, 0, f1_table, ((0, 1, interior[0], interior[1]),), label=f"f1_{label}")
    h = MultiMap(field, (space,), space, 1, h_table, cert_in, label=f"h_{label}")
    return HomologyData(H, proj, f1, h, interior)


def _rank(field, rows, ncols):
    if not rows:
        return 0
    return LinearSolver(field, [list(r) for r in rows], ncols).rank


def shift_complex(space, d: MultiMap, n: int):
    """(space[n], (-1)^n d) with matching index sets."""
    sp = space.shift(n)
    if n % 2 == 0:
        table = {k: dict(v) for k, v in d.table.items()}
    else:
        f = d.field
        table = {k: {j: f.neg(c) for j, c in v.items()} for k, v in d.table.items()}
    lo, hi = space.window
    cert = tuple((a, b, clo - n, chi - n) for a, b, clo, chi in d.cert)
    return sp, MultiMap(d.field, (sp,), sp, d.degree, table, cert, label=d.label + f"[{n}]")


def homotopy_fiber(f: MultiMap, dC: MultiMap, dD: MultiMap):
    """Standard model of the homotopy fiber of a chain map f: C -> D.

    F_k = D_{k+1} + C_k with differential [[-d, f], [0, d]]; returns
    (F space, dF, projection F -> C).
    """
    field = f.field
    C, D = f.spaces[0], f.target
    res = mm_sum(field, [
        (field.one(), compose_tensor(dD, [f])),
        (field.neg(field.one()), compose_tensor(f, [dC])),
    ])
    v, key, _ = zero_report(res)
    if v == "fail":
        raise ValueError(f"not a chain map at {key}")
    D1 = D.shift(1)
    F, offs = direct_sum([D1, C], prefix="f")
    offD, offC = offs
    table = {}
    for i in range(D1.dim):
        # -d_D on the shifted copy
        val = {offD + j: field.neg(c) for j, c in dD.value((i,)).items()}
        if val:
            table[(offD + i,)] = val
    for i in range(C.dim):
        val = {offD + j: c for j, c in f.value((i,)).items()}
        for j, c in dC.value((i,)).items():
            val[offC + j] = c
        if val:
            table[(offC + i,)] = val
    lo, hi = F.window
    dF = MultiMap(field, (F,), F, -1, table, None, label="d_fiber")
    proj_table = {(offC + i,): {i: field.one()} for i in range(C.dim)}
    proj = MultiMap(field, (F,), C, 0, proj_table, (), label="proj_fiber")
    return F, dF, proj


# -- builders -------------------------------------------------------------------

def _trunc_mult(n, shift, sign):
    """Multiplication by (sign) z^shift in k[z]/z^n as an index map a -> a+shift."""
    def f(a):
        b = a + shift
        return (b, sign) if b < n else None
    return f


def build_truncated_polynomial_dga(field, n: int, window, label="End(P)") -> Dga:
    """The 2-periodic endomorphism DGA of the complete resolution of k over k[z]/z^n.

    Degree-j basis: z^a e_s for 0 <= a < n, s in {0,1}; the pair slot s is the
    multiplier on P_i for i = s mod 2.  d is the commutator with d_P and the
    product is composition of endomorphisms.
    """
    if n < 2:
        raise ValueError("height n must be at least 2")
    lo, hi = window
    basis = []
    for j in range(lo, hi + 1):
        for s in (0, 1):
            for a in range(n):
                basis.append((f"z{a}e{s}[{j}]", j))
    A = GradedSpace(basis, window, label=label)
    per_deg = 2 * n

    def idx(a, s, j):
        return (j - lo) * per_deg + s * n + a

    F = field
    one = F.one()

    def cmul(parity):
        # multiplier of d_P at index parity: -z^{n-1} if even, z if odd
        return _trunc_mult(n, n - 1, F.neg(one)) if parity % 2 == 0 else _trunc_mult(n, 1, one)

    d_table = {}
    for j in range(lo + 1, hi + 1):
        for s in (0, 1):
            for a in range(n):
                val = {}
                r1 = cmul(s + j)(a)
                if r1:
                    val[idx(r1[0], s, j - 1)] = r1[1]
                r2 = cmul(s + 1)(a)
                if r2:
                    # -(-1)^j times the multiplier, landing in the other parity slot
                    c = r2[1] if (j % 2 == 1) else F.neg(r2[1])
                    val[idx(r2[0], (s + 1) % 2, j - 1)] = c
                if val:
                    d_table[(idx(a, s, j),)] = val
    d = MultiMap(F, (A,), A, -1, d_table, None, label="d")

    mu_table = {}
    for j1 in range(lo, hi + 1):
        for j2 in range(lo, hi + 1):
            j = j1 + j2
            if not lo <= j <= hi:
                continue
            for s in (0, 1):
                for t in (0, 1):
                    if s % 2 != (t + j2) % 2:
                        continue
                    for a in range(n):
                        for b in range(n):
                            if a + b >= n:
                                continue
                            mu_table[(idx(a, s, j1), idx(b, t, j2))] = {idx(a + b, t, j): one}
    mu = MultiMap(F, (A, A), A, 0, mu_table, None, label="mu")
    unit = {idx(0, 0, 0): one, idx(0, 1, 0): one}
    return Dga(F, A, d, mu, unit, label=label)


def build_hom_module(dga: Dga, field, n: int, m: int, window, label="Hom(P,k[z]/z^m)") -> DgModule:
    """Hom(P, k[z]/z^m) as a right module over the 2-periodic endomorphism DGA.

    Degree-j piece is Hom_L(P_{-j}, k[z]/z^m) with basis z^b, b < m; the
    differential is -(-1)^j (precomposition with d_P) and the action is
    precomposition with the endomorphism.
    """
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    lo, hi = window
    basis = [(f"z{b}[{j}]", j) for j in range(lo, hi + 1) for b in range(m)]
    Msp = GradedSpace(basis, window, label=label)

    def idx(b, j):
        return (j - lo) * m + b

    F = field
    one = F.one()
    d_table = {}
    for j in range(lo + 1, hi + 1):
        # multiplier c_{1-j} (parity of 1-j = parity of j+1), truncated at z^m
        parity = (j + 1) % 2
        shift, sg = (n - 1, F.neg(one)) if parity == 0 else (1, one)
        for b in range(m):
            bb = b + shift
            if bb >= m:
                continue
            c = sg if (j % 2 == 1) else F.neg(sg)   # -(-1)^j
            d_table[(idx(b, j),)] = {idx(bb, j - 1): c}
    d = MultiMap(F, (Msp,), Msp, -1, d_table, None, label="d_hom")

    A = dga.space
    alo, ahi = A.window
    nA = (A.dim // (ahi - alo + 1))  # 2n per degree
    act_table = {}
    # decode the dga basis layout built above
    height = nA // 2
    for j in range(lo, hi + 1):
        for j2 in range(alo, ahi + 1):
            jj = j + j2
            if not lo <= jj <= hi:
                continue
            for s in (0, 1):
                if s % 2 != (jj) % 2:
                    continue
                for a in range(height):
                    for b in range(m):
                        if a + b >= m:
                            continue
                        ai = (j2 - alo) * nA + s * height + a
                        act_table[(idx(b, j), ai)] = {idx(a + b, jj): one}
    act = MultiMap(F, (Msp, A), Msp, 0, act_table, None, label="act_hom")
    return DgModule(dga, Msp, d, act, label=label)


def build_square_zero_extension(field, R: GradedSpace, mu_R: MultiMap, n: int, cocycle: MultiMap,
                                order=None, label="R[eps]"):
    """S = R[eps]/eps^2 with |eps| = n-2, operations m_2 and m_n only.

    R must be concentrated in degree 0 and associative; the cocycle c: R^n -> R
    determines m_n as eps * c on R-inputs (zero whenever an input involves eps).
    Rejects c when it is not a Hochschild cocycle.
    """
    from anbar.structures import AnAlgebra
    from anbar.obstruction import hochschild_differential
    if any(d != 0 for d in R.degrees):
        raise ValueError("base algebra must sit in degree 0")
    if n < 3:
        raise ValueError("need n >= 3")
    res = hochschild_differential(field, mu_R, cocycle)
    if res.table:
        raise ValueError("cocycle fails the Hochschild cocycle condition")
    k = R.dim
    basis = [(nm, 0) for nm in R.names] + [(f"eps*{nm}", n - 2) for nm in R.names]
    S = GradedSpace(basis, (0, n - 2) if n > 2 else (0, 0), label=label)
    F = field
    m2_table = {}
    for (i, j), v in mu_R.table.items():
        m2_table[(i, j)] = dict(v)
        m2_table[(i + k, j)] = {t + k: c for t, c in v.items()}
        m2_table[(i, j + k)] = {t + k: c for t, c in v.items()}
    m2 = MultiMap(F, (S, S), S, 0, m2_table, (), label="m2")
    mn_table = {}
    for key, v in cocycle.table.items():
        mn_table[key] = {t + k: c for t, c in v.items()}
    mn = MultiMap(F, (S,) * n, S, n - 2, mn_table, (), label=f"m{n}")
    return AnAlgebra(F, S, {2: m2, n: mn}, order or (2 * n), label=label)
