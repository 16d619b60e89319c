"""Degree-homogeneous multilinear maps on graded spaces, stored sparsely.

A MultiMap sends basis k-tuples to linear combinations in the target; absent
entries are zero *only inside the certified region*.  Certification is a
conjunction of interval constraints on contiguous input-degree sums, which is
exactly the shape produced by composing windowed maps, so composition and
addition track certification without loss.

Signs follow the Koszul rule (f tensor g)(x tensor y) = (-1)^{|f||x|} f(x) tensor g(y),
hence the commutation rule (f tensor g)(h tensor j) = (-1)^{|g||h|} (fh) tensor (gj).
"""

from __future__ import annotations

from anbar.graded import GradedSpace, vec_add, vec_scale


class WindowError(Exception):
    """Raised when an evaluation leaves every certified window."""


# -- certification ------------------------------------------------------------
#
# A certificate is a tuple of constraints (start, end, lo, hi), each meaning
# sum(input degrees[start:end]) must lie in [lo, hi] for the entry to be
# certified.  Absent table entries are exactly zero on certified tuples and
# unknown elsewhere.

def cert_ok(cert, degs) -> bool:
    for a, b, lo, hi in cert:
        s = sum(degs[a:b])
        if not lo <= s <= hi:
            return False
    return True


def cert_normalize(cert):
    merged = {}
    for a, b, lo, hi in cert:
        key = (a, b)
        if key in merged:
            plo, phi = merged[key]
            merged[key] = (max(plo, lo), min(phi, hi))
        else:
            merged[key] = (lo, hi)
    return tuple(sorted((a, b, lo, hi) for (a, b), (lo, hi) in merged.items()))


def cert_feasible(spaces, cert) -> bool:
    """Is there any assignment of basis degrees satisfying every constraint?

    Exact DFS with prefix-sum pruning; spaces are small so this is cheap.
    """
    k = len(spaces)
    degsets = [sorted(set(sp.degrees)) for sp in spaces]
    if any(not ds for ds in degsets):
        return False
    lo_rem = [0] * (k + 1)
    hi_rem = [0] * (k + 1)
    for i in range(k - 1, -1, -1):
        lo_rem[i] = lo_rem[i + 1] + degsets[i][0]
        hi_rem[i] = hi_rem[i + 1] + degsets[i][-1]
    cert = cert_normalize(cert)

    def prune(degs, i):
        # degs[0:i] chosen; check each constraint's attainable range
        for a, b, lo, hi in cert:
            if a >= i:
                done = 0
                rem_lo = lo_rem[a] - lo_rem[b]
                rem_hi = hi_rem[a] - hi_rem[b]
            elif b <= i:
                done = sum(degs[a:b])
                rem_lo = rem_hi = 0
            else:
                done = sum(degs[a:i])
                rem_lo = lo_rem[i] - lo_rem[b]
                rem_hi = hi_rem[i] - hi_rem[b]
            if done + rem_hi < lo or done + rem_lo > hi:
                return True
        return False

    degs = []

    def dfs(i):
        if prune(degs, i):
            return False
        if i == k:
            return True
        for d in degsets[i]:
            degs.append(d)
            if dfs(i + 1):
                return True
            degs.pop()
        return False

    return dfs(0)


class MultiMap:
    """A sparsely stored multilinear map factor_1 x ... x factor_k -> target.

    table: dict mapping tuples of basis indices to dicts {target index: coef}.
    cert: tuple of (start, end, lo, hi) interval constraints on input degrees.
    """

    __slots__ = ("field", "spaces", "target", "degree", "table", "cert", "label",
                 "_cols")

    def __init__(self, field, spaces, target, degree, table=None, cert=None, label="", validate=False):
        self.field = field
        self.spaces = tuple(spaces)
        self.target = target
        self.degree = int(degree)
        self.table = table if table is not None else {}
        if cert is None:
            k = len(self.spaces)
            lo, hi = target.window
            cert = ((0, k, lo - self.degree, hi - self.degree),)
        self.cert = cert_normalize(cert)
        self.label = label
        self._cols = None   # lazy columnar cache, managed by fastops
        if validate:
            self._validate()

    def _validate(self):
        for key, val in self.table.items():
            dout = self.key_degree(key) + self.degree
            for j, c in val.items():
                if self.target.degrees[j] != dout:
                    raise ValueError(
                        f"{self.label or 'map'}: entry {key} hits degree "
                        f"{self.target.degrees[j]}, expected {dout}"
                    )

    @property
    def arity(self) -> int:
        return len(self.spaces)

    def key_degree(self, key) -> int:
        return sum(sp.degrees[i] for sp, i in zip(self.spaces, key))

    def key_degrees(self, key):
        return tuple(sp.degrees[i] for sp, i in zip(self.spaces, key))

    def certified(self, key) -> bool:
        return cert_ok(self.cert, self.key_degrees(key))

    def value(self, key, strict=False) -> dict:
        v = self.table.get(tuple(key))
        if v is not None:
            return v
        if strict and not self.certified(key):
            raise WindowError(f"{self.label or 'map'} not certified on {key}")
        return {}

    def set(self, key, val: dict):
        key = tuple(key)
        self._cols = None
        val = {j: c for j, c in val.items() if c}
        if val:
            self.table[key] = val
        else:
            self.table.pop(key, None)

    def is_zero_map(self) -> bool:
        return not self.table

    def signature(self):
        return (self.spaces, self.target, self.degree)

    def feasible(self) -> bool:
        return cert_feasible(self.spaces, self.cert)

    def copy(self, label=None):
        return MultiMap(
            self.field, self.spaces, self.target, self.degree,
            {k: dict(v) for k, v in self.table.items()}, self.cert,
            label if label is not None else self.label,
        )

    def scaled(self, c):
        fld = self.field
        tab = {k: vec_scale(fld, v, c) for k, v in self.table.items()} if c else {}
        return MultiMap(fld, self.spaces, self.target, self.degree, tab, self.cert, self.label)

    def __repr__(self):
        return (
            f"MultiMap({self.label or 'anon'}: arity={self.arity} "
            f"degree={self.degree} entries={len(self.table)})"
        )


def mm_zero(field, spaces, target, degree, everywhere=True, label="0"):
    """The zero map; when everywhere=True it is certified on all inputs."""
    cert = () if everywhere else None
    return MultiMap(field, spaces, target, degree, {}, cert, label)


def mm_identity(field, space, label="id"):
    one = field.one()
    table = {(i,): {i: one} for i in range(space.dim)}
    return MultiMap(field, (space,), space, 0, table, (), label)


def mm_from_function(field, spaces, target, degree, fn, label="", max_keys=2_000_000):
    """Materialize a map from a python function on basis index tuples.

    fn(key) returns {target index: coef} or None.  Only entries whose output
    degree lies in the target window are stored (everything else is outside
    certification anyway).  Use only for small arities.
    """
    spaces = tuple(spaces)
    total = 1
    for sp in spaces:
        total *= sp.dim
    if total > max_keys:
        raise ValueError(f"refusing to enumerate {total} basis tuples")
    lo, hi = target.window
    table = {}
    import itertools

    for key in itertools.product(*(range(sp.dim) for sp in spaces)):
        dout = sum(sp.degrees[i] for sp, i in zip(spaces, key)) + degree
        if not lo <= dout <= hi:
            continue
        val = fn(key)
        if val:
            val = {j: c for j, c in val.items() if c}
            if val:
                table[key] = val
    return MultiMap(field, spaces, target, degree, table, None, label)


def mm_sum(field, terms, signature=None, label=""):
    """Linear combination sum(c * m) of multimaps with identical signatures."""
    terms = list(terms)
    if not terms and signature is None:
        raise ValueError("empty sum with no signature")
    if signature is None:
        signature = terms[0][1].signature()
    spaces, target, degree = signature
    table: dict = {}
    cert: list = []
    p = field.p
    for c, m in terms:
        if m.signature() != signature:
            raise ValueError(f"signature mismatch in sum: {m} vs {signature}")
        cert.extend(m.cert)
        if not c:
            continue
        for key, val in m.table.items():
            cur = table.get(key)
            if cur is None:
                cur = {}
                table[key] = cur
            if p is not None:
                for j, v in val.items():
                    cur[j] = (cur.get(j, 0) + c * v) % p
            else:
                for j, v in val.items():
                    cur[j] = cur.get(j, 0) + c * v
    table = {k: {j: v for j, v in d.items() if v} for k, d in table.items()}
    table = {k: v for k, v in table.items() if v}
    return MultiMap(field, spaces, target, degree, table, tuple(cert), label)


def compose_tensor(outer: MultiMap, inners, label="") -> MultiMap:
    """outer o (inner_1 tensor ... tensor inner_k), identities given as spaces.

    Koszul signs: applying (g_1 tensor ... tensor g_k) to (x_1,...,x_k) costs
    (-1)^{sum_{q<r} |g_r| |x_q|}; the outer map contributes no further sign.
    """
    field = outer.field
    k = outer.arity
    if len(inners) != k:
        raise ValueError("inner count must match outer arity")
    slices = []  # (start, length, degree, cert or None, spaces)
    comp_spaces = []
    start = 0
    indexes = []  # per slot: None for identity, else dict out_idx -> [(key, coef, keydeg)]
    for q, inner in enumerate(inners):
        if isinstance(inner, GradedSpace):
            if inner is not outer.spaces[q] and inner != outer.spaces[q]:
                raise ValueError(f"identity slot {q} space mismatch")
            slices.append((start, 1, 0, None, (inner,)))
            comp_spaces.append(inner)
            indexes.append(None)
            start += 1
        else:
            if inner.target != outer.spaces[q]:
                raise ValueError(f"slot {q}: inner target does not feed outer factor")
            idx: dict = {}
            for ikey, ival in inner.table.items():
                kd = inner.key_degree(ikey)
                for j, c in ival.items():
                    idx.setdefault(j, []).append((ikey, c, kd))
            slices.append((start, inner.arity, inner.degree, inner.cert, inner.spaces))
            comp_spaces.extend(inner.spaces)
            indexes.append(idx)
            start += inner.arity
    total_arity = start
    degree = outer.degree + sum(s[2] for s in slices)
    inner_degs = [s[2] for s in slices]
    deg_parities = [d & 1 for d in inner_degs]

    table: dict = {}
    fmul = field.mul
    for okey, oval in outer.table.items():
        # candidate lists per slot: (partial key tuple, coef-or-None, slice total degree)
        cands = []
        dead = False
        for q in range(k):
            idx = indexes[q]
            if idx is None:
                i = okey[q]
                cands.append((((i,), None, outer.spaces[q].degrees[i]),))
            else:
                lst = idx.get(okey[q])
                if not lst:
                    dead = True
                    break
                cands.append(tuple(lst))
        if dead:
            continue
        # fold across slots tracking sign from degrees to the left
        # acc entries: (key tuple, coef or None, cumulative input degree, sign exponent)
        acc = [((), None, 0, 0)]
        for q in range(k):
            par = deg_parities[q]
            nxt = []
            for key0, c0, cum0, s0 in acc:
                for ikey, ic, kd in cands[q]:
                    s = s0 + (par & cum0)
                    if ic is None:
                        c = c0
                    elif c0 is None:
                        c = ic
                    else:
                        c = fmul(c0, ic)
                    nxt.append((key0 + ikey, c, cum0 + kd, s))
            acc = nxt
        p = field.p
        for key, c, _cum, s in acc:
            if c is None:
                c = field.one()
            if s & 1:
                c = field.neg(c)
            cur = table.get(key)
            if cur is None:
                cur = {}
                table[key] = cur
            if p is not None:
                for j, v in oval.items():
                    cur[j] = (cur.get(j, 0) + c * v) % p
            else:
                for j, v in oval.items():
                    cur[j] = cur.get(j, 0) + c * v
    table = {kk: {j: v for j, v in d.items() if v} for kk, d in table.items()}
    table = {kk: v for kk, v in table.items() if v}

    # certification: inner constraints on their slices; outer constraints map
    # to the union of the covered slices with inner-degree offsets.
    cert = []
    for (st, ln, _d, icert, _sp) in slices:
        if icert:
            for a, b, lo, hi in icert:
                cert.append((st + a, st + b, lo, hi))
    for a, b, lo, hi in outer.cert:
        st = slices[a][0]
        en = slices[b - 1][0] + slices[b - 1][1] if b > a else st
        off = sum(inner_degs[q] for q in range(a, b))
        cert.append((st, en, lo - off, hi - off))

    tgt_spaces = tuple(comp_spaces)
    return MultiMap(field, tgt_spaces, outer.target, degree, table, tuple(cert), label)


def insert_at(outer: MultiMap, inner: MultiMap, pos: int, label=""):
    """outer o (1^pos tensor inner tensor 1^rest)."""
    inners = list(outer.spaces)
    inners[pos] = inner
    return compose_tensor(outer, inners, label=label)


# -- reporting ----------------------------------------------------------------

def zero_report(mm: MultiMap):
    """Classify mm against zero on its certified region.

    Returns (verdict, witness, n_uncertified_nonzero) with verdict in
    {"pass", "fail", "unknown"}.  "unknown" means no certified tuple exists at
    all; nonzero entries outside certification never count as failures.
    """
    witness = None
    n_uncert = 0
    for key in sorted(mm.table):
        if cert_ok(mm.cert, mm.key_degrees(key)):
            if witness is None:
                witness = key
        else:
            n_uncert += 1
    if witness is not None:
        return "fail", witness, n_uncert
    if not cert_feasible(mm.spaces, mm.cert):
        return "unknown", None, n_uncert
    return "pass", None, n_uncert


def mm_equal_report(a: MultiMap, b: MultiMap):
    diff = mm_sum(a.field, [(a.field.one(), a), (a.field.neg(a.field.one()), b)])
    return zero_report(diff)
