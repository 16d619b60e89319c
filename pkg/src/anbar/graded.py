"""Graded vector spaces on finite degree windows, with sparse vectors.

A GradedSpace is a finite list of named basis elements with integer degrees.
Degrees outside the window are *unknown*, not zero: consumers must treat any
computation that would leave the window as uncertified.
"""

from __future__ import annotations


class GradedSpace:
    """Finitely supported graded basis over a field.

    basis: sequence of (name, degree) pairs, names unique.
    window: (lo, hi) degree interval; every basis degree must lie inside.
    """

    __slots__ = ("names", "degrees", "window", "index", "by_degree", "label")

    def __init__(self, basis, window=None, label=""):
        names = tuple(n for n, _ in basis)
        degrees = tuple(int(d) for _, d in basis)
        if len(set(names)) != len(names):
            raise ValueError("basis names must be unique")
        if window is None:
            if not degrees:
                raise ValueError("empty basis needs an explicit window")
            window = (min(degrees), max(degrees))
        lo, hi = int(window[0]), int(window[1])
        for n, d in zip(names, degrees):
            if not lo <= d <= hi:
                raise ValueError(f"basis element {n!r} of degree {d} outside window [{lo},{hi}]")
        self.names = names
        self.degrees = degrees
        self.window = (lo, hi)
        self.index = {n: i for i, n in enumerate(names)}
        by_degree: dict[int, list[int]] = {}
        for i, d in enumerate(degrees):
            by_degree.setdefault(d, []).append(i)
        self.by_degree = by_degree
        self.label = label

    @property
    def dim(self) -> int:
        return len(self.names)

    def degree(self, i: int) -> int:
        return self.degrees[i]

    def dims_by_degree(self) -> dict[int, int]:
        return {d: len(ix) for d, ix in sorted(self.by_degree.items())}

    def basis_in_degree(self, d: int) -> list[int]:
        return self.by_degree.get(d, [])

    def shift(self, n: int, rename=True) -> "GradedSpace":
        """n-fold desuspension: (self[n])_k = self_{k+n}, i.e. degrees drop by n."""
        if n == 0:
            return self
        suffix = f"[{n}]" if rename else ""
        basis = [(nm + suffix, d - n) for nm, d in zip(self.names, self.degrees)]
        lo, hi = self.window
        return GradedSpace(basis, (lo - n, hi - n), label=self.label + suffix)

    def __eq__(self, other):
        return (
            isinstance(other, GradedSpace)
            and self.names == other.names
            and self.degrees == other.degrees
            and self.window == other.window
        )

    def __hash__(self):
        return hash((self.names, self.degrees, self.window))

    def __repr__(self):
        return f"GradedSpace({self.label or len(self.names)} dim={self.dim} window={self.window})"


def direct_sum(spaces, window=None, prefix=None) -> tuple[GradedSpace, list[int]]:
    """Concatenate bases; returns (space, offsets) with offsets[i] the index shift
    of the i-th summand's basis inside the sum."""
    basis = []
    offsets = []
    off = 0
    for k, sp in enumerate(spaces):
        offsets.append(off)
        tag = f"{prefix}{k}:" if prefix else f"s{k}:"
        for nm, d in zip(sp.names, sp.degrees):
            basis.append((tag + nm, d))
        off += sp.dim
    if window is None:
        los = [sp.window[0] for sp in spaces]
        his = [sp.window[1] for sp in spaces]
        window = (min(los), max(his))
    return GradedSpace(basis, window), offsets


# -- sparse vectors: dict index -> scalar -------------------------------------

def vec_add(field, u: dict, v: dict, c=None) -> dict:
    """u + c*v (c defaults to 1); returns a new dict without zero entries."""
    out = dict(u)
    one = field.one()
    c = one if c is None else c
    for i, a in v.items():
        b = field.add(out.get(i, 0), field.mul(c, a)) if c != one else field.add(out.get(i, 0), a)
        if b:
            out[i] = b
        else:
            out.pop(i, None)
    return out


def vec_scale(field, u: dict, c) -> dict:
    if not c:
        return {}
    return {i: field.mul(c, a) for i, a in u.items()}


def vec_eq(u: dict, v: dict) -> bool:
    return u == v
