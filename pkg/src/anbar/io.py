"""Structure files: JSON serialization for graded structures.

A structure file is a UTF-8 JSON document with a fixed layout:

  format     "anbar-structure/1"
  kind       one of dga | an_algebra | an_module | an_morphism
             (plus complex | complex_map, used when exporting bar-type
             towers whose stages are plain chain complexes)
  field      {"p": 5} for F_5, {"p": "rational"} for exact rationals
  window     {"lo": .., "hi": ..}, the window of the principal space
  spaces     named graded spaces: basis as [name, degree] pairs
  maps       named multilinear maps, sparse: each entry is a pair
             [input basis names, [[coefficient, output basis name], ...]]
  structure  kind-specific references into the spaces/maps pools

Coefficients are JSON integers over F_p and strings ("num/den" or "num")
over the rationals.  Serialization is canonical: spaces and maps are
named in a deterministic encounter order and entries are sorted, so
serialize(parse(text)) == text byte for byte and parse(serialize(v))
rebuilds v exactly (same degrees, coefficients, certificates, labels).
"""

from __future__ import annotations

import json
from fractions import Fraction

from .field import Field
from .graded import GradedSpace
from .multimap import MultiMap
from .dga import Dga
from .structures import AnAlgebra, AnModule, AnMorphism

FORMAT = "anbar-structure/1"

KINDS = ("dga", "an_algebra", "an_module", "an_morphism", "complex", "complex_map")


class StructureFileError(ValueError):
    """Raised when a structure file cannot be parsed."""


# ---------------------------------------------------------------------------
# coefficients


def _encode_coef(field: Field, c):
    if field.p is not None:
        return int(c) % field.p
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _decode_coef(field: Field, v):
    if field.p is not None:
        if not isinstance(v, int):
            raise StructureFileError(f"expected integer coefficient mod p, got {v!r}")
        return v % field.p
    if not isinstance(v, str):
        raise StructureFileError(f"expected string coefficient over Q, got {v!r}")
    return field.parse(v)


def _decode_field(doc) -> Field:
    try:
        p = doc["field"]["p"]
    except (KeyError, TypeError):
        raise StructureFileError("missing field section")
    if p == "rational":
        return Field(None)
    if isinstance(p, int):
        return Field(p)
    raise StructureFileError(f"bad field spec {p!r}")


# ---------------------------------------------------------------------------
# encoding


class _Encoder:
    def __init__(self, field: Field):
        self.field = field
        self.spaces = {}        # id(space) -> name
        self.space_docs = {}    # name -> doc
        self.maps = {}          # id(map) -> name
        self.map_docs = {}      # name -> doc

    def space(self, sp: GradedSpace) -> str:
        name = self.spaces.get(id(sp))
        if name is not None:
            return name
        name = f"s{len(self.space_docs)}"
        self.spaces[id(sp)] = name
        self.space_docs[name] = {
            "window": [sp.window[0], sp.window[1]],
            "label": sp.label,
            "basis": [[n, d] for n, d in zip(sp.names, sp.degrees)],
        }
        return name

    def map(self, mm: MultiMap) -> str:
        name = self.maps.get(id(mm))
        if name is not None:
            return name
        name = f"f{len(self.map_docs)}"
        self.maps[id(mm)] = name
        entries = []
        for key in sorted(mm.table):
            val = mm.table[key]
            ins = [sp.names[i] for sp, i in zip(mm.spaces, key)]
            outs = [[_encode_coef(self.field, val[j]), mm.target.names[j]]
                    for j in sorted(val) if val[j]]
            if outs:
                entries.append([ins, outs])
        self.map_docs[name] = {
            "spaces": [self.space(sp) for sp in mm.spaces],
            "target": self.space(mm.target),
            "degree": mm.degree,
            "label": mm.label,
            "cert": [list(c) for c in mm.cert],
            "entries": entries,
        }
        return name

    def ops(self, ops: dict) -> dict:
        return {str(k): self.map(ops[k]) for k in sorted(ops)}


def _encode_structure(enc: _Encoder, obj):
    if isinstance(obj, Dga):
        unit = [[_encode_coef(enc.field, obj.unit[j]), obj.space.names[j]]
                for j in sorted(obj.unit) if obj.unit[j]]
        return "dga", {
            "space": enc.space(obj.space),
            "d": enc.map(obj.d),
            "mu": enc.map(obj.mu),
            "unit": unit,
            "label": obj.label,
        }
    if isinstance(obj, AnAlgebra):
        return "an_algebra", {
            "space": enc.space(obj.space),
            "order": obj.order,
            "label": obj.label,
            "ops": enc.ops(obj.ops),
        }
    if isinstance(obj, AnModule):
        _, alg = _encode_structure(enc, obj.algebra)
        return "an_module", {
            "algebra": alg,
            "space": enc.space(obj.space),
            "order": obj.order,
            "side": obj.side,
            "label": obj.label,
            "ops": enc.ops(obj.ops),
        }
    if isinstance(obj, AnMorphism):
        skind, src = _encode_structure(enc, obj.source)
        tkind, tgt = _encode_structure(enc, obj.target)
        if skind != tkind:
            raise StructureFileError("morphism endpoints of different kinds")
        return "an_morphism", {
            "morphism_kind": obj.kind,
            "order": obj.order,
            "label": obj.label,
            "source": src,
            "target": tgt,
            "endpoint_kind": skind,
            "comps": enc.ops(obj.comps),
        }
    raise StructureFileError(f"cannot serialize {type(obj).__name__}")


def _principal_space_doc(kind, structure):
    if kind in ("dga", "an_algebra", "an_module", "complex"):
        return structure["space"]
    if kind == "an_morphism":
        return _principal_space_doc(structure["endpoint_kind"], structure["source"])
    if kind == "complex_map":
        return structure["source_space"]
    raise StructureFileError(f"unknown kind {kind!r}")


def serialize(obj, field: Field | None = None) -> str:
    """Render a structure as canonical JSON text (ends with a newline)."""
    if field is None:
        field = obj.field
    enc = _Encoder(field)
    if isinstance(obj, tuple) and len(obj) == 2 and isinstance(obj[1], MultiMap):
        # (space, differential) pair: a plain chain complex
        sp, d = obj
        kind, structure = "complex", {
            "space": enc.space(sp),
            "d": enc.map(d),
            "label": sp.label,
        }
    elif isinstance(obj, MultiMap) and obj.arity == 1:
        kind, structure = "complex_map", {
            "source_space": enc.space(obj.spaces[0]),
            "target_space": enc.space(obj.target),
            "map": enc.map(obj),
            "degree": obj.degree,
            "label": obj.label,
        }
    else:
        kind, structure = _encode_structure(enc, obj)
    principal = enc.space_docs[_principal_space_doc(kind, structure)]
    doc = {
        "format": FORMAT,
        "kind": kind,
        "field": {"p": field.p if field.p is not None else "rational"},
        "window": {"lo": principal["window"][0], "hi": principal["window"][1]},
        "spaces": enc.space_docs,
        "maps": enc.map_docs,
        "structure": structure,
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# decoding


class _Decoder:
    def __init__(self, field: Field, doc):
        self.field = field
        self.doc = doc
        self._spaces = {}
        self._maps = {}

    def space(self, name: str) -> GradedSpace:
        sp = self._spaces.get(name)
        if sp is not None:
            return sp
        try:
            d = self.doc["spaces"][name]
            sp = GradedSpace([(n, deg) for n, deg in d["basis"]],
                             window=tuple(d["window"]), label=d.get("label", ""))
        except (KeyError, TypeError, ValueError) as e:
            raise StructureFileError(f"bad space {name!r}: {e}")
        self._spaces[name] = sp
        return sp

    def map(self, name: str) -> MultiMap:
        mm = self._maps.get(name)
        if mm is not None:
            return mm
        try:
            d = self.doc["maps"][name]
            spaces = tuple(self.space(s) for s in d["spaces"])
            target = self.space(d["target"])
            table = {}
            for ins, outs in d["entries"]:
                key = tuple(sp.index[n] for sp, n in zip(spaces, ins))
                val = {}
                for coef, out in outs:
                    c = _decode_coef(self.field, coef)
                    if c:
                        val[target.index[out]] = c
                if val:
                    table[key] = val
            mm = MultiMap(self.field, spaces, target, d["degree"],
                          table=table, cert=tuple(tuple(c) for c in d["cert"]),
                          label=d.get("label", ""), validate=True)
        except StructureFileError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise StructureFileError(f"bad map {name!r}: {e}")
        self._maps[name] = mm
        return mm

    def ops(self, d: dict) -> dict:
        return {int(k): self.map(v) for k, v in d.items()}


def _decode_structure(dec: _Decoder, kind: str, s):
    try:
        if kind == "dga":
            space = dec.space(s["space"])
            unit = {}
            for coef, name in s["unit"]:
                unit[space.index[name]] = _decode_coef(dec.field, coef)
            return Dga(dec.field, space, dec.map(s["d"]), dec.map(s["mu"]),
                       unit, label=s.get("label", ""))
        if kind == "an_algebra":
            return AnAlgebra(dec.field, dec.space(s["space"]), dec.ops(s["ops"]),
                             s["order"], label=s.get("label", ""))
        if kind == "an_module":
            alg = _decode_structure(dec, "an_algebra", s["algebra"])
            return AnModule(alg, dec.space(s["space"]), dec.ops(s["ops"]),
                            s["order"], side=s.get("side", "right"),
                            label=s.get("label", ""))
        if kind == "an_morphism":
            ek = s["endpoint_kind"]
            src = _decode_structure(dec, ek, s["source"])
            tgt = _decode_structure(dec, ek, s["target"])
            return AnMorphism(src, tgt, dec.ops(s["comps"]), s["order"],
                              kind=s.get("morphism_kind", "module"),
                              label=s.get("label", ""))
        if kind == "complex":
            return (dec.space(s["space"]), dec.map(s["d"]))
        if kind == "complex_map":
            return dec.map(s["map"])
    except StructureFileError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise StructureFileError(f"bad {kind} structure: {e}")
    raise StructureFileError(f"unknown kind {kind!r}")


def parse(text: str):
    """Parse structure file text back into the objects it describes."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise StructureFileError(f"not valid JSON: {e}")
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise StructureFileError(f"not a {FORMAT} document")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise StructureFileError(f"unknown kind {kind!r}")
    field = _decode_field(doc)
    dec = _Decoder(field, doc)
    return _decode_structure(dec, kind, doc.get("structure", {}))


def save(obj, path, field: Field | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(obj, field=field))


def load(path):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
