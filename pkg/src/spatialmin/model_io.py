"""Model ingestion and emission: JSON documents, 2D images, DOT output.

Document format (version 1)::

    {
      "version": 1,
      "atoms": ["blue", "red"],
      "points": [{"id": "a1", "atoms": ["blue"]}, ...],
      "edges": [["a1", "a2"], ...]
    }

Edges are stored exactly as listed — no reflexive or symmetric
completion.  A closure-space document replaces ``"edges"`` with a
``"singletonClosure"`` object mapping each point id to the ids in the
closure of its singleton; exactly one of the two keys must be present.

Images become models with one point per pixel (ids ``"row_col"``),
symmetric edges between neighbouring pixels (4 or 8 neighbours), and by
default one atom per distinct colour, named ``"#rrggbb"``.  Reflexive
self-edges are never materialized: closure includes the point anyway.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .closure_coalg import FiniteClosureSpace
from .model import Model

__all__ = [
    "SCHEMA_VERSION", "DocumentError", "ImageOptions",
    "load_model", "loads_model", "save_model", "dumps_model",
    "load_closure_space", "save_closure_space", "dumps_closure_space",
    "load_document", "image_to_model", "load_image_model",
    "disjoint_union", "emit_dot",
]

SCHEMA_VERSION = 1


class DocumentError(ValueError):
    """A model document failed to parse or validate."""


def _parse_json(text: str, source: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(
            f"{source}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(doc, dict):
        raise DocumentError(f"{source}: document must be a JSON object")
    return doc


def _check_header(doc: dict, source: str) -> tuple[list, dict]:
    version = doc.get("version")
    if version != SCHEMA_VERSION:
        raise DocumentError(f"{source}: unknown schema version {version!r}")
    atoms = doc.get("atoms", [])
    if not isinstance(atoms, list):
        raise DocumentError(f"{source}: 'atoms' must be a list")
    points = doc.get("points")
    if not isinstance(points, list) or not points:
        raise DocumentError(f"{source}: 'points' must be a non-empty list")
    ids = []
    valuation = {}
    seen = set()
    for entry in points:
        if not isinstance(entry, dict) or "id" not in entry:
            raise DocumentError(f"{source}: each point needs an 'id' field")
        pid = entry["id"]
        if pid in seen:
            raise DocumentError(f"{source}: duplicate point id {pid!r}")
        seen.add(pid)
        ids.append(pid)
        props = entry.get("atoms", [])
        if not isinstance(props, list):
            raise DocumentError(f"{source}: point {pid!r} 'atoms' must be a list")
        bad = [a for a in props if a not in atoms]
        if bad:
            raise DocumentError(
                f"{source}: point {pid!r} uses undeclared atoms {bad!r}"
            )
        if props:
            valuation[pid] = set(props)
    if ("edges" in doc) == ("singletonClosure" in doc):
        raise DocumentError(
            f"{source}: exactly one of 'edges' or 'singletonClosure' must be present"
        )
    return ids, {"atoms": atoms, "valuation": valuation, "seen": seen}


def loads_model(text: str, source: str = "<string>") -> Model:
    doc = _parse_json(text, source)
    ids, head = _check_header(doc, source)
    if "edges" not in doc:
        raise DocumentError(f"{source}: expected an edge document, found a closure-space one")
    edges = []
    for e in doc["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            raise DocumentError(f"{source}: each edge must be a two-element list")
        u, v = e
        if u not in head["seen"] or v not in head["seen"]:
            raise DocumentError(f"{source}: dangling edge [{u!r}, {v!r}]")
        edges.append((u, v))
    return Model(ids, edges, head["valuation"], head["atoms"])


def load_model(path) -> Model:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise DocumentError(f"{path}: {e.strerror or e}") from e
    return loads_model(text, str(path))


def dumps_model(m: Model) -> str:
    doc = {
        "version": SCHEMA_VERSION,
        "atoms": sorted(m.atoms, key=str),
        "points": [
            {"id": p, "atoms": sorted(m.atoms_of(p), key=str)} for p in m.point_ids
        ],
        "edges": [[u, v] for u, v in m.edge_list()],
    }
    return json.dumps(doc, indent=2) + "\n"


def save_model(m: Model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(m))


def _loads_closure_space(doc: dict, ids, head, source: str) -> FiniteClosureSpace:
    scl_doc = doc["singletonClosure"]
    if not isinstance(scl_doc, dict):
        raise DocumentError(f"{source}: 'singletonClosure' must be an object")
    missing = [p for p in ids if p not in scl_doc]
    if missing:
        raise DocumentError(f"{source}: missing singleton closures for {missing!r}")
    scl = {}
    for pid, members in scl_doc.items():
        if pid not in head["seen"]:
            raise DocumentError(f"{source}: closure given for unknown point {pid!r}")
        for q in members:
            if q not in head["seen"]:
                raise DocumentError(f"{source}: closure of {pid!r} mentions unknown point {q!r}")
        scl[pid] = list(members)
    try:
        return FiniteClosureSpace(ids, scl, head["valuation"], head["atoms"])
    except ValueError as e:
        raise DocumentError(f"{source}: {e}") from e


def load_closure_space(path) -> FiniteClosureSpace:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise DocumentError(f"{path}: {e.strerror or e}") from e
    doc = _parse_json(text, str(path))
    ids, head = _check_header(doc, str(path))
    if "singletonClosure" not in doc:
        raise DocumentError(f"{path}: expected a closure-space document, found an edge one")
    return _loads_closure_space(doc, ids, head, str(path))


def dumps_closure_space(s: FiniteClosureSpace) -> str:
    doc = {
        "version": SCHEMA_VERSION,
        "atoms": sorted(s.atoms, key=str),
        "points": [
            {"id": p, "atoms": sorted(s.atoms_of(p), key=str)} for p in s.point_ids
        ],
        "singletonClosure": {
            p: sorted(s.singleton_closure(p), key=str) for p in s.point_ids
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def save_closure_space(s: FiniteClosureSpace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_closure_space(s))


def load_document(path):
    """Load either document kind, dispatching on the keys present."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise DocumentError(f"{path}: {e.strerror or e}") from e
    doc = _parse_json(text, str(path))
    ids, head = _check_header(doc, str(path))
    if "edges" in doc:
        return loads_model(text, str(path))
    return _loads_closure_space(doc, ids, head, str(path))


# -- images -----------------------------------------------------------------

_OFFSETS = {
    "orthogonal": ((-1, 0), (1, 0), (0, -1), (0, 1)),
    "orthodiagonal": (
        (-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)
    ),
}


@dataclass(frozen=True)
class ImageOptions:
    """How to turn a pixel grid into a model.

    connectivity: ``"orthogonal"`` (4 neighbours) or ``"orthodiagonal"``
    (8 neighbours).  colour_atoms: None for one atom per distinct colour
    (named ``#rrggbb``), or an explicit colour->atom map; with a map,
    colours outside it are an error.
    """

    connectivity: str = "orthodiagonal"
    colour_atoms: dict | None = None

    def __post_init__(self):
        if self.connectivity not in _OFFSETS:
            raise ValueError(
                f"connectivity must be 'orthogonal' or 'orthodiagonal',"
                f" got {self.connectivity!r}"
            )


def _hex_colour(rgb) -> str:
    return "#{:02x}{:02x}{:02x}".format(int(rgb[0]), int(rgb[1]), int(rgb[2]))


def image_to_model(pixels: np.ndarray, opts: ImageOptions | None = None) -> Model:
    """One point per pixel, symmetric edges between neighbours, atoms from
    colours.  `pixels` must be an (H, W, 3) or (H, W, 4) uint8 array;
    an alpha channel is ignored."""
    opts = opts or ImageOptions()
    pixels = np.asarray(pixels)
    if pixels.ndim != 3 or pixels.shape[2] not in (3, 4) or pixels.dtype != np.uint8:
        raise DocumentError(
            "unsupported image depth: expected an (H, W, 3|4) uint8 array,"
            f" got shape {pixels.shape} dtype {pixels.dtype}"
        )
    h, w = pixels.shape[:2]
    if h == 0 or w == 0:
        raise DocumentError("image is empty")
    rgb = pixels[:, :, :3]

    ids = [f"{r}_{c}" for r in range(h) for c in range(w)]

    # one valuation entry per distinct colour, assigned vectorized
    flat = rgb.reshape(-1, 3)
    packed = (
        flat[:, 0].astype(np.int64) << 16
    ) | (flat[:, 1].astype(np.int64) << 8) | flat[:, 2].astype(np.int64)
    colour_codes, inverse = np.unique(packed, return_inverse=True)
    atom_sets = []
    for code in colour_codes.tolist():
        colour = "#{:06x}".format(code)
        if opts.colour_atoms is not None:
            try:
                atom = opts.colour_atoms[colour]
            except KeyError:
                pos = int(np.argmax(packed == code))
                raise DocumentError(
                    f"pixel ({pos // w}, {pos % w}) has colour {colour}"
                    " not in the colour map"
                ) from None
        else:
            atom = colour
        atom_sets.append(frozenset({atom}))
    valuation_sets = [atom_sets[k] for k in inverse.tolist()]

    grid = np.arange(h * w, dtype=np.int64).reshape(h, w)
    srcs, dsts = [], []
    for dr, dc in _OFFSETS[opts.connectivity]:
        r0, r1 = max(0, -dr), min(h, h - dr)
        c0, c1 = max(0, -dc), min(w, w - dc)
        srcs.append(grid[r0:r1, c0:c1].ravel())
        dsts.append(grid[r0 + dr:r1 + dr, c0 + dc:c1 + dc].ravel())
    esrc = np.concatenate(srcs) if srcs else np.empty(0, dtype=np.int64)
    edst = np.concatenate(dsts) if dsts else np.empty(0, dtype=np.int64)
    atoms = sorted({next(iter(v)) for v in atom_sets})
    return Model.from_arrays(ids, esrc, edst, valuation_sets, atoms)


def load_image_model(path, opts: ImageOptions | None = None) -> Model:
    """Load a PNG or BMP file into a model."""
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as img:
            if img.format not in ("PNG", "BMP"):
                raise DocumentError(f"{path}: unsupported image format {img.format}")
            if img.mode not in ("RGB", "RGBA"):
                raise DocumentError(
                    f"{path}: unsupported image depth (mode {img.mode}); expected RGB/RGBA"
                )
            pixels = np.asarray(img, dtype=np.uint8)
    except UnidentifiedImageError as e:
        raise DocumentError(f"{path}: not a readable image") from e
    except OSError as e:
        raise DocumentError(f"{path}: {e.strerror or e}") from e
    return image_to_model(pixels, opts)


# -- combinators --------------------------------------------------------------

def disjoint_union(models: Sequence[Model], tags: Sequence[str] | None = None) -> Model:
    """Tagged disjoint union: point ``p`` of the k-th model becomes
    ``"{tag}:{p}"``; edges and valuations are copied, atoms unioned."""
    models = list(models)
    if not models:
        raise ValueError("disjoint union of no models would be empty")
    if tags is None:
        tags = [str(k) for k in range(len(models))]
    if len(tags) != len(models) or len(set(tags)) != len(tags):
        raise ValueError("tags must be distinct and match the number of models")
    ids = []
    edges = []
    valuation = {}
    atoms = set()
    for tag, m in zip(tags, models):
        rename = {p: f"{tag}:{p}" for p in m.point_ids}
        ids.extend(rename[p] for p in m.point_ids)
        edges.extend((rename[u], rename[v]) for u, v in m.edge_list())
        for p in m.point_ids:
            props = m.atoms_of(p)
            if props:
                valuation[rename[p]] = set(props)
        atoms |= m.atoms
    return Model(ids, edges, valuation, atoms)


def restrict(m: Model, points: Iterable) -> Model:
    """The submodel induced by a subset of points (edges within it)."""
    keep = set(points)
    ids = [p for p in m.point_ids if p in keep]
    edges = [(u, v) for u, v in m.edge_list() if u in keep and v in keep]
    valuation = {p: set(m.atoms_of(p)) for p in ids if m.atoms_of(p)}
    return Model(ids, edges, valuation, m.atoms)


# -- DOT --------------------------------------------------------------------

_COLOUR_RE_OK = set("0123456789abcdef")


def _is_colour_atom(a) -> bool:
    return (
        isinstance(a, str)
        and len(a) == 7
        and a[0] == "#"
        and all(ch in _COLOUR_RE_OK for ch in a[1:])
    )


def _dot_quote(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(m: Model, style: str = "plain") -> str:
    """Deterministic DOT text: nodes in carrier order, edges as stored.

    ``plain`` labels nodes with their sorted atom list; ``colour`` fills
    each node with its single colour atom, falling back to plain (with a
    warning) when any point lacks exactly one ``#rrggbb`` atom.
    """
    if style not in ("plain", "colour"):
        raise ValueError(f"style must be 'plain' or 'colour', got {style!r}")
    if style == "colour":
        for p in m.point_ids:
            props = m.atoms_of(p)
            if len(props) != 1 or not _is_colour_atom(next(iter(props))):
                warnings.warn(
                    f"point {p!r} has no single colour atom; falling back to plain style",
                    stacklevel=2,
                )
                style = "plain"
                break
    lines = ["digraph model {"]
    for p in m.point_ids:
        props = sorted(m.atoms_of(p), key=str)
        if style == "colour":
            colour = props[0]
            lines.append(
                f"  {_dot_quote(p)} [style=filled, fillcolor={_dot_quote(colour)}];"
            )
        else:
            label = ",".join(str(a) for a in props)
            lines.append(f"  {_dot_quote(p)} [label={_dot_quote(label)}];")
    for u, v in m.edge_list():
        lines.append(f"  {_dot_quote(u)} -> {_dot_quote(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
