"""Vector systems, projector POVMs built from them, and their JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .linalg import DEFAULT_TOL, inv_sqrt_psd

SCHEMA_VERSION = 1

NORM_TOL = 1e-12
ORTHO_TOL = 1e-10


class MalformedInputError(ValueError):
    """A serialized document could not be decoded."""


@dataclass
class VectorSystem:
    """A labeled family of vectors in C^n, optionally partitioned into bases.

    ``vectors`` has shape (count, n).  ``hp_builder``, when present, rebuilds
    the same vectors at a given binary precision as gmpy2 values; it is used
    for extended-precision rank certificates and is not serialized.
    """

    n: int
    vectors: np.ndarray
    labels: list[tuple]
    basis_groups: list[list[int]] | None = None
    provenance: dict[str, Any] = field(default_factory=dict)
    hp_builder: Callable[[int], list[list]] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=complex)
        if self.vectors.ndim != 2 or self.vectors.shape[1] != self.n:
            raise ValueError(f"vectors must have shape (count, {self.n}), got {self.vectors.shape}")
        if len(self.labels) != len(self.vectors):
            raise ValueError("one label per vector required")
        self.labels = [tuple(lab) for lab in self.labels]

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def name(self) -> str:
        return str(self.provenance.get("construction", "unknown"))

    def norm_defect(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.vectors, axis=1) - 1.0)))

    def group_orthonormality_defect(self) -> float:
        """Largest |<v_i|v_j> - delta_ij| inside any declared basis group."""
        if not self.basis_groups:
            return 0.0
        worst = 0.0
        for group in self.basis_groups:
            b = self.vectors[group]
            gram = b.conj() @ b.T
            worst = max(worst, float(np.max(np.abs(gram - np.eye(len(group))))))
        return worst

    def frame_operator(self) -> np.ndarray:
        """sum_i |v_i><v_i| (unscaled)."""
        return self.vectors.T @ self.vectors.conj()

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "type": "vector_system",
            "provenance": self.provenance,
            "n": self.n,
            "labels": [list(lab) for lab in self.labels],
            "basis_groups": self.basis_groups,
            "vectors": _encode_array(self.vectors),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> VectorSystem:
        try:
            if doc.get("type", "vector_system") != "vector_system":
                raise MalformedInputError(f"expected a vector_system document, got {doc.get('type')!r}")
            n = int(doc["n"])
            vectors = _decode_array(doc["vectors"])
            if vectors.size == 0:
                vectors = vectors.reshape(0, n)
            return cls(
                n=n,
                vectors=vectors,
                labels=[tuple(lab) for lab in doc["labels"]],
                basis_groups=doc.get("basis_groups"),
                provenance=dict(doc.get("provenance") or {}),
            )
        except MalformedInputError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f"bad vector system document: {exc}") from exc


@dataclass
class ProjectorPOVM:
    """Rank-one operators E_i = weight * |v_i><v_i| and, if symmetrized, their G^{-1/2} conjugates.

    ``vectors`` are the (possibly transformed) vectors whose outer products,
    times ``weight``, give ``elements``.  For the symmetrized kind these are
    G^{-1/2} v_i, so n^2 tr(F_i F_j) = |<vectors_i|vectors_j>|^2 when
    weight = 1/n.
    """

    n: int
    vectors: np.ndarray
    weight: float
    kind: str  # "raw" | "symmetrized"
    source: VectorSystem
    frame_operator: np.ndarray
    symmetrizer: np.ndarray | None = None

    @property
    def elements(self) -> np.ndarray:
        v = self.vectors
        return self.weight * v[:, :, None] * v.conj()[:, None, :]

    def __len__(self) -> int:
        return len(self.vectors)

    def element_sum(self) -> np.ndarray:
        return self.weight * (self.vectors.T @ self.vectors.conj())

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "type": "projector_povm",
            "kind": self.kind,
            "n": self.n,
            "weight": self.weight,
            "provenance": self.source.provenance,
            "source": self.source.to_dict(),
            "frame_operator": _encode_array(self.frame_operator),
            "symmetrizer": None if self.symmetrizer is None else _encode_array(self.symmetrizer),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> ProjectorPOVM:
        """Rebuild from the stored source system; G and G^{-1/2} are recomputed, not trusted."""
        try:
            source = VectorSystem.from_dict(doc["source"])
            kind = doc.get("kind", "symmetrized")
            weight = float(doc.get("weight", 1.0 / source.n))
        except MalformedInputError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f"bad projector_povm document: {exc}") from exc
        if kind == "raw":
            return raw_povm(source, weight=weight)
        if kind == "symmetrized":
            return symmetrize_to_povm(source, weight=weight)
        raise MalformedInputError(f"unknown POVM kind {kind!r}")


def raw_povm(system: VectorSystem, weight: float | None = None) -> ProjectorPOVM:
    w = 1.0 / system.n if weight is None else weight
    g = w * system.frame_operator()
    return ProjectorPOVM(n=system.n, vectors=system.vectors.copy(), weight=w, kind="raw",
                         source=system, frame_operator=g)


def symmetrize_to_povm(system: VectorSystem, weight: float | None = None, tol: float = DEFAULT_TOL) -> ProjectorPOVM:
    """F_i = G^{-1/2} E_i G^{-1/2} with E_i = |v_i><v_i|/n and G = sum_i E_i.

    Raises ``NotPositiveDefiniteError`` when the vectors do not span C^n.
    """
    w = 1.0 / system.n if weight is None else weight
    g = w * system.frame_operator()
    g = 0.5 * (g + g.conj().T)
    r = inv_sqrt_psd(g, tol=tol)
    return ProjectorPOVM(n=system.n, vectors=system.vectors @ r.T, weight=w, kind="symmetrized",
                         source=system, frame_operator=g, symmetrizer=r)


# --- JSON ---------------------------------------------------------------------


def _encode_array(a: np.ndarray) -> list:
    # json writes floats with repr(), which round-trips doubles exactly
    a = np.asarray(a, dtype=complex)
    pairs = np.stack([a.real, a.imag], axis=-1)
    return pairs.tolist()


def _decode_array(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1:] != (2,):
        raise MalformedInputError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj: VectorSystem | ProjectorPOVM | dict, indent: int | None = None) -> str:
    doc = obj if isinstance(obj, dict) else obj.to_dict()
    return json.dumps(_jsonable(doc), indent=indent, allow_nan=False)


def loads(text: str) -> VectorSystem | ProjectorPOVM:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedInputError("top-level JSON value must be an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise MalformedInputError(f"unsupported schema_version {version!r}")
    kind = doc.get("type")
    if kind == "vector_system":
        return VectorSystem.from_dict(doc)
    if kind == "projector_povm":
        return ProjectorPOVM.from_dict(doc)
    raise MalformedInputError(f"unknown document type {kind!r}")


def save(obj: VectorSystem | ProjectorPOVM, path: str | Path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def load(path: str | Path) -> VectorSystem | ProjectorPOVM:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise MalformedInputError(f"cannot read {path}: {exc}") from exc
    return loads(text)
