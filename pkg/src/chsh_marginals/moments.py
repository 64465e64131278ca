"""Four-spin distributions and their correlator (moment) representation.

A distribution over four +/-1 spins is stored as 16 probabilities in a fixed
lexicographic order with +1 before -1::

    index 0  -> (+1, +1, +1, +1)
    index 1  -> (+1, +1, +1, -1)
    ...
    index 15 -> (-1, -1, -1, -1)

The same distribution is equivalently described by its 15 correlators
``B_i = <s_i>``, ``C_ij = <s_i s_j>``, ``D_ijk = <s_i s_j s_k>`` and
``E = <s_1 s_2 s_3 s_4>`` through

    p(s) = (1 + sum B_i s_i + sum C_ij s_i s_j + sum D_ijk s_i s_j s_k
            + E s_1 s_2 s_3 s_4) / 16.

Both directions are exact 16-term signed sums (a Walsh-Hadamard transform).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConsistencyError, DomainError, ValidationError

NEG_TOL = 1e-12
NORM_TOL = 1e-12
CONSISTENCY_TOL = 1e-10

SIGNS = (1, -1)
PAIRS = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
TRIPLES = ((1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4))
CROSS_PAIRS = ((1, 3), (1, 4), (2, 3), (2, 4))

# Order of correlator subsets in the full 16-vector: the empty set (the
# constant 1), singles, pairs, triples, then the full product.
SUBSETS = ((),) + tuple((i,) for i in range(1, 5)) + PAIRS + TRIPLES + ((1, 2, 3, 4),)


class SpinConfig(NamedTuple):
    s1: int
    s2: int
    s3: int
    s4: int

    @property
    def index(self) -> int:
        return config_index(self)


CONFIGS = tuple(SpinConfig(*s) for s in itertools.product(SIGNS, repeat=4))
SPINS = np.array(CONFIGS, dtype=float)  # (16, 4)


def _character_matrix(spins, subsets):
    cols = [np.prod(spins[:, [i - 1 for i in sub]], axis=1) if sub else np.ones(len(spins))
            for sub in subsets]
    return np.stack(cols, axis=1)


# WALSH[k, m] = product of the spins in SUBSETS[m] evaluated at CONFIGS[k].
# Columns are orthogonal: WALSH.T @ WALSH = 16 * I.
WALSH = _character_matrix(SPINS, SUBSETS)


def config_index(s) -> int:
    """Position of a sign tuple in the fixed enumeration."""
    idx = 0
    for v in s:
        if v not in (1, -1):
            raise DomainError(f"spin value must be +1 or -1, got {v!r}")
        idx = 2 * idx + (v == -1)
    return idx


@dataclass(frozen=True)
class JointDist4:
    """Probabilities of the 16 sign configurations.

    Construction only checks the shape, so quasi-distributions (tables with
    negative entries, as returned by :func:`moments_to_joint`) are
    representable. Call :meth:`validate` before treating it as a probability.
    """

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float).reshape(-1)
        if p.shape != (16,):
            raise ValidationError(f"expected 16 probabilities, got shape {np.shape(self.p)}")
        if not np.all(np.isfinite(p)):
            raise ValidationError("probabilities must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def __getitem__(self, s) -> float:
        return float(self.p[config_index(s)])

    @property
    def min_entry(self) -> float:
        return float(self.p.min())

    @property
    def total(self) -> float:
        return float(self.p.sum())

    @property
    def is_valid(self) -> bool:
        return self.min_entry >= -NEG_TOL and abs(self.total - 1.0) <= NORM_TOL

    def validate(self, strict=False, neg_tol=NEG_TOL, norm_tol=NORM_TOL) -> "JointDist4":
        floor = 0.0 if strict else -neg_tol
        if self.min_entry < floor:
            raise ValidationError(f"negative probability {self.min_entry:.3e}")
        if abs(self.total - 1.0) > norm_tol:
            raise ValidationError(f"probabilities sum to {self.total!r}, not 1")
        return self

    def items(self):
        return zip(CONFIGS, self.p)


@dataclass(frozen=True)
class MomentVector:
    """Correlators of a four-spin distribution.

    ``C`` follows :data:`PAIRS` ordering (12, 13, 14, 23, 24, 34) and ``D``
    follows :data:`TRIPLES` (123, 124, 134, 234). ``E`` may be ``None`` when
    a producer cannot compute the four-spin correlator.
    """

    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    E: float | None = 0.0

    def __post_init__(self):
        for name, n in (("B", 4), ("C", 6), ("D", 4)):
            arr = np.array(getattr(self, name), dtype=float).reshape(-1)
            if arr.shape != (n,):
                raise DomainError(f"{name} needs {n} entries, got {arr.size}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.E is not None:
            object.__setattr__(self, "E", float(self.E))

    @classmethod
    def from_array(cls, m) -> "MomentVector":
        """Build from a 16-vector laid out like :data:`SUBSETS` (m[0] ignored)."""
        m = np.asarray(m, dtype=float)
        return cls(B=m[1:5], C=m[5:11], D=m[11:15], E=m[15])

    @classmethod
    def from_dict(cls, values: dict) -> "MomentVector":
        """Keys like ``"B1"``, ``"C13"``, ``"D234"``, ``"E"``; missing keys are 0."""
        B = [values.get(f"B{i}", 0.0) for i in range(1, 5)]
        C = [values.get("C%d%d" % ij, 0.0) for ij in PAIRS]
        D = [values.get("D%d%d%d" % ijk, 0.0) for ijk in TRIPLES]
        return cls(B=B, C=C, D=D, E=values.get("E", 0.0))

    def as_array(self) -> np.ndarray:
        if self.E is None:
            raise DomainError("four-spin correlator E is not set")
        return np.concatenate(([1.0], self.B, self.C, self.D, [self.E]))

    def pair(self, i, j) -> float:
        return float(self.C[PAIRS.index(tuple(sorted((i, j))))])

    def triple(self, i, j, k) -> float:
        return float(self.D[TRIPLES.index(tuple(sorted((i, j, k))))])

    @property
    def cross(self) -> np.ndarray:
        """The four fixed correlators (C13, C14, C23, C24)."""
        return self.C[[1, 2, 3, 4]]

    def in_range(self, tol=NEG_TOL) -> bool:
        vals = np.concatenate((self.B, self.C, self.D, [] if self.E is None else [self.E]))
        return bool(np.all(np.abs(vals) <= 1 + tol))


@dataclass(frozen=True)
class PairMarginals:
    """The four given tables p(s1,s3), p(s1,s4), p(s2,s3), p(s2,s4).

    Each table is 2x2 with row index the first spin (+ then -) and column
    index the second spin.
    """

    m13: np.ndarray
    m14: np.ndarray
    m23: np.ndarray
    m24: np.ndarray

    def __post_init__(self):
        for name in ("m13", "m14", "m23", "m24"):
            t = np.array(getattr(self, name), dtype=float)
            if t.shape != (2, 2):
                raise ValidationError(f"table {name[1:]} must be 2x2, got shape {t.shape}")
            t.setflags(write=False)
            object.__setattr__(self, name, t)

    def table(self, i, j) -> np.ndarray:
        return getattr(self, f"m{i}{j}")

    def tables(self) -> dict:
        return {(i, j): self.table(i, j) for i, j in CROSS_PAIRS}

    def validate(self, tol=NORM_TOL, consistency_tol=CONSISTENCY_TOL) -> "PairMarginals":
        for (i, j), t in self.tables().items():
            check_table(t, f"{i}{j}", tol)
        single_spin_marginals(self.tables(), consistency_tol)
        return self

    @classmethod
    def from_moments(cls, B, Cfixed) -> "PairMarginals":
        """Tables (1 + B_i s_i + B_j s_j + C_ij s_i s_j)/4 for the cross pairs."""
        B = np.asarray(B, dtype=float)
        tabs = [pair_table(B[i - 1], B[j - 1], c) for (i, j), c in zip(CROSS_PAIRS, Cfixed)]
        return cls(*tabs)

    @classmethod
    def from_joint(cls, d: JointDist4) -> "PairMarginals":
        return cls(*(marginalize_pair(d, ij) for ij in CROSS_PAIRS))


def check_table(t, label, tol=NORM_TOL):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValidationError(f"table {label}: entries must be finite")
    if t.min() < -tol:
        raise ValidationError(f"table {label}: negative entry {float(t.min()):.3e}")
    if abs(t.sum() - 1.0) > tol:
        raise ValidationError(f"table {label}: entries sum to {float(t.sum())!r}, not 1")


def pair_table(Bi, Bj, Cij) -> np.ndarray:
    s = np.array(SIGNS, dtype=float)
    return (1 + Bi * s[:, None] + Bj * s[None, :] + Cij * np.outer(s, s)) / 4


def _table_moments(t):
    # (B_first, B_second, C) from a 2x2 table
    t = np.asarray(t, dtype=float)
    return (float(t[0].sum() - t[1].sum()), float(t[:, 0].sum() - t[:, 1].sum()),
            float(t[0, 0] - t[0, 1] - t[1, 0] + t[1, 1]))


def single_spin_marginals(tables: dict, tol=CONSISTENCY_TOL) -> dict:
    """Average spin of every variable, checked across all tables mentioning it.

    ``tables`` maps index pairs ``(i, j)`` to 2x2 tables. Returns ``{i: B_i}``
    (the mean of the independent extractions) or raises
    :class:`ConsistencyError` when two extractions differ by more than ``tol``.
    """
    seen: dict[int, list[tuple[float, str]]] = {}
    for (i, j), t in tables.items():
        bi, bj, _ = _table_moments(t)
        seen.setdefault(i, []).append((bi, f"{i}{j}"))
        seen.setdefault(j, []).append((bj, f"{i}{j}"))
    out = {}
    for k, vals in sorted(seen.items()):
        ref, ref_label = vals[0]
        for v, label in vals[1:]:
            if abs(v - ref) > tol:
                raise ConsistencyError(
                    f"spin {k}: table {ref_label} gives <s{k}> = {ref!r} but table "
                    f"{label} gives {v!r}")
        out[k] = float(np.mean([v for v, _ in vals]))
    return out


def joint_to_moments(d: JointDist4, strict=False) -> MomentVector:
    """Correlators of a valid distribution via exact 16-term signed sums."""
    d = as_joint(d).validate(strict=strict)
    return MomentVector.from_array(WALSH.T @ d.p)


def moments_to_joint(m: MomentVector) -> JointDist4:
    """The 16-entry table built from a full moment vector.

    The result may contain negative entries; inspect ``min_entry`` /
    ``is_valid`` on the returned object.
    """
    if not m.in_range():
        raise DomainError("moment entries must lie in [-1, 1]")
    return JointDist4(WALSH @ m.as_array() / 16)


def marginalize_pair(d: JointDist4, pair) -> np.ndarray:
    """2x2 table of spins ``pair = (i, j)`` obtained by summing out the others."""
    i, j = _parse_pair(pair)
    p = as_joint(d).p.reshape(2, 2, 2, 2)
    others = tuple(k for k in range(4) if k not in (i - 1, j - 1))
    t = p.sum(axis=others)
    return t if i < j else t.T


def fixed_moments_from_marginals(pm: PairMarginals, consistency_tol=CONSISTENCY_TOL,
                                 norm_tol=NORM_TOL):
    """``(B, Cfixed)`` from four pair tables.

    ``B`` holds the four average spins, ``Cfixed`` the correlators
    (C13, C14, C23, C24).
    """
    pm.validate(tol=norm_tol, consistency_tol=consistency_tol)
    B = single_spin_marginals(pm.tables(), consistency_tol)
    Cfixed = np.array([_table_moments(pm.table(i, j))[2] for i, j in CROSS_PAIRS])
    return np.array([B[k] for k in range(1, 5)]), Cfixed


def as_joint(d) -> JointDist4:
    return d if isinstance(d, JointDist4) else JointDist4(d)


def _parse_pair(pair):
    if isinstance(pair, (str, int)):
        s = str(pair)
        if len(s) != 2:
            raise DomainError(f"bad pair index {pair!r}")
        pair = (int(s[0]), int(s[1]))
    i, j = pair
    if i == j or not {i, j} <= {1, 2, 3, 4}:
        raise DomainError(f"bad pair index {pair!r}")
    return i, j
