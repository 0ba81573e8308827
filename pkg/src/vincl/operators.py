"""Operator algebra for the inclusion problem.

The problem datum is: find u (and selections v in S(u), w in T(u)) with

    omega  in  F(v, w) + M(f(u), g(u)),

where A, B, C, D, f, g are single-valued maps, H is a four-slot bifunction
evaluated on (Ax, Bx, Cx, Dx), F is a two-argument map, M couples the two
composed slots f(u), g(u), and S, T are set-valued maps with finite value
sets.  All the worked instances are affine; affine realizations are stored
explicitly so that certification and the resolvent can use exact matrix
analysis, with black-box callables as the general fallback.
"""

import json
import os
from dataclasses import dataclass, field, fields, replace

import numpy as np
from scipy.spatial.distance import cdist

from .space import SpaceConfig, DimensionMismatchError, as_vector


class EmptySetError(ValueError):
    """A set-valued map produced (or was given) an empty value set."""


# ---------------------------------------------------------------------------
# Single-valued maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AffineMap:
    """x -> matrix @ x + offset, with the parts exposed for exact analysis."""

    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"matrix must be square, got shape {m.shape}")
        o = as_vector(self.offset)
        if o.shape[0] != m.shape[0]:
            raise DimensionMismatchError(m.shape[0], o.shape[0], "affine map")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "offset", o)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, x) -> np.ndarray:
        xv = as_vector(x)
        if xv.shape[0] != self.dim:
            raise DimensionMismatchError(self.dim, xv.shape[0], "affine map eval")
        return self.matrix @ xv + self.offset

    @classmethod
    def linear(cls, matrix) -> "AffineMap":
        m = np.asarray(matrix, dtype=float)
        return cls(m, np.zeros(m.shape[0]))

    @classmethod
    def identity(cls, dim: int) -> "AffineMap":
        return cls.linear(np.eye(dim))

    @classmethod
    def zero(cls, dim: int) -> "AffineMap":
        return cls.linear(np.zeros((dim, dim)))

    @classmethod
    def scaling(cls, c: float, dim: int) -> "AffineMap":
        return cls.linear(c * np.eye(dim))


def affine_parts(m):
    """Return (matrix, offset) when `m` has an exact affine realization."""
    if isinstance(m, AffineMap):
        return m.matrix, m.offset
    return None


def negate_map(m):
    """The map x -> -m(x), keeping the affine realization when present."""
    parts = affine_parts(m)
    if parts is not None:
        return AffineMap(-parts[0], -parts[1])
    return lambda x: -m(x)


def sum_map(maps, dim: int):
    """Pointwise sum of single-valued maps; affine when all parts are."""
    parts = [affine_parts(m) for m in maps]
    if all(p is not None for p in parts):
        mat = sum(p[0] for p in parts) if parts else np.zeros((dim, dim))
        off = sum(p[1] for p in parts) if parts else np.zeros(dim)
        return AffineMap(mat, off)
    return lambda x: sum(m(x) for m in maps)


# ---------------------------------------------------------------------------
# Four-slot bifunction H, pair map F, coupling M, set-valued S/T
# ---------------------------------------------------------------------------

class AdditiveBiSlot:
    """H((a, b), (c, d)) = a + b + c + d, the additive slot combination."""

    additive = True

    def __call__(self, a, b, c, d) -> np.ndarray:
        return as_vector(a) + as_vector(b) + as_vector(c) + as_vector(d)

    def __repr__(self):
        return "AdditiveBiSlot()"


def is_additive(h) -> bool:
    return bool(getattr(h, "additive", False))


@dataclass(frozen=True, eq=False)
class AffinePairMap:
    """F(x, y) = first @ x + second @ y + offset."""

    first: np.ndarray
    second: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.first, dtype=float)
        q = np.asarray(self.second, dtype=float)
        o = as_vector(self.offset)
        if p.shape != q.shape or p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError(f"pair-map matrices must be square and congruent, "
                             f"got {p.shape} and {q.shape}")
        if o.shape[0] != p.shape[0]:
            raise DimensionMismatchError(p.shape[0], o.shape[0], "pair map")
        object.__setattr__(self, "first", p)
        object.__setattr__(self, "second", q)
        object.__setattr__(self, "offset", o)

    @property
    def dim(self) -> int:
        return self.first.shape[0]

    def __call__(self, x, y) -> np.ndarray:
        return self.first @ as_vector(x) + self.second @ as_vector(y) + self.offset


def pair_affine_parts(f):
    """Return (first, second, offset) when F is exactly affine."""
    if isinstance(f, AffinePairMap):
        return f.first, f.second, f.offset
    return None


class DifferenceCoupling:
    """M(fu, gu) = {fu - gu}: single-valued difference of the two slots."""

    f_minus_g = True

    def __call__(self, fu, gu):
        return (as_vector(fu) - as_vector(gu),)

    def __repr__(self):
        return "DifferenceCoupling()"


def is_difference_coupling(m) -> bool:
    return bool(getattr(m, "f_minus_g", False))


class IdentitySetMap:
    """S(x) = {x}."""

    def __call__(self, x):
        return (as_vector(x),)

    def __repr__(self):
        return "IdentitySetMap()"


@dataclass(frozen=True, eq=False)
class SingletonSetMap:
    """S(x) = {m(x)} for a single-valued map m."""

    map: object

    def __call__(self, x):
        return (as_vector(self.map(x)),)


@dataclass(frozen=True, eq=False)
class ConstantSetMap:
    """S(x) = a fixed finite point set, independent of x."""

    points: tuple

    def __post_init__(self):
        pts = tuple(as_vector(p) for p in self.points)
        if not pts:
            raise EmptySetError("constant set map needs at least one point")
        object.__setattr__(self, "points", pts)

    def __call__(self, x):
        return self.points


@dataclass(frozen=True, eq=False)
class NearestNodeSetMap:
    """Piecewise-constant set map: the point set attached to the nearest node.

    Realizes the instance-file convention of explicit point lists per grid
    node.  Ties go to the lowest node index.
    """

    nodes: np.ndarray                 # (k, dim)
    point_sets: tuple                 # k entries, each a (m_i, dim) array

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        sets_ = tuple(np.atleast_2d(np.asarray(s, dtype=float))
                      for s in self.point_sets)
        if nodes.shape[0] != len(sets_):
            raise ValueError("one point set per node required")
        if any(s.shape[0] == 0 for s in sets_):
            raise EmptySetError("every grid node needs a nonempty point set")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "point_sets", sets_)

    def __call__(self, x):
        xv = as_vector(x)
        d = np.linalg.norm(self.nodes - xv[None, :], axis=1)
        idx = int(np.argmin(d))
        return tuple(row for row in self.point_sets[idx])


def set_values(set_map, x):
    """Evaluate a set-valued map and validate the finite value set."""
    vals = tuple(as_vector(p) for p in set_map(x))
    if not vals:
        raise EmptySetError(f"set-valued map returned an empty set at {x}")
    return vals


# ---------------------------------------------------------------------------
# Declared property constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constants:
    """Named operator-property constants attached to an instance.

    mu1, gamma1   strong mixed cocoercivity of H through the (A, C) slots
    mu2, gamma2   relaxed mixed cocoercivity of H through the (B, D) slots
    alpha, beta   strong / relaxed accretivity of M through f / g
    alpha1        expansiveness of A
    beta1         Lipschitz constant of B
    tau           mixed Lipschitz constant of the composed H
    sigma, delta  strong accretivity of F (first / second argument)
    eps1, eps2    Lipschitz constants of F (first / second argument)
    l1, l2        set-distance Lipschitz constants of S / T
    """

    mu1: float | None = None
    gamma1: float | None = None
    mu2: float | None = None
    gamma2: float | None = None
    alpha: float | None = None
    beta: float | None = None
    alpha1: float | None = None
    beta1: float | None = None
    tau: float | None = None
    sigma: float | None = None
    delta: float | None = None
    eps1: float | None = None
    eps2: float | None = None
    l1: float | None = None
    l2: float | None = None

    def asdict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def require(self, *names) -> dict:
        """Return the named constants, raising if any are missing."""
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise MissingConstantsError(missing)
        return {n: getattr(self, n) for n in names}


class MissingConstantsError(ValueError):
    """An operation needed declared constants that the instance lacks."""

    def __init__(self, names):
        super().__init__(f"missing declared constants: {', '.join(names)}")
        self.names = tuple(names)


def ordering_flags(c: Constants) -> list:
    """Violations of the resolvent-theorem hypotheses on the constants.

    Checks alpha > beta, mu1 > mu2, alpha1 > beta1, gamma1, gamma2 > 0,
    and positivity of every other declared constant, on whichever
    constants are declared.  Violations are reported, not fatal:
    certification surfaces them.
    """
    flags = []
    pairs = [("alpha", "beta"), ("mu1", "mu2"), ("alpha1", "beta1")]
    for hi, lo in pairs:
        a, b = getattr(c, hi), getattr(c, lo)
        if a is not None and b is not None and not a > b:
            flags.append(f"{hi} <= {lo} ({a} <= {b})")
    for f in fields(c):
        v = getattr(c, f.name)
        if v is not None and not v > 0:
            flags.append(f"{f.name} <= 0 ({v})")
    return flags


# ---------------------------------------------------------------------------
# The full problem datum
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class InclusionInstance:
    """Everything needed to state and solve one inclusion problem."""

    space: SpaceConfig
    A: object
    B: object
    C: object
    D: object
    f: object
    g: object
    H: object
    F: object
    M: object
    S: object
    T: object
    omega: np.ndarray
    rho: float
    constants: Constants = field(default_factory=Constants)

    def __post_init__(self):
        om = as_vector(self.omega)
        if om.shape[0] != self.space.dim:
            raise DimensionMismatchError(self.space.dim, om.shape[0], "omega")
        if not self.rho > 0:
            raise ValueError(f"rho must be > 0, got {self.rho}")
        object.__setattr__(self, "omega", om)

    @property
    def dim(self) -> int:
        return self.space.dim

    def with_(self, **kwargs) -> "InclusionInstance":
        return replace(self, **kwargs)


def eval_H_on_point(inst: InclusionInstance, x) -> np.ndarray:
    """Evaluate the composed bifunction H((A(x), B(x)), (C(x), D(x)))."""
    xv = as_vector(x)
    if xv.shape[0] != inst.dim:
        raise DimensionMismatchError(inst.dim, xv.shape[0], "eval_H_on_point")
    return as_vector(inst.H(inst.A(xv), inst.B(xv), inst.C(xv), inst.D(xv)))


def h_composite(inst: InclusionInstance):
    """Affine realization of x -> H((Ax, Bx), (Cx, Dx)), or None.

    Exact only when H is the additive slot combination and all four slot
    maps are affine.
    """
    if not is_additive(inst.H):
        return None
    parts = [affine_parts(m) for m in (inst.A, inst.B, inst.C, inst.D)]
    if any(p is None for p in parts):
        return None
    return AffineMap(sum(p[0] for p in parts), sum(p[1] for p in parts))


def m_composite(inst: InclusionInstance):
    """Affine realization of x -> the element of M(f(x), g(x)), or None."""
    if not is_difference_coupling(inst.M):
        return None
    fp, gp = affine_parts(inst.f), affine_parts(inst.g)
    if fp is None or gp is None:
        return None
    return AffineMap(fp[0] - gp[0], fp[1] - gp[1])


def eval_M_on_point(inst: InclusionInstance, x):
    """The finite value set M(f(x), g(x))."""
    xv = as_vector(x)
    vals = inst.M(inst.f(xv), inst.g(xv))
    out = tuple(as_vector(v) for v in vals)
    if not out:
        raise EmptySetError(f"M(f(x), g(x)) empty at x={xv}")
    return out


# ---------------------------------------------------------------------------
# Hausdorff distance and the inclusion residual
# ---------------------------------------------------------------------------

def hausdorff_distance(set_a, set_b) -> float:
    """Hausdorff distance between two nonempty finite point sets.

    max( max_a min_b ||a-b||, max_b min_a ||a-b|| ); exact for finite sets.
    """
    pts_a = [as_vector(p) for p in set_a]
    pts_b = [as_vector(p) for p in set_b]
    if not pts_a or not pts_b:
        raise EmptySetError("hausdorff_distance needs nonempty sets")
    a = np.asarray(pts_a, dtype=float)
    b = np.asarray(pts_b, dtype=float)
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatchError(a.shape[1], b.shape[1], "hausdorff_distance")
    dm = cdist(a, b)
    return float(max(dm.min(axis=1).max(), dm.min(axis=0).max()))


def _distance_to_set(point, point_set) -> float:
    pts = np.atleast_2d(np.asarray(point_set, dtype=float))
    return float(np.min(np.linalg.norm(pts - np.asarray(point)[None, :], axis=1)))


@dataclass(frozen=True)
class ResidualReport:
    """Inclusion residual plus selection-membership diagnostics.

    value
        min over m in M(f(u), g(u)) of ||omega - F(v, w) - m||.
    v_defect, w_defect
        Distances of v to S(u) and w to T(u); nonzero values flag that the
        supplied selections are off the set-valued images.
    """

    value: float
    v_defect: float
    w_defect: float

    @property
    def memberships_ok(self) -> bool:
        return self.v_defect <= 1e-9 and self.w_defect <= 1e-9

    def __float__(self):
        return self.value


def inclusion_residual(inst: InclusionInstance, u, v, w) -> ResidualReport:
    """How far (u, v, w) is from solving omega in F(v, w) + M(f(u), g(u)).

    Membership of v in S(u) and w in T(u) is measured, not enforced:
    violations are reported in the result, and the residual value is
    computed regardless.
    """
    uv, vv, wv = as_vector(u), as_vector(v), as_vector(w)
    m_vals = eval_M_on_point(inst, uv)
    target = inst.omega - as_vector(inst.F(vv, wv))
    value = min(float(np.linalg.norm(target - m)) for m in m_vals)
    v_defect = _distance_to_set(vv, set_values(inst.S, uv))
    w_defect = _distance_to_set(wv, set_values(inst.T, uv))
    return ResidualReport(value=value, v_defect=v_defect, w_defect=w_defect)


# ---------------------------------------------------------------------------
# Instance file format
# ---------------------------------------------------------------------------

def _map_to_dict(m, name):
    parts = affine_parts(m)
    if parts is None:
        raise ValueError(f"map {name!r} has no affine realization; "
                         "only affine instances serialize")
    return {"matrix": parts[0].tolist(), "offset": parts[1].tolist()}


def _map_from_dict(d):
    return AffineMap(np.asarray(d["matrix"], dtype=float),
                     np.asarray(d["offset"], dtype=float))


def _set_map_to_obj(s, name):
    if isinstance(s, IdentitySetMap):
        return "identity"
    if isinstance(s, NearestNodeSetMap):
        return {"nodes": s.nodes.tolist(),
                "points": [ps.tolist() for ps in s.point_sets]}
    if isinstance(s, SingletonSetMap):
        return {"map": _map_to_dict(s.map, name)}
    raise ValueError(f"set-valued map {name!r} does not serialize")


def _set_map_from_obj(obj, name):
    if obj == "identity":
        return IdentitySetMap()
    if isinstance(obj, dict) and "nodes" in obj:
        return NearestNodeSetMap(np.asarray(obj["nodes"], dtype=float),
                                 tuple(np.asarray(p, dtype=float)
                                       for p in obj["points"]))
    if isinstance(obj, dict) and "map" in obj:
        return SingletonSetMap(_map_from_dict(obj["map"]))
    raise ValueError(f"unrecognized set-valued map spec for {name!r}: {obj!r}")


def instance_to_dict(inst: InclusionInstance) -> dict:
    """Serialize an affine instance to the documented JSON structure."""
    if not is_additive(inst.H):
        raise ValueError("only the additive H mode serializes")
    if not is_difference_coupling(inst.M):
        raise ValueError("only the f-minus-g M mode serializes")
    fp = pair_affine_parts(inst.F)
    if fp is None:
        raise ValueError("F has no affine realization; cannot serialize")
    consts = {k: v for k, v in inst.constants.asdict().items() if v is not None}
    return {
        "dim": inst.dim,
        "q": inst.space.q,
        "c_q": inst.space.c_q,
        "rho": inst.rho,
        "omega": inst.omega.tolist(),
        "A": _map_to_dict(inst.A, "A"),
        "B": _map_to_dict(inst.B, "B"),
        "C": _map_to_dict(inst.C, "C"),
        "D": _map_to_dict(inst.D, "D"),
        "f": _map_to_dict(inst.f, "f"),
        "g": _map_to_dict(inst.g, "g"),
        "H": "additive",
        "M": "f-minus-g",
        "F": {"first": fp[0].tolist(), "second": fp[1].tolist(),
              "offset": fp[2].tolist()},
        "S": _set_map_to_obj(inst.S, "S"),
        "T": _set_map_to_obj(inst.T, "T"),
        "constants": consts,
    }


def instance_from_dict(d: dict) -> InclusionInstance:
    """Parse the instance JSON structure.

    Raises KeyError / ValueError with the offending field named, so the
    CLI can surface parse diagnostics.
    """
    if d.get("H", "additive") != "additive":
        raise ValueError(f"unsupported H mode: {d.get('H')!r}")
    if d.get("M", "f-minus-g") != "f-minus-g":
        raise ValueError(f"unsupported M mode: {d.get('M')!r}")
    space = SpaceConfig(dim=int(d["dim"]), q=float(d.get("q", 2.0)),
                        c_q=float(d.get("c_q", 1.0)))
    fobj = d["F"]
    F = AffinePairMap(np.asarray(fobj["first"], dtype=float),
                      np.asarray(fobj["second"], dtype=float),
                      np.asarray(fobj.get("offset", np.zeros(space.dim)),
                                 dtype=float))
    consts = Constants(**{k: float(v) for k, v in d.get("constants", {}).items()})
    return InclusionInstance(
        space=space,
        A=_map_from_dict(d["A"]), B=_map_from_dict(d["B"]),
        C=_map_from_dict(d["C"]), D=_map_from_dict(d["D"]),
        f=_map_from_dict(d["f"]), g=_map_from_dict(d["g"]),
        H=AdditiveBiSlot(), F=F, M=DifferenceCoupling(),
        S=_set_map_from_obj(d.get("S", "identity"), "S"),
        T=_set_map_from_obj(d.get("T", "identity"), "T"),
        omega=np.asarray(d.get("omega", np.zeros(space.dim)), dtype=float),
        rho=float(d["rho"]),
        constants=consts,
    )


def load_instance(path: str) -> InclusionInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def dump_instance(inst: InclusionInstance, path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(inst), fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)
