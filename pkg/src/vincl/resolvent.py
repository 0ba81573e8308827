"""The proximal-point mapping R(z) = (H((A,B),(C,D)) + rho*M(f,g))^(-1)(z).

For affine instances the composite is a dense linear system solved
directly; black-box operators fall back to a damped fixed-point iteration.
`audit_lipschitz` checks the theoretical contraction bound

    ||R(u) - R(v)|| <= ||u - v|| / (r + rho*m),
    r = mu1*alpha1^q - mu2*beta1^q + gamma1 + gamma2,   m = alpha - beta,

against the worst observed quotient over a seeded sample.
"""

import json
from dataclasses import dataclass

import numpy as np

from .operators import (
    InclusionInstance,
    eval_H_on_point,
    eval_M_on_point,
    h_composite,
    m_composite,
)
from .space import as_vector

_COND_LIMIT = 1e12
_DET_FLOOR = 1e-12


class NonSurjectiveError(RuntimeError):
    """The composite H + rho*M cannot reach the requested point.

    Carries a `defect` dict describing the failure (zero or singular
    linear part, the constant image point when there is one).
    """

    def __init__(self, message: str, defect: dict | None = None):
        super().__init__(message)
        self.defect = defect or {}


class ResolventIterationError(RuntimeError):
    """The damped fixed-point solver did not reach the inner tolerance."""

    def __init__(self, message: str, last_residual: float):
        super().__init__(message)
        self.last_residual = last_residual


@dataclass(frozen=True)
class ResolventConfig:
    """How to invert the composite.

    solver
        "exact_affine" forces the dense solve, "damped_fixed_point" the
        iterative fallback, "auto" picks the exact path when the instance
        is affine.
    """

    rho: float
    solver: str = "auto"
    max_inner_iters: int = 20000
    inner_tol: float = 1e-12

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"rho must be > 0, got {self.rho}")
        if not self.inner_tol > 0:
            raise ValueError(f"inner_tol must be > 0, got {self.inner_tol}")
        if self.solver not in ("auto", "exact_affine", "damped_fixed_point"):
            raise ValueError(f"unknown solver {self.solver!r}")


def forward(inst: InclusionInstance, x, rho: float | None = None) -> np.ndarray:
    """Forward image H((Ax,Bx),(Cx,Dx)) + rho * m(x), m(x) in M(f(x), g(x)).

    With a multi-point M the member closest to the H value's scale is not
    well-defined; the first member is used, which is exact for every
    single-valued coupling.
    """
    rho = inst.rho if rho is None else rho
    hx = eval_H_on_point(inst, x)
    m_vals = eval_M_on_point(inst, x)
    return hx + rho * m_vals[0]


def _composite_parts(inst: InclusionInstance, rho: float):
    hc, mc = h_composite(inst), m_composite(inst)
    if hc is None or mc is None:
        return None
    return hc.matrix + rho * mc.matrix, hc.offset + rho * mc.offset


def _singularity_defect(matrix: np.ndarray, offset: np.ndarray, rho: float):
    nrm = float(np.linalg.norm(matrix, 2))
    det = float(np.linalg.det(matrix))
    cond = float(np.linalg.cond(matrix)) if nrm > 0 else np.inf
    dim = matrix.shape[0]
    if nrm > 0 and cond <= _COND_LIMIT and abs(det) > _DET_FLOOR * nrm ** dim:
        return None
    if nrm <= 1e-12:
        return {"rho": rho,
                "kind": "zero linear part",
                "description": "the composite image is the single point "
                               f"{offset.tolist()}",
                "image_point": offset.tolist(),
                "image_norm": float(np.linalg.norm(offset))}
    null = np.linalg.svd(matrix)[2][-1]
    return {"rho": rho,
            "kind": "singular linear part",
            "description": "the composite image is a proper affine subspace",
            "null_direction": null.tolist(),
            "cond": None if np.isinf(cond) else cond,
            "det": det}


def resolve(inst: InclusionInstance, cfg: ResolventConfig, z) -> np.ndarray:
    """Solve H((Ax,Bx),(Cx,Dx)) + rho * m(x) = z for x.

    Raises
    ------
    NonSurjectiveError
        If the affine composite is (numerically) singular, so z may lie
        outside the range.
    ResolventIterationError
        If the damped fixed-point fallback stalls above `inner_tol`.
    """
    zv = as_vector(z)
    parts = _composite_parts(inst, cfg.rho)
    if parts is not None and cfg.solver in ("auto", "exact_affine"):
        matrix, offset = parts
        defect = _singularity_defect(matrix, offset, cfg.rho)
        if defect is not None:
            raise NonSurjectiveError(
                f"composite H + rho*M is not invertible at rho={cfg.rho}: "
                f"{defect['description']}", defect)
        return np.linalg.solve(matrix, zv - offset)
    if parts is None and cfg.solver == "exact_affine":
        raise ValueError("exact_affine solver requires affine realizations "
                         "of H, A..D, f, g and the difference coupling")
    return _resolve_damped(inst, cfg, zv)


def _damping(inst: InclusionInstance, rho: float) -> float:
    tau = inst.constants.tau
    mc = m_composite(inst)
    if tau is not None and mc is not None:
        lip_m = float(np.linalg.norm(mc.matrix, 2))
        return 1.0 / (tau + rho * lip_m)
    return 0.1


def _resolve_damped(inst: InclusionInstance, cfg: ResolventConfig,
                    z: np.ndarray) -> np.ndarray:
    lam = _damping(inst, cfg.rho)
    x = np.array(z, dtype=float)
    last = np.inf
    for _ in range(cfg.max_inner_iters):
        hx = eval_H_on_point(inst, x)
        m_vals = eval_M_on_point(inst, x)
        # target the selection that minimizes the current residual
        residuals = [hx + cfg.rho * m - z for m in m_vals]
        norms = [float(np.linalg.norm(r)) for r in residuals]
        k = int(np.argmin(norms))
        last = norms[k]
        if last <= cfg.inner_tol:
            return x
        x = x - lam * residuals[k]
        if not np.all(np.isfinite(x)):
            raise ResolventIterationError(
                "damped fixed-point iteration diverged to non-finite values",
                last)
    raise ResolventIterationError(
        f"damped fixed-point iteration exceeded {cfg.max_inner_iters} "
        f"iterations (last residual {last:.3e} > {cfg.inner_tol:.3e})", last)


def theoretical_r_m(inst: InclusionInstance):
    """(r, m) of the contraction bound, from the declared constants."""
    c = inst.constants
    got = c.require("mu1", "mu2", "gamma1", "gamma2", "alpha1", "beta1",
                    "alpha", "beta")
    q = inst.space.q
    r = (got["mu1"] * got["alpha1"] ** q - got["mu2"] * got["beta1"] ** q
         + got["gamma1"] + got["gamma2"])
    m = got["alpha"] - got["beta"]
    return float(r), float(m)


@dataclass(frozen=True)
class AuditReport:
    """Observed resolvent contraction versus the theoretical bound."""

    rho: float
    r: float
    m: float
    bound: float
    worst_ratio: float
    worst_pair: dict | None
    n_pairs: int
    passed: bool

    def to_dict(self) -> dict:
        return {
            "rho": self.rho, "r": self.r, "m": self.m, "bound": self.bound,
            "worst_ratio": self.worst_ratio, "worst_pair": self.worst_pair,
            "n_pairs": self.n_pairs, "passed": self.passed,
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)


def audit_lipschitz(inst: InclusionInstance, cfg: ResolventConfig,
                    plan=None) -> AuditReport:
    """Check ||R(u)-R(v)|| <= ||u-v|| / (r + rho*m) over sampled pairs.

    Pairs with u = v are skipped (the quotient is vacuous there).
    """
    from .certify import SamplePlan
    plan = plan or SamplePlan()
    r, m = theoretical_r_m(inst)
    bound = 1.0 / (r + cfg.rho * m)
    worst, worst_pair, n_used = -np.inf, None, 0
    for u, v in plan.pairs(inst.dim):
        du = np.linalg.norm(np.asarray(u) - np.asarray(v))
        if du < 1e-12:
            continue
        ru = resolve(inst, cfg, u)
        rv = resolve(inst, cfg, v)
        ratio = float(np.linalg.norm(ru - rv) / du)
        n_used += 1
        if ratio > worst:
            worst = ratio
            worst_pair = {"u": np.asarray(u).tolist(),
                          "v": np.asarray(v).tolist(), "ratio": ratio}
    passed = bool(worst <= bound + 1e-9)
    return AuditReport(rho=cfg.rho, r=r, m=m, bound=float(bound),
                       worst_ratio=float(worst), worst_pair=worst_pair,
                       n_pairs=n_used, passed=passed)
