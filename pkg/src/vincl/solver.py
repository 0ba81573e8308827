"""The proximal-point iteration for the inclusion problem.

One step of the scheme, from the current z:

    u_n = R(z_n)                      (resolvent of H + rho*M)
    v_n = nearest point of S(u_n) to v_(n-1)
    w_n = nearest point of T(u_n) to w_(n-1)
    z_(n+1) = H((Au_n, Bu_n), (Cu_n, Du_n)) - rho*F(v_n, w_n)
              + rho*omega + e_n

with an error term e_n -> 0 whose increments are geometrically summable.
The per-step contraction factor predicted by the theory is

    theta_n = (1/(r + rho*m)) * (tau^q + c_q*rho^q*(eps1*l1*k + eps2*l2*k)^q
              - rho*q*(sigma + delta)*tau^q)^(1/q),     k = 1 + 1/n,

with theta its n -> infinity limit.  `theta` evaluates this formula with
the instance's declared constants exactly as written.  Note the declared
sigma, delta of the worked instances are normalized against ||x-y||^q
while the contraction derivation consumes constants normalized against
the H increment; `contraction_factor_bound` applies that renormalization
(sigma/tau^q, delta/tau^q) and is the bound observed step ratios actually
respect.  Both values are reported wherever rates are summarized.
"""

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .operators import (
    InclusionInstance,
    eval_H_on_point,
    inclusion_residual,
    set_values,
)
from .resolvent import ResolventConfig, resolve, theoretical_r_m
from .space import as_vector

TRACE_SCHEMA = "vincl.trace.v1"


class DivergenceError(RuntimeError):
    """Sustained step growth; the partial trace is attached."""

    def __init__(self, message: str, trace):
        super().__init__(message)
        self.trace = trace


# ---------------------------------------------------------------------------
# Error sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeometricErrors:
    """e_n = c0 * factor^n * direction, factor in (0, 1).

    Increment sums satisfy sum_j ||e_j - e_(j-1)|| * varpi^(-j) < infinity
    for every varpi in (factor, 1); the recorded varpi is (1 + factor)/2.
    """

    c0: float
    factor: float
    direction: np.ndarray

    def __post_init__(self):
        if not 0.0 < self.factor < 1.0:
            raise ValueError(f"factor must be in (0, 1), got {self.factor}")
        object.__setattr__(self, "direction", as_vector(self.direction))

    @property
    def varpi(self) -> float:
        return 0.5 * (1.0 + self.factor)

    def term(self, n: int) -> np.ndarray:
        return self.c0 * self.factor ** n * self.direction


# ---------------------------------------------------------------------------
# theta and the two-sided rate condition
# ---------------------------------------------------------------------------

def _theta_terms(inst: InclusionInstance, rho: float, n: int | None,
                 sigma: float, delta: float) -> dict:
    c = inst.constants
    got = c.require("tau", "eps1", "eps2", "l1", "l2")
    q, c_q = inst.space.q, inst.space.c_q
    k = 1.0 + 1.0 / n if n is not None else 1.0
    tau_term = got["tau"] ** q
    err_term = c_q * rho ** q * (got["eps1"] * got["l1"] * k
                                 + got["eps2"] * got["l2"] * k) ** q
    coupling_term = rho * q * (sigma + delta) * got["tau"] ** q
    return {"tau_term": tau_term, "error_term": err_term,
            "coupling_term": coupling_term,
            "radicand": tau_term + err_term - coupling_term}


def theta(inst: InclusionInstance, rho: float | None = None,
          n: int | None = None) -> float:
    """Contraction factor formula with the declared constants as written.

    theta_n when `n` is given, the limit theta otherwise.  Raises
    ValueError when the radicand is negative (the condition is broken).
    """
    rho = inst.rho if rho is None else rho
    got = inst.constants.require("sigma", "delta")
    terms = _theta_terms(inst, rho, n, got["sigma"], got["delta"])
    if terms["radicand"] < 0:
        raise ValueError(f"negative radicand {terms['radicand']:.6g}: the "
                         "rate formula is undefined at this rho")
    r, m = theoretical_r_m(inst)
    return float(terms["radicand"] ** (1.0 / inst.space.q) / (r + rho * m))


def contraction_factor_bound(inst: InclusionInstance,
                             rho: float | None = None,
                             n: int | None = None) -> float | None:
    """theta with sigma, delta renormalized to the H-increment scale.

    Declared displacement-normalized constants are divided by tau^q before
    entering the coupling term, which is the normalization the step-bound
    derivation consumes.  This is the bound observed ratios satisfy.
    Returns None when the renormalized radicand is negative.
    """
    rho = inst.rho if rho is None else rho
    got = inst.constants.require("sigma", "delta", "tau")
    q = inst.space.q
    # (sigma/tau^q + delta/tau^q) * tau^q = sigma + delta: the tau^q of the
    # coupling term cancels against the renormalization.
    terms = _theta_terms(inst, rho, n, got["sigma"], got["delta"])
    radicand = (terms["tau_term"] + terms["error_term"]
                - rho * q * (got["sigma"] + got["delta"]))
    if radicand < 0:
        return None
    r, m = theoretical_r_m(inst)
    return float(radicand ** (1.0 / q) / (r + rho * m))


@dataclass(frozen=True)
class ConditionReport:
    """Breakdown of the two-sided rate condition

    0 < (tau^q + c_q*rho^q*(eps1*l1 + eps2*l2)^q
         - rho*q*(sigma+delta)*tau^q)^(1/q) < r + rho*m.
    """

    rho: float
    q: float
    c_q: float
    radicand: float
    root: float | None
    r: float
    m: float
    r_plus_rho_m: float
    theta: float | None
    theta_rate_bound: float | None
    terms: dict
    verdict: str   # satisfied | violated_radicand | violated_lower | violated_upper

    @property
    def satisfied(self) -> bool:
        return self.verdict == "satisfied"

    def to_dict(self) -> dict:
        return {
            "rho": self.rho, "q": self.q, "c_q": self.c_q,
            "radicand": self.radicand, "root": self.root,
            "r": self.r, "m": self.m, "r_plus_rho_m": self.r_plus_rho_m,
            "theta": self.theta, "theta_rate_bound": self.theta_rate_bound,
            "terms": self.terms, "verdict": self.verdict,
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)


def check_condition_vi(inst: InclusionInstance,
                       rho: float | None = None) -> ConditionReport:
    """Evaluate the rate condition with the declared constants.

    Verdicts: "violated_radicand" (negative radicand), "violated_lower"
    (root not strictly positive), "violated_upper" (root >= r + rho*m),
    else "satisfied".  Missing constants raise MissingConstantsError
    naming them.
    """
    rho = inst.rho if rho is None else rho
    got = inst.constants.require("sigma", "delta")
    r, m = theoretical_r_m(inst)
    terms = _theta_terms(inst, rho, None, got["sigma"], got["delta"])
    rad = terms["radicand"]
    denom = r + rho * m
    rate_bound = contraction_factor_bound(inst, rho)
    if rad < 0:
        return ConditionReport(rho, inst.space.q, inst.space.c_q, rad, None,
                               r, m, denom, None, rate_bound, terms,
                               "violated_radicand")
    root = rad ** (1.0 / inst.space.q)
    th = root / denom
    if root <= 0.0:
        verdict = "violated_lower"
    elif root >= denom:
        verdict = "violated_upper"
    else:
        verdict = "satisfied"
    return ConditionReport(rho, inst.space.q, inst.space.c_q, rad,
                           float(root), r, m, float(denom), float(th),
                           rate_bound, terms, verdict)


# ---------------------------------------------------------------------------
# Selections
# ---------------------------------------------------------------------------

def nadler_select(current, target_set) -> np.ndarray:
    """Nearest point of `target_set` to `current`, ties to the lowest index.

    For current in the previous image set, the selected point moves by at
    most the Hausdorff distance between the consecutive image sets, which
    is within the (1 + 1/(n+1)) selection slack the scheme allows.
    """
    cur = as_vector(current)
    pts = [as_vector(p) for p in target_set]
    if not pts:
        from .operators import EmptySetError
        raise EmptySetError("nadler_select: empty target set")
    dists = [float(np.linalg.norm(p - cur)) for p in pts]
    return pts[int(np.argmin(dists))]


# ---------------------------------------------------------------------------
# Solve trace
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IterationRecord:
    n: int
    z: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    step: float | None
    ratio: float | None
    residual: float
    theta_n: float | None
    error_norm: float


@dataclass
class SolveTrace:
    """Per-iteration records plus convergence summary."""

    records: list = field(default_factory=list)
    converged: bool = False
    rho: float = 0.0
    tol: float = 0.0
    final_residual: float = math.inf
    residual_bound: float = math.inf
    observed_rate: float | None = None
    theta_declared: float | None = None
    theta_rate_bound: float | None = None
    varpi: float | None = None
    message: str = ""

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def u_final(self) -> np.ndarray:
        return self.records[-1].u

    @property
    def steps(self) -> list:
        return [r.step for r in self.records if r.step is not None]

    @property
    def ratios(self) -> list:
        return [r.ratio for r in self.records if r.ratio is not None]

    def summary_dict(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "rho": self.rho,
            "tol": self.tol,
            "final_residual": self.final_residual,
            "residual_bound": self.residual_bound,
            "observed_rate": self.observed_rate,
            "theta_declared": self.theta_declared,
            "theta_rate_bound": self.theta_rate_bound,
            "varpi": self.varpi,
            "u": self.records[-1].u.tolist() if self.records else None,
            "message": self.message,
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)
        kwargs.setdefault("indent", 2)
        return json.dumps(self.summary_dict(), **kwargs)

    def to_csv(self, path: str | None = None) -> str:
        """Versioned CSV: schema, n, step, ratio, residual, theta_n, u_*."""
        dim = self.records[0].u.shape[0] if self.records else 0
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = (["schema", "n", "step", "ratio", "residual", "theta_n"]
                  + [f"u_{i}" for i in range(dim)])
        writer.writerow(header)
        for rec in self.records:
            writer.writerow(
                [TRACE_SCHEMA, rec.n,
                 "" if rec.step is None else repr(rec.step),
                 "" if rec.ratio is None else repr(rec.ratio),
                 repr(rec.residual),
                 "" if rec.theta_n is None else repr(rec.theta_n)]
                + [repr(float(c)) for c in rec.u])
        text = buf.getvalue()
        if path is not None:
            tmp = path + ".tmp"
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, path)
        return text


# ---------------------------------------------------------------------------
# The iteration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolverConfig:
    """Iteration parameters.

    z0 is the starting point of the z recursion; u0 defaults to the
    resolvent of z0.  `errors=None` is the zero error sequence.
    """

    z0: np.ndarray
    rho: float | None = None
    max_iters: int = 5000
    tol: float = 1e-10
    errors: GeometricErrors | None = None
    u0: np.ndarray | None = None
    inner_tol: float = 1e-13

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        object.__setattr__(self, "z0", as_vector(self.z0))
        if self.u0 is not None:
            object.__setattr__(self, "u0", as_vector(self.u0))


def _try_theta(inst, rho, n):
    try:
        return theta(inst, rho, n)
    except Exception:
        return None


def _try_rate_bound(inst, rho):
    try:
        return contraction_factor_bound(inst, rho)
    except Exception:
        return None


def solve(inst: InclusionInstance, cfg: SolverConfig) -> SolveTrace:
    """Run the iteration until the step norm falls below `tol` and the
    inclusion residual confirms the fixed point (<= 10*tol*(1+||omega||)),
    or `max_iters` is exhausted.

    Raises
    ------
    DivergenceError
        On sustained step growth (>10x over a 20-iteration window); the
        partial trace rides on the exception.
    NonSurjectiveError, ResolventIterationError
        Propagated from the resolvent.
    """
    rho = inst.rho if cfg.rho is None else cfg.rho
    rcfg = ResolventConfig(rho=rho, inner_tol=cfg.inner_tol)
    trace = SolveTrace(rho=rho, tol=cfg.tol)
    trace.theta_declared = _try_theta(inst, rho, None)
    trace.theta_rate_bound = _try_rate_bound(inst, rho)
    if cfg.errors is not None:
        trace.varpi = cfg.errors.varpi
    res_bound = 10.0 * cfg.tol * (1.0 + float(np.linalg.norm(inst.omega)))
    trace.residual_bound = res_bound

    z = np.array(cfg.z0, dtype=float)
    u = resolve(inst, rcfg, z) if cfg.u0 is None else np.array(cfg.u0)
    v = nadler_select(u, set_values(inst.S, u))
    w = nadler_select(u, set_values(inst.T, u))
    prev_step = None

    for n in range(cfg.max_iters):
        e_n = cfg.errors.term(n) if cfg.errors is not None else np.zeros(inst.dim)
        z_next = (eval_H_on_point(inst, u) - rho * as_vector(inst.F(v, w))
                  + rho * inst.omega + e_n)
        u_next = resolve(inst, rcfg, z_next)
        v_next = nadler_select(v, set_values(inst.S, u_next))
        w_next = nadler_select(w, set_values(inst.T, u_next))
        step = float(np.linalg.norm(u_next - u))
        ratio = (step / prev_step) if (prev_step is not None and prev_step > 0) else None
        res = inclusion_residual(inst, u_next, v_next, w_next)
        trace.records.append(IterationRecord(
            n=n, z=z_next, u=u_next, v=v_next, w=w_next, step=step,
            ratio=ratio, residual=res.value,
            theta_n=_try_theta(inst, rho, n + 1),
            error_norm=float(np.linalg.norm(e_n))))

        if not np.all(np.isfinite(u_next)):
            raise DivergenceError("iterate became non-finite", trace)
        steps = trace.steps
        if len(steps) > 20 and steps[-1] > 10.0 * steps[-21] and steps[-1] > cfg.tol:
            raise DivergenceError(
                f"step norm grew more than 10x over 20 iterations "
                f"({steps[-21]:.3e} -> {steps[-1]:.3e})", trace)

        z, u, v, w = z_next, u_next, v_next, w_next
        prev_step = step if step > 0 else prev_step
        if step <= cfg.tol and res.value <= res_bound:
            trace.converged = True
            trace.final_residual = res.value
            trace.message = f"converged after {n + 1} iterations"
            break
    else:
        trace.final_residual = trace.records[-1].residual if trace.records else math.inf
        trace.message = f"not converged within {cfg.max_iters} iterations"

    tail = trace.ratios[-10:]
    if tail:
        trace.observed_rate = float(max(tail))
    return trace
