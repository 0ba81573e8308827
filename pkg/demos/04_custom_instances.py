#!/usr/bin/env python3
"""Building your own inclusion instances.

An instance bundles the four slot maps A, B, C, D, the coupling slots
f, g, the additive bifunction H, the pair map F, set-valued selections
S, T, a right-hand element omega, a step rho and the declared constants.
Instances serialize to a JSON format the CLI consumes directly.

The second half swaps in a claim that is false and shows the battery
catching it: a piecewise-constant set-valued map is never Lipschitz in
the set distance across cell boundaries.
"""

import json
import subprocess
import sys
import tempfile

import numpy as np

from vincl import (
    AdditiveBiSlot,
    AffineMap,
    AffinePairMap,
    Constants,
    DifferenceCoupling,
    IdentitySetMap,
    InclusionInstance,
    NearestNodeSetMap,
    SamplePlan,
    SolverConfig,
    SpaceConfig,
    certify_d_lipschitz,
    certify_instance,
    check_condition_vi,
    dump_instance,
    instance_to_dict,
    solve,
)


def build_instance() -> InclusionInstance:
    """A 3-D instance whose declared constants are the certified ones."""
    dim = 3
    b = AffineMap.linear([[0.0, -0.3, 0.0],
                          [0.3, 0.0, 0.0],
                          [0.0, 0.0, 0.1]])
    return InclusionInstance(
        space=SpaceConfig(dim=dim, q=2.0, c_q=1.0),
        A=AffineMap.scaling(2.0, dim),
        B=b,
        C=AffineMap.identity(dim),
        D=AffineMap.scaling(0.5, dim),
        f=AffineMap.scaling(1.5, dim),
        g=AffineMap.scaling(0.25, dim),
        H=AdditiveBiSlot(),
        F=AffinePairMap(0.05 * np.eye(dim), 0.05 * np.eye(dim),
                        np.zeros(dim)),
        M=DifferenceCoupling(),
        S=IdentitySetMap(),
        T=IdentitySetMap(),
        omega=np.zeros(dim),
        rho=0.4,
        constants=Constants(mu1=0.3, gamma1=1.8, mu2=0.2, gamma2=0.5,
                            alpha=1.5, beta=0.25, alpha1=2.0, beta1=0.3,
                            tau=3.6, sigma=0.175, delta=0.175,
                            eps1=0.05, eps2=0.05, l1=1.0, l2=1.0))


def main():
    inst = build_instance()

    bundle = certify_instance(inst, SamplePlan(seed=0, n_pairs=128))
    print("certification (all claims are the exact certified values):")
    for key, cert in sorted(bundle.certificates.items()):
        print(f"  {key:32s} {cert.verdict:9s} [{cert.method}]")
    print(f"  all ok: {bundle.all_ok()}")

    rep = check_condition_vi(inst, rho=0.4)
    print(f"\nrate condition at rho=0.4: {rep.verdict} "
          f"(theta={rep.theta:.4f}, step-ratio bound="
          f"{rep.theta_rate_bound:.4f})")

    trace = solve(inst, SolverConfig(z0=np.ones(3), tol=1e-10))
    print(f"solve: converged={trace.converged} in {trace.iterations} "
          f"iterations, observed rate {trace.observed_rate:.4f}")

    # --- a false claim, caught ------------------------------------------
    # A piecewise-constant set-valued map jumps across the boundary
    # between its cells, so no finite set-distance Lipschitz constant
    # exists.  Claiming l = 1 must fail with a witness pair.
    grid_s = NearestNodeSetMap(
        nodes=[[0.0, 0.0, 0.0], [5.0, 5.0, 5.0]],
        point_sets=[[[0.1, 0.0, 0.0], [0.0, 0.1, 0.0]],
                    [[5.0, 5.0, 5.0]]])
    cert = certify_d_lipschitz(grid_s, 1.0, SamplePlan(seed=1, n_pairs=256),
                               dim=3)
    print(f"\nfalse claim: grid-backed S with l=1 -> {cert.verdict}")
    if cert.witness:
        print(f"  witness quotient {cert.witness['lhs']:.3f} at "
              f"x={np.round(cert.witness['x'], 3).tolist()}")

    # --- JSON round trip and the CLI ------------------------------------
    print("\ninstance JSON structure (truncated):")
    doc = instance_to_dict(inst)
    listing = json.dumps({k: doc[k] for k in
                          ("dim", "q", "c_q", "rho", "H", "M", "S")},
                         indent=2, sort_keys=True, default=str)
    print(listing)

    with tempfile.NamedTemporaryFile(suffix=".json", delete=False,
                                     mode="w") as fh:
        path = fh.name
    dump_instance(inst, path)
    cmd = [sys.executable, "-m", "vincl.cli", "check-condition",
           "--instance", path, "--rho", "0.4"]
    print(f"\n$ check-condition --instance {path} --rho 0.4")
    out = subprocess.run(cmd, capture_output=True, text=True)
    print(out.stdout)
    print(f"exit code {out.returncode}")


if __name__ == "__main__":
    main()
