"""Regularization sweep: the solution settles as epsilon decreases.

The diffusion mobility m (epsilon + n)^(m-1) is uniformly parabolic for
epsilon > 0 and degenerate at epsilon = 0.  Running the same initial
condition across a decreasing epsilon ladder, the pairwise L2 distances
of the final density fields shrink -- a Cauchy-in-epsilon trend toward
the degenerate limit.
"""

import numpy as np

from chemostokes import (FluxSpec, Grid, SimParams, StokesWorkspace,
                         linear_potential, make_initial, run)


def main():
    grid = Grid((32, 32), (1.0 / 32, 1.0 / 32))
    ic = make_initial(grid, "gaussian-blob", mass=0.4, sigma=0.12)
    phi = linear_potential(grid, (0.0, -1.0), 0.1)

    epsilons = [0.1, 0.05, 0.025, 0.0125]
    finals = []
    for eps in epsilons:
        params = SimParams(flux=FluxSpec(m=1.2, chi=1.0, epsilon=eps),
                           phi=phi, t_end=0.25)
        state = run(ic, params, ws=StokesWorkspace(grid))
        finals.append(state.n.interior.copy())
        print("epsilon %-7g done" % eps)

    vol = grid.cell_volume
    print("\npairwise L2 distances of final density:")
    prev = None
    for (ea, eb), (fa, fb) in zip(zip(epsilons, epsilons[1:]),
                                  zip(finals, finals[1:])):
        d = float(np.sqrt(np.sum((fa - fb) ** 2) * vol))
        trend = "" if prev is None else ("  (decreasing)" if d < prev
                                         else "  (NOT decreasing)")
        print("  d(%g, %g) = %.6e%s" % (ea, eb, d, trend))
        prev = d


if __name__ == "__main__":
    main()
