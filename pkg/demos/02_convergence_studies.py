"""Verify the discrete operators against closed-form oracles.

Four studies: implicit diffusion against a Neumann eigenmode, the
porous-medium front against the self-similar profile, the Stokes solver
against a manufactured divergence-free flow, and conservative upwind
advection against rigid rotation.
"""

from chemostokes.verification import run_convergence


def main():
    for preset in ("heat-mode", "barenblatt", "stokes-manufactured",
                   "rotation-advection"):
        print("=" * 60)
        result = run_convergence(preset)
        print(result.table())
    print("=" * 60)


if __name__ == "__main__":
    main()
