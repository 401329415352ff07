import numpy as np

from schemas.theory_schema import QuadraticScenario


def random_quadratic_scenario(rng: np.random.Generator, eta: float, k: int, r: int) -> QuadraticScenario:
    """
    Three clients with different sample counts and different local means.

    Args:
        rng (np.random.Generator): Source of randomness.
        eta (float): Learning rate of the scenario.
        k (int): High-frequency local steps per round.
        r (int): Rounds.

    Returns:
        QuadraticScenario: A random scenario with theta0 away from the optimum.
    """
    observations = []
    for _ in range(3):
        count = int(rng.integers(1, 21))
        centre = rng.uniform(-5.0, 5.0)  # Client-specific mean
        observations.append((centre + rng.normal(0.0, 1.0, size=count)).tolist())
    return QuadraticScenario(
        observations=observations,
        theta0=float(rng.uniform(-10.0, 10.0)),
        eta=eta,
        k=k,
        r=r,
    )
