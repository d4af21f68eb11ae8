"""Strong-disorder renormalization of random Heisenberg chains.

The flow repeatedly decimates the strongest remaining bond into a singlet
and, when the decimated sites have neighbors on both sides, couples those
neighbors with the second-order strength J' = J_left * J_right / (2 * J).
Iterating pairs every site, producing singlets on all length scales.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class RgOutcome:
    """Singlet pairing produced by the flow on one coupling configuration.

    pairs are sorted by their left site; order[k] is the decimation step at
    which pairs[k] formed; history records (decimated pair, new coupling or
    None at the boundary) in decimation order.
    """

    pairs: tuple[tuple[int, int], ...]
    order: tuple[int, ...]
    lengths: tuple[int, ...]
    history: tuple[tuple[tuple[int, int], float | None], ...]

    def mean_length(self) -> float:
        return float(np.mean(self.lengths))


def sample_couplings(n: int, delta: float, rng: np.random.Generator) -> np.ndarray:
    """Draw n-1 couplings from P(J) = J^(-1+1/delta) / delta on (0, 1].

    Inverse-CDF sampling: J = u^delta with u uniform on (0, 1]. delta = 1 is
    the uniform distribution; larger delta means stronger disorder.
    """
    if delta < 1:
        raise ValueError(f"disorder strength must satisfy delta >= 1, got {delta}")
    u = 1.0 - rng.random(n - 1)  # uniform on (0, 1]
    return u**delta


def run_rg(couplings: Sequence[float]) -> RgOutcome:
    """Decimate a chain with the given bond couplings down to singlets.

    Ties on the strongest bond break toward the lower bond index.
    """
    bonds = [float(j) for j in couplings]
    n = len(bonds) + 1
    if n % 2 != 0:
        raise ValueError(f"singlet pairing needs an even site count, got {n}")
    if any(j <= 0 for j in bonds):
        raise ValueError("all couplings must be positive")

    sites = list(range(n))
    formed: list[tuple[int, int]] = []
    history: list[tuple[tuple[int, int], float | None]] = []
    while bonds:
        b = int(np.argmax(bonds))  # argmax takes the first maximum: lowest index
        pair = (sites[b], sites[b + 1])
        new_coupling = None
        if 0 < b < len(bonds) - 1:
            new_coupling = bonds[b - 1] * bonds[b + 1] / (2.0 * bonds[b])
        formed.append(pair)
        history.append((pair, new_coupling))

        del sites[b : b + 2]
        if new_coupling is not None:
            bonds[b - 1 : b + 2] = [new_coupling]
        elif b == 0:
            del bonds[: min(2, len(bonds))]
        else:  # right boundary
            del bonds[b - 1 :]

    perm = sorted(range(len(formed)), key=lambda k: formed[k][0])
    pairs = tuple(formed[k] for k in perm)
    return RgOutcome(
        pairs=pairs,
        order=tuple(perm),
        lengths=tuple(j - i for i, j in pairs),
        history=tuple(history),
    )


def singlet_length_stats(
    n_list: Sequence[int],
    delta: float,
    n_configs: int,
    rng: np.random.Generator,
) -> dict[int, float]:
    """Mean singlet length per system size, averaged over configurations.

    The per-configuration mean length is averaged over the ensemble (each
    configuration weighs equally regardless of its singlet count).
    """
    if n_configs < 1:
        raise ValueError(f"n_configs must be >= 1, got {n_configs}")
    means: dict[int, float] = {}
    for n in n_list:
        per_config = [
            run_rg(sample_couplings(n, delta, rng)).mean_length() for _ in range(n_configs)
        ]
        means[n] = float(np.mean(per_config))
    return means
