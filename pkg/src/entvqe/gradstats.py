"""Barren-plateau diagnostics: gradient variance over random parameter draws.

For a reduced impurity ansatz one parameter (the first rotation angle at the
impurity qubit) keeps a variance far above all others; the remaining
components are what shrink with system size. Reports therefore flag the
outlier and average over the rest.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .ansatz import AnsatzFamily, AnsatzSpec, assemble
from .models import ImpurityModelParams, PauliSum, build_tfim, build_xxz
from .statevector import Circuit, StateVector
from .vqe import energy_and_gradient, prepared_state

OUTLIER_FACTOR = 10.0


@dataclass(frozen=True)
class GradientVarianceReport:
    """Per-parameter sample variances of the energy gradient."""

    per_param_variance: np.ndarray
    outlier_index: int | None
    mean_excluding_outlier: float | None
    spread: float | None
    n_samples: int
    seed: int | None

    @property
    def n_params(self) -> int:
        return self.per_param_variance.size


def _as_rng(rng: np.random.Generator | int) -> tuple[np.random.Generator, int | None]:
    if isinstance(rng, np.random.Generator):
        return rng, None
    return np.random.default_rng(rng), int(rng)


def gradient_variance(
    circuit: Circuit,
    ham: PauliSum,
    initial: StateVector,
    n_samples: int = 200,
    rng: np.random.Generator | int = 0,
) -> GradientVarianceReport:
    """Sample variance of each gradient component for theta ~ U[0, 2pi)^P.

    A component is flagged as the outlier when its variance exceeds 10x the
    median variance; mean and spread then exclude it.
    """
    if n_samples < 50:
        raise ValueError(f"need at least 50 samples for stable variances, got {n_samples}")
    rng, seed = _as_rng(rng)
    n_params = circuit.n_params
    if n_params == 0:
        return GradientVarianceReport(np.zeros(0), None, None, None, n_samples, seed)

    grads = np.empty((n_samples, n_params))
    for s in range(n_samples):
        theta = rng.uniform(0.0, 2.0 * np.pi, n_params)
        _, grads[s] = energy_and_gradient(circuit, theta, ham, initial)
    variances = grads.var(axis=0, ddof=1)

    outlier: int | None = None
    if n_params > 1 and variances.max() > OUTLIER_FACTOR * np.median(variances):
        outlier = int(np.argmax(variances))
    kept = np.delete(variances, outlier) if outlier is not None else variances
    return GradientVarianceReport(
        per_param_variance=variances,
        outlier_index=outlier,
        mean_excluding_outlier=float(kept.mean()),
        spread=float(kept.var(ddof=1)) if kept.size > 1 else None,
        n_samples=n_samples,
        seed=seed,
    )


@dataclass(frozen=True)
class VarianceScalingRow:
    n_qubits: int
    label: str
    mean_excluding_outlier: float
    spread: float | None
    outlier_index: int | None


@dataclass(frozen=True)
class VarianceScalingTable:
    rows: tuple[VarianceScalingRow, ...]
    slopes: dict[str, float | None]  # log10(mean) per qubit; None if undefined


def variance_scaling(
    model: ImpurityModelParams,
    sizes: Sequence[int],
    n_layers: int | Callable[[int], int],
    x_variants: dict[str, frozenset[int] | None],
    n_samples: int = 200,
    seed: int = 0,
) -> VarianceScalingTable:
    """Mean gradient variance (outlier excluded) versus system size per ansatz.

    n_layers may be a fixed depth or a callable of the size. The slope per
    ansatz is the fitted d log10(mean) / d n; it is None (flagged) when fewer
    than two sizes are given.
    """
    rows: list[VarianceScalingRow] = []
    slopes: dict[str, float | None] = {}
    for v_idx, (label, x_set) in enumerate(x_variants.items()):
        means: list[float] = []
        for i, n in enumerate(sizes):
            depth = n_layers(n) if callable(n_layers) else n_layers
            params = replace(model, n_qubits=n)
            ham = build_tfim(params) if params.variant == "TFIM" else build_xxz(params)
            x = x_set if x_set is None else frozenset(v for v in x_set if v <= depth)
            spec = AnsatzSpec(AnsatzFamily.IMPURITY_LAYERS, n, depth, x_set=x)
            init_circ, var = assemble(spec)
            report = gradient_variance(
                var, ham, prepared_state(init_circ), n_samples,
                rng=np.random.default_rng([seed, v_idx, i]),
            )
            rows.append(
                VarianceScalingRow(
                    n, label, report.mean_excluding_outlier, report.spread, report.outlier_index
                )
            )
            means.append(report.mean_excluding_outlier)
        if len(sizes) >= 2 and all(m > 0 for m in means):
            slopes[label] = float(np.polyfit(sizes, np.log10(means), 1)[0])
        else:
            slopes[label] = None
    return VarianceScalingTable(tuple(rows), slopes)
