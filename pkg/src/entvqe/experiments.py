"""Experiment harness: declarative configs, sweeps, and result emission.

Configs are YAML mappings (model / ansatz / sweep / vqe / diagnostics).
Results are flat tab-separated rows plus a JSON sidecar holding the full
config, so a run can be reproduced from its outputs alone. Entanglement
spectra go to a second .spectra.tsv file keyed by row id.

Sweep points and disorder configurations form independent tasks seeded from
(master seed, task index); rows are written incrementally in task order, so
reruns with the same seed are byte-identical except for wall_time.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import yaml

from . import __version__
from .ansatz import AnsatzFamily, AnsatzSpec, GateSetTag, InitialState, assemble, nn_pairs
from .entanglement import entanglement_report, half_cut, impurity_cut
from .exact_solver import lowest_eigenpairs, project_onto_degenerate
from .gradstats import gradient_variance
from .models import (
    ImpurityModelParams,
    LadderModelParams,
    PauliSum,
    RandomChainParams,
    build_ladder,
    build_random_chain,
    build_tfim,
    build_xxz,
    ladder_pairs,
)
from .rg_flow import run_rg, sample_couplings
from .statevector import StateVector, apply_circuit
from .vqe import VqeConfig, VqeResult, layer_sweep, optimize_at_layers, plateau_value, prepared_state

MAX_STATEVECTOR_QUBITS = 16

SWEEP_AXES = ("layers", "n_qubits", "h0_z", "J_over_alpha", "delta")
DIAGNOSTICS = ("energy", "entropy", "spectrum", "gradvar", "rg_stats")
_STATEVECTOR_DIAGNOSTICS = ("energy", "entropy", "spectrum", "gradvar")

ROW_COLUMNS = (
    "experiment_id",
    "row_id",
    "sweep_axis",
    "sweep_value",
    "config_index",
    "model_kind",
    "n_qubits",
    "model_desc",
    "ansatz_desc",
    "n_layers",
    "energy",
    "exact_energy",
    "rel_error",
    "iterations",
    "restart_index",
    "stalled",
    "entropy_exact",
    "entropy_trial",
    "gv_mean",
    "gv_spread",
    "gv_outlier_index",
    "rg_pairs",
    "mean_singlet_length",
    "wall_time",
    "seed",
    "version",
    "error",
)

SPECTRA_COLUMNS = ("experiment_id", "row_id", "source", "k", "epsilon")


class ConfigError(ValueError):
    """Invalid experiment configuration; carries the offending field path."""

    def __init__(self, conf_field: str, message: str):
        super().__init__(f"{conf_field}: {message}")
        self.field = conf_field


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str
    model: dict[str, Any]
    ansatz: dict[str, Any]
    sweep: dict[str, Any]
    vqe: VqeConfig
    diagnostics: tuple[str, ...]
    output: str
    seed: int
    gradvar_samples: int = 200
    raw: dict[str, Any] = field(default_factory=dict)


def _require(block: dict, key: str, path: str, types: tuple[type, ...]) -> Any:
    if key not in block:
        raise ConfigError(f"{path}.{key}", "missing required field")
    value = block[key]
    if not isinstance(value, types):
        wanted = "/".join(t.__name__ for t in types)
        raise ConfigError(f"{path}.{key}", f"expected {wanted}, got {type(value).__name__}")
    return value


def load_config(source: str | Path | dict) -> ExperimentConfig:
    """Parse and validate a config mapping or YAML file."""
    if isinstance(source, (str, Path)):
        try:
            with open(source) as fh:
                data = yaml.safe_load(fh)
        except OSError as exc:
            raise ConfigError("config", f"cannot read {source}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError("config", f"invalid YAML: {exc}") from exc
    else:
        data = source
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a mapping")

    experiment_id = _require(data, "experiment_id", "config", (str,))
    model = dict(_require(data, "model", "config", (dict,)))
    ansatz = dict(data.get("ansatz") or {})
    sweep = dict(_require(data, "sweep", "config", (dict,)))
    output = str(data.get("output", "results.tsv"))
    seed = int(data.get("seed", 0))

    kind = _require(model, "kind", "model", (str,))
    if kind not in ("tfim", "xxz", "ladder", "random_chain"):
        raise ConfigError("model.kind", f"unknown model kind {kind!r}")
    _require(model, "n_qubits", "model", (int,))
    if kind in ("tfim", "xxz"):
        model.setdefault("h0_z", 0.0)
        if kind == "tfim":
            model.setdefault("h_x", -1.0)
        else:
            _require(model, "delta", "model", (int, float))
    elif kind == "ladder":
        _require(model, "alpha", "model", (int, float))
        _require(model, "J", "model", (int, float))
    else:
        _require(model, "delta", "model", (int, float))
        n_configs = _require(model, "n_configs", "model", (int,))
        if n_configs < 1:
            raise ConfigError("model.n_configs", "must be >= 1")

    axis = _require(sweep, "axis", "sweep", (str,))
    if axis not in SWEEP_AXES:
        raise ConfigError("sweep.axis", f"must be one of {SWEEP_AXES}, got {axis!r}")
    values = _require(sweep, "values", "sweep", (list,))
    if not values:
        raise ConfigError("sweep.values", "must be non-empty")
    if axis == "h0_z" and kind not in ("tfim", "xxz"):
        raise ConfigError("sweep.axis", "h0_z sweeps need a tfim or xxz model")
    if axis == "J_over_alpha" and kind != "ladder":
        raise ConfigError("sweep.axis", "J_over_alpha sweeps need the ladder model")
    if axis == "delta" and kind != "random_chain":
        raise ConfigError("sweep.axis", "delta sweeps need the random_chain model")
    if axis in ("layers", "n_qubits") and not all(isinstance(v, int) and v >= 0 for v in values):
        raise ConfigError("sweep.values", f"{axis} values must be non-negative integers")

    diagnostics = tuple(data.get("diagnostics") or ("energy",))
    for diag in diagnostics:
        if diag not in DIAGNOSTICS:
            raise ConfigError("diagnostics", f"unknown diagnostic {diag!r}")
    if "rg_stats" in diagnostics and kind != "random_chain":
        raise ConfigError("diagnostics", "rg_stats requires the random_chain model")

    needs_circuit = any(d in diagnostics for d in _STATEVECTOR_DIAGNOSTICS)
    if needs_circuit:
        family = _require(ansatz, "family", "ansatz", (str,))
        try:
            AnsatzFamily(family)
        except ValueError:
            raise ConfigError("ansatz.family", f"unknown family {family!r}") from None
        _require(ansatz, "n_layers", "ansatz", (int,))
        init = ansatz.get("initial_state", "product_zero")
        try:
            InitialState(init)
        except ValueError:
            raise ConfigError("ansatz.initial_state", f"unknown initial state {init!r}") from None
        for tag in ansatz.get("sequence") or ():
            try:
                GateSetTag(tag)
            except ValueError:
                raise ConfigError("ansatz.sequence", f"unknown gate-set tag {tag!r}") from None

    vqe_block = dict(data.get("vqe") or {})
    known = {f.name for f in dataclasses.fields(VqeConfig)}
    extra = set(vqe_block) - known
    if extra:
        raise ConfigError("vqe", f"unknown fields {sorted(extra)}")
    vqe = VqeConfig(**vqe_block)

    gradvar_samples = int((data.get("gradvar") or {}).get("n_samples", 200))

    return ExperimentConfig(
        experiment_id=experiment_id,
        model=model,
        ansatz=ansatz,
        sweep=sweep,
        vqe=vqe,
        diagnostics=diagnostics,
        output=output,
        seed=seed,
        gradvar_samples=gradvar_samples,
        raw=data,
    )


# ---------------------------------------------------------------------------
# task construction and execution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Task:
    index: int
    sweep_value: Any
    config_index: int | None
    layer_values: tuple[int, ...] | None  # set for warm-start layer sweeps


def _tasks(config: ExperimentConfig) -> list[Task]:
    axis = config.sweep["axis"]
    values = config.sweep["values"]
    ensemble = range(config.model["n_configs"]) if config.model["kind"] == "random_chain" else (None,)
    tasks: list[Task] = []
    if axis == "layers":
        layer_values = tuple(sorted(set(values)))
        for c_idx in ensemble:
            tasks.append(Task(len(tasks), None, c_idx, layer_values))
    else:
        for value in values:
            for c_idx in ensemble:
                tasks.append(Task(len(tasks), value, c_idx, None))
    return tasks


def _task_seeds(master_seed: int, task: Task) -> tuple[int, int]:
    state = np.random.SeedSequence([master_seed, task.index]).generate_state(2)
    return int(state[0]), int(state[1])  # (couplings/RG seed, vqe seed)


def _model_for_point(config: ExperimentConfig, task: Task):
    """Resolve model parameters at one sweep point; returns (params, desc)."""
    model = dict(config.model)
    axis = config.sweep["axis"]
    if axis == "n_qubits":
        model["n_qubits"] = task.sweep_value
    elif axis == "h0_z":
        model["h0_z"] = task.sweep_value
    elif axis == "J_over_alpha":
        model["J"] = task.sweep_value * model["alpha"]
    elif axis == "delta":
        model["delta"] = task.sweep_value
    kind = model["kind"]
    if kind == "tfim":
        params = ImpurityModelParams(model["n_qubits"], model["h_x"], model["h0_z"], "TFIM")
        desc = f"h_x={model['h_x']};h0_z={model['h0_z']}"
    elif kind == "xxz":
        params = ImpurityModelParams(
            model["n_qubits"], 0.0, model["h0_z"], "XXZ", model["delta"]
        )
        desc = f"delta={model['delta']};h0_z={model['h0_z']}"
    elif kind == "ladder":
        params = LadderModelParams(model["n_qubits"], model["alpha"], model["J"])
        desc = f"alpha={model['alpha']};J={model['J']}"
    else:
        params = model  # couplings still to be sampled
        desc = f"delta={model['delta']}"
    return params, desc


def _build_hamiltonian(kind: str, params) -> PauliSum:
    if kind == "tfim":
        return build_tfim(params)
    if kind == "xxz":
        return build_xxz(params)
    if kind == "ladder":
        return build_ladder(params)
    return build_random_chain(params)


def _resolve_pairing(
    spec_block: dict, n: int, rg_pairs: tuple[tuple[int, int], ...] | None
) -> tuple[tuple[int, int], ...] | None:
    pairing = spec_block.get("pairing")
    if pairing is None:
        init = spec_block.get("initial_state", "product_zero")
        seq = spec_block.get("sequence") or ()
        # LONG gate sets and singlet initial states need explicit pairs
        if init == "singlet_ladder" or ("long" in seq and rg_pairs is None):
            return ladder_pairs(n)
        if init == "singlet_nn":
            return nn_pairs(n)
        if init == "singlet_rg" or "long" in seq:
            return rg_pairs
        return None
    if pairing == "ladder":
        return ladder_pairs(n)
    if pairing == "nn":
        return nn_pairs(n)
    if pairing == "rg":
        if rg_pairs is None:
            raise ConfigError("ansatz.pairing", "rg pairing needs the random_chain model")
        return rg_pairs
    if isinstance(pairing, list):
        return tuple((int(a), int(b)) for a, b in pairing)
    raise ConfigError("ansatz.pairing", f"unknown pairing {pairing!r}")


def _ansatz_spec(
    config: ExperimentConfig,
    n: int,
    n_layers: int,
    rg_pairs: tuple[tuple[int, int], ...] | None,
    couplings: tuple[float, ...] | None,
) -> AnsatzSpec:
    block = config.ansatz
    x = block.get("x", "all")
    if x == "all":
        x_set = None
    else:
        x_set = frozenset(int(v) for v in x if int(v) <= n_layers)
    return AnsatzSpec(
        family=AnsatzFamily(block["family"]),
        n_qubits=n,
        n_layers=n_layers,
        x_set=x_set,
        sequence=tuple(GateSetTag(t) for t in (block.get("sequence") or ())),
        initial_state=InitialState(block.get("initial_state", "product_zero")),
        pairing=_resolve_pairing(block, n, rg_pairs),
        couplings=couplings,
    )


def _ansatz_desc(config: ExperimentConfig) -> str:
    block = config.ansatz
    if not block:
        return "none"
    parts = [str(block.get("family"))]
    if block.get("x") is not None:
        x = block["x"]
        parts.append("x=all" if x == "all" else "x=" + ",".join(map(str, x)))
    if block.get("sequence"):
        parts.append("seq=" + "-".join(block["sequence"]))
    parts.append("init=" + str(block.get("initial_state", "product_zero")))
    return ";".join(parts)


def _trial_state(spec: AnsatzSpec, result: VqeResult) -> StateVector:
    init_circ, var = assemble(spec)
    state = prepared_state(init_circ)
    return apply_circuit(state, var, result.theta_opt)


def _entanglement_payload(
    kind: str,
    ham: PauliSum,
    spec: AnsatzSpec,
    result: VqeResult,
    want_entropy: bool,
    want_spectrum: bool,
) -> tuple[dict[str, Any], list[tuple[str, int, float]]]:
    """Entropy columns and spectra rows for one optimized point.

    With a degenerate exact ground level the reference state is the
    projection of the trial state onto the ground subspace.
    """
    n = ham.n_qubits
    cut = impurity_cut(n) if kind in ("tfim", "xxz") else half_cut(n)
    trial = _trial_state(spec, result)
    reference = lowest_eigenpairs(ham, k=4)
    if reference.ground_degeneracy() > 1:
        exact_state = project_onto_degenerate(reference, trial)
    else:
        exact_state = StateVector(n, reference.vectors[:, 0])
    columns: dict[str, Any] = {}
    spectra: list[tuple[str, int, float]] = []
    exact_rep = entanglement_report(exact_state, cut)
    trial_rep = entanglement_report(trial, cut)
    if want_entropy:
        columns["entropy_exact"] = f"{exact_rep.entropy:.12g}"
        columns["entropy_trial"] = f"{trial_rep.entropy:.12g}"
    if want_spectrum:
        spectra += [("exact", k, eps) for k, eps in enumerate(exact_rep.spectrum)]
        spectra += [("trial", k, eps) for k, eps in enumerate(trial_rep.spectrum)]
    return columns, spectra


def _execute_task(config: ExperimentConfig, task: Task) -> list[dict[str, Any]]:
    """Run one task; returns row dicts (spectra under the '_spectra' key)."""
    started = time.perf_counter()
    rg_seed, vqe_seed = _task_seeds(config.seed, task)
    params, model_desc = _model_for_point(config, task)
    kind = config.model["kind"]
    diagnostics = config.diagnostics

    base: dict[str, Any] = {
        "experiment_id": config.experiment_id,
        "sweep_axis": config.sweep["axis"],
        "sweep_value": task.sweep_value,
        "config_index": "" if task.config_index is None else task.config_index,
        "model_kind": kind,
        "model_desc": model_desc,
        "ansatz_desc": _ansatz_desc(config),
        "seed": config.seed,
        "version": __version__,
        "error": "",
    }

    couplings: tuple[float, ...] | None = None
    rg_pairs = None
    rg_columns: dict[str, Any] = {}
    if kind == "random_chain":
        n, delta = params["n_qubits"], params["delta"]
        rng = np.random.default_rng(rg_seed)
        couplings = tuple(sample_couplings(n, delta, rng))
        outcome = run_rg(couplings)
        rg_pairs = outcome.pairs
        params = RandomChainParams(n, couplings)
        if "rg_stats" in diagnostics:
            rg_columns["rg_pairs"] = "|".join(f"{a}-{b}" for a, b in outcome.pairs)
            rg_columns["mean_singlet_length"] = f"{outcome.mean_length():.12g}"

    n_qubits = params.n_qubits if not isinstance(params, dict) else params["n_qubits"]
    base["n_qubits"] = n_qubits
    base.update(rg_columns)

    if not any(d in diagnostics for d in _STATEVECTOR_DIAGNOSTICS):
        base["wall_time"] = f"{time.perf_counter() - started:.3f}"
        return [base]

    ham = _build_hamiltonian(kind, params)
    vqe_config = dataclasses.replace(config.vqe, rng_seed=vqe_seed)

    if "gradvar" in diagnostics:
        n_layers = config.ansatz["n_layers"]
        spec = _ansatz_spec(config, n_qubits, n_layers, rg_pairs, couplings)
        init_circ, var = assemble(spec)
        report = gradient_variance(
            var, ham, prepared_state(init_circ), config.gradvar_samples, rng=vqe_seed
        )
        base["n_layers"] = n_layers
        base["gv_mean"] = f"{report.mean_excluding_outlier:.12g}"
        base["gv_spread"] = "" if report.spread is None else f"{report.spread:.12g}"
        base["gv_outlier_index"] = "" if report.outlier_index is None else report.outlier_index
        if "energy" not in diagnostics:
            base["wall_time"] = f"{time.perf_counter() - started:.3f}"
            return [base]

    want_entropy = "entropy" in diagnostics
    want_spectrum = "spectrum" in diagnostics
    exact_energy = lowest_eigenpairs(ham, k=1).ground_energy

    def finish(row: dict[str, Any], spec: AnsatzSpec, result: VqeResult) -> dict[str, Any]:
        row["energy"] = f"{result.energy:.15g}"
        row["exact_energy"] = f"{result.exact_energy:.15g}"
        row["rel_error"] = f"{result.rel_error:.12g}"
        row["iterations"] = result.iterations
        row["restart_index"] = result.restart_index
        row["stalled"] = int(result.stalled)
        if want_entropy or want_spectrum:
            columns, spectra = _entanglement_payload(
                kind, ham, spec, result, want_entropy, want_spectrum
            )
            row.update(columns)
            if spectra:
                row["_spectra"] = spectra
        row["wall_time"] = f"{time.perf_counter() - started:.3f}"
        return row

    rows: list[dict[str, Any]] = []
    if task.layer_values is not None:
        wanted = set(task.layer_values)
        max_layers = max(task.layer_values)
        if 0 in wanted:
            spec0 = _ansatz_spec(config, n_qubits, 0, rg_pairs, couplings)
            result0 = optimize_at_layers(spec0, ham, vqe_config, exact_energy)
            row = dict(base, sweep_value=0, n_layers=0)
            rows.append(finish(row, spec0, result0))
        if max_layers >= 1:
            spec = _ansatz_spec(config, n_qubits, max_layers, rg_pairs, couplings)
            sweep_results = layer_sweep(spec, ham, max_layers, vqe_config, exact_energy)
            for m, result in enumerate(sweep_results, start=1):
                if m in wanted:
                    spec_m = _ansatz_spec(config, n_qubits, m, rg_pairs, couplings)
                    row = dict(base, sweep_value=m, n_layers=m)
                    rows.append(finish(row, spec_m, result))
    else:
        n_layers = config.ansatz["n_layers"]
        spec = _ansatz_spec(config, n_qubits, n_layers, rg_pairs, couplings)
        result = optimize_at_layers(spec, ham, vqe_config, exact_energy)
        row = dict(base, n_layers=n_layers)
        rows.append(finish(row, spec, result))
    return rows


# ---------------------------------------------------------------------------
# run orchestration and output
# ---------------------------------------------------------------------------

@dataclass
class RunOutcome:
    rows_path: Path
    meta_path: Path
    spectra_path: Path | None
    n_rows: int
    n_failed: int


def _check_scale_guard(config: ExperimentConfig, force_large: bool) -> None:
    if not any(d in config.diagnostics for d in _STATEVECTOR_DIAGNOSTICS):
        return
    sizes = [config.model["n_qubits"]]
    if config.sweep["axis"] == "n_qubits":
        sizes += list(config.sweep["values"])
    if max(sizes) > MAX_STATEVECTOR_QUBITS and not force_large:
        raise ConfigError(
            "model.n_qubits",
            f"state-vector run with n={max(sizes)} > {MAX_STATEVECTOR_QUBITS} "
            "refused; pass --force-large to override",
        )


def run_experiment(
    source: str | Path | dict | ExperimentConfig,
    seed: int | None = None,
    threads: int = 1,
    out: str | Path | None = None,
    force_large: bool = False,
) -> RunOutcome:
    """Execute every sweep point of a config, flushing rows incrementally."""
    config = source if isinstance(source, ExperimentConfig) else load_config(source)
    if seed is not None:
        config = dataclasses.replace(config, seed=int(seed))
    _check_scale_guard(config, force_large)

    rows_path = Path(out) if out is not None else Path(config.output)
    rows_path.parent.mkdir(parents=True, exist_ok=True)
    meta_path = rows_path.with_suffix(rows_path.suffix + ".meta.json")
    want_spectra = "spectrum" in config.diagnostics
    spectra_path = rows_path.with_suffix(".spectra.tsv") if want_spectra else None

    tasks = _tasks(config)
    meta = {
        "experiment_id": config.experiment_id,
        "config": config.raw,
        "seed": config.seed,
        "version": __version__,
        "n_tasks": len(tasks),
    }
    meta_path.write_text(json.dumps(meta, indent=2, default=str) + "\n")

    n_rows = 0
    n_failed = 0
    with open(rows_path, "w") as rows_fh:
        rows_fh.write("\t".join(ROW_COLUMNS) + "\n")
        spectra_fh = open(spectra_path, "w") if spectra_path else None
        if spectra_fh:
            spectra_fh.write("\t".join(SPECTRA_COLUMNS) + "\n")
        try:
            for task, outcome in _run_tasks(config, tasks, threads):
                if isinstance(outcome, Exception):
                    n_failed += 1
                    row = {
                        "experiment_id": config.experiment_id,
                        "row_id": n_rows,
                        "sweep_axis": config.sweep["axis"],
                        "sweep_value": task.sweep_value,
                        "config_index": "" if task.config_index is None else task.config_index,
                        "seed": config.seed,
                        "version": __version__,
                        "error": str(outcome).replace("\t", " ").replace("\n", " "),
                    }
                    rows_fh.write(_format_row(row) + "\n")
                    n_rows += 1
                    continue
                for row in outcome:
                    spectra = row.pop("_spectra", ())
                    row["row_id"] = n_rows
                    rows_fh.write(_format_row(row) + "\n")
                    if spectra_fh:
                        for src, k, eps in spectra:
                            spectra_fh.write(
                                f"{config.experiment_id}\t{n_rows}\t{src}\t{k}\t{eps:.12g}\n"
                            )
                    n_rows += 1
                rows_fh.flush()
        finally:
            if spectra_fh:
                spectra_fh.close()
    return RunOutcome(rows_path, meta_path, spectra_path, n_rows, n_failed)


def _run_tasks(
    config: ExperimentConfig, tasks: list[Task], threads: int
) -> Iterable[tuple[Task, list[dict] | Exception]]:
    """Yield task outcomes in submission order; failures become Exceptions."""
    if threads <= 1:
        for task in tasks:
            try:
                yield task, _execute_task(config, task)
            except Exception as exc:  # per-point failure: row with error flag
                yield task, exc
        return
    with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_execute_task, config, task) for task in tasks]
        for task, future in zip(tasks, futures):
            try:
                yield task, future.result()
            except Exception as exc:
                yield task, exc


def _format_row(row: dict[str, Any]) -> str:
    return "\t".join(str(row.get(col, "")) for col in ROW_COLUMNS)


# ---------------------------------------------------------------------------
# summaries
# ---------------------------------------------------------------------------

def read_rows(path: str | Path) -> list[dict[str, str]]:
    with open(path) as fh:
        header = fh.readline().rstrip("\n").split("\t")
        return [dict(zip(header, line.rstrip("\n").split("\t"))) for line in fh if line.strip()]


def summarize(paths: Sequence[str | Path], force: bool = False) -> str:
    """Summary tables for one experiment's results files.

    Main rows files contribute accuracy summaries (per sweep value, ensemble
    mean with standard error; for layer sweeps also the plateau value and the
    first layer below 1e-6). Spectra files contribute per-row match counts.
    """
    main_rows: list[dict[str, str]] = []
    spectra_rows: list[dict[str, str]] = []
    for path in paths:
        rows = read_rows(path)
        if not rows:
            continue
        if "epsilon" in rows[0]:
            spectra_rows += rows
        else:
            main_rows += rows

    ids = {r["experiment_id"] for r in main_rows + spectra_rows}
    if len(ids) > 1 and not force:
        raise ValueError(f"refusing to mix experiment ids {sorted(ids)}; pass force=True")

    match_counts = _match_counts(spectra_rows)
    lines = ["\t".join(
        ("experiment_id", "model_desc", "ansatz_desc", "sweep_axis", "sweep_value",
         "n", "mean_rel_error", "stderr", "mean_match_count", "mean_singlet_length")
    )]
    groups: dict[tuple, list[dict[str, str]]] = {}
    for row in main_rows:
        if row.get("error"):
            continue
        key = (
            row["experiment_id"],
            row.get("model_desc", ""),
            row.get("ansatz_desc", ""),
            row.get("sweep_axis", ""),
            row.get("sweep_value", ""),
            row.get("n_qubits", ""),
        )
        groups.setdefault(key, []).append(row)

    def _floats(rows: list[dict[str, str]], col: str) -> np.ndarray:
        return np.array([float(r[col]) for r in rows if r.get(col)])

    sweep_summaries: dict[tuple, list[tuple[Any, float]]] = {}
    for key in sorted(groups, key=lambda k: (k[:4], _sort_value(k[4]))):
        rows = groups[key]
        rel = _floats(rows, "rel_error")
        mean_rel = rel.mean() if rel.size else np.nan
        stderr = rel.std(ddof=1) / np.sqrt(rel.size) if rel.size > 1 else np.nan
        counts = [match_counts[r["row_id"]] for r in rows if r["row_id"] in match_counts]
        lengths = _floats(rows, "mean_singlet_length")
        lines.append("\t".join(str(v) for v in (
            *key[:5], key[5],
            f"{mean_rel:.6g}" if rel.size else "",
            f"{stderr:.3g}" if rel.size > 1 else "",
            f"{np.mean(counts):.3g}" if counts else "",
            f"{lengths.mean():.6g}" if lengths.size else "",
        )))
        if rel.size and key[3] == "layers":
            sweep_summaries.setdefault(key[:3] + key[5:], []).append(
                (_sort_value(key[4]), float(mean_rel))
            )

    for group_key, pairs in sweep_summaries.items():
        pairs.sort()
        errors = [e for _, e in pairs]
        plateau = plateau_value(errors) if len(errors) >= 3 else None
        transition = next((int(v) for v, e in pairs if e < 1e-6), None)
        lines.append(
            f"# layers summary {group_key[0]} {group_key[1]} {group_key[2]} n={group_key[3]}: "
            f"plateau={'n/a' if plateau is None else f'{plateau:.6g}'} "
            f"first_below_1e-6={'n/a' if transition is None else transition}"
        )
    return "\n".join(lines) + "\n"


def _sort_value(text: str):
    try:
        return float(text)
    except (TypeError, ValueError):
        return float("inf")


def _match_counts(spectra_rows: list[dict[str, str]]) -> dict[str, int]:
    from .entanglement import match_count

    by_row: dict[str, dict[str, list[tuple[int, float]]]] = {}
    for row in spectra_rows:
        by_row.setdefault(row["row_id"], {}).setdefault(row["source"], []).append(
            (int(row["k"]), float(row["epsilon"]))
        )
    counts: dict[str, int] = {}
    for row_id, sources in by_row.items():
        if "exact" in sources and "trial" in sources:
            exact = [eps for _, eps in sorted(sources["exact"])]
            trial = [eps for _, eps in sorted(sources["trial"])]
            counts[row_id] = match_count(exact, trial)
    return counts
