"""
The `hsflow` command line.

    hsflow --config scenario.json --out results/ [--seed 0]

A scenario configuration is a JSON object naming a `command` (`solve`,
`energy`, `distance` or `experiment`), an input function (exactly one of
`function`, `peakons` or `builtin`) and numeric parameters. Results are written
to the output directory as `result.json` plus one CSV file per table. The exit
status is 0 when every check passed, 1 when a check failed and 2 when the
configuration is invalid.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy
import pandas

from hsflow.energy import (
    QUADRATURE_TOLERANCE,
    BumpTestFunction,
    Trajectory,
    atoms_frame,
    balance_frame,
    defect_pairing,
    dissipation_atoms,
    dissipation_inequality_check,
)
from hsflow.errors import (
    BlowupBeforeT,
    ConfigInvalid,
    ContractFailed,
    HSFlowError,
    ImplementationNotFound,
)
from hsflow.experiments import (
    Scenario,
    ScenarioResult,
    example1_u,
    example1_v,
    lower_bound,
)
from hsflow.flow import FlowState
from hsflow.metric import MetricParams, j_upper_dp
from hsflow.plfunc import PeakonConfig, PiecewiseLinearFn, from_peakons, hat, sawtooth
from hsflow.utils.io import write_csv, write_json

logger = logging.getLogger(__name__)

LOG_ENV_VAR = "HSFLOW_LOG"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
LOG_HANDLER_NAME = "hsflow-cli"

EXIT_OK = 0
EXIT_CONTRACT_FAILED = 1
EXIT_CONFIG_INVALID = 2

IDENTITY_TOLERANCE = 1e-12
WITNESS_ENERGY = 8.0
DEFAULT_EPSILON = 0.05
DEFAULT_CELLS = 4
DEFAULT_TEETH = (1, 8)


class Command(str, Enum):
    SOLVE = "solve"
    ENERGY = "energy"
    DISTANCE = "distance"
    EXPERIMENT = "experiment"


BUILTINS = ("hat", "example1_u", "example1_v", "example2", "witness112")
TRAJECTORY_BUILTINS = ("witness112",)
INPUT_KEYS = ("function", "peakons", "builtin")
CONFIG_KEYS = (
    "command",
    *INPUT_KEYS,
    "other",
    "name",
    "t",
    "eps",
    "kappa0",
    "n",
    "m",
    "bumps",
    "seed",
    "out",
    "params",
)


def _floats(value: Any, name: str) -> Tuple[float, ...]:
    try:
        values = numpy.atleast_1d(numpy.asarray(value, dtype=float))
    except (TypeError, ValueError) as e:
        raise ConfigInvalid(f"`{name}` must be a number or a list of numbers, not {value!r}.") from e
    if values.ndim != 1 or len(values) == 0:
        raise ConfigInvalid(f"`{name}` must be a number or a nonempty flat list of numbers.")
    if not numpy.all(numpy.isfinite(values)):
        raise ConfigInvalid(f"`{name}` must be finite.")
    return tuple(float(v) for v in values)


def _count(value: Any, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, numpy.integer)):
        raise ConfigInvalid(f"`{name}` must be an integer, not {value!r}.")
    if value < minimum:
        raise ConfigInvalid(f"`{name}` must be at least {minimum}, not {value!r}.")
    return int(value)


@dataclass(frozen=True)
class FunctionSpec:
    """
    One input function of a scenario: an inline piecewise-linear function
    (`{"x": [...], "y": [...]}`), a peakon configuration
    (`{"alpha": [...], "pos": [...]}`) or the name of a builtin.
    """

    function: Optional[Mapping[str, Sequence[float]]] = None
    peakons: Optional[Mapping[str, Sequence[float]]] = None
    builtin: Optional[str] = None

    def __post_init__(self) -> None:
        given = [key for key in INPUT_KEYS if getattr(self, key) is not None]
        if len(given) != 1:
            raise ConfigInvalid(
                f"Exactly one of {', '.join(f'`{key}`' for key in INPUT_KEYS)} must describe an input function; got {given or 'none'}."
            )
        if self.builtin is not None and self.builtin not in BUILTINS:
            raise ConfigInvalid(
                f"Unknown builtin {self.builtin!r}. Available builtins are: {', '.join(BUILTINS)}."
            )

    @classmethod
    def from_mapping(cls, spec: Any) -> FunctionSpec:
        if isinstance(spec, str):
            return cls(builtin=spec)
        if not isinstance(spec, Mapping):
            raise ConfigInvalid(f"An input function must be a JSON object or a builtin name, not {spec!r}.")
        unknown = set(spec) - set(INPUT_KEYS)
        if unknown:
            raise ConfigInvalid(f"Unknown input function keys: {sorted(unknown)}.")
        return cls(**spec)

    @property
    def is_trajectory(self) -> bool:
        return self.builtin in TRAJECTORY_BUILTINS

    def resolve(self, n: Optional[int] = None, m: Optional[int] = None) -> PiecewiseLinearFn:
        """
        The initial datum described by this spec.

        Raises:
            ConfigInvalid: If the datum cannot be built.
        """
        try:
            if self.function is not None:
                return PiecewiseLinearFn.from_dict(self.function)
            if self.peakons is not None:
                return from_peakons(PeakonConfig.from_dict(self.peakons))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigInvalid(f"Invalid input function: {e}") from e
        if self.builtin == "hat":
            return hat()
        if self.builtin == "example1_u":
            return example1_u(n or DEFAULT_CELLS)
        if self.builtin == "example1_v":
            return example1_v(n or DEFAULT_CELLS)
        if self.builtin == "example2":
            return sawtooth(m or DEFAULT_TEETH[0])
        raise ConfigInvalid(
            f"Builtin {self.builtin!r} is a trajectory rather than an initial datum; it is only supported by `solve`."
        )

    def to_dict(self) -> Dict[str, Any]:
        return {key: getattr(self, key) for key in INPUT_KEYS if getattr(self, key) is not None}


@dataclass(frozen=True)
class ScenarioConfig:
    """
    A validated scenario configuration.

    Attributes:
        command: What to do with the input.
        input: The input function (all commands but `experiment`).
        other: The second function of `distance`; defaults to the companion
            of `example1_u`/`example1_v` and to `u^n` for `example2`.
        name: The registered name of the scenario to run for `experiment`.
        t: The times of interest (scalar or list); `0` when omitted.
        eps: The quanta used by `distance` (scalar or list).
        kappa0: The angular weight `κ₀`; defaults to `max(1, energy)`.
        n: Cells of `example1_u`/`example1_v`, or teeth of `u^n`.
        m: Teeth of `u^m`.
        bumps: Random test functions against which `energy` checks the
            dissipation inequality.
        seed: Seed of the random test functions.
        out: The output directory.
        params: Further parameters passed to experiments.
    """

    command: Command
    input: Optional[FunctionSpec] = None
    other: Optional[FunctionSpec] = None
    name: Optional[str] = None
    t: Optional[Tuple[float, ...]] = None
    eps: Optional[Tuple[float, ...]] = None
    kappa0: Optional[float] = None
    n: Optional[int] = None
    m: Optional[int] = None
    bumps: int = 0
    seed: int = 0
    out: str = "hsflow-out"
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        try:
            self.__dict__["command"] = Command(self.command)
        except ValueError as e:
            raise ConfigInvalid(
                f"Unknown command {self.command!r}. Available commands are: {', '.join(c.value for c in Command)}."
            ) from e

        if self.t is not None:
            self.__dict__["t"] = _floats(self.t, "t")
            if min(self.t) < 0:
                raise ConfigInvalid("Times `t` must be nonnegative.")
        if self.eps is not None:
            self.__dict__["eps"] = _floats(self.eps, "eps")
            if min(self.eps) <= 0:
                raise ConfigInvalid("Quanta `eps` must be positive.")
        if self.kappa0 is not None:
            self.__dict__["kappa0"] = _floats(self.kappa0, "kappa0")[0]
            if self.kappa0 <= 0:
                raise ConfigInvalid("`kappa0` must be positive.")
        for name in ("n", "m"):
            if getattr(self, name) is not None:
                self.__dict__[name] = _count(getattr(self, name), name, 1)
        self.__dict__["bumps"] = _count(self.bumps, "bumps", 0)
        self.__dict__["seed"] = _count(self.seed, "seed", 0)
        if not isinstance(self.params, Mapping):
            raise ConfigInvalid("`params` must be a JSON object.")

        if self.command is Command.EXPERIMENT:
            if self.name not in Scenario.REGISTERED_NAMES:
                raise ConfigInvalid(
                    f"Unknown experiment {self.name!r}. Available experiments are: {sorted(Scenario.REGISTERED_NAMES)}."
                )
        elif self.input is None:
            raise ConfigInvalid(f"The `{self.command.value}` command requires an input function.")
        elif self.input.is_trajectory and self.command is not Command.SOLVE:
            raise ConfigInvalid(
                f"Builtin {self.input.builtin!r} is only supported by the `solve` command."
            )

        uses_teeth = self.name == "example2" or (
            self.input is not None and self.input.builtin == "example2"
        )
        if uses_teeth:
            m, n = self.m or DEFAULT_TEETH[0], self.n or DEFAULT_TEETH[1]
            if m >= n:
                raise ConfigInvalid(f"The sawtooth pair requires `m < n`, got m={m!r}, n={n!r}.")

    @classmethod
    def from_spec(cls, spec: Union[ScenarioConfig, Mapping[str, Any], str, Path]) -> ScenarioConfig:
        """
        Build a configuration from a mapping or from the path of a JSON file.
        Existing configurations are returned unchanged.

        Raises:
            ConfigInvalid: If the configuration cannot be read or validated.
        """
        if isinstance(spec, ScenarioConfig):
            return spec
        if isinstance(spec, (str, Path)):
            try:
                spec = json.loads(Path(spec).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigInvalid(f"Could not read configuration from {str(spec)!r}: {e}") from e
        if not isinstance(spec, Mapping):
            raise ConfigInvalid(f"A configuration must be a JSON object, not {type(spec).__name__}.")
        if "command" not in spec:
            raise ConfigInvalid("A configuration requires a `command`.")
        unknown = set(spec) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigInvalid(f"Unknown configuration keys: {sorted(unknown)}.")

        spec = dict(spec)
        inputs = {key: spec.pop(key) for key in INPUT_KEYS if key in spec}
        other = spec.pop("other", None)
        return cls(
            input=FunctionSpec(**inputs) if inputs else None,
            other=FunctionSpec.from_mapping(other) if other is not None else None,
            **spec,
        )

    @property
    def times(self) -> Tuple[float, ...]:
        return self.t if self.t is not None else (0.0,)

    @property
    def metric_params(self) -> Optional[MetricParams]:
        return MetricParams(self.kappa0) if self.kappa0 is not None else None

    def experiment_params(self) -> Dict[str, Any]:
        params = {
            "n": self.n,
            "m": self.m,
            "t": self.t[0] if self.t is not None else None,
            "epsilon": self.eps[0] if self.eps else None,
            "kappa0": self.kappa0,
            "peakons": self.input.peakons if self.input is not None else None,
        }
        return {
            **{key: value for key, value in params.items() if value is not None},
            **self.params,
        }

    def to_dict(self) -> Dict[str, Any]:
        """
        The configuration as recorded in `result.json`. The output directory
        is left out so that results do not depend on where they are written.
        """
        return {
            "command": self.command.value,
            "input": self.input.to_dict() if self.input is not None else None,
            "other": self.other.to_dict() if self.other is not None else None,
            "name": self.name,
            "t": list(self.t) if self.t is not None else None,
            "eps": list(self.eps) if self.eps is not None else None,
            "kappa0": self.kappa0,
            "n": self.n,
            "m": self.m,
            "bumps": self.bumps,
            "seed": self.seed,
            "params": dict(self.params),
        }


# Commands


def _solution_frame(f: PiecewiseLinearFn, t: float) -> pandas.DataFrame:
    return pandas.DataFrame({"t": t, "x": f.x, "u": f.y})


def _run_solve(config: ScenarioConfig) -> ScenarioResult:
    assert config.input is not None
    result = ScenarioResult(name="solve", params=config.to_dict())
    times = config.times

    if config.input.is_trajectory:
        trajectory = Trajectory.for_name(config.input.builtin)()
        states = [trajectory.at(t) for t in times]
        energies = [state.energy() for state in states]
        result.artifacts["energy_curve"] = pandas.DataFrame({"t": times, "energy": energies})
        result.flags["witness_energy"] = all(
            abs(e - WITNESS_ENERGY) <= IDENTITY_TOLERANCE * WITNESS_ENERGY if t > 0 else e == 0
            for t, e in zip(times, energies)
        )
    else:
        st = FlowState(config.input.resolve(config.n, config.m))
        states = [st.solve(t) for t in times]
        energies = [state.energy() for state in states]
        curve = st.energy_curve(times)
        scale = IDENTITY_TOLERANCE * max(1.0, st.total_mass)
        result.artifacts["energy_curve"] = curve
        result.outputs.update(
            {
                "epochs": st.epochs.tolist(),
                "first_blowup_time": st.first_blowup_time,
            }
        )
        result.flags.update(
            {
                "energy_identity": all(
                    abs(e - st.survivor_mass(t)) <= scale for t, e in zip(times, energies)
                ),
                "energy_nonincreasing": bool(numpy.all(numpy.diff(curve["energy"]) <= scale)),
            }
        )

    result.outputs["energies"] = energies
    for i, (t, state) in enumerate(zip(times, states)):
        result.artifacts[f"solution_{i}"] = _solution_frame(state, t)
    return result


def _random_bumps(
    st: FlowState, horizon: float, count: int, seed: int
) -> Sequence[BumpTestFunction]:
    rng = numpy.random.default_rng(seed)
    first, last = st.initial.x[0], st.initial.x[-1]
    x_lo = min(first, float(st.xi(horizon, first))) - 1.0
    x_hi = max(last, float(st.xi(horizon, last))) + 1.0
    bumps = []
    for _ in range(count):
        rt = rng.uniform(0.2, 0.5)
        bumps.append(
            BumpTestFunction(
                t0=rng.uniform(rt + 0.05, horizon + rt),
                x0=rng.uniform(x_lo, x_hi),
                rt=rt,
                rx=rng.uniform(0.3, 1.5),
            )
        )
    return bumps


def _run_energy(config: ScenarioConfig) -> ScenarioResult:
    assert config.input is not None
    st = FlowState(config.input.resolve(config.n, config.m))
    result = ScenarioResult(name="energy", params=config.to_dict())
    times = sorted({0.0, *config.times})
    scale = IDENTITY_TOLERANCE * max(1.0, st.total_mass)

    atoms = dissipation_atoms(st)
    balance = balance_frame(st, times)
    released = sum(atom.mass for atom in atoms if atom.epoch <= times[-1])
    result.artifacts["atoms"] = atoms_frame(atoms)
    result.artifacts["balance"] = balance
    result.outputs.update(
        {
            "initial_energy": st.total_mass,
            "final_energy": st.solve(times[-1]).energy(),
            "released_mass": released,
            "atoms": len(atoms),
        }
    )
    result.flags.update(
        {
            "energy_balance": bool(numpy.all(numpy.abs(balance["lhs"] - balance["rhs"]) <= scale)),
            "total_balance": abs(st.total_mass - st.solve(times[-1]).energy() - released) <= scale,
        }
    )

    if config.bumps:
        horizon = max(times[-1], min(st.first_blowup_time, 2.0 * times[-1] + 2.0))
        rows = []
        for tf in _random_bumps(st, horizon, config.bumps, config.seed):
            (t1, t2), _ = tf.support
            rows.append(
                (
                    tf.t0,
                    tf.x0,
                    tf.rt,
                    tf.rx,
                    dissipation_inequality_check(st, tf, t1, t2),
                    defect_pairing(st, tf, t1, t2),
                )
            )
        residuals = pandas.DataFrame(
            rows, columns=["t0", "x0", "rt", "rx", "residual", "defect_pairing"]
        )
        result.artifacts["residuals"] = residuals
        result.outputs["min_residual"] = float(residuals["residual"].min())
        result.flags["dissipation_inequality"] = bool(
            numpy.all(residuals["residual"] >= -QUADRATURE_TOLERANCE)
        )
    return result


COMPANIONS: Dict[str, Callable[[ScenarioConfig], PiecewiseLinearFn]] = {
    "example1_u": lambda config: example1_v(config.n or DEFAULT_CELLS),
    "example1_v": lambda config: example1_u(config.n or DEFAULT_CELLS),
    "example2": lambda config: sawtooth(config.n or DEFAULT_TEETH[1]),
}


def _run_distance(config: ScenarioConfig) -> ScenarioResult:
    assert config.input is not None
    u = config.input.resolve(config.n, config.m)
    if config.other is not None:
        v = config.other.resolve(config.n, config.m)
    elif config.input.builtin in COMPANIONS:
        v = COMPANIONS[config.input.builtin](config)
    else:
        raise ConfigInvalid("The `distance` command requires an `other` function.")

    teeth = config.input.builtin == "example2" and config.other is None
    m, n = config.m or DEFAULT_TEETH[0], config.n or DEFAULT_TEETH[1]
    epsilons = config.eps or ((1.0 / (8 * n),) if teeth else (DEFAULT_EPSILON,))
    mp = config.metric_params or MetricParams.for_energy(max(u.energy(), v.energy()))
    st_u, st_v = FlowState(u), FlowState(v)

    result = ScenarioResult(name="distance", params=config.to_dict())
    rows = []
    outcome = None
    for t in config.times:
        su, sv = st_u.solve(t), st_v.solve(t)
        for epsilon in epsilons:
            outcome = j_upper_dp(su, sv, epsilon, mp)
            rows.append(
                (
                    t,
                    epsilon,
                    outcome.value,
                    mp.slack(epsilon),
                    len(outcome.plan.matches),
                    len(outcome.plan.discarded_u),
                    len(outcome.plan.discarded_v),
                )
            )
    distances = pandas.DataFrame(
        rows,
        columns=["t", "epsilon", "value", "slack", "matched", "discarded_u", "discarded_v"],
    )
    result.artifacts["distance"] = distances
    result.outputs.update({"values": distances["value"].tolist(), "kappa0": mp.kappa0})

    assert outcome is not None
    j, k = outcome.plan.matches[:, 0], outcome.plan.matches[:, 1]
    a, b = outcome.atoms_u, outcome.atoms_v
    result.artifacts["matching"] = pandas.DataFrame(
        {
            "j": j,
            "k": k,
            "x_u": a.x[j],
            "u_u": a.u[j],
            "w_u": a.w[j],
            "x_v": b.x[k],
            "u_v": b.u[k],
            "w_v": b.w[k],
        }
    )

    result.artifacts["atoms_u"] = a.to_frame()
    result.artifacts["atoms_v"] = b.to_frame()

    if teeth:
        bound = lower_bound(m, n)
        if 0.0 in config.times:
            initial = distances[distances["t"] == 0.0]["value"].tolist()
        else:
            initial = [j_upper_dp(u, v, epsilon, mp).value for epsilon in epsilons]
        result.outputs["lower_bound"] = bound
        result.outputs["initial_values"] = initial
        result.flags["lower_bound"] = bool(numpy.all(numpy.asarray(initial) >= bound))
    return result


def _run_experiment(config: ScenarioConfig) -> ScenarioResult:
    scenario = Scenario.for_name(config.name)()
    try:
        result = scenario.run(config.experiment_params())
    except HSFlowError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigInvalid(f"Invalid parameters for experiment `{config.name}`: {e}") from e
    result.params = {**result.params, "config": config.to_dict()}
    return result


RUNNERS: Dict[Command, Callable[[ScenarioConfig], ScenarioResult]] = {
    Command.SOLVE: _run_solve,
    Command.ENERGY: _run_energy,
    Command.DISTANCE: _run_distance,
    Command.EXPERIMENT: _run_experiment,
}


def run(config: Union[ScenarioConfig, Mapping[str, Any], str, Path]) -> int:
    """
    Run a scenario and write its results.

    Returns:
        The exit status: 0 if every check passed, 1 if a check failed or the
        computation broke down, 2 if the configuration is invalid.
    """
    try:
        config = ScenarioConfig.from_spec(config)
        result = RUNNERS[config.command](config)
    except (ConfigInvalid, BlowupBeforeT, ImplementationNotFound) as e:
        logger.error("Invalid configuration: %s", e)
        return EXIT_CONFIG_INVALID
    except HSFlowError as e:
        logger.error("Scenario failed: %s", e)
        return EXIT_CONTRACT_FAILED

    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "result.json", result.to_dict())
    for name, frame in sorted(result.artifacts.items()):
        write_csv(out / f"{name}.csv", frame)
    logger.info("Wrote %d tables for `%s` to %s.", len(result.artifacts), result.name, out)

    try:
        result.check()
    except ContractFailed as e:
        logger.error("%s", e)
        return EXIT_CONTRACT_FAILED
    return EXIT_OK


def configure_logging() -> None:
    """
    Send `hsflow` log records to stderr at the level named by `HSFLOW_LOG`
    (default `WARNING`).

    Raises:
        ConfigInvalid: If `HSFLOW_LOG` names an unknown level.
    """
    level = os.environ.get(LOG_ENV_VAR, "WARNING").strip().upper()
    if level not in LOG_LEVELS:
        raise ConfigInvalid(
            f"`{LOG_ENV_VAR}` must be one of {', '.join(LOG_LEVELS)}, not {level!r}."
        )
    root = logging.getLogger("hsflow")
    root.setLevel(level)
    if not any(handler.get_name() == LOG_HANDLER_NAME for handler in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.set_name(LOG_HANDLER_NAME)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="hsflow",
        description="Exact dissipative solutions and transport distances for piecewise-linear data.",
    )
    parser.add_argument("--config", required=True, type=Path, help="Scenario configuration (JSON).")
    parser.add_argument("--out", type=Path, help="Output directory; overrides `out` in the configuration.")
    parser.add_argument("--seed", type=int, help="Random seed; overrides `seed` in the configuration.")
    args = parser.parse_args(argv)

    try:
        configure_logging()
        config = ScenarioConfig.from_spec(args.config)
        overrides: Dict[str, Any] = {}
        if args.out is not None:
            overrides["out"] = str(args.out)
        if args.seed is not None:
            overrides["seed"] = args.seed
        config = replace(config, **overrides)
    except ConfigInvalid as e:
        print(f"hsflow: {e}", file=sys.stderr)
        return EXIT_CONFIG_INVALID
    return run(config)
