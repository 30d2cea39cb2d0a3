from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Union

ParamValue = Union[int, float, str]


@dataclass(frozen=True)
class ResultRow:
    """One measured quantity of one experiment.

    `passed` is None for informational rows (no bound to check) and for audits
    whose samples were all inconclusive. `sweep` names the parameter used as the
    x column in the plot data file.
    """

    experiment: str
    params: tuple[tuple[str, ParamValue], ...]
    value: float
    bound: float | None = None
    passed: bool | None = None
    ms: float | None = None
    sweep: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", tuple(sorted(self.params)))

    @property
    def param_dict(self) -> dict[str, ParamValue]:
        return dict(self.params)

    @property
    def sort_key(self) -> tuple:
        return (self.experiment, tuple((k, _orderable(v)) for k, v in self.params))

    def timed(self, ms: float) -> ResultRow:
        return replace(self, ms=ms)


def _orderable(value: ParamValue) -> tuple[int, float | str]:
    if isinstance(value, str):
        return (1, value)
    return (0, float(value))


def row(
    experiment: str,
    value: float,
    *,
    bound: float | None = None,
    passed: bool | None = None,
    sweep: str | None = None,
    **params: ParamValue,
) -> ResultRow:
    return ResultRow(
        experiment=experiment,
        params=tuple(params.items()),
        value=float(value),
        bound=None if bound is None else float(bound),
        passed=None if passed is None else bool(passed),
        sweep=sweep,
    )
