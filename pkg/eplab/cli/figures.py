"""
Figure presets.

One table holds every reproducible figure: its label, title, family and
fixed parameters. Free choices such as the sign and the window are recorded
in the emitted metadata.
"""
import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, Optional, Tuple

from eplab.core.errors import InvalidParameterError
from eplab.core.schemas import Branch, EPParams, ReidParams, Sign
from eplab.cli.export import SampleSeries, sample_series
from eplab.modules.chiellini import dissipation_along
from eplab.modules.reid import REFERENCE_CONSTANTS, reference_u_m, v_m

logger = logging.getLogger(__name__)

PAIR = "pair"
MODULUS = "modulus"
GFUNC = "gfunc"


@dataclass(frozen=True)
class FigurePreset:
    figure_id: int
    label: str
    caption: str
    kind: str
    branch: Branch
    m: int = 2
    lambda2: Optional[float] = None
    sign: Sign = Sign.PLUS
    window: Tuple[float, float] = (0.0, 6.0)

    def parameter_set(self) -> str:
        if self.kind == GFUNC:
            return f"lambda^2 = {self.lambda2:g}, c = c1 = 1, sign {self.sign.value}"
        I_bc, b, c = REFERENCE_CONSTANTS[self.branch]
        lam = "lambda^2 = 0" if self.branch is Branch.ZERO else "lambda = 1/2"
        return f"m = {self.m}, {lam}, a = b = c~ = 1, I_bc = {I_bc:g}, b = {b:g}, c = {c:g}, sign {self.sign.value}"

    @property
    def title(self) -> str:
        """Figure number, label, caption and the full parameter set"""
        return f"Figure {self.figure_id} ({self.label}): {self.caption}; {self.parameter_set()}"


FIGURES: Dict[int, FigurePreset] = {
    1: FigurePreset(
        1, "fig-e1",
        "Negative branch pair u, v",
        PAIR, Branch.NEGATIVE, m=2, sign=Sign.MINUS,
    ),
    2: FigurePreset(
        2, "fig-e2",
        "Negative branch moduli |u|^2, |v|^2",
        MODULUS, Branch.NEGATIVE, m=3, sign=Sign.MINUS,
    ),
    3: FigurePreset(
        3, "fig-e3",
        "Positive branch pair u, v",
        PAIR, Branch.POSITIVE, m=2,
    ),
    4: FigurePreset(
        4, "fig-e4",
        "Positive branch moduli |u|^2, |v|^2",
        MODULUS, Branch.POSITIVE, m=3,
    ),
    5: FigurePreset(
        5, "fig-e5",
        "Positive branch moduli |u|^2, |v|^2",
        MODULUS, Branch.POSITIVE, m=4,
    ),
    6: FigurePreset(
        6, "fig-e0",
        "Zero branch pair u, v",
        PAIR, Branch.ZERO, m=2, window=(-3.0, 3.0),
    ),
    7: FigurePreset(
        7, "fig-e6",
        "Gain function g along v",
        GFUNC, Branch.NEGATIVE, lambda2=-0.25,
    ),
    8: FigurePreset(
        8, "fig-e7",
        "Gain function g along v",
        GFUNC, Branch.POSITIVE, lambda2=0.25,
    ),
    9: FigurePreset(
        9, "fig-e8",
        "Gain function g along v",
        GFUNC, Branch.ZERO, lambda2=0.0,
    ),
}


def get_preset(figure_id: int) -> FigurePreset:
    try:
        return FIGURES[figure_id]
    except KeyError:
        raise InvalidParameterError(f"unknown figure id {figure_id}; choose from {sorted(FIGURES)}")


def _modulus_square(f: Callable[[float], complex]) -> Callable[[float], complex]:
    return lambda zeta: abs(f(zeta)) ** 2


def figure_evaluators(preset: FigurePreset) -> Dict[str, Callable[[float], complex]]:
    if preset.kind == GFUNC:
        p = EPParams(lambda2=preset.lambda2, c=1.0, c1=1.0, sign=preset.sign)
        return {"g": dissipation_along(p)}

    u = reference_u_m(preset.m, preset.branch, preset.sign)
    v = v_m(ReidParams(m=preset.m, branch=preset.branch))
    if preset.kind == MODULUS:
        return {"u": _modulus_square(u), "v": _modulus_square(v)}
    return {"u": u, "v": v}


def figure_metadata(preset: FigurePreset) -> Dict[str, str]:
    meta = {
        "figure": str(preset.figure_id),
        "label": preset.label,
        "caption": preset.title,
        "kind": preset.kind,
        "branch": preset.branch.value,
        "sign": preset.sign.value,
        "zeta_window": f"{preset.window[0]:g},{preset.window[1]:g}",
    }
    if preset.kind == GFUNC:
        meta.update({"lambda2": f"{preset.lambda2:g}", "c": "1", "c1": "1"})
    else:
        I_bc, b, c = REFERENCE_CONSTANTS[preset.branch]
        meta.update({"m": str(preset.m), "lambda": "0.5", "I_bc": f"{I_bc:g}", "b": f"{b:g}", "c": f"{c:g}"})
    return meta


def build_figure(figure_id: int, samples: int = 601, window: Optional[Tuple[float, float]] = None) -> SampleSeries:
    """
    Sample a preset. Points outside the real domain (singular g, complex
    phase arguments) are written as nan.
    """
    preset = get_preset(figure_id)
    if window is not None:
        preset = replace(preset, window=window)
    logger.info(f"Building figure {figure_id} ({preset.label}) on {preset.window}")
    return sample_series(
        figure_evaluators(preset), preset.window, samples,
        metadata=figure_metadata(preset), on_error="nan",
    )
