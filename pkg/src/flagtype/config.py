"""Run-configuration files: a flat key/value format with typed blocks.

Top-level lines are `key = value` pairs; `[section]` opens a block.
Matrix blocks ([generator], [rays]) hold one row of decimal numbers per
line, row-major.  [sampling] and [thresholds] blocks hold key/value
pairs.  The format is diff-friendly and round-trips exactly: numbers are
written with 17 significant digits.

Example::

    n = 3
    seed = 7
    variant = cone

    [rays]
    1 0 0
    0 1 0
    0 0 1
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .estimator import Thresholds
from .semigroups import ConeCompression, FinitelyGenerated, SamplingParams

_SAMPLING_KEYS = {
    "samples_per_length": int,
    "length_min": int,
    "length_max": int,
    "regularity_budget": int,
    "proposal_scale": float,
    "rejection_budget": int,
}
_THRESHOLD_KEYS = {
    "slope_min_fraction": float,
    "floor_nats": float,
}


@dataclass
class RunConfig:
    """Validated contents of a configuration file."""

    n: int
    seed: int
    variant: str
    rays: list = field(default_factory=list)
    generators: list = field(default_factory=list)
    epsilon: float = 1e-3
    sampling: SamplingParams = field(default_factory=SamplingParams)
    thresholds: Thresholds = field(default_factory=Thresholds)
    out_stem: str = "flagtype"

    def to_spec(self):
        if self.variant == "cone":
            return ConeCompression(self.rays)
        return FinitelyGenerated(self.generators, self.epsilon)

    def __eq__(self, other):
        if not isinstance(other, RunConfig):
            return NotImplemented
        return (
            self.n == other.n
            and self.seed == other.seed
            and self.variant == other.variant
            and len(self.rays) == len(other.rays)
            and all(np.array_equal(a, b) for a, b in zip(self.rays, other.rays))
            and len(self.generators) == len(other.generators)
            and all(
                np.array_equal(a, b)
                for a, b in zip(self.generators, other.generators)
            )
            and self.epsilon == other.epsilon
            and self.sampling == other.sampling
            and self.thresholds == other.thresholds
            and self.out_stem == other.out_stem
        )


def _num(text):
    return "%.17g" % float(text)


def _parse_number(token, lineno, what):
    try:
        return float(token)
    except ValueError:
        raise ConfigError("%s: not a number: %r" % (what, token), lineno)


def _parse_int(token, lineno, what):
    try:
        return int(token)
    except ValueError:
        raise ConfigError("%s: not an integer: %r" % (what, token), lineno)


def parse_config(text):
    """Parse configuration text into a RunConfig."""
    top = {}
    sampling = {}
    thresholds = {}
    rays = []
    generators = []
    matrix_rows = None
    section = None

    def close_matrix(lineno):
        nonlocal matrix_rows
        if matrix_rows is None:
            return
        if not matrix_rows:
            raise ConfigError("empty [%s] block" % section, lineno)
        widths = {len(r) for r in matrix_rows}
        if len(widths) != 1:
            raise ConfigError("ragged rows in [%s] block" % section, lineno)
        if section == "rays":
            rays.extend(np.asarray(r) for r in matrix_rows)
        else:
            generators.append(np.asarray(matrix_rows))
        matrix_rows = None

    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            close_matrix(lineno)
            section = line[1:-1].strip().lower()
            if section not in ("rays", "generator", "sampling", "thresholds"):
                raise ConfigError("unknown section [%s]" % section, lineno)
            if section in ("rays", "generator"):
                matrix_rows = []
            continue
        if section in ("rays", "generator"):
            tokens = line.replace(",", " ").split()
            matrix_rows.append(
                [_parse_number(t, lineno, "[%s] row" % section) for t in tokens]
            )
            continue
        if "=" not in line:
            raise ConfigError("expected key = value, got %r" % line, lineno)
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if section == "sampling":
            if key not in _SAMPLING_KEYS:
                raise ConfigError("unknown sampling field %r" % key, lineno)
            if key in sampling:
                raise ConfigError("duplicate sampling field %r" % key, lineno)
            caster = _SAMPLING_KEYS[key]
            sampling[key] = (
                _parse_int(value, lineno, key)
                if caster is int
                else _parse_number(value, lineno, key)
            )
        elif section == "thresholds":
            if key not in _THRESHOLD_KEYS:
                raise ConfigError("unknown thresholds field %r" % key, lineno)
            if key in thresholds:
                raise ConfigError("duplicate thresholds field %r" % key, lineno)
            thresholds[key] = _parse_number(value, lineno, key)
        elif section is None:
            if key in top:
                raise ConfigError("duplicate field %r" % key, lineno)
            top[key] = (value, lineno)
        else:
            raise ConfigError("key/value outside its section: %r" % key, lineno)
    close_matrix(lineno)

    if "n" not in top:
        raise ConfigError("missing required field 'n'")
    if "seed" not in top:
        raise ConfigError("missing required field 'seed' (no wall-clock default)")
    if "variant" not in top:
        raise ConfigError("missing required field 'variant'")
    n = _parse_int(*top["n"], what="n")
    seed = _parse_int(*top["seed"], what="seed")
    variant = top["variant"][0].lower()
    if variant not in ("cone", "generators"):
        raise ConfigError(
            "variant must be 'cone' or 'generators', got %r" % variant,
            top["variant"][1],
        )
    if n < 2:
        raise ConfigError("n must be >= 2", top["n"][1])

    epsilon = 1e-3
    if "epsilon" in top:
        epsilon = _parse_number(*top["epsilon"], what="epsilon")
    out_stem = top.get("out_stem", ("flagtype", 0))[0]

    known = {"n", "seed", "variant", "epsilon", "out_stem"}
    for key, (_, lineno) in top.items():
        if key not in known:
            raise ConfigError("unknown field %r" % key, lineno)

    if variant == "cone":
        if generators:
            raise ConfigError("cone variant does not take [generator] blocks")
        if not rays:
            raise ConfigError("cone variant requires a [rays] block")
        for r in rays:
            if r.shape[0] != n:
                raise ConfigError("ray of length %d, expected %d" % (r.shape[0], n))
    else:
        if rays:
            raise ConfigError("generators variant does not take a [rays] block")
        if not generators:
            raise ConfigError("generators variant requires [generator] blocks")
        for g in generators:
            if g.shape != (n, n):
                raise ConfigError(
                    "generator of shape %s, expected (%d, %d)" % (g.shape, n, n)
                )

    try:
        params = SamplingParams(**sampling)
        thr = Thresholds(**thresholds)
    except Exception as exc:
        raise ConfigError(str(exc))

    return RunConfig(
        n=n,
        seed=seed,
        variant=variant,
        rays=rays,
        generators=generators,
        epsilon=epsilon,
        sampling=params,
        thresholds=thr,
        out_stem=out_stem,
    )


def parse_config_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError("cannot read %s: %s" % (path, exc))


def serialize_config(cfg):
    """Canonical text form; parses back to an equal RunConfig."""
    lines = [
        "n = %d" % cfg.n,
        "seed = %d" % cfg.seed,
        "variant = %s" % cfg.variant,
    ]
    if cfg.variant == "generators":
        lines.append("epsilon = %s" % _num(cfg.epsilon))
    if cfg.out_stem != "flagtype":
        lines.append("out_stem = %s" % cfg.out_stem)
    if cfg.variant == "cone":
        lines.append("")
        lines.append("[rays]")
        for r in cfg.rays:
            lines.append(" ".join(_num(v) for v in r))
    else:
        for g in cfg.generators:
            lines.append("")
            lines.append("[generator]")
            for row in g:
                lines.append(" ".join(_num(v) for v in row))
    lines.append("")
    lines.append("[sampling]")
    s = cfg.sampling
    lines.append("samples_per_length = %d" % s.samples_per_length)
    lines.append("length_min = %d" % s.length_min)
    lines.append("length_max = %d" % s.length_max)
    lines.append("regularity_budget = %d" % s.regularity_budget)
    lines.append("proposal_scale = %s" % _num(s.proposal_scale))
    lines.append("rejection_budget = %d" % s.rejection_budget)
    lines.append("")
    lines.append("[thresholds]")
    t = cfg.thresholds
    lines.append("slope_min_fraction = %s" % _num(t.slope_min_fraction))
    lines.append("floor_nats = %s" % _num(t.floor_nats))
    lines.append("")
    return "\n".join(lines)


def config_to_dict(cfg):
    """JSON-ready echo of a RunConfig."""
    out = {
        "n": cfg.n,
        "seed": cfg.seed,
        "variant": cfg.variant,
        "sampling": {
            "samples_per_length": cfg.sampling.samples_per_length,
            "length_min": cfg.sampling.length_min,
            "length_max": cfg.sampling.length_max,
            "regularity_budget": cfg.sampling.regularity_budget,
            "proposal_scale": float("%.17g" % cfg.sampling.proposal_scale),
            "rejection_budget": cfg.sampling.rejection_budget,
        },
        "thresholds": {
            "slope_min_fraction": float("%.17g" % cfg.thresholds.slope_min_fraction),
            "floor_nats": float("%.17g" % cfg.thresholds.floor_nats),
        },
        "out_stem": cfg.out_stem,
    }
    if cfg.variant == "cone":
        out["rays"] = [[float("%.17g" % v) for v in r] for r in cfg.rays]
    else:
        out["epsilon"] = float("%.17g" % cfg.epsilon)
        out["generators"] = [
            [[float("%.17g" % v) for v in row] for row in g] for g in cfg.generators
        ]
    return out
