"""Line-oriented IFS configuration files.

Grammar, one directive per line, ``#`` starts a comment::

    domain <dim> <lo_1..lo_dim> <hi_1..hi_dim>
    map <name> affine <a> <b>                       # 1D: a x + b
    map <name> affine <a11> <a12> <a21> <a22> <b1> <b2>
    map <name> pwl (x0,y0) (x1,y1) ...
    map <name> quad <a> <b> <c>                     # a x^2 + b x + c
    map <name> compose <name> <name> ...            # first name is applied last
    ifs <name> <name> ...                           # members, default: every map in order
    weights <p1> .. <pk>
    grid <cells> | grid <nx> <ny>
    tol <value>

Numbers may be written as fractions such as ``2/3``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import ConfigError, DomainError
from .maps import Affine, Composite, IFSystem, PiecewiseLinear1D, Quadratic1D, format_number, map_to_grammar
from .sets import BoxDomain

DEFAULT_1D = 2 ** 14
DEFAULT_2D = 1024
VERTEX = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")


@dataclass(frozen=True)
class RunConfig:
    """Experiment settings; ``None`` fields fall back to per-command defaults."""

    source: str = ""
    resolution: tuple | None = None
    tol: float | None = None
    steps: int | None = None
    seed: int = 0
    out: str = "."
    max_len: int | None = None
    override_hypothesis: bool = False

    def grid_resolution(self, dimension):
        if self.resolution is not None:
            return self.resolution
        return (DEFAULT_1D,) if dimension == 1 else (DEFAULT_2D, DEFAULT_2D)

    def validate(self, domain):
        res = self.grid_resolution(domain.dimension)
        if len(res) != domain.dimension:
            raise ConfigError(f"grid has {len(res)} axes, domain has {domain.dimension}")
        if domain.dimension == 1:
            n = res[0]
            if n < 2 ** 8 or n > 2 ** 20 or n & (n - 1):
                raise ConfigError(f"1D grid must be a power of two in [2^8, 2^20], got {n}")
        elif any(n < 1 or n > 2048 for n in res):
            raise ConfigError(f"2D grid axes must lie in [1, 2048], got {res}")
        if self.tol is not None:
            widths = domain.widths / res
            if self.tol < widths.min() * (1 - 1e-12):
                raise ConfigError(f"tol {self.tol:g} is below one cell width {widths.min():g}")
        return self


def parse_number(tok, line=None):
    try:
        if "/" in tok:
            return float(Fraction(tok))
        return float(tok)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad number {tok!r}", line) from None


def _numbers(toks, line):
    return [parse_number(t, line) for t in toks]


def _parse_map(kind, args, rest, named, dim, line):
    if kind == "affine":
        v = _numbers(args, line)
        if dim == 1 and len(v) == 2:
            return Affine(v[0], v[1])
        if dim == 2 and len(v) == 6:
            return Affine([[v[0], v[1]], [v[2], v[3]]], [v[4], v[5]])
        raise ConfigError(f"affine map in {dim}D needs {2 if dim == 1 else 6} numbers, got {len(v)}", line)
    if kind == "pwl":
        verts = VERTEX.findall(rest)
        leftover = VERTEX.sub("", rest).strip()
        if leftover or len(verts) < 2:
            raise ConfigError("pwl needs at least two vertices written as (x,y)", line)
        try:
            return PiecewiseLinear1D([(parse_number(a, line), parse_number(b, line)) for a, b in verts])
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(str(e), line) from None
    if kind == "quad":
        v = _numbers(args, line)
        if len(v) != 3:
            raise ConfigError(f"quad needs 3 coefficients, got {len(v)}", line)
        return Quadratic1D(*v)
    if kind == "compose":
        if not args:
            raise ConfigError("compose needs at least one map name", line)
        missing = [a for a in args if a not in named]
        if missing:
            raise ConfigError(f"compose refers to undefined map(s) {missing}", line)
        return Composite([named[a] for a in args])
    raise ConfigError(f"unknown map kind {kind!r}", line)


def parse_config(text, base=None):
    """Parse a config file; returns ``(RunConfig, IFSystem)``."""
    base = base or RunConfig()
    domain = None
    named = {}
    members = None
    weights = None
    weights_line = None
    resolution = base.resolution
    tol = base.tol
    for n, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        toks = body.split()
        key, args = toks[0], toks[1:]
        if key == "domain":
            if domain is not None:
                raise ConfigError("domain given twice", n)
            if not args:
                raise ConfigError("domain needs a dimension", n)
            try:
                dim = int(args[0])
            except ValueError:
                raise ConfigError(f"bad dimension {args[0]!r}", n) from None
            vals = _numbers(args[1:], n)
            if dim not in (1, 2) or len(vals) != 2 * dim:
                raise ConfigError(f"domain needs dimension 1 or 2 and {2 * dim} bounds", n)
            try:
                domain = BoxDomain(vals[:dim], vals[dim:])
            except ValueError as e:
                raise ConfigError(str(e), n) from None
        elif key == "map":
            if domain is None:
                raise ConfigError("map before domain", n)
            if len(args) < 2:
                raise ConfigError("map needs a name and a kind", n)
            name, kind = args[0], args[1]
            if name in named:
                raise ConfigError(f"map {name!r} defined twice", n)
            rest = body.split(None, 3)[3] if len(toks) > 3 else ""
            try:
                f = _parse_map(kind, args[2:], rest, named, domain.dimension, n)
            except ConfigError:
                raise
            except ValueError as e:
                raise ConfigError(f"map {name!r}: {e}", n) from None
            if f.dim != domain.dimension:
                raise ConfigError(f"map {name!r} has dimension {f.dim}, domain has {domain.dimension}", n)
            named[name] = f
        elif key == "ifs":
            if not args:
                raise ConfigError("ifs needs member names", n)
            members = (args, n)
        elif key == "weights":
            weights, weights_line = _numbers(args, n), n
        elif key == "grid":
            try:
                resolution = tuple(int(a) for a in args)
            except ValueError:
                raise ConfigError(f"bad grid {' '.join(args)!r}", n) from None
            if not resolution:
                raise ConfigError("grid needs a cell count", n)
        elif key == "tol":
            if len(args) != 1:
                raise ConfigError("tol takes one value", n)
            tol = parse_number(args[0], n)
        else:
            raise ConfigError(f"unknown directive {key!r}", n)
    if domain is None:
        raise ConfigError("no domain directive")
    if not named:
        raise ConfigError("no maps defined")
    if members is None:
        names = list(named)
    else:
        names, line = members
        missing = [m for m in names if m not in named]
        if missing:
            raise ConfigError(f"ifs refers to undefined map(s) {missing}", line)
    if weights is not None:
        if len(weights) != len(names):
            raise ConfigError(f"{len(weights)} weights for {len(names)} maps", weights_line)
        if any(w <= 0 for w in weights):
            raise ConfigError("weights must be positive", weights_line)
        if abs(sum(weights) - 1) > 1e-12:
            raise ConfigError(f"weights sum {sum(weights):.12g}", weights_line)
    try:
        S = IFSystem(domain, [named[m] for m in names], weights=weights, names=names)
    except DomainError as e:
        raise ConfigError(str(e)) from None
    cfg = replace(base, resolution=resolution, tol=tol).validate(domain)
    return cfg, S


def load_config(path, base=None):
    with open(path) as fh:
        text = fh.read()
    return parse_config(text, replace(base or RunConfig(), source=str(path)))


def config_text(S, resolution=None, tol=None, header=None):
    """Config text that parses back to an IFS equal to ``S``."""
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    d = S.domain
    bounds = " ".join(format_number(v) for v in list(d.lower) + list(d.upper))
    lines.append(f"domain {d.dimension} {bounds}")
    names = {}
    used = set(S.names)

    def emit(f, name):
        if isinstance(f, Composite):
            for j, g in enumerate(f.maps):
                if id(g) not in names:
                    sub = f"{name}_{j + 1}"
                    while sub in used:
                        sub += "_"
                    used.add(sub)
                    emit(g, sub)
        lines.append(f"map {name} {map_to_grammar(f, names)}")
        names[id(f)] = name

    for name, f in zip(S.names, S.maps):
        emit(f, name)
    if len(names) != S.k:
        lines.append("ifs " + " ".join(S.names))
    if S.weights is not None:
        lines.append("weights " + " ".join(format_number(w) for w in S.weights))
    if resolution is not None:
        lines.append("grid " + " ".join(str(r) for r in resolution))
    if tol is not None:
        lines.append(f"tol {format_number(tol)}")
    return "\n".join(lines) + "\n"
