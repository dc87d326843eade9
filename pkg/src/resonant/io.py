"""JSON and CSV formats for supports, states, trajectories and reports."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from typing import Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .cascade import ComponentPlacement, GenerationFamily, GrowthTable
from .dynamics import SpectrumState, Trajectory
from .lattice import ResonantQuadruple, SupportSet


class FormatError(ValueError):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _load(text_or_obj):
    if isinstance(text_or_obj, (str, bytes)):
        try:
            return json.loads(text_or_obj)
        except json.JSONDecodeError as exc:
            raise FormatError(f"malformed JSON: {exc}") from exc
    return text_or_obj


def _points(raw, dim=None):
    try:
        pts = [tuple(int(c) if float(c) == int(c) else _bad(c) for c in p) for p in raw]
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad point list: {exc}") from exc
    return pts


def _bad(c):
    raise FormatError(f"non-integer coordinate {c!r}")


# -- supports and quadruples


def support_to_obj(support: SupportSet) -> dict:
    return {"dim": support.dim, "points": [list(p) for p in support.points]}


def support_from_obj(obj) -> SupportSet:
    obj = _load(obj)
    if not isinstance(obj, dict) or "dim" not in obj or "points" not in obj:
        raise FormatError('support JSON needs "dim" and "points"')
    pts = _points(obj["points"])
    try:
        return SupportSet(pts, dim=int(obj["dim"]))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def quadruples_to_obj(quads: Iterable[ResonantQuadruple]) -> list:
    return [[list(x) for x in q] for q in quads]


def quadruples_from_obj(obj) -> list:
    return [ResonantQuadruple(*(tuple(x) for x in q)) for q in _load(obj)]


# -- states


def state_to_obj(state: SpectrumState) -> dict:
    return {
        "dim": state.dim,
        "modes": [
            {"p": list(p), "re": float(a.real), "im": float(a.imag)}
            for p, a in zip(state.support.points, state.values)
        ],
    }


def state_from_obj(obj) -> SpectrumState:
    obj = _load(obj)
    if not isinstance(obj, dict) or "dim" not in obj or "modes" not in obj:
        raise FormatError('state JSON needs "dim" and "modes"')
    try:
        pts = _points([m["p"] for m in obj["modes"]])
        vals = [complex(float(m.get("re", 0.0)), float(m.get("im", 0.0))) for m in obj["modes"]]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad mode entry: {exc}") from exc
    if len(set(pts)) != len(pts):
        raise FormatError("duplicate mode in state")
    try:
        return SpectrumState.from_mapping(dict(zip(pts, vals)), dim=int(obj["dim"]))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


# -- families and placements


def family_to_obj(family: GenerationFamily) -> dict:
    return {"N": family.N, "generations": [[list(p) for p in g] for g in family.generations]}


def family_from_obj(obj) -> GenerationFamily:
    obj = _load(obj)
    gens = [_points(g) for g in obj["generations"]]
    if "N" in obj and int(obj["N"]) != len(gens):
        raise FormatError(f"N={obj['N']} but {len(gens)} generations given")
    return GenerationFamily(gens)


def placement_to_obj(pl: ComponentPlacement) -> dict:
    return {
        "v": list(pl.v),
        "lambda": pl.lam,
        "support": support_to_obj(pl.support),
        "initial": state_to_obj(pl.initial),
    }


def placement_from_obj(obj) -> ComponentPlacement:
    obj = _load(obj)
    try:
        return ComponentPlacement(
            v=tuple(int(c) for c in obj["v"]),
            support=support_from_obj(obj["support"]),
            lam=float(obj.get("lambda", 1.0)),
            initial=state_from_obj(obj["initial"]),
        )
    except KeyError as exc:
        raise FormatError(f"placement JSON missing {exc}") from exc


# -- CSV


def header_line(config: dict, seed: Optional[int] = None) -> str:
    """``# resonant <version> config=<sha256 prefix> seed=<seed>``."""
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    digest = hashlib.sha256(blob).hexdigest()[:16]
    return f"# resonant {__version__} config={digest} seed={seed if seed is not None else 'none'}"


def trajectory_csv(traj: Trajectory, watch: Sequence = (), meta: Optional[str] = None) -> str:
    d = traj.support.dim
    cols = ["t", "mass"] + [f"mom_{j + 1}" for j in range(d)] + ["energy", "hamiltonian"]
    widx = []
    for p in watch:
        p = tuple(p)
        widx.append(traj.support.index(p))
        tag = "_".join(str(c) for c in p)
        cols += [f"abs_{tag}", f"arg_{tag}"]
    lines = [meta] if meta else []
    lines.append(",".join(cols))
    mods = np.abs(traj.values[:, widx])
    args = np.angle(traj.values[:, widx])
    for k, (t, rep) in enumerate(zip(traj.times, traj.reports)):
        row = [t, rep.mass, *rep.momentum, rep.energy, rep.hamiltonian]
        for m, a in zip(mods[k], args[k]):
            row += [m, a]
        lines.append(",".join(fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def planar_csv(times, phi, r, h, meta: Optional[str] = None) -> str:
    lines = [meta] if meta else []
    lines.append("t,phi,r,h")
    for row in zip(times, phi, r, h):
        lines.append(",".join(fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def growth_csv(table: GrowthTable, meta: Optional[str] = None) -> str:
    ncomp = table.masses.shape[1] if table.masses.ndim == 2 else 0
    lines = [meta] if meta else []
    lines.append(",".join(["t", "hs_norm"] + [f"mass_component_{j + 1}" for j in range(ncomp)]))
    for row in table.rows():
        lines.append(",".join(fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def read_csv(text: str) -> tuple:
    """(header columns, float array), skipping '#' lines."""
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    cols = rows[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in rows[1:]]).reshape(len(rows) - 1, len(cols))
    return cols, data


def dumps(obj) -> str:
    return json.dumps(obj, indent=None, separators=(",", ":"), default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not serializable: {type(o)}")


def write_atomic(path: str, text: str) -> None:
    """Write UTF-8/LF text via a temp file in the target directory and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
