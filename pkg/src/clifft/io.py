"""JSON forms for signals, spectra and distribution specs.

Blade order inside every coefficient list is ascending bitmask. Floats go
through ``repr`` so a dump/load cycle is lossless.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import Signature, as_signature
from .probability import (
    CliffordDensity,
    Exponential,
    Gaussian,
    InvalidDensity,
    Sampled,
    SmoothedUniform,
    Uniform,
)
from .transform import SampledSignal, Spectrum


class FormatError(ValueError):
    pass


def _signature(doc: dict) -> Signature:
    try:
        return as_signature(doc["signature"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad or missing signature: {exc}") from exc


def signal_to_json(f: SampledSignal) -> dict:
    return {
        "signature": [f.signature.p, f.signature.q],
        "x0": float(f.x0),
        "dx": float(f.dx),
        "values": f.values.tolist(),
    }


def signal_from_json(doc: dict) -> SampledSignal:
    sig = _signature(doc)
    try:
        return SampledSignal(sig, float(doc["x0"]), float(doc["dx"]), np.asarray(doc["values"], dtype=float))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed signal: {exc}") from exc


def spectrum_to_json(s: Spectrum) -> dict:
    doc = {
        "signature": [s.signature.p, s.signature.q],
        "xi0": float(s.xi0),
        "dxi": float(s.dxi),
        "values": s.values.tolist(),
    }
    if s.x0 is not None:
        doc["x0"] = float(s.x0)
    return doc


def spectrum_from_json(doc: dict) -> Spectrum:
    sig = _signature(doc)
    try:
        x0 = doc.get("x0")
        return Spectrum(
            sig,
            float(doc["xi0"]),
            float(doc["dxi"]),
            np.asarray(doc["values"], dtype=float),
            x0=None if x0 is None else float(x0),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed spectrum: {exc}") from exc


def _component(spec: dict):
    kind = spec.get("kind")
    try:
        if kind == "uniform":
            return Uniform(float(spec["alpha"]), float(spec["beta"]))
        if kind == "gaussian":
            return Gaussian(float(spec["lambda"]))
        if kind == "exponential":
            return Exponential(float(spec["lambda"]))
        if kind == "smoothed_uniform":
            return SmoothedUniform(float(spec["alpha"]), float(spec["beta"]), float(spec["sigma"]))
        if kind == "sampled":
            return Sampled(float(spec["x0"]), float(spec["dx"]), np.asarray(spec["values"], dtype=float))
    except KeyError as exc:
        raise FormatError(f"{kind} blade is missing {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidDensity):
            raise
        raise FormatError(f"bad {kind} parameters: {exc}") from exc
    raise FormatError(f"unknown distribution kind {kind!r}")


def _component_to_json(c) -> dict:
    if isinstance(c, Uniform):
        return {"kind": "uniform", "alpha": c.alpha, "beta": c.beta}
    if isinstance(c, Gaussian):
        return {"kind": "gaussian", "lambda": c.lam}
    if isinstance(c, Exponential):
        return {"kind": "exponential", "lambda": c.lam}
    if isinstance(c, SmoothedUniform):
        return {"kind": "smoothed_uniform", "alpha": c.alpha, "beta": c.beta, "sigma": c.sigma}
    return {"kind": "sampled", "x0": c.x0, "dx": c.dx, "values": c.values.tolist()}


def density_from_json(doc: dict) -> CliffordDensity:
    sig = _signature(doc)
    blades = doc.get("blades")
    if not isinstance(blades, dict):
        raise FormatError("distribution file needs a 'blades' object")
    comps = {}
    for key, spec in blades.items():
        try:
            blade = int(key)
        except ValueError:
            raise FormatError(f"blade key {key!r} is not a bitmask integer") from None
        if not isinstance(spec, dict):
            raise FormatError(f"blade {key} must map to an object")
        comps[blade] = _component(spec)
    return CliffordDensity(sig, comps)


def density_to_json(d: CliffordDensity) -> dict:
    return {
        "signature": [d.signature.p, d.signature.q],
        "blades": {str(b): _component_to_json(c) for b, c in d.components.items()},
    }


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def read_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def write_json(path: str | Path, doc: Any) -> None:
    Path(path).write_text(dumps(doc))
