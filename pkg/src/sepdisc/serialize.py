"""JSON payloads and schema validation for every public object.

Complex scalars serialize as [re, im] pairs; matrices flatten row-major.
An operator payload is {"dims": [d1, ..., dm], "entries": [[re, im], ...]}
with total^2 entries, a vector payload uses "amplitudes" with total
entries. Schemas ship with the package and every payload builder here has
a matching schema file of the same name.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Sequence

import jsonschema
import numpy as np

from .cones import BlockPositivityVerdict, EwVerdict, ProductOperatorSum
from .discrimination import DiscriminationResult
from .ensembles import Ensemble, Measurement
from .errors import PreconditionError
from .operators import Dims, HermitianOperator, ProductVector, StateVector
from .sep_bounds import DualAnalysis, VerificationReport


def _pairs(flat: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in flat]


def _unpairs(pairs: Sequence[Sequence[float]]) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise PreconditionError("expected a list of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def operator_to_payload(op: HermitianOperator) -> dict:
    return {"dims": list(op.dims), "entries": _pairs(op.entries.ravel())}


def operator_from_payload(payload: dict) -> HermitianOperator:
    dims = Dims.of(payload["dims"])
    flat = _unpairs(payload["entries"])
    if flat.size != dims.total**2:
        raise PreconditionError(
            "operator payload has %d entries for total %d" % (flat.size, dims.total)
        )
    return HermitianOperator(dims, flat.reshape(dims.total, dims.total))


def vector_to_payload(vec: StateVector) -> dict:
    return {"dims": list(vec.dims), "amplitudes": _pairs(vec.amplitudes)}


def vector_from_payload(payload: dict) -> StateVector:
    dims = Dims.of(payload["dims"])
    amps = _unpairs(payload["amplitudes"])
    if amps.size != dims.total:
        raise PreconditionError(
            "vector payload has %d amplitudes for total %d" % (amps.size, dims.total)
        )
    return StateVector(dims, amps)


def product_vector_to_payload(pv: ProductVector) -> dict:
    return {"dims": list(pv.dims), "locals": [_pairs(v) for v in pv.locals]}


def product_vector_from_payload(payload: dict) -> ProductVector:
    return ProductVector([_unpairs(v) for v in payload["locals"]])


def product_operator_sum_to_payload(s: ProductOperatorSum) -> dict:
    return {
        "dims": list(s.dims),
        "terms": [[_pairs(f.ravel()) for f in term] for term in s.terms],
    }


def product_operator_sum_from_payload(payload: dict) -> ProductOperatorSum:
    dims = Dims.of(payload["dims"])
    terms = []
    for term in payload["terms"]:
        if len(term) != dims.m:
            raise PreconditionError(
                "term has %d factors for %d parties" % (len(term), dims.m)
            )
        factors = []
        for d, block in zip(dims, term):
            flat = _unpairs(block)
            if flat.size != d * d:
                raise PreconditionError(
                    "local factor has %d entries for dimension %d" % (flat.size, d)
                )
            factors.append(flat.reshape(d, d))
        terms.append(factors)
    return ProductOperatorSum(dims, terms)


def ensemble_to_payload(ensemble: Ensemble) -> dict:
    return {
        "states": [
            {"eta": float(eta), "rho": operator_to_payload(rho)}
            for eta, rho in ensemble.states
        ]
    }


def ensemble_from_payload(payload: dict) -> Ensemble:
    return Ensemble(
        [(s["eta"], operator_from_payload(s["rho"])) for s in payload["states"]]
    )


def measurement_to_payload(measurement: Measurement) -> dict:
    payload = {
        "elements": [operator_to_payload(el) for el in measurement.elements],
        "certificates": None,
    }
    if measurement.certificates is not None:
        payload["certificates"] = [
            product_operator_sum_to_payload(c) for c in measurement.certificates
        ]
    return payload


def measurement_from_payload(payload: dict) -> Measurement:
    elements = [operator_from_payload(el) for el in payload["elements"]]
    certs = payload.get("certificates")
    if certs is not None:
        certs = [product_operator_sum_from_payload(c) for c in certs]
    return Measurement(elements, certificates=certs)


def verdict_to_payload(verdict: BlockPositivityVerdict) -> dict:
    payload = {
        "status": verdict.status,
        "min_value": float(verdict.min_value),
        "restarts_used": int(verdict.restarts_used),
        "witness": None,
    }
    if verdict.witness is not None:
        payload["witness"] = product_vector_to_payload(verdict.witness)
    return payload


def ew_verdict_to_payload(verdict: EwVerdict) -> dict:
    payload = {
        "is_ew": bool(verdict.is_ew),
        "min_eigenvalue": float(verdict.min_eigenvalue),
        "block_positivity": verdict_to_payload(verdict.block_positivity),
        "violating_state": None,
    }
    if verdict.violating_state is not None:
        payload["violating_state"] = vector_to_payload(verdict.violating_state)
    return payload


def dual_analysis_to_payload(analysis: DualAnalysis) -> dict:
    return {
        "feasible": analysis.feasible,
        "witnessed": analysis.witnessed,
        "ew_indices": list(analysis.ew_indices),
        "trace": float(analysis.trace),
        "min_eigenvalues": [float(w) for w in analysis.min_eigenvalues],
        "per_state": [verdict_to_payload(v) for v in analysis.per_state],
        "exact": list(analysis.exact),
        "certified": analysis.certified,
    }


def discrimination_result_to_payload(result: DiscriminationResult) -> dict:
    return {
        "p_value": float(result.p_value),
        "measurement": measurement_to_payload(result.measurement),
        "residual_min_eigs": [float(w) for w in result.residual_min_eigs],
        "iterations": int(result.iterations),
        "converged": bool(result.converged),
    }


def verification_report_to_payload(report: VerificationReport) -> dict:
    return {
        "check": report.check,
        "holds": report.holds,
        "certified": report.certified,
        "p_sep": None if report.p_sep is None else float(report.p_sep),
        "gap_certified": report.gap_certified,
        "details": _plain(report.details),
    }


def _plain(obj):
    """Recursive conversion of numpy scalars and arrays for json.dump."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    return obj


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    """Load a shipped schema by bare name, e.g. "ensemble"."""
    path = resources.files("sepdisc.schemas").joinpath(name + ".schema.json")
    return json.loads(path.read_text(encoding="utf-8"))


def validate_payload(payload: dict, schema_name: str) -> None:
    """Raise jsonschema.ValidationError unless payload matches the schema."""
    jsonschema.validate(payload, load_schema(schema_name))


def write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_plain(payload), fh, indent=2)
        fh.write("\n")


def read_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
