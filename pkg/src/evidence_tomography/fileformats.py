"""JSON documents read and written by the command-line tool.

Density matrix::

    {"dim": d, "re": [[...], ...], "im": [[...], ...]}      ("im" optional)

Observable set (a list, or ``{"observables": [...], "r": int}``)::

    [{"label": "S0x", "pauli_terms": [{"string": "XIII", "coeff": 0.5}]},
     {"label": "G1", "re": [[...]], "im": [[...]]}, ...]

Dataset::

    {"N": 10000, "seed": 7, "means": [{"label": "S0x", "value": 0.01}, ...]}

Non-finite floats are written as the strings ``"inf"``, ``"-inf"`` and
``"nan"`` so that every document is strict JSON.
"""

from __future__ import annotations

import itertools
import json
import math
from pathlib import Path

import numpy as np

from .exceptions import TomographyError
from .maxent import ObservableSet
from .operators import DensityMatrix, HermitianOperator, pauli_operator
from .simulate import MeasurementDataset


class FormatError(TomographyError, ValueError):
    """Malformed input file; the message names the file and the offending field."""


def read_json(path):
    path = Path(path)
    if not path.is_file():
        raise FormatError(f"{path}: no such file")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def dumps(doc) -> str:
    return json.dumps(_plain(doc), indent=2, allow_nan=False) + "\n"


def write_json(path, doc):
    Path(path).write_text(dumps(doc))


def to_float(value, where: str) -> float:
    """Parse a number, accepting the non-finite string spellings."""
    if isinstance(value, str) and value in ("inf", "-inf", "nan"):
        return float(value)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _matrix(doc, where, dim=None):
    if not isinstance(doc, dict):
        raise FormatError(f"{where}: expected an object")
    if "re" not in doc:
        raise FormatError(f"{where}: missing field 're'")
    parts = []
    for key in ("re", "im"):
        rows = doc.get(key)
        if rows is None:
            parts.append(None)
            continue
        if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
            raise FormatError(f"{where}.{key}: expected a list of rows")
        n = len(rows)
        if dim is not None and n != dim:
            raise FormatError(f"{where}.{key}: has {n} rows, expected {dim}")
        for i, row in enumerate(rows):
            if len(row) != n:
                raise FormatError(f"{where}.{key}[{i}]: has {len(row)} entries, expected {n}")
        parts.append(
            np.array([[to_float(v, f"{where}.{key}[{i}][{j}]") for j, v in enumerate(row)]
                      for i, row in enumerate(rows)])
        )
    re, im = parts
    if im is None:
        im = np.zeros_like(re)
    if im.shape != re.shape:
        raise FormatError(f"{where}: 're' and 'im' differ in shape")
    return re + 1j * im


def parse_density_matrix(doc, where="state") -> DensityMatrix:
    if not isinstance(doc, dict) or "dim" not in doc:
        raise FormatError(f"{where}: missing field 'dim'")
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise FormatError(f"{where}.dim: expected a positive integer")
    m = _matrix(doc, where, dim)
    try:
        return DensityMatrix(m, doc.get("label"))
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def density_matrix_to_doc(rho: DensityMatrix) -> dict:
    m = rho.matrix
    return {"dim": rho.dim, "re": m.real.tolist(), "im": m.imag.tolist()}


def parse_observables(doc, where="observables") -> ObservableSet:
    r = None
    if isinstance(doc, dict):
        r = doc.get("r")
        doc = doc.get("observables")
    if not isinstance(doc, list) or not doc:
        raise FormatError(f"{where}: expected a non-empty list")
    ops, labels = [], []
    for k, item in enumerate(doc):
        at = f"{where}[{k}]"
        if not isinstance(item, dict) or "label" not in item:
            raise FormatError(f"{at}: missing field 'label'")
        labels.append(str(item["label"]))
        if "pauli_terms" in item:
            terms = item["pauli_terms"]
            if not isinstance(terms, list) or not terms:
                raise FormatError(f"{at}.pauli_terms: expected a non-empty list")
            total = None
            for t, term in enumerate(terms):
                tat = f"{at}.pauli_terms[{t}]"
                if not isinstance(term, dict) or "string" not in term or "coeff" not in term:
                    raise FormatError(f"{tat}: needs 'string' and 'coeff'")
                try:
                    op = pauli_operator(term["string"], to_float(term["coeff"], f"{tat}.coeff"))
                except (ValueError, AttributeError) as exc:
                    raise FormatError(f"{tat}.string: {exc}") from exc
                if total is not None and op.dim != total.shape[0]:
                    raise FormatError(f"{tat}.string: length differs from earlier terms")
                total = op.matrix if total is None else total + op.matrix
            ops.append(HermitianOperator(total))
        else:
            ops.append(HermitianOperator(_matrix(item, at)))
    try:
        return ObservableSet(ops, labels, r)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def pauli_decompose(op: HermitianOperator, tol: float = 1e-14) -> list[dict]:
    """Real Pauli-string expansion of a qubit operator."""
    m = op.num_qubits
    if m is None:
        raise ValueError("Pauli expansion needs a power-of-two dimension")
    terms = []
    for letters in itertools.product("IXYZ", repeat=m):
        s = "".join(letters)
        coeff = np.einsum("ij,ji->", pauli_operator(s).matrix, op.matrix).real / op.dim
        if abs(coeff) > tol:
            terms.append({"string": s, "coeff": float(coeff)})
    return terms


def observables_to_doc(obs: ObservableSet, pauli: bool = True) -> list:
    out = []
    for op in obs:
        if pauli and op.num_qubits is not None:
            out.append({"label": op.label, "pauli_terms": pauli_decompose(op)})
        else:
            m = op.matrix
            out.append({"label": op.label, "re": m.real.tolist(), "im": m.imag.tolist()})
    return out


def parse_dataset(doc, observables: ObservableSet, where="data") -> MeasurementDataset:
    """Read a dataset and align its means with ``observables`` by label."""
    if not isinstance(doc, dict):
        raise FormatError(f"{where}: expected an object")
    n = doc.get("N")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise FormatError(f"{where}.N: expected a positive integer, got {n!r}")
    seed = doc.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise FormatError(f"{where}.seed: expected an integer or null")
    entries = doc.get("means")
    if not isinstance(entries, list):
        raise FormatError(f"{where}.means: expected a list")
    values = {}
    for k, e in enumerate(entries):
        at = f"{where}.means[{k}]"
        if not isinstance(e, dict) or "label" not in e or "value" not in e:
            raise FormatError(f"{at}: needs 'label' and 'value'")
        if e["label"] in values:
            raise FormatError(f"{at}.label: duplicate label {e['label']!r}")
        values[e["label"]] = to_float(e["value"], f"{at}.value")
    missing = [s for s in observables.labels if s not in values]
    extra = [s for s in values if s not in observables.labels]
    if missing:
        raise FormatError(f"{where}.means: no value for observables {missing}")
    if extra:
        raise FormatError(f"{where}.means: unknown observables {extra}")
    means = np.array([values[s] for s in observables.labels])
    return MeasurementDataset(observables.labels, means, n, seed, doc.get("truth_label"))


def dataset_to_doc(ds: MeasurementDataset) -> dict:
    doc = {
        "N": ds.N,
        "seed": ds.seed,
        "means": [{"label": s, "value": float(v)} for s, v in zip(ds.labels, ds.means)],
    }
    if ds.truth_label:
        doc["truth_label"] = ds.truth_label
    return doc


def report_to_doc(report, observables: ObservableSet) -> dict:
    """Flat document mirroring an :class:`~evidence_tomography.evidence.EvidenceReport`."""
    sc = report.scalars
    return {
        "status": report.status.value,
        "flags": [f.value for f in report.flags],
        "S_data": sc.S_data,
        "N_min": sc.N_min,
        "alpha0": sc.alpha0,
        "beta": sc.beta,
        "criterion": sc.criterion,
        "variance": sc.variance,
        "posterior_mean_check": sc.posterior_mean_check,
        "alpha0_range_ratio": sc.alpha0_range_ratio,
        "N": sc.N,
        "r": sc.r,
        "n": sc.n,
        "labels": list(observables.labels),
        "lambda": report.data_state.lagrange,
        "lambda_e": report.lambda_e,
        "error_measured": report.error_measured,
        "error_unmeasured": report.error_unmeasured,
        "per_observable_stderr": report.per_observable_stderr,
        "estimate": density_matrix_to_doc(report.estimate),
    }
