"""Regenerate the JSON fixtures in this directory.

    python tests/fixtures/generate.py
"""

from pathlib import Path

import numpy as np

from evidence_tomography.fileformats import (
    dataset_to_doc,
    density_matrix_to_doc,
    dumps,
    observables_to_doc,
)
from evidence_tomography.fourqubit import prior_state
from evidence_tomography.qubits import isotropic_targets
from evidence_tomography.simulate import MeasurementDataset

HERE = Path(__file__).parent


def _dataset(labels, means, N, seed=None):
    return dataset_to_doc(MeasurementDataset(tuple(labels), np.asarray(means), N, seed))


def fixture_documents():
    prior = prior_state(-0.02)
    obs = prior.observables
    prior_doc = density_matrix_to_doc(prior.state)
    prior_doc["label"] = "isotropic c=-0.02"
    data = isotropic_targets(4, -0.025)
    out_of_spectrum = data.copy()
    out_of_spectrum[0] = 0.7
    docs = {
        "fourqubit_prior.json": prior_doc,
        "fourqubit_observables.json": observables_to_doc(obs),
        "fourqubit_data.json": _dataset(obs.labels, data, 10_000),
        "fourqubit_data_small_N.json": _dataset(obs.labels, data, 3_000),
        "fourqubit_data_matches_prior.json": _dataset(
            obs.labels, obs.expectations(prior.state), 10_000
        ),
        "fourqubit_data_out_of_spectrum.json": _dataset(obs.labels, out_of_spectrum, 10_000),
        "qubit_pure_prior.json": {"dim": 2, "re": [[1.0, 0.0], [0.0, 0.0]], "im": [[0.0, 0.0], [0.0, 0.0]]},
        "qubit_observables.json": [{"label": "Z", "pauli_terms": [{"string": "Z", "coeff": 1.0}]}],
        "qubit_data.json": _dataset(["Z"], [0.6], 100),
    }
    return {name: dumps(doc) for name, doc in docs.items()}


if __name__ == "__main__":
    for name, text in fixture_documents().items():
        (HERE / name).write_text(text)
        print("wrote", name)
