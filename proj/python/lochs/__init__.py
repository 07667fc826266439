"""Direct integrals of coordinate Hilbert chains.

Thin wrapper over the compiled core: numerical kernels (Hermitian and joint
diagonalization, commutant bases, level seminorms) and the report commands
(validate, classify, commutant, commutant-equality, disintegrate) operating
on system JSON documents.
"""

import json as _json

from ._core import (
    LochsError,
    commutant_solve,
    hermitian_eig,
    is_local_family,
    joint_diagonalize,
    operator_norm,
    run,
    seminorm,
)

__version__ = "0.1.0"

__all__ = [
    "LochsError",
    "commutant_solve",
    "hermitian_eig",
    "is_local_family",
    "joint_diagonalize",
    "operator_norm",
    "run",
    "seminorm",
    "run_report",
]


def run_report(command, system, name="", level=1, out_path="", tolerances=None):
    """Run a command and return (report_dict, exit_code).

    ``system`` may be a dict or a JSON string; ``tolerances`` an optional dict
    overriding tolerance fields for this run.
    """
    if not isinstance(system, str):
        system = _json.dumps(system)
    tol_json = "" if tolerances is None else _json.dumps(tolerances)
    text, code = run(command, system, name, level, out_path, tol_json)
    return _json.loads(text), code
