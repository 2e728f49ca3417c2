"""faultscope: model-based diagnosis under the weak fault model.

Minimal conflicts and diagnoses for component systems described as
propositional constraints, plus sequential (query-driven) fault isolation.
"""

from .bruteforce import (
    brute_force_minimal_conflicts,
    brute_force_minimal_diagnoses,
    minimal_hitting_sets,
)
from .circuits import (
    ActualWorld,
    CircuitSpec,
    Gate,
    encode_circuit_to_dpi,
    parse_circuit_dsl,
    random_faulty_instance,
)
from .dpi import Atom, Clause, Dpi, dpi_from_json, dpi_to_json, load_dpi_json, prior_product, save_dpi_json, unit
from .msmp import Conflict, Diagnosis, invqx_min_diagnosis, quickxplain_min_conflict
from .reasoner import Reasoner, SolverStats, check_consistent, entails

__all__ = [
    "ActualWorld",
    "Atom",
    "CircuitSpec",
    "Clause",
    "Conflict",
    "Diagnosis",
    "Dpi",
    "Gate",
    "Reasoner",
    "SolverStats",
    "brute_force_minimal_conflicts",
    "brute_force_minimal_diagnoses",
    "check_consistent",
    "dpi_from_json",
    "dpi_to_json",
    "encode_circuit_to_dpi",
    "entails",
    "invqx_min_diagnosis",
    "load_dpi_json",
    "minimal_hitting_sets",
    "parse_circuit_dsl",
    "prior_product",
    "quickxplain_min_conflict",
    "random_faulty_instance",
    "save_dpi_json",
    "unit",
]

__version__ = "0.1.0"
