"""Simplex-based linear programming."""

from .duality import CertificateReport, check_certificates, dual_of
from .model import (EQ, GE, LE, CanonicalMap, InequalitySystem, LinearProgram, VariableMap,
                    from_arrays, full_inequality_system, to_canonical_form, to_standard_form)
from .simplex import (EPS, Dictionary, Infeasible, Phase1Outcome, SolveResult, Status, phase1,
                      phase2, pivot, solve)
from .textformat import LPFormatError, format_lp, parse_lp, read_lp
from .unimodular import TUResult, is_totally_unimodular

__all__ = [
    "EQ", "GE", "LE", "EPS", "CanonicalMap", "CertificateReport", "Dictionary", "Infeasible",
    "InequalitySystem", "LPFormatError", "LinearProgram", "Phase1Outcome", "SolveResult",
    "Status", "TUResult", "VariableMap", "check_certificates", "dual_of", "format_lp",
    "from_arrays", "full_inequality_system", "is_totally_unimodular", "parse_lp", "phase1",
    "phase2", "pivot", "read_lp", "solve", "to_canonical_form", "to_standard_form",
]
