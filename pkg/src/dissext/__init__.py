"""Dissipative and accretive extensions: finite-dimensional criterion,
a singular first-order operator on (0, 1), the half-line Schrödinger
operator, and discretized cross-checks."""

__version__ = "0.1.0"

from .criterion import (CheckReport, ExtensionSpec, PartialOperator,
                        assemble_criterion, criterion_check, oracle_check)
from .errors import (ConditionFailed, DomainViolation, NotInWStarDomain,
                     TruncationTooSmall, UnstableNullity)
from .first_order import dissipativity_check, wstar_domain_test
from .funcspace import FuncExpr, integrate, inner_product
from .schrodinger import PotentialSpec, accretive_check, krein_form, solve_eta

__all__ = [
    "CheckReport", "ExtensionSpec", "PartialOperator", "assemble_criterion",
    "criterion_check", "oracle_check", "ConditionFailed", "DomainViolation",
    "NotInWStarDomain", "TruncationTooSmall", "UnstableNullity",
    "dissipativity_check", "wstar_domain_test", "FuncExpr", "integrate",
    "inner_product", "PotentialSpec", "accretive_check", "krein_form", "solve_eta",
]
