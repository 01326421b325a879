from app.models.lucas_seq import LucasSeq
from app.models.newform import CurveModEll, CurveModel, NewformEigenData
from app.models.poly import BivariatePoly
from app.models.qexpansion import FactorBudget, Factorization, PFResult, QExpansion
from app.models.sieve import SieveKind, SieveProblem, SieveResult
from app.models.thue import TMInstance, TMSolution

__all__ = [
    "BivariatePoly",
    "CurveModEll",
    "CurveModel",
    "FactorBudget",
    "Factorization",
    "LucasSeq",
    "NewformEigenData",
    "PFResult",
    "QExpansion",
    "SieveKind",
    "SieveProblem",
    "SieveResult",
    "TMInstance",
    "TMSolution",
]
