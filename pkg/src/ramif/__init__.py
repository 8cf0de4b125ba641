"""Exact ramification filtrations for differential forms and Witt vectors along t = 0."""

from .algebra import Poly, Ring, TLaurent
from .dilatation import (DilatationModel, additive_decompose, as_member, build_model, chi, delta,
                         model_for, oracle_charform, psi_extract)
from .errors import (CharacteristicError, MembershipError, NonAdditiveError, NotAUnitError,
                     PrecisionError, RamifError, SchemaError, WittExactnessError)
from .forms import (CharForm, DiffForm, FormSpace, HomValue, ResidueForm, charform_omega,
                    diagonal_decomposition, koszul_partial, omega_conductor, omega_fas_member,
                    restrict_to_curve, xi)
from .harness import SUITES, SuiteReport, replay, run_suite
from .witt import (FDecomposedWitt, Fd, WittVector, bk_conductor, bk_log_member, charform_h1,
                   charform_witt, fsat_conductor, fsat_member, matsuda_conductor, matsuda_member)

__all__ = [
    "Poly",
    "Ring",
    "TLaurent",
    "DilatationModel",
    "additive_decompose",
    "as_member",
    "build_model",
    "chi",
    "delta",
    "model_for",
    "oracle_charform",
    "psi_extract",
    "CharacteristicError",
    "MembershipError",
    "NonAdditiveError",
    "NotAUnitError",
    "PrecisionError",
    "RamifError",
    "SchemaError",
    "WittExactnessError",
    "CharForm",
    "DiffForm",
    "FormSpace",
    "HomValue",
    "ResidueForm",
    "charform_omega",
    "diagonal_decomposition",
    "koszul_partial",
    "omega_conductor",
    "omega_fas_member",
    "restrict_to_curve",
    "xi",
    "SUITES",
    "SuiteReport",
    "replay",
    "run_suite",
    "FDecomposedWitt",
    "Fd",
    "WittVector",
    "bk_conductor",
    "bk_log_member",
    "charform_h1",
    "charform_witt",
    "fsat_conductor",
    "fsat_member",
    "matsuda_conductor",
    "matsuda_member",
]

__version__ = "0.1.0"
