"""Exception taxonomy. Every error carries a machine-readable ``code``."""


class PolydistError(Exception):
    code = "polydist_error"

    def to_dict(self):
        return {"code": self.code, "message": str(self)}


class InvalidInput(PolydistError, ValueError):
    code = "invalid_input"


class NonFiniteInput(InvalidInput):
    code = "non_finite_input"


class SingularLeadingCoefficient(InvalidInput):
    code = "leading_coefficient_singular"


class ProblemFormatError(InvalidInput):
    code = "problem_format"

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field

    def to_dict(self):
        d = super().to_dict()
        d["field"] = self.field
        return d


class NonHermitian(PolydistError, ValueError):
    code = "non_hermitian"


class AlreadyMultiple(PolydistError):
    """s* vanishes: mu already has geometric multiplicity >= 2."""

    code = "mu_already_multiple"


class DegenerateGamma(PolydistError):
    code = "gamma_star_zero"


class NotCoalesced(PolydistError):
    code = "not_coalesced"


class HigherCoalescence(PolydistError):
    code = "coalescence_multiplicity_gt_2"


class BranchPairingInconsistent(PolydistError):
    code = "branch_pairing_inconsistent"


class DefiniteForm(PolydistError):
    code = "form_definite"


class CorrectionFailed(PolydistError):
    code = "correction_failed"
