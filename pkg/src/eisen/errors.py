"""Exception types shared across the package."""


class EisenError(Exception):
    """Base class for all package errors."""


class FactorTooHard(EisenError):
    """A composite cofactor above the configured bound could not be split."""

    def __init__(self, cofactor):
        super().__init__(f"could not split composite cofactor {cofactor}")
        self.cofactor = cofactor


class RankDeficient(EisenError):
    """A lattice that must have full rank does not."""


class ParseError(EisenError, ValueError):
    """Malformed polynomial or field descriptor."""


class FieldRejected(EisenError):
    """The defining polynomial cannot be used as a monogenic number field."""


class NotMaximalAtP(FieldRejected):
    """Z[theta] is not p-maximal, so Dedekind splitting would be wrong."""

    def __init__(self, p, poly=None):
        msg = f"Z[theta] is not {p}-maximal"
        if poly is not None:
            msg += f" for f = {poly}"
        super().__init__(msg + "; this field is not supported")
        self.p = p


class ResidueFieldTooLarge(EisenError):
    """Residue field too large to enumerate."""


class LeadingCoefficientZero(EisenError, ValueError):
    """Polynomial has a zero leading coefficient where degree d is required."""


class TailDiverges(EisenError):
    """The requested quantity is an infinite (divergent) series."""


class DensityZero(EisenError, ZeroDivisionError):
    """Restricted quantity requested while the density lower bound is not positive."""


class BudgetExceeded(EisenError):
    """Work requested exceeds the configured budget."""
