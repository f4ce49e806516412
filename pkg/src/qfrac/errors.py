"""Exception hierarchy shared by every qfrac module.

Every exception carries a stable ``code`` string; the CLI reports it verbatim
so that scripts can match on it.
"""


class QFracError(Exception):
    code = "QFracError"

    def __init__(self, message, *, flag=None):
        super().__init__(message)
        self.flag = flag


class DomainError(QFracError, ValueError):
    code = "DomainError"


class PoleError(DomainError):
    code = "PoleError"


class PochhammerPole(PoleError):
    code = "PochhammerPole"


class DenominatorPole(PoleError):
    code = "DenominatorPole"


class NonRealPrefactor(DomainError):
    code = "NonRealPrefactor"


class InvalidScan(DomainError):
    code = "InvalidScan"


class DivergencePolicyExceeded(QFracError, ArithmeticError):
    code = "DivergencePolicyExceeded"


class DivergentSeries(QFracError, ArithmeticError):
    code = "DivergentSeries"


class SeriesDivergence(DivergentSeries):
    code = "SeriesDivergence"


class ResonanceError(QFracError, ArithmeticError):
    code = "ResonanceError"


class UnknownIdentity(QFracError, KeyError):
    code = "UnknownIdentity"

    def __str__(self):
        return self.args[0] if self.args else ""
