"""Exception types raised by the solver, estimator and oracles.

Every error carries the CLI exit code it maps to, so the command-line front
end can translate exceptions without a lookup table.
"""


class PortfolioError(ValueError):
    """Base class for all input and degeneracy errors."""

    exit_code = 3

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self)}


class DimensionMismatch(PortfolioError):
    exit_code = 2


class ParseError(PortfolioError):
    """Malformed input file."""

    exit_code = 2


class NotSpd(PortfolioError):
    """Covariance matrix failed the positive-definite factorization."""

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}

    def to_dict(self):
        out = super().to_dict()
        if self.diagnostic:
            out["diagnostic"] = self.diagnostic
        return out


class EqualConsecutiveMeans(PortfolioError):
    """Two adjacent means (in solver order) coincide, so the recursion breaks down."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(
            message or f"consecutive expected returns coincide at recursion index {index}"
        )

    def to_dict(self):
        out = super().to_dict()
        out["index"] = self.index
        return out


class DegenerateNormalization(PortfolioError):
    pass


class DegenerateDenominator(PortfolioError):
    pass


class StationaryPointNotMax(PortfolioError):
    """The budget-constrained stationary point does not maximize Q.

    ``weights`` is the stationary point; ``candidates`` maps the name of each
    competing portfolio to its weights.
    """

    exit_code = 4

    def __init__(self, message, weights, candidates, trace=None):
        super().__init__(message)
        self.weights = weights
        self.candidates = candidates
        self.trace = trace

    def to_dict(self):
        out = super().to_dict()
        out["weights"] = [float(x) for x in self.weights]
        out["candidates"] = {k: [float(x) for x in v] for k, v in self.candidates.items()}
        return out
