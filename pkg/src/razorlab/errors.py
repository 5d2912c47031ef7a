"""Exception types shared across the package."""


class RazorlabError(Exception):
    """Base class for all package errors."""


class MalformedCode(RazorlabError):
    """A bit string does not parse as a term code.

    `offset` is the bit position at which parsing failed.
    """

    def __init__(self, offset, reason="malformed code"):
        self.offset = offset
        self.reason = reason
        super().__init__(f"{reason} at bit {offset}")


class NotAList(RazorlabError):
    """A normal-form term does not have the bit-list shape."""


class NotFound(RazorlabError):
    """Search exhausted its frontier without a witness.

    Not a proof of absence: shorter programs may exist beyond the
    searched lengths or past the gas budget.
    """

    def __init__(self, max_len, gas):
        self.max_len = max_len
        self.gas = gas
        super().__init__(f"no witness up to length {max_len} at gas {gas}")


class WitnessMissing(RazorlabError):
    """A construction needs a witness program that is not available."""


class ZeroVotes(RazorlabError):
    """A census returned zero resolved votes for a candidate."""

    def __init__(self, candidate, n):
        self.candidate = candidate
        self.n = n
        super().__init__(f"no votes for {candidate!r} at n={n}")


class BudgetExceeded(RazorlabError):
    """The demand-tree work estimate exceeded the configured node cap."""


class CycleDetected(RazorlabError):
    """Registering a definition would create a dependency cycle."""


class UnknownDep(RazorlabError):
    """A definition or manifest references a name not in the registry."""


class DuplicateName(RazorlabError):
    """A definition with this name is already registered."""


class InvalidPrecision(RazorlabError):
    """A numeric-constant precision spec is unusable."""
