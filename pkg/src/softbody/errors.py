"""Error type shared across the simulation packages."""


class SoftbodyError(ValueError):
    """Raised for contract violations, carrying a stable machine-readable code.

    Codes are short kebab-case strings (e.g. ``"empty-body"``,
    ``"unknown-integrator"``) that callers and the wire protocol can match on
    without parsing the human-readable message.
    """

    def __init__(self, code: str, message: str = ""):
        self.code = code
        super().__init__(message or code)
