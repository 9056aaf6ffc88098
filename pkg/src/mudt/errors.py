"""Exception types. Every error carries a stable ``code`` string."""


class MudtError(ValueError):
    code = "E_MUDT"

    def __init__(self, message, code=None, line=None):
        if code is not None:
            self.code = code
        self.line = line
        self.message = message
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{self.code}: {message}")


class ConlluError(MudtError):
    """Malformed CoNLL-U input. ``line`` is 1-based when known."""

    code = "E_FORMAT"


class TreeError(MudtError):
    code = "E_TREE"


class SchemaError(MudtError):
    code = "E_UNKNOWN_LABEL"


class PairingError(MudtError):
    code = "E_PAIRING"


class TransformError(MudtError):
    code = "E_TREE"
