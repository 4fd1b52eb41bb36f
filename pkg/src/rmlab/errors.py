"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A caller supplied a malformed or out-of-contract argument."""


class DecompositionError(RuntimeError):
    """A dense decomposition failed to converge or returned inconsistent output.

    ``converged`` carries the size of the partially converged block when the
    backend reports one, otherwise ``None``.
    """

    def __init__(self, message: str, converged=None):
        super().__init__(message)
        self.converged = converged
