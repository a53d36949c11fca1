class IntegrationError(FloatingPointError):
    """The integrated state stopped being finite.

    ``step`` is the index of the failing step; callers attach the time.
    """

    def __init__(self, message: str, step: int = -1, time: float | None = None):
        super().__init__(message)
        self.step = step
        self.time = time
