"""Exception types shared across the package."""


class PirLabError(Exception):
    """Base class for package errors."""


class ParameterError(PirLabError, ValueError):
    """A scheme or CLI parameter is out of range or inconsistent."""


class ProtocolError(PirLabError, RuntimeError):
    """Answers handed to a decoder do not fit the scheme's shape."""


class VerificationError(PirLabError, RuntimeError):
    """An audited quantity disagrees with its closed-form target."""


class StateCapError(PirLabError, RuntimeError):
    """Exact enumeration would exceed the configured state cap."""

    def __init__(self, required: int, cap: int):
        super().__init__(
            f"exact enumeration needs {required} states, above the cap of "
            f"{cap}; raise --cap or PIR_LAB_CAP to proceed"
        )
        self.required = required
        self.cap = cap
