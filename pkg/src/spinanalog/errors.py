"""Exception types raised across the package."""


class SpinAnalogError(Exception):
    pass


class NonUnitHiddenQuaternion(SpinAnalogError, ValueError):
    pass


class DegenerateSpinor(SpinAnalogError, ValueError):
    pass


class NotNormalized(SpinAnalogError, ValueError):
    pass


class OutOfDomain(SpinAnalogError, ValueError):
    pass


class StepTooLarge(SpinAnalogError, ValueError):
    pass


class JumpNotOnGrid(SpinAnalogError, ValueError):
    pass


class NonFinite(SpinAnalogError, ArithmeticError):
    pass


class SingularModeBasis(SpinAnalogError, ArithmeticError):
    pass


class BadAxis(SpinAnalogError, ValueError):
    pass


class TooShort(SpinAnalogError, ValueError):
    pass


class DegenerateGeometry(SpinAnalogError, ValueError):
    pass


class ConfigInvalid(SpinAnalogError, ValueError):
    """Scenario config failed validation; ``path`` names the offending key."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class IntegrationFailed(SpinAnalogError, RuntimeError):
    pass
