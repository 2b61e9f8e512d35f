class SpectralLabError(Exception):
    pass


class ParameterError(SpectralLabError, ValueError):
    pass


class HypothesisError(ParameterError):
    def __init__(self, statement: str, condition: str) -> None:
        super().__init__(f"{statement} requires {condition}")
        self.statement = statement
        self.condition = condition


class InconsistentDatumError(ParameterError):
    pass


class QuadratureConvergenceError(SpectralLabError, ArithmeticError):
    def __init__(self, value: float, error: float, tolerance: float) -> None:
        super().__init__(
            f"Quadrature did not converge: value={value:.6e}, "
            f"error estimate={error:.3e}, tolerance={tolerance:.1e}"
        )
        self.value = value
        self.error = error
        self.tolerance = tolerance


class ConfigError(SpectralLabError):
    pass
