"""Exception types. Every error carries a short machine-readable ``code``."""


class FockQuantError(Exception):
    code = "E_GENERIC"


class DimensionError(FockQuantError, ValueError):
    code = "E_DIMENSION"


class DomainError(FockQuantError, ValueError):
    code = "E_DOMAIN"


class SymbolSyntaxError(FockQuantError, ValueError):
    code = "E_SYNTAX"

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NonRealSymbolError(FockQuantError, ValueError):
    code = "E_NONREAL"


class QuadratureMismatchError(FockQuantError, RuntimeError):
    code = "E_QUADRATURE"


class ConfigError(FockQuantError, ValueError):
    code = "E_CONFIG"
