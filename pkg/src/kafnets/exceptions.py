"""Exception hierarchy shared by the library and the command line."""


class KafnetsError(Exception):
    """Base class for every error raised by kafnets."""


class ShapeMismatchError(KafnetsError, ValueError):
    pass


class ConfigError(KafnetsError, ValueError):
    """Invalid experiment configuration or layer specification.

    ``errors`` keeps every violation found, not only the first one.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class DataError(KafnetsError, ValueError):
    pass


class NumericError(KafnetsError, ArithmeticError):
    pass
