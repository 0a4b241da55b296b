"""Exception hierarchy. Every error carries the pipeline phase it came from."""


class SpectrimError(Exception):
    phase = "internal"


class ParseError(SpectrimError, ValueError):
    phase = "parse"


class ConfigError(SpectrimError, ValueError):
    phase = "config"


class LoadError(SpectrimError):
    phase = "load"


class NotFoundError(SpectrimError, LookupError):
    phase = "lookup"


class DeploymentError(SpectrimError):
    phase = "deploy"

    def __init__(self, message: str, coordinates: tuple = ()):
        super().__init__(message)
        self.coordinates = tuple(coordinates)


class ResolutionError(SpectrimError):
    phase = "resolve"

    def __init__(self, message: str, path: tuple = ()):
        super().__init__(message)
        self.path = tuple(path)


class CycleError(ResolutionError):
    pass


class NotInGraphError(SpectrimError, KeyError):
    phase = "analyze"

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class PreconditionError(SpectrimError):
    """The project does not build before any specialization is applied."""

    phase = "precondition"


class CorpusSpecError(SpectrimError, ValueError):
    phase = "generate"
