"""Exception types raised across the package."""


class MeshSamplerError(Exception):
    """Base class for all package errors."""


class MeshParseError(MeshSamplerError):
    """Malformed OBJ/MTL content.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class TextureLoadError(MeshSamplerError):
    """A texture file could not be decoded."""


class PlyParseError(MeshSamplerError):
    """Malformed or truncated PLY content."""


class DegenerateGeometryError(MeshSamplerError):
    """A geometric operation received a zero-area triangle."""


class EmptySurfaceError(MeshSamplerError):
    """Mesh has no sampleable (non-degenerate) faces."""


class EmptyInputError(MeshSamplerError):
    """An operation that needs at least one point received none."""
