"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed input file or text format."""


class ValidationError(ValueError):
    """A constructed object violates one of its structural axioms."""


class ResourceLimitError(RuntimeError):
    """A configured resource cap (steps, generators, entry size) was exceeded."""
