"""Exception types shared across the workbench."""


class PhiError(Exception):
    """Base class for all workbench errors."""


class BadLabelError(PhiError, ValueError):
    """A label does not match the identifier syntax and is not the decorator."""


class LocatorRangeError(PhiError, ValueError):
    """A locator index is negative or exceeds the supported bound."""


class NotAnObjectError(PhiError, TypeError):
    """An operation that needs an object term got something else."""


class DuplicateLabelError(PhiError, ValueError):
    """An object literal binds the same label twice."""

    def __init__(self, label: str, where: str | None = None):
        self.label = label
        msg = f"duplicate label {label!r}"
        if where:
            msg += f" at {where}"
        super().__init__(msg)


class OpenTermError(PhiError, ValueError):
    """A closed term was required; lists the unbound locator excesses."""

    def __init__(self, excesses):
        self.excesses = tuple(excesses)
        refs = ", ".join(f"^{n}" for n in self.excesses)
        super().__init__(f"term is open; unbound locator(s) escaping the root: {refs}")


class ParseError(PhiError, ValueError):
    """Concrete-syntax error with a source position."""

    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


class UnresolvedAttributeError(PhiError, ValueError):
    """A bare attribute-variable has no binder in the current context."""

    def __init__(self, name: str, pos=None):
        self.name = name
        self.pos = pos
        at = f" at {pos[0]}:{pos[1]}" if pos else ""
        super().__init__(f"unresolved attribute {name!r}{at}: no enclosing object binds it")


class UnsupportedConstructError(PhiError, ValueError):
    """A lambda term uses a construct outside the embeddable pure fragment."""

    def __init__(self, node: str):
        self.node = node
        super().__init__(f"unsupported construct for the pure-lambda embedding: {node}")


class UnsupportedVariantError(PhiError, ValueError):
    """A component does not support the requested calculus variant."""


class MachineError(PhiError, RuntimeError):
    """The abstract machine reached a state its invariants rule out."""
