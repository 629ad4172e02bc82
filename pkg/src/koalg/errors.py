"""Exception hierarchy. Every domain error derives from :class:`KoalgError`."""


class KoalgError(Exception):
    """Base class for all domain errors raised by koalg."""


class ValidationError(KoalgError, ValueError):
    pass


class InvalidChoiceError(ValidationError):
    """A choice value violates its kind's invariants (empty set, bad distribution)."""


class MixedChoiceError(KoalgError):
    """Non-deterministic and probabilistic choice cannot be combined."""


class KindMismatchError(KoalgError):
    pass


class InputMismatchError(KoalgError):
    pass


class ShapeError(KoalgError):
    pass


class MembershipError(ValidationError):
    pass


class NDetUnresolvedError(KoalgError):
    pass


class InputNotEnumerable(KoalgError):
    pass


class NDetOutcomeError(KoalgError):
    pass


class ResolutionExplosionError(KoalgError):
    pass


class ExplosionError(KoalgError):
    pass


class ParseError(KoalgError):
    pass


class ParamError(ValidationError):
    pass


class UnknownStrategy(KoalgError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class SizeError(ValidationError):
    pass
