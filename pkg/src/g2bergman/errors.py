"""Exception types raised across the package."""


class G2Error(Exception):
    """Base class for errors raised by g2bergman."""


class DomainError(G2Error, ValueError):
    """A point lies outside the domain where a quantity is defined."""


class SingularConfigurationError(G2Error, ValueError):
    """Coincident roots z1 = z2, where the coordinate change to G2 degenerates.

    Callers hitting this near the branch locus should fall back to the
    w-coordinate finite-difference oracle (:mod:`g2bergman.fdoracle`).
    """


class UnknownQuantityError(G2Error, KeyError):
    """A closed form or quantity name is not registered."""
