"""Exception hierarchy shared by all nilcert modules.

Every domain failure raises a subclass of :class:`NilcertError` so the CLI can
map it to a structured error report (exit code 1) while genuine usage errors
stay on the argparse path (exit code 2).
"""


class NilcertError(Exception):
    """Base class for all domain errors raised by this package."""


class DimensionMismatch(NilcertError):
    """Operands have incompatible matrix or ambient dimensions."""


class NotASublattice(NilcertError):
    """Claimed sublattice has a basis vector outside the ambient lattice."""


class NotASubgroup(NilcertError):
    """Claimed subgroup is not contained in the ambient group."""


class NotNormal(NilcertError):
    """Subgroup fails the generator conjugation test for normality."""


class NotAbelianQuotient(NilcertError):
    """Quotient exists but is not abelian; the caller must refine the series."""


class QuotientTooLarge(NilcertError):
    """Finite quotient exceeds the enumeration guardrail."""


class UnsupportedSubgroupShape(NilcertError):
    """Subgroup falls outside the box shapes this package models."""


class UnsupportedGroupShape(NilcertError):
    """Group description is not one of the supported lattice shapes."""


class NotFiniteIndex(NilcertError):
    """Subgroup does not have finite index in its overgroup."""


class ClosureViolation(NilcertError):
    """Box data is not closed under the group law."""


class NotAnAutomorphism(NilcertError):
    """Matrix pair does not define a form-compatible automorphism."""


class InfiniteOrder(NilcertError):
    """Claimed finite order could not be verified."""


class InvalidParameters(NilcertError):
    """Arguments violate a documented precondition."""


class IllDefinedAction(NilcertError):
    """Module action matrices do not satisfy the relators or torsion."""


class TooLarge(NilcertError):
    """Brute-force enumeration would exceed its size guard."""


class EnumerationFailed(NilcertError):
    """Coset enumeration did not close within the guard."""


class ZeroEuler(NilcertError):
    """Euler characteristic zero: the length bound does not apply."""


class UnresolvableReference(NilcertError):
    """Certificate references a group or shape that cannot be rebuilt."""
