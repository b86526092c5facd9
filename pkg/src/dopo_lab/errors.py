"""Exception taxonomy.

Three broad classes, mirrored by the command line exit codes:

* ``UsageError``      - bad arguments or misuse of the API (exit 3)
* ``PhysicsError``    - the model has no answer for the request (exit 2)
* ``NumericalError``  - a solver failed to converge (exit 1)

Every concrete exception carries a short machine-readable ``code`` slug so
callers can branch on failures without parsing messages.
"""


class DopoError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class UsageError(DopoError):
    """Invalid arguments: out-of-range parameters, mismatched grids."""

    code = "usage"


class InvalidParameterError(UsageError):
    code = "invalid-parameter"


class GridMismatchError(UsageError):
    """Two curves were compared on different abscissa grids."""

    code = "grid-mismatch"


class PhysicsError(DopoError):
    """The request is well formed but the model refuses it."""

    code = "physics"


class CriticalPointSingularityError(PhysicsError):
    """The fluctuation system is singular (classical theory at threshold)."""

    code = "critical-point-singularity"


class SingularDenominatorError(PhysicsError):
    """A closed-form correlator hit a vanishing denominator."""

    code = "singular-denominator"


class NoAboveBranchError(PhysicsError):
    """No symmetry-broken steady state exists at the requested drive."""

    code = "no-above-branch"


class NoOnsetFoundError(PhysicsError):
    """Bisection for the branch onset found no sign change in its bracket."""

    code = "no-onset-found"


class UnphysicalSolutionError(PhysicsError):
    """A candidate steady state failed the physicality filters."""

    code = "unphysical-solution"


class RootMultiplicityError(PhysicsError):
    """More than one symmetry-broken root survived every filter.

    The model predicts a unique stable broken solution per sign; seeing
    several means the selection logic no longer matches the model and the
    result cannot be trusted.
    """

    code = "surviving-root-multiplicity"


class EmptySupportError(PhysicsError):
    """The exact stationary distribution has empty support (zero drive)."""

    code = "empty-support"


class DegenerateMarginalError(PhysicsError):
    """A Gaussian marginal would need non-positive variance."""

    code = "degenerate-marginal"


class NumericalError(DopoError):
    code = "numerical"


class StiffnessError(NumericalError):
    """Time integration gave up (step size collapsed)."""

    code = "stiffness"


class QuadratureError(NumericalError):
    """An adaptive quadrature did not reach the requested accuracy."""

    code = "quadrature-failure"
