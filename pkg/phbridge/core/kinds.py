try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        """Backport of :class:`enum.StrEnum` (Python 3.11+)."""

        def __str__(self) -> str:
            return str.__str__(self)

        def __format__(self, format_spec: str) -> str:
            return str.__format__(str(self), format_spec)


class SystemKind(StrEnum):
    RELATION = "relation"
    GEOMETRIC = "geometric"
    DESCRIPTOR = "descriptor"
    TRAJECTORY = "trajectory"


class GraphFlavor(StrEnum):
    DIRAC = "dirac"
    LAGRANGE = "lagrange"
    MAX_RESISTIVE = "max_resistive"
    MAX_MONOTONE = "max_monotone"


class ScalarField(StrEnum):
    REAL = "real"
    COMPLEX = "complex"


class Channel:
    """Trajectory channel names (plain strings, usable as mapping keys)."""

    Z = "z"
    X = "x"
    X_DOT = "x_dot"
    U = "u"
    Y = "y"
    F_R = "f_R"
    E_R = "e_R"
    E_L = "e_L"
    LAM = "lam"
    LAM_R = "lam_R"
    LAM_L = "lam_L"
    MU_L = "mu_L"
