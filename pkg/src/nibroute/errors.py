"""Exception types shared across the package."""


class ScenarioError(ValueError):
    """Malformed or invalid scenario document."""


class InfeasibleError(ValueError):
    """Mission or trajectory violates a kinematic or timing budget."""


class ProblemTooLarge(ValueError):
    """Instance exceeds the exhaustive-search size limit."""
