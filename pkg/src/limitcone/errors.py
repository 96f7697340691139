"""Exception hierarchy. Each family carries the CLI exit code it maps to."""


class LimitconeError(Exception):
    exit_code = 10


class ConfigError(LimitconeError):
    exit_code = 4


class PrecisionError(LimitconeError):
    """Requested precision or tolerance is not supported."""
    exit_code = 5


# hyp2

class GeometryError(LimitconeError):
    exit_code = 11


class NonHyperbolic(GeometryError):
    pass


class OrientationReversing(GeometryError):
    pass


class Degenerate(GeometryError):
    pass


class NotCrossing(GeometryError):
    pass


class Crossing(GeometryError):
    pass


class Asymptotic(GeometryError):
    pass


class NonHyperbolicResolution(GeometryError):
    def __init__(self, k, value):
        super().__init__(f"resolved curve {k} is not hyperbolic (cosh value {value})")
        self.k = k
        self.value = value


# fricke

class TraceError(LimitconeError):
    exit_code = 12


class TraceOutOfRange(TraceError):
    pass


class NotDiscretelike(TraceError):
    pass


class LengthNonPositive(TraceError):
    pass


class NonConvexCocompact(TraceError):
    pass


class PrecisionExhausted(TraceError):
    pass


class BacktrackingPath(TraceError):
    pass


# polygons

class PolygonError(LimitconeError):
    exit_code = 13


class NonPositiveParam(PolygonError):
    pass


class EmbeddingFailure(PolygonError):
    pass


class FootOutsideSide(PolygonError):
    pass


class AdjustmentFailed(PolygonError):
    def __init__(self, message, best_params=None, best_margin=None):
        super().__init__(message)
        self.best_params = best_params
        self.best_margin = best_margin


# cone

class ConeError(LimitconeError):
    exit_code = 14


class ZeroVector(ConeError):
    pass


class DegenerateHull(ConeError):
    pass


class DimensionError(ConeError):
    pass


# wordgen

class WordError(LimitconeError):
    exit_code = 15


class EmptyCloud(WordError):
    pass


class NotFound(WordError):
    def __init__(self, max_len):
        super().__init__(f"no separating word up to length {max_len}")
        self.max_len = max_len
