class PRBoxError(Exception):
    pass


class StrategyError(PRBoxError):
    def __init__(self, message, violations=None):
        super(StrategyError, self).__init__(message)
        self.violations = list(violations or [])


class CapExceeded(StrategyError):
    pass


class NetworkRequired(PRBoxError):
    pass


class PreconditionError(PRBoxError):
    pass


class BoundViolation(PRBoxError):
    def __init__(self, message, value, network):
        super(BoundViolation, self).__init__(message)
        self.value = value
        self.network = network


class ModelMismatch(PRBoxError):
    pass


class LPError(PRBoxError):
    pass


class Infeasible(LPError):
    def __init__(self, message, farkas):
        super(Infeasible, self).__init__(message)
        self.farkas = farkas


class Unbounded(LPError):
    def __init__(self, message, ray):
        super(Unbounded, self).__init__(message)
        self.ray = ray


class CertificateError(LPError):
    pass
