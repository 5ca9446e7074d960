"""
Error hierarchy for the lab.

Every error carries a human readable detail and the exit code the command
line front-end reports for it.
"""


class PadeLabError(Exception):
    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class PreconditionError(PadeLabError, ValueError):
    pass


class TruncationError(PreconditionError):
    pass


class RetryableError(PreconditionError):
    retryable = True


class GuardBandError(PreconditionError):
    pass


class ScheduleError(PreconditionError):
    pass


class RootFindingError(PadeLabError):
    pass


class VerificationError(PadeLabError):
    exit_code = 2


class ConfigError(PadeLabError):
    exit_code = 3

    def __init__(self, detail: str, errors: list[str] | None = None):
        super().__init__(detail)
        self.errors = errors or []


class EscalationError(PadeLabError):
    exit_code = 4

    def __init__(self, detail: str, step: int | None = None, task: int | None = None):
        super().__init__(detail)
        self.step = step
        self.task = task
