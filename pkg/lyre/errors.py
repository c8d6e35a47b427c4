# Error taxonomy shared by the parser, the evaluators and the CLI.
#
# Every error carries a tag (the taxonomy name printed by the CLI as
# error: <tag>: <detail>) and a free-form detail. Only the CLI turns
# these into exit codes.


class LyreError(Exception):
    tag = "LyreError"

    def __init__(self, detail=""):
        super().__init__(detail)
        self.detail = detail

    def __str__(self):
        return f"{self.tag}: {self.detail}" if self.detail else self.tag


# ==========================================
# STATIC ERRORS (PARSE / DESUGAR / STRATEGY CHECKS)
# ==========================================

class StaticError(LyreError):
    tag = "StaticError"


class ParseError(StaticError):
    tag = "ParseError"

    def __init__(self, detail="", line=None, column=None):
        if line is not None:
            detail = f"line {line}, column {column}: {detail}"
        super().__init__(detail)
        self.line = line
        self.column = column


class DuplicateBinder(StaticError):
    tag = "DuplicateBinder"


class UnknownConstraintTarget(StaticError):
    tag = "UnknownConstraintTarget"


class DisjointnessViolation(StaticError):
    tag = "DisjointnessViolation"


class UnhousedAtom(StaticError):
    tag = "UnhousedAtom"


class StrategyRestriction(StaticError):
    tag = "StrategyRestriction"


class FlagConflict(StaticError):
    tag = "FlagConflict"


# ==========================================
# RUNTIME ERRORS: EVALUATION STOPS AT THE FIRST ONE
# ==========================================

class LyreRuntimeError(LyreError):
    tag = "RuntimeError"


class CyclicDependency(LyreRuntimeError):
    tag = "CyclicDependency"


class ConstraintViolation(LyreRuntimeError):
    tag = "ConstraintViolation"


class UnresolvedComponent(LyreRuntimeError):
    tag = "UnresolvedComponent"


class OpenMixinOperation(LyreRuntimeError):
    tag = "OpenMixinOperation"


class NameClash(LyreRuntimeError):
    tag = "NameClash"


class CompositionUndefined(LyreRuntimeError):
    tag = "CompositionUndefined"


class FreezeMismatch(LyreRuntimeError):
    tag = "FreezeMismatch"


class UnknownProjection(LyreRuntimeError):
    tag = "UnknownProjection"


class CoreTypeError(LyreRuntimeError):
    tag = "CoreTypeError"


class StepBudgetExceeded(LyreError):
    tag = "StepBudgetExceeded"
