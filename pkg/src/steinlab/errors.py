"""Exception hierarchy shared by all modules."""


class SteinlabError(Exception):
    """Base class; ``code`` is a stable machine-readable tag used in reports."""

    code = "error"

    def __init__(self, message="", **details):
        super().__init__(message or self.code)
        self.details = details


class InvalidRootSystem(SteinlabError):
    code = "invalid_root_system"


class InvalidRoot(SteinlabError):
    code = "invalid_root"


class HypothesisNotMet(SteinlabError):
    code = "hypothesis_not_met"


class TypeMismatch(SteinlabError):
    code = "type_mismatch"


class LevelMismatch(SteinlabError):
    code = "level_mismatch"


class InvalidShift(SteinlabError):
    code = "invalid_shift"


class NotCoprimeToS(SteinlabError):
    code = "not_coprime_to_s"


class ResourceBound(SteinlabError):
    code = "resource_bound"


class RankTooSmall(SteinlabError):
    code = "rank_too_small"


class AntiParallel(SteinlabError):
    code = "anti_parallel"


class NotSupported(SteinlabError):
    code = "not_supported"


class NotUnipotent(SteinlabError):
    code = "not_unipotent"


class NotInvertible(SteinlabError):
    code = "not_invertible"


class PinningBroken(SteinlabError):
    code = "pinning_broken"


class NoWitness(SteinlabError):
    code = "no_witness"


class NotAPreimage(SteinlabError):
    code = "not_a_preimage"


class InvalidWitness(SteinlabError):
    code = "invalid_witness"


class NotLocalRing(SteinlabError):
    code = "not_local_ring"


class DecompositionFailed(SteinlabError):
    code = "decomposition_failed"


class NoWeylPath(SteinlabError):
    code = "no_weyl_path"


class ConfigError(SteinlabError):
    code = "config_error"
