"""Exception hierarchy shared by all pipeline stages."""


class VeriphonError(Exception):
    """Base class for all toolkit errors."""


# --- audio ---------------------------------------------------------------

class FormatError(VeriphonError):
    """File is not a readable RIFF/WAVE or uses an unsupported codec."""


class EmptyBuffer(VeriphonError):
    """An operation received a buffer with no samples."""


class RateMismatch(VeriphonError):
    """Two buffers that must share a sample rate do not."""


class SilentInput(VeriphonError):
    """An all-zero signal where nonzero power is required (SNR mixing)."""


# --- short-time analysis -------------------------------------------------

class TooShort(VeriphonError):
    """Signal shorter than one analysis frame."""


class BadNfft(VeriphonError):
    """FFT size is not a power of two or smaller than the frame."""


# --- filterbank ----------------------------------------------------------

class NegativeFrequency(VeriphonError):
    """Frequency warp evaluated below 0 Hz."""


class BadRange(VeriphonError):
    """Invalid filterbank frequency range."""


class ShapeMismatch(VeriphonError):
    """Matrix shapes incompatible (filterbank vs. spectrogram, ...)."""


# --- features ------------------------------------------------------------

class NoFrames(VeriphonError):
    """No usable frames left (e.g. all frames are RASTA warm-up)."""


class TooFewVectors(VeriphonError):
    """Not enough vectors to fit a normalizer."""


class SingularAutocorrelation(VeriphonError):
    """Levinson-Durbin hit a non-positive prediction error."""


# --- classifiers ---------------------------------------------------------

class DimMismatch(VeriphonError):
    """Vector dimensionality differs from the model's."""


class DegenerateData(VeriphonError):
    """Training set unusable (single class or fewer than two points)."""


class NoConvergence(VeriphonError):
    """Optimizer hit its iteration cap before meeting its tolerance."""


class TooFewPositives(VeriphonError):
    """Cannot build stratified folds from the labels given."""


class SeparableWarning(UserWarning):
    """Unpenalized logistic regression on separable data: betas diverge."""


# --- ensemble / metrics --------------------------------------------------

class BadK(VeriphonError):
    """k-out-of-N rule with k outside 1..N."""


class OneClassOnly(VeriphonError):
    """ROC requested for trials containing a single class."""


class UndefinedRate(VeriphonError):
    """TPR or FPR undefined because a class is empty."""


# --- enhancement ---------------------------------------------------------

class TooFewFrames(VeriphonError):
    """Not enough leading frames for the noise estimate."""


class ColaViolation(VeriphonError):
    """Window/hop pair without constant overlap-add coverage."""


# --- batch protocol ------------------------------------------------------

class ManifestError(VeriphonError):
    """Corpus manifest missing, malformed, or inconsistent."""


class ConditionError(VeriphonError):
    """A requested test condition cannot be built (missing noise file)."""
