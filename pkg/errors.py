# errors.py
# Exception hierarchy shared by every module of the project.
# Library code only raises these; the command-line front-end (cli.py) is the one
# place where they are turned into messages and exit codes.


class LabelingError(Exception):
    """Base class for every error raised by the labeling library."""


# --- Input / model errors ---

class MalformedInput(LabelingError):
    """A forest, event or label text file could not be parsed."""


class InvalidEvent(LabelingError):
    """A topological event is not valid for the current forest state."""


class CrossTree(LabelingError):
    """A within-tree query (NCA, distance, routing) was asked across two trees."""


class InvalidParams(LabelingError, ValueError):
    """Family or harness parameters are outside their admissible range."""


# --- Bit codec errors ---

class LabelCodecError(LabelingError, ValueError):
    """Base class for bit-level encoding problems."""


class Overflow(LabelCodecError):
    """A value does not fit in the requested field width."""


class OutOfRange(LabelCodecError):
    """A read goes past the end of the label."""


class ZeroNotEncodable(LabelCodecError):
    """Minimal binary form is only defined for positive integers."""


class TooLong(LabelCodecError):
    """A label is longer than the requested total width."""


# --- Scheme errors ---

class WidthMismatch(LabelingError):
    """Two labels of a fixed-width scheme have different lengths."""


class UnsupportedQuery(LabelingError):
    """The scheme was asked a query it does not support."""


class SizeFunctionViolation(LabelingError):
    """An inner size function does not satisfy the connectivity-wrapper condition."""


class ComponentMerge(LabelingError):
    """A new graph node has edges into two or more existing components."""


class DegreeExceeded(LabelingError):
    """An insertion would push a node past the degree bound k."""


# --- Certification errors ---

class WitnessMissing(LabelingError):
    """No distinctness witness was found for some candidate pairs."""

    def __init__(self, pairs):
        self.pairs = list(pairs)
        super().__init__(f"{len(self.pairs)} candidate pair(s) without a witness")


class BoundViolation(LabelingError):
    """A measured label intersection or count falls on the wrong side of its proven bound."""

    def __init__(self, violations):
        self.violations = list(violations)
        first = self.violations[0] if self.violations else None
        super().__init__(f"{len(self.violations)} intersection bound violation(s), first: {first}")


class VerificationFailed(LabelingError):
    """`verify` found at least one answer that disagrees with the oracle."""
