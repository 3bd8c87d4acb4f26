"""Exception hierarchy shared across the protocol modules."""


class OpenPubError(Exception):
    """Base class for all protocol errors."""


class GroupMismatchError(OpenPubError):
    """An operation received group elements from the wrong groups."""


class DecodingError(OpenPubError):
    """A byte string is not a canonical encoding of the expected object."""


class InvalidParamsError(OpenPubError):
    """A (k, n) threshold configuration is malformed (k = 0 or k > n)."""


class DuplicateIndexError(OpenPubError):
    """Two shares carry the same participant index."""


class IndexNotInSubsetError(OpenPubError):
    """Asked for a Lagrange coefficient of an index outside the subset."""


class InsufficientSharesError(OpenPubError):
    """Fewer shares supplied than the threshold requires."""


class InsufficientValidSharesError(InsufficientSharesError):
    """Too few shares survived validity filtering to reach the threshold."""

    def __init__(self, message: str, bad_indices: tuple = ()):
        super().__init__(message)
        self.bad_indices = tuple(bad_indices)


class UnverifiedDealingError(OpenPubError):
    """A dealing failed share verification during aggregation."""


class VssFailureError(OpenPubError):
    """Too many dealings were invalid for the ceremony to proceed."""


class InvalidSignatureError(OpenPubError):
    """A signature failed verification where a valid one is required."""


class UnknownSignerError(OpenPubError):
    """De-anonymization produced an identity absent from the registry."""


class OracleViolationError(OpenPubError):
    """A game adversary exceeded its oracle budget."""


class DecryptionError(OpenPubError):
    """Ciphertext did not decrypt under the supplied key."""


class InvalidBlockError(OpenPubError):
    """A block failed certificate or transaction validation."""


class BeforeEndtimeError(OpenPubError):
    """The open procedure ran before the review deadline."""


class InsufficientReviewersError(OpenPubError):
    """The field-matching reviewer pool is smaller than requested."""


class InsufficientFundsError(OpenPubError):
    """An account balance does not cover a required payment."""


class ConfigError(OpenPubError):
    """A scenario or consensus configuration is inconsistent."""


class NotFoundError(OpenPubError):
    """A chain query matched nothing."""
