"""Exception hierarchy shared by all modules.

Every error class carries a distinct ``exit_code`` so the CLI can map
failure classes to process exit statuses.
"""


class S4Error(Exception):
    exit_code = 1


# -- field arithmetic ---------------------------------------------------

class NotInvertible(S4Error):
    """gcd(a, m) != 1: a is zero mod m, or m is not prime."""
    exit_code = 10


class DuplicateNode(S4Error):
    """Two interpolation nodes share an x-coordinate."""
    exit_code = 11


class SingularSystem(S4Error):
    """No invertible pivot: the linear system is rank-deficient mod p."""
    exit_code = 12


# -- key material -------------------------------------------------------

class InvalidThreshold(S4Error):
    exit_code = 13


class FieldTooSmall(S4Error):
    """p leaves too few distinct nonzero evaluation points for k."""
    exit_code = 14


class NotPrime(S4Error):
    exit_code = 15


class KeyFormatError(S4Error):
    """Malformed or wrong-version key file."""
    exit_code = 16


# -- splitting / reconstruction ----------------------------------------

class SecretOutOfRange(S4Error):
    """Secret is negative or >= p."""
    exit_code = 17


class LengthMismatch(S4Error):
    """Split or sum vector length differs from k - 1."""
    exit_code = 18


# -- Paillier baseline --------------------------------------------------

class KeyGenFailure(S4Error):
    """Gave up after the bounded number of keygen retries."""
    exit_code = 19


class MessageOutOfRange(S4Error):
    exit_code = 20


class InvalidCiphertext(S4Error):
    exit_code = 21


# -- cloud store --------------------------------------------------------

class WidthMismatch(S4Error):
    """Row width differs from the table's k - 1 columns."""
    exit_code = 22


class DuplicateId(S4Error):
    exit_code = 23


class UnknownTable(S4Error):
    exit_code = 24


class UnknownId(S4Error):
    exit_code = 25


class TableExists(S4Error):
    exit_code = 26


class TableFormatError(S4Error):
    """Malformed table file, wrong table kind, or fingerprint mismatch."""
    exit_code = 27


# -- query client -------------------------------------------------------

class NegativeValue(S4Error):
    exit_code = 28


class Overflow(S4Error):
    """Encoded value exceeds the encoding spec's maximum."""
    exit_code = 29


class PrimeTooSmall(S4Error):
    """p is not greater than the sum of the values being outsourced."""
    exit_code = 30


class EmptySelection(S4Error):
    exit_code = 31


# -- known-plaintext attack ----------------------------------------------

class InsufficientPairs(S4Error):
    """Fewer known (secret, splits) pairs than unknowns to solve for."""
    exit_code = 32


class InconsistentPairs(S4Error):
    """Residual check failed: the pairs do not come from a single key."""
    exit_code = 33


# -- benchmark ------------------------------------------------------------

class BenchVerificationError(S4Error):
    """A benchmarked aggregate disagreed with the plaintext oracle."""
    exit_code = 34


# -- CLI ------------------------------------------------------------------

class OverwriteRefused(S4Error):
    """Output file exists and --force was not given."""
    exit_code = 35
