"""Exception hierarchy shared across the package.

Everything raised on purpose derives from WordsigError so callers can catch
one base. Classes that reject bad values also derive from ValueError, which
keeps them idiomatic for code that does not know about this package.
"""


class WordsigError(Exception):
    """Base class for all errors raised by this package."""


class MalformedKeyError(WordsigError, ValueError):
    """A key or public point has the wrong length or encoding."""


class MalformedNameError(WordsigError, ValueError):
    """A certificate name violates the charset or length rules."""


class MalformedCaptionError(WordsigError, ValueError):
    """A certificate-frame caption does not have the required shape."""


class MalformedCertificateError(WordsigError, ValueError):
    """Certificate bytes cannot be parsed."""


class MalformedRevocationError(WordsigError, ValueError):
    """Revocation-record bytes cannot be parsed."""


class MalformedPayloadError(WordsigError, ValueError):
    """QR payload text does not match the payload grammar."""


class UnsupportedPayloadVersionError(MalformedPayloadError):
    """Payload carries a protocol version this implementation does not speak."""


class PayloadTooLargeError(WordsigError, ValueError):
    """Words or payload exceed the profile caps."""


class QrDecodeError(WordsigError):
    """A QR matrix or raster could not be decoded."""


class QrCapacityError(PayloadTooLargeError):
    """Text does not fit any QR version at the requested EC level."""


class KeyCertMismatchError(WordsigError, ValueError):
    """A private key does not match the certificate it is used with."""


class TranscriptError(WordsigError, ValueError):
    """A timed transcript violates ordering or word rules."""


class MalformedStreamError(WordsigError):
    """A stream frame could not be decoded; carries the frame index."""

    def __init__(self, frame_index: int, message: str):
        super().__init__(f"frame {frame_index}: {message}")
        self.frame_index = frame_index


class SessionMisuseError(WordsigError):
    """A verify session was driven out of order."""
