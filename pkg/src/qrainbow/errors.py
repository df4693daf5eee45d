class QRainbowError(Exception):
    """Base class for every error raised by the qrainbow package."""


class ConfigurationError(QRainbowError):
    """Invalid generation parameters, e.g. N overflows 64 bits or m > N."""


class ConfigError(QRainbowError):
    """Unknown or malformed RunConfig keys and values."""


class DictionaryParseError(QRainbowError):
    """
    Raised when a dictionary definition file cannot be parsed.

    Parameters
    ----------
    message : str
    line_no : int | None
        1-based line number of the offending line, if known.
    """
    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(prefix + message)


class TableMismatchError(QRainbowError):
    """Table, dictionary and bucket files disagree with each other."""


class SimulationError(QRainbowError):
    """Shape or size problems inside the quantum simulator."""


class IndexRangeError(QRainbowError, IndexError):
    """An index or variant number lies outside its valid range."""
