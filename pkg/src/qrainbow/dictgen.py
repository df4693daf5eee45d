import logging
from dataclasses import dataclass, field
from enum import Enum
from math import prod
from os import PathLike

from .errors import ConfigurationError, DictionaryParseError, IndexRangeError
from .globalvars import MAX_SPACE_SIZE

logger = logging.getLogger(__name__)


class GeneratorClass(Enum):
    WORD = "W"
    NUMBER = "N"
    SYMBOL = "S"


class RuleKind(Enum):
    CASE_SHIFT = "caseshift"
    LEET_SUBSTITUTE = "leet"
    REVERSE = "reverse"
    IDENTITY = "identity"


# Substitutions applied by LEET_SUBSTITUTE, matched case-insensitively.
LEET_TABLE = {"a": "@", "e": "3", "o": "0", "s": "$"}

# Variant 0 of every case shift is the untouched string.
CASE_SHIFTS = (
    lambda s: s,
    lambda s: s[:1].upper() + s[1:],
    lambda s: s.upper(),
    lambda s: s[:-1] + s[-1:].upper(),
)

MAX_MULTIPLICITY = {RuleKind.CASE_SHIFT: len(CASE_SHIFTS), RuleKind.REVERSE: 2}

SECTION_CLASSES = {"words": GeneratorClass.WORD,
                   "numbers": GeneratorClass.NUMBER,
                   "symbols": GeneratorClass.SYMBOL}

RULE_ALIASES = {"caseshift": RuleKind.CASE_SHIFT,
                "leet": RuleKind.LEET_SUBSTITUTE,
                "leetsubstitute": RuleKind.LEET_SUBSTITUTE,
                "reverse": RuleKind.REVERSE,
                "identity": RuleKind.IDENTITY}


@dataclass(frozen=True)
class Generator:
    """
    One generator list of the smart dictionary, e.g. the words of a "W" position.

    Parameters
    ----------
    cls : GeneratorClass
    entries : tuple[str, ...]
        Non-empty, duplicate-free, printable base strings in index order.
    """
    cls: GeneratorClass
    entries: tuple[str, ...]

    def __post_init__(self):
        if not self.entries:
            raise ConfigurationError(f"generator {self.cls.value} has no entries")
        if len(set(self.entries)) != len(self.entries):
            raise ConfigurationError(f"generator {self.cls.value} contains duplicate entries")
        for entry in self.entries:
            if not entry or not entry.isprintable():
                raise ConfigurationError(f"generator {self.cls.value} has a non-printable entry {entry!r}")

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class CompositionPattern:
    sequence: tuple[GeneratorClass, ...]

    def __post_init__(self):
        if not self.sequence:
            raise ConfigurationError("composition pattern is empty")

    @classmethod
    def parse(cls, text: str) -> "CompositionPattern":
        """Build a pattern from its letter form, e.g. "WNS"."""
        try:
            return cls(tuple(GeneratorClass(letter) for letter in text.strip().upper()))
        except ValueError as e:
            raise ConfigurationError(f"unknown generator class in pattern {text!r}") from e

    def __str__(self) -> str:
        return "".join(c.value for c in self.sequence)


@dataclass(frozen=True)
class TransformRule:
    """
    A deterministic string mutation expanding every base entry of one generator
    class into `multiplicity` variants. Variant 0 is always the least transformed one.
    """
    kind: RuleKind
    applicable_class: GeneratorClass
    multiplicity: int = 2

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ConfigurationError(f"rule {self.kind.value} needs multiplicity >= 1")
        limit = MAX_MULTIPLICITY.get(self.kind)
        if limit is not None and self.multiplicity > limit:
            raise ConfigurationError(f"rule {self.kind.value} supports at most {limit} variants")

    def apply(self, base: str, variant: int) -> str:
        if not 0 <= variant < self.multiplicity:
            raise IndexRangeError(f"variant {variant} out of range for {self.kind.value}")
        if self.kind is RuleKind.CASE_SHIFT:
            return CASE_SHIFTS[variant](base)
        if self.kind is RuleKind.REVERSE:
            return base[::-1] if variant == 1 else base
        if self.kind is RuleKind.LEET_SUBSTITUTE:
            return leet_variant(base, variant)
        return base


@dataclass(frozen=True)
class GeneratorSet:
    generators: dict[GeneratorClass, Generator]
    rules: tuple[TransformRule, ...] = ()


def leet_variant(base: str, variant: int) -> str:
    """
    Substitute the subset of substitutable characters selected by the bits of `variant`.
    Bit b refers to the b-th substitutable character from the left. Strings with fewer
    substitutable characters than bits wrap around (variant mod 2^q).
    """
    positions = [idx for idx, c in enumerate(base) if c.lower() in LEET_TABLE]
    if not positions:
        return base
    mask = variant % (1 << len(positions))
    chars = list(base)
    for b, idx in enumerate(positions):
        if mask >> b & 1:
            chars[idx] = LEET_TABLE[chars[idx].lower()]
    return "".join(chars)


def compute_extension_ratio(rules: list[TransformRule] | tuple[TransformRule, ...],
                            generator: Generator) -> int:
    """Number of variants per base entry: product of the multiplicities of applicable rules."""
    return prod(r.multiplicity for r in rules if r.applicable_class == generator.cls)


def apply_transform(base: str,
                    rules: list[TransformRule] | tuple[TransformRule, ...],
                    variant_index: int) -> str:
    """
    Apply every rule in `rules` to `base`, in order.

    The variant index is decomposed mixed-radix over the rule multiplicities, the first
    rule being the least significant digit. Callers pass the rules applicable to the
    class of `base`.

    Parameters
    ----------
    base : str
    rules : sequence of TransformRule
    variant_index : int
        In [0, product of multiplicities).

    Returns
    -------
    str
        The transformed string. Index 0 leaves `base` unchanged.
    """
    if not 0 <= variant_index < prod(r.multiplicity for r in rules):
        raise IndexRangeError(f"variant index {variant_index} out of range")
    out = base
    for rule in rules:
        variant_index, digit = divmod(variant_index, rule.multiplicity)
        out = rule.apply(out, digit)
    return out


@dataclass(frozen=True)
class _Position:
    entries: tuple[str, ...]
    rules: tuple[TransformRule, ...]
    t_space: int
    t_ext: int


def _layout(gset: GeneratorSet, pattern: CompositionPattern,
            rules: list[TransformRule] | tuple[TransformRule, ...]) -> tuple[_Position, ...]:
    positions = []
    for cls in pattern.sequence:
        if cls not in gset.generators:
            raise ConfigurationError(f"pattern {pattern} uses class {cls.value} without a generator")
        generator = gset.generators[cls]
        applicable = tuple(r for r in rules if r.applicable_class == cls)
        t_space = len(generator)
        positions.append(_Position(generator.entries, applicable, t_space,
                                   t_space * compute_extension_ratio(applicable, generator)))
    return tuple(positions)


def _space_size(layout: tuple[_Position, ...]) -> int:
    size = prod(p.t_ext for p in layout)
    if size > MAX_SPACE_SIZE:
        raise ConfigurationError(f"plaintext space of {size} candidates exceeds the 64-bit range")
    return size


def _decode(i: int, layout: tuple[_Position, ...]) -> str:
    parts = []
    for pos in layout:
        i, subindex = divmod(i, pos.t_ext)
        variant, base = divmod(subindex, pos.t_space)
        parts.append(apply_transform(pos.entries[base], pos.rules, variant))
    return "".join(parts)


def plaintext_space_size(gset: GeneratorSet, pattern: CompositionPattern,
                         rules: list[TransformRule] | tuple[TransformRule, ...] | None = None) -> int:
    """N = product over pattern positions of |G_j| times its extension ratio."""
    return _space_size(_layout(gset, pattern, gset.rules if rules is None else rules))


def index_to_plain(i: int, gset: GeneratorSet, pattern: CompositionPattern,
                   rules: list[TransformRule] | tuple[TransformRule, ...] | None = None) -> str:
    """
    Map an index of the plaintext space to its plaintext.

    `i` is consumed positionally: each pattern position takes `i mod T_ext` as its
    subindex and `i` is integer-divided by `T_ext` before the next position. The
    subindex selects the base entry (`subindex mod T_space`) and the transform
    variant (`subindex div T_space`).

    Parameters
    ----------
    i : int
    gset : GeneratorSet
    pattern : CompositionPattern
    rules : sequence of TransformRule | None
        Defaults to `gset.rules`.
    """
    layout = _layout(gset, pattern, gset.rules if rules is None else rules)
    n = _space_size(layout)
    if not 0 <= i < n:
        raise IndexRangeError(f"index {i} outside plaintext space of size {n}")
    return _decode(i, layout)


@dataclass(frozen=True)
class SmartDictionary:
    """
    A compiled smart dictionary: generator set, composition pattern and rules,
    with the per-position layout precomputed for fast repeated decoding.
    """
    gset: GeneratorSet
    pattern: CompositionPattern
    layout: tuple[_Position, ...] = field(init=False, repr=False)
    size: int = field(init=False)

    def __post_init__(self):
        layout = _layout(self.gset, self.pattern, self.gset.rules)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "size", _space_size(layout))

    @property
    def rules(self) -> tuple[TransformRule, ...]:
        return self.gset.rules

    def plain(self, i: int) -> str:
        if not 0 <= i < self.size:
            raise IndexRangeError(f"index {i} outside plaintext space of size {self.size}")
        return _decode(i, self.layout)

    def digits(self, i: int) -> list[tuple[int, int]]:
        """(base entry, variant) per pattern position for index `i`."""
        if not 0 <= i < self.size:
            raise IndexRangeError(f"index {i} outside plaintext space of size {self.size}")
        out = []
        for pos in self.layout:
            i, subindex = divmod(i, pos.t_ext)
            variant, base = divmod(subindex, pos.t_space)
            out.append((base, variant))
        return out

    def index_of_digits(self, digits: list[tuple[int, int]]) -> int:
        """Inverse of `digits`."""
        i = 0
        for pos, (base, variant) in zip(reversed(self.layout), reversed(digits)):
            i = i * pos.t_ext + variant * pos.t_space + base
        return i

    def describe(self) -> list[tuple[str, int, int]]:
        """(class letter, generator size, extension ratio) per pattern position."""
        return [(cls.value, pos.t_space, pos.t_ext // pos.t_space)
                for cls, pos in zip(self.pattern.sequence, self.layout)]


def parse_dictionary(text: str) -> SmartDictionary:
    """
    Parse a dictionary definition.

    The format is line oriented with sections `[words]`, `[numbers]`, `[symbols]`,
    `[pattern]` and `[rules]`. Lines starting with `#` are comments; an entry that
    must start with `#` is written with a leading backslash.
    """
    entries: dict[GeneratorClass, list[str]] = {}
    pattern_lines: list[tuple[int, str]] = []
    rules = []
    section = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section in SECTION_CLASSES:
                entries.setdefault(SECTION_CLASSES[section], [])
            elif section not in ("pattern", "rules"):
                raise DictionaryParseError(f"unknown section [{section}]", line_no)
            continue
        if section is None:
            raise DictionaryParseError("entry outside of any section", line_no)
        if line.startswith("\\"):
            line = line[1:]

        if section in SECTION_CLASSES:
            entries[SECTION_CLASSES[section]].append(line)
        elif section == "pattern":
            pattern_lines.append((line_no, line))
        else:
            rules.append(_parse_rule(line, line_no))

    if len(pattern_lines) != 1:
        raise DictionaryParseError("[pattern] must hold exactly one line",
                                   pattern_lines[1][0] if pattern_lines else None)
    line_no, pattern_text = pattern_lines[0]

    try:
        generators = {cls: Generator(cls, tuple(values)) for cls, values in entries.items()}
        pattern = CompositionPattern.parse(pattern_text)
        gset = GeneratorSet(generators, tuple(rules))
        for cls in pattern.sequence:
            if cls not in generators:
                raise DictionaryParseError(f"pattern uses class {cls.value} without a generator section", line_no)
    except DictionaryParseError:
        raise
    except ConfigurationError as e:
        raise DictionaryParseError(str(e), line_no) from e

    # Overflow of N is a ConfigurationError, not a parse error.
    dictionary = SmartDictionary(gset, pattern)
    logger.info("parsed dictionary: pattern %s, N = %d", pattern, dictionary.size)
    return dictionary


def _parse_rule(line: str, line_no: int) -> TransformRule:
    fields = line.split()
    if len(fields) not in (2, 3):
        raise DictionaryParseError(f"rule {line!r} must read '<kind> <class> [multiplicity]'", line_no)
    kind = RULE_ALIASES.get(fields[0].lower())
    if kind is None:
        raise DictionaryParseError(f"unknown rule kind {fields[0]!r}", line_no)
    try:
        cls = GeneratorClass(fields[1].upper())
        multiplicity = int(fields[2]) if len(fields) == 3 else (1 if kind is RuleKind.IDENTITY else 2)
        return TransformRule(kind, cls, multiplicity)
    except ValueError as e:
        raise DictionaryParseError(f"malformed rule {line!r}", line_no) from e
    except ConfigurationError as e:
        raise DictionaryParseError(str(e), line_no) from e


def load_dictionary(path: str | PathLike) -> SmartDictionary:
    """Read and parse a dictionary definition file (UTF-8)."""
    with open(path, encoding="utf-8") as f:
        return parse_dictionary(f.read())
