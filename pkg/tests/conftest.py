from itertools import product

import pytest

from qrainbow.dictgen import parse_dictionary


def dictionary_text(words: list[str], numbers: list[str], pattern: str = "WN", rules: tuple[str, ...] = ()) -> str:
    lines = ["[words]", *words, "[numbers]", *numbers, "[pattern]", pattern]
    if rules:
        lines += ["[rules]", *rules]
    return "\n".join(lines) + "\n"


# 64 words x 64 numbers, N = 2^12
WORDS_64 = ["".join(p) for p in product("abcdefgh", repeat=2)]
NUMBERS_64 = [f"{i:02d}" for i in range(64)]
TEXT_4096 = dictionary_text(WORDS_64, NUMBERS_64)

# 4 words with 2 case shifts x 8 numbers, N = 64
TEXT_64 = dictionary_text(["pass", "admin", "root", "user"], [str(i) for i in range(8)],
                          rules=("caseshift W 2",))


@pytest.fixture(scope="session")
def dict_4096():
    return parse_dictionary(TEXT_4096)


@pytest.fixture(scope="session")
def dict_64():
    return parse_dictionary(TEXT_64)


@pytest.fixture
def dict_file_4096(tmp_path):
    path = tmp_path / "space4096.dict"
    path.write_text(TEXT_4096, encoding="utf-8")
    return path


@pytest.fixture
def dict_file_64(tmp_path):
    path = tmp_path / "space64.dict"
    path.write_text(TEXT_64, encoding="utf-8")
    return path
