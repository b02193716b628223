"""Text to token sequence. The same tokens feed counting and embedding lookup."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

# letters and digits only: \w minus the underscore
_TOKEN_RE = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    min_token_len: int = 1

    def __post_init__(self):
        if self.min_token_len < 1:
            raise ValueError(f"min_token_len must be >= 1, got {self.min_token_len}")


DEFAULT_CONFIG = TokenizerConfig()


def tokenize(text: str, config: TokenizerConfig = DEFAULT_CONFIG) -> list[str]:
    text = unicodedata.normalize("NFC", text)
    if config.lowercase:
        text = text.lower()
    tokens = _TOKEN_RE.findall(text)
    if config.min_token_len > 1:
        tokens = [t for t in tokens if len(t) >= config.min_token_len]
    return tokens


def tokenize_all(texts, config: TokenizerConfig = DEFAULT_CONFIG) -> list[list[str]]:
    return [tokenize(t, config) for t in texts]
