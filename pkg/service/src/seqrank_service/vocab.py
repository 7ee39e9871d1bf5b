"""Deterministic built-in tokenizer for the tiny bundled model.

A handcrafted WordPiece vocabulary: whole tokens for common English words
(plus the ranking target words), single characters and ``##`` continuations
as a fallback so any ASCII word decomposes into pieces. Unknown scripts map
to [UNK]. Built in code, so the tokenizer is identical on every install.
"""

from __future__ import annotations

from tokenizers import Tokenizer, models, normalizers, pre_tokenizers
from transformers import PreTrainedTokenizerFast

PAD_TOKEN = "[PAD]"
UNK_TOKEN = "[UNK]"
EOS_TOKEN = "</s>"

_CHARS = "abcdefghijklmnopqrstuvwxyz0123456789.,:;?!'\"()[]-/&%$#@*+=_<>~`^|\\{}▁"

# Frequent English words keep prompts compact; the probing target words and
# subword markers are deliberately single tokens.
_WORDS = """
query document relevant true false hot cold apple orange
the a an and or but if then else of in on at to from by with without
is are was were be been being am do does did done have has had having
will would can could shall should may might must not never always often
i you he she it we they me him her us them my your his its our their
this that these those there here where when why how what which who whom
as so than too very much many few more most less least some any all none
no yes both each every either neither one two three four five six seven
eight nine ten first second third last next previous new old good bad
big small long short high low early late same different other another
man woman men women child children people person family friend house home
city country world state nation government school university student
teacher work job business company market money price cost value time year
month week day hour minute second morning evening night today tomorrow
yesterday water food air fire earth sun moon star sky sea river mountain
tree flower animal dog cat bird fish horse car train plane ship road
street book paper letter word name number part whole piece group team
question answer problem result reason cause effect idea thought fact
story history science art music film game sport play run walk go come
see look watch hear listen speak say tell ask read write learn teach
know think believe feel want need like love hate find get give take make
put set keep hold turn move bring carry send show open close start stop
begin end live die grow change help try use call right wrong large little
great important public private national local general special possible
information system computer internet web site page data file search
engine rank order list index term text passage sentence title
description topic label model train test score probability logit token
health disease doctor hospital medicine law court police war peace army
force power energy oil gas coal electric light dark color red blue green
white black north south east west left
""".split()


def build_vocab() -> dict[str, int]:
    vocab: dict[str, int] = {PAD_TOKEN: 0, UNK_TOKEN: 1, EOS_TOKEN: 2}

    def add(token: str) -> None:
        if token not in vocab:
            vocab[token] = len(vocab)

    for ch in _CHARS:
        add(ch)
        add(f"##{ch}")
    for word in _WORDS:
        add(word)
    # subword probing targets: block marker fused to a two-letter stem
    add("▁ab")
    add("▁de")
    return vocab


def build_tokenizer() -> PreTrainedTokenizerFast:
    tokenizer = Tokenizer(
        models.WordPiece(build_vocab(), unk_token=UNK_TOKEN, max_input_chars_per_word=200)
    )
    tokenizer.normalizer = normalizers.Lowercase()
    tokenizer.pre_tokenizer = pre_tokenizers.WhitespaceSplit()
    return PreTrainedTokenizerFast(
        tokenizer_object=tokenizer,
        pad_token=PAD_TOKEN,
        unk_token=UNK_TOKEN,
        eos_token=EOS_TOKEN,
    )
