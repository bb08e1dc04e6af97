from .while_base import while_language
from .while_ext import ext_while_language

PACKS = {
    "while": while_language,
    "while-ext": ext_while_language,
}


def get_language(name: str):
    try:
        return PACKS[name]()
    except KeyError:
        raise KeyError(f"unknown language {name!r}; expected one of {sorted(PACKS)}") from None
