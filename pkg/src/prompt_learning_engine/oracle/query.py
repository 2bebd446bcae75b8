# oracle/query.py

from dataclasses import dataclass
from typing import Sequence, Tuple

from prompt_learning_engine.models.constants import Placement
from prompt_learning_engine.models.errors import InvalidInputError


@dataclass(frozen=True)
class Query:
    """
    Text sent to the oracle. The prompt tokens and the input it was built from
    are kept alongside so local oracles can tell the prompt region apart.
    """
    text: str
    placement: str
    prompt_tokens: Tuple[str, ...] = ()
    input_text: str = ""


def build_query(prompt_tokens: Sequence[str], input_text: str, placement: str = Placement.PREFIX) -> Query:
    """
    Place the prompt relative to the input: before it (prefix), after it
    (suffix), or at the midpoint token boundary (infix). Tokens are joined by
    single spaces; an empty prompt passes the input through.
    """
    prompt_tokens = tuple(prompt_tokens)
    if placement == Placement.PREFIX:
        parts = [*prompt_tokens, input_text]
    elif placement == Placement.SUFFIX:
        parts = [input_text, *prompt_tokens]
    elif placement == Placement.INFIX:
        words = input_text.split()
        mid = len(words) // 2
        parts = [*words[:mid], *prompt_tokens, *words[mid:]]
    else:
        raise InvalidInputError(f"unknown placement '{placement}'")
    if not prompt_tokens:
        text = input_text
    else:
        text = " ".join(part for part in parts if part)
    return Query(text=text, placement=placement, prompt_tokens=prompt_tokens, input_text=input_text)
