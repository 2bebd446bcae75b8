# oracle/verbalizer.py

from typing import List, Sequence

from jinja2 import Environment, StrictUndefined, TemplateError

from prompt_learning_engine.models.errors import InvalidInputError
from prompt_learning_engine.models.example import Example

_JINJA_ENV = Environment(undefined=StrictUndefined, autoescape=False, keep_trailing_newline=False)


class Verbalizer:
    """
    Maps class indices to label words and renders examples through a jinja2
    template with the slots `text_a`, `text_b` and `mask`.
    """

    def __init__(self, label_words: Sequence[Sequence[str]], template: str = "{{ text_a }}",
                 mask_token: str = "[MASK]"):
        self.label_words: List[List[str]] = [list(words) for words in label_words]
        if len(self.label_words) < 2:
            raise InvalidInputError("a verbalizer needs at least two classes")
        seen = set()
        for index, words in enumerate(self.label_words):
            if not words:
                raise InvalidInputError(f"class {index} has no label words")
            for word in words:
                if word in seen:
                    raise InvalidInputError(f"label word '{word}' is used by more than one class")
                seen.add(word)
        self.template_source = template
        self.mask_token = mask_token
        try:
            self._template = _JINJA_ENV.from_string(template)
        except TemplateError as e:
            raise InvalidInputError(f"bad verbalizer template '{template}': {e}")

    @property
    def num_classes(self) -> int:
        return len(self.label_words)

    @property
    def candidates(self) -> List[str]:
        """All label words, class by class, in the order they are sent for scoring."""
        return [word for words in self.label_words for word in words]

    def class_slices(self) -> List[slice]:
        """Position of each class's words inside `candidates`."""
        slices, start = [], 0
        for words in self.label_words:
            slices.append(slice(start, start + len(words)))
            start += len(words)
        return slices

    def render(self, example: Example) -> str:
        context = {"text_a": example.text_a, "mask": self.mask_token}
        if example.text_b is not None:
            context["text_b"] = example.text_b
        try:
            return self._template.render(**context).strip()
        except TemplateError as e:
            raise InvalidInputError(f"cannot render example {example.uid}: {e}")
