from __future__ import annotations

from functools import lru_cache
from importlib import resources

TEMPLATE_NAME = "classification_prompt.txt"


@lru_cache(maxsize=1)
def prompt_template() -> str:
    return resources.files("mainhtml.labeler").joinpath("assets", TEMPLATE_NAME).read_text(encoding="utf-8")


@lru_cache(maxsize=64)
def build_prompt(simplified_html: str, item_attribute_name: str = "item-id") -> str:
    """Fill the block-classification prompt with the attribute name and page HTML."""
    return prompt_template().format(ITEM_ID_ATTR=item_attribute_name, html_str=simplified_html)


def prompt_html_section(prompt: str) -> str:
    """Recover the page HTML embedded in a prompt built by :func:`build_prompt`."""
    marker = "Input HTML:\n"
    start = prompt.find(marker)
    if start < 0:
        return ""
    start += len(marker)
    end = prompt.rfind("\n\nOutput format should be")
    return prompt[start:end if end >= start else len(prompt)]
