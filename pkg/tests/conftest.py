from __future__ import annotations

import random
import sys
from dataclasses import dataclass
from pathlib import Path

import pytest

from mainhtml.labeler.labels import LabelSequence
from mainhtml.preprocess import DocumentPair

TESTS = Path(__file__).parent
CORPUS = TESTS / "corpus"

SAMPLE_HTML = (
    "<html><body><h1 cc-select=True>Hello world!</h1>"
    "<aside>advertisement</aside></body></html>"
)
SAMPLE_RECORD = {
    "track_id": "XXXX",
    "html": SAMPLE_HTML,
    "main_html": '<html><body><h1 cc-select="true">Hello world!</h1></body></html>',
    "convert_main_content": "# Hello world!",
    "meta": {
        "language": "en",
        "style": "Article",
        "level": "mid",
        "table": "without",
        "code": "without",
        "equation": "without",
    },
}

PYTHON = sys.executable


def corpus_files() -> list[Path]:
    return sorted(CORPUS.glob("*.html"))


@pytest.fixture
def sample_html() -> str:
    return SAMPLE_HTML


WORDS = (
    "river stone garden window coffee market winter signal harbor paper lantern "
    "orbit meadow copper thunder pencil violet canyon silver bridge forest cotton "
    "engine velvet planet ribbon marble falcon"
).split()


@dataclass
class SyntheticPage:
    html: str
    markdown: str


def _sentence(rng: random.Random, n: int) -> str:
    return " ".join(rng.choice(WORDS) for _ in range(n))


def synthetic_page(seed: int) -> SyntheticPage:
    """A page with known main content marked by ``data-gt`` and its Markdown."""
    rng = random.Random(seed)
    title = _sentence(rng, 4).title()
    main: list[str] = [f'<h1 data-gt="1">{title}</h1>']
    md: list[str] = [f"# {title}"]
    for _ in range(rng.randint(2, 5)):
        text = _sentence(rng, rng.randint(12, 40))
        main.append(f'<p data-gt="1">{text}</p>')
        md.append(text)
    if rng.random() < 0.6:
        items = [_sentence(rng, rng.randint(3, 6)) for _ in range(rng.randint(2, 5))]
        main.append('<ul data-gt="1">' + "".join(f"<li>{i}</li>" for i in items) + "</ul>")
        md.append("\n".join(f"- {i}" for i in items))
    if rng.random() < 0.5:
        rows = [[_sentence(rng, 2) for _ in range(2)] for _ in range(3)]
        main.append(
            '<table data-gt="1">'
            + "".join("<tr>" + "".join(f"<td>{c}</td>" for c in r) + "</tr>" for r in rows)
            + "</table>"
        )
        lines = ["| " + " | ".join(r) + " |" for r in rows]
        lines.insert(1, "| --- | --- |")
        md.append("\n".join(lines))
    if rng.random() < 0.4:
        code = "x = " + str(rng.randint(0, 99))
        main.append(f'<pre data-gt="1"><code>{code}</code></pre>')
        md.append(f"```\n{code}\n```")
    nav = "".join(f'<li><a href="/{w}">{w}</a></li>' for w in rng.sample(WORDS, 6))
    side = "".join(f'<a href="/t/{w}">{w}</a> ' for w in rng.sample(WORDS, 8))
    html = (
        "<!DOCTYPE html><html><head><title>t</title><style>p{}</style></head><body>"
        f"<header><nav><ul>{nav}</ul></nav></header>"
        f'<div class="links">{side}</div>'
        f'<div class="content">{"".join(main)}</div>'
        f'<div class="related"><ul>{nav}</ul></div>'
        "<footer>copyright notice</footer></body></html>"
    )
    return SyntheticPage(html, "\n\n".join(md))


def ground_truth_labels(pair: DocumentPair) -> LabelSequence:
    """Main exactly for blocks whose mapping nodes sit in ``data-gt`` subtrees."""
    tree = pair.mapping
    main_ids = []
    for block in pair.blocks:
        for node in block.mapping_nodes:
            chain = [node, *tree.ancestors(node)]
            if any(tree.attrs[c] and "data-gt" in tree.attrs[c] for c in chain):
                main_ids.append(block.id)
                break
    return LabelSequence.from_main_ids(pair.n_blocks, main_ids)


# -- acceptance reporting -------------------------------------------------

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.skipped:
        status = "SKIP"
    elif report.failed:
        status = "FAIL"
    elif report.when == "call":
        status = "PASS"
    else:
        return
    previous = _CRITERIA.get(number, (title, "PASS"))[1]
    if previous == "FAIL" or (previous == "SKIP" and status == "PASS"):
        status = previous
    _CRITERIA[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status = _CRITERIA[number]
        terminalreporter.write_line(f"{status} criterion {number}: {title}")
