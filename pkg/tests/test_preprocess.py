import json

import pytest

from mainhtml.dom import normalize_ws, parse_html, serialize, text_content
from mainhtml.errors import EmptyDocument
from mainhtml.preprocess import (
    DEFAULT_REMOVED_TAGS,
    SimplifyConfig,
    build_document_pair,
    chunk_blocks,
    simplify_attributes,
    strip_non_content,
    truncate_block,
)
from mainhtml.tokens import ApproxTokenizer, count_tokens

CFG = SimplifyConfig()


def body_html(tree):
    out = serialize(tree, tree.body())
    return out


def table(rows, cols, cell="c"):
    return "<table>" + "".join("<tr>" + f"<td>{cell}</td>" * cols + "</tr>" for _ in range(rows)) + "</table>"


# -- config ---------------------------------------------------------------


def test_config_always_keeps_class_and_id():
    cfg = SimplifyConfig(kept_attributes={"href"})
    assert {"class", "id", "href"} <= cfg.kept_attributes


def test_config_rejects_bad_truncation():
    with pytest.raises(ValueError):
        SimplifyConfig(paragraph_truncation_chars=0)


def test_config_from_mapping_rejects_unknown_keys():
    with pytest.raises(ValueError):
        SimplifyConfig.from_mapping({"paragraph_chars": 10})


def test_config_from_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"simplify": {"paragraph_truncation_chars": 50, "removed_tags": ["style"]}}))
    cfg = SimplifyConfig.from_file(path)
    assert cfg.paragraph_truncation_chars == 50
    assert cfg.removed_tags == frozenset({"style"})


def test_default_removed_tags():
    assert {"script", "style", "header", "aside", "nav", "footer"} <= DEFAULT_REMOVED_TAGS


# -- strip / attributes ---------------------------------------------------


def test_strip_style():
    tree = parse_html("<body><style>.a{}</style><p>t</p></body>")
    assert body_html(strip_non_content(tree, CFG)) == "<body><p>t</p></body>"


def test_strip_aside_leaves_empty_body():
    tree = parse_html("<body><aside>ad</aside></body>")
    assert body_html(strip_non_content(tree, CFG)) == "<body></body>"


def test_strip_identity_and_comments():
    tree = parse_html("<!DOCTYPE html><body><!-- c --><div><p>t</p></div></body>")
    out = serialize(strip_non_content(tree, CFG))
    assert "<!" not in out
    assert "<div><p>t</p></div>" in out


def test_form_wrapping_the_page_is_kept():
    # ASP.NET style pages wrap everything in one form
    html = "<body><form><p>" + "real content " * 20 + "</p></form><form><button>go</button></form></body>"
    tree = strip_non_content(parse_html(html), CFG)
    assert "real content" in text_content(tree)
    assert len(tree.find_all("form")) == 1


def test_simplify_attributes():
    tree = parse_html('<div class="a" style="x" id="b" data-y="z"><a href="u" class="c">l</a></div>')
    out = body_html(simplify_attributes(tree, CFG))
    assert out == '<body><div class="a" id="b"><a class="c">l</a></div></body>'


def test_simplify_attributes_identity():
    tree = parse_html("<div><p>x</p></div>")
    assert body_html(simplify_attributes(tree, CFG)) == "<body><div><p>x</p></div></body>"


# -- chunking -------------------------------------------------------------


def tags_of(tree, groups):
    return [[tree.tag[n] for n in g] for g in groups]


def test_chunk_heading_and_paragraphs():
    tree = parse_html("<body><h1>t</h1><p>a</p><p>b</p></body>")
    assert tags_of(tree, chunk_blocks(tree, CFG)) == [["h1"], ["p"], ["p"]]


def test_chunk_table_indivisible():
    tree = parse_html("<body><p>a</p><table><tr><td>x</td><td>y</td></tr></table><p>b</p></body>")
    assert tags_of(tree, chunk_blocks(tree, CFG)) == [["p"], ["table"], ["p"]]


def test_chunk_lists_indivisible():
    tree = parse_html("<body><ul><li>a</li><li>b</li></ul><ol><li>c</li></ol></body>")
    assert tags_of(tree, chunk_blocks(tree, CFG)) == [["ul"], ["ol"]]


def test_chunk_layout_table_split():
    html = "<body><table><tr><td><p>left</p></td><td><p>right</p><p>more</p></td></tr></table></body>"
    tree = parse_html(html)
    texts = [normalize_ws("".join(text_content(tree, n) for n in g)) for g in chunk_blocks(tree, CFG)]
    assert texts == ["left", "right", "more"]


def test_chunk_long_cell_table_split():
    long = "word " * 100
    html = f"<body><table><tr><td>{long}</td><td>short</td></tr></table></body>"
    tree = parse_html(html)
    assert len(chunk_blocks(tree, CFG)) == 2


def test_chunk_inline_runs_grouped():
    tree = parse_html("<body>text <b>bold</b> tail<p>para</p>more</body>")
    groups = chunk_blocks(tree, CFG)
    assert [len(g) for g in groups] == [3, 1, 1]


def test_chunk_drops_empty_blocks():
    tree = parse_html("<body><p> </p><div><p>x</p></div><p></p></body>")
    assert tags_of(tree, chunk_blocks(tree, CFG)) == [["p"]]


def test_chunk_empty_document():
    with pytest.raises(EmptyDocument):
        chunk_blocks(parse_html("<body>   </body>"), CFG)


# -- truncation -----------------------------------------------------------


def test_truncate_long_paragraph():
    out, cut = truncate_block("<p>" + "x" * 500 + "</p>", CFG)
    assert cut
    assert out == "<p>" + "x" * 200 + "</p>"


def test_truncate_short_paragraph_unchanged():
    html = "<p>" + "x" * 150 + "</p>"
    assert truncate_block(html, CFG) == (html, False)


def test_truncate_table_cells():
    out, cut = truncate_block(table(5, 8), CFG)
    tree = parse_html(out)
    assert cut
    assert len(tree.find_all("td")) == 12


def test_truncate_list_items():
    out, cut = truncate_block("<ul>" + "<li>i</li>" * 15 + "</ul>", CFG)
    assert cut
    assert out.count("<li>") == 10


def test_truncate_nested_paragraph_inside_div():
    out, cut = truncate_block("<div><b>" + "y" * 300 + "</b>tail</div>", CFG)
    assert cut
    assert normalize_ws(text_content(parse_html(out))) == "y" * 200


# -- document pair --------------------------------------------------------


def test_sample_pair(sample_html):
    pair = build_document_pair(sample_html.encode())
    assert pair.n_blocks == 1
    block = pair.blocks[0]
    assert block.id == 1
    assert block.simplified_html == '<h1 item-id="1">Hello world!</h1>'
    assert pair.mapping_text(block) == "Hello world!"
    assert "advertisement" not in pair.simplified_html


def test_pair_item_attribute_configurable(sample_html):
    pair = build_document_pair(sample_html, SimplifyConfig(item_attribute_name="_item_id"))
    assert '_item_id="1"' in pair.simplified_html


def test_pair_inline_runs_get_wrappers():
    pair = build_document_pair("<body>text <b>bold</b> tail<p>para</p>more</body>")
    assert pair.simplified_html == (
        '<html><body><span item-id="1">text <b>bold</b> tail</span>'
        '<p item-id="2">para</p><span item-id="3">more</span></body></html>'
    )
    assert pair.unannotated_html() == "<html><body>text <b>bold</b> tail<p>para</p>more</body></html>"


def test_pair_truncation_only_on_simplified_side():
    long = "z" * 600
    pair = build_document_pair(f"<body><p>{long}</p><p>next</p></body>")
    block = pair.blocks[0]
    assert block.truncated
    assert len(pair.simplified_text(block)) == 200
    assert pair.mapping_text(block) == long
    assert not pair.blocks[1].truncated


def test_pair_table_block_truncated():
    pair = build_document_pair(f"<body><p>intro</p>{table(5, 8)}</body>")
    assert [b.truncated for b in pair.blocks] == [False, True]
    assert pair.blocks[1].tag == "table"


def test_pair_token_count():
    pair = build_document_pair("<body><p>one two three</p></body>")
    assert pair.simplified_token_count == count_tokens(ApproxTokenizer(), pair.simplified_html)


def test_pair_accepts_parsed_tree():
    tree = parse_html("<body><p>a</p><p>b</p></body>")
    pair = build_document_pair(tree)
    assert pair.n_blocks == 2
    assert text_content(tree) == "ab"


def test_pair_mapping_keeps_removed_content():
    pair = build_document_pair("<body><nav>menu</nav><p>body text</p></body>")
    assert pair.n_blocks == 1
    assert "menu" in text_content(pair.mapping)


def test_pair_alignment_on_mixed_page():
    html = (
        "<body><header>h</header><div>lead <a href=x>link</a><p>p1</p>"
        "<section><h2>s</h2>loose text<ul><li>a</li><li>b</li></ul></section></div>"
        f"{table(2, 2)}<pre>  code\n  kept</pre></body>"
    )
    pair = build_document_pair(html)
    assert [b.id for b in pair.blocks] == list(range(1, pair.n_blocks + 1))
    for block in pair.blocks:
        simplified = normalize_ws(pair.simplified_text(block))
        mapped = pair.mapping_text(block)
        it = iter(mapped)
        assert all(ch in it for ch in simplified), block


def test_pair_empty_document():
    with pytest.raises(EmptyDocument):
        build_document_pair("<html><body><nav>only chrome</nav></body></html>")
