import threading

import pytest

from mainhtml.dom import (
    DomTree,
    NodeKind,
    decode_html,
    parse_fragment,
    parse_html,
    serialize,
    text_content,
)
from mainhtml.errors import EncodingUndecodable


def elements(tree, tag):
    return tree.find_all(tag)


def test_minimal_paragraph():
    tree = parse_html(b"<p>hi</p>")
    (p,) = elements(tree, "p")
    (child,) = tree.children[p]
    assert tree.kind[child] is NodeKind.TEXT
    assert tree.data[child] == "hi"


def test_unclosed_paragraphs_repaired_as_siblings():
    tree = parse_html(b"<p>a<p>b")
    a, b = elements(tree, "p")
    assert tree.parent[a] == tree.parent[b]
    assert [text_content(tree, a), text_content(tree, b)] == ["a", "b"]


def test_sample_page_structure(sample_html):
    tree = parse_html(sample_html.encode())
    body = tree.body()
    tags = [tree.tag[c] for c in tree.children[body]]
    assert tags == ["h1", "aside"]
    (h1,) = elements(tree, "h1")
    assert tree.attrs[h1] == {"cc-select": "True"}


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        parse_html(b"")


def test_serialize_single_element():
    tree, (p,) = parse_fragment("<p>hi</p>")
    assert serialize(tree, p) == "<p>hi</p>"


def test_serialize_quotes_attributes():
    tree, (div,) = parse_fragment('<div class="a" id="b"></div>')
    out = serialize(tree, div)
    assert 'class="a"' in out and 'id="b"' in out


def test_serialize_escapes_text_and_attributes():
    tree = DomTree()
    p = tree.new_element("p", {"title": 'say "x" & y'})
    tree.append(tree.root, p)
    tree.append(p, tree.new_text("1 < 2 & 3"))
    out = serialize(tree, p)
    assert "1 &lt; 2 &amp; 3" in out
    assert 'title="say &quot;x&quot; &amp; y"' in out


def test_void_elements_have_no_end_tag():
    tree, (p,) = parse_fragment("<p>a<br>b<img src=x></p>")
    assert serialize(tree, p) == '<p>a<br>b<img src="x"></p>'


def test_script_text_serialized_literally():
    tree = parse_html(b"<body><script>if (a < b) {}</script></body>")
    assert "if (a < b) {}" in serialize(tree)


def test_doctype_and_comment_preserved():
    tree = parse_html(b"<!DOCTYPE html><html><body><!-- note --><p>x</p></body></html>")
    kinds = {tree.kind[n] for n in tree.iter_subtree(tree.root)}
    assert NodeKind.DOCTYPE in kinds and NodeKind.COMMENT in kinds
    out = serialize(tree)
    assert out.startswith("<!DOCTYPE html>")
    assert "<!-- note -->" in out


@pytest.mark.parametrize(
    "html, expected",
    [
        ("<p>a<b>b</b>c</p>", "abc"),
        ("<div><script>x=1</script>y</div>", "y"),
        ("<div><style>.a{}</style>y</div>", "y"),
        ("<div></div>", ""),
    ],
)
def test_text_content(html, expected):
    tree, (node,) = parse_fragment(html)
    assert text_content(tree, node) == expected


def test_round_trip_preserves_tags_and_text():
    raw = b"<html><body><div><p>one <b>two</b></p><ul><li>3</li><li>4 &amp; 5</li></ul></div></body></html>"
    tree = parse_html(raw)
    again = parse_html(serialize(tree).encode())
    tags = lambda t: [t.tag[n] for n in t.iter_subtree(t.root) if t.kind[n] is NodeKind.ELEMENT]
    assert tags(again) == tags(tree)
    assert text_content(again) == text_content(tree)


def test_handles_stable_under_unrelated_removal():
    tree = parse_html(b"<body><div id=a><p>x</p></div><div id=b><p>y</p></div></body>")
    a, b = elements(tree, "div")
    inner_b = tree.children[b][0]
    tree.detach(a)
    assert not tree.is_attached(a)
    assert tree.is_attached(inner_b)
    assert text_content(tree, inner_b) == "y"
    assert text_content(tree) == "y"


def test_every_non_root_node_has_one_parent():
    tree = parse_html(b"<body><div><p>x</p><p>y<i>z</i></p></div></body>")
    for node in tree.iter_subtree(tree.root):
        if node == tree.root:
            assert tree.parent[node] is None
        else:
            parent = tree.parent[node]
            assert tree.children[parent].count(node) == 1


def test_copy_keeps_handles():
    tree = parse_html(b"<body><p>x</p></body>")
    (p,) = elements(tree, "p")
    clone = tree.copy()
    assert clone.tag[p] == "p"
    clone.detach(p)
    assert tree.is_attached(p)


def test_deep_nesting_is_not_recursive():
    depth = 1500  # past the default recursion limit
    html = "<div>" * depth + "deep" + "</div>" * depth
    tree = parse_html(html)
    assert text_content(tree) == "deep"
    assert "deep" in serialize(tree)


def test_encoding_from_hint_and_meta():
    latin = "<p>café</p>".encode("latin-1")
    assert "café" in decode_html(latin, "latin-1")
    meta = b'<meta charset="iso-8859-1"><p>caf\xe9</p>'
    assert "café" in text_content(parse_html(meta))


def test_encoding_lossy_utf8_fallback():
    text = decode_html(b"<p>ok \xff</p>", None)
    assert "ok" in text and "�" in text


def test_encoding_undecodable():
    with pytest.raises(EncodingUndecodable):
        parse_html(b"\xff\xfe\xfd" * 3, encoding_hint="utf-8")


def test_trees_usable_across_threads():
    results = []

    def work(i):
        tree = parse_html(f"<p>t{i}</p>".encode())
        results.append(text_content(tree))

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(results) == sorted(f"t{i}" for i in range(8))
