from __future__ import annotations

import re
import xml.etree.ElementTree as ET

from hypothesis import given

from chorda import BpmnModel, SubProcess, expand, generate_skeleton, layout, to_svg

from .strategies import expanded_models

SVG_NS = "{http://www.w3.org/2000/svg}"


def svg_for(model) -> str:
    return to_svg(layout(model))


class TestSvgBasics:
    def test_empty_model_renders_an_empty_canvas(self):
        text = svg_for(BpmnModel())
        root = ET.fromstring(text)
        assert root.tag == f"{SVG_NS}svg"
        assert [c.tag for c in root] == [f"{SVG_NS}defs"]

    def test_fig3_has_exactly_one_dashed_arrow(self, fig3_doc):
        model, _ = generate_skeleton(fig3_doc)
        text = svg_for(model)
        assert text.count("stroke-dasharray") == 1

    def test_fig3_has_a_plus_marked_collapsed_subprocess(self, fig3_doc):
        model, _ = generate_skeleton(fig3_doc)
        text = svg_for(model)
        assert text.count('class="plus-marker"') == 1
        assert 'class="subprocess collapsed"' in text

    def test_expanded_subprocess_loses_the_plus_marker(self, fig4_doc):
        model, _ = generate_skeleton(fig4_doc)
        expanded, _ = expand(model, fig4_doc, ())
        # bind nothing: "Process report" stays collapsed, "Prepare IT plan" is expanded
        text = svg_for(expanded)
        assert text.count('class="plus-marker"') == 1

    def test_store_glyph_is_open_ended(self, fig4_doc):
        model, _ = generate_skeleton(fig4_doc)
        expanded, _ = expand(model, fig4_doc, ())
        assert 'class="store"' in svg_for(expanded)

    def test_labels_are_element_names(self, fig3_doc):
        model, _ = generate_skeleton(fig3_doc)
        text = svg_for(model)
        for name in ("Send report", "Receive report", "Process report"):
            assert f">{name}</text>" in text

    def test_repeat_render_is_byte_identical(self, corpus_doc):
        model, _ = generate_skeleton(corpus_doc)
        assert svg_for(model) == svg_for(model)


class TestSvgGeometryFaithfulness:
    @given(expanded_models())
    def test_emitted_coordinates_match_layout(self, case):
        _, model, _ = case
        diagram = layout(model)
        root = ET.fromstring(to_svg(diagram))
        seen = {}
        for element in root.iter():
            node_id = element.get("id", "")
            if node_id.startswith("node-"):
                seen[node_id[len("node-"):]] = element
        for pool in model.pools:
            stack = list(pool.nodes)
            while stack:
                node = stack.pop(0)
                rect = diagram.geometry[node.id]
                element = seen[node.id]
                if element.tag == f"{SVG_NS}rect":
                    assert float(element.get("x")) == rect.x
                    assert float(element.get("y")) == rect.y
                    assert float(element.get("width")) == rect.width
                elif element.tag == f"{SVG_NS}circle":
                    assert float(element.get("cx")) == rect.x + rect.width / 2
                    assert float(element.get("cy")) == rect.y + rect.height / 2
                if isinstance(node, SubProcess):
                    stack.extend(node.nodes)

    @given(expanded_models())
    def test_dashed_arrow_count_equals_message_flow_count(self, case):
        _, model, _ = case
        assert svg_for(model).count("stroke-dasharray") == len(model.message_flows)

    @given(expanded_models())
    def test_svg_is_wellformed(self, case):
        _, model, _ = case
        ET.fromstring(svg_for(model))
