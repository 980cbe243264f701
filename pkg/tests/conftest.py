from __future__ import annotations

from pathlib import Path

import pytest

from chorda import parse_document

REPO_ROOT = Path(__file__).resolve().parent.parent
CORPUS_PATH = REPO_ROOT / "corpus" / "pct.chorda"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

FIG3_MARKUP = (
    "@chorda 1\n"
    '@statement id=i1 class=I sender="external consultant" receiver="CIO" data="report"\n'
    "The [[d:report]] shall, as soon as it has been established, be transmitted by the "
    "{{p:external consultant}} to the {{p:CIO}}.\n"
    "@end\n"
)

# The single annotated interaction plus the local statements of the
# store-and-plan walkthrough: one ungrouped store statement and a two-step
# group named "Prepare IT plan".
FIG4_MARKUP = FIG3_MARKUP + (
    '@statement id=l1 class=L participant="CIO" store=true\n'
    "The {{p:CIO}} shall store a copy of the [[d:report]] into the [[d:archive]].\n"
    "@end\n"
    '@statement id=l2 class=L participant="CIO" group="Prepare IT plan"\n'
    "first, collect information on all the systems currently used in the company,\n"
    "@end\n"
    '@statement id=l3 class=L participant="CIO" group="Prepare IT plan"\n'
    "then evaluate their life cycle state (trailing, leading or bleeding edge).\n"
    "@end\n"
)


@pytest.fixture(scope="session")
def corpus_text() -> str:
    return CORPUS_PATH.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def corpus_doc(corpus_text):
    doc, diags = parse_document(corpus_text)
    assert not diags, [d.render() for d in diags]
    return doc


@pytest.fixture()
def fig3_doc():
    doc, diags = parse_document(FIG3_MARKUP)
    assert not diags, [d.render() for d in diags]
    return doc


@pytest.fixture()
def fig4_doc():
    doc, diags = parse_document(FIG4_MARKUP)
    assert not diags, [d.render() for d in diags]
    return doc
