"""Shared generators and fixture loading for the test suite."""

from __future__ import annotations

from pathlib import Path

from hypothesis import strategies as st

from critics.story import CharacterEntry, Outline, OutlineItem, StoryPackage

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name: str) -> str:
    return (FIXTURES / name).read_text()


_word = st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=8)
_words = st.lists(_word, min_size=1, max_size=8).map(" ".join)
_name = st.text(alphabet="ABCDEFGHIJKLMNOPQRSTUVWXYZ", min_size=1, max_size=10)


@st.composite
def story_packages(draw) -> StoryPackage:
    """Random valid packages whose rendered text parses back to equality."""
    names = draw(st.lists(_name, min_size=1, max_size=4, unique=True))
    characters = tuple(CharacterEntry(n, draw(_words)) for n in names)

    def item(label: str, with_children: bool) -> OutlineItem:
        children = ()
        if with_children:
            n_children = draw(st.integers(0, 3))
            children = tuple(
                item(chr(ord("a") + k), False) for k in range(n_children)
            )
        scene = draw(st.one_of(st.none(), st.just(""), _words))
        chars = tuple(draw(st.lists(st.sampled_from(names), max_size=2, unique=True)))
        return OutlineItem(
            label=label,
            summary=draw(_words),
            scene=scene,
            characters=chars,
            children=children,
        )

    n_items = draw(st.integers(1, 4))
    items = tuple(item(str(k + 1), True) for k in range(n_items))
    return StoryPackage(
        premise=draw(_words),
        setting=draw(_words),
        characters=characters,
        outline=Outline(items=items),
    )
