import hypothesis.strategies as st
import pytest
from hypothesis import given

from agora import ReferenceToken, parse_reference_text
from agora.errors import BadIdentifier, BadScope, UnterminatedReference
from agora.policy import (
    Literal,
    Reference,
    TemplateText,
    render_segments,
    setting_value_from_json,
    setting_value_to_json,
)


def test_parse_jury_message():
    segments = parse_reference_text(
        "Jury of ${procedure.no_of_jurors}: ${procedure.yes_votes} yes")
    assert segments == [
        "Jury of ",
        ReferenceToken("procedure", "no_of_jurors"),
        ": ",
        ReferenceToken("procedure", "yes_votes"),
        " yes",
    ]


def test_parse_plain_text():
    assert parse_reference_text("no refs") == ["no refs"]


def test_parse_single_token():
    assert parse_reference_text("${action.channel}") == [ReferenceToken("action", "channel")]


def test_parse_empty():
    assert parse_reference_text("") == []


def test_dollar_escape_and_bare_dollar():
    assert parse_reference_text("cost $$5") == ["cost $5"]
    assert parse_reference_text("5$ fee") == ["5$ fee"]
    assert parse_reference_text("$x") == ["$x"]


def test_unterminated_reference():
    with pytest.raises(UnterminatedReference):
        parse_reference_text("hello ${action.channel")


def test_bad_scope():
    with pytest.raises(BadScope):
        parse_reference_text("${global.channel}")


def test_bad_identifier():
    with pytest.raises(BadIdentifier):
        parse_reference_text("${action.Channel}")
    with pytest.raises(BadIdentifier):
        parse_reference_text("${action.}")
    with pytest.raises(BadIdentifier):
        parse_reference_text("${action}")  # scope alone, no name


_LITERALS = st.text(alphabet=st.characters(blacklist_characters="$"), max_size=12)
_TOKENS = st.builds(
    lambda scope, name: str(ReferenceToken(scope, name)),
    st.sampled_from(["action", "procedure"]),
    st.sampled_from(["channel", "yes_votes", "a1", "x_y"]),
)


@given(st.lists(st.one_of(_LITERALS, _TOKENS), max_size=8).map("".join))
def test_round_trip_without_escapes(text):
    assert render_segments(parse_reference_text(text)) == text


@given(st.text(max_size=20))
def test_escaped_round_trip_any_text(text):
    # to_json escapes `$`, so any literal text survives a file round trip
    value = Literal(text)
    assert setting_value_from_json(setting_value_to_json(value)) == value


def test_setting_value_classification():
    assert setting_value_from_json("${action.channel}") == Reference(
        ReferenceToken("action", "channel"))
    template = setting_value_from_json("hi ${action.channel}")
    assert isinstance(template, TemplateText)
    assert setting_value_from_json("plain") == Literal("plain")
    assert setting_value_from_json(3) == Literal(3)
    assert setting_value_from_json(True) == Literal(True)
    assert setting_value_from_json(["alice"]) == Literal(["alice"])
