import pytest

from unitlint.protocol import MalformedProtocol, load_protocol, lookup_field_unit, parse_protocol, struct_to_message
from unitlint.units import Frame, UnknownUnit, parse_unit_string

VISION = """
<mavlink>
  <enums><enum name="frames"><entry name="GLOBAL"/><entry name="LOCAL"/></enum></enums>
  <messages>
    <msg id="103" name="VISION_SPEED_ESTIMATE">
      <field type="frame" name="frame">Frame</field>
      <field name="usec" units="us">Timestamp</field>
      <field name="x" units="m/s">Global X speed</field>
      <field name="covariance">Row-major covariance</field>
    </msg>
    <msg id="7" name="HEARTBEAT"></msg>
  </messages>
</mavlink>
"""


def test_field_units_and_relations():
    model = parse_protocol(VISION)
    msg = model.messages["VISION_SPEED_ESTIMATE"]
    assert msg.id == 103
    assert msg.field_units == {"usec": parse_unit_string("us"), "x": parse_unit_string("m/s")}
    assert model.frame_universe == {"GLOBAL", "LOCAL"}
    rel = {(r.control_value, r.target_field): r.implied_type for r in msg.control_relations}
    assert rel[("GLOBAL", "VISION_SPEED_ESTIMATE.x")] == parse_unit_string("m/s").with_frame(Frame.concrete("GLOBAL"))
    # one relation per (control field, measurement field, frame)
    assert len(msg.control_relations) == 1 * 2 * 2
    for r in msg.control_relations:
        plain = msg.field_units[r.target_field.split(".")[1]]
        assert r.implied_type.with_frame(plain.frame) == plain
        assert r.implied_type.frame == Frame.concrete(r.control_value)


def test_empty_message():
    msg = parse_protocol(VISION).messages["HEARTBEAT"]
    assert msg.field_units == {} and msg.control_relations == []


def test_same_field_name_in_two_messages():
    model = parse_protocol("""
    <mavlink><messages>
      <msg id="1" name="A"><field name="alt" units="m">x</field></msg>
      <msg id="2" name="B"><field name="alt" units="cm">x</field></msg>
    </messages></mavlink>""")
    assert model.messages["A"].field_units["alt"] == parse_unit_string("m")
    assert model.messages["B"].field_units["alt"] == parse_unit_string("cm")


def test_lookup_by_struct_name():
    model = parse_protocol(VISION)
    assert lookup_field_unit(model, "vision_speed_estimate_t", "x") == parse_unit_string("m/s")
    assert lookup_field_unit(model, "mavlink_vision_speed_estimate_t", "usec") == parse_unit_string("us")
    assert lookup_field_unit(model, "vision_speed_estimate_t", "nonexistent") is None
    assert lookup_field_unit(model, "unknown_t", "x") is None
    assert struct_to_message("mavlink_obstacle_distance_t") == "OBSTACLE_DISTANCE"


def test_landing_target_fixture(fixtures):
    model = load_protocol(fixtures / "px4_17354" / "protocol.xml")
    u = lookup_field_unit(model, "landing_target_t", "img_angle_x")
    assert u == parse_unit_string("rad").with_frame(Frame.concrete("BODY_FRD"))
    assert model.messages["LANDING_TARGET"].controlled_fields("frame") == ["img_angle_x", "img_angle_y"]


def test_deterministic():
    assert parse_protocol(VISION) == parse_protocol(VISION.encode())


@pytest.mark.parametrize(
    "text",
    [
        "<mavlink><messages>",
        "<other/>",
        "<mavlink><bogus/></mavlink>",
        '<mavlink><messages><msg id="1" name="A"/><msg id="1" name="B"/></messages></mavlink>',
        '<mavlink><messages><msg id="1" name="A"/><msg id="2" name="A"/></messages></mavlink>',
        '<mavlink><messages><msg id="x" name="A"/></messages></mavlink>',
        '<mavlink><messages><msg id="1" name="A"><field name="f" units="m" frame="NOPE">d</field></msg></messages></mavlink>',
    ],
)
def test_malformed(text):
    with pytest.raises(MalformedProtocol):
        parse_protocol(text)


def test_unknown_unit_propagates():
    with pytest.raises(UnknownUnit):
        parse_protocol('<mavlink><messages><msg id="1" name="A"><field name="f" units="parsec">d</field></msg></messages></mavlink>')
