"""Protocol definition files: per-message field units and frame control relations.

The accepted XML is a small MAVLink subset::

    <mavlink>
      <enums><enum name="frames"><entry name="GLOBAL"/>...</enum></enums>
      <messages>
        <msg id="103" name="VISION_SPEED_ESTIMATE">
          <field type="frame" name="frame">Frame</field>
          <field name="x" units="m/s">Global X speed</field>
        </msg>
      </messages>
    </mavlink>

A field with ``type="frame"`` is a control field: its value names the frame of
every sibling field that carries units.  A field may also carry a
``frame="A,B"`` attribute giving the frame its value has when the control
field has not been tested.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from unitlint.units import ANY, Frame, UnitType, parse_unit_string

__all__ = [
    "MalformedProtocol",
    "ControlRelation",
    "MessageDef",
    "ProtocolModel",
    "parse_protocol",
    "load_protocol",
    "lookup_field_unit",
    "struct_to_message",
]


class MalformedProtocol(ValueError):
    pass


@dataclass(frozen=True)
class ControlRelation:
    control_field: str
    control_value: str
    target_field: str
    implied_type: UnitType


@dataclass
class MessageDef:
    id: int
    name: str
    field_units: dict = field(default_factory=dict)
    control_fields: list = field(default_factory=list)
    fields: list = field(default_factory=list)
    control_relations: list = field(default_factory=list)

    def relations_for(self, control_field: str) -> list:
        return [r for r in self.control_relations if r.control_field == f"{self.name}.{control_field}"]

    def controlled_fields(self, control_field: str) -> list:
        seen = []
        for rel in self.relations_for(control_field):
            target = rel.target_field.split(".", 1)[1]
            if target not in seen:
                seen.append(target)
        return seen


@dataclass
class ProtocolModel:
    messages: dict = field(default_factory=dict)
    frame_universe: frozenset = frozenset()

    def message_for_struct(self, struct_name: str) -> MessageDef | None:
        return self.messages.get(struct_to_message(struct_name))


_MSG_ALLOWED = {"field", "description", "wip", "deprecated", "extensions"}


def _frame_attr(text: str, universe: frozenset, where: str) -> Frame:
    frame = Frame.parse(text)
    if frame.names is not None and not frame.names <= universe:
        unknown = ", ".join(sorted(frame.names - universe))
        raise MalformedProtocol(f"{where}: frame(s) {unknown} not declared in the frames enum")
    return frame


def parse_protocol(xml_text: str | bytes) -> ProtocolModel:
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise MalformedProtocol(f"XML error: {exc}") from None
    if root.tag != "mavlink":
        raise MalformedProtocol(f"root element must be <mavlink>, found <{root.tag}>")

    universe: set = set()
    message_elems = []
    for child in root:
        if child.tag == "enums":
            for enum in child:
                if enum.tag != "enum":
                    raise MalformedProtocol(f"unexpected <{enum.tag}> in <enums>")
                if enum.get("name") != "frames":
                    continue
                for entry in enum:
                    if entry.tag == "description":
                        continue
                    if entry.tag != "entry" or not entry.get("name"):
                        raise MalformedProtocol("frames enum entries must be <entry name=...>")
                    universe.add(entry.get("name"))
        elif child.tag == "messages":
            message_elems.extend(child)
        elif child.tag in ("include", "version", "dialect"):
            continue
        else:
            raise MalformedProtocol(f"unexpected element <{child.tag}>")

    frames = frozenset(universe)
    model = ProtocolModel(frame_universe=frames)
    ids = set()
    for msg in message_elems:
        if msg.tag != "msg":
            raise MalformedProtocol(f"unexpected <{msg.tag}> in <messages>")
        name = msg.get("name")
        try:
            msg_id = int(msg.get("id", ""))
        except ValueError:
            raise MalformedProtocol(f"message {name!r} has a missing or bad id") from None
        if not name:
            raise MalformedProtocol(f"message {msg_id} has no name")
        if name in model.messages or msg_id in ids:
            raise MalformedProtocol(f"duplicate message {name} (id {msg_id})")
        ids.add(msg_id)
        model.messages[name] = _parse_message(msg, msg_id, name, frames)
    if not frames and any(m.control_fields for m in model.messages.values()):
        raise MalformedProtocol("frame-typed fields require a non-empty <enum name=\"frames\">")
    return model


def _parse_message(msg, msg_id: int, name: str, frames: frozenset) -> MessageDef:
    mdef = MessageDef(id=msg_id, name=name)
    for fld in msg:
        if fld.tag not in _MSG_ALLOWED:
            raise MalformedProtocol(f"unexpected <{fld.tag}> in message {name}")
        if fld.tag != "field":
            continue
        fname = fld.get("name")
        if not fname:
            raise MalformedProtocol(f"field without a name in message {name}")
        if fname in mdef.fields:
            raise MalformedProtocol(f"duplicate field {name}.{fname}")
        mdef.fields.append(fname)
        if fld.get("type") == "frame":
            mdef.control_fields.append(fname)
            continue
        units = fld.get("units")
        if units is None:
            continue
        unit = parse_unit_string(units)
        default = _frame_attr(fld.get("frame"), frames, f"{name}.{fname}") if fld.get("frame") else ANY
        mdef.field_units[fname] = unit.with_frame(default)

    for ctrl in mdef.control_fields:
        for value in sorted(frames):
            for target, unit in mdef.field_units.items():
                mdef.control_relations.append(
                    ControlRelation(
                        control_field=f"{name}.{ctrl}",
                        control_value=value,
                        target_field=f"{name}.{target}",
                        implied_type=unit.with_frame(Frame.concrete(value)),
                    )
                )
    return mdef


def load_protocol(path: str | Path) -> ProtocolModel:
    return parse_protocol(Path(path).read_bytes())


def struct_to_message(struct_name: str) -> str:
    """``mavlink_vision_speed_estimate_t`` -> ``VISION_SPEED_ESTIMATE``."""
    name = struct_name
    if name.startswith("mavlink_"):
        name = name[len("mavlink_"):]
    if name.endswith("_t"):
        name = name[:-2]
    return name.upper()


def lookup_field_unit(model: ProtocolModel, struct_name: str, field_name: str) -> UnitType | None:
    msg = model.message_for_struct(struct_name)
    if msg is None:
        return None
    return msg.field_units.get(field_name)
