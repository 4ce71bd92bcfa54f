"""Deterministic synthetic corpus for the scale check.

Each module owns a handful of globals seeded through a shared type
database, a message struct from a small protocol, and a mix of straight-line
arithmetic, guarded branches and switch statements.  Roughly one module in
five carries a deliberate centimetre/metre slip.
"""

import json
import random
from pathlib import Path

PROTOCOL = """<mavlink>
  <enums>
    <enum name="frames">
      <entry name="GLOBAL"/><entry name="LOCAL_NED"/><entry name="BODY_FRD"/>
    </enum>
  </enums>
  <messages>
    <msg id="1" name="POSITION">
      <field type="frame" name="frame">frame</field>
      <field name="x" units="m">x</field>
      <field name="y" units="m">y</field>
      <field name="z" units="cm">z</field>
      <field name="vx" units="m/s">vx</field>
      <field name="t" units="ms">t</field>
    </msg>
  </messages>
</mavlink>
"""

_UNITS = ["m", "cm", "s", "ms", "m/s", "deg", "rad"]


def _module(rng: random.Random, k: int, db: list) -> str:
    p = f"m{k}"
    lines = [f"// synthetic module {k}", f"enum {p}_mode {{ {p.upper()}_IDLE, {p.upper()}_RUN, {p.upper()}_HOLD }};"]
    globals_ = []
    for j in range(8):
        name = f"{p}_g{j}"
        lines.append(f"float {name};")
        globals_.append(name)
    lines.append(f"int {p}_state;")
    # seed half the globals from the shared database
    typed = {}
    for name in globals_[:4]:
        unit = rng.choice(_UNITS)
        typed[name] = unit
        db.append({"canonical_name": name, "unit": unit, "frame": "Any", "rule": "approximate", "qoi": "alt"})
    lines.append("")
    for f in range(6):
        lines.append(f"float {p}_calc{f}(position_t msg, float gain) {{")
        a, b = rng.sample(globals_, 2)
        lines.append(f"    float lo = msg.x * gain;")
        lines.append(f"    float hi = msg.y * gain;")
        lines.append(f"    float span = hi - lo;")
        lines.append(f"    float rate = msg.vx * 2.0;")
        lines.append(f"    float mid = (hi + lo) / 2.0;")
        lines.append(f"    if (msg.frame == GLOBAL) {{")
        lines.append(f"        {a} = {a} * 1.5;")
        lines.append(f"    }} else {{")
        lines.append(f"        {b} = {b} + {b};")
        lines.append(f"    }}")
        lines.append(f"    switch ({p}_state) {{")
        lines.append(f"        case {p.upper()}_IDLE: {a} = {a} * 0.5; break;")
        lines.append(f"        case {p.upper()}_RUN: {b} = {b} / 2.0; break;")
        lines.append(f"        default: {p}_state = {p.upper()}_HOLD;")
        lines.append(f"    }}")
        lines.append(f"    float t1 = msg.t / 1000.0;")
        lines.append(f"    float dist = rate * t1;")
        lines.append(f"    float total = dist + mid;")
        lines.append(f"    return fabsf(total - span) + fabsf(mid - lo);")
        lines.append("}")
        lines.append("")
    buggy = k % 5 == 0
    lines.append(f"void {p}_step(position_t msg) {{")
    lines.append(f"    float depth = msg.z;")
    if buggy:
        lines.append(f"    float err = depth - msg.x;")
    else:
        lines.append(f"    float err = depth / 100.0 - msg.x;")
    for f in range(6):
        lines.append(f"    float r{f} = {p}_calc{f}(msg, 1.0);")
    lines.append(f"    {globals_[4]} = err + r0;")
    lines.append(f"    {globals_[5]} = r1 + r2 + r3;")
    for name, unit in typed.items():
        lines.append(f"    {globals_[6]} = {name} * 2.0;")
        lines.append(f"    {globals_[7]} = {name} / 4.0;")
        break
    lines.append("}")
    lines.append("")
    lines.append(f"void {p}_tick() {{")
    for j, name in enumerate(globals_[4:], start=4):
        lines.append(f"    {name} = {name} * 0.99;")
    lines.append(f"    if ({p}_state == {p.upper()}_RUN) {{")
    lines.append(f"        {p}_state = {p.upper()}_HOLD;")
    lines.append(f"        return;")
    lines.append(f"    }}")
    lines.append(f"    {p}_state = {p.upper()}_RUN;")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_corpus(root: Path, n_files: int = 60, seed: int = 7) -> tuple:
    """Write the corpus under ``root``; returns ``(paths, protocol_path, db_path, total_lines)``."""
    rng = random.Random(seed)
    root.mkdir(parents=True, exist_ok=True)
    db = []
    paths = []
    total = 0
    for k in range(n_files):
        text = _module(rng, k, db)
        path = root / f"module_{k:03d}.ml4u"
        path.write_text(text)
        paths.append(path)
        total += text.count("\n")
    proto = root / "protocol.xml"
    proto.write_text(PROTOCOL)
    db_path = root / "db.json"
    db_path.write_text(json.dumps(db, indent=1))
    return paths, proto, db_path, total
