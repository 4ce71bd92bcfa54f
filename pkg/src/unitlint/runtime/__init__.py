from unitlint.runtime.interp import BUILTINS, RuntimeFault, enum_var_ids, interpret
from unitlint.runtime.scenario import QoiDecl, Scenario, ScenarioError, load_qoi_decls, load_scenario, loads_scenario
from unitlint.runtime.trace import Observation, Trace, TraceFormatError, read_trace, write_trace

__all__ = [
    "BUILTINS",
    "RuntimeFault",
    "enum_var_ids",
    "interpret",
    "QoiDecl",
    "Scenario",
    "ScenarioError",
    "load_qoi_decls",
    "load_scenario",
    "loads_scenario",
    "Observation",
    "Trace",
    "TraceFormatError",
    "read_trace",
    "write_trace",
]
