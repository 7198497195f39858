"""Simulation-surrogate soundness checks for small corpus fixtures.

A fixture is exhaustively simulable when its registers hold at most
``MAX_STATE_BITS`` bits, its free inputs (everything but clock and reset)
span at most ``MAX_INPUT_BITS`` bits, and it has one clock, one reset, no
arrays and no non-synthesizable code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from hdlscope.builtin import default_registry
from hdlscope.frontend import compile_files
from hdlscope.ir import Guard
from hdlscope.manager import AnalysisContext

from .irsim import Observer, SimError, Simulator, explore, free_input_bits, registers, state_bits

MAX_STATE_BITS = 12
MAX_INPUT_BITS = 6
DEPTH = 8

_RESET = re.compile(r"^(rst|reset)(_?n)?$")


@dataclass
class Verdict:
    name: str
    simulable: bool
    why: str = ""
    cycles: int = 0
    const_violations: list = field(default_factory=list)  # (a)
    unreachable_violations: list = field(default_factory=list)  # (b)
    closure_violations: list = field(default_factory=list)  # (c)
    checked_values: int = 0
    unreachable_reports: int = 0
    stuck_registers: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.const_violations or self.unreachable_violations or self.closure_violations)


def _clock_and_reset(h):
    clocks = set()
    for pid, proc in h.procs:
        for s in proc.statements:
            if isinstance(s, Guard) and s.edge_sensitive:
                clocks |= {e.expr.name for e in s.events if e.edge == "posedge"}
    tops = {n for n, s in h.signals.items() if s.top_input}
    clocks &= tops
    resets = sorted(n for n in tops if _RESET.match(n))
    if len(clocks) != 1 or len(resets) != 1:
        return None
    reset = resets[0]
    return next(iter(clocks)), reset, "0" if reset.endswith("n") else "1"


def check_fixture(path: Path, tamper: Callable[[AnalysisContext], None] | None = None) -> Verdict:
    """Simulate ``path`` exhaustively and check the analyses against it.

    ``tamper`` may alter cached results first; tests use it to show that the
    checks detect wrong answers.
    """
    design = compile_files([path]).design
    ctx = AnalysisContext(default_registry(), design, {})
    ctx.run(["hierarchy", "fi-const-prop", "unreachable-state", "missing-reset"])
    if tamper is not None:
        tamper(ctx)
    h = ctx.result("hierarchy")
    verdict = Verdict(path.stem, False)
    cr = _clock_and_reset(h)
    if cr is None:
        verdict.why = "needs exactly one clock and one reset input"
        return verdict
    clock, reset, active = cr
    if state_bits(h) > MAX_STATE_BITS:
        verdict.why = f"{state_bits(h)} state bits"
        return verdict
    if free_input_bits(h, {clock, reset}) > MAX_INPUT_BITS:
        verdict.why = f"{free_input_bits(h, {clock, reset})} free input bits"
        return verdict

    cm = ctx.result("fi-const-prop")

    def on_store(name, val):
        if val.poison:
            return
        verdict.checked_values += 1
        abs_v = cm.values.get(name)
        if abs_v is not None and not abs_v.contains(val.v):
            verdict.const_violations.append(f"{name} = {val.v.bits} not in {abs_v.bits}")

    obs = Observer(on_store=on_store)
    try:
        sim = Simulator(h, obs)
    except SimError as e:
        verdict.why = str(e)
        return verdict
    verdict.simulable = True
    ex = explore(sim, clock, reset, active, DEPTH)
    verdict.cycles = ex.cycles

    for r in ctx.result("unreachable-state").reports:
        verdict.unreachable_reports += 1
        loc = f"{r.location.file}:{r.location.line}"
        if r.category == "unreachable-state":
            hit = (r.module, loc) in obs.true_ifs
        else:
            hit = (r.module, loc, r.site.rsplit("=", 1)[-1]) in obs.case_hits
        if hit:
            verdict.unreachable_violations.append(r.text())

    # A register is stuck when, after every input sequence of DEPTH cycles,
    # it still holds an unknown value inherited from power-up.
    closure = ctx.result("missing-reset").closure()
    final = ex.layers[-1]
    for reg in registers(h):
        stuck = bool(final)
        for snap in final:
            val = dict(snap[0])[reg]
            if not (val.poison and any(b in "xz" for b in val.v.bits)):
                stuck = False
                break
        if stuck:
            verdict.stuck_registers.append(reg)
            if reg not in closure:
                verdict.closure_violations.append(reg)
    return verdict
