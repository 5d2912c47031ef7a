"""The reference machine: normal-order evaluation with self-delimiting I/O.

A program is a bit string p = code ++ data. The code prefix-parses into a
closed term T; the machine then reduces

    App(App(T, Z), D)

where Z is the auxiliary input z as a strict Church bit list and D is a
demand-driven stream cursor over the data region. Forcing the cursor (that
is, applying it) materializes one data bit as a Church boolean plus the
next cursor:

    App(Stream(k), f)  ->  App(App(f, bool(bit_k)), Stream(k+1))

so a bit counts as read exactly when the computation forces the cons cell
holding it. bits_read is therefore well defined, and the set of valid
programs (halted with a bit-list output, bits_read == len(data)) is
prefix-free by construction.

Output is decoded structurally and lazily: the machine reduces just enough
to expose the Church-list spine, so a term whose outer shape can never be
a bit list is reported Malformed even when it has no normal form. Constant
-space loops are detected by state recurrence and reported as OutOfGas
with divergence_proven set; both shortcuts only ever resolve outcomes that
pure gas-bounded reduction would leave unknown, never change a Halted
verdict.
"""

from dataclasses import dataclass

from .errors import MalformedCode
from .terms import (APP, LAM, STREAM, VAR, App, Lam, Stream, Var, TRUE,
                    FALSE, bool_term, bits_to_list, decode_term, is_closed,
                    max_free)

DEFAULT_MAX_STEPS = 100_000

# loop detection: snapshot the machine state every _LOOP_STRIDE steps,
# skipping states larger than _LOOP_NODE_CAP nodes
_LOOP_STRIDE = 64
_LOOP_NODE_CAP = 2048

# memory guard: terms past this size will not reach a decodable shape at
# desk-scale gas; treated as out-of-gas (checked every _SIZE_STRIDE steps)
_SIZE_STRIDE = 1024
_SIZE_CAP = 40_000


@dataclass(frozen=True)
class Gas:
    """Reduction-step budget; one step per beta contraction or stream force."""
    max_steps: int = DEFAULT_MAX_STEPS

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("gas must be positive")


class Status:
    HALTED = "halted"
    OUT_OF_GAS = "out-of-gas"
    PARSE_ERROR = "parse-error"
    MALFORMED = "malformed"
    NEEDS_MORE_INPUT = "needs-more-input"


@dataclass(frozen=True)
class RunOutcome:
    status: str
    output: str | None = None
    bits_read: int = 0
    steps: int = 0
    code_bits: int = 0
    demands: str = ""
    divergence_proven: bool = False
    parse_offset: int | None = None

    @property
    def halted(self):
        return self.status == Status.HALTED


class _OutOfGasSignal(Exception):
    pass


class _DivergedSignal(Exception):
    pass


class _BadOutputSignal(Exception):
    pass


class _NeedInputSignal(Exception):
    def __init__(self, pos):
        self.pos = pos


def _shift(t, d, cutoff):
    """Bump free variables with index >= cutoff by d."""
    if d == 0 or max_free(t) < cutoff:
        return t
    out = []
    todo = [(0, t, cutoff)]
    while todo:
        mode, node, cut = todo.pop()
        if mode == 0:
            if max_free(node) < cut:
                out.append(node)
                continue
            tag = node[0]
            if tag == VAR:
                out.append((VAR, node[1] + d))
            elif tag == LAM:
                todo.append((1, None, 0))
                todo.append((0, node[1], cut + 1))
            else:
                todo.append((2, None, 0))
                todo.append((0, node[2], cut))
                todo.append((0, node[1], cut))
        elif mode == 1:
            out.append(Lam(out.pop()))
        else:
            a = out.pop()
            f = out.pop()
            out.append(App(f, a))
    return out[0]


def _subst(t, j, s):
    """t with Var(j) replaced by s and deeper free variables decremented."""
    if max_free(t) < j:
        return t
    out = []
    todo = [(0, t, j)]
    while todo:
        mode, node, depth = todo.pop()
        if mode == 0:
            if max_free(node) < depth:
                out.append(node)
                continue
            tag = node[0]
            if tag == VAR:
                i = node[1]
                if i == depth:
                    out.append(_shift(s, depth - 1, 1))
                elif i > depth:
                    out.append((VAR, i - 1))
                else:
                    out.append(node)
            elif tag == LAM:
                todo.append((1, None, 0))
                todo.append((0, node[1], depth + 1))
            else:
                todo.append((2, None, 0))
                todo.append((0, node[2], depth))
                todo.append((0, node[1], depth))
        elif mode == 1:
            out.append(Lam(out.pop()))
        else:
            a = out.pop()
            f = out.pop()
            out.append(App(f, a))
    return out[0]


def _state_nodes(t, stack, cap):
    """Node count of a machine state, or cap + 1 if it exceeds cap."""
    total = 0
    todo = [t]
    todo.extend(stack)
    while todo:
        u = todo.pop()
        total += 1
        if total > cap:
            return total
        tag = u[0]
        if tag == LAM:
            todo.append(u[1])
        elif tag == APP:
            todo.append(u[1])
            todo.append(u[2])
    return total


class _Machine:
    """One evaluation: shared gas pool, demand bookkeeping, loop detection."""

    def __init__(self, oracle, max_steps, detect_loops=True):
        self.oracle = oracle
        self.max_steps = max_steps
        self.steps = 0
        self.demanded = []
        self.detect_loops = detect_loops

    def _demand(self, pos):
        if pos < len(self.demanded):
            return self.demanded[pos]
        # stream cursors advance one bit at a time, so a fresh demand is
        # always for the next position
        assert pos == len(self.demanded)
        bit = self.oracle(pos)
        self.demanded.append(bit)
        return bit

    def _tick(self):
        if self.steps >= self.max_steps:
            raise _OutOfGasSignal()
        self.steps += 1

    def whnf(self, t):
        stack = []
        seen = None
        since_check = 0
        since_size = 0
        while True:
            tag = t[0]
            if tag == APP:
                stack.append(t[2])
                t = t[1]
                continue
            if tag == LAM and stack:
                self._tick()
                t = _subst(t[1], 1, stack.pop())
            elif tag == STREAM and stack:
                self._tick()
                bit = self._demand(t[1])
                f = stack.pop()
                stack.append(Stream(t[1] + 1))
                stack.append(bool_term(bit))
                t = f
            else:
                break
            if self.detect_loops:
                since_check += 1
                if since_check >= _LOOP_STRIDE:
                    since_check = 0
                    if _state_nodes(t, stack, _LOOP_NODE_CAP) <= _LOOP_NODE_CAP:
                        state = (t, tuple(stack))
                        if seen is None:
                            seen = set()
                        if state in seen:
                            raise _DivergedSignal()
                        seen.add(state)
                since_size += 1
                if since_size >= _SIZE_STRIDE:
                    since_size = 0
                    if _state_nodes(t, stack, _SIZE_CAP) > _SIZE_CAP:
                        raise _OutOfGasSignal()
        while stack:
            t = App(t, stack.pop())
        return t

    def normalize(self, t):
        """Full beta-normal form, leftmost-outermost."""
        out = []
        todo = [(0, t)]
        while todo:
            mode, x = todo.pop()
            if mode == 0:
                x = self.whnf(x)
                tag = x[0]
                if tag == LAM:
                    todo.append((1, None))
                    todo.append((0, x[1]))
                elif tag == APP:
                    spine = []
                    h = x
                    while h[0] == APP:
                        spine.append(h[2])
                        h = h[1]
                    todo.append((2, (h, len(spine))))
                    for a in spine:
                        todo.append((0, a))
                else:
                    out.append(x)
            elif mode == 1:
                out.append(Lam(out.pop()))
            else:
                h, k = x
                args = [out.pop() for _ in range(k)]
                for a in reversed(args):
                    h = App(h, a)
                out.append(h)
        return out[0]

    def read_list(self, t):
        """Reduce t just enough to decode it as a Church bit list."""
        t = self.whnf(t)
        if t[0] != LAM:
            raise _BadOutputSignal()
        inner = self.whnf(t[1])
        if inner[0] != LAM:
            raise _BadOutputSignal()
        u = inner[1]
        bits = []
        while True:
            u = self.whnf(u)
            if u == (VAR, 1):
                return "".join(bits)
            if u[0] != APP:
                raise _BadOutputSignal()
            head = u[1]
            if head[0] != APP or head[1] != (VAR, 2):
                raise _BadOutputSignal()
            b = self.normalize(head[2])
            if b == TRUE:
                bits.append("1")
            elif b == FALSE:
                bits.append("0")
            else:
                raise _BadOutputSignal()
            u = u[2]


def reduce(t, gas=None):
    """Normal-order reduction of a pure term to beta-normal form.

    Returns (normal_form, steps), or (None, steps) when the budget runs
    out first. Plain term rewriting: no streams, no divergence shortcuts,
    gas is the only limit.
    """
    max_steps = (gas or Gas()).max_steps
    m = _Machine(oracle=None, max_steps=max_steps, detect_loops=False)
    try:
        nf = m.normalize(t)
    except _OutOfGasSignal:
        return None, m.steps
    return nf, m.steps


def _finish(machine, code_bits, data_len, parse_offset=None):
    common = dict(steps=machine.steps, code_bits=code_bits,
                  demands="".join(machine.demanded),
                  bits_read=len(machine.demanded))
    return common


def _execute(term, z_term, oracle, max_steps, code_bits):
    """Shared core of run/run_demand once a closed code term is in hand."""
    machine = _Machine(oracle, max_steps)
    applied = App(App(term, z_term), Stream(0))
    try:
        output = machine.read_list(applied)
    except _NeedInputSignal:
        return RunOutcome(Status.NEEDS_MORE_INPUT, None,
                          len(machine.demanded), machine.steps, code_bits,
                          "".join(machine.demanded))
    except _OutOfGasSignal:
        return RunOutcome(Status.OUT_OF_GAS, None, len(machine.demanded),
                          machine.steps, code_bits,
                          "".join(machine.demanded))
    except _DivergedSignal:
        return RunOutcome(Status.OUT_OF_GAS, None, len(machine.demanded),
                          machine.steps, code_bits,
                          "".join(machine.demanded), divergence_proven=True)
    except _BadOutputSignal:
        return RunOutcome(Status.MALFORMED, None, len(machine.demanded),
                          machine.steps, code_bits,
                          "".join(machine.demanded))
    return RunOutcome(Status.HALTED, output, len(machine.demanded),
                      machine.steps, code_bits, "".join(machine.demanded))


def run_term(term, z, data, gas=None, z_term=None):
    """Run a pre-parsed closed code term against a finite data string."""
    max_steps = (gas or Gas()).max_steps
    if z_term is None:
        z_term = bits_to_list(z)

    def oracle(pos):
        if pos >= len(data):
            raise _NeedInputSignal(pos)
        return data[pos]

    return _execute(term, z_term, oracle, max_steps, 0)


def run(p, z="", gas=None):
    """Execute the program bit string p = code ++ data with auxiliary z."""
    try:
        term, consumed = decode_term(p)
    except MalformedCode as exc:
        return RunOutcome(Status.PARSE_ERROR, parse_offset=exc.offset)
    if not is_closed(term):
        return RunOutcome(Status.PARSE_ERROR, parse_offset=consumed)
    data = p[consumed:]
    out = run_term(term, z, data, gas=gas)
    return RunOutcome(out.status, out.output, out.bits_read, out.steps,
                      consumed, out.demands, out.divergence_proven)


def is_valid_run(outcome, data_len):
    """Def.-1 validity: halted with a bit list, read all data bits, no more."""
    return outcome.status == Status.HALTED and outcome.bits_read == data_len


def run_demand(code, z, oracle, gas=None):
    """Run a code with data bits pulled one at a time from `oracle`.

    `oracle` is a callable pos -> '0'/'1'; each position is asked at most
    once, so stochastic sources are safe. The demanded sequence comes back
    in RunOutcome.demands.
    """
    try:
        term, consumed = decode_term(code)
    except MalformedCode as exc:
        return RunOutcome(Status.PARSE_ERROR, parse_offset=exc.offset)
    if not is_closed(term) or consumed != len(code):
        return RunOutcome(Status.PARSE_ERROR, parse_offset=consumed)
    max_steps = (gas or Gas()).max_steps
    out = _execute(term, bits_to_list(z), oracle, max_steps, consumed)
    return out


def _parse_from_oracle(oracle):
    """decode_term against a bit oracle; returns (term, bits_consumed)."""
    pos = 0

    def take():
        nonlocal pos
        bit = oracle(pos)
        pos += 1
        return bit

    stack = []
    term = None
    while True:
        b = take()
        if b == "0":
            if take() == "0":
                stack.append(("lam",))
            else:
                stack.append(("app0",))
            continue
        i = 1
        while take() == "1":
            i += 1
        term = Var(i)
        while stack:
            top = stack[-1]
            if top[0] == "lam":
                stack.pop()
                term = Lam(term)
            elif top[0] == "app0":
                stack[-1] = ("app1", term)
                term = None
                break
            else:
                stack.pop()
                term = App(top[1], term)
        if term is not None and not stack:
            return term, pos


def run_universal(oracle, z="", gas=None):
    """One universal-machine trial: code and data both come from `oracle`.

    Returns (outcome, program_bits, ok_parse). program_bits is the full
    self-delimiting prefix consumed (code plus demanded data) when the
    trial halts, else the bits consumed so far. A parse that yields an
    open term ends the trial (ok_parse False): such prefixes are not
    programs.
    """
    consumed = []

    def tracking(pos):
        bit = oracle(pos)
        consumed.append(bit)
        return bit

    term, code_bits = _parse_from_oracle(tracking)
    if not is_closed(term):
        return (RunOutcome(Status.PARSE_ERROR, parse_offset=code_bits),
                "".join(consumed), False)
    base = len(consumed)

    def data_oracle(pos):
        return tracking(base + pos)

    max_steps = (gas or Gas()).max_steps
    out = _execute(term, bits_to_list(z), data_oracle, max_steps, code_bits)
    return out, "".join(consumed), True
