"""De Bruijn lambda terms and their prefix-free binary code.

Terms are immutable tuples so they hash and compare structurally:

    (VAR, i)            variable, de Bruijn index i >= 1
    (LAM, body, mf)     abstraction; mf caches the largest free index
    (APP, f, a, mf)     application
    (STREAM, pos)       machine-internal demand-driven input cursor

The mf slot makes shift/substitution skip closed subtrees; it is a pure
function of the structure, so structural equality still works. STREAM
nodes never appear in user terms; the machine injects them for data input.

Binary code (prefix-free):

    Lam    -> 00 ++ code(body)
    App    -> 01 ++ code(fun) ++ code(arg)
    Var i  -> 1*i ++ 0

Bit lists are right-fold Church lists over Church booleans:

    false = \\ \\ 1      true = \\ \\ 2      nil = \\ \\ 1
    [b0, b1, ...] = \\c. \\n. c b0 (c b1 (... n))
"""

from .errors import MalformedCode, NotAList

VAR, LAM, APP, STREAM = 0, 1, 2, 3


def Var(i):
    if i < 1:
        raise ValueError("de Bruijn indices start at 1")
    return (VAR, i)


def Lam(body):
    return (LAM, body, max(max_free(body) - 1, 0))


def App(f, a):
    return (APP, f, a, max(max_free(f), max_free(a)))


def Stream(pos):
    return (STREAM, pos)


def max_free(t):
    """Largest de Bruijn index in t that escapes its binders (0 if closed)."""
    tag = t[0]
    if tag == VAR:
        return t[1]
    if tag == LAM:
        return t[2]
    if tag == APP:
        return t[3]
    return 0


def is_closed(t):
    return max_free(t) == 0


FALSE = Lam(Lam(Var(1)))
TRUE = Lam(Lam(Var(2)))
NIL = Lam(Lam(Var(1)))


def bool_term(bit):
    return TRUE if bit == "1" else FALSE


def node_count(t):
    total = 0
    todo = [t]
    while todo:
        u = todo.pop()
        total += 1
        tag = u[0]
        if tag == LAM:
            todo.append(u[1])
        elif tag == APP:
            todo.append(u[1])
            todo.append(u[2])
    return total


def encode_term(t):
    """Prefix-free code of a term, as a bit string."""
    parts = []
    todo = [t]
    while todo:
        u = todo.pop()
        tag = u[0]
        if tag == VAR:
            parts.append("1" * u[1] + "0")
        elif tag == LAM:
            parts.append("00")
            todo.append(u[1])
        elif tag == APP:
            parts.append("01")
            todo.append(u[2])
            todo.append(u[1])
        else:
            raise ValueError("stream cursors have no code")
    return "".join(parts)


def code_len(t):
    """len(encode_term(t)) without building the string."""
    total = 0
    todo = [t]
    while todo:
        u = todo.pop()
        tag = u[0]
        if tag == VAR:
            total += u[1] + 1
        elif tag == LAM:
            total += 2
            todo.append(u[1])
        else:
            total += 2
            todo.append(u[2])
            todo.append(u[1])
    return total


def decode_term(bits):
    """Parse the unique term whose code prefixes `bits`.

    Returns (term, consumed). Raises MalformedCode with the offending bit
    offset when the input runs out mid-parse.
    """
    pos = 0
    n = len(bits)
    # stack holds LAM markers (None) and APP states (either APP-waiting
    # marker or the finished function term)
    stack = []
    term = None
    while True:
        if pos >= n:
            raise MalformedCode(pos, "input exhausted mid-parse")
        b = bits[pos]
        if b == "0":
            if pos + 1 >= n:
                raise MalformedCode(pos + 1, "input exhausted mid-parse")
            if bits[pos + 1] == "0":
                stack.append(("lam",))
            else:
                stack.append(("app0",))
            pos += 2
            continue
        # unary variable
        i = 0
        while pos < n and bits[pos] == "1":
            i += 1
            pos += 1
        if pos >= n:
            raise MalformedCode(pos, "variable index missing terminator")
        pos += 1  # the closing 0
        term = Var(i)
        # fold completed subterms back into the stack
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


def bits_to_list(b):
    """Bit string -> Church list of Church booleans (normal form)."""
    term = Var(1)
    for bit in reversed(b):
        term = App(App(Var(2), bool_term(bit)), term)
    return Lam(Lam(term))


def list_to_bits(t):
    """Inverse of bits_to_list on normal-form terms; raises NotAList."""
    if t[0] != LAM or t[1][0] != LAM:
        raise NotAList(f"not a list: {render_term(t)}")
    body = t[1][1]
    out = []
    while True:
        if body == Var(1):
            return "".join(out)
        if (body[0] == APP and body[1][0] == APP
                and body[1][1] == Var(2)):
            bit = body[1][2]
            if bit == TRUE:
                out.append("1")
            elif bit == FALSE:
                out.append("0")
            else:
                raise NotAList("list element is not a boolean")
            body = body[2]
        else:
            raise NotAList("list spine does not fold")


def render_term(t):
    """De Bruijn text form, parseable by parse_term."""
    tag = t[0]
    if tag == VAR:
        return str(t[1])
    if tag == LAM:
        return "\\ " + render_term(t[1])
    if tag == APP:
        f, a = t[1], t[2]
        fs = render_term(f)
        if f[0] == LAM:
            fs = f"({fs})"
        as_ = render_term(a)
        if a[0] != VAR:
            as_ = f"({as_})"
        return f"{fs} {as_}"
    return f"<stream:{t[1]}>"


_NAME_CHARS = set("abcdefghijklmnopqrstuvwxyz"
                  "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_'")


def _tokenize(text):
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "\\().":
            tokens.append(c)
            i += 1
        elif c == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
        elif c.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(int(text[i:j]))
            i = j
        elif c in _NAME_CHARS:
            j = i
            while j < len(text) and text[j] in _NAME_CHARS:
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise ValueError(f"bad character {c!r} in term text")
    return tokens


def parse_term(text, env=None):
    """Parse the text notation into a Term.

    Notation: `\\x y. body` (named binders), `\\ body` (one anonymous de
    Bruijn binder), integers as de Bruijn indices, juxtaposition for
    application, parentheses, `#` comments. Free names resolve through
    `env`, a dict of closed terms.
    """
    tokens = _tokenize(text)
    pos = 0
    env = env or {}

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def parse_expr(binders):
        nonlocal pos
        tok = peek()
        if tok == "\\":
            pos += 1
            names = []
            while isinstance(peek(), str) and peek() not in "\\().":
                names.append(tokens[pos])
                pos += 1
            if names:
                if peek() != ".":
                    raise ValueError("named binders need a '.'")
                pos += 1
                body = parse_expr(list(reversed(names)) + binders)
                for _ in names:
                    body = Lam(body)
                return body
            if peek() == ".":
                pos += 1
            body = parse_expr([None] + binders)
            return Lam(body)
        return parse_app(binders)

    def parse_app(binders):
        nonlocal pos
        term = parse_atom(binders)
        while True:
            tok = peek()
            if tok is None or tok in (")", "."):
                return term
            term = App(term, parse_atom(binders))

    def parse_atom(binders):
        nonlocal pos
        tok = peek()
        if tok == "(":
            pos += 1
            term = parse_expr(binders)
            if peek() != ")":
                raise ValueError("unbalanced parenthesis")
            pos += 1
            return term
        if tok == "\\":
            return parse_expr(binders)
        if isinstance(tok, int):
            pos += 1
            return Var(tok)
        if isinstance(tok, str) and tok not in "\\().":
            pos += 1
            if tok in binders:
                return Var(binders.index(tok) + 1)
            if tok in env:
                val = env[tok]
                if not is_closed(val):
                    raise ValueError(f"env term {tok} is not closed")
                return val
            raise ValueError(f"unbound name {tok!r}")
        raise ValueError(f"unexpected token {tok!r}")

    term = parse_expr([])
    if pos != len(tokens):
        raise ValueError(f"trailing tokens at {pos}")
    return term
