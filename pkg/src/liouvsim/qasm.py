"""OpenQASM 2.0 subset: parser and canonical printer.

Supported: header, ``include "qelib1.inc"``, qreg/creg, applications of the
builtin gates with constant parameter expressions, measure, reset, barrier.
Registers are flattened in declaration order.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .circuit import Barrier, Circuit, CircuitError, Gate, Measure, Reset, check_op

# qasm name -> (IR name, arity, n_params, param adapter)
_HALF_PI = math.pi / 2
QASM_GATES = {
    "id": ("ID", 1, 0, None),
    "x": ("X", 1, 0, None),
    "y": ("Y", 1, 0, None),
    "z": ("Z", 1, 0, None),
    "h": ("H", 1, 0, None),
    "s": ("S", 1, 0, None),
    "sdg": ("SDG", 1, 0, None),
    "t": ("T", 1, 0, None),
    "tdg": ("TDG", 1, 0, None),
    "sx": ("SX", 1, 0, None),
    "rx": ("RX", 1, 1, None),
    "ry": ("RY", 1, 1, None),
    "rz": ("RZ", 1, 1, None),
    "u1": ("U", 1, 1, lambda lam: (0.0, 0.0, lam)),
    "u2": ("U", 1, 2, lambda phi, lam: (_HALF_PI, phi, lam)),
    "u3": ("U", 1, 3, None),
    "u": ("U", 1, 3, None),
    "U": ("U", 1, 3, None),
    "cx": ("CX", 2, 0, None),
    "CX": ("CX", 2, 0, None),
    "cz": ("CZ", 2, 0, None),
    "swap": ("SWAP", 2, 0, None),
}
_PRINT_NAMES = {"U": "u3"}

_FUNCS = {"sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp, "ln": math.log, "sqrt": math.sqrt}
_UNSUPPORTED = {"gate", "opaque", "if"}


class QasmError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + msg)


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<real>(\d+\.\d*|\.\d+|\d+)([eE][-+]?\d+)?)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<eq>==)
  | (?P<sym>[;,()\[\]{}+\-*/^])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QasmError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.qregs: dict[str, tuple[int, int]] = {}
        self.cregs: dict[str, tuple[int, int]] = {}
        self.nq = 0
        self.nc = 0
        self.ops: list = []
        self.measured: set[int] = set()
        self.used_clbits: set[int] = set()
        self.included = False

    # -- token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None) -> QasmError:
        tok = tok or self.tok
        return QasmError(msg, tok.line, tok.col)

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text:
            raise self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def expect_kind(self, kind: str, what: str) -> _Tok:
        if self.tok.kind != kind:
            raise self.error(f"expected {what}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    # -- grammar
    def parse(self) -> Circuit:
        if self.tok.text == "OPENQASM":
            self.next()
            ver = self.expect_kind("real", "version number")
            if not ver.text.startswith("2"):
                raise self.error(f"unsupported OpenQASM version {ver.text}", ver)
            self.expect(";")
        while self.tok.kind != "eof":
            self.statement()
        if self.nq == 0:
            raise QasmError("no qreg declared")
        return Circuit(self.nq, self.nc, self.ops)

    def statement(self) -> None:
        tok = self.tok
        word = tok.text
        if tok.kind != "id":
            raise self.error(f"unexpected {word!r}")
        if word in _UNSUPPORTED:
            raise self.error(f"unsupported construct '{word}'")
        if word == "OPENQASM":
            raise self.error("OPENQASM header must come first")
        if word == "include":
            self.next()
            s = self.expect_kind("string", "file name")
            if s.text.strip('"') != "qelib1.inc":
                raise self.error(f"unsupported include {s.text}", s)
            self.included = True
            self.expect(";")
        elif word in ("qreg", "creg"):
            self.next()
            name = self.expect_kind("id", "register name")
            self.expect("[")
            size = self.expect_kind("real", "register size")
            if not size.text.isdigit() or int(size.text) < 1:
                raise self.error("register size must be a positive integer", size)
            self.expect("]")
            self.expect(";")
            regs = self.qregs if word == "qreg" else self.cregs
            if name.text in self.qregs or name.text in self.cregs:
                raise self.error(f"register {name.text!r} already declared", name)
            n = int(size.text)
            if word == "qreg":
                regs[name.text] = (self.nq, n)
                self.nq += n
            else:
                regs[name.text] = (self.nc, n)
                self.nc += n
        elif word == "measure":
            self.next()
            qs = self.argument(self.qregs, "qubit")
            self.expect("->")
            cs = self.argument(self.cregs, "classical bit")
            self.expect(";")
            if len(qs) != len(cs):
                raise self.error("measure register sizes differ", tok)
            for q, c in zip(qs, cs):
                self.add(Measure(q, c), tok)
        elif word == "reset":
            self.next()
            qs = self.argument(self.qregs, "qubit")
            self.expect(";")
            for q in qs:
                self.add(Reset(q), tok)
        elif word == "barrier":
            self.next()
            qs = []
            for arg in self.arglist():
                qs.extend(arg)
            self.expect(";")
            self.add(Barrier(tuple(dict.fromkeys(qs))), tok)
        else:
            self.gate_application()

    def gate_application(self) -> None:
        tok = self.next()
        if tok.text not in QASM_GATES:
            raise self.error(f"unknown gate {tok.text!r}", tok)
        if tok.text not in ("U", "CX") and not self.included:
            raise self.error(f"gate {tok.text!r} needs include \"qelib1.inc\"", tok)
        name, arity, nparams, adapt = QASM_GATES[tok.text]
        params: list[float] = []
        if self.tok.text == "(":
            self.next()
            if self.tok.text != ")":
                params.append(self.expr())
                while self.tok.text == ",":
                    self.next()
                    params.append(self.expr())
            self.expect(")")
        if len(params) != nparams:
            raise self.error(f"{tok.text} takes {nparams} parameter(s), got {len(params)}", tok)
        if adapt is not None:
            params = list(adapt(*params))
        args = self.arglist()
        self.expect(";")
        if len(args) != arity:
            raise self.error(f"{tok.text} acts on {arity} qubit(s), got {len(args)}", tok)
        sizes = {len(a) for a in args if len(a) > 1}
        if len(sizes) > 1:
            raise self.error("broadcast registers have different sizes", tok)
        width = sizes.pop() if sizes else 1
        for k in range(width):
            qubits = tuple(a[k] if len(a) > 1 else a[0] for a in args)
            self.add(Gate(name, params, qubits), tok)

    def add(self, op, tok: _Tok) -> None:
        try:
            check_op(op, self.nq, self.nc, self.measured, self.used_clbits)
        except CircuitError as exc:
            raise self.error(str(exc), tok) from None
        self.ops.append(op)

    def arglist(self) -> list[list[int]]:
        out = [self.argument(self.qregs, "qubit")]
        while self.tok.text == ",":
            self.next()
            out.append(self.argument(self.qregs, "qubit"))
        return out

    def argument(self, regs: dict, what: str) -> list[int]:
        name = self.expect_kind("id", f"{what} register")
        if name.text not in regs:
            raise self.error(f"undeclared {what} register {name.text!r}", name)
        start, size = regs[name.text]
        if self.tok.text != "[":
            return list(range(start, start + size))
        self.next()
        idx = self.expect_kind("real", "index")
        if not idx.text.isdigit():
            raise self.error("index must be a non-negative integer", idx)
        self.expect("]")
        k = int(idx.text)
        if k >= size:
            raise self.error(f"index {k} out of range for {name.text}[{size}]", idx)
        return [start + k]

    # -- constant expressions
    def expr(self) -> float:
        val = self.term()
        while self.tok.text in ("+", "-"):
            op = self.next().text
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self) -> float:
        val = self.factor()
        while self.tok.text in ("*", "/"):
            op = self.next()
            rhs = self.factor()
            if op.text == "/":
                if rhs == 0:
                    raise self.error("division by zero", op)
                val /= rhs
            else:
                val *= rhs
        return val

    def factor(self) -> float:
        base = self.unary()
        if self.tok.text == "^":
            self.next()
            return base ** self.factor()
        return base

    def unary(self) -> float:
        if self.tok.text == "-":
            self.next()
            return -self.unary()
        if self.tok.text == "+":
            self.next()
            return self.unary()
        return self.atom()

    def atom(self) -> float:
        tok = self.next()
        if tok.kind == "real":
            return float(tok.text)
        if tok.text == "pi":
            return math.pi
        if tok.text in _FUNCS:
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return _FUNCS[tok.text](arg)
        if tok.text == "(":
            val = self.expr()
            self.expect(")")
            return val
        raise self.error(f"unexpected {tok.text or 'end of input'!r} in expression", tok)


def parse_qasm2(text: str) -> Circuit:
    """Parse OpenQASM 2.0 source into a :class:`Circuit`."""
    return _Parser(text).parse()


def to_qasm2(circuit: Circuit) -> str:
    """Canonical printer: one flat ``q`` / ``c`` register, parameters printed exactly."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{circuit.n_qubits}];"]
    if circuit.n_clbits:
        lines.append(f"creg c[{circuit.n_clbits}];")
    for op in circuit.ops:
        if isinstance(op, Gate):
            name = _PRINT_NAMES.get(op.name, op.name.lower())
            params = f"({','.join(repr(p) for p in op.params)})" if op.params else ""
            lines.append(f"{name}{params} {','.join(f'q[{q}]' for q in op.qubits)};")
        elif isinstance(op, Measure):
            lines.append(f"measure q[{op.qubit}] -> c[{op.clbit}];")
        elif isinstance(op, Reset):
            lines.append(f"reset q[{op.qubit}];")
        elif isinstance(op, Barrier):
            lines.append(f"barrier {','.join(f'q[{q}]' for q in op.qubits)};")
    return "\n".join(lines) + "\n"
