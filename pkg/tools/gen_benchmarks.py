"""Regenerate the bundled QASM benchmark circuits in src/liouvsim/benchmarks/."""
import math
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "liouvsim" / "benchmarks"
HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def ccx(a, b, c):
    return [
        f"h q[{c}];", f"cx q[{b}],q[{c}];", f"tdg q[{c}];", f"cx q[{a}],q[{c}];", f"t q[{c}];",
        f"cx q[{b}],q[{c}];", f"tdg q[{c}];", f"cx q[{a}],q[{c}];", f"t q[{b}];", f"t q[{c}];",
        f"h q[{c}];", f"cx q[{a}],q[{b}];", f"t q[{a}];", f"tdg q[{b}];", f"cx q[{a}],q[{b}];",
    ]


def cu1(theta, a, b):
    return [f"u1({theta / 2!r}) q[{a}];", f"cx q[{a}],q[{b}];", f"u1({-theta / 2!r}) q[{b}];",
            f"cx q[{a}],q[{b}];", f"u1({theta / 2!r}) q[{b}];"]


def write(name, n, body, measure=True):
    lines = [HEADER + f"qreg q[{n}];", f"creg c[{n}];"] + body
    if measure:
        lines += [f"measure q[{i}] -> c[{i}];" for i in range(n)]
    (OUT / f"{name}.qasm").write_text("\n".join(lines) + "\n")


def ghz():
    write("ghz_n3", 3, ["h q[0];", "cx q[0],q[1];", "cx q[1],q[2];"])


def adder():
    # Cuccaro ripple-carry adder, 2-bit operands: cin=0, a=1,3  b=2,4  cout=5
    body = ["x q[1];", "x q[3];", "x q[2];"]

    def maj(c, b, a):
        return [f"cx q[{a}],q[{b}];", f"cx q[{a}],q[{c}];"] + ccx(c, b, a)

    def uma(c, b, a):
        return ccx(c, b, a) + [f"cx q[{a}],q[{c}];", f"cx q[{c}],q[{b}];"]

    body += maj(0, 2, 1) + maj(1, 4, 3) + [f"cx q[3],q[5];"] + uma(1, 4, 3) + uma(0, 2, 1)
    write("adder_n6", 6, body)


def bv():
    n, secret = 7, "101101"
    body = ["x q[6];"] + [f"h q[{i}];" for i in range(n)]
    body += [f"cx q[{i}],q[6];" for i, s in enumerate(secret) if s == "1"]
    body += [f"h q[{i}];" for i in range(n - 1)]
    write("bv_n7", n, body)


def qft():
    n = 5
    body = ["x q[0];", "x q[2];"]
    for j in range(n):
        body.append(f"h q[{j}];")
        for k in range(j + 1, n):
            body += cu1(math.pi / 2 ** (k - j), k, j)
    for j in range(n // 2):
        body.append(f"swap q[{j}],q[{n - 1 - j}];")
    write("qft_n5", n, body)


def qpe():
    # phase estimation of u1(2*pi/8) on an eigenstate, 3 counting qubits
    n = 4
    body = ["x q[3];"] + [f"h q[{i}];" for i in range(3)]
    for i in range(3):
        body += cu1(2 * math.pi / 8 * 2**i, i, 3)
    body += ["swap q[0],q[2];"]
    for j in range(3):
        for k in range(j):
            body += cu1(-math.pi / 2 ** (j - k), k, j)
        body.append(f"h q[{j}];")
    write("qpe_n4", n, body)


def ising():
    n, steps, dt, J, h = 5, 3, 0.2, 1.0, 0.7
    body = [f"h q[{i}];" for i in range(n)]
    for _ in range(steps):
        for i in range(n - 1):
            body += [f"cx q[{i}],q[{i + 1}];", f"rz({2 * J * dt!r}) q[{i + 1}];", f"cx q[{i}],q[{i + 1}];"]
        body += [f"rx({2 * h * dt!r}) q[{i}];" for i in range(n)]
    write("ising_n5", n, body)


def vqe():
    n, layers = 4, 3
    body = []
    angle = 0.1
    for _ in range(layers):
        for i in range(n):
            body += [f"ry({angle!r}) q[{i}];", f"rz({angle * 1.7!r}) q[{i}];"]
            angle += 0.37
        body += [f"cx q[{i}],q[{i + 1}];" for i in range(n - 1)]
    for i in range(n):
        body.append(f"ry({angle!r}) q[{i}];")
        angle += 0.21
    write("vqe_n4", n, body)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for fn in (ghz, adder, bv, qft, qpe, ising, vqe):
        fn()
