"""Smoke test for the Python bindings.

Build and install first:
    pip install --no-build-isolation -e crates/python
then run:
    python python/smoke_test.py
"""

import ast
import math
import sys

import qasm2cudaq_py as q2c

HEADER = 'OPENQASM 3.0;\ninclude "stdgates.inc";\n'

BELL = HEADER + "qubit[2] q;\nbit[2] c;\nh q[0];\ncx q[0], q[1];\nc = measure q;\n"

ANSATZ = HEADER + (
    "input array[float[64], 2] theta;\n"
    "qubit[2] q;\n"
    "ry(theta[0]) q[0];\n"
    "ry(theta[1]) q[1];\n"
    "cx q[0], q[1];\n"
)

FEEDFORWARD = HEADER + (
    "qubit q;\nbit c;\nbit r;\nh q;\nc = measure q;\n"
    "if (c == 1) { x q; } else { barrier q; }\nr = measure q;\n"
)


def check(cond, what):
    if not cond:
        raise AssertionError(what)
    print(f"ok  {what}")


def raises(exc, fn):
    try:
        fn()
    except exc as e:
        return e
    raise AssertionError(f"expected {exc.__name__}")


def main():
    cpp = q2c.transpile(BELL)
    check(cpp.startswith("#include <cudaq.h>"), "transpile to C++ kernel")
    builder = q2c.transpile(FEEDFORWARD, target="cudaq-builder")
    ast.parse(builder)
    check("kernel.c_if(" in builder, "builder output is valid Python with c_if")

    raises(ValueError, lambda: q2c.transpile(BELL, target="qiskit"))
    check(True, "unknown target raises ValueError")
    e = raises(q2c.QasmError, lambda: q2c.Kernel("OPENQASM 3.0;\nqubit q\n"))
    check(str(e) != "", f"parse error raises QasmError: {e}")
    raises(q2c.QasmError, lambda: q2c.Kernel(ANSATZ).expval("ZZ", params=[0.1]))
    check(True, "wrong parameter count raises QasmError")

    bell = q2c.Kernel(BELL)
    counts = bell.sample(shots=4000, seed=7)
    check(set(counts) == {"00", "11"} and sum(counts.values()) == 4000, f"bell histogram {counts}")
    check(bell.sample(shots=4000, seed=7, workers=1) == counts, "sampling independent of workers")

    k = q2c.Kernel.compile(ANSATZ)
    check(k.inputs == [("theta", 2)] and k.num_params == 2, "input layout")
    for theta in [(0.0, 0.0), (math.pi, 0.0), (0.3, -1.1)]:
        zz = k.expval("ZZ", params=list(theta))
        # ry(a)|0> ry(b)|0> then cx: <Z0 Z1> = cos(b).
        check(abs(zz - math.cos(theta[1])) < 1e-12, f"<ZZ> at theta={theta} is {zz:.6f}")
    sv = k.statevector(params={"theta": [math.pi / 2, 0.0]})
    check(abs(abs(sv[0]) ** 2 - 0.5) < 1e-12 and abs(abs(sv[3]) ** 2 - 0.5) < 1e-12, "bell state from bound ansatz")
    check("theta[0]" in k.emit("cudaq-cpp"), "emitted kernel keeps parameters symbolic")

    ff = q2c.Kernel(FEEDFORWARD)
    hist = ff.sample(shots=500, seed=1)
    check(all(key[1] == "0" for key in hist), f"conditional reset lands on 0: {hist}")

    report = q2c.validate(suite="reset")
    check(report["passed"] and report["suites"][0]["suite"] == "reset", "validate reset suite")
    bad = q2c.validate(suite="reset", sabotage="drop-corrections")
    check(not bad["passed"], "sabotaged suite fails")
    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
