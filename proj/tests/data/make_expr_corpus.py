#!/usr/bin/env python3
"""Regenerates expr_valid.tsv with reference values computed by Python's math module."""
import math
import pathlib
import re

VALID = [
    ("1", 1, [0.0]),
    ("0.5", 1, [0.0]),
    (".25", 1, [0.0]),
    ("3.", 1, [0.0]),
    ("1e3", 1, [0.0]),
    ("2.5E-2", 1, [0.0]),
    ("1e+2", 1, [0.0]),
    ("pi", 1, [0.0]),
    ("x1", 1, [1.75]),
    ("x1 + 2*x2", 2, [1.0, 3.0]),
    ("x2 - x1", 2, [1.0, 3.0]),
    ("1 - 2 - 3", 1, [0.0]),
    ("8 / 2 / 2", 1, [0.0]),
    ("2 * 3 + 4", 1, [0.0]),
    ("2 + 3 * 4", 1, [0.0]),
    ("(2 + 3) * 4", 1, [0.0]),
    ("2^3", 1, [0.0]),
    ("2^3^2", 1, [0.0]),
    ("(2^3)^2", 1, [0.0]),
    ("-2^2", 1, [0.0]),
    ("(-2)^2", 1, [0.0]),
    ("2^-1", 1, [0.0]),
    ("2*-3", 1, [0.0]),
    ("-x1", 1, [4.0]),
    ("-(x1 + 1)", 1, [4.0]),
    ("x1 - -x2", 2, [1.0, 2.0]),
    ("x1*-x2", 2, [1.5, 2.0]),
    ("norm2", 2, [3.0, 4.0]),
    ("norm2^2", 2, [1.0, 2.0]),
    ("sqrt(norm2^2 + 4)", 3, [0.0, 0.0, 0.0]),
    ("sqrt(norm2)", 2, [3.0, 4.0]),
    ("abs(x1)", 1, [-2.5]),
    ("abs(-3)", 1, [0.0]),
    ("sin(pi/6)", 1, [0.0]),
    ("cos(pi/3)", 1, [0.0]),
    ("arccos(0)", 1, [0.0]),
    ("arccos(-1)", 1, [0.0]),
    ("arccos(x1/2)", 1, [1.0]),
    ("sin(x1)^2 + cos(x1)^2", 1, [0.7]),
    ("(norm2 + 1)/sqrt(2*norm2^2 + 2*norm2 + 2)", 2, [0.3, -0.4]),
    ("(norm2 + 0)/sqrt(norm2^2 + 0*norm2 + 1 + 0)", 3, [1.0, 0.0, 1.0]),
    ("(3^2 - 1)/(3^2 + 1)", 1, [0.0]),
    ("2*2/(2^2 + 1)", 1, [0.0]),
    ("(2 - 1)/sqrt(2*(2^2 + 1))", 1, [0.0]),
    ("x1*x2*x3", 3, [1.0, 2.0, 3.0]),
    ("x10 + x1", 10, [1, 0, 0, 0, 0, 0, 0, 0, 0, 5]),
    ("  x1   +  x2 ", 2, [1.0, 2.0]),
    ("((((x1))))", 1, [9.0]),
    ("sqrt(abs(x1 - 10))", 1, [1.0]),
    ("1/x1", 1, [4.0]),
    ("x1^0.5", 1, [2.0]),
    ("cos(sin(x1))", 1, [0.3]),
    ("-sin(-x1)", 1, [0.3]),
    ("norm2 - x1^2 - x2^2", 2, [1.25, -2.5]),
    ("(norm2 + 2 - 1)/sqrt(2*norm2^2 + 2*(2 + 2 - 1)*norm2 + 2^2 + 2^2 + 2*2*2 - 4*(2 + 2) + 5)", 4, [0.5, 0.5, -0.5, 1.0]),
    ("1e-3 * x1", 1, [7.0]),
    ("pi*x1^2", 1, [2.0]),
    ("2^x1", 1, [10.0]),
    ("-(-(-1))", 1, [0.0]),
    ("x1 / x2 * x3", 3, [6.0, 3.0, 2.0]),
]


def reference(src, x):
    py = src.replace("^", "**").replace("norm2", "(%r)" % sum(c * c for c in x))
    py = re.sub(r"x(\d+)", lambda m: "(%r)" % x[int(m.group(1)) - 1], py)
    py = py.replace("arccos", "math.acos").replace("sqrt", "math.sqrt").replace("sin", "math.sin")
    py = py.replace("cos", "math.cos").replace("math.amath.cos", "math.acos").replace("pi", "math.pi")
    py = py.replace("abs", "abs")
    return eval(py, {"math": math})


def main():
    out = pathlib.Path(__file__).with_name("expr_valid.tsv")
    lines = ["# expression\tn\tpoint\tvalue"]
    for src, n, x in VALID:
        assert len(x) == n
        value = reference(src, [float(c) for c in x])
        lines.append("%s\t%d\t%s\t%r" % (src, n, ",".join(repr(float(c)) for c in x), value))
    out.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
