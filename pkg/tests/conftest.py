from __future__ import annotations

import warnings

import pytest
import sympy

from bmcost.errors import RegimeWarning

ACCEPTANCE: dict = {}


def record(criterion: int, passed: bool, detail: str) -> str:
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE[criterion] = line
    print(line)
    return line


def b_oracle(kval: int):
    # e_k normalized in H^-1, b_k = -(Delta^-1 e_k)'(0)
    x = sympy.symbols("x", real=True)
    k = sympy.Integer(kval)
    c = sympy.symbols("c", positive=True)
    e = c * sympy.sin(k * sympy.pi * x)
    w = e / (k * sympy.pi) ** 2                      # (-Delta)^-1 e with Dirichlet data
    assert sympy.simplify(-sympy.diff(w, x, 2) - e) == 0
    cval = sympy.solve(sympy.integrate(w * e, (x, 0, 1)) - 1, c)[0]
    lap_inv = -w.subs(c, cval)
    return sympy.nsimplify(-sympy.diff(lap_inv, x).subs(x, 0))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])


@pytest.fixture(scope="session")
def mult_05():
    from bmcost.multiplier import build_multiplier_particular
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        return build_multiplier_particular(0.5, 0.2, "eps")


@pytest.fixture(scope="session")
def family_05(mult_05):
    from bmcost.moment import build_family
    return build_family(0.5, 0.2, 15, mult_05)
