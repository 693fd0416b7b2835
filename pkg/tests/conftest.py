import sympy as sp

from commsle.exactalg import Polynomial, RationalFunction


def poly_to_sympy(p, symbols=None):
    symbols = symbols or {}
    expr = sp.Integer(0)
    for e, c in p.terms.items():
        term = sp.Rational(c.numerator, c.denominator)
        for name, k in zip(p.variables, e):
            term *= symbols.setdefault(name, sp.Symbol(name)) ** k
        expr += term
    return expr


def to_sympy(f, symbols=None):
    """Independent translation of our values into sympy expressions."""
    if isinstance(f, Polynomial):
        return poly_to_sympy(f, symbols)
    f = RationalFunction.lift(f)
    return poly_to_sympy(f.num, symbols) / poly_to_sympy(f.den, symbols)


def sympy_equal(a, b):
    return sp.simplify(sp.together(a - b)) == 0



ACCEPTANCE_LINES = []


def record_criterion(label, passed, detail):
    """Print and remember one pass/fail line; label is e.g. "9" or "12b"."""
    line = f"criterion {label:>3}: {'PASS' if passed else 'FAIL'}  {detail}"
    number = int("".join(ch for ch in label if ch.isdigit()))
    ACCEPTANCE_LINES.append(((number, label), line))
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
