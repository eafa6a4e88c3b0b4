"""Independent sympy recomputation of the tube curvature pipeline.

Prints sampled values used to freeze expectations in the C++ tests.
"""
import sys
import sympy as sp
from extalg import Form

t1, t2 = sp.symbols('t1 t2', positive=True)
u = sp.symbols('u', positive=True)
a, b, bb, lam = sp.symbols('a b bb lam')


def conj(e):
    e = sp.sympify(e)
    e = e.subs({b: sp.Symbol('_B'), bb: b}, simultaneous=True).subs(sp.Symbol('_B'), bb)
    e = e.subs({a: 1 / a, lam: -lam}, simultaneous=True)
    return e.subs(sp.I, -sp.I)


# L chart generators
DZ1, DZB1, DZ2, DZB2, MU, DU, ELL, DB, DBB, DLAM = range(10)
# C chart generators
W, W1, W1B, TH, THB, P1, P1B, P2, P2B, CDLAM, SIG, SIGB = range(12)
C_CONJ = {W: (W, -1), W1: (W1B, 1), W1B: (W1, 1), TH: (THB, 1), THB: (TH, 1),
          P1: (P1B, 1), P1B: (P1, 1), P2: (P2B, 1), P2B: (P2, 1), SIG: (SIGB, 1), SIGB: (SIG, 1)}


def conj_form(f):
    out = Form()
    for k, v in f.t.items():
        term = Form.scalar(conj(v))
        for g in k:
            img, s = C_CONJ[g]
            term = term ^ (s * Form.gen(img))
        out = out + term
    return out


def run(rho, pts):
    r1, r2 = sp.diff(rho, t1), sp.diff(rho, t2)
    r11, r12 = sp.diff(r1, t1), sp.diff(r1, t2)
    r111 = sp.diff(r11, t1)
    S = sp.diff(r12 / r11, t1)
    S1, S2 = sp.diff(S, t1), sp.diff(S, t2)
    g = lambda i: Form.gen(i)

    def dL(f):
        f = sp.sympify(f)
        return (sp.diff(f, t1) * (g(DZ1) + g(DZB1)) + sp.diff(f, t2) * (g(DZ2) + g(DZB2))
                + sp.diff(f, u) * g(DU) + sp.diff(f, a) * a * g(ELL) + sp.diff(f, b) * g(DB)
                + sp.diff(f, bb) * g(DBB) + sp.diff(f, lam) * g(DLAM))

    def dform(f):
        out = Form()
        for k, v in f.t.items():
            if len(k) == 0:
                out = out + dL(v)
            elif len(k) == 1:
                rule = Form()
                if k[0] == MU:
                    rule = dL(r1) ^ g(DZ1)
                    rule = rule + (dL(r2) ^ g(DZ2))
                out = out + (dL(v) ^ g(k[0])) + v * rule
            else:
                raise ValueError
        return out

    # coframe in L
    omega = u * g(MU)
    eta1 = r11 * g(DZ1) + r12 * g(DZ2)
    nu = sp.sqrt(u / r11) * eta1
    omega1 = a * nu + bb * omega
    theta2 = -a**2 * S * g(DZ2)

    # L -> C
    sq = sp.sqrt(u * r11**3)
    c_eta2 = -(1 / a**2) / S * g(TH)
    c_nu = (1 / a) * (g(W1) - bb * g(W))
    c_eta1 = sp.sqrt(r11 / u) * c_nu
    c_dz1 = (1 / r11) * (c_eta1 - r12 * c_eta2)
    c_dz2 = c_eta2
    ell = (-(1 / a**2) / 2 * g(TH) + a**2 / 2 * g(THB)
           + (sp.Rational(3, 2) * b + (1 / a) * r111 / (2 * sq)) * g(W1)
           - (sp.Rational(3, 2) * bb + a * r111 / (2 * sq)) * g(W1B)
           + sp.Rational(1, 2) * g(P2) - sp.Rational(1, 2) * g(P2B))
    table = {
        DZ1: c_dz1, DZB1: conj_form(c_dz1), DZ2: c_dz2, DZB2: conj_form(c_dz2),
        MU: (1 / u) * g(W),
        DU: u * (b * g(W1) + bb * g(W1B) - lam * g(W) + g(P2) + g(P2B)),
        ELL: ell,
        DB: lam / 2 * g(W1B) - g(SIGB) + g(P1B),
        DBB: -lam / 2 * g(W1) - g(SIG) + g(P1),
        DLAM: g(CDLAM),
    }
    toC = lambda f: f.subst(table)

    # invariants
    dw = toC(dform(omega))
    dw_rhs = -(g(W1) ^ g(W1B)) - (g(W) ^ (g(P2) + g(P2B)))
    dw1 = toC(dform(omega1))
    dw1_rhs = (g(TH) ^ g(W1B)) - (g(W1) ^ g(P2)) - (g(W) ^ g(P1))
    # also the definitional images of omega, omega1, theta2 must be the generators
    checks = {'omega': toC(omega) - g(W), 'omega1': toC(omega1) - g(W1), 'theta2': toC(theta2) - g(TH),
              'domega': dw - dw_rhs, 'domega1': dw1 - dw1_rhs}

    Theta2 = toC(dform(theta2)) + (g(TH) ^ (g(P2) - g(P2B))) - (g(W1) ^ g(P1))
    T2b1 = Theta2.coeff((TH, W1B))
    aux87 = -a * S1 / (sp.sqrt(u * r11) * S) + 3 * bb + a * r111 / sp.sqrt(u * r11**3)
    c = T2b1 / 3

    def dC(f):
        return toC(dL(f))

    tilde = Theta2 - (dC(c) ^ g(W1)) + 2 * conj(c) * (g(TH) ^ g(W1)) - 3 * c * (g(TH) ^ g(W1B))
    gamma0 = {u: 1, a: 1, b: 0, bb: 0, lam: 0}
    T21 = Theta2.coeff((TH, W1))
    final = tilde.coeff((TH, W1))
    aux78 = -S1 / (sp.sqrt(r11) * S) - r111 / sp.sqrt(r11**3)
    closed_final = -12 * t2 / ((1 - 12 * t1 * t2)**sp.Rational(3, 4) * (1 - sp.sqrt(1 - 12 * t1 * t2)))

    out = []
    for (x1, x2) in pts:
        env = {t1: x1, t2: x2}
        genv = {**gamma0, **env}
        fiber = {u: sp.Rational(7, 5), a: (3 + 4 * sp.I) / 5, b: sp.Rational(1, 3) - sp.I / 7,
                 bb: sp.Rational(1, 3) + sp.I / 7, lam: sp.I / 2}
        fenv = {**fiber, **env}
        ev = lambda e, E: complex(sp.N(sp.sympify(e).subs(E), 30))
        row = {
            't': (x1, x2),
            'T2b1_general': ev(T2b1, fenv), 'aux87_general': ev(aux87, fenv),
            'T21_g0': ev(T21, genv), 'aux78': ev(aux78, genv),
            'final': ev(final, genv), 'closed_final': ev(closed_final, env),
        }
        for name, f in checks.items():
            worst = 0.0
            for k, v in f.t.items():
                if k and (SIG in k or SIGB in k or CDLAM in k) and W in k and name == 'domega1':
                    continue
                worst = max(worst, abs(ev(v, fenv)))
            row['resid_' + name] = worst
        # domega1 at b = 0 including auxiliary terms
        fb0 = {**fenv, b: 0, bb: 0}
        row['resid_domega1_b0'] = max([abs(ev(v, fb0)) for k, v in checks['domega1'].t.items()
                                       if SIG not in k and SIGB not in k] + [0.0])
        out.append(row)
    return out


if __name__ == '__main__':
    rho = ((1 - 12 * t1 * t2)**sp.Rational(3, 2) + 18 * t1 * t2 - 1) / (108 * t2**2)
    pts = [(sp.Rational(1, 20), sp.Rational(1, 20)), (sp.Rational(3, 100), sp.Rational(7, 100))]
    for row in run(rho, pts):
        for k, v in row.items():
            print(k, v)
        print()
