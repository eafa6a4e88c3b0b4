"""Independent sympy recomputation of the abstract curvature identities.

Generator order: w, w1, w1b, th, thb, p1, p1b, p2, p2b, psi.
"""
import sympy as sp
from extalg import Form

W, W1, W1B, TH, THB, P1, P1B, P2, P2B, PSI = range(10)
CONJ_GEN = {W: (W, -1), W1: (W1B, 1), W1B: (W1, 1), TH: (THB, 1), THB: (TH, 1),
            P1: (P1B, 1), P1B: (P1, 1), P2: (P2B, 1), P2B: (P2, 1), PSI: (PSI, -1)}
g = Form.gen

PAIRS = {}


def cpair(name):
    z, zb = sp.symbols(f'{name} {name}_c')
    PAIRS[z] = zb
    PAIRS[zb] = z
    return z, zb


def imag(name):
    z = sp.Symbol(name)
    PAIRS[z] = -z
    return z


def real(name):
    z = sp.Symbol(name)
    PAIRS[z] = z
    return z


def conj(e):
    e = sp.sympify(e)
    return e.xreplace(PAIRS).xreplace({sp.I: -sp.I})


def conj_form(f):
    out = Form()
    for k, v in f.t.items():
        term = Form.scalar(conj(v))
        for x in k:
            img, s = CONJ_GEN[x]
            term = term ^ (s * g(img))
        out = out + term
    return out


def simplify_form(f):
    return Form({k: sp.expand(v) for k, v in f.t.items()})


def is_zero(f):
    return all(sp.expand(v) == 0 for v in f.t.values())


class Chart:
    def __init__(self, Theta2, Phi1, Phi2, Psi):
        phi = g(P2) + g(P2B)
        self.rules = {
            W: -(g(W1) ^ g(W1B)) - (g(W) ^ phi),
            W1: (g(TH) ^ g(W1B)) - (g(W1) ^ g(P2)) - (g(W) ^ g(P1)),
            TH: Theta2 - (g(TH) ^ (g(P2) - g(P2B))) + (g(W1) ^ g(P1)),
            P1: Phi1 - (g(TH) ^ g(P1B)) + (g(W1) ^ g(PSI)) + (g(P1) ^ g(P2B)),
            P2: Phi2 + (g(TH) ^ g(THB)) + (g(W1) ^ g(P1B)) + (g(W) ^ g(PSI)),
            PSI: Psi - (g(P1) ^ g(P1B)) - (phi ^ g(PSI)),
        }
        for x in [W1, TH, P1, P2]:
            img, s = CONJ_GEN[x]
            self.rules[img] = s * conj_form(self.rules[x])

    def d(self, f, scalar_d=None):
        out = Form()
        for k, v in f.t.items():
            if len(k) != 1:
                raise ValueError('degree-1 only')
            out = out + v * self.rules[k[0]]
            if scalar_d is not None:
                out = out + (scalar_d(v) ^ g(k[0]))
        return simplify_form(out)


B, Bb = cpair('B')
Lam = imag('Lam')
A, Ab = cpair('A')

# expanded curvatures
T21, T21c = cpair('T21'); T20, T20c = cpair('T20'); T10, T10c = cpair('T10'); T1b0, T1b0c = cpair('T1b0')
F220, F220c = cpair('F220'); F210, F210c = cpair('F210')
F120, F120c = cpair('F120'); F12b0, F12b0c = cpair('F12b0'); F110, F110c = cpair('F110'); F11b0, F11b0c = cpair('F11b0')
P1s, P1c = cpair('P1'); P2s, P2c = cpair('P2'); P3s, P3c = cpair('P3')
Q1, Q1c = cpair('Q1'); Q3 = imag('Q3')
S20, S20c = cpair('Psi20'); S10, S10c = cpair('Psi10')
h = sp.Rational(1, 2)


def expanded():
    Th = T21 * (g(TH) ^ g(W1)) + T20 * (g(TH) ^ g(W)) + T10 * (g(W1) ^ g(W)) + T1b0 * (g(W1B) ^ g(W))
    F2 = (T21 * (g(TH) ^ g(W1B)) + T21c * (g(W1) ^ g(THB)) + h * T21 * (g(P1) ^ g(W)) + h * T21c * (g(P1B) ^ g(W))
          + F220 * (g(TH) ^ g(W)) + F220c * (g(THB) ^ g(W)) + F210 * (g(W1) ^ g(W)) + F210c * (g(W1B) ^ g(W)))
    F1 = (T20 * (g(TH) ^ g(W1B)) - F220c * (g(W1) ^ g(THB)) + F220 * (g(TH) ^ g(W1)) - h * T21 * (g(W1) ^ g(P1))
          - h * T21c * (g(W1) ^ g(P1B)) + P1s * (g(P1) ^ g(W)) + P2s * (g(P1B) ^ g(W)) + P3s * (g(PSI) ^ g(W))
          + F120 * (g(TH) ^ g(W)) + F12b0 * (g(THB) ^ g(W)) + F110 * (g(W1) ^ g(W)) + F11b0 * (g(W1B) ^ g(W)))
    Ps = (h * F120 * (g(TH) ^ g(W1B)) + h * F120c * (g(W1) ^ g(THB)) - h * F12b0c * (g(TH) ^ g(W1))
          + h * F12b0 * (g(THB) ^ g(W1B)) + h * P2c * (g(W1) ^ g(P1)) + h * P1c * (g(W1) ^ g(P1B))
          - h * P3c * (g(W1) ^ g(PSI)) + h * P1s * (g(P1) ^ g(W1B)) + h * P2s * (g(P1B) ^ g(W1B))
          + h * P3s * (g(PSI) ^ g(W1B)) + Q1 * (g(P1) ^ g(W)) + Q1c * (g(P1B) ^ g(W)) + Q3 * (g(PSI) ^ g(W))
          + S20 * (g(TH) ^ g(W)) + S20c * (g(THB) ^ g(W)) + S10 * (g(W1) ^ g(W)) + S10c * (g(W1B) ^ g(W)))
    return Th, F1, F2, Ps


def hats(B, Bb, Lam):
    absB = B * Bb
    w = g(W)
    w1 = g(W1) + Bb * g(W)
    th = g(TH) - Bb * g(W1) - Bb**2 / 2 * g(W)
    p1 = (g(P1) - (Lam + absB / 2) * g(W1) - Bb**2 / 2 * g(W1B) + B * g(TH) - Lam * Bb * g(W) + Bb * g(P2B))
    p2 = g(P2) - B * g(W1) - (Lam + absB / 2) * g(W)
    ps = (g(PSI) - Lam * B * g(W1) - Lam * Bb * g(W1B) + B**2 / 2 * g(TH) - Bb**2 / 2 * g(THB) - Lam**2 * g(W)
          + B * g(P1) - Bb * g(P1B) + (Lam - absB / 2) * g(P2) + (Lam + absB / 2) * g(P2B))
    return {W: w, W1: w1, TH: th, P1: p1, P2: p2, PSI: ps}


def curvatures_of(ch, F):
    w, w1, th, p1, p2, ps = F[W], F[W1], F[TH], F[P1], F[P2], F[PSI]
    w1b, thb, p1b, p2b = conj_form(w1), conj_form(th), conj_form(p1), conj_form(p2)
    Th = ch.d(th) + (th ^ (p2 - p2b)) - (w1 ^ p1)
    F1 = ch.d(p1) + (th ^ p1b) - (w1 ^ ps) - (p1 ^ p2b)
    F2 = ch.d(p2) - (th ^ thb) - (w1 ^ p1b) - (w ^ ps)
    Ps = ch.d(ps) + (p1 ^ p1b) + ((p2 + p2b) ^ ps)
    return [simplify_form(x) for x in (Th, F1, F2, Ps)]


def hat_basis_table(Fh):
    """Express unhatted generators via hatted ones (same indices reused for hatted)."""
    # solve the linear system symbolically
    hatsyms = sp.symbols('h0:10')
    full = {}
    for k in [W, W1, TH, P1, P2, PSI]:
        full[k] = Fh[k]
        img, s = CONJ_GEN[k]
        if img != k:
            full[img] = conj_form(Fh[k])
    xs = sp.symbols('x0:10')
    eqs = []
    for k in range(10):
        expr = sum(full[k].t.get((j,), 0) * xs[j] for j in range(10))
        eqs.append(sp.Eq(expr, hatsyms[k]))
    sol = sp.solve(eqs, xs, dict=True)[0]
    table = {}
    for j in range(10):
        e = sp.expand(sol[xs[j]])
        table[j] = Form({(k,): e.coeff(hatsyms[k]) for k in range(10)})
    return table


def main():
    # equivariance with opaque curvatures modelled by fully generic 2-forms is expensive; use expansions
    Th, F1, F2, Ps = expanded()
    ch = Chart(Th, F1, F2, Ps)
    # Re Phi2 = 0 and Re Psi = 0
    print('RePhi2', is_zero(F2 + conj_form(F2)), 'RePsi', is_zero(Ps + conj_form(Ps)))
    Fh = hats(B, Bb, Lam)
    Thh, F1h, F2h, Psh = curvatures_of(ch, Fh)
    print('aux888 Theta', is_zero(Thh - Th))
    print('aux888 Phi2', is_zero(F2h - F2))
    print('aux888 Phi1', is_zero(F1h - (F1 + B * Th - Bb * F2)))
    print('aux888 Psi', is_zero(Psh - (Ps + B**2 / 2 * Th - Bb**2 / 2 * conj_form(Th) + B * F1 - Bb * conj_form(F1) - B * Bb * F2)))
    table = hat_basis_table(Fh)
    F1h_hat = simplify_form(F1h.subst(table))
    val = sp.expand(F1h_hat.coeff((W1, W1B)))
    target = Bb * T20 - B * F220c - 3 * Bb**2 / 4 * T21 - h * (Lam + 3 * B * Bb / 2) * T21c
    print('Phi1hat_11b hatted basis diff:', sp.factor(val - target))
    print('Phi1hat_11b unhatted basis:', sp.expand(F1h.coeff((W1, W1B))))
    lead0 = {T21: 0, T21c: 0, T20: 0, T20c: 0, F220: 0, F220c: 0}
    Psh_hat = simplify_form(Psh.subst(table))
    v2 = sp.expand(Psh_hat.coeff((W1, W1B)).subs(lead0))
    print('Psihat_11b (leading zero):', v2)
    print('Psihat_11b minus target:', sp.expand(v2 - (Bb / 2 * F120 + B / 2 * F120c)))


if __name__ == '__main__':
    main()


def sufficiency():
    Th, F1, F2, Ps = expanded()
    zero = {T21: 0, T21c: 0, T20: 0, T20c: 0, F220: 0, F220c: 0, F120: 0, F120c: 0,
            P1s: 0, P1c: 0, P2s: 0, P2c: 0, P3s: 0, P3c: 0, Q1: 0, Q1c: 0, Q3: 0}
    def z(f):
        return simplify_form(Form({k: v.subs(zero) for k, v in f.t.items()}))
    Th, F1, F2, Ps = map(z, (Th, F1, F2, Ps))
    ch = Chart(Th, F1, F2, Ps)
    Thh, F1h, F2h, Psh = curvatures_of(ch, hats(B, Bb, Lam))
    w, w1, w1b, th, thb = g(W), g(W1), g(W1B), g(TH), g(THB)
    F1t = (F12b0 * (thb ^ w) + (F110 + B * T10 - Bb * F210) * (w1 ^ w)
           + (F11b0 + B * T1b0 - Bb * F210c) * (w1b ^ w))
    Pst = (-h * F12b0c * (th ^ w1) + h * F12b0 * (thb ^ w1b) + (S20 + Bb * F12b0c) * (th ^ w)
           + (S20c + B * F12b0) * (thb ^ w)
           + (S10 + B**2 / 2 * T10 + Bb**2 / 2 * T1b0c + B * F110 + Bb * F11b0c - B * Bb * F210) * (w1 ^ w)
           + (S10c + Bb**2 / 2 * T10c + B**2 / 2 * T1b0 + Bb * F110c + B * F11b0 - B * Bb * F210c) * (w1b ^ w))
    print('aux8888 Theta', is_zero(Thh - Th), 'Phi2', is_zero(F2h - F2))
    print('aux8888 Phi1', is_zero(F1h - F1t), 'Psi', is_zero(Psh - Pst))


def h1_scaling():
    Th, F1, F2, Ps = expanded()
    ch = Chart(Th, F1, F2, Ps)
    Fh = hats(B, Bb, Lam)
    Thh, F1h, F2h, Psh = curvatures_of(ch, Fh)
    # check forms: A acts by constants; d(constant * form) is linear
    Fc = {W: A * Ab * Fh[W], W1: A * Fh[W1], TH: (A / Ab) * Fh[TH], P1: (1 / Ab) * Fh[P1], P2: Fh[P2], PSI: (1 / (A * Ab)) * Fh[PSI]}
    Thc, F1c, F2c, Psc = curvatures_of(ch, Fc)
    print('h1 scaling', is_zero(Thc - (A / Ab) * Thh), is_zero(F1c - (1 / Ab) * F1h), is_zero(F2c - F2h),
          is_zero(Psc - (1 / (A * Ab)) * Psh))


if __name__ == '__main__':
    sufficiency()
    h1_scaling()
