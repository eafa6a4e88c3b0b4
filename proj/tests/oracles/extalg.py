"""Minimal exterior algebra over sympy coefficients, used only by the oracle scripts."""
import sympy as sp


def _merge(a, b):
    # sign of concatenating two strictly increasing tuples into sorted order
    if set(a) & set(b):
        return None, 0
    seq = list(a) + list(b)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return tuple(sorted(seq)), sign


class Form:
    def __init__(self, terms=None):
        self.t = {}
        for k, v in (terms or {}).items():
            if v != 0:
                self.t[k] = v

    @staticmethod
    def gen(i):
        return Form({(i,): sp.Integer(1)})

    @staticmethod
    def scalar(x):
        return Form({(): sp.sympify(x)})

    def __add__(self, o):
        o = o if isinstance(o, Form) else Form.scalar(o)
        r = dict(self.t)
        for k, v in o.t.items():
            r[k] = r.get(k, 0) + v
        return Form(r)

    def __neg__(self):
        return Form({k: -v for k, v in self.t.items()})

    def __sub__(self, o):
        return self + (-o)

    def __rmul__(self, s):
        return Form({k: s * v for k, v in self.t.items()})

    def __mul__(self, s):
        return Form({k: s * v for k, v in self.t.items()})

    def wedge(self, o):
        r = {}
        for ka, va in self.t.items():
            for kb, vb in o.t.items():
                k, sg = _merge(ka, kb)
                if sg:
                    r[k] = r.get(k, 0) + sg * va * vb
        return Form(r)

    def __xor__(self, o):
        return self.wedge(o)

    def map(self, f):
        return Form({k: f(v) for k, v in self.t.items()})

    def coeff(self, word):
        k, sg = _merge((), tuple(word))
        s = sorted(word)
        perm_sign = 1
        w = list(word)
        for i in range(len(w)):
            for j in range(i + 1, len(w)):
                if w[i] > w[j]:
                    perm_sign = -perm_sign
        return perm_sign * self.t.get(tuple(s), 0)

    def subst(self, table):
        """table: generator index -> Form of degree 1 in another basis."""
        out = Form()
        for k, v in self.t.items():
            term = Form.scalar(v)
            for g in k:
                term = term ^ table[g]
            out = out + term
        return out
