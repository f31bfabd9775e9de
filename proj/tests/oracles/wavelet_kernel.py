"""Independent high-precision values of the 1-d wavelet kernel.

k(x, y) = int_{log s_min}^{log s_max} int_lower^upper
          s^{-1} psi((x - t)/s) psi((y - t)/s) dt du / (log(s_max/s_min) (upper - lower)),
with s = exp(u). Evaluated with mpmath adaptive quadrature; the printed
values are frozen into test_kernel_oracle.cpp.
"""

from mpmath import mp, mpf, exp, log, sqrt, pi, cos, quad

mp.dps = 30


def mexican_hat(u):
    c = 2 / (sqrt(3) * pi ** mpf("0.25"))
    return c * (1 - u * u) * exp(-u * u / 2)


def morlet_factory(w0=5):
    kappa = exp(-mpf(w0) ** 2 / 2)
    norm2 = sqrt(pi) * ((1 + exp(-mpf(w0) ** 2)) / 2 - 2 * kappa * exp(-mpf(w0) ** 2 / 4) + kappa**2)
    c = 1 / sqrt(norm2)

    def psi(u):
        return c * exp(-u * u / 2) * (cos(w0 * u) - kappa)

    return psi, c


def haar(u):
    if 0 <= u < mpf("0.5"):
        return mpf(1)
    if mpf("0.5") <= u < 1:
        return mpf(-1)
    return mpf(0)


def kernel(psi, x, y, s_min, s_max, lower, upper, breaks=None):
    x, y = mpf(x), mpf(y)
    lo, hi = mpf(lower), mpf(upper)
    norm = log(mpf(s_max) / mpf(s_min)) * (hi - lo)

    def inner(u):
        s = exp(u)
        pts = [lo, hi]
        for c in (x, y):
            pts.append(c)
            if breaks:
                for b in breaks:
                    pts.append(c - b * s)
        pts = sorted({p for p in pts if lo <= p <= hi})
        return quad(lambda t: psi((x - t) / s) * psi((y - t) / s) / s, pts)

    # Compact wavelets: the inner integral has kinks in s wherever two
    # t-breakpoints meet, so those scales become outer breakpoints.
    u_pts = {log(mpf(s_min)), log(mpf(s_max))}
    if breaks:
        for b1 in breaks:
            for b2 in breaks:
                if b1 != b2:
                    s_kink = abs(x - y) / abs(b1 - b2)
                    if s_kink > 0:
                        u_pts.add(log(s_kink))
            if b1 > 0:
                for c in (x, y):
                    for edge in (lo, hi):
                        if (c - edge) / b1 > 0:
                            u_pts.add(log((c - edge) / b1))
        for b1 in breaks:
            for b2 in breaks:
                # x - b1 s = y - b2 s
                if b1 != b2 and (x - y) / (b1 - b2) > 0:
                    u_pts.add(log((x - y) / (b1 - b2)))
    u_lo, u_hi = log(mpf(s_min)), log(mpf(s_max))
    u_pts = sorted(u for u in u_pts if u_lo <= u <= u_hi)
    return quad(inner, u_pts) / norm


PAIRS = [(0.1, 0.12), (0.0, 0.3), (-0.95, -0.9), (0.5, 0.5), (-0.8, 0.7)]

if __name__ == "__main__":
    print("mexican_hat C1 =", mp.nstr(2 / (sqrt(3) * pi ** mpf("0.25")), 17))
    morlet, cm = morlet_factory()
    print("morlet C1 =", mp.nstr(cm, 17))
    import sys
    families = (("mexican_hat", mexican_hat, None), ("morlet", morlet, None),
                ("haar", haar, (0, 0.5, 1)))
    only = sys.argv[1:]
    for name, psi, breaks in families:
        if only and name not in only:
            continue
        for x, y in PAIRS:
            v = kernel(psi, x, y, 0.05, 0.5, -1, 1, breaks)
            print(f"{name} k({x}, {y}) = {mp.nstr(v, 17)}")
