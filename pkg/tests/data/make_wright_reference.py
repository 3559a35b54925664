"""Rows of wright_reference.csv: phi(-beta, mu; -x) by high-precision series
summation with mpmath (slow; minutes). The committed table covers a subset of
this grid."""

import mpmath as mp


def reference(beta, mu, x):
    beta, mu, x = mp.mpf(beta), mp.mpf(mu), mp.mpf(x)
    s = mp.mpf(0)
    k = 0
    small = 0
    while True:
        s += (-x) ** k * mp.rgamma(mu - beta * k) / mp.factorial(k)
        k += 1
        # 1/Gamma vanishes at isolated k; require a run of tiny majorant terms
        mag = x**k / mp.factorial(k) * mp.gamma(abs(beta * k - mu) + 1)
        if k > 30 and mag < mp.mpf(10) ** (-mp.mp.dps + 5) * (abs(s) + mp.mpf(10) ** (-2 * mp.mp.dps)):
            small += 1
            if small > 5:
                return s
        else:
            small = 0


def main():
    print("beta,mu,x,phi")
    for beta in (0.1, 0.3, 0.5, 0.7, 0.9):
        for mu in (-6, -3.0, -0.7, 0.0, 0.5, 1.0, 2.5):
            for x in (0.5, 1.0, 1.05, 1.2, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 40.0):
                lam = x ** (1 / (1 - beta))
                sig = (1 - beta) * beta ** (beta / (1 - beta))
                if lam * sig > 700:
                    continue
                with mp.workdps(int(40 + lam * 0.5 + lam * sig / 2.3)):
                    print(f"{beta},{mu},{x},{mp.nstr(reference(beta, mu, x), 25)}", flush=True)


if __name__ == "__main__":
    main()
