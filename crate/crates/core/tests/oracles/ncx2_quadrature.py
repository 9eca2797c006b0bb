"""Reference values for the noncentral chi-square CDF.

Integrates the density with 60-digit arithmetic, which shares nothing with the
Poisson-mixture/incomplete-gamma route used by the library. Prints
`k lambda x ln(cdf)` for 2k degrees of freedom.
"""
import mpmath as mp

mp.mp.dps = 60


def cdf(k, lam, x):
    k, lam, x = mp.mpf(k), mp.mpf(lam), mp.mpf(x)

    def pdf(t):
        return (
            mp.mpf(1) / 2
            * mp.e ** (-(t + lam) / 2)
            * (t / lam) ** (k / 2 - mp.mpf(1) / 2)
            * mp.besseli(k - 1, mp.sqrt(lam * t))
        )

    # the density is sharply skewed towards x when x is far below the mean
    return mp.quad(pdf, mp.linspace(0, x, 20))


CASES = [(30, 400, 0.5), (1, 0.5, 0.2), (2, 10, 8), (16, 40, 60), (16, 200, 30), (8, 50, 2)]

if __name__ == "__main__":
    for k, lam, x in CASES:
        print(k, lam, x, mp.nstr(mp.log(cdf(k, lam, x)), 17))


def series(k, lam, x, terms=6000):
    """Poisson mixture of 60-digit regularized incomplete gamma functions."""
    mu, y = mp.mpf(lam) / 2, mp.mpf(x) / 2
    return mp.fsum(
        mp.e ** (-mu) * mu**j / mp.factorial(j) * mp.gammainc(k + j, 0, y, regularized=True)
        for j in range(terms)
    )


def print_series_cases():
    for k, lam, x in [(96, 300, 40), (288, 900, 200)]:
        print(k, lam, x, mp.nstr(mp.log(series(k, lam, x)), 17))
