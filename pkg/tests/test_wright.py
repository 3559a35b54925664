import csv
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from fracwright import DomainExceeded, NonConvergent, NumericalError, SeriesConfig, WrightParams, mittag_leffler, wright_phi, wright_type_e
from fracwright.wright import reciprocal_gamma, wright_phi_shifted
from oracles import m_wright_half, mp_mittag_leffler, mp_phi

DATA = Path(__file__).parent / "data" / "wright_reference.csv"


def test_reciprocal_gamma_values():
    assert reciprocal_gamma(1.0) == 1.0
    assert reciprocal_gamma(0.0) == 0.0
    assert reciprocal_gamma(0.5) == pytest.approx(0.5641895835, abs=1e-10)
    assert reciprocal_gamma(0.5) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)


@pytest.mark.parametrize("x", [-1.0, -2.0, -7.0, -30.0])
def test_reciprocal_gamma_exact_zero_at_poles(x):
    assert reciprocal_gamma(x) == 0.0


@pytest.mark.parametrize("x", [-3.7, -0.5, 0.1, 2.5, 13.3, 150.0])
def test_reciprocal_gamma_matches_gamma(x):
    expected = 1 / math.gamma(x) if x < 171 else 0.0
    assert reciprocal_gamma(x) == pytest.approx(expected, rel=1e-13, abs=1e-300)


def test_wright_phi_examples():
    assert wright_phi(WrightParams(-0.5, 1.0), 0.0) == 1.0
    assert wright_phi(WrightParams(-0.5, 0.5), -1.0) == pytest.approx(0.4393912, abs=1e-7)
    assert wright_phi(WrightParams(-0.5, 0.5), -1.0) == pytest.approx(m_wright_half(1.0), rel=1e-13)
    assert wright_phi(WrightParams(1.0, 1.0), 1.0) == pytest.approx(2.2795853, abs=1e-7)
    assert wright_phi(WrightParams(1.0, 1.0), 1.0) == pytest.approx(mp_phi(1, 1, 1), rel=1e-14)


@pytest.mark.parametrize("x", [0.0, 0.3, 1.0, 2.0, 4.0, 7.5, 12.0, 20.0])
def test_half_order_closed_form(x):
    assert wright_phi(WrightParams(-0.5, 0.5), -x) == pytest.approx(m_wright_half(x), rel=1e-12)


def _reference_rows():
    with open(DATA, newline="") as fh:
        return [tuple(float(v) for v in r) for r in list(csv.reader(fh))[1:]]


def test_high_precision_table():
    rows = np.array(_reference_rows())
    beta, mu, x, ref = rows.T
    got = np.array([wright_phi(WrightParams(-b, m), -z) for b, m, z in zip(beta, mu, x)])
    rel = np.abs(got - ref) / np.abs(ref)
    assert rows.shape[0] > 200
    assert np.max(rel) <= 1e-10, rows[np.argmax(rel)]


@pytest.mark.parametrize(
    "rho,mu,z",
    [(0.5, 1.5, 3.0), (2.0, -1.5, 10.0), (-0.3, 0.2, 4.0), (1.0, 0.0, -5.0), (-0.9, 2.0, -2.0)],
)
def test_general_parameters_against_mpmath(rho, mu, z):
    assert wright_phi(WrightParams(rho, mu), z) == pytest.approx(mp_phi(rho, mu, z), rel=1e-12, abs=1e-15)


def test_array_argument():
    z = np.array([[-1.0, 0.0], [2.0, -30.0]])
    out = wright_phi(WrightParams(-0.4, 0.7), z)
    assert out.shape == z.shape
    for idx in np.ndindex(z.shape):
        assert out[idx] == wright_phi(WrightParams(-0.4, 0.7), float(z[idx]))


def test_domain_and_parameter_errors():
    with pytest.raises(DomainExceeded):
        wright_phi(WrightParams(-0.5, 1.0), -50.5)
    with pytest.raises(ValueError):
        WrightParams(-1.0, 1.0)
    with pytest.raises(ValueError):
        WrightParams.kernel(1.0, 0.5)
    with pytest.raises(NonConvergent):
        wright_phi(WrightParams(1.0, 1.0), 40.0, SeriesConfig(max_terms=5))


def test_shifted_examples():
    p = WrightParams(-0.5, 1.0)
    for z in (-2.0, 0.0, 1.5):
        assert wright_phi_shifted(p, z, 0) == wright_phi(p, z)
    assert wright_phi_shifted(p, -1.0, 1) == pytest.approx(-0.4393912, abs=1e-7)
    assert wright_phi_shifted(p, 0.0, 2) == 0.0


def test_type_e_examples():
    assert wright_type_e(0.7, 0.3, 1.5, 0.5, 0.0) == pytest.approx(1 / (math.gamma(1.5) * math.gamma(0.5)), rel=1e-15)
    assert wright_type_e(0.5, 0.5, 0.5, 0.0, 0.0) == 0.0
    # alpha == beta: |z| = 1 is the circle of convergence of both series
    with pytest.raises(NonConvergent):
        wright_type_e(0.5, 0.5, 0.5, 1.0, -1.0)


def _mp_type_e(alpha, beta, mu, nu, z):
    import mpmath as mp

    with mp.workdps(40):
        z = mp.mpf(z)
        s, k, quiet = mp.mpf(0), 0, 0
        while quiet < 5:
            t = z**k * mp.rgamma(mu + alpha * k) * mp.rgamma(nu - beta * k)
            s += t
            k += 1
            quiet = quiet + 1 if k > 10 and abs(t) < mp.mpf(10) ** -30 * abs(s) else 0
        return float(s)


@pytest.mark.parametrize(
    "alpha,beta,mu,nu,z",
    [(0.7, 0.4, 0.7, 0.0, -2.0), (0.5, 0.5, 0.5, 0.0, -0.6), (0.8, 0.3, 1.0, 1.0, 3.0)],
)
def test_type_e_direct_series(alpha, beta, mu, nu, z):
    assert wright_type_e(alpha, beta, mu, nu, z) == pytest.approx(_mp_type_e(alpha, beta, mu, nu, z), rel=1e-12)


@pytest.mark.parametrize("alpha,beta,z", [(0.5, 0.5, -3.0), (0.4, 0.7, -2.5), (0.4, 0.7, -0.8)])
def test_type_e_continuation(alpha, beta, z):
    # the reflected series in 1/z, summed independently
    w = 1 / z
    ref = -w * _mp_type_e(beta, alpha, 0.0 + beta, alpha - alpha, w)
    assert wright_type_e(alpha, beta, alpha, 0.0, z) == pytest.approx(ref, rel=1e-12)


def test_mittag_leffler_examples():
    assert mittag_leffler(1, 1, 1.0) == pytest.approx(math.e, rel=1e-15)
    assert mittag_leffler(0.7, 1.3, 0.0) == pytest.approx(1 / math.gamma(1.3), rel=1e-15)
    assert mittag_leffler(0.5, 0.5, 0.0) == pytest.approx(0.5641896, abs=1e-7)


@pytest.mark.parametrize("alpha,beta", [(0.3, 0.3), (0.5, 0.5), (0.7, 1.0), (1.5, 2.0)])
@pytest.mark.parametrize("z", [-2.0, -0.5, 0.7, 3.0, 12.0, 30.0])
def test_mittag_leffler_against_mpmath(alpha, beta, z):
    if z > 0 and z ** (1 / alpha) > 700:
        # E grows like exp(z**(1/alpha)) and overflows double precision
        with pytest.raises(NumericalError):
            mittag_leffler(alpha, beta, z)
        return
    try:
        got = mittag_leffler(alpha, beta, z)
    except DomainExceeded:
        # refused only where the alternating series would lose digits
        assert z < 0
        return
    assert got == pytest.approx(mp_mittag_leffler(alpha, beta, z), rel=1e-12)


params = st.tuples(
    st.floats(-0.99, 2.0),
    st.floats(-3.0, 3.0).filter(lambda m: m > 0 or abs(m - round(m)) > 1e-6),
)


@settings(max_examples=200, deadline=None)
@given(params)
def test_value_at_zero(p):
    rho, mu = p
    assert abs(wright_phi(WrightParams(rho, mu), 0.0) - reciprocal_gamma(mu)) <= 1e-14


@settings(max_examples=100, deadline=None)
@given(st.floats(-0.95, 1.5), st.floats(-2.0, 2.0), st.floats(-5.0, 5.0))
def test_derivative_shift(rho, mu, z):
    h = 1e-5
    p = WrightParams(rho, mu)
    fd = (wright_phi(p, z + h) - wright_phi(p, z - h)) / (2 * h)
    exact = wright_phi(WrightParams(rho, mu + rho), z)
    scale = max(abs(exact), abs(wright_phi(p, z)), 1e-3)
    assert abs(fd - exact) <= 1e-6 * scale


def _exp_bound_ratio(beta, mu, z):
    """log|phi(-beta, mu; -z)| + sigma z**(1/(1-beta))."""
    sigma = 0.9 * (1 - beta) * beta ** (beta / (1 - beta))
    vals = np.abs(wright_phi(WrightParams(-beta, mu), -z))
    with np.errstate(divide="ignore"):
        return np.log(vals) + sigma * z ** (1 / (1 - beta))


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("mu", [-1.0, 0.0, 0.5, 1.0])
def test_exponential_bound(beta, mu):
    # C is fitted on a coarse grid over the whole range and asserted on a finer one
    coarse = np.linspace(0.0, 40.0, 401)
    fine = np.linspace(0.0, 40.0, 4001) + 0.0037
    fine = fine[fine <= 40.0]
    logC = np.max(_exp_bound_ratio(beta, mu, coarse))
    assert np.max(_exp_bound_ratio(beta, mu, fine)) <= logC + math.log(1.05)


@pytest.mark.parametrize("beta,mu", [(0.3, 0.5), (0.5, 1.0), (0.7, 0.2), (0.5, 0.0)])
@pytest.mark.parametrize("theta", [0.0, 0.5, 1.0])
def test_power_bound_single_constant(beta, mu, theta):
    # |y**(mu-1) phi(-beta, mu; -tau y**-beta)| <= C tau**-theta y**(mu-1+beta*theta)
    # the ratio depends on z = tau y**-beta only: C is its supremum over z
    cfg = SeriesConfig(domain_radius=np.inf)
    ratio = lambda z: z**theta * np.abs(wright_phi(WrightParams(-beta, mu), -z, cfg))  # noqa: E731
    z = np.r_[0.0, np.geomspace(1e-6, 60.0, 3000)]
    k = int(np.argmax(ratio(z)))
    C = ratio(z[k])
    if 0 < k < z.size - 1:
        best = optimize.minimize_scalar(lambda v: -ratio(v), bounds=(z[k - 1], z[k + 1]), method="bounded", options={"xatol": 1e-12})
        C = max(C, -best.fun)
    tau, y = np.meshgrid(np.geomspace(1e-3, 5.0, 20), np.geomspace(1e-3, 1.0, 20), indexing="ij")
    lhs = np.abs(y ** (mu - 1) * wright_phi(WrightParams(-beta, mu), -tau * y**-beta, cfg))
    rhs = C * tau**-theta * y ** (mu - 1 + beta * theta)
    assert np.all(lhs <= rhs * (1 + 1e-9))


@pytest.mark.parametrize("beta,mu", [(0.3, 0.0), (0.5, 0.5), (0.7, 1.0)])
def test_moments_quick(beta, mu):
    f = lambda t: wright_phi(WrightParams(-beta, mu), -t, SeriesConfig(domain_radius=np.inf))  # noqa: E731
    val, _ = integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-11, limit=200)
    assert val == pytest.approx(1 / math.gamma(mu + beta), rel=1e-8)
