"""Independent reference values for the C++ tests.

The embedded chain is built from the transform of the pure-death generator:
the queue-length law after one interarrival time T is E[exp(Q T)], which is
expm(Q a) for constant T, (I - Q/r)^-k for Erlang(k, r) and a weighted sum of
resolvents for the hyperexponential. Nothing here shares code with the
library's kernel series.
"""
import numpy as np
from scipy.linalg import expm, solve
from scipy import integrate


def death_generator(m, cap, mu):
    q = np.zeros((cap + 1, cap + 1))
    for k in range(1, cap + 1):
        rate = min(k, m) * mu
        q[k, k - 1] = rate
        q[k, k] = -rate
    return q


def transform(q, dist):
    kind = dist[0]
    eye = np.eye(q.shape[0])
    if kind == "det":
        return expm(q * dist[1])
    if kind == "erlang":
        k, r = dist[1], dist[2]
        return np.linalg.matrix_power(np.linalg.inv(eye - q / r), k)
    if kind == "hyper":
        return sum(w * r * np.linalg.inv(r * eye - q) for w, r in zip(dist[1], dist[2]))
    raise ValueError(kind)


def stationary(m, n, mu, dist):
    cap = m + n
    t = transform(death_generator(m, cap, mu), dist)
    p = np.array([t[min(i + 1, cap)] for i in range(cap + 1)])
    a = p.T - np.eye(cap + 1)
    a[-1, :] = 1.0
    b = np.zeros(cap + 1)
    b[-1] = 1.0
    return solve(a, b)


def det_at_load(m, mu, rho):
    return ("det", 1.0 / (rho * m * mu))


if __name__ == "__main__":
    np.set_printoptions(precision=17)
    print("D/M/m/n at rho = 0.999, mu = 1")
    for m in (1, 2):
        vals = [stationary(m, n, 1.0, det_at_load(m, 1.0, 0.999))[-1]
                for n in (10, 15, 20, 25, 30, 35, 40, 45, 50, 100)]
        print(m, ", ".join(f"{v:.15g}" for v in vals))

    # Erlang(2) at rho = 0.9 with m = 3, n = 5: mean 1/(0.9*3), rate 2*2.7.
    print("E2/M/3/5 rho 0.9", f"{stationary(3, 5, 1.0, ('erlang', 2, 5.4))[-1]:.15g}")
    # Hyperexponential w = (0.3, 0.7), rates (0.5, 2) has mean 1.0; m = 4 at
    # mu = 1/(4 * 1.3) gives rho = 1.3.
    mu = 1.0 / (4 * 1.3)
    print("H2/M/4/10 rho 1.3", f"{stationary(4, 10, mu, ('hyper', (0.3, 0.7), (0.5, 2.0)))[-1]:.15g}")

    # M/M/2 at rho = 0.7: probability an arrival finds both servers busy.
    pi = stationary(2, 400, 1.0, ("erlang", 1, 1.4))
    print("M/M/2 rho 0.7 P(pre >= 2)", f"{pi[2:].sum():.15g}")

    # Two-server boundary kernel, one departure, one waiting customer,
    # exponential interarrivals lambda = 1, mu = 1, from its defining double
    # integral.
    m, mu, lam = 2, 1.0, 1.0
    inner = lambda x: integrate.quad(
        lambda u: (np.exp(-mu * u) - np.exp(-mu * x)) * m * mu, 0.0, x, epsabs=1e-14)[0]
    val = integrate.quad(lambda x: m * np.exp(-(m - 1) * mu * x) * inner(x) * lam * np.exp(-lam * x),
                         0.0, np.inf, epsabs=1e-14)[0]
    print("r_{1,1,1} exp", f"{val:.15g}")
