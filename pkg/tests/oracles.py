"""Independent reference computations used by the test-suite."""
import numpy as np
from scipy.integrate import solve_ivp


def dirac_system(m, k, A, lam, q=None):
    def rhs(r, Z):
        v = -A / r + (q(r) if q is not None else 0.0)
        f, g = Z
        return [-k / r * f + (lam + m - v) * g, (m - lam + v) * f + k / r * g]
    return rhs


def ode_regular(m, k, A, lam, r_eval, q=None, r0=1e-6):
    """Adaptive integration from r0 seeded by r^gamma [1, (gamma + k)/A]."""
    gamma = np.sqrt(k * k - A * A)
    seed = np.array([1.0, (gamma + k) / A]) * r0**gamma
    r_eval = np.atleast_1d(np.asarray(r_eval, dtype=float))
    sol = solve_ivp(dirac_system(m, k, A, lam, q), (r0, r_eval.max()), seed, method="DOP853",
                    rtol=1e-13, atol=1e-30, t_eval=r_eval)
    return sol.y
