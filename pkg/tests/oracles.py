"""Independent reference computations used to freeze expected test values.

Everything here recomputes results along a different route than the library
(direct recurrences, term-by-term series manipulation, brute enumeration) so
the tests never check an implementation against itself.
"""

from fractions import Fraction


def catalan_numbers(count: int) -> list[int]:
    """C_0, C_1, ... by the convolution recurrence."""
    cats = [1]
    for n in range(count - 1):
        cats.append(sum(cats[i] * cats[n - i] for i in range(n + 1)))
    return cats


def lagrange_reversion(phi_coeffs: list[Fraction], degree: int) -> list[Fraction]:
    """Compositional inverse of phi(w) = w + a2 w^2 + ... via the Lagrange
    formula [x^n] psi = (1/n) [w^(n-1)] (w/phi(w))^n.

    phi_coeffs is ascending with phi_coeffs[0] = 0, phi_coeffs[1] = 1.
    """
    assert phi_coeffs[0] == 0 and phi_coeffs[1] == 1

    def series_mul(a, b, cap):
        out = [Fraction(0)] * cap
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if i + j >= cap:
                    break
                out[i + j] += x * y
        return out

    def series_inv(a, cap):
        # 1 / (1 + a1 w + ...) with a[0] == 1
        assert a[0] == 1
        out = [Fraction(0)] * cap
        out[0] = Fraction(1)
        for n in range(1, cap):
            out[n] = -sum(a[k] * out[n - k] for k in range(1, n + 1) if k < len(a))
        return out

    # w/phi(w) = 1 / (1 + a2 w + a3 w^2 + ...)
    tail = [Fraction(1)] + [Fraction(c) for c in phi_coeffs[2:]]
    base = series_inv(tail, degree)
    result = [Fraction(0)] * (degree + 1)
    result[1] = Fraction(1) if degree >= 1 else Fraction(0)
    power = [Fraction(1)] + [Fraction(0)] * (degree - 1)
    for n in range(1, degree + 1):
        power = series_mul(power, base, degree)
        if n >= 2:
            result[n] = power[n - 1] / n
    return result


def geometric_flow_coefficients(scale: int, x_degree: int) -> dict:
    """Coefficients of x / (1 - scale*t*x) = sum scale^k t^k x^(k+1)."""
    out = {}
    for k in range(x_degree):
        out[(k + 1, k)] = scale**k
    return out


def exponential_flow_coefficients(scale: int, t_degree: int) -> list[Fraction]:
    """e^(scale*t) x: ascending t-coefficients of the x^1 term."""
    out = [Fraction(1)]
    for k in range(1, t_degree + 1):
        out.append(out[-1] * scale / k)
    return out


def padic_log_residue(one_plus: int, p: int, N: int) -> int:
    """log(one_plus) mod p^N for one_plus = 1 + p*unit, by the alternating
    series with exact rational partial sums."""
    u = one_plus - 1
    total = Fraction(0)
    term_count = 1
    while True:
        # stop once new terms cannot change the residue mod p^N
        from padicgroups.padic import vp

        k = term_count
        if k * vp(u, p) - (vp(k, p) if k else 0) > N + 4 and k > N:
            break
        total += Fraction((-1) ** (k - 1) * u**k, k)
        term_count += 1
    den = total.denominator
    num = total.numerator
    assert den % p != 0
    return num * pow(den, -1, p**N) % p**N


def brute_force_gl_order(d: int, q: int) -> int:
    """|GL_d(F_q)| by enumerating matrices; practical for q^(d*d) small."""
    import itertools

    def det_mod(rows, q):
        n = len(rows)
        rows = [list(r) for r in rows]
        det = 1
        for col in range(n):
            pivot = next(
                (r for r in range(col, n) if rows[r][col] % q), None
            )
            if pivot is None:
                return 0
            if pivot != col:
                rows[col], rows[pivot] = rows[pivot], rows[col]
                det = -det
            det = det * rows[col][col] % q
            inv = pow(rows[col][col], -1, q)
            for r in range(col + 1, n):
                factor = rows[r][col] * inv % q
                rows[r] = [(a - factor * b) % q for a, b in zip(rows[r], rows[col])]
        return det % q

    count = 0
    for entries in itertools.product(range(q), repeat=d * d):
        rows = [entries[i * d:(i + 1) * d] for i in range(d)]
        if det_mod(rows, q) != 0:
            count += 1
    return count
