#include "rhps/basis.hpp"

#include <cmath>

#include "rhps/errors.hpp"

namespace rhps {

namespace {
constexpr cplx I{0.0, 1.0};

double parity(int m) { return (m % 2 == 0) ? 1.0 : -1.0; }

// int_0^d sin(p pi z/d) dz in units of d/pi.
double sine_moment(int p) {
    if (p == 0) return 0.0;
    return (1.0 - parity(std::abs(p))) / p;
}

template <class F>
cplx circle_mean(F f, cplx center, double r, int n = 24) {
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) s += f(center + r * std::exp(I * (2.0 * units::pi * (j + 0.5) / n)));
    return s / double(n);
}

double circle_radius(cplx k, double q, double d) {
    double r = std::min(1e-3 * std::abs(k), 0.5 / d);
    return std::max(r, 20.0 * std::abs(k - q));
}
}  // namespace

double exciton_energy(const ExcitonParams& ex, double d, double k_par, int m) {
    double q = confinement_wavenumber(d, m);
    return ex.omega_T + ex.kinetic_coefficient() * (k_par * k_par + q * q);
}

double biexciton_energy(const MaterialParams& p, double d, double k_par, int n) {
    double q = confinement_wavenumber(d, n);
    return 2.0 * p.exciton.omega_T - p.biexciton.binding +
           p.biexciton.kinetic_coefficient() * (k_par * k_par + q * q);
}

namespace {
int modes_below(double coefficient, double d, double e_cut) {
    // q_m^2 c <= e_cut  <=>  m <= d/pi sqrt(e_cut/c)
    int m = static_cast<int>(std::floor(d / units::pi * std::sqrt(e_cut / coefficient)));
    while (m > 0 && coefficient * std::pow(confinement_wavenumber(d, m), 2) > e_cut) --m;
    while (coefficient * std::pow(confinement_wavenumber(d, m + 1), 2) <= e_cut) ++m;
    return m;
}
}  // namespace

ExcitonBasis truncate_basis(const ExcitonParams& ex, double d, double k_par, double e_cut,
                            int max_m) {
    if (!(d > 0)) throw ConfigurationError("basis: thickness must be positive");
    if (!(e_cut > 0)) throw ConfigurationError("basis: cutoff must be positive");
    int m_max = max_m > 0 ? max_m : modes_below(ex.kinetic_coefficient(), d, e_cut);
    if (m_max < 1) throw ConfigurationError("basis: cutoff below the first confined level");
    ExcitonBasis b;
    b.d = d;
    b.k_par = k_par;
    for (int m = 1; m <= m_max; ++m) {
        b.modes.push_back(m);
        b.energies.push_back(exciton_energy(ex, d, k_par, m));
    }
    return b;
}

BiexcitonBasis truncate_biexciton_basis(const MaterialParams& p, double d, double k_par,
                                        double e_cut, int max_n) {
    if (!(d > 0)) throw ConfigurationError("basis: thickness must be positive");
    if (!(e_cut > 0)) throw ConfigurationError("basis: cutoff must be positive");
    int n_max = max_n > 0 ? max_n : modes_below(p.biexciton.kinetic_coefficient(), d, e_cut);
    if (n_max < 1) throw ConfigurationError("basis: cutoff below the first biexciton level");
    BiexcitonBasis b;
    b.d = d;
    b.k_par = k_par;
    for (int n = 1; n <= n_max; ++n) {
        b.modes.push_back(n);
        b.energies.push_back(biexciton_energy(p, d, k_par, n));
    }
    return b;
}

double overlap_c(double d, int n, int m, int mp) {
    double s = sine_moment(n + m - mp) + sine_moment(m + mp - n) + sine_moment(mp + n - m) -
               sine_moment(n + m + mp);
    return std::pow(2.0 / d, 1.5) * 0.25 * d / units::pi * s;
}

namespace integrals {

cplx expm1_over_x(cplx x) {
    if (std::abs(x) < 0.5) {
        cplx term = 1.0, sum = 1.0;
        for (int n = 1; n < 18; ++n) {
            term *= x / double(n + 1);
            sum += term;
        }
        return sum;
    }
    return (std::exp(x) - 1.0) / x;
}

cplx sine_exp(double d, int m, cplx kappa) {
    double q = confinement_wavenumber(d, m);
    cplx sum = kappa + q, diff = kappa - q;
    if (std::abs(sum) >= std::abs(diff)) return I * q * d * expm1_over_x(I * diff * d) / sum;
    return I * q * d * expm1_over_x(I * sum * d) / diff;
}

double sine_cosine(double d, int n, int p) {
    if (n == p) return 0.0;
    double pn = n, pp = p;
    return d / units::pi * pn * (1.0 - parity(n + p)) / (pn * pn - pp * pp);
}

bool near_pole(cplx k, double q) { return std::abs(k - q) < 1e-4 * std::abs(k); }

cplx direct(double d, int m, int mp, cplx k) {
    const double q = confinement_wavenumber(d, m);
    auto raw = [&](cplx kk) {
        cplx v = -q * sine_exp(d, mp, kk) + q * parity(m) * std::exp(I * kk * d) * sine_exp(d, mp, -kk);
        if (m == mp) v += I * kk * d;
        return v / (kk * kk - q * q);
    };
    if (near_pole(k, q)) return circle_mean(raw, k, circle_radius(k, q, d));
    return raw(k);
}

cplx direct_sign(double d, int m, int mp, cplx k) {
    const double qp = confinement_wavenumber(d, mp);
    const double c = sine_cosine(d, m, mp);
    auto raw = [&](cplx kk) {
        cplx v = 2.0 * c - sine_exp(d, m, kk) - parity(mp) * std::exp(I * kk * d) * sine_exp(d, m, -kk);
        return qp * v / (kk * kk - qp * qp);
    };
    if (near_pole(k, qp)) return circle_mean(raw, k, circle_radius(k, qp, d));
    return raw(k);
}

}  // namespace integrals

}  // namespace rhps
