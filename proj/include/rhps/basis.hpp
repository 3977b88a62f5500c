#pragma once

#include <complex>
#include <vector>

#include "rhps/materials.hpp"

namespace rhps {

// Polarization components of exciton modes.
enum Component : int { X = 0, Y = 1, Z = 2 };

struct ModeIndex {
    int xi = X;
    double k_par = 0;
    int m = 1;
};

inline double confinement_wavenumber(double d, int m) { return m * units::pi / d; }

double exciton_energy(const ExcitonParams& ex, double d, double k_par, int m);
double biexciton_energy(const MaterialParams& p, double d, double k_par, int n);

// Modes m = 1..size() of one polarization component; energies are shared by x, y, z.
struct ExcitonBasis {
    double d = 0;
    double k_par = 0;
    std::vector<int> modes;
    std::vector<double> energies;  // meV

    int size() const { return static_cast<int>(modes.size()); }
    double q(int i) const { return confinement_wavenumber(d, modes[i]); }
};

struct BiexcitonBasis {
    double d = 0;
    double k_par = 0;
    std::vector<int> modes;
    std::vector<double> energies;

    int size() const { return static_cast<int>(modes.size()); }
};

// Keeps every m whose kinetic energy hbar^2 q_m^2/2m_ex is <= e_cut.
// max_m > 0 overrides the cutoff.
ExcitonBasis truncate_basis(const ExcitonParams& ex, double d, double k_par, double e_cut,
                            int max_m = 0);
BiexcitonBasis truncate_biexciton_basis(const MaterialParams& p, double d, double k_par,
                                        double e_cut, int max_n = 0);

// (2/d)^{3/2} int_0^d sin(q_n z) sin(q_m z) sin(q_m' z) dz
double overlap_c(double d, int n, int m, int mp);

// Closed-form integrals over the layer 0 < z < d with q_m = m pi/d.
namespace integrals {

// (e^x - 1)/x, accurate near x = 0.
cplx expm1_over_x(cplx x);

// int_0^d sin(q_m z) e^{i kappa z} dz
cplx sine_exp(double d, int m, cplx kappa);

// int_0^d sin(q_n z) cos(q_p z) dz for p >= 0
double sine_cosine(double d, int n, int p);

// int int sin(q_m z) e^{ik|z-z'|} sin(q_m' z') dz dz'
cplx direct(double d, int m, int mp, cplx k);

// int int sin(q_m z) sgn(z-z') e^{ik|z-z'|} sin(q_m' z') dz dz'
cplx direct_sign(double d, int m, int mp, cplx k);

// True when k sits close enough to q_m that the two-region antiderivative
// loses precision; such entries are evaluated by a circle mean in k.
bool near_pole(cplx k, double q);

}  // namespace integrals

}  // namespace rhps
