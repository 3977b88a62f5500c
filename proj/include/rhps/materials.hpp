#pragma once

#include <complex>
#include <string>

namespace rhps {

using cplx = std::complex<double>;

// Internal units: meV for energies (hbar = 1, so also frequencies), nm for lengths.
namespace units {
inline constexpr double hbar_c = 197326.9804;        // meV nm
inline constexpr double hbar2_over_2me = 38.09982;   // meV nm^2, free electron
inline constexpr double hbar_meV_ps = 0.6582119569;  // meV ps
inline constexpr double pi = 3.14159265358979323846;

// Vacuum wavenumber omega/c in nm^-1.
inline double vacuum_wavenumber(double energy) { return energy / hbar_c; }
inline cplx vacuum_wavenumber(cplx energy) { return energy / hbar_c; }

// Damping width hbar/tau for a lifetime in ps.
inline double width_from_lifetime(double tau_ps) { return hbar_meV_ps / tau_ps; }

// In-plane wavenumber for scattering angle theta, k_par = (omega_T/c) sin(theta).
double in_plane_wavenumber(double omega_T, double theta_rad);
}  // namespace units

struct ExcitonParams {
    double omega_T = 3202.2;   // meV
    double delta_LT = 5.7;     // meV
    double eps_bg = 5.59;
    double mass = 2.3;         // free-electron masses
    double gamma = 0.5;        // meV, nonradiative FWHM

    void validate() const;
    // hbar^2 / (2 m_ex) in meV nm^2.
    double kinetic_coefficient() const { return units::hbar2_over_2me / mass; }
};

struct BiexcitonParams {
    double binding = 32.2;   // meV
    double mass = 5.29;      // free-electron masses
    double gamma = 0.0132;   // meV
    double volume = 80.0;    // |f|^2 in nm^3

    void validate(const ExcitonParams& ex) const;
    double kinetic_coefficient() const { return units::hbar2_over_2me / mass; }
};

struct MaterialParams {
    ExcitonParams exciton;
    BiexcitonParams biexciton;

    void validate() const;
};

struct PassiveMaterial {
    std::string name;
    double index = 1.0;

    double eps() const { return index * index; }
};

MaterialParams cucl_defaults();

PassiveMaterial vacuum();
PassiveMaterial pbf2();
PassiveMaterial pbbr2();
// Looks up "vacuum", "PbF2", "PbBr2"; throws ConfigurationError otherwise.
PassiveMaterial passive_material(const std::string& name);

}  // namespace rhps
