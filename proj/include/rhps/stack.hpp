#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "rhps/materials.hpp"

namespace rhps {

enum class Polarization { V, H };

std::string to_string(Polarization p);

struct Layer {
    double thickness = 0;  // nm
    double eps = 1;
    bool excitonic = false;
    std::string name;
};

// Regions are numbered left to right: 0 is the left semi-infinite medium,
// 1..n the finite layers, n+1 the right semi-infinite medium. The excitonic
// layer occupies 0 < z < d.
class LayerStack {
public:
    LayerStack(double left_eps, std::vector<Layer> layers, double right_eps);

    static LayerStack uniform(double eps, double d);
    static LayerStack film(double d, double eps_bg, double outside_eps = 1.0);

    std::size_t regions() const { return eps_.size(); }
    std::size_t excitonic_region() const { return excitonic_; }
    double eps(std::size_t region) const { return eps_[region]; }
    double thickness(std::size_t region) const;
    double d() const { return thickness(excitonic_); }
    double eps_layer() const { return eps_[excitonic_]; }
    double left_eps() const { return eps_.front(); }
    double right_eps() const { return eps_.back(); }

    // z of the interface between region j and j+1.
    double interface(std::size_t j) const { return z_[j]; }
    double z_left() const { return z_.front(); }
    double z_right() const { return z_.back(); }
    // Region containing z; interfaces belong to the region on their left.
    std::size_t region_of(double z) const;

    const std::vector<Layer>& layers() const { return layers_; }

private:
    std::vector<Layer> layers_;
    std::vector<double> eps_;
    std::vector<double> z_;
    std::size_t excitonic_ = 0;
};

struct PlaneWaveChannel {
    cplx omega;  // meV, complex only inside the mode finder
    double k_par = 0;
    Polarization pol = Polarization::V;
};

// sqrt(eps w^2/c^2 - k_par^2) on the Im >= 0 branch (Re >= 0 on the real axis).
cplx normal_wavenumber(double eps, cplx omega, double k_par);

// Transmission coefficients for H polarization are normalized so that
// |r|^2 + Re(k_b/k_a)|t|^2 = 1 holds for both polarizations: r is the
// reflection of the tangential magnetic field H_y, and t = sqrt(eps_a/eps_b)
// times the H_y transmission. This is the scaling under which the end-region
// prefactor 1/(sqrt(eps_bg eps_j) w^2/c^2) of the H Green's tensor applies.
struct Fresnel {
    cplx r;
    cplx t;
};

Fresnel interface_coefficients(double eps_a, double eps_b, const PlaneWaveChannel& ch);

// Generalized coefficients seen from inside the excitonic layer. R_left is
// referenced at z=0, R_right at z=d. T_left maps the down-going amplitude at
// z=0 onto the outgoing amplitude at z_left; T_right maps the up-going
// amplitude at z=d onto the outgoing amplitude at z_right.
struct GeneralizedRT {
    cplx k;  // excitonic layer
    double d = 0;
    cplx R_left, R_right;
    cplx T_left, T_right;
    cplx M;
    cplx k_left, k_right;
    double z_left = 0, z_right = 0;

    // Coefficients of the form g = exp(-i k_L z) T_L [...] and exp(i k_R z) T_R [...].
    cplx T_left_absolute() const;
    cplx T_right_absolute() const;
};

// 1 - R_L R_R exp(2ikd); zero at passive cavity resonances.
cplx cavity_denominator(const LayerStack& stack, const PlaneWaveChannel& ch);

GeneralizedRT generalized_rt(const LayerStack& stack, const PlaneWaveChannel& ch);

// Complex passive resonance (root of the cavity denominator) near a seed.
std::optional<cplx> find_passive_resonance(const LayerStack& stack, Polarization pol,
                                           double k_par, cplx seed);

// Driven plane wave incident from the left with electric-field amplitude
// `amplitude`. Per-region amplitudes are those of the scalar field u (E_y for
// V, c Z0-scaled H_y for H), referenced at the left face of each region (the
// left medium at z_left).
class PumpField {
public:
    PumpField(const LayerStack& stack, const PlaneWaveChannel& ch, cplx amplitude);

    Eigen::Vector3cd E(double z) const;
    // In the excitonic layer E_xi(z) = a(xi) e^{ikz} + b(xi) e^{-ikz}.
    Eigen::Vector3cd forward_components() const { return a_; }
    Eigen::Vector3cd backward_components() const { return b_; }
    cplx k_layer() const { return k_[excitonic_]; }

    cplx reflection() const { return reflection_; }
    // Transmitted electric-field amplitude over incident amplitude.
    cplx transmission() const { return transmission_; }
    const PlaneWaveChannel& channel() const { return ch_; }

private:
    Eigen::Vector3cd field_from(std::size_t region, cplx up, cplx down, double zeta) const;

    LayerStack stack_;
    PlaneWaveChannel ch_;
    std::vector<cplx> k_, up_, down_;
    std::size_t excitonic_;
    cplx reflection_, transmission_;
    Eigen::Vector3cd a_, b_;
};

struct DbrOptions {
    int periods_left = 4;
    int periods_right = 16;
    double design_energy = 3202.2;  // meV
    double eps_bg = 5.59;
    double outside_eps = 1.0;
    double spacer_thickness = 0.0;  // nm, between mirrors and the excitonic layer
    double spacer_eps = 1.0;
    bool high_index_adjacent = true;
};

double quarter_wave_thickness(double index, double design_energy);

// PbF2/PbBr2 quarter-wave mirrors on both sides of the excitonic layer.
LayerStack build_dbr_cavity(double d, const DbrOptions& opt);
LayerStack build_dbr_cavity(double d, int periods_left, int periods_right, double design_energy);

}  // namespace rhps
