#pragma once

#include <Eigen/Dense>
#include <optional>

#include "rhps/linear_response.hpp"

namespace rhps {

// Observation end medium. The pump enters from the left, so Right is forward.
enum class Side { Left, Right };
enum class DetectorBasis { H, V, L, R };

std::string to_string(Side s);
std::string to_string(DetectorBasis p);
Side side_from_string(const std::string& s);
DetectorBasis detector_from_string(const std::string& s);

struct BiexcitonAmplitude {
    double omega_in = 0;
    double k_in = 0;
    BiexcitonBasis basis;  // at 2 k_in
    Eigen::VectorXcd B;
};

// B_n(2 w_in) from the pump-driven linear amplitudes.
BiexcitonAmplitude biexciton_amplitude(const MaterialParams& p, const ExcitonBasis& basis,
                                       const BiexcitonBasis& bx, const LinearAmplitudes& lin);

// Coupling K(m', m) between a photon-side exciton (k_photon, m') and its partner
// (k_partner, m) through the biexciton amplitudes:
// f sum_n B_n (E_m' + E_m - Omega_n) C(n, m', m).
Eigen::MatrixXcd nonlinear_coupling(const MaterialParams& p, const BiexcitonAmplitude& bx,
                                    const ExcitonBasis& photon, const ExcitonBasis& partner);

// Far-field kernel E_{xi,m}(z, w): rows are field components, columns the
// (xi, m) exciton index ordered [x, y, z]. Evaluated at the outer interface of
// the chosen end medium.
Eigen::MatrixXcd radiation_kernel(const ResponseKernel& kernel, Side side);

// Unit polarization vector of the outgoing wave. Throws NoFarFieldError if the
// channel is evanescent in the end medium.
Eigen::Vector3cd detector_vector(const LayerStack& stack, double omega, double k_par, Side side,
                                 DetectorBasis p);

// e^T T e* for an intensity tensor.
double project_intensity(const Eigen::Matrix3cd& t, const Eigen::Vector3cd& e);
// e1^H T e2* for a pair amplitude.
cplx project_pair(const Eigen::Matrix3cd& t, const Eigen::Vector3cd& e1, const Eigen::Vector3cd& e2);

struct PumpTuning {
    std::optional<int> target_n;  // empty: bulk rule, all n
    double window = 1.0;          // meV around the bulk two-photon resonance
    double tolerance = 1e-4;      // meV
};

struct ModelOptions {
    double e_cut = 2.0;            // meV, exciton kinetic cutoff
    double e_cut_biexciton = 0.0;  // meV; 0 uses e_cut
    SolverKind solver = SolverKind::Automatic;
};

// Pump frequency maximizing the biexciton population, refined by golden section.
double tune_pump(const LayerStack& stack, const MaterialParams& p, const PumpSpec& pump,
                 const ModelOptions& opt, const PumpTuning& tuning = {});

class RhpsModel {
public:
    RhpsModel(LayerStack stack, MaterialParams params, PumpSpec pump, ModelOptions opt = {});

    const LayerStack& stack() const { return stack_; }
    const MaterialParams& params() const { return params_; }
    const PumpSpec& pump() const { return pump_; }
    const ModelOptions& options() const { return opt_; }
    const BiexcitonAmplitude& biexciton() const { return bx_; }
    const ExcitonBasis& pump_basis() const { return pump_basis_; }

    ExcitonBasis basis_at(double k_par) const;

    // One-photon intensity kernel at (w, k_par) on one side.
    Eigen::Matrix3cd singles_tensor(double omega, double k_par, Side side) const;
    // Joint amplitude for photon 1 at (w, k1, side1) and photon 2 at
    // (2 w_in - w, 2 k_in - k1, side2); rows index photon 1.
    Eigen::Matrix3cd pair_amplitude(double omega, double k_par1, Side side1, Side side2) const;

    double one_photon_intensity(double omega, double k_par, Side side, DetectorBasis p,
                                double dw) const;
    double coincidence_signal(double omega, double k_par1, Side side1, DetectorBasis p1, Side side2,
                              DetectorBasis p2, double dw) const;
    double coincidence_noise(double omega1, double k_par1, Side side1, DetectorBasis p1,
                             double omega2, double k_par2, Side side2, DetectorBasis p2,
                             double dw) const;

private:
    Eigen::MatrixXcd coupling(double k_photon) const;

    LayerStack stack_;
    MaterialParams params_;
    PumpSpec pump_;
    ModelOptions opt_;
    ExcitonBasis pump_basis_;
    BiexcitonAmplitude bx_;
};

// S^2 / (alpha N); throws UndefinedPerformanceError when N <= 0.
double performance(double signal, double noise, double alpha);

}  // namespace rhps
