#pragma once

#include <Eigen/Dense>
#include <array>

#include "rhps/stack.hpp"

namespace rhps {

// Regular 3x3 part plus the coefficient of delta(z - z') on the zz entry.
struct GreensEval {
    Eigen::Matrix3cd regular = Eigen::Matrix3cd::Zero();
    cplx contact = 0.0;
};

// Image term c * exp(i (s1 k z + s2 k z')) of the in-layer scalar Green's function.
struct ImageTerm {
    cplx coef;
    int s1;
    int s2;
};

// Green's function of the passive stack for a fixed (omega, k_par), source in
// the excitonic layer. The ∂z∂z' entry of the H tensor is taken pointwise
// (k^2 e^{ik|z-z'|} for the direct term); the only distributional piece is the
// zz contact term.
class LayeredGreens {
public:
    LayeredGreens(const LayerStack& stack, cplx omega, double k_par);

    cplx scalar(Polarization pol, double z, double zp) const;
    GreensEval dyadic(double z, double zp) const;

    const GeneralizedRT& rt(Polarization pol) const { return pol == Polarization::V ? v_ : h_; }
    std::array<ImageTerm, 4> images(Polarization pol) const;

    cplx omega() const { return omega_; }
    double k_par() const { return k_par_; }
    cplx k() const { return v_.k; }
    // eps_bg omega^2/c^2
    cplx k0_sq() const;
    const LayerStack& stack() const { return stack_; }

private:
    enum class Where { Left, Inside, Right };
    Where locate(double z) const;

    LayerStack stack_;
    cplx omega_;
    double k_par_;
    GeneralizedRT v_, h_;
};

cplx scalar_greens(const LayerStack& stack, const PlaneWaveChannel& ch, double z, double zp);
GreensEval dyadic_greens(const LayerStack& stack, cplx omega, double k_par, double z, double zp);

}  // namespace rhps
