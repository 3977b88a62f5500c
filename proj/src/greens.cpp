#include "rhps/greens.hpp"

#include <cmath>

#include "rhps/errors.hpp"

namespace rhps {

namespace {
constexpr cplx I{0.0, 1.0};
}

LayeredGreens::LayeredGreens(const LayerStack& stack, cplx omega, double k_par)
    : stack_(stack), omega_(omega), k_par_(k_par) {
    v_ = generalized_rt(stack, PlaneWaveChannel{omega, k_par, Polarization::V});
    h_ = generalized_rt(stack, PlaneWaveChannel{omega, k_par, Polarization::H});
}

cplx LayeredGreens::k0_sq() const {
    cplx k0 = units::vacuum_wavenumber(omega_);
    return stack_.eps_layer() * k0 * k0;
}

std::array<ImageTerm, 4> LayeredGreens::images(Polarization pol) const {
    const GeneralizedRT& g = rt(pol);
    cplx e2 = std::exp(2.0 * I * g.k * g.d);
    cplx both = g.R_left * g.R_right * g.M * e2;
    return {ImageTerm{g.R_left * g.M, +1, +1}, ImageTerm{both, +1, -1},
            ImageTerm{g.R_right * g.M * e2, -1, -1}, ImageTerm{both, -1, +1}};
}

LayeredGreens::Where LayeredGreens::locate(double z) const {
    const double d = stack_.d();
    if (z >= 0 && z <= d) return Where::Inside;
    if (z <= stack_.z_left()) return Where::Left;
    if (z >= stack_.z_right()) return Where::Right;
    throw UnsupportedObservationError("greens: observation point inside a passive interior layer");
}

namespace {
void check_source(const LayerStack& s, double zp) {
    if (zp < 0 || zp > s.d())
        throw UnsupportedObservationError("greens: source point must lie in the excitonic layer");
}
}  // namespace

cplx LayeredGreens::scalar(Polarization pol, double z, double zp) const {
    check_source(stack_, zp);
    const GeneralizedRT& g = rt(pol);
    const cplx k = g.k;
    const double d = g.d;
    switch (locate(z)) {
        case Where::Inside: {
            cplx v = std::exp(I * k * std::abs(z - zp));
            for (const auto& t : images(pol)) v += t.coef * std::exp(I * k * (t.s1 * z + t.s2 * zp));
            return v;
        }
        case Where::Right: {
            cplx br = std::exp(I * k * (d - zp)) + g.R_left * std::exp(I * k * (d + zp));
            return std::exp(I * g.k_right * (z - g.z_right)) * g.T_right * br * g.M;
        }
        case Where::Left: {
            cplx br = std::exp(I * k * zp) + g.R_right * std::exp(I * k * (2.0 * d - zp));
            return std::exp(-I * g.k_left * (z - g.z_left)) * g.T_left * br * g.M;
        }
    }
    return 0.0;
}

GreensEval LayeredGreens::dyadic(double z, double zp) const {
    check_source(stack_, zp);
    GreensEval out;
    const cplx k = v_.k;
    const double d = v_.d;
    const double kp = k_par_;
    const cplx pre = I / (2.0 * k);  // -1/(2ik)
    const cplx k0 = units::vacuum_wavenumber(omega_);
    const Where where = locate(z);

    out.regular(1, 1) = pre * scalar(Polarization::V, z, zp);

    if (where == Where::Inside) {
        const cplx base = pre / k0_sq();
        const double sg = z > zp ? 1.0 : (z < zp ? -1.0 : 0.0);
        const cplx e = std::exp(I * k * std::abs(z - zp));
        cplx xx = k * k * e, xz = -k * kp * sg * e, zx = -k * kp * sg * e, zz = e;
        for (const auto& t : images(Polarization::H)) {
            cplx term = t.coef * std::exp(I * k * (t.s1 * z + t.s2 * zp));
            xx += -double(t.s1 * t.s2) * k * k * term;
            xz += -double(t.s1) * k * kp * term;
            zx += double(t.s2) * k * kp * term;
            zz += term;
        }
        out.regular(0, 0) = base * xx;
        out.regular(0, 2) = base * xz;
        out.regular(2, 0) = base * zx;
        out.regular(2, 2) = base * kp * kp * zz;
        out.contact = -1.0 / k0_sq();
        return out;
    }

    const GeneralizedRT& g = h_;
    cplx phase, dz, br, dbr;
    double eps_j;
    if (where == Where::Right) {
        eps_j = stack_.right_eps();
        phase = std::exp(I * g.k_right * (z - g.z_right)) * g.T_right * g.M;
        dz = I * g.k_right;
        cplx a = std::exp(I * k * (d - zp)), b = g.R_left * std::exp(I * k * (d + zp));
        br = a + b;
        dbr = -I * k * a + I * k * b;
    } else {
        eps_j = stack_.left_eps();
        phase = std::exp(-I * g.k_left * (z - g.z_left)) * g.T_left * g.M;
        dz = -I * g.k_left;
        cplx a = std::exp(I * k * zp), b = g.R_right * std::exp(I * k * (2.0 * d - zp));
        br = a + b;
        dbr = I * k * a - I * k * b;
    }
    const cplx base = pre / (std::sqrt(stack_.eps_layer() * eps_j) * k0 * k0) * phase;
    out.regular(0, 0) = base * dz * dbr;
    out.regular(0, 2) = base * I * kp * dz * br;
    out.regular(2, 0) = base * (-I * kp) * dbr;
    out.regular(2, 2) = base * kp * kp * br;
    return out;
}

cplx scalar_greens(const LayerStack& stack, const PlaneWaveChannel& ch, double z, double zp) {
    return LayeredGreens(stack, ch.omega, ch.k_par).scalar(ch.pol, z, zp);
}

GreensEval dyadic_greens(const LayerStack& stack, cplx omega, double k_par, double z, double zp) {
    return LayeredGreens(stack, omega, k_par).dyadic(z, zp);
}

}  // namespace rhps
