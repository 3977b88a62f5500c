#include "rhps/stack.hpp"

#include <cmath>
#include <limits>

#include "rhps/errors.hpp"

namespace rhps {

namespace {
constexpr cplx I{0.0, 1.0};

cplx admittance(double eps, cplx kz, Polarization pol) {
    return pol == Polarization::V ? kz : kz / eps;
}
}  // namespace

std::string to_string(Polarization p) { return p == Polarization::V ? "V" : "H"; }

LayerStack::LayerStack(double left_eps, std::vector<Layer> layers, double right_eps)
    : layers_(std::move(layers)) {
    if (!(left_eps >= 1) || !(right_eps >= 1))
        throw ConfigurationError("stack: end media need eps >= 1");
    int count = 0;
    std::size_t idx = 0;
    for (std::size_t j = 0; j < layers_.size(); ++j) {
        if (!(layers_[j].thickness > 0) || !std::isfinite(layers_[j].thickness))
            throw ConfigurationError("stack: interior layers need finite positive thickness");
        if (!(layers_[j].eps >= 1)) throw ConfigurationError("stack: layer eps must be >= 1");
        if (layers_[j].excitonic) {
            ++count;
            idx = j;
        }
    }
    if (count != 1) throw ConfigurationError("stack: exactly one layer must be excitonic");
    excitonic_ = idx + 1;
    eps_.push_back(left_eps);
    for (auto& l : layers_) eps_.push_back(l.eps);
    eps_.push_back(right_eps);

    // Interfaces: z_[j] separates region j and j+1; z_[excitonic_-1] = 0.
    z_.assign(layers_.size() + 1, 0.0);
    for (std::size_t j = excitonic_; j < z_.size(); ++j)
        z_[j] = z_[j - 1] + layers_[j - 1].thickness;
    for (std::size_t j = excitonic_ - 1; j-- > 0;) z_[j] = z_[j + 1] - layers_[j].thickness;
}

LayerStack LayerStack::uniform(double eps, double d) {
    return LayerStack(eps, {Layer{d, eps, true, "excitonic"}}, eps);
}

LayerStack LayerStack::film(double d, double eps_bg, double outside_eps) {
    return LayerStack(outside_eps, {Layer{d, eps_bg, true, "excitonic"}}, outside_eps);
}

double LayerStack::thickness(std::size_t region) const {
    if (region == 0 || region + 1 >= eps_.size()) return std::numeric_limits<double>::infinity();
    return layers_[region - 1].thickness;
}

std::size_t LayerStack::region_of(double z) const {
    for (std::size_t j = 0; j < z_.size(); ++j)
        if (z <= z_[j]) return j;
    return z_.size();
}

cplx normal_wavenumber(double eps, cplx omega, double k_par) {
    cplx k0 = units::vacuum_wavenumber(omega);
    cplx arg = eps * k0 * k0 - k_par * k_par;
    if (arg.real() >= 0) return std::sqrt(arg);
    return I * std::sqrt(-arg);
}

Fresnel interface_coefficients(double eps_a, double eps_b, const PlaneWaveChannel& ch) {
    cplx ka = normal_wavenumber(eps_a, ch.omega, ch.k_par);
    cplx kb = normal_wavenumber(eps_b, ch.omega, ch.k_par);
    cplx ya = admittance(eps_a, ka, ch.pol), yb = admittance(eps_b, kb, ch.pol);
    Fresnel f;
    f.r = (ya - yb) / (ya + yb);
    f.t = 2.0 * ya / (ya + yb);
    if (ch.pol == Polarization::H) f.t *= std::sqrt(eps_a / eps_b);
    return f;
}

cplx GeneralizedRT::T_left_absolute() const { return T_left * std::exp(I * k_left * z_left); }
cplx GeneralizedRT::T_right_absolute() const { return T_right * std::exp(-I * k_right * z_right); }

namespace {

struct SideResult {
    cplx R;  // generalized reflection at the excitonic face
    cplx T;  // amplitude at the outermost interface per unit amplitude at the face
};

// Walks away from the excitonic layer through regions e+step, e+2*step, ...
SideResult side_coefficients(const LayerStack& s, const PlaneWaveChannel& ch, int step) {
    const int e = static_cast<int>(s.excitonic_region());
    const int last = step > 0 ? static_cast<int>(s.regions()) - 1 : 0;
    std::vector<int> path;
    for (int j = e; j != last + step; j += step) path.push_back(j);

    const std::size_t n = path.size();
    std::vector<cplx> k(n), r(n), t(n), phase2(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        k[i] = normal_wavenumber(s.eps(path[i]), ch.omega, ch.k_par);
        if (i > 0 && i + 1 < n) phase2[i] = std::exp(2.0 * I * k[i] * s.thickness(path[i]));
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        Fresnel f = interface_coefficients(s.eps(path[i]), s.eps(path[i + 1]), ch);
        r[i] = f.r;
        t[i] = f.t;
    }
    // Generalized reflection R~_i at the far face of region path[i].
    std::vector<cplx> R(n, 0.0);
    for (std::size_t i = n - 1; i-- > 0;) {
        cplx rp = R[i + 1] * phase2[i + 1];
        R[i] = (r[i] + rp) / (1.0 + r[i] * rp);
    }
    cplx amp = 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        amp = t[i] * amp / (1.0 + r[i] * R[i + 1] * phase2[i + 1]);
        if (i + 1 < n - 1) amp *= std::exp(I * k[i + 1] * s.thickness(path[i + 1]));
    }
    return {R[0], amp};
}

}  // namespace

cplx cavity_denominator(const LayerStack& stack, const PlaneWaveChannel& ch) {
    cplx k = normal_wavenumber(stack.eps_layer(), ch.omega, ch.k_par);
    SideResult left = side_coefficients(stack, ch, -1);
    SideResult right = side_coefficients(stack, ch, +1);
    return 1.0 - left.R * right.R * std::exp(2.0 * I * k * stack.d());
}

GeneralizedRT generalized_rt(const LayerStack& stack, const PlaneWaveChannel& ch) {
    GeneralizedRT g;
    g.d = stack.d();
    g.k = normal_wavenumber(stack.eps_layer(), ch.omega, ch.k_par);
    g.k_left = normal_wavenumber(stack.left_eps(), ch.omega, ch.k_par);
    g.k_right = normal_wavenumber(stack.right_eps(), ch.omega, ch.k_par);
    g.z_left = stack.z_left();
    g.z_right = stack.z_right();
    SideResult left = side_coefficients(stack, ch, -1);
    SideResult right = side_coefficients(stack, ch, +1);
    g.R_left = left.R;
    g.R_right = right.R;
    g.T_left = left.T;
    g.T_right = right.T;
    cplx den = 1.0 - g.R_left * g.R_right * std::exp(2.0 * I * g.k * g.d);
    if (std::abs(den) < 1e-14)
        throw SingularResonanceError("generalized_rt: 1 - R_L R_R exp(2ikd) vanishes");
    g.M = 1.0 / den;
    return g;
}

std::optional<cplx> find_passive_resonance(const LayerStack& stack, Polarization pol,
                                           double k_par, cplx seed) {
    auto f = [&](cplx w) { return cavity_denominator(stack, PlaneWaveChannel{w, k_par, pol}); };
    cplx w = seed;
    const double h = 1e-5;
    for (int it = 0; it < 100; ++it) {
        cplx fp = (f(w + h) - f(w - h)) / (2.0 * h);
        cplx step = f(w) / fp;
        if (std::abs(step) > 20.0) step *= 20.0 / std::abs(step);
        w -= step;
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return std::nullopt;
        if (std::abs(step) < 1e-10) return w;
    }
    return std::nullopt;
}

PumpField::PumpField(const LayerStack& stack, const PlaneWaveChannel& ch, cplx amplitude)
    : stack_(stack), ch_(ch), excitonic_(stack.excitonic_region()) {
    const std::size_t n = stack.regions();
    k_.resize(n);
    up_.assign(n, 0.0);
    down_.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) k_[j] = normal_wavenumber(stack.eps(j), ch.omega, ch.k_par);
    auto Y = [&](std::size_t j) { return admittance(stack.eps(j), k_[j], ch.pol); };

    up_[n - 1] = 1.0;
    for (std::size_t j = n - 1; j-- > 0;) {
        cplx u = up_[j + 1] + down_[j + 1];
        cplx f = (Y(j + 1) / Y(j)) * (up_[j + 1] - down_[j + 1]);
        cplx P = j == 0 ? cplx(1.0) : std::exp(I * k_[j] * stack.thickness(j));
        up_[j] = 0.5 * (u + f) / P;
        down_[j] = 0.5 * (u - f) * P;
    }
    cplx u_inc = ch.pol == Polarization::V ? amplitude : amplitude * std::sqrt(stack.left_eps());
    cplx scale = u_inc / up_[0];
    for (std::size_t j = 0; j < n; ++j) {
        up_[j] *= scale;
        down_[j] *= scale;
    }
    reflection_ = down_[0] / up_[0];
    transmission_ = up_[n - 1] / up_[0];
    if (ch.pol == Polarization::H)
        transmission_ *= std::sqrt(stack.left_eps() / stack.right_eps());

    Eigen::Vector3cd fa = field_from(excitonic_, up_[excitonic_], 0.0, 0.0);
    Eigen::Vector3cd fb = field_from(excitonic_, 0.0, down_[excitonic_], 0.0);
    a_ = fa;
    b_ = fb;
}

Eigen::Vector3cd PumpField::field_from(std::size_t j, cplx up, cplx down, double zeta) const {
    cplx ef = up * std::exp(I * k_[j] * zeta);
    cplx eb = down * std::exp(-I * k_[j] * zeta);
    Eigen::Vector3cd E = Eigen::Vector3cd::Zero();
    if (ch_.pol == Polarization::V) {
        E(1) = ef + eb;
    } else {
        cplx k0 = units::vacuum_wavenumber(ch_.omega);
        double eps = stack_.eps(j);
        E(0) = k_[j] / (k0 * eps) * (ef - eb);
        E(2) = -ch_.k_par / (k0 * eps) * (ef + eb);
    }
    return E;
}

Eigen::Vector3cd PumpField::E(double z) const {
    std::size_t j = stack_.region_of(z);
    double zref = j == 0 ? stack_.z_left() : stack_.interface(j - 1);
    return field_from(j, up_[j], down_[j], z - zref);
}

double quarter_wave_thickness(double index, double design_energy) {
    double lambda = 2.0 * units::pi * units::hbar_c / design_energy;
    return lambda / (4.0 * index);
}

LayerStack build_dbr_cavity(double d, const DbrOptions& opt) {
    if (opt.periods_left < 0 || opt.periods_right < 0)
        throw ConfigurationError("dbr: periods must be >= 0");
    PassiveMaterial lo = pbf2(), hi = pbbr2();
    Layer L{quarter_wave_thickness(lo.index, opt.design_energy), lo.eps(), false, lo.name};
    Layer H{quarter_wave_thickness(hi.index, opt.design_energy), hi.eps(), false, hi.name};
    const Layer& inner = opt.high_index_adjacent ? H : L;
    const Layer& outer = opt.high_index_adjacent ? L : H;

    std::vector<Layer> layers;
    for (int p = 0; p < opt.periods_left; ++p) {
        layers.push_back(outer);
        layers.push_back(inner);
    }
    bool spacer = opt.spacer_thickness > 0;
    Layer sp{opt.spacer_thickness, opt.spacer_eps, false, "spacer"};
    if (spacer && opt.periods_left > 0) layers.push_back(sp);
    layers.push_back(Layer{d, opt.eps_bg, true, "excitonic"});
    if (spacer && opt.periods_right > 0) layers.push_back(sp);
    for (int p = 0; p < opt.periods_right; ++p) {
        layers.push_back(inner);
        layers.push_back(outer);
    }
    return LayerStack(opt.outside_eps, std::move(layers), opt.outside_eps);
}

LayerStack build_dbr_cavity(double d, int periods_left, int periods_right, double design_energy) {
    DbrOptions opt;
    opt.periods_left = periods_left;
    opt.periods_right = periods_right;
    opt.design_energy = design_energy;
    return build_dbr_cavity(d, opt);
}

}  // namespace rhps
