#include "rhps/rhps.hpp"

#include <algorithm>
#include <cmath>

#include "rhps/errors.hpp"

namespace rhps {

namespace {
constexpr cplx I{0.0, 1.0};
}

std::string to_string(Side s) { return s == Side::Left ? "left" : "right"; }

std::string to_string(DetectorBasis p) {
    switch (p) {
        case DetectorBasis::H: return "H";
        case DetectorBasis::V: return "V";
        case DetectorBasis::L: return "L";
        case DetectorBasis::R: return "R";
    }
    return "?";
}

Side side_from_string(const std::string& s) {
    if (s == "left" || s == "backward") return Side::Left;
    if (s == "right" || s == "forward") return Side::Right;
    throw ConfigurationError("unknown side: " + s);
}

DetectorBasis detector_from_string(const std::string& s) {
    if (s == "H") return DetectorBasis::H;
    if (s == "V") return DetectorBasis::V;
    if (s == "L") return DetectorBasis::L;
    if (s == "R") return DetectorBasis::R;
    throw ConfigurationError("unknown detector basis: " + s);
}

// ---------------------------------------------------------------------------

namespace {
// int_0^d sin(q_n z) cos(p pi z / d) dz for p = 0..pmax
Eigen::MatrixXd sine_cosine_table(double d, const std::vector<int>& ns, int pmax) {
    Eigen::MatrixXd s(ns.size(), pmax + 1);
    for (std::size_t r = 0; r < ns.size(); ++r)
        for (int p = 0; p <= pmax; ++p) s(r, p) = integrals::sine_cosine(d, ns[r], p);
    return s;
}

// sum_{m,m'} u_m v_m' int sin_n sin_m sin_m' for every n, through the cosine
// expansion sin_m sin_m' = (cos_{m-m'} - cos_{m+m'})/2.
int triple_pmax(const std::vector<int>& modes) {
    return 2 * (modes.empty() ? 0 : *std::max_element(modes.begin(), modes.end()));
}

Eigen::VectorXcd triple_projection(const std::vector<int>& modes, const Eigen::MatrixXcd& table,
                                   const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
    const int n = static_cast<int>(modes.size());
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(table.cols());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx w = 0.5 * u(i) * v(j);
            c(std::abs(modes[i] - modes[j])) += w;
            c(modes[i] + modes[j]) -= w;
        }
    return table * c;
}

Eigen::MatrixXcd triple_table(const ExcitonBasis& basis, const BiexcitonBasis& bx) {
    return sine_cosine_table(basis.d, bx.modes, triple_pmax(basis.modes)).cast<cplx>();
}

BiexcitonAmplitude biexciton_amplitude_from(const MaterialParams& p, const ExcitonBasis& basis,
                                            const BiexcitonBasis& bx, const LinearAmplitudes& lin,
                                            const Eigen::MatrixXcd& table) {
    const int n = basis.size();
    if (lin.b.size() != 3 * n) throw ConfigurationError("biexciton amplitude: basis size mismatch");
    if (std::abs(bx.k_par - 2.0 * lin.k_par) > 1e-15 * std::max(1.0, std::abs(bx.k_par)))
        throw ConfigurationError("biexciton amplitude: biexciton basis must sit at 2 k_in");
    const double f = std::sqrt(p.biexciton.volume);
    const double norm = std::pow(2.0 / basis.d, 1.5);
    Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(bx.size());
    for (int c = 0; c < 3; ++c) {
        Eigen::VectorXcd b = lin.b.segment(c * n, n);
        if (b.squaredNorm() == 0.0) continue;
        Eigen::VectorXcd u(n);
        for (int i = 0; i < n; ++i) u(i) = (basis.energies[i] - lin.omega.real()) * b(i);
        sum += triple_projection(basis.modes, table, u, b);
    }
    BiexcitonAmplitude out;
    out.omega_in = lin.omega.real();
    out.k_in = lin.k_par;
    out.basis = bx;
    out.B.resize(bx.size());
    for (int k = 0; k < bx.size(); ++k)
        out.B(k) = f * norm * sum(k) /
                   (bx.energies[k] - 2.0 * out.omega_in - I * p.biexciton.gamma / 2.0);
    return out;
}
}  // namespace

BiexcitonAmplitude biexciton_amplitude(const MaterialParams& p, const ExcitonBasis& basis,
                                       const BiexcitonBasis& bx, const LinearAmplitudes& lin) {
    if (lin.b.size() != 3 * basis.size()) throw ConfigurationError("biexciton amplitude: basis size mismatch");
    return biexciton_amplitude_from(p, basis, bx, lin, triple_table(basis, bx));
}

Eigen::MatrixXcd nonlinear_coupling(const MaterialParams& p, const BiexcitonAmplitude& bx,
                                    const ExcitonBasis& photon, const ExcitonBasis& partner) {
    if (photon.modes != partner.modes || photon.d != bx.basis.d)
        throw ConfigurationError("coupling: photon and partner bases must share the mode set");
    const int n = photon.size();
    const int pmax = 2 * photon.modes.back();
    Eigen::MatrixXd s = sine_cosine_table(photon.d, bx.basis.modes, pmax);
    Eigen::VectorXcd omega_b(bx.basis.size());
    for (int k = 0; k < bx.basis.size(); ++k) omega_b(k) = bx.basis.energies[k] * bx.B(k);
    // g_p = sum_n B_n int sin_n cos_p, h_p likewise weighted by Omega_n.
    Eigen::RowVectorXcd g = bx.B.transpose() * s.cast<cplx>();
    Eigen::RowVectorXcd h = omega_b.transpose() * s.cast<cplx>();
    const double pre = std::sqrt(p.biexciton.volume) * std::pow(2.0 / photon.d, 1.5);
    Eigen::MatrixXcd k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int a = std::abs(photon.modes[i] - photon.modes[j]);
            const int b = photon.modes[i] + photon.modes[j];
            const cplx mg = 0.5 * (g(a) - g(b)), mh = 0.5 * (h(a) - h(b));
            k(i, j) = pre * ((photon.energies[i] + partner.energies[j]) * mg - mh);
        }
    return k;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXcd radiation_kernel(const ResponseKernel& kernel, Side side) {
    const LayeredGreens& g = kernel.greens();
    const LayerStack& stack = g.stack();
    const ExcitonBasis& basis = kernel.basis();
    const ExcitonParams& ex = kernel.params();
    const int n = basis.size();
    const double d = basis.d, kp = basis.k_par;
    const cplx omega = kernel.omega();
    const cplx w = omega / units::hbar_c;
    const cplx p = ex.eps_bg * ex.delta_LT * w * w * std::sqrt(2.0 / d);
    const cplx k = kernel.k();
    const cplx pre = I / (2.0 * k);
    const cplx k0 = units::vacuum_wavenumber(omega);
    const cplx e1 = std::exp(I * k * d), e2 = e1 * e1;
    const Eigen::VectorXcd& ik = kernel.sine_exp_plus();
    const Eigen::VectorXcd& imk = kernel.sine_exp_minus();

    const GeneralizedRT& v = g.rt(Polarization::V);
    const GeneralizedRT& h = g.rt(Polarization::H);
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(3, 3 * n);
    const bool right = side == Side::Right;
    const double eps_j = right ? stack.right_eps() : stack.left_eps();
    const cplx base = pre / (std::sqrt(stack.eps_layer() * eps_j) * k0 * k0) *
                      (right ? h.T_right : h.T_left) * h.M;
    const cplx dz = right ? I * h.k_right : -I * h.k_left;
    const cplx vpre = pre * (right ? v.T_right : v.T_left) * v.M;
    for (int i = 0; i < n; ++i) {
        cplx bv, bh, dbh;
        if (right) {
            bv = e1 * (imk(i) + v.R_left * ik(i));
            bh = e1 * (imk(i) + h.R_left * ik(i));
            dbh = e1 * I * k * (-imk(i) + h.R_left * ik(i));
        } else {
            bv = ik(i) + v.R_right * e2 * imk(i);
            bh = ik(i) + h.R_right * e2 * imk(i);
            dbh = I * k * (ik(i) - h.R_right * e2 * imk(i));
        }
        e(Y, Y * n + i) = p * vpre * bv;
        e(X, X * n + i) = p * base * dz * dbh;
        e(X, Z * n + i) = p * base * I * kp * dz * bh;
        e(Z, X * n + i) = p * base * (-I * kp) * dbh;
        e(Z, Z * n + i) = p * base * kp * kp * bh;
    }
    return e;
}

Eigen::Vector3cd detector_vector(const LayerStack& stack, double omega, double k_par, Side side,
                                 DetectorBasis p) {
    const double eps = side == Side::Right ? stack.right_eps() : stack.left_eps();
    const double k0 = omega / units::hbar_c;
    const double kz2 = eps * k0 * k0 - k_par * k_par;
    if (!(kz2 > 0)) throw NoFarFieldError("detector: channel is evanescent in the end medium");
    const double kz = std::sqrt(kz2), kk = std::sqrt(eps) * k0;
    const Eigen::Vector3cd ev(0.0, 1.0, 0.0);
    const Eigen::Vector3cd eh = side == Side::Right ? Eigen::Vector3cd(kz / kk, 0.0, -k_par / kk)
                                                    : Eigen::Vector3cd(kz / kk, 0.0, k_par / kk);
    switch (p) {
        case DetectorBasis::H: return eh;
        case DetectorBasis::V: return ev;
        case DetectorBasis::L: return (eh + I * ev) / std::sqrt(2.0);
        case DetectorBasis::R: return (eh - I * ev) / std::sqrt(2.0);
    }
    return ev;
}

double project_intensity(const Eigen::Matrix3cd& t, const Eigen::Vector3cd& e) {
    return (e.transpose() * t * e.conjugate()).value().real();
}

cplx project_pair(const Eigen::Matrix3cd& t, const Eigen::Vector3cd& e1, const Eigen::Vector3cd& e2) {
    return (e1.adjoint() * t * e2.conjugate()).value();
}

// ---------------------------------------------------------------------------

namespace {
double population(const BiexcitonAmplitude& b, std::optional<int> target) {
    if (!target) return b.B.squaredNorm();
    for (int k = 0; k < b.basis.size(); ++k)
        if (b.basis.modes[k] == *target) return std::norm(b.B(k));
    throw ConfigurationError("tune_pump: target biexciton index outside the basis");
}
}  // namespace

double tune_pump(const LayerStack& stack, const MaterialParams& p, const PumpSpec& pump,
                 const ModelOptions& opt, const PumpTuning& tuning) {
    const ExcitonParams& ex = p.exciton;
    const double d = stack.d();
    ExcitonBasis basis = truncate_basis(ex, d, pump.k_par, opt.e_cut);
    BiexcitonBasis bx = truncate_biexciton_basis(
        p, d, 2.0 * pump.k_par, opt.e_cut_biexciton > 0 ? opt.e_cut_biexciton : opt.e_cut);
    const Eigen::MatrixXcd table = triple_table(basis, bx);

    auto objective = [&](double w) {
        PumpSpec ps = pump;
        ps.omega = w;
        LinearResponse r(stack, basis, ex, w, opt.solver);
        return population(biexciton_amplitude_from(p, basis, bx, linear_amplitudes(r, stack, ps), table),
                          tuning.target_n);
    };

    const double K = 2.0 * pump.k_par;
    const double centre =
        0.5 * (2.0 * ex.omega_T - p.biexciton.binding + p.biexciton.kinetic_coefficient() * K * K);
    std::vector<double> candidates;
    for (int k = 0; k < bx.size(); ++k) {
        const double half = 0.5 * bx.energies[k];
        if (tuning.target_n ? bx.modes[k] == *tuning.target_n : std::abs(half - centre) <= tuning.window)
            candidates.push_back(half);
    }
    if (candidates.empty())
        throw ConfigurationError("tune_pump: no biexciton level inside the tuning window");

    double best = candidates.front(), best_val = -1;
    for (double c : candidates) {
        double v = objective(c);
        if (v > best_val) {
            best_val = v;
            best = c;
        }
    }
    if (!(best_val > 0) || !std::isfinite(best_val))
        throw ConfigurationError("tune_pump: pump does not populate any biexciton level");

    // Golden-section refinement within one damping width.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best - p.biexciton.gamma, b = best + p.biexciton.gamma;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    while (b - a > tuning.tolerance) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = objective(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = objective(x1);
        }
    }
    const double refined = 0.5 * (a + b);
    return objective(refined) >= best_val ? refined : best;
}

// ---------------------------------------------------------------------------

RhpsModel::RhpsModel(LayerStack stack, MaterialParams params, PumpSpec pump, ModelOptions opt)
    : stack_(std::move(stack)), params_(params), pump_(pump), opt_(opt) {
    params_.validate();
    if (stack_.eps_layer() != params_.exciton.eps_bg)
        throw ConfigurationError("model: excitonic layer eps must equal eps_bg");
    pump_basis_ = basis_at(pump_.k_par);
    BiexcitonBasis bx = truncate_biexciton_basis(
        params_, stack_.d(), 2.0 * pump_.k_par, opt_.e_cut_biexciton > 0 ? opt_.e_cut_biexciton : opt_.e_cut);
    LinearResponse r(stack_, pump_basis_, params_.exciton, pump_.omega, opt_.solver);
    bx_ = biexciton_amplitude(params_, pump_basis_, bx, linear_amplitudes(r, stack_, pump_));
}

ExcitonBasis RhpsModel::basis_at(double k_par) const {
    return truncate_basis(params_.exciton, stack_.d(), k_par, opt_.e_cut);
}

Eigen::MatrixXcd RhpsModel::coupling(double k_photon) const {
    return nonlinear_coupling(params_, bx_, basis_at(k_photon), basis_at(2.0 * pump_.k_par - k_photon));
}

namespace {
Eigen::VectorXcd apply_blockwise_transpose(const Eigen::MatrixXcd& k, const Eigen::VectorXcd& u) {
    const Eigen::Index n = k.rows();
    Eigen::VectorXcd v(3 * n);
    for (int c = 0; c < 3; ++c) v.segment(c * n, n) = k.transpose() * u.segment(c * n, n);
    return v;
}
const cplx two_pi_i = 2.0 * units::pi * I;
}  // namespace

Eigen::Matrix3cd RhpsModel::singles_tensor(double omega, double k_par, Side side) const {
    const ExcitonParams& ex = params_.exciton;
    LinearResponse r1(stack_, basis_at(k_par), ex, omega, opt_.solver);
    Eigen::MatrixXcd e = radiation_kernel(r1.kernel(), side);
    Eigen::MatrixXcd k = coupling(k_par);
    LinearResponse r2(stack_, basis_at(2.0 * pump_.k_par - k_par), ex, 2.0 * pump_.omega - omega,
                      opt_.solver);
    std::array<Eigen::VectorXcd, 3> v, x;
    for (int a = 0; a < 3; ++a) {
        v[a] = apply_blockwise_transpose(k, r1.apply_w_transpose(e.row(a).transpose()));
        x[a] = r2.apply_w(v[a]);
    }
    Eigen::Matrix3cd t;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) t(a, b) = (v[a].dot(x[b]) - x[a].dot(v[b])) / two_pi_i;
    return t;
}

Eigen::Matrix3cd RhpsModel::pair_amplitude(double omega, double k_par1, Side side1, Side side2) const {
    const ExcitonParams& ex = params_.exciton;
    const double omega2 = 2.0 * pump_.omega - omega, k_par2 = 2.0 * pump_.k_par - k_par1;
    LinearResponse r2(stack_, basis_at(k_par2), ex, omega2, opt_.solver);
    Eigen::MatrixXcd e2 = radiation_kernel(r2.kernel(), side2);
    Eigen::MatrixXcd k = coupling(k_par2);
    LinearResponse r1(stack_, basis_at(k_par1), ex, omega, opt_.solver);
    Eigen::MatrixXcd e1 = radiation_kernel(r1.kernel(), side1);
    Eigen::Matrix3cd t;
    for (int b = 0; b < 3; ++b) {
        Eigen::VectorXcd v = apply_blockwise_transpose(k, r2.apply_w_transpose(e2.row(b).transpose()));
        Eigen::VectorXcd y = r1.apply_w(v);
        t.col(b) = e1 * y / two_pi_i;
    }
    return t;
}

double RhpsModel::one_photon_intensity(double omega, double k_par, Side side, DetectorBasis p,
                                       double dw) const {
    Eigen::Vector3cd e = detector_vector(stack_, omega, k_par, side, p);
    return dw * project_intensity(singles_tensor(omega, k_par, side), e);
}

double RhpsModel::coincidence_signal(double omega, double k_par1, Side side1, DetectorBasis p1,
                                     Side side2, DetectorBasis p2, double dw) const {
    const double omega2 = 2.0 * pump_.omega - omega, k_par2 = 2.0 * pump_.k_par - k_par1;
    Eigen::Vector3cd e1 = detector_vector(stack_, omega, k_par1, side1, p1);
    Eigen::Vector3cd e2 = detector_vector(stack_, omega2, k_par2, side2, p2);
    return dw * dw * std::norm(project_pair(pair_amplitude(omega, k_par1, side1, side2), e1, e2));
}

double RhpsModel::coincidence_noise(double omega1, double k_par1, Side side1, DetectorBasis p1,
                                    double omega2, double k_par2, Side side2, DetectorBasis p2,
                                    double dw) const {
    return one_photon_intensity(omega1, k_par1, side1, p1, dw) *
           one_photon_intensity(omega2, k_par2, side2, p2, dw);
}

double performance(double signal, double noise, double alpha) {
    if (!(noise > 0)) throw UndefinedPerformanceError("performance: accidental coincidences vanish");
    if (!(alpha > 0)) throw ConfigurationError("performance: alpha must be positive");
    return signal * signal / (alpha * noise);
}

}  // namespace rhps
