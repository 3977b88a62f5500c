#include "rhps/linear_response.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rhps/errors.hpp"

namespace rhps {

namespace {
constexpr cplx I{0.0, 1.0};

double parity(int m) { return (m % 2 == 0) ? 1.0 : -1.0; }

cplx lu_log_det(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu) {
    cplx s = 0.0;
    const auto& m = lu.matrixLU();
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += std::log(m(i, i));
    if (lu.permutationP().determinant() < 0) s += I * units::pi;
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------

ResponseKernel::ResponseKernel(const LayerStack& stack, const ExcitonBasis& basis,
                               const ExcitonParams& ex, cplx omega)
    : basis_(basis), ex_(ex), omega_(omega), greens_(stack, omega, basis.k_par) {
    if (std::abs(stack.d() - basis.d) > 1e-9 * basis.d)
        throw ConfigurationError("response: basis thickness does not match the stack");
    if (stack.eps_layer() != ex.eps_bg)
        throw ConfigurationError("response: excitonic layer eps must equal eps_bg");
    n_ = basis.size();
    d_ = basis.d;
    k_ = greens_.k();
    k0sq_ = greens_.k0_sq();
    e1_ = std::exp(I * k_ * d_);
    const cplx w = omega / units::hbar_c;
    const cplx p = ex.eps_bg * ex.delta_LT * w * w;
    lambda_v_ = -p * (2.0 / d_) * I / (2.0 * k_);
    lambda_h_ = lambda_v_ / k0sq_;
    img_v_ = greens_.images(Polarization::V);
    img_h_ = greens_.images(Polarization::H);
    ik_.resize(n_);
    imk_.resize(n_);
    q_.resize(n_);
    pole_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        q_[i] = basis.q(i);
        ik_(i) = integrals::sine_exp(d_, basis.modes[i], k_);
        imk_(i) = integrals::sine_exp(d_, basis.modes[i], -k_);
        pole_[i] = integrals::near_pole(k_, q_[i]);
    }
}

cplx ResponseKernel::direct(int i, int j) const {
    auto row = [&](int r, int c) {
        const double q = q_[r];
        const cplx den = k_ * k_ - q * q;
        cplx v = -q * ik_(c) + q * parity(basis_.modes[r]) * e1_ * imk_(c);
        if (r == c) v += I * k_ * d_;
        return v / den;
    };
    if (!pole_[i]) return row(i, j);
    if (!pole_[j]) return row(j, i);
    return integrals::direct(d_, basis_.modes[i], basis_.modes[j], k_);
}

cplx ResponseKernel::direct_sign(int i, int j) const {
    if (pole_[j]) return integrals::direct_sign(d_, basis_.modes[i], basis_.modes[j], k_);
    const double qp = q_[j];
    const double c = integrals::sine_cosine(d_, basis_.modes[i], basis_.modes[j]);
    return qp * (2.0 * c - ik_(i) - parity(basis_.modes[j]) * e1_ * imk_(i)) / (k_ * k_ - qp * qp);
}

std::array<cplx, 4> ResponseKernel::weights(int a, int b) const {
    const cplx kk = k_ * k_;
    const cplx kp = k_ * basis_.k_par;
    std::array<cplx, 4> w{};
    const auto& img = img_h_;
    for (int t = 0; t < 4; ++t) {
        const double s1 = img[t].s1, s2 = img[t].s2;
        if (a == X && b == X) w[t] = -s1 * s2 * kk;
        else if (a == X && b == Z) w[t] = -s1 * kp;
        else if (a == Z && b == X) w[t] = s2 * kp;
        else if (a == Z && b == Z) w[t] = basis_.k_par * basis_.k_par;
        else w[t] = 1.0;
    }
    return w;
}

cplx ResponseKernel::element(int a, int b, int i, int j) const {
    const bool va = a == Y, vb = b == Y;
    if (va != vb) return 0.0;
    const cplx diag = (i == j) ? cplx(basis_.energies[i]) - omega_ - I * ex_.gamma / 2.0 : cplx(0.0);
    auto img_sum = [&](const std::array<ImageTerm, 4>& img, const std::array<cplx, 4>& w) {
        cplx s = 0.0;
        for (int t = 0; t < 4; ++t) {
            cplx fi = img[t].s1 > 0 ? ik_(i) : imk_(i);
            cplx fj = img[t].s2 > 0 ? ik_(j) : imk_(j);
            s += w[t] * img[t].coef * fi * fj;
        }
        return s;
    };
    if (va) return diag + lambda_v_ * (direct(i, j) + img_sum(img_v_, weights(Y, Y)));

    const double kp = basis_.k_par;
    const auto w = weights(a, b);
    if (a == X && b == X) return diag + lambda_h_ * (k_ * k_ * direct(i, j) + img_sum(img_h_, w));
    if (a == Z && b == Z) {
        cplx v = diag + ((i == j) ? cplx(ex_.delta_LT) : cplx(0.0));
        if (kp != 0.0) v += lambda_h_ * (kp * kp * direct(i, j) + img_sum(img_h_, w));
        return v;
    }
    if (kp == 0.0) return 0.0;
    return lambda_h_ * (-k_ * kp * direct_sign(i, j) + img_sum(img_h_, w));
}

Eigen::MatrixXcd ResponseKernel::block_v() const {
    Eigen::MatrixXcd a(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) a(i, j) = element(Y, Y, i, j);
    return a;
}

Eigen::MatrixXcd ResponseKernel::block_h() const {
    Eigen::MatrixXcd a(2 * n_, 2 * n_);
    const int comps[2] = {X, Z};
    for (int ca = 0; ca < 2; ++ca)
        for (int cb = 0; cb < 2; ++cb)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    a(ca * n_ + i, cb * n_ + j) = element(comps[ca], comps[cb], i, j);
    return a;
}

ResponseKernel::Separable ResponseKernel::separable(int component) const {
    if (component == Z || (component == X && basis_.k_par != 0.0))
        throw ConfigurationError("response: separable form only exists for y, or x at k_par = 0");
    const bool v = component == Y;
    const cplx lam = v ? lambda_v_ : lambda_h_;
    const cplx wd = v ? cplx(1.0) : k_ * k_;
    const auto w = weights(component, component);
    const auto& img = v ? img_v_ : img_h_;

    Separable s;
    s.D.resize(n_);
    s.L.resize(n_, 4);
    s.R.resize(n_, 2);
    for (int i = 0; i < n_; ++i) {
        const double q = q_[i];
        const cplx den = k_ * k_ - q * q;
        s.D(i) = cplx(basis_.energies[i]) - omega_ - I * ex_.gamma / 2.0 +
                 (pole_[i] ? cplx(0.0) : lam * wd * I * k_ * d_ / den);
        s.L(i, 0) = pole_[i] ? cplx(0.0) : -q / den;
        s.L(i, 1) = pole_[i] ? cplx(0.0) : q * parity(basis_.modes[i]) * e1_ / den;
        s.L(i, 2) = ik_(i);
        s.L(i, 3) = imk_(i);
        s.R(i, 0) = ik_(i);
        s.R(i, 1) = imk_(i);
    }
    // Image order: (+,+), (+,-), (-,-), (-,+).
    s.C.setZero();
    s.C(0, 0) = lam * wd;
    s.C(1, 1) = lam * wd;
    s.C(2, 0) = lam * w[0] * img[0].coef;
    s.C(2, 1) = lam * w[1] * img[1].coef;
    s.C(3, 1) = lam * w[2] * img[2].coef;
    s.C(3, 0) = lam * w[3] * img[3].coef;
    return s;
}

ResponseMatrix assemble_a(const LayerStack& stack, const ExcitonBasis& basis,
                          const ExcitonParams& ex, cplx omega) {
    ResponseKernel kernel(stack, basis, ex, omega);
    ResponseMatrix a;
    a.omega = omega;
    a.k_par = basis.k_par;
    a.v = kernel.block_v();
    a.h = kernel.block_h();
    return a;
}

namespace {
Eigen::MatrixXcd checked_inverse(const Eigen::MatrixXcd& a, double& condition, bool& near_singular) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    Eigen::MatrixXcd w = lu.inverse();
    double na = a.cwiseAbs().colwise().sum().maxCoeff();
    double nw = w.cwiseAbs().colwise().sum().maxCoeff();
    condition = na * nw;
    if (!std::isfinite(condition) || condition > 1e12) near_singular = true;
    return w;
}
}  // namespace

ResponseMatrix invert_a(const ResponseMatrix& a) {
    ResponseMatrix w;
    w.omega = a.omega;
    w.k_par = a.k_par;
    w.v = checked_inverse(a.v, w.condition_v, w.near_singular);
    w.h = checked_inverse(a.h, w.condition_h, w.near_singular);
    return w;
}

// ---------------------------------------------------------------------------

DenseSolver::DenseSolver(Eigen::MatrixXcd a) : lu_(std::move(a)) {}

cplx DenseSolver::log_det() const { return lu_log_det(lu_); }

cplx DiagonalSolver::log_det() const {
    cplx s = 0.0;
    for (Eigen::Index i = 0; i < d_.size(); ++i) s += std::log(d_(i));
    return s;
}

BlockSolver::BlockSolver(std::unique_ptr<SectorSolver> a, std::unique_ptr<SectorSolver> b)
    : a_(std::move(a)), b_(std::move(b)) {}

Eigen::VectorXcd BlockSolver::solve(const Eigen::VectorXcd& b) const {
    Eigen::VectorXcd x(size());
    x.head(a_->size()) = a_->solve(b.head(a_->size()));
    x.tail(b_->size()) = b_->solve(b.tail(b_->size()));
    return x;
}

Eigen::VectorXcd BlockSolver::solve_transpose(const Eigen::VectorXcd& b) const {
    Eigen::VectorXcd x(size());
    x.head(a_->size()) = a_->solve_transpose(b.head(a_->size()));
    x.tail(b_->size()) = b_->solve_transpose(b.tail(b_->size()));
    return x;
}

SeparableSolver::SeparableSolver(const ResponseKernel& kernel, int component,
                                 const std::vector<int>& extra_special)
    : n_(kernel.size()), s_(kernel.separable(component)) {
    is_special_.assign(n_, false);
    double scale = std::max(1.0, s_.D.cwiseAbs().mean());
    for (int i = 0; i < n_; ++i)
        if (kernel.pole(i) || std::abs(s_.D(i)) < 1e-3 * scale) is_special_[i] = true;
    for (int i : extra_special)
        if (i >= 0 && i < n_) is_special_[i] = true;
    for (int i = 0; i < n_; ++i)
        if (is_special_[i]) special_.push_back(i);

    dinv_ = Eigen::VectorXcd::Zero(n_);
    Eigen::MatrixXcd u = s_.L * s_.C;
    Eigen::MatrixXcd r = s_.R;
    for (int i = 0; i < n_; ++i) {
        if (is_special_[i]) {
            u.row(i).setZero();
            r.row(i).setZero();
        } else {
            dinv_(i) = 1.0 / s_.D(i);
        }
    }
    s_.R = r;
    y_ = dinv_.asDiagonal() * u;
    Eigen::Matrix2cd cap = Eigen::Matrix2cd::Identity() + r.transpose() * y_;
    cap_.compute(cap);

    logdet_ = std::log(cap.determinant());
    for (int i = 0; i < n_; ++i)
        if (!is_special_[i]) logdet_ += std::log(s_.D(i));

    const int ns = static_cast<int>(special_.size());
    if (ns > 0) {
        ars_ = Eigen::MatrixXcd::Zero(n_, ns);
        Eigen::MatrixXcd ass(ns, ns);
        for (int c = 0; c < ns; ++c) {
            for (int i = 0; i < n_; ++i)
                if (!is_special_[i]) ars_(i, c) = kernel.element(component, component, i, special_[c]);
            for (int r2 = 0; r2 < ns; ++r2)
                ass(r2, c) = kernel.element(component, component, special_[r2], special_[c]);
        }
        ainv_ars_.resize(n_, ns);
        for (int c = 0; c < ns; ++c) ainv_ars_.col(c) = solve_regular(ars_.col(c));
        Eigen::MatrixXcd schur = ass - ars_.transpose() * ainv_ars_;
        schur_.compute(schur);
        logdet_ += lu_log_det(schur_);
    }
}

Eigen::VectorXcd SeparableSolver::solve_regular(const Eigen::VectorXcd& b) const {
    Eigen::VectorXcd db = dinv_.cwiseProduct(b);
    Eigen::Vector2cd t = cap_.solve(s_.R.transpose() * db);
    return db - y_ * t;
}

Eigen::VectorXcd SeparableSolver::solve(const Eigen::VectorXcd& b) const {
    if (special_.empty()) return solve_regular(b);
    const int ns = static_cast<int>(special_.size());
    Eigen::VectorXcd br = b, bs(ns);
    for (int c = 0; c < ns; ++c) {
        bs(c) = b(special_[c]);
        br(special_[c]) = 0.0;
    }
    Eigen::VectorXcd xr0 = solve_regular(br);
    Eigen::VectorXcd xs = schur_.solve(bs - ars_.transpose() * xr0);
    Eigen::VectorXcd x = xr0 - ainv_ars_ * xs;
    for (int c = 0; c < ns; ++c) x(special_[c]) = xs(c);
    return x;
}

std::unique_ptr<SectorSolver> make_sector_solver(const ResponseKernel& kernel, Sector sector,
                                                 SolverKind kind,
                                                 const std::vector<int>& extra_special) {
    if (kind == SolverKind::Dense)
        return std::make_unique<DenseSolver>(sector == Sector::V ? kernel.block_v() : kernel.block_h());
    if (sector == Sector::V) return std::make_unique<SeparableSolver>(kernel, Y, extra_special);
    if (kernel.k_par() != 0.0) return std::make_unique<DenseSolver>(kernel.block_h());
    const int n = kernel.size();
    Eigen::VectorXcd zz(n);
    for (int i = 0; i < n; ++i) zz(i) = kernel.element(Z, Z, i, i);
    return std::make_unique<BlockSolver>(std::make_unique<SeparableSolver>(kernel, X, extra_special),
                                         std::make_unique<DiagonalSolver>(zz));
}

LinearResponse::LinearResponse(const LayerStack& stack, const ExcitonBasis& basis,
                               const ExcitonParams& ex, cplx omega, SolverKind kind)
    : kernel_(stack, basis, ex, omega),
      v_(make_sector_solver(kernel_, Sector::V, kind)),
      h_(make_sector_solver(kernel_, Sector::H, kind)) {}

namespace {
template <class F>
Eigen::VectorXcd apply_blocks(int n, const Eigen::VectorXcd& b, F&& f) {
    Eigen::VectorXcd xz(2 * n);
    xz.head(n) = b.segment(0, n);
    xz.tail(n) = b.segment(2 * n, n);
    Eigen::VectorXcd y = b.segment(n, n);
    auto [ry, rxz] = f(y, xz);
    Eigen::VectorXcd out(3 * n);
    out.segment(0, n) = rxz.head(n);
    out.segment(n, n) = ry;
    out.segment(2 * n, n) = rxz.tail(n);
    return out;
}
}  // namespace

Eigen::VectorXcd LinearResponse::apply_w(const Eigen::VectorXcd& b) const {
    return apply_blocks(size(), b, [&](const Eigen::VectorXcd& y, const Eigen::VectorXcd& xz) {
        return std::make_pair(v_->solve(y), h_->solve(xz));
    });
}

Eigen::VectorXcd LinearResponse::apply_w_transpose(const Eigen::VectorXcd& b) const {
    return apply_blocks(size(), b, [&](const Eigen::VectorXcd& y, const Eigen::VectorXcd& xz) {
        return std::make_pair(v_->solve_transpose(y), h_->solve_transpose(xz));
    });
}

// ---------------------------------------------------------------------------

std::vector<cplx> bulk_polariton_energies(const ExcitonParams& ex, double q, double k_par) {
    const double K2 = q * q + k_par * k_par;
    const double s = ex.omega_T;
    const double b = ex.eps_bg / (units::hbar_c * units::hbar_c);
    std::vector<cplx> out;
    for (double shift : {0.0, ex.delta_LT}) {
        const cplx a = ex.omega_T + shift + ex.kinetic_coefficient() * K2 - I * ex.gamma / 2.0;
        if (shift != 0.0) {
            out.push_back(a);
            continue;
        }
        // b w^3 - (a b + Delta b) w^2 - K^2 w + a K^2 = 0 in units of s.
        const cplx c3 = b * s * s * s;
        const cplx c2 = -(a * b + ex.delta_LT * b) * s * s;
        const cplx c1 = -K2 * s;
        const cplx c0 = a * K2;
        Eigen::Matrix3cd comp = Eigen::Matrix3cd::Zero();
        comp(1, 0) = 1.0;
        comp(2, 1) = 1.0;
        comp(0, 2) = -c0 / c3;
        comp(1, 2) = -c1 / c3;
        comp(2, 2) = -c2 / c3;
        Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(comp);
        for (int r = 0; r < 3; ++r) {
            cplx x = es.eigenvalues()(r);
            for (int it = 0; it < 8; ++it) {
                cplx f = ((c3 * x + c2) * x + c1) * x + c0;
                cplx df = (3.0 * c3 * x + 2.0 * c2) * x + c1;
                if (df == 0.0) break;
                x -= f / df;
            }
            if (x.real() > 0) out.push_back(x * s);
        }
    }
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    return out;
}

namespace {
struct LogDet {
    const LayerStack& stack;
    const ExcitonBasis& basis;
    const ExcitonParams& ex;
    Sector sector;

    cplx operator()(cplx w) const {
        ResponseKernel k(stack, basis, ex, w);
        return make_sector_solver(k, sector)->log_det();
    }
};

cplx wrap(cplx dlog) {
    double im = std::remainder(dlog.imag(), 2.0 * units::pi);
    return {dlog.real(), im};
}

int argmax_abs(const Eigen::VectorXcd& v) {
    Eigen::Index i;
    v.cwiseAbs().maxCoeff(&i);
    return static_cast<int>(i);
}
}  // namespace

std::vector<CoupledMode> find_coupled_modes(const LayerStack& stack, const ExcitonBasis& basis,
                                            const ExcitonParams& ex, Sector sector,
                                            const ModeSearch& search) {
    if (!(search.omega_max > search.omega_min))
        throw ConfigurationError("modes: empty search window");
    const double centre = 0.5 * (search.omega_min + search.omega_max);
    const double span = search.omega_max - search.omega_min;

    std::vector<cplx> seeds = search.extra_seeds;
    for (int i = 0; i < basis.size(); ++i) {
        for (cplx w : bulk_polariton_energies(ex, basis.q(i), basis.k_par)) seeds.push_back(w);
        seeds.push_back(cplx(basis.energies[i], -ex.gamma / 2.0));
    }
    const Polarization pol = sector;
    for (int s = 0; s <= 8; ++s) {
        const double w0 = search.omega_min + span * s / 8.0;
        try {
            if (auto r = find_passive_resonance(stack, pol, basis.k_par, cplx(w0, -0.1 * span)))
                seeds.push_back(*r);
        } catch (const std::exception&) {
        }
    }
    seeds.erase(std::remove_if(seeds.begin(), seeds.end(),
                               [&](cplx w) {
                                   return w.real() < search.omega_min - 0.25 * span ||
                                          w.real() > search.omega_max + 0.25 * span;
                               }),
                seeds.end());
    std::sort(seeds.begin(), seeds.end(), [&](cplx a, cplx b) {
        return std::abs(a.real() - centre) < std::abs(b.real() - centre);
    });
    if (seeds.size() > search.max_seeds) seeds.resize(search.max_seeds);

    LogDet logdet{stack, basis, ex, sector};
    std::vector<CoupledMode> modes;
    for (cplx w : seeds) {
        bool converged = false;
        double h = 1e-4;
        for (int it = 0; it < search.max_iterations; ++it) {
            cplx g;
            try {
                g = wrap(logdet(w + h) - logdet(w - h)) / (2.0 * h);
            } catch (const SingularResonanceError&) {
                break;
            }
            if (!std::isfinite(g.real()) || !std::isfinite(g.imag()) || g == 0.0) break;
            cplx step = -1.0 / g;
            if (std::abs(step) > 0.5 * span) step *= 0.5 * span / std::abs(step);
            w += step;
            if (std::abs(step) < search.tolerance) {
                converged = true;
                break;
            }
            // Once within h of a root the difference quotient straddles it; shrinking h
            // with the step keeps the error below the step size.
            h = std::clamp(1e-3 * std::abs(step), 1e-12, 1e-4);
        }
        if (!converged || w.real() < search.omega_min || w.real() > search.omega_max) continue;
        bool dup = std::any_of(modes.begin(), modes.end(),
                               [&](const CoupledMode& m) { return std::abs(m.omega - w) < search.dedupe; });
        if (dup) continue;

        CoupledMode mode;
        mode.omega = w;
        mode.sector = sector;
        mode.k_par = basis.k_par;
        ResponseKernel k(stack, basis, ex, w + cplx(0.0, 1e-7));
        auto solver = make_sector_solver(k, sector);
        const int n = basis.size();
        Eigen::VectorXcd x = solver->solve(Eigen::VectorXcd::Ones(solver->size()));
        int idx = argmax_abs(x);
        if (sector == Sector::V) {
            mode.dominant_component = Y;
            mode.dominant_m = basis.modes[idx];
        } else {
            mode.dominant_component = idx < n ? X : Z;
            mode.dominant_m = basis.modes[idx % n];
        }
        modes.push_back(mode);
    }
    std::sort(modes.begin(), modes.end(),
              [](const CoupledMode& a, const CoupledMode& b) { return a.omega.real() < b.omega.real(); });
    return modes;
}

// ---------------------------------------------------------------------------

Eigen::VectorXcd pump_drive(const LayerStack& stack, const ExcitonBasis& basis, const PumpSpec& pump) {
    PumpField field(stack, PlaneWaveChannel{pump.omega, pump.k_par, pump.pol}, pump.amplitude);
    const Eigen::Vector3cd a = field.forward_components();
    const Eigen::Vector3cd b = field.backward_components();
    const cplx k = field.k_layer();
    const int n = basis.size();
    const double norm = std::sqrt(2.0 / basis.d);
    Eigen::VectorXcd drive(3 * n);
    for (int i = 0; i < n; ++i) {
        const cplx ip = integrals::sine_exp(basis.d, basis.modes[i], k);
        const cplx im = integrals::sine_exp(basis.d, basis.modes[i], -k);
        for (int c = 0; c < 3; ++c) drive(c * n + i) = norm * (a(c) * ip + b(c) * im);
    }
    return drive;
}

LinearAmplitudes linear_amplitudes(const LinearResponse& response, const LayerStack& stack,
                                   const PumpSpec& pump) {
    const ExcitonBasis& basis = response.kernel().basis();
    if (std::abs(response.kernel().omega() - cplx(pump.omega)) > 1e-12 * pump.omega ||
        basis.k_par != pump.k_par)
        throw ConfigurationError("linear amplitudes: response evaluated at a different channel");
    LinearAmplitudes out;
    out.omega = pump.omega;
    out.k_par = pump.k_par;
    out.drive = pump_drive(stack, basis, pump);
    out.b = response.apply_w(out.drive);
    return out;
}

LinearAmplitudes linear_amplitudes(const LayerStack& stack, const ExcitonBasis& basis,
                                   const ExcitonParams& ex, const PumpSpec& pump) {
    if (basis.k_par != pump.k_par)
        throw ConfigurationError("linear amplitudes: basis k_par differs from the pump k_par");
    LinearResponse response(stack, basis, ex, pump.omega);
    return linear_amplitudes(response, stack, pump);
}

}  // namespace rhps
