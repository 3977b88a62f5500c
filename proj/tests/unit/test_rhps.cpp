#include <doctest.h>

#include <cmath>
#include <random>

#include "quadrature.hpp"
#include "rhps/errors.hpp"
#include "rhps/rhps.hpp"

using namespace rhps;

namespace {
const MaterialParams P = cucl_defaults();
const ExcitonParams& EX = P.exciton;
constexpr cplx I{0.0, 1.0};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

PumpSpec default_pump(double omega) { return PumpSpec{omega, 0.0, Polarization::H, 1.0}; }

ModelOptions small_basis(double e_cut = 3.0) {
    ModelOptions o;
    o.e_cut = e_cut;
    return o;
}
}  // namespace

TEST_CASE("radiation kernel matches quadrature of the dyadic Green's function") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> theta(0.0, 1.2), dw(-30.0, 8.0);
    std::vector<LayerStack> stacks{LayerStack::film(140.0, EX.eps_bg),
                                   LayerStack::film(90.0, EX.eps_bg, EX.eps_bg),
                                   build_dbr_cavity(72.0, DbrOptions{})};
    for (int trial = 0; trial < 6; ++trial) {
        const LayerStack& s = stacks[trial % 3];
        const double d = s.d();
        const double kp = units::in_plane_wavenumber(EX.omega_T, theta(rng));
        const cplx omega = EX.omega_T + dw(rng);
        ExcitonBasis b = truncate_basis(EX, d, kp, 1.0, 6);
        ResponseKernel kern(s, b, EX, omega);
        LayeredGreens g(s, omega, kp);
        const cplx w = omega / units::hbar_c;
        const cplx pref = EX.eps_bg * EX.delta_LT * w * w * std::sqrt(2.0 / d);
        for (Side side : {Side::Left, Side::Right}) {
            Eigen::MatrixXcd e = radiation_kernel(kern, side);
            // A little outside the outer interface; the kernel is referenced at the interface.
            const double off = 7.0;
            const double z = side == Side::Right ? s.z_right() + off : s.z_left() - off;
            const double eps_end = side == Side::Right ? s.right_eps() : s.left_eps();
            const cplx phase = std::exp(I * normal_wavenumber(eps_end, omega, kp) * off);
            for (int i : {0, 3, 5})
                for (int src : {X, Y, Z})
                    for (int fld : {X, Y, Z}) {
                        auto f = [&](double zp) {
                            return g.dyadic(z, zp).regular(fld, src) * std::sin(b.q(i) * zp);
                        };
                        cplx ref = pref * oracle::quad(f, 0.0, d);
                        cplx got = phase * e(fld, src * b.size() + i);
                        if (std::abs(ref) == 0.0) {
                            CHECK(std::abs(got) == 0.0);
                            continue;
                        }
                        CHECK_MESSAGE(rel(got, ref) < 1e-9, "trial " << trial << " fld " << fld << " src " << src);
                    }
        }
    }
}

TEST_CASE("biexciton amplitude matches the direct triple sum") {
    LayerStack s = LayerStack::film(150.0, EX.eps_bg);
    ExcitonBasis b = truncate_basis(EX, 150.0, 0.0, 3.0);
    BiexcitonBasis bx = truncate_biexciton_basis(P, 150.0, 0.0, 3.0);
    PumpSpec pump = default_pump(EX.omega_T - 16.0);
    LinearAmplitudes lin = linear_amplitudes(s, b, EX, pump);
    BiexcitonAmplitude amp = biexciton_amplitude(P, b, bx, lin);
    const int n = b.size();
    const double f = std::sqrt(P.biexciton.volume);
    for (int k = 0; k < bx.size(); ++k) {
        cplx sum = 0.0;
        for (int c = 0; c < 3; ++c)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    sum += f * overlap_c(150.0, bx.modes[k], b.modes[i], b.modes[j]) *
                           (b.energies[i] - pump.omega) * lin.b(c * n + i) * lin.b(c * n + j);
        cplx ref = sum / (bx.energies[k] - 2.0 * pump.omega - I * P.biexciton.gamma / 2.0);
        CHECK(std::abs(amp.B(k) - ref) <= 1e-11 * amp.B.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("nonlinear coupling matches the direct sum") {
    LayerStack s = LayerStack::film(120.0, EX.eps_bg);
    ExcitonBasis b = truncate_basis(EX, 120.0, 0.0, 4.0);
    BiexcitonBasis bx = truncate_biexciton_basis(P, 120.0, 0.0, 4.0);
    LinearAmplitudes lin = linear_amplitudes(s, b, EX, default_pump(EX.omega_T - 16.0));
    BiexcitonAmplitude amp = biexciton_amplitude(P, b, bx, lin);
    ExcitonBasis photon = truncate_basis(EX, 120.0, 0.01, 4.0), partner = truncate_basis(EX, 120.0, -0.01, 4.0);
    Eigen::MatrixXcd k = nonlinear_coupling(P, amp, photon, partner);
    const double f = std::sqrt(P.biexciton.volume);
    for (int i = 0; i < b.size(); ++i)
        for (int j = 0; j < b.size(); ++j) {
            cplx ref = 0.0;
            for (int n = 0; n < bx.size(); ++n)
                ref += f * amp.B(n) * (photon.energies[i] + partner.energies[j] - bx.energies[n]) *
                       overlap_c(120.0, bx.modes[n], photon.modes[i], partner.modes[j]);
            CHECK(std::abs(k(i, j) - ref) <= 1e-10 * k.cwiseAbs().maxCoeff());
        }
}

TEST_CASE("biexciton amplitude is a single Lorentzian of width gamma_bx") {
    LayerStack s = LayerStack::film(100.0, EX.eps_bg);
    ExcitonBasis b = truncate_basis(EX, 100.0, 0.0, 3.0);
    BiexcitonBasis bx = truncate_biexciton_basis(P, 100.0, 0.0, 3.0);
    const double centre = 0.5 * bx.energies[0];
    auto pop = [&](double w) {
        return std::norm(biexciton_amplitude(P, b, bx, linear_amplitudes(s, b, EX, default_pump(w))).B(0));
    };
    const double peak = pop(centre);
    auto half_point = [&](double dir) {
        double lo = 0.0, hi = 5.0 * P.biexciton.gamma;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (pop(centre + dir * mid) > 0.5 * peak ? lo : hi) = mid;
        }
        return lo;
    };
    const double fwhm_two_photon = 2.0 * (half_point(1.0) + half_point(-1.0));
    CHECK(fwhm_two_photon == doctest::Approx(P.biexciton.gamma).epsilon(1e-3));
}

TEST_CASE("biexciton parity selection") {
    LayerStack s = LayerStack::film(160.0, EX.eps_bg);
    ExcitonBasis b = truncate_basis(EX, 160.0, 0.0, 3.0);
    BiexcitonBasis bx = truncate_biexciton_basis(P, 160.0, 0.0, 3.0);
    LinearAmplitudes lin = linear_amplitudes(s, b, EX, default_pump(EX.omega_T - 16.0));
    const int n = b.size();
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < n; ++i)
            if (b.modes[i] % 2 == 0) lin.b(c * n + i) = 0.0;
    BiexcitonAmplitude amp = biexciton_amplitude(P, b, bx, lin);
    double odd_max = 0;
    for (int k = 0; k < bx.size(); ++k) {
        if (bx.modes[k] % 2 == 0) CHECK(std::abs(amp.B(k)) == 0.0);
        else odd_max = std::max(odd_max, std::abs(amp.B(k)));
    }
    CHECK(odd_max > 0);
}

TEST_CASE("biexciton amplitude scales with pump intensity") {
    LayerStack s = LayerStack::film(200.0, EX.eps_bg);
    PumpSpec pump = default_pump(EX.omega_T - 16.05);
    RhpsModel a(s, P, pump, small_basis());
    pump.amplitude = std::sqrt(10.0);
    RhpsModel b(s, P, pump, small_basis());
    CHECK((b.biexciton().B - 10.0 * a.biexciton().B).norm() <= 1e-12 * b.biexciton().B.norm());
}

TEST_CASE("pump tuning") {
    SUBCASE("targeted level lands on its half energy") {
        LayerStack s = LayerStack::film(200.0, EX.eps_bg);
        PumpTuning t;
        t.target_n = 6;
        const double w = tune_pump(s, P, default_pump(0.0), small_basis(), t);
        const double half = 0.5 * biexciton_energy(P, 200.0, 0.0, 6);
        CHECK(std::abs(w - half) < P.biexciton.gamma);
    }
    SUBCASE("bulk rule near the two-photon resonance") {
        LayerStack s = LayerStack::film(2000.0, EX.eps_bg);
        const double w = tune_pump(s, P, default_pump(0.0), small_basis(0.5));
        CHECK(std::abs(w - (EX.omega_T - 16.1)) < 0.5);
    }
    SUBCASE("target outside the basis") {
        LayerStack s = LayerStack::film(100.0, EX.eps_bg);
        PumpTuning t;
        t.target_n = 10000;
        CHECK_THROWS_AS(tune_pump(s, P, default_pump(0.0), small_basis(), t), ConfigurationError);
    }
}

TEST_CASE("detector polarization vectors") {
    LayerStack s = LayerStack::film(100.0, EX.eps_bg);
    const double w = EX.omega_T - 16.0;
    Eigen::Vector3cd h0 = detector_vector(s, w, 0.0, Side::Right, DetectorBasis::H);
    CHECK((h0 - Eigen::Vector3cd(1, 0, 0)).norm() < 1e-15);
    CHECK((detector_vector(s, w, 0.0, Side::Left, DetectorBasis::V) - Eigen::Vector3cd(0, 1, 0)).norm() == 0.0);

    const double theta = units::pi / 3;
    const double kp = units::in_plane_wavenumber(EX.omega_T, theta);
    // Propagation angle in vacuum at frequency w for the fixed k_par.
    const double k0 = w / units::hbar_c;
    const double phi = std::asin(kp / k0);
    Eigen::Vector3cd h = detector_vector(s, w, kp, Side::Right, DetectorBasis::H);
    CHECK(std::abs(h(0) - std::cos(phi)) < 1e-14);
    CHECK(std::abs(h(2) + std::sin(phi)) < 1e-14);
    Eigen::Vector3cd hl = detector_vector(s, w, kp, Side::Left, DetectorBasis::H);
    CHECK(std::abs(hl(2) - std::sin(phi)) < 1e-14);
    Eigen::Vector3cd kvec(kp, 0, k0 * std::cos(phi));
    CHECK(std::abs(h.dot(kvec)) < 1e-15);

    Eigen::Vector3cd l = detector_vector(s, w, kp, Side::Right, DetectorBasis::L);
    Eigen::Vector3cd r = detector_vector(s, w, kp, Side::Right, DetectorBasis::R);
    CHECK(std::abs(l.norm() - 1.0) < 1e-15);
    CHECK(std::abs(l.dot(r)) < 1e-15);

    CHECK_THROWS_AS(detector_vector(s, w, 1.2 * k0, Side::Right, DetectorBasis::H), NoFarFieldError);
}

TEST_CASE("singles tensor is Hermitian with non-negative diagonal") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> dw(-40.0, -5.0), theta(0.0, 1.3), dd(60.0, 400.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double d = dd(rng);
        LayerStack s = trial % 2 ? LayerStack::film(d, EX.eps_bg) : build_dbr_cavity(d, DbrOptions{});
        RhpsModel m(s, P, default_pump(EX.omega_T - 16.1 + 0.2 * (trial % 3)), small_basis(2.0));
        const double kp = units::in_plane_wavenumber(EX.omega_T, theta(rng));
        for (Side side : {Side::Left, Side::Right}) {
            Eigen::Matrix3cd t = m.singles_tensor(EX.omega_T + dw(rng), kp, side);
            const double scale = t.cwiseAbs().maxCoeff();
            CHECK((t - t.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * scale);
            for (int a = 0; a < 3; ++a) CHECK(t(a, a).real() >= -1e-12 * scale);
        }
    }
}

TEST_CASE("singles vanish without a decay channel") {
    MaterialParams p = P;
    p.exciton.gamma = 0.0;
    LayerStack s = LayerStack::film(150.0, p.exciton.eps_bg);
    PumpSpec pump = default_pump(p.exciton.omega_T - 16.1);
    // Partner at 2 w_in - w ~ w_T - 230 meV, beyond the vacuum light line.
    const double w = p.exciton.omega_T + 198.0;
    const double kp = 1.3 * (2 * pump.omega - w) / units::hbar_c;
    RhpsModel lossless(s, p, pump, small_basis());
    RhpsModel lossy(s, P, pump, small_basis());
    const double t0 = lossless.singles_tensor(w, kp, Side::Right).cwiseAbs().maxCoeff();
    const double t1 = lossy.singles_tensor(w, kp, Side::Right).cwiseAbs().maxCoeff();
    CHECK(t1 > 0);
    CHECK(t0 <= 1e-10 * t1);
}

TEST_CASE("pair amplitude selection rules and swap symmetry") {
    LayerStack s = build_dbr_cavity(110.0, DbrOptions{});
    RhpsModel m(s, P, default_pump(EX.omega_T - 16.0), small_basis(2.0));
    const double w = EX.omega_T - 15.2;
    const double k1 = units::in_plane_wavenumber(EX.omega_T, 0.4);
    Eigen::Matrix3cd t0 = m.pair_amplitude(w, 0.0, Side::Right, Side::Right);
    CHECK(t0(X, Y) == cplx(0.0));
    CHECK(t0(Y, X) == cplx(0.0));
    CHECK(std::abs(t0(X, X)) > 0);

    for (Side s1 : {Side::Left, Side::Right})
        for (Side s2 : {Side::Left, Side::Right}) {
            Eigen::Matrix3cd a = m.pair_amplitude(w, k1, s1, s2);
            Eigen::Matrix3cd b = m.pair_amplitude(2 * m.pump().omega - w, -k1, s2, s1);
            CHECK((a - b.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * a.cwiseAbs().maxCoeff());
        }
}

TEST_CASE("polarization identities of the observables") {
    LayerStack s = LayerStack::film(200.0, EX.eps_bg);
    RhpsModel m(s, P, default_pump(EX.omega_T - 16.05), small_basis(2.0));
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> dw(-39.0, -8.0), theta(0.0, 1.2);
    for (int trial = 0; trial < 10; ++trial) {
        const double w = EX.omega_T + dw(rng);
        const double kp = units::in_plane_wavenumber(EX.omega_T, theta(rng));
        const double l = m.one_photon_intensity(w, kp, Side::Right, DetectorBasis::L, 0.01);
        const double r = m.one_photon_intensity(w, kp, Side::Right, DetectorBasis::R, 0.01);
        CHECK(std::abs(l - r) <= 1e-10 * std::abs(l));
        CHECK(m.coincidence_signal(w, kp, Side::Right, DetectorBasis::H, Side::Right, DetectorBasis::V, 0.01) == 0.0);
        CHECK(m.coincidence_signal(w, kp, Side::Right, DetectorBasis::V, Side::Right, DetectorBasis::H, 0.01) == 0.0);
    }
    const double w = EX.omega_T - 15.0;
    const double hh = m.coincidence_signal(w, 0.0, Side::Right, DetectorBasis::H, Side::Right, DetectorBasis::H, 0.01);
    const double vv = m.coincidence_signal(w, 0.0, Side::Right, DetectorBasis::V, Side::Right, DetectorBasis::V, 0.01);
    CHECK(hh == doctest::Approx(vv).epsilon(1e-10));
    const double ll = m.coincidence_signal(w, 0.0, Side::Right, DetectorBasis::L, Side::Right, DetectorBasis::L, 0.01);
    const double rr = m.coincidence_signal(w, 0.0, Side::Right, DetectorBasis::R, Side::Right, DetectorBasis::R, 0.01);
    const double lr = m.coincidence_signal(w, 0.0, Side::Right, DetectorBasis::L, Side::Right, DetectorBasis::R, 0.01);
    const double rl = m.coincidence_signal(w, 0.0, Side::Right, DetectorBasis::R, Side::Right, DetectorBasis::L, 0.01);
    CHECK(ll == doctest::Approx(rr).epsilon(1e-10));
    CHECK(lr == doctest::Approx(rl).epsilon(1e-10));
}

TEST_CASE("spectral symmetry of the coincidence signal") {
    LayerStack s = LayerStack::film(300.0, EX.eps_bg);
    RhpsModel m(s, P, default_pump(EX.omega_T - 16.1), small_basis(2.0));
    const double k1 = units::in_plane_wavenumber(EX.omega_T, 0.5);
    for (double dw : {-2.0, -0.7, 0.3, 1.9}) {
        const double w = m.pump().omega + dw;
        double a = m.coincidence_signal(w, k1, Side::Right, DetectorBasis::H, Side::Left, DetectorBasis::V, 0.01);
        double b = m.coincidence_signal(2 * m.pump().omega - w, -k1, Side::Left, DetectorBasis::V, Side::Right,
                                        DetectorBasis::H, 0.01);
        CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
}

TEST_CASE("scaling laws and performance") {
    LayerStack s = LayerStack::film(250.0, EX.eps_bg);
    const double w_in = EX.omega_T - 16.1;
    const double w = w_in + 0.4;
    std::vector<double> ls, lsig, lnoise, perf;
    for (double iin : {1.0, 10.0, 100.0, 1000.0}) {
        PumpSpec pump = default_pump(w_in);
        pump.amplitude = std::sqrt(iin);
        RhpsModel m(s, P, pump, small_basis(2.0));
        double sig = m.coincidence_signal(w, 0.0, Side::Right, DetectorBasis::H, Side::Right, DetectorBasis::H, 0.01);
        double noise = m.coincidence_noise(w, 0.0, Side::Right, DetectorBasis::H, 2 * w_in - w, 0.0, Side::Right,
                                           DetectorBasis::H, 0.01);
        ls.push_back(std::log(iin));
        lsig.push_back(std::log(sig));
        lnoise.push_back(std::log(noise));
        perf.push_back(performance(sig, noise, 1.0));
        const double i1 = m.one_photon_intensity(w, 0.0, Side::Right, DetectorBasis::H, 0.01);
        const double i2 = m.one_photon_intensity(2 * w_in - w, 0.0, Side::Right, DetectorBasis::H, 0.01);
        CHECK(noise == i1 * i2);
    }
    auto slope = [&](const std::vector<double>& y) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < y.size(); ++i) mx += ls[i], my += y[i];
        mx /= y.size();
        my /= y.size();
        double num = 0, den = 0;
        for (std::size_t i = 0; i < y.size(); ++i) num += (ls[i] - mx) * (y[i] - my), den += (ls[i] - mx) * (ls[i] - mx);
        return num / den;
    };
    CHECK(std::abs(slope(lsig) - 2.0) < 1e-6);
    CHECK(std::abs(slope(lnoise) - 4.0) < 1e-6);
    for (double p : perf) CHECK(std::abs(p - perf[0]) <= 1e-10 * perf[0]);
    CHECK(performance(2.0, 3.0, 2.0) == doctest::Approx(performance(2.0, 3.0, 1.0) / 2));
    CHECK_THROWS_AS(performance(1.0, 0.0, 1.0), UndefinedPerformanceError);
}
