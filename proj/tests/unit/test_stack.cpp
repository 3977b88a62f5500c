#include <doctest.h>

#include <cmath>
#include <random>

#include "abeles.hpp"
#include "rhps/errors.hpp"
#include "rhps/stack.hpp"

using namespace rhps;

namespace {
const double wT = 3202.2;
const double eps_bg = 5.59;

double kpar(double theta_deg) { return units::in_plane_wavenumber(wT, theta_deg * units::pi / 180); }

std::vector<oracle::Film> films_right_of(const LayerStack& s) {
    std::vector<oracle::Film> f;
    for (std::size_t j = s.excitonic_region() + 1; j + 1 < s.regions(); ++j)
        f.push_back({s.eps(j), s.thickness(j)});
    return f;
}
}  // namespace

TEST_CASE("matching media have no interface") {
    for (auto pol : {Polarization::V, Polarization::H}) {
        auto f = interface_coefficients(2.0, 2.0, PlaneWaveChannel{wT, kpar(30), pol});
        CHECK(std::abs(f.r) < 1e-15);
        CHECK(std::abs(f.t - 1.0) < 1e-15);
    }
}

TEST_CASE("normal incidence vacuum to CuCl background") {
    double n = std::sqrt(eps_bg);
    double expected = (1 - n) / (1 + n);
    auto v = interface_coefficients(1.0, eps_bg, PlaneWaveChannel{wT, 0.0, Polarization::V});
    auto h = interface_coefficients(1.0, eps_bg, PlaneWaveChannel{wT, 0.0, Polarization::H});
    CHECK(v.r.real() == doctest::Approx(expected).epsilon(1e-14));
    CHECK(v.r.real() == doctest::Approx(-0.4056).epsilon(1e-3));
    // H_y reflection has the opposite sign at normal incidence
    CHECK(h.r.real() == doctest::Approx(-expected).epsilon(1e-14));
    CHECK(std::abs(h.t - v.t) < 1e-14);
}

TEST_CASE("interface flux conservation") {
    for (auto pol : {Polarization::V, Polarization::H})
        for (double th : {0.0, 20.0, 45.0, 70.0})
            for (auto [a, b] : {std::pair{1.0, 5.59}, {5.59, 1.0}, {3.4596, 8.7025}}) {
                PlaneWaveChannel ch{wT, kpar(th), pol};
                auto f = interface_coefficients(a, b, ch);
                cplx ka = normal_wavenumber(a, ch.omega, ch.k_par);
                cplx kb = normal_wavenumber(b, ch.omega, ch.k_par);
                if (kb.imag() > 0) continue;
                double flux = std::norm(f.r) + (kb / ka).real() * std::norm(f.t);
                CHECK(flux == doctest::Approx(1.0).epsilon(1e-13));
            }
}

TEST_CASE("normal wavenumber branch") {
    cplx k = normal_wavenumber(1.0, wT, 2 * wT / units::hbar_c);
    CHECK(k.real() == 0.0);
    CHECK(k.imag() > 0);
    CHECK(normal_wavenumber(1.0, wT, 0.0).real() > 0);
}

TEST_CASE("uniform medium has no reflections") {
    auto s = LayerStack::uniform(eps_bg, 200);
    for (auto pol : {Polarization::V, Polarization::H}) {
        auto g = generalized_rt(s, PlaneWaveChannel{wT, kpar(40), pol});
        CHECK(std::abs(g.R_left) < 1e-15);
        CHECK(std::abs(g.R_right) < 1e-15);
        CHECK(std::abs(g.M - 1.0) < 1e-15);
    }
}

TEST_CASE("film in vacuum sees single Fresnel coefficients") {
    auto s = LayerStack::film(200, eps_bg);
    for (auto pol : {Polarization::V, Polarization::H}) {
        PlaneWaveChannel ch{wT - 10, kpar(30), pol};
        auto g = generalized_rt(s, ch);
        auto f = interface_coefficients(eps_bg, 1.0, ch);
        CHECK(std::abs(g.R_left - f.r) < 1e-15);
        CHECK(std::abs(g.R_right - f.r) < 1e-15);
        CHECK(std::abs(g.T_right - f.t) < 1e-15);
    }
}

TEST_CASE("DBR reflectance against characteristic-matrix oracle") {
    auto s = build_dbr_cavity(80, 4, 16, wT);
    auto mirror = films_right_of(s);
    CHECK(mirror.size() == 32);
    for (auto pol : {Polarization::V, Polarization::H})
        for (double w : {wT, wT - 40, wT + 25})
            for (double th : {0.0, 25.0}) {
                PlaneWaveChannel ch{w, kpar(th), pol};
                auto g = generalized_rt(s, ch);
                cplx ref = oracle::abeles_reflection(eps_bg, mirror, 1.0, w, ch.k_par,
                                                     pol == Polarization::V);
                CHECK(std::abs(g.R_right - ref) < 1e-12);
            }
    auto g = generalized_rt(s, PlaneWaveChannel{wT, 0.0, Polarization::V});
    CHECK(std::norm(g.R_right) > 0.99);
}

TEST_CASE("generalized coefficients conserve energy") {
    auto s = build_dbr_cavity(72, 4, 16, wT);
    for (auto pol : {Polarization::V, Polarization::H})
        for (double th : {0.0, 30.0, 60.0})
            for (double w : {wT - 30, wT, wT + 7}) {
                auto g = generalized_rt(s, PlaneWaveChannel{w, kpar(th), pol});
                double right = std::norm(g.R_right) + (g.k_right / g.k).real() * std::norm(g.T_right);
                double left = std::norm(g.R_left) + (g.k_left / g.k).real() * std::norm(g.T_left);
                CHECK(right == doctest::Approx(1.0).epsilon(1e-10));
                CHECK(left == doctest::Approx(1.0).epsilon(1e-10));
            }
}

TEST_CASE("mirrored stack swaps left and right coefficients") {
    std::vector<Layer> a{{30, 2.0}, {50, 4.0}, {120, eps_bg, true}, {70, 8.7}};
    std::vector<Layer> b(a.rbegin(), a.rend());
    LayerStack s1(1.0, a, 2.25), s2(2.25, b, 1.0);
    for (auto pol : {Polarization::V, Polarization::H}) {
        PlaneWaveChannel ch{wT + 3, kpar(35), pol};
        auto g1 = generalized_rt(s1, ch), g2 = generalized_rt(s2, ch);
        CHECK(std::abs(g1.R_left - g2.R_right) < 1e-13);
        CHECK(std::abs(g1.T_left - g2.T_right) < 1e-13);
        CHECK(std::abs(g1.T_right - g2.T_left) < 1e-13);
    }
}

TEST_CASE("continuity across an interior evanescent threshold") {
    LayerStack s(eps_bg, {{40, 1.0}, {100, eps_bg, true}, {40, 1.0}}, eps_bg);
    double kc = wT / units::hbar_c;  // vacuum light line of the interior gaps
    for (auto pol : {Polarization::V, Polarization::H}) {
        auto below = generalized_rt(s, PlaneWaveChannel{wT, kc * (1 - 1e-9), pol});
        auto above = generalized_rt(s, PlaneWaveChannel{wT, kc * (1 + 1e-9), pol});
        CHECK(std::abs(below.R_right - above.R_right) < 1e-6);
        CHECK(std::abs(below.M - above.M) < 1e-6 * std::abs(below.M));
    }
}

TEST_CASE("stack validation") {
    CHECK_THROWS_AS(LayerStack(1.0, {{10, 2.0}}, 1.0), ConfigurationError);
    CHECK_THROWS_AS(LayerStack(1.0, {{10, 2.0, true}, {5, 3.0, true}}, 1.0), ConfigurationError);
    CHECK_THROWS_AS(LayerStack(1.0, {{-1, 2.0, true}}, 1.0), ConfigurationError);
    LayerStack s(1.0, {{30, 2.0}, {100, eps_bg, true}, {20, 3.0}}, 1.0);
    CHECK(s.z_left() == -30);
    CHECK(s.z_right() == 120);
    CHECK(s.region_of(-10) == 1);
    CHECK(s.region_of(50) == 2);
}

TEST_CASE("pump in a uniform medium is a pure forward wave") {
    auto s = LayerStack::uniform(eps_bg, 300);
    for (auto pol : {Polarization::V, Polarization::H}) {
        PumpField p(s, PlaneWaveChannel{wT - 16, 0.0, pol}, 1.0);
        CHECK(std::abs(p.backward_components().norm()) < 1e-14);
        for (double z : {0.0, 77.0, 300.0}) CHECK(p.E(z).norm() == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("film at a Fabry-Perot resonance transmits fully") {
    const double d = 200, n = std::sqrt(eps_bg);
    // k d = m pi with m = 3
    double w = 3 * units::pi / d / n * units::hbar_c;
    auto s = LayerStack::film(d, eps_bg);
    for (auto pol : {Polarization::V, Polarization::H}) {
        PumpField p(s, PlaneWaveChannel{w, 0.0, pol}, 1.0);
        CHECK(std::norm(p.transmission()) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(p.reflection()) < 1e-12);
    }
    // off resonance, |r|^2 + |t|^2 = 1
    PumpField p(s, PlaneWaveChannel{w * 1.1, 0.0, Polarization::V}, 1.0);
    CHECK(std::norm(p.reflection()) + std::norm(p.transmission()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pump field is continuous and scales with amplitude") {
    auto s = build_dbr_cavity(72, 4, 16, wT);
    PumpField p1(s, PlaneWaveChannel{wT - 16, 0.0, Polarization::H}, 1.0);
    PumpField p2(s, PlaneWaveChannel{wT - 16, 0.0, Polarization::H}, 2.0);
    CHECK((p2.E(30.0) - 2.0 * p1.E(30.0)).norm() < 1e-12);
    // tangential E continuous at the excitonic faces
    CHECK(std::abs(p1.E(-1e-9)(0) - p1.E(1e-9)(0)) < 1e-6);
    CHECK(std::abs(p1.E(72 - 1e-9)(0) - p1.E(72 + 1e-9)(0)) < 1e-6);
    Eigen::Vector3cd a = p1.forward_components(), b = p1.backward_components();
    cplx k = p1.k_layer();
    double z = 40;
    Eigen::Vector3cd E = a * std::exp(cplx(0, 1) * k * z) + b * std::exp(-cplx(0, 1) * k * z);
    CHECK((E - p1.E(z)).norm() < 1e-12);
}

TEST_CASE("quarter-wave layer thickness") {
    double lambda = 2 * 3.14159265358979 * 197326.98 / 3202.2;
    CHECK(quarter_wave_thickness(1.86, wT) == doctest::Approx(lambda / (4 * 1.86)).epsilon(1e-7));
    CHECK(std::abs(quarter_wave_thickness(1.86, wT) - 52.06) < 0.05);
}

TEST_CASE("dbr builder") {
    auto bare = build_dbr_cavity(100, 0, 0, wT);
    CHECK(bare.regions() == 3);
    CHECK(bare.left_eps() == 1.0);
    auto s = build_dbr_cavity(100, 4, 16, wT);
    CHECK(s.regions() == 2 + 8 + 1 + 32);
    std::size_t e = s.excitonic_region();
    CHECK(s.eps(e - 1) == doctest::Approx(2.95 * 2.95));
    CHECK(s.eps(e + 1) == doctest::Approx(2.95 * 2.95));
    CHECK(s.eps(1) == doctest::Approx(1.86 * 1.86));
}

TEST_CASE("passive DBR cavity quality factor") {
    // half-wave excitonic layer puts the passive mode at omega_T
    double d = units::pi * units::hbar_c / wT / std::sqrt(eps_bg);
    auto s = build_dbr_cavity(d, 4, 16, wT);
    auto w = find_passive_resonance(s, Polarization::V, 0.0, cplx(wT, -20));
    REQUIRE(w.has_value());
    CHECK(std::abs(w->real() - wT) < 1.0);
    double Q = w->real() / (-2 * w->imag());
    MESSAGE("passive cavity Q = " << Q);
    // Four quarter-wave periods give Q close to 80; three give about 29.
    CHECK(Q > 25);
    CHECK(Q < 100);

    PumpField p(s, PlaneWaveChannel{w->real(), 0.0, Polarization::V}, 1.0);
    double peak = 0;
    for (int i = 0; i <= 20; ++i) peak = std::max(peak, std::norm(p.E(d * i / 20.0)(1)));
    CHECK(peak > 1.0);
}
