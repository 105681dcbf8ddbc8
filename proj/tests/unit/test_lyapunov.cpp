#include "doctest.h"
#include "islab/island.hpp"
#include "islab/lyapunov.hpp"

#include <numbers>
#include <random>

using namespace islab;

namespace {

const IslandMap& island() {
    static const IslandMap f;
    return f;
}

MapDescriptor torus_translation(Vec2 c) {
    MapDescriptor m = affine_map(Mat2::identity(), c, "translate");
    m.domain = Domain::torus();
    return m;
}

}  // namespace

TEST_CASE("spectral norm") {
    CHECK(spectral_norm(Mat2::identity()) == 1.0);
    CHECK(spectral_norm({3.0, 0.0, 0.0, -5.0}) == doctest::Approx(5.0));
    const double lu = 9.0 + 4.0 * std::sqrt(5.0);
    CHECK(spectral_norm(anosov_matrix()) == doctest::Approx(lu));
}

TEST_CASE("maximal exponent") {
    auto id = identity_map(Domain::torus());
    CHECK(max_lyapunov(id, {0.2, 0.3}, 50).lambda == 0.0);
    auto fa = anosov_map();
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        auto s = max_lyapunov(fa, {u(rng), u(rng)}, 50);
        CHECK(std::abs(s.lambda - anosov_sigma()) <= 1e-6);
        CHECK(s.lambda_vector >= s.lower_bound());
    }
    // tangent-vector estimate from (1,1)/sqrt 2 carries a one-step transient log|<v, e_u>| / n
    auto s = max_lyapunov(fa, {0.1, 0.1}, 50);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    const double cu = (1.0 + g) / (std::sqrt(2.0) * std::sqrt(1.0 + g * g));
    CHECK(s.lambda_vector == doctest::Approx(anosov_sigma() + std::log(cu) / 50).epsilon(1e-9));
}

TEST_CASE("exponent of the island map") {
    const auto& f = island();
    auto fh = f.descriptor();
    auto s = max_lyapunov(fh, {0.3, 0.21}, 200, true);
    CHECK(s.lambda >= std::log(4.0));
    CHECK(std::isfinite(s.probe()));
}

TEST_CASE("exponent symmetry for inverse maps") {
    auto t = chirikov_map(1.3);
    auto ti = t.inverse_map();
    Vec2 p{0.21, 0.77};
    const int n = 12;
    Vec2 q = p;
    for (int k = 0; k < n; ++k) q = t(q);
    auto a = max_lyapunov(t, p, n), b = max_lyapunov(ti, q, n);
    CHECK(std::abs(a.lambda - b.lambda) <= 1e-8);
}

TEST_CASE("conjugacy invariance on the island") {
    const auto& f = island();
    auto fh = f.descriptor();
    auto psi = f.surgery();
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // C bounds ||DPsi|| * ||DPsi^-1|| over the island
    double c_psi = 1.0;
    std::vector<Vec2> pts;
    while (pts.size() < 40) {
        Vec2 p{u(rng), u(rng)};
        if (!f.in_hole(p) && f.hole_distance(p) > 1e-3) pts.push_back(p);
    }
    for (int k = 0; k < 20000; ++k) {
        Vec2 p{u(rng), u(rng)};
        if (f.hole_distance(p) <= 1e-3) continue;
        Mat2 j = f.surgery_jacobian(p);
        c_psi = std::max(c_psi, spectral_norm(j) * spectral_norm(j.inverse()));
    }
    const int n = 100;
    for (Vec2 p : pts) {
        auto a = max_lyapunov(fh, p, n);
        auto b = max_lyapunov(anosov_map(), psi(p), n);
        Vec2 end = p;
        for (int k = 0; k < n; ++k) end = fh(end);
        if (f.hole_distance(end) <= 1e-3) continue;
        CHECK(std::abs(a.lambda - b.lambda) <= std::log(c_psi) / n + 1e-12);
    }
}

TEST_CASE("entropy estimates") {
    GridSpec g{{0.0, 1.0, 0.0, 1.0}, 16, 16};
    auto e0 = entropy_estimate(identity_map(Domain::torus()), g, 20);
    CHECK(e0.estimate == 0.0);
    auto e1 = entropy_estimate(anosov_map(), g, 50, 2);
    CHECK(std::abs(e1.estimate - anosov_sigma()) <= 1e-6);
    CHECK(e1.fraction == 1.0);
    CHECK_THROWS_AS(entropy_estimate(anosov_map(), GridSpec{{0, 1, 0, 1}, 4, 4}, 10), std::invalid_argument);

    // grid-aligned translation conjugacy permutes the cells
    auto t = chirikov_map(0.9);
    Vec2 shift{3.0 / 16, 5.0 / 16};
    auto conj = compose_all({torus_translation(shift), t, torus_translation(-shift)});
    // short horizon: chaotic orbits separate from the 1e-16 translation round-off otherwise
    auto a = entropy_estimate(t, g, 6), b = entropy_estimate(conj, g, 6);
    CHECK(std::abs(a.estimate - b.estimate) <= 1e-9);

    // thread count does not change the result
    auto c = entropy_estimate(t, g, 6, 3);
    CHECK(c.lambda == a.lambda);
}

TEST_CASE("cone certificate") {
    auto fa = anosov_map();
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        Vec2 p{u(rng), u(rng)};
        auto c = cone_certificate(fa, p, 50);
        CHECK(c.holds);
        CHECK(max_lyapunov(fa, p, 50).lambda >= std::log(4.0) - 1e-12);
    }
    auto rot = quarter_rotation();
    auto c = cone_certificate(rot, {0.3, 0.4}, 5);
    CHECK(!c.holds);
    CHECK(c.failed_step == 1);

    const auto& f = island();
    auto chain = f.conjugated_descriptor();
    int tested = 0;
    while (tested < 10) {
        Vec2 p{u(rng), u(rng)};
        if (f.hole_distance(p) <= 1e-3) continue;
        auto cert = cone_certificate(chain, p, 50);
        CHECK(cert.holds);
        ++tested;
    }
}
