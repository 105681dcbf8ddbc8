#include "doctest.h"

#include "islab/rescaling.hpp"

#include <cmath>
#include <random>

using namespace islab;

namespace {

double sup_det_defect(const MapDescriptor& m, const std::vector<Vec2>& pts) {
    double worst = 0.0;
    for (const Vec2& p : pts) worst = std::max(worst, m.lebesgue_defect(p));
    return worst;
}

std::vector<Vec2> box_samples(Rect r, int n) {
    std::vector<Vec2> pts;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            pts.push_back({r.x0 + (r.x1 - r.x0) * (i + 0.5) / n, r.y0 + (r.y1 - r.y0) * (j + 0.5) / n});
    return pts;
}

}  // namespace

TEST_CASE("R sequence") {
    const auto R = r_sequence({1, 1, 1}, {-1, -1, -1});
    REQUIRE(R.size() == 3);
    for (double v : R) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

    const std::vector<double> b{0.25, 0.2, 0.3, 0.7, 1.3};
    std::vector<double> c;
    for (double v : b) c.push_back(-1.0 / v);
    const auto S = r_sequence(b, c);
    CHECK(S[0] == 1.0);
    for (int i = 0; i < 5; ++i)
        CHECK(std::abs(S[(i + 1) % 5] + c[(i + 1) % 5] * b[i] * S[(i + 4) % 5]) <= 1e-12);
    double closing = -1.0;
    for (int i = 0; i < 5; ++i) closing *= b[i] * c[i];
    CHECK(closing == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(r_sequence({1, 1}, {-1, -1}), std::invalid_argument);
    CHECK_THROWS_AS(r_sequence({1, 1, 0}, {-1, -1, -1}), std::invalid_argument);
    CHECK_THROWS_AS(r_sequence({1, 1, 1}, {-1, -2, -1}), std::invalid_argument);
}

TEST_CASE("saddle normal form") {
    const auto lin = saddle_normal_form(0.4);
    CHECK(lin.linear());
    const Vec2 q = lin({0.7, -0.3});
    CHECK(q.x == 0.4 * 0.7);
    CHECK(q.y == doctest::Approx(-0.3 / 0.4).epsilon(1e-15));

    const auto t0 = saddle_normal_form(0.4, {0.5, -0.2, 0.1});
    Vec2 p{0.8, 0.05};
    const double u0 = p.x * p.y;
    for (int m = 0; m < 100; ++m) {
        p = m < 50 ? t0(p) : t0.inverse(p);
        CHECK(std::abs(p.x * p.y - u0) <= 1e-15);
    }
    for (double s : {-0.9, -0.2, 0.3, 1.1}) {
        CHECK(t0.p(s, 0.0) == 0.0);
        CHECK(t0.p(0.0, s) == 0.0);
        CHECK(t0.q(s, 0.0) == 0.0);
        CHECK(t0.q(0.0, s) == 0.0);
    }
    const auto pts = box_samples({-1.5, 1.5, -1.5, 1.5}, 30);
    CHECK(sup_det_defect(t0.descriptor(), pts) <= 1e-12);
    for (const Vec2& z : pts) CHECK((t0.inverse(t0(z)) - z).norm() <= 1e-14);
    CHECK_THROWS_AS(saddle_normal_form(1.2), std::invalid_argument);
}

TEST_CASE("cross form of T0^k") {
    const Rect window{0.5, 2.5, 0.2, 1.5};
    const auto lin = xi_eta(saddle_normal_form(0.4), 10, window);
    CHECK(lin.sup_xi == 0.0);
    CHECK(lin.sup_eta == 0.0);

    const auto t0 = saddle_normal_form(0.4, {0.5, -0.2, 0.1});
    double prev = 1e300;
    for (int k : {4, 6, 8, 10, 12}) {
        const auto t = xi_eta(t0, k, window);
        CHECK(t.reconstruction <= 1e-10);
        const double scaled = t.sup_xi / std::pow(0.4, k);
        CHECK(scaled < prev);
        prev = scaled;
    }
    CHECK_THROWS_AS(solve_cross(saddle_normal_form(0.9, {5.0}), 3, 50.0, 50.0), SolverError);
}

TEST_CASE("transition map") {
    const TransitionTail tail{0.1, -0.1, 0.15, -0.1};
    const auto t1 = build_transition(1.2, 0.4, 0.25, -4.0, tail);
    const Vec2 m = t1({0.0, 0.4});
    CHECK(m.x == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(m.y == 0.0);
    CHECK(t1.jacobian({0.0, 0.4}).det() == doctest::Approx(1.0).epsilon(1e-12));
    const auto pts = box_samples({-0.2, 0.2, 0.15, 0.65}, 30);
    CHECK(sup_det_defect(t1.descriptor(), pts) <= 1e-12);
    for (const Vec2& z : pts) {
        CHECK((t1.inverse(t1(z)) - z).norm() <= 1e-13);
        const Mat2 fd = finite_difference_jacobian(t1.descriptor(), z);
        CHECK((fd - t1.jacobian(z)).max_abs() <= 1e-6);
    }
    // tail structure: phi1(0) = d_Y phi1(0) = 0, phi2 = x * (bounded), d_x phi2(0) = d_Y phi2(0) = 0
    const double h = 1e-5;
    CHECK(t1.phi1(0.0, 0.0) == 0.0);
    CHECK(std::abs((t1.phi1(0.0, h) - t1.phi1(0.0, -h)) / (2 * h)) <= 1e-9);
    CHECK(t1.phi2(0.0, 0.3) == 0.0);
    CHECK(std::abs((t1.phi2(h, 0.0) - t1.phi2(-h, 0.0)) / (2 * h)) <= 1e-9);
    const double dxy = (t1.phi2(h, h) - t1.phi2(h, -h) - t1.phi2(-h, h) + t1.phi2(-h, -h)) / (4 * h * h);
    CHECK(dxy == doctest::Approx(t1.d()).epsilon(1e-5));

    const auto affine = build_transition(1.2, 0.4, 0.25, -4.0);
    const Vec2 z{0.03, 0.47};
    const Vec2 w = affine(z);
    CHECK(w.x == doctest::Approx(1.2 + 0.25 * 0.07).epsilon(1e-15));
    CHECK(w.y == doctest::Approx(-4.0 * 0.03).epsilon(1e-15));
    CHECK_THROWS_AS(build_transition(1.2, 0.4, 0.25, -3.0), std::invalid_argument);
}

TEST_CASE("rescaling charts and perturbation") {
    const RescalingModel lin(RescalingConfig::affine(), 8);
    for (int i = 0; i < 3; ++i) {
        CHECK(lin.beta(i) == 0.0);
        CHECK(lin.gamma(i) == 0.0);
    }
    const RescalingModel model(RescalingConfig::nonlinear(), 10);
    CHECK(model.n() == 33);
    for (int i = 0; i < 3; ++i) {
        const Vec2 P{0.3, -0.7};
        CHECK((model.Qbar_inverse(i, model.Qbar(i, P)) - P).norm() <= 1e-12);
        CHECK((model.Q_inverse(i, model.Q(i, P)) - P).norm() <= 1e-12);
        const Vec2 e1 = model.Qbar(i, {1, 0}) - model.Qbar(i, {0, 0});
        const Vec2 e2 = model.Qbar(i, {0, 1}) - model.Qbar(i, {0, 0});
        CHECK(e1.x * e2.y - e1.y * e2.x == doctest::Approx(model.Qbar_det(i)).epsilon(1e-12));
        CHECK(model.beta(i) != 0.0);
    }

    const auto g = model.perturbation();
    // identity away from the boxes
    for (Vec2 p : {Vec2{0.5, 0.1}, Vec2{1.2, 0.25}, Vec2{1.425, 0.0}, Vec2{3.0, -1.0}}) {
        CHECK(g(p).x == p.x);
        CHECK(g(p).y == p.y);
    }
    // exact shear on the inner boxes
    for (int j = 0; j < 3; ++j) {
        const double x0 = model.config().x_plus[j];
        for (Vec2 d : {Vec2{0.05, 0.02}, Vec2{-0.08, -0.06}, Vec2{0.0, 0.0}}) {
            const Vec2 p{x0 + d.x, d.y};
            const Vec2 q = g(p);
            CHECK(q.x == p.x);
            CHECK(std::abs(q.y - p.y - model.psi_hat(j)(d.x)) <= 1e-10);
        }
    }
    // symplectic throughout the boxes, including the transition collars
    std::vector<Vec2> pts;
    for (int j = 0; j < 3; ++j) {
        const double x0 = model.config().x_plus[j];
        for (const Vec2& z : box_samples({x0 - 0.2, x0 + 0.2, -0.2, 0.2}, 24)) pts.push_back(z);
    }
    CHECK(sup_det_defect(g, pts) <= 1e-9);
    for (const Vec2& z : pts) CHECK((g.inverse(g(z)) - z).norm() <= 1e-11);
}

TEST_CASE("rescaling product formula") {
    const auto affine = RescalingConfig::affine();
    const auto nonlinear = RescalingConfig::nonlinear();
    double prev = 1e300;
    std::vector<double> sup_hat, scaled_hat;
    for (int k : {8, 10, 12, 14}) {
        const auto a = verify_rescaling(affine, k, 15);
        CHECK(a.error <= 1e-9);
        CHECK(a.phi_defect <= 1e-9);
        const auto r = verify_rescaling(nonlinear, k, 15);
        CHECK(r.n == 3 * (k + 1));
        CHECK(r.error < prev);
        prev = r.error;
        sup_hat.push_back(r.psi_hat_sup[0]);
        scaled_hat.push_back(r.psi_hat_scaled_sup[0]);
    }
    CHECK(prev <= 0.05);
    const double lm2 = std::pow(0.4 * 0.8, 2);
    for (std::size_t m = 1; m < sup_hat.size(); ++m) {
        CHECK(sup_hat[m] / sup_hat[m - 1] < 1.0);
        CHECK(sup_hat[m] / sup_hat[m - 1] <= 0.16 * 1.1);
        CHECK(scaled_hat[m] / scaled_hat[m - 1] <= lm2 * 1.1);
    }

    std::mt19937_64 rng(11);
    auto other = nonlinear;
    for (auto& p : other.psi) p = random_poly(2, 0.25, rng);
    CHECK(phi_psi_dependence(nonlinear, other, 12, 11) <= 1e-9);

    auto even = affine;
    even.N = 2;
    CHECK_THROWS_AS(RescalingModel(even, 8), std::invalid_argument);
    auto steep = affine;
    steep.lambda = 0.7;
    CHECK_THROWS_AS(RescalingModel(steep, 8), std::invalid_argument);
}

TEST_CASE("composition identity") {
    std::mt19937_64 rng(5);
    const std::vector<Poly> list{random_poly(2, 0.5, rng), random_poly(2, 0.5, rng)};
    const Poly psi = random_poly(3, 0.5, rng);
    const auto maps = corollary_composition(list, psi);
    double literal = 0.0;
    CHECK(corollary_defect(maps, disc_grid(36), &literal) <= 1e-10);
    CHECK(literal > 1e-3);

    const auto zero = corollary_composition(list, Poly{{0.0}});
    CHECK(corollary_defect(zero, disc_grid(11)) == 0.0);
    CHECK_THROWS_AS(corollary_composition({psi}, psi), std::invalid_argument);

    const Vec2 p{0.3, -0.8};
    const Vec2 r = quarter_rotation()(p);
    const Vec2 h0inv = henon_like(RealFn::zero()).inverse(p);
    CHECK(r.x == h0inv.x);
    CHECK(r.y == h0inv.y);
}
