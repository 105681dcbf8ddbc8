#include "doctest.h"

#include "islab/links.hpp"

#include <numbers>

using namespace islab;

namespace {

const double kPi = std::numbers::pi;

double sup_diff(const GraphCurve& a, const GraphCurve& b, double x0, double x1, int n = 400) {
    double best = 0.0;
    for (int i = 0; i <= n; ++i) {
        double x = x0 + (x1 - x0) * i / n;
        best = std::max(best, std::abs(a(x) - b(x)));
    }
    return best;
}

double sup_diff_closed(const PeriodicFn& m, const std::function<double(double)>& ref) {
    double best = 0.0;
    for (int j = 0; j < 512; ++j) {
        double x = m.origin() + m.period() * j / 512.0;
        best = std::max(best, std::abs(m(x) - ref(x)));
    }
    return best;
}

}  // namespace

TEST_CASE("septic smoothstep and partition bumps") {
    for (double t : {0.1, 0.37, 0.5, 0.81}) {
        for (int k = 0; k < 4; ++k) {
            const double h = 1e-5;
            double fd = (smoothstep7(t + h, k) - smoothstep7(t - h, k)) / (2 * h);
            CHECK(smoothstep7(t, k + 1) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
    LinkGeometry g;
    RealFn ra = partition_bump(g, LinkSide::A), rb = partition_bump(g, LinkSide::B);
    for (int i = 0; i <= 200; ++i) {
        double xa = g.xa - g.tau + g.tau * i / 200.0;
        double xb = g.xb + g.tau * i / 200.0;
        CHECK(std::abs(ra(xa) + ra(xa - g.tau) - 1.0) <= 2.3e-16);
        CHECK(std::abs(rb(xb) + rb(xb + g.tau) - 1.0) <= 2.3e-16);
    }
    auto [a0, a1] = g.support(LinkSide::A);
    CHECK(ra(a0 - 1e-9) == 0.0);
    CHECK(ra(a1 + 1e-9) == 0.0);
    auto [b0, b1] = g.support(LinkSide::B);
    CHECK(rb(b0 - 1e-9) == 0.0);
    CHECK(rb(b1 + 1e-9) == 0.0);
}

TEST_CASE("suitable model geometry and pieces") {
    LinkGeometry bad;
    bad.xb = bad.xa + 1.5;
    CHECK_THROWS_AS(build_suitable_model(bad), std::invalid_argument);
    LinkGeometry flipped;
    flipped.y2 = 2.0;
    CHECK_THROWS_AS(build_suitable_model(flipped), std::invalid_argument);

    LinkGeometry g;
    SuitableModel m = build_suitable_model(g);
    CHECK_FALSE(m.perturbed());
    Vec2 p{-2.7, 1.3};
    Vec2 ta = m.unperturbed(Leg::Ta)(p);
    CHECK(ta.x == doctest::Approx(p.x - g.tau));
    CHECK(ta.y == p.y);
    for (Leg leg : {Leg::Ta, Leg::Tb, Leg::TX, Leg::TT1, Leg::Td4})
        CHECK(std::abs(m.unperturbed(leg).jacobian(p).det() - 1.0) <= 1e-15);

    // F^4 on D2^b is theta - (x/2, 2y)
    MapDescriptor f4 = compose_all({m.unperturbed(Leg::Tb), m.unperturbed(Leg::Tb), m.unperturbed(Leg::TX), m.unperturbed(Leg::TT1)});
    MapDescriptor rule = m.contraction_rule();
    MapDescriptor f7 = f4;
    for (int i = 0; i < 3; ++i) f7 = compose(m.unperturbed(Leg::Td4), f7);
    for (int i = 0; i <= 10; ++i) {
        Vec2 q{g.xb + g.tau * i / 10.0, g.y1 + 0.01 * (i - 5)};
        CHECK((f4(q) - rule(q)).norm() <= 1e-14);
        Vec2 r = f7(q);
        CHECK(r.x == doctest::Approx(-q.x / 2 + 1.5 * g.xb + g.tau / 2));
        CHECK(r.y == doctest::Approx(-2 * q.y + 2 * g.y1 + g.y2));
    }
    // D2^b lands on D4^b at y2
    Vec2 e0 = rule({g.xb, g.y1}), e1 = rule({g.xb + g.tau, g.y1});
    CHECK(e0.y == doctest::Approx(g.y2));
    CHECK(std::min(e0.x, e1.x) == doctest::Approx(g.xb + 1.5 * g.tau));
    CHECK(std::max(e0.x, e1.x) == doctest::Approx(g.xb + 2.0 * g.tau));
}

TEST_CASE("graph curves interpolate and reject outside points") {
    RealFn s = RealFn::trig(1.0, {0.0, 0.3}, {0.2, 0.0});
    GraphCurve c = GraphCurve::from_function(0.0, 1.0, s);
    double err = 0.0;
    for (int i = 0; i <= 1000; ++i) err = std::max(err, std::abs(c(i / 1000.0) - s(i / 1000.0)));
    // h^4/384 max|w''''| = 4.5e-9 here
    CHECK(err <= 1e-8);
    CHECK(c.interpolation_error_estimate() <= 1e-8);
    CHECK(c.interpolation_error_estimate() >= 0.1 * err);
    CHECK_THROWS_AS(c(1.1), DomainError);
    CHECK_THROWS_AS(GraphCurve(1.0, 0.0, {0, 0}, {0, 0}), std::invalid_argument);
}

TEST_CASE("graph transform examples") {
    RealFn w = RealFn::trig(2.0, {0.1, 0.05}, {0.02, 0.0});
    GraphCurve c = GraphCurve::from_function(-1.0, 1.0, w);

    GraphCurve t = graph_transform(affine_map(Mat2::identity(), {0.3, 0.0}), c);
    CHECK(t.x0() == doctest::Approx(-0.7));
    double e = 0.0;
    for (int i = 0; i <= 300; ++i) {
        double x = -0.7 + 2.0 * i / 300;
        e = std::max(e, std::abs(t(x) - w(x - 0.3)));
    }
    CHECK(e <= 1e-9);

    RealFn psi = RealFn::trig(2.0, {0.01}, {0.0});
    GraphCurve sh = graph_transform(shear_map(psi.scaled(-1.0)), c);
    GraphCurve direct = shear_graph(c, psi.scaled(-1.0));
    CHECK(sup_diff(sh, direct, -1.0, 1.0) <= 1e-9);

    const double cc = 0.4, d = 0.7;
    GraphCurve lin = graph_transform(affine_map({-0.5, 0.0, 0.0, -2.0}, {cc, d}), c);
    e = 0.0;
    for (int i = 0; i <= 300; ++i) {
        double X = lin.x0() + (lin.x1() - lin.x0()) * i / 300;
        e = std::max(e, std::abs(lin(X) - (d - 2.0 * w(2.0 * (cc - X)))));
    }
    CHECK(e <= 1e-8);

    // (f o g)# = f#(g#)
    MapDescriptor f = shear_map(RealFn::trig(2.0, {0.02}, {0.01}));
    MapDescriptor g = affine_map({1.0, 0.1, 0.0, 1.0}, {0.05, 0.0});
    GraphCurve lhs = graph_transform(compose(f, g), c);
    GraphCurve rhs = graph_transform(f, graph_transform(g, c));
    CHECK(sup_diff(lhs, rhs, std::max(lhs.x0(), rhs.x0()), std::min(lhs.x1(), rhs.x1())) <= 1e-9);

    // vertical tangency is reported with its location
    MapDescriptor rot = quarter_rotation();
    GraphCurve flat = GraphCurve::constant(-1.0, 1.0, 0.0);
    CHECK_THROWS_AS(graph_transform(rot, flat), DomainError);
}

TEST_CASE("periodic functions") {
    RealFn f = RealFn::trig(1.0, {0.3, 0.0, 0.1}, {0.0, 0.2, 0.0}) + RealFn::constant(0.25);
    PeriodicFn p = PeriodicFn::sample([&](double x) { return f(x); }, 1.0, -0.5);
    CHECK(p.mean() == doctest::Approx(0.25).epsilon(1e-14));
    for (double x : {-0.31, 0.0, 0.42, 3.7}) {
        CHECK(std::abs(p(x) - f(x)) <= 1e-13);
        CHECK(std::abs(p.deriv(x, 1) - f.deriv(x)) <= 1e-11);
        CHECK(std::abs(p.deriv(x, 2) - f.deriv(x, 2)) <= 1e-9);
        CHECK(std::abs(p(x + 1.0) - p(x)) <= 1e-14);
    }
    CHECK(p.minus_mean().mean() == doctest::Approx(0.0).epsilon(1e-15));
    PeriodicFn s = p.shifted(0.1);
    CHECK(std::abs(s(0.3) - f(0.2)) <= 1e-13);
    CHECK(p.norm0(2) >= p.deriv_sup(1));
    CHECK_THROWS_AS(PeriodicFn(1.0, 0.0, std::vector<double>(7, 0.0)), std::invalid_argument);
}

TEST_CASE("time-energy charts") {
    LinkGeometry g;
    SuitableModel m0(g);
    TimeEnergyChart id(m0, LinkSide::A);
    CHECK(id.is_identity());
    Vec2 p{-3.4, 1.02};
    CHECK((id(p) - p).norm() == 0.0);

    std::mt19937_64 rng(11);
    SuitableModel m(g, random_perturbation(g, {}, rng));
    for (LinkSide side : {LinkSide::A, LinkSide::B}) {
        TimeEnergyChart c(m, side);
        CHECK(c.conjugacy_residual() <= 1e-8);
        CHECK(c.area_defect() <= 1e-9);
        CHECK(c.c1_distance() <= 0.1);
        // smooth across the seam between the formula strip and its recursive extension
        const double seam = side == LinkSide::A ? g.xa - g.tau : g.xb + g.tau;
        for (double y : {g.y1 - 0.02, g.y1, g.y1 + 0.03}) {
            Vec2 l{seam - 1e-9, y}, r{seam + 1e-9, y};
            CHECK((c(l) - c(r)).norm() <= 1e-8);
            CHECK((c.jacobian(l) - c.jacobian(r)).max_abs() <= 1e-6);
        }
        Vec2 q = c({seam + 0.3, g.y1 + 0.01});
        CHECK((c(c.inverse(q)) - q).norm() <= 1e-12);
    }

    MapDescriptor big = hamiltonian_bump_perturbation(strip_bump(g, LinkSide::A), RealFn::polynomial({0.0, 1.0}), 0.5);
    CHECK_THROWS_AS(TimeEnergyChart(SuitableModel(g, big), LinkSide::A), std::invalid_argument);
}

TEST_CASE("splitting functions at the unperturbed model") {
    LinkGeometry g;
    SuitableModel m0(g);
    SplittingPipeline pa(m0, LinkSide::A), pb(m0, LinkSide::B);

    CHECK(pa(RealFn::zero()).sup_norm() <= 1e-14);
    CHECK(pb(RealFn::zero()).sup_norm() <= 1e-14);

    RealFn s = RealFn::trig(g.tau, {0.0}, {1.0});
    PeriodicFn ms = pa(s, false);
    CHECK(sup_diff_closed(ms, [&](double x) { return 2.0 * std::sin(2 * kPi * x / g.tau); }) <= 1e-6);
    CHECK_THROWS_AS(pa(s), std::invalid_argument);

    std::mt19937_64 rng(5);
    const RealFn ra = partition_bump(g, LinkSide::A), rb = partition_bump(g, LinkSide::B);
    for (int k = 0; k < 3; ++k) {
        RealFn p = random_trig_polynomial(g.tau, 8, 1e-2, rng, false);
        RealFn psa = ra * p, psb = rb * p;
        CHECK(sup_diff_closed(pa(psa), [&](double x) { return splitting_a_closed_form(g, psa, x); }) <= 1e-6);
        CHECK(sup_diff_closed(pb(psb), [&](double x) { return splitting_b_closed_form(g, psb, x); }) <= 1e-6);
        // operator form with the partition bump
        CHECK(sup_diff_closed(pb(psb), [&](double x) { return splitting_b_operator(g, p, x); }) <= 1e-6);
    }
}

TEST_CASE("unstable side is independent of psi") {
    LinkGeometry g;
    std::mt19937_64 rng(3);
    SuitableModel m(g, random_perturbation(g, {}, rng));
    SplittingPipeline pa(m, LinkSide::A);
    GraphCurve ref = pa.unstable(RealFn::zero());
    for (int k = 0; k < 5; ++k) {
        RealFn psi = partition_bump(g, LinkSide::A) * random_trig_polynomial(g.tau, 8, 1e-2, rng);
        GraphCurve wu = pa.unstable(psi);
        CHECK(sup_diff(wu, ref, g.xa - g.tau, g.xa) <= 1e-10);
    }
}

TEST_CASE("zero mean of M^b with link a intact") {
    LinkGeometry g;
    std::mt19937_64 rng(17);
    PerturbationSpec spec;
    spec.strip_a = false;
    SuitableModel m(g, random_perturbation(g, spec, rng));
    double link_a = 1.0;
    PeriodicFn mb = splitting_b(m, RealFn::zero(), &link_a);
    CHECK(link_a <= 1e-12);
    CHECK(mb.sup_norm() >= 1e-5);
    CHECK(std::abs(mb.mean()) <= 1e-8);
}

TEST_CASE("restoration solvers") {
    LinkGeometry g;
    SuitableModel m0(g);
    Restoration r0 = restore_link_a(m0);
    CHECK(r0.converged);
    CHECK(r0.iterations() == 1);
    CHECK(r0.psi_tilde.sup_norm() == 0.0);
    Restoration r0b = restore_link_b(m0);
    CHECK(r0b.iterations() == 1);

    // vertical shear in the a-strip
    RealFn eta = (strip_bump(g, LinkSide::A) * (RealFn::constant(1.0) + RealFn::trig(g.tau, {0.3}, {0.2}))).scaled(1e-3 / 1.5);
    SuitableModel m(g, shear_map(eta));
    CHECK(link_gap(m, LinkSide::A) >= 1e-4);
    Restoration ra = restore_link_a(m);
    CHECK(ra.done());
    CHECK(ra.iterations() <= 30);
    CHECK(ra.final_sup() <= 1e-8);
    CHECK(ra.max_ratio() <= 0.5);
    SuitableModel restored = apply_restoration(m, ra.psi);
    CHECK(link_gap(restored, LinkSide::A) <= 1e-7);

    PeriodicFn bad = PeriodicFn::sample([](double x) { return 1e-3 * std::cos(2 * kPi * x); }, g.tau, g.xb);
    CHECK(contraction_factor_b(m0, bad) <= 0.6);
}

TEST_CASE("manifold growth") {
    MapDescriptor lin = affine_map({2.0, 0.0, 0.0, 0.5}, {0.0, 0.0});
    SaddleData s = saddle_from_jacobian({0.0, 0.0}, lin.jacobian({0.0, 0.0}));
    GrownManifold w = manifold_grow(lin, s, 1, 1.0);
    CHECK(w.curve.x1() >= 1.0);
    for (int i = 0; i < w.curve.size(); ++i) CHECK(w.curve.value(i) == 0.0);

    // (x, y) -> (2x, y/2 + x^2) has W^u = {y = 2x^2/7}
    MapDescriptor f;
    f.name = "quad";
    f.rule = [](Vec2 p) { return Vec2{2.0 * p.x, 0.5 * p.y + p.x * p.x}; };
    f.jac_rule = [](Vec2 p) { return Mat2{2.0, 0.0, 2.0 * p.x, 0.5}; };
    GrownManifold q = manifold_grow(f, saddle_from_jacobian({0, 0}, f.jacobian({0, 0})), -1, 1.5);
    CHECK(q.invariance_defect <= 1e-8);
    for (int i = 0; i < q.curve.size(); ++i) {
        double x = q.curve.node(i);
        CHECK(std::abs(q.curve.value(i) - 2.0 * x * x / 7.0) <= 1e-8);
    }

    // saddle extension of the translation piece: the fundamental interval stays on y = y1
    LinkGeometry g;
    MapDescriptor ext = affine_map({2.0, 0.0, 0.0, 0.5}, {-g.xa - g.tau, 0.5 * g.y1});
    Vec2 P{g.xa + g.tau, g.y1};
    CHECK((ext(P) - P).norm() <= 1e-15);
    GrownManifold st = manifold_grow(ext, saddle_from_jacobian(P, ext.jacobian(P)), -1, g.tau);
    for (int i = 0; i < st.curve.size(); ++i) CHECK(std::abs(st.curve.value(i) - g.y1) <= 1e-14);
}
