#include "islab/links.hpp"

#include "islab/hamiltonian.hpp"

#include <algorithm>
#include <limits>

namespace islab {

double smoothstep7(double t, int k) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return k == 0 ? 1.0 : 0.0;
    const double s = 1.0 - t;
    switch (k) {
        case 0: return t * t * t * t * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t);
        case 1: return 140.0 * t * t * t * s * s * s;
        case 2: return 420.0 * t * t * s * s * (1.0 - 2.0 * t);
        case 3: return 840.0 * t * s * (1.0 - 5.0 * t + 5.0 * t * t);
        case 4: return 840.0 * (1.0 - 12.0 * t + 30.0 * t * t - 20.0 * t * t * t);
        default: return 0.0;
    }
}

RealFn smoothstep7_fn() { return RealFn([](double t, int k) { return smoothstep7(t, k); }); }

// ------------------------------------------------------------ geometry and model

std::pair<double, double> LinkGeometry::support(LinkSide s) const {
    if (s == LinkSide::A) return {xa - 2.0 * tau + delta, xa - delta};
    return {xb + delta, xb + 2.0 * tau - delta};
}

std::string LinkGeometry::violation() const {
    if (!(tau > 0.0)) return "tau must be positive";
    if (!(xa + tau < xb - tau)) return "strips must be disjoint: x_a + tau < x_b - tau";
    if (!(y2 < y1)) return "y2 must be below y1";
    if (!(delta > margin() && delta < 0.25 * tau)) return "delta must lie in (0.05 tau, 0.25 tau)";
    return {};
}

SuitableModel::SuitableModel(LinkGeometry g, MapDescriptor perturbation) : g_(g), G_(std::move(perturbation)) {
    if (auto v = g_.violation(); !v.empty()) throw std::invalid_argument("inconsistent link geometry: " + v);
    if (!G_.has_inverse()) throw std::invalid_argument("perturbation needs an exact inverse");
    if (!G_.symplectic) throw std::invalid_argument("perturbation must be symplectic");
    perturbed_ = G_.name != "id";
}

MapDescriptor SuitableModel::unperturbed(Leg leg) const {
    const double t = g_.tau;
    switch (leg) {
        case Leg::Ta: return affine_map(Mat2::identity(), {-t, 0.0}, "Ta");
        case Leg::Tb: return affine_map(Mat2::identity(), {t, 0.0}, "Tb");
        case Leg::TX: return affine_map(Mat2::identity(), {t, -0.5 * (g_.y1 - g_.y2)}, "TX");
        case Leg::TT1: {
            const Vec2 th = g_.theta();
            return affine_map({-0.5, 0.0, 0.0, -2.0}, {th.x + 1.5 * t, th.y - (g_.y1 - g_.y2)}, "TT1");
        }
        case Leg::Td4: return affine_map(Mat2::identity(), {-0.5 * t, 0.0}, "Td4");
    }
    throw std::logic_error("unknown leg");
}

MapDescriptor SuitableModel::map(Leg leg) const {
    MapDescriptor l = unperturbed(leg);
    if (!perturbed_) return l;
    MapDescriptor f = compose(G_, l);
    f.name = "F_" + l.name;
    return f;
}

std::vector<Leg> SuitableModel::b_cycle() { return {Leg::Tb, Leg::Tb, Leg::TX, Leg::TT1, Leg::Td4, Leg::Td4, Leg::Td4}; }

MapDescriptor SuitableModel::contraction_rule() const {
    const Vec2 th = g_.theta();
    return affine_map({-0.5, 0.0, 0.0, -2.0}, th, "F0^4");
}

GraphCurve SuitableModel::inflow_stable_a(int n) const {
    const double m = g_.margin();
    return GraphCurve::constant(g_.xa - 3.0 * g_.tau - m, g_.xa - 2.0 * g_.tau + m, g_.y1, n);
}

GraphCurve SuitableModel::inflow_unstable_a(int n) const {
    const double m = g_.margin();
    return GraphCurve::constant(g_.xa - m, g_.xa + g_.tau + m, g_.y1, n);
}

GraphCurve SuitableModel::inflow_stable_b(int n) const {
    const double m = g_.margin();
    return GraphCurve::constant(g_.xb - m, g_.xb + 0.5 * g_.tau + m, g_.y2, n);
}

GraphCurve SuitableModel::inflow_unstable_b(int n) const {
    const double m = g_.margin();
    return GraphCurve::constant(g_.xb - g_.tau - m, g_.xb + m, g_.y1, n);
}

SuitableModel build_suitable_model(const LinkGeometry& g) { return SuitableModel(g); }

RealFn partition_bump(const LinkGeometry& g, LinkSide side) {
    const double e0 = side == LinkSide::A ? g.xa - 2.0 * g.tau + g.delta : g.xb + g.delta;
    const double w = g.tau - 2.0 * g.delta, tau = g.tau;
    // rho(x) = s(u(x)) - s(u(x - tau)); rho(x - tau) then reuses the identical rounded argument x - tau
    return RealFn([e0, w, tau](double x, int k) {
        const double sc = std::pow(1.0 / w, k);
        return sc * (smoothstep7((x - e0) / w, k) - smoothstep7(((x - tau) - e0) / w, k));
    });
}

RealFn strip_bump(const LinkGeometry& g, LinkSide side) {
    auto [s0, s1] = g.support(side);
    const double r = 0.25 * (s1 - s0);
    RealFn s = smoothstep7_fn();
    return s.affine_arg(1.0 / r, -s0 / r) * s.affine_arg(-1.0 / r, s1 / r);
}

MapDescriptor hamiltonian_bump_perturbation(RealFn b, RealFn c, double eps, int steps) {
    HamiltonianSystem sys;
    sys.H = [b, c, eps](Vec2 p) { return eps * b(p.x) * c(p.y); };
    sys.grad = [b, c, eps](Vec2 p) { return Vec2{eps * b.deriv(p.x) * c(p.y), eps * b(p.x) * c.deriv(p.y)}; };
    sys.hessian = [b, c, eps](Vec2 p) {
        const double bxy = eps * b.deriv(p.x) * c.deriv(p.y);
        return Mat2{eps * b.deriv(p.x, 2) * c(p.y), bxy, bxy, eps * b(p.x) * c.deriv(p.y, 2)};
    };
    sys.steps = steps;
    sys.order = 2;
    MapDescriptor m = hamiltonian_time_map(sys, 1.0);
    m.name = "G";
    return m;
}

RealFn random_trig_polynomial(double tau, int harmonics, double amplitude, std::mt19937_64& rng, bool zero_mean) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> a(harmonics), b(harmonics);
    double c0 = zero_mean ? 0.0 : u(rng);
    double total = std::abs(c0);
    for (int j = 0; j < harmonics; ++j) {
        a[j] = u(rng);
        b[j] = u(rng);
        total += std::abs(a[j]) + std::abs(b[j]);
    }
    const double s = total > 0.0 ? amplitude / total : 0.0;
    for (int j = 0; j < harmonics; ++j) {
        a[j] *= s;
        b[j] *= s;
    }
    return RealFn::trig(tau, a, b) + RealFn::constant(c0 * s);
}

MapDescriptor random_perturbation(const LinkGeometry& g, const PerturbationSpec& spec, std::mt19937_64& rng) {
    if (!spec.strip_a && !spec.strip_b) return identity_map();
    RealFn b = RealFn::zero();
    for (LinkSide side : {LinkSide::A, LinkSide::B}) {
        if ((side == LinkSide::A && !spec.strip_a) || (side == LinkSide::B && !spec.strip_b)) continue;
        RealFn mod = RealFn::constant(1.0) + random_trig_polynomial(g.tau, spec.harmonics, 0.5, rng);
        b = b + (strip_bump(g, side) * mod).scaled(1.0 / 1.5);
    }
    RealFn c = random_trig_polynomial(4.0 * (g.y1 - g.y2), spec.harmonics, 1.0, rng, false);
    return hamiltonian_bump_perturbation(b, c, spec.size);
}

double perturbation_c1_distance(const MapDescriptor& G, const LinkGeometry& g, int samples) {
    double best = 0.0;
    const double x0 = g.xa - 3.0 * g.tau, x1 = g.xb + 4.0 * g.tau;
    for (double yc : {g.y1, g.ym(), g.y2}) {
        for (int i = 0; i <= samples; ++i) {
            for (int j = -1; j <= 1; ++j) {
                Vec2 p{x0 + (x1 - x0) * i / samples, yc + 0.05 * j};
                best = std::max(best, (G(p) - p).norm());
                best = std::max(best, (G.jacobian(p) - Mat2::identity()).max_abs());
            }
        }
    }
    return best;
}

// ------------------------------------------------------------ time-energy chart

TimeEnergyChart::TimeEnergyChart(const SuitableModel& model, LinkSide side)
    : model_(model), side_(side), leg_(side == LinkSide::A ? Leg::Ta : Leg::Tb) {
    const LinkGeometry& g = model_.geometry();
    F_ = model_.map(leg_);
    Finv_ = F_.inverse_map();
    F0_ = model_.unperturbed(leg_);
    Ginv_ = model_.perturbation().inverse_map();
    const double e = 0.1 * g.tau;
    ramp_w_ = g.tau - 2.0 * e;
    ramp_lo_ = side_ == LinkSide::A ? g.xa - e : g.xb + e;
    if (!model_.perturbed()) return;
    const double c1 = perturbation_c1_distance(model_.perturbation(), g, 16);
    if (c1 > 0.1) throw std::invalid_argument("perturbation is not C1-close to the unperturbed map: distance " + std::to_string(c1));
    const double xl = side_ == LinkSide::A ? g.xa - g.tau : g.xb;
    for (int i = 0; i <= 32; ++i)
        for (int j = -2; j <= 2; ++j) {
            Vec2 p{xl + g.tau * i / 32.0, g.y1 + 0.05 * j};
            if (!(blend_jacobian(p).det() > 0.0)) throw SolverError("time-energy chart: blend map is not invertible on the strip");
        }
}

double TimeEnergyChart::bump(double x, int k) const {
    if (side_ == LinkSide::A) {
        const double t = (ramp_lo_ - x) / ramp_w_;
        return smoothstep7(t, k) * std::pow(-1.0 / ramp_w_, k);
    }
    const double t = (x - ramp_lo_) / ramp_w_;
    return smoothstep7(t, k) / std::pow(ramp_w_, k);
}

bool TimeEnergyChart::recursive(double x) const {
    const LinkGeometry& g = model_.geometry();
    return side_ == LinkSide::A ? x < g.xa - g.tau : x > g.xb + g.tau;
}

Vec2 TimeEnergyChart::blend(Vec2 p) const {
    const double r = bump(p.x);
    if (r == 0.0) return p;
    return p + (Ginv_(p) - p) * r;
}

Mat2 TimeEnergyChart::blend_jacobian(Vec2 p) const {
    const double r = bump(p.x), dr = bump(p.x, 1);
    if (r == 0.0 && dr == 0.0) return Mat2::identity();
    Mat2 dg;
    Vec2 d = Ginv_.eval_jac(p, &dg) - p;
    Mat2 j = Mat2::identity() * (1.0 - r) + dg * r;
    j.a11 += dr * d.x;
    j.a21 += dr * d.y;
    return j;
}

double TimeEnergyChart::blend_det(double x, double y) const { return blend_jacobian({x, y}).det(); }

double TimeEnergyChart::sigma(double x, double y, double* sx, double* sy) const {
    const double y1 = model_.geometry().y1;
    const double r = bump(x), dr = bump(x, 1);
    if ((r == 0.0 && dr == 0.0) || (r == 1.0 && dr == 0.0)) {
        // phi0 is the identity or G^-1 here, both area-preserving
        if (sx) *sx = 0.0;
        if (sy) *sy = 1.0;
        return y;
    }
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(y - y1) / 0.01)));
    const double h = (y - y1) / n;
    const double fd = 1e-6;
    const bool want_x = sx != nullptr;
    // RK4 for d sigma / dy = 1 / D(x, sigma), sigma(y1) = y1, with D = det D phi0, and its x-variation
    auto rhs = [&](double s, double s_x, double* ds, double* dsx) {
        const double D = blend_det(x, s);
        *ds = 1.0 / D;
        if (want_x) {
            const double Dx = (blend_det(x + fd, s) - blend_det(x - fd, s)) / (2.0 * fd);
            const double Ds = (blend_det(x, s + fd) - blend_det(x, s - fd)) / (2.0 * fd);
            *dsx = -(Dx + Ds * s_x) / (D * D);
        }
    };
    double s = y1, s_x = 0.0;
    for (int i = 0; i < n; ++i) {
        double k1, k2, k3, k4, l1 = 0.0, l2 = 0.0, l3 = 0.0, l4 = 0.0;
        rhs(s, s_x, &k1, &l1);
        rhs(s + 0.5 * h * k1, s_x + 0.5 * h * l1, &k2, &l2);
        rhs(s + 0.5 * h * k2, s_x + 0.5 * h * l2, &k3, &l3);
        rhs(s + h * k3, s_x + h * l3, &k4, &l4);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s_x += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    }
    if (sx) *sx = s_x;
    if (sy) *sy = 1.0 / blend_det(x, s);
    return s;
}

Vec2 TimeEnergyChart::formula(Vec2 p, Mat2* jac) const {
    double sx = 0.0, sy = 1.0;
    const double s = sigma(p.x, p.y, jac ? &sx : nullptr, jac ? &sy : nullptr);
    const Vec2 q{p.x, s};
    if (jac) *jac = blend_jacobian(q) * Mat2{1.0, 0.0, sx, sy};
    return blend(q);
}

Vec2 TimeEnergyChart::eval(Vec2 p, Mat2* jac) const {
    if (!model_.perturbed()) {
        if (jac) *jac = Mat2::identity();
        return p;
    }
    if (!recursive(p.x)) return formula(p, jac);
    // phi = F0 o phi o F^-1 outside the formula strip
    Mat2 dfinv, inner;
    const Vec2 q = jac ? Finv_.eval_jac(p, &dfinv) : Finv_(p);
    const Vec2 r = eval(q, jac ? &inner : nullptr);
    if (jac) *jac = F0_.jacobian(r) * inner * dfinv;
    return F0_(r);
}

Vec2 TimeEnergyChart::operator()(Vec2 p) const { return eval(p, nullptr); }

Mat2 TimeEnergyChart::jacobian(Vec2 p) const {
    Mat2 j;
    eval(p, &j);
    return j;
}

Vec2 TimeEnergyChart::inverse(Vec2 q) const {
    if (!model_.perturbed()) return q;
    MapDescriptor fwd;
    fwd.name = "phi";
    fwd.rule = [this](Vec2 p) { return eval(p, nullptr); };
    fwd.jac_rule = [this](Vec2 p) { return jacobian(p); };
    return invert_at(fwd, q, q, {60, 1e-13});
}

MapDescriptor TimeEnergyChart::descriptor() const {
    MapDescriptor m;
    m.name = side_ == LinkSide::A ? "phi_a" : "phi_b";
    auto self = std::make_shared<const TimeEnergyChart>(*this);
    m.rule = [self](Vec2 p) { return (*self)(p); };
    m.jac_rule = [self](Vec2 p) { return self->jacobian(p); };
    m.eval_jac_rule = [self](Vec2 p, Mat2* j) { return self->eval(p, j); };
    m.inverse_rule = [self](Vec2 q) { return self->inverse(q); };
    return m;
}

double TimeEnergyChart::conjugacy_residual(int samples) const {
    const LinkGeometry& g = model_.geometry();
    const double xl = side_ == LinkSide::A ? g.xa - g.tau : g.xb;
    double best = 0.0;
    for (int i = 0; i <= samples; ++i)
        for (int j = -2; j <= 2; ++j) {
            Vec2 p{xl + g.tau * i / samples, g.y1 + 0.02 * j};
            best = std::max(best, ((*this)(F_(p)) - F0_((*this)(p))).norm());
        }
    return best;
}

double TimeEnergyChart::area_defect(int samples) const {
    const LinkGeometry& g = model_.geometry();
    const double xl = side_ == LinkSide::A ? g.xa - 2.0 * g.tau : g.xb;
    MapDescriptor d = descriptor();
    double best = 0.0;
    for (int i = 0; i <= samples; ++i)
        for (int j = -2; j <= 2; ++j) {
            // stay off the seam between the formula strip and its image
            Vec2 p{xl + 0.01 + (2.0 * g.tau - 0.02) * (i + 0.5) / (samples + 1), g.y1 + 0.02 * j};
            best = std::max(best, std::abs(finite_difference_jacobian(d, p, 1e-4).det() - 1.0));
        }
    return best;
}

double TimeEnergyChart::c1_distance(int samples) const {
    const LinkGeometry& g = model_.geometry();
    const double xl = side_ == LinkSide::A ? g.xa - 2.0 * g.tau : g.xb;
    double best = 0.0;
    for (int i = 0; i <= samples; ++i)
        for (int j = -2; j <= 2; ++j) {
            Vec2 p{xl + 2.0 * g.tau * i / samples, g.y1 + 0.02 * j};
            Mat2 jac;
            Vec2 q = eval(p, &jac);
            best = std::max({best, (q - p).norm(), (jac - Mat2::identity()).max_abs()});
        }
    return best;
}

TimeEnergyChart time_energy_chart(const SuitableModel& model, LinkSide side) { return TimeEnergyChart(model, side); }

// ------------------------------------------------------------ splitting functions

SplittingPipeline::SplittingPipeline(const SuitableModel& model, LinkSide side, int samples)
    : model_(model), side_(side), samples_(samples), chart_(model, side) {
    const MapDescriptor phi = chart_.descriptor();
    const MapDescriptor phi_inv = phi.inverse_map();
    if (side_ == LinkSide::A) {
        const MapDescriptor F = model_.map(Leg::Ta);
        const MapDescriptor Finv = F.inverse_map();
        unstable_base_ = graph_transform(F, model_.inflow_unstable_a());
        GraphCurve ls = graph_transform(Finv, graph_transform(Finv, model_.inflow_stable_a()));
        GraphCurve ws = graph_transform(phi, ls);
        stable_base_ = graph_transform(F, graph_transform(phi_inv, ws));
    } else {
        unstable_base_ = graph_transform(model_.map(Leg::Tb), model_.inflow_unstable_b());
        GraphCurve c = model_.inflow_stable_b();
        const auto cycle = SuitableModel::b_cycle();
        for (auto it = cycle.rbegin(); it != cycle.rend(); ++it) c = graph_transform(model_.map(*it).inverse_map(), c);
        c = graph_transform(phi_inv, graph_transform(phi, c));
        for (Leg leg : cycle) c = graph_transform(model_.map(leg), c);
        stable_base_ = c;
    }
    unstable_chart_ = graph_transform(phi, unstable_base_);
}

double SplittingPipeline::origin() const {
    const LinkGeometry& g = model_.geometry();
    return side_ == LinkSide::A ? g.xa - g.tau : g.xb;
}

GraphCurve SplittingPipeline::unstable(const RealFn& psi) const {
    const GraphCurve c = shear_graph(shear_graph(unstable_base_, psi), psi.scaled(-1.0));
    return graph_transform(chart_.descriptor(), c);
}

GraphCurve SplittingPipeline::stable(const RealFn& psi) const {
    const RealFn minus = psi.scaled(-1.0);
    GraphCurve c = shear_graph(stable_base_, minus);
    if (side_ == LinkSide::A) {
        c = shear_graph(graph_transform(model_.map(Leg::Ta).inverse_map(), c), minus);
    } else {
        const auto cycle = SuitableModel::b_cycle();
        for (auto it = cycle.rbegin(); it != cycle.rend(); ++it)
            c = shear_graph(graph_transform(model_.map(*it).inverse_map(), c), minus);
    }
    return graph_transform(chart_.descriptor(), c);
}

void SplittingPipeline::check_support(const RealFn& psi) const {
    const LinkGeometry& g = model_.geometry();
    auto [s0, s1] = g.support(side_);
    const double lo = s0 - 3.0 * g.tau, hi = s1 + 3.0 * g.tau;
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        if (x > s0 && x < s1) continue;
        if (psi(x) != 0.0)
            throw std::invalid_argument("psi support violation at x = " + std::to_string(x) + " (support [" + std::to_string(s0) + ", " + std::to_string(s1) + "])");
    }
}

PeriodicFn SplittingPipeline::operator()(const RealFn& psi, bool enforce_support) const {
    if (enforce_support) check_support(psi);
    const GraphCurve& wu = unstable_chart_;
    const GraphCurve ws = stable(psi);
    const double x0 = origin(), tau = model_.geometry().tau;
    if (!wu.covers(x0, x0 + tau) || !ws.covers(x0, x0 + tau))
        throw DomainError("splitting pipeline: curves do not cover the fundamental interval", {x0, 0.0});
    std::vector<double> m(samples_);
    for (int j = 0; j < samples_; ++j) {
        const double x = x0 + j * tau / samples_;
        m[j] = wu(x) - ws(x);
    }
    return {tau, x0, std::move(m)};
}

PeriodicFn splitting_a(const SuitableModel& model, const RealFn& psi) { return SplittingPipeline(model, LinkSide::A)(psi); }

PeriodicFn splitting_b(const SuitableModel& model, const RealFn& psi, double* link_a_defect) {
    if (link_a_defect) *link_a_defect = link_gap(model, LinkSide::A);
    return SplittingPipeline(model, LinkSide::B)(psi);
}

double splitting_a_closed_form(const LinkGeometry& g, const RealFn& psi, double x) { return psi(x) + psi(x - g.tau); }

double splitting_b_closed_form(const LinkGeometry& g, const RealFn& psi, double x) {
    const double b = 3.0 * g.xb, t = g.tau;
    return psi(x) + psi(x + t) -
           0.5 * (psi((b + t - x) / 2) + psi((b + 2 * t - x) / 2) + psi((b + 3 * t - x) / 2) + psi((b + 4 * t - x) / 2));
}

double splitting_b_operator(const LinkGeometry& g, const RealFn& psi_tilde, double x) {
    const double b = 3.0 * g.xb, t = g.tau;
    return psi_tilde(x) - 0.5 * (psi_tilde((b + t - x) / 2) + psi_tilde((b + 2 * t - x) / 2));
}

// ------------------------------------------------------------ restoration

double Restoration::max_ratio() const {
    double best = 0.0;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const double prev = side == LinkSide::A ? trace[i - 1].sup_residual : trace[i - 1].norm0_residual;
        const double cur = side == LinkSide::A ? trace[i].sup_residual : trace[i].norm0_residual;
        if (prev > 0.0) best = std::max(best, cur / prev);
    }
    return best;
}

namespace {

Restoration restore(const SuitableModel& model, LinkSide side, const RestoreOptions& opt) {
    const LinkGeometry& g = model.geometry();
    SplittingPipeline pipe(model, side);
    const RealFn rho = partition_bump(g, side);
    Restoration out;
    out.side = side;
    out.psi_tilde = PeriodicFn::zero(g.tau, pipe.origin());
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opt.max_iter; ++it) {
        out.psi = rho * out.psi_tilde.as_fn();
        const PeriodicFn m = pipe(out.psi);
        RestoreStep step{it, m.sup_norm(), m.norm0(2), m.mean()};
        out.trace.push_back(step);
        const double r = side == LinkSide::A ? step.sup_residual : step.norm0_residual;
        if (r <= opt.tol) {
            out.converged = true;
            break;
        }
        if (r >= prev) {
            if (r <= opt.floor) {
                out.stalled = true;
                break;
            }
            throw SolverError("link restoration: non-contraction at iteration " + std::to_string(it) + " (residual " +
                              std::to_string(r) + " after " + std::to_string(prev) + ")");
        }
        prev = r;
        if (it == opt.max_iter) break;
        if (side == LinkSide::B) {
            if (std::abs(step.mean) > opt.mean_limit)
                throw SolverError("link restoration b: splitting function has mean " + std::to_string(step.mean) + "; link a is not intact");
            out.psi_tilde = (out.psi_tilde - m).minus_mean();
        } else {
            out.psi_tilde = out.psi_tilde - m;
        }
    }
    return out;
}

}  // namespace

Restoration restore_link_a(const SuitableModel& model, const RestoreOptions& opt) { return restore(model, LinkSide::A, opt); }

Restoration restore_link_b(const SuitableModel& model, const RestoreOptions& opt) { return restore(model, LinkSide::B, opt); }

SuitableModel apply_restoration(const SuitableModel& model, const RealFn& psi) {
    MapDescriptor G = compose(shear_map(psi), model.perturbation());
    G.name = "G";
    return model.with_perturbation(G);
}

double link_gap(const SuitableModel& model, LinkSide side) {
    SplittingPipeline pipe(model, side);
    const RealFn zero = RealFn::zero();
    const GraphCurve wu = pipe.unstable(zero), ws = pipe.stable(zero);
    const double x0 = pipe.origin(), tau = model.geometry().tau;
    double best = 0.0;
    const int n = 1024;
    for (int i = 0; i <= n; ++i) {
        const double x = x0 + tau * i / n;
        best = std::max(best, std::abs(wu(x) - ws(x)));
    }
    return best;
}

double contraction_factor_b(const SuitableModel& unperturbed, const PeriodicFn& psi_tilde) {
    SplittingPipeline pipe(unperturbed, LinkSide::B);
    const RealFn psi = partition_bump(unperturbed.geometry(), LinkSide::B) * psi_tilde.as_fn();
    const PeriodicFn m = pipe(psi);
    const PeriodicFn bar = psi_tilde - m;
    return bar.norm0(2) / psi_tilde.norm0(2);
}

// ------------------------------------------------------------ invariant manifolds

GrownManifold manifold_grow(const MapDescriptor& f, const SaddleData& saddle, int side, double arclength, int n) {
    if (!(std::abs(saddle.lambda_u) > 1.0 && std::abs(saddle.lambda_s) < 1.0)) throw SolverError("manifold_grow: fixed point is not hyperbolic");
    if (!(arclength > 0.0)) throw std::invalid_argument("manifold_grow: arclength must be positive");
    const MapDescriptor step = saddle.lambda_u > 0.0 ? f : compose(f, f);
    const Vec2 e = saddle.e_u * (side >= 0 ? 1.0 : -1.0);
    if (std::abs(e.x) < 1e-8) throw DomainError("manifold_grow: unstable direction is vertical", saddle.point);
    const double r0 = 1e-6 * arclength;
    const Vec2 p = saddle.point, q = saddle.point + e * r0;
    const double slope = e.y / e.x;
    const double xa = std::min(p.x, q.x), xb = std::max(p.x, q.x);
    const RealFn line = RealFn::polynomial({p.y - slope * p.x, slope});
    GrownManifold out;
    out.curve = GraphCurve::from_function(xa, xb, line, n);
    auto length = [](const GraphCurve& c) {
        double s = 0.0;
        for (int i = 1; i < c.size(); ++i) s += (c.point(i) - c.point(i - 1)).norm();
        return s;
    };
    while (length(out.curve) < arclength) {
        if (++out.iterations > 400) throw SolverError("manifold_grow: segment does not grow");
        out.curve = graph_transform(step, out.curve);
        if (!step.domain.contains(out.curve.point(0)) || !step.domain.contains(out.curve.point(out.curve.size() - 1)))
            throw DomainError("manifold_grow: segment leaves the domain", out.curve.point(0));
    }
    for (int i = 0; i < out.curve.size(); ++i) {
        const Vec2 img = step(out.curve.point(i));
        if (img.x < out.curve.x0() || img.x > out.curve.x1()) continue;
        out.invariance_defect = std::max(out.invariance_defect, std::abs(img.y - out.curve(img.x)));
    }
    return out;
}

}  // namespace islab
