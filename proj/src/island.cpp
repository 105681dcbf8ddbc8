#include "islab/island.hpp"

#include <algorithm>
#include <memory>
#include <numbers>
#include <random>

namespace islab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Mat2 outer(Vec2 a, Vec2 b) { return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y}; }

Vec2 reduce(Vec2 p) { return {wrap01(p.x), wrap01(p.y)}; }

Vec2 local(Vec2 p, Vec2 c) { return {wrap_half(p.x - c.x), wrap_half(p.y - c.y)}; }

}  // namespace

PolarPoint polar_chart(Vec2 p, Vec2 center) {
    Vec2 z = p - center;
    if (z.x == 0.0 && z.y == 0.0) throw DomainError("polar chart is undefined at the center", p);
    double th = std::atan2(z.y, z.x);
    if (th < 0.0) th += kTwoPi;
    return {0.5 * z.norm2(), th};
}

Vec2 polar_chart_inverse(PolarPoint q, Vec2 center) {
    double r = std::sqrt(2.0 * q.rho);
    return center + Vec2{r * std::cos(q.theta), r * std::sin(q.theta)};
}

Mat2 polar_chart_jacobian(Vec2 p, Vec2 center) {
    Vec2 z = p - center;
    double s = z.norm2();
    if (s == 0.0) throw DomainError("polar chart is undefined at the center", p);
    return {z.x, z.y, -z.y / s, z.x / s};
}

double smoothstep5(double t, int k) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return k == 0 ? 1.0 : 0.0;
    switch (k) {
        case 0: return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        case 1: return 30.0 * t * t * (1.0 - t) * (1.0 - t);
        case 2: return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
        case 3: return 60.0 * (1.0 - 6.0 * t + 6.0 * t * t);
        default: return k == 4 ? 60.0 * (12.0 * t - 6.0) : (k == 5 ? 720.0 : 0.0);
    }
}

// ------------------------------------------------------------ profile

SurgeryProfile SurgeryProfile::make(double delta, double epsilon, double rho0) {
    SurgeryProfile p;
    p.delta = delta;
    p.epsilon = epsilon;
    p.rho0 = rho0 > 0.0 ? rho0 : delta * delta / 4.0;
    return p;
}

double SurgeryProfile::psi(double rho, int k) const {
    const double w = rho_b() - rho_a();
    const double t = (rho - rho_a()) / w;
    const double half = 0.5 * kappa();
    switch (k) {
        case 0: return rho - half * (1.0 - smoothstep5(t));
        case 1: return 1.0 + half * smoothstep5(t, 1) / w;
        default: return half * smoothstep5(t, k) / std::pow(w, k);
    }
}

double SurgeryProfile::psi_inverse(double r) const {
    if (r < 0.0) throw DomainError("psi inverse of a negative radius", {r, 0.0});
    if (r <= rho_a() - rho_link()) return r + rho_link();
    if (r >= rho_b()) return r;
    double lo = rho_a(), hi = rho_b();
    double x = std::clamp(r + 0.5 * rho_link(), lo, hi);
    for (int it = 0; it < 100; ++it) {
        double f = psi(x) - r;
        if (f > 0.0) hi = x;
        else lo = x;
        double nx = x - f / psi(x, 1);
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (std::abs(nx - x) <= 1e-17 || hi - lo <= 1e-17) return nx;
        x = nx;
    }
    return x;
}

double SurgeryProfile::xi(double rho, int k) const {
    const double w = rho1() - rho0;
    return smoothstep5((rho - rho0) / w, k) / std::pow(w, k);
}

std::string SurgeryProfile::violation() const {
    if (!(delta > 0.0)) return "inner radius must be positive";
    if (!(delta < epsilon)) return "inner radius must be < outer";
    if (!(epsilon < 0.25)) return "outer radius must be < 0.25 so that the discs V_i' around the 2-torsion points are disjoint";
    if (!(rho0 > 0.0 && rho0 < rho_link())) return "rho0 must lie in (0, delta^2/2)";
    return {};
}

// ------------------------------------------------------------ island map

IslandMap::IslandMap(SurgeryProfile profile, int flow_steps, int flow_order) : profile_(profile) {
    if (auto v = profile_.violation(); !v.empty()) throw std::invalid_argument(v);
    centers_ = {Vec2{0.0, 0.0}, Vec2{0.5, 0.0}, Vec2{0.0, 0.5}, Vec2{0.5, 0.5}};
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    const double n = std::sqrt(1.0 + g * g);
    eu_ = {1.0 / n, g / n};
    es_ = {-g / n, 1.0 / n};

    const SurgeryProfile pr = profile_;
    const Vec2 eu = eu_, es = es_;
    auto gfun = [pr](double rho, int k) {
        if (rho <= pr.rho0) return 0.0;
        const double kap = pr.kappa();
        const double a0 = 1.0 - kap / (2.0 * rho), a1 = kap / (2.0 * rho * rho), a2 = -kap / (rho * rho * rho);
        const double x0 = pr.xi(rho), x1 = pr.xi(rho, 1), x2 = pr.xi(rho, 2);
        if (k == 0) return a0 * x0;
        if (k == 1) return a1 * x0 + a0 * x1;
        return a2 * x0 + 2.0 * a1 * x1 + a0 * x2;
    };
    inner_.steps = flow_steps;
    inner_.order = flow_order;
    inner_.H = [gfun, eu, es](Vec2 z) { return gfun(0.5 * z.norm2(), 0) * z.dot(eu) * z.dot(es); };
    inner_.grad = [gfun, eu, es](Vec2 z) {
        const double rho = 0.5 * z.norm2(), u = z.dot(eu), v = z.dot(es), q = u * v;
        Vec2 dq = eu * v + es * u;
        return z * (gfun(rho, 1) * q) + dq * gfun(rho, 0);
    };
    inner_.hessian = [gfun, eu, es](Vec2 z) {
        const double rho = 0.5 * z.norm2(), u = z.dot(eu), v = z.dot(es), q = u * v;
        Vec2 dq = eu * v + es * u;
        const double g0 = gfun(rho, 0), g1 = gfun(rho, 1), g2 = gfun(rho, 2);
        return outer(z, z) * (g2 * q) + (Mat2::identity() * q + outer(z, dq) + outer(dq, z)) * g1 +
               (outer(eu, es) + outer(es, eu)) * g0;
    };

    if (double d = flow_match_defect(); !(d <= 1e-8))
        throw std::invalid_argument("numeric uv flow does not reproduce A on the boundary of V_i' (defect " +
                                    std::to_string(d) + ")");
}

double IslandMap::flow_match_defect(int samples) const {
    HamiltonianSystem uv;
    const Vec2 eu = eu_, es = es_;
    uv.H = [eu, es](Vec2 z) { return z.dot(eu) * z.dot(es); };
    uv.grad = [eu, es](Vec2 z) { return eu * z.dot(es) + es * z.dot(eu); };
    uv.hessian = [eu, es](Vec2) { return outer(eu, es) + outer(es, eu); };
    uv.steps = std::max(inner_.steps, 200);
    uv.order = 6;
    const Mat2 a = anosov_matrix();
    double worst = 0.0;
    for (int j = 0; j < samples; ++j) {
        double th = kTwoPi * j / samples;
        Vec2 z{profile_.epsilon * std::cos(th), profile_.epsilon * std::sin(th)};
        Vec2 f = hamiltonian_flow(uv, z, anosov_sigma());
        worst = std::max(worst, (f - a.apply(z)).norm());
    }
    return worst;
}

int IslandMap::locate(Vec2 p, Vec2* z) const {
    const double e2 = profile_.epsilon * profile_.epsilon;
    for (int i = 0; i < 4; ++i) {
        Vec2 w = local(p, centers_[i]);
        if (w.norm2() < e2) {
            if (z) *z = w;
            return i;
        }
    }
    return -1;
}

double IslandMap::hole_distance(Vec2 p) const {
    double best = INFINITY;
    for (const auto& c : centers_) best = std::min(best, local(p, c).norm() - profile_.delta);
    return best;
}

double IslandMap::density(Vec2 p) const {
    Vec2 z;
    if (locate(p, &z) < 0) return 1.0;
    double rho = 0.5 * z.norm2();
    if (rho < profile_.rho_link()) return 1.0;
    return profile_.psi(rho, 1);
}

bool IslandMap::closed_form(const Mat2& a, Vec2 z, Vec2* out, Mat2* jac) const {
    const double kap = profile_.kappa();
    const double s = z.norm2();
    const Vec2 w = a.apply(z);
    const double sw = w.norm2();
    if (s == 0.0 || sw == 0.0) return false;
    const double m2 = 1.0 - kap / s + kap / sw;
    if (!(m2 > 0.0)) return false;
    const double m = std::sqrt(m2);
    *out = w * m;
    if (jac) {
        Vec2 gm2 = z * (2.0 * kap / (s * s)) - a.transpose().apply(w) * (2.0 * kap / (sw * sw));
        *jac = a * m + outer(w, gm2 / (2.0 * m));
    }
    return true;
}

Vec2 IslandMap::inner_flow(Vec2 z, double t, Mat2* jac) const { return hamiltonian_flow(inner_, z, t, jac); }

Vec2 IslandMap::psi_local(Vec2 z, Mat2* jac) const {
    const double s = z.norm2(), rho = 0.5 * s;
    if (rho < profile_.rho_link() * (1.0 - 1e-12)) throw DomainError("surgery map evaluated inside a hole", z);
    const double ps = std::max(profile_.psi(rho), 0.0), ps1 = profile_.psi(rho, 1);
    const double g = ps / rho;
    const double f = std::sqrt(g);
    if (jac) {
        if (f == 0.0) throw DomainError("surgery map is singular on the link circle", z);
        const double dg = (ps1 * rho - ps) / (rho * rho);
        const double dfds = 0.5 * dg / (2.0 * f);
        *jac = Mat2::identity() * f + outer(z, z) * (2.0 * dfds);
    }
    return z * f;
}

Vec2 IslandMap::psi_local_inverse(Vec2 w) const {
    const double r = 0.5 * w.norm2();
    if (r == 0.0) throw DomainError("surgery inverse is undefined at a center", w);
    const double rho = profile_.psi_inverse(r);
    return w * std::sqrt(rho / r);
}

Vec2 IslandMap::psi_inverse_global(Vec2 q, Mat2* jac) const {
    Vec2 w;
    int i = locate(q, &w);
    if (i < 0) {
        if (jac) *jac = Mat2::identity();
        return q;
    }
    Vec2 z = psi_local_inverse(w);
    if (jac) {
        Mat2 d;
        psi_local(z, &d);
        *jac = d.inverse();
    }
    return reduce(centers_[i] + z);
}

Vec2 IslandMap::surgery_eval(Vec2 p) const {
    p = reduce(p);
    Vec2 z;
    int i = locate(p, &z);
    if (i < 0) return p;
    return reduce(centers_[i] + psi_local(z, nullptr));
}

Mat2 IslandMap::surgery_jacobian(Vec2 p) const {
    Vec2 z;
    if (locate(reduce(p), &z) < 0) return Mat2::identity();
    Mat2 j;
    psi_local(z, &j);
    return j;
}

Vec2 IslandMap::surgery_inverse(Vec2 q) const { return psi_inverse_global(reduce(q), nullptr); }

IslandMap::Regime IslandMap::regime(Vec2 p) const {
    Vec2 z;
    if (locate(reduce(p), &z) < 0) return Regime::Anosov;
    const double s = z.norm2(), rho = 0.5 * s;
    if (rho < profile_.rho0) return Regime::Identity;
    Vec2 c;
    bool ok = closed_form(anosov_matrix(), z, &c, nullptr);
    double rc = ok ? 0.5 * c.norm2() : 0.0;
    if (s < profile_.kappa())
        return ok && rho >= profile_.rho1() && rc >= profile_.rho1() ? Regime::ClosedForm : Regime::Flow;
    return ok && rho <= profile_.rho_a() && rc <= profile_.rho_a() ? Regime::ClosedForm : Regime::Conjugated;
}

Vec2 IslandMap::apply(const Mat2& a, double t, Vec2 p, Mat2* jac) const {
    p = reduce(p);
    Vec2 z;
    const int i = locate(p, &z);
    if (i < 0) {
        Mat2 d;
        Vec2 r = psi_inverse_global(reduce(a.apply(p)), jac ? &d : nullptr);
        if (jac) *jac = d * a;
        return r;
    }
    const Vec2 c0 = centers_[i];
    const double s = z.norm2(), rho = 0.5 * s;
    if (rho < profile_.rho0) {
        if (jac) *jac = Mat2::identity();
        return p;
    }
    Vec2 c;
    const bool ok = closed_form(a, z, &c, jac);
    const double rc = ok ? 0.5 * c.norm2() : 0.0;
    if (s < profile_.kappa()) {
        if (ok && rho >= profile_.rho1() && rc >= profile_.rho1()) return reduce(c0 + c);
        return reduce(c0 + inner_flow(z, t, jac));
    }
    if (ok && rho <= profile_.rho_a() && rc <= profile_.rho_a()) return reduce(c0 + c);
    Mat2 dpsi, dinv;
    Vec2 w = psi_local(z, jac ? &dpsi : nullptr);
    Vec2 r = psi_inverse_global(reduce(c0 + a.apply(w)), jac ? &dinv : nullptr);
    if (jac) *jac = dinv * a * dpsi;
    return r;
}

Vec2 IslandMap::eval(Vec2 p) const { return apply(anosov_matrix(), anosov_sigma(), p, nullptr); }

Mat2 IslandMap::jacobian(Vec2 p) const {
    Mat2 j;
    apply(anosov_matrix(), anosov_sigma(), p, &j);
    return j;
}

Vec2 IslandMap::inverse(Vec2 q) const { return apply(anosov_matrix().inverse(), -anosov_sigma(), q, nullptr); }

MapDescriptor IslandMap::descriptor() const {
    auto self = std::make_shared<const IslandMap>(*this);
    MapDescriptor m;
    m.name = "F_hat";
    m.domain = Domain::torus();
    m.rule = [self](Vec2 p) { return self->eval(p); };
    m.jac_rule = [self](Vec2 p) { return self->jacobian(p); };
    m.inverse_rule = [self](Vec2 q) { return self->inverse(q); };
    m.density = [self](Vec2 p) { return self->density(p); };
    m.symplectic = false;
    return m;
}

MapDescriptor IslandMap::surgery_map(int i) const {
    if (i < 0 || i > 3) throw std::out_of_range("center index must be 0..3");
    auto self = std::make_shared<const IslandMap>(*this);
    MapDescriptor m;
    m.name = "Psi_" + std::to_string(i + 1);
    m.domain = Domain::torus();
    m.rule = [self, i](Vec2 p) {
        Vec2 z;
        return self->locate(p, &z) == i ? self->surgery_eval(p) : p;
    };
    m.jac_rule = [self, i](Vec2 p) {
        Vec2 z;
        return self->locate(reduce(p), &z) == i ? self->surgery_jacobian(p) : Mat2::identity();
    };
    m.inverse_rule = [self, i](Vec2 q) {
        Vec2 w;
        return self->locate(q, &w) == i ? self->surgery_inverse(q) : q;
    };
    m.symplectic = false;
    return m;
}

MapDescriptor IslandMap::surgery() const {
    auto self = std::make_shared<const IslandMap>(*this);
    MapDescriptor m;
    m.name = "Psi";
    m.domain = Domain::torus();
    m.rule = [self](Vec2 p) { return self->surgery_eval(p); };
    m.jac_rule = [self](Vec2 p) { return self->surgery_jacobian(p); };
    m.inverse_rule = [self](Vec2 q) { return self->surgery_inverse(q); };
    m.symplectic = false;
    return m;
}

MapDescriptor IslandMap::conjugated_descriptor() const {
    auto self = std::make_shared<const IslandMap>(*this);
    MapDescriptor m = descriptor();
    m.name = "Psi F_hat Psi^-1 cocycle";
    m.jac_rule = [self](Vec2 p) {
        Vec2 fp = self->eval(p);
        return self->surgery_jacobian(fp) * self->jacobian(p) * self->surgery_jacobian(p).inverse();
    };
    m.density = nullptr;
    return m;
}

// ------------------------------------------------------------ saddles

std::vector<IslandSaddle> link_saddles(const IslandMap& f, int i) {
    const Vec2 c = f.centers()[i];
    const double delta = f.profile().delta;
    std::vector<IslandSaddle> out;
    for (int k = 0; k < 4; ++k) {
        const double th = 0.5 * std::numbers::pi * k;
        Vec2 p = reduce(c + (f.unstable_direction() * std::cos(th) + f.stable_direction() * std::sin(th)) * delta);
        for (int it = 0; it < 20; ++it) {
            Vec2 r = torus_delta(p, f.eval(p));
            if (r.norm() <= 1e-15) break;
            Mat2 j = f.jacobian(p) - Mat2::identity();
            p = reduce(p - j.inverse().apply(r));
        }
        if (torus_delta(p, f.eval(p)).norm() > 1e-12)
            throw SolverError("Newton did not converge to a link saddle");
        Vec2 z = local(p, c);
        if (std::abs(z.norm() - delta) > 1e-9) throw SolverError("link saddle left the link circle");
        double ang = std::atan2(z.dot(f.stable_direction()), z.dot(f.unstable_direction()));
        if (ang < -1e-12) ang += kTwoPi;
        out.push_back({i, std::max(ang, 0.0), saddle_from_jacobian(p, f.jacobian(p))});
    }
    return out;
}

int count_circle_fixed_points(const IslandMap& f, int i, int samples) {
    const Vec2 c = f.centers()[i];
    const Vec2 eu = f.unstable_direction(), es = f.stable_direction();
    const double delta = f.profile().delta;
    std::vector<double> d(samples);
    for (int j = 0; j < samples; ++j) {
        const double th = kTwoPi * (j + 0.5) / samples;
        Vec2 p = reduce(c + (eu * std::cos(th) + es * std::sin(th)) * delta);
        Vec2 z = local(f.eval(p), c);
        const double th2 = std::atan2(z.dot(es), z.dot(eu));
        d[j] = std::remainder(th2 - th, kTwoPi);
    }
    int count = 0;
    for (int j = 0; j < samples; ++j)
        if ((d[j] > 0.0) != (d[(j + 1) % samples] > 0.0)) ++count;
    return count;
}

// ------------------------------------------------------------ reports

std::pair<double, double> island_area_defects(const IslandMap& f, int samples, std::uint64_t seed) {
    auto desc = f.descriptor();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double w = 0.0, l = 0.0;
    for (int k = 0; k < samples; ++k) {
        Vec2 p{u(rng), u(rng)};
        w = std::max(w, desc.area_defect(p));
        l = std::max(l, desc.lebesgue_defect(p));
    }
    return {w, l};
}

IslandReport symmetry_and_identity_report(const IslandMap& f, int samples, std::uint64_t seed) {
    IslandReport r;
    r.samples = samples;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto& pr = f.profile();
    const Mat2 a = anosov_matrix();
    auto random_island_point = [&] {
        for (;;) {
            Vec2 p{u(rng), u(rng)};
            if (!f.in_hole(p)) return p;
        }
    };
    auto random_local = [&](double rlo, double rhi) {
        double rho = rlo + (rhi - rlo) * u(rng);
        double th = kTwoPi * u(rng);
        return Vec2{std::cos(th), std::sin(th)} * std::sqrt(2.0 * rho);
    };

    for (const auto& c : f.centers()) r.identity_defect = std::max(r.identity_defect, torus_distance(f.eval(c), c));
    for (int k = 0; k < samples; ++k) {
        const Vec2 c = f.centers()[k % 4];
        Vec2 p = reduce(c + random_local(0.0, pr.rho0 * (1.0 - 1e-12)));
        r.identity_defect = std::max(r.identity_defect, torus_distance(f.eval(p), p));
    }

    for (int k = 0; k < samples; ++k) {
        Vec2 p{u(rng), u(rng)};
        Vec2 lhs = f.eval(reduce(-p));
        Vec2 rhs = reduce(-f.eval(p));
        r.equivariance_defect = std::max(r.equivariance_defect, torus_distance(lhs, rhs));
    }

    for (int k = 0; k < samples; ++k) {
        Vec2 p = random_island_point();
        Vec2 lhs = f.surgery_eval(f.eval(p));
        Vec2 rhs = reduce(a.apply(f.surgery_eval(p)));
        r.conjugacy_defect = std::max(r.conjugacy_defect, torus_distance(lhs, rhs));
    }

    // Collars where two formulas apply.
    int inner = 0, outer_n = 0;
    for (int guard = 0; (inner < samples || outer_n < samples) && guard < 100 * samples; ++guard) {
        if (inner < samples) {
            Vec2 z = random_local(pr.rho1(), pr.rho_link());
            Vec2 c;
            if (f.closed_form(a, z, &c, nullptr) && 0.5 * c.norm2() >= pr.rho1()) {
                Vec2 g = f.inner_flow(z, anosov_sigma(), nullptr);
                r.collar_defect_inner = std::max(r.collar_defect_inner, (g - c).norm());
                ++inner;
            }
        }
        if (outer_n < samples) {
            Vec2 z = random_local(pr.rho_link() * (1.0 + 1e-3), pr.rho_a());
            Vec2 c;
            if (f.closed_form(a, z, &c, nullptr) && 0.5 * c.norm2() <= pr.rho_a()) {
                Vec2 p = reduce(f.centers()[0] + z);
                Vec2 g = f.surgery_inverse(reduce(a.apply(f.surgery_eval(p))));
                r.collar_defect_outer = std::max(r.collar_defect_outer, torus_distance(g, reduce(f.centers()[0] + c)));
                ++outer_n;
            }
        }
    }

    auto [w, l] = island_area_defects(f, samples, seed ^ 0x9e3779b97f4a7c15ULL);
    r.area_defect = w;
    r.lebesgue_defect = l;

    for (int i = 0; i < 4; ++i) {
        const Vec2 c = f.centers()[i];
        for (int j = 0; j < 16; ++j) {
            const double th = kTwoPi * (j + 0.25) / 16;
            Vec2 p = reduce(c + (f.unstable_direction() * std::cos(th) + f.stable_direction() * std::sin(th)) * pr.delta);
            // The circle repels transversally at the attracting saddles (rate e^{2 sigma}), so round-off
            // would be amplified without bound; each iterate is measured and then put back on the circle.
            for (int n = 0; n < 100; ++n) {
                Vec2 z = local(f.eval(p), c);
                r.circle_invariance = std::max(r.circle_invariance, std::abs(z.norm() - pr.delta));
                p = reduce(c + z * (pr.delta / z.norm()));
            }
        }
    }

    double worst = 0.0;
    for (int k = 0; k < std::max(1, samples / 100); ++k) {
        Vec2 p = random_island_point(), q = p;
        for (int n = 0; n < 100; ++n) {
            p = f.eval(p);
            q = f.inverse(q);
            worst = std::min({worst, f.hole_distance(p), f.hole_distance(q)});
        }
    }
    r.island_invariance = -worst;
    r.flow_match = f.flow_match_defect();
    return r;
}

}  // namespace islab
