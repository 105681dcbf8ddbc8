#include "islab/core.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

namespace islab {

double wrap01(double v) {
    double r = v - std::floor(v);
    return r >= 1.0 ? 0.0 : r;
}

double wrap_half(double v) {
    double r = v - std::floor(v + 0.5);
    return r >= 0.5 ? r - 1.0 : r;
}

Vec2 torus_delta(Vec2 a, Vec2 b) { return {wrap_half(b.x - a.x), wrap_half(b.y - a.y)}; }

double torus_distance(Vec2 a, Vec2 b) { return torus_delta(a, b).norm(); }

Mat2 Mat2::inverse() const {
    double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
}

double Mat2::max_abs() const {
    return std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
}

bool Mat2::finite() const {
    return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a21) && std::isfinite(a22);
}

static std::string point_text(Vec2 p) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << p.x << ", " << p.y << ")";
    return os.str();
}

DomainError::DomainError(const std::string& what, Vec2 p)
    : std::runtime_error(what + " at " + point_text(p)), point(p) {}

bool Domain::contains(Vec2 p, double margin) const {
    if (!p.finite()) return false;
    switch (kind) {
        case Kind::Plane:
        case Kind::Torus:
            return true;
        case Kind::Rects:
            for (const auto& r : rects)
                if (r.contains(p, margin)) return true;
            return false;
    }
    return false;
}

std::string Domain::describe() const {
    switch (kind) {
        case Kind::Plane: return "plane";
        case Kind::Torus: return "torus";
        case Kind::Rects: return "rects[" + std::to_string(rects.size()) + "]";
    }
    return "?";
}

// ---------------------------------------------------------------- RealFn

RealFn::RealFn() : rule_([](double, int) { return 0.0; }) {}

RealFn RealFn::zero() { return RealFn(); }

RealFn RealFn::constant(double c) {
    return RealFn([c](double, int k) { return k == 0 ? c : 0.0; });
}

RealFn RealFn::polynomial(std::vector<double> c) {
    return RealFn([c = std::move(c)](double x, int k) {
        double s = 0.0;
        for (int i = static_cast<int>(c.size()) - 1; i >= k; --i) {
            double f = 1.0;
            for (int j = 0; j < k; ++j) f *= static_cast<double>(i - j);
            s = s * x + c[i] * f;
        }
        return s;
    });
}

RealFn RealFn::trig(double period, std::vector<double> a, std::vector<double> b) {
    const double w = 2.0 * std::numbers::pi / period;
    return RealFn([w, a = std::move(a), b = std::move(b)](double x, int k) {
        double s = 0.0;
        const double phase = k * std::numbers::pi / 2.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            double wj = w * static_cast<double>(j + 1);
            double scale = std::pow(wj, k);
            s += scale * (a[j] * std::cos(wj * x + phase) + b[j] * std::sin(wj * x + phase));
        }
        return s;
    });
}

RealFn RealFn::operator+(const RealFn& o) const {
    return RealFn([f = rule_, g = o.rule_](double x, int k) { return f(x, k) + g(x, k); });
}

RealFn RealFn::operator-(const RealFn& o) const {
    return RealFn([f = rule_, g = o.rule_](double x, int k) { return f(x, k) - g(x, k); });
}

RealFn RealFn::operator*(const RealFn& o) const {
    return RealFn([f = rule_, g = o.rule_](double x, int k) {
        double s = 0.0, binom = 1.0;
        for (int i = 0; i <= k; ++i) {
            s += binom * f(x, i) * g(x, k - i);
            binom = binom * (k - i) / (i + 1);
        }
        return s;
    });
}

RealFn RealFn::scaled(double s) const {
    return RealFn([f = rule_, s](double x, int k) { return s * f(x, k); });
}

RealFn RealFn::affine_arg(double s, double c) const {
    return RealFn([f = rule_, s, c](double x, int k) { return std::pow(s, k) * f(s * x + c, k); });
}

// --------------------------------------------------------- MapDescriptor

Vec2 MapDescriptor::operator()(Vec2 p) const {
    if (domain.kind == Domain::Kind::Torus) {
        p = {wrap01(p.x), wrap01(p.y)};
        Vec2 q = rule(p);
        return {wrap01(q.x), wrap01(q.y)};
    }
    if (!domain.contains(p)) throw DomainError(name + ": point outside domain " + domain.describe(), p);
    return rule(p);
}

Vec2 MapDescriptor::eval_jac(Vec2 p, Mat2* j) const {
    const bool torus = domain.kind == Domain::Kind::Torus;
    if (torus) p = {wrap01(p.x), wrap01(p.y)};
    else if (!domain.contains(p)) throw DomainError(name + ": point outside domain " + domain.describe(), p);
    Vec2 q;
    if (eval_jac_rule) {
        q = eval_jac_rule(p, j);
    } else {
        q = rule(p);
        *j = jac_rule(p);
    }
    return torus ? Vec2{wrap01(q.x), wrap01(q.y)} : q;
}

Mat2 MapDescriptor::jacobian(Vec2 p) const {
    if (domain.kind == Domain::Kind::Torus) p = {wrap01(p.x), wrap01(p.y)};
    else if (!domain.contains(p)) throw DomainError(name + ": jacobian outside domain", p);
    return jac_rule(p);
}

Vec2 MapDescriptor::inverse(Vec2 q) const {
    if (!inverse_rule) throw SolverError(name + ": no exact inverse");
    if (domain.kind == Domain::Kind::Torus) {
        Vec2 p = inverse_rule({wrap01(q.x), wrap01(q.y)});
        return {wrap01(p.x), wrap01(p.y)};
    }
    return inverse_rule(q);
}

double MapDescriptor::area_defect(Vec2 p) const {
    double d = jacobian(p).det();
    if (density) d *= density((*this)(p)) / density(p);
    return std::abs(d - 1.0);
}

double MapDescriptor::lebesgue_defect(Vec2 p) const { return std::abs(jacobian(p).det() - 1.0); }

MapDescriptor MapDescriptor::inverse_map() const {
    if (!inverse_rule) throw SolverError(name + ": no exact inverse");
    if (inverse_factory) return inverse_factory();
    MapDescriptor inv;
    inv.name = name + "^-1";
    inv.rule = inverse_rule;
    inv.inverse_rule = rule;
    auto fwd_jac = jac_rule;
    auto back = inverse_rule;
    inv.jac_rule = [fwd_jac, back](Vec2 q) { return fwd_jac(back(q)).inverse(); };
    inv.eval_jac_rule = [fwd_jac, back](Vec2 q, Mat2* j) {
        Vec2 p = back(q);
        *j = fwd_jac(p).inverse();
        return p;
    };
    inv.domain = domain.kind == Domain::Kind::Torus ? Domain::torus() : Domain::plane();
    inv.symplectic = symplectic;
    inv.density = density;
    return inv;
}

MapDescriptor compose(const MapDescriptor& f, const MapDescriptor& g) {
    MapDescriptor h;
    h.name = f.name + "∘" + g.name;
    h.domain = g.domain;
    const bool torus = f.domain.kind == Domain::Kind::Torus && g.domain.kind == Domain::Kind::Torus;
    h.rule = [f, g, torus](Vec2 p) {
        Vec2 q = g(p);
        if (!f.domain.contains(q)) throw DomainError("compose: " + g.name + " image outside domain of " + f.name, q);
        return torus ? f.rule(q) : f(q);
    };
    h.jac_rule = [f, g](Vec2 p) { return f.jacobian(g(p)) * g.jacobian(p); };
    h.eval_jac_rule = [f, g, torus](Vec2 p, Mat2* j) {
        Mat2 jg, jf;
        Vec2 q = g.eval_jac(p, &jg);
        if (!torus && !f.domain.contains(q)) throw DomainError("compose: " + g.name + " image outside domain of " + f.name, q);
        Vec2 r = f.eval_jac(q, &jf);
        *j = jf * jg;
        return r;
    };
    if (f.has_inverse() && g.has_inverse()) {
        h.inverse_rule = [f, g](Vec2 q) { return g.inverse(f.inverse(q)); };
        if (!torus && !f.density && !g.density) {
            h.inverse_factory = [f, g, name = h.name]() {
                MapDescriptor inv = compose(g.inverse_map(), f.inverse_map());
                inv.name = name + "^-1";
                return inv;
            };
        }
    }
    h.symplectic = f.symplectic && g.symplectic && !f.density && !g.density;
    return h;
}

MapDescriptor compose_all(const std::vector<MapDescriptor>& maps) {
    if (maps.empty()) return identity_map();
    MapDescriptor acc = maps.front();
    for (std::size_t i = 1; i < maps.size(); ++i) acc = compose(maps[i], acc);
    return acc;
}

MapDescriptor identity_map(Domain d) {
    MapDescriptor m;
    m.name = "id";
    m.rule = [](Vec2 p) { return p; };
    m.jac_rule = [](Vec2) { return Mat2::identity(); };
    m.inverse_rule = [](Vec2 p) { return p; };
    m.domain = std::move(d);
    return m;
}

MapDescriptor affine_map(const Mat2& a, Vec2 c, std::string name) {
    MapDescriptor m;
    m.name = std::move(name);
    m.rule = [a, c](Vec2 p) { return a.apply(p) + c; };
    m.jac_rule = [a](Vec2) { return a; };
    const Mat2 ai = a.inverse();
    m.inverse_rule = [ai, c](Vec2 q) { return ai.apply(q - c); };
    m.symplectic = std::abs(a.det() - 1.0) < 1e-14;
    m.eval_jac_rule = [a, c](Vec2 p, Mat2* j) {
        *j = a;
        return a.apply(p) + c;
    };
    const std::string nm = m.name;
    m.inverse_factory = [ai, c, nm]() { return affine_map(ai, ai.apply(c) * -1.0, nm + "^-1"); };
    return m;
}

Vec2 invert_at(const MapDescriptor& f, Vec2 target, Vec2 guess, NewtonOptions opt) {
    const bool torus = f.domain.kind == Domain::Kind::Torus;
    if (f.has_inverse()) return f.inverse(target);
    auto residual = [&](Vec2 p) { return torus ? torus_delta(target, f.rule(p)) : f(p) - target; };
    const double tol = opt.tol * std::max(1.0, target.norm());
    Vec2 p = guess;
    Vec2 r = residual(p);
    double nr = r.norm();
    for (int it = 0; it < opt.max_iter; ++it) {
        if (nr <= tol) return torus ? Vec2{wrap01(p.x), wrap01(p.y)} : p;
        Mat2 j = f.jac_rule(p);
        double d = j.det();
        if (!j.finite() || std::abs(d) < 1e-300) throw SolverError(f.name + ": singular Jacobian in Newton inversion");
        Vec2 step = j.inverse().apply(r);
        double lam = 1.0;
        Vec2 pn = p - step;
        Vec2 rn{};
        double nrn = 0.0;
        for (int h = 0; h < 40; ++h) {
            pn = p - step * lam;
            try {
                rn = residual(pn);
                nrn = rn.norm();
            } catch (const DomainError&) {
                nrn = INFINITY;
            }
            if (nrn < nr || nrn <= tol) break;
            lam *= 0.5;
        }
        if (!std::isfinite(nrn)) throw SolverError(f.name + ": Newton inversion left the domain");
        p = pn;
        r = rn;
        nr = nrn;
    }
    if (nr <= tol) return torus ? Vec2{wrap01(p.x), wrap01(p.y)} : p;
    throw SolverError(f.name + ": Newton inversion did not converge, residual " + std::to_string(nr));
}

double default_fd_step(Vec2 p) { return 1e-6 * (1.0 + p.norm()); }

Mat2 finite_difference_jacobian(const MapDescriptor& f, Vec2 p, double h) {
    if (h <= 0.0) h = default_fd_step(p);
    if (f.domain.kind == Domain::Kind::Rects && !f.domain.contains(p, h))
        throw DomainError(f.name + ": finite-difference stencil leaves the domain", p);
    auto ev = [&](Vec2 q) { return f.domain.kind == Domain::Kind::Torus ? f.rule(q) : f(q); };
    Vec2 dx = (ev({p.x + h, p.y}) - ev({p.x - h, p.y})) / (2.0 * h);
    Vec2 dy = (ev({p.x, p.y + h}) - ev({p.x, p.y - h})) / (2.0 * h);
    return {dx.x, dy.x, dx.y, dy.y};
}

SaddleData saddle_from_jacobian(Vec2 p, const Mat2& j) {
    const double half = 0.5 * j.trace();
    const double disc = half * half - j.det();
    if (!(disc > 0.0)) throw SolverError("fixed point is not a saddle (complex or repeated multipliers)");
    const double root = std::sqrt(disc);
    double l1 = half + root, l2 = half - root;
    if (std::abs(l1) < std::abs(l2)) std::swap(l1, l2);
    if (!(std::abs(l1) > 1.0 && std::abs(l2) < 1.0)) throw SolverError("fixed point is not a saddle");
    auto eigvec = [&](double l) {
        Vec2 a{j.a12, l - j.a11};
        Vec2 b{l - j.a22, j.a21};
        Vec2 v = a.norm() >= b.norm() ? a : b;
        v = v / v.norm();
        if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = -v;
        return v;
    };
    return {p, l1, l2, eigvec(l1), eigvec(l2)};
}

// ------------------------------------------------------------ named maps

Mat2 anosov_matrix() { return {13.0, 8.0, 8.0, 5.0}; }

double anosov_sigma() { return std::log(9.0 + 4.0 * std::sqrt(5.0)); }

MapDescriptor anosov_map() {
    MapDescriptor m;
    m.name = "F_A";
    m.domain = Domain::torus();
    m.rule = [](Vec2 p) { return Vec2{13.0 * p.x + 8.0 * p.y, 8.0 * p.x + 5.0 * p.y}; };
    m.jac_rule = [](Vec2) { return anosov_matrix(); };
    m.inverse_rule = [](Vec2 q) { return Vec2{5.0 * q.x - 8.0 * q.y, -8.0 * q.x + 13.0 * q.y}; };
    return m;
}

MapDescriptor chirikov_map(double a) {
    const double tp = 2.0 * std::numbers::pi;
    MapDescriptor m;
    m.name = "T_a";
    m.domain = Domain::torus();
    m.rule = [a, tp](Vec2 p) { return Vec2{2.0 * p.x - p.y + a * std::sin(tp * p.x), p.x}; };
    m.jac_rule = [a, tp](Vec2 p) { return Mat2{2.0 + tp * a * std::cos(tp * p.x), -1.0, 1.0, 0.0}; };
    m.inverse_rule = [a, tp](Vec2 q) { return Vec2{q.y, 2.0 * q.y - q.x + a * std::sin(tp * q.y)}; };
    return m;
}

MapDescriptor shear_map(RealFn psi) {
    MapDescriptor m;
    m.name = "S_psi";
    m.rule = [psi](Vec2 p) { return Vec2{p.x, p.y + psi(p.x)}; };
    m.jac_rule = [psi](Vec2 p) { return Mat2{1.0, 0.0, psi.deriv(p.x), 1.0}; };
    m.inverse_rule = [psi](Vec2 q) { return Vec2{q.x, q.y - psi(q.x)}; };
    m.inverse_factory = [psi]() {
        MapDescriptor inv = shear_map(psi.scaled(-1.0));
        inv.name = "S_psi^-1";
        return inv;
    };
    return m;
}

MapDescriptor henon_like(RealFn psi) {
    MapDescriptor m;
    m.name = "H_psi";
    m.rule = [psi](Vec2 p) { return Vec2{p.y, -p.x + psi(p.y)}; };
    m.jac_rule = [psi](Vec2 p) { return Mat2{0.0, 1.0, -1.0, psi.deriv(p.y)}; };
    m.inverse_rule = [psi](Vec2 q) { return Vec2{psi(q.x) - q.y, q.x}; };
    return m;
}

MapDescriptor quarter_rotation() {
    MapDescriptor m = affine_map({0.0, -1.0, 1.0, 0.0}, {0.0, 0.0}, "R");
    m.inverse_rule = [](Vec2 q) { return Vec2{q.y, -q.x}; };
    return m;
}

}  // namespace islab
