#include "islab/rescaling.hpp"

#include "islab/hamiltonian.hpp"
#include "islab/links.hpp"
#include "islab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace islab {

namespace {

double ipow(double v, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= v;
    return r;
}

double falling(int j, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= static_cast<double>(j - i);
    return r;
}

// plateau bump: 1 on |v| <= half, 0 on |v| >= full
double box_bump(double v, double full, int k) {
    const double half = 0.5 * full;
    const double a = std::abs(v);
    if (a >= full) return 0.0;
    if (a <= half) return k == 0 ? 1.0 : 0.0;
    const double w = full - half;
    const double t = (full - a) / w;
    const double sign = v < 0.0 ? 1.0 : -1.0;
    return smoothstep7(t, k) * std::pow(sign / w, k);
}

constexpr double kWindow = 3.0;

}  // namespace

double Poly::deriv(double x, int k) const {
    double acc = 0.0;
    for (int j = static_cast<int>(c.size()) - 1; j >= k; --j) acc = acc * x + c[j] * falling(j, k);
    return acc;
}

Poly Poly::antiderivative() const {
    Poly p;
    p.c.assign(c.size() + 1, 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) p.c[j + 1] = c[j] / static_cast<double>(j + 1);
    return p;
}

Poly Poly::scaled_arg(double s) const {
    Poly p = *this;
    double f = 1.0;
    for (auto& v : p.c) {
        v *= f;
        f *= s;
    }
    return p;
}

Poly Poly::operator+(const Poly& o) const {
    Poly p = *this;
    if (o.c.size() > p.c.size()) p.c.resize(o.c.size(), 0.0);
    for (std::size_t j = 0; j < o.c.size(); ++j) p.c[j] += o.c[j];
    return p;
}

Poly Poly::scaled(double s) const {
    Poly p = *this;
    for (auto& v : p.c) v *= s;
    return p;
}

RealFn Poly::fn() const {
    Poly self = *this;
    return RealFn([self](double x, int k) { return self.deriv(x, k); });
}

Poly random_poly(int degree, double amplitude, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    Poly p;
    for (int j = 0; j <= degree; ++j) p.c.push_back(u(rng));
    return p;
}

// ---- normal form

bool SaddleNormalForm::linear() const {
    return std::all_of(nonlinearity.begin(), nonlinearity.end(), [](double v) { return v == 0.0; });
}

double SaddleNormalForm::excess(double u) const {
    double acc = 0.0;
    for (int j = static_cast<int>(nonlinearity.size()) - 1; j >= 0; --j) acc = (acc + nonlinearity[j]) * u;
    return acc;
}

double SaddleNormalForm::excess_deriv(double u) const {
    double acc = 0.0;
    for (int j = static_cast<int>(nonlinearity.size()) - 1; j >= 0; --j) acc = acc * u + (j + 1) * nonlinearity[j];
    return acc;
}

Vec2 SaddleNormalForm::operator()(Vec2 p) const {
    const double e = lambda * std::exp(excess(p.x * p.y));
    return {p.x * e, p.y / e};
}

Mat2 SaddleNormalForm::jacobian(Vec2 p) const {
    const double u = p.x * p.y;
    const double e = lambda * std::exp(excess(u));
    const double hp = excess_deriv(u);
    return {e * (1.0 + u * hp), e * p.x * p.x * hp, -p.y * p.y * hp / e, (1.0 - u * hp) / e};
}

Vec2 SaddleNormalForm::inverse(Vec2 q) const {
    const double e = lambda * std::exp(excess(q.x * q.y));
    return {q.x / e, q.y * e};
}

MapDescriptor SaddleNormalForm::descriptor() const {
    SaddleNormalForm self = *this;
    MapDescriptor m;
    m.name = "T0";
    m.rule = [self](Vec2 p) { return self(p); };
    m.jac_rule = [self](Vec2 p) { return self.jacobian(p); };
    m.inverse_rule = [self](Vec2 q) { return self.inverse(q); };
    return m;
}

double SaddleNormalForm::p(double x, double y) const { return lambda * std::expm1(excess(x * y)); }

double SaddleNormalForm::q(double x, double y) const { return std::expm1(-excess(x * y)) / lambda; }

SaddleNormalForm saddle_normal_form(double lambda, std::vector<double> nonlinearity) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("saddle multiplier must lie in (0,1)");
    return {lambda, std::move(nonlinearity)};
}

CrossSolution solve_cross(const SaddleNormalForm& t0, int k, double xbar, double y) {
    if (k < 1) throw std::invalid_argument("iterate count k must be >= 1");
    const double lk = ipow(t0.lambda, k);
    const double base = xbar * y * lk;
    double u = base;
    CrossSolution s;
    for (int it = 1; it <= 200; ++it) {
        const double next = base * std::exp(k * t0.excess(u));
        if (!std::isfinite(next)) break;
        const double step = std::abs(next - u);
        u = next;
        s.iterations = it;
        if (step <= 1e-17 * std::max(std::abs(u), 1e-300)) {
            const double em = std::expm1(k * t0.excess(u));
            const double e = lk * (1.0 + em);
            s.u = u;
            s.entry_y = y * e;
            s.exit_x = xbar * e;
            s.xi_scaled = xbar * em;
            s.eta_scaled = y * em;
            return s;
        }
    }
    throw SolverError("cross-form fixed point diverged; shrink the window");
}

XiEtaTable xi_eta(const SaddleNormalForm& t0, int k, Rect window, int n) {
    if (n < 2) throw std::invalid_argument("xi_eta grid needs n >= 2");
    XiEtaTable t;
    t.k = k;
    t.window = window;
    t.n = n;
    const double lk = ipow(t0.lambda, k);
    for (int j = 0; j < n; ++j) {
        const double y = window.y0 + (window.y1 - window.y0) * j / (n - 1);
        for (int i = 0; i < n; ++i) {
            const double xb = window.x0 + (window.x1 - window.x0) * i / (n - 1);
            const CrossSolution s = solve_cross(t0, k, xb, y);
            t.xi.push_back(s.xi_scaled * lk);
            t.eta.push_back(s.eta_scaled * lk);
            t.sup_xi = std::max(t.sup_xi, std::abs(t.xi.back()));
            t.sup_eta = std::max(t.sup_eta, std::abs(t.eta.back()));
            Vec2 p{xb, s.entry_y};
            for (int m = 0; m < k; ++m) p = t0(p);
            const double scale = std::max({1.0, std::abs(s.exit_x), std::abs(y)});
            t.reconstruction = std::max(t.reconstruction, (p - Vec2{s.exit_x, y}).norm() / scale);
        }
    }
    return t;
}

// ---- transition map

namespace {

struct TailEval {
    double Y1, g, gp, gpp;
};

TailEval tail_eval(const TransitionTail& t, double x, double Y) {
    const double Y1 = Y + t.a1 * x + t.a2 * x * x;
    return {Y1, Y1 + t.g2 * Y1 * Y1 + t.g3 * Y1 * Y1 * Y1, 1.0 + 2.0 * t.g2 * Y1 + 3.0 * t.g3 * Y1 * Y1,
            2.0 * t.g2 + 6.0 * t.g3 * Y1};
}

}  // namespace

Vec2 TransitionMap::operator()(Vec2 p) const {
    const double x = p.x;
    const TailEval e = tail_eval(tail, x, p.y - y_minus);
    if (e.gp <= 0.1) throw DomainError("transition map outside its chart", p);
    return {x_plus + b * e.g, c * x / e.gp};
}

Mat2 TransitionMap::jacobian(Vec2 p) const {
    const double x = p.x;
    const TailEval e = tail_eval(tail, x, p.y - y_minus);
    if (e.gp <= 0.1) throw DomainError("transition map outside its chart", p);
    const double s = tail.a1 + 2.0 * tail.a2 * x;
    const double dyx = -c * x * e.gpp / (e.gp * e.gp);
    return {b * e.gp * s, b * e.gp, c / e.gp + dyx * s, dyx};
}

Vec2 TransitionMap::inverse(Vec2 q) const {
    const double target = (q.x - x_plus) / b;
    double Y1 = target;
    for (int it = 0; it < 60; ++it) {
        const double g = Y1 + tail.g2 * Y1 * Y1 + tail.g3 * Y1 * Y1 * Y1;
        const double gp = 1.0 + 2.0 * tail.g2 * Y1 + 3.0 * tail.g3 * Y1 * Y1;
        if (gp <= 0.1) throw DomainError("transition inverse outside its chart", q);
        const double step = (g - target) / gp;
        Y1 -= step;
        if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(Y1))) break;
    }
    const double gp = 1.0 + 2.0 * tail.g2 * Y1 + 3.0 * tail.g3 * Y1 * Y1;
    const double x = q.y * gp / c;
    return {x, y_minus + Y1 - tail.a1 * x - tail.a2 * x * x};
}

MapDescriptor TransitionMap::descriptor() const {
    TransitionMap self = *this;
    MapDescriptor m;
    m.name = "T1";
    m.rule = [self](Vec2 p) { return self(p); };
    m.jac_rule = [self](Vec2 p) { return self.jacobian(p); };
    m.inverse_rule = [self](Vec2 q) { return self.inverse(q); };
    return m;
}

double TransitionMap::phi1(double x, double Y) const {
    const TailEval e = tail_eval(tail, x, Y);
    return b * (e.g - Y);
}

double TransitionMap::phi2(double x, double Y) const {
    const TailEval e = tail_eval(tail, x, Y);
    return c * x * (1.0 / e.gp - 1.0);
}

TransitionMap build_transition(double x_plus, double y_minus, double b, double c, TransitionTail tail) {
    if (std::abs(b * c + 1.0) > 1e-12) throw std::invalid_argument("transition map needs b c = -1");
    return {x_plus, y_minus, b, c, tail};
}

std::vector<double> r_sequence(const std::vector<double>& b, const std::vector<double>& c) {
    const int N = static_cast<int>(b.size());
    if (N < 1 || c.size() != b.size()) throw std::invalid_argument("b and c must have the same positive length");
    if (N % 2 == 0) throw std::invalid_argument("N must be odd: the R_i recursion does not close for even N");
    for (int i = 0; i < N; ++i)
        if (b[i] == 0.0 || c[i] == 0.0) throw std::invalid_argument("chart degeneracy: b_i and c_i must be non-zero");
    auto at = [N](int i) { return ((i % N) + N) % N; };
    std::vector<double> R(N, 0.0);
    R[0] = 1.0;
    // R_m = -c_m b_{m-1} R_{m-2}, stepping m by 2 visits every index for odd N
    int m = 0;
    for (int s = 0; s < N - 1; ++s) {
        const int next = at(m + 2);
        R[next] = -c[next] * b[at(next - 1)] * R[m];
        m = next;
    }
    for (int i = 0; i < N; ++i) {
        const double lhs = R[at(i + 1)];
        const double rhs = -c[at(i + 1)] * b[i] * R[at(i - 1)];
        if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, std::abs(lhs)))
            throw std::invalid_argument("R_i recursion does not close: (-1)^N prod c prod b must equal 1");
    }
    return R;
}

// ---- configuration

std::vector<double> RescalingConfig::c_values() const {
    if (!c.empty()) return c;
    std::vector<double> out;
    for (double v : b) out.push_back(-1.0 / v);
    return out;
}

std::vector<std::string> RescalingConfig::violations() const {
    std::vector<std::string> v;
    if (N < 1) v.push_back("N must be >= 1");
    if (N % 2 == 0) v.push_back("N must be odd: the R_i recursion does not close for even N");
    if (r < 1) v.push_back("r must be >= 1");
    if (!(mu > 0.0 && mu < 1.0)) v.push_back("mu must lie in (0,1)");
    if (!(lambda > 0.0 && lambda < 1.0)) v.push_back("lambda must lie in (0,1)");
    if (mu > 0.0 && mu < 1.0 && !(std::abs(lambda) < std::pow(mu, r)))
        v.push_back("|lambda| < mu^r < 1 required");
    const auto n = static_cast<std::size_t>(std::max(N, 0));
    if (b.size() != n || x_plus.size() != n || y_minus.size() != n)
        v.push_back("b, x_plus and y_minus need N entries");
    if (!c.empty() && c.size() != n) v.push_back("c needs N entries");
    if (!tails.empty() && tails.size() != n) v.push_back("tails need N entries");
    if (psi.size() != n) v.push_back("psi needs N entries");
    if (!v.empty()) return v;
    const auto cv = c_values();
    for (std::size_t i = 0; i < n; ++i) {
        if (b[i] == 0.0) v.push_back("b_i must be non-zero");
        else if (std::abs(b[i] * cv[i] + 1.0) > 1e-12) v.push_back("b_i c_i = -1 required");
        if (!(x_plus[i] > 0.0)) v.push_back("x_i+ must be positive");
        if (!(y_minus[i] > 0.0)) v.push_back("y_i- must be positive");
    }
    if (!(box > 0.0)) v.push_back("box half-side must be positive");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(x_plus[i] - x_plus[j]) <= 2.0 * box) v.push_back("boxes V_i must be disjoint");
    for (std::size_t i = 0; i < n; ++i)
        if (x_plus[i] - box <= t0_window_escape()) v.push_back("boxes V_i must not meet the first T0 iterate");
    return v;
}

double RescalingConfig::t0_window_escape() const {
    double m = 0.0;
    for (std::size_t i = 0; i < x_plus.size(); ++i) m = std::max(m, lambda * (x_plus[i] + box));
    return m;
}

RescalingConfig RescalingConfig::affine() {
    RescalingConfig c;
    c.psi = {Poly{{0.1, -0.2, 0.15}}, Poly{{-0.05, 0.1, 0.2}}, Poly{{0.2, 0.05, -0.1}}};
    return c;
}

RescalingConfig RescalingConfig::nonlinear() {
    RescalingConfig c = affine();
    c.t0_nonlinearity = {0.5, -0.2};
    const TransitionTail base{0.1, -0.1, 0.15, 0.02};
    for (double f : {1.0, -0.8, 0.6}) c.tails.push_back({base.a1 * f, base.a2 * f, base.g2 * f, base.g3 * f});
    return c;
}

// ---- model

RescalingModel::RescalingModel(RescalingConfig cfg, int k) : cfg_(std::move(cfg)), k_(k) {
    const auto bad = cfg_.violations();
    if (!bad.empty()) {
        std::ostringstream os;
        for (std::size_t i = 0; i < bad.size(); ++i) os << (i ? "; " : "") << bad[i];
        throw std::invalid_argument(os.str());
    }
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    const int N = cfg_.N;
    lk_ = ipow(cfg_.lambda, k);
    mk_ = ipow(cfg_.mu, k);
    t0_ = saddle_normal_form(cfg_.lambda, cfg_.t0_nonlinearity);
    const auto cv = cfg_.c_values();
    R_ = r_sequence(cfg_.b, cv);
    for (int i = 0; i < N; ++i)
        t1_.push_back(build_transition(cfg_.x_plus[i], cfg_.y_minus[i], cfg_.b[i], cv[i],
                                       cfg_.tails.empty() ? TransitionTail{} : cfg_.tails[i]));
    beta_.resize(N);
    gamma_.resize(N);
    C_.resize(N);
    A_.resize(N);
    for (int i = 0; i < N; ++i) {
        beta_[i] = solve_cross(t0_, k, cfg_.x_plus[idx(i - 1)], cfg_.y_minus[i]).xi_scaled;
        gamma_[i] = solve_cross(t0_, k, cfg_.x_plus[i], cfg_.y_minus[idx(i + 1)]).eta_scaled;
    }
    for (int i = 0; i < N; ++i) {
        const int j = idx(i + 1);
        C_[i] = (cv[j] * (cfg_.x_plus[i] + beta_[j]) - cfg_.y_minus[idx(i + 2)] - gamma_[j]) / R_[j];
        A_[i] = t1_[j].d() * cfg_.x_plus[i] * R_[i] / R_[j];
    }
    psi_hat_.resize(N);
    psi_scaled_.resize(N);
    Psi_.resize(N);
    for (int i = 0; i < N; ++i) {
        const int j = idx(i + 1);
        const double alpha = 1.0 / (mk_ * cfg_.b[j] * R_[i]);
        psi_scaled_[j] = cfg_.psi[i].scaled_arg(alpha).scaled(lk_ * mk_ * R_[j]);
        const Poly affine{{-lk_ * C_[i] * R_[j], -lk_ * A_[i] * R_[j] / (cfg_.b[j] * R_[i])}};
        psi_hat_[j] = affine + psi_scaled_[j];
        Psi_[j] = psi_hat_[j].antiderivative();
    }
}

Vec2 RescalingModel::Qbar(int i, Vec2 P) const {
    const int a = idx(i);
    return {cfg_.x_plus[a] + cfg_.b[a] * R_[idx(i - 1)] * mk_ * P.x,
            lk_ * (cfg_.y_minus[idx(i + 1)] + gamma_[a] + R_[a] * mk_ * P.y)};
}

Vec2 RescalingModel::Qbar_inverse(int i, Vec2 p) const {
    const int a = idx(i);
    return {(p.x - cfg_.x_plus[a]) / (cfg_.b[a] * R_[idx(i - 1)] * mk_),
            (p.y / lk_ - cfg_.y_minus[idx(i + 1)] - gamma_[a]) / (R_[a] * mk_)};
}

Vec2 RescalingModel::Q(int i, Vec2 P) const {
    const int a = idx(i);
    return {lk_ * (cfg_.x_plus[idx(i - 1)] + beta_[a] + cfg_.b[idx(i - 1)] * R_[idx(i - 2)] * mk_ * P.x),
            cfg_.y_minus[a] + R_[idx(i - 1)] * mk_ * P.y};
}

Vec2 RescalingModel::Q_inverse(int i, Vec2 p) const {
    const int a = idx(i);
    return {(p.x / lk_ - cfg_.x_plus[idx(i - 1)] - beta_[a]) / (cfg_.b[idx(i - 1)] * R_[idx(i - 2)] * mk_),
            (p.y - cfg_.y_minus[a]) / (R_[idx(i - 1)] * mk_)};
}

double RescalingModel::Qbar_det(int i) const {
    const int a = idx(i);
    return cfg_.b[a] * R_[idx(i - 1)] * mk_ * lk_ * R_[a] * mk_;
}

bool RescalingModel::in_inner_box(Vec2 p, int* box) const {
    const double h = 0.5 * cfg_.box;
    for (int j = 0; j < cfg_.N; ++j) {
        const double s = p.x - cfg_.x_plus[j];
        if (std::abs(s) > h || std::abs(p.y) > h) continue;
        if (std::abs(p.y + psi_hat_[j](s)) > h) continue;
        if (box) *box = j;
        return true;
    }
    return false;
}

Vec2 RescalingModel::flow_box(int j, Vec2 p, double t, Mat2* jac) const {
    const Poly ph = psi_hat_[j];
    const Poly Ph = Psi_[j];
    const double x0 = cfg_.x_plus[j];
    const double full = cfg_.box;
    HamiltonianSystem sys;
    sys.H = [=](Vec2 z) { return -Ph(z.x - x0) * box_bump(z.x - x0, full, 0) * box_bump(z.y, full, 0); };
    sys.grad = [=](Vec2 z) {
        const double s = z.x - x0;
        const double bs = box_bump(s, full, 0), bs1 = box_bump(s, full, 1);
        const double bt = box_bump(z.y, full, 0), bt1 = box_bump(z.y, full, 1);
        const double P = Ph(s), p = ph(s);
        return Vec2{-(p * bs + P * bs1) * bt, -P * bs * bt1};
    };
    sys.hessian = [=](Vec2 z) {
        const double s = z.x - x0;
        const double bs = box_bump(s, full, 0), bs1 = box_bump(s, full, 1), bs2 = box_bump(s, full, 2);
        const double bt = box_bump(z.y, full, 0), bt1 = box_bump(z.y, full, 1), bt2 = box_bump(z.y, full, 2);
        const double P = Ph(s), p = ph(s), p1 = ph.deriv(s, 1);
        const double hxy = -(p * bs + P * bs1) * bt1;
        return Mat2{-(p1 * bs + 2.0 * p * bs1 + P * bs2) * bt, hxy, hxy, -P * bs * bt2};
    };
    sys.steps = 8;
    sys.order = 4;
    return hamiltonian_flow(sys, p, t, jac);
}

Vec2 RescalingModel::g(Vec2 p, Mat2* jac) const {
    for (int j = 0; j < cfg_.N; ++j) {
        const double s = p.x - cfg_.x_plus[j];
        if (std::abs(s) >= cfg_.box || std::abs(p.y) >= cfg_.box) continue;
        int inner = -1;
        if (in_inner_box(p, &inner) && inner == j) {
            if (jac) *jac = Mat2{1.0, 0.0, psi_hat_[j].deriv(s, 1), 1.0};
            return {p.x, p.y + psi_hat_[j](s)};
        }
        return flow_box(j, p, 1.0, jac);
    }
    if (jac) *jac = Mat2::identity();
    return p;
}

Vec2 RescalingModel::g_inverse(Vec2 q) const {
    const double h = 0.5 * cfg_.box;
    for (int j = 0; j < cfg_.N; ++j) {
        const double s = q.x - cfg_.x_plus[j];
        if (std::abs(s) >= cfg_.box || std::abs(q.y) >= cfg_.box) continue;
        const double v = psi_hat_[j](s);
        if (std::abs(s) <= h && std::abs(q.y) <= h && std::abs(q.y - v) <= h) return {q.x, q.y - v};
        return flow_box(j, q, -1.0, nullptr);
    }
    return q;
}

MapDescriptor RescalingModel::perturbation() const {
    auto self = std::make_shared<const RescalingModel>(*this);
    MapDescriptor m;
    m.name = "g";
    m.rule = [self](Vec2 p) { return self->g(p); };
    m.jac_rule = [self](Vec2 p) {
        Mat2 j;
        self->g(p, &j);
        return j;
    };
    m.eval_jac_rule = [self](Vec2 p, Mat2* j) { return self->g(p, j); };
    m.inverse_rule = [self](Vec2 q) { return self->g_inverse(q); };
    return m;
}

Vec2 RescalingModel::leg(int i, Vec2 p) const {
    for (int m = 0; m < k_; ++m) {
        p = g(t0_(p));
        if (!p.finite() || std::abs(p.x) > kWindow || std::abs(p.y) > kWindow)
            throw DomainError("orbit escapes the normal-form window", p);
    }
    const int target = idx(i + 1);
    if (std::abs(p.y - cfg_.y_minus[target]) > transition_radius())
        throw DomainError("orbit misses the transition neighbourhood", p);
    return g(t1_[target](p));
}

double RescalingModel::transition_radius() const {
    double r = *std::min_element(cfg_.y_minus.begin(), cfg_.y_minus.end());
    for (int a = 0; a < cfg_.N; ++a)
        for (int b = a + 1; b < cfg_.N; ++b) r = std::min(r, std::abs(cfg_.y_minus[a] - cfg_.y_minus[b]));
    return 0.5 * r;
}

Vec2 RescalingModel::renormalized_return(Vec2 P) const {
    Vec2 p = Qbar(0, P);
    for (int i = 0; i < cfg_.N; ++i) p = leg(i, p);
    return Qbar_inverse(0, p);
}

Vec2 RescalingModel::henon_product(Vec2 P) const {
    for (int i = 0; i < cfg_.N; ++i) P = {P.y, -P.x + cfg_.psi[i](P.y)};
    return P;
}

Vec2 RescalingModel::phi_empirical(int i, Vec2 P) const {
    const Vec2 q = Qbar_inverse(i + 1, leg(i, Qbar(i, P)));
    return {cfg_.psi[idx(i)](q.x) - q.y, q.x};
}

std::vector<Vec2> disc_grid(int grid) {
    if (grid < 2) throw std::invalid_argument("disc grid needs >= 2 points per axis");
    std::vector<Vec2> pts;
    for (int j = 0; j < grid; ++j)
        for (int i = 0; i < grid; ++i) {
            const Vec2 p{-1.0 + 2.0 * i / (grid - 1), -1.0 + 2.0 * j / (grid - 1)};
            if (p.norm2() <= 1.0 + 1e-12) pts.push_back(p);
        }
    return pts;
}

RescalingReport verify_rescaling(const RescalingConfig& cfg, int k, int grid, int threads) {
    const RescalingModel model(cfg, k);
    const int N = cfg.N;
    const auto pts = disc_grid(grid);
    std::vector<double> err(pts.size(), 0.0);
    std::vector<double> phi(pts.size() * N, 0.0);
    parallel_for(pts.size(), threads, [&](std::size_t a) {
        err[a] = (model.renormalized_return(pts[a]) - model.henon_product(pts[a])).norm();
        for (int i = 0; i < N; ++i) phi[a * N + i] = (model.phi_empirical(i, pts[a]) - pts[a]).norm();
    });
    RescalingReport rep;
    rep.k = k;
    rep.n = model.n();
    rep.points = static_cast<int>(pts.size());
    rep.phi_defect_leg.assign(N, 0.0);
    for (std::size_t a = 0; a < pts.size(); ++a) {
        rep.error = std::max(rep.error, err[a]);
        for (int i = 0; i < N; ++i) rep.phi_defect_leg[i] = std::max(rep.phi_defect_leg[i], phi[a * N + i]);
    }
    rep.phi_defect = *std::max_element(rep.phi_defect_leg.begin(), rep.phi_defect_leg.end());
    const int samples = 401;
    const double mk = ipow(cfg.mu, k);
    for (int i = 0; i < N; ++i) {
        const Poly& ph = model.psi_hat(i);
        const double half = cfg.b[i] * std::abs(model.R(i - 1)) * mk;
        double sup = 0.0, scaled = 0.0, cr = 0.0;
        for (int m = 0; m < samples; ++m) {
            const double s = -cfg.box + 2.0 * cfg.box * m / (samples - 1);
            sup = std::max(sup, std::abs(ph(s)));
            for (int d = 0; d <= cfg.r; ++d) cr = std::max(cr, std::abs(ph.deriv(s, d)));
            const double sd = -half + 2.0 * half * m / (samples - 1);
            scaled = std::max(scaled, std::abs(model.psi_hat_scaled_part(i)(sd)));
        }
        rep.psi_hat_sup.push_back(sup);
        rep.psi_hat_scaled_sup.push_back(scaled);
        rep.psi_hat_cr.push_back(cr);
    }
    return rep;
}

double phi_psi_dependence(const RescalingConfig& a, const RescalingConfig& b, int k, int grid) {
    const RescalingModel ma(a, k), mb(b, k);
    double worst = 0.0;
    for (const Vec2& p : disc_grid(grid))
        for (int i = 0; i < a.N; ++i) worst = std::max(worst, (ma.phi_empirical(i, p) - mb.phi_empirical(i, p)).norm());
    return worst;
}

// ---- composition identity

CorollaryMaps corollary_composition(const std::vector<Poly>& psi_list, const Poly& psi) {
    if (psi_list.empty() || psi_list.size() % 2 != 0)
        throw std::invalid_argument("the composition identity needs an even, non-empty psi list");
    std::vector<MapDescriptor> head;
    for (const Poly& p : psi_list) head.push_back(henon_like(p.fn()));
    const MapDescriptor h0 = henon_like(RealFn::zero());
    const MapDescriptor R = quarter_rotation();
    const MapDescriptor S = shear_map(psi.fn());
    CorollaryMaps out;
    auto with = [&](std::vector<MapDescriptor> tail) {
        std::vector<MapDescriptor> all = head;
        all.insert(all.end(), tail.begin(), tail.end());
        return compose_all(all);
    };
    out.f_hat = with({h0, h0, h0});
    out.f_hat.name = "F_hat";
    out.shear_f_hat = compose(S, out.f_hat);
    out.henon_product = with({h0, h0, henon_like(psi.fn())});
    out.literal_f_hat = compose(S, with({h0, R.inverse_map(), R}));
    return out;
}

double corollary_defect(const CorollaryMaps& maps, const std::vector<Vec2>& points, double* literal_defect) {
    double worst = 0.0, literal = 0.0;
    for (const Vec2& p : points) {
        const Vec2 target = maps.henon_product(p);
        worst = std::max(worst, (maps.shear_f_hat(p) - target).norm());
        literal = std::max(literal, (maps.literal_f_hat(p) - target).norm());
    }
    if (literal_defect) *literal_defect = literal;
    return worst;
}

}  // namespace islab
