#include "islab/curves.hpp"

#include <algorithm>
#include <memory>
#include <numbers>

namespace islab {

// ------------------------------------------------------------ GraphCurve

GraphCurve::GraphCurve(double x0, double x1, std::vector<double> w, std::vector<double> dw)
    : x0_(x0), x1_(x1), w_(std::move(w)), dw_(std::move(dw)) {
    if (!(x0 < x1)) throw std::invalid_argument("graph curve interval must satisfy x0 < x1");
    if (w_.size() < 2 || w_.size() != dw_.size()) throw std::invalid_argument("graph curve needs >= 2 matching samples");
    for (std::size_t i = 0; i < w_.size(); ++i)
        if (!std::isfinite(w_[i]) || !std::isfinite(dw_[i])) throw std::invalid_argument("graph curve samples must be finite");
    h_ = (x1_ - x0_) / static_cast<double>(w_.size() - 1);
}

GraphCurve GraphCurve::from_function(double x0, double x1, const RealFn& f, int n) {
    std::vector<double> w(n), dw(n);
    const double h = (x1 - x0) / (n - 1);
    for (int i = 0; i < n; ++i) {
        double x = i + 1 == n ? x1 : x0 + i * h;
        w[i] = f(x);
        dw[i] = f.deriv(x);
    }
    return {x0, x1, std::move(w), std::move(dw)};
}

GraphCurve GraphCurve::constant(double x0, double x1, double y, int n) {
    return {x0, x1, std::vector<double>(n, y), std::vector<double>(n, 0.0)};
}

bool GraphCurve::covers(double a, double b) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(x0_) + std::abs(x1_));
    return a >= x0_ - slack && b <= x1_ + slack;
}

int GraphCurve::segment(double x, double* t) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(x0_) + std::abs(x1_));
    if (!(x >= x0_ - slack && x <= x1_ + slack))
        throw DomainError("graph curve evaluated outside [" + std::to_string(x0_) + ", " + std::to_string(x1_) + "]", {x, 0.0});
    double u = (x - x0_) / h_;
    int i = std::clamp(static_cast<int>(std::floor(u)), 0, size() - 2);
    *t = u - i;
    return i;
}

double GraphCurve::operator()(double x) const {
    double t;
    int i = segment(x, &t);
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * w_[i] + h10 * h_ * dw_[i] + h01 * w_[i + 1] + h11 * h_ * dw_[i + 1];
}

double GraphCurve::deriv(double x) const {
    double t;
    int i = segment(x, &t);
    const double t2 = t * t;
    const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1, d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
    return (d00 * w_[i] + d01 * w_[i + 1]) / h_ + d10 * dw_[i] + d11 * dw_[i + 1];
}

double GraphCurve::interpolation_error_estimate() const {
    const int n = size();
    if (n < 5) return 0.0;
    std::vector<double> d3(n - 2);
    for (int i = 1; i + 1 < n; ++i) d3[i - 1] = (dw_[i + 1] - 2 * dw_[i] + dw_[i - 1]) / (h_ * h_);
    double d4 = 0.0;
    for (std::size_t i = 0; i + 1 < d3.size(); ++i) d4 = std::max(d4, std::abs(d3[i + 1] - d3[i]) / h_);
    return std::pow(h_, 4) / 384.0 * d4;
}

GraphCurve shear_graph(const GraphCurve& c, const RealFn& psi) {
    const int n = c.size();
    std::vector<double> w(n), dw(n);
    for (int i = 0; i < n; ++i) {
        double x = c.node(i);
        w[i] = c.value(i) + psi(x);
        dw[i] = c.slope(i) + psi.deriv(x);
    }
    return {c.x0(), c.x1(), std::move(w), std::move(dw)};
}

GraphCurve graph_transform(const MapDescriptor& f, const GraphCurve& c, int n_out) {
    const int n = c.size();
    if (n_out < 2) n_out = n;
    std::vector<double> X(n), Y(n), dX(n), dY(n);
    for (int i = 0; i < n; ++i) {
        Vec2 p = c.point(i);
        Mat2 j;
        Vec2 q = f.eval_jac(p, &j);
        X[i] = q.x;
        Y[i] = q.y;
        dX[i] = j.a11 + j.a12 * c.slope(i);
        dY[i] = j.a21 + j.a22 * c.slope(i);
    }
    const double sgn = dX[0] > 0.0 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) {
        if (!(dX[i] * sgn > 0.0)) throw DomainError("graph transform: transversality failure (vertical tangency)", c.point(i));
        if (i > 0 && !((X[i] - X[i - 1]) * sgn > 0.0))
            throw DomainError("graph transform: image is not a graph (fold)", c.point(i));
    }
    const double lo = sgn > 0 ? X.front() : X.back();
    const double hi = sgn > 0 ? X.back() : X.front();
    // node index in increasing-X order
    auto at = [&](int k) { return sgn > 0 ? k : n - 1 - k; };
    std::vector<double> w(n_out), dw(n_out);
    const double H = (hi - lo) / (n_out - 1);
    int cursor = 0;
    for (int k = 0; k < n_out; ++k) {
        if (k == 0 || k + 1 == n_out) {
            int i = at(k == 0 ? 0 : n - 1);
            w[k] = Y[i];
            dw[k] = dY[i] / dX[i];
            continue;
        }
        const double target = lo + k * H;
        while (cursor + 2 < n && X[at(cursor + 1)] <= target) ++cursor;
        const int i0 = at(cursor), i1 = at(cursor + 1);
        double s = c.node(i0) + (c.node(i1) - c.node(i0)) * (target - X[i0]) / (X[i1] - X[i0]);
        // Newton step from the secant guess, then a second step taken to first order on the output
        Vec2 p{s, c(s)};
        Mat2 j;
        Vec2 q = f.eval_jac(p, &j);
        s = std::clamp(s - (q.x - target) / (j.a11 + j.a12 * c.deriv(s)), c.x0(), c.x1());
        p = {s, c(s)};
        q = f.eval_jac(p, &j);
        const double ws = c.deriv(s);
        const double xs = j.a11 + j.a12 * ws, ys = j.a21 + j.a22 * ws;
        if (!(xs * sgn > 0.0)) throw DomainError("graph transform: transversality failure (vertical tangency)", p);
        w[k] = q.y + (ys / xs) * (target - q.x);
        dw[k] = ys / xs;
    }
    return {lo, hi, std::move(w), std::move(dw)};
}

// ------------------------------------------------------------ PeriodicFn

PeriodicFn::PeriodicFn(double period, double origin, std::vector<double> samples)
    : period_(period), origin_(origin), samples_(std::move(samples)) {
    if (!(period_ > 0.0)) throw std::invalid_argument("period must be positive");
    if (samples_.size() < 4 || samples_.size() % 2 != 0) throw std::invalid_argument("periodic samples must be an even count >= 4");
    transform();
}

PeriodicFn PeriodicFn::sample(const std::function<double(double)>& f, double period, double origin, int n) {
    std::vector<double> s(n);
    for (int j = 0; j < n; ++j) s[j] = f(origin + j * period / n);
    return {period, origin, std::move(s)};
}

PeriodicFn PeriodicFn::zero(double period, double origin, int n) { return {period, origin, std::vector<double>(n, 0.0)}; }

void PeriodicFn::transform() {
    const int n = size(), half = n / 2;
    re_.assign(half + 1, 0.0);
    im_.assign(half + 1, 0.0);
    for (int k = 0; k <= half; ++k) {
        double a = 0.0, b = 0.0;
        for (int j = 0; j < n; ++j) {
            // exact reduction of the angle index keeps the trig arguments small
            const double ang = 2.0 * std::numbers::pi * static_cast<double>((static_cast<long>(j) * k) % n) / n;
            a += samples_[j] * std::cos(ang);
            b += samples_[j] * std::sin(ang);
        }
        const double w = (k == 0 || k == half) ? 1.0 / n : 2.0 / n;
        re_[k] = w * a;
        im_[k] = w * b;
    }
    im_[0] = 0.0;
    im_[half] = 0.0;
}

double PeriodicFn::deriv(double x, int k) const {
    const int half = size() / 2;
    const double om = 2.0 * std::numbers::pi / period_;
    double u = std::fmod(x - origin_, period_);
    if (u < 0.0) u += period_;
    const double th = om * u;
    const double c1 = std::cos(th), s1 = std::sin(th);
    double ck = 1.0, sk = 0.0;
    double sum = 0.0;
    for (int m = 0; m <= half; ++m) {
        if (m > 0) {
            const double nc = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = nc;
        }
        // d^k/dth^k of a cos(m th) + b sin(m th)
        double a = re_[m], b = im_[m];
        double f = std::pow(m * om, k);
        double cv, sv;
        switch (k % 4) {
            case 0: cv = a; sv = b; break;
            case 1: cv = b; sv = -a; break;
            case 2: cv = -a; sv = -b; break;
            default: cv = -b; sv = a; break;
        }
        if (k > 0 && m == 0) continue;
        sum += f * (cv * ck + sv * sk);
    }
    return sum;
}

PeriodicFn PeriodicFn::shifted(double s) const {
    return sample([this, s](double x) { return (*this)(x - s); }, period_, origin_, size());
}

PeriodicFn PeriodicFn::minus_mean() const {
    std::vector<double> s = samples_;
    const double m = mean();
    for (double& v : s) v -= m;
    return {period_, origin_, std::move(s)};
}

PeriodicFn PeriodicFn::operator+(const PeriodicFn& o) const {
    if (o.size() != size() || o.period_ != period_ || o.origin_ != origin_) throw std::invalid_argument("periodic functions on different grids");
    std::vector<double> s = samples_;
    for (int j = 0; j < size(); ++j) s[j] += o.samples_[j];
    return {period_, origin_, std::move(s)};
}

PeriodicFn PeriodicFn::operator-(const PeriodicFn& o) const { return *this + o.scaled(-1.0); }

PeriodicFn PeriodicFn::scaled(double f) const {
    std::vector<double> s = samples_;
    for (double& v : s) v *= f;
    return {period_, origin_, std::move(s)};
}

double PeriodicFn::deriv_sup(int k) const {
    const int m = 4 * size();
    double best = 0.0;
    for (int j = 0; j < m; ++j) best = std::max(best, std::abs(deriv(origin_ + j * period_ / m, k)));
    return best;
}

double PeriodicFn::norm0(int r) const {
    double best = 0.0;
    for (int i = 1; i <= r; ++i) best = std::max(best, deriv_sup(i));
    return best;
}

RealFn PeriodicFn::as_fn() const {
    auto self = std::make_shared<const PeriodicFn>(*this);
    return RealFn([self](double x, int k) { return self->deriv(x, k); });
}

}  // namespace islab
