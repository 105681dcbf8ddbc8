#pragma once

#include "islab/core.hpp"

#include <functional>
#include <vector>

namespace islab {

/// Sampled graph {y = w(x)} over [x0, x1] with values and slopes at uniform nodes (cubic Hermite interpolation).
class GraphCurve {
public:
    GraphCurve() = default;
    GraphCurve(double x0, double x1, std::vector<double> w, std::vector<double> dw);

    static GraphCurve from_function(double x0, double x1, const RealFn& f, int n = 257);
    static GraphCurve constant(double x0, double x1, double y, int n = 257);

    double x0() const { return x0_; }
    double x1() const { return x1_; }
    int size() const { return static_cast<int>(w_.size()); }
    double node(int i) const { return x0_ + i * h_; }
    double value(int i) const { return w_[i]; }
    double slope(int i) const { return dw_[i]; }
    Vec2 point(int i) const { return {node(i), w_[i]}; }

    /// Interpolated value; throws DomainError outside [x0, x1] (with 1e-12 relative slack).
    double operator()(double x) const;
    double deriv(double x) const;
    bool covers(double a, double b) const;

    /// h^4/384 max|w''''| with w'''' estimated from second differences of the slopes.
    double interpolation_error_estimate() const;

private:
    int segment(double x, double* t) const;

    double x0_ = 0.0, x1_ = 1.0, h_ = 1.0;
    std::vector<double> w_, dw_;
};

/// Image of the graph of c under f, re-parameterized over the image interval on a uniform grid.
/// Throws DomainError on a transversality failure (vertical tangency or fold).
GraphCurve graph_transform(const MapDescriptor& f, const GraphCurve& c, int n_out = -1);

/// Graph transform of the vertical shear (x, y) -> (x, y + psi(x)): w -> w + psi, exact on the nodes.
GraphCurve shear_graph(const GraphCurve& c, const RealFn& psi);

/// Real tau-periodic function given by N uniform samples and trigonometric interpolation.
class PeriodicFn {
public:
    PeriodicFn() = default;
    /// samples at origin + j * period / N, j = 0..N-1; N must be even
    PeriodicFn(double period, double origin, std::vector<double> samples);

    static PeriodicFn sample(const std::function<double(double)>& f, double period, double origin, int n = 128);
    static PeriodicFn zero(double period, double origin, int n = 128);

    double period() const { return period_; }
    double origin() const { return origin_; }
    int size() const { return static_cast<int>(samples_.size()); }
    const std::vector<double>& samples() const { return samples_; }
    double node(int j) const { return origin_ + j * period_ / size(); }

    double operator()(double x) const { return deriv(x, 0); }
    double deriv(double x, int k) const;
    double mean() const { return re_.empty() ? 0.0 : re_[0]; }

    /// x -> f(x - s)
    PeriodicFn shifted(double s) const;
    PeriodicFn minus_mean() const;
    PeriodicFn operator+(const PeriodicFn& o) const;
    PeriodicFn operator-(const PeriodicFn& o) const;
    PeriodicFn scaled(double s) const;

    /// sup |D^k f| over a grid of 4N points
    double deriv_sup(int k) const;
    double sup_norm() const { return deriv_sup(0); }
    /// max_{1 <= i <= r} sup |D^i f|
    double norm0(int r = 2) const;

    RealFn as_fn() const;

private:
    void transform();

    double period_ = 1.0, origin_ = 0.0;
    std::vector<double> samples_;
    // coefficients of cos(k theta) and sin(k theta), k = 0..N/2, Nyquist term already halved
    std::vector<double> re_, im_;
};

}  // namespace islab
