#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace islab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

using PlanePoint = Vec2;

/// Reduce a real to [0,1).
double wrap01(double v);
/// Reduce a real to [-1/2,1/2).
double wrap_half(double v);

struct TorusPoint {
    double x = 0.0;
    double y = 0.0;

    static TorusPoint reduce(Vec2 p) { return {wrap01(p.x), wrap01(p.y)}; }
    Vec2 lift() const { return {x, y}; }
};

/// Shortest displacement from a to b on the unit torus.
Vec2 torus_delta(Vec2 a, Vec2 b);
double torus_distance(Vec2 a, Vec2 b);

struct Mat2 {
    double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;

    static Mat2 identity() { return {}; }
    static Mat2 zero() { return {0.0, 0.0, 0.0, 0.0}; }
    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }
    Vec2 apply(Vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 operator+(const Mat2& o) const { return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22}; }
    Mat2 operator-(const Mat2& o) const { return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22}; }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    Mat2 transpose() const { return {a11, a21, a12, a22}; }
    Mat2 inverse() const;
    double max_abs() const;
    bool finite() const;
};

using Jacobian2 = Mat2;

class DomainError : public std::runtime_error {
public:
    DomainError(const std::string& what, Vec2 p);
    Vec2 point;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Rect {
    double x0, x1, y0, y1;
    bool contains(Vec2 p, double margin = 0.0) const {
        return p.x >= x0 + margin && p.x <= x1 - margin && p.y >= y0 + margin && p.y <= y1 - margin;
    }
};

struct Domain {
    enum class Kind { Plane, Torus, Rects };
    Kind kind = Kind::Plane;
    std::vector<Rect> rects;

    static Domain plane() { return {}; }
    static Domain torus() { return {Kind::Torus, {}}; }
    static Domain boxes(std::vector<Rect> r) { return {Kind::Rects, std::move(r)}; }
    bool contains(Vec2 p, double margin = 0.0) const;
    std::string describe() const;
};

/// A scalar function of one variable with derivatives of any order on demand.
class RealFn {
public:
    using Rule = std::function<double(double, int)>;

    RealFn();
    explicit RealFn(Rule rule) : rule_(std::move(rule)) {}

    double operator()(double x) const { return rule_(x, 0); }
    double deriv(double x, int k = 1) const { return rule_(x, k); }

    static RealFn zero();
    static RealFn constant(double c);
    /// c[0] + c[1] x + c[2] x^2 + ...
    static RealFn polynomial(std::vector<double> c);
    /// sum_j a_j cos(2 pi j x / period) + b_j sin(2 pi j x / period), j = 1..a.size()
    static RealFn trig(double period, std::vector<double> a, std::vector<double> b);

    RealFn operator+(const RealFn& o) const;
    RealFn operator-(const RealFn& o) const;
    RealFn operator*(const RealFn& o) const;
    RealFn scaled(double s) const;
    /// x -> f(s * x + c)
    RealFn affine_arg(double s, double c) const;

private:
    Rule rule_;
};

struct MapDescriptor {
    std::string name;
    std::function<Vec2(Vec2)> rule;
    std::function<Mat2(Vec2)> jac_rule;
    std::function<Vec2(Vec2)> inverse_rule;
    Domain domain;
    bool symplectic = true;
    /// Density J of the preserved area form J dx^dy; empty means Lebesgue.
    std::function<double(Vec2)> density;
    /// Optional joint evaluation of value and Jacobian, used when cheaper than two calls.
    std::function<Vec2(Vec2, Mat2*)> eval_jac_rule;
    /// Optional builder of the exact inverse descriptor (with its own Jacobian rule).
    std::function<MapDescriptor()> inverse_factory;

    Vec2 operator()(Vec2 p) const;
    /// Value at p with the Jacobian written to *j.
    Vec2 eval_jac(Vec2 p, Mat2* j) const;
    Mat2 jacobian(Vec2 p) const;
    bool has_inverse() const { return static_cast<bool>(inverse_rule); }
    Vec2 inverse(Vec2 q) const;
    /// |J(f p) det Df(p) / J(p) - 1|
    double area_defect(Vec2 p) const;
    /// Lebesgue defect |det Df(p) - 1| irrespective of the density.
    double lebesgue_defect(Vec2 p) const;
    /// Descriptor of the exact inverse (requires inverse_rule).
    MapDescriptor inverse_map() const;
};

MapDescriptor compose(const MapDescriptor& f, const MapDescriptor& g);
MapDescriptor compose_all(const std::vector<MapDescriptor>& maps_right_to_left);
MapDescriptor identity_map(Domain d = Domain::plane());
MapDescriptor affine_map(const Mat2& m, Vec2 c, std::string name = "affine");

struct NewtonOptions {
    int max_iter = 50;
    double tol = 1e-12;
};

/// Returns p with |f(p) - target| <= tol * max(1, |target|).
Vec2 invert_at(const MapDescriptor& f, Vec2 target, Vec2 guess, NewtonOptions opt = {});

double default_fd_step(Vec2 p);
Mat2 finite_difference_jacobian(const MapDescriptor& f, Vec2 p, double h = -1.0);

MapDescriptor anosov_map();
Mat2 anosov_matrix();
struct SaddleData {
    Vec2 point;
    double lambda_u = 0.0;
    double lambda_s = 0.0;
    Vec2 e_u;
    Vec2 e_s;
};

/// Real eigen-decomposition of j at p; throws SolverError unless |lambda_u| > 1 > |lambda_s|.
SaddleData saddle_from_jacobian(Vec2 p, const Mat2& j);

/// ln(9 + 4 sqrt 5)
double anosov_sigma();
MapDescriptor chirikov_map(double a);
MapDescriptor shear_map(RealFn psi);
MapDescriptor henon_like(RealFn psi);
/// (x, y) -> (-y, x)
MapDescriptor quarter_rotation();

}  // namespace islab
