#include "islab/hamiltonian.hpp"

#include <array>
#include <string>
#include <vector>

namespace islab {

namespace {

Vec2 vector_field(const HamiltonianSystem& sys, Vec2 z) {
    Vec2 g = sys.grad(z);
    return {g.y, -g.x};
}

// J S with J = [[0,1],[-1,0]]
Mat2 j_times(const Mat2& s) { return {s.a21, s.a22, -s.a11, -s.a12}; }

std::vector<double> composition_weights(int order) {
    if (order == 2) return {1.0};
    auto triple = [](const std::vector<double>& base, double p) {
        double g1 = 1.0 / (2.0 - std::pow(2.0, 1.0 / p));
        double g0 = 1.0 - 2.0 * g1;
        std::vector<double> out;
        for (double c : {g1, g0, g1})
            for (double b : base) out.push_back(c * b);
        return out;
    };
    if (order == 4) return triple({1.0}, 3.0);
    if (order == 6) return triple(triple({1.0}, 3.0), 5.0);
    throw std::invalid_argument("hamiltonian integrator order must be 2, 4 or 6");
}

}  // namespace

Mat2 hessian_at(const HamiltonianSystem& sys, Vec2 z) {
    if (sys.hessian) return sys.hessian(z);
    const double h = 1e-5 * (1.0 + z.norm());
    Vec2 gx = (sys.grad({z.x + h, z.y}) - sys.grad({z.x - h, z.y})) / (2.0 * h);
    Vec2 gy = (sys.grad({z.x, z.y + h}) - sys.grad({z.x, z.y - h})) / (2.0 * h);
    double off = 0.5 * (gx.y + gy.x);
    return {gx.x, off, off, gy.y};
}

Vec2 midpoint_step(const HamiltonianSystem& sys, Vec2 z, double h, Mat2* jac) {
    const double scale = std::max(1.0, z.norm());
    const double tol = sys.solver_tol * scale;
    Vec2 z1 = z + vector_field(sys, z) * h;
    bool done = false;
    double last = INFINITY;
    for (int it = 0; it < 100; ++it) {
        Vec2 next = z + vector_field(sys, (z + z1) * 0.5) * h;
        double d = (next - z1).norm();
        z1 = next;
        if (d <= tol) {
            done = true;
            break;
        }
        if (!(d < last) && it > 3) break;
        last = d;
    }
    if (!done) {
        for (int it = 0; it < 50; ++it) {
            Vec2 m = (z + z1) * 0.5;
            Vec2 r = z1 - z - vector_field(sys, m) * h;
            Mat2 a = Mat2::identity() - j_times(hessian_at(sys, m)) * (0.5 * h);
            Vec2 dz = a.inverse().apply(r);
            z1 = z1 - dz;
            if (dz.norm() <= tol) {
                done = true;
                break;
            }
        }
    }
    if (!done || !z1.finite())
        throw SolverError("implicit midpoint solver did not converge (h=" + std::to_string(h) + ")");
    if (jac) {
        Mat2 js = j_times(hessian_at(sys, (z + z1) * 0.5)) * (0.5 * h);
        Mat2 step = (Mat2::identity() - js).inverse() * (Mat2::identity() + js);
        *jac = step * *jac;
    }
    return z1;
}

Vec2 hamiltonian_flow(const HamiltonianSystem& sys, Vec2 z, double t, Mat2* jac) {
    if (sys.steps < 1) throw std::invalid_argument("hamiltonian step count must be >= 1");
    if (!std::isfinite(t)) throw std::invalid_argument("hamiltonian time must be finite");
    const auto w = composition_weights(sys.order);
    const double h = t / sys.steps;
    if (jac) *jac = Mat2::identity();
    for (int s = 0; s < sys.steps; ++s)
        for (double c : w) z = midpoint_step(sys, z, c * h, jac);
    return z;
}

MapDescriptor hamiltonian_time_map(const HamiltonianSystem& sys, double t) {
    MapDescriptor m;
    m.name = "flow(t=" + std::to_string(t) + ")";
    m.rule = [sys, t](Vec2 p) { return hamiltonian_flow(sys, p, t); };
    m.jac_rule = [sys, t](Vec2 p) {
        Mat2 j;
        hamiltonian_flow(sys, p, t, &j);
        return j;
    };
    m.inverse_rule = [sys, t](Vec2 q) { return hamiltonian_flow(sys, q, -t); };
    m.eval_jac_rule = [sys, t](Vec2 p, Mat2* j) { return hamiltonian_flow(sys, p, t, j); };
    m.inverse_factory = [sys, t]() { return hamiltonian_time_map(sys, -t); };
    return m;
}

}  // namespace islab
