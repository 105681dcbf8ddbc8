#pragma once

#include "islab/core.hpp"

namespace islab {

/// Autonomous one-degree-of-freedom Hamiltonian on a canonical pair (q1, q2):
/// dq1/dt = dH/dq2, dq2/dt = -dH/dq1. Cartesian pairs are (x, y); polar pairs are (rho, theta).
struct HamiltonianSystem {
    enum class Coords { Cartesian, Polar };

    std::function<double(Vec2)> H;
    std::function<Vec2(Vec2)> grad;
    /// Optional analytic Hessian; a symmetrized difference of grad is used otherwise.
    std::function<Mat2(Vec2)> hessian;
    Coords coords = Coords::Cartesian;
    int steps = 64;
    /// 2 is plain implicit midpoint; 4 and 6 are symmetric compositions of it.
    int order = 2;
    double solver_tol = 1e-13;
};

/// One implicit-midpoint step of size h; updates jac (if non-null) by the exact discrete derivative.
Vec2 midpoint_step(const HamiltonianSystem& sys, Vec2 z, double h, Mat2* jac);

/// Time-t flow of sys from z, with the derivative of the discrete flow in jac when requested.
Vec2 hamiltonian_flow(const HamiltonianSystem& sys, Vec2 z, double t, Mat2* jac = nullptr);

/// Descriptor of the discrete time-t map; its inverse is the time -t map.
MapDescriptor hamiltonian_time_map(const HamiltonianSystem& sys, double t);

Mat2 hessian_at(const HamiltonianSystem& sys, Vec2 z);

}  // namespace islab
