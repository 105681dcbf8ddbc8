#pragma once

#include "islab/core.hpp"
#include "islab/hamiltonian.hpp"

#include <array>
#include <cstdint>

namespace islab {

struct PolarPoint {
    double rho = 0.0;
    double theta = 0.0;
};

/// (x, y) - center = sqrt(2 rho) (cos theta, sin theta); theta in [0, 2 pi).
PolarPoint polar_chart(Vec2 p, Vec2 center);
Vec2 polar_chart_inverse(PolarPoint q, Vec2 center);
/// Jacobian of (x, y) -> (rho, theta); its determinant is 1.
Mat2 polar_chart_jacobian(Vec2 p, Vec2 center);

/// Quintic smoothstep 6t^5 - 15t^4 + 10t^3 clipped to [0,1], with derivatives up to order 2.
double smoothstep5(double t, int k = 0);

struct SurgeryProfile {
    double delta = 0.15;
    double epsilon = 0.24;
    double rho0 = 0.15 * 0.15 / 4.0;

    static SurgeryProfile make(double delta, double epsilon, double rho0 = -1.0);

    double kappa() const { return delta * delta; }
    /// radius of the link circle, delta^2 / 2
    double rho_link() const { return 0.5 * kappa(); }
    double rho_outer() const { return 0.5 * epsilon * epsilon; }
    /// xi reaches 1 here
    double rho1() const { return 0.5 * (rho0 + rho_link()); }
    /// psi(rho) = rho - delta^2/2 below rho_a and psi(rho) = rho above rho_b
    double rho_a() const { return rho_link() + 0.25 * (rho_outer() - rho_link()); }
    double rho_b() const { return rho_link() + 0.75 * (rho_outer() - rho_link()); }

    double psi(double rho, int k = 0) const;
    double psi_inverse(double r) const;
    double xi(double rho, int k = 0) const;

    /// Empty when valid, otherwise a description of the violation.
    std::string violation() const;
};

/// The blown-up Anosov map on the torus with holes V_i around the four 2-torsion points.
class IslandMap {
public:
    enum class Regime { Identity, ClosedForm, Flow, Conjugated, Anosov };

    explicit IslandMap(SurgeryProfile profile = {}, int flow_steps = 256, int flow_order = 6);

    const SurgeryProfile& profile() const { return profile_; }
    const std::array<Vec2, 4>& centers() const { return centers_; }
    Vec2 unstable_direction() const { return eu_; }
    Vec2 stable_direction() const { return es_; }

    Vec2 eval(Vec2 p) const;
    Mat2 jacobian(Vec2 p) const;
    Vec2 inverse(Vec2 q) const;
    Regime regime(Vec2 p) const;

    /// Density of the invariant form Psi^* omega.
    double density(Vec2 p) const;

    /// F-hat as a toral descriptor with exact inverse and invariant density.
    MapDescriptor descriptor() const;
    /// Psi_i as a toral descriptor; rejects points strictly inside V_i.
    MapDescriptor surgery_map(int i) const;
    /// Psi on the complement of all holes.
    MapDescriptor surgery() const;
    /// Psi-conjugated derivative cocycle DPsi(F p) DF(p) DPsi(p)^-1 along F-hat orbits.
    MapDescriptor conjugated_descriptor() const;

    Vec2 surgery_eval(Vec2 p) const;
    Mat2 surgery_jacobian(Vec2 p) const;
    Vec2 surgery_inverse(Vec2 q) const;

    /// Index of the center whose V_i' contains p (local offset in z), or -1.
    int locate(Vec2 p, Vec2* z = nullptr) const;
    /// Signed distance |p - Omega_i| - delta to the nearest hole.
    double hole_distance(Vec2 p) const;
    bool in_hole(Vec2 p) const { return hole_distance(p) < 0.0; }

    /// Closed form of the local map A z sqrt(1 - kappa/|z|^2 + kappa/|Az|^2); false if undefined.
    bool closed_form(const Mat2& a, Vec2 z, Vec2* out, Mat2* jac) const;
    /// Time t flow of the cut-off Hamiltonian in local coordinates.
    Vec2 inner_flow(Vec2 z, double t, Mat2* jac) const;
    /// Largest deviation of the numeric uv flow from A z on boundary samples of V_i'.
    double flow_match_defect(int samples = 64) const;

private:
    Vec2 apply(const Mat2& a, double t, Vec2 p, Mat2* jac) const;
    Vec2 psi_local(Vec2 z, Mat2* jac) const;
    Vec2 psi_local_inverse(Vec2 w) const;
    Vec2 psi_inverse_global(Vec2 q, Mat2* jac) const;

    SurgeryProfile profile_;
    std::array<Vec2, 4> centers_;
    Vec2 eu_, es_;
    HamiltonianSystem inner_;
};

struct IslandSaddle {
    int center = 0;
    double theta = 0.0;
    SaddleData data;
};

/// The four fixed points of F-hat on the link circle of center i, refined by Newton.
std::vector<IslandSaddle> link_saddles(const IslandMap& f, int i);

/// Number of fixed points of the induced circle map on the link circle of center i.
int count_circle_fixed_points(const IslandMap& f, int i, int samples = 720);

struct IslandReport {
    double identity_defect = 0.0;
    double equivariance_defect = 0.0;
    double conjugacy_defect = 0.0;
    double collar_defect_inner = 0.0;
    double collar_defect_outer = 0.0;
    double area_defect = 0.0;
    double lebesgue_defect = 0.0;
    /// Largest one-step distance from the link circle along 100 iterates of circle samples.
    double circle_invariance = 0.0;
    double island_invariance = 0.0;
    double flow_match = 0.0;
    int samples = 0;
};

IslandReport symmetry_and_identity_report(const IslandMap& f, int samples, std::uint64_t seed);

/// Max area defect over n uniform samples (with the invariant density, and Lebesgue).
std::pair<double, double> island_area_defects(const IslandMap& f, int samples, std::uint64_t seed);

}  // namespace islab
