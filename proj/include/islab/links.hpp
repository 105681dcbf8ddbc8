#pragma once

#include "islab/core.hpp"
#include "islab/curves.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace islab {

/// Septic smoothstep 35t^4 - 84t^5 + 70t^6 - 20t^7 clipped to [0,1] (C^3), derivatives up to order 4.
double smoothstep7(double t, int k = 0);
RealFn smoothstep7_fn();

enum class LinkSide { A, B };

struct LinkGeometry {
    double tau = 1.0;
    double xa = -3.0;
    double xb = 2.0;
    double y1 = 1.0;
    double y2 = -1.0;
    /// support margin of the perturbation strips
    double delta = 0.1;

    double ym() const { return 0.5 * (y1 + y2); }
    /// offset of the contraction rule F^4 = theta - (x/2, 2y) on D2^b
    Vec2 theta() const { return {1.5 * xb + 2.0 * tau, y2 + 2.0 * y1}; }
    /// sample margin beyond the fundamental intervals
    double margin() const { return 0.05 * tau; }
    /// x-interval on which restoring perturbations of the given link live
    std::pair<double, double> support(LinkSide s) const;
    /// empty when consistent
    std::string violation() const;
};

/// Pieces of the unperturbed map: translations on the strips, the shift into the middle line,
/// the contraction piece and the half translation along D4^b.
enum class Leg { Ta, Tb, TX, TT1, Td4 };

class SuitableModel {
public:
    explicit SuitableModel(LinkGeometry g = {}, MapDescriptor perturbation = identity_map());

    const LinkGeometry& geometry() const { return g_; }
    const MapDescriptor& perturbation() const { return G_; }
    bool perturbed() const { return perturbed_; }
    SuitableModel with_perturbation(MapDescriptor G) const { return SuitableModel(g_, std::move(G)); }

    /// piece of the unperturbed map
    MapDescriptor unperturbed(Leg leg) const;
    /// F = G o leg, with exact inverse leg^-1 o G^-1
    MapDescriptor map(Leg leg) const;
    /// legs of F^7 from [x_b, x_b + tau] back to D4^b, in application order
    static std::vector<Leg> b_cycle();
    /// F^4 on D2^b: (x, y) -> theta - (x/2, 2y)
    MapDescriptor contraction_rule() const;

    /// unperturbed inflow of W^s(Q) for link a: y = y1 left of D2^a
    GraphCurve inflow_stable_a(int n = 257) const;
    /// y = y1 right of D2^a, part of W^u(P) for link a
    GraphCurve inflow_unstable_a(int n = 257) const;
    /// y = y2 along D4^b, part of W^s(Q) for link b
    GraphCurve inflow_stable_b(int n = 257) const;
    /// y = y1 left of D2^b, part of W^u(P) for link b
    GraphCurve inflow_unstable_b(int n = 257) const;

private:
    LinkGeometry g_;
    MapDescriptor G_;
    bool perturbed_ = false;
};

/// Validates the geometry (strip disjointness, y2 < y1) and returns the unperturbed model.
SuitableModel build_suitable_model(const LinkGeometry& g);

/// rho with rho(x) + rho(x - tau) = 1 on [x_a - tau, x_a] (side A) or rho(x) + rho(x + tau) = 1 on
/// [x_b, x_b + tau] (side B), supported in geometry.support(side).
RealFn partition_bump(const LinkGeometry& g, LinkSide side);
/// Plateau bump equal to 1 on the middle of the support interval and 0 outside it.
RealFn strip_bump(const LinkGeometry& g, LinkSide side);

/// Time-1 map of H = eps * b(x) c(y) by `steps` implicit midpoint steps (exactly symplectic); identity where b vanishes.
MapDescriptor hamiltonian_bump_perturbation(RealFn b, RealFn c, double eps, int steps = 1);

struct PerturbationSpec {
    double size = 1e-3;
    bool strip_a = true;
    bool strip_b = true;
    int harmonics = 3;
};

/// Random symplectic perturbation supported in the selected strips; size bounds sup|H|.
MapDescriptor random_perturbation(const LinkGeometry& g, const PerturbationSpec& spec, std::mt19937_64& rng);

/// sup |G - id| and sup ||DG - I|| over a grid of the strips around the link lines.
double perturbation_c1_distance(const MapDescriptor& G, const LinkGeometry& g, int samples = 40);

/// Random trigonometric polynomial with period tau, up to `harmonics` harmonics, sup bounded by amplitude.
RealFn random_trig_polynomial(double tau, int harmonics, double amplitude, std::mt19937_64& rng, bool zero_mean = true);

class TimeEnergyChart {
public:
    TimeEnergyChart(const SuitableModel& model, LinkSide side);

    LinkSide side() const { return side_; }
    bool is_identity() const { return !model_.perturbed(); }
    double bump(double x, int k = 0) const;

    Vec2 operator()(Vec2 p) const;
    Mat2 jacobian(Vec2 p) const;
    Vec2 inverse(Vec2 q) const;
    MapDescriptor descriptor() const;

    /// blend phi0 = id + rho (F0 o F^-1 - id) and its Jacobian
    Vec2 blend(Vec2 p) const;
    Mat2 blend_jacobian(Vec2 p) const;

    /// sup |phi o F - F0 o phi| on samples of the strip N
    double conjugacy_residual(int samples = 24) const;
    /// sup |det of the difference Jacobian of phi - 1| on samples of N u F(N)
    double area_defect(int samples = 24) const;
    /// sup over samples of |phi - id| and ||D phi - I||
    double c1_distance(int samples = 24) const;

private:
    Vec2 formula(Vec2 p, Mat2* jac) const;
    Vec2 eval(Vec2 p, Mat2* jac) const;
    double sigma(double x, double y, double* sx, double* sy) const;
    double blend_det(double x, double y) const;
    bool recursive(double x) const;

    SuitableModel model_;
    LinkSide side_;
    Leg leg_;
    MapDescriptor F_, Finv_, F0_, Ginv_;
    double ramp_lo_ = 0.0, ramp_w_ = 1.0;
};

TimeEnergyChart time_energy_chart(const SuitableModel& model, LinkSide side);

/// Link-splitting function machinery for one side, with the psi-independent curves cached.
class SplittingPipeline {
public:
    SplittingPipeline(const SuitableModel& model, LinkSide side, int samples = 128);

    LinkSide side() const { return side_; }
    const SuitableModel& model() const { return model_; }
    const TimeEnergyChart& chart() const { return chart_; }
    /// left end of the fundamental interval over which M is sampled
    double origin() const;

    GraphCurve unstable(const RealFn& psi) const;
    GraphCurve stable(const RealFn& psi) const;
    /// M = w^u - w^s sampled on one period; rejects psi not vanishing outside the support strip
    PeriodicFn operator()(const RealFn& psi, bool enforce_support = true) const;

    void check_support(const RealFn& psi) const;

private:
    SuitableModel model_;
    LinkSide side_;
    int samples_;
    TimeEnergyChart chart_;
    GraphCurve unstable_base_;  // F applied to the unstable inflow
    GraphCurve stable_base_;    // (F^n o phi^-1)# of the chart image of the stable curve
    GraphCurve unstable_chart_; // w^u, independent of psi
};

PeriodicFn splitting_a(const SuitableModel& model, const RealFn& psi);
/// Also reports sup|M^a(F, 0)| in link_a_defect when requested.
PeriodicFn splitting_b(const SuitableModel& model, const RealFn& psi, double* link_a_defect = nullptr);

/// M^a at the unperturbed map: psi(x) + psi(x - tau)
double splitting_a_closed_form(const LinkGeometry& g, const RealFn& psi, double x);
/// M^b at the unperturbed map, four-term contraction form
double splitting_b_closed_form(const LinkGeometry& g, const RealFn& psi, double x);
/// psi~(x) - (psi~((3x_b + tau - x)/2) + psi~((3x_b + 2tau - x)/2)) / 2
double splitting_b_operator(const LinkGeometry& g, const RealFn& psi_tilde, double x);

struct RestoreOptions {
    double tol = 1e-10;
    int max_iter = 50;
    double mean_limit = 1e-6;
    /// residuals below this are treated as the numerical floor when the ratio test fails
    double floor = 1e-9;
};

struct RestoreStep {
    int iter = 0;
    double sup_residual = 0.0;
    double norm0_residual = 0.0;
    double mean = 0.0;
};

struct Restoration {
    LinkSide side = LinkSide::A;
    PeriodicFn psi_tilde;
    RealFn psi;
    std::vector<RestoreStep> trace;
    bool converged = false;
    /// residual stopped decreasing below the floor before reaching tol
    bool stalled = false;
    bool done() const { return converged || stalled; }
    int iterations() const { return static_cast<int>(trace.size()); }
    double final_sup() const { return trace.empty() ? 0.0 : trace.back().sup_residual; }
    double final_norm0() const { return trace.empty() ? 0.0 : trace.back().norm0_residual; }
    /// max ratio of successive residuals in the solver norm
    double max_ratio() const;
};

/// psi~ <- psi~ - M^a(rho psi~); residual measured in sup norm.
Restoration restore_link_a(const SuitableModel& model, const RestoreOptions& opt = {});
/// psi~ <- P0(psi~ - M^b(rho psi~)); residual measured in the derivative norm max_{i=1,2} sup|D^i M|.
Restoration restore_link_b(const SuitableModel& model, const RestoreOptions& opt = {});

/// Model with G replaced by S_psi o G.
SuitableModel apply_restoration(const SuitableModel& model, const RealFn& psi);

/// sup |w^u - w^s| over the fundamental interval of the side, with psi = 0.
double link_gap(const SuitableModel& model, LinkSide side);

/// ||psi~ - M^b_rho(psi~)||_0 / ||psi~||_0 at the unperturbed model.
double contraction_factor_b(const SuitableModel& unperturbed, const PeriodicFn& psi_tilde);

struct GrownManifold {
    GraphCurve curve;
    double invariance_defect = 0.0;
    int iterations = 0;
};

/// Unstable manifold of the saddle on the given side (+1 along e_u, -1 against), grown by graph
/// transforms of a short eigendirection segment until its length reaches arclength.
GrownManifold manifold_grow(const MapDescriptor& f, const SaddleData& saddle, int side, double arclength, int n = 257);

}  // namespace islab
