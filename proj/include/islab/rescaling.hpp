#pragma once

#include "islab/core.hpp"

#include <random>
#include <string>
#include <vector>

namespace islab {

/// Real polynomial c[0] + c[1] x + ...
struct Poly {
    std::vector<double> c;

    double operator()(double x) const { return deriv(x, 0); }
    double deriv(double x, int k) const;
    Poly antiderivative() const;
    /// x -> p(s x)
    Poly scaled_arg(double s) const;
    Poly operator+(const Poly& o) const;
    Poly scaled(double s) const;
    RealFn fn() const;
};

Poly random_poly(int degree, double amplitude, std::mt19937_64& rng);

/// T0 = time-1 map of H = h(xy): x -> e^{h'(xy)} x, y -> e^{-h'(xy)} y,
/// with h'(u) = ln(lambda) + n[0] u + n[1] u^2 + ... (contraction along x).
struct SaddleNormalForm {
    double lambda = 0.4;
    std::vector<double> nonlinearity;

    bool linear() const;
    /// h'(u) - ln(lambda)
    double excess(double u) const;
    double excess_deriv(double u) const;
    Vec2 operator()(Vec2 p) const;
    Mat2 jacobian(Vec2 p) const;
    Vec2 inverse(Vec2 q) const;
    MapDescriptor descriptor() const;
    /// T0 = (lambda x + p x, lambda^-1 y + q y)
    double p(double x, double y) const;
    double q(double x, double y) const;
};

SaddleNormalForm saddle_normal_form(double lambda, std::vector<double> nonlinearity = {});

/// Cross-form of T0^k: from entry x-coordinate xbar and exit y-coordinate y, the entry y and exit x.
struct CrossSolution {
    double entry_y = 0.0;
    double exit_x = 0.0;
    double u = 0.0;
    /// xi_k / lambda^k and eta_k / lambda^k
    double xi_scaled = 0.0;
    double eta_scaled = 0.0;
    int iterations = 0;
};

/// Solves x = lambda^k xbar + xi_k(xbar, y), ybar = lambda^k y + eta_k(xbar, y) by fixed-point iteration on u = xy.
CrossSolution solve_cross(const SaddleNormalForm& t0, int k, double xbar, double y);

struct XiEtaTable {
    int k = 0;
    Rect window{};
    int n = 0;
    std::vector<double> xi, eta;  // row-major (j * n + i), i along xbar, j along y
    double sup_xi = 0.0;
    double sup_eta = 0.0;
    /// sup |T0^k(entry) - exit| by direct iteration
    double reconstruction = 0.0;
};

XiEtaTable xi_eta(const SaddleNormalForm& t0, int k, Rect window, int n = 11);

/// Tails of T1 = L o P o S: S(x, Y) = (x, Y + a1 x + a2 x^2), P(x, Y) = (x / g'(Y), g(Y)) with
/// g(Y) = Y + g2 Y^2 + g3 Y^3, L(x, Y) = (x+ + b Y, c x). Each factor is area-preserving.
struct TransitionTail {
    double a1 = 0.0, a2 = 0.0, g2 = 0.0, g3 = 0.0;
    bool zero() const { return a1 == 0.0 && a2 == 0.0 && g2 == 0.0 && g3 == 0.0; }
};

struct TransitionMap {
    double x_plus = 0.0, y_minus = 0.0, b = 1.0, c = -1.0;
    TransitionTail tail;

    /// d = d^2 phi2 / dx dY at 0
    double d() const { return -2.0 * c * tail.g2; }
    Vec2 operator()(Vec2 p) const;
    Mat2 jacobian(Vec2 p) const;
    Vec2 inverse(Vec2 q) const;
    MapDescriptor descriptor() const;
    /// tails in xbar = x+ + b Y + phi1(x, Y), ybar = c x + phi2(x, Y), Y = y - y-
    double phi1(double x, double Y) const;
    double phi2(double x, double Y) const;
};

TransitionMap build_transition(double x_plus, double y_minus, double b, double c, TransitionTail tail = {});

/// R_1 = 1, R_{i+1} = -c_{i+1} b_i R_{i-1} (indices mod N, N odd).
std::vector<double> r_sequence(const std::vector<double>& b, const std::vector<double>& c);

struct RescalingConfig {
    int N = 3;
    double lambda = 0.4;
    double mu = 0.8;
    int r = 2;
    std::vector<double> b{0.25, 0.2, 0.3};
    /// empty means c_i = -1 / b_i
    std::vector<double> c;
    std::vector<double> x_plus{1.2, 1.65, 2.1};
    std::vector<double> y_minus{0.4, 0.9, 1.4};
    /// half-side of the boxes V_i; V_i' has half the size
    double box = 0.2;
    std::vector<double> t0_nonlinearity;
    std::vector<TransitionTail> tails;
    /// psi_1..psi_N
    std::vector<Poly> psi;

    std::vector<double> c_values() const;
    /// largest |x| after one T0 step from a box: boxes must lie beyond it
    double t0_window_escape() const;
    /// empty when valid
    std::vector<std::string> violations() const;

    static RescalingConfig affine();
    static RescalingConfig nonlinear();
};

/// All objects of the construction for one value of k.
class RescalingModel {
public:
    RescalingModel(RescalingConfig cfg, int k);

    const RescalingConfig& config() const { return cfg_; }
    int k() const { return k_; }
    int N() const { return cfg_.N; }
    /// n = N (k s + m) with s = m = 1
    int n() const { return cfg_.N * (k_ + 1); }

    double R(int i) const { return R_[idx(i)]; }
    double beta(int i) const { return beta_[idx(i)]; }
    double gamma(int i) const { return gamma_[idx(i)]; }
    double C(int i) const { return C_[idx(i)]; }
    double A(int i) const { return A_[idx(i)]; }
    const SaddleNormalForm& t0() const { return t0_; }
    const TransitionMap& t1(int i) const { return t1_[idx(i)]; }

    /// rescaling charts (0-based indices, taken mod N)
    Vec2 Qbar(int i, Vec2 P) const;
    Vec2 Qbar_inverse(int i, Vec2 p) const;
    Vec2 Q(int i, Vec2 P) const;
    Vec2 Q_inverse(int i, Vec2 p) const;
    double Qbar_det(int i) const;

    /// correction in box i as a polynomial in s = xbar - x+_i
    const Poly& psi_hat(int i) const { return psi_hat_[idx(i)]; }
    /// scaled copy of psi_{i-1} inside psi_hat_i (the lambda^k mu^k R term)
    const Poly& psi_hat_scaled_part(int i) const { return psi_scaled_[idx(i)]; }

    /// g = time-1 map of H = -Psi(xbar) rho(xbar, ybar); identity outside the boxes
    Vec2 g(Vec2 p, Mat2* jac = nullptr) const;
    Vec2 g_inverse(Vec2 q) const;
    MapDescriptor perturbation() const;
    /// true when p lies in some V_i' together with its vertical shear image
    bool in_inner_box(Vec2 p, int* box = nullptr) const;

    /// half-width of the disjoint neighbourhoods of the points M_i- on which T1 acts
    double transition_radius() const;
    /// g o T1 o (g o T0)^k from near M_i+ to near M_{i+1}+ (original coordinates)
    Vec2 leg(int i, Vec2 p) const;
    /// Qbar_1^-1 o fhat^n o Qbar_1
    Vec2 renormalized_return(Vec2 P) const;
    /// H_{psi_N} o ... o H_{psi_1}
    Vec2 henon_product(Vec2 P) const;
    /// Phi_i = H_{psi_i}^-1 o Qbar_{i+1}^-1 o leg_i o Qbar_i
    Vec2 phi_empirical(int i, Vec2 P) const;

private:
    int idx(int i) const { return ((i % cfg_.N) + cfg_.N) % cfg_.N; }
    Vec2 flow_box(int box, Vec2 p, double t, Mat2* jac) const;

    RescalingConfig cfg_;
    int k_;
    double lk_, mk_;
    SaddleNormalForm t0_;
    std::vector<TransitionMap> t1_;
    std::vector<double> R_, beta_, gamma_, C_, A_;
    std::vector<Poly> psi_hat_, psi_scaled_, Psi_;
};

struct RescalingReport {
    int k = 0;
    int n = 0;
    double error = 0.0;
    double phi_defect = 0.0;
    std::vector<double> phi_defect_leg;
    /// sup over the box x-range of |psi_hat_i| and of its scaled part over Qbar_i(D)
    std::vector<double> psi_hat_sup, psi_hat_scaled_sup;
    /// max_{0 <= j <= r} sup |D^j psi_hat_i| over the box
    std::vector<double> psi_hat_cr;
    int points = 0;
};

/// Unit-disc grid with `grid` points per axis (points outside the disc dropped).
std::vector<Vec2> disc_grid(int grid);

RescalingReport verify_rescaling(const RescalingConfig& cfg, int k, int grid = 21, int threads = 1);

/// max over the grid and over i of |Phi_i(cfg_a) - Phi_i(cfg_b)|: the configurations differ only in psi.
double phi_psi_dependence(const RescalingConfig& a, const RescalingConfig& b, int k, int grid = 21);

/// Maps of the shear composition identity with all Phi_i = id, for psi_list of even length N'.
struct CorollaryMaps {
    MapDescriptor f_hat;          // H_0 o H_0 o H_0 o H_{psi_N'} o ... o H_{psi_1}
    MapDescriptor shear_f_hat;    // S_psi o f_hat
    MapDescriptor henon_product;  // H_psi o H_0 o H_0 o H_{psi_N'} o ... o H_{psi_1}
    /// S_psi o R o R^-1 o H_0 o H_{psi_N'} o ...: the variant built from S_psi = H_psi o R^-1
    MapDescriptor literal_f_hat;
};

CorollaryMaps corollary_composition(const std::vector<Poly>& psi_list, const Poly& psi);

/// sup over points of |S_psi o f_hat - henon_product| (and of the literal variant in literal_defect).
double corollary_defect(const CorollaryMaps& maps, const std::vector<Vec2>& points, double* literal_defect = nullptr);

}  // namespace islab
