#pragma once

#include "islab/core.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace islab {

struct ExponentSample {
    Vec2 point;
    int n = 0;
    /// log ||Df^n(p)|| accumulated through a renormalized product
    double log_growth = 0.0;
    /// (1/n) log ||Df^n(p)||
    double lambda = 0.0;
    /// (1/n) log |Df^n(p) v| for the unit tangent vector v started at (1,1)/sqrt 2
    double lambda_vector = 0.0;
    /// lambda at horizon 2n when the stability probe is requested, NaN otherwise
    double lambda_2n = std::nan("");
    /// sum over the orbit of log cond Df; lambda_vector >= -log_cond_sum / n
    double log_cond_sum = 0.0;

    double lower_bound() const { return n > 0 ? -log_cond_sum / n : 0.0; }
    double probe() const { return std::abs(lambda - lambda_2n); }
};

/// Maximal Lyapunov exponent at horizon n by iterating the derivative cocycle along the orbit of p.
/// Throws DomainError/SolverError if the orbit leaves the domain.
ExponentSample max_lyapunov(const MapDescriptor& f, Vec2 p, int n, bool probe = false,
                            const std::function<bool(Vec2)>& excluded = {});

/// Largest singular value of a 2x2 matrix.
double spectral_norm(const Mat2& m);

struct GridSpec {
    Rect region{0.0, 1.0, 0.0, 1.0};
    int nx = 100;
    int ny = 100;

    double cell_area() const { return (region.x1 - region.x0) * (region.y1 - region.y0) / (double(nx) * ny); }
    Vec2 cell_center(int i, int j) const {
        return {region.x0 + (i + 0.5) * (region.x1 - region.x0) / nx, region.y0 + (j + 0.5) * (region.y1 - region.y0) / ny};
    }
};

struct EntropyReport {
    GridSpec grid;
    int n = 0;
    double threshold = std::log(4.0);
    /// row-major over (j, i): index j * nx + i
    std::vector<double> lambda;
    std::vector<unsigned char> valid;
    std::vector<double> probe;
    double estimate = 0.0;
    /// fraction of valid cells with lambda >= threshold
    double fraction = 0.0;
    int valid_cells = 0;
    double max_probe = 0.0;
};

/// Midpoint-rule Pesin integral of max(lambda_n, 0). Cells whose orbit throws or meets `excluded` are invalid.
EntropyReport entropy_estimate(const MapDescriptor& f, const GridSpec& grid, int n, int threads = 1,
                               const std::function<bool(Vec2)>& excluded = {}, bool probe = false);

struct ConeCertificate {
    bool holds = true;
    int failed_step = -1;
    /// per-step min(|Df e1|, |Df e2|)
    std::vector<double> growth;
};

/// True iff every step's derivative maps the closed positive quadrant into itself and stretches both
/// edge generators by at least 4.
ConeCertificate cone_certificate(const MapDescriptor& f, Vec2 p, int n);

}  // namespace islab
