#include "islab/lyapunov.hpp"

#include "islab/parallel.hpp"

namespace islab {

double spectral_norm(const Mat2& m) {
    const double a = m.a11 * m.a11 + m.a21 * m.a21;
    const double b = m.a11 * m.a12 + m.a21 * m.a22;
    const double d = m.a12 * m.a12 + m.a22 * m.a22;
    const double half = 0.5 * (a + d);
    const double root = std::hypot(0.5 * (a - d), b);
    return std::sqrt(half + root);
}

namespace {

double log_cond(const Mat2& m) {
    const double s = spectral_norm(m);
    const double det = std::abs(m.det());
    if (det == 0.0) return INFINITY;
    // smallest singular value is |det| / s
    return 2.0 * std::log(s) - std::log(det);
}

struct Cocycle {
    Mat2 product = Mat2::identity();
    double log_scale = 0.0;
    Vec2 v{M_SQRT1_2, M_SQRT1_2};
    double log_vector = 0.0;
    double log_cond = 0.0;

    void push(const Mat2& j) {
        product = j * product;
        const double s = product.max_abs();
        if (!(s > 0.0) || !std::isfinite(s)) throw SolverError("derivative cocycle degenerated");
        product = product * (1.0 / s);
        log_scale += std::log(s);
        v = j.apply(v);
        const double nv = v.norm();
        log_vector += std::log(nv);
        v = v / nv;
        log_cond += islab::log_cond(j);
    }
    double log_norm() const { return log_scale + std::log(spectral_norm(product)); }
};

}  // namespace

ExponentSample max_lyapunov(const MapDescriptor& f, Vec2 p, int n, bool probe, const std::function<bool(Vec2)>& excluded) {
    if (n < 1) throw std::invalid_argument("horizon must be >= 1");
    ExponentSample s;
    s.point = p;
    s.n = n;
    Cocycle c;
    Vec2 x = p;
    const int total = probe ? 2 * n : n;
    for (int k = 0; k < total; ++k) {
        if (excluded && excluded(x)) throw DomainError("orbit entered an excluded region", x);
        c.push(f.jacobian(x));
        x = f(x);
        if (k + 1 == n) {
            s.log_growth = c.log_norm();
            s.lambda = s.log_growth / n;
            s.lambda_vector = c.log_vector / n;
            s.log_cond_sum = c.log_cond;
        }
    }
    if (excluded && excluded(x)) throw DomainError("orbit entered an excluded region", x);
    if (probe) s.lambda_2n = c.log_norm() / (2.0 * n);
    return s;
}

EntropyReport entropy_estimate(const MapDescriptor& f, const GridSpec& grid, int n, int threads,
                               const std::function<bool(Vec2)>& excluded, bool probe) {
    if (grid.nx < 8 || grid.ny < 8) throw std::invalid_argument("entropy grid resolution must be >= 8 per axis");
    EntropyReport r;
    r.grid = grid;
    r.n = n;
    const std::size_t cells = static_cast<std::size_t>(grid.nx) * grid.ny;
    r.lambda.assign(cells, 0.0);
    r.valid.assign(cells, 0);
    r.probe.assign(cells, 0.0);
    parallel_for(cells, threads, [&](std::size_t idx) {
        const int i = static_cast<int>(idx % grid.nx), j = static_cast<int>(idx / grid.nx);
        try {
            ExponentSample s = max_lyapunov(f, grid.cell_center(i, j), n, probe, excluded);
            if (!std::isfinite(s.lambda)) return;
            r.lambda[idx] = s.lambda;
            r.valid[idx] = 1;
            if (probe) r.probe[idx] = s.probe();
        } catch (const DomainError&) {
        } catch (const SolverError&) {
        }
    });
    int above = 0;
    for (std::size_t idx = 0; idx < cells; ++idx) {
        if (!r.valid[idx]) continue;
        ++r.valid_cells;
        r.estimate += std::max(r.lambda[idx], 0.0) * grid.cell_area();
        if (r.lambda[idx] >= r.threshold) ++above;
        r.max_probe = std::max(r.max_probe, r.probe[idx]);
    }
    r.fraction = r.valid_cells > 0 ? double(above) / r.valid_cells : 0.0;
    return r;
}

ConeCertificate cone_certificate(const MapDescriptor& f, Vec2 p, int n) {
    ConeCertificate c;
    Vec2 x = p;
    for (int k = 0; k < n; ++k) {
        Mat2 j = f.jacobian(x);
        Vec2 c1{j.a11, j.a21}, c2{j.a12, j.a22};
        c.growth.push_back(std::min(c1.norm(), c2.norm()));
        bool ok = j.a11 >= 0.0 && j.a12 >= 0.0 && j.a21 >= 0.0 && j.a22 >= 0.0 && c1.norm() >= 4.0 && c2.norm() >= 4.0;
        if (!ok) {
            c.holds = false;
            c.failed_step = k + 1;
            return c;
        }
        x = f(x);
    }
    return c;
}

}  // namespace islab
