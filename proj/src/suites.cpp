#include "islab/suites.hpp"

#include "islab/lyapunov.hpp"
#include "islab/parallel.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace islab {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Csv {
public:
    Csv(const fs::path& path, const std::string& header) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        out_ << header << '\n';
    }
    template <class... T>
    void row(const T&... v) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(v), first = false), ...);
        out_ << '\n';
    }
    ~Csv() { out_.flush(); }

private:
    static std::string cell(double v) { return num(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }
    fs::path path_;
    std::ofstream out_;
};

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

Vec2 uniform_torus(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    return {x, u(rng)};
}

std::string rel(const fs::path& base, const fs::path& p) { return fs::relative(p, base).generic_string(); }

void write_lambda_field(const EntropyReport& e, const fs::path& path) {
    Csv csv(path, "x,y,lambda,valid");
    for (int j = 0; j < e.grid.ny; ++j)
        for (int i = 0; i < e.grid.nx; ++i) {
            const Vec2 c = e.grid.cell_center(i, j);
            const int idx = j * e.grid.nx + i;
            csv.row(c.x, c.y, e.lambda[idx], static_cast<int>(e.valid[idx]));
        }
}

// ---------------------------------------------------------------- island

void run_island(const ExperimentConfig& cfg, const fs::path& out, RunReport& rep) {
    const SurgeryProfile profile = island_profile(cfg);
    const IslandMap f(profile, cfg.integer("island.flow_steps"));
    const IslandReport sym = symmetry_and_identity_report(f, cfg.integer("island.samples"), cfg.seed());
    rep.checks.push_back(check_at_most("equivariance F(-p) = -F(p)", sym.equivariance_defect, 1e-9));
    rep.checks.push_back(check_at_most("identity below rho0", sym.identity_defect, 1e-12));
    rep.checks.push_back(check_at_most("invariant area form", sym.area_defect, 1e-8));
    rep.metrics["symmetry"] = {{"samples", sym.samples},
                               {"equivariance_defect", sym.equivariance_defect},
                               {"identity_defect", sym.identity_defect},
                               {"conjugacy_defect", sym.conjugacy_defect},
                               {"area_defect", sym.area_defect},
                               {"lebesgue_defect", sym.lebesgue_defect},
                               {"circle_invariance", sym.circle_invariance},
                               {"flow_match", sym.flow_match}};

    const double lu = std::exp(2.0 * anosov_sigma());
    const fs::path saddles = out / "saddles.csv";
    Csv csv(saddles, "center,theta,x,y,lambda_u,lambda_s,relative_error");
    int min_count = 4, max_count = 4;
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        const int count = count_circle_fixed_points(f, i);
        min_count = std::min(min_count, count);
        max_count = std::max(max_count, count);
        for (const auto& s : link_saddles(f, i)) {
            const double err = std::max(std::abs(s.data.lambda_u / lu - 1.0), std::abs(s.data.lambda_s * lu - 1.0));
            worst = std::max(worst, err);
            csv.row(s.center, s.theta, s.data.point.x, s.data.point.y, s.data.lambda_u, s.data.lambda_s, err);
        }
    }
    rep.artifacts.push_back(rel(out, saddles));
    rep.checks.push_back(check_equal("fixed points per link circle (min)", min_count, 4));
    rep.checks.push_back(check_equal("fixed points per link circle (max)", max_count, 4));
    rep.checks.push_back(check_at_most("saddle multipliers e^{+-2 sigma} (relative)", worst, 1e-4));

    // Cells starting inside a hole are excluded: the holes are invariant, so every valid cell is an island cell.
    const MapDescriptor fd = f.descriptor();
    const auto in_hole = [&f](Vec2 p) { return f.in_hole(p); };
    const int n = cfg.integer("island.horizon");
    const double d = profile.delta;
    const int points = cfg.integer("island.points");
    if (points > 0) {
        const double outside = std::max(1.0 - 4.0 * M_PI * d * d, 1e-3);
        int side = static_cast<int>(std::ceil(std::sqrt(points / outside)));
        EntropyReport e;
        for (;; ++side) {
            e = entropy_estimate(fd, GridSpec{{0, 1, 0, 1}, side, side}, n, cfg.threads(), in_hole);
            if (e.valid_cells >= points) break;
        }
        rep.checks.push_back(check_at_least("island cells sampled", e.valid_cells, points));
        rep.checks.push_back(check_at_least("fraction of island cells with lambda_n >= ln 4", e.fraction, 0.95));
        rep.metrics["fraction"] = {{"grid", side}, {"n", n}, {"fraction", e.fraction}, {"valid_cells", e.valid_cells}};
    }
    const int grid = cfg.integer("island.grid");
    if (grid > 0) {
        const EntropyReport e = entropy_estimate(fd, GridSpec{{0, 1, 0, 1}, grid, grid}, n, cfg.threads(), in_hole);
        const double bound = std::log(4.0) * (1.0 - 4.0 * M_PI * d * d) - 0.05;
        rep.checks.push_back(check_at_least("Pesin entropy estimate", e.estimate, bound));
        rep.metrics["entropy"] = {{"grid", grid}, {"n", n}, {"estimate", e.estimate}, {"fraction", e.fraction},
                                  {"valid_cells", e.valid_cells}, {"bound", bound}};
        const fs::path field = out / "lambda_field.csv";
        write_lambda_field(e, field);
        rep.artifacts.push_back(rel(out, field));
    }
}

// ---------------------------------------------------------------- lyapunov

void run_lyapunov(const ExperimentConfig& cfg, const fs::path& out, RunReport& rep) {
    const std::string which = cfg.text("lyapunov.map");
    std::unique_ptr<IslandMap> island;
    MapDescriptor f, cone_map;
    if (which == "anosov") {
        f = anosov_map();
        cone_map = f;
    } else if (which == "chirikov") {
        f = chirikov_map(cfg.real("lyapunov.a"));
    } else {
        island = std::make_unique<IslandMap>(
            SurgeryProfile::make(cfg.real("lyapunov.delta"), cfg.real("lyapunov.epsilon")));
        f = island->descriptor();
        cone_map = island->conjugated_descriptor();
    }
    std::mt19937_64 rng(cfg.seed());
    const int n = cfg.integer("lyapunov.n");
    std::vector<Vec2> pts(cfg.integer("lyapunov.points"));
    for (auto& p : pts) p = uniform_torus(rng);
    std::vector<double> lam(pts.size());
    parallel_for(pts.size(), cfg.threads(), [&](std::size_t i) { lam[i] = max_lyapunov(f, pts[i], n).lambda; });
    const fs::path path = out / "exponents.csv";
    {
        Csv csv(path, "x,y,lambda");
        for (std::size_t i = 0; i < pts.size(); ++i) csv.row(pts[i].x, pts[i].y, lam[i]);
    }
    rep.artifacts.push_back(rel(out, path));
    double lo = lam.front(), hi = lam.front(), mean = 0.0, worst = 0.0;
    int above = 0;
    for (double v : lam) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        mean += v / lam.size();
        worst = std::max(worst, std::abs(v - anosov_sigma()));
        above += v >= std::log(4.0);
    }
    rep.metrics["exponents"] = {{"map", which}, {"n", n}, {"points", pts.size()}, {"min", lo}, {"max", hi}, {"mean", mean}};
    if (which == "anosov") rep.checks.push_back(check_at_most("|lambda_n - ln(9 + 4 sqrt 5)|", worst, 1e-6));
    if (which == "island")
        rep.checks.push_back(check_at_least("fraction with lambda_n >= ln 4", double(above) / lam.size(), 0.95));

    const int cone_points = cfg.integer("lyapunov.cone_points");
    if (cone_map.rule && cone_points > 0) {
        const int steps = cfg.integer("lyapunov.cone_steps");
        int held = 0, tested = 0;
        while (tested < cone_points) {
            const Vec2 p = uniform_torus(rng);
            if (island && island->hole_distance(p) <= 1e-3) continue;
            held += cone_certificate(cone_map, p, steps).holds;
            ++tested;
        }
        rep.checks.push_back(check_equal("cone certificate holds (points)", held, tested));
        const ConeCertificate rot = cone_certificate(quarter_rotation(), {0.3, 0.4}, steps);
        rep.checks.push_back(check_equal("cone certificate fails for the quarter rotation at step", rot.failed_step, 1));
    }

    const int grid = cfg.integer("lyapunov.grid");
    if (grid > 0) {
        const EntropyReport e = entropy_estimate(f, GridSpec{{0, 1, 0, 1}, grid, grid}, n, cfg.threads());
        rep.metrics["entropy"] = {{"grid", grid}, {"estimate", e.estimate}, {"fraction", e.fraction}, {"valid_cells", e.valid_cells}};
        const fs::path field = out / "lambda_field.csv";
        write_lambda_field(e, field);
        rep.artifacts.push_back(rel(out, field));
    }
}

// ---------------------------------------------------------------- standard map scan

void run_stdmap(const ExperimentConfig& cfg, const fs::path& out, RunReport& rep) {
    const double a0 = cfg.real("stdmap.a_min"), a1 = cfg.real("stdmap.a_max"), da = cfg.real("stdmap.a_step");
    const int count = static_cast<int>(std::floor((a1 - a0) / da + 1e-9)) + 1;
    const int n = cfg.integer("stdmap.n");
    std::mt19937_64 rng(cfg.seed());
    std::vector<Vec2> pts(cfg.integer("stdmap.points"));
    for (auto& p : pts) p = uniform_torus(rng);
    std::vector<double> lam(static_cast<std::size_t>(count) * pts.size());
    parallel_for(lam.size(), cfg.threads(), [&](std::size_t idx) {
        const double a = a0 + da * static_cast<double>(idx / pts.size());
        lam[idx] = max_lyapunov(chirikov_map(a), pts[idx % pts.size()], n).lambda;
    });
    const fs::path path = out / "stdmap_scan.csv";
    Csv csv(path, "a,mean_lambda,min_lambda,max_lambda");
    nlohmann::json rows = nlohmann::json::array();
    for (int c = 0; c < count; ++c) {
        double lo = 1e300, hi = -1e300, mean = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double v = lam[c * pts.size() + i];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            mean += v / pts.size();
        }
        const double a = a0 + da * c;
        csv.row(a, mean, lo, hi);
        rows.push_back({{"a", a}, {"mean_lambda", mean}});
    }
    rep.artifacts.push_back(rel(out, path));
    rep.metrics["scan"] = rows;
}

// ---------------------------------------------------------------- links

double sup_closed(const PeriodicFn& m, const std::function<double(double)>& ref) {
    double best = 0.0;
    for (int j = 0; j < 512; ++j) {
        const double x = m.origin() + m.period() * j / 512.0;
        best = std::max(best, std::abs(m(x) - ref(x)));
    }
    return best;
}

void write_psi(const Restoration& r, const fs::path& path) {
    write_json(path, {{"period", r.psi_tilde.period()},
                      {"origin", r.psi_tilde.origin()},
                      {"samples", r.psi_tilde.samples()},
                      {"note", "psi = rho * psi_tilde with the partition bump rho of the link"}});
}

void write_trace(const Restoration& r, const fs::path& path) {
    Csv csv(path, "iter,sup_residual,norm0_residual");
    for (const auto& s : r.trace) csv.row(s.iter, s.sup_residual, s.norm0_residual);
}

void run_links(const ExperimentConfig& cfg, const fs::path& out, RunReport& rep) {
    const LinkGeometry g = link_geometry(cfg);
    const SuitableModel m0(g);
    std::mt19937_64 rng(cfg.seed());
    RestoreOptions opt;
    opt.tol = cfg.real("links.tol");
    opt.max_iter = cfg.integer("links.max_iter");
    const int samples = cfg.integer("links.samples");

    const int trials = cfg.integer("links.closed_form_trials");
    if (trials > 0) {
        const SplittingPipeline pa(m0, LinkSide::A, samples), pb(m0, LinkSide::B, samples);
        const RealFn ra = partition_bump(g, LinkSide::A), rb = partition_bump(g, LinkSide::B);
        double ea = 0.0, eb = 0.0;
        std::uniform_int_distribution<int> harm(1, 8);
        for (int t = 0; t < trials; ++t) {
            const RealFn p = random_trig_polynomial(g.tau, harm(rng), 1e-2, rng, false);
            const RealFn psa = ra * p, psb = rb * p;
            ea = std::max(ea, sup_closed(pa(psa), [&](double x) { return splitting_a_closed_form(g, psa, x); }));
            eb = std::max(eb, sup_closed(pb(psb), [&](double x) { return splitting_b_closed_form(g, psb, x); }));
        }
        rep.checks.push_back(check_at_most("closed form of M^a at the unperturbed map", ea, 1e-6));
        rep.checks.push_back(check_at_most("closed form of M^b at the unperturbed map", eb, 1e-6));
        rep.metrics["closed_form"] = {{"trials", trials}, {"max_error_a", ea}, {"max_error_b", eb}};
    }

    const int count = cfg.integer("links.perturbations");
    PerturbationSpec spec;
    spec.size = cfg.real("links.size");
    spec.harmonics = cfg.integer("links.harmonics");
    double worst_mean = 0.0, worst_link_a = 0.0;
    PerturbationSpec b_only = spec;
    b_only.strip_a = false;
    for (int j = 0; j < count; ++j) {
        const SuitableModel m(g, random_perturbation(g, b_only, rng));
        double link_a = 0.0;
        const PeriodicFn mb = splitting_b(m, RealFn::zero(), &link_a);
        worst_mean = std::max(worst_mean, std::abs(mb.mean()));
        worst_link_a = std::max(worst_link_a, link_a);
    }
    if (count > 0) {
        rep.checks.push_back(check_at_most("|mean M^b| with link a intact", worst_mean, 1e-8));
        rep.metrics["zero_mean"] = {{"perturbations", count}, {"max_abs_mean", worst_mean}, {"max_link_a_gap", worst_link_a}};
    }

    std::vector<SuitableModel> models;
    for (int j = 0; j < count; ++j) models.emplace_back(g, random_perturbation(g, spec, rng));
    struct Outcome {
        Restoration a, b;
        double gap_a = 0.0, gap_b = 0.0, contraction = 0.0, c1 = 0.0;
    };
    std::vector<Outcome> res(count);
    parallel_for(count, cfg.threads(), [&](std::size_t j) {
        Outcome& o = res[j];
        o.c1 = perturbation_c1_distance(models[j].perturbation(), g);
        o.a = restore_link_a(models[j], opt);
        const SuitableModel ma = apply_restoration(models[j], o.a.psi);
        o.b = restore_link_b(ma, opt);
        const SuitableModel mb = apply_restoration(ma, o.b.psi);
        o.gap_a = link_gap(mb, LinkSide::A);
        o.gap_b = link_gap(mb, LinkSide::B);
        if (o.b.psi_tilde.sup_norm() > 0.0) o.contraction = contraction_factor_b(m0, o.b.psi_tilde);
    });
    int max_iter = 0;
    double sup_res = 0.0, gap = 0.0, contraction = 0.0;
    bool all_done = true;
    nlohmann::json rows = nlohmann::json::array();
    for (int j = 0; j < count; ++j) {
        const Outcome& o = res[j];
        char name[32];
        for (const auto* side : {"a", "b"}) {
            const Restoration& r = side[0] == 'a' ? o.a : o.b;
            std::snprintf(name, sizeof name, "perturbation_%02d_%s", j, side);
            const fs::path dir = out / name;
            fs::create_directories(dir);
            write_trace(r, dir / "residuals.csv");
            write_psi(r, dir / "psi.json");
            rep.artifacts.push_back(rel(out, dir / "residuals.csv"));
            rep.artifacts.push_back(rel(out, dir / "psi.json"));
        }
        max_iter = std::max({max_iter, o.a.iterations(), o.b.iterations()});
        sup_res = std::max({sup_res, o.a.final_sup(), o.b.final_sup()});
        gap = std::max({gap, o.gap_a, o.gap_b});
        contraction = std::max(contraction, o.contraction);
        all_done = all_done && o.a.done() && o.b.done();
        rows.push_back({{"perturbation", j},
                        {"c1_distance", o.c1},
                        {"iterations_a", o.a.iterations()},
                        {"iterations_b", o.b.iterations()},
                        {"final_sup_a", o.a.final_sup()},
                        {"final_sup_b", o.b.final_sup()},
                        {"final_norm0_b", o.b.final_norm0()},
                        {"max_ratio_a", o.a.max_ratio()},
                        {"max_ratio_b", o.b.max_ratio()},
                        {"stalled_b", o.b.stalled},
                        {"gap_a", o.gap_a},
                        {"gap_b", o.gap_b},
                        {"contraction_factor_b", o.contraction}});
    }
    if (count > 0) {
        rep.checks.push_back(check_equal("restorations reaching tolerance", all_done ? 1 : 0, 1));
        rep.checks.push_back(check_at_most("restoration iterations", max_iter, 30));
        rep.checks.push_back(check_at_most("final sup residual", sup_res, 1e-8));
        rep.checks.push_back(check_at_most("sup |w^u - w^s| after restoring both links", gap, 1e-7));
        rep.checks.push_back(check_at_most("contraction factor of id - M^b_rho", contraction, 0.6));
        rep.metrics["restoration"] = rows;
    }
}

// ---------------------------------------------------------------- rescaling

std::vector<Vec2> disc_samples(int count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec2> pts;
    while (static_cast<int>(pts.size()) < count) {
        const double x = u(rng);
        const Vec2 p{x, u(rng)};
        if (p.norm2() <= 1.0) pts.push_back(p);
    }
    return pts;
}

void run_rescaling(const ExperimentConfig& cfg, const fs::path& out, RunReport& rep) {
    const RescalingConfig base = rescaling_config(cfg);
    const bool affine = cfg.text("rescaling.configuration") == "affine";
    const std::vector<int> ks = cfg.int_list("rescaling.k_list");
    const int grid = cfg.integer("rescaling.grid");
    std::vector<RescalingReport> reports(ks.size());
    parallel_for(ks.size(), cfg.threads(), [&](std::size_t i) { reports[i] = verify_rescaling(base, ks[i], grid); });

    const fs::path ek = out / "e_of_k.csv";
    {
        Csv csv(ek, "k,n,error,phi_defect");
        for (const auto& r : reports) csv.row(r.k, r.n, r.error, r.phi_defect);
    }
    rep.artifacts.push_back(rel(out, ek));
    const fs::path pointwise = out / "rescaling_grid.csv";
    {
        Csv csv(pointwise, "k,X,Y,error");
        for (int k : ks) {
            const RescalingModel model(base, k);
            for (const Vec2& p : disc_grid(grid))
                csv.row(k, p.x, p.y, (model.renormalized_return(p) - model.henon_product(p)).norm());
        }
    }
    rep.artifacts.push_back(rel(out, pointwise));

    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : reports)
        rows.push_back({{"k", r.k},
                        {"n", r.n},
                        {"error", r.error},
                        {"phi_defect", r.phi_defect},
                        {"phi_defect_per_leg", r.phi_defect_leg},
                        {"psi_hat_sup", r.psi_hat_sup},
                        {"psi_hat_scaled_sup", r.psi_hat_scaled_sup},
                        {"psi_hat_cr", r.psi_hat_cr}});
    rep.metrics["rows"] = rows;

    if (affine) {
        double worst = 0.0;
        for (const auto& r : reports) worst = std::max(worst, r.error);
        rep.checks.push_back(check_at_most("E(k) for the affine configuration", worst, 1e-9));
    } else {
        for (std::size_t i = 1; i < reports.size(); ++i)
            rep.checks.push_back(check_less("E(" + std::to_string(ks[i]) + ") < E(" + std::to_string(ks[i - 1]) + ")",
                                            reports[i].error, reports[i - 1].error));
        for (std::size_t i = 0; i < reports.size(); ++i)
            if (ks[i] == 14) rep.checks.push_back(check_at_most("E(14)", reports[i].error, 0.05));
    }
    const double lm = base.lambda * base.mu;
    for (std::size_t i = 1; i < reports.size(); ++i) {
        const int dk = ks[i] - ks[i - 1];
        if (dk <= 0) continue;
        for (int j = 0; j < base.N; ++j) {
            const double full = reports[i].psi_hat_sup[j] / reports[i - 1].psi_hat_sup[j];
            const double scaled = reports[i].psi_hat_scaled_sup[j] / reports[i - 1].psi_hat_scaled_sup[j];
            const std::string tag = " (i=" + std::to_string(j + 1) + ", k=" + std::to_string(ks[i]) + ")";
            rep.checks.push_back(check_less("psi_hat sup-norm ratio" + tag, full, 1.0));
            if (std::isfinite(scaled))
                rep.checks.push_back(check_at_most("rescaled psi term ratio vs (lambda mu)^dk" + tag, scaled,
                                                   std::pow(lm, dk) * 1.1));
        }
    }

    std::mt19937_64 rng(cfg.seed());
    const int sets = cfg.integer("rescaling.psi_sets");
    const double amp = cfg.real("rescaling.psi_amplitude");
    double dependence = 0.0;
    for (int s = 0; s < sets; ++s) {
        RescalingConfig other = base;
        for (auto& p : other.psi) p = random_poly(2, amp, rng);
        dependence = std::max(dependence, phi_psi_dependence(base, other, ks.back(), grid));
    }
    if (sets > 0) {
        rep.checks.push_back(check_at_most("Phi_i independent of psi", dependence, 1e-9));
        rep.metrics["phi_psi_dependence"] = dependence;
    }

    const int cpts = cfg.integer("rescaling.corollary_points");
    if (cpts > 0) {
        const std::vector<Poly> list{random_poly(2, 0.5, rng), random_poly(2, 0.5, rng)};
        const Poly psi = random_poly(3, 0.5, rng);
        const CorollaryMaps maps = corollary_composition(list, psi);
        double literal = 0.0;
        const double defect = corollary_defect(maps, disc_samples(cpts, rng), &literal);
        rep.checks.push_back(check_at_most("S_psi o F_hat = H-product", defect, 1e-10));
        rep.metrics["corollary"] = {{"points", cpts}, {"defect", defect}, {"defect_with_S_psi_eq_H_psi_R_inverse", literal}};
    }
}

}  // namespace

Check check_at_most(std::string name, double value, double tol) {
    return {std::move(name), value, tol, "<=", value <= tol};
}

Check check_at_least(std::string name, double value, double tol) {
    return {std::move(name), value, tol, ">=", value >= tol};
}

Check check_less(std::string name, double value, double bound) {
    return {std::move(name), value, bound, "<", value < bound};
}

Check check_equal(std::string name, double value, double expected) {
    return {std::move(name), value, expected, "==", value == expected};
}

bool RunReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

nlohmann::json RunReport::to_json() const {
    nlohmann::json j;
    j["suite"] = suite;
    j["config"] = config;
    j["passed"] = passed();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
        j["checks"].push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    j["metrics"] = metrics;
    j["artifacts"] = artifacts;
    return j;
}

SurgeryProfile island_profile(const ExperimentConfig& cfg) {
    const double rho0 = cfg.real("island.rho0");
    return SurgeryProfile::make(cfg.real("island.delta"), cfg.real("island.epsilon"), rho0 > 0.0 ? rho0 : -1.0);
}

LinkGeometry link_geometry(const ExperimentConfig& cfg) {
    LinkGeometry g;
    g.tau = cfg.real("links.tau");
    g.xa = cfg.real("links.xa");
    g.xb = cfg.real("links.xb");
    g.y1 = cfg.real("links.y1");
    g.y2 = cfg.real("links.y2");
    g.delta = cfg.real("links.delta");
    return g;
}

RescalingConfig rescaling_config(const ExperimentConfig& cfg) {
    const RescalingConfig preset =
        cfg.text("rescaling.configuration") == "affine" ? RescalingConfig::affine() : RescalingConfig::nonlinear();
    RescalingConfig c = preset;
    c.N = cfg.integer("rescaling.N");
    c.lambda = cfg.real("rescaling.lambda");
    c.mu = cfg.real("rescaling.mu");
    c.r = cfg.integer("rescaling.r");
    c.box = cfg.real("rescaling.box");
    if (c.N != preset.N && c.N > 0) {
        const int P = preset.N;
        c.b.clear();
        c.x_plus.clear();
        c.y_minus.clear();
        c.psi.clear();
        c.tails.clear();
        for (int i = 0; i < c.N; ++i) {
            c.b.push_back(preset.b[i % P]);
            c.x_plus.push_back(preset.x_plus[0] + 0.45 * i);
            c.y_minus.push_back(preset.y_minus[0] + 0.5 * i);
            c.psi.push_back(preset.psi[i % P]);
            if (!preset.tails.empty()) c.tails.push_back(preset.tails[i % P]);
        }
    }
    return c;
}

std::vector<std::string> suite_violations(const ExperimentConfig& cfg) {
    std::vector<std::string> v;
    const std::string& s = cfg.suite();
    if (s == "island") {
        if (auto e = island_profile(cfg).violation(); !e.empty()) v.push_back("island: " + e);
    } else if (s == "lyapunov") {
        if (cfg.text("lyapunov.map") == "island")
            if (auto e = SurgeryProfile::make(cfg.real("lyapunov.delta"), cfg.real("lyapunov.epsilon")).violation(); !e.empty())
                v.push_back("lyapunov: " + e);
    } else if (s == "stdmap-scan") {
        if (cfg.real("stdmap.a_max") < cfg.real("stdmap.a_min")) v.push_back("stdmap: a_max must be >= a_min");
    } else if (s == "links") {
        if (auto e = link_geometry(cfg).violation(); !e.empty()) v.push_back("links: " + e);
    } else if (s == "rescaling") {
        for (const auto& e : rescaling_config(cfg).violations()) v.push_back("rescaling: " + e);
        const auto ks = cfg.int_list("rescaling.k_list");
        for (std::size_t i = 1; i < ks.size(); ++i)
            if (ks[i] <= ks[i - 1]) {
                v.push_back("rescaling: k_list must be strictly increasing");
                break;
            }
    }
    return v;
}

void write_report(const RunReport& report, const std::string& dir) {
    write_json(fs::path(dir) / "report.json", report.to_json());
}

RunReport run_suite(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path out = cfg.output();
    fs::create_directories(out);
    RunReport rep;
    rep.suite = cfg.suite();
    rep.config = cfg.resolved();
    if (rep.suite == "island") run_island(cfg, out, rep);
    else if (rep.suite == "lyapunov") run_lyapunov(cfg, out, rep);
    else if (rep.suite == "stdmap-scan") run_stdmap(cfg, out, rep);
    else if (rep.suite == "links") run_links(cfg, out, rep);
    else if (rep.suite == "rescaling") run_rescaling(cfg, out, rep);
    else throw ConfigError({"unknown suite '" + rep.suite + "'"});
    rep.artifacts.push_back("report.json");
    write_report(rep, out.string());
    rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace islab
