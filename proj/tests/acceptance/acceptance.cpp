// Acceptance run: one PASS/FAIL line per criterion at the stated tolerances and time limits.

#include "islab/config.hpp"
#include "islab/island.hpp"
#include "islab/links.hpp"
#include "islab/lyapunov.hpp"
#include "islab/rescaling.hpp"
#include "islab/suites.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace islab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [failed]");
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int failures = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0.0) o.require(t <= limit_s, "runtime " + fmt("%.1f", t) + " s <= " + fmt("%.0f", limit_s) + " s");
    failures += !o.pass;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
    std::fflush(stdout);
}

double max_defect(const MapDescriptor& m, const std::vector<Vec2>& pts, bool density) {
    double worst = 0.0;
    for (const Vec2& p : pts) worst = std::max(worst, density ? m.area_defect(p) : m.lebesgue_defect(p));
    return worst;
}

std::vector<Vec2> uniform(Rect r, int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) {
        const double a = u(rng);
        pts.push_back({r.x0 + (r.x1 - r.x0) * a, r.y0 + (r.y1 - r.y0) * u(rng)});
    }
    return pts;
}

const IslandMap& island() {
    static const IslandMap f(SurgeryProfile::make(0.15, 0.24));
    return f;
}

/// Byte comparison of two output trees; `skip` names a file left out of the comparison.
bool same_tree(const fs::path& a, const fs::path& b, std::string* why, const std::string& skip = "") {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file() && e.path().filename() != skip) files.push_back(fs::relative(e.path(), a));
    std::size_t count_b = 0;
    for (const auto& e : fs::recursive_directory_iterator(b))
        count_b += e.is_regular_file() && e.path().filename() != skip;
    if (files.size() != count_b) {
        *why = "file count differs";
        return false;
    }
    for (const auto& f : files) {
        std::ifstream x(a / f, std::ios::binary), y(b / f, std::ios::binary);
        std::stringstream sx, sy;
        sx << x.rdbuf();
        sy << y.rdbuf();
        if (!y || sx.str() != sy.str()) {
            *why = f.generic_string() + " differs";
            return false;
        }
    }
    return true;
}

}  // namespace

int main() {
    std::printf("islab acceptance\n");

    criterion(1, "symplectic defect of every constructed map at 10^4 points", 10.0, [] {
        Outcome o;
        std::mt19937_64 rng(101);
        const Rect torus{0, 1, 0, 1};
        const RealFn psi = RealFn::trig(1.0, {0.3, -0.1}, {0.2, 0.05});
        auto check = [&](const std::string& name, const MapDescriptor& m, const std::vector<Vec2>& pts, bool density = false) {
            const double d = max_defect(m, pts, density);
            o.require(d <= 1e-8, name + " " + fmt("%.1e", d));
        };
        check("F_A", anosov_map(), uniform(torus, 10000, rng));
        check("T_a", chirikov_map(1.3), uniform(torus, 10000, rng));
        check("S_psi", shear_map(psi), uniform({-2, 2, -2, 2}, 10000, rng));
        check("H_psi", henon_like(psi), uniform({-2, 2, -2, 2}, 10000, rng));
        check("F_hat", island().descriptor(), uniform(torus, 10000, rng), true);

        const LinkGeometry g;
        std::mt19937_64 prng(3);
        const SuitableModel model(g, random_perturbation(g, {}, prng));
        double pieces = 0.0;
        const Rect strip{g.xa - 3 * g.tau, g.xb + 2 * g.tau, g.y2 - 0.5, g.y1 + 0.5};
        for (Leg leg : {Leg::Ta, Leg::Tb, Leg::TX, Leg::TT1, Leg::Td4})
            pieces = std::max(pieces, max_defect(model.map(leg), uniform(strip, 2000, rng), false));
        o.require(pieces <= 1e-8, "model pieces " + fmt("%.1e", pieces));

        const RescalingModel rm(RescalingConfig::nonlinear(), 10);
        check("T0", rm.t0().descriptor(), uniform({-1.5, 1.5, -1.5, 1.5}, 10000, rng));
        double t1 = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double y = rm.config().y_minus[i];
            t1 = std::max(t1, max_defect(rm.t1(i).descriptor(), uniform({-0.2, 0.2, y - 0.2, y + 0.2}, 3334, rng), false));
        }
        o.require(t1 <= 1e-8, "T1 " + fmt("%.1e", t1));
        double gd = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double x = rm.config().x_plus[i], b = rm.config().box;
            gd = std::max(gd, max_defect(rm.perturbation(), uniform({x - b, x + b, -b, b}, 3334, rng), false));
        }
        o.require(gd <= 1e-8, "g " + fmt("%.1e", gd));
        return o;
    });

    criterion(2, "Anosov exponent at n = 50 equals ln(9 + 4 sqrt 5)", 0.0, [] {
        Outcome o;
        std::mt19937_64 rng(202);
        double worst = 0.0;
        for (const Vec2& p : uniform({0, 1, 0, 1}, 100, rng))
            worst = std::max(worst, std::abs(max_lyapunov(anosov_map(), p, 50).lambda - std::log(9.0 + 4.0 * std::sqrt(5.0))));
        o.require(worst <= 1e-6, "max |lambda_50 - sigma| " + fmt("%.2e", worst) + " over 100 points");
        return o;
    });

    criterion(3, "island suite (delta = 0.15)", 300.0, [] {
        Outcome o;
        const IslandMap& f = island();
        const IslandReport r = symmetry_and_identity_report(f, 1000, 303);
        o.require(r.equivariance_defect <= 1e-9, "(a) F(-p) = -F(p) " + fmt("%.1e", r.equivariance_defect));
        o.require(r.identity_defect <= 1e-12, "(b) identity for rho < rho0 " + fmt("%.1e", r.identity_defect));
        const double lu = std::exp(2.0 * anosov_sigma());
        double worst = 0.0;
        bool four = true;
        for (int i = 0; i < 4; ++i) {
            four = four && count_circle_fixed_points(f, i) == 4;
            const auto s = link_saddles(f, i);
            four = four && s.size() == 4;
            for (const auto& x : s)
                worst = std::max({worst, std::abs(x.data.lambda_u / lu - 1.0), std::abs(x.data.lambda_s * lu - 1.0)});
        }
        o.require(four && worst <= 1e-4, "(c) 4 saddles per link, multipliers rel. error " + fmt("%.1e", worst));
        const auto excluded = [&f](Vec2 p) { return f.in_hole(p); };
        const MapDescriptor fd = f.descriptor();
        const EntropyReport frac = entropy_estimate(fd, GridSpec{{0, 1, 0, 1}, 119, 119}, 200, 1, excluded);
        o.require(frac.valid_cells >= 10000 && frac.fraction >= 0.95,
                  "(d) " + std::to_string(frac.valid_cells) + " island cells, fraction " + fmt("%.4f", frac.fraction));
        const EntropyReport e = entropy_estimate(fd, GridSpec{{0, 1, 0, 1}, 100, 100}, 200, 1, excluded);
        const double bound = std::log(4.0) * (1.0 - 4.0 * M_PI * 0.15 * 0.15) - 0.05;
        o.require(e.estimate >= bound, "(e) Pesin estimate " + fmt("%.4f", e.estimate) + " >= " + fmt("%.4f", bound));
        return o;
    });

    criterion(4, "cone certificate", 0.0, [] {
        Outcome o;
        std::mt19937_64 rng(404);
        int held = 0;
        const auto pts = uniform({0, 1, 0, 1}, 20, rng);
        for (const Vec2& p : pts) held += cone_certificate(anosov_map(), p, 50).holds;
        o.require(held == 20, "F_A holds at " + std::to_string(held) + "/20 points over 50 steps");
        const ConeCertificate rot = cone_certificate(quarter_rotation(), {0.3, 0.4}, 50);
        o.require(!rot.holds && rot.failed_step == 1, "quarter rotation fails at step " + std::to_string(rot.failed_step));
        return o;
    });

    const LinkGeometry geo;
    const SuitableModel m0(geo);

    criterion(5, "closed forms of M^a and M^b for 20 trig polynomials", 30.0, [&] {
        Outcome o;
        std::mt19937_64 rng(505);
        const SplittingPipeline pa(m0, LinkSide::A), pb(m0, LinkSide::B);
        const RealFn ra = partition_bump(geo, LinkSide::A), rb = partition_bump(geo, LinkSide::B);
        std::uniform_int_distribution<int> harm(1, 8);
        double ea = 0.0, eb = 0.0;
        for (int t = 0; t < 20; ++t) {
            const RealFn p = random_trig_polynomial(geo.tau, harm(rng), 1e-2, rng, false);
            const RealFn psa = ra * p, psb = rb * p;
            const PeriodicFn ma = pa(psa), mb = pb(psb);
            for (int j = 0; j < 512; ++j) {
                const double xa = ma.origin() + ma.period() * j / 512.0, xb = mb.origin() + mb.period() * j / 512.0;
                ea = std::max(ea, std::abs(ma(xa) - splitting_a_closed_form(geo, psa, xa)));
                eb = std::max(eb, std::abs(mb(xb) - splitting_b_closed_form(geo, psb, xb)));
            }
        }
        o.require(ea <= 1e-6, "M^a " + fmt("%.1e", ea));
        o.require(eb <= 1e-6, "M^b " + fmt("%.1e", eb));
        return o;
    });

    criterion(6, "zero mean of M^b for 10 perturbations keeping link a", 0.0, [&] {
        Outcome o;
        std::mt19937_64 rng(606);
        PerturbationSpec spec;
        spec.strip_a = false;
        double worst = 0.0, link_a = 0.0;
        for (int j = 0; j < 10; ++j) {
            const SuitableModel m(geo, random_perturbation(geo, spec, rng));
            double la = 0.0;
            worst = std::max(worst, std::abs(splitting_b(m, RealFn::zero(), &la).mean()));
            link_a = std::max(link_a, la);
        }
        o.require(worst <= 1e-8, "max |mean M^b| " + fmt("%.1e", worst) + " (link a gap " + fmt("%.1e", link_a) + ")");
        return o;
    });

    criterion(7, "restoration of both links on 10 perturbations", 0.0, [&] {
        Outcome o;
        std::mt19937_64 rng(707);
        int iters = 0;
        double sup = 0.0, gap = 0.0, contraction = 0.0;
        bool done = true;
        for (int j = 0; j < 10; ++j) {
            const SuitableModel m(geo, random_perturbation(geo, {}, rng));
            const Restoration a = restore_link_a(m);
            const SuitableModel ma = apply_restoration(m, a.psi);
            const Restoration b = restore_link_b(ma);
            const SuitableModel mb = apply_restoration(ma, b.psi);
            done = done && a.done() && b.done();
            iters = std::max({iters, a.iterations(), b.iterations()});
            sup = std::max({sup, a.final_sup(), b.final_sup()});
            gap = std::max({gap, link_gap(mb, LinkSide::A), link_gap(mb, LinkSide::B)});
            contraction = std::max(contraction, contraction_factor_b(m0, b.psi_tilde));
        }
        o.require(done && iters <= 30, "iterations <= " + std::to_string(iters));
        o.require(sup <= 1e-8, "final sup residual " + fmt("%.1e", sup));
        o.require(gap <= 1e-7, "sup |w^u - w^s| " + fmt("%.1e", gap));
        o.require(contraction <= 0.6, "contraction factor of id - M^b_rho " + fmt("%.3f", contraction));
        return o;
    });

    criterion(8, "rescaling product formula", 120.0, [] {
        Outcome o;
        double affine = 0.0;
        std::vector<double> e;
        for (int k : {8, 10, 12, 14}) {
            affine = std::max(affine, verify_rescaling(RescalingConfig::affine(), k, 21).error);
            e.push_back(verify_rescaling(RescalingConfig::nonlinear(), k, 21).error);
        }
        o.require(affine <= 1e-9, "affine max E(k) " + fmt("%.1e", affine));
        const bool decreasing = e[1] < e[0] && e[2] < e[1] && e[3] < e[2];
        o.require(decreasing, "nonlinear E(8..14) = " + fmt("%.3g", e[0]) + ", " + fmt("%.3g", e[1]) + ", " +
                                  fmt("%.3g", e[2]) + ", " + fmt("%.3g", e[3]));
        o.require(e[3] <= 0.05, "E(14) <= 0.05");
        std::mt19937_64 rng(808);
        double dep = 0.0;
        const RescalingConfig base = RescalingConfig::nonlinear();
        for (int s = 0; s < 5; ++s) {
            RescalingConfig other = base;
            for (auto& p : other.psi) p = random_poly(2, 0.25, rng);
            dep = std::max(dep, phi_psi_dependence(base, other, 12, 21));
        }
        o.require(dep <= 1e-9, "Phi psi-dependence over 5 psi sets " + fmt("%.1e", dep));
        return o;
    });

    criterion(9, "composition identity S_psi o F_hat = H-product at 10^3 points", 0.0, [] {
        Outcome o;
        std::mt19937_64 rng(909);
        const std::vector<Poly> list{random_poly(2, 0.5, rng), random_poly(2, 0.5, rng)};
        const Poly psi = random_poly(3, 0.5, rng);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<Vec2> pts;
        while (pts.size() < 1000) {
            const double x = u(rng);
            const Vec2 p{x, u(rng)};
            if (p.norm2() <= 1.0) pts.push_back(p);
        }
        double literal = 0.0;
        const double d = corollary_defect(corollary_composition(list, psi), pts, &literal);
        o.require(d <= 1e-10, "defect " + fmt("%.1e", d) + " (uncorrected shear identity: " + fmt("%.2g", literal) + ")");
        return o;
    });

    criterion(10, "bitwise-deterministic artifacts for identical config and seed", 0.0, [] {
        Outcome o;
        const fs::path root = fs::temp_directory_path() / "islab_acceptance_determinism";
        fs::remove_all(root);
        const std::vector<std::string> configs{
            "suite = island\nisland.samples = 100\nisland.points = 150\nisland.grid = 8\nisland.horizon = 60\n",
            "suite = lyapunov\nlyapunov.map = island\nlyapunov.n = 30\nlyapunov.points = 40\nlyapunov.grid = 12\nlyapunov.cone_points = 3\n",
            "suite = stdmap-scan\nstdmap.a_min = 0.5\nstdmap.a_max = 2.0\nstdmap.a_step = 0.5\nstdmap.points = 16\nstdmap.n = 50\n",
            "suite = links\nlinks.perturbations = 1\nlinks.closed_form_trials = 2\n",
            "suite = rescaling\nrescaling.k_list = 8, 10\nrescaling.psi_sets = 1\nrescaling.corollary_points = 50\n",
        };
        // Runs 0 and 1 repeat the same config; run 2 changes only the thread count, which report.json echoes.
        for (const std::string& text : configs) {
            std::vector<fs::path> dirs;
            std::string suite;
            for (int run = 0; run < 3; ++run) {
                ExperimentConfig cfg = resolve_or_throw(parse_config_text(text));
                cfg.set_seed(42);
                cfg.set_threads(run < 2 ? 3 : 1);
                suite = cfg.suite();
                dirs.push_back(root / (suite + "_" + std::to_string(run)));
                cfg.set_output(dirs.back().string());
                run_suite(cfg);
            }
            std::string why;
            const bool repeat = same_tree(dirs[0], dirs[1], &why);
            o.require(repeat, suite + " repeated" + (why.empty() ? "" : " (" + why + ")"));
            why.clear();
            const bool threads = same_tree(dirs[0], dirs[2], &why, "report.json");
            o.require(threads, suite + " 3 vs 1 threads" + (why.empty() ? "" : " (" + why + ")"));
        }
        fs::remove_all(root);
        return o;
    });

    std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
