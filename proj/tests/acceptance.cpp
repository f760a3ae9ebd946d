// Acceptance suite: runs every gate criterion end to end and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "cli_app.hpp"
#include "hvdflow/evaluation.hpp"
#include "hvdflow/flo_io.hpp"
#include "hvdflow/image_io.hpp"
#include "hvdflow/solver.hpp"
#include "hvdflow/synthetic.hpp"
#include "oracles.hpp"

using namespace hvdflow;
namespace fs = std::filesystem;

namespace {

struct Context {
    std::vector<LevelStats> all_levels;  // accumulated across every solve
    double full_translation_mepe = -1.0;
    SyntheticPair translation;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return std::string(buf);
}

// ---- shared random-instance helpers ----

DerivativeStack random_stack(DataTermKind kind, int w, int h, std::uint64_t seed) {
    DerivativeStack st;
    st.kind = kind;
    st.width = w;
    st.height = h;
    st.Ix = oracle::random_grid(w, h, seed, -0.3, 0.3);
    st.Iy = oracle::random_grid(w, h, seed + 1, -0.3, 0.3);
    st.It = oracle::random_grid(w, h, seed + 2, -0.2, 0.2);
    if (kind == DataTermKind::GCA) {
        st.Ixx = oracle::random_grid(w, h, seed + 3, -0.1, 0.1);
        st.Ixy = oracle::random_grid(w, h, seed + 4, -0.1, 0.1);
        st.Iyx = oracle::random_grid(w, h, seed + 5, -0.1, 0.1);
        st.Iyy = oracle::random_grid(w, h, seed + 6, -0.1, 0.1);
        st.Ixt = oracle::random_grid(w, h, seed + 7, -0.1, 0.1);
        st.Iyt = oracle::random_grid(w, h, seed + 8, -0.1, 0.1);
    } else if (kind == DataTermKind::GDIM) {
        st.I = oracle::random_grid(w, h, seed + 9, 0.0, 1.0);
    }
    st.out_of_bounds.assign(st.pixel_count(), 0);
    return st;
}

DataTermSystem build_system(DataTermKind kind, const DerivativeStack& st,
                            const MeasurementMask& mask) {
    switch (kind) {
        case DataTermKind::OFC: return build_ofc(st, mask);
        case DataTermKind::GCA: return build_gca(st, mask);
        case DataTermKind::GDIM: return build_gdim(st, mask);
    }
    throw std::logic_error("unreachable");
}

Unknowns random_unknowns(DataTermKind kind, int w, int h, std::uint64_t seed) {
    Unknowns u = Unknowns::zeros(kind, w, h);
    u.flow = oracle::random_flow(w, h, seed);
    if (kind == DataTermKind::GDIM) {
        u.d = oracle::random_grid(w, h, seed + 5, -0.2, 0.2);
        u.c = oracle::random_grid(w, h, seed + 6, -0.2, 0.2);
    }
    return u;
}

std::vector<double> pack(const Unknowns& u) {
    std::vector<double> x(u.flow.vx.values());
    x.insert(x.end(), u.flow.vy.values().begin(), u.flow.vy.values().end());
    if (u.has_brightness) {
        x.insert(x.end(), u.d.values().begin(), u.d.values().end());
        x.insert(x.end(), u.c.values().begin(), u.c.values().end());
    }
    return x;
}

Unknowns unpack(const std::vector<double>& x, DataTermKind kind, int w, int h) {
    Unknowns u = Unknowns::zeros(kind, w, h);
    const std::size_t n = static_cast<std::size_t>(w) * h;
    for (std::size_t p = 0; p < n; ++p) {
        u.flow.vx[p] = x[p];
        u.flow.vy[p] = x[n + p];
        if (kind == DataTermKind::GDIM) {
            u.d[p] = x[2 * n + p];
            u.c[p] = x[3 * n + p];
        }
    }
    return u;
}

// ---- criteria ----

bool criterion1_gradient(Context&, std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const int w = 8, h = 8;
    double worst = 0.0;
    for (DataTermKind kind : {DataTermKind::OFC, DataTermKind::GCA, DataTermKind::GDIM}) {
        for (int inst = 0; inst < 20; ++inst) {
            const std::uint64_t seed = 1000 * static_cast<int>(kind) + 10 * inst;
            const DerivativeStack st = random_stack(kind, w, h, seed);
            MeasurementMask mask = MeasurementMask::all(st.pixel_count());
            if (inst % 3 == 1) {  // exercise masked rows too
                for (std::size_t p = 0; p < mask.selected.size(); p += 3) mask.selected[p] = 0;
            }
            const DataTermSystem sys = build_system(kind, st, mask);
            const Unknowns u = random_unknowns(kind, w, h, seed + 77);
            SolverConfig cfg;
            cfg.lambda = 0.01;
            RegularizerWeights weights;
            if (inst % 4 == 2) weights = adaptive_weights(st.Ix, 10.0, 1.0);

            const std::vector<double> analytic = pack(total_gradient(sys, u, cfg, weights));
            auto energy = [&](const std::vector<double>& x) {
                return total_energy(sys, unpack(x, kind, w, h), cfg, weights);
            };
            const std::vector<double> fd = oracle::fd_gradient(energy, pack(u), 1e-6);
            const double rel =
                oracle::max_abs_diff(analytic, fd) / std::max(oracle::max_abs(fd), 1e-8);
            worst = std::max(worst, rel);
        }
    }
    const double secs = seconds_since(t0);
    detail = fmt("max relative error %.3g (tol 1e-4), %.2fs (limit 5s)", worst, secs);
    return worst <= 1e-4 && secs < 5.0;
}

bool criterion2_operators(Context&, std::string& detail) {
    const int w = 8, h = 8;
    double worst_apply = 0.0, worst_adjoint = 0.0;

    struct Entry {
        const StencilOp* op;
        oracle::DenseMatrix dense;
        bool composed_xx = false, composed_yy = false;
    };
    std::vector<Entry> entries;
    entries.push_back({&stencil_diff_x(), oracle::dense_diff_x(w, h)});
    entries.push_back({&stencil_diff_y(), oracle::dense_diff_y(w, h)});
    entries.push_back({&stencil_diff_xy(), oracle::dense_diff_xy(w, h)});
    entries.push_back({&stencil_diff_yx(), oracle::dense_diff_yx(w, h)});
    entries.push_back({nullptr, oracle::dense_diff_xx(w, h), true, false});
    entries.push_back({nullptr, oracle::dense_diff_yy(w, h), false, true});

    for (std::uint64_t s = 0; s < 5; ++s) {
        const ScalarGrid g = oracle::random_grid(w, h, 4000 + s);
        const ScalarGrid r = oracle::random_grid(w, h, 4100 + s);
        for (const Entry& e : entries) {
            const ScalarGrid got = e.composed_xx   ? second_diff_xx(g)
                                   : e.composed_yy ? second_diff_yy(g)
                                                   : apply_stencil(*e.op, g);
            const ScalarGrid got_t = e.composed_xx || e.composed_yy
                                         ? adjoint_diff_x(adjoint_diff_y(r))
                                         : apply_stencil_adjoint(*e.op, r);
            const std::vector<double> want = e.dense.mul(g.values());
            const std::vector<double> want_t = e.dense.mul_transpose(r.values());
            worst_apply = std::max(worst_apply, oracle::max_abs_diff(got.values(), want));
            worst_apply = std::max(worst_apply, oracle::max_abs_diff(got_t.values(), want_t));

            double lhs = 0.0, rhs = 0.0;
            for (std::size_t p = 0; p < got.size(); ++p) lhs += got[p] * r[p];
            for (std::size_t p = 0; p < got_t.size(); ++p) rhs += g[p] * got_t[p];
            worst_adjoint = std::max(worst_adjoint, std::fabs(lhs - rhs));
        }

        // Data-term operators, dense matrices assembled from the stack grids.
        for (DataTermKind kind : {DataTermKind::OFC, DataTermKind::GCA, DataTermKind::GDIM}) {
            const DerivativeStack st = random_stack(kind, w, h, 4200 + s);
            const DataTermSystem sys = build_system(kind, st, MeasurementMask::all(w * h));
            const int n = w * h;
            const int blocks = kind == DataTermKind::GDIM ? 4 : 2;
            oracle::DenseMatrix dense(static_cast<int>(sys.rows()), blocks * n);
            for (int p = 0; p < n; ++p) {
                if (kind == DataTermKind::OFC) {
                    dense.at(p, p) = st.Ix[p];
                    dense.at(p, n + p) = st.Iy[p];
                } else if (kind == DataTermKind::GCA) {
                    dense.at(2 * p, p) = st.Ixx[p];
                    dense.at(2 * p, n + p) = st.Ixy[p];
                    dense.at(2 * p + 1, p) = st.Iyx[p];
                    dense.at(2 * p + 1, n + p) = st.Iyy[p];
                } else {
                    dense.at(p, p) = st.Ix[p];
                    dense.at(p, n + p) = st.Iy[p];
                    dense.at(p, 2 * n + p) = -st.I[p];
                    dense.at(p, 3 * n + p) = -1.0;
                }
            }
            const Unknowns u = random_unknowns(kind, w, h, 4300 + s);
            const std::vector<double> x = pack(u);
            const std::vector<double> got = data_apply(sys, u);
            worst_apply = std::max(worst_apply, oracle::max_abs_diff(got, dense.mul(x)));

            const std::vector<double> rv =
                oracle::random_grid(static_cast<int>(sys.rows()), 1, 4400 + s).values();
            const std::vector<double> got_t = pack(data_apply_transpose(sys, rv));
            worst_apply =
                std::max(worst_apply, oracle::max_abs_diff(got_t, dense.mul_transpose(rv)));

            double lhs = 0.0, rhs = 0.0;
            for (std::size_t k = 0; k < got.size(); ++k) lhs += got[k] * rv[k];
            for (std::size_t k = 0; k < x.size(); ++k) rhs += x[k] * got_t[k];
            worst_adjoint = std::max(worst_adjoint, std::fabs(lhs - rhs));
        }
    }
    detail = fmt("max dense mismatch %.3g (tol 1e-12), adjoint gap %.3g (tol 1e-10)",
                 worst_apply, worst_adjoint);
    return worst_apply <= 1e-12 && worst_adjoint <= 1e-10;
}

bool criterion3_eq8(Context&, std::string& detail) {
    // Values on a 2^-20 lattice make the two composition orders exact in
    // floating point, so equality can be required bit for bit.
    int checked = 0;
    for (int inst = 0; inst < 100; ++inst) {
        std::mt19937_64 rng(5000 + inst);
        const int w = 5 + static_cast<int>(rng() % 8);
        const int h = 5 + static_cast<int>(rng() % 8);
        ScalarGrid g(w, h);
        for (std::size_t p = 0; p < g.size(); ++p)
            g[p] = static_cast<double>(rng() & 0xFFFFF) * 0x1.0p-20;
        const ScalarGrid xx = second_diff_xx(g);
        const ScalarGrid yy = second_diff_yy(g);
        for (int j = 0; j + 1 < h; ++j)
            for (int i = 0; i + 1 < w; ++i) {
                if (xx.at(i, j) != yy.at(i, j)) {
                    detail = fmt("mismatch at instance %d pixel (%d,%d)", inst, i, j);
                    return false;
                }
                ++checked;
            }
    }
    detail = fmt("%d interior pixels identical across 100 grids", checked);
    return true;
}

bool criterion4_translation(Context& ctx, std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    ctx.translation = make_translation_pair(64, 64, 1.25, 0.75, 20240401);
    SolverConfig cfg;  // defaults: OFC + HVD, full measurements
    const SolveResult res = solve_coarse_to_fine(ctx.translation.pair, cfg);
    ctx.all_levels.insert(ctx.all_levels.end(), res.levels.begin(), res.levels.end());
    ctx.full_translation_mepe = mepe(res.u.flow, ctx.translation.gt);
    const double secs = seconds_since(t0);
    detail = fmt("MEPE %.4f px (tol 0.15), %.2fs (limit 30s)", ctx.full_translation_mepe, secs);
    return ctx.full_translation_mepe <= 0.15 && secs < 30.0;
}

bool criterion5_discontinuity(Context& ctx, std::string& detail) {
    const SyntheticPair two = make_two_region_pair(64, 64, 1.0, -1.0, 777);
    SolverConfig cfg;
    const SolveResult res = solve_coarse_to_fine(two.pair, cfg);
    ctx.all_levels.insert(ctx.all_levels.end(), res.levels.begin(), res.levels.end());
    int band = 0;
    for (int i = 0; i < 64; ++i)
        if (std::fabs(res.u.flow.vx.at(i, 32)) < 0.5) ++band;
    detail = fmt("transition band %d column(s) at mid-height (tol 3), MEPE %.4f", band,
                 mepe(res.u.flow, two.gt));
    return band <= 3;
}

bool criterion6_brightness(Context& ctx, std::string& detail) {
    const ImagePair bright = with_brightness_change(ctx.translation.pair, 0.0, 0.1);
    SolverConfig ofc_cfg;
    const SolveResult ofc_res = solve_coarse_to_fine(bright, ofc_cfg);
    SolverConfig gca_cfg;
    gca_cfg.data_kind = DataTermKind::GCA;
    const SolveResult gca_res = solve_coarse_to_fine(bright, gca_cfg);
    ctx.all_levels.insert(ctx.all_levels.end(), ofc_res.levels.begin(), ofc_res.levels.end());
    ctx.all_levels.insert(ctx.all_levels.end(), gca_res.levels.begin(), gca_res.levels.end());

    const double ofc_err = mepe(ofc_res.u.flow, ctx.translation.gt);
    const double gca_err = mepe(gca_res.u.flow, ctx.translation.gt);
    detail = fmt("GCA MEPE %.4f vs OFC MEPE %.4f, ratio %.3f (tol 0.5)", gca_err, ofc_err,
                 ofc_err > 0 ? gca_err / ofc_err : 0.0);
    return gca_err <= 0.5 * ofc_err;
}

bool criterion7_reduced(Context& ctx, std::string& detail) {
    double sum = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
        SolverConfig cfg;
        cfg.scheme.kind = SelectionScheme::Kind::combined;
        cfg.scheme.ratio = 0.2;
        cfg.scheme.significant_fraction = 0.05;
        cfg.scheme.seed = 9000 + rep;
        const SolveResult res = solve_coarse_to_fine(ctx.translation.pair, cfg);
        ctx.all_levels.insert(ctx.all_levels.end(), res.levels.begin(), res.levels.end());
        sum += mepe(res.u.flow, ctx.translation.gt);
    }
    const double avg = sum / 5.0;
    detail = fmt("avg MEPE %.4f over 5 seeds vs full %.4f, ratio %.3f (tol 1.5)", avg,
                 ctx.full_translation_mepe, avg / ctx.full_translation_mepe);
    return avg <= 1.5 * ctx.full_translation_mepe;
}

bool criterion8_sparsity(Context&, std::string& detail) {
    const int n = 64;
    FlowField gt(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) gt.vx.at(i, j) = i < n / 2 ? 1.0 : -1.0;
    const SparsityReport rep = sparsity_report(gt);
    double max_partial = 0.0;
    bool partials_ok = true;
    for (int k = 0; k < 4; ++k) {
        max_partial = std::max(max_partial, rep.coupled[k].nonzero_fraction);
        partials_ok &= rep.coupled[k].nonzero_fraction <= rep.coupled[4].nonzero_fraction;
    }
    const bool small = max_partial <= 0.05 && rep.coupled[4].nonzero_fraction <= 0.05;
    detail = fmt("partial fractions <= %.4f, gradient fraction %.4f (tol 0.05)", max_partial,
                 rep.coupled[4].nonzero_fraction);
    return partials_ok && small;
}

bool criterion9_energy(Context& ctx, std::string& detail) {
    int violations = 0;
    for (const LevelStats& ls : ctx.all_levels)
        if (!(ls.final_energy <= ls.initial_energy)) ++violations;
    detail = fmt("%zu level solves recorded, %d energy increase(s)", ctx.all_levels.size(),
                 violations);
    return violations == 0 && !ctx.all_levels.empty();
}

std::vector<unsigned char> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool criterion10_io(Context&, std::string& detail) {
    const fs::path dir = fs::temp_directory_path() / "hvdflow_acceptance";
    fs::create_directories(dir);

    // .flo round trip, sentinel included.
    FlowField v(9, 4);
    std::mt19937_64 rng(31415);
    for (std::size_t p = 0; p < v.vx.size(); ++p) {
        v.vx[p] = static_cast<float>(oracle::unit_double(rng) * 40.0 - 20.0);
        v.vy[p] = static_cast<float>(oracle::unit_double(rng) * 40.0 - 20.0);
    }
    v.vx[7] = 1e10f;
    const fs::path flo_a = dir / "a.flo", flo_b = dir / "b.flo";
    write_flo(flo_a.string(), v);
    write_flo(flo_b.string(), read_flo(flo_a.string()));
    const bool flo_ok = slurp(flo_a) == slurp(flo_b) && !slurp(flo_a).empty();

    // Fixed-seed CLI runs must produce byte-identical artifacts.
    auto run_est = [&](const std::string& tag) {
        return cli::run({"estimate", (dir / "f0.pgm").string(), (dir / "f1.pgm").string(),
                         "--scheme", "combined", "--ratio", "0.3", "--seed", "1234",
                         "--out-flo", (dir / (tag + ".flo")).string(), "--out-png",
                         (dir / (tag + ".png")).string()});
    };
    const int rc = cli::run({"synth", "--kind", "translate", "--width", "48", "--height", "48",
                             "--dx", "0.8", "--dy", "-0.6", "--seed", "7", "--out-prefix",
                             (dir / "f").string()});
    bool cli_ok = rc == 0 && run_est("r1") == 0 && run_est("r2") == 0;
    cli_ok = cli_ok && slurp(dir / "r1.flo") == slurp(dir / "r2.flo") &&
             slurp(dir / "r1.png") == slurp(dir / "r2.png") && !slurp(dir / "r1.flo").empty();

    detail = fmt("flo round trip %s, fixed-seed CLI artifacts %s", flo_ok ? "bit-exact" : "BROKEN",
                 cli_ok ? "byte-identical" : "BROKEN");
    return flo_ok && cli_ok;
}

bool criterion11_middlebury(Context&, std::string& detail, bool& skipped) {
    const char* root = std::getenv("MIDDLEBURY_DIR");
    if (!root) {
        skipped = true;
        detail = "set MIDDLEBURY_DIR to a directory with other-data/ and other-gt-flow/ to run";
        return true;
    }
    fs::path frames = fs::path(root) / "other-data";
    fs::path gt = fs::path(root) / "other-gt-flow";
    if (!fs::exists(frames)) frames = fs::path(root) / "frames";
    if (!fs::exists(gt)) gt = fs::path(root) / "gt";

    const std::vector<std::string> seqs = {"Dimetrodon",  "Grove2", "Grove3", "Hydrangea",
                                           "RubberWhale", "Urban2", "Urban3", "Venus"};
    double total = 0.0;
    for (const std::string& seq : seqs) {
        ImagePair pair;
        pair.frame0 = read_image((frames / seq / "frame10.png").string());
        pair.frame1 = read_image((frames / seq / "frame11.png").string());
        const FlowField truth = read_flo((gt / seq / "flow10.flo").string());
        double best = -1.0;
        for (double lambda : {0.003, 0.01, 0.03}) {
            SolverConfig cfg;
            cfg.lambda = lambda;
            const double err = mepe(solve_coarse_to_fine(pair, cfg).u.flow, truth);
            if (best < 0.0 || err < best) best = err;
        }
        std::printf("       middlebury %-12s best MEPE %.4f\n", seq.c_str(), best);
        std::fflush(stdout);
        total += best;
    }
    const double avg = total / static_cast<double>(seqs.size());
    detail = fmt("average MEPE %.4f over 8 sequences (tol 0.35)", avg);
    return avg <= 0.35;
}

}  // namespace

int main() {
    Context ctx;
    struct Row {
        int id;
        const char* title;
        std::function<bool(Context&, std::string&)> fn;
    };
    const std::vector<Row> rows = {
        {1, "analytic gradients match finite differences", criterion1_gradient},
        {2, "operators match dense constructions and adjoints", criterion2_operators},
        {3, "cross second differences identical at interior pixels", criterion3_eq8},
        {4, "synthetic translation recovered within 0.15 px", criterion4_translation},
        {5, "two-region discontinuity stays sharp", criterion5_discontinuity},
        {6, "gradient-constancy data term shrugs off brightness offset", criterion6_brightness},
        {7, "combined selection at m/n = 0.2 holds accuracy", criterion7_reduced},
        {8, "ground-truth derivative maps are sparse", criterion8_sparsity},
        {9, "level energies never increase", criterion9_energy},
        {10, "flo round trip and CLI runs are byte-stable", criterion10_io},
    };

    int failures = 0;
    for (const Row& row : rows) {
        std::string detail;
        bool ok = false;
        try {
            ok = row.fn(ctx, detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("%s [%2d] %s (%s)\n", ok ? "PASS" : "FAIL", row.id, row.title,
                    detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }

    {
        std::string detail;
        bool skipped = false;
        bool ok = false;
        try {
            ok = criterion11_middlebury(ctx, detail, skipped);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("%s [11] middlebury spot-check, optional (%s)\n",
                    skipped ? "SKIP" : (ok ? "PASS" : "FAIL"), detail.c_str());
        if (!skipped && !ok) ++failures;
    }

    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
