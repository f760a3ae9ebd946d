#include "cli_app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "hvdflow/colorize.hpp"
#include "hvdflow/evaluation.hpp"
#include "hvdflow/filters.hpp"
#include "hvdflow/flo_io.hpp"
#include "hvdflow/image_io.hpp"
#include "hvdflow/solver.hpp"
#include "hvdflow/sweep.hpp"
#include "hvdflow/synthetic.hpp"

namespace hvdflow::cli {

namespace {

struct SolverOptions {
    SolverConfig cfg;
    std::string data = "ofc";
    std::string reg = "hvd";
    std::string scheme = "full";
    std::string diag = "mirrored";
    bool preprocess = false;
    bool force_lambda = false;
};

void add_solver_flags(CLI::App* cmd, SolverOptions& o) {
    cmd->add_option("--data", o.data, "Data term")
        ->check(CLI::IsMember({"ofc", "gca", "gdim"}))
        ->capture_default_str();
    cmd->add_option("--reg", o.reg, "Regularizer")
        ->check(CLI::IsMember({"hvd", "tv-iso", "tv-aniso"}))
        ->capture_default_str();
    cmd->add_option("--lambda", o.cfg.lambda, "Regularization weight")->capture_default_str();
    cmd->add_option("--epsilon", o.cfg.epsilon, "Huber smoothing threshold")
        ->capture_default_str();
    cmd->add_option("--pyramid-scale", o.cfg.pyramid_scale, "Pyramid downsampling factor")
        ->capture_default_str();
    cmd->add_option("--min-side", o.cfg.min_side, "Coarsest pyramid side")->capture_default_str();
    cmd->add_option("--max-iter", o.cfg.max_iter, "Iteration cap per level")
        ->capture_default_str();
    cmd->add_option("--conv-tol", o.cfg.conv_tol, "Mean-absolute update threshold (px)")
        ->capture_default_str();
    cmd->add_option("--ratio", o.cfg.scheme.ratio, "Measurement ratio m/n")
        ->capture_default_str();
    cmd->add_option("--scheme", o.scheme, "Measurement selection scheme")
        ->check(CLI::IsMember({"full", "random", "significant", "combined"}))
        ->capture_default_str();
    cmd->add_option("--sig-frac", o.cfg.scheme.significant_fraction,
                    "Significant fraction for the combined scheme")
        ->capture_default_str();
    cmd->add_option("--seed", o.cfg.scheme.seed, "Seed for stochastic selection")
        ->capture_default_str();
    cmd->add_flag("--adaptive", o.cfg.adaptive, "Image-adaptive regularizer weights");
    cmd->add_option("--adapt-alpha", o.cfg.adaptive_alpha, "Adaptive weight alpha")
        ->capture_default_str();
    cmd->add_option("--adapt-beta", o.cfg.adaptive_beta, "Adaptive weight beta")
        ->capture_default_str();
    cmd->add_option("--warps", o.cfg.warps_per_level, "Warp passes per pyramid level")
        ->capture_default_str();
    cmd->add_option("--diag", o.diag, "135-degree difference form")
        ->check(CLI::IsMember({"mirrored", "literal"}))
        ->capture_default_str();
    cmd->add_option("--dc-penalty", o.cfg.dc_penalty, "GDIM d/c stabilizer weight")
        ->capture_default_str();
    cmd->add_flag("--preprocess", o.preprocess,
                  "Subtract a 9x9 sigma=1 Gaussian blur before estimation");
    cmd->add_flag("--force-lambda", o.force_lambda, "Allow lambda outside [1e-3, 1e-1]");
}

SolverConfig finalize(const SolverOptions& o) {
    SolverConfig cfg = o.cfg;
    cfg.data_kind = o.data == "ofc"   ? DataTermKind::OFC
                    : o.data == "gca" ? DataTermKind::GCA
                                      : DataTermKind::GDIM;
    cfg.regularizer = regularizer_kind_from_string(o.reg);
    cfg.scheme.kind = selection_kind_from_string(o.scheme);
    cfg.diagonal = o.diag == "mirrored" ? DiagonalVariant::mirrored : DiagonalVariant::same_pixel;
    cfg.allow_lambda_outside_range = o.force_lambda;
    return cfg;
}

// Center-shifted residual after removing the local brightness envelope.
ScalarGrid preprocess_frame(const ScalarGrid& g) {
    const ScalarGrid smooth = gaussian_smooth(g, 1.0, 9);
    ScalarGrid out(g.width(), g.height());
    for (std::size_t p = 0; p < g.size(); ++p)
        out[p] = std::clamp(0.5 + g[p] - smooth[p], 0.0, 1.0);
    return out;
}

ImagePair load_pair(const std::string& path0, const std::string& path1, bool preprocess) {
    ImagePair pair;
    pair.frame0 = read_image(path0);
    pair.frame1 = read_image(path1);
    if (!pair.frame0.same_size(pair.frame1))
        throw std::runtime_error("input frames have different dimensions");
    if (preprocess) {
        pair.frame0 = preprocess_frame(pair.frame0);
        pair.frame1 = preprocess_frame(pair.frame1);
    }
    return pair;
}

void write_report(const std::string& path, const SolverOptions& o, const SolveResult& res,
                  double mepe_value, bool have_mepe) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open report file: " + path);
    out << "data=" << o.data << "\n"
        << "reg=" << o.reg << "\n"
        << "scheme=" << o.scheme << "\n"
        << "lambda=" << o.cfg.lambda << "\n"
        << "epsilon=" << o.cfg.epsilon << "\n"
        << "ratio=" << o.cfg.scheme.ratio << "\n"
        << "seed=" << o.cfg.scheme.seed << "\n"
        << "levels=" << res.levels.size() << "\n";
    if (have_mepe) out << "mepe=" << mepe_value << "\n";
    for (std::size_t k = 0; k < res.levels.size(); ++k) {
        const LevelStats& ls = res.levels[k];
        char line[192];
        std::snprintf(line, sizeof(line),
                      "level%zu=%dx%d warp=%d iters=%d restarts=%d converged=%d e0=%.9g ef=%.9g "
                      "rows=%d\n",
                      k, ls.width, ls.height, ls.warp_pass, ls.iterations, ls.restarts,
                      ls.converged ? 1 : 0, ls.initial_energy, ls.final_energy,
                      ls.selected_pixels);
        out << line;
    }
}

int cmd_estimate(const SolverOptions& opts, const std::string& frame0, const std::string& frame1,
                 const std::string& gt_path, const std::string& out_flo,
                 const std::string& out_png, double max_mag, const std::string& report_path) {
    const SolverConfig cfg = finalize(opts);
    const ImagePair pair = load_pair(frame0, frame1, opts.preprocess);
    const SolveResult res = solve_coarse_to_fine(pair, cfg);

    double err = 0.0;
    bool have_err = false;
    if (!gt_path.empty()) {
        const FlowField gt = read_flo(gt_path);
        err = mepe(res.u.flow, gt);
        have_err = true;
        std::printf("MEPE %.6f\n", err);
    }
    if (!out_flo.empty()) write_flo(out_flo, res.u.flow);
    if (!out_png.empty()) write_png_rgb(out_png, colorize_flow(res.u.flow, max_mag));
    if (!report_path.empty()) write_report(report_path, opts, res, err, have_err);

    int iters = 0;
    for (const auto& ls : res.levels) iters += ls.iterations;
    std::fprintf(stderr, "solved %dx%d: %zu level solves, %d iterations total\n", pair.width(),
                 pair.height(), res.levels.size(), iters);
    return 0;
}

int cmd_sweep(const SolverOptions& opts, const std::string& frame0, const std::string& frame1,
              const std::string& gt_path, const std::vector<double>& ratios,
              const std::vector<std::string>& scheme_names, int repetitions,
              const std::string& out_csv) {
    const SolverConfig cfg = finalize(opts);
    const ImagePair pair = load_pair(frame0, frame1, opts.preprocess);
    const FlowField gt = read_flo(gt_path);

    std::vector<SelectionScheme::Kind> kinds;
    for (const std::string& name : scheme_names) kinds.push_back(selection_kind_from_string(name));

    const SweepResult res = sweep_ratios(pair, gt, cfg, ratios, kinds, repetitions);
    if (out_csv.empty() || out_csv == "-") {
        write_sweep_csv(std::cout, res);
    } else {
        std::ofstream out(out_csv);
        if (!out) throw std::runtime_error("cannot open csv file: " + out_csv);
        write_sweep_csv(out, res);
    }
    for (const SweepAggregate& a : res.aggregates)
        std::fprintf(stderr, "%-12s ratio %.3f: mean MEPE %.6f over %d run(s)\n",
                     to_string(a.scheme), a.ratio, a.mean_mepe, a.runs);
    return 0;
}

int cmd_sparsity(const std::string& gt_path, const std::string& out_csv,
                 const std::string& png_prefix) {
    const FlowField gt = read_flo(gt_path);
    const SparsityReport rep = sparsity_report(gt);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_csv.empty() && out_csv != "-") {
        file.open(out_csv);
        if (!file) throw std::runtime_error("cannot open csv file: " + out_csv);
        os = &file;
    }
    *os << "map,otsu,nonzero_fraction\n";
    char line[128];
    for (const auto& m : rep.coupled) {
        std::snprintf(line, sizeof(line), "%s,%.9g,%.9g\n", m.name.c_str(), m.otsu,
                      m.nonzero_fraction);
        *os << line;
    }
    for (const auto& m : rep.per_channel) {
        std::snprintf(line, sizeof(line), "%s,%.9g,%.9g\n", m.name.c_str(), m.otsu,
                      m.nonzero_fraction);
        *os << line;
    }

    if (!png_prefix.empty()) {
        const StencilOp* ops[4] = {&stencil_diff_x(), &stencil_diff_y(), &stencil_diff_xy(),
                                   &stencil_diff_yx()};
        ScalarGrid grad_sq(gt.width(), gt.height(), 0.0);
        auto emit = [&](const ScalarGrid& mag, const std::string& name) {
            const std::vector<std::uint8_t> bin = binarize_with_otsu(mag);
            ScalarGrid img(gt.width(), gt.height());
            for (std::size_t p = 0; p < img.size(); ++p) img[p] = bin[p] ? 1.0 : 0.0;
            write_png_gray(png_prefix + "_" + name + ".png", img);
        };
        for (int k = 0; k < 4; ++k) {
            const ScalarGrid ax = apply_stencil(*ops[k], gt.vx);
            const ScalarGrid ay = apply_stencil(*ops[k], gt.vy);
            ScalarGrid mag(gt.width(), gt.height());
            for (std::size_t p = 0; p < mag.size(); ++p) {
                mag[p] = std::sqrt(ax[p] * ax[p] + ay[p] * ay[p]);
                if (k < 2) grad_sq[p] += ax[p] * ax[p] + ay[p] * ay[p];
            }
            emit(mag, rep.coupled[k].name);
        }
        ScalarGrid grad(gt.width(), gt.height());
        for (std::size_t p = 0; p < grad.size(); ++p) grad[p] = std::sqrt(grad_sq[p]);
        emit(grad, rep.coupled[4].name);
    }
    if (!rep.partials_sparser_than_gradient)
        std::fprintf(stderr, "note: some partial map is denser than the gradient map\n");
    return 0;
}

int cmd_synth(const std::string& kind, int width, int height, double dx, double dy,
              double left_vx, double right_vx, double gain, double offset, std::uint64_t seed,
              const std::string& prefix) {
    SyntheticPair sp;
    if (kind == "translate") {
        sp = make_translation_pair(width, height, dx, dy, seed);
    } else if (kind == "two-region") {
        sp = make_two_region_pair(width, height, left_vx, right_vx, seed);
    } else {  // brightness: translation plus a gain/offset change on frame1
        sp = make_translation_pair(width, height, dx, dy, seed);
        sp.pair = with_brightness_change(sp.pair, gain, offset);
    }
    write_pgm16(prefix + "0.pgm", sp.pair.frame0);
    write_pgm16(prefix + "1.pgm", sp.pair.frame1);
    write_flo(prefix + "_gt.flo", sp.gt);
    std::fprintf(stderr, "wrote %s0.pgm %s1.pgm %s_gt.flo\n", prefix.c_str(), prefix.c_str(),
                 prefix.c_str());
    return 0;
}

int cmd_colorize(const std::string& in_flo, const std::string& out_png, double max_mag) {
    write_png_rgb(out_png, colorize_flow(read_flo(in_flo), max_mag));
    return 0;
}

int cmd_middlebury(const SolverOptions& opts, const std::string& frames_dir,
                   const std::string& gt_dir, std::vector<std::string> sequences,
                   std::vector<double> lambda_grid, const std::string& out_csv) {
    namespace fs = std::filesystem;
    if (sequences.empty())
        sequences = {"Dimetrodon", "Grove2",      "Grove3", "Hydrangea",
                     "RubberWhale", "Urban2",     "Urban3", "Venus"};
    if (lambda_grid.empty()) lambda_grid = {opts.cfg.lambda};

    // Validate the layout before any heavy work.
    std::vector<std::string> missing;
    for (const std::string& seq : sequences) {
        for (const char* f : {"frame10.png", "frame11.png"})
            if (!fs::exists(fs::path(frames_dir) / seq / f))
                missing.push_back((fs::path(frames_dir) / seq / f).string());
        if (!fs::exists(fs::path(gt_dir) / seq / "flow10.flo"))
            missing.push_back((fs::path(gt_dir) / seq / "flow10.flo").string());
    }
    if (!missing.empty()) {
        for (const std::string& m : missing) std::fprintf(stderr, "missing: %s\n", m.c_str());
        throw std::runtime_error("dataset layout incomplete");
    }

    std::ofstream csv;
    if (!out_csv.empty()) {
        csv.open(out_csv);
        if (!csv) throw std::runtime_error("cannot open csv file: " + out_csv);
        csv << "sequence,lambda,mepe\n";
    }

    double sum_best = 0.0;
    std::printf("%-12s %10s %10s\n", "sequence", "lambda", "mepe");
    for (const std::string& seq : sequences) {
        const ImagePair pair =
            load_pair((fs::path(frames_dir) / seq / "frame10.png").string(),
                      (fs::path(frames_dir) / seq / "frame11.png").string(), opts.preprocess);
        const FlowField gt = read_flo((fs::path(gt_dir) / seq / "flow10.flo").string());

        double best_err = 0.0, best_lambda = 0.0;
        bool first = true;
        for (double lambda : lambda_grid) {
            SolverConfig cfg = finalize(opts);
            cfg.lambda = lambda;
            const SolveResult res = solve_coarse_to_fine(pair, cfg);
            const double err = mepe(res.u.flow, gt);
            if (csv.is_open()) csv << seq << "," << lambda << "," << err << "\n";
            if (first || err < best_err) {
                best_err = err;
                best_lambda = lambda;
                first = false;
            }
        }
        sum_best += best_err;
        std::printf("%-12s %10.4g %10.4f\n", seq.c_str(), best_lambda, best_err);
        std::fflush(stdout);
    }
    std::printf("%-12s %10s %10.4f\n", "average", "",
                sum_best / static_cast<double>(sequences.size()));
    return 0;
}

// Flat key=value config support: values fill in flags absent from the
// command line, so explicit flags always win. '#' starts a comment.
std::vector<std::string> merge_config_args(std::vector<std::string> args) {
    std::string config_path;
    for (std::size_t k = 0; k < args.size();) {
        if (args[k] == "--config" && k + 1 < args.size()) {
            config_path = args[k + 1];
            args.erase(args.begin() + k, args.begin() + k + 2);
        } else if (args[k].rfind("--config=", 0) == 0) {
            config_path = args[k].substr(9);
            args.erase(args.begin() + k);
        } else {
            ++k;
        }
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw CLI::FileError::Missing(config_path);
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const char* ws = " \t\r";
            s.erase(0, s.find_first_not_of(ws));
            const std::size_t last = s.find_last_not_of(ws);
            s.erase(last == std::string::npos ? 0 : last + 1);
            return s;
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        const std::string flag = "--" + key;
        bool given = false;
        for (const std::string& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
        if (!given) args.push_back(flag + "=" + value);
    }
    return args;
}

}  // namespace

int run(std::vector<std::string> args) {
    CLI::App app{"Dense optical flow with an HVD sparse regularizer"};
    app.require_subcommand(1);
    app.footer("Any subcommand accepts --config <file> with flat key=value lines mirroring\n"
               "its flag names; command-line flags take precedence over the file.");

    // estimate
    SolverOptions est_opts;
    std::string est_f0, est_f1, est_gt, est_out_flo, est_out_png, est_report;
    double est_max_mag = 0.0;
    CLI::App* est = app.add_subcommand("estimate", "Estimate flow between two frames");
    est->add_option("frame0", est_f0, "Earlier frame (PNG/PGM/PPM)")->required();
    est->add_option("frame1", est_f1, "Later frame")->required();
    add_solver_flags(est, est_opts);
    est->add_option("--gt", est_gt, "Ground-truth .flo for MEPE");
    est->add_option("--out-flo", est_out_flo, "Write estimated flow (.flo)");
    est->add_option("--out-png", est_out_png, "Write colorized flow (PNG)");
    est->add_option("--max-mag", est_max_mag,
                    "Color-wheel saturation magnitude (0 = 99th percentile)");
    est->add_option("--report", est_report, "Write a key=value run report");

    // sweep
    SolverOptions sw_opts;
    std::string sw_f0, sw_f1, sw_gt, sw_csv;
    std::vector<double> sw_ratios{0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<std::string> sw_schemes{"random", "significant", "combined"};
    int sw_reps = 5;
    CLI::App* sw = app.add_subcommand("sweep", "MEPE vs measurement ratio");
    sw->add_option("frame0", sw_f0)->required();
    sw->add_option("frame1", sw_f1)->required();
    add_solver_flags(sw, sw_opts);
    sw->add_option("--gt", sw_gt, "Ground-truth .flo")->required();
    sw->add_option("--ratios", sw_ratios, "Measurement ratios")->capture_default_str();
    sw->add_option("--schemes", sw_schemes, "Selection schemes")->capture_default_str();
    sw->add_option("--reps", sw_reps, "Repetitions for stochastic schemes")
        ->capture_default_str();
    sw->add_option("--out-csv", sw_csv, "CSV output path ('-' for stdout)");

    // sparsity
    std::string sp_gt, sp_csv, sp_png;
    CLI::App* sp = app.add_subcommand("sparsity", "Derivative-map sparsity of a flow field");
    sp->add_option("gt", sp_gt, "Ground-truth .flo")->required();
    sp->add_option("--out-csv", sp_csv, "CSV output path ('-' for stdout)");
    sp->add_option("--out-png-prefix", sp_png, "Prefix for binarized map PNGs");

    // synth
    std::string sy_kind = "translate", sy_prefix = "synth";
    int sy_w = 64, sy_h = 64;
    double sy_dx = 1.25, sy_dy = 0.75, sy_left = 1.0, sy_right = -1.0, sy_gain = 0.0,
           sy_offset = 0.1;
    std::uint64_t sy_seed = 1;
    CLI::App* sy = app.add_subcommand("synth", "Generate a synthetic pair with ground truth");
    sy->add_option("--kind", sy_kind)
        ->check(CLI::IsMember({"translate", "two-region", "brightness"}))
        ->capture_default_str();
    sy->add_option("--width", sy_w)->capture_default_str();
    sy->add_option("--height", sy_h)->capture_default_str();
    sy->add_option("--dx", sy_dx, "Horizontal shift (translate/brightness)")
        ->capture_default_str();
    sy->add_option("--dy", sy_dy, "Vertical shift")->capture_default_str();
    sy->add_option("--left-vx", sy_left, "Left-half flow (two-region)")->capture_default_str();
    sy->add_option("--right-vx", sy_right, "Right-half flow (two-region)")
        ->capture_default_str();
    sy->add_option("--gain", sy_gain, "Contrast gain on frame1 (brightness)")
        ->capture_default_str();
    sy->add_option("--offset", sy_offset, "Brightness offset on frame1 (brightness)")
        ->capture_default_str();
    sy->add_option("--seed", sy_seed)->capture_default_str();
    sy->add_option("--out-prefix", sy_prefix, "Output prefix")->capture_default_str();

    // colorize
    std::string co_in, co_out;
    double co_max = 0.0;
    CLI::App* co = app.add_subcommand("colorize", "Render a .flo file as a color-wheel PNG");
    co->add_option("flo", co_in)->required();
    co->add_option("png", co_out)->required();
    co->add_option("--max-mag", co_max, "Saturation magnitude (0 = 99th percentile)");

    // middlebury
    SolverOptions mb_opts;
    std::string mb_frames, mb_gt, mb_csv;
    std::vector<std::string> mb_seqs;
    std::vector<double> mb_grid;
    CLI::App* mb = app.add_subcommand("middlebury", "Run on a local Middlebury training layout");
    mb->add_option("--frames-dir", mb_frames, "Directory with <seq>/frame10.png, frame11.png")
        ->required();
    mb->add_option("--gt-dir", mb_gt, "Directory with <seq>/flow10.flo")->required();
    add_solver_flags(mb, mb_opts);
    mb->add_option("--sequences", mb_seqs, "Sequence names (default: the 8 training sequences)");
    mb->add_option("--lambda-grid", mb_grid, "Per-sequence lambda candidates");
    mb->add_option("--out-csv", mb_csv, "CSV of every (sequence, lambda) result");

    try {
        args = merge_config_args(std::move(args));
        std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // --help exits cleanly
    }

    try {
        if (app.got_subcommand(est))
            return cmd_estimate(est_opts, est_f0, est_f1, est_gt, est_out_flo, est_out_png,
                                est_max_mag, est_report);
        if (app.got_subcommand(sw))
            return cmd_sweep(sw_opts, sw_f0, sw_f1, sw_gt, sw_ratios, sw_schemes, sw_reps, sw_csv);
        if (app.got_subcommand(sp)) return cmd_sparsity(sp_gt, sp_csv, sp_png);
        if (app.got_subcommand(sy))
            return cmd_synth(sy_kind, sy_w, sy_h, sy_dx, sy_dy, sy_left, sy_right, sy_gain,
                             sy_offset, sy_seed, sy_prefix);
        if (app.got_subcommand(co)) return cmd_colorize(co_in, co_out, co_max);
        if (app.got_subcommand(mb))
            return cmd_middlebury(mb_opts, mb_frames, mb_gt, mb_seqs, mb_grid, mb_csv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}

}  // namespace hvdflow::cli
