// gpe — permutation-pattern profiles and entropies for time series.
//
// Subcommands: profile, entropy, sweep, windowsize, experiment.
// Exit codes: 0 success, 1 internal error, 2 usage/validation, 3 guard refusal.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gpe/analysis.hpp"
#include "gpe/entropy.hpp"
#include "gpe/experiments.hpp"
#include "gpe/profile.hpp"
#include "gpe/serialize.hpp"
#include "gpe/series.hpp"

namespace {

constexpr const char* kVersion = "gpe 1.0.0 (basis format v1)";

std::string cache_dir_path() {
    if (const char* dir = std::getenv("GPE_CACHE_DIR")) return dir;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME")) return std::string(xdg) + "/gpe";
    if (const char* home = std::getenv("HOME")) return std::string(home) + "/.cache/gpe";
    return "";
}

// Loads the precomputed recovery bases from the user cache; a miss of any
// kind silently rebuilds and refreshes the file.
void warm_basis_cache() {
    const std::string dir = cache_dir_path();
    if (dir.empty()) return;
    const std::string path = dir + "/basis_v" + std::to_string(gpe::kBasisCacheVersion) + ".bin";
    try {
        if (gpe::load_basis_cache_file(path)) return;
        std::filesystem::create_directories(dir);
        gpe::save_basis_cache_file(path);
    } catch (const std::exception&) {
        // cache is an optimization only
    }
}

void atomic_write_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw gpe::ValidationError("cannot write to " + tmp);
        out << content;
        if (!out.good()) throw gpe::ValidationError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void emit(const std::string& content, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << content;
    } else {
        atomic_write_file(output_path, content);
        std::cout << output_path << "\n";
    }
}

gpe::ProfileMethod method_from_string(const std::string& s) {
    if (s == "auto") return gpe::ProfileMethod::Auto;
    if (s == "fast") return gpe::ProfileMethod::Fast;
    if (s == "fallback") return gpe::ProfileMethod::Fallback;
    if (s == "oracle") return gpe::ProfileMethod::Oracle;
    throw gpe::ValidationError("unknown method: " + s);
}

std::vector<int> parse_delay_range(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (auto dots = item.find(".."); dots != std::string::npos) {
            const int lo = std::stoi(item.substr(0, dots));
            const int hi = std::stoi(item.substr(dots + 2));
            if (hi < lo) throw gpe::ValidationError("bad delay range: " + item);
            for (int v = lo; v <= hi; ++v) out.push_back(v);
        } else if (!item.empty()) {
            out.push_back(std::stoi(item));
        }
    }
    if (out.empty()) throw gpe::ValidationError("empty delay list");
    return out;
}

struct ProfileArgs {
    std::string input, method = "auto", format = "json", output;
    int order = 3;
    std::string fallback_budget, oracle_budget;
};

struct EntropyArgs {
    std::string input, kind = "gpe", output;
    int order = 3;
    int delay = 0;  // 0 = not given
    std::string delays;
    int ctpe_max_trees = gpe::CtpeLimits{}.max_trees;
    std::string fallback_budget;
};

struct SweepArgs {
    std::string input, kind = "gpe", output;
    int order = 3, window = 0, stride = 1;
    int delay = 0;
    std::string delays;
};

struct WindowsizeArgs {
    std::vector<std::string> inputs;
    std::string kind = "gpe", output;
    int order = 3, wmin = 0, wmax = 0;
};

struct ExperimentArgs {
    std::string config, outdir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
};

int run_profile(const ProfileArgs& a) {
    const gpe::TimeSeries ts = gpe::read_series_csv_file(a.input);
    const gpe::RankSequence rs = gpe::rank_series(ts);
    gpe::ProfileOptions opt;
    opt.method = method_from_string(a.method);
    if (!a.fallback_budget.empty()) opt.fallback_budget = gpe::u128_from_string(a.fallback_budget);
    if (!a.oracle_budget.empty()) opt.oracle_budget = gpe::u128_from_string(a.oracle_budget);
    const gpe::Profile p = gpe::profile(rs, a.order, opt);
    if (a.format == "json") {
        emit(gpe::profile_to_json(p) + "\n", a.output);
    } else if (a.format == "csv") {
        std::ostringstream os;
        gpe::write_profile_csv(os, p);
        emit(os.str(), a.output);
    } else {
        throw gpe::ValidationError("unknown format: " + a.format);
    }
    return 0;
}

int run_entropy(const EntropyArgs& a) {
    const gpe::TimeSeries ts = gpe::read_series_csv_file(a.input);
    const gpe::RankSequence rs = gpe::rank_series(ts);
    const gpe::EntropyKind kind = gpe::entropy_kind_from_string(a.kind);
    gpe::EntropyValue ev;
    switch (kind) {
        case gpe::EntropyKind::GPE: {
            gpe::ProfileOptions opt;
            if (!a.fallback_budget.empty()) opt.fallback_budget = gpe::u128_from_string(a.fallback_budget);
            ev = gpe::gpe(rs, a.order, opt);
            break;
        }
        case gpe::EntropyKind::PE:
            // default delay is 1 when --delay is not given
            ev = gpe::pe(rs, a.order, a.delay == 0 ? 1 : a.delay);
            break;
        case gpe::EntropyKind::PEavg: {
            if (a.delays.empty()) throw gpe::ValidationError("peavg requires --delays");
            const auto delays = parse_delay_range(a.delays);
            ev = gpe::pe_avg(rs, a.order, delays);
            break;
        }
        case gpe::EntropyKind::CTPE: {
            gpe::CtpeLimits limits;
            limits.max_trees = a.ctpe_max_trees;
            ev = gpe::ctpe(rs, a.order, limits);
            break;
        }
    }
    emit(gpe::entropy_to_json(ev) + "\n", a.output);
    return 0;
}

int run_sweep(const SweepArgs& a) {
    const gpe::TimeSeries ts = gpe::read_series_csv_file(a.input);
    gpe::WindowConfig cfg;
    cfg.kind = gpe::entropy_kind_from_string(a.kind);
    cfg.order = a.order;
    cfg.width = a.window;
    cfg.stride = a.stride;
    if (a.delay > 0) cfg.delay = a.delay;
    if (!a.delays.empty()) cfg.delays = parse_delay_range(a.delays);
    const gpe::EntropySeries es = gpe::windowed_entropy(ts, cfg);
    if (es.undersampled) {
        std::cerr << "warning: C(" << cfg.width << "," << cfg.order << ") < 100*" << cfg.order
                  << "!; entropies from windows this small are unreliable\n";
    }
    std::ostringstream os;
    gpe::write_entropy_series_csv(os, es);
    emit(os.str(), a.output);
    return 0;
}

int run_windowsize(const WindowsizeArgs& a) {
    std::vector<gpe::TimeSeries> realizations;
    realizations.reserve(a.inputs.size());
    std::size_t min_n = 0;
    for (const std::string& path : a.inputs) {
        realizations.push_back(gpe::read_series_csv_file(path));
        const std::size_t n = realizations.back().size();
        min_n = min_n == 0 ? n : std::min(min_n, n);
    }
    int wmin = a.wmin, wmax = a.wmax;
    if (wmin == 0) wmin = gpe::min_feasible_width(a.order);
    if (wmax == 0) wmax = static_cast<int>(min_n / 2);
    if (wmax < wmin) {
        throw gpe::ValidationError("window range [" + std::to_string(wmin) + "," + std::to_string(wmax) +
                                   "] is empty; series too short?");
    }
    if (wmin < gpe::min_feasible_width(a.order)) {
        std::cerr << "warning: windows below " << gpe::min_feasible_width(a.order)
                  << " have C(w," << a.order << ") < 100*" << a.order << "!\n";
    }
    std::vector<int> widths;
    for (int w = wmin; w <= wmax; ++w) widths.push_back(w);
    const gpe::SweepCurve curve =
        gpe::window_size_sweep(realizations, gpe::entropy_kind_from_string(a.kind), a.order, widths);
    const gpe::HalfPeriodEstimate est = gpe::estimate_half_period(curve);
    if (!a.output.empty()) {
        std::ostringstream os;
        gpe::write_sweep_curve_csv(os, curve);
        atomic_write_file(a.output, os.str());
        std::cerr << "sweep curve written to " << a.output << "\n";
    }
    std::cout << "{\"argmin_window\":" << est.width << ",\"recommended_low\":" << est.recommended_low
              << ",\"recommended_high\":" << est.recommended_high
              << ",\"interior\":" << (est.interior ? "true" : "false") << "}\n";
    if (!est.interior) {
        std::cerr << "warning: the sweep minimum sits on the range boundary; the half-period "
                     "heuristic assumes an interior minimum\n";
    }
    return 0;
}

int run_experiment_cmd(const ExperimentArgs& a, int threads) {
    gpe::ExperimentSpec spec = gpe::parse_experiment_config_file(a.config);
    if (a.seed_given) spec.override_seed(a.seed);
    if (threads > 0) spec.override_threads(threads);
    const gpe::ExperimentReport report = gpe::run_experiment(spec);
    for (const std::string& path : gpe::write_report(report, a.outdir)) {
        std::cout << path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Permutation-pattern profiles, global permutation entropy and ordinal analysis"};
    app.set_version_flag("--version", kVersion);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads for experiments (0 = all cores)");
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    ProfileArgs pa;
    auto* prof = app.add_subcommand("profile", "Exact pattern counts of a series");
    prof->add_option("--input", pa.input, "Input CSV (value per line, or t,value)")->required();
    prof->add_option("--order", pa.order, "Pattern order k (2..6)")->required();
    prof->add_option("--method", pa.method, "auto|fast|fallback|oracle")
        ->check(CLI::IsMember({"auto", "fast", "fallback", "oracle"}));
    prof->add_option("--format", pa.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    prof->add_option("--output", pa.output, "Write here instead of stdout");
    prof->add_option("--fallback-budget", pa.fallback_budget, "Tuple guard for k=5,6");
    prof->add_option("--oracle-budget", pa.oracle_budget, "Tuple guard for the oracle");

    EntropyArgs ea;
    auto* ent = app.add_subcommand("entropy", "GPE / PE / averaged PE / corner-tree entropy");
    ent->add_option("--input", ea.input)->required();
    ent->add_option("--kind", ea.kind, "gpe|pe|peavg|ctpe")
        ->check(CLI::IsMember({"gpe", "pe", "peavg", "ctpe"}));
    ent->add_option("--order", ea.order, "Order k")->required();
    auto* dly = ent->add_option("--delay", ea.delay, "PE delay (default 1)");
    auto* dlys = ent->add_option("--delays", ea.delays, "Delay set for peavg, e.g. 1..10 or 1,2,5");
    dly->excludes(dlys);
    ent->add_option("--output", ea.output);
    ent->add_option("--ctpe-max-trees", ea.ctpe_max_trees, "Tree enumeration guard for ctpe");
    ent->add_option("--fallback-budget", ea.fallback_budget, "Tuple guard for k=5,6");

    SweepArgs sa;
    auto* swp = app.add_subcommand("sweep", "Sliding-window entropy series (CSV t,value)");
    swp->add_option("--input", sa.input)->required();
    swp->add_option("--kind", sa.kind, "gpe|pe|peavg|ctpe")
        ->check(CLI::IsMember({"gpe", "pe", "peavg", "ctpe"}));
    swp->add_option("--order", sa.order)->required();
    swp->add_option("--window", sa.window, "Window width")->required();
    swp->add_option("--stride", sa.stride, "Window stride (default 1)");
    auto* sdly = swp->add_option("--delay", sa.delay);
    auto* sdlys = swp->add_option("--delays", sa.delays);
    sdly->excludes(sdlys);
    swp->add_option("--output", sa.output);

    WindowsizeArgs wa;
    auto* wsz = app.add_subcommand("windowsize", "Window-size sweep and half-period estimate");
    wsz->add_option("--input", wa.inputs, "Input CSV (repeatable: one per realization)")->required();
    wsz->add_option("--kind", wa.kind)->check(CLI::IsMember({"gpe", "pe", "peavg", "ctpe"}));
    wsz->add_option("--order", wa.order);
    wsz->add_option("--wmin", wa.wmin, "Smallest window (default: sample-size rule)");
    wsz->add_option("--wmax", wa.wmax, "Largest window (default: n/2)");
    wsz->add_option("--output", wa.output, "Write the sweep curve CSV here");

    ExperimentArgs xa;
    auto* exp = app.add_subcommand("experiment", "Run a seeded experiment from a config file");
    exp->add_option("--config", xa.config, "Flat key=value config")->required();
    auto* seed_opt = exp->add_option("--seed", xa.seed, "Override the config seed");
    exp->add_option("--outdir", xa.outdir, "Report directory (default .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        warm_basis_cache();
        if (prof->parsed()) return run_profile(pa);
        if (ent->parsed()) return run_entropy(ea);
        if (swp->parsed()) return run_sweep(sa);
        if (wsz->parsed()) return run_windowsize(wa);
        if (exp->parsed()) {
            xa.seed_given = seed_opt->count() > 0;
            return run_experiment_cmd(xa, threads);
        }
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const gpe::GuardError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 3;
    } catch (const gpe::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
