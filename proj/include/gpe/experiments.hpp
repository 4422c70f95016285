// experiments.hpp — seeded signal generators and the Monte-Carlo harness:
// convergence on iid noise, noise-burst detection scored by ROC/AUC, and the
// ramped-noise study with the window-size sweep.
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gpe/analysis.hpp"
#include "gpe/series.hpp"

namespace gpe {

// xoshiro256++ seeded through splitmix64. Identical (seed, stream) yields an
// identical u64 sequence on every platform; per-run streams are derived as
//   run_seed = splitmix64(master + (run_index + 1) * 0x9E3779B97F4A7C15).
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    static Rng for_run(std::uint64_t master_seed, std::uint64_t run_index);

    std::uint64_t next_u64();
    double next_unit();    // [0,1), 53-bit resolution
    double next_normal();  // standard normal via Box-Muller; consumes two u64

private:
    std::array<std::uint64_t, 4> state_;
};

enum class SignalFamily { Iid, NoisyLine, NoisySine, NoiseBurst, RampNoise };

SignalFamily signal_family_from_string(const std::string& s);
const char* signal_family_name(SignalFamily f);

struct SignalSpec {
    SignalFamily family = SignalFamily::Iid;
    int length = 40;           // iid / noisy_line / noisy_sine
    int period = 10;           // noise_burst / ramp_noise (must be even)
    double eps = 0.0;          // noise_burst: quiet-segment noise scale
    double sigma2 = 1.0;       // ramp_noise: noise variance
    double slope = 0.05;       // noisy_line
    double noise_var = 0.025;  // noisy_line / noisy_sine additive N(0, var)
    double noise_sd = -1.0;    // alternative parameterization; >= 0 overrides noise_var
};

// iid:         n standard normals.
// noisy_line:  slope*t + N(0, noise_var), t = 1..length.
// noisy_sine:  sin on `length` equispaced points in [0, pi] + N(0, noise_var).
// noise_burst: sin(2*pi*t/P) + eps*eta for 1 <= t <= 3P, then unit noise for
//              3P < t <= (9/2)P.
// ramp_noise:  sin(2*pi*t/P) + (t/(10P)) * zeta, zeta ~ N(0, sigma2),
//              t = 1..10P.
TimeSeries gen_signal(const SignalSpec& spec, Rng& rng);

struct ROCResult {
    double auc = 0.0;
    // (fpr, tpr) per distinct threshold, threshold descending, from (0,0).
    std::vector<std::pair<double, double>> sweep_points;
    int run_index = 0;
};

// Threshold sweep over the union of observed scores: an observation counts
// as "more noisy" when its entropy is >= T. AUC by trapezoidal integration,
// which matches the tie-adjusted pairwise statistic.
ROCResult roc_auc(std::span<const double> noisy_scores, std::span<const double> quiet_scores);

// Small deterministic stats helpers shared by the harness and its tests.
double mean_of(std::span<const double> xs);
double sample_std(std::span<const double> xs);
double ci95_halfwidth(std::span<const double> xs);  // 1.96 * sd / sqrt(n)
double spearman(std::span<const double> xs, std::span<const double> ys);

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

struct ExperimentReport {
    std::string experiment;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> config_echo;
    std::vector<Table> tables;

    const Table& table(const std::string& name) const;
};

struct ConvergenceConfig {
    std::uint64_t seed = 1;
    int runs = 100;
    int length = 50;
    std::vector<int> orders{2, 3, 4, 5, 6};
    u128 tuple_budget = kDefaultFallbackBudget;
    int threads = 0;  // 0 = hardware
};

struct NoiseDetectionConfig {
    std::uint64_t seed = 1;
    int runs = 100;
    int period = 10;  // even; windows range over 8 .. (3/2)P + 1
    double eps = 0.25;
    std::vector<int> orders{2, 3, 4};
    int threads = 0;
};

struct RampConfig {
    std::uint64_t seed = 1;
    int runs = 100;
    std::vector<int> periods{60, 120};
    std::vector<double> sigma2s{1.0, 4.0};
    std::vector<int> windows{30, 45, 60, 150};
    std::vector<int> gpe_orders{3, 4};
    int pe_order = 3;
    std::vector<int> pe_delays{1, 10, 20};
    int pe_avg_lo = 1, pe_avg_hi = 10;
    // Window-size sweep (GPE order 3) on the first (period, sigma2) pair.
    bool sweep_enabled = true;
    std::vector<int> sweep_widths;  // empty = 10..period
    int threads = 0;
};

ExperimentReport run_convergence(const ConvergenceConfig& cfg);
ExperimentReport run_noise_detection(const NoiseDetectionConfig& cfg);
ExperimentReport run_ramp(const RampConfig& cfg);

// Flat `key = value` config text, one experiment per file; `experiment` picks
// the harness. Lists are comma-separated.
struct ExperimentSpec {
    std::string kind;  // "convergence" | "noise_detection" | "ramp"
    ConvergenceConfig convergence;
    NoiseDetectionConfig noise;
    RampConfig ramp;

    void override_seed(std::uint64_t seed);
    void override_threads(int threads);
    std::uint64_t seed() const;
};

ExperimentSpec parse_experiment_config(std::istream& in);
ExperimentSpec parse_experiment_config_file(const std::string& path);

ExperimentReport run_experiment(const ExperimentSpec& spec);

void write_table_csv(std::ostream& out, const Table& t);

// Writes one CSV per table plus a JSON summary under outdir; all writes go
// through a temp file and an atomic rename. Returns the created paths.
std::vector<std::string> write_report(const ExperimentReport& report, const std::string& outdir);

std::string format_double(double v);  // deterministic %.12g rendering

}  // namespace gpe
