#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlsteg/trace.hpp"

namespace mlsteg::analysis {

// ---- k-level bandwidth and cost -------------------------------------------

struct MethodSpec {
    std::string name;
    /// Steganographic bandwidth in bit/s.
    double bandwidth = 0.0;
};

/// Impact of method `o` at level `n` on method `p` at level `m` (m < n).
/// Levels count from 0 (the overt channel); method indices from 0.
struct CostEntry {
    std::size_t n = 0;
    std::size_t o = 0;
    std::size_t m = 0;
    std::size_t p = 0;
    double value = 0.0;
};

struct MlsPlan {
    /// levels[0] is the overt channel and holds exactly one entry.
    std::vector<std::vector<MethodSpec>> levels;
    std::vector<CostEntry> costs;
    /// Cost at which the combination becomes easy to detect.
    double threshold = 1.0;

    /// Number of steganographic levels k.
    std::size_t k() const { return levels.empty() ? 0 : levels.size() - 1; }
    bool single_method_per_level() const;

    /// Throws ValidationError on a malformed plan.
    void validate() const;
};

/// Sum of B_Snm over all levels n >= 1 and all methods m at that level.
double total_bandwidth(const MlsPlan& plan);
/// One-method-per-level form: sum of B_Sn. Throws ValidationError if any level has more than one method.
double total_bandwidth_single(const MlsPlan& plan);

struct CostVerdict {
    double cost = 0.0;
    /// cost >= threshold
    bool detectable = false;
};

/// Sum of every C_Snomp, compared against the threshold.
CostVerdict total_cost(const MlsPlan& plan);
/// One-method-per-level form: sum of C_Snm. Throws ValidationError if any level has more than one method.
CostVerdict total_cost_single(const MlsPlan& plan);

// ---- per-run measurement ---------------------------------------------------

struct RunMetrics {
    double b_su = 0.0;
    double b_sl = 0.0;
    double realized_p = 0.0;
    double loss_rate = 0.0;
    std::size_t plc_count = 0;
    double duration_s = 0.0;

    std::size_t packets = 0;
    std::size_t lack_packets = 0;
    /// LACK packets that reached the steganographic receiver.
    std::size_t delivered_lack = 0;
    std::uint64_t upper_bits = 0;
    std::uint64_t lower_bits = 0;
};

/// Throws ParseError if a record contradicts the run header (lower_bits width,
/// LACK packet not late, nominal times off the frame grid).
RunMetrics measure_run(const RunTrace& trace);

struct Interval {
    double mean = 0.0;
    double half_width = 0.0;
};

/// Student-t 95% interval with n - 1 degrees of freedom. Throws
/// InsufficientSamplesError for fewer than two samples.
Interval ci95(std::span<const double> samples);

} // namespace mlsteg::analysis

namespace mlsteg::analysis {

/// Reads a plan from JSON:
///
///   {"levels": [[{"name": "overt", "bandwidth": 0}],
///               [{"name": "LACK", "bandwidth": 1827.41}],
///               [{"name": "seq-match", "bandwidth": 3.16}]],
///    "costs": [{"n": 1, "o": 0, "m": 0, "p": 0, "value": 0.7}],
///    "threshold": 1.0}
///
/// Throws ParseError on malformed input; the result is validated.
MlsPlan plan_from_json(std::string_view text);

} // namespace mlsteg::analysis
