#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlsteg/analysis.hpp"
#include "mlsteg/applications.hpp"
#include "mlsteg/channel.hpp"
#include "mlsteg/lack_upper.hpp"
#include "mlsteg/rtp_model.hpp"

namespace mlsteg::harness {

using std::chrono::milliseconds;

/// LACK alone, or LACK carrying 1, 2 or 3 lower-level bits per packet.
enum class Mode { lack, mls1, mls2, mls3, custom };

enum class Application { none, key_exchange, integrity, signalling, split };

std::string_view to_string(Mode m) noexcept;
std::string_view to_string(Application a) noexcept;
/// Accepts LACK, MLS-1, MLS-2, MLS-3, custom (case-insensitive). Throws ValidationError.
Mode mode_from_string(std::string_view s);
Application application_from_string(std::string_view s);

struct ExperimentConfig {
    Mode mode = Mode::mls1;
    double p_lack = 0.032;
    /// Required for custom mode; must agree with the preset otherwise.
    std::optional<unsigned> x;
    double duration_s = 540.0;
    std::size_t reps = 10;
    std::uint64_t seed = 1;
    Application application = Application::none;

    rtp::StreamConfig stream;
    /// Random per run when absent.
    std::optional<rtp::SeqNum> start_seq;
    channel::ChannelConfig channel;
    /// p_lack here is ignored in favour of the field above.
    lack::LackConfig lack;
    milliseconds ack_rtt{100};
    /// Raw overt payload bytes, cycled over the call.
    std::optional<std::string> input;
    std::optional<double> cut_at_s;

    // application == none: steganogram sizes, half the expected capacity when absent.
    std::optional<std::size_t> upper_bytes;
    std::optional<std::size_t> lower_bits;
    // key_exchange / integrity / split
    std::size_t message_bytes = 1024;
    std::size_t key_bits = 128;
    mls::IntegrityVariant integrity_variant = mls::IntegrityVariant::hash;
    // signalling: duration_s is the length of each phase.
    double phase2_p = 0.016;
    std::size_t split_ratio = 8;
    bool lower_only = false;

    /// Lower-level bits per LACK packet implied by mode and x.
    unsigned bits_per_lack() const;
    /// Throws ValidationError with a description of the first problem found.
    void validate() const;
    /// Call configuration for one repetition.
    mls::CallConfig call_config(std::uint64_t rep_seed) const;
};

struct ReportRow {
    std::string mode;
    std::string metric;
    double average = 0.0;
    /// Absent with a single repetition.
    std::optional<double> ci95;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    std::vector<analysis::RunMetrics> runs;
    /// Filled when traces are requested.
    std::vector<analysis::RunTrace> traces;
};

/// Per-rep seeds: successive SplitMix64 outputs seeded with the master seed.
std::vector<std::uint64_t> rep_seeds(std::uint64_t master, std::size_t reps);

ExperimentReport run_experiment(const ExperimentConfig& cfg, bool keep_traces = false);

std::string to_csv(std::span<const ReportRow> rows);
std::string to_json(std::span<const ReportRow> rows);

/// Overlays a JSON config object on `base`. Unknown keys are rejected with ParseError.
ExperimentConfig config_from_json(std::string_view text, ExperimentConfig base = {});

} // namespace mlsteg::harness
