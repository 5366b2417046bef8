// mls_sim: runs two-level LACK / sequence-number steganography experiments
// and reports bandwidth, realized p_LACK and loss per mode.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "mlsteg/analysis.hpp"
#include "mlsteg/errors.hpp"
#include "mlsteg/experiment.hpp"

using namespace mlsteg;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int measure(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open trace '" + path + "'");
    }
    std::cout << "mode,rep,packets,lack_packets,realized_p,b_su,b_sl,loss_rate,plc_count\n";
    for (const auto& run : analysis::read_jsonl(in)) {
        const auto m = analysis::measure_run(run);
        std::cout << fmt::format("{},{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", run.mode, run.rep,
                                 m.packets, m.lack_packets, m.realized_p, m.b_su, m.b_sl,
                                 m.loss_rate, m.plc_count);
    }
    return 0;
}

int plan(const std::string& path)
{
    const auto p = analysis::plan_from_json(slurp(path));
    const auto cost = analysis::total_cost(p);
    std::cout << fmt::format("levels k = {}\n", p.k());
    std::cout << fmt::format("total bandwidth = {:.10g} bit/s\n", analysis::total_bandwidth(p));
    std::cout << fmt::format("total cost = {:.10g} (threshold {:.10g}) -> {}\n", cost.cost, p.threshold,
                             cost.detectable ? "detectable" : "below threshold");
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-level steganography simulator: LACK over RTP with sequence-number "
                 "matching as the lower level"};
    app.require_subcommand(0, 1);

    std::vector<std::string> modes;
    std::string config_path;
    std::string report_format = "csv";
    std::string trace_path;
    std::string out_path;
    std::string app_name;
    std::string variant;
    std::string input;
    double p_lack = 0;
    unsigned x_bits = 0;
    double duration_s = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    double cut_at_s = 0;
    std::size_t upper_bytes = 0;
    std::size_t lower_bits = 0;
    std::size_t message_bytes = 0;
    std::size_t key_bits = 0;
    double phase2_p = 0;
    std::size_t split_ratio = 0;
    bool lower_only = false;
    double extra_loss_p = 0;
    std::int64_t playout_deadline_ms = 0;
    std::int64_t min_delay_ms = 0;
    std::int64_t base_latency_ms = 0;
    unsigned start_seq = 0;

    app.add_option("--config", config_path, "JSON experiment config; flags override it")
        ->check(CLI::ExistingFile);
    auto* o_mode = app.add_option("--mode", modes, "LACK, MLS-1, MLS-2, MLS-3 or custom (repeatable; "
                                                  "default: all four presets)")
                       ->delimiter(',');
    auto* o_p = app.add_option("--p-lack", p_lack, "probability of selecting a packet for LACK");
    auto* o_x = app.add_option("--x-bits", x_bits, "lower-level bits per LACK packet (custom mode)");
    auto* o_dur = app.add_option("--duration-s", duration_s, "call length in seconds");
    auto* o_reps = app.add_option("--reps", reps, "repetitions per mode");
    auto* o_seed = app.add_option("--seed", seed, "master seed");
    auto* o_app = app.add_option("--app", app_name, "none, key_exchange, integrity, signalling, split");
    auto* o_input = app.add_option("--input", input, "raw overt payload file")->check(CLI::ExistingFile);
    app.add_option("--report", report_format, "report format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--trace", trace_path, "write a JSON-lines packet trace of every run");
    app.add_option("--out", out_path, "write the report here instead of stdout");
    auto* o_cut = app.add_option("--cut-at-s", cut_at_s, "end each call early at this time");
    auto* o_ub = app.add_option("--upper-bytes", upper_bytes, "upper steganogram size (app none)");
    auto* o_lb = app.add_option("--lower-bits", lower_bits, "lower steganogram size (app none)");
    auto* o_mb = app.add_option("--message-bytes", message_bytes, "steganogram size for applications");
    auto* o_kb = app.add_option("--key-bits", key_bits, "key length for key_exchange");
    auto* o_var = app.add_option("--integrity-variant", variant, "hash or seqidx")
                      ->check(CLI::IsMember({"hash", "seqidx"}));
    auto* o_p2 = app.add_option("--phase2-p", phase2_p, "p_lack signalled for phase 2");
    auto* o_ratio = app.add_option("--split-ratio", split_ratio, "upper:lower bit ratio for split");
    auto* o_lo = app.add_flag("--lower-only", lower_only, "split: whole steganogram on the lower level");
    auto* o_loss = app.add_option("--extra-loss-p", extra_loss_p, "random network loss probability");
    auto* o_pd = app.add_option("--playout-deadline-ms", playout_deadline_ms, "receiver playout deadline");
    auto* o_md = app.add_option("--min-delay-ms", min_delay_ms, "LACK packet delay");
    auto* o_bl = app.add_option("--base-latency-ms", base_latency_ms, "one-way latency");
    auto* o_ss = app.add_option("--start-seq", start_seq, "fixed initial RTP sequence number")
                     ->check(CLI::Range(0, 65535));

    auto* measure_cmd = app.add_subcommand("measure", "compute run metrics from a trace file");
    std::string measure_path;
    measure_cmd->add_option("trace", measure_path, "JSON-lines trace")->required()->check(CLI::ExistingFile);

    auto* plan_cmd = app.add_subcommand("plan", "evaluate total bandwidth and cost of an MLS plan");
    std::string plan_path;
    plan_cmd->add_option("plan", plan_path, "JSON plan")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*measure_cmd) {
            return measure(measure_path);
        }
        if (*plan_cmd) {
            return plan(plan_path);
        }

        harness::ExperimentConfig base;
        bool file_mode = false;
        if (!config_path.empty()) {
            const auto text = slurp(config_path);
            base = harness::config_from_json(text);
            file_mode = nlohmann::json::parse(text).contains("mode");
        }
        if (*o_p) base.p_lack = p_lack;
        if (*o_x) base.x = x_bits;
        if (*o_dur) base.duration_s = duration_s;
        if (*o_reps) base.reps = reps;
        if (*o_seed) base.seed = seed;
        if (*o_app) base.application = harness::application_from_string(app_name);
        if (*o_input) base.input = input;
        if (*o_cut) base.cut_at_s = cut_at_s;
        if (*o_ub) base.upper_bytes = upper_bytes;
        if (*o_lb) base.lower_bits = lower_bits;
        if (*o_mb) base.message_bytes = message_bytes;
        if (*o_kb) base.key_bits = key_bits;
        if (*o_var) base.integrity_variant = variant == "hash" ? mls::IntegrityVariant::hash
                                                               : mls::IntegrityVariant::seqidx;
        if (*o_p2) base.phase2_p = phase2_p;
        if (*o_ratio) base.split_ratio = split_ratio;
        if (*o_lo) base.lower_only = lower_only;
        if (*o_loss) base.channel.extra_loss_p = extra_loss_p;
        if (*o_pd) base.channel.playout_deadline = std::chrono::milliseconds{playout_deadline_ms};
        if (*o_md) base.lack.min_delay = std::chrono::milliseconds{min_delay_ms};
        if (*o_bl) base.channel.base_latency = std::chrono::milliseconds{base_latency_ms};
        if (*o_ss) base.start_seq = static_cast<rtp::SeqNum>(start_seq);

        std::vector<harness::Mode> run_modes;
        if (*o_mode) {
            for (const auto& m : modes) {
                run_modes.push_back(harness::mode_from_string(m));
            }
        } else if (file_mode) {
            run_modes.push_back(base.mode);
        } else if (*o_x) {
            run_modes.push_back(harness::Mode::custom);
        } else {
            run_modes = {harness::Mode::lack, harness::Mode::mls1, harness::Mode::mls2,
                         harness::Mode::mls3};
        }

        std::vector<harness::ReportRow> rows;
        std::ofstream trace_out;
        if (!trace_path.empty()) {
            trace_out.open(trace_path);
            if (!trace_out) {
                throw ValidationError("cannot write trace '" + trace_path + "'");
            }
        }
        for (auto mode : run_modes) {
            auto cfg = base;
            cfg.mode = mode;
            if (mode != harness::Mode::custom && !*o_x) {
                cfg.x.reset();
            }
            auto report = harness::run_experiment(cfg, !trace_path.empty());
            rows.insert(rows.end(), report.rows.begin(), report.rows.end());
            for (const auto& t : report.traces) {
                analysis::write_jsonl(trace_out, t);
            }
        }

        const auto text = report_format == "json" ? harness::to_json(rows) : harness::to_csv(rows);
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(out_path);
            if (!out) {
                throw ValidationError("cannot write report '" + out_path + "'");
            }
            out << text;
        }
    } catch (const mlsteg::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
