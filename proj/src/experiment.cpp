#include "mlsteg/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>

#include <fmt/format.h>
#include <json.hpp>

#include "mlsteg/errors.hpp"
#include "mlsteg/rng.hpp"

namespace mlsteg::harness {

using nlohmann::json;

std::string_view to_string(Mode m) noexcept
{
    switch (m) {
    case Mode::lack:
        return "LACK";
    case Mode::mls1:
        return "MLS-1";
    case Mode::mls2:
        return "MLS-2";
    case Mode::mls3:
        return "MLS-3";
    case Mode::custom:
        return "custom";
    }
    return "?";
}

std::string_view to_string(Application a) noexcept
{
    switch (a) {
    case Application::none:
        return "none";
    case Application::key_exchange:
        return "key_exchange";
    case Application::integrity:
        return "integrity";
    case Application::signalling:
        return "signalling";
    case Application::split:
        return "split";
    }
    return "?";
}

namespace {

std::string lower_case(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

Mode mode_from_string(std::string_view s)
{
    const auto l = lower_case(s);
    for (auto m : {Mode::lack, Mode::mls1, Mode::mls2, Mode::mls3, Mode::custom}) {
        if (l == lower_case(to_string(m))) {
            return m;
        }
    }
    throw ValidationError("unknown mode '" + std::string(s) + "'");
}

Application application_from_string(std::string_view s)
{
    const auto l = lower_case(s);
    for (auto a : {Application::none, Application::key_exchange, Application::integrity,
                   Application::signalling, Application::split}) {
        if (l == to_string(a)) {
            return a;
        }
    }
    throw ValidationError("unknown application '" + std::string(s) + "'");
}

unsigned ExperimentConfig::bits_per_lack() const
{
    switch (mode) {
    case Mode::lack:
        return 0;
    case Mode::mls1:
        return 1;
    case Mode::mls2:
        return 2;
    case Mode::mls3:
        return 3;
    case Mode::custom:
        return x.value_or(0);
    }
    return 0;
}

void ExperimentConfig::validate() const
{
    if (mode == Mode::custom) {
        if (!x) {
            throw ValidationError("custom mode needs --x-bits");
        }
        if (*x > 16) {
            throw ValidationError("x must be in 0..16");
        }
    } else if (x && *x != bits_per_lack()) {
        throw ValidationError(fmt::format("mode {} fixes x = {}, got {}", to_string(mode),
                                          bits_per_lack(), *x));
    }
    if (!(p_lack >= 0.0 && p_lack <= 1.0)) {
        throw ValidationError("p_lack must lie in [0, 1]");
    }
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
        throw ValidationError("duration_s must be positive");
    }
    if (reps == 0) {
        throw ValidationError("reps must be >= 1");
    }
    if (cut_at_s && !(*cut_at_s >= 0.0)) {
        throw ValidationError("cut_at_s must be >= 0");
    }
    if (application == Application::signalling && !(phase2_p >= 0.0 && phase2_p < 1.0)) {
        throw ValidationError("phase2_p must lie in [0, 1)");
    }
    if (application == Application::split && split_ratio == 0 && !lower_only) {
        throw ValidationError("split_ratio must be >= 1");
    }
    if (application == Application::key_exchange && (key_bits == 0 || key_bits > 8191)) {
        throw ValidationError("key_bits must be in 1..8191");
    }
    call_config(seed).validate();
}

mls::CallConfig ExperimentConfig::call_config(std::uint64_t rep_seed) const
{
    mls::CallConfig c;
    c.stream = stream;
    c.start_seq = start_seq;
    c.channel = channel;
    c.lack = lack;
    c.lack.p_lack = p_lack;
    c.x = bits_per_lack();
    c.duration = milliseconds{std::llround(duration_s * 1000.0)};
    if (cut_at_s) {
        c.cut_at = milliseconds{std::llround(*cut_at_s * 1000.0)};
    }
    c.ack_rtt = ack_rtt;
    c.seed = rep_seed;
    return c;
}

std::vector<std::uint64_t> rep_seeds(std::uint64_t master, std::size_t reps)
{
    SplitMix64 g(master);
    std::vector<std::uint64_t> out(reps);
    for (auto& s : out) {
        s = g.next();
    }
    return out;
}

namespace {

Bytes random_bytes(SplitMix64& rng, std::size_t n)
{
    Bytes out(n);
    for (auto& b : out) {
        b = static_cast<std::uint8_t>(rng.next() >> 56);
    }
    return out;
}

BitString random_bits(SplitMix64& rng, std::size_t n)
{
    BitString out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = (rng.next() >> 63) != 0;
    }
    return out;
}

Bytes read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open input file '" + path + "'");
    }
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Metric samples of one repetition, in insertion order.
using Samples = std::vector<std::pair<std::string, double>>;

void add_call_metrics(Samples& s, const analysis::RunMetrics& m)
{
    s.emplace_back("P_LACK", m.realized_p);
    s.emplace_back("B_SU", m.b_su);
    s.emplace_back("B_SL", m.b_sl);
    s.emplace_back("loss_rate", m.loss_rate);
    s.emplace_back("plc_count", static_cast<double>(m.plc_count));
}

struct RepOutput {
    Samples samples;
    analysis::RunMetrics metrics;
    analysis::RunTrace trace;
};

RepOutput run_none(const ExperimentConfig& cfg, mls::CallConfig call, SplitMix64& msg_rng)
{
    const double up_cap = mls::expected_upper_bytes(call);
    const double low_cap = mls::expected_lower_bits(call);
    std::size_t upper = 0;
    if (cfg.upper_bytes) {
        upper = *cfg.upper_bytes;
        if (static_cast<double>(upper + 4) > up_cap) {
            throw CapacityError(fmt::format("upper steganogram of {} bytes exceeds the expected "
                                            "capacity of {:.0f} bytes",
                                            upper, up_cap));
        }
    } else {
        const auto half = static_cast<std::size_t>(up_cap / 2);
        upper = half > 4 ? half - 4 : 0;
    }
    std::size_t lower = 0;
    if (cfg.lower_bits) {
        lower = *cfg.lower_bits;
        const auto frames = (lower + mls::kMaxFramePayloadBits - 1) / mls::kMaxFramePayloadBits;
        if (lower > 0 && static_cast<double>(lower + frames * mls::kFrameHeaderBits) > low_cap) {
            throw CapacityError(fmt::format("lower steganogram of {} bits exceeds the expected "
                                            "capacity of {:.0f} bits",
                                            lower, low_cap));
        }
    } else if (call.x > 0) {
        const auto budget = static_cast<std::size_t>(low_cap / 2);
        const auto per = mls::kMaxFramePayloadBits + mls::kFrameHeaderBits;
        const auto frames = (budget + per - 1) / per;
        lower = budget > frames * mls::kFrameHeaderBits ? budget - frames * mls::kFrameHeaderBits : 0;
    }

    mls::CallPlan plan;
    plan.upper_body = random_bytes(msg_rng, upper);
    const auto lower_msg = random_bits(msg_rng, lower);
    for (auto& f : mls::data_frames(lower_msg)) {
        plan.lower.push_back(mls::LowerItem{std::move(f), milliseconds{0}});
    }
    auto res = mls::run_call(call, plan);

    BitString lower_rx;
    for (const auto& f : res.frames) {
        if (f.frame.type == mls::FrameType::data) {
            lower_rx.insert(lower_rx.end(), f.frame.payload.begin(), f.frame.payload.end());
        }
    }
    RepOutput out;
    add_call_metrics(out.samples, res.metrics);
    out.samples.emplace_back("upper_recovered",
                             res.upper.message && res.upper.message->body == plan.upper_body ? 1.0 : 0.0);
    if (call.x > 0) {
        out.samples.emplace_back("lower_recovered", lower_rx == lower_msg ? 1.0 : 0.0);
    }
    out.metrics = res.metrics;
    out.trace = std::move(res.trace);
    return out;
}

RepOutput run_rep(const ExperimentConfig& cfg, std::uint64_t rep_seed, const Bytes& overt)
{
    auto call = cfg.call_config(rep_seed);
    call.overt_payload = overt;
    SplitMix64 msg_rng(derive_seed(rep_seed, SeedPurpose::message));

    RepOutput out;
    switch (cfg.application) {
    case Application::none:
        return run_none(cfg, std::move(call), msg_rng);
    case Application::key_exchange: {
        const auto message = random_bytes(msg_rng, cfg.message_bytes);
        SplitMix64 key_rng(derive_seed(rep_seed, SeedPurpose::key));
        auto kx = mls::run_key_exchange(message, mls::KeyMaterial{random_bits(key_rng, cfg.key_bits)},
                                        call);
        add_call_metrics(out.samples, kx.call.metrics);
        out.samples.emplace_back("key_recovered", kx.plaintext && *kx.plaintext == message ? 1.0 : 0.0);
        out.samples.emplace_back("awaiting_key",
                                 kx.status == mls::KeyExchangeStatus::awaiting_key ? 1.0 : 0.0);
        out.metrics = kx.call.metrics;
        out.trace = std::move(kx.call.trace);
        return out;
    }
    case Application::integrity: {
        const auto message = random_bytes(msg_rng, cfg.message_bytes);
        mls::IntegrityOptions opts;
        opts.variant = cfg.integrity_variant;
        auto v = mls::run_integrity(message, call, opts);
        add_call_metrics(out.samples, v.call.metrics);
        out.samples.emplace_back("integrity_ok", v.ok ? 1.0 : 0.0);
        out.metrics = v.call.metrics;
        out.trace = std::move(v.call.trace);
        return out;
    }
    case Application::signalling: {
        mls::SignallingOptions opts;
        opts.phase1_p = cfg.p_lack;
        opts.phase2_p = cfg.phase2_p;
        opts.phase_duration = call.duration;
        auto rep = mls::run_signalling(opts, call);
        add_call_metrics(out.samples, rep.call.metrics);
        out.samples.emplace_back("p_phase1", rep.realized_p1);
        out.samples.emplace_back("p_phase2", rep.realized_p2.value_or(std::nan("")));
        out.samples.emplace_back("ack_time_s", rep.ack_time
                                                   ? std::chrono::duration<double>(*rep.ack_time).count()
                                                   : std::nan(""));
        out.metrics = rep.call.metrics;
        out.trace = std::move(rep.call.trace);
        return out;
    }
    case Application::split: {
        const auto message = random_bytes(msg_rng, cfg.message_bytes);
        mls::SplitResult sr;
        if (cfg.lower_only) {
            sr = mls::run_lower_only(message, random_bytes(msg_rng, cfg.message_bytes), call);
        } else {
            sr = mls::run_split(message, cfg.split_ratio, call);
        }
        add_call_metrics(out.samples, sr.call.metrics);
        out.samples.emplace_back("split_recovered", sr.ok ? 1.0 : 0.0);
        out.metrics = sr.call.metrics;
        out.trace = std::move(sr.call.trace);
        return out;
    }
    }
    return out;
}

std::string number(double v)
{
    if (!std::isfinite(v)) {
        return "nan";
    }
    return fmt::format("{:.6f}", v);
}

json json_number(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

} // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, bool keep_traces)
{
    cfg.validate();
    const Bytes overt = cfg.input ? read_file(*cfg.input) : Bytes{};
    const auto label = std::string(to_string(cfg.mode));

    ExperimentReport report;
    std::vector<std::string> order;
    std::map<std::string, std::vector<double>> by_metric;
    std::size_t rep = 0;
    for (auto seed : rep_seeds(cfg.seed, cfg.reps)) {
        auto out = run_rep(cfg, seed, overt);
        for (const auto& [name, value] : out.samples) {
            auto [it, fresh] = by_metric.try_emplace(name);
            if (fresh) {
                order.push_back(name);
            }
            it->second.push_back(value);
        }
        report.runs.push_back(out.metrics);
        if (keep_traces) {
            out.trace.mode = label;
            out.trace.rep = rep;
            report.traces.push_back(std::move(out.trace));
        }
        ++rep;
    }

    for (const auto& name : order) {
        const auto& v = by_metric[name];
        ReportRow row{label, name, 0.0, std::nullopt};
        if (v.size() >= 2) {
            const auto ci = analysis::ci95(v);
            row.average = ci.mean;
            row.ci95 = ci.half_width;
        } else {
            row.average = v.front();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string to_csv(std::span<const ReportRow> rows)
{
    std::string out = "mode,metric,average,ci95\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{}\n", r.mode, r.metric, number(r.average),
                           r.ci95 ? number(*r.ci95) : std::string{});
    }
    return out;
}

std::string to_json(std::span<const ReportRow> rows)
{
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"mode", r.mode},
                       {"metric", r.metric},
                       {"average", json_number(r.average)},
                       {"ci95", r.ci95 ? json_number(*r.ci95) : json(nullptr)}});
    }
    return arr.dump(2) + "\n";
}

namespace {

template <typename T>
T get(const json& j, std::string_view key)
{
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw ParseError("config key '" + std::string(key) + "': " + e.what());
    }
}

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> keys)
{
    if (!obj.is_object()) {
        throw ParseError("config section '" + std::string(where) + "' must be an object");
    }
    for (const auto& [k, _] : obj.items()) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
            throw ParseError("unknown config key '" + std::string(where) + k + "'");
        }
    }
}

} // namespace

ExperimentConfig config_from_json(std::string_view text, ExperimentConfig c)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    check_keys(j, "", {"mode", "p_lack", "x_bits", "duration_s", "reps", "seed", "app", "input",
                       "cut_at_s", "upper_bytes", "lower_bits", "message_bytes", "key_bits",
                       "integrity_variant", "phase2_p", "split_ratio", "lower_only", "ack_rtt_ms",
                       "stream", "channel", "lack"});
    try {
        if (j.contains("mode")) {
            c.mode = mode_from_string(get<std::string>(j["mode"], "mode"));
        }
        if (j.contains("app")) {
            c.application = application_from_string(get<std::string>(j["app"], "app"));
        }
        if (j.contains("integrity_variant")) {
            const auto v = get<std::string>(j["integrity_variant"], "integrity_variant");
            if (v == "hash") {
                c.integrity_variant = mls::IntegrityVariant::hash;
            } else if (v == "seqidx") {
                c.integrity_variant = mls::IntegrityVariant::seqidx;
            } else {
                throw ParseError("integrity_variant must be 'hash' or 'seqidx'");
            }
        }
    } catch (const ValidationError& e) {
        throw ParseError(e.what());
    }
    if (j.contains("p_lack")) {
        c.p_lack = get<double>(j["p_lack"], "p_lack");
    }
    if (j.contains("x_bits")) {
        c.x = get<unsigned>(j["x_bits"], "x_bits");
    }
    if (j.contains("duration_s")) {
        c.duration_s = get<double>(j["duration_s"], "duration_s");
    }
    if (j.contains("reps")) {
        c.reps = get<std::size_t>(j["reps"], "reps");
    }
    if (j.contains("seed")) {
        c.seed = get<std::uint64_t>(j["seed"], "seed");
    }
    if (j.contains("input")) {
        c.input = get<std::string>(j["input"], "input");
    }
    if (j.contains("cut_at_s")) {
        c.cut_at_s = get<double>(j["cut_at_s"], "cut_at_s");
    }
    if (j.contains("upper_bytes")) {
        c.upper_bytes = get<std::size_t>(j["upper_bytes"], "upper_bytes");
    }
    if (j.contains("lower_bits")) {
        c.lower_bits = get<std::size_t>(j["lower_bits"], "lower_bits");
    }
    if (j.contains("message_bytes")) {
        c.message_bytes = get<std::size_t>(j["message_bytes"], "message_bytes");
    }
    if (j.contains("key_bits")) {
        c.key_bits = get<std::size_t>(j["key_bits"], "key_bits");
    }
    if (j.contains("phase2_p")) {
        c.phase2_p = get<double>(j["phase2_p"], "phase2_p");
    }
    if (j.contains("split_ratio")) {
        c.split_ratio = get<std::size_t>(j["split_ratio"], "split_ratio");
    }
    if (j.contains("lower_only")) {
        c.lower_only = get<bool>(j["lower_only"], "lower_only");
    }
    if (j.contains("ack_rtt_ms")) {
        c.ack_rtt = milliseconds{get<std::int64_t>(j["ack_rtt_ms"], "ack_rtt_ms")};
    }
    if (j.contains("stream")) {
        const auto& s = j["stream"];
        check_keys(s, "stream.", {"packets_per_second", "frame_bytes", "frame_duration_ms", "start_seq"});
        if (s.contains("packets_per_second")) {
            c.stream.packets_per_second = get<unsigned>(s["packets_per_second"], "stream.packets_per_second");
        }
        if (s.contains("frame_bytes")) {
            c.stream.frame_bytes = get<std::size_t>(s["frame_bytes"], "stream.frame_bytes");
        }
        if (s.contains("frame_duration_ms")) {
            c.stream.frame_duration = milliseconds{get<std::int64_t>(s["frame_duration_ms"], "stream.frame_duration_ms")};
        }
        if (s.contains("start_seq")) {
            c.start_seq = get<rtp::SeqNum>(s["start_seq"], "stream.start_seq");
        }
    }
    if (j.contains("channel")) {
        const auto& s = j["channel"];
        check_keys(s, "channel.", {"base_latency_ms", "playout_deadline_ms", "extra_loss_p"});
        if (s.contains("base_latency_ms")) {
            c.channel.base_latency = milliseconds{get<std::int64_t>(s["base_latency_ms"], "channel.base_latency_ms")};
        }
        if (s.contains("playout_deadline_ms")) {
            c.channel.playout_deadline = milliseconds{get<std::int64_t>(s["playout_deadline_ms"], "channel.playout_deadline_ms")};
        }
        if (s.contains("extra_loss_p")) {
            c.channel.extra_loss_p = get<double>(s["extra_loss_p"], "channel.extra_loss_p");
        }
    }
    if (j.contains("lack")) {
        const auto& s = j["lack"];
        check_keys(s, "lack.", {"min_delay_ms", "digest_bytes"});
        if (s.contains("min_delay_ms")) {
            c.lack.min_delay = milliseconds{get<std::int64_t>(s["min_delay_ms"], "lack.min_delay_ms")};
        }
        if (s.contains("digest_bytes")) {
            c.lack.digest_bytes = get<std::size_t>(s["digest_bytes"], "lack.digest_bytes");
        }
    }
    return c;
}

} // namespace mlsteg::harness
