#include "mlsteg/session.hpp"

#include <algorithm>
#include <deque>
#include <queue>

#include "mlsteg/errors.hpp"
#include "mlsteg/rng.hpp"
#include "mlsteg/seq_lower.hpp"

namespace mlsteg::mls {

void CallConfig::validate() const
{
    stream.validate();
    channel.validate();
    lack.validate(stream, channel);
    if (x > 16) {
        throw ValidationError("x must be in 0..16");
    }
    if (duration < stream.frame_duration) {
        throw ValidationError("call must last at least one frame");
    }
    if (cut_at && cut_at->count() < 0) {
        throw ValidationError("cut_at must be >= 0");
    }
    if (ack_rtt.count() < 0) {
        throw ValidationError("ack_rtt must be >= 0");
    }
}

std::size_t CallConfig::planned_packets() const
{
    return static_cast<std::size_t>(duration / stream.frame_duration);
}

std::size_t CallConfig::packets() const
{
    const auto planned = planned_packets();
    if (!cut_at) {
        return planned;
    }
    return std::min(planned, static_cast<std::size_t>(*cut_at / stream.frame_duration));
}

double CallConfig::expected_lack_packets() const
{
    return static_cast<double>(planned_packets()) * lack.p_lack;
}

namespace {

class OvertSource {
public:
    OvertSource(const Bytes& payload, const rtp::StreamConfig& stream, std::uint64_t seed)
        : frame_bytes_(stream.frame_bytes), rng_(seed)
    {
        if (!payload.empty()) {
            frames_ = rtp::chunk_payload(payload, stream);
        }
    }

    Bytes frame(std::size_t index)
    {
        if (!frames_.empty()) {
            return frames_[index % frames_.size()];
        }
        Bytes f(frame_bytes_);
        for (std::size_t i = 0; i < f.size(); i += 8) {
            auto v = rng_.next();
            for (std::size_t b = i; b < std::min(f.size(), i + 8); ++b, v >>= 8) {
                f[b] = static_cast<std::uint8_t>(v);
            }
        }
        return f;
    }

private:
    std::size_t frame_bytes_;
    SplitMix64 rng_;
    std::vector<Bytes> frames_;
};

class LowerTx final : public lower::BitSource {
public:
    explicit LowerTx(std::vector<LowerItem> items) : items_(std::move(items))
    {
        std::stable_sort(items_.begin(), items_.end(),
                         [](const auto& a, const auto& b) { return a.enqueue_at < b.enqueue_at; });
    }

    void set_now(milliseconds t) { now_ = t; }

    BitString peek(unsigned n) override
    {
        ensure(n);
        return BitString(staged_.begin() + static_cast<std::ptrdiff_t>(pos_),
                         staged_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    }

    void consume(unsigned n) override
    {
        ensure(n);
        sent_.insert(sent_.end(), staged_.begin() + static_cast<std::ptrdiff_t>(pos_),
                     staged_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        if (pos_ > 4096) {
            staged_.erase(staged_.begin(), staged_.begin() + static_cast<std::ptrdiff_t>(pos_));
            pos_ = 0;
        }
    }

    const BitString& sent() const { return sent_; }

private:
    void ensure(std::size_t n)
    {
        while (staged_.size() - pos_ < n) {
            bool pulled = false;
            while (next_ < items_.size() && items_[next_].enqueue_at <= now_) {
                append_frame(staged_, items_[next_++].frame);
                pulled = true;
            }
            if (pulled) {
                continue;
            }
            if (next_ < items_.size()) {
                append_frame(staged_, keepalive_frame());
            } else {
                const auto need = n - (staged_.size() - pos_);
                const auto fill = lower::filler_bits(filler_pos_, need);
                staged_.insert(staged_.end(), fill.begin(), fill.end());
                filler_pos_ += need;
            }
        }
    }

    std::vector<LowerItem> items_;
    std::size_t next_ = 0;
    milliseconds now_{0};
    BitString staged_;
    std::size_t pos_ = 0;
    std::size_t filler_pos_ = 0;
    BitString sent_;
};

struct InFlight {
    milliseconds arrival;
    std::size_t order;
    std::size_t event;

    bool operator>(const InFlight& o) const
    {
        return arrival != o.arrival ? arrival > o.arrival : order > o.order;
    }
};

struct Marked {
    std::size_t pos;
    lack::UpperChunk chunk;
};

} // namespace

CallResult run_call(const CallConfig& cfg, const CallPlan& plan)
{
    cfg.validate();

    CallResult res;
    rtp::StreamConfig stream = cfg.stream;
    stream.start_seq = cfg.start_seq.value_or(
        static_cast<rtp::SeqNum>(derive_seed(cfg.seed, SeedPurpose::start_seq) & 0xffffU));
    res.start_seq = stream.start_seq;

    channel::ChannelConfig ch = cfg.channel;
    ch.seed = derive_seed(cfg.seed, SeedPurpose::channel);

    const std::size_t n_packets = cfg.packets();
    const auto fd = stream.frame_duration;

    channel::Link link(ch);
    SplitMix64 selector(derive_seed(cfg.seed, SeedPurpose::selection));
    OvertSource overt(cfg.overt_payload, stream, derive_seed(cfg.seed, SeedPurpose::overt_payload));
    lack::ChunkWriter writer(lack::frame_message(plan.upper_body), cfg.lack.chunk_bytes(stream),
                             cfg.lack.digest_bytes);
    LowerTx lower_tx(plan.lower);
    lower::Arbiter arbiter(stream, n_packets, cfg.x, lower::hold_packets(cfg.lack, stream));

    res.trace.frame_bytes = stream.frame_bytes;
    res.trace.digest_bytes = cfg.lack.digest_bytes;
    res.trace.x = cfg.x;
    res.trace.frame_duration = fd;
    res.trace.records.resize(n_packets);
    auto& records = res.trace.records;

    std::vector<channel::DeliveryEvent> events;
    events.reserve(n_packets);
    std::priority_queue<InFlight, std::vector<InFlight>, std::greater<>> in_flight;
    std::deque<lack::Embedded> delayed;
    std::optional<Marked> marked;
    std::deque<ParameterSwitch> pending_switches;
    double p = cfg.lack.p_lack;
    FrameParser parser;

    auto send = [&](rtp::RtpPacket pkt, milliseconds extra) {
        auto ev = link.send(std::move(pkt), extra);
        if (ev.status == channel::Status::late) {
            in_flight.push(InFlight{ev.arrival_time, events.size(), events.size()});
        }
        events.push_back(std::move(ev));
    };

    auto on_late = [&](const channel::DeliveryEvent& ev) {
        auto chunk = lack::try_extract(ev.packet, cfg.lack);
        if (!chunk) {
            return;
        }
        if (plan.tamper) {
            plan.tamper(res.chunks_received.size(), *chunk);
        }
        res.chunks_received.push_back(std::move(*chunk));
        res.chunk_positions.push_back(
            static_cast<std::size_t>(ev.packet.nominal_send_time / fd));
        if (cfg.x == 0) {
            return;
        }
        for (bool bit : lower::decode_bits(ev.packet.seq, cfg.x)) {
            res.lower_received.push_back(bit);
            auto frame = parser.push(bit);
            if (!frame) {
                continue;
            }
            if (frame->type == FrameType::ctrl) {
                try {
                    const auto msg = decode_control(*frame);
                    pending_switches.push_back(
                        ParameterSwitch{ev.arrival_time + cfg.ack_rtt, msg.probability()});
                } catch (const ParseError&) {
                    // Malformed control is ignored; the sender never sees an ack.
                }
            }
            res.frames.push_back(ReceivedFrame{std::move(*frame), ev.arrival_time});
        }
    };

    auto deliver_until = [&](std::optional<milliseconds> t) {
        while (!in_flight.empty() && (!t || in_flight.top().arrival <= *t)) {
            const auto idx = in_flight.top().event;
            in_flight.pop();
            on_late(events[idx]);
        }
    };

    for (std::size_t i = 0; i < n_packets; ++i) {
        const milliseconds now = fd * static_cast<std::int64_t>(i);

        while (!delayed.empty() && delayed.front().packet.nominal_send_time +
                                           delayed.front().extra_delay <= now) {
            send(std::move(delayed.front().packet), delayed.front().extra_delay);
            delayed.pop_front();
        }
        deliver_until(now);
        while (!pending_switches.empty() && pending_switches.front().ack_time <= now) {
            p = pending_switches.front().p_lack;
            res.switches.push_back(pending_switches.front());
            pending_switches.pop_front();
        }

        lower_tx.set_now(now);
        records[i].p_lack = p;
        const bool candidate = lack::draw_candidate(selector, p);
        if (auto entry = arbiter.step(i, candidate, lower_tx)) {
            records[entry->pos].mark_time = now;
            records[entry->pos].lower_bits = entry->lower_bits;
            marked = Marked{entry->pos, writer.next()};
        }

        rtp::RtpPacket pkt{rtp::seq_at(stream, i), now, overt.frame(i), false};
        if (marked && marked->pos == i) {
            delayed.push_back(lack::embed_chunk(std::move(pkt), marked->chunk, cfg.lack));
            marked.reset();
        } else {
            send(std::move(pkt), milliseconds{0});
        }
    }
    while (!delayed.empty()) {
        send(std::move(delayed.front().packet), delayed.front().extra_delay);
        delayed.pop_front();
    }
    deliver_until(std::nullopt);

    for (const auto& ev : events) {
        auto& r = records[static_cast<std::size_t>(ev.packet.nominal_send_time / fd)];
        r.seq = ev.packet.seq;
        r.nominal_send_time = ev.packet.nominal_send_time;
        r.actual_send_time = ev.send_time;
        if (ev.status != channel::Status::dropped) {
            r.arrival_time = ev.arrival_time;
        }
        r.status = ev.status;
        r.is_lack = ev.packet.is_lack;
    }

    res.concealed = channel::playout(events, ch, stream).concealed;
    res.metrics = analysis::measure_run(res.trace);
    res.chunks_sent = writer.chunks_written();
    res.upper_fully_sent = writer.exhausted();
    res.lower_sent = lower_tx.sent();
    res.upper = lack::reassemble(res.chunks_received);
    res.lower_terminated = parser.terminated();
    return res;
}

} // namespace mlsteg::mls
