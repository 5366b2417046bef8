#include "mlsteg/channel.hpp"

#include <algorithm>
#include <numeric>

#include "mlsteg/errors.hpp"

namespace mlsteg::channel {

void ChannelConfig::validate() const
{
    if (base_latency.count() < 0) {
        throw ValidationError("base_latency must be >= 0");
    }
    if (playout_deadline.count() <= 0) {
        throw ValidationError("playout_deadline must be > 0");
    }
    if (!(extra_loss_p >= 0.0 && extra_loss_p <= 1.0)) {
        throw ValidationError("extra_loss_p must lie in [0, 1]");
    }
}

std::string_view to_string(Status s) noexcept
{
    switch (s) {
    case Status::on_time:
        return "on_time";
    case Status::late:
        return "late";
    case Status::dropped:
        return "dropped";
    }
    return "?";
}

Status status_from_string(std::string_view s)
{
    if (s == "on_time") {
        return Status::on_time;
    }
    if (s == "late") {
        return Status::late;
    }
    if (s == "dropped") {
        return Status::dropped;
    }
    throw ParseError("unknown delivery status '" + std::string(s) + "'");
}

Link::Link(const ChannelConfig& cfg) : cfg_(cfg), rng_(cfg.seed)
{
    cfg_.validate();
}

DeliveryEvent Link::send(rtp::RtpPacket packet, milliseconds extra_delay)
{
    DeliveryEvent ev;
    ev.send_time = packet.nominal_send_time + extra_delay;
    ev.arrival_time = ev.send_time + cfg_.base_latency;
    const bool lost = rng_.uniform() < cfg_.extra_loss_p;
    if (lost) {
        ev.status = Status::dropped;
    } else if (ev.arrival_time >
               packet.nominal_send_time + cfg_.base_latency + cfg_.playout_deadline) {
        ev.status = Status::late;
    } else {
        ev.status = Status::on_time;
    }
    ev.packet = std::move(packet);
    return ev;
}

std::vector<DeliveryEvent> transmit(std::span<const ScheduledPacket> schedule,
                                    const ChannelConfig& cfg)
{
    Link link(cfg);
    std::vector<DeliveryEvent> events;
    events.reserve(schedule.size());
    for (const auto& s : schedule) {
        events.push_back(link.send(s.packet, s.extra_delay));
    }
    return events;
}

PlayoutResult playout(std::span<const DeliveryEvent> events, const ChannelConfig& cfg,
                      const rtp::StreamConfig& stream)
{
    cfg.validate();
    stream.validate();

    std::size_t positions = 0;
    for (const auto& ev : events) {
        const auto pos = static_cast<std::size_t>(ev.packet.nominal_send_time / stream.frame_duration);
        positions = std::max(positions, pos + 1);
    }

    std::vector<const DeliveryEvent*> at(positions, nullptr);
    for (const auto& ev : events) {
        at[static_cast<std::size_t>(ev.packet.nominal_send_time / stream.frame_duration)] = &ev;
    }

    PlayoutResult out;
    out.played.reserve(positions);
    const Bytes silence(stream.frame_bytes, 0);
    for (std::size_t i = 0; i < positions; ++i) {
        const DeliveryEvent* ev = at[i];
        if (ev != nullptr && ev->status == Status::on_time) {
            out.played.push_back(ev->packet.payload);
        } else {
            // PLC: repeat the previous played frame, or silence at stream start.
            out.played.push_back(i == 0 ? silence : out.played.back());
            ++out.concealed;
        }
    }

    std::vector<std::size_t> late_idx;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].status == Status::late) {
            late_idx.push_back(i);
        }
    }
    std::stable_sort(late_idx.begin(), late_idx.end(), [&](std::size_t a, std::size_t b) {
        return events[a].arrival_time < events[b].arrival_time;
    });
    out.late.reserve(late_idx.size());
    for (auto i : late_idx) {
        out.late.push_back(events[i].packet);
    }
    return out;
}

} // namespace mlsteg::channel
