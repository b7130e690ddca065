#include "urvc/jitter_buffer.hpp"

#include <algorithm>
#include <iomanip>
#include <stdexcept>

namespace urvc::jitter {

ReleaseDecision schedule_release(const BufferedMessage& msg, ReleasePolicy policy, bool deliver_late)
{
    if (msg.deadline <= Nanos::zero())
        throw std::invalid_argument("deadline must be positive");
    if (msg.arrival_time && *msg.arrival_time < msg.request_time)
        throw std::invalid_argument("arrival precedes request");
    if (!msg.arrival_time)
        return {ReleaseStatus::Discarded, std::nullopt};

    const Nanos due = msg.request_time + msg.deadline;
    if (*msg.arrival_time > due) {
        if (deliver_late)
            return {ReleaseStatus::Late, *msg.arrival_time};
        return {ReleaseStatus::Discarded, std::nullopt};
    }
    if (policy == ReleasePolicy::Immediate)
        return {ReleaseStatus::Released, *msg.arrival_time};
    return {ReleaseStatus::Released, due};
}

const ReleaseDecision& JitterBuffer::push(const BufferedMessage& msg)
{
    log_.push_back({msg, schedule_release(msg, policy_, deliver_late_)});
    return log_.back().decision;
}

std::vector<ReleaseLogEntry> JitterBuffer::release_sequence() const
{
    std::vector<ReleaseLogEntry> out;
    for (const auto& e : log_)
        if (e.decision.release_time)
            out.push_back(e);
    std::stable_sort(out.begin(), out.end(), [](const ReleaseLogEntry& a, const ReleaseLogEntry& b) {
        if (*a.decision.release_time != *b.decision.release_time)
            return *a.decision.release_time < *b.decision.release_time;
        return a.message.request_time < b.message.request_time;
    });
    return out;
}

JitterStats JitterBuffer::stats() const
{
    JitterStats s;
    s.offered = log_.size();
    // Integer nanosecond moments: equal latencies give a variance of exactly 0.
    __int128 sum = 0;
    __int128 sum_sq = 0;
    for (const auto& e : log_) {
        if (e.decision.status == ReleaseStatus::Late)
            ++s.late;
        if (e.decision.status != ReleaseStatus::Released)
            continue;
        ++s.released;
        const __int128 l = (*e.decision.release_time - e.message.request_time).count();
        sum += l;
        sum_sq += l * l;
    }
    if (s.offered)
        s.released_fraction = double(s.released) / double(s.offered);
    if (s.released) {
        const auto n = static_cast<__int128>(s.released);
        s.mean_latency_s = double(sum) / double(n) * 1e-9;
        if (n > 1)
            s.latency_variance_s2 = double(n * sum_sq - sum * sum) / double(n * (n - 1)) * 1e-18;
    }
    return s;
}

void JitterBuffer::write_log_csv(std::ostream& os) const
{
    const auto flags = os.flags();
    os << std::setprecision(17);
    os << "message_id,request_time,arrival_time,release_time_or_discard\n";
    for (const auto& e : log_) {
        os << e.message.message_id << ',' << to_seconds(e.message.request_time) << ',';
        if (e.message.arrival_time)
            os << to_seconds(*e.message.arrival_time);
        else
            os << "inf";
        os << ',';
        if (e.decision.release_time)
            os << to_seconds(*e.decision.release_time) << (e.decision.status == ReleaseStatus::Late ? ":late" : "");
        else
            os << "discard";
        os << '\n';
    }
    os.flags(flags);
}

} // namespace urvc::jitter
