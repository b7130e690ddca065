#pragma once

#include "urvc/time.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace urvc::jitter {

struct BufferedMessage {
    std::uint64_t message_id = 0;
    Nanos request_time{0};
    std::optional<Nanos> arrival_time; // empty: never arrived
    Nanos deadline{0};
};

enum class ReleasePolicy {
    ConstantLatency, // hold every message until request_time + deadline
    Immediate,       // release on arrival
};

enum class ReleaseStatus { Released, Discarded, Late };

struct ReleaseDecision {
    ReleaseStatus status = ReleaseStatus::Discarded;
    std::optional<Nanos> release_time;
};

/// Hard-deadline release rule. Arrivals at exactly request_time + deadline are
/// on time. Late messages are discarded unless deliver_late is set, in which
/// case they are released on arrival and tagged Late.
ReleaseDecision schedule_release(const BufferedMessage& msg, ReleasePolicy policy = ReleasePolicy::ConstantLatency,
                                 bool deliver_late = false);

struct ReleaseLogEntry {
    BufferedMessage message;
    ReleaseDecision decision;
};

struct JitterStats {
    std::uint64_t offered = 0;
    std::uint64_t released = 0; // on time only
    std::uint64_t late = 0;
    double released_fraction = 0.0;
    double mean_latency_s = 0.0;
    double latency_variance_s2 = 0.0; // sample variance over on-time releases
};

/// Receive-side buffer for one receiver stream.
class JitterBuffer {
public:
    explicit JitterBuffer(ReleasePolicy policy = ReleasePolicy::ConstantLatency, bool deliver_late = false)
        : policy_(policy), deliver_late_(deliver_late)
    {
    }

    const ReleaseDecision& push(const BufferedMessage& msg);

    const std::vector<ReleaseLogEntry>& log() const { return log_; }

    /// Released entries (on time and late) in release order; ties between
    /// equal release times keep request order.
    std::vector<ReleaseLogEntry> release_sequence() const;

    JitterStats stats() const;

    /// CSV: message_id,request_time,arrival_time,release_time_or_discard
    void write_log_csv(std::ostream& os) const;

private:
    ReleasePolicy policy_;
    bool deliver_late_;
    std::vector<ReleaseLogEntry> log_;
};

} // namespace urvc::jitter
