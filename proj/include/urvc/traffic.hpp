#pragma once

#include "urvc/random.hpp"
#include "urvc/time.hpp"

#include <cstdint>
#include <vector>

namespace urvc::traffic {

struct MessageSpec {
    std::int64_t payload_bytes = 1600;
    Nanos deadline = from_millis(5.0);
    double reliability_target = 0.99999;

    void validate() const;
};

/// 1600 B within 5 ms at 99.999 %.
inline MessageSpec tc12_message() { return {}; }

enum class SourceKind { Periodic, Event };

struct TrafficSource {
    SourceKind kind = SourceKind::Periodic;
    double rate_hz = 10.0;
    Nanos phase{0};

    void validate(double max_periodic_rate_hz = 10.0) const;
};

/// Request times in [0, horizon): phase + k / rate for periodic sources, a
/// Poisson process of the given rate for event sources.
std::vector<Nanos> generate(const TrafficSource& source, Nanos horizon, Rng& rng);

} // namespace urvc::traffic
