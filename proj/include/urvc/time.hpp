#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>

namespace urvc {

// Simulation time is an integer nanosecond count since the start of a run.
// Latency arithmetic is therefore exact, which keeps deadline ties and the
// constant-latency release of the jitter buffer free of rounding noise.
using Nanos = std::chrono::duration<std::int64_t, std::nano>;

inline constexpr Nanos kNanosInfinity = Nanos::max();

inline double to_seconds(Nanos t) { return std::chrono::duration<double>(t).count(); }

inline Nanos from_seconds(double seconds)
{
    if (std::isinf(seconds) && seconds > 0)
        return kNanosInfinity;
    return Nanos(static_cast<std::int64_t>(std::llround(seconds * 1e9)));
}

inline Nanos from_millis(double ms) { return from_seconds(ms * 1e-3); }

} // namespace urvc
