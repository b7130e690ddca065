#include "urvc/traffic.hpp"

#include <cmath>
#include <stdexcept>

namespace urvc::traffic {

void MessageSpec::validate() const
{
    if (payload_bytes <= 0 || deadline <= Nanos::zero())
        throw std::invalid_argument("message payload and deadline must be positive");
    if (!(reliability_target > 0.0 && reliability_target < 1.0))
        throw std::invalid_argument("reliability target must lie in (0, 1)");
}

void TrafficSource::validate(double max_periodic_rate_hz) const
{
    if (!(rate_hz > 0.0) || !std::isfinite(rate_hz))
        throw std::invalid_argument("traffic rate must be positive");
    if (kind == SourceKind::Periodic && rate_hz > max_periodic_rate_hz)
        throw std::invalid_argument("periodic rate exceeds " + std::to_string(max_periodic_rate_hz) + " Hz");
    if (phase < Nanos::zero())
        throw std::invalid_argument("phase must be non-negative");
}

std::vector<Nanos> generate(const TrafficSource& source, Nanos horizon, Rng& rng)
{
    if (horizon <= Nanos::zero())
        throw std::invalid_argument("horizon must be positive");
    if (!(source.rate_hz > 0.0))
        throw std::invalid_argument("traffic rate must be positive");

    std::vector<Nanos> times;
    if (source.kind == SourceKind::Periodic) {
        const double period_ns = 1e9 / source.rate_hz;
        for (std::int64_t k = 0;; ++k) {
            const Nanos t = source.phase + Nanos(std::llround(double(k) * period_ns));
            if (t >= horizon)
                break;
            times.push_back(t);
        }
        return times;
    }

    std::exponential_distribution<double> gap(source.rate_hz);
    const double end = to_seconds(horizon);
    double t = to_seconds(source.phase);
    for (;;) {
        t += gap(rng);
        if (t >= end)
            break;
        const Nanos q = from_seconds(t);
        if (q >= horizon)
            break;
        times.push_back(q);
    }
    return times;
}

} // namespace urvc::traffic
