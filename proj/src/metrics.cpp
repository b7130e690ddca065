#include "urvc/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <stdexcept>

namespace urvc::metrics {

LatencyCdf::LatencyCdf(std::vector<Nanos> finite_latencies, std::uint64_t total_count)
    : sorted_(std::move(finite_latencies)), total_(total_count)
{
    if (total_ == 0)
        throw std::invalid_argument("no samples");
    if (sorted_.size() > total_)
        throw std::invalid_argument("finite latency count exceeds total count");
    std::sort(sorted_.begin(), sorted_.end());
}

std::uint64_t LatencyCdf::count_at_most(Nanos deadline) const
{
    return std::upper_bound(sorted_.begin(), sorted_.end(), deadline) - sorted_.begin();
}

double LatencyCdf::operator()(Nanos deadline) const
{
    return double(count_at_most(deadline)) / double(total_);
}

LatencyCdf empirical_cdf(std::span<const LatencyRecord> records)
{
    if (records.empty())
        throw std::invalid_argument("no samples");
    std::vector<Nanos> finite;
    finite.reserve(records.size());
    for (const auto& r : records) {
        if (!r.delivered())
            continue;
        if (*r.delivery_time < r.request_time)
            throw std::invalid_argument("delivery precedes request for message " + std::to_string(r.message_id));
        finite.push_back(*r.delivery_time - r.request_time);
    }
    return LatencyCdf(std::move(finite), records.size());
}

double reliability(const LatencyCdf& cdf, Nanos deadline)
{
    if (deadline <= Nanos::zero())
        throw std::invalid_argument("deadline must be positive");
    return cdf(deadline);
}

double message_error_probability(const LatencyCdf& cdf)
{
    return double(cdf.undelivered_count()) / double(cdf.total_count());
}

AvailabilityFailure availability_and_failure(std::span<const EpisodeOutcome> episodes, std::uint64_t min_messages)
{
    if (episodes.empty())
        throw std::invalid_argument("no episodes");
    AvailabilityFailure out;
    out.n_episodes = episodes.size();
    for (const auto& e : episodes) {
        if (e.declared_available != e.measured_reliability.has_value())
            throw std::invalid_argument("measured reliability must be present iff the episode is available");
        if (!e.declared_available)
            continue;
        ++out.n_available;
        if (*e.measured_reliability < e.reliability_target)
            ++out.n_failed;
        if (e.message_count < min_messages)
            ++out.n_underpopulated;
    }
    out.availability = double(out.n_available) / double(out.n_episodes);
    if (out.n_available > 0)
        out.failure = double(out.n_failed) / double(out.n_available);
    return out;
}

MetricsSummary summarize(const LatencyCdf& cdf, Nanos deadline, const AvailabilityFailure& af)
{
    MetricsSummary s;
    s.reliability = reliability(cdf, deadline);
    s.message_error_probability = message_error_probability(cdf);
    s.availability = af.availability;
    s.failure = af.failure;
    s.deadline = deadline;
    s.n_messages = cdf.total_count();
    s.n_episodes = af.n_episodes;
    return s;
}

nlohmann::ordered_json to_json(const MetricsSummary& s)
{
    nlohmann::ordered_json j;
    j["reliability"] = s.reliability;
    j["message_error_probability"] = s.message_error_probability;
    j["availability"] = s.availability;
    j["failure"] = s.failure ? nlohmann::ordered_json(*s.failure) : nlohmann::ordered_json(nullptr);
    j["deadline_s"] = to_seconds(s.deadline);
    j["n_messages"] = s.n_messages;
    j["n_episodes"] = s.n_episodes;
    return j;
}

void write_cdf_csv(std::ostream& os, const LatencyCdf& cdf)
{
    os << "latency_s,cdf\n";
    const auto& v = cdf.sorted_latencies();
    const auto flags = os.flags();
    os << std::setprecision(17);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i + 1 < v.size() && v[i + 1] == v[i])
            continue;
        os << to_seconds(v[i]) << ',' << double(i + 1) / double(cdf.total_count()) << '\n';
    }
    os.flags(flags);
}

} // namespace urvc::metrics
