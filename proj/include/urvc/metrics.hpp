#pragma once

#include "urvc/time.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace urvc::metrics {

/// One message as seen by one receiver. A missing delivery time marks the
/// message as never delivered; its latency is infinite and sorts above every
/// finite latency.
struct LatencyRecord {
    std::uint64_t message_id = 0;
    Nanos request_time{0};
    std::optional<Nanos> delivery_time;

    bool delivered() const { return delivery_time.has_value(); }
    /// Latency, or kNanosInfinity when undelivered.
    Nanos latency() const { return delivery_time ? *delivery_time - request_time : kNanosInfinity; }
};

/// Empirical latency CDF with the undelivered mass kept as a censored count,
/// so the asymptote is finite_count / total_count exactly.
class LatencyCdf {
public:
    LatencyCdf(std::vector<Nanos> finite_latencies, std::uint64_t total_count);

    /// Fraction of all messages with latency <= deadline (right-continuous).
    double operator()(Nanos deadline) const;
    std::uint64_t count_at_most(Nanos deadline) const;

    double asymptote() const { return double(sorted_.size()) / double(total_); }
    std::uint64_t total_count() const { return total_; }
    std::uint64_t finite_count() const { return sorted_.size(); }
    std::uint64_t undelivered_count() const { return total_ - sorted_.size(); }
    const std::vector<Nanos>& sorted_latencies() const { return sorted_; }

private:
    std::vector<Nanos> sorted_;
    std::uint64_t total_;
};

/// Throws std::invalid_argument("no samples") on empty input and
/// std::invalid_argument when a delivery precedes its request.
LatencyCdf empirical_cdf(std::span<const LatencyRecord> records);

/// CDF evaluated at the deadline. Throws on a non-positive deadline;
/// kNanosInfinity returns the asymptote.
double reliability(const LatencyCdf& cdf, Nanos deadline);

double message_error_probability(const LatencyCdf& cdf);

struct EpisodeOutcome {
    bool declared_available = false;
    std::optional<double> measured_reliability; // present iff declared_available
    double reliability_target = 0.0;
    std::uint64_t message_count = 0;
};

struct AvailabilityFailure {
    double availability = 0.0;
    // Conditional on availability; empty when no episode was available.
    std::optional<double> failure;
    std::uint64_t n_episodes = 0;
    std::uint64_t n_available = 0;
    std::uint64_t n_failed = 0;
    // Available episodes carrying fewer messages than the configured minimum.
    std::uint64_t n_underpopulated = 0;
};

inline constexpr std::uint64_t kDefaultMinEpisodeMessages = 100;

AvailabilityFailure availability_and_failure(std::span<const EpisodeOutcome> episodes,
                                             std::uint64_t min_messages = kDefaultMinEpisodeMessages);

/// The headline figures of a run.
struct MetricsSummary {
    double reliability = 0.0;
    double message_error_probability = 0.0;
    double availability = 0.0;
    std::optional<double> failure;
    Nanos deadline{0};
    std::uint64_t n_messages = 0;
    std::uint64_t n_episodes = 0;
};

MetricsSummary summarize(const LatencyCdf& cdf, Nanos deadline, const AvailabilityFailure& af);

nlohmann::ordered_json to_json(const MetricsSummary& s);

/// Two-column CSV (latency_s, cdf), one row per distinct finite latency.
void write_cdf_csv(std::ostream& os, const LatencyCdf& cdf);

} // namespace urvc::metrics
