#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace urvc::rsc {

enum class Certification { None, Limited, Full };

/// One version of a composed service. Tiers are listed from the most basic
/// (most available) to the full version.
struct ServiceTier {
    std::string name;
    double availability_target = 1.0;
    std::optional<std::int64_t> payload_bytes;    // empty: restricted message set only
    std::optional<double> deadline_s;
    std::optional<double> delivery_reliability;
    Certification certification = Certification::None;
    std::vector<std::string> message_whitelist;   // for tiers without a payload guarantee
};

/// Highest tier index the lower layer can currently deliver.
struct AvailabilityIndicator {
    std::optional<std::size_t> supported;
};

enum class ViolationKind {
    Empty,
    AvailabilityOutOfRange,
    AvailabilityNotDecreasing,
    PayloadNotIncreasing,
    DeadlineNotDecreasing,
    InvalidValue,
};

struct Violation {
    std::size_t tier = 0;
    ViolationKind kind = ViolationKind::Empty;
    std::string message;
};

/// Empty result means the composition is valid.
std::vector<Violation> validate_composition(std::span<const ServiceTier> tiers);

/// Highest supported tier index, or empty when nothing is supported. Throws
/// std::out_of_range when the indicator names a tier outside the composition.
std::optional<std::size_t> select_tier(const AvailabilityIndicator& indicator, std::span<const ServiceTier> tiers);

struct Request {
    std::int64_t payload_bytes = 0;
    double deadline_s = 0.0;
    double reliability = 0.0;
};

enum class GrantPolicy { LowestSufficient, HighestSupported };

enum class OutcomeKind { Grant, DowngradeOffer, Deny };

struct Outcome {
    OutcomeKind kind = OutcomeKind::Deny;
    std::optional<std::size_t> tier;
};

bool satisfies(const ServiceTier& tier, const Request& request);

/// GRANT a sufficient supported tier, otherwise offer the highest supported
/// tier, otherwise DENY (the application falls back). Throws
/// std::invalid_argument on a malformed request.
Outcome negotiate(const Request& request, const AvailabilityIndicator& indicator, std::span<const ServiceTier> tiers,
                  GrantPolicy policy = GrantPolicy::LowestSufficient);

/// The three-version V2V example: basic 99.999 %, enhanced 99 % with
/// (payload_1, deadline_1, 99.9 %), full 97 % with a larger payload and a
/// shorter deadline at 99.9 %.
std::vector<ServiceTier> three_tier_example(std::int64_t payload_1 = 300, double deadline_1_s = 0.1,
                                            std::int64_t payload_2 = 1600, double deadline_2_s = 0.005);

const char* to_string(OutcomeKind k);
const char* to_string(ViolationKind k);
const char* to_string(Certification c);

/// One JSON-lines record: {time, request, indicator, outcome}.
nlohmann::ordered_json trace_record(double time_s, const Request& request, const AvailabilityIndicator& indicator,
                                    const Outcome& outcome, std::span<const ServiceTier> tiers);

} // namespace urvc::rsc
