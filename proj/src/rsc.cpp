#include "urvc/rsc.hpp"

#include <cmath>
#include <stdexcept>

namespace urvc::rsc {

namespace {

std::string tier_label(std::span<const ServiceTier> tiers, std::size_t i)
{
    return "tier " + std::to_string(i) + (tiers[i].name.empty() ? "" : " (" + tiers[i].name + ")");
}

} // namespace

std::vector<Violation> validate_composition(std::span<const ServiceTier> tiers)
{
    std::vector<Violation> out;
    if (tiers.empty()) {
        out.push_back({0, ViolationKind::Empty, "composition has no tiers"});
        return out;
    }
    std::optional<std::size_t> last_payload, last_deadline;
    for (std::size_t i = 0; i < tiers.size(); ++i) {
        const auto& t = tiers[i];
        if (!(t.availability_target > 0.0 && t.availability_target <= 1.0))
            out.push_back({i, ViolationKind::AvailabilityOutOfRange, tier_label(tiers, i) + ": availability target outside (0, 1]"});
        if (t.payload_bytes && *t.payload_bytes <= 0)
            out.push_back({i, ViolationKind::InvalidValue, tier_label(tiers, i) + ": payload must be positive"});
        if (t.deadline_s && !(*t.deadline_s > 0.0))
            out.push_back({i, ViolationKind::InvalidValue, tier_label(tiers, i) + ": deadline must be positive"});
        if (t.delivery_reliability && !(*t.delivery_reliability > 0.0 && *t.delivery_reliability <= 1.0))
            out.push_back({i, ViolationKind::InvalidValue, tier_label(tiers, i) + ": delivery reliability outside (0, 1]"});

        if (i > 0 && !(t.availability_target < tiers[i - 1].availability_target))
            out.push_back({i, ViolationKind::AvailabilityNotDecreasing,
                           tier_label(tiers, i) + ": availability not strictly decreasing"});
        if (t.payload_bytes) {
            if (last_payload && !(*t.payload_bytes > *tiers[*last_payload].payload_bytes))
                out.push_back({i, ViolationKind::PayloadNotIncreasing,
                               tier_label(tiers, i) + ": payload not strictly increasing"});
            last_payload = i;
        }
        if (t.deadline_s) {
            if (last_deadline && !(*t.deadline_s < *tiers[*last_deadline].deadline_s))
                out.push_back({i, ViolationKind::DeadlineNotDecreasing,
                               tier_label(tiers, i) + ": deadline not strictly decreasing"});
            last_deadline = i;
        }
    }
    return out;
}

std::optional<std::size_t> select_tier(const AvailabilityIndicator& indicator, std::span<const ServiceTier> tiers)
{
    if (!indicator.supported)
        return std::nullopt;
    if (*indicator.supported >= tiers.size())
        throw std::out_of_range("availability indicator names tier " + std::to_string(*indicator.supported) +
                                " outside a composition of " + std::to_string(tiers.size()));
    return indicator.supported;
}

bool satisfies(const ServiceTier& tier, const Request& request)
{
    return tier.payload_bytes && *tier.payload_bytes >= request.payload_bytes && tier.deadline_s &&
           *tier.deadline_s <= request.deadline_s && tier.delivery_reliability &&
           *tier.delivery_reliability >= request.reliability;
}

Outcome negotiate(const Request& request, const AvailabilityIndicator& indicator, std::span<const ServiceTier> tiers,
                  GrantPolicy policy)
{
    if (request.payload_bytes <= 0 || !(request.deadline_s > 0.0) ||
        !(request.reliability > 0.0 && request.reliability <= 1.0))
        throw std::invalid_argument("malformed service request");
    const auto top = select_tier(indicator, tiers);
    if (!top)
        return {OutcomeKind::Deny, std::nullopt};

    std::optional<std::size_t> lowest;
    for (std::size_t i = 0; i < tiers.size() && !lowest; ++i)
        if (satisfies(tiers[i], request))
            lowest = i;

    if (lowest && *lowest <= *top) {
        if (policy == GrantPolicy::HighestSupported && satisfies(tiers[*top], request))
            return {OutcomeKind::Grant, top};
        return {OutcomeKind::Grant, lowest};
    }
    return {OutcomeKind::DowngradeOffer, top};
}

std::vector<ServiceTier> three_tier_example(std::int64_t payload_1, double deadline_1_s, std::int64_t payload_2,
                                            double deadline_2_s)
{
    ServiceTier basic{"basic", 0.99999, std::nullopt, std::nullopt, std::nullopt, Certification::None,
                      {"emergency_brake_warning", "collision_warning", "hazard_warning"}};
    ServiceTier enhanced{"enhanced", 0.99, payload_1, deadline_1_s, 0.999, Certification::Limited, {}};
    ServiceTier full{"full", 0.97, payload_2, deadline_2_s, 0.999, Certification::Full, {}};
    return {basic, enhanced, full};
}

const char* to_string(OutcomeKind k)
{
    switch (k) {
    case OutcomeKind::Grant: return "GRANT";
    case OutcomeKind::DowngradeOffer: return "DOWNGRADE_OFFER";
    case OutcomeKind::Deny: return "DENY";
    }
    return "?";
}

const char* to_string(ViolationKind k)
{
    switch (k) {
    case ViolationKind::Empty: return "empty";
    case ViolationKind::AvailabilityOutOfRange: return "availability_out_of_range";
    case ViolationKind::AvailabilityNotDecreasing: return "availability_not_decreasing";
    case ViolationKind::PayloadNotIncreasing: return "payload_not_increasing";
    case ViolationKind::DeadlineNotDecreasing: return "deadline_not_decreasing";
    case ViolationKind::InvalidValue: return "invalid_value";
    }
    return "?";
}

const char* to_string(Certification c)
{
    switch (c) {
    case Certification::None: return "none";
    case Certification::Limited: return "limited";
    case Certification::Full: return "full";
    }
    return "?";
}

nlohmann::ordered_json trace_record(double time_s, const Request& request, const AvailabilityIndicator& indicator,
                                    const Outcome& outcome, std::span<const ServiceTier> tiers)
{
    auto tier_json = [&](std::optional<std::size_t> t) {
        return t ? nlohmann::ordered_json(tiers[*t].name) : nlohmann::ordered_json(nullptr);
    };
    nlohmann::ordered_json j;
    j["time"] = time_s;
    j["request"] = {{"payload_bytes", request.payload_bytes},
                    {"deadline_s", request.deadline_s},
                    {"reliability", request.reliability}};
    j["indicator"] = tier_json(indicator.supported);
    j["outcome"] = {{"kind", to_string(outcome.kind)}, {"tier", tier_json(outcome.tier)}};
    return j;
}

} // namespace urvc::rsc
