#include "urvc/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

namespace urvc::config {

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line), message_(message)
{
}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line + 1; }

/// Map reader that rejects unknown keys and reports marks.
class Section {
public:
    Section(const YAML::Node& node, std::string path, const std::string& source)
        : node_(node), path_(std::move(path)), source_(source)
    {
        if (!node_.IsMap())
            fail(node_, path_ + " must be a mapping");
    }

    [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const
    {
        throw ConfigError(source_, line_of(at), msg);
    }
    [[noreturn]] void fail(const std::string& msg) const { fail(node_, msg); }

    void allow(std::initializer_list<std::string_view> keys) const
    {
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            bool known = false;
            for (auto k : keys)
                known = known || k == key;
            if (!known)
                fail(kv.first, "unknown key '" + qualified(key) + "'");
        }
    }

    bool has(const std::string& key) const { return bool(node_[key]); }
    YAML::Node at(const std::string& key) const { return node_[key]; }
    Section section(const std::string& key) const { return Section(node_[key], qualified(key), source_); }
    std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    const std::string& source() const { return source_; }
    const YAML::Node& node() const { return node_; }

    template <class T>
    T get(const std::string& key, T fallback) const
    {
        const YAML::Node n = node_[key];
        if (!n)
            return fallback;
        return convert<T>(n, qualified(key));
    }

    template <class T>
    T convert(const YAML::Node& n, const std::string& name) const
    {
        if (!n.IsScalar())
            fail(n, name + " must be a scalar");
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, name + ": cannot read '" + n.Scalar() + "' as " + type_name<T>());
        }
    }

    double positive(const std::string& key, double fallback) const
    {
        const double v = get(key, fallback);
        if (!(v > 0.0) || !std::isfinite(v))
            fail(has(key) ? at(key) : node_, qualified(key) + " must be positive");
        return v;
    }
    double non_negative(const std::string& key, double fallback) const
    {
        const double v = get(key, fallback);
        if (!(v >= 0.0) || !std::isfinite(v))
            fail(has(key) ? at(key) : node_, qualified(key) + " must be non-negative");
        return v;
    }
    std::size_t count(const std::string& key, std::size_t fallback, std::size_t min = 1) const
    {
        const auto v = get<long long>(key, (long long)fallback);
        if (v < (long long)min)
            fail(has(key) ? at(key) : node_, qualified(key) + " must be >= " + std::to_string(min));
        return std::size_t(v);
    }
    double probability(const std::string& key, double fallback) const
    {
        const double v = get(key, fallback);
        if (!(v >= 0.0 && v <= 1.0))
            fail(has(key) ? at(key) : node_, qualified(key) + " must lie in [0, 1]");
        return v;
    }

    template <class E>
    E choice(const std::string& key, E fallback, std::initializer_list<std::pair<std::string_view, E>> options) const
    {
        if (!has(key))
            return fallback;
        const auto s = get<std::string>(key, "");
        std::string names;
        for (const auto& [name, value] : options) {
            if (name == s)
                return value;
            names += (names.empty() ? "" : ", ") + std::string(name);
        }
        fail(at(key), qualified(key) + ": '" + s + "' is not one of " + names);
    }

    std::vector<double> numbers(const std::string& key) const
    {
        const YAML::Node n = node_[key];
        if (!n)
            return {};
        if (!n.IsSequence())
            fail(n, qualified(key) + " must be a list");
        std::vector<double> out;
        for (const auto& e : n)
            out.push_back(convert<double>(e, qualified(key)));
        return out;
    }

private:
    template <class T>
    static const char* type_name()
    {
        if constexpr (std::is_same_v<T, bool>)
            return "a boolean";
        else if constexpr (std::is_integral_v<T>)
            return "an integer";
        else if constexpr (std::is_floating_point_v<T>)
            return "a number";
        else
            return "a string";
    }

    YAML::Node node_;
    std::string path_;
    const std::string& source_;
};

csa::DegreeDistribution read_degrees(const Section& mac)
{
    if (!mac.has("degrees"))
        return csa::DegreeDistribution::irregular_default();
    const YAML::Node n = mac.at("degrees");
    if (n.IsScalar()) {
        const auto name = n.Scalar();
        if (name == "irregular_default")
            return csa::DegreeDistribution::irregular_default();
        if (name == "two_or_three")
            return csa::DegreeDistribution::two_or_three();
        if (name == "single")
            return csa::DegreeDistribution::single();
        mac.fail(n, "mac.degrees: unknown preset '" + name + "'");
    }
    if (!n.IsMap())
        mac.fail(n, "mac.degrees must be a preset name or a degree: probability mapping");
    std::vector<std::pair<int, double>> entries;
    for (const auto& kv : n)
        entries.emplace_back(mac.convert<int>(kv.first, "mac.degrees key"),
                             mac.convert<double>(kv.second, "mac.degrees value"));
    try {
        return csa::DegreeDistribution(std::move(entries));
    } catch (const std::invalid_argument& e) {
        mac.fail(n, std::string("mac.degrees: ") + e.what());
    }
}

void read_mac(const Section& s, sim::ScenarioConfig& c)
{
    s.allow({"kind", "n_nodes", "n_slots", "frame_duration_ms", "degrees", "receivers", "half_duplex",
             "always_transmit", "retry_within_deadline", "queue"});
    c.mac = s.choice("kind", c.mac,
                     {{"csa", sim::MacKind::Csa},
                      {"slotted_aloha", sim::MacKind::SlottedAloha},
                      {"reservation_tdma", sim::MacKind::ReservationTdma}});
    c.n_nodes = s.count("n_nodes", c.n_nodes);
    c.n_slots = s.count("n_slots", c.n_slots);
    c.frame_duration = from_millis(s.positive("frame_duration_ms", to_seconds(c.frame_duration) * 1e3));
    c.degrees = read_degrees(s);
    c.receivers = s.choice("receivers", c.receivers,
                           {{"observer", sim::ReceiverMode::Observer}, {"all_nodes", sim::ReceiverMode::AllNodes}});
    c.half_duplex = s.get("half_duplex", c.half_duplex);
    c.always_transmit = s.get("always_transmit", c.always_transmit);
    c.retry_within_deadline = s.get("retry_within_deadline", c.retry_within_deadline);
    c.queue = s.choice("queue", c.queue, {{"supersede", sim::QueuePolicy::Supersede}, {"queue", sim::QueuePolicy::Queue}});
}

void read_traffic(const Section& s, sim::ScenarioConfig& c)
{
    s.allow({"random_phase", "sources"});
    c.random_phase = s.get("random_phase", c.random_phase);
    if (!s.has("sources"))
        return;
    const YAML::Node list = s.at("sources");
    if (!list.IsSequence() || list.size() == 0)
        s.fail(list, "traffic.sources must be a non-empty list");
    c.traffic.clear();
    for (const auto& item : list) {
        const Section src(item, "traffic.sources[]", s.source());
        src.allow({"kind", "rate_hz", "phase_ms"});
        traffic::TrafficSource t;
        t.kind = src.choice("kind", t.kind,
                            {{"periodic", traffic::SourceKind::Periodic}, {"event", traffic::SourceKind::Event}});
        t.rate_hz = src.positive("rate_hz", t.rate_hz);
        t.phase = from_millis(src.non_negative("phase_ms", 0.0));
        try {
            t.validate();
        } catch (const std::invalid_argument& e) {
            src.fail(e.what());
        }
        c.traffic.push_back(t);
    }
}

void read_message(const Section& s, sim::ScenarioConfig& c)
{
    s.allow({"payload_bytes", "deadline_ms", "reliability_target"});
    c.message.payload_bytes = std::int64_t(s.count("payload_bytes", std::size_t(c.message.payload_bytes)));
    c.message.deadline = from_millis(s.positive("deadline_ms", to_seconds(c.message.deadline) * 1e3));
    c.message.reliability_target = s.get("reliability_target", c.message.reliability_target);
    if (!(c.message.reliability_target > 0.0 && c.message.reliability_target < 1.0))
        s.fail(s.has("reliability_target") ? s.at("reliability_target") : s.node(),
               "message.reliability_target must lie in (0, 1)");
}

void read_episodes(const Section& s, sim::ScenarioConfig& c)
{
    s.allow({"length_frames", "horizon_s", "min_messages"});
    c.episode_length_frames = s.count("length_frames", c.episode_length_frames);
    c.horizon = from_seconds(s.positive("horizon_s", to_seconds(c.horizon)));
    c.min_episode_messages = s.count("min_messages", c.min_episode_messages, 0);
}

void read_channel(const Section& s, sim::ScenarioConfig& c)
{
    s.allow({"enabled", "fading", "mean_snr", "mean_snr_db", "spectral_rate", "gate_threshold", "block"});
    auto& ch = c.channel;
    ch.enabled = s.get("enabled", ch.enabled);
    ch.fading.kind = s.choice("fading", ch.fading.kind,
                              {{"rayleigh", channel::FadingKind::Rayleigh}, {"fixed", channel::FadingKind::Fixed}});
    if (s.has("mean_snr") && s.has("mean_snr_db"))
        s.fail(s.at("mean_snr_db"), "give channel.mean_snr or channel.mean_snr_db, not both");
    ch.fading.mean_snr = s.has("mean_snr_db") ? rrm::db_to_linear(s.get("mean_snr_db", 0.0))
                                              : s.positive("mean_snr", ch.fading.mean_snr);
    ch.link.spectral_rate = s.positive("spectral_rate", ch.link.spectral_rate);
    ch.gate_threshold = s.non_negative("gate_threshold", ch.gate_threshold);
    ch.block = s.choice("block", ch.block, {{"slot", sim::FadingBlock::Slot}, {"episode", sim::FadingBlock::Episode}});
}

void read_rrm(const Section& s, sim::ScenarioConfig& c)
{
    s.allow({"area_m", "n_pairs", "pair_distance_m", "with_xmbb", "basestation_m", "pathloss", "gamma_db", "noise_w",
             "p_max_w", "xmbb_p_max_w", "basestation_noise_w", "drops", "gamma_db_sweep"});
    rrm::RrmScenario r;
    auto pair = [&](const std::string& key, double& a, double& b) {
        if (!s.has(key))
            return;
        const auto v = s.numbers(key);
        if (v.size() != 2)
            s.fail(s.at(key), s.qualified(key) + " must be a two-element list");
        a = v[0];
        b = v[1];
    };
    pair("area_m", r.area.width, r.area.height);
    pair("pair_distance_m", r.pair_min_distance_m, r.pair_max_distance_m);
    pair("basestation_m", r.basestation.x, r.basestation.y);
    r.n_pairs = s.count("n_pairs", r.n_pairs);
    r.with_xmbb = s.get("with_xmbb", r.with_xmbb);
    if (s.has("pathloss")) {
        const auto p = s.section("pathloss");
        p.allow({"exponent", "ref_gain_db", "shadowing_db", "min_distance_m"});
        r.pathloss.exponent = p.positive("exponent", r.pathloss.exponent);
        r.pathloss.ref_gain_db = p.get("ref_gain_db", r.pathloss.ref_gain_db);
        r.pathloss.shadowing_db = p.non_negative("shadowing_db", r.pathloss.shadowing_db);
        r.pathloss.min_distance_m = p.positive("min_distance_m", r.pathloss.min_distance_m);
    }
    if (s.has("gamma_db"))
        r.gamma = rrm::db_to_linear(s.get("gamma_db", 0.0));
    r.noise = s.positive("noise_w", r.noise);
    r.p_max = s.positive("p_max_w", r.p_max);
    r.xmbb_p_max = s.positive("xmbb_p_max_w", r.xmbb_p_max);
    r.basestation_noise = s.positive("basestation_noise_w", r.basestation_noise);
    try {
        r.validate();
    } catch (const std::invalid_argument& e) {
        s.fail(std::string("rrm: ") + e.what());
    }
    c.rrm = r;
    c.rrm_drops = s.count("drops", c.rrm_drops);
    c.rrm_gamma_db_sweep = s.numbers("gamma_db_sweep");
}

rsc::ServiceTier read_tier(const Section& t, double& snr_threshold)
{
    t.allow({"name", "availability_target", "payload_bytes", "deadline_ms", "delivery_reliability", "certification",
             "whitelist", "snr_threshold"});
    rsc::ServiceTier tier;
    tier.name = t.get<std::string>("name", "");
    if (tier.name.empty())
        t.fail("tier needs a name");
    tier.availability_target = t.get("availability_target", tier.availability_target);
    if (t.has("payload_bytes"))
        tier.payload_bytes = t.get<std::int64_t>("payload_bytes", 0);
    if (t.has("deadline_ms"))
        tier.deadline_s = t.get("deadline_ms", 0.0) * 1e-3;
    if (t.has("delivery_reliability"))
        tier.delivery_reliability = t.get("delivery_reliability", 0.0);
    tier.certification = t.choice("certification", tier.certification,
                                  {{"none", rsc::Certification::None},
                                   {"limited", rsc::Certification::Limited},
                                   {"full", rsc::Certification::Full}});
    if (t.has("whitelist")) {
        const YAML::Node w = t.at("whitelist");
        if (!w.IsSequence())
            t.fail(w, t.qualified("whitelist") + " must be a list");
        for (const auto& e : w)
            tier.message_whitelist.push_back(t.convert<std::string>(e, t.qualified("whitelist")));
    }
    snr_threshold = t.non_negative("snr_threshold", 0.0);
    return tier;
}

void read_rsc(const Section& s, sim::ScenarioConfig& c)
{
    s.allow({"policy", "tiers", "example"});
    sim::RscConfig r;
    r.policy = s.choice("policy", r.policy,
                        {{"lowest_sufficient", rsc::GrantPolicy::LowestSufficient},
                         {"highest_supported", rsc::GrantPolicy::HighestSupported}});
    if (s.has("example") && s.has("tiers"))
        s.fail(s.at("example"), "give rsc.example or rsc.tiers, not both");
    if (s.has("tiers")) {
        const YAML::Node list = s.at("tiers");
        if (!list.IsSequence() || list.size() == 0)
            s.fail(list, "rsc.tiers must be a non-empty list");
        for (const auto& item : list) {
            double th = 0.0;
            r.tiers.push_back(read_tier(Section(item, "rsc.tiers[]", s.source()), th));
            r.tier_snr_thresholds.push_back(th);
        }
    } else {
        const auto ex = s.section("example");
        ex.allow({"snr_thresholds"});
        r.tiers = rsc::three_tier_example();
        r.tier_snr_thresholds = ex.numbers("snr_thresholds");
    }
    const auto v = rsc::validate_composition(r.tiers);
    if (!v.empty()) {
        const YAML::Node at = s.has("tiers") ? YAML::Node(s.at("tiers")[v.front().tier]) : s.node();
        s.fail(at, "rsc tier " + std::to_string(v.front().tier) + ": " + v.front().message);
    }
    if (r.tier_snr_thresholds.size() != r.tiers.size())
        s.fail("rsc needs one snr threshold per tier");
    c.rsc = std::move(r);
}

sim::ScenarioConfig read_root(const YAML::Node& root, const std::string& source)
{
    if (!root || root.IsNull())
        throw ConfigError(source, 1, "empty document");
    const Section s(root, "", source);
    s.allow({"schema_version", "name", "seed", "replications", "mac", "traffic", "message", "episodes", "channel",
             "availability", "rrm", "rsc", "jitter", "trace", "tradeoff"});
    if (!s.has("schema_version"))
        s.fail("missing schema_version");
    if (const int v = s.get("schema_version", 0); v != kSchemaVersion)
        s.fail(s.at("schema_version"),
               "unsupported schema_version " + std::to_string(v) + " (expected " + std::to_string(kSchemaVersion) + ")");

    sim::ScenarioConfig c;
    c.name = s.get<std::string>("name", c.name);
    c.seed = s.get<std::uint64_t>("seed", c.seed);
    c.replications = s.count("replications", c.replications);
    if (s.has("mac"))
        read_mac(s.section("mac"), c);
    if (s.has("traffic"))
        read_traffic(s.section("traffic"), c);
    if (s.has("message"))
        read_message(s.section("message"), c);
    if (s.has("episodes"))
        read_episodes(s.section("episodes"), c);
    if (s.has("channel"))
        read_channel(s.section("channel"), c);
    if (s.has("rrm"))
        read_rrm(s.section("rrm"), c);
    if (s.has("rsc"))
        read_rsc(s.section("rsc"), c);
    c.availability = s.choice("availability", c.availability,
                              {{"none", sim::AvailabilitySource::None},
                               {"snr_gate", sim::AvailabilitySource::SnrGate},
                               {"rrm_feasibility", sim::AvailabilitySource::RrmFeasibility},
                               {"rsc_indicator", sim::AvailabilitySource::RscIndicator}});
    if (s.has("jitter")) {
        const auto j = s.section("jitter");
        j.allow({"policy", "deliver_late"});
        c.jitter_policy = j.choice("policy", c.jitter_policy,
                                   {{"constant_latency", jitter::ReleasePolicy::ConstantLatency},
                                    {"immediate", jitter::ReleasePolicy::Immediate}});
        c.jitter_deliver_late = j.get("deliver_late", c.jitter_deliver_late);
    }
    if (s.has("trace")) {
        const auto t = s.section("trace");
        t.allow({"frames"});
        c.trace_frames = t.count("frames", c.trace_frames, 0);
    }
    if (s.has("tradeoff")) {
        const auto t = s.section("tradeoff");
        t.allow({"thresholds", "draws"});
        c.tradeoff_thresholds = t.numbers("thresholds");
        c.tradeoff_draws = t.count("draws", c.tradeoff_draws);
    }

    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        s.fail(e.what());
    }
    return c;
}

} // namespace

sim::ScenarioConfig parse(const std::string& text, const std::string& source)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source, e.mark.line + 1, e.msg);
    }
    return read_root(root, source);
}

sim::ScenarioConfig load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(path.string(), 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

} // namespace urvc::config
