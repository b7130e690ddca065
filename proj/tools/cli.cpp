#include "cli.hpp"

#include "urvc/channel.hpp"
#include "urvc/config.hpp"
#include "urvc/rrm.hpp"
#include "urvc/sim_engine.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace urvc::cli {

namespace fs = std::filesystem;

namespace {

enum class Format { Json, Csv };

struct Options {
    std::string config;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
    Format format = Format::Json;
    std::string axis;
    std::vector<double> values;
};

/// Input rejected before or while building the scenario.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

sim::ScenarioConfig load_config(const Options& o)
{
    auto c = config::load(o.config);
    if (o.seed)
        c.seed = *o.seed;
    return c;
}

std::string opt_field(const std::optional<double>& v)
{
    if (!v)
        return "";
    std::ostringstream ss;
    ss << std::setprecision(17) << *v;
    return ss.str();
}

const char* kSummaryHeader = "name,seed,reliability,message_error_probability,availability,failure,"
                             "reliability_when_available,plr,mean_sic_iterations,generated,delivered,late,"
                             "undelivered,meets_reliability_target";

void summary_row(std::ostream& os, const sim::MetricsReport& r, const std::string& prefix = "")
{
    const auto& m = r.aggregate;
    os << std::setprecision(17) << prefix << r.name << ',' << r.seed << ',' << m.reliability << ','
       << m.message_error_probability << ',' << m.availability << ',' << opt_field(m.failure) << ','
       << opt_field(r.reliability_when_available) << ',' << r.mac.losses.mean() << ',' << r.mac.mean_sic_iterations
       << ',' << r.counters.generated << ',' << r.counters.delivered << ',' << r.counters.late << ','
       << r.counters.undelivered << ',' << (r.meets_target() ? "true" : "false") << '\n';
}

class Sink {
public:
    Sink(const Options& o, std::ostream& out) : out_(out)
    {
        if (o.out_dir) {
            dir_ = fs::path(*o.out_dir);
            fs::create_directories(*dir_);
        }
    }

    bool to_dir() const { return dir_.has_value(); }

    /// Writes a file under --out; without --out, primary documents go to stdout
    /// and secondary ones are dropped.
    template <class F>
    void emit(const std::string& name, bool primary, F&& write)
    {
        if (!dir_) {
            if (primary)
                write(out_);
            return;
        }
        const auto path = *dir_ / name;
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write " + path.string());
        write(f);
        if (!f)
            throw std::runtime_error("write failed: " + path.string());
        spdlog::info("wrote {}", path.string());
    }

private:
    std::ostream& out_;
    std::optional<fs::path> dir_;
};

int cmd_validate(const Options& o, std::ostream& out)
{
    const auto c = load_config(o);
    out << "OK " << c.name << '\n';
    for (const auto& w : c.warnings())
        out << "warning: " << w << '\n';
    return kOk;
}

int cmd_run(const Options& o, std::ostream& out)
{
    const auto c = load_config(o);
    const auto r = sim::run_scenario(c, o.jobs);
    Sink sink(o, out);
    const bool json = o.format == Format::Json;
    sink.emit(c.name + "_report.json", json, [&](std::ostream& os) { os << sim::to_json(r).dump(2) << '\n'; });
    sink.emit(c.name + "_summary.csv", !json, [&](std::ostream& os) {
        os << kSummaryHeader << '\n';
        summary_row(os, r);
    });
    sink.emit(c.name + "_cdf.csv", false, [&](std::ostream& os) { metrics::write_cdf_csv(os, r.cdf()); });
    if (!r.frame_traces.empty())
        sink.emit(c.name + "_frames.json", false, [&](std::ostream& os) { os << r.frame_traces.dump(2) << '\n'; });
    if (!r.negotiation_trace.empty())
        sink.emit(c.name + "_rsc_trace.jsonl", false, [&](std::ostream& os) {
            for (const auto& rec : r.negotiation_trace)
                os << rec.dump() << '\n';
        });
    return kOk;
}

int cmd_sweep(const Options& o, std::ostream& out)
{
    const auto axes = sim::sweep_axes();
    if (std::find(axes.begin(), axes.end(), o.axis) == axes.end())
        throw UsageError("unknown sweep axis '" + o.axis + "'");
    if (o.values.empty())
        throw UsageError("--values needs at least one value");
    const auto c = load_config(o);
    std::vector<sim::ScenarioConfig> probe(1, c);
    for (double v : o.values) {
        try {
            sim::apply_axis(probe.front(), o.axis, v);
            probe.front().validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(o.axis + "=" + opt_field(v) + ": " + e.what());
        }
        probe.front() = c;
    }
    const auto reports = sim::sweep(c, o.axis, o.values, o.jobs);
    Sink sink(o, out);
    const bool json = o.format == Format::Json;
    sink.emit(c.name + "_sweep_" + o.axis + ".json", json, [&](std::ostream& os) {
        auto arr = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < reports.size(); ++i)
            arr.push_back({{"axis", o.axis}, {"value", o.values[i]}, {"report", sim::to_json(reports[i])}});
        os << arr.dump(2) << '\n';
    });
    sink.emit(c.name + "_sweep_" + o.axis + ".csv", !json, [&](std::ostream& os) {
        os << o.axis << ',' << kSummaryHeader << '\n';
        for (std::size_t i = 0; i < reports.size(); ++i)
            summary_row(os, reports[i], opt_field(o.values[i]) + ",");
    });
    return kOk;
}

int cmd_tradeoff(const Options& o, std::ostream& out)
{
    const auto c = load_config(o);
    if (c.tradeoff_thresholds.empty())
        throw UsageError("tradeoff needs tradeoff.thresholds in the config");
    Rng rng = make_stream(c.seed, {6});
    const auto curve = channel::tradeoff_curve(c.channel.fading, c.channel.link, c.tradeoff_thresholds,
                                               c.tradeoff_draws, rng);
    Sink sink(o, out);
    const bool json = o.format == Format::Json;
    sink.emit(c.name + "_tradeoff.csv", !json, [&](std::ostream& os) { channel::write_tradeoff_csv(os, curve); });
    sink.emit(c.name + "_tradeoff.json", json, [&](std::ostream& os) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& p : curve) {
            auto opt = [](const std::optional<double>& v) {
                return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
            };
            arr.push_back({{"threshold", p.threshold},
                           {"availability", p.availability},
                           {"availability_stderr", p.availability_stderr},
                           {"conditional_reliability", opt(p.conditional_reliability)},
                           {"conditional_reliability_stderr", p.conditional_reliability_stderr},
                           {"closed_form_availability", p.closed_form_availability},
                           {"closed_form_conditional_reliability", opt(p.closed_form_conditional_reliability)}});
        }
        os << nlohmann::ordered_json{{"schema_version", 1},
                                     {"name", c.name},
                                     {"seed", c.seed},
                                     {"draws", c.tradeoff_draws},
                                     {"points", arr}}
                  .dump(2)
           << '\n';
    });
    return kOk;
}

int cmd_rrm(const Options& o, std::ostream& out)
{
    const auto c = load_config(o);
    if (!c.rrm)
        throw UsageError("rrm-availability needs an rrm section in the config");
    std::vector<double> gammas = c.rrm_gamma_db_sweep;
    if (gammas.empty())
        gammas.push_back(10.0 * std::log10(c.rrm->gamma));
    std::vector<rrm::AvailabilityPoint> points(gammas.size());
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        auto s = *c.rrm;
        s.gamma = rrm::db_to_linear(gammas[i]);
        // Common random numbers: every point sees the same drops.
        Rng rng = make_stream(c.seed, {5});
        points[i] = {gammas[i], rrm::availability_estimate(s, c.rrm_drops, rng)};
    }
    Sink sink(o, out);
    const bool json = o.format == Format::Json;
    sink.emit(c.name + "_rrm_availability.csv", !json,
              [&](std::ostream& os) { rrm::write_availability_csv(os, points); });
    sink.emit(c.name + "_rrm_availability.json", json, [&](std::ostream& os) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& p : points)
            arr.push_back({{"gamma_db", p.gamma_db},
                           {"availability", p.estimate.availability()},
                           {"stderr", p.estimate.standard_error()},
                           {"mean_xmbb_rate", p.estimate.mean_xmbb_rate}});
        os << nlohmann::ordered_json{
                  {"schema_version", 1}, {"name", c.name}, {"seed", c.seed}, {"drops", c.rrm_drops}, {"points", arr}}
                  .dump(2)
           << '\n';
    });
    return kOk;
}

} // namespace

void configure_logging()
{
    auto logger = std::make_shared<spdlog::logger>("urvc", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* lvl = std::getenv("URVC_SIM_LOG"); lvl && *lvl)
        spdlog::set_level(spdlog::level::from_str(lvl));
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Monte Carlo simulator for ultra-reliable V2X broadcast", "urvc-sim"};
    app.require_subcommand(1);
    Options o;
    std::string format = "json";
    std::optional<std::string> out_dir;
    std::uint64_t seed = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("config", o.config, "Scenario file (YAML)")->required();
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--seed", seed, "Override the config seed");
        sub->add_option("--jobs", o.jobs, "Parallel replications or sweep points")->check(CLI::PositiveNumber);
        sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    };
    auto* run = app.add_subcommand("run", "Run one scenario");
    auto* sweep = app.add_subcommand("sweep", "Run a scenario over values of one numeric field");
    auto* tradeoff = app.add_subcommand("tradeoff", "Availability and conditional reliability over SNR thresholds");
    auto* rrm = app.add_subcommand("rrm-availability", "Power-control feasibility over SINR targets");
    auto* validate = app.add_subcommand("validate", "Check a scenario file without simulating");
    for (auto* s : {run, sweep, tradeoff, rrm, validate})
        common(s);
    sweep->add_option("--axis", o.axis, "Config field")->required();
    sweep->add_option("--values", o.values, "Comma-separated values")->required()->delimiter(',');

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
    o.out_dir = out_dir;
    o.format = format == "csv" ? Format::Csv : Format::Json;
    for (auto* s : {run, sweep, tradeoff, rrm, validate})
        if (s->count("--seed"))
            o.seed = seed;

    try {
        if (*run)
            return cmd_run(o, out);
        if (*sweep)
            return cmd_sweep(o, out);
        if (*tradeoff)
            return cmd_tradeoff(o, out);
        if (*rrm)
            return cmd_rrm(o, out);
        return cmd_validate(o, out);
    } catch (const config::ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const UsageError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

} // namespace urvc::cli
