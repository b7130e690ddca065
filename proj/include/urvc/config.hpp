#pragma once

#include "urvc/sim_engine.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace urvc::config {

inline constexpr int kSchemaVersion = 1;

/// Unusable configuration. what() reads "<source>:<line>: <message>".
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& message);

    int line() const { return line_; }
    const std::string& message() const { return message_; }

private:
    int line_;
    std::string message_;
};

/// Parses a YAML scenario document. source names the document in errors.
sim::ScenarioConfig parse(const std::string& text, const std::string& source = "<string>");

/// Reads and parses a scenario file. A missing file is a ConfigError at line 0.
sim::ScenarioConfig load(const std::filesystem::path& path);

} // namespace urvc::config
