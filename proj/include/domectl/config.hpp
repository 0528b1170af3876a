#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "domectl/density.hpp"
#include "domectl/dome.hpp"
#include "domectl/fuzzy.hpp"

// Unified configuration: engine vocabulary + rules, controller constants and
// density-kernel parameters, loaded from one structured text file (grammar in
// docs/config-format.md). Omitted sections fall back to the built-in defaults
// that reproduce the published control surface.

namespace domectl::config {

struct Config {
    fuzzy::InferenceEngine engine;
    dome::ControllerConfig controller;
    density::KernelParams density;
};

/// The default vocabulary: crowd {NoCrowd, Medium, Crowd} on [0,100] %,
/// weather {Rain, Outlook} on [0,50] °C, time {Stop, Short, Medium, Tall}
/// on [0,300] s with a 0.5 s grid, and the four-rule base.
fuzzy::InferenceEngine default_engine();

Config default_config();

/// Parse + validate; any violation raises ConfigError carrying
/// "<source_name>:<line>: ..." diagnostics.
Config load_config(std::istream& in, std::string_view source_name = "<config>");

/// Convenience wrapper; unreadable path raises ConfigError.
Config load_config_file(const std::string& path);

} // namespace domectl::config
