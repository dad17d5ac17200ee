#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rwasim/engine.hpp"

namespace rwasim {

// Experiment settings as read from a sectioned key=value config file.
//
//   # comment
//   [market]
//   n_buyers = 200
//   ...
//
// Sections: [market] population and economics, [run] execution and output,
// [sweep] sweep ranges, [ledger] chain parameters, [cpa] consortium auction,
// [attack] adversary model.  Unknown sections or keys are refused with a
// line-numbered message.  Command-line flags override file values.
struct RunSettings {
    ExperimentConfig experiment;
    std::vector<Scheme> schemes{Scheme::Rwa, Scheme::Mpra, Scheme::Tra, Scheme::Cpa};
    std::uint32_t seeds = 10;
    std::optional<std::uint64_t> seed_base;  // unset -> env or built-in default
    std::string out = "results.csv";

    // sweep ranges
    std::uint32_t buyers_from = 100;
    std::uint32_t buyers_to = 300;
    std::uint32_t buyers_step = 50;
    std::vector<double> ratios{0.0, 0.1, 0.2, 0.3};
};

// Parses config text; `source_name` labels error messages ("file.ini:12: ...").
// Throws SimError with ConfigInvalid / UnknownParameter on malformed input.
RunSettings parse_config(std::istream& in, const std::string& source_name);
RunSettings parse_config_text(const std::string& text, const std::string& source_name);

// Renders the fully resolved settings in config-file syntax (sidecar echo).
std::string render_config(const RunSettings& settings, std::uint64_t seed_base);

} // namespace rwasim
