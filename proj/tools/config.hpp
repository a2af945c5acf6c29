#pragma once

// JSON <-> parameter-set mapping for the command-line tool. Unknown keys are
// rejected so typos surface as usage errors instead of silent defaults.

#include <filesystem>
#include <json.hpp>
#include <stdexcept>
#include <string>

#include "powsec/mdp.hpp"
#include "powsec/simulator.hpp"

namespace powsec::cli {

using nlohmann::json;

/// Bad flags, presets or config files; the tool exits with status 2.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

json load_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

/// Rejects keys of `j` outside `allowed`.
void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where);

json to_json(const sim::SimConfig& c);
/// Overlays `j` onto `base`. Relative CSV paths resolve against `dir`.
sim::SimConfig sim_config_from_json(const json& j, sim::SimConfig base, const std::filesystem::path& dir);

json to_json(const mdp::MdpConfig& c);
mdp::MdpConfig mdp_config_from_json(const json& j, mdp::MdpConfig base);

/// Evenly spaced grid lo, lo + step, ..., hi (inclusive within 1e-9 * step).
std::vector<double> grid(double lo, double hi, double step);

/// MDP presets: motivating, equal, ratio-3-1, ratio-5-1, ratio-1-2.
mdp::MdpConfig mdp_preset(const std::string& name);

}  // namespace powsec::cli
