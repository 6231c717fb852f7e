#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "slamot/simulator.hpp"

namespace slamot {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario files are JSON lines: a header object (config echo, seed,
// landmarks, agent table) followed by one object per frame. Poses are
// {"t": [x, y, z], "q": [x, y, z, w]}; units are meters, radians, seconds.

void write_scenario(std::ostream& os, const Scenario& s);
Scenario read_scenario(std::istream& is);

void save_scenario(const std::filesystem::path& path, const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

std::string scenario_to_string(const Scenario& s);

}  // namespace slamot
