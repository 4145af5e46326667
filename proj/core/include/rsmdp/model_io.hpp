#pragma once

#include <filesystem>
#include <string>

#include "rsmdp/model.hpp"
#include "rsmdp/transform.hpp"

namespace rsmdp {

// JSON model schema (UTF-8): keys n_states (int), n_actions (int),
// transition ([s][a][s'] doubles), cost ([s][a] doubles), optional labels
// (strings). Probabilities are written with 17 significant digits, so a
// write/read round trip is bit-exact. Cost bounds are derived from the
// cost data on load.
std::string model_to_json(const MdpModel& model);
MdpModel model_from_json(const std::string& text);

void save_model(const MdpModel& model, const std::filesystem::path& path);
MdpModel load_model(const std::filesystem::path& path);

// Transformed models use the same schema plus alpha, kappa and
// source_digest keys.
std::string transformed_to_json(const TransformedMdp& tmdp);
TransformedMdp transformed_from_json(const std::string& text);

// "%.17g": enough digits that parsing the text recovers x exactly.
std::string format_double(double x);

}  // namespace rsmdp
