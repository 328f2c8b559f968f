#pragma once

#include <string>

#include "rbv/hgb.hpp"

namespace rbv {

// JSON document with bin edges, tree arrays, config and base score. Doubles
// are emitted with shortest round-trip formatting, so save -> load is exact.
std::string ensemble_to_json(const BoostedEnsemble& model);
BoostedEnsemble ensemble_from_json(const std::string& json_text);

void save_ensemble(const BoostedEnsemble& model, const std::string& path);
BoostedEnsemble load_ensemble(const std::string& path);

}  // namespace rbv
