#pragma once

#include "radml/search.hpp"

#include <string>

namespace radml::model_io {

/// Versioned binary container (magic + CBOR payload) holding every member's
/// config and fitted parameters. A round-trip reproduces predictions exactly.
void save_model(const search::EnsembleModel& model, const std::string& path);
search::EnsembleModel load_model(const std::string& path);

} // namespace radml::model_io
