#pragma once

#include <string>

#include "fragsel/core.hpp"

namespace fragsel {

// Flat "key = value" config format; '#' starts a comment. Unknown keys are
// rejected so a typo'd hyperparameter never passes silently.
Config parse_config_text(const std::string& text);
Config load_config_file(const std::string& path);

}  // namespace fragsel
