#pragma once

#include <CLI11.hpp>

namespace hearth::cli {

/// Config-file reader for --config: JSON objects when the file starts with '{',
/// TOML otherwise. Nested JSON objects map to subcommand sections.
class JsonOrTomlConfig : public CLI::ConfigBase {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace hearth::cli
