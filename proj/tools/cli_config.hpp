#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dlab_cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Removes "--config FILE" (or "--config=FILE") from args and merges the file's
// key = value lines as "--key=value". Keys already given on the command line
// win. A "command" key supplies the subcommand when none is given.
std::vector<std::string> expand_config(std::vector<std::string> args);

// Parses the flat key = value format; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

}  // namespace dlab_cli
