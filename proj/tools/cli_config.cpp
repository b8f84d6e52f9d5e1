#include "cli_config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace dlab_cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string option_name(const std::string& arg) {
  if (arg.rfind("--", 0) != 0) return "";
  const auto eq = arg.find('=');
  return arg.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    if (std::any_of(out.begin(), out.end(), [&](const auto& kv) { return kv.first == key; }))
      throw ConfigError("config line " + std::to_string(line_no) + ": repeated key '" + key + "'");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file name");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();

  std::set<std::string> given;
  for (const auto& a : args) {
    const std::string name = option_name(a);
    if (!name.empty()) given.insert(name);
  }
  const bool has_command = !args.empty() && args.front().rfind("-", 0) != 0;
  for (const auto& [key, value] : parse_config_text(buf.str())) {
    if (key == "command") {
      if (!has_command) args.insert(args.begin(), value);
      continue;
    }
    if (given.count(key)) continue;
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

}  // namespace dlab_cli
