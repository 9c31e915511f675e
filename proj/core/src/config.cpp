#include "gddim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "gddim/error.hpp"

namespace gddim {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return value;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    cfg.values_[key] = trim(text.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  return parse(in, path.string());
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void KeyValueConfig::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : values_) {
    if (!allowed.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const auto v = get(key);
  return v ? parse_number<int>(key, *v) : fallback;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto v = get(key);
  return v ? parse_number<std::uint64_t>(key, *v) : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? parse_number<double>(key, *v) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + *v + "'");
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_number<int>("list", trim(item)));
  return out;
}

const std::set<std::string>& train_config_keys() {
  static const std::set<std::string> keys = {
      "family",        "schedule", "T",         "batch_size", "iterations", "learning_rate", "seed",
      "dataset",       "n_data",   "stop_gradient", "log_every", "embed_dim", "hidden",        "sample_steps",
  };
  return keys;
}

TrainConfig make_train_config(const KeyValueConfig& cfg, TrainConfig base) {
  if (auto v = cfg.get("family")) base.family = parse_family(*v);
  if (auto v = cfg.get("schedule")) base.schedule = parse_schedule_kind(*v);
  base.T = cfg.get_int("T", base.T);
  base.batch_size = cfg.get_int("batch_size", base.batch_size);
  base.iterations = cfg.get_int("iterations", base.iterations);
  base.learning_rate = cfg.get_double("learning_rate", base.learning_rate);
  base.seed = cfg.get_u64("seed", base.seed);
  base.dataset = cfg.get_string("dataset", base.dataset);
  base.n_data = cfg.get_u64("n_data", base.n_data);
  base.stop_gradient = cfg.get_bool("stop_gradient", base.stop_gradient);
  base.log_every = cfg.get_int("log_every", base.log_every);
  base.arch.embed_dim = cfg.get_int("embed_dim", base.arch.embed_dim);
  if (auto v = cfg.get("hidden")) base.arch.hidden = parse_int_list(*v);
  return base;
}

}  // namespace gddim
