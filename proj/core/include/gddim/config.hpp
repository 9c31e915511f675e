#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gddim/trainer.hpp"

namespace gddim {

/// Plain-text "key = value" settings. Blank lines and lines starting with
/// '#' are ignored; later assignments of a key override earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
  static KeyValueConfig from_file(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  std::optional<std::string> get(const std::string& key) const;
  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  /// Throws ConfigError naming the first key not in `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

/// Keys: family, schedule, T, batch_size, iterations, learning_rate, seed,
/// dataset, n_data, stop_gradient, log_every, embed_dim, hidden (comma list),
/// sample_steps (accepted, used by sampling commands).
const std::set<std::string>& train_config_keys();

/// Overlays every key present in cfg onto base.
TrainConfig make_train_config(const KeyValueConfig& cfg, TrainConfig base = {});

/// Comma-separated integers, e.g. "128,128,128".
std::vector<int> parse_int_list(const std::string& text);

}  // namespace gddim
