#pragma once

#include <set>
#include <string>

#include <json.hpp>

#include "ovml/util/errors.hpp"

namespace ovml::util {

// Strict object reader: every field access is registered, and done() rejects
// keys that were never asked for, so typos in config files fail loudly with
// the full field path.
class JsonObj {
 public:
  JsonObj(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <typename T>
  T get(const std::string& key) {
    mark(key);
    if (!j_.contains(key)) throw ConfigError(path_ + "." + key + ": missing");
    try {
      return j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    mark(key);
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  const nlohmann::json& raw(const std::string& key) {
    mark(key);
    if (!j_.contains(key)) throw ConfigError(path_ + "." + key + ": missing");
    return j_.at(key);
  }

  const nlohmann::json& raw_or_null(const std::string& key) {
    mark(key);
    static const nlohmann::json null_json;
    return j_.contains(key) ? j_.at(key) : null_json;
  }

  const std::string& path() const { return path_; }

  // call after reading every known key
  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError(path_ + "." + it.key() + ": unknown key");
      }
    }
  }

 private:
  void mark(const std::string& key) { seen_.insert(key); }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

nlohmann::json inline load_json_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw ConfigError("cannot open file: " + path);
  std::string text;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, n);
  std::fclose(f);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace ovml::util
