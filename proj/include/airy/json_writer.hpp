#pragma once

#include <span>
#include <string>
#include <vector>

#include "airy/core.hpp"

namespace airy {

// 17 significant digits, so every double round-trips; non-finite values print as null.
std::string format_double(double v);

// Streaming JSON emitter with fixed key order and fixed float format, for byte-identical artifacts.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(int v);
  JsonWriter& value(long v);
  JsonWriter& value(std::size_t v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v) { return value(std::string(v)); }
  JsonWriter& value(Vec2 v);
  JsonWriter& value(std::span<const double> v);
  // Inserts an already serialized JSON document.
  JsonWriter& raw(const std::string& json);

  const std::string& str() const { return out_; }

 private:
  void separator();
  void write_string(const std::string& v);

  std::string out_;
  std::vector<bool> first_;
  bool after_key_ = false;
};

}  // namespace airy
