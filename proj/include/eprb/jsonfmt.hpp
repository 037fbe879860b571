#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace eprb {

// All machine-readable output carries full double precision: 17 significant
// digits round-trip any finite double exactly.
inline std::string format_double17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// Minimal ordered JSON emitter. nlohmann::json is used for parsing; emission
// goes through this writer so that key order is deterministic and doubles are
// printed with 17 significant digits.
class JsonWriter {
 public:
  JsonWriter& begin_object() { return token("{", true); }
  JsonWriter& end_object() {
    pending_comma_ = false;
    out_ += '}';
    pending_comma_ = true;
    return *this;
  }
  JsonWriter& begin_array() { return token("[", true); }
  JsonWriter& end_array() {
    pending_comma_ = false;
    out_ += ']';
    pending_comma_ = true;
    return *this;
  }

  JsonWriter& key(std::string_view k) {
    comma();
    out_ += '"';
    out_ += json_escape(k);
    out_ += "\":";
    pending_comma_ = false;
    return *this;
  }

  JsonWriter& value(double v) { return raw(std::isfinite(v) ? format_double17(v) : "null"); }
  JsonWriter& value(long long v) { return raw(std::to_string(v)); }
  JsonWriter& value(int v) { return value(static_cast<long long>(v)); }
  JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
  // keeps string literals from decaying to the bool overload
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }
  JsonWriter& value(std::string_view v) {
    comma();
    out_ += '"';
    out_ += json_escape(v);
    out_ += '"';
    pending_comma_ = true;
    return *this;
  }
  JsonWriter& null() { return raw("null"); }

  const std::string& str() const { return out_; }

 private:
  JsonWriter& token(std::string_view t, bool open) {
    comma();
    out_ += t;
    pending_comma_ = !open;
    return *this;
  }
  JsonWriter& raw(std::string_view t) {
    comma();
    out_ += t;
    pending_comma_ = true;
    return *this;
  }
  void comma() {
    if (pending_comma_) out_ += ',';
    pending_comma_ = false;
  }

  std::string out_;
  bool pending_comma_ = false;
};

}  // namespace eprb
