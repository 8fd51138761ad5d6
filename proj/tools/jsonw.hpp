#ifndef WDRO_CLI_JSONW_HPP
#define WDRO_CLI_JSONW_HPP

#include <cstdio>
#include <string>
#include <vector>

namespace wdrocli {

// Minimal JSON emitter with insertion-ordered keys and floats pinned to 17
// significant digits, so identical runs produce identical bytes.
class JsonWriter {
public:
  static std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  JsonWriter& begin_object() {
    open("{");
    return *this;
  }
  JsonWriter& end_object() {
    close("}");
    return *this;
  }
  JsonWriter& begin_array(const std::string& key) {
    comma();
    out_ += quote(key) + ":[";
    fresh_ = true;
    return *this;
  }
  JsonWriter& end_array() {
    close("]");
    return *this;
  }
  JsonWriter& begin_object(const std::string& key) {
    comma();
    out_ += quote(key) + ":{";
    fresh_ = true;
    return *this;
  }
  JsonWriter& begin_array_item() {
    comma();
    out_ += "{";
    fresh_ = true;
    return *this;
  }

  JsonWriter& field(const std::string& key, double v) {
    comma();
    out_ += quote(key) + ":" + number(v);
    return *this;
  }
  JsonWriter& field(const std::string& key, int v) {
    comma();
    out_ += quote(key) + ":" + std::to_string(v);
    return *this;
  }
  JsonWriter& field(const std::string& key, bool v) {
    comma();
    out_ += quote(key) + (v ? ":true" : ":false");
    return *this;
  }
  JsonWriter& field(const std::string& key, const std::string& v) {
    comma();
    out_ += quote(key) + ":" + quote(v);
    return *this;
  }
  JsonWriter& field_null(const std::string& key) {
    comma();
    out_ += quote(key) + ":null";
    return *this;
  }
  JsonWriter& field_raw(const std::string& key, const std::string& raw_json) {
    comma();
    out_ += quote(key) + ":" + raw_json;
    return *this;
  }
  JsonWriter& field(const std::string& key, const std::vector<double>& vs) {
    begin_array(key);
    for (double v : vs) item(v);
    return end_array();
  }
  JsonWriter& item(double v) {
    comma();
    out_ += number(v);
    return *this;
  }

  const std::string& str() const { return out_; }

private:
  static std::string quote(const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q += '\\';
      if (c == '\n') {
        q += "\\n";
        continue;
      }
      q += c;
    }
    q += '"';
    return q;
  }
  void comma() {
    if (!fresh_) out_ += ",";
    fresh_ = false;
  }
  void open(const char* b) {
    comma();
    out_ += b;
    fresh_ = true;
  }
  void close(const char* b) {
    out_ += b;
    fresh_ = false;
  }

  std::string out_;
  bool fresh_ = true;
};

}  // namespace wdrocli

#endif
