#pragma once

#include <cstdio>
#include <cstdint>
#include <string>
#include <vector>

namespace qmix {

/// Shortest text that round-trips a double; 17 significant digits.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"':
                out += "\\\"";
                break;
            case '\\':
                out += "\\\\";
                break;
            case '\n':
                out += "\\n";
                break;
            case '\t':
                out += "\\t";
                break;
            default:
                out += c;
        }
    }
    return out;
}

/// Minimal insertion-ordered JSON object writer. Keys keep the order they
/// were added in, so identical runs serialize byte-identically.
class JsonObject {
  public:
    JsonObject& add(const std::string& key, double value) {
        return add_raw(key, format_double(value));
    }
    JsonObject& add(const std::string& key, int value) {
        return add_raw(key, std::to_string(value));
    }
    JsonObject& add(const std::string& key, unsigned long value) {
        return add_raw(key, std::to_string(value));
    }
    JsonObject& add(const std::string& key, unsigned long long value) {
        return add_raw(key, std::to_string(value));
    }
    JsonObject& add(const std::string& key, bool value) {
        return add_raw(key, value ? "true" : "false");
    }
    JsonObject& add(const std::string& key, const std::string& value) {
        return add_raw(key, "\"" + json_escape(value) + "\"");
    }
    JsonObject& add(const std::string& key, const char* value) {
        return add(key, std::string(value));
    }
    JsonObject& add(const std::string& key, const std::vector<double>& values) {
        std::string raw = "[";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) raw += ", ";
            raw += format_double(values[i]);
        }
        raw += "]";
        return add_raw(key, raw);
    }
    JsonObject& add_object(const std::string& key, const JsonObject& obj) {
        return add_raw(key, obj.str());
    }
    JsonObject& add_raw(const std::string& key, const std::string& raw_value) {
        items_.push_back("\"" + json_escape(key) + "\": " + raw_value);
        return *this;
    }

    std::string str() const {
        std::string out = "{";
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (i) out += ", ";
            out += items_[i];
        }
        out += "}";
        return out;
    }

  private:
    std::vector<std::string> items_;
};

}  // namespace qmix
