#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "vexp/errors.hpp"
#include "vexp/experiment.hpp"

namespace vexp {

namespace {

std::string escape_pointer_token(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

/// Walks JSON text that is already known to be valid, recording the line on
/// which each value starts.
class LineScanner {
 public:
  explicit LineScanner(std::string_view text) : text_(text) {}

  std::map<std::string, int> run() {
    skip_ws();
    if (pos_ < text_.size()) value("");
    return std::move(lines_);
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
      } else if (c != ' ' && c != '\t' && c != '\r') {
        return;
      }
      ++pos_;
    }
  }

  std::string string_token() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
        out += text_[pos_ + 1];
        pos_ += 2;
        continue;
      }
      out += text_[pos_++];
    }
    ++pos_;  // closing quote
    return out;
  }

  void value(const std::string& pointer) {
    lines_[pointer] = line_;
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] != '}') {
        const std::string key = string_token();
        skip_ws();
        ++pos_;  // ':'
        skip_ws();
        value(pointer + "/" + escape_pointer_token(key));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          skip_ws();
        }
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      skip_ws();
      for (int i = 0; pos_ < text_.size() && text_[pos_] != ']'; ++i) {
        value(pointer + "/" + std::to_string(i));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          skip_ws();
        }
      }
      ++pos_;
    } else if (c == '"') {
      string_token();
    } else {
      while (pos_ < text_.size() && std::string_view(",]} \t\r\n").find(text_[pos_]) == std::string_view::npos) ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

int line_at_byte(std::string_view text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) line += text[i] == '\n';
  return line;
}

}  // namespace

std::map<std::string, int> json_line_index(std::string_view text) { return LineScanner(text).run(); }

int ConfigDocument::line_of(std::string pointer) const {
  while (true) {
    if (auto it = lines.find(pointer); it != lines.end()) return it->second;
    if (pointer.empty()) return 1;
    pointer.erase(pointer.rfind('/'));
  }
}

ConfigDocument parse_config(std::string_view text, std::string source) {
  ConfigDocument doc;
  doc.source = std::move(source);
  try {
    doc.root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    std::string what = e.what();
    if (auto colon = what.rfind(": "); colon != std::string::npos) what = what.substr(colon + 2);
    throw ConfigError("malformed JSON: " + what, line_at_byte(text, byte));
  }
  if (!doc.root.is_object()) throw ConfigError("config must be a JSON object", 1);
  doc.lines = json_line_index(text);
  return doc;
}

ConfigDocument load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::uint64_t config_hash(const nlohmann::json& config) {
  const std::string canonical = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_hash(std::uint64_t hash) { return fmt::format("{:016x}", hash); }

}  // namespace vexp
