#include "uclt/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>

#include "uclt/errors.hpp"

namespace uclt::cli {

namespace {

/// Forward iterator over a string that counts consumed newlines.
class LineCountingIterator {
 public:
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  LineCountingIterator() = default;
  LineCountingIterator(const char* p, int* line) : p_(p), line_(line) {}

  reference operator*() const { return *p_; }
  LineCountingIterator& operator++() {
    if (*p_ == '\n') ++*line_;
    ++p_;
    return *this;
  }
  LineCountingIterator operator++(int) {
    auto copy = *this;
    ++*this;
    return copy;
  }
  bool operator==(const LineCountingIterator& o) const { return p_ == o.p_; }
  bool operator!=(const LineCountingIterator& o) const { return p_ != o.p_; }

 private:
  const char* p_ = nullptr;
  int* line_ = nullptr;
};

std::string escape_pointer_token(const std::string& key) {
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

/// Builds the DOM while recording the line of each object key.
class LineSax {
 public:
  LineSax(Json& root, std::map<std::string, int>& lines, const int* line)
      : dom_(root), lines_(lines), line_(line) {}

  bool null() { return element() && dom_.null(); }
  bool boolean(bool v) { return element() && dom_.boolean(v); }
  bool number_integer(Json::number_integer_t v) { return element() && dom_.number_integer(v); }
  bool number_unsigned(Json::number_unsigned_t v) { return element() && dom_.number_unsigned(v); }
  bool number_float(Json::number_float_t v, const Json::string_t& s) {
    return element() && dom_.number_float(v, s);
  }
  bool string(Json::string_t& v) { return element() && dom_.string(v); }
  bool binary(Json::binary_t& v) { return element() && dom_.binary(v); }

  bool start_object(std::size_t n) {
    const std::string ptr = next_pointer();
    frames_.push_back({false, 0, {}, ptr});
    return dom_.start_object(n);
  }
  bool key(Json::string_t& k) {
    frames_.back().key = k;
    lines_[frames_.back().pointer + "/" + escape_pointer_token(k)] = *line_;
    return dom_.key(k);
  }
  bool end_object() {
    frames_.pop_back();
    return dom_.end_object();
  }
  bool start_array(std::size_t n) {
    const std::string ptr = next_pointer();
    frames_.push_back({true, 0, {}, ptr});
    return dom_.start_array(n);
  }
  bool end_array() {
    frames_.pop_back();
    return dom_.end_array();
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& ex) {
    error_line_ = *line_;
    error_message_ = ex.what();
    return false;
  }

  int error_line() const { return error_line_; }
  const std::string& error_message() const { return error_message_; }

 private:
  struct Frame {
    bool is_array;
    std::size_t index;
    std::string key;
    std::string pointer;
  };

  bool element() {
    next_pointer();
    return true;
  }
  std::string next_pointer() {
    if (frames_.empty()) return "";
    Frame& f = frames_.back();
    if (f.is_array) return f.pointer + "/" + std::to_string(f.index++);
    return f.pointer + "/" + escape_pointer_token(f.key);
  }

  nlohmann::detail::json_sax_dom_parser<Json> dom_;
  std::map<std::string, int>& lines_;
  const int* line_;
  std::vector<Frame> frames_;
  int error_line_ = 0;
  std::string error_message_;
};

std::string describe(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null:
      return "null";
    case Json::value_t::object:
      return "an object";
    case Json::value_t::array:
      return "an array";
    case Json::value_t::string:
      return "a string";
    case Json::value_t::boolean:
      return "a boolean";
    default:
      return "a number";
  }
}

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text) {
  ConfigDocument doc;
  int line = 1;
  LineSax sax(doc.root_, doc.lines_, &line);
  const LineCountingIterator first(text.data(), &line);
  const LineCountingIterator last(text.data() + text.size(), &line);
  const bool ok = Json::sax_parse(first, last, &sax);
  if (!ok) {
    std::string message = sax.error_message();
    // keep the parser's explanation, drop its byte-offset prefix
    if (const auto pos = message.find(": syntax error"); pos != std::string::npos) {
      message = message.substr(pos + 2);
    }
    throw ConfigError(fmt::format("invalid JSON: {}", message), sax.error_line());
  }
  if (!doc.root_.is_object()) throw ConfigError("the config must be a JSON object", 1);
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read config file {}", path.string()), 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

int ConfigDocument::line_of(const std::string& pointer) const {
  std::string p = pointer;
  while (!p.empty()) {
    if (const auto it = lines_.find(p); it != lines_.end()) return it->second;
    p = p.substr(0, p.rfind('/'));
  }
  return 1;
}

Section::Section(const ConfigDocument& doc, std::string pointer)
    : doc_(&doc), pointer_(std::move(pointer)) {
  node_ = &doc.root().at(Json::json_pointer(pointer_));
  if (!node_->is_object()) {
    throw ConfigError(fmt::format("'{}' must be an object", pointer_.empty() ? "/" : pointer_),
                      doc.line_of(pointer_));
  }
}

void Section::fail(const std::string& key, const std::string& message) const {
  const std::string where = pointer_ + "/" + escape_pointer_token(key);
  throw ConfigError(fmt::format("{}: {}", where, message), doc_->line_of(where));
}

bool Section::has(const std::string& key) const { return node_->contains(key); }

const Json& Section::value(const std::string& key) const { return node_->at(key); }

const Json& Section::raw(const std::string& key) const {
  if (!has(key)) fail(key, "required key is missing");
  return value(key);
}

void Section::allow_only(std::initializer_list<const char*> allowed) const {
  for (const auto& [k, v] : node_->items()) {
    bool known = false;
    for (const char* a : allowed) known = known || k == a;
    if (!known) {
      std::string list;
      for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      fail(k, fmt::format("unknown key (allowed: {})", list));
    }
  }
}

Section Section::child(const std::string& key) const {
  if (!has(key)) fail(key, "required section is missing");
  if (!value(key).is_object()) fail(key, fmt::format("expected an object, got {}", describe(value(key))));
  return Section(*doc_, pointer_ + "/" + escape_pointer_token(key));
}

double Section::number(const std::string& key, std::optional<double> fallback) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    fail(key, "required key is missing");
  }
  const Json& v = value(key);
  if (!v.is_number()) fail(key, fmt::format("expected a number, got {}", describe(v)));
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(key, "expected a finite number");
  return d;
}

double Section::positive(const std::string& key, std::optional<double> fallback) const {
  const double d = number(key, fallback);
  if (!(d > 0.0)) fail(key, fmt::format("must be positive, got {}", d));
  return d;
}

double Section::number_or_inf(const std::string& key, double fallback) const {
  if (has(key) && value(key).is_null()) return std::numeric_limits<double>::infinity();
  return number(key, fallback);
}

std::int64_t Section::integer(const std::string& key, std::optional<std::int64_t> fallback,
                              std::int64_t min) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    fail(key, "required key is missing");
  }
  const Json& v = value(key);
  if (!v.is_number_integer()) fail(key, fmt::format("expected an integer, got {}", describe(v)));
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    fail(key, "integer out of range");
  }
  const auto i = v.get<std::int64_t>();
  if (i < min) fail(key, fmt::format("must be at least {}, got {}", min, i));
  return i;
}

std::uint64_t Section::unsigned_integer(const std::string& key,
                                        std::optional<std::uint64_t> fallback) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    fail(key, "required key is missing");
  }
  const Json& v = value(key);
  if (!v.is_number_unsigned()) fail(key, fmt::format("expected a nonnegative integer, got {}", describe(v)));
  return v.get<std::uint64_t>();
}

bool Section::boolean(const std::string& key, std::optional<bool> fallback) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    fail(key, "required key is missing");
  }
  const Json& v = value(key);
  if (!v.is_boolean()) fail(key, fmt::format("expected a boolean, got {}", describe(v)));
  return v.get<bool>();
}

std::string Section::string(const std::string& key, std::optional<std::string> fallback) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    fail(key, "required key is missing");
  }
  const Json& v = value(key);
  if (!v.is_string()) fail(key, fmt::format("expected a string, got {}", describe(v)));
  return v.get<std::string>();
}

std::string Section::choice(const std::string& key, std::initializer_list<const char*> options,
                            std::optional<std::string> fallback) const {
  const std::string s = string(key, std::move(fallback));
  std::string list;
  for (const char* o : options) {
    if (s == o) return s;
    list += (list.empty() ? "" : ", ") + std::string(o);
  }
  fail(key, fmt::format("'{}' is not one of: {}", s, list));
}

std::vector<double> Section::numbers(const std::string& key,
                                     std::optional<std::vector<double>> fallback) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    fail(key, "required key is missing");
  }
  const Json& v = value(key);
  if (!v.is_array() || v.empty()) fail(key, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(key, fmt::format("array element is {}, expected a number", describe(e)));
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::size_t> Section::counts(const std::string& key,
                                         std::optional<std::vector<std::size_t>> fallback) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    fail(key, "required key is missing");
  }
  const Json& v = value(key);
  if (!v.is_array() || v.empty()) fail(key, "expected a nonempty array of positive integers");
  std::vector<std::size_t> out;
  for (const auto& e : v) {
    if (!e.is_number_unsigned() || e.get<std::uint64_t>() == 0) {
      fail(key, "array elements must be positive integers");
    }
    out.push_back(e.get<std::size_t>());
  }
  return out;
}

std::vector<Section> Section::objects(const std::string& key) const {
  const Json& v = raw(key);
  if (!v.is_array() || v.empty()) fail(key, "expected a nonempty array of objects");
  std::vector<Section> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_object()) fail(key, fmt::format("element {} is {}, expected an object", k, describe(v[k])));
    out.emplace_back(*doc_, pointer_ + "/" + escape_pointer_token(key) + "/" + std::to_string(k));
  }
  return out;
}

std::string config_hash(const Json& effective_config) {
  const nlohmann::json sorted = nlohmann::json::parse(effective_config.dump());
  const std::string canonical = sorted.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace uclt::cli
