#include "harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/csv.hpp"
#include "core/error.hpp"

namespace lab::harness {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end && *end == '\0';
}

bool looks_integral(const std::string& s) {
  return s.find_first_of(".eE") == std::string::npos;
}

Value parse_scalar(const std::string& raw, int line_no) {
  if (raw == "true") return true;
  if (raw == "false") return false;
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"')
    return raw.substr(1, raw.size() - 2);
  double num = 0;
  require(parse_number(raw, num), errc::config,
          "config line " + std::to_string(line_no) + ": unreadable value '" + raw + "'");
  if (looks_integral(raw)) return static_cast<std::int64_t>(std::strtoll(raw.c_str(), nullptr, 10));
  return num;
}

Value parse_array(const std::string& inner, int line_no) {
  std::vector<std::string> items;
  std::string cur;
  for (char c : inner) {
    if (c == ',') {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trim(cur).empty()) items.push_back(trim(cur));
  if (items.empty()) return std::vector<double>{};
  if (items.front().size() >= 1 && items.front().front() == '"') {
    std::vector<std::string> strings;
    for (const auto& item : items) {
      require(item.size() >= 2 && item.front() == '"' && item.back() == '"', errc::config,
              "config line " + std::to_string(line_no) + ": mixed array types");
      strings.push_back(item.substr(1, item.size() - 2));
    }
    return strings;
  }
  std::vector<double> numbers;
  for (const auto& item : items) {
    double v = 0;
    require(parse_number(item, v), errc::config,
            "config line " + std::to_string(line_no) + ": unreadable array item '" + item + "'");
    numbers.push_back(v);
  }
  return numbers;
}

std::string render_value(const Value& v) {
  struct Renderer {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const {
      std::string s = format_double(d);
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      return s;
    }
    std::string operator()(const std::string& s) const { return '"' + s + '"'; }
    std::string operator()(const std::vector<double>& a) const {
      std::string out = "[";
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += ", ";
        out += (*this)(a[i]);
      }
      return out + "]";
    }
    std::string operator()(const std::vector<std::string>& a) const {
      std::string out = "[";
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += ", ";
        out += (*this)(a[i]);
      }
      return out + "]";
    }
  };
  return std::visit(Renderer{}, v);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  Table* current = &cfg.top;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.front() == '[') {
      require(t.back() == ']', errc::config,
              "config line " + std::to_string(line_no) + ": unterminated section header");
      std::string name = trim(t.substr(1, t.size() - 2));
      require(!name.empty(), errc::config,
              "config line " + std::to_string(line_no) + ": empty section name");
      current = &cfg.sections[name];
      continue;
    }
    std::size_t eq = t.find('=');
    require(eq != std::string::npos, errc::config,
            "config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string raw = trim(t.substr(eq + 1));
    require(!key.empty(), errc::config, "config line " + std::to_string(line_no) + ": empty key");
    require(!raw.empty(), errc::config, "config line " + std::to_string(line_no) + ": empty value");
    require(current->find(key) == current->end(), errc::config,
            "config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    if (raw.front() == '[') {
      require(raw.back() == ']', errc::config,
              "config line " + std::to_string(line_no) + ": unterminated array");
      (*current)[key] = parse_array(raw.substr(1, raw.size() - 2), line_no);
    } else {
      (*current)[key] = parse_scalar(raw, line_no);
    }
  }
  if (auto it = cfg.top.find("experiment"); it != cfg.top.end()) {
    auto* name = std::get_if<std::string>(&it->second);
    require(name != nullptr, errc::config, "config: 'experiment' must be a string");
    cfg.experiment = *name;
    cfg.top.erase(it);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), errc::config, "cannot open config file: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  out += "experiment = \"" + cfg.experiment + "\"\n";
  for (const auto& [key, value] : cfg.top) out += key + " = " + render_value(value) + "\n";
  for (const auto& [name, table] : cfg.sections) {
    out += "\n[" + name + "]\n";
    for (const auto& [key, value] : table) out += key + " = " + render_value(value) + "\n";
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::string text = serialize_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

template <class T>
std::optional<T> typed(const Table& t, const std::string& key) {
  auto it = t.find(key);
  if (it == t.end()) return std::nullopt;
  if (const T* v = std::get_if<T>(&it->second)) return *v;
  fail(errc::config, "config key '" + key + "' has the wrong type");
}

}  // namespace

double get_double(const Table& t, const std::string& key, std::optional<double> fallback) {
  if (auto v = typed<double>(t, key)) return *v;
  if (auto v = typed<std::int64_t>(t, key)) return static_cast<double>(*v);
  require(fallback.has_value(), errc::config, "missing config key '" + key + "'");
  return *fallback;
}

std::int64_t get_int(const Table& t, const std::string& key, std::optional<std::int64_t> fallback) {
  if (auto v = typed<std::int64_t>(t, key)) return *v;
  require(fallback.has_value(), errc::config, "missing config key '" + key + "'");
  return *fallback;
}

bool get_bool(const Table& t, const std::string& key, std::optional<bool> fallback) {
  if (auto v = typed<bool>(t, key)) return *v;
  require(fallback.has_value(), errc::config, "missing config key '" + key + "'");
  return *fallback;
}

std::string get_string(const Table& t, const std::string& key, std::optional<std::string> fallback) {
  if (auto v = typed<std::string>(t, key)) return *v;
  require(fallback.has_value(), errc::config, "missing config key '" + key + "'");
  return *fallback;
}

std::vector<double> get_doubles(const Table& t, const std::string& key,
                                std::optional<std::vector<double>> fallback) {
  if (auto v = typed<std::vector<double>>(t, key)) return *v;
  require(fallback.has_value(), errc::config, "missing config key '" + key + "'");
  return *fallback;
}

const Table& section_or_empty(const ExperimentConfig& cfg, const std::string& name) {
  static const Table empty;
  auto it = cfg.sections.find(name);
  return it == cfg.sections.end() ? empty : it->second;
}

std::int64_t ExperimentConfig::trials() const { return get_int(top, "trials", 1); }
std::uint64_t ExperimentConfig::base_seed() const {
  return static_cast<std::uint64_t>(get_int(top, "seed", 0));
}
std::string ExperimentConfig::out_dir() const { return get_string(top, "out", "out"); }
int ExperimentConfig::threads() const { return static_cast<int>(get_int(top, "threads", 1)); }

}  // namespace lab::harness
