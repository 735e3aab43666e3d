#include "speiser_cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "speiser/dimension.hpp"

namespace speiser::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string shortest(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) throw ConfigError("invalid value '" + text + "' for key '" + key + "'");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError("non-finite value for key '" + key + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("invalid boolean '" + text + "' for key '" + key + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(key, trim(item)));
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>) {
      out += shortest(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

struct Field {
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
};

#define SPEISER_NUMBER(name, type)                                                               \
  {#name, Field{[](const ExperimentConfig& c) { return to_text(c.name); },                      \
                [](ExperimentConfig& c, const std::string& k, const std::string& v) {           \
                  c.name = parse_number<type>(k, v);                                             \
                }}}

std::string to_text(double x) { return shortest(x); }
std::string to_text(int x) { return std::to_string(x); }
std::string to_text(unsigned x) { return std::to_string(x); }
std::string to_text(std::size_t x) { return std::to_string(x); }

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"family", Field{[](const ExperimentConfig& c) { return to_string(c.family); },
                       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                         const auto tag = parse_family_tag(v);
                         if (!tag) throw ConfigError("unknown family '" + v + "' for key '" + k + "'");
                         c.family = *tag;
                       }}},
      SPEISER_NUMBER(p, int),
      SPEISER_NUMBER(eta, double),
      {"m", Field{[](const ExperimentConfig& c) { return std::to_string(c.m); },
                  [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                    c.m = v == "auto" ? 0 : parse_number<int>(k, v);
                  }}},
      SPEISER_NUMBER(lambda, double),
      {"lambda_grid", Field{[](const ExperimentConfig& c) { return join(c.lambda_grid); },
                            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                              c.lambda_grid = parse_list<double>(k, v);
                            }}},
      SPEISER_NUMBER(center_re, double),
      SPEISER_NUMBER(center_im, double),
      SPEISER_NUMBER(half_width, double),
      SPEISER_NUMBER(resolution, int),
      SPEISER_NUMBER(max_iter, int),
      SPEISER_NUMBER(tolerance, double),
      {"scale_window", Field{[](const ExperimentConfig& c) { return std::string(c.scale_window ? "true" : "false"); },
                             [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                               c.scale_window = parse_bool(k, v);
                             }}},
      {"box_scales", Field{[](const ExperimentConfig& c) { return join(c.box_scales); },
                           [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                             c.box_scales = parse_list<int>(k, v);
                           }}},
      SPEISER_NUMBER(threads, unsigned),
      SPEISER_NUMBER(pole_radius, double),
      {"counts", Field{[](const ExperimentConfig& c) { return join(c.counts); },
                       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                         c.counts = parse_list<std::size_t>(k, v);
                       }}},
      {"bowen_mode", Field{[](const ExperimentConfig& c) { return c.bowen_mode; },
                           [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                             if (v != "measured" && v != "synthetic" && v != "both") {
                               throw ConfigError("key '" + k + "' must be measured, synthetic or both");
                             }
                             c.bowen_mode = v;
                           }}},
      SPEISER_NUMBER(synthetic_c, double),
      SPEISER_NUMBER(branches, std::size_t),
      SPEISER_NUMBER(r0, double),
      SPEISER_NUMBER(r1, double),
      SPEISER_NUMBER(verify_points, int),
      SPEISER_NUMBER(seed, std::uint64_t),
      {"out", Field{[](const ExperimentConfig& c) { return c.out; },
                    [](ExperimentConfig& c, const std::string&, const std::string& v) { c.out = v; }}},
  };
  return table;
}

#undef SPEISER_NUMBER

const Field* find_field(const std::string& key) {
  for (const auto& [name, field] : fields()) {
    if (name == key) return &field;
  }
  return nullptr;
}

}  // namespace

MapFamily ExperimentConfig::map() const { return map_at(lambda); }

MapFamily ExperimentConfig::map_at(double lambda_value) const {
  switch (family) {
    case FamilyTag::G: return MapFamily::g();
    case FamilyTag::FMax: return MapFamily::fmax();
    case FamilyTag::H: return MapFamily::h(p, eta);
    case FamilyTag::Hm: return MapFamily::hm(m, p, eta);
    case FamilyTag::FLambda: return MapFamily::flambda(lambda_value, m, p, eta);
  }
  throw std::logic_error("unknown family");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [name, field] : fields()) keys.push_back(name);
  return keys;
}

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const Field* field = find_field(key);
  if (!field) throw ConfigError("unknown key '" + key + "'");
  field->set(config, key, value);
}

void validate(const ExperimentConfig& c) {
  try {
    (void)MapFamily::flambda(c.lambda, c.m, c.p, c.eta);
    for (double l : c.lambda_grid) (void)MapFamily::flambda(l, c.m, c.p, c.eta);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.lambda_grid.size() < 2) throw ConfigError("lambda_grid needs at least two values");
  if (!(c.half_width > 0.0)) throw ConfigError("half_width must be positive");
  if (c.resolution < 1) throw ConfigError("resolution must be at least 1");
  if (c.max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (!(c.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (c.box_scales.size() < 4) throw ConfigError("box_scales needs at least 4 entries");
  for (int s : c.box_scales) {
    if (s < 1) throw ConfigError("box_scales entries must be positive");
  }
  if (!(c.pole_radius > 0.0) || c.pole_radius > 1e300) throw ConfigError("pole_radius must be in (0, 1e300]");
  for (std::size_t n : c.counts) {
    if (n < 2) throw ConfigError("counts entries must be at least 2");
  }
  if (!(c.synthetic_c > 0.0)) throw ConfigError("synthetic_c must be positive");
  if (c.branches < 2) throw ConfigError("branches must be at least 2");
  if (!(c.r0 > 0.0 && c.r1 > 0.0)) throw ConfigError("r0 and r1 must be positive");
  if (c.r0 > (2.0 - std::sqrt(3.0)) * c.r1) throw ConfigError("r0 must not exceed (2 - sqrt 3) r1");
  if (c.verify_points < 1) throw ConfigError("verify_points must be at least 1");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set_config_value(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  if (config.m == 0) {
    if (config.p < 1 || !(config.eta > 0.0 && config.eta < kPi / 2)) {
      throw ConfigError("m = auto needs valid p and eta");
    }
    config.m = select_m(config.p, config.eta).m;
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [name, field] : fields()) out += name + " = " + field.get(config) + "\n";
  return out;
}

std::string config_comment(const ExperimentConfig& config, const std::string& prefix) {
  std::string out;
  std::istringstream in(serialize(config));
  std::string line;
  while (std::getline(in, line)) out += prefix + line + "\n";
  return out;
}

}  // namespace speiser::cli
