#include "lorange/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "lorange/errors.hpp"
#include "lorange/rng.hpp"

namespace lorange {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Binder {
  std::map<std::string, std::function<void(const std::string&)>> setters;
  std::map<std::string, std::function<std::string()>> getters;
  std::vector<std::string> order;

  void number(const std::string& key, double* target) {
    order.push_back(key);
    setters[key] = [key, target](const std::string& v) {
      char* end = nullptr;
      const double parsed = std::strtod(v.c_str(), &end);
      if (end == v.c_str() || *end != '\0')
        throw ConfigError("config key '" + key + "': expected a number, got '" +
                          v + "'");
      *target = parsed;
    };
    getters[key] = [target] { return fmt17(*target); };
  }

  void integer(const std::string& key, int* target) {
    order.push_back(key);
    setters[key] = [key, target](const std::string& v) {
      int parsed = 0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
      if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("config key '" + key +
                          "': expected an integer, got '" + v + "'");
      *target = parsed;
    };
    getters[key] = [target] { return std::to_string(*target); };
  }

  void integer64(const std::string& key, std::int64_t* target) {
    order.push_back(key);
    setters[key] = [key, target](const std::string& v) {
      std::int64_t parsed = 0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
      if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("config key '" + key +
                          "': expected an integer, got '" + v + "'");
      *target = parsed;
    };
    getters[key] = [target] { return std::to_string(*target); };
  }

  void uinteger64(const std::string& key, std::uint64_t* target) {
    order.push_back(key);
    setters[key] = [key, target](const std::string& v) {
      std::uint64_t parsed = 0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
      if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("config key '" + key +
                          "': expected an unsigned integer, got '" + v + "'");
      *target = parsed;
    };
    getters[key] = [target] { return std::to_string(*target); };
  }

  void size(const std::string& key, std::size_t* target) {
    order.push_back(key);
    setters[key] = [key, target](const std::string& v) {
      std::uint64_t parsed = 0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
      if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("config key '" + key +
                          "': expected an unsigned integer, got '" + v + "'");
      *target = parsed;
    };
    getters[key] = [target] { return std::to_string(*target); };
  }

  void boolean(const std::string& key, bool* target) {
    order.push_back(key);
    setters[key] = [key, target](const std::string& v) {
      if (v == "true" || v == "1")
        *target = true;
      else if (v == "false" || v == "0")
        *target = false;
      else
        throw ConfigError("config key '" + key +
                          "': expected true/false, got '" + v + "'");
    };
    getters[key] = [target] { return *target ? "true" : "false"; };
  }

  void text(const std::string& key, std::string* target) {
    order.push_back(key);
    setters[key] = [target](const std::string& v) { *target = v; };
    getters[key] = [target] { return *target; };
  }
};

Binder make_binder(RunConfig& c) {
  Binder b;
  b.text("paths.data_dir", &c.data_dir);
  b.text("paths.geometry", &c.geometry);
  b.text("paths.model_dir", &c.model_dir);
  b.text("paths.out_dir", &c.out_dir);

  b.integer("dataset.sf_min", &c.sf_min);
  b.integer("dataset.sf_max", &c.sf_max);
  b.number("dataset.train_fraction", &c.train_fraction);
  b.integer64("dataset.dedup_window_s", &c.dedup_window_s);

  b.integer("anomaly.n_trees", &c.anomaly_n_trees);
  b.integer("anomaly.subsample", &c.anomaly_subsample);
  b.number("anomaly.contamination", &c.contamination);
  b.boolean("anomaly.apply_to_test", &c.anomaly_apply_to_test);
  b.uinteger64("anomaly.seed", &c.anomaly_seed);

  b.number("kalman.q", &c.kalman.q);
  b.number("kalman.r0", &c.kalman.r0);
  b.number("kalman.gamma", &c.kalman.gamma);
  b.number("kalman.alpha_min", &c.kalman.alpha_min);
  b.number("kalman.alpha_max", &c.kalman.alpha_max);
  b.number("kalman.r_min", &c.kalman.r_min);
  b.number("kalman.r_max", &c.kalman.r_max);
  b.number("kalman.p0", &c.kalman.p0);
  b.boolean("kalman.gain_uses_prev_r", &c.kalman.gain_uses_prev_r);

  b.integer("model.cv_folds", &c.cv_folds);
  b.number("model.tx_power_dbm", &c.tx_power_dbm);

  b.size("synth.n_packets_per_device", &c.synth.n_packets_per_device);
  b.number("synth.shadowing_sigma_db", &c.synth.shadowing_sigma_db);
  b.number("synth.beta0_db", &c.synth.coefficients.beta0_db);
  b.number("synth.n", &c.synth.coefficients.n);
  b.number("synth.omega_brick_db", &c.synth.coefficients.omega_brick_db);
  b.number("synth.omega_wood_db", &c.synth.coefficients.omega_wood_db);
  b.number("synth.eps_temperature", &c.synth.coefficients.epsilon[0]);
  b.number("synth.eps_humidity", &c.synth.coefficients.epsilon[1]);
  b.number("synth.eps_co2", &c.synth.coefficients.epsilon[2]);
  b.number("synth.eps_pm25", &c.synth.coefficients.epsilon[3]);
  b.number("synth.eps_pressure", &c.synth.coefficients.epsilon[4]);
  b.number("synth.k_gamma", &c.synth.coefficients.k_gamma);
  b.number("synth.outlier_rate", &c.synth.outlier.rate);
  b.number("synth.outlier_magnitude_db", &c.synth.outlier.magnitude_db);
  b.integer("synth.outlier_burst_length", &c.synth.outlier.burst_length);
  b.number("synth.snr_a_db", &c.synth.snr.a_db);
  b.number("synth.snr_b_per_db", &c.synth.snr.b_per_db);
  b.number("synth.snr_noise_db", &c.synth.snr.noise_sd_db);
  static constexpr const char* kEnvNames[5] = {
      "temperature", "humidity", "co2", "pm25", "pressure"};
  for (int i = 0; i < 5; ++i) {
    const std::string prefix = std::string("synth.env_") + kEnvNames[i];
    b.number(prefix + "_mean", &c.synth.env[i].mean);
    b.number(prefix + "_amplitude", &c.synth.env[i].amplitude);
    b.number(prefix + "_period_h", &c.synth.env[i].period_h);
    b.number(prefix + "_phase_rad", &c.synth.env[i].phase_rad);
    b.number(prefix + "_jitter_sd", &c.synth.env[i].jitter_sd);
  }

  b.number("eval.cde_max_m", &c.cde_max_m);
  b.number("eval.cde_step_m", &c.cde_step_m);
  b.boolean("eval.write_estimates", &c.write_estimates);

  b.uinteger64("run.seed", &c.seed);
  return b;
}

void apply_values(Binder& binder,
                  const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const auto it = binder.setters.find(key);
    if (it == binder.setters.end())
      throw ConfigError("unknown config key '" + key + "'");
    it->second(value);
  }
}

// model.variants needs list handling, done outside the binder.
void apply_variants(RunConfig& c,
                    const std::map<std::string, std::string>& values) {
  const auto it = values.find("model.variants");
  if (it == values.end()) return;
  std::vector<std::string> parsed;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    ModelVariant::from_name(item);  // validates
    parsed.push_back(item);
  }
  if (parsed.empty())
    throw ConfigError("model.variants: empty variant list");
  c.variants = std::move(parsed);
}

}  // namespace

std::map<std::string, std::string> parse_config_text(std::istream& in) {
  std::map<std::string, std::string> values;
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    if (!values.emplace(full, value).second)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": duplicate key '" + full + "'");
  }
  return values;
}

std::string RunConfig::geometry_path() const {
  if (!geometry.empty()) return geometry;
  return data_dir + "/geometry.csv";
}

std::string RunConfig::model_dir_path() const {
  return model_dir.empty() ? out_dir : model_dir;
}

FitParams RunConfig::fit_params() const {
  FitParams p;
  p.tx_power_dbm = tx_power_dbm;
  p.filter = kalman;
  p.cv_folds = cv_folds;
  return p;
}

std::string RunConfig::canonical_text() const {
  RunConfig copy = *this;
  Binder binder = make_binder(copy);
  std::string out;
  // Binder registration order groups keys by section.
  for (const auto& key : binder.order)
    out += key + "=" + binder.getters.at(key)() + "\n";
  std::string variants_joined;
  for (const auto& v : variants) {
    if (!variants_joined.empty()) variants_joined += ',';
    variants_joined += v;
  }
  out += "model.variants=" + variants_joined + "\n";
  return out;
}

std::string RunConfig::fingerprint() const {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_text())));
  return buf;
}

RunConfig resolve_config(const std::map<std::string, std::string>& file_values,
                         const std::map<std::string, std::string>& overrides) {
  RunConfig c;
  Binder binder = make_binder(c);

  auto strip_variants = [](std::map<std::string, std::string> m) {
    m.erase("model.variants");
    return m;
  };
  apply_values(binder, strip_variants(file_values));
  apply_variants(c, file_values);
  apply_values(binder, strip_variants(overrides));
  apply_variants(c, overrides);

  // Cross-field validation.
  if (c.sf_min > c.sf_max) throw ConfigError("dataset.sf_min > dataset.sf_max");
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0))
    throw ConfigError("dataset.train_fraction must be in (0,1)");
  if (c.dedup_window_s < 0)
    throw ConfigError("dataset.dedup_window_s must be >= 0");
  if (!(c.contamination >= 0.0 && c.contamination < 1.0))
    throw ConfigError("anomaly.contamination must be in [0,1)");
  if (c.anomaly_n_trees < 1) throw ConfigError("anomaly.n_trees must be >= 1");
  if (c.anomaly_subsample < 2)
    throw ConfigError("anomaly.subsample must be >= 2");
  if (c.cv_folds < 2) throw ConfigError("model.cv_folds must be >= 2");
  if (!(c.cde_step_m > 0.0) || !(c.cde_max_m > 0.0))
    throw ConfigError("eval CDE grid must be positive");
  c.kalman.validate();
  if (!file_values.contains("anomaly.seed") && !overrides.contains("anomaly.seed"))
    c.anomaly_seed = c.seed;
  c.synth.seed = c.seed;
  c.synth.tx_power_dbm = c.tx_power_dbm;
  c.synth.validate();
  return c;
}

RunConfig load_config(const std::string& path,
                      const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> file_values;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    file_values = parse_config_text(in);
  }
  return resolve_config(file_values, overrides);
}

}  // namespace lorange
