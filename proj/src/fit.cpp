#include "lorange/fit.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

#include "lorange/dataset.hpp"
#include "lorange/errors.hpp"
#include "lorange/kernels.hpp"
#include "lorange/logging.hpp"
#include "lorange/stats.hpp"

namespace lorange {
namespace {

double mean_of(std::span<const double> v) { return mean(v); }

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RegressionMetrics regression_metrics(std::span<const double> predictions,
                                     std::span<const double> truth) {
  if (predictions.size() != truth.size())
    throw DataError("regression_metrics: length mismatch");
  if (truth.empty()) throw DataError("regression_metrics: empty input");
  const std::size_t n = truth.size();

  RegressionMetrics m;
  const double ss_res =
      kernels::sum_sq_diff(truth.data(), predictions.data(), n);
  m.rmse = std::sqrt(ss_res / static_cast<double>(n));

  double ss_tot = 0.0, m3 = 0.0;
  kernels::centered_moments(truth.data(), mean_of(truth), n, ss_tot, m3);
  if (ss_tot > 0.0) {
    m.r2 = 1.0 - ss_res / ss_tot;
    m.r2_defined = true;
  } else {
    m.r2 = std::numeric_limits<double>::quiet_NaN();
    m.r2_defined = false;
  }

  std::vector<double> residuals(n);
  for (std::size_t i = 0; i < n; ++i) residuals[i] = truth[i] - predictions[i];
  m.skewness = sample_skewness(residuals);
  return m;
}

std::vector<double> ModelCoefficients::column_coefficients() const {
  std::vector<double> c = {beta0_db, n, omega_db[0], omega_db[1]};
  if (variant.uses_covariates()) {
    c.insert(c.end(), epsilon.begin(), epsilon.end());
    c.push_back(k_gamma);
  }
  return c;
}

ModelCoefficients fit_model(std::span<const UplinkRecord> train,
                            const GeometryMap& geometry,
                            const ModelVariant& variant,
                            const FitParams& params) {
  if (train.empty()) throw DataError("fit_model: empty training set");

  auto design = build_design_matrix(train, geometry, variant,
                                    params.tx_power_dbm, params.filter);
  const std::size_t n_rows = design.x.rows;

  // Chronological k-fold CV before the final solve consumes the matrix.
  double cv_mean = 0.0, cv_std = 0.0;
  int cv_folds_run = 0;
  if (params.cv_folds >= 2 &&
      static_cast<std::size_t>(params.cv_folds) <= n_rows) {
    const auto folds = kfold_spans(n_rows, params.cv_folds);
    std::vector<double> fold_rmse;
    for (const auto& f : folds) {
      Matrix x_train = drop_rows(design.x, f.val_begin, f.val_end);
      std::vector<double> y_train;
      y_train.reserve(x_train.rows);
      y_train.insert(y_train.end(), design.y.begin(),
                     design.y.begin() + static_cast<std::ptrdiff_t>(f.val_begin));
      y_train.insert(y_train.end(),
                     design.y.begin() + static_cast<std::ptrdiff_t>(f.val_end),
                     design.y.end());
      auto sol = solve_least_squares(std::move(x_train), std::move(y_train),
                                     design.columns);
      // Predict the held-out block.
      const std::size_t len = f.val_end - f.val_begin;
      std::vector<double> pred(len, 0.0);
      for (std::size_t j = 0; j < design.x.cols; ++j)
        kernels::axpy(sol.coeffs[j], design.x.col(j) + f.val_begin,
                      pred.data(), len);
      const double ss = kernels::sum_sq_diff(
          design.y.data() + f.val_begin, pred.data(), len);
      fold_rmse.push_back(std::sqrt(ss / static_cast<double>(len)));
    }
    cv_mean = mean_of(fold_rmse);
    cv_std = sample_std(fold_rmse);
    cv_folds_run = params.cv_folds;
  }

  std::vector<double> y = design.y;
  auto sol = solve_least_squares(std::move(design.x), std::move(y),
                                 design.columns);
  if (sol.condition > params.condition_warn)
    log_warn("design matrix condition number " + fmt17(sol.condition) +
             " exceeds " + fmt17(params.condition_warn));

  ModelCoefficients model;
  model.variant = variant;
  model.tx_power_dbm = params.tx_power_dbm;
  model.beta0_db = sol.coeffs[0];
  model.n = sol.coeffs[1];
  model.omega_db = {sol.coeffs[2], sol.coeffs[3]};
  if (variant.uses_covariates()) {
    for (int i = 0; i < 5; ++i) model.epsilon[i] = sol.coeffs[4 + i];
    model.k_gamma = sol.coeffs[9];
  }
  if (!(model.n > 0.0))
    throw NumericError("fitted path loss exponent is not positive (" +
                       fmt17(model.n) + "); model rejected");

  model.sigma_psi_db = sample_std(sol.residuals);

  auto& d = model.diagnostics;
  d.n_train = n_rows;
  const double ss_res =
      kernels::dot(sol.residuals.data(), sol.residuals.data(), n_rows);
  d.train_rmse_db = std::sqrt(ss_res / static_cast<double>(n_rows));
  double ss_tot = 0.0, m3 = 0.0;
  kernels::centered_moments(design.y.data(), mean_of(design.y), n_rows, ss_tot,
                            m3);
  d.train_r2_defined = ss_tot > 0.0;
  d.train_r2 = d.train_r2_defined
                   ? 1.0 - ss_res / ss_tot
                   : std::numeric_limits<double>::quiet_NaN();
  d.residual_skewness = sample_skewness(sol.residuals);
  d.cv_folds = cv_folds_run;
  d.cv_rmse_mean_db = cv_mean;
  d.cv_rmse_std_db = cv_std;
  d.condition_number = sol.condition;
  return model;
}

void attach_test_metrics(ModelCoefficients& model,
                         std::span<const UplinkRecord> test,
                         const GeometryMap& geometry, const FitParams& params) {
  if (test.empty()) return;
  auto design = build_design_matrix(test, geometry, model.variant,
                                    params.tx_power_dbm, params.filter);
  const auto pred = matvec(design.x, model.column_coefficients());
  const auto m = regression_metrics(pred, design.y);
  model.diagnostics.n_test = test.size();
  model.diagnostics.test_rmse_db = m.rmse;
  model.diagnostics.test_r2 = m.r2;
  model.diagnostics.test_r2_defined = m.r2_defined;
  model.diagnostics.has_test = true;
}

namespace {

constexpr const char* kSchema = "mwm-ep/1";

void put(std::ostream& out, const std::string& key, const std::string& value) {
  out << key << '=' << value << '\n';
}

void put_r2(std::ostream& out, const std::string& key, double value,
            bool defined) {
  put(out, key, defined ? fmt17(value) : "undefined");
}

}  // namespace

void save_model(const ModelCoefficients& model, std::ostream& out) {
  put(out, "schema", kSchema);
  put(out, "variant", model.variant.name());
  put(out, "rssi_source",
      model.variant.rssi_source == RssiSource::filtered ? "filtered" : "raw");
  put(out, "columns", columns_string(model.variant));
  put(out, "d0_m", fmt17(model.d0_m));
  put(out, "tx_power_dbm", fmt17(model.tx_power_dbm));
  put(out, "beta0_db", fmt17(model.beta0_db));
  put(out, "n", fmt17(model.n));
  put(out, "omega_brick_db", fmt17(model.omega_db[0]));
  put(out, "omega_wood_db", fmt17(model.omega_db[1]));
  put(out, "eps_temperature_db_per_c", fmt17(model.epsilon[0]));
  put(out, "eps_humidity_db_per_pct", fmt17(model.epsilon[1]));
  put(out, "eps_co2_db_per_ppm", fmt17(model.epsilon[2]));
  put(out, "eps_pm25_db_per_ugm3", fmt17(model.epsilon[3]));
  put(out, "eps_pressure_db_per_hpa", fmt17(model.epsilon[4]));
  put(out, "k_gamma_db_per_db", fmt17(model.k_gamma));
  put(out, "sigma_psi_db", fmt17(model.sigma_psi_db));
  out << "[diagnostics]\n";
  const auto& d = model.diagnostics;
  put(out, "n_train", std::to_string(d.n_train));
  put(out, "n_test", std::to_string(d.n_test));
  put(out, "train_rmse_db", fmt17(d.train_rmse_db));
  put_r2(out, "train_r2", d.train_r2, d.train_r2_defined);
  put(out, "test_rmse_db", d.has_test ? fmt17(d.test_rmse_db) : "none");
  put_r2(out, "test_r2", d.test_r2, d.has_test && d.test_r2_defined);
  put(out, "residual_skewness", fmt17(d.residual_skewness));
  put(out, "cv_folds", std::to_string(d.cv_folds));
  put(out, "cv_rmse_mean_db", fmt17(d.cv_rmse_mean_db));
  put(out, "cv_rmse_std_db", fmt17(d.cv_rmse_std_db));
  put(out, "condition_number", fmt17(d.condition_number));
}

ModelCoefficients load_model(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("model file: malformed line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto need = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end())
      throw DataError("model file: missing key '" + key + "'");
    return it->second;
  };
  auto num = [&](const std::string& key) {
    const std::string& s = need(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
      throw DataError("model file: unparsable value for '" + key + "'");
    return v;
  };

  if (need("schema") != kSchema)
    throw DataError("model file: unsupported schema '" + need("schema") + "'");
  ModelCoefficients model;
  model.variant = ModelVariant::from_name(need("variant"));
  if (need("columns") != columns_string(model.variant))
    throw DataError("model file: column order mismatch for variant " +
                    model.variant.name());
  const std::string& src = need("rssi_source");
  if (src != (model.variant.rssi_source == RssiSource::filtered ? "filtered"
                                                                : "raw"))
    throw DataError("model file: rssi_source inconsistent with variant");

  model.d0_m = num("d0_m");
  model.tx_power_dbm = num("tx_power_dbm");
  model.beta0_db = num("beta0_db");
  model.n = num("n");
  model.omega_db = {num("omega_brick_db"), num("omega_wood_db")};
  model.epsilon = {num("eps_temperature_db_per_c"),
                   num("eps_humidity_db_per_pct"), num("eps_co2_db_per_ppm"),
                   num("eps_pm25_db_per_ugm3"), num("eps_pressure_db_per_hpa")};
  model.k_gamma = num("k_gamma_db_per_db");
  model.sigma_psi_db = num("sigma_psi_db");
  if (!(model.n > 0.0))
    throw NumericError("model file: non-positive path loss exponent");

  auto& d = model.diagnostics;
  d.n_train = static_cast<std::size_t>(num("n_train"));
  d.n_test = static_cast<std::size_t>(num("n_test"));
  d.train_rmse_db = num("train_rmse_db");
  d.train_r2_defined = need("train_r2") != "undefined";
  d.train_r2 = d.train_r2_defined
                   ? num("train_r2")
                   : std::numeric_limits<double>::quiet_NaN();
  d.has_test = need("test_rmse_db") != "none";
  d.test_rmse_db = d.has_test ? num("test_rmse_db") : 0.0;
  d.test_r2_defined = need("test_r2") != "undefined";
  d.test_r2 = d.test_r2_defined ? num("test_r2")
                                : std::numeric_limits<double>::quiet_NaN();
  d.residual_skewness = num("residual_skewness");
  d.cv_folds = static_cast<int>(num("cv_folds"));
  d.cv_rmse_mean_db = num("cv_rmse_mean_db");
  d.cv_rmse_std_db = num("cv_rmse_std_db");
  d.condition_number = num("condition_number");
  return model;
}

}  // namespace lorange
