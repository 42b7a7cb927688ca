#include "geopulse/trigger/model.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "geopulse/core/error.h"
#include "geopulse/trigger/stats.h"

namespace geopulse::trigger {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

double affine_score(std::span<const double> w, std::span<const double> x) {
  double z = w[x.size()];
  for (std::size_t i = 0; i < x.size(); ++i) z += w[i] * x[i];
  return z;
}

double loss_and_gradient(std::span<const std::vector<double>> x, std::span<const int> y,
                         std::span<const double> w, double l2, std::vector<double>* grad) {
  if (x.size() != y.size() || x.empty()) {
    throw Error(ErrorCode::invalid_argument, "loss_and_gradient: need matching, non-empty x and y");
  }
  const std::size_t d = w.size() - 1;
  const double n = static_cast<double>(x.size());
  if (grad) grad->assign(w.size(), 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double z = affine_score(w, x[i]);
    loss += softplus(z) - y[i] * z;
    if (grad) {
      double r = (sigmoid(z) - y[i]) / n;
      for (std::size_t j = 0; j < d; ++j) (*grad)[j] += r * x[i][j];
      (*grad)[d] += r;
    }
  }
  loss /= n;
  double sq = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    sq += w[j] * w[j];
    if (grad) (*grad)[j] += l2 * w[j];
  }
  return loss + 0.5 * l2 * sq;
}

std::vector<double> scale(const TriggerModel& model, const FeatureWindow& window) {
  if (window.terms != model.terms || window.window != model.window) {
    throw Error(ErrorCode::invalid_argument, "window layout does not match the model");
  }
  const std::size_t k = model.terms.size();
  std::vector<double> x(window.features.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lo = model.scale_min[i % k];
    double hi = model.scale_max[i % k];
    x[i] = hi > lo ? (window.features[i] - lo) / (hi - lo) : 0.0;
  }
  return x;
}

TriggerModel train(std::span<const FeatureWindow> windows, const TrainOptions& opts,
                   std::vector<double>* loss_history) {
  if (windows.empty()) throw Error(ErrorCode::invalid_argument, "train: no windows");
  std::size_t pos = 0;
  for (const auto& w : windows) pos += w.label ? 1 : 0;
  if (pos == 0 || pos == windows.size()) {
    throw Error(ErrorCode::invalid_argument,
                "train: training set has a single class; add data covering both event and quiet periods");
  }
  TriggerModel m;
  m.terms = windows.front().terms;
  m.window = windows.front().window;
  m.options = opts;
  const std::size_t k = m.terms.size();
  m.scale_min.assign(k, INFINITY);
  m.scale_max.assign(k, -INFINITY);
  for (const auto& w : windows) {
    if (w.terms != m.terms || w.window != m.window) {
      throw Error(ErrorCode::invalid_argument, "train: windows have different layouts");
    }
    for (std::size_t i = 0; i < w.features.size(); ++i) {
      m.scale_min[i % k] = std::min(m.scale_min[i % k], w.features[i]);
      m.scale_max[i % k] = std::max(m.scale_max[i % k], w.features[i]);
    }
  }
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  x.reserve(windows.size());
  for (const auto& w : windows) {
    x.push_back(scale(m, w));
    y.push_back(w.label ? 1 : 0);
  }
  m.weights.assign(m.dimension() + 1, 0.0);
  std::vector<double> grad;
  if (loss_history) loss_history->clear();
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    double loss = loss_and_gradient(x, y, m.weights, opts.l2, &grad);
    if (loss_history) loss_history->push_back(loss);
    for (std::size_t j = 0; j < m.weights.size(); ++j) m.weights[j] -= opts.learning_rate * grad[j];
  }
  if (loss_history) loss_history->push_back(loss_and_gradient(x, y, m.weights, opts.l2, nullptr));
  return m;
}

double predict(const TriggerModel& model, const FeatureWindow& window) {
  return sigmoid(affine_score(model.weights, scale(model, window)));
}

bool fires(const TriggerModel& model, const FeatureWindow& window) {
  return predict(model, window) >= model.threshold;
}

nlohmann::json to_json(const TriggerModel& m) {
  return {{"terms", m.terms},
          {"window", m.window},
          {"weights", m.weights},
          {"scale_min", m.scale_min},
          {"scale_max", m.scale_max},
          {"learning_rate", m.options.learning_rate},
          {"epochs", m.options.epochs},
          {"l2", m.options.l2},
          {"threshold", m.threshold}};
}

TriggerModel model_from_json(const nlohmann::json& j) {
  try {
    TriggerModel m;
    m.terms = j.at("terms").get<std::vector<std::string>>();
    m.window = j.at("window").get<int>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.scale_min = j.at("scale_min").get<std::vector<double>>();
    m.scale_max = j.at("scale_max").get<std::vector<double>>();
    m.options.learning_rate = j.value("learning_rate", 0.1);
    m.options.epochs = j.value("epochs", 500);
    m.options.l2 = j.value("l2", 1e-3);
    m.threshold = j.value("threshold", 0.5);
    if (m.weights.size() != m.dimension() + 1 || m.scale_min.size() != m.terms.size() ||
        m.scale_max.size() != m.terms.size()) {
      throw Error(ErrorCode::validation, "model arrays do not match terms and window");
    }
    for (std::size_t k = 0; k < m.terms.size(); ++k) {
      if (!(m.scale_min[k] <= m.scale_max[k])) throw Error(ErrorCode::validation, "model scaling has min > max");
    }
    for (double w : m.weights) {
      if (!std::isfinite(w)) throw Error(ErrorCode::validation, "model has non-finite weights");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("malformed model: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const TriggerModel& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << to_json(m).dump() << '\n';
}

TriggerModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::not_found, "model not found: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, "malformed model " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace geopulse::trigger
