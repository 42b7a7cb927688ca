#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "geopulse/trigger/windows.h"

namespace geopulse::trigger {

struct TrainOptions {
  double learning_rate = 0.1;
  int epochs = 500;
  double l2 = 1e-3;
};

// L2-regularized logistic regression on the flattened, min-max scaled window.
struct TriggerModel {
  std::vector<std::string> terms;
  int window = 24;
  std::vector<double> weights;  // window * terms.size() features, then bias
  std::vector<double> scale_min;  // per term, over log1p counts
  std::vector<double> scale_max;
  TrainOptions options;
  double threshold = 0.5;

  std::size_t dimension() const { return static_cast<std::size_t>(window) * terms.size(); }
};

// Mean log-loss plus (l2/2)|w|^2 over the non-bias weights. x rows have the
// model dimension; w carries the bias last. Fills grad when non-null.
double loss_and_gradient(std::span<const std::vector<double>> x, std::span<const int> y,
                         std::span<const double> w, double l2, std::vector<double>* grad);

double affine_score(std::span<const double> w, std::span<const double> x);

// Scaled feature vector for the window under the model's bounds.
std::vector<double> scale(const TriggerModel& model, const FeatureWindow& window);

// Throws invalid_argument unless both classes are present. loss_history,
// when given, receives the loss before each epoch and after the last one.
TriggerModel train(std::span<const FeatureWindow> windows, const TrainOptions& opts = {},
                   std::vector<double>* loss_history = nullptr);

double predict(const TriggerModel& model, const FeatureWindow& window);
bool fires(const TriggerModel& model, const FeatureWindow& window);

nlohmann::json to_json(const TriggerModel& m);
TriggerModel model_from_json(const nlohmann::json& j);
void save_model(const std::filesystem::path& path, const TriggerModel& m);
TriggerModel load_model(const std::filesystem::path& path);

}  // namespace geopulse::trigger
