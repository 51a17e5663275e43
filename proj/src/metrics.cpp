#include "stylos/metrics.hpp"

#include <algorithm>

#include "stylos/error.hpp"

namespace stylos::tasks {

Metrics evaluate(const std::vector<int>& predictions, const std::vector<int>& gold,
                 Averaging scheme, int n_classes) {
  if (predictions.size() != gold.size()) {
    throw Error(ErrorCode::LengthMismatch, "predictions and gold differ in length");
  }
  if (gold.empty()) throw Error(ErrorCode::EmptyTestSet, "nothing to evaluate");
  if (n_classes <= 0) {
    n_classes = 1 + std::max(*std::max_element(gold.begin(), gold.end()),
                             *std::max_element(predictions.begin(), predictions.end()));
    n_classes = std::max(n_classes, 2);
  }

  Metrics m;
  m.scheme = scheme;
  std::vector<int> tp(n_classes, 0), pred_count(n_classes, 0), gold_count(n_classes, 0);
  int correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int p = predictions[i], g = gold[i];
    if (p < 0 || p >= n_classes || g < 0 || g >= n_classes) {
      throw Error(ErrorCode::InvalidArgument, "label outside [0, n_classes)");
    }
    ++pred_count[p];
    ++gold_count[g];
    if (p == g) {
      ++tp[p];
      ++correct;
    }
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());

  for (int c = 0; c < n_classes; ++c) {
    ClassMetrics cm;
    cm.label = c;
    cm.support = gold_count[c];
    cm.predicted = pred_count[c];
    cm.precision_undefined = pred_count[c] == 0;
    cm.recall_undefined = gold_count[c] == 0;
    cm.precision = cm.precision_undefined ? 0.0 : static_cast<double>(tp[c]) / pred_count[c];
    cm.recall = cm.recall_undefined ? 0.0 : static_cast<double>(tp[c]) / gold_count[c];
    const double denom = cm.precision + cm.recall;
    cm.f1 = denom > 0.0 ? 2.0 * cm.precision * cm.recall / denom : 0.0;
    m.per_class.push_back(cm);
  }

  switch (scheme) {
    case Averaging::Binary: {
      const auto& pos = m.per_class.at(1);
      m.precision = pos.precision;
      m.recall = pos.recall;
      m.f1 = pos.f1;
      m.has_undefined = pos.precision_undefined || pos.recall_undefined;
      break;
    }
    case Averaging::Macro:
    case Averaging::Weighted: {
      double total_weight = 0.0;
      for (const auto& cm : m.per_class) {
        const double w = scheme == Averaging::Macro ? 1.0 : static_cast<double>(cm.support);
        m.precision += w * cm.precision;
        m.recall += w * cm.recall;
        m.f1 += w * cm.f1;
        total_weight += w;
        m.has_undefined = m.has_undefined || cm.precision_undefined || cm.recall_undefined;
      }
      m.precision /= total_weight;
      m.recall /= total_weight;
      m.f1 /= total_weight;
      break;
    }
  }
  return m;
}

}  // namespace stylos::tasks
