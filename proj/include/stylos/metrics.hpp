#pragma once

#include <string>
#include <vector>

namespace stylos::tasks {

enum class Averaging { Binary, Macro, Weighted };

struct ClassMetrics {
  int label = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int support = 0;
  int predicted = 0;
  // Set when a ratio had an empty denominator and was reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Averaging scheme = Averaging::Binary;
  std::vector<ClassMetrics> per_class;
  bool has_undefined = false;
};

// Labels are class indices in [0, n_classes). Binary scoring treats 1 as the
// positive class. When n_classes is 0 it is inferred from the data.
Metrics evaluate(const std::vector<int>& predictions, const std::vector<int>& gold,
                 Averaging scheme, int n_classes = 0);

}  // namespace stylos::tasks
