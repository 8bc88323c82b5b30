#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace typik {

enum class DataShape { scalar_sample, paired_sample, vector_observation };

// Observed data.  For paired_sample the values are stored pair-major:
// (x_11, x_12, x_21, x_22, ...) and n counts pairs; for vector_observation
// n is the dimension of the single observed vector.
struct Dataset {
  DataShape shape = DataShape::scalar_sample;
  std::vector<double> values;
  std::size_t n = 0;

  void check() const {
    const std::size_t expect =
        shape == DataShape::paired_sample ? 2 * n : n;
    if (values.size() != expect)
      throw std::domain_error("Dataset: values length inconsistent with n");
    if (n == 0) throw std::domain_error("Dataset: empty");
  }

  static Dataset scalar(std::vector<double> v) {
    Dataset d{DataShape::scalar_sample, std::move(v), 0};
    d.n = d.values.size();
    d.check();
    return d;
  }
  static Dataset paired(std::vector<double> v) {
    if (v.size() % 2 != 0)
      throw std::domain_error("Dataset: paired sample needs an even value count");
    Dataset d{DataShape::paired_sample, std::move(v), 0};
    d.n = d.values.size() / 2;
    d.check();
    return d;
  }
  static Dataset vector_obs(std::vector<double> v) {
    Dataset d{DataShape::vector_observation, std::move(v), 0};
    d.n = d.values.size();
    d.check();
    return d;
  }

  std::pair<double, double> pair(std::size_t i) const {
    return {values[2 * i], values[2 * i + 1]};
  }
};

}  // namespace typik
