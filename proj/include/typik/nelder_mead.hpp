#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace typik {

struct NelderMeadOptions {
  int max_iter = 400;
  double xtol = 1e-8;  // simplex diameter, relative
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t evaluations = 0;
};

// Derivative-free simplex maximization with box constraints enforced by
// clipping every candidate vertex into [lo, hi].  Deterministic: ties in the
// vertex ordering are broken by index.
template <typename F>
NelderMeadResult nelder_mead_maximize(F&& f, std::span<const double> start,
                                      std::span<const double> step,
                                      std::span<const double> lo,
                                      std::span<const double> hi,
                                      const NelderMeadOptions& opt = {}) {
  const std::size_t d = start.size();
  const auto clip = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < d; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  };

  std::size_t evals = 0;
  std::vector<std::vector<double>> verts(d + 1,
                                         std::vector<double>(start.begin(), start.end()));
  for (std::size_t i = 0; i < d; ++i) {
    verts[i + 1][i] += step[i] != 0.0 ? step[i] : 1e-3;
    clip(verts[i + 1]);
    // a clipped vertex that collapses onto the start point is nudged inward
    if (verts[i + 1][i] == verts[0][i]) {
      verts[i + 1][i] -= step[i] != 0.0 ? step[i] : 1e-3;
      clip(verts[i + 1]);
    }
  }
  std::vector<double> fv(d + 1);
  for (std::size_t i = 0; i <= d; ++i) {
    fv[i] = f(verts[i]);
    ++evals;
  }

  std::vector<std::size_t> order(d + 1);
  const auto sort_order = [&]() {
    for (std::size_t i = 0; i <= d; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] > fv[b]; });
  };

  std::vector<double> centroid(d), cand(d);
  for (int it = 0; it < opt.max_iter; ++it) {
    sort_order();
    const std::size_t best = order[0], worst = order[d];

    // diameter is the sole stopping criterion: vertex values can coincide by
    // symmetry long before the simplex has localized the maximum
    double diam = 0.0;
    for (std::size_t i = 0; i <= d; ++i)
      for (std::size_t c = 0; c < d; ++c)
        diam = std::max(diam, std::fabs(verts[i][c] - verts[best][c]) /
                                  (1.0 + std::fabs(verts[best][c])));
    if (diam < opt.xtol) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (std::size_t c = 0; c < d; ++c) centroid[c] += verts[i][c];
    }
    for (auto& c : centroid) c /= static_cast<double>(d);

    const auto eval_at = [&](double coef) {
      for (std::size_t c = 0; c < d; ++c)
        cand[c] = centroid[c] + coef * (centroid[c] - verts[worst][c]);
      std::vector<double> tmp = cand;
      clip(tmp);
      cand = tmp;
      ++evals;
      return f(cand);
    };

    const double fr = eval_at(1.0);  // reflection
    if (fr > fv[best]) {
      const std::vector<double> xr = cand;
      const double fe = eval_at(2.0);  // expansion
      if (fe > fr) {
        verts[worst] = cand;
        fv[worst] = fe;
      } else {
        verts[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr > fv[order[d - 1]]) {
      verts[worst] = cand;
      fv[worst] = fr;
    } else {
      const double coef = fr > fv[worst] ? 0.5 : -0.5;  // outside/inside contraction
      const double fref = fr > fv[worst] ? fr : fv[worst];
      const double fc = eval_at(coef);
      if (fc > fref) {
        verts[worst] = cand;
        fv[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= d; ++i) {  // shrink toward best
          if (i == best) continue;
          for (std::size_t c = 0; c < d; ++c)
            verts[i][c] = verts[best][c] + 0.5 * (verts[i][c] - verts[best][c]);
          fv[i] = f(verts[i]);
          ++evals;
        }
      }
    }
  }

  sort_order();
  return {verts[order[0]], fv[order[0]], evals};
}

}  // namespace typik
