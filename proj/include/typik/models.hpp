#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "typik/dataset.hpp"
#include "typik/models/lecam.hpp"
#include "typik/models/neyman_scott.hpp"
#include "typik/models/stein.hpp"

namespace typik {

enum class ModelId { lecam, neyman_scott, stein };

inline const char* model_name(ModelId id) {
  switch (id) {
    case ModelId::lecam: return "lecam";
    case ModelId::neyman_scott: return "neyman_scott";
    case ModelId::stein: return "stein";
  }
  return "?";
}

enum class NsGofKind { chisq, ks_full };

// Registered model: id, exposed parameter dimension, fixed constants and
// capability flags.
struct ModelSpec {
  ModelId id = ModelId::stein;
  int param_dim = 1;
  std::size_t n = 0;          // sample size / pair count / dimension
  double lecam_alpha = 1e-50;
  NsGofKind ns_gof = NsGofKind::chisq;
  bool has_profile_nuisance = false;
  bool has_marginal_loglik = false;
};

inline ModelSpec make_lecam(std::size_t n, double alpha = 1e-50) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("make_lecam: alpha must be in (0,1)");
  if (n < 1) throw std::domain_error("make_lecam: n must be >= 1");
  return {ModelId::lecam, 2, n, alpha, NsGofKind::chisq, false, false};
}

inline ModelSpec make_neyman_scott(std::size_t n,
                                   NsGofKind gof = NsGofKind::chisq) {
  if (n < 2) throw std::domain_error("make_neyman_scott: n must be >= 2");
  return {ModelId::neyman_scott, 1, n, 1e-50, gof, true, false};
}

inline ModelSpec make_stein(std::size_t n) {
  if (n < 1) throw std::domain_error("make_stein: n must be >= 1");
  return {ModelId::stein, 1, n, 1e-50, NsGofKind::chisq, true, true};
}

// Named parameter vector for a registered model.
struct ParamPoint {
  ModelId model_id = ModelId::stein;
  std::vector<double> coords;
  std::vector<std::string> names;
};

inline ParamPoint lecam_point(double mu, double sigma2) {
  return {ModelId::lecam, {mu, sigma2}, {"mu", "sigma2"}};
}
inline ParamPoint ns_point(double sigma2) {
  return {ModelId::neyman_scott, {sigma2}, {"sigma2"}};
}
inline ParamPoint stein_point(double phi) {
  return {ModelId::stein, {phi}, {"phi"}};
}

inline void validate(const ModelSpec& spec, const ParamPoint& theta) {
  if (theta.model_id != spec.id)
    throw std::domain_error("ParamPoint: model mismatch");
  if (static_cast<int>(theta.coords.size()) != spec.param_dim)
    throw std::domain_error("ParamPoint: wrong dimension");
  switch (spec.id) {
    case ModelId::lecam:
      if (!(theta.coords[1] > 0.0))
        throw std::domain_error("ParamPoint: sigma2 must be > 0");
      break;
    case ModelId::neyman_scott:
      if (!(theta.coords[0] > 0.0))
        throw std::domain_error("ParamPoint: sigma2 must be > 0");
      break;
    case ModelId::stein:
      if (!(theta.coords[0] >= 0.0))
        throw std::domain_error("ParamPoint: phi must be >= 0");
      break;
  }
}

inline void validate_data(const ModelSpec& spec, const Dataset& x) {
  x.check();
  switch (spec.id) {
    case ModelId::lecam:
      if (x.shape != DataShape::scalar_sample)
        throw std::domain_error("lecam expects a scalar sample");
      break;
    case ModelId::neyman_scott:
      if (x.shape != DataShape::paired_sample)
        throw std::domain_error("neyman_scott expects a paired sample");
      break;
    case ModelId::stein:
      if (x.shape != DataShape::vector_observation)
        throw std::domain_error("stein expects a single vector observation");
      break;
  }
}

// Per-dataset cached statistics; computed once, shared by grid scans.
struct SuffStats {
  double mean = 0.0;        // lecam: sample mean
  double sigma2_hat = 0.0;  // ns: pooled within-pair variance estimate
  std::vector<double> xi_hat;
  double r = 0.0;  // stein: |x|
  double s = 0.0;  // stein: |x|^2
};

inline SuffStats prepare(const ModelSpec& spec, const Dataset& x) {
  validate_data(spec, x);
  SuffStats st;
  switch (spec.id) {
    case ModelId::lecam:
      st.mean = std::accumulate(x.values.begin(), x.values.end(), 0.0) /
                static_cast<double>(x.n);
      break;
    case ModelId::neyman_scott: {
      ns::Profile p = ns::profile(x);
      st.sigma2_hat = p.sigma2_hat;
      st.xi_hat = std::move(p.xi_hat);
      break;
    }
    case ModelId::stein:
      st.s = stein::squared_length(x);
      st.r = std::sqrt(st.s);
      break;
  }
  return st;
}

// Reusable scratch buffers for the PIT/sort paths; one per worker.
struct Workspace {
  std::vector<double> buf;
};

inline double loglik(const ModelSpec& spec, const Dataset& x,
                     const SuffStats& st, const ParamPoint& theta) {
  validate(spec, theta);
  switch (spec.id) {
    case ModelId::lecam:
      return lecam::loglik(x, theta.coords[0], theta.coords[1],
                           spec.lecam_alpha);
    case ModelId::neyman_scott:
      return ns::loglik(x.n, st.sigma2_hat, theta.coords[0]);
    case ModelId::stein:
      return stein::profile_loglik(st.r, theta.coords[0]);
  }
  throw std::logic_error("loglik: unreachable");
}

inline PValue gof_pvalue(const ModelSpec& spec, const Dataset& x,
                         const SuffStats& st, const ParamPoint& theta,
                         Workspace& ws) {
  validate(spec, theta);
  switch (spec.id) {
    case ModelId::lecam:
      return lecam::gof_pvalue(x, theta.coords[0], theta.coords[1],
                               spec.lecam_alpha, ws.buf);
    case ModelId::neyman_scott:
      if (spec.ns_gof == NsGofKind::ks_full) {
        ns::Profile prof{st.xi_hat, st.sigma2_hat};
        return ns::gof_pvalue_ks_full(x, prof, theta.coords[0], ws.buf);
      }
      return ns::gof_pvalue(x.n, st.sigma2_hat, theta.coords[0]);
    case ModelId::stein:
      return stein::gof_pvalue(st.s, theta.coords[0],
                               static_cast<int>(spec.n));
  }
  throw std::logic_error("gof_pvalue: unreachable");
}

// Draw a dataset from P_theta.  For neyman_scott the profiled exposure
// samples with the nuisance means at zero; every statistic the library
// computes depends only on within-pair differences, whose law is free of
// them.  For stein the mean points along the first axis, likewise WLOG.
inline Dataset sample(const ModelSpec& spec, const ParamPoint& theta,
                      RngStream& stream) {
  validate(spec, theta);
  switch (spec.id) {
    case ModelId::lecam:
      return lecam::sample(spec.n, theta.coords[0], theta.coords[1],
                           spec.lecam_alpha, stream);
    case ModelId::neyman_scott: {
      std::vector<double> xi(spec.n, 0.0);
      return ns::sample(xi, theta.coords[0], stream);
    }
    case ModelId::stein:
      return stein::sample(static_cast<int>(spec.n), theta.coords[0], stream);
  }
  throw std::logic_error("sample: unreachable");
}

}  // namespace typik
