#include "f2gan/aggregation.hpp"

#include <cmath>
#include <stdexcept>

namespace f2gan {

const char* strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::f2u: return "f2u";
    case StrategyKind::f2a: return "f2a";
    case StrategyKind::mdgan: return "mdgan";
    case StrategyKind::gman_star: return "gman_star";
    case StrategyKind::gman0: return "gman0";
    case StrategyKind::fixed_lambda: return "fixed_lambda";
    case StrategyKind::centralized: return "centralized";
  }
  return "?";
}

StrategyKind strategy_from_name(const std::string& name) {
  if (name == "f2u") return StrategyKind::f2u;
  if (name == "f2a") return StrategyKind::f2a;
  if (name == "mdgan") return StrategyKind::mdgan;
  if (name == "gman_star") return StrategyKind::gman_star;
  if (name == "gman0") return StrategyKind::gman0;
  if (name == "fixed_lambda") return StrategyKind::fixed_lambda;
  if (name == "centralized") return StrategyKind::centralized;
  throw std::invalid_argument("unknown strategy: " + name);
}

bool strategy_trains_lambda(StrategyKind k) {
  return k == StrategyKind::f2a || k == StrategyKind::gman_star;
}

F2USelection f2u_select(const JudgmentBatch& j) {
  const std::size_t n = j.num_clients();
  const std::size_t b = j.batch();
  if (n == 0) throw std::invalid_argument("f2u_select: no clients");
  F2USelection sel;
  sel.d_max.resize(b);
  sel.argmax.resize(b);
  for (std::size_t s = 0; s < b; ++s) {
    double best = j.values(0, s);
    std::size_t bi = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (j.values(i, s) > best) {  // strict: ties keep the lowest index
        best = j.values(i, s);
        bi = i;
      }
    }
    sel.d_max[s] = best;
    sel.argmax[s] = bi;
  }
  return sel;
}

std::vector<double> softmax_weights(std::span<const double> d, double lambda) {
  if (!(lambda >= 0.0))
    throw std::invalid_argument("softmax_weights: lambda must be >= 0");
  const std::size_t n = d.size();
  std::vector<double> s(n);
  double dmax = d[0];
  for (double v : d) dmax = std::max(dmax, v);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::exp(lambda * (d[i] - dmax));
    sum += s[i];
  }
  for (double& v : s) v /= sum;
  return s;
}

std::vector<double> f2a_aggregate(const JudgmentBatch& j, double lambda) {
  if (!(lambda >= 0.0))
    throw std::invalid_argument("f2a_aggregate: lambda must be >= 0");
  const std::size_t n = j.num_clients();
  const std::size_t b = j.batch();
  std::vector<double> out(b);
  std::vector<double> col(n);
  for (std::size_t s = 0; s < b; ++s) {
    if (lambda == 0.0) {
      // uniform weights: compute the mean directly so it is exact
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += j.values(i, s);
      out[s] = acc / double(n);
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) col[i] = j.values(i, s);
    const std::vector<double> w = softmax_weights(col, lambda);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * col[i];
    out[s] = acc;
  }
  return out;
}

std::vector<double> dagg_dlambda(const JudgmentBatch& j, double lambda) {
  const std::size_t n = j.num_clients();
  const std::size_t b = j.batch();
  std::vector<double> out(b);
  std::vector<double> col(n);
  for (std::size_t s = 0; s < b; ++s) {
    for (std::size_t i = 0; i < n; ++i) col[i] = j.values(i, s);
    const std::vector<double> w = softmax_weights(col, lambda);
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      m1 += w[i] * col[i];
      m2 += w[i] * col[i] * col[i];
    }
    out[s] = m2 - m1 * m1;  // weighted variance, always >= 0
  }
  return out;
}

std::vector<double> dagg_ddi(const JudgmentBatch& j, double lambda,
                             std::size_t client) {
  const std::size_t n = j.num_clients();
  const std::size_t b = j.batch();
  if (client >= n) throw std::invalid_argument("dagg_ddi: bad client index");
  std::vector<double> out(b);
  std::vector<double> col(n);
  for (std::size_t s = 0; s < b; ++s) {
    for (std::size_t i = 0; i < n; ++i) col[i] = j.values(i, s);
    const std::vector<double> w = softmax_weights(col, lambda);
    double dagg = 0.0;
    for (std::size_t i = 0; i < n; ++i) dagg += w[i] * col[i];
    out[s] = w[client] + lambda * w[client] * (col[client] - dagg);
  }
  return out;
}

double lambda_gradient(std::span<const double> loss_grad,
                       const JudgmentBatch& j, const LambdaParam& lam) {
  if (loss_grad.size() != j.batch())
    throw std::invalid_argument("lambda_gradient: loss_grad size mismatch");
  if (lam.lambda_star < 0.0) return 0.0;  // ReLU gate closed
  const double lambda = lam.lambda();
  const std::vector<double> var = dagg_dlambda(j, lambda);
  double g = 0.0;
  for (std::size_t s = 0; s < var.size(); ++s) g += loss_grad[s] * var[s];
  return g + 2.0 * lam.beta * lambda;
}

GmanResult gman_aggregate(std::span<const double> client_losses,
                          double lambda) {
  if (client_losses.empty())
    throw std::invalid_argument("gman_aggregate: no losses");
  GmanResult res;
  res.weights = softmax_weights(client_losses, lambda);
  for (std::size_t i = 0; i < client_losses.size(); ++i)
    res.loss += res.weights[i] * client_losses[i];
  return res;
}

std::size_t mdgan_schedule(std::size_t round, std::size_t num_clients) {
  if (num_clients < 1)
    throw std::invalid_argument("mdgan_schedule: need >= 1 client");
  return round % num_clients;
}

}  // namespace f2gan
