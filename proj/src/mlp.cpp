#include "f2gan/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "f2gan/kernels.hpp"

namespace f2gan {

Tensor2D matmul(const Tensor2D& a, const Tensor2D& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: inner dims differ");
  Tensor2D c(a.rows, b.cols);
  kernels::ops().matmul(a.data.data(), b.data.data(), c.data.data(), a.rows,
                        a.cols, b.cols);
  return c;
}

Tensor2D transpose(const Tensor2D& t) {
  Tensor2D out(t.cols, t.rows);
  for (std::size_t i = 0; i < t.rows; ++i)
    for (std::size_t j = 0; j < t.cols; ++j) out(j, i) = t(i, j);
  return out;
}

bool all_finite(const Tensor2D& t) {
  for (double v : t.data)
    if (!std::isfinite(v)) return false;
  return true;
}

std::size_t MLPModel::param_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

void MLPModel::validate() const {
  if (layers.empty()) throw std::invalid_argument("MLPModel: no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    if (l.bias.size() != l.weight.cols)
      throw std::invalid_argument("MLPModel: bias/weight dim mismatch");
    if (i > 0 && layers[i - 1].weight.cols != l.weight.rows)
      throw std::invalid_argument("MLPModel: layer dims do not chain");
    if (l.act == Activation::leaky_relu && !(l.slope > 0.0))
      throw std::invalid_argument("MLPModel: leaky_relu slope must be > 0");
  }
}

MLPModel make_mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                  std::size_t output_dim, Activation hidden_act,
                  Activation out_act, std::mt19937_64& rng, double slope,
                  double out_scale) {
  MLPModel model;
  std::vector<std::size_t> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output_dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    Layer l;
    const std::size_t fan_in = dims[i];
    const std::size_t fan_out = dims[i + 1];
    const bool is_head = (i + 2 == dims.size());
    double std_dev = std::sqrt(2.0 / double(fan_in + fan_out));
    if (is_head) std_dev *= out_scale;
    l.weight = Tensor2D(fan_in, fan_out);
    for (double& w : l.weight.data) w = std_dev * normal(rng);
    l.bias.assign(fan_out, 0.0);
    l.act = is_head ? out_act : hidden_act;
    l.slope = slope;
    model.layers.push_back(std::move(l));
  }
  model.validate();
  return model;
}

namespace {

void apply_activation(Tensor2D& x, Activation act, double slope) {
  const auto& k = kernels::ops();
  switch (act) {
    case Activation::relu:
      k.relu(x.data.data(), x.size());
      break;
    case Activation::leaky_relu:
      k.leaky_relu(x.data.data(), slope, x.size());
      break;
    case Activation::tanh:
      for (double& v : x.data) v = std::tanh(v);
      break;
    case Activation::sigmoid:
      for (double& v : x.data) v = 1.0 / (1.0 + std::exp(-v));
      break;
    case Activation::linear:
      break;
  }
}

// grad *= act'(z), with act' derived from the post-activation value a.
void apply_activation_grad(const Tensor2D& a, Activation act, double slope,
                           Tensor2D& grad) {
  const auto& k = kernels::ops();
  switch (act) {
    case Activation::relu:
      k.relu_grad(a.data.data(), grad.data.data(), a.size());
      break;
    case Activation::leaky_relu:
      k.leaky_relu_grad(a.data.data(), slope, grad.data.data(), a.size());
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < a.size(); ++i)
        grad.data[i] *= 1.0 - a.data[i] * a.data[i];
      break;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < a.size(); ++i)
        grad.data[i] *= a.data[i] * (1.0 - a.data[i]);
      break;
    case Activation::linear:
      break;
  }
}

}  // namespace

Tensor2D forward(const MLPModel& model, const Tensor2D& batch,
                 ForwardCache* cache) {
  model.validate();
  if (batch.cols != model.input_dim())
    throw std::invalid_argument("forward: batch width != model input dim");
  if (cache) {
    cache->acts.clear();
    cache->acts.push_back(batch);
  }
  Tensor2D x = batch;
  for (const Layer& l : model.layers) {
    Tensor2D y(x.rows, l.weight.cols);
    kernels::ops().matmul(x.data.data(), l.weight.data.data(), y.data.data(),
                          x.rows, x.cols, l.weight.cols);
    kernels::ops().add_bias(y.data.data(), l.bias.data(), y.rows, y.cols);
    apply_activation(y, l.act, l.slope);
    if (cache) cache->acts.push_back(y);
    x = std::move(y);
  }
  return x;
}

Gradients backward(const MLPModel& model, const ForwardCache& cache,
                   const Tensor2D& output_grad, Tensor2D* input_grad) {
  const std::size_t L = model.layers.size();
  if (cache.acts.size() != L + 1)
    throw std::logic_error("backward: cache does not match model");
  for (std::size_t i = 0; i < L; ++i) {
    if (cache.acts[i].cols != model.layers[i].weight.rows ||
        cache.acts[i + 1].cols != model.layers[i].weight.cols)
      throw std::logic_error("backward: stale cache");
  }
  if (!output_grad.same_shape(cache.acts.back()))
    throw std::invalid_argument("backward: output_grad shape mismatch");

  Gradients grads;
  grads.weights.resize(L);
  grads.biases.resize(L);

  Tensor2D delta = output_grad;
  for (std::size_t li = L; li-- > 0;) {
    const Layer& l = model.layers[li];
    apply_activation_grad(cache.acts[li + 1], l.act, l.slope, delta);

    const Tensor2D xT = transpose(cache.acts[li]);
    grads.weights[li] = matmul(xT, delta);
    std::vector<double>& db = grads.biases[li];
    db.assign(l.weight.cols, 0.0);
    for (std::size_t r = 0; r < delta.rows; ++r)
      for (std::size_t c = 0; c < delta.cols; ++c) db[c] += delta(r, c);

    const Tensor2D wT = transpose(l.weight);
    Tensor2D dx = matmul(delta, wT);
    if (li == 0) {
      if (input_grad) *input_grad = std::move(dx);
    } else {
      delta = std::move(dx);
    }
  }
  return grads;
}

std::vector<double> flatten_params(const MLPModel& model) {
  std::vector<double> flat;
  flat.reserve(model.param_count());
  for (const Layer& l : model.layers) {
    flat.insert(flat.end(), l.weight.data.begin(), l.weight.data.end());
    flat.insert(flat.end(), l.bias.begin(), l.bias.end());
  }
  return flat;
}

void unflatten_params(MLPModel& model, const std::vector<double>& flat) {
  if (flat.size() != model.param_count())
    throw std::invalid_argument("unflatten_params: size mismatch");
  std::size_t off = 0;
  for (Layer& l : model.layers) {
    std::copy(flat.begin() + off, flat.begin() + off + l.weight.size(),
              l.weight.data.begin());
    off += l.weight.size();
    std::copy(flat.begin() + off, flat.begin() + off + l.bias.size(),
              l.bias.begin());
    off += l.bias.size();
  }
}

std::vector<double> flatten_grads(const Gradients& g) {
  std::vector<double> flat;
  for (std::size_t i = 0; i < g.weights.size(); ++i) {
    flat.insert(flat.end(), g.weights[i].data.begin(), g.weights[i].data.end());
    flat.insert(flat.end(), g.biases[i].begin(), g.biases[i].end());
  }
  return flat;
}

}  // namespace f2gan
