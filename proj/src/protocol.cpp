#include "f2gan/protocol.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace f2gan {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  // splitmix64 over seed ^ tag
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void RunConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("config: batch_size >= 1");
  if (metric_cadence < 1)
    throw std::invalid_argument("config: metric_cadence >= 1");
  if (eval_samples < 1000 || final_eval_samples < 1000)
    throw std::invalid_argument("config: eval sample counts must be >= 1000");
  if (data.classes.empty()) throw std::invalid_argument("config: no classes");
  if (data.num_clients < 1)
    throw std::invalid_argument("config: num_clients >= 1");
  if (strategy == StrategyKind::centralized && data.num_clients != 1)
    throw std::invalid_argument("config: centralized requires num_clients=1");
  if (!(beta >= 0.0)) throw std::invalid_argument("config: beta >= 0");
  if (strategy == StrategyKind::fixed_lambda && !(lambda_fixed >= 0.0))
    throw std::invalid_argument("config: lambda_fixed >= 0");
  for (const auto& c : data.classes) {
    validate_component(c);
    if (component_dim(c) != data.dim)
      throw std::invalid_argument("config: class dim != data dim");
  }
}

namespace {

void refresh_effective(ClientState& c) {
  if (!c.use_spectral_norm) {
    c.effective = c.discriminator;
    return;
  }
  c.effective = c.discriminator;
  for (std::size_t l = 0; l < c.effective.layers.size(); ++l) {
    c.effective.layers[l].weight =
        spectral_normalize_const(c.discriminator.layers[l].weight,
                                 c.sn_states[l])
            .weight;
  }
}

Tensor2D draw_real_batch(ClientState& c, std::size_t n) {
  Tensor2D batch;
  if (c.local_buffer) {
    const Tensor2D& buf = *c.local_buffer;
    batch = Tensor2D(n, buf.cols);
    std::uniform_int_distribution<std::size_t> pick(0, buf.rows - 1);
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t r = pick(c.rng);
      for (std::size_t k = 0; k < buf.cols; ++k) batch(s, k) = buf(r, k);
    }
  } else {
    batch = sample(c.local_distribution, n, c.rng);
  }
  if (c.real_draw_log) c.real_draw_log->push_back(batch);
  return batch;
}

Tensor2D sample_noise(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  Tensor2D z(n, dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : z.data) v = normal(rng);
  return z;
}

void accumulate(Gradients& into, const Gradients& from) {
  for (std::size_t i = 0; i < into.weights.size(); ++i) {
    for (std::size_t k = 0; k < into.weights[i].size(); ++k)
      into.weights[i].data[k] += from.weights[i].data[k];
    for (std::size_t k = 0; k < into.biases[i].size(); ++k)
      into.biases[i][k] += from.biases[i][k];
  }
}

}  // namespace

ClientState make_client(std::size_t id, MLPModel discriminator,
                        ClientDistribution dist, LossSpec loss_spec,
                        bool spectral_norm, const AdamState& opt_template,
                        std::uint64_t seed) {
  ClientState c;
  c.client_id = id;
  c.discriminator = std::move(discriminator);
  c.disc_optimizer =
      make_adam(c.discriminator.param_count(), opt_template.eta,
                opt_template.beta1, opt_template.beta2, opt_template.epsilon);
  c.local_distribution = std::move(dist);
  c.loss_spec = loss_spec;
  c.use_spectral_norm = spectral_norm;
  c.rng.seed(seed);
  if (spectral_norm) {
    for (const Layer& l : c.discriminator.layers)
      c.sn_states.push_back(make_spectral_norm_state(l.weight.cols));
  }
  refresh_effective(c);
  return c;
}

double client_train_step(ClientState& c, const Tensor2D& fake_batch) {
  if (fake_batch.cols != c.discriminator.input_dim())
    throw std::invalid_argument("client_train_step: sample dim mismatch");
  const Tensor2D real = draw_real_batch(c, fake_batch.rows);

  // Training-time model: spectral normalization with one power iteration.
  MLPModel train_model = c.discriminator;
  std::vector<double> sigmas(c.discriminator.layers.size(), 1.0);
  if (c.use_spectral_norm) {
    for (std::size_t l = 0; l < train_model.layers.size(); ++l) {
      auto res = spectral_normalize(c.discriminator.layers[l].weight,
                                    c.sn_states[l]);
      if (res.sigma != 0.0) {
        train_model.layers[l].weight = std::move(res.weight);
        sigmas[l] = res.sigma;
      }
    }
  }

  ForwardCache cache_real, cache_fake;
  const Tensor2D out_real = forward(train_model, real, &cache_real);
  const Tensor2D out_fake = forward(train_model, fake_batch, &cache_fake);
  const LossResult lr = loss_and_grad(c.loss_spec, out_real, c.loss_spec.y_real);
  const LossResult lf = loss_and_grad(c.loss_spec, out_fake, c.loss_spec.y_fake);

  Gradients grads = backward(train_model, cache_real, lr.grad);
  accumulate(grads, backward(train_model, cache_fake, lf.grad));
  if (c.use_spectral_norm) {
    for (std::size_t l = 0; l < grads.weights.size(); ++l)
      for (double& g : grads.weights[l].data) g /= sigmas[l];
  }
  adam_step(c.discriminator, grads, c.disc_optimizer);
  refresh_effective(c);
  return lr.loss + lf.loss;
}

JudgmentReply client_judge(const ClientState& c, const Tensor2D& samples) {
  if (c.effective.output_dim() != 1)
    throw std::invalid_argument("client_judge: discriminator must be scalar");
  ForwardCache cache;
  const Tensor2D out = forward(c.effective, samples, &cache);
  JudgmentReply rep;
  rep.client_id = c.client_id;
  rep.values.assign(out.data.begin(), out.data.end());
  Tensor2D ones(out.rows, 1, 1.0);
  backward(c.effective, cache, ones, &rep.input_grads);
  return rep;
}

GeneratorStepReport server_generator_step(
    ServerState& s, const std::vector<JudgmentReply>& replies,
    const ForwardCache& gen_cache) {
  if (replies.empty()) throw std::runtime_error("generator step: no replies");
  const std::size_t batch = replies.front().values.size();
  const std::size_t dim = replies.front().input_grads.cols;
  JudgmentBatch j;
  j.values = Tensor2D(replies.size(), batch);
  for (std::size_t i = 0; i < replies.size(); ++i) {
    const JudgmentReply& r = replies[i];
    if (r.values.size() != batch || r.input_grads.rows != batch ||
        r.input_grads.cols != dim)
      throw std::runtime_error("generator step: inconsistent replies");
    for (std::size_t k = 0; k < batch; ++k) j.values(i, k) = r.values[k];
    j.input_grads.push_back(r.input_grads);
  }

  const double y = s.loss_spec.y_real_for_g;
  auto as_row = [&](const std::vector<double>& v) {
    Tensor2D t(1, v.size());
    t.data = v;
    return t;
  };

  Tensor2D dldx(batch, dim, 0.0);
  GeneratorStepReport report;
  const StrategyKind kind = s.strategy.kind;
  report.lambda = strategy_trains_lambda(kind) ? s.strategy.lam.lambda()
                  : kind == StrategyKind::fixed_lambda ? s.strategy.fixed_value
                                                       : 0.0;

  switch (kind) {
    case StrategyKind::f2u: {
      const F2USelection sel = f2u_select(j);
      const LossResult lg = loss_and_grad(s.loss_spec, as_row(sel.d_max), y);
      for (std::size_t k = 0; k < batch; ++k) {
        const double coef = lg.grad.data[k];
        const double* gi = j.input_grads[sel.argmax[k]].row(k);
        for (std::size_t d = 0; d < dim; ++d) dldx(k, d) += coef * gi[d];
      }
      report.gen_loss = lg.loss;
      break;
    }
    case StrategyKind::f2a:
    case StrategyKind::fixed_lambda: {
      const double lambda = kind == StrategyKind::f2a
                                ? s.strategy.lam.lambda()
                                : s.strategy.fixed_value;
      const std::vector<double> dagg = f2a_aggregate(j, lambda);
      const LossResult lg = loss_and_grad(s.loss_spec, as_row(dagg), y);
      for (std::size_t i = 0; i < replies.size(); ++i) {
        const std::vector<double> ddi = dagg_ddi(j, lambda, i);
        for (std::size_t k = 0; k < batch; ++k) {
          const double coef = lg.grad.data[k] * ddi[k];
          const double* gi = j.input_grads[i].row(k);
          for (std::size_t d = 0; d < dim; ++d) dldx(k, d) += coef * gi[d];
        }
      }
      report.gen_loss = lg.loss;
      if (kind == StrategyKind::f2a) {
        report.gen_loss += s.strategy.lam.beta * lambda * lambda;
        const std::vector<double> grad_vec(lg.grad.data.begin(),
                                           lg.grad.data.end());
        const double lstar_grad =
            lambda_gradient(grad_vec, j, s.strategy.lam);
        double p[1] = {s.strategy.lam.lambda_star};
        const double g[1] = {lstar_grad};
        adam_step(std::span<double>(p, 1), std::span<const double>(g, 1),
                  s.lambda_optimizer);
        s.strategy.lam.lambda_star = p[0];
        report.lambda = s.strategy.lam.lambda();
      }
      break;
    }
    case StrategyKind::gman_star:
    case StrategyKind::gman0: {
      const double lambda =
          kind == StrategyKind::gman_star ? s.strategy.lam.lambda() : 0.0;
      std::vector<double> losses(replies.size());
      std::vector<LossResult> lgs(replies.size());
      for (std::size_t i = 0; i < replies.size(); ++i) {
        Tensor2D row(1, batch);
        for (std::size_t k = 0; k < batch; ++k) row.data[k] = j.values(i, k);
        lgs[i] = loss_and_grad(s.loss_spec, row, y);
        losses[i] = lgs[i].loss;
      }
      const GmanResult agg = gman_aggregate(losses, lambda);
      for (std::size_t i = 0; i < replies.size(); ++i) {
        for (std::size_t k = 0; k < batch; ++k) {
          const double coef = agg.weights[i] * lgs[i].grad.data[k];
          const double* gi = j.input_grads[i].row(k);
          for (std::size_t d = 0; d < dim; ++d) dldx(k, d) += coef * gi[d];
        }
      }
      report.gen_loss = agg.loss;
      if (kind == StrategyKind::gman_star &&
          s.strategy.lam.lambda_star >= 0.0) {
        // The loss softmax is adversarial: lambda climbs the aggregated loss
        // to keep emphasizing the harshest discriminators.
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < losses.size(); ++i) {
          m1 += agg.weights[i] * losses[i];
          m2 += agg.weights[i] * losses[i] * losses[i];
        }
        const double ascent = m2 - m1 * m1;
        double p[1] = {s.strategy.lam.lambda_star};
        const double g[1] = {-ascent};
        adam_step(std::span<double>(p, 1), std::span<const double>(g, 1),
                  s.lambda_optimizer);
        s.strategy.lam.lambda_star = p[0];
        report.lambda = s.strategy.lam.lambda();
      }
      break;
    }
    case StrategyKind::mdgan:
    case StrategyKind::centralized: {
      // mdgan: the single scheduled reply; centralized: the only client.
      const JudgmentReply& r = replies.front();
      const LossResult lg = loss_and_grad(s.loss_spec, as_row(r.values), y);
      for (std::size_t k = 0; k < batch; ++k) {
        const double coef = lg.grad.data[k];
        const double* gi = r.input_grads.row(k);
        for (std::size_t d = 0; d < dim; ++d) dldx(k, d) += coef * gi[d];
      }
      report.gen_loss = lg.loss;
      break;
    }
  }

  const Gradients ggrads = backward(s.generator, gen_cache, dldx);
  adam_step(s.generator, ggrads, s.gen_optimizer);
  return report;
}

std::vector<Mode> scenario_modes(const RunConfig& cfg) {
  std::vector<Mode> modes;
  for (const auto& c : cfg.data.classes) {
    Mode m;
    m.radius = cfg.data.mode_radius;
    if (const auto* g = std::get_if<Gaussian1D>(&c)) {
      m.center = {g->mean};
    } else {
      const auto& g2 = std::get<Gaussian2D>(c);
      m.center = {g2.mean[0], g2.mean[1]};
    }
    modes.push_back(std::move(m));
  }
  return modes;
}

TrainingResult run_training(const RunConfig& cfg, const MessageTrace& trace,
                            std::vector<Tensor2D>* real_draw_log) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();

  const std::size_t N = cfg.data.num_clients;
  const std::vector<ClientDistribution> dists = partition_classes(
      cfg.data.classes.size(), N, cfg.data.partition, cfg.data.classes);
  const GridDomain grid = default_grid(dists, cfg.grid_points);
  const double Z = compute_Z(dists, grid);
  const DiscreteDensity p_max_ref = discretize(
      grid, [&](const double* x) { return p_max_density(dists, Z, x); });
  const std::vector<Mode> modes = scenario_modes(cfg);

  LossSpec loss_spec;
  loss_spec.kind = cfg.loss;
  loss_spec.validate();
  const Activation disc_head =
      cfg.loss == LossKind::bce ? Activation::sigmoid : Activation::linear;

  std::mt19937_64 init_rng(derive_seed(cfg.seed, 1));
  ServerState server;
  server.generator = make_mlp(cfg.generator.noise_dim, cfg.generator.hidden,
                              cfg.data.dim, cfg.generator.hidden_act,
                              Activation::linear, init_rng,
                              cfg.generator.slope, cfg.generator.out_scale);
  server.gen_optimizer =
      make_adam(server.generator.param_count(), cfg.adam_eta, cfg.adam_beta1,
                cfg.adam_beta2);
  server.lambda_optimizer =
      make_adam(1, cfg.adam_eta, cfg.adam_beta1, cfg.adam_beta2);
  server.strategy.kind = cfg.strategy;
  server.strategy.lam.lambda_star = cfg.lambda_init;
  server.strategy.lam.beta = cfg.beta;
  server.strategy.fixed_value = cfg.lambda_fixed;
  server.noise_dim = cfg.generator.noise_dim;
  server.loss_spec = loss_spec;
  server.rng.seed(derive_seed(cfg.seed, 2));

  const AdamState opt_template =
      make_adam(0, cfg.adam_eta, cfg.adam_beta1, cfg.adam_beta2);
  std::vector<ClientState> clients;
  for (std::size_t i = 0; i < N; ++i) {
    std::mt19937_64 drng(derive_seed(cfg.seed, 100 + i));
    MLPModel disc =
        make_mlp(cfg.data.dim, cfg.discriminator.hidden, 1,
                 cfg.discriminator.hidden_act, disc_head, drng,
                 cfg.discriminator.slope, cfg.discriminator.out_scale);
    ClientState c =
        make_client(i, std::move(disc), dists[i], loss_spec,
                    cfg.spectral_norm, opt_template,
                    derive_seed(cfg.seed, 200 + i));
    if (cfg.data.samples_per_client > 0)
      c.local_buffer =
          sample(c.local_distribution, cfg.data.samples_per_client, c.rng);
    c.real_draw_log = real_draw_log;
    clients.push_back(std::move(c));
  }

  TrainingResult result;
  result.Z = Z;

  auto gen_samples = [&](std::size_t n, std::uint64_t tag) {
    std::mt19937_64 eval_rng(derive_seed(cfg.seed, tag));
    const Tensor2D z = sample_noise(n, server.noise_dim, eval_rng);
    return forward(server.generator, z);
  };
  auto dump = [&](std::size_t iter) {
    result.dumps.push_back({iter, gen_samples(cfg.final_eval_samples,
                                              0xD000000ULL + iter)});
  };

  dump(0);
  const std::size_t mid = cfg.iterations / 2;

  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    const Tensor2D z = sample_noise(cfg.batch_size, server.noise_dim,
                                    server.rng);
    ForwardCache gen_cache;
    const Tensor2D fakes = forward(server.generator, z, &gen_cache);

    std::vector<double> disc_losses(N);
    for (std::size_t i = 0; i < N; ++i) {
      if (trace)
        trace(MessageDirection::server_to_client, i, FakeBatch{fakes});
      disc_losses[i] = client_train_step(clients[i], fakes);
      if (trace)
        trace(MessageDirection::client_to_server, i,
              TrainAck{i, disc_losses[i]});
    }

    // Judging reuses the training fake batch unless configured otherwise.
    ForwardCache judge_cache_storage;
    const ForwardCache* judge_cache = &gen_cache;
    Tensor2D judge_batch = fakes;
    if (cfg.fresh_judge_batch) {
      const Tensor2D z2 =
          sample_noise(cfg.batch_size, server.noise_dim, server.rng);
      judge_batch = forward(server.generator, z2, &judge_cache_storage);
      judge_cache = &judge_cache_storage;
    }

    std::vector<JudgmentReply> replies;
    if (cfg.strategy == StrategyKind::mdgan) {
      const std::size_t pick = mdgan_schedule(server.iteration, N);
      if (trace)
        trace(MessageDirection::server_to_client, pick,
              JudgeRequest{judge_batch});
      replies.push_back(client_judge(clients[pick], judge_batch));
      if (trace)
        trace(MessageDirection::client_to_server, pick,
              Message{replies.back()});
    } else {
      for (std::size_t i = 0; i < N; ++i) {
        if (trace)
          trace(MessageDirection::server_to_client, i,
                JudgeRequest{judge_batch});
        replies.push_back(client_judge(clients[i], judge_batch));
        if (trace)
          trace(MessageDirection::client_to_server, i,
                Message{replies.back()});
      }
    }

    const GeneratorStepReport report =
        server_generator_step(server, replies, *judge_cache);
    if (!std::isfinite(report.gen_loss) || !std::isfinite(report.lambda))
      throw NumericError(t);
    for (double dl : disc_losses)
      if (!std::isfinite(dl)) throw NumericError(t);
    server.iteration += 1;

    const bool last = (t + 1 == cfg.iterations);
    if ((t + 1) % cfg.metric_cadence == 0 || last) {
      MetricsRecord rec;
      rec.iteration = t + 1;
      rec.lambda = report.lambda;
      rec.generator_loss = report.gen_loss;
      rec.disc_losses = disc_losses;
      const std::size_t n_eval =
          last ? cfg.final_eval_samples : cfg.eval_samples;
      const Tensor2D samples = gen_samples(n_eval, 0xE7A1000ULL + t + 1);
      const ModeCoverageReport cov =
          mode_coverage(samples, modes, cfg.mode_threshold);
      rec.mode_fractions = cov.mass_fractions;
      rec.covered_count = cov.covered_count;
      rec.empirical_div = empirical_divergence(samples, p_max_ref).value;
      rec.wall_time = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t_start)
                          .count();
      result.metrics.push_back(std::move(rec));
    }
    if (t + 1 == mid && !last) dump(t + 1);
  }
  if (cfg.iterations > 0) dump(cfg.iterations);

  result.generator = server.generator;
  for (const ClientState& c : clients)
    result.discriminators.push_back(c.discriminator);
  result.final_lambda = strategy_trains_lambda(cfg.strategy)
                            ? server.strategy.lam.lambda()
                            : (cfg.strategy == StrategyKind::fixed_lambda
                                   ? cfg.lambda_fixed
                                   : 0.0);
  return result;
}

}  // namespace f2gan
