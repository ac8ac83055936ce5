#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "f2gan/adam.hpp"
#include "f2gan/aggregation.hpp"
#include "f2gan/analysis.hpp"
#include "f2gan/datagen.hpp"
#include "f2gan/loss.hpp"
#include "f2gan/mlp.hpp"
#include "f2gan/spectral_norm.hpp"

namespace f2gan {

struct MLPSpec {
  std::size_t noise_dim = 16;  // generator only
  std::vector<std::size_t> hidden{64, 64};
  Activation hidden_act = Activation::relu;
  double slope = 0.2;
  double out_scale = 1.0;  // initial scale of the head weights
};

struct DataScenario {
  std::size_t dim = 1;
  std::vector<ComponentDensity> classes;
  PartitionScheme partition = PartitionScheme::non_overlapping;
  std::size_t num_clients = 3;
  // 0 = draw fresh real mini-batches from the analytic distribution every
  // step; otherwise each client pins a finite buffer of this many samples.
  std::size_t samples_per_client = 0;
  double mode_radius = 1.0;
};

struct RunConfig {
  std::string name = "run";
  std::uint64_t seed = 1;
  std::size_t iterations = 1000;
  std::size_t batch_size = 64;
  LossKind loss = LossKind::mse;
  StrategyKind strategy = StrategyKind::f2a;
  double lambda_init = 0.1;
  double beta = 0.1;
  double lambda_fixed = 0.0;  // fixed_lambda strategy only
  bool spectral_norm = false;
  bool fresh_judge_batch = false;
  std::size_t metric_cadence = 100;
  std::size_t eval_samples = 2000;        // in-run metric evaluations
  std::size_t final_eval_samples = 10000; // final record and dumps
  double mode_threshold = 0.10;
  double adam_eta = 2e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  std::size_t grid_points = 0;  // 0 = dimension default
  MLPSpec generator;
  MLPSpec discriminator;
  DataScenario data;

  void validate() const;
};

// Everything that crosses the client/server boundary. Real client samples
// never appear in any variant; the audit test verifies that over a full run.
struct FakeBatch {
  Tensor2D samples;
};
struct JudgeRequest {
  Tensor2D samples;
};
struct JudgmentReply {
  std::size_t client_id = 0;
  std::vector<double> values;
  Tensor2D input_grads;
};
struct TrainAck {
  std::size_t client_id = 0;
  double disc_loss = 0.0;
};
using Message = std::variant<FakeBatch, JudgeRequest, JudgmentReply, TrainAck>;

enum class MessageDirection { server_to_client, client_to_server };
using MessageTrace =
    std::function<void(MessageDirection, std::size_t client_id, const Message&)>;

struct ClientState {
  std::size_t client_id = 0;
  MLPModel discriminator;
  AdamState disc_optimizer;
  std::vector<SpectralNormState> sn_states;
  bool use_spectral_norm = false;
  ClientDistribution local_distribution;
  std::optional<Tensor2D> local_buffer;  // finite X_i mode
  LossSpec loss_spec;
  std::mt19937_64 rng;
  // Test hook: when set, every real mini-batch drawn locally is appended
  // here so the audit can prove none of it crossed the boundary.
  std::vector<Tensor2D>* real_draw_log = nullptr;

  // Discriminator with spectral normalization applied (the raw model when
  // normalization is off); refreshed after every train step.
  MLPModel effective;
};

ClientState make_client(std::size_t id, MLPModel discriminator,
                        ClientDistribution dist, LossSpec loss_spec,
                        bool spectral_norm, const AdamState& opt_template,
                        std::uint64_t seed);

// One local discriminator step: fresh real mini-batch + the provided fakes,
// one Adam update. Returns the discriminator loss. Real data never leaves
// this function.
double client_train_step(ClientState& c, const Tensor2D& fake_batch);

// Evaluate D_i and dD_i/dx on the samples; no state changes.
JudgmentReply client_judge(const ClientState& c, const Tensor2D& samples);

struct ServerState {
  MLPModel generator;
  AdamState gen_optimizer;
  AggregationStrategy strategy;
  AdamState lambda_optimizer;  // single-parameter state for lambda_star
  std::size_t noise_dim = 16;
  std::size_t iteration = 0;
  LossSpec loss_spec;
  std::mt19937_64 rng;
};

struct GeneratorStepReport {
  double gen_loss = 0.0;
  double lambda = 0.0;
};

// Assembles the per-sample loss gradient from the replies according to the
// active strategy, backpropagates it through the generator and applies one
// Adam step (plus the lambda update where the strategy trains it).
GeneratorStepReport server_generator_step(
    ServerState& s, const std::vector<JudgmentReply>& replies,
    const ForwardCache& gen_cache);

struct MetricsRecord {
  std::size_t iteration = 0;
  double lambda = 0.0;
  double generator_loss = 0.0;
  std::vector<double> disc_losses;
  std::vector<double> mode_fractions;
  std::size_t covered_count = 0;
  double empirical_div = 0.0;
  double wall_time = 0.0;
};

struct SampleDump {
  std::size_t iteration = 0;
  Tensor2D samples;
};

struct TrainingResult {
  std::vector<MetricsRecord> metrics;
  std::vector<SampleDump> dumps;
  MLPModel generator;
  std::vector<MLPModel> discriminators;
  double final_lambda = 0.0;
  double Z = 0.0;
  std::vector<std::string> warnings;
};

// Thrown when a loss or lambda turns non-finite; carries the iteration.
struct NumericError : std::runtime_error {
  std::size_t iteration;
  explicit NumericError(std::size_t it)
      : std::runtime_error("non-finite value at iteration " +
                           std::to_string(it)),
        iteration(it) {}
};

// trace observes every message crossing the client/server boundary.
// real_draw_log, when set, collects every real mini-batch drawn inside any
// client; the decentralization audit compares the two streams.
TrainingResult run_training(const RunConfig& cfg,
                            const MessageTrace& trace = {},
                            std::vector<Tensor2D>* real_draw_log = nullptr);

// Modes of the scenario's target distribution (class component means).
std::vector<Mode> scenario_modes(const RunConfig& cfg);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace f2gan
