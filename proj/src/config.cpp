#include "f2gan/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace f2gan {

using nlohmann::json;

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

Activation activation_from_name(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "leaky_relu") return Activation::leaky_relu;
  if (s == "tanh") return Activation::tanh;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "linear") return Activation::linear;
  throw ConfigError("unknown activation: " + s);
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::leaky_relu: return "leaky_relu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::linear: return "linear";
  }
  return "?";
}

PartitionScheme partition_from_name(const std::string& s) {
  if (s == "non_overlapping") return PartitionScheme::non_overlapping;
  if (s == "moderately_overlapping")
    return PartitionScheme::moderately_overlapping;
  if (s == "fully_overlapping") return PartitionScheme::fully_overlapping;
  throw ConfigError("unknown partition scheme: " + s);
}

const char* partition_name(PartitionScheme p) {
  switch (p) {
    case PartitionScheme::non_overlapping: return "non_overlapping";
    case PartitionScheme::moderately_overlapping:
      return "moderately_overlapping";
    case PartitionScheme::fully_overlapping: return "fully_overlapping";
  }
  return "?";
}

void parse_mlp_spec(const json& j, MLPSpec& spec, bool is_generator) {
  if (is_generator && j.contains("noise_dim"))
    spec.noise_dim = j.at("noise_dim").get<std::size_t>();
  if (j.contains("hidden"))
    spec.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  if (j.contains("activation"))
    spec.hidden_act = activation_from_name(j.at("activation").get<std::string>());
  if (j.contains("slope")) spec.slope = j.at("slope").get<double>();
  if (j.contains("out_scale")) spec.out_scale = j.at("out_scale").get<double>();
}

ComponentDensity parse_class(const json& j, std::size_t dim) {
  if (dim == 1) {
    Gaussian1D g;
    g.mean = j.at("mean").is_array() ? j.at("mean")[0].get<double>()
                                     : j.at("mean").get<double>();
    g.std = j.at("std").get<double>();
    return g;
  }
  Gaussian2D g;
  const auto mean = j.at("mean").get<std::vector<double>>();
  if (mean.size() != 2) throw ConfigError("2d class mean must have 2 entries");
  g.mean = {mean[0], mean[1]};
  if (j.contains("cov")) {
    const auto cov = j.at("cov").get<std::vector<double>>();
    if (cov.size() != 4) throw ConfigError("2d class cov must have 4 entries");
    g.cov = {cov[0], cov[1], cov[2], cov[3]};
  } else if (j.contains("std")) {
    const double s = j.at("std").get<double>();
    g.cov = {s * s, 0.0, 0.0, s * s};
  }
  return g;
}

}  // namespace

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ":" +
                      std::to_string(line_of_offset(text, e.byte)) + ": " +
                      e.what());
  }
  RunConfig cfg;
  try {
    if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("iterations"))
      cfg.iterations = j.at("iterations").get<std::size_t>();
    if (j.contains("batch_size"))
      cfg.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("loss")) {
      const std::string l = j.at("loss").get<std::string>();
      if (l == "mse") cfg.loss = LossKind::mse;
      else if (l == "bce") cfg.loss = LossKind::bce;
      else throw ConfigError("unknown loss: " + l);
    }
    if (j.contains("strategy"))
      cfg.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    if (j.contains("lambda_init"))
      cfg.lambda_init = j.at("lambda_init").get<double>();
    if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
    if (j.contains("lambda_fixed"))
      cfg.lambda_fixed = j.at("lambda_fixed").get<double>();
    if (j.contains("spectral_norm"))
      cfg.spectral_norm = j.at("spectral_norm").get<bool>();
    if (j.contains("fresh_judge_batch"))
      cfg.fresh_judge_batch = j.at("fresh_judge_batch").get<bool>();
    if (j.contains("metric_cadence"))
      cfg.metric_cadence = j.at("metric_cadence").get<std::size_t>();
    if (j.contains("eval_samples"))
      cfg.eval_samples = j.at("eval_samples").get<std::size_t>();
    if (j.contains("final_eval_samples"))
      cfg.final_eval_samples = j.at("final_eval_samples").get<std::size_t>();
    if (j.contains("mode_threshold"))
      cfg.mode_threshold = j.at("mode_threshold").get<double>();
    if (j.contains("adam")) {
      const json& a = j.at("adam");
      if (a.contains("eta")) cfg.adam_eta = a.at("eta").get<double>();
      if (a.contains("beta1")) cfg.adam_beta1 = a.at("beta1").get<double>();
      if (a.contains("beta2")) cfg.adam_beta2 = a.at("beta2").get<double>();
    }
    if (j.contains("grid_points"))
      cfg.grid_points = j.at("grid_points").get<std::size_t>();
    if (j.contains("generator"))
      parse_mlp_spec(j.at("generator"), cfg.generator, true);
    if (j.contains("discriminator"))
      parse_mlp_spec(j.at("discriminator"), cfg.discriminator, false);

    const json& d = j.at("data");
    cfg.data.dim = d.at("dim").get<std::size_t>();
    if (cfg.data.dim != 1 && cfg.data.dim != 2)
      throw ConfigError("data.dim must be 1 or 2");
    for (const json& c : d.at("classes"))
      cfg.data.classes.push_back(parse_class(c, cfg.data.dim));
    if (d.contains("partition"))
      cfg.data.partition =
          partition_from_name(d.at("partition").get<std::string>());
    if (d.contains("num_clients"))
      cfg.data.num_clients = d.at("num_clients").get<std::size_t>();
    if (d.contains("samples_per_client"))
      cfg.data.samples_per_client =
          d.at("samples_per_client").get<std::size_t>();
    if (d.contains("mode_radius"))
      cfg.data.mode_radius = d.at("mode_radius").get<double>();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string canonical_config(const RunConfig& cfg) {
  json j;  // nlohmann::json keeps keys sorted, which makes this canonical
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  j["iterations"] = cfg.iterations;
  j["batch_size"] = cfg.batch_size;
  j["loss"] = cfg.loss == LossKind::mse ? "mse" : "bce";
  j["strategy"] = strategy_name(cfg.strategy);
  j["lambda_init"] = cfg.lambda_init;
  j["beta"] = cfg.beta;
  j["lambda_fixed"] = cfg.lambda_fixed;
  j["spectral_norm"] = cfg.spectral_norm;
  j["fresh_judge_batch"] = cfg.fresh_judge_batch;
  j["metric_cadence"] = cfg.metric_cadence;
  j["eval_samples"] = cfg.eval_samples;
  j["final_eval_samples"] = cfg.final_eval_samples;
  j["mode_threshold"] = cfg.mode_threshold;
  j["adam"] = {{"eta", cfg.adam_eta},
               {"beta1", cfg.adam_beta1},
               {"beta2", cfg.adam_beta2}};
  j["grid_points"] = cfg.grid_points;
  auto mlp_json = [](const MLPSpec& s, bool gen) {
    json m;
    if (gen) m["noise_dim"] = s.noise_dim;
    m["hidden"] = s.hidden;
    m["activation"] = activation_name(s.hidden_act);
    m["slope"] = s.slope;
    m["out_scale"] = s.out_scale;
    return m;
  };
  j["generator"] = mlp_json(cfg.generator, true);
  j["discriminator"] = mlp_json(cfg.discriminator, false);
  json data;
  data["dim"] = cfg.data.dim;
  data["partition"] = partition_name(cfg.data.partition);
  data["num_clients"] = cfg.data.num_clients;
  data["samples_per_client"] = cfg.data.samples_per_client;
  data["mode_radius"] = cfg.data.mode_radius;
  json classes = json::array();
  for (const auto& c : cfg.data.classes) {
    json cj;
    if (const auto* g = std::get_if<Gaussian1D>(&c)) {
      cj["mean"] = g->mean;
      cj["std"] = g->std;
    } else {
      const auto& g2 = std::get<Gaussian2D>(c);
      cj["mean"] = {g2.mean[0], g2.mean[1]};
      cj["cov"] = {g2.cov[0], g2.cov[1], g2.cov[2], g2.cov[3]};
    }
    classes.push_back(cj);
  }
  data["classes"] = classes;
  j["data"] = data;
  return j.dump();
}

std::uint64_t config_hash(const RunConfig& cfg) {
  const std::string s = canonical_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace f2gan
