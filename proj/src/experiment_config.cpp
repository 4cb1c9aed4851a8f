#include "actorflow/experiment_config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "actorflow/rng.hpp"
#include "actorflow/serialize.hpp"

namespace actorflow {

using Json = nlohmann::json;

namespace {

Json model_defaults(const std::string& type) {
  return Json{{"type", type},
              {"components", 4},
              {"init_std", 1.0},
              {"fixed_std", false},
              {"fixed_std_value", 0.5},
              {"gmm_hidden", Json::array()},
              {"init_mean_jitter", 0.01},
              {"coupling_layers", 4},
              {"st_hidden", 32},
              {"s_clamp", 3.0},
              {"feature_scale", 1.0},
              {"cond_features", 16},
              {"cond_hidden", 32},
              {"spline_bins", 32},
              {"bound_lo", 0.0},
              {"bound_hi", 1.0}};
}

Json grasp_model_defaults() {
  Json m = model_defaults("gmm");
  m["components"] = 6;
  m["init_std"] = 0.2;
  m["init_mean_jitter"] = 0.02;
  m["cond_features"] = 16;
  return m;
}

Json task_defaults() {
  return Json{{"object_class", "blocks"}, {"object_count", 2}};
}

Json critic_defaults() {
  return Json{{"hidden", Json::array({64, 64})},
              {"train_steps", 3000},
              {"batch_size", 128},
              {"lr", 0.001}};
}

Json grasp_cem_defaults() {
  return Json{{"population", 64}, {"elite_fraction", 0.1}, {"iterations", 3}};
}

Json five_point_model_entry(const std::string& label, const std::string& type,
                            double init_std) {
  Json m = model_defaults(type);
  m["label"] = label;
  m["init_std"] = init_std;
  m["feature_scale"] = 0.1;
  m["init_mean_jitter"] = 0.05;
  return m;
}

// keys present in the user config but absent from the defaults are errors
void check_unknown_keys(const Json& user, const Json& defaults,
                        const std::string& path) {
  if (!user.is_object()) return;
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string here = path.empty() ? it.key() : path + "." + it.key();
    if (!defaults.is_object() || !defaults.contains(it.key()))
      throw std::invalid_argument("config: unknown key '" + here + "'");
    const Json& d = defaults.at(it.key());
    if (d.is_object() != it.value().is_object())
      throw std::invalid_argument("config: wrong type for key '" + here + "'");
    if (d.is_object()) check_unknown_keys(it.value(), d, here);
  }
}

Json deep_merge(const Json& defaults, const Json& user) {
  Json out = defaults;
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (out.contains(it.key()) && out.at(it.key()).is_object() &&
        it.value().is_object())
      out[it.key()] = deep_merge(out.at(it.key()), it.value());
    else
      out[it.key()] = it.value();
  }
  return out;
}

}  // namespace

const std::vector<std::string>& experiment_tags() {
  static const std::vector<std::string> tags = {
      "scaling",        "five-point", "off-policy",
      "on-policy",      "inference-time", "policy-eval"};
  return tags;
}

Json default_experiment_params(const std::string& experiment) {
  if (experiment == "scaling") {
    Json actor_model = model_defaults("gmm");
    actor_model["components"] = 10;
    actor_model["init_std"] = 0.1;
    actor_model["init_mean_jitter"] = 0.05;
    return Json{
        {"dims", Json::array({1, 2, 3, 4, 5, 6})},
        {"radii", Json::array({0.1, 0.03})},
        {"repeats", 100},
        {"cem",
         {{"population", 100},
          {"elite_fraction", 0.1},
          {"max_iterations", 50},
          {"init_mean", 0.5},
          {"init_std", 0.5},
          {"std_floor", 0.001},
          {"clip_samples", true}}},
        {"actor",
         {{"enabled", true},
          {"dims", Json::array({1, 2, 3})},
          {"radius", 0.1},
          {"train_steps", 3000},
          {"batch_size", 128},
          {"lr", 0.001},
          {"eval_tasks", 100},
          {"samples_per_trial", 100},
          {"model", actor_model}}}};
  }
  if (experiment == "five-point") {
    return Json{
        {"models",
         Json::array({five_point_model_entry("gmm_std1", "gmm", 1.0),
                      five_point_model_entry("gmm_std10", "gmm", 10.0),
                      five_point_model_entry("flow", "flow", 1.0),
                      five_point_model_entry("mof_std1", "mof", 1.0),
                      five_point_model_entry("mof_std10", "mof", 10.0)})},
        {"train_steps", 4000},
        {"batch_size", 128},
        {"lr", 0.001},
        {"eval_tasks", 10},
        {"eval_samples_per_task", 10000},
        {"emit_density_grids", true},
        {"grid_resolution", 200}};
  }
  if (experiment == "off-policy") {
    return Json{{"task", task_defaults()},
                {"dataset_episodes", Json::array({400, 1600, 6400})},
                {"model", grasp_model_defaults()},
                {"critic", critic_defaults()},
                {"cem", grasp_cem_defaults()},
                {"train",
                 {{"batch_size", 128},
                  {"total_steps", 3000},
                  {"eval_interval", 1000},
                  {"eval_episodes", 200},
                  {"lr", 0.001}}},
                {"evaluate_critic", true}};
  }
  if (experiment == "on-policy") {
    return Json{{"task", task_defaults()},
                {"model", grasp_model_defaults()},
                {"train",
                 {{"batch_size", 128},
                  {"alpha", 0.0},
                  {"entropy_samples", 4},
                  {"eval_episodes", 200},
                  {"lr", 0.001}}},
                {"collect_with_model", true},
                {"warmup_success_transitions", 2000},
                {"episodes_per_cycle", 16},
                {"train_steps_per_cycle", 32},
                {"buffer_capacity", 100000},
                {"max_env_steps", 120000},
                {"eval_interval_env_steps", 4000},
                {"success_threshold", 0.5},
                {"stop_at_threshold", false},
                {"checkpoint_interval_env_steps", 0},
                {"resume_from", ""}};
  }
  if (experiment == "inference-time") {
    return Json{{"task", task_defaults()},
                {"model", grasp_model_defaults()},
                {"cem", grasp_cem_defaults()},
                {"decisions", 200},
                {"actor_samples", 64}};
  }
  if (experiment == "policy-eval") {
    return Json{{"task", task_defaults()},
                {"model", grasp_model_defaults()},
                {"critic", critic_defaults()},
                {"cem", grasp_cem_defaults()},
                {"dataset_episodes", 6000},
                {"train",
                 {{"batch_size", 128},
                  {"total_steps", 4000},
                  {"eval_interval", 4000},
                  {"eval_episodes", 0},
                  {"lr", 0.001}}},
                {"eval_episodes", 500},
                {"policies",
                 Json::array({"actor", "cem", "actor_critic"})}};
  }
  throw std::invalid_argument("unknown experiment tag: " + experiment);
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  if (!j.is_object())
    throw std::invalid_argument("config: top level must be an object");
  if (!j.contains("experiment"))
    throw std::invalid_argument("config: missing required key 'experiment'");
  const std::string tag = j.at("experiment").get<std::string>();

  Json defaults{{"experiment", tag},
                {"seeds", Json::array({1})},
                {"out_dir", "out"},
                {"threads", 1},
                {tag, default_experiment_params(tag)}};
  check_unknown_keys(j, defaults, "");
  Json merged = deep_merge(defaults, j);

  // the five-point models array replaces wholesale; fill per-entry defaults
  if (tag == "five-point") {
    Json entries = Json::array();
    for (const auto& entry : merged.at(tag).at("models")) {
      Json entry_defaults = model_defaults("gmm");
      entry_defaults["label"] = "";
      entry_defaults["feature_scale"] = 0.1;
      entry_defaults["init_mean_jitter"] = 0.05;
      check_unknown_keys(entry, entry_defaults,
                         tag + ".models[]");
      entries.push_back(deep_merge(entry_defaults, entry));
    }
    merged[tag]["models"] = entries;
  }

  ExperimentConfig cfg;
  cfg.experiment = tag;
  cfg.seeds = merged.at("seeds").get<std::vector<std::uint64_t>>();
  if (cfg.seeds.empty())
    throw std::invalid_argument("config: seeds must be non-empty");
  cfg.out_dir = merged.at("out_dir").get<std::string>();
  cfg.threads = merged.at("threads").get<std::size_t>();
  if (cfg.threads < 1)
    throw std::invalid_argument("config: threads must be >= 1");
  cfg.params = merged.at(tag);
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  return from_json(read_json_file(path));
}

Json ExperimentConfig::effective() const {
  return Json{{"experiment", experiment},
              {"seeds", seeds},
              {"out_dir", out_dir},
              {"threads", threads},
              {experiment, params}};
}

std::string config_hash(const Json& effective) {
  // out_dir and threads are execution details: identical experiments run
  // into different directories must hash identically
  Json canonical = effective;
  canonical.erase("out_dir");
  canonical.erase("threads");
  const std::string dump = canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace actorflow
