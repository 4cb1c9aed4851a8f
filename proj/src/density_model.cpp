#include "actorflow/density_model.hpp"

#include <stdexcept>

#include "actorflow/serialize.hpp"

namespace actorflow {

DensityModel DensityModel::make(const ModelConfig& cfg, Rng& rng) {
  DensityModel m;
  m.cfg_ = cfg;
  if (cfg.type == "gmm") {
    m.impl_ = GmmModel::make(cfg, rng);
  } else if (cfg.type == "flow") {
    if (cfg.action_dim == 1)
      m.impl_ = SplineFlowDensity::make(cfg, rng);
    else
      m.impl_ = FlowDensity::make(cfg, rng);
  } else if (cfg.type == "mof") {
    m.impl_ = MofModel::make(cfg, rng);
  } else {
    throw std::invalid_argument("DensityModel: unknown type '" + cfg.type +
                                "' (expected gmm, flow or mof)");
  }
  return m;
}

Value DensityModel::log_prob(Tape& tape, Binder& bind, Value cond,
                             Value x) const {
  return std::visit(
      [&](const auto& impl) -> Value {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, std::monostate>)
          throw std::logic_error("DensityModel: empty model");
        else
          return impl.log_prob(tape, bind, cond, x);
      },
      impl_);
}

std::vector<double> DensityModel::log_prob_values(const Tensor& conditions,
                                                  const Tensor& x) const {
  Tape tape;
  Binder bind(tape);
  Value lp = log_prob(tape, bind, tape.input(conditions), tape.input(x));
  return tape.value(lp).values;
}

SampleBatch DensityModel::sample(Rng& rng,
                                 const std::vector<double>& condition,
                                 std::size_t n) const {
  return std::visit(
      [&](const auto& impl) -> SampleBatch {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, std::monostate>)
          throw std::logic_error("DensityModel: empty model");
        else
          return impl.sample(rng, condition, n);
      },
      impl_);
}

Value DensityModel::entropy_term(Tape& tape, Binder& bind,
                                 const Tensor& conditions,
                                 std::size_t samples_per_state,
                                 Rng& rng) const {
  return std::visit(
      [&](const auto& impl) -> Value {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, std::monostate>)
          throw std::logic_error("DensityModel: empty model");
        else
          return impl.entropy_term(tape, bind, conditions, samples_per_state,
                                   rng);
      },
      impl_);
}

std::vector<Tensor*> DensityModel::parameters() {
  return std::visit(
      [&](auto& impl) -> std::vector<Tensor*> {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, std::monostate>)
          throw std::logic_error("DensityModel: empty model");
        else
          return impl.parameters();
      },
      impl_);
}

std::vector<const Tensor*> DensityModel::parameters() const {
  auto mut = const_cast<DensityModel*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

nlohmann::json model_config_to_json(const ModelConfig& cfg) {
  return Json{{"type", cfg.type},
              {"action_dim", cfg.action_dim},
              {"condition_dim", cfg.condition_dim},
              {"components", cfg.components},
              {"init_std", cfg.init_std},
              {"fixed_std", cfg.fixed_std},
              {"fixed_std_value", cfg.fixed_std_value},
              {"gmm_hidden", cfg.gmm_hidden},
              {"init_mean_jitter", cfg.init_mean_jitter},
              {"coupling_layers", cfg.coupling_layers},
              {"st_hidden", cfg.st_hidden},
              {"s_clamp", cfg.s_clamp},
              {"feature_scale", cfg.feature_scale},
              {"cond_features", cfg.cond_features},
              {"cond_hidden", cfg.cond_hidden},
              {"spline_bins", cfg.spline_bins},
              {"bound_lo", cfg.bound_lo},
              {"bound_hi", cfg.bound_hi}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  cfg.type = j.at("type").get<std::string>();
  cfg.action_dim = j.at("action_dim").get<std::size_t>();
  cfg.condition_dim = j.at("condition_dim").get<std::size_t>();
  cfg.components = j.at("components").get<std::size_t>();
  cfg.init_std = j.at("init_std").get<double>();
  cfg.fixed_std = j.at("fixed_std").get<bool>();
  cfg.fixed_std_value = j.at("fixed_std_value").get<double>();
  cfg.gmm_hidden = j.at("gmm_hidden").get<std::vector<std::size_t>>();
  cfg.init_mean_jitter = j.at("init_mean_jitter").get<double>();
  cfg.coupling_layers = j.at("coupling_layers").get<std::size_t>();
  cfg.st_hidden = j.at("st_hidden").get<std::size_t>();
  cfg.s_clamp = j.at("s_clamp").get<double>();
  cfg.feature_scale = j.at("feature_scale").get<double>();
  cfg.cond_features = j.at("cond_features").get<std::size_t>();
  cfg.cond_hidden = j.at("cond_hidden").get<std::size_t>();
  cfg.spline_bins = j.at("spline_bins").get<std::size_t>();
  cfg.bound_lo = j.at("bound_lo").get<double>();
  cfg.bound_hi = j.at("bound_hi").get<double>();
  return cfg;
}

nlohmann::json DensityModel::to_json() const {
  Json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["model"] = cfg_.type;
  j["config"] = model_config_to_json(cfg_);
  Json params = Json::array();
  for (const Tensor* t : parameters()) params.push_back(tensor_to_json(*t));
  j["params"] = params;
  return j;
}

DensityModel DensityModel::from_json(const nlohmann::json& j) {
  const int version = j.at("format_version").get<int>();
  if (version != kCheckpointFormatVersion)
    throw std::runtime_error("DensityModel: unsupported checkpoint version " +
                             std::to_string(version));
  ModelConfig cfg = model_config_from_json(j.at("config"));
  Rng rng(0);  // layout only; values overwritten below
  DensityModel m = make(cfg, rng);
  auto params = m.parameters();
  const Json& stored = j.at("params");
  if (stored.size() != params.size())
    throw std::runtime_error("DensityModel: checkpoint parameter count " +
                             std::to_string(stored.size()) + " != expected " +
                             std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor t = tensor_from_json(stored[i]);
    if (!t.same_shape(*params[i]))
      throw std::runtime_error("DensityModel: checkpoint shape mismatch at " +
                               std::to_string(i));
    *params[i] = std::move(t);
  }
  return m;
}

void DensityModel::save(const std::string& path) const {
  write_json_file(path, to_json());
}

DensityModel DensityModel::load(const std::string& path) {
  return from_json(read_json_file(path));
}

}  // namespace actorflow
