#include "actorflow/critic.hpp"

#include <cmath>
#include <stdexcept>

#include "actorflow/serialize.hpp"

namespace actorflow {

CriticModel CriticModel::make(const CriticConfig& cfg, Rng& rng) {
  CriticModel m;
  m.cfg_ = cfg;
  std::vector<std::size_t> sizes;
  sizes.push_back(cfg.condition_dim + cfg.action_dim);
  for (std::size_t h : cfg.hidden) sizes.push_back(h);
  sizes.push_back(1);
  m.net_ = MlpParams::make(sizes, Activation::kTanh, rng);
  m.adam_ = Adam(cfg.adam);
  return m;
}

Value CriticModel::logits(Tape& tape, Binder& bind, Value cond,
                          Value actions) const {
  const Tensor& av = tape.value(actions);
  if (av.cols() != cfg_.action_dim)
    throw std::invalid_argument("CriticModel: action width " +
                                std::to_string(av.cols()) + " != expected " +
                                std::to_string(cfg_.action_dim));
  Value in = tape.concat_cols(cond, actions);
  return net_.apply(tape, bind, in);
}

std::vector<double> CriticModel::predict(const Tensor& conditions,
                                         const Tensor& actions) const {
  Tape tape;
  Binder bind(tape);
  Value z = logits(tape, bind, tape.input(conditions), tape.input(actions));
  Value p = tape.sigmoid(z);
  return tape.value(p).values;
}

double CriticModel::predict_one(const std::vector<double>& condition,
                                const std::vector<double>& action) const {
  Tensor c(1, condition.size(), condition);
  Tensor a(1, action.size(), action);
  return predict(c, a)[0];
}

double CriticModel::train_step(const Tensor& conditions, const Tensor& actions,
                               const std::vector<double>& labels) {
  if (conditions.rows() == 0)
    throw std::invalid_argument("CriticModel::train_step: empty batch");
  if (labels.size() != conditions.rows())
    throw std::invalid_argument("CriticModel::train_step: label count mismatch");
  for (double y : labels)
    if (y != 0.0 && y != 1.0)
      throw std::invalid_argument("CriticModel::train_step: labels must be 0 or 1");

  Tape tape;
  Binder bind(tape);
  Value z = logits(tape, bind, tape.input(conditions), tape.input(actions));
  // softplus(z) - y*z is the stable form of BCE-with-logits
  Tensor y(labels.size(), 1, labels);
  Value loss = tape.mean_all(
      tape.sub(tape.softplus(z), tape.mul(tape.input(y), z)));
  const double loss_value = tape.value(loss).values[0];
  tape.backward(loss);

  auto params = parameters();
  std::vector<Tensor> grads;
  grads.reserve(params.size());
  for (Tensor* p : params) grads.push_back(bind.grad(*p));
  adam_.step(params, grads);
  return loss_value;
}

std::vector<Tensor*> CriticModel::parameters() {
  std::vector<Tensor*> out;
  net_.collect_parameters(out);
  return out;
}

nlohmann::json CriticModel::to_json() const {
  Json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["model"] = "critic";
  j["condition_dim"] = cfg_.condition_dim;
  j["action_dim"] = cfg_.action_dim;
  j["hidden"] = cfg_.hidden;
  j["net"] = mlp_to_json(net_);
  j["adam"] = adam_to_json(adam_);
  return j;
}

CriticModel CriticModel::from_json(const nlohmann::json& j) {
  CriticModel m;
  m.cfg_.condition_dim = j.at("condition_dim").get<std::size_t>();
  m.cfg_.action_dim = j.at("action_dim").get<std::size_t>();
  m.cfg_.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  m.net_ = mlp_from_json(j.at("net"));
  adam_from_json(j.at("adam"), m.adam_);
  return m;
}

}  // namespace actorflow
