#include "actorflow/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace actorflow {

Json tensor_to_json(const Tensor& t) {
  return Json{{"shape", t.shape}, {"values", t.values}};
}

Tensor tensor_from_json(const Json& j) {
  auto shape = j.at("shape").get<std::vector<std::size_t>>();
  auto values = j.at("values").get<std::vector<double>>();
  if (shape.size() != 2)
    throw std::runtime_error("tensor_from_json: expected rank-2 shape");
  return Tensor(shape[0], shape[1], std::move(values));
}

Json mlp_to_json(const MlpParams& p) {
  Json j;
  j["activation"] = to_string(p.act);
  j["weights"] = Json::array();
  j["biases"] = Json::array();
  for (const auto& w : p.weights) j["weights"].push_back(tensor_to_json(w));
  for (const auto& b : p.biases) j["biases"].push_back(tensor_to_json(b));
  return j;
}

MlpParams mlp_from_json(const Json& j) {
  MlpParams p;
  p.act = activation_from_string(j.at("activation").get<std::string>());
  for (const auto& w : j.at("weights")) p.weights.push_back(tensor_from_json(w));
  for (const auto& b : j.at("biases")) p.biases.push_back(tensor_from_json(b));
  if (p.weights.size() != p.biases.size() || p.weights.empty())
    throw std::runtime_error("mlp_from_json: inconsistent layer counts");
  return p;
}

Json adam_to_json(const Adam& a) {
  Json j;
  j["step"] = a.step_count();
  j["lr"] = a.config().lr;
  j["beta1"] = a.config().beta1;
  j["beta2"] = a.config().beta2;
  j["eps"] = a.config().eps;
  j["m"] = Json::array();
  j["v"] = Json::array();
  for (const auto& t : const_cast<Adam&>(a).first_moments())
    j["m"].push_back(tensor_to_json(t));
  for (const auto& t : const_cast<Adam&>(a).second_moments())
    j["v"].push_back(tensor_to_json(t));
  return j;
}

void adam_from_json(const Json& j, Adam& a) {
  AdamConfig cfg;
  cfg.lr = j.at("lr").get<double>();
  cfg.beta1 = j.at("beta1").get<double>();
  cfg.beta2 = j.at("beta2").get<double>();
  cfg.eps = j.at("eps").get<double>();
  a = Adam(cfg);
  std::vector<Tensor> m, v;
  for (const auto& t : j.at("m")) m.push_back(tensor_from_json(t));
  for (const auto& t : j.at("v")) v.push_back(tensor_from_json(t));
  a.restore(j.at("step").get<long>(), std::move(m), std::move(v));
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << j.dump(2) << "\n";
}

Json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  Json j;
  try {
    j = Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error("parse error in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace actorflow
