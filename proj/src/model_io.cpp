#include "ribbon/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ribbon/error.hpp"

namespace ribbon::model_io {

using nlohmann::json;

std::string to_json(const svm::MulticlassSvm& model, int indent) {
  json machines = json::array();
  for (const auto& m : model.machines) {
    machines.push_back({{"neg", m.neg},
                        {"pos", m.pos},
                        {"support_vectors", m.support_vectors},
                        {"dual_coefs", m.dual_coefs},
                        {"bias", m.bias}});
  }
  json doc = {{"version", kModelVersion},
              {"classes", model.classes},
              {"gamma", model.params.gamma},
              {"c", model.params.c},
              {"standardizer", {{"mean", model.standardizer.mean}, {"std", model.standardizer.std}}},
              {"machines", machines}};
  if (!model.training.x.empty()) {
    doc["training"] = {{"features", model.training.x}, {"labels", model.training.labels}};
  }
  if (!model.manifold.empty()) doc["manifold"] = model.manifold;
  return doc.dump(indent);
}

svm::MulticlassSvm from_json(const std::string& text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) fail(ErrorKind::ParseError, "model is not a JSON object");
  try {
    const int version = doc.at("version").get<int>();
    if (version != kModelVersion) {
      fail(ErrorKind::ParseError, "unsupported model version " + std::to_string(version));
    }
    svm::MulticlassSvm model;
    model.classes = doc.at("classes").get<std::vector<int>>();
    model.params.gamma = doc.at("gamma").get<double>();
    model.params.c = doc.at("c").get<double>();
    model.standardizer.mean = doc.at("standardizer").at("mean").get<std::vector<double>>();
    model.standardizer.std = doc.at("standardizer").at("std").get<std::vector<double>>();
    for (const auto& m : doc.at("machines")) {
      svm::BinarySvm b;
      b.neg = m.at("neg").get<int>();
      b.pos = m.at("pos").get<int>();
      b.support_vectors = m.at("support_vectors").get<svm::FeatureMatrix>();
      b.dual_coefs = m.at("dual_coefs").get<std::vector<double>>();
      b.bias = m.at("bias").get<double>();
      if (b.dual_coefs.size() != b.support_vectors.size()) {
        fail(ErrorKind::ParseError, "machine has mismatched support vectors and coefficients");
      }
      model.machines.push_back(std::move(b));
    }
    if (doc.contains("training")) {
      model.training.x = doc["training"].at("features").get<svm::FeatureMatrix>();
      model.training.labels = doc["training"].at("labels").get<std::vector<int>>();
    }
    if (doc.contains("manifold")) model.manifold = doc["manifold"].get<svm::FeatureMatrix>();

    const std::size_t k = model.classes.size();
    if (k < 2 || model.machines.size() != k * (k - 1) / 2) {
      fail(ErrorKind::ParseError, "machine count does not match k(k-1)/2");
    }
    if (model.standardizer.mean.size() != model.standardizer.std.size() ||
        model.standardizer.mean.empty()) {
      fail(ErrorKind::ParseError, "malformed standardizer");
    }
    const auto pairs = svm::pair_order(model.classes);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (model.machines[i].neg != pairs[i].first || model.machines[i].pos != pairs[i].second) {
        fail(ErrorKind::ParseError, "machines are not in canonical pair order");
      }
    }
    return model;
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, e.what());
  }
}

void save_model(const svm::MulticlassSvm& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidInput, "cannot write model '" + path + "'");
  out << to_json(model, 1) << '\n';
}

svm::MulticlassSvm load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidInput, "cannot open model '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return from_json(buf.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.message());
  }
}

}  // namespace ribbon::model_io
