#include "ribbon/pipeline.hpp"

#include "ribbon/error.hpp"

namespace ribbon::pipeline {

svm::LabeledData to_labeled(const signal::StateDataset& dataset) {
  svm::LabeledData data;
  data.x.reserve(dataset.samples.size());
  data.labels.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) {
    data.x.push_back({s.features[0], s.features[1]});
    data.labels.push_back(s.state);
  }
  return data;
}

svm::MulticlassSvm train_from_calibration(const signal::Calibration& calibration,
                                          const svm::TrainOptions& options) {
  auto model = svm::train_multiclass(to_labeled(calibration.dataset), options);
  model.manifold.clear();
  model.manifold.reserve(calibration.manifold.size());
  for (const auto& p : calibration.manifold) model.manifold.push_back({p[0], p[1]});
  return model;
}

double training_accuracy(const svm::MulticlassSvm& model) {
  const auto& x = model.training.x;
  if (x.empty()) fail(ErrorKind::InvalidInput, "model carries no training data");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (svm::predict(model, x[i]) == model.training.labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(x.size());
}

TrialClassification classify_trial(const svm::MulticlassSvm& model,
                                   const signal::TrialRecording& trial,
                                   const stream::StreamOptions& options) {
  stream::StreamClassifier classifier(model, options);
  for (const auto& f : trial.frames) classifier.push(f);
  classifier.finish();
  TrialClassification out;
  out.stream = classifier.result();
  std::vector<signal::FeaturePair> trajectory;
  trajectory.reserve(out.stream.samples.size());
  for (const auto& s : out.stream.samples) {
    if (!s.excluded) trajectory.push_back(s.features);
  }
  out.report = stream::manifold_report(trajectory, out.stream.events, stream::manifold_points(model),
                                       model.standardizer);
  return out;
}

}  // namespace ribbon::pipeline
