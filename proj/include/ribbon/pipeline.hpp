#pragma once

#include <vector>

#include "ribbon/signal.hpp"
#include "ribbon/stream.hpp"
#include "ribbon/svm.hpp"

namespace ribbon::pipeline {

svm::LabeledData to_labeled(const signal::StateDataset& dataset);

/// Trains on the calibration dataset and attaches the calibration manifold.
svm::MulticlassSvm train_from_calibration(const signal::Calibration& calibration,
                                          const svm::TrainOptions& options = {});

double training_accuracy(const svm::MulticlassSvm& model);

struct TrialClassification {
  stream::StreamResult stream;
  stream::ManifoldReport report;
};

/// Streams every frame of the trial through a StreamClassifier and measures
/// the classified trajectory against the model manifold.
TrialClassification classify_trial(const svm::MulticlassSvm& model,
                                   const signal::TrialRecording& trial,
                                   const stream::StreamOptions& options = {});

}  // namespace ribbon::pipeline
