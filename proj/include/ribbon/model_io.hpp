#pragma once

#include <string>

#include "ribbon/svm.hpp"

namespace ribbon::model_io {

inline constexpr int kModelVersion = 1;

/// Versioned JSON model document:
///   version, classes, gamma, c, standardizer{mean[], std[]},
///   machines[{neg, pos, support_vectors[][], dual_coefs[], bias}],
/// plus optional training{features[][], labels[]} and manifold[][].
/// Doubles are written in shortest round-trip form, so save/load is
/// bit-faithful.
std::string to_json(const svm::MulticlassSvm& model, int indent = -1);
svm::MulticlassSvm from_json(const std::string& text);

void save_model(const svm::MulticlassSvm& model, const std::string& path);
svm::MulticlassSvm load_model(const std::string& path);

}  // namespace ribbon::model_io
