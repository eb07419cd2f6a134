#pragma once

#include <fstream>
#include <memory>
#include <string>

#include "json.hpp"
#include "svmcs/error.hpp"
#include "svmcs/svm.hpp"

namespace svmcs {

inline constexpr const char* classifier_format = "svmcs-classifier";
inline constexpr int classifier_version = 1;

// Only the support vectors are stored; they determine the decision function.
inline nlohmann::json to_json(const TrainedClassifier& clf) {
  nlohmann::json j;
  j["format"] = classifier_format;
  j["version"] = classifier_version;
  j["kernel"] = {{"type", "rbf"}, {"sigma2", clf.params().sigma2}};
  j["c"] = clf.params().c;
  j["bias"] = clf.bias();
  j["dim"] = clf.dim();
  auto& sv = j["support_vectors"] = nlohmann::json::array();
  auto& alphas = j["alphas"] = nlohmann::json::array();
  auto& labels = j["labels"] = nlohmann::json::array();
  const auto& train = clf.training();
  for (std::size_t i : clf.solution().support_indices) {
    const auto p = train.points()[i];
    sv.push_back(std::vector<double>(p.begin(), p.end()));
    alphas.push_back(clf.solution().alphas[i]);
    labels.push_back(to_int(train.labels()[i]));
  }
  if (clf.domain()) {
    j["domain"] = {{"lower", clf.domain()->lower()}, {"upper", clf.domain()->upper()}};
  }
  return j;
}

inline TrainedClassifier classifier_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string{}) != classifier_format)
      fail(errc::format_error, "not a classifier file");
    const int version = j.at("version").get<int>();
    if (version != classifier_version)
      fail(errc::format_error, "unsupported classifier version " + std::to_string(version));
    if (j.at("kernel").at("type").get<std::string>() != "rbf")
      fail(errc::format_error, "unsupported kernel type");
    KernelParams params{j.at("kernel").at("sigma2").get<double>(), j.at("c").get<double>()};
    params.validate();
    const auto dim = j.at("dim").get<std::size_t>();
    const auto& sv = j.at("support_vectors");
    const auto& alphas = j.at("alphas");
    const auto& labels = j.at("labels");
    if (sv.size() != alphas.size() || sv.size() != labels.size())
      fail(errc::format_error, "support vector arrays differ in length");

    PointSet pts(dim);
    std::vector<Label> lab;
    DualSolution sol;
    for (std::size_t i = 0; i < sv.size(); ++i) {
      auto p = sv[i].get<std::vector<double>>();
      if (p.size() != dim) fail(errc::format_error, "support vector has the wrong dimension");
      pts.push_back(p);
      lab.push_back(label_from_int(labels[i].get<int>()));
      sol.alphas.push_back(alphas[i].get<double>());
      sol.support_indices.push_back(i);
    }
    sol.bias = j.at("bias").get<double>();
    TrainedClassifier clf(std::make_shared<const LabeledGrid>(std::move(pts), std::move(lab)),
                          std::move(sol), params);
    if (j.contains("domain")) {
      const auto& d = j.at("domain");
      clf.set_domain(Box(d.at("lower").get<point>(), d.at("upper").get<point>()));
    }
    return clf;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::format_error, std::string("malformed classifier file: ") + e.what());
  }
}

inline void save_classifier(const TrainedClassifier& clf, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::invalid_argument, "cannot write " + path);
  out << to_json(clf).dump(1) << '\n';
}

inline TrainedClassifier load_classifier(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::invalid_argument, "cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::format_error, std::string("malformed classifier file: ") + e.what());
  }
  return classifier_from_json(j);
}

}  // namespace svmcs
