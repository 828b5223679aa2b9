#include "likertopt/preference.hpp"

#include <algorithm>
#include <cmath>

#include "likertopt/error.hpp"

namespace likertopt {

LikertValue LikertValue::make(int value) {
  if (value < -2 || value > 2) {
    throw Error(ErrorCode::OutOfRangeLikert, "Likert value " + std::to_string(value));
  }
  return LikertValue(value);
}

CertaintyLevel CertaintyLevel::make(int value) {
  if (value < 1 || value > 4) {
    throw Error(ErrorCode::OutOfRangeCertainty, "certainty level " + std::to_string(value));
  }
  return CertaintyLevel(value);
}

bool OutcomeSet::contains(int p) const noexcept {
  return std::any_of(outcomes_.begin(), outcomes_.end(),
                     [p](const Outcome& o) { return o.p.value() == p; });
}

std::vector<std::pair<int, int>> OutcomeSet::raw() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(outcomes_.size());
  for (const auto& o : outcomes_) out.emplace_back(o.p.value(), o.c.value());
  return out;
}

OutcomeSet validate_outcome_set(const std::vector<std::pair<int, int>>& raw) {
  if (raw.empty()) throw Error(ErrorCode::Empty, "outcome set is empty");

  std::vector<Outcome> outcomes;
  outcomes.reserve(raw.size());
  for (const auto& [p, c] : raw) {
    outcomes.push_back({LikertValue::make(p), CertaintyLevel::make(c)});
  }
  std::sort(outcomes.begin(), outcomes.end(),
            [](const Outcome& a, const Outcome& b) { return a.p < b.p; });

  for (std::size_t t = 1; t < outcomes.size(); ++t) {
    if (outcomes[t].p == outcomes[t - 1].p) {
      throw Error(ErrorCode::DuplicateLikert,
                  "Likert value " + std::to_string(outcomes[t].p.value()) + " repeated");
    }
  }
  const int lo = outcomes.front().p.value();
  const int hi = outcomes.back().p.value();
  if (lo < 0 && hi > 0) {
    throw Error(ErrorCode::MixedSigns, "outcomes mix preferences for both candidates");
  }
  for (std::size_t t = 1; t < outcomes.size(); ++t) {
    if (outcomes[t].p.value() != outcomes[t - 1].p.value() + 1) {
      throw Error(ErrorCode::NotContiguous, "outcomes skip an intermediate Likert value");
    }
  }
  if (outcomes.size() > 1) {
    for (const auto& o : outcomes) {
      if (o.c.value() == 4) {
        throw Error(ErrorCode::CertaintyFourNotSingleton,
                    "an absolutely sure answer must be the only outcome");
      }
    }
  }
  return OutcomeSet(std::move(outcomes));
}

void check_tolerances(double sigma1, double sigma2) {
  if (!(sigma1 > 0.0) || !(sigma2 > sigma1) || !std::isfinite(sigma2)) {
    throw Error(ErrorCode::BadTolerances, "need 0 < sigma1 < sigma2");
  }
}

BoundSpec bounds_for_level(LikertValue p, double sigma1, double sigma2) {
  check_tolerances(sigma1, sigma2);
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (p.value()) {
    case -2: return {-inf, -sigma2, 0, +1};
    case -1: return {-sigma2, -sigma1, -1, +1};
    case 0: return {-sigma1, sigma1, -1, +1};
    case 1: return {sigma1, sigma2, -1, +1};
    default: return {sigma2, inf, -1, 0};
  }
}

RecordWeights record_weights(const OutcomeSet& os) {
  RecordWeights rw;
  for (const auto& o : os.outcomes()) {
    rw.b += o.c.value();
    rw.w.push_back(o.c.value() / 4.0);
  }
  // A single outcome's band coincides with the shared band.
  if (os.q() == 1) rw.w[0] = 0.0;
  return rw;
}

OutcomeSet outcome_set_from_json(const nlohmann::json& j) {
  const nlohmann::json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("outcomes")) throw Error(ErrorCode::SchemaError, "missing \"outcomes\"");
    arr = &j["outcomes"];
  }
  if (!arr->is_array()) throw Error(ErrorCode::SchemaError, "\"outcomes\" must be an array");
  std::vector<std::pair<int, int>> raw;
  for (const auto& item : *arr) {
    if (!item.is_object() || !item.contains("p") || !item.contains("c") ||
        !item["p"].is_number_integer() || !item["c"].is_number_integer()) {
      throw Error(ErrorCode::SchemaError, "each outcome needs integer \"p\" and \"c\"");
    }
    raw.emplace_back(item["p"].get<int>(), item["c"].get<int>());
  }
  return validate_outcome_set(raw);
}

nlohmann::json outcome_set_to_json(const OutcomeSet& os) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& o : os.outcomes()) arr.push_back({{"p", o.p.value()}, {"c", o.c.value()}});
  return {{"outcomes", arr}};
}

}  // namespace likertopt
