#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace likertopt {

/// 5-point Likert answer. Negative means the first candidate is better.
class LikertValue {
 public:
  static LikertValue make(int value);
  [[nodiscard]] int value() const noexcept { return value_; }
  friend auto operator<=>(const LikertValue&, const LikertValue&) = default;

 private:
  explicit constexpr LikertValue(int v) : value_(v) {}
  int value_ = 0;
};

/// 1 = not so sure ... 4 = absolutely sure.
class CertaintyLevel {
 public:
  static CertaintyLevel make(int value);
  [[nodiscard]] int value() const noexcept { return value_; }
  friend auto operator<=>(const CertaintyLevel&, const CertaintyLevel&) = default;

 private:
  explicit constexpr CertaintyLevel(int v) : value_(v) {}
  int value_ = 1;
};

struct Outcome {
  LikertValue p;
  CertaintyLevel c;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// The answers returned by a single preference query, stored in ascending
/// Likert order. Construct through validate_outcome_set().
class OutcomeSet {
 public:
  [[nodiscard]] const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }
  [[nodiscard]] int q() const noexcept { return static_cast<int>(outcomes_.size()); }
  [[nodiscard]] int p_min() const noexcept { return outcomes_.front().p.value(); }
  [[nodiscard]] int p_max() const noexcept { return outcomes_.back().p.value(); }
  [[nodiscard]] bool contains(int p) const noexcept;
  [[nodiscard]] std::vector<std::pair<int, int>> raw() const;

  friend bool operator==(const OutcomeSet&, const OutcomeSet&) = default;
  friend OutcomeSet validate_outcome_set(const std::vector<std::pair<int, int>>& raw);

 private:
  explicit OutcomeSet(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {}
  std::vector<Outcome> outcomes_;
};

inline constexpr int kMaxOutcomes = 5;

/// Checks, in order: emptiness, value ranges, duplicates, sign consistency,
/// contiguity, and the "absolutely sure implies a single answer" rule.
/// Throws likertopt::Error with the code of the first violated rule.
OutcomeSet validate_outcome_set(const std::vector<std::pair<int, int>>& raw);

struct PreferenceRecord {
  int i = 0;  // first candidate (the one the Likert value talks about)
  int j = 0;
  OutcomeSet outcome_set;
  std::uint64_t query_id = 0;
  friend bool operator==(const PreferenceRecord&, const PreferenceRecord&) = default;
};

/// Band template for one Likert level. Infinite sides carry slack sign 0.
struct BoundSpec {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  int slack_sign_lower = 0;  // -1 when the lower bound is finite
  int slack_sign_upper = 0;  // +1 when the upper bound is finite

  [[nodiscard]] bool has_lower() const noexcept { return slack_sign_lower != 0; }
  [[nodiscard]] bool has_upper() const noexcept { return slack_sign_upper != 0; }
};

void check_tolerances(double sigma1, double sigma2);

BoundSpec bounds_for_level(LikertValue p, double sigma1, double sigma2);

struct RecordWeights {
  double b = 0.0;          // weight of the shared slack
  std::vector<double> w;  // per-outcome slack weights
};

RecordWeights record_weights(const OutcomeSet& os);

// JSON: {"outcomes":[{"p":-1,"c":3}]}
OutcomeSet outcome_set_from_json(const nlohmann::json& j);
nlohmann::json outcome_set_to_json(const OutcomeSet& os);

}  // namespace likertopt
