#pragma once

#include <chrono>
#include <string_view>

#include "fairbroker/calculus.hpp"

namespace fairbroker {

enum class FeedbackEvent { FalsePositive, FalseNegative, CorrectEvaluation };

// Ground truth vs decision; true means "fair".
FeedbackEvent classify_feedback(bool truly_fair, bool decided_fair);

enum class AdaptiveMode { Off, PaperIVC, PaperVB };

std::string_view to_string(AdaptiveMode mode);
AdaptiveMode adaptive_mode_from_string(std::string_view text);  // off | paper-ivc | paper-vb

struct ControllerBounds {
  double min_fair_lo = 0.5;
  double min_fair_hi = 0.95;
  double max_unfair_lo = 0.05;
  double max_unfair_hi = 0.5;
  // PaperIVC sample-space and epoch knobs.
  long samples_floor = 10;
  long samples_cap = 200;  // operational cost ceiling
  long sample_step = 5;
  int correct_streak = 5;
  std::chrono::seconds epoch_step{900};
  std::chrono::seconds epoch_cap{4 * 3600};

  friend bool operator==(const ControllerBounds&, const ControllerBounds&) = default;
};

struct ControllerState {
  DecisionThresholds thresholds{};
  long samples_per_epoch = 50;
  std::chrono::seconds epoch_length{3600};
  AdaptiveMode mode = AdaptiveMode::PaperVB;
  double notch = 0.02;
  ControllerBounds bounds{};
  int streak = 0;  // consecutive correct evaluations (PaperIVC)

  friend bool operator==(const ControllerState&, const ControllerState&) = default;
};

// One feedback step.
//
// PaperVB: any error tightens (MinFair up, MaxUnfair down by one notch), a
// correct evaluation loosens by the same notch.
// PaperIVC: a false positive lowers MaxUnfair and grows the sample space, a
// false negative raises MinFair and grows the sample space; a streak of
// correct evaluations lengthens the epoch and shrinks the sample space.
// Off: returns the state unchanged.
//
// Everything is clamped to the bounds.
ControllerState apply_feedback(ControllerState state, FeedbackEvent event);

}  // namespace fairbroker
